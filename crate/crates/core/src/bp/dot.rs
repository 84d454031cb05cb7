//! Graphviz export and the matching parser.

use std::collections::HashMap;

use regex::Regex;

use super::{BpError, BranchingProgram, State, StateId, VarLabel};
use crate::instance::{ProblemKind, VarId};
use crate::tree::TreeShape;

/// Renders the program as a `digraph`. Query states are labelled with their
/// variable, finals with `out=<r>`, and every edge with its value.
pub fn export_dot(bp: &BranchingProgram) -> String {
    let kind = match bp.kind {
        ProblemKind::Function => "function",
        ProblemKind::Boolean => "boolean",
    };
    let mut out = String::from("digraph bp {\n");
    out.push_str(&format!(
        "  graph [d={}, h={}, k={}, kind={}, deterministic={}];\n",
        bp.shape.d, bp.shape.h, bp.k, kind, bp.deterministic
    ));
    for (id, st) in bp.states.iter().enumerate() {
        let start = if id == bp.start { ", start=true" } else { "" };
        match st {
            State::Query { var, .. } => {
                let label = VarLabel { var: *var, d: bp.shape.d, k: bp.k };
                out.push_str(&format!("  s{id} [label=\"{label}\"{start}];\n"));
            }
            State::Final { output } => {
                out.push_str(&format!("  s{id} [label=\"out={output}\", shape=doublecircle{start}];\n"));
            }
        }
    }
    for (id, st) in bp.states.iter().enumerate() {
        if let State::Query { edges, .. } = st {
            for (label, to) in edges {
                out.push_str(&format!("  s{id} -> s{to} [label=\"{label}\"];\n"));
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Parses text produced by [`export_dot`].
pub fn parse_dot(text: &str) -> Result<BranchingProgram, BpError> {
    let err = |m: &str| BpError::Parse(m.to_string());
    let graph = Regex::new(r"graph \[d=(\d+), h=(\d+), k=(\d+), kind=(\w+), deterministic=(\w+)\]").expect("regex");
    let node = Regex::new(r#"^\s*s(\d+) \[label="([^"]*)"(, shape=doublecircle)?(, start=true)?\];"#).expect("regex");
    let edge = Regex::new(r#"^\s*s(\d+) -> s(\d+) \[label="(\d+)"\];"#).expect("regex");
    let func = Regex::new(r"^f(\d+)\(([\d,]+)\)$").expect("regex");
    let leaf = Regex::new(r"^x(\d+)$").expect("regex");
    let out = Regex::new(r"^out=(\d+)$").expect("regex");

    let g = graph.captures(text).ok_or_else(|| err("missing graph attributes"))?;
    let num = |s: &str| s.parse::<usize>().map_err(|e| BpError::Parse(e.to_string()));
    let (d, h, k) = (num(&g[1])?, num(&g[2])?, num(&g[3])?);
    if d < 2 || h < 2 || k < 1 {
        return Err(err("bad tree parameters"));
    }
    let kind = match &g[4] {
        "function" => ProblemKind::Function,
        "boolean" => ProblemKind::Boolean,
        other => return Err(BpError::Parse(format!("unknown kind {other}"))),
    };
    let deterministic = &g[5] == "true";
    let mut states: HashMap<StateId, State> = HashMap::new();
    let mut start = None;
    let mut edges: Vec<(StateId, u32, StateId)> = Vec::new();
    for line in text.lines() {
        if let Some(c) = node.captures(line) {
            let id = num(&c[1])?;
            let label = &c[2];
            let st = if let Some(o) = out.captures(label) {
                State::Final { output: num(&o[1])? as u32 }
            } else if let Some(f) = func.captures(label) {
                let args: Vec<u32> = f[2].split(',').map(|a| a.parse().map_err(|_| err("bad tuple"))).collect::<Result<_, _>>()?;
                if args.len() != d || args.iter().any(|&a| a == 0 || a as usize > k) {
                    return Err(err("tuple does not match d and k"));
                }
                State::Query { var: VarId::func(num(&f[1])?, &args, k), edges: vec![] }
            } else if let Some(x) = leaf.captures(label) {
                State::Query { var: VarId::Leaf { node: num(&x[1])? }, edges: vec![] }
            } else {
                return Err(BpError::Parse(format!("unrecognized label {label}")));
            };
            if c.get(4).is_some() {
                start = Some(id);
            }
            states.insert(id, st);
        } else if let Some(c) = edge.captures(line) {
            edges.push((num(&c[1])?, num(&c[3])? as u32, num(&c[2])?));
        }
    }
    let n = states.len();
    let mut ordered: Vec<State> = (0..n).map(|i| states.remove(&i).ok_or(BpError::MissingState(i))).collect::<Result<_, _>>()?;
    for (from, label, to) in edges {
        match ordered.get_mut(from) {
            Some(State::Query { edges, .. }) => edges.push((label, to)),
            _ => return Err(BpError::MissingState(from)),
        }
    }
    let bp = BranchingProgram {
        shape: TreeShape::new(d, h),
        k,
        kind,
        deterministic,
        start: start.ok_or_else(|| err("no start state"))?,
        states: ordered,
    };
    bp.validate()?;
    Ok(bp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bp::tests::echo_leaf;

    #[test]
    fn roundtrip() {
        let bp = echo_leaf(3);
        let text = export_dot(&bp);
        assert_eq!(text.lines().filter(|l| l.contains("->")).count(), 3);
        assert_eq!(parse_dot(&text).unwrap(), bp);
    }

    #[test]
    fn single_state() {
        let bp = BranchingProgram {
            shape: TreeShape::new(2, 2),
            k: 1,
            kind: ProblemKind::Function,
            deterministic: true,
            start: 0,
            states: vec![State::Final { output: 1 }],
        };
        let text = export_dot(&bp);
        assert!(!text.contains("->"));
        assert_eq!(text.lines().filter(|l| l.trim_start().starts_with("s0 [")).count(), 1);
        assert_eq!(parse_dot(&text).unwrap(), bp);
    }

    #[test]
    fn garbage_rejected() {
        assert!(parse_dot("digraph {}").is_err());
    }
}
