//! Tree evaluation, pebbling games and branching programs.

pub mod bounds;
pub mod bp;
pub mod compile;
pub mod instance;
pub mod pebbling;
pub mod search;
pub mod single;
pub mod tree;
