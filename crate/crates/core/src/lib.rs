#![cfg_attr(not(test), no_std)]
extern crate alloc;

pub mod acg;
pub mod assembly;
pub mod atlas;
pub mod cayley;
pub mod egf;
pub mod graph;
pub mod permgroup;
pub mod real;
pub mod rigidity;
pub mod treecount;
