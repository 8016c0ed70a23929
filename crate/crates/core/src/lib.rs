//! Quador lattices with quadric fillets.

pub mod algebra;
pub mod cli;
pub mod conics;
pub mod fillet;
pub mod io;
pub mod lattice;
pub mod solid;
pub mod verify;
