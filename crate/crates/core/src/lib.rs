pub mod analysis;
pub mod axioms;
pub mod cli;
pub mod io;
pub mod model;
pub mod rules;
pub mod solver;

mod serde_ext;
