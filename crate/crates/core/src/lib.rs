pub mod algebra;
pub mod cli;
pub mod document;
pub mod frame;
pub mod group;
pub mod nonrep;
