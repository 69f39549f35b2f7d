pub mod lattice;
pub mod fqf;
pub mod graph;
pub mod geometricity;
pub mod census;
