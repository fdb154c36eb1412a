pub mod bakry_emery;
pub mod complex;
pub mod curvature;
pub mod error;
pub mod flow;
pub mod generators;
pub mod graph;
pub mod homology;
pub mod json;
pub mod linalg;
pub mod lp;
pub mod metric;
pub mod rational;
pub mod rigidity;
