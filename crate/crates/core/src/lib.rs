//! Approximation algorithms for the asymmetric traveling salesman problem.

pub mod asadpour;
pub mod circulation;
pub mod error;
pub mod feige_singh;
pub mod held_karp;
pub mod lp;
pub mod maxent;
pub mod model;
pub mod oracle;
pub mod seed;
pub mod solver;
pub mod thin;
pub mod tsplib;

pub use error::{Error, Result};
pub use model::{gen_instance, metric_closure, shortcut, GenModel, Instance, SpanningPath, Tour, Walk};
