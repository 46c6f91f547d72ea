//! Ultrametric fitting on sparse edge-weighted graphs.
//!
//! An ultrametric on a connected graph is an edge weighting in which no edge
//! of a cycle is heavier than the heaviest of the remaining cycle edges. The
//! constraint is eliminated by composing any cost with the min-max operator
//! [`subdominant()`], which maps an arbitrary weighting to its subdominant
//! ultrametric and has a cheap sub-gradient ([`subdominant_vjp`]). Gradient
//! descent over the unconstrained weights ([`fit()`]) then minimizes costs such
//! as the squared distance to the input, a cluster-size penalty, triplet
//! constraints, or a soft relaxation of Dasgupta's cost.
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the command
//! line front end live in the companion `ultrafit` crate.
//!
//! ```
//! use ultrafit_core::{build_graph, subdominant, EdgeWeightVector};
//!
//! let g = build_graph(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
//! let w = EdgeWeightVector::new(vec![1.0, 2.0, 3.0]).unwrap();
//! let res = subdominant(&g, &w).unwrap();
//! assert_eq!(res.u.as_slice(), &[1.0, 2.0, 2.0]);
//! assert_eq!(res.pass_edge, vec![0, 1, 1]);
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cost;
mod error;
pub mod fit;
pub mod graph;
pub mod hierarchy;
pub mod lca;
pub mod oracle;
pub mod points;
pub mod subdominant;

pub use cost::{
    cost_closest, cost_cluster_size, cost_composite, cost_dasgupta, cost_triplet, soft_cardinal,
    CostSpec, CostTerm, CostValue, Triplet, TripletSet,
};
pub use error::{Error, Result};
pub use fit::{fit, normalize_trace, FitConfig, FitResult, Optimizer};
pub use graph::{build_graph, is_ultrametric, EdgeWeightVector, EdgeWeightedGraph};
pub use hierarchy::{cut_to_k_clusters, node_attributes, single_linkage, Dendrogram, NodeAttributes};
pub use lca::{build_lca, LcaIndex};
pub use points::{knn_mst_graph, sample_triplets, PointSet};
pub use subdominant::{subdominant, subdominant_vjp, SubdominantResult};
