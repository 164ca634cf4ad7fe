//! Seeded generators for three primal-difficult benchmark families over
//! Erdős–Rényi graphs: fixed-charge multicommodity network flow (FCMCNF),
//! maximum satisfiability (MAXSAT), and generalized independent set (GISP).
//!
//! All generated problems are minimization MILPs; the maximization families
//! are negated at construction. Generation is fully determined by
//! `(family, n, seed)`.

mod config;
mod fcmcnf;
mod gisp;
mod graph;
mod maxsat;
mod suite;

pub use config::{Family, FamilyParseError, FcmcnfParams, GenConfig, GispParams, SizeClass};
pub use fcmcnf::{build_fcmcnf, gen_fcmcnf, Commodity, FcmcnfError};
pub use gisp::{build_gisp, gen_gisp};
pub use graph::{derive_seed, gen_er_graph, ErGraph};
pub use maxsat::gen_maxsat;
pub use suite::{gen_instance, gen_suite, manifest_files, InstanceRecord, SuiteError, SuiteManifest};
