//! Quantum correlation measures for finite-dimensional bipartite and
//! tripartite states: entropies, Wootters concurrence and entanglement of
//! formation, projective and POVM discord, and numerical oracles for the
//! underlying optimizations.
//!
//! Discord conditional entropies are evaluated through the purification
//! duality whenever the complementary entanglement of formation is known in
//! closed form, and otherwise by a seeded multi-start search.

pub mod discord;
pub mod error;
pub mod families;
pub mod linalg;
pub mod measurement;
pub mod optim;
pub mod oracle;
pub mod pair;
pub mod par;
pub mod random;
pub mod state;

pub use discord::{discord, CorrelationReport, DiscordOptions, Method, Route, Variant};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use measurement::{Ensemble, ProjectiveMeasurement, RankOnePovm};
pub use oracle::{SearchConfig, SearchResult};
pub use par::Execution;
pub use state::{DensityMatrix, PureState, StateFile};
