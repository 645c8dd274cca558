//! Undecidability gadgets: word encodings and the Paterson morphism,
//! similarity normalization of matrix families, the lift of real matrices
//! to quantum channels with a prescribed fidelity identity, and
//! bounded-depth semi-deciders for the resulting reachability problems.

pub mod bundle;
pub mod error;
pub mod fixtures;
pub mod kraus;
pub mod lift;
pub mod prop1;
pub mod search;
pub mod words;

pub use bundle::{from_json, to_json, BundleDoc};
pub use error::{GadgetError, Result};
pub use kraus::{kraus_normalize, NormalizedFamily};
pub use lift::{lift_lemma2, Lemma2Lift};
pub use prop1::{build_prop1, build_prop1_with, verify_prop1_identity, GadgetBundle, GadgetParams, IdentityCheck, Prop1Input};
pub use search::{
    bruteforce_bundle, bruteforce_oracle, bundle_threshold_search, mortality_search, oracle_verdict, pcp_search,
    threshold_search, ChannelInstance, OracleEntry, OracleVerdict, SearchOutcome, SearchStats, Verdict,
};
pub use words::{gamma, gamma_square, sigma, PcpInstance, Word};
