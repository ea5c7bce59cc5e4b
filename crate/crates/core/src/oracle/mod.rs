//! Numerical pairings of currents with test forms.

pub mod cauchy;
pub(crate) mod engine;
pub mod extrapolate;
pub mod pairing;
pub mod profile;
pub mod pushforward;
pub mod quad;
pub mod regularized;
pub mod report;
pub mod testform;

pub use engine::Weight;
pub use pairing::{
    calibrate_residue_constants, pair, pair_lambda, pair_lambda_direct, residue_constants, Calibration, OracleOptions,
};
pub use profile::{Bump, ChiProfile};
pub use pushforward::{pushforward_pair, MonomialMap};
pub use regularized::{bm_pair, pair_regularized, RegularizationSpec};
pub use report::PairingReport;
pub use testform::TestForm;
