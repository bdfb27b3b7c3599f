//! Point counts on the level sets of `Σ d_i ((x - b_i)(y - c_i))⁻¹` and the
//! exponential sums attached to them.

pub mod gpoly;
pub mod histogram;
pub mod instance;
pub mod singular;
pub mod variety;

pub use gpoly::{newton_check, GLambda, NewtonReport};
pub use histogram::{bilinear_sum, histogram_nn, BilinearReport, LambdaHistogram};
pub use instance::BilinearInstance;
pub use singular::{containment_check, exceptional_lambdas, line_effect_check, prop2_verify};
pub use variety::{phi_identity_verify, relation9_verify};
