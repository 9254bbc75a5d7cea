//! Scalar fractional-calculus kernels: the Gamma family, the
//! Mittag-Leffler function, the monomial rule of the Riemann-Liouville
//! integral, and the discrete convolution weights used by the scheme
//! and the error metrics.

mod gamma;
mod ml;
mod weights;

pub use gamma::{gamma, gamma_signed, lgamma, rgamma};
pub use ml::{mittag_leffler, MittagLefflerParams};
pub use weights::{frac_integral_monomial, rl_cell_average_weights, KernelWeights};

pub(crate) use weights::second_difference_pow;
