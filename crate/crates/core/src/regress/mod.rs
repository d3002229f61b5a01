//! Weighted least squares, Newey-West HAC covariance and Frisch-Waugh-Lovell
//! residualization. Every estimation in the crate routes through here.

mod design;
mod fwl;
mod hac;
mod sum;
mod wls;

pub use design::{DesignMatrix, INTERCEPT};
pub use fwl::fwl_residualize;
pub use hac::{bartlett_weight, newey_west, newey_west_se, nw_bandwidth, HacCovariance, Kernel};
pub use sum::NeumaierSum;
pub use wls::{fit_wls, FitResult, CONDITION_LIMIT};
