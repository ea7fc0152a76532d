//! Spectral density estimators and the estimated-field workflow.

mod detrend;
mod kernel;
mod report;

pub use detrend::{design_matrix, detrend_least_squares, monomials, DetrendResult};
pub use kernel::{
    estimate_on_grid, kernel_density_estimate, lag_window_estimate, lag_window_on_grid, EstimationGrid,
    EstimatorForm, SpectralEstimate, LAG_CUTOFF,
};
pub use report::{estimated_field_report, EstimatedFieldReport, DEFAULT_Q};
