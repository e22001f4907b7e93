//! The functional J_α on S², the center-of-mass constraint, and its
//! constrained minimization.

mod functional;
mod minimize;
pub(crate) mod probe;
mod recenter;
mod scan;
mod second_variation;

pub use functional::{
    center_of_mass, el_residual, field_norms, gradient_j, j_alpha, normalize_mass, quadratic_form, FieldNorms,
};
pub use minimize::{minimize, random_start, MinimizeOptions, MinimizeResult, MinimizeSummary, Verdict};
pub use probe::{two_bubble_field, two_bubble_j, two_bubble_probe, ProbePoint, ProbeReport, ProbeVerdict};
pub use recenter::{recenter, Recentered};
pub use scan::{alpha_scan, ScanCell, ScanRow, START_AMPLITUDE, START_DEGREE};
pub use second_variation::{second_variation, Mode, SecondVariationReport};
