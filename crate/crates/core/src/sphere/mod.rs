//! Functions on the unit sphere with the probability-normalized measure dω.

mod field;
mod grid;
mod harmonics;

pub use field::SphereField;
pub use grid::{SphereGrid, DEFAULT_BAND_LIMIT, DEFAULT_N_MU, DEFAULT_N_PHI};
pub use harmonics::HarmonicSpectrum;
