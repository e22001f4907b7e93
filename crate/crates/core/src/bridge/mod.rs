//! Stereographic transfer from S² to the plane, where the Euler–Lagrange
//! equation becomes Δv + (1+|y|²)^l e^v = 0, and the mass, nodal-domain and
//! eigenvalue audits built on it.

mod bol;
mod eigen;
mod nodal;
mod planar;
mod stereo;

pub use bol::{
    bol_audit, critical_radius, region_mass, supersolution_margin, BolAudit, BolOptions, BolVerdict, Region,
};
pub use eigen::{domain_mass, first_eigenvalue, Domain, EigenOptions, EigenResult};
pub use nodal::{mass_ledger, nodal_domains, DiskGrid, MassLedger, NodalDomain, NodalReport};
pub use planar::{
    angular_derivative, beta_l, critical_point_to_origin, fd_laplacian, linearized_residual, liouville_bubble,
    planar_mass, pohozaev_check, pohozaev_window, to_planar, v_star, v_star_field, BetaOptions, BetaReport,
    PlanarField, PohozaevReport,
};
pub use stereo::{jacobian, stereo_lift, stereo_map};
