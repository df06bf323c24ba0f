//! Right-hand sides of the moment identities, evaluated so they can be
//! compared with [`crate::zeta_line::moment_direct`].

mod closed_form;
mod formulas;
mod multi;
mod scan;

pub use closed_form::{
    closed_form_poly, closed_form_rhs, t_coeff, PolyMomentResult, POLY_MAX, T_COEFF_MAX,
};
pub use formulas::{
    formula_k1, formula_k1_opts, formula_k2, formula_k2_opts, formula_k3, formula_k3_opts,
    K3Breakdown, K3_FLOOR,
};
pub use multi::{
    m4_single_integral, multi_integral_form, multi_integral_form_opts, RayTable, MULTI_K2_FLOOR,
    MULTI_K3_FLOOR,
};
pub use scan::{scan_delta, scan_delta_opts, ScanRow};
