//! Admissible pairs, foliation involutions, balanced series, Morse
//! normalizations and related constructions for planar diffeomorphism jets.

pub mod conserv;
pub mod curve;
pub mod fol;
pub mod jet;
pub mod morse;
pub mod solver;

pub use conserv::{is_formally_conservative, linearize_holomorphic, ConservativityReport, Linearization};
pub use curve::{restrict_to_curve, solve_curve_match, tau_along_curve};
pub use fol::{balanced, balanced_from, ell_of, gamma_of, tau_via_ell, tau_via_recursion, BalancedData, Involution};
pub use jet::DiffeoJet;
pub use morse::{geometric_normal_form, morse_phi, polar_decompose, polar_reconstruct, PolarParts};
pub use solver::{
    chi_of, conjugacy_residual, group_act, hat_compose, orbit_conjugator, resonant_free, resonant_part,
    solve_admissible, solve_admissible_chi, AdmissiblePair, AdmissibleSolver, DegreeReport,
    Selection,
};
