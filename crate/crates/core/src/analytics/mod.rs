//! Closed-form distributions and ergodic-rate integrals of the scheduler,
//! each paired with a direct quadrature or enumeration oracle.

pub mod audit;
pub mod best_beams;
pub mod femtocell;
pub mod macrocell;
pub mod numerics;
pub mod quadrature;
pub mod rate;
pub mod throughput;

pub use best_beams::{pmf_nb_given_nq, BestBeamLaw, MacroPopulation};
pub use femtocell::{
    pdf_gamma_f, pdf_interference_given, pdf_xf, pmf_nq, pmf_nq_given_xf, prob_beam_qualified,
    FemtoAnalysisParams, InterferenceForm, XfConditioning,
};
pub use macrocell::{
    cdf_gamma_mk, conditional_gamma_m, pdf_gamma_mk, prob_kq_nonzero, MacroAnalysisParams,
};
pub use numerics::Crosscheck;
pub use quadrature::{Estimate, Quadrature};
pub use rate::rate_integral;
pub use throughput::{
    analyze_drop, pmf_nb, throughput_femto, throughput_macro, DropAnalysis, DropSetup,
};
