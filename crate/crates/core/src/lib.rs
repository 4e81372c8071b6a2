//! Fourier restriction and extension on hypersurfaces: sampled fields,
//! surface quadrature, rotation averaging, Frostman certificates,
//! curve auto-convolution and smooth division by differential polynomials.

pub mod autoconv;
pub mod error;
pub mod field;
pub mod fit;
pub mod frostman;
pub mod poly;
pub mod profile;
pub mod quadrature;
pub mod restriction;
pub mod rotation;
pub mod surface;
pub mod symbol;

pub use error::{Error, Result};
pub use field::{
    fourier_transform, inverse_fourier_transform, lp_norm, schwartz_generator, Domain, Grid,
    SampledField, TestFunction,
};
pub use fit::{fit_power_law, PowerLaw};
pub use num_complex::Complex64;
pub use poly::Polynomial;
pub use surface::{
    ext_operator, make_circle, make_graph_curve, make_sphere, partition_of_unity, trace, trace_fn,
    BumpProfile, Extension, GraphFunction, SphereResolution, Surface, SurfaceDensity, SurfaceKind,
};
pub use restriction::{
    adjoint_check, decay_exponent, extend, knapp_function, lq_tail_profile, restrict, DecayFit,
    ExtensionEvaluation, KnappField, TailClass, TailProfile,
};
pub use rotation::{
    average_density, average_field, make_rotation_weight, polar_lq_distance, rotate_density,
    PolarDistance, Rotation, RotationWeight,
};
pub use frostman::{
    dimension_lower_bound, frostman_from_potential_check, frostman_statistic, potential,
    DimensionCertificate, DiscreteMeasure, HatFunction, PotentialReport,
};
pub use autoconv::{
    autoconvolution_density, blowup_test, change_of_variables_check, phi_tilde, sn_region, solve_sumset,
    BlowupReport, CurveChart, SnRegion, SumsetPoint,
};
pub use symbol::{
    apply_diff_poly, power_space_member, smooth_divide, sobolev_norm, sobolev_ratio_experiment,
    solve_diff_equation, DiffPolynomial, ExperimentReport, Family, SobolevParams, Trend,
};
