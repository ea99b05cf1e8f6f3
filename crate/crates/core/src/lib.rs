//! Random Čech complexes over Poisson processes on the flat torus `T^d`.
//!
//! The crate samples point clouds, builds `C(P, r)` for `r < r_max = 1/6`,
//! computes Betti numbers over GF(2), enumerates critical points of the
//! distance function, counts Θ-cycles, tests coverage, and runs seeded sweeps.

mod affine;
pub mod cech;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod homology;
pub mod morse;
mod neighbors;
pub mod sampling;
pub mod textio;
pub mod theta;

pub use cech::{build_complex, miniball_radius, neighbor_pairs, Ball, CechComplex, Simplex, SimplexLayer};
pub use error::{Error, Result};
pub use experiments::{
    estimate_constants, fit_constants, run_grid_point, run_trial, sweep, trial_seed, CensusSeries, ConstantFit,
    Estimate, GridPoint, GridResult, GridSummary, LambdaRule, Mean, Proportion, SweepConfig, SweepReport, TrialRecord,
};
pub use geometry::{
    ball_volume, intersection_volume_unit, lift_cluster, toroidal_distance, unit_ball_volume, GeometryContext,
    TorusPoint, R_CONV, R_MAX,
};
pub use homology::{betti_numbers, boundary_matrix, euler_characteristic, BettiVector, BoundaryMatrix};
pub use morse::{
    circumsphere, enumerate_critical_points, euler_coefficients, expected_ck, expected_euler, is_covered,
    poisson_upper_tail, Circumsphere, CriticalCandidate, CriticalCensus,
};
pub use sampling::{count_in_ball, sample_poisson, sample_poisson_seeded, PointCloud, RngStream};
pub use theta::{annulus_covered, count_theta_cycles, count_theta_cycles_in, phi, ThetaCount, ThetaCycle, ThetaParams};
