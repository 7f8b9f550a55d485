//! Closed-form and semi-analytic evaluations: moments of the twirled error
//! distribution, the optimal-bias estimate, the fault-tolerance lower bound
//! and lattice-sum logical characteristic functions.

mod lattice;
mod moments;
pub mod quad;
mod twirl;

pub use lattice::{
    in_patch, logical_char_function, posterior_from_chi, posterior_from_components, syndrome_components,
    vacuum_posterior, GaussianChi, LogicalPauli, SyndromeSeries, VacuumPosterior,
};
pub use moments::{
    beta, bias_split, gaussian_moment, lambda_opt_asymptotic, leading_shear_coefficient, moments, MomentSummary,
};
pub use twirl::{
    c_delta_lambda, cubic_twirled_density, ft_lambda, ft_lower_bound, ft_validity_limit, normal, normal_mass,
    theta3, BoundResult, TwirledCubicDensity, PATCH_HALF_WIDTH, SERIES_CUTOFF,
};
