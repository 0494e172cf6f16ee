//! Distribution fits, goodness of fit, bootstrap errors and curve fits.

pub mod anderson_darling;
pub mod bootstrap;
pub mod density;
pub mod lm;
pub mod mle;
pub mod times;

pub use anderson_darling::{anderson_darling, AndersonDarling};
pub use bootstrap::{bootstrap_times, BootstrapStat, BootstrapTimes, DEFAULT_RESAMPLES};
pub use density::{pdf_3p, Family, Gamma3Params, Lognormal3Params, ThreeParam};
pub use lm::{
    f_theta, fit_f_theta, fit_power_law, fit_rational_unreparameterized, levenberg_marquardt,
    DataPoint, LmFit, LmSettings, ParamEstimate, PowerFit, ThetaFit,
};
pub use mle::{mle_fit, MleFit, MIN_FIT_SAMPLES};
pub use times::{
    bootstrap_over_grid, data_points, grid_seed, GridPoint, TimeStatistic, DEFAULT_K_GRID,
};
