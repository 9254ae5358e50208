//! Experiments on the geometry of finite-dimensional spaces: type and cotype constants, the
//! classification of diagonal operators, and pre-Hilbert–Schmidt sampling.

mod diagonal;
mod phs;
mod types;

pub use diagonal::{
    diag_classify, diag_growth_experiment, DiagonalSpec, GrowthRow, GrowthTable, GrowthThresholds, GrowthTrend,
    PredictedClass, SigmaRule, TableRow, ClassificationVerdict, PartialSum, MAX_GROWTH_DIM,
};
pub use phs::{phs_lower, phs_vs_gamma_report, phs_vs_pi2_report, PhsBudget, PhsGammaReport, PhsGammaRow, PhsPi2Report};
pub use types::{cotype_constant_lower, type_constant_lower};
