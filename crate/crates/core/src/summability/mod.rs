//! Riesz and Cesàro summability of spectral measures, finite-part
//! distributions, moment expansions and distributional point values.

pub mod finite_part;
pub mod measure;
pub mod moments;
pub mod point_value;
pub mod riesz;

pub use finite_part::{finite_part_eval, FinitePart};
pub use measure::SpectralMeasure;
pub use moments::{moment_expansion_partial, smear_measure, MomentList};
pub use point_value::{default_family, point_value, point_value_with, PointValueConfig, Side};
pub use riesz::{
    cesaro_limit, cesaro_order_test, cesaro_order_test_with, continuous_riesz_by_quadrature, riesz_mean,
    riesz_mean_with_error, riesz_means, CesaroReport, OrderProbe, OrderTestConfig, RieszValue, Verdict,
};
