//! Kähler charts, curvature at a point, normal coordinates and the model catalog.

mod catalog;
mod chart;
mod curvature;
mod normal;

pub use catalog::{
    ball_unitary, catalog, catalog_names, disk_automorphism, flat, fubini_study, model_curvature, poincare_disk,
    poincare_polydisk, complex_hyperbolic_ball, ModelCurvature,
};
pub use chart::{kahler_residual, validate_metric, KahlerChart, MetricSource, Region, HERMITIAN_TOL, KAHLER_TOL, POSITIVITY_FLOOR};
pub use curvature::{christoffel, curvature_from_metric_jets, curvature_tensor, CurvaturePoint};
pub use normal::{normal_chart, normal_chart_with_frame, NormalCoordinates};
