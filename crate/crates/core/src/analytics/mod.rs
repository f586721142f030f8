//! Large-`N` predictions: support boundaries and densities.

mod contour;
mod density;
mod levelset;
mod resolvent;

pub use contour::{
    ellipse_contour, general_contour, hausdorff_distance, spectrum_contour, tridiag_contour, ContourCurve,
    ContourMethod, PsiPoint, TridiagVariant, BISECTION_TOLERANCE, BRANCH_TOLERANCE, DEFAULT_POINTS, MAX_RAY_RADIUS,
    MIN_POINTS,
};
pub use density::{
    density_diagonal, green_diagonal, loop_solve_diagonal, marginal_density, mp_density, mp_support, radial_density,
    simpson, simpson_refined, Axis, DensityModel, LoopSolution, DEFAULT_QUAD_POINTS, QUAD_TOLERANCE,
};
pub use levelset::{level_curves, polygon_area};
pub use resolvent::{Resolvent, ResolventTraces};
