//! Geodesic well distances on S² for the conformal metric `√Φ |dz|`, the
//! surface-tension table, well-distance fields and optimal transition profiles.

mod distance;
mod mesh;
mod profile;

pub use distance::{
    geodesic_distance, geodesic_path, great_circle_action, path_action, surface_tension_table, well_distance_field,
    GeodesicPath, WellDistanceFields,
};
pub use mesh::SphereMesh;
pub use profile::{optimal_profile, TransitionProfile, LAYER_HALF_WIDTH, MOLLIFIER_FRACTION};
