//! Zoll surfaces of revolution, geodesic period sweeps and the normalized
//! Ricci flow.
//!
//! The crate builds Gambier's gong and the Michel family of Zoll spheres,
//! certifies the common geodesic period by direct integration, evolves the
//! metrics under the area-normalized Ricci flow and tracks how the equator
//! length and the geodesic periods respond.
//!
//! ```
//! use zollflow::{catalog, profile};
//!
//! let gong = catalog::gong_normalized();
//! let k = profile::curvature_meridian(&gong, 0.0).unwrap();
//! assert!((k - 4.0 * (2.0 - 2f64.sqrt())).abs() < 1e-12);
//! ```

pub mod catalog;
pub mod cheb;
pub mod cli;
pub mod geodesics;
pub mod profile;
pub mod quad;
pub mod ricci;
pub mod roots;
pub mod weinstein;
