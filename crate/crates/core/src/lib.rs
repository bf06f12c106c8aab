//! Radii of starlikeness for three classes of normalized analytic functions
//! whose second Maclaurin coefficient is fixed.
//!
//! Each class member `f` has `zf'(z)/f(z)` confined, on `|z| <= r`, to a disc
//! with centre `(1+r^4)/(1-r^4)` and a class-dependent radius. A target region
//! (parabolic, lemniscate, cardioid, ...) contains that disc while the radius
//! stays below the region's margin at the centre; the radius of starlikeness is
//! the first `r` where the two meet.
//!
//! The crate computes that radius two ways and checks they agree:
//!
//! * [`radius_poly`] builds closed-form polynomials in `r` and isolates the
//!   smallest root in `(0, 1)`;
//! * [`verify::radius_by_margin`] solves `margin(a(r)) = R(r)` directly.
//!
//! Sharpness is certified by evaluating explicit extremal functions
//! ([`extremal`]) at the touching point.
//!
//! ```
//! use starlike_core::{classbounds::ClassSpec, regions::RegionKind, radius_poly};
//!
//! let spec = ClassSpec::k1(-1.0).unwrap();
//! let poly = radius_poly::build_polynomial(&spec, RegionKind::Parabolic);
//! let root = radius_poly::smallest_root_in_unit(&poly).unwrap();
//! assert!((root.rho - 0.2021347).abs() < 1e-6);
//! ```

pub mod classbounds;
pub mod error;
pub mod extremal;
pub mod radius_poly;
pub mod regions;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
