//! Rolling surfaces, their twistor distribution and Cartan's quartic.
//!
//! Two Riemann surfaces rolling on each other without slipping or twisting
//! sweep out a rank-2 distribution on a 5-dimensional configuration space.
//! The same space is the bundle of selfdual totally null planes over the
//! split-signature product `g₁ ⊕ (−g₂)`, and the distribution is the
//! horizontal lift of those planes. This crate builds the distribution in
//! explicit charts, evaluates Cartan's quartic invariant in closed form for a
//! surface with a Killing vector rolling on a constant-curvature surface,
//! and checks it against the Weyl tensor of the associated (3,2)-signature
//! conformal metric computed by finite differences.
//!
//! Modules, bottom-up:
//!
//! * [`split4`]: Hodge star, null planes and connection coefficients on ℝ^(2,2).
//! * [`surfaces`]: surface catalog, orthonormal frames and curvature jets.
//! * [`distribution`]: the rolling distribution, Lie brackets, growth vector.
//! * [`cartan`]: closed-form quartic, root types, G₂ verdicts.
//! * [`oracle`]: conformal metric, numerical curvature, Weyl-based quartic.
//! * [`rolling`]: fourth-order integration of admissible motions.
//! * [`embedding`]: surfaces of revolution in ℝ³ and mesh export.

pub mod cartan;
pub mod distribution;
pub mod embedding;
mod error;
pub mod fd;
pub mod oracle;
pub mod quadrature;
pub mod rolling;
pub mod split4;
pub mod surfaces;

pub use error::{Error, Result};

pub use cartan::{CartanQuartic, RootTag, RootType};
pub use distribution::{ConfigPoint, Frame5, RollingPair};
pub use surfaces::{Epsilon, SurfaceFamily, SurfaceJet};

/// Seventeen significant digits, the shortest form that round-trips every
/// `f64`; used by every text export.
pub fn fmt_sig(v: f64) -> String {
    format!("{v:.16e}")
}
