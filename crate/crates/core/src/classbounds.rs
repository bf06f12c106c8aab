//! The three function classes and the disc that contains `zf'(z)/f(z)` over `|z| <= r`.
//!
//! All radius math keys on the normalized parameters (`n~` for K1, `(m, n)`
//! for K2, `(u, v)` for K3). The raw `(b, c)` are kept when known because the
//! sharpness points depend on their signs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassKind {
    K1,
    K2,
    K3,
}

impl ClassKind {
    pub const ALL: [ClassKind; 3] = [ClassKind::K1, ClassKind::K2, ClassKind::K3];

    pub fn name(self) -> &'static str {
        match self {
            ClassKind::K1 => "K1",
            ClassKind::K2 => "K2",
            ClassKind::K3 => "K3",
        }
    }

    pub fn from_name(name: &str) -> Option<ClassKind> {
        ClassKind::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Normalized parameters of a class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Normalized {
    K1 { ntilde: f64 },
    K2 { m: f64, n: f64 },
    K3 { u: f64, v: f64 },
}

/// A class together with its parameters.
///
/// Invariants: K1 `n~ in [0, 2]`; K2 `m, n in [0, 2]`; K3 `u in [0, 1]`, `v in [0, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    params: Normalized,
    /// Raw `(b, c)`; `c` is 0 for K1.
    raw: Option<(f64, f64)>,
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x.abs() <= 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("|{name}| = {} exceeds 1", x.abs())))
    }
}

fn check_range(name: &str, x: f64, hi: f64) -> Result<()> {
    if x.is_finite() && (0.0..=hi).contains(&x) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} = {x} outside [0, {hi}]")))
    }
}

impl ClassSpec {
    pub fn k1(b: f64) -> Result<Self> {
        check_unit("b", b)?;
        Ok(ClassSpec { params: Normalized::K1 { ntilde: (2.0 * b).abs() }, raw: Some((b, 0.0)) })
    }

    pub fn k2(b: f64, c: f64) -> Result<Self> {
        check_unit("b", b)?;
        check_unit("c", c)?;
        let m = (4.0 * b - 2.0 * c).abs();
        if m > 2.0 {
            return Err(Error::Parameter(format!("m = |4b - 2c| = {m} exceeds 2")));
        }
        Ok(ClassSpec { params: Normalized::K2 { m, n: (2.0 * c).abs() }, raw: Some((b, c)) })
    }

    pub fn k3(b: f64, c: f64) -> Result<Self> {
        check_unit("b", b)?;
        check_unit("c", c)?;
        let u = (2.0 * c - 3.0 * b).abs();
        if u > 1.0 {
            return Err(Error::Parameter(format!("u = |2c - 3b| = {u} exceeds 1")));
        }
        Ok(ClassSpec { params: Normalized::K3 { u, v: (2.0 * c).abs() }, raw: Some((b, c)) })
    }

    pub fn k1_normalized(ntilde: f64) -> Result<Self> {
        check_range("n~", ntilde, 2.0)?;
        Ok(ClassSpec { params: Normalized::K1 { ntilde }, raw: None })
    }

    pub fn k2_normalized(m: f64, n: f64) -> Result<Self> {
        check_range("m", m, 2.0)?;
        check_range("n", n, 2.0)?;
        Ok(ClassSpec { params: Normalized::K2 { m, n }, raw: None })
    }

    pub fn k3_normalized(u: f64, v: f64) -> Result<Self> {
        check_range("u", u, 1.0)?;
        check_range("v", v, 2.0)?;
        Ok(ClassSpec { params: Normalized::K3 { u, v }, raw: None })
    }

    /// Build from raw parameters; `c` is ignored for K1.
    pub fn normalize(kind: ClassKind, b: f64, c: f64) -> Result<Self> {
        match kind {
            ClassKind::K1 => ClassSpec::k1(b),
            ClassKind::K2 => ClassSpec::k2(b, c),
            ClassKind::K3 => ClassSpec::k3(b, c),
        }
    }

    /// Build from normalized parameters; `p2` is ignored for K1.
    pub fn from_normalized(kind: ClassKind, p1: f64, p2: f64) -> Result<Self> {
        match kind {
            ClassKind::K1 => ClassSpec::k1_normalized(p1),
            ClassKind::K2 => ClassSpec::k2_normalized(p1, p2),
            ClassKind::K3 => ClassSpec::k3_normalized(p1, p2),
        }
    }

    pub fn kind(&self) -> ClassKind {
        match self.params {
            Normalized::K1 { .. } => ClassKind::K1,
            Normalized::K2 { .. } => ClassKind::K2,
            Normalized::K3 { .. } => ClassKind::K3,
        }
    }

    pub fn params(&self) -> Normalized {
        self.params
    }

    /// Normalized parameters as a pair; the second is 0 for K1.
    pub fn pair(&self) -> (f64, f64) {
        match self.params {
            Normalized::K1 { ntilde } => (ntilde, 0.0),
            Normalized::K2 { m, n } => (m, n),
            Normalized::K3 { u, v } => (u, v),
        }
    }

    pub fn raw(&self) -> Option<(f64, f64)> {
        self.raw
    }

    pub fn b(&self) -> Option<f64> {
        self.raw.map(|(b, _)| b)
    }

    pub fn c(&self) -> Option<f64> {
        match self.kind() {
            ClassKind::K1 => None,
            _ => self.raw.map(|(_, c)| c),
        }
    }

    /// Radius `R(r)` of the image disc.
    pub fn disc_radius(&self, r: f64) -> f64 {
        let r2 = r * r;
        let r4 = r2 * r2;
        match self.params {
            Normalized::K1 { ntilde: t } => {
                let num = r * (t + r * (6.0 + r * (4.0 * t + r * (6.0 + r * t))));
                num / ((1.0 + t * r + r2) * (1.0 - r4))
            }
            Normalized::K2 { m, n } => {
                let s = m + n;
                let p = m * n;
                let num = r
                    * (s + r
                        * ((10.0 + 2.0 * p)
                            + r * (9.0 * s + r * ((20.0 + 6.0 * p) + r * (9.0 * s + r * ((10.0 + 2.0 * p) + r * s))))));
                num / ((1.0 + m * r + r2) * (1.0 + n * r + r2) * (1.0 - r4))
            }
            Normalized::K3 { u, v } => {
                let p = u * v;
                let num = r
                    * ((u + v)
                        + r * ((8.0 + 2.0 * p)
                            + r * ((9.0 * u + 6.0 * v)
                                + r * ((10.0 + 6.0 * p) + r * ((9.0 * u + 3.0 * v) + r * ((2.0 + 2.0 * p) + r * u))))));
                num / ((1.0 + r * u) * (1.0 + r2 + r * v) * (1.0 - r4))
            }
        }
    }
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.params, self.raw) {
            (Normalized::K1 { .. }, Some((b, _))) => write!(f, "K1(b={b})"),
            (_, Some((b, c))) => write!(f, "{}(b={b}, c={c})", self.kind()),
            (Normalized::K1 { ntilde }, None) => write!(f, "K1(n~={ntilde})"),
            (Normalized::K2 { m, n }, None) => write!(f, "K2(m={m}, n={n})"),
            (Normalized::K3 { u, v }, None) => write!(f, "K3(u={u}, v={v})"),
        }
    }
}

/// Disc `|w - a| <= radius` containing `zf'(z)/f(z)` for `|z| <= r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscBound {
    pub a: f64,
    pub radius: f64,
    pub r: f64,
}

fn check_r(r: f64) -> Result<()> {
    if (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::Domain(format!("r = {r} outside [0, 1)")))
    }
}

/// Centre `a(r) = (1 + r^4)/(1 - r^4)`.
pub fn disc_centre(r: f64) -> f64 {
    let r4 = r.powi(4);
    (1.0 + r4) / (1.0 - r4)
}

/// Inverse of [`disc_centre`]: the `r` at which the centre reaches `a >= 1`.
pub fn radius_for_centre(a: f64) -> f64 {
    ((a - 1.0) / (a + 1.0)).powf(0.25)
}

pub fn disc_bound(spec: &ClassSpec, r: f64) -> Result<DiscBound> {
    check_r(r)?;
    Ok(DiscBound { a: disc_centre(r), radius: spec.disc_radius(r), r })
}

/// Upper bound on `|zp'(z)/p(z)|` at `|z| = r` for `p` in the Carathéodory
/// class of order `alpha` with `p'(0) = 2b(1 - alpha)`.
pub fn lemma_bound(b: f64, alpha: f64, r: f64) -> Result<f64> {
    if !(b.is_finite() && b.abs() <= 1.0) {
        return Err(Error::Domain(format!("|b| = {} exceeds 1", b.abs())));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} outside [0, 1)")));
    }
    check_r(r)?;
    let b = b.abs();
    let r2 = r * r;
    let lead = 2.0 * (1.0 - alpha) * r / (1.0 - r2);
    Ok(lead * (b * r2 + 2.0 * r + b) / ((1.0 - 2.0 * alpha) * r2 + 2.0 * b * (1.0 - alpha) * r + 1.0))
}


#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn spec_strategy() -> impl Strategy<Value = ClassSpec> {
        prop_oneof![
            (0.0..=2.0f64).prop_map(|t| ClassSpec::k1_normalized(t).unwrap()),
            (0.0..=2.0f64, 0.0..=2.0f64).prop_map(|(m, n)| ClassSpec::k2_normalized(m, n).unwrap()),
            (0.0..=1.0f64, 0.0..=2.0f64).prop_map(|(u, v)| ClassSpec::k3_normalized(u, v).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn lemma_bound_grows_with_b(
            b1 in 0.0..=1.0f64,
            b2 in 0.0..=1.0f64,
            alpha in 0.0..0.999f64,
            r in 0.0..0.99f64,
        ) {
            let (lo, hi) = if b1 <= b2 { (b1, b2) } else { (b2, b1) };
            let x = lemma_bound(lo, alpha, r).unwrap();
            let y = lemma_bound(-hi, alpha, r).unwrap();
            prop_assert!(x <= y * (1.0 + 1e-14), "{} > {}", x, y);
        }

        #[test]
        fn disc_radius_increases(spec in spec_strategy(), r in 1e-6..0.9f64) {
            prop_assert!(spec.disc_radius(r + 1e-6) > spec.disc_radius(r));
        }

        #[test]
        fn centre_increases(r in 0.0..0.99f64) {
            prop_assert!(disc_centre(r + 1e-4) > disc_centre(r));
        }
    }
}
