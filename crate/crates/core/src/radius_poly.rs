//! The thirty radius polynomials and the smallest-root solver shared with
//! the margin route.
//!
//! Each polynomial is the containment inequality `R(r) <= margin(a(r))` with
//! denominators cleared; its smallest root in `(0, 1)` is the radius.

use std::f64::consts::{E, SQRT_2};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classbounds::{ClassSpec, Normalized};
use crate::error::{Error, Result};
use crate::regions::{sin1, RegionKind};

/// Cells in the first sign-change scan.
pub const SCAN_CELLS: usize = 4096;

/// Target bracket width after bisection.
pub const BRACKET_WIDTH: f64 = 1e-14;

/// Real polynomial with ascending coefficients, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        RealPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.coeffs.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, &c)| acc * x + k as f64 * c)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Copy with `delta` added to the coefficient of `x^k`.
    pub fn perturbed(&self, k: usize, delta: f64) -> RealPolynomial {
        let mut coeffs = self.coeffs.clone();
        if coeffs.len() <= k {
            coeffs.resize(k + 1, 0.0);
        }
        coeffs[k] += delta;
        RealPolynomial::new(coeffs)
    }
}

impl fmt::Display for RealPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| format!("{c}")).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootMethod {
    Polynomial,
    MarginOracle,
}

impl RootMethod {
    pub fn name(self) -> &'static str {
        match self {
            RootMethod::Polynomial => "polynomial",
            RootMethod::MarginOracle => "margin_oracle",
        }
    }
}

impl fmt::Display for RootMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusResult {
    pub rho: f64,
    /// `|f(rho)|` of the function whose root was taken.
    pub residual: f64,
    pub bracket_width: f64,
    pub method: RootMethod,
}

/// Bracketed root: `f` changes sign (or vanishes) on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

/// First sign change of `f` on `(lo, hi]`, scanning `SCAN_CELLS` cells and
/// then twice as many before giving up.
pub(crate) fn first_sign_change(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> Option<Bracket> {
    let sign = |v: f64| {
        if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        }
    };
    let mut start = lo;
    let mut s0 = sign(f(start));
    if s0 == 0 {
        // an exact root at the left end is not a positive radius
        start = lo + 1e-12;
        s0 = sign(f(start));
        if s0 == 0 {
            return Some(Bracket { lo: start, hi: start });
        }
    }
    for cells in [SCAN_CELLS, 2 * SCAN_CELLS] {
        let step = (hi - start) / cells as f64;
        let mut prev = start;
        for i in 1..=cells {
            let x = if i == cells { hi } else { start + step * i as f64 };
            let s = sign(f(x));
            if s == 0 {
                return Some(Bracket { lo: x, hi: x });
            }
            if s != s0 {
                return Some(Bracket { lo: prev, hi: x });
            }
            prev = x;
        }
    }
    None
}

/// Bisect a bracket down to [`BRACKET_WIDTH`].
pub(crate) fn bisect(f: &impl Fn(f64) -> f64, mut br: Bracket) -> Bracket {
    let s_lo = f(br.lo).signum();
    while br.hi - br.lo > BRACKET_WIDTH {
        let mid = 0.5 * (br.lo + br.hi);
        if mid <= br.lo || mid >= br.hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return Bracket { lo: mid, hi: mid };
        }
        if v.signum() == s_lo {
            br.lo = mid;
        } else {
            br.hi = mid;
        }
    }
    br
}

/// Smallest root in `(0, 1)`: scan, bisect, then one Newton step kept only
/// if it stays in the bracket and lowers the residual.
pub fn smallest_root_in_unit(poly: &RealPolynomial) -> Result<RadiusResult> {
    let f = |x: f64| poly.eval(x);
    let hi = if f(1.0) == 0.0 { 1.0 - 1e-12 } else { 1.0 };
    let br =
        first_sign_change(&f, 0.0, hi).ok_or_else(|| Error::NoRoot(format!("no sign change of {poly} on (0, 1)")))?;
    let br = bisect(&f, br);
    let mut rho = 0.5 * (br.lo + br.hi);
    let mut residual = f(rho).abs();
    let d = poly.derivative(rho);
    if d != 0.0 && residual > 0.0 {
        let x = rho - f(rho) / d;
        if x >= br.lo && x <= br.hi && f(x).abs() < residual {
            rho = x;
            residual = f(x).abs();
        }
    }
    Ok(RadiusResult { rho, residual, bracket_width: br.hi - br.lo, method: RootMethod::Polynomial })
}

/// The radius polynomial for a class and region, constants substituted numerically.
pub fn build_polynomial(spec: &ClassSpec, region: RegionKind) -> RealPolynomial {
    let coeffs = match spec.params() {
        Normalized::K1 { ntilde } => k1_coeffs(ntilde, region),
        Normalized::K2 { m, n } => k2_coeffs(m, n, region),
        Normalized::K3 { u, v } => k3_coeffs(u, v, region),
    };
    RealPolynomial::new(coeffs)
}

fn k1_coeffs(n: f64, region: RegionKind) -> Vec<f64> {
    let (e, s2, s1) = (E, SQRT_2, sin1());
    match region {
        RegionKind::Parabolic => vec![1.0, -n, -11.0, -8.0 * n, -9.0, n, 3.0],
        RegionKind::Order(alpha) => {
            let al = alpha.value();
            vec![1.0 - al, -al * n, -(5.0 + al), -4.0 * n, -(5.0 - al), al * n, 1.0 + al]
        }
        RegionKind::Lemniscate => vec![1.0 - s2, 2.0 * n - s2 * n, 6.0, 2.0 * n + s2 * n, 1.0 + s2],
        RegionKind::Exponential => vec![1.0 - e, n, 1.0 + 5.0 * e, 4.0 * e * n, -(1.0 - 5.0 * e), -n, -(1.0 + e)],
        RegionKind::Cardioid => vec![2.0, -n, -16.0, -12.0 * n, -14.0, n, 4.0],
        RegionKind::Sine => {
            vec![s1, -(n - n * s1), -(6.0 - s1), -4.0 * n, -(8.0 + s1), -(3.0 * n + n * s1), -(2.0 + s1)]
        }
        RegionKind::Lune => vec![2.0 - s2, n - s2 * n, -(4.0 + s2), -4.0 * n, -(6.0 - s2), -(n - s2 * n), s2],
        RegionKind::Rational => vec![
            3.0 - 2.0 * s2,
            2.0 * n - 2.0 * s2 * n,
            -(3.0 + 2.0 * s2),
            -4.0 * n,
            -(7.0 - 2.0 * s2),
            -(2.0 * n - 2.0 * s2 * n),
            -(1.0 - 2.0 * s2),
        ],
        RegionKind::Nephroid => vec![2.0, -n, -16.0, -12.0 * n, -26.0, -11.0 * n, -8.0],
        RegionKind::Sigmoid => vec![
            1.0 - e,
            2.0 * n,
            7.0 + 5.0 * e,
            4.0 * n * (1.0 + e),
            7.0 + 9.0 * e,
            2.0 * n * (1.0 + 2.0 * e),
            1.0 + 3.0 * e,
        ],
    }
}

fn k2_coeffs(m: f64, n: f64, region: RegionKind) -> Vec<f64> {
    let (e, s2, s1) = (E, SQRT_2, sin1());
    let s = m + n;
    let p = m * n;
    match region {
        RegionKind::Parabolic => {
            vec![1.0, -s, -3.0 * (6.0 + p), -17.0 * s, -12.0 * (3.0 + p), -15.0 * s, -(14.0 + p), s, 3.0]
        }
        RegionKind::Order(alpha) => {
            let al = alpha.value();
            vec![
                1.0 - al,
                -al * s,
                -(p + al * p + 8.0 + 2.0 * al),
                -s * (8.0 + al),
                -(6.0 * p + 18.0),
                -(8.0 - al) * s,
                -(p - al * p + 8.0 - 2.0 * al),
                al * s,
                1.0 + al,
            ]
        }
        RegionKind::Lemniscate => vec![
            1.0 - s2,
            (2.0 - s2) * s,
            11.0 - s2 + 3.0 * p - s2 * p,
            8.0 * s,
            11.0 + s2 + 3.0 * p + s2 * p,
            (2.0 + s2) * s,
            1.0 + s2,
        ],
        RegionKind::Exponential => vec![
            1.0 - e,
            s,
            2.0 + 8.0 * e + p + e * p,
            s + 8.0 * e * s,
            18.0 * e + 6.0 * e * p,
            -(s - 8.0 * e * s),
            -(2.0 - 8.0 * e + p - e * p),
            -s,
            -(1.0 + e),
        ],
        RegionKind::Cardioid => {
            vec![2.0, -s, -(26.0 + 4.0 * p), -25.0 * s, -(54.0 + 18.0 * p), -23.0 * s, -(22.0 + 2.0 * p), s, 4.0]
        }
        RegionKind::Sine => vec![
            s1,
            -(s - s * s1),
            -(10.0 + 2.0 * p - 2.0 * s1 - p * s1),
            -(9.0 * s - s * s1),
            -(22.0 + 6.0 * p),
            -(11.0 * s + s * s1),
            -(14.0 + 4.0 * p + 2.0 * s1 + p * s1),
            -(3.0 * s + s * s1),
            -(2.0 + s1),
        ],
        // cleared form of R(r) <= a(r) + 1 - sqrt 2
        RegionKind::Lune => vec![
            2.0 - s2,
            (1.0 - s2) * s,
            -6.0 - 2.0 * s2 - s2 * p,
            -(7.0 + s2) * s,
            -18.0 - 6.0 * p,
            -(9.0 - s2) * s,
            -10.0 + 2.0 * s2 + (s2 - 2.0) * p,
            (s2 - 1.0) * s,
            s2,
        ],
        RegionKind::Rational => vec![
            3.0 - 2.0 * s2,
            2.0 * s - 2.0 * s2 * s,
            -(4.0 + 4.0 * s2 - p + 2.0 * s2 * p),
            -(6.0 * s + 2.0 * s2 * s),
            -(18.0 + 6.0 * p),
            -(10.0 * s - 2.0 * s2 * s),
            -(12.0 - 4.0 * s2 + 3.0 * p - 2.0 * s2 * p),
            -(2.0 * s - 2.0 * s2 * s),
            -(1.0 - 2.0 * s2),
        ],
        RegionKind::Nephroid => vec![
            2.0,
            -s,
            -(26.0 + 4.0 * p),
            -25.0 * s,
            -(66.0 + 18.0 * p),
            -35.0 * s,
            -(46.0 + 14.0 * p),
            -11.0 * s,
            -8.0,
        ],
        RegionKind::Sigmoid => vec![
            1.0 - e,
            2.0 * s,
            12.0 + 8.0 * e + 3.0 * p + e * p,
            10.0 * s + 8.0 * e * s,
            22.0 + 22.0 * e + 6.0 * p + 6.0 * e * p,
            10.0 * s + 12.0 * e * s,
            12.0 + 16.0 * e + 3.0 * p + 5.0 * e * p,
            2.0 * s + 4.0 * e * s,
            1.0 + 3.0 * e,
        ],
    }
}

fn k3_coeffs(u: f64, v: f64, region: RegionKind) -> Vec<f64> {
    let (e, s2, s1) = (E, SQRT_2, sin1());
    let p = u * v;
    match region {
        RegionKind::Parabolic => vec![
            1.0,
            -(u + v),
            -(15.0 + 3.0 * p),
            -(17.0 * u + 12.0 * v),
            -(17.0 + 12.0 * p),
            -(15.0 * u + 3.0 * v),
            -(1.0 + p),
            u,
        ],
        RegionKind::Order(alpha) => {
            let al = alpha.value();
            vec![
                1.0 - al,
                -(u * al + v * al),
                -(7.0 + p + al + p * al),
                -(8.0 * u + 6.0 * v + u * al),
                -(9.0 + 6.0 * p - al),
                -(8.0 * u + 2.0 * v - u * al - v * al),
                -(1.0 + p - al - p * al),
                al * u,
            ]
        }
        RegionKind::Lemniscate => vec![
            1.0 - s2,
            2.0 * u - s2 * u + 2.0 * v - s2 * v,
            8.0 + 3.0 * p - s2 * p,
            8.0 * u + 4.0 * v + s2 * v,
            3.0 + s2 + 3.0 * p + s2 * p,
            2.0 * u + s2 * u,
        ],
        RegionKind::Exponential => vec![
            1.0 - e,
            u + v,
            1.0 + 7.0 * e + p + e * p,
            u + 8.0 * e * u + 6.0 * e * v,
            -(1.0 - 9.0 * e - 6.0 * e * p),
            -(u - 8.0 * e * u + v - 2.0 * e * v),
            -(1.0 - e + p - e * p),
            -u,
        ],
        RegionKind::Cardioid => vec![
            2.0,
            -(u + v),
            -(22.0 + 4.0 * p),
            -(25.0 * u + 18.0 * v),
            -(26.0 + 18.0 * p),
            -(23.0 * u + 5.0 * v),
            -(2.0 + 2.0 * p),
            u,
        ],
        RegionKind::Sine => vec![
            s1,
            -(u + v - u * s1 - v * s1),
            -(8.0 + 2.0 * p - s1 - p * s1),
            -(9.0 * u + 6.0 * v - u * s1),
            -(12.0 + 6.0 * p + s1),
            -(11.0 * u + 5.0 * v + u * s1 + v * s1),
            -(4.0 + 4.0 * p + s1 + p * s1),
            -(3.0 * u + u * s1),
        ],
        RegionKind::Lune => vec![
            2.0 - s2,
            u - s2 * u + v - s2 * v,
            -(6.0 + s2 + s2 * p),
            -(7.0 * u + s2 * u + 6.0 * v),
            -(10.0 - s2 + 6.0 * p),
            -(9.0 * u - s2 * u + 3.0 * v - s2 * v),
            -(2.0 - s2 + 2.0 * p - s2 * p),
            -(u - s2 * u),
        ],
        RegionKind::Rational => vec![
            3.0 - 2.0 * s2,
            2.0 * u - 2.0 * s2 * u + 2.0 * v - 2.0 * s2 * v,
            -(5.0 + 2.0 * s2 - p + 2.0 * s2 * p),
            -(6.0 * u + 2.0 * s2 * u + 6.0 * v),
            -(11.0 - 2.0 * s2 + 6.0 * p),
            -(10.0 * u - 2.0 * s2 * u + 4.0 * v - 2.0 * s2 * v),
            -(3.0 - 2.0 * s2 + 3.0 * p - 2.0 * s2 * p),
            -(2.0 * u - 2.0 * s2 * u),
        ],
        RegionKind::Nephroid => vec![
            2.0,
            -(u + v),
            -(22.0 + 4.0 * p),
            -(25.0 * u + 18.0 * v),
            -(38.0 + 18.0 * p),
            -(35.0 * u + 17.0 * v),
            -(14.0 + 14.0 * p),
            -11.0 * u,
        ],
        RegionKind::Sigmoid => vec![
            1.0 - e,
            2.0 * u + 2.0 * v,
            9.0 + 7.0 * e + 3.0 * p + e * p,
            10.0 * u + 8.0 * e * u + 6.0 * v + 6.0 * e * v,
            11.0 + 13.0 * e + 6.0 * p + 6.0 * e * p,
            10.0 * u + 12.0 * e * u + 4.0 * v + 6.0 * e * v,
            3.0 + 5.0 * e + 3.0 * p + 5.0 * e * p,
            2.0 * u + 4.0 * e * u,
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classbounds::{disc_centre, ClassSpec};

    fn poly(c: &[f64]) -> RealPolynomial {
        RealPolynomial::new(c.to_vec())
    }

    /// `(margin(a) - R) * D`, the containment inequality with its
    /// denominator `D > 0` cleared, evaluated without any transcribed
    /// coefficient. Some printed polynomials drop a further positive factor,
    /// so only the sign is comparable.
    fn cleared_margin(spec: &ClassSpec, region: RegionKind, r: f64) -> f64 {
        let a = disc_centre(r);
        let margin = region.margin_spec().eval(a);
        let (p1, p2) = spec.pair();
        let r2 = r * r;
        let den = match spec.params() {
            Normalized::K1 { .. } => (1.0 + p1 * r + r2) * (1.0 - r2 * r2),
            Normalized::K2 { .. } => (1.0 + p1 * r + r2) * (1.0 + p2 * r + r2) * (1.0 - r2 * r2),
            Normalized::K3 { .. } => (1.0 + p1 * r) * (1.0 + r2 + p2 * r) * (1.0 - r2 * r2),
        };
        (margin - spec.disc_radius(r)) * den
    }

    #[test]
    fn build_examples() {
        let k1 = ClassSpec::k1_normalized(2.0).unwrap();
        assert_eq!(build_polynomial(&k1, RegionKind::Parabolic).coeffs(), &[1.0, -2.0, -11.0, -16.0, -9.0, 2.0, 3.0]);
        let k1 = ClassSpec::k1_normalized(0.0).unwrap();
        assert_eq!(
            build_polynomial(&k1, RegionKind::order(0.0).unwrap()).coeffs(),
            &[1.0, 0.0, -5.0, 0.0, -5.0, 0.0, 1.0]
        );
        let k2 = ClassSpec::k2_normalized(2.0, 2.0).unwrap();
        assert_eq!(
            build_polynomial(&k2, RegionKind::Parabolic).coeffs(),
            &[1.0, -4.0, -30.0, -68.0, -84.0, -60.0, -18.0, 4.0, 3.0]
        );
    }

    #[test]
    fn degrees_for_nonzero_parameters() {
        let k1 = ClassSpec::k1_normalized(1.0).unwrap();
        let k2 = ClassSpec::k2_normalized(1.0, 1.0).unwrap();
        let k3 = ClassSpec::k3_normalized(0.5, 1.0).unwrap();
        assert_eq!(build_polynomial(&k1, RegionKind::Parabolic).degree(), 6);
        assert_eq!(build_polynomial(&k2, RegionKind::Parabolic).degree(), 8);
        assert_eq!(build_polynomial(&k3, RegionKind::Parabolic).degree(), 7);
        assert_eq!(build_polynomial(&k1, RegionKind::Lemniscate).degree(), 4);
    }

    #[test]
    fn polynomial_sign_tracks_cleared_margin() {
        let specs = [
            ClassSpec::k1_normalized(0.0).unwrap(),
            ClassSpec::k1_normalized(1.7).unwrap(),
            ClassSpec::k2_normalized(0.3, 1.9).unwrap(),
            ClassSpec::k2_normalized(2.0, 2.0).unwrap(),
            ClassSpec::k3_normalized(0.0, 0.0).unwrap(),
            ClassSpec::k3_normalized(0.8, 1.2).unwrap(),
        ];
        let alpha = crate::regions::Alpha::new(0.35).unwrap();
        for spec in specs {
            for region in RegionKind::catalogue(alpha) {
                let p = build_polynomial(&spec, region);
                let orient = p.eval(0.0).signum() * cleared_margin(&spec, region, 0.0).signum();
                for k in 1..990 {
                    let r = k as f64 / 1000.0;
                    let (x, y) = (p.eval(r), cleared_margin(&spec, region, r));
                    if x.abs() < 1e-9 || y.abs() < 1e-9 {
                        continue;
                    }
                    assert_eq!(x.signum(), orient * y.signum(), "{spec} {region} r={r}");
                }
            }
        }
    }

    #[test]
    fn root_examples() {
        let r = smallest_root_in_unit(&poly(&[1.0, -2.0, -11.0, -16.0, -9.0, 2.0, 3.0])).unwrap();
        assert!((r.rho - 0.2021347).abs() < 1e-6);
        let s2 = SQRT_2;
        let lem = poly(&[1.0 - s2, 4.0 - 2.0 * s2, 6.0, 4.0 + 2.0 * s2, 1.0 + s2]);
        assert!((smallest_root_in_unit(&lem).unwrap().rho - 0.171573).abs() < 1e-5);
        let lin = smallest_root_in_unit(&poly(&[1.0, -2.0])).unwrap();
        assert!((lin.rho - 0.5).abs() < 1e-15);
        assert_eq!(lin.method, RootMethod::Polynomial);
    }

    #[test]
    fn root_without_sign_change_is_an_error() {
        assert!(matches!(smallest_root_in_unit(&poly(&[1.0, 1.0, 1.0])), Err(Error::NoRoot(_))));
    }

    #[test]
    fn root_picks_smallest_of_several() {
        // (x - 0.2)(x - 0.5)(x - 0.9)
        let p = poly(&[-0.09, 0.73, -1.6, 1.0]);
        assert!((smallest_root_in_unit(&p).unwrap().rho - 0.2).abs() < 1e-13);
    }

    #[test]
    fn root_at_unit_endpoint_is_excluded_from_scan_end() {
        // roots at 0.25 and 1
        let p = poly(&[0.25, -1.25, 1.0]);
        assert!((smallest_root_in_unit(&p).unwrap().rho - 0.25).abs() < 1e-13);
    }

    #[test]
    fn trimming() {
        assert_eq!(poly(&[1.0, 2.0, 0.0, 0.0]).degree(), 1);
        assert_eq!(poly(&[0.0, 0.0]).coeffs(), &[0.0]);
        assert_eq!(poly(&[1.0, 2.0]).perturbed(3, 1.0).degree(), 3);
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let p = poly(&[1.0, -2.0, -11.0, -16.0, -9.0, 2.0, 3.0]);
        let h = 1e-6;
        let fd = (p.eval(0.4 + h) - p.eval(0.4 - h)) / (2.0 * h);
        assert!((p.derivative(0.4) - fd).abs() < 1e-6);
    }
}
