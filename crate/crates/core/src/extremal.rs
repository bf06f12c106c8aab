//! Extremal functions, their logarithmic derivatives, and sharpness certification.
//!
//! Every extremal is `z` times a product of quadratic factors raised to
//! integer powers, so `zf'/f = 1 + sum k * z q'(z)/q(z)` exactly.

use std::f64::consts::SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classbounds::{ClassKind, ClassSpec};
use crate::error::{Error, Result};
use crate::regions::{sin1, RegionKind, RegionTag};

/// A factor within this distance of zero is a singularity.
pub const SINGULARITY_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExtremalKind {
    /// `z(1+z^2) / ((1-z^2)(1-2biz-z^2))`
    K1Moebius,
    /// `z(1-2bz+z^2) / (1-z^2)^2`
    K1Alt,
    /// `z(1+z^2)^2 / ((1-z^2)(1-2ciz-z^2)(1-(4b-2c)iz-z^2))`
    K2Moebius,
    /// `z(1-2cz+z^2)(1-(4b-2c)z+z^2) / (1-z^2)^3`
    K2Alt,
}

impl ExtremalKind {
    pub fn class(self) -> ClassKind {
        match self {
            ExtremalKind::K1Moebius | ExtremalKind::K1Alt => ClassKind::K1,
            ExtremalKind::K2Moebius | ExtremalKind::K2Alt => ClassKind::K2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExtremalKind::K1Moebius => "K1_Moebius",
            ExtremalKind::K1Alt => "K1_Alt",
            ExtremalKind::K2Moebius => "K2_Moebius",
            ExtremalKind::K2Alt => "K2_Alt",
        }
    }
}

impl fmt::Display for ExtremalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `c0 + c1 z + c2 z^2` raised to `power`.
#[derive(Debug, Clone, Copy)]
struct Factor {
    c0: Complex64,
    c1: Complex64,
    c2: Complex64,
    power: i32,
    label: &'static str,
}

impl Factor {
    fn new(c1: Complex64, c2: f64, power: i32, label: &'static str) -> Self {
        Factor { c0: Complex64::new(1.0, 0.0), c1, c2: Complex64::new(c2, 0.0), power, label }
    }

    fn eval(&self, z: Complex64) -> Complex64 {
        self.c0 + z * (self.c1 + z * self.c2)
    }

    fn eval_guarded(&self, z: Complex64) -> Result<Complex64> {
        let q = self.eval(z);
        if q.norm() < SINGULARITY_GUARD {
            return Err(Error::Singularity { re: z.re, im: z.im, what: self.label.to_string() });
        }
        Ok(q)
    }

    /// `power * z q'(z) / q(z)`
    fn log_term(&self, z: Complex64) -> Result<Complex64> {
        let q = self.eval_guarded(z)?;
        let dq = self.c1 + 2.0 * self.c2 * z;
        Ok(f64::from(self.power) * z * dq / q)
    }
}

fn i(x: f64) -> Complex64 {
    Complex64::new(0.0, x)
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// An extremal function with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremal {
    kind: ExtremalKind,
    b: f64,
    c: f64,
}

impl Extremal {
    /// `c` is ignored for the K1 kinds. K2 kinds need `|2b - c| <= 1`.
    pub fn new(kind: ExtremalKind, b: f64, c: f64) -> Result<Self> {
        let unit = |name: &str, x: f64| {
            if x.is_finite() && x.abs() <= 1.0 {
                Ok(())
            } else {
                Err(Error::Parameter(format!("|{name}| = {} exceeds 1", x.abs())))
            }
        };
        unit("b", b)?;
        if kind.class() == ClassKind::K2 {
            unit("c", c)?;
            unit("2b - c", 2.0 * b - c)?;
        }
        let c = if kind.class() == ClassKind::K1 { 0.0 } else { c };
        Ok(Extremal { kind, b, c })
    }

    pub fn kind(&self) -> ExtremalKind {
        self.kind
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    fn factors(&self) -> Vec<Factor> {
        let (b, c) = (self.b, self.c);
        let q = 4.0 * b - 2.0 * c;
        match self.kind {
            ExtremalKind::K1Moebius => vec![
                Factor::new(re(0.0), 1.0, 1, "1+z^2"),
                Factor::new(re(0.0), -1.0, -1, "1-z^2"),
                Factor::new(i(-2.0 * b), -1.0, -1, "1-2biz-z^2"),
            ],
            ExtremalKind::K1Alt => {
                vec![Factor::new(re(-2.0 * b), 1.0, 1, "1-2bz+z^2"), Factor::new(re(0.0), -1.0, -2, "1-z^2")]
            }
            ExtremalKind::K2Moebius => vec![
                Factor::new(re(0.0), 1.0, 2, "1+z^2"),
                Factor::new(re(0.0), -1.0, -1, "1-z^2"),
                Factor::new(i(-2.0 * c), -1.0, -1, "1-2ciz-z^2"),
                Factor::new(i(-q), -1.0, -1, "1-(4b-2c)iz-z^2"),
            ],
            ExtremalKind::K2Alt => vec![
                Factor::new(re(-2.0 * c), 1.0, 1, "1-2cz+z^2"),
                Factor::new(re(-q), 1.0, 1, "1-(4b-2c)z+z^2"),
                Factor::new(re(0.0), -1.0, -3, "1-z^2"),
            ],
        }
    }

    /// Factors of the companion `g` for the K2 kinds.
    fn companion_factors(&self) -> Option<Vec<Factor>> {
        let c = self.c;
        match self.kind {
            ExtremalKind::K2Moebius => Some(vec![
                Factor::new(re(0.0), 1.0, 1, "1+z^2"),
                Factor::new(re(0.0), -1.0, -1, "1-z^2"),
                Factor::new(i(-2.0 * c), -1.0, -1, "1-2ciz-z^2"),
            ]),
            ExtremalKind::K2Alt => {
                Some(vec![Factor::new(re(-2.0 * c), 1.0, 1, "1-2cz+z^2"), Factor::new(re(0.0), -1.0, -2, "1-z^2")])
            }
            _ => None,
        }
    }

    fn check_disc(z: Complex64) -> Result<()> {
        if z.norm() < 1.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("|z| = {} is not below 1", z.norm())))
        }
    }

    fn product(factors: &[Factor], z: Complex64) -> Result<Complex64> {
        Extremal::check_disc(z)?;
        let mut acc = z;
        for f in factors {
            acc *= f.eval_guarded(z)?.powi(f.power);
        }
        Ok(acc)
    }

    /// `f(z)`.
    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        Extremal::product(&self.factors(), z)
    }

    /// `g(z)` for the K2 kinds.
    pub fn companion(&self, z: Complex64) -> Option<Result<Complex64>> {
        self.companion_factors().map(|fs| Extremal::product(&fs, z))
    }

    /// `z f'(z) / f(z)`, equal to 1 at the origin.
    pub fn logderiv(&self, z: Complex64) -> Result<Complex64> {
        Extremal::check_disc(z)?;
        self.factors().iter().try_fold(Complex64::new(1.0, 0.0), |acc, f| Ok(acc + f.log_term(z)?))
    }

    /// Class-defining quantities at `z != 0`: `Re(h(z)(1 - z^2)/z)` for the
    /// function `h` carrying the Carathéodory condition (`f` for K1, `g` for
    /// K2), and for K2 also `Re(f/g)`. Membership needs both positive.
    pub fn class_conditions(&self, z: Complex64) -> Result<(f64, Option<f64>)> {
        let f = self.value(z)?;
        let one = Complex64::new(1.0, 0.0);
        match self.companion(z) {
            None => Ok((((f * (one - z * z)) / z).re, None)),
            Some(g) => {
                let g = g?;
                let cara = ((g * (one - z * z)) / z).re;
                Ok((cara, Some((f / g).re)))
            }
        }
    }

    /// Image of `|z| = rho` under the logarithmic derivative, `samples` points
    /// at `theta_k = 2 pi k / samples`.
    pub fn image_curve(&self, rho: f64, samples: usize) -> Result<Vec<Complex64>> {
        (0..samples)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / samples as f64;
                self.logderiv(Complex64::from_polar(rho, theta))
            })
            .collect()
    }
}

/// Which of the four axis points carries the touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    PlusI,
    MinusI,
    Plus,
    Minus,
}

impl Direction {
    pub fn label(self) -> &'static str {
        match self {
            Direction::PlusI => "+i",
            Direction::MinusI => "-i",
            Direction::Plus => "+",
            Direction::Minus => "-",
        }
    }

    pub fn unit(self) -> Complex64 {
        match self {
            Direction::PlusI => Complex64::new(0.0, 1.0),
            Direction::MinusI => Complex64::new(0.0, -1.0),
            Direction::Plus => Complex64::new(1.0, 0.0),
            Direction::Minus => Complex64::new(-1.0, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpnessPoint {
    pub direction: Direction,
    pub rho: f64,
}

impl SharpnessPoint {
    pub fn z(&self) -> Complex64 {
        self.direction.unit() * self.rho
    }
}

impl fmt::Display for SharpnessPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = &self.direction.label()[..1];
        let unit = if self.direction.label().len() > 1 { "i" } else { "" };
        write!(f, "{sign}{unit}{}", self.rho)
    }
}

/// Rule for picking the touch point and extremal.
///
/// `Listed` keeps the reference grouping, where only the lemniscate and sine
/// regions touch on the real axis for K2. `Geometric` moves K2
/// nephroid and sigmoid to the real-axis group, where the K2 image disc
/// actually meets those regions: both bind on the right of the centre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SharpnessTable {
    Listed,
    #[default]
    Geometric,
}

impl SharpnessTable {
    pub fn name(self) -> &'static str {
        match self {
            SharpnessTable::Listed => "listed",
            SharpnessTable::Geometric => "geometric",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [SharpnessTable::Listed, SharpnessTable::Geometric].into_iter().find(|t| t.name() == name)
    }

    fn uses_real_axis(self, class: ClassKind, tag: RegionTag) -> bool {
        use RegionTag::*;
        match (self, class) {
            (_, ClassKind::K1) => matches!(tag, Lemniscate | Sine | Nephroid | Sigmoid),
            (SharpnessTable::Listed, _) => matches!(tag, Lemniscate | Sine),
            (SharpnessTable::Geometric, _) => matches!(tag, Lemniscate | Sine | Nephroid | Sigmoid),
        }
    }
}

/// Touch point and extremal kind from the reference grouping.
pub fn sharpness_point(
    class: ClassKind,
    region: RegionKind,
    b: f64,
    rho: f64,
) -> Result<(SharpnessPoint, ExtremalKind)> {
    sharpness_point_with(SharpnessTable::Listed, class, region, b, rho)
}

pub fn sharpness_point_with(
    table: SharpnessTable,
    class: ClassKind,
    region: RegionKind,
    b: f64,
    rho: f64,
) -> Result<(SharpnessPoint, ExtremalKind)> {
    if class == ClassKind::K3 {
        return Err(Error::Unsupported("no extremal functions are known for K3".into()));
    }
    if b == 0.0 || !b.is_finite() {
        return Err(Error::Unsupported(format!("no sharpness rule for b = {b}")));
    }
    let negative = b < 0.0;
    let (direction, kind) = if table.uses_real_axis(class, region.tag()) {
        let d = if negative { Direction::Plus } else { Direction::Minus };
        let k = if class == ClassKind::K1 { ExtremalKind::K1Alt } else { ExtremalKind::K2Alt };
        (d, k)
    } else {
        let d = if negative { Direction::MinusI } else { Direction::PlusI };
        let k = if class == ClassKind::K1 { ExtremalKind::K1Moebius } else { ExtremalKind::K2Moebius };
        (d, k)
    };
    Ok((SharpnessPoint { direction, rho }, kind))
}

/// Deviation of `w` from the region's boundary identity at the touch point.
pub fn boundary_residual(region: RegionKind, w: Complex64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    match region {
        RegionKind::Parabolic => (w.re - (w - one).norm()).abs(),
        RegionKind::Order(alpha) => (w.re - alpha.value()).abs(),
        RegionKind::Lemniscate => ((w * w - one).norm() - 1.0).abs(),
        RegionKind::Exponential => (w.ln().norm() - 1.0).abs(),
        RegionKind::Cardioid => (w - 1.0 / 3.0).norm(),
        RegionKind::Sine => (w - (1.0 + sin1())).norm(),
        RegionKind::Lune => ((w * w - one).norm() - 2.0 * w.norm()).abs(),
        RegionKind::Rational => (w - (2.0 * SQRT_2 - 2.0)).norm(),
        RegionKind::Nephroid => (w.norm() - 5.0 / 3.0).abs(),
        RegionKind::Sigmoid => ((w / (2.0 - w)).ln().norm() - 1.0).abs(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub point: SharpnessPoint,
    pub extremal: ExtremalKind,
    pub table: SharpnessTable,
    pub w_re: f64,
    pub w_im: f64,
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
}

impl CertificationReport {
    pub fn w(&self) -> Complex64 {
        Complex64::new(self.w_re, self.w_im)
    }
}

/// Certify with the reference grouping.
pub fn certify_sharpness(spec: &ClassSpec, region: RegionKind, rho: f64, tol: f64) -> Result<CertificationReport> {
    certify_sharpness_with(SharpnessTable::Listed, spec, region, rho, tol)
}

/// Evaluate the extremal's logarithmic derivative at the touch point and
/// check the boundary identity. Exceeding `tol` is reported, not an error.
pub fn certify_sharpness_with(
    table: SharpnessTable,
    spec: &ClassSpec,
    region: RegionKind,
    rho: f64,
    tol: f64,
) -> Result<CertificationReport> {
    let (b, c) = spec.raw().ok_or_else(|| Error::Unsupported("sharpness needs the raw parameters b, c".into()))?;
    let (point, kind) = sharpness_point_with(table, spec.kind(), region, b, rho)?;
    let w = Extremal::new(kind, b, c)?.logderiv(point.z())?;
    let residual = boundary_residual(region, w);
    Ok(CertificationReport {
        point,
        extremal: kind,
        table,
        w_re: w.re,
        w_im: w.im,
        residual,
        tol,
        passed: residual <= tol,
    })
}
