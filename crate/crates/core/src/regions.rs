//! The ten target regions of the Ma–Minda catalogue.
//!
//! Every region knows three things:
//!
//! * its *margin*: the radius of the largest disc centred at a real point `a`
//!   that still fits inside the region, valid on an interval of centres;
//! * a strict-interior membership test;
//! * a closed boundary polyline, used for winding-number membership of the
//!   regions defined only as images `phi(D)` and for plot export.

use std::f64::consts::{E, PI, SQRT_2};
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default sample count for winding-number membership.
pub const WINDING_SAMPLES: usize = 4096;

/// Number of sample doublings allowed past [`WINDING_SAMPLES`] (up to 2^20 points).
const WINDING_LEVELS: usize = 9;

/// Distance to the polyline below which a query point triggers refinement.
const NEAR_BOUNDARY: f64 = 1e-6;

/// Distance at the finest level below which a point is treated as on the boundary.
const ON_BOUNDARY: f64 = 1e-13;

/// Half-width of the truncated parabola / half-plane boundary used for the
/// unbounded regions.
const TRUNCATION: f64 = 10.0;

pub(crate) fn sin1() -> f64 {
    1f64.sin()
}

/// Order of starlikeness, `0 <= alpha < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(alpha: f64) -> Result<Self> {
        if (0.0..1.0).contains(&alpha) {
            Ok(Alpha(alpha))
        } else {
            Err(Error::Parameter(format!("order alpha = {alpha} must lie in [0, 1)")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Alpha::new(v)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

/// Region identity without the order parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionTag {
    Parabolic,
    Order,
    Lemniscate,
    Exponential,
    Cardioid,
    Sine,
    Lune,
    Rational,
    Nephroid,
    Sigmoid,
}

impl RegionTag {
    pub const ALL: [RegionTag; 10] = [
        RegionTag::Parabolic,
        RegionTag::Order,
        RegionTag::Lemniscate,
        RegionTag::Exponential,
        RegionTag::Cardioid,
        RegionTag::Sine,
        RegionTag::Lune,
        RegionTag::Rational,
        RegionTag::Nephroid,
        RegionTag::Sigmoid,
    ];

    /// Stable lowercase identifier used on the command line and in tables.
    pub fn name(self) -> &'static str {
        match self {
            RegionTag::Parabolic => "parabolic",
            RegionTag::Order => "order",
            RegionTag::Lemniscate => "lemniscate",
            RegionTag::Exponential => "exponential",
            RegionTag::Cardioid => "cardioid",
            RegionTag::Sine => "sine",
            RegionTag::Lune => "lune",
            RegionTag::Rational => "rational",
            RegionTag::Nephroid => "nephroid",
            RegionTag::Sigmoid => "sigmoid",
        }
    }

    /// Short code used in cell identifiers such as `K1-S-lune`.
    pub fn code(self) -> &'static str {
        match self {
            RegionTag::Parabolic => "P",
            RegionTag::Order => "alpha",
            RegionTag::Lemniscate => "L",
            RegionTag::Exponential => "e",
            RegionTag::Cardioid => "c",
            RegionTag::Sine => "sin",
            RegionTag::Lune => "lune",
            RegionTag::Rational => "R",
            RegionTag::Nephroid => "Ne",
            RegionTag::Sigmoid => "SG",
        }
    }

    pub fn from_name(name: &str) -> Option<RegionTag> {
        RegionTag::ALL.into_iter().find(|t| t.name() == name)
    }

    pub fn from_code(code: &str) -> Option<RegionTag> {
        RegionTag::ALL.into_iter().find(|t| t.code() == code)
    }

    /// Position in the canonical catalogue order.
    pub fn index(self) -> usize {
        self as usize
    }

    /// Attach a parameter; `alpha` is ignored for every tag except `Order`.
    pub fn with_alpha(self, alpha: Alpha) -> RegionKind {
        match self {
            RegionTag::Parabolic => RegionKind::Parabolic,
            RegionTag::Order => RegionKind::Order(alpha),
            RegionTag::Lemniscate => RegionKind::Lemniscate,
            RegionTag::Exponential => RegionKind::Exponential,
            RegionTag::Cardioid => RegionKind::Cardioid,
            RegionTag::Sine => RegionKind::Sine,
            RegionTag::Lune => RegionKind::Lune,
            RegionTag::Rational => RegionKind::Rational,
            RegionTag::Nephroid => RegionKind::Nephroid,
            RegionTag::Sigmoid => RegionKind::Sigmoid,
        }
    }
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One of the ten target regions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionKind {
    /// `{w : Re w > |w - 1|}`
    Parabolic,
    /// `{w : Re w > alpha}`
    Order(Alpha),
    /// Right lobe of `{w : |w^2 - 1| < 1}`
    Lemniscate,
    /// `{w : |log w| < 1}`
    Exponential,
    /// Image of the disc under `1 + 4z/3 + 2z^2/3`
    Cardioid,
    /// Image of the disc under `1 + sin z`
    Sine,
    /// `{w : Re w > 0, 2|w| > |w^2 - 1|}`
    Lune,
    /// Image of the disc under `1 + (z/k)(k + z)/(k - z)`, `k = 1 + sqrt 2`
    Rational,
    /// Image of the disc under `1 + z - z^3/3`
    Nephroid,
    /// `{w : |log(w / (2 - w))| < 1}`
    Sigmoid,
}

/// Interval of admissible disc centres and the affine margin `slope * a + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginSpec {
    pub lower_a: f64,
    pub lower_is_strict: bool,
    pub upper_a: f64,
    pub upper_is_strict: bool,
    /// `+1` when the region binds on the left of the centre, `-1` on the right.
    pub slope: f64,
    pub offset: f64,
}

impl MarginSpec {
    pub fn admits(&self, a: f64) -> bool {
        let above = if self.lower_is_strict { a > self.lower_a } else { a >= self.lower_a };
        let below = if self.upper_is_strict { a < self.upper_a } else { a <= self.upper_a };
        above && below
    }

    pub fn eval(&self, a: f64) -> f64 {
        self.slope * a + self.offset
    }
}

impl RegionKind {
    pub fn order(alpha: f64) -> Result<Self> {
        Ok(RegionKind::Order(Alpha::new(alpha)?))
    }

    /// All ten regions, with `alpha` used for the order region.
    pub fn catalogue(alpha: Alpha) -> [RegionKind; 10] {
        RegionTag::ALL.map(|t| t.with_alpha(alpha))
    }

    pub fn tag(self) -> RegionTag {
        match self {
            RegionKind::Parabolic => RegionTag::Parabolic,
            RegionKind::Order(_) => RegionTag::Order,
            RegionKind::Lemniscate => RegionTag::Lemniscate,
            RegionKind::Exponential => RegionTag::Exponential,
            RegionKind::Cardioid => RegionTag::Cardioid,
            RegionKind::Sine => RegionTag::Sine,
            RegionKind::Lune => RegionTag::Lune,
            RegionKind::Rational => RegionTag::Rational,
            RegionKind::Nephroid => RegionTag::Nephroid,
            RegionKind::Sigmoid => RegionTag::Sigmoid,
        }
    }

    pub fn name(self) -> &'static str {
        self.tag().name()
    }

    pub fn alpha(self) -> Option<f64> {
        match self {
            RegionKind::Order(a) => Some(a.value()),
            _ => None,
        }
    }

    /// Validity interval and affine form of the margin.
    pub fn margin_spec(self) -> MarginSpec {
        let left = |lower: f64, upper: f64, upper_is_strict: bool| MarginSpec {
            lower_a: lower,
            lower_is_strict: true,
            upper_a: upper,
            upper_is_strict,
            slope: 1.0,
            offset: -lower,
        };
        // right-binding regions: margin = c - a, valid for centres in [1, c]
        let right = |c: f64, lower: f64, lower_is_strict: bool, upper_is_strict: bool| MarginSpec {
            lower_a: lower,
            lower_is_strict,
            upper_a: c,
            upper_is_strict,
            slope: -1.0,
            offset: c,
        };
        match self {
            RegionKind::Parabolic => left(0.5, 1.5, false),
            RegionKind::Order(alpha) => left(alpha.value(), f64::INFINITY, true),
            RegionKind::Lemniscate => right(SQRT_2, 2.0 * SQRT_2 / 3.0, true, true),
            RegionKind::Exponential => left(1.0 / E, (E + 1.0 / E) / 2.0, false),
            RegionKind::Cardioid => left(1.0 / 3.0, 5.0 / 3.0, false),
            RegionKind::Sine => right(1.0 + sin1(), 1.0, false, false),
            RegionKind::Lune => left(SQRT_2 - 1.0, SQRT_2, false),
            RegionKind::Rational => left(2.0 * SQRT_2 - 2.0, SQRT_2, false),
            RegionKind::Nephroid => right(5.0 / 3.0, 1.0, false, false),
            RegionKind::Sigmoid => right(2.0 * E / (1.0 + E), 1.0, false, true),
        }
    }

    /// Largest `R` with `{|w - a| < R}` inside the region.
    pub fn margin(self, a: f64) -> Result<f64> {
        let spec = self.margin_spec();
        if !spec.admits(a) {
            return Err(Error::Validity { region: self.name(), a, lower: spec.lower_a, upper: spec.upper_a });
        }
        Ok(spec.eval(a).max(0.0))
    }

    /// The generating map `phi` for the regions given only as `phi(D)`.
    pub fn generating_map(self) -> Option<fn(Complex64) -> Complex64> {
        match self {
            RegionKind::Cardioid => Some(phi_cardioid),
            RegionKind::Sine => Some(phi_sine),
            RegionKind::Rational => Some(phi_rational),
            RegionKind::Nephroid => Some(phi_nephroid),
            _ => None,
        }
    }

    /// Strict-interior membership; boundary points report `false`.
    pub fn contains(self, w: Complex64) -> bool {
        if !(w.re.is_finite() && w.im.is_finite()) {
            return false;
        }
        let one = Complex64::new(1.0, 0.0);
        match self {
            RegionKind::Parabolic => w.re > (w - one).norm(),
            RegionKind::Order(alpha) => w.re > alpha.value(),
            RegionKind::Lemniscate => w.re > 0.0 && (w * w - one).norm() < 1.0,
            RegionKind::Exponential => w.re > 0.0 && w.ln().norm() < 1.0,
            RegionKind::Lune => w.re > 0.0 && 2.0 * w.norm() > (w * w - one).norm(),
            RegionKind::Sigmoid => {
                let denom = Complex64::new(2.0, 0.0) - w;
                if denom.norm() == 0.0 || w.norm() == 0.0 {
                    return false;
                }
                let q = w / denom;
                if q.im == 0.0 && q.re <= 0.0 {
                    return false;
                }
                q.ln().norm() < 1.0
            }
            RegionKind::Cardioid | RegionKind::Sine | RegionKind::Rational | RegionKind::Nephroid => {
                self.contains_by_winding(w)
            }
        }
    }

    /// Membership by winding number of the sampled boundary, refined while the
    /// query point sits within the polyline's chord error.
    pub fn contains_by_winding(self, w: Complex64) -> bool {
        let mut n = WINDING_SAMPLES;
        for level in 0..WINDING_LEVELS {
            let last = level + 1 == WINDING_LEVELS;
            let hit = with_polyline(self, level, n, |pts| winding_probe(pts, w));
            if hit.distance > hit.near.max(NEAR_BOUNDARY) || last {
                return hit.winding != 0 && hit.distance > ON_BOUNDARY;
            }
            n *= 2;
        }
        unreachable!()
    }

    /// Closed boundary curve: `samples` (rounded up to even, at least 16)
    /// segments, first point repeated at the end.
    ///
    /// The `phi`-regions are sampled at `phi(e^{i theta})` with uniform theta
    /// starting at 0. Parabolic and order regions are unbounded; their curves
    /// are truncated at `|Im w| = 10` and closed by straight segments.
    pub fn boundary_curve(self, samples: usize) -> Vec<Complex64> {
        let n = even_samples(samples);
        let mut pts = match self {
            RegionKind::Parabolic => truncated_parabola(n),
            RegionKind::Order(alpha) => truncated_half_plane(alpha.value(), n),
            RegionKind::Lune => lune_arcs(n),
            _ => (0..=n).map(|k| boundary_point(self, 2.0 * PI * k as f64 / n as f64)).collect(),
        };
        let first = pts[0];
        *pts.last_mut().unwrap() = first;
        pts
    }

    /// Parameter values matching [`boundary_curve`](Self::boundary_curve).
    pub fn boundary_parameters(self, samples: usize) -> Vec<f64> {
        let n = even_samples(samples);
        (0..=n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
    }
}

impl fmt::Display for RegionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionKind::Order(a) => write!(f, "order({})", a.value()),
            other => f.write_str(other.name()),
        }
    }
}

fn even_samples(samples: usize) -> usize {
    let n = samples.max(16);
    n + n % 2
}

pub fn phi_cardioid(z: Complex64) -> Complex64 {
    1.0 + z * 4.0 / 3.0 + z * z * 2.0 / 3.0
}

pub fn phi_sine(z: Complex64) -> Complex64 {
    1.0 + z.sin()
}

pub fn phi_rational(z: Complex64) -> Complex64 {
    let k = 1.0 + SQRT_2;
    1.0 + (z / k) * (k + z) / (k - z)
}

pub fn phi_nephroid(z: Complex64) -> Complex64 {
    1.0 + z - z * z * z / 3.0
}

/// Boundary point at parameter `theta` for the regions parameterized over the circle.
fn boundary_point(region: RegionKind, theta: f64) -> Complex64 {
    let z = Complex64::from_polar(1.0, theta);
    match region {
        RegionKind::Lemniscate => {
            // w^2 = 1 + e^{i theta}, continuous through w = 0 at theta = pi
            let modulus = (2.0 * (theta / 2.0).cos().abs()).sqrt();
            let arg = if theta <= PI { theta / 4.0 } else { theta / 4.0 - PI / 2.0 };
            Complex64::from_polar(modulus, arg)
        }
        RegionKind::Exponential => z.exp(),
        RegionKind::Sigmoid => {
            let q = z.exp();
            2.0 * q / (1.0 + q)
        }
        other => match other.generating_map() {
            Some(phi) => phi(z),
            None => unreachable!("{other} has no circle parameterization"),
        },
    }
}

fn truncated_parabola(n: usize) -> Vec<Complex64> {
    let arc = n - n / 8;
    let mut pts = Vec::with_capacity(n + 1);
    for k in 0..=arc {
        let v = -TRUNCATION + 2.0 * TRUNCATION * k as f64 / arc as f64;
        pts.push(Complex64::new((1.0 + v * v) / 2.0, v));
    }
    let far = (1.0 + TRUNCATION * TRUNCATION) / 2.0;
    let closing = n - arc;
    for k in 1..=closing {
        let v = TRUNCATION - 2.0 * TRUNCATION * k as f64 / closing as f64;
        pts.push(Complex64::new(far, v));
    }
    pts
}

fn truncated_half_plane(alpha: f64, n: usize) -> Vec<Complex64> {
    let side = n / 4;
    let corners = [
        Complex64::new(alpha, -TRUNCATION),
        Complex64::new(alpha, TRUNCATION),
        Complex64::new(alpha + TRUNCATION, TRUNCATION),
        Complex64::new(alpha + TRUNCATION, -TRUNCATION),
    ];
    let mut pts = Vec::with_capacity(n + 1);
    for edge in 0..4 {
        let (p, q) = (corners[edge], corners[(edge + 1) % 4]);
        let steps = if edge == 3 { n - 3 * side } else { side };
        for k in 0..steps {
            pts.push(p + (q - p) * (k as f64 / steps as f64));
        }
    }
    pts.push(corners[0]);
    pts
}

/// The lune is the disc `|w - 1| < sqrt 2` minus the closed disc `|w + 1| <= sqrt 2`.
fn lune_arcs(n: usize) -> Vec<Complex64> {
    let outer = n / 2;
    let inner = n - outer;
    let mut pts = Vec::with_capacity(n + 1);
    for k in 0..outer {
        let psi = -0.75 * PI + 1.5 * PI * k as f64 / outer as f64;
        pts.push(1.0 + Complex64::from_polar(SQRT_2, psi));
    }
    for k in 0..=inner {
        let psi = 0.25 * PI - 0.5 * PI * k as f64 / inner as f64;
        pts.push(-1.0 + Complex64::from_polar(SQRT_2, psi));
    }
    pts
}

struct Probe {
    winding: i32,
    distance: f64,
    /// Chord error estimate near the closest segment.
    near: f64,
}

/// Winding number of a closed polyline around `w` plus distance to it.
pub fn winding_number(pts: &[Complex64], w: Complex64) -> i32 {
    winding_probe(pts, w).winding
}

fn winding_probe(pts: &[Complex64], w: Complex64) -> Probe {
    let mut winding = 0;
    let mut best = f64::INFINITY;
    let mut best_seg = 0;
    for (i, seg) in pts.windows(2).enumerate() {
        let (p, q) = (seg[0], seg[1]);
        let pq = q - p;
        let pw = w - p;
        let len2 = pq.norm_sqr();
        let t = if len2 > 0.0 { ((pw.re * pq.re + pw.im * pq.im) / len2).clamp(0.0, 1.0) } else { 0.0 };
        let d2 = (pw - pq * t).norm_sqr();
        if d2 < best {
            best = d2;
            best_seg = i;
        }
        let cross = pq.re * pw.im - pq.im * pw.re;
        if p.im <= w.im {
            if q.im > w.im && cross > 0.0 {
                winding += 1;
            }
        } else if q.im <= w.im && cross < 0.0 {
            winding -= 1;
        }
    }
    Probe { winding, distance: best.sqrt(), near: local_sagitta(pts, best_seg) * 4.0 }
}

/// Deviation of the true curve from segment `i` estimated from second differences.
fn local_sagitta(pts: &[Complex64], i: usize) -> f64 {
    let m = pts.len() - 1; // closed: pts[m] == pts[0]
    let second = |k: usize| {
        let prev = pts[(k + m - 1) % m];
        let next = pts[(k + 1) % m];
        (prev - 2.0 * pts[k % m] + next).norm()
    };
    second(i).max(second(i + 1)) / 8.0
}

type Cache = [[OnceLock<Vec<Complex64>>; WINDING_LEVELS]; 10];

static POLYLINES: Cache = [const { [const { OnceLock::new() }; WINDING_LEVELS] }; 10];

fn with_polyline<T>(region: RegionKind, level: usize, n: usize, f: impl FnOnce(&[Complex64]) -> T) -> T {
    match region {
        // parameterized family: not cached
        RegionKind::Order(_) => f(&region.boundary_curve(n)),
        _ => {
            let pts = POLYLINES[region.tag().index()][level].get_or_init(|| region.boundary_curve(n));
            f(pts)
        }
    }
}
