//! Independent checks of the radius polynomials.
//!
//! The margin route re-derives each radius from `R(r) = margin(a(r))`
//! without touching a transcribed coefficient; containment sampling and a
//! Monte Carlo test of the derivative bound cover the remaining links.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classbounds::{disc_bound, disc_centre, lemma_bound, radius_for_centre, ClassKind, ClassSpec};
use crate::error::{Error, Result};
use crate::extremal::{certify_sharpness_with, SharpnessTable};
use crate::radius_poly::{
    bisect, build_polynomial, first_sign_change, smallest_root_in_unit, RadiusResult, RootMethod,
};
use crate::regions::{Alpha, RegionKind, RegionTag};

/// Inward shrink of the sampled disc before membership tests.
pub const CONTAINMENT_TOLERANCE: f64 = 1e-9;

/// Boundary samples for containment checks.
pub const CONTAINMENT_SAMPLES: usize = 720;

/// Allowed excess of `|zp'/p|` over the bound.
pub const LEMMA_SLACK: f64 = 1e-9;

/// Largest `|z|` sampled by the lemma check.
pub const LEMMA_MAX_MODULUS: f64 = 0.95;

/// Order parameters used for the order region in the default grids.
pub const DEFAULT_ALPHAS: [f64; 4] = [0.0, 0.25, 0.5, 0.75];

/// Largest `r` whose disc centre stays inside the region's margin interval.
pub fn validity_radius(region: RegionKind) -> f64 {
    let spec = region.margin_spec();
    if spec.upper_a.is_finite() {
        radius_for_centre(spec.upper_a)
    } else {
        1.0
    }
}

/// Radius from the margin equation `margin(a(r)) - R(r) = 0`.
pub fn radius_by_margin(spec: &ClassSpec, region: RegionKind) -> Result<RadiusResult> {
    let ms = region.margin_spec();
    let h = |r: f64| ms.eval(disc_centre(r)) - spec.disc_radius(r);
    if h(0.0) <= 0.0 {
        return Err(Error::NoRoot(format!("{region} margin vanishes at the centre 1")));
    }
    let r_max = validity_radius(region).min(1.0 - 1e-12);
    let Some(br) = first_sign_change(&h, 0.0, r_max) else {
        return Err(if h(r_max) > 0.0 {
            Error::Validity { region: region.name(), a: disc_centre(r_max), lower: ms.lower_a, upper: ms.upper_a }
        } else {
            Error::NoRoot(format!("{region}: margin equation has no sign change for {spec}"))
        });
    };
    let br = bisect(&h, br);
    let rho = 0.5 * (br.lo + br.hi);
    // the margin formula must hold where the root lands
    region.margin(disc_centre(rho))?;
    Ok(RadiusResult { rho, residual: h(rho).abs(), bracket_width: br.hi - br.lo, method: RootMethod::MarginOracle })
}

/// Whether the sampled boundary of the image disc at `r`, shrunk by
/// [`CONTAINMENT_TOLERANCE`], lies inside the region.
pub fn check_containment(spec: &ClassSpec, region: RegionKind, r: f64, samples: usize) -> bool {
    let Ok(disc) = disc_bound(spec, r) else {
        return false;
    };
    let radius = (disc.radius - CONTAINMENT_TOLERANCE).max(0.0);
    let n = samples.max(1);
    (0..n).all(|k| {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        region.contains(disc.a + Complex64::from_polar(radius, theta))
    })
}

/// Steps above `rho`, as fractions of `rho`, probed for a protruding disc.
const STRICTNESS_STEPS: usize = 20;

/// Contained at `0.995 rho` and not contained somewhere in `(rho, 1.2 rho]`.
pub fn check_strictness(spec: &ClassSpec, region: RegionKind, rho: f64, samples: usize) -> bool {
    if !check_containment(spec, region, 0.995 * rho, samples) {
        return false;
    }
    (1..=STRICTNESS_STEPS).any(|k| {
        let r = rho * (1.0 + 0.2 * k as f64 / STRICTNESS_STEPS as f64);
        r < 1.0 && !check_containment(spec, region, r, samples)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub b: f64,
    pub alpha: f64,
    pub trials: usize,
    pub seed: u64,
    /// Smallest `bound - |zp'/p|` seen.
    pub min_slack: f64,
    /// Largest `bound - |zp'/p|` seen.
    pub max_slack: f64,
}

/// Monte Carlo test of the derivative bound on the family
/// `p = alpha + (1 - alpha)(1 + w)/(1 - w)`, `w = z (e z + b)/(1 + b e z)`,
/// `e = t e^{i phi}`, `t in [-1, 1]`.
pub fn check_lemma_bound(b: f64, alpha: f64, trials: usize, seed: u64) -> Result<LemmaReport> {
    if !(b.is_finite() && b.abs() <= 1.0) {
        return Err(Error::Parameter(format!("|b| = {} exceeds 1", b.abs())));
    }
    Alpha::new(alpha)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = Complex64::new(1.0, 0.0);
    let mut min_slack = f64::INFINITY;
    let mut max_slack = f64::NEG_INFINITY;
    for _ in 0..trials {
        let t: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let modulus = LEMMA_MAX_MODULUS * rng.random::<f64>().sqrt();
        let z = Complex64::from_polar(modulus, rng.random_range(0.0..std::f64::consts::TAU));

        let e = Complex64::from_polar(t, phi);
        let den = one + b * e * z;
        let psi = (e * z + b) / den;
        let dpsi = e * (1.0 - b * b) / (den * den);
        let w = z * psi;
        let dw = psi + z * dpsi;
        let p = alpha + (1.0 - alpha) * (one + w) / (one - w);
        let dp = (1.0 - alpha) * 2.0 * dw / ((one - w) * (one - w));
        let value = (z * dp / p).norm();

        let bound = lemma_bound(b, alpha, modulus)?;
        let slack = bound - value;
        if slack < -LEMMA_SLACK {
            return Err(Error::Violation { t, phi, z_re: z.re, z_im: z.im, excess: -slack });
        }
        min_slack = min_slack.min(slack);
        max_slack = max_slack.max(slack);
    }
    Ok(LemmaReport { b, alpha, trials, seed, min_slack, max_slack })
}

/// Test hook: add `delta` to one coefficient of one radius polynomial.
///
/// Syntax `K<1|2|3>-S-<code>:c<k>:<delta>`, e.g. `K3-S-P:c2:+0.1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tamper {
    pub class: ClassKind,
    pub region: RegionTag,
    pub coeff: usize,
    pub delta: f64,
}

/// Identifier of one of the thirty equations, e.g. `K1-S-lune`.
pub fn equation_id(class: ClassKind, region: RegionTag) -> String {
    format!("{}-S-{}", class.name(), region.code())
}

impl FromStr for Tamper {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parameter(format!("tamper `{s}` is not of the form K3-S-P:c2:+0.1"));
        let mut parts = s.split(':');
        let (Some(cell), Some(coeff), Some(delta), None) = (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad());
        };
        let mut cell_parts = cell.splitn(3, '-');
        let (Some(class), Some("S"), Some(code)) = (cell_parts.next(), cell_parts.next(), cell_parts.next()) else {
            return Err(bad());
        };
        let class = ClassKind::from_name(class).ok_or_else(bad)?;
        let region = RegionTag::from_code(code).ok_or_else(bad)?;
        let coeff = coeff.strip_prefix('c').and_then(|k| k.parse().ok()).ok_or_else(bad)?;
        let delta: f64 = delta.parse().map_err(|_| bad())?;
        if !delta.is_finite() {
            return Err(bad());
        }
        Ok(Tamper { class, region, coeff, delta })
    }
}

impl fmt::Display for Tamper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:c{}:{:+}", equation_id(self.class, self.region), self.coeff, self.delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixOptions {
    /// Allowed `|rho_poly - rho_margin|`.
    pub tol: f64,
    pub sharpness_tol: f64,
    pub table: SharpnessTable,
    pub samples: usize,
    pub tamper: Option<Tamper>,
}

impl Default for MatrixOptions {
    fn default() -> Self {
        MatrixOptions {
            tol: 1e-8,
            sharpness_tol: 1e-6,
            table: SharpnessTable::default(),
            samples: CONTAINMENT_SAMPLES,
            tamper: None,
        }
    }
}

/// Outcome of every check on one (class parameters, region) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub class: ClassKind,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub p1: f64,
    pub p2: f64,
    pub region: RegionTag,
    pub alpha: Option<f64>,
    pub rho_poly: Option<f64>,
    pub rho_margin: Option<f64>,
    pub abs_diff: Option<f64>,
    pub oracle_pass: bool,
    pub containment_pass: bool,
    pub sharpness_pass: Option<bool>,
    pub notes: String,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.oracle_pass && self.containment_pass && self.sharpness_pass != Some(false)
    }

    /// Human-readable identifier such as `K2-S-lune b=-1 c=-1`.
    pub fn case_id(&self) -> String {
        let mut id = equation_id(self.class, self.region);
        match (self.b, self.c) {
            (Some(b), Some(c)) => id.push_str(&format!(" b={b} c={c}")),
            (Some(b), None) => id.push_str(&format!(" b={b}")),
            _ => id.push_str(&format!(" p1={} p2={}", self.p1, self.p2)),
        }
        if let Some(a) = self.alpha {
            id.push_str(&format!(" alpha={a}"));
        }
        id
    }
}

fn verify_cell(spec: &ClassSpec, region: RegionKind, opts: &MatrixOptions) -> VerificationReport {
    let mut notes = Vec::new();
    let mut poly = build_polynomial(spec, region);
    if let Some(t) = opts.tamper {
        if t.class == spec.kind() && t.region == region.tag() {
            poly = poly.perturbed(t.coeff, t.delta);
            notes.push(format!("tampered {t}"));
        }
    }
    let rho_poly = smallest_root_in_unit(&poly).map_err(|e| notes.push(format!("polynomial: {e}"))).ok().map(|r| r.rho);
    let rho_margin = radius_by_margin(spec, region).map_err(|e| notes.push(format!("margin: {e}"))).ok().map(|r| r.rho);
    let abs_diff = rho_poly.zip(rho_margin).map(|(p, m)| (p - m).abs());
    let oracle_pass = abs_diff.is_some_and(|d| d <= opts.tol);

    let rho = rho_poly.or(rho_margin);
    let containment_pass = rho.is_some_and(|r| check_containment(spec, region, 0.99 * r, opts.samples));

    let sharpness_pass = match (spec.b(), rho) {
        (Some(b), Some(r)) if b != 0.0 && spec.kind() != ClassKind::K3 => {
            match certify_sharpness_with(opts.table, spec, region, r, opts.sharpness_tol) {
                Ok(rep) => {
                    if !rep.passed {
                        notes.push(format!("sharpness residual {:.3e}", rep.residual));
                    }
                    Some(rep.passed)
                }
                Err(e) => {
                    notes.push(format!("sharpness: {e}"));
                    None
                }
            }
        }
        _ => None,
    };

    let (p1, p2) = spec.pair();
    VerificationReport {
        class: spec.kind(),
        b: spec.b(),
        c: spec.c(),
        p1,
        p2,
        region: region.tag(),
        alpha: region.alpha(),
        rho_poly,
        rho_margin,
        abs_diff,
        oracle_pass,
        containment_pass,
        sharpness_pass,
        notes: notes.join("; "),
    }
}

/// Every check on every (spec, region) cell, in spec-major order.
/// Failures are recorded per cell; the sweep never aborts.
pub fn full_matrix(specs: &[ClassSpec], regions: &[RegionKind], opts: &MatrixOptions) -> Vec<VerificationReport> {
    let cells: Vec<(ClassSpec, RegionKind)> =
        specs.iter().flat_map(|s| regions.iter().map(move |r| (*s, *r))).collect();
    cells.par_iter().map(|(spec, region)| verify_cell(spec, *region, opts)).collect()
}

/// Nine fixed regions plus the order region at each of [`DEFAULT_ALPHAS`].
pub fn default_regions() -> Vec<RegionKind> {
    let mut out = Vec::new();
    for tag in RegionTag::ALL {
        if tag == RegionTag::Order {
            for a in DEFAULT_ALPHAS {
                out.push(RegionKind::order(a).expect("default alpha in range"));
            }
        } else {
            out.push(tag.with_alpha(Alpha::new(0.0).expect("0 in range")));
        }
    }
    out
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
}

/// Normalized grids: K1 `n~` at 9 points on `[0, 2]`, K2 `(m, n)` at 5x5
/// on `[0, 2]^2`, K3 `(u, v)` at 5x5 on `[0, 1] x [0, 2]`.
pub fn oracle_grid() -> Vec<ClassSpec> {
    let mut out: Vec<ClassSpec> =
        linspace(0.0, 2.0, 9).map(|t| ClassSpec::k1_normalized(t).expect("grid in range")).collect();
    for m in linspace(0.0, 2.0, 5) {
        for n in linspace(0.0, 2.0, 5) {
            out.push(ClassSpec::k2_normalized(m, n).expect("grid in range"));
        }
    }
    for u in linspace(0.0, 1.0, 5) {
        for v in linspace(0.0, 2.0, 5) {
            out.push(ClassSpec::k3_normalized(u, v).expect("grid in range"));
        }
    }
    out
}

/// Raw parameter values probed for sharpness.
pub const SHARPNESS_VALUES: [f64; 4] = [-1.0, -0.5, 0.5, 1.0];

/// K1 at every `b`, K2 at every `(b, c)` pair whose extremal exists (`|2b - c| <= 1`).
pub fn sharpness_grid() -> Vec<ClassSpec> {
    let mut out: Vec<ClassSpec> = SHARPNESS_VALUES.iter().map(|&b| ClassSpec::k1(b).expect("grid in range")).collect();
    for b in SHARPNESS_VALUES {
        for c in SHARPNESS_VALUES {
            if (2.0 * b - c).abs() <= 1.0 {
                out.push(ClassSpec::k2(b, c).expect("grid in range"));
            }
        }
    }
    out
}
