use std::cmp::Ordering;
use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use starlike_core::classbounds::{ClassKind, ClassSpec};
use starlike_core::extremal::{certify_sharpness_with, Extremal, SharpnessTable};
use starlike_core::radius_poly::{build_polynomial, smallest_root_in_unit, RadiusResult};
use starlike_core::regions::{Alpha, RegionKind, RegionTag};
use starlike_core::verify::{
    check_lemma_bound, default_regions, full_matrix, oracle_grid, radius_by_margin, sharpness_grid, LemmaReport,
    MatrixOptions, VerificationReport, LEMMA_SLACK,
};

use crate::output::{
    csv_bytes, emit, json_bytes, records_csv, records_json, round9, sig9, write_all_atomic, OutputRecord,
};
use crate::{CliError, Format, Method, PlotArgs, RadiusArgs, RadiusFormat, SpecArgs, TableArgs, VerifyArgs};

/// Touch-point residual accepted as sharp.
const SHARPNESS_TOL: f64 = 1e-6;

fn build_spec(args: &SpecArgs) -> Result<ClassSpec, CliError> {
    let kind = args.class.ok_or_else(|| CliError::Usage("--class is required".into()))?;
    let spec = match (kind, args.b, args.c, args.p1, args.p2) {
        (ClassKind::K1, Some(b), None, None, None) => ClassSpec::k1(b)?,
        (ClassKind::K1, None, None, Some(p1), None) => ClassSpec::from_normalized(kind, p1, 0.0)?,
        (ClassKind::K1, ..) => {
            return Err(CliError::Usage("K1 takes either --b or --p1, and no second parameter".into()))
        }
        (ClassKind::K2, Some(b), Some(c), None, None) => ClassSpec::k2(b, c)?,
        (ClassKind::K3, Some(b), Some(c), None, None) => ClassSpec::k3(b, c)?,
        (_, None, None, Some(p1), Some(p2)) => ClassSpec::from_normalized(kind, p1, p2)?,
        _ => return Err(CliError::Usage(format!("{kind} takes either --b and --c, or --p1 and --p2"))),
    };
    Ok(spec)
}

fn region_kind(tag: RegionTag, alpha: Option<f64>) -> Result<RegionKind, CliError> {
    if tag != RegionTag::Order && alpha.is_some() {
        return Err(CliError::Parameter(format!("--alpha applies only to the order region, not {tag}")));
    }
    Ok(tag.with_alpha(Alpha::new(alpha.unwrap_or(0.0))?))
}

/// `Some(passed)` where a touch-point rule exists, `None` otherwise.
fn sharp_flag(spec: &ClassSpec, region: RegionKind, rho: f64, table: SharpnessTable) -> Option<bool> {
    match spec.b() {
        Some(b) if b != 0.0 && spec.kind() != ClassKind::K3 => {
            certify_sharpness_with(table, spec, region, rho, SHARPNESS_TOL).ok().map(|r| r.passed)
        }
        _ => None,
    }
}

fn solve(spec: &ClassSpec, region: RegionKind, method: Method) -> starlike_core::Result<RadiusResult> {
    match method {
        Method::Polynomial => smallest_root_in_unit(&build_polynomial(spec, region)),
        Method::MarginOracle => radius_by_margin(spec, region),
    }
}

fn record(
    spec: &ClassSpec,
    region: RegionKind,
    method: Method,
    table: SharpnessTable,
) -> starlike_core::Result<OutputRecord> {
    let res = solve(spec, region, method)?;
    let (p1, p2) = spec.pair();
    Ok(OutputRecord {
        class: spec.kind().name().to_string(),
        b: spec.b(),
        c: spec.c(),
        p1,
        p2,
        region: region.name().to_string(),
        alpha: region.alpha(),
        rho: res.rho,
        residual: res.residual,
        method: res.method.name().to_string(),
        sharp: sharp_flag(spec, region, res.rho, table),
    })
}

pub fn radius(args: &RadiusArgs) -> Result<(), CliError> {
    let spec = build_spec(&args.spec)?;
    let region = region_kind(args.region.region, args.region.alpha)?;
    let rec = record(&spec, region, args.method, args.sharpness_table)?;
    let bytes = match args.format {
        RadiusFormat::Text => format!("{}\n", rec.text_line()).into_bytes(),
        RadiusFormat::Csv => records_csv(std::slice::from_ref(&rec))?,
        RadiusFormat::Json => json_bytes(&rec.rounded())?,
    };
    emit(None, &bytes)
}

/// Comma list `-1,0,0.5` or inclusive range `start:stop:step`.
pub fn parse_values(flag: &str, s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Usage(format!("--{flag} `{s}`: {why}"));
    let num = |t: &str| t.trim().parse::<f64>().ok().filter(|x| x.is_finite());
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [list] => list.split(',').map(|t| num(t).ok_or_else(|| bad("not a number list"))).collect(),
        [start, stop, step] => {
            let (start, stop, step) = match (num(start), num(stop), num(step)) {
                (Some(a), Some(b), Some(h)) if h > 0.0 && b >= a => (a, b, h),
                _ => return Err(bad("range needs start <= stop and step > 0")),
            };
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|k| start + k as f64 * step).collect())
        }
        _ => Err(bad("expected a comma list or start:stop:step")),
    }
}

fn cmp_opt(a: Option<f64>, b: Option<f64>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (a, b) => a.is_some().cmp(&b.is_some()),
    }
}

fn row_order(x: &(ClassSpec, RegionKind), y: &(ClassSpec, RegionKind)) -> Ordering {
    let key = |s: &ClassSpec| ClassKind::ALL.iter().position(|k| *k == s.kind());
    key(&x.0)
        .cmp(&key(&y.0))
        .then(cmp_opt(x.0.b(), y.0.b()))
        .then(cmp_opt(x.0.c(), y.0.c()))
        .then(x.1.tag().index().cmp(&y.1.tag().index()))
        .then(cmp_opt(x.1.alpha(), y.1.alpha()))
}

pub fn table(args: &TableArgs) -> Result<(), CliError> {
    let bs = parse_values("b", &args.b)?;
    let cs = parse_values("c", &args.c)?;
    let alphas = parse_values("alpha", &args.alpha)?;
    let tags: Vec<RegionTag> = if args.regions.is_empty() { RegionTag::ALL.to_vec() } else { args.regions.clone() };
    let mut regions = Vec::new();
    for tag in tags {
        if tag == RegionTag::Order {
            for &a in &alphas {
                regions.push(region_kind(tag, Some(a))?);
            }
        } else {
            regions.push(region_kind(tag, None)?);
        }
    }

    let mut specs = Vec::new();
    let mut skipped = 0usize;
    for &kind in &args.class {
        for &b in &bs {
            let c_values: Vec<Option<f64>> =
                if kind == ClassKind::K1 { vec![None] } else { cs.iter().copied().map(Some).collect() };
            for c in c_values {
                let spec = match (kind, c) {
                    (ClassKind::K1, _) => ClassSpec::k1(b),
                    (ClassKind::K2, Some(c)) => ClassSpec::k2(b, c),
                    (_, c) => ClassSpec::k3(b, c.unwrap_or(0.0)),
                };
                match spec {
                    Ok(s) => specs.push(s),
                    Err(_) if args.skip_invalid => skipped += 1,
                    Err(e) => {
                        let what = match c {
                            Some(c) => format!("{kind} b={b} c={c}"),
                            None => format!("{kind} b={b}"),
                        };
                        return Err(CliError::from(e).context(&format!("{what} (use --skip-invalid to drop)")));
                    }
                }
            }
        }
    }

    let mut cells: Vec<(ClassSpec, RegionKind)> =
        specs.iter().flat_map(|s| regions.iter().map(move |r| (*s, *r))).collect();
    cells.sort_by(row_order);
    let results: Vec<_> = cells
        .par_iter()
        .map(|(spec, region)| record(spec, *region, Method::Polynomial, args.sharpness_table))
        .collect();
    let mut records = Vec::with_capacity(results.len());
    for ((spec, region), res) in cells.iter().zip(results) {
        match res {
            Ok(r) => records.push(r),
            Err(_) if args.skip_invalid => skipped += 1,
            Err(e) => return Err(CliError::from(e).context(&format!("{spec} {region}"))),
        }
    }
    if skipped > 0 {
        eprintln!("skipped {skipped} invalid combinations");
    }
    let bytes = match args.format {
        Format::Csv => records_csv(&records)?,
        Format::Json => records_json(&records)?,
    };
    emit(args.out.as_deref(), &bytes)
}

impl CliError {
    fn context(self, what: &str) -> CliError {
        match self {
            CliError::NoRoot(m) => CliError::NoRoot(format!("{what}: {m}")),
            CliError::Parameter(m) => CliError::Parameter(format!("{what}: {m}")),
            other => other,
        }
    }
}

const VERIFY_HEADER: [&str; 15] = [
    "case",
    "class",
    "b",
    "c",
    "p1",
    "p2",
    "region",
    "alpha",
    "rho_poly",
    "rho_margin",
    "abs_diff",
    "oracle",
    "containment",
    "sharp",
    "notes",
];

#[derive(Serialize)]
struct VerifyRow {
    case: String,
    class: String,
    b: Option<f64>,
    c: Option<f64>,
    p1: f64,
    p2: f64,
    region: String,
    alpha: Option<f64>,
    rho_poly: Option<f64>,
    rho_margin: Option<f64>,
    abs_diff: Option<f64>,
    oracle: bool,
    containment: bool,
    sharp: Option<bool>,
    notes: String,
}

impl From<&VerificationReport> for VerifyRow {
    fn from(r: &VerificationReport) -> Self {
        VerifyRow {
            case: r.case_id(),
            class: r.class.name().to_string(),
            b: r.b.map(round9),
            c: r.c.map(round9),
            p1: round9(r.p1),
            p2: round9(r.p2),
            region: r.region.name().to_string(),
            alpha: r.alpha.map(round9),
            rho_poly: r.rho_poly.map(round9),
            rho_margin: r.rho_margin.map(round9),
            abs_diff: r.abs_diff.map(round9),
            oracle: r.oracle_pass,
            containment: r.containment_pass,
            sharp: r.sharpness_pass,
            notes: r.notes.clone(),
        }
    }
}

impl VerifyRow {
    fn fields(&self) -> Vec<String> {
        let opt = |x: Option<f64>| x.map(sig9).unwrap_or_default();
        vec![
            self.case.clone(),
            self.class.clone(),
            opt(self.b),
            opt(self.c),
            sig9(self.p1),
            sig9(self.p2),
            self.region.clone(),
            opt(self.alpha),
            opt(self.rho_poly),
            opt(self.rho_margin),
            opt(self.abs_diff),
            self.oracle.to_string(),
            self.containment.to_string(),
            self.sharp.map(|s| s.to_string()).unwrap_or_default(),
            self.notes.clone(),
        ]
    }
}

/// `(b, alpha)` cells of the default lemma sweep.
const LEMMA_B: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];
const LEMMA_ALPHA: [f64; 3] = [0.0, 0.3, 0.6];

fn lemma_line(rep: &LemmaReport) -> String {
    format!(
        "lemma b={} alpha={} trials={} seed={}: min slack {}, max slack {}",
        rep.b,
        rep.alpha,
        rep.trials,
        rep.seed,
        sig9(rep.min_slack),
        sig9(rep.max_slack)
    )
}

fn run_lemma(b: f64, alpha: f64, trials: usize, seed: u64) -> Result<LemmaReport, CliError> {
    let rep = check_lemma_bound(b, alpha, trials, seed)?;
    if rep.min_slack < -LEMMA_SLACK {
        return Err(CliError::Verification(lemma_line(&rep)));
    }
    Ok(rep)
}

fn verify_lemma_only(args: &VerifyArgs) -> Result<(), CliError> {
    let b = args.b.ok_or_else(|| CliError::Usage("--lemma needs --b".into()))?;
    let rep = run_lemma(b, args.alpha.unwrap_or(0.0), args.trials, args.seed)?;
    println!("{}", lemma_line(&rep));
    if let Some(path) = &args.out {
        let bytes = match args.format {
            Format::Csv => csv_bytes(
                &["b", "alpha", "trials", "seed", "min_slack", "max_slack"],
                vec![vec![
                    sig9(rep.b),
                    sig9(rep.alpha),
                    rep.trials.to_string(),
                    rep.seed.to_string(),
                    sig9(rep.min_slack),
                    sig9(rep.max_slack),
                ]],
            )?,
            Format::Json => json_bytes(&LemmaReport {
                b: round9(rep.b),
                alpha: round9(rep.alpha),
                min_slack: round9(rep.min_slack),
                max_slack: round9(rep.max_slack),
                ..rep
            })?,
        };
        emit(Some(path), &bytes)?;
    }
    Ok(())
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    if args.lemma {
        return verify_lemma_only(args);
    }
    let opts = MatrixOptions {
        tol: args.tol,
        table: args.sharpness_table,
        samples: args.samples,
        tamper: args.tamper,
        ..MatrixOptions::default()
    };
    let mut specs = oracle_grid();
    specs.extend(sharpness_grid());
    let reports = full_matrix(&specs, &default_regions(), &opts);
    let rows: Vec<VerifyRow> = reports.iter().map(VerifyRow::from).collect();

    let mut failures: Vec<String> =
        reports.iter().filter(|r| !r.passed()).map(|r| format!("FAIL {}: {}", r.case_id(), r.notes)).collect();
    let mut lemma_ok = 0;
    for (i, &b) in LEMMA_B.iter().enumerate() {
        for (j, &alpha) in LEMMA_ALPHA.iter().enumerate() {
            let seed = args.seed + (LEMMA_ALPHA.len() * i + j) as u64;
            match run_lemma(b, alpha, args.trials, seed) {
                Ok(_) => lemma_ok += 1,
                Err(e) => failures.push(format!("FAIL lemma b={b} alpha={alpha}: {e}")),
            }
        }
    }

    let count = |f: &dyn Fn(&VerificationReport) -> bool| reports.iter().filter(|r| f(r)).count();
    let sharp_checked = count(&|r| r.sharpness_pass.is_some());
    println!("cells: {}", reports.len());
    println!("oracle equivalence: {}/{} within {:e}", count(&|r| r.oracle_pass), reports.len(), args.tol);
    println!("containment at 0.99 rho: {}/{}", count(&|r| r.containment_pass), reports.len());
    println!(
        "sharpness ({} table): {}/{sharp_checked}",
        args.sharpness_table.name(),
        count(&|r| r.sharpness_pass == Some(true))
    );
    println!("lemma: {lemma_ok}/{} (b, alpha) cells, {} trials each", LEMMA_B.len() * LEMMA_ALPHA.len(), args.trials);

    if let Some(path) = &args.out {
        let bytes = match args.format {
            Format::Csv => csv_bytes(&VERIFY_HEADER, rows.iter().map(VerifyRow::fields))?,
            Format::Json => json_bytes(&rows)?,
        };
        emit(Some(path), &bytes)?;
    }
    if failures.is_empty() {
        println!("all checks passed");
        Ok(())
    } else {
        for f in &failures {
            println!("{f}");
        }
        Err(CliError::Verification(format!("{} failing cells", failures.len())))
    }
}

fn curve_csv(thetas: impl IntoIterator<Item = f64>, pts: &[starlike_core::Complex64]) -> Result<Vec<u8>, CliError> {
    csv_bytes(&["theta", "u", "v"], thetas.into_iter().zip(pts).map(|(t, w)| vec![sig9(t), sig9(w.re), sig9(w.im)]))
}

pub fn plot_data(args: &PlotArgs) -> Result<(), CliError> {
    let region = region_kind(args.region.region, args.region.alpha)?;
    if args.samples < 4 {
        return Err(CliError::Parameter("--samples must be at least 4".into()));
    }
    let dir = &args.out_dir;
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;

    let boundary = region.boundary_curve(args.samples);
    let mut files: Vec<(PathBuf, Vec<u8>)> =
        vec![(dir.join("boundary.csv"), curve_csv(region.boundary_parameters(args.samples), &boundary)?)];

    let spec_given = args.spec.class.is_some();
    if !spec_given && [args.spec.b, args.spec.c, args.spec.p1, args.spec.p2].iter().any(Option::is_some) {
        return Err(CliError::Usage("class parameters need --class".into()));
    }
    let mut summary = vec![format!("region {region}: {} boundary points", boundary.len())];
    if spec_given {
        let spec = build_spec(&args.spec)?;
        let rho = smallest_root_in_unit(&build_polynomial(&spec, region))?.rho;
        let rep = certify_sharpness_with(args.sharpness_table, &spec, region, rho, SHARPNESS_TOL)?;
        let (b, c) = spec.raw().expect("certified specs carry raw parameters");
        let extremal = Extremal::new(rep.extremal, b, c)?;
        let mut image = extremal.image_curve(rho, args.samples)?;
        image.push(image[0]);
        let thetas = (0..=args.samples).map(|k| std::f64::consts::TAU * k as f64 / args.samples as f64);
        files.push((dir.join("image.csv"), curve_csv(thetas, &image)?));
        let z = rep.point.z();
        files.push((
            dir.join("touch.csv"),
            csv_bytes(
                &["direction", "rho", "z_re", "z_im", "u", "v", "residual", "extremal", "sharp"],
                vec![vec![
                    rep.point.direction.label().to_string(),
                    sig9(rho),
                    sig9(z.re),
                    sig9(z.im),
                    sig9(rep.w_re),
                    sig9(rep.w_im),
                    sig9(rep.residual),
                    rep.extremal.name().to_string(),
                    rep.passed.to_string(),
                ]],
            )?,
        ));
        summary.push(format!("{spec} rho={} extremal {} touch {}", sig9(rho), rep.extremal, rep.point));
        summary.push(format!("touch w = {}{:+}i, residual {}", sig9(rep.w_re), rep.w_im, sig9(rep.residual)));
    }
    write_all_atomic(&files)?;
    for line in summary {
        println!("{line}");
    }
    for (path, _) in &files {
        println!("wrote {}", path.display());
    }
    Ok(())
}
