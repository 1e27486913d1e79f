//! Command orchestration for the `ptorus` binary: config resolution,
//! deterministic CSV/JSON emission, the property-verification suites,
//! and the parallel spectrum driver.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::json;
use thiserror::Error;

use ptorus_core::counting::{self, Convention, CountSeries};
use ptorus_core::cusp;
use ptorus_core::farey::{self, SpectrumEntry, TreeNode};
use ptorus_core::norm;
use ptorus_core::sl2::{build_representation, hyperbolic_length, FrickeTriple};
use ptorus_core::words::{evaluate, oz_word, HomologyClass, Slope};
use ptorus_core::ALG_TOL;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("InvalidTriple: {0}")]
    InvalidTriple(String),
    #[error("Overflow: {0}")]
    Overflow(String),
    #[error("verification failed in suite {0}")]
    VerifyFailed(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InvalidTriple(_) => 2,
            CliError::Overflow(_) => 3,
            CliError::VerifyFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Float,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Optional JSON config file mirroring the flags; explicit flags win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub triple: Option<String>,
    pub mode: Option<Mode>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub parallel: Option<usize>,
    #[serde(rename = "L")]
    pub l: Option<Vec<f64>>,
    pub depth: Option<u32>,
    pub word_bound: Option<u64>,
    pub conj_depth: Option<u32>,
    pub with_ball: Option<bool>,
    pub suite: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Triple selection: the "modular" preset or explicit coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleSpec {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl TripleSpec {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        if s == "modular" {
            return Ok(TripleSpec {
                x: 3.0,
                y: 3.0,
                z: 3.0,
            });
        }
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(CliError::InvalidTriple(format!(
                "expected x,y,z or \"modular\", got {s:?}"
            )));
        }
        let mut v = [0.0f64; 3];
        for (i, p) in parts.iter().enumerate() {
            v[i] = p
                .trim()
                .parse()
                .map_err(|_| CliError::InvalidTriple(format!("bad coordinate {p:?}")))?;
        }
        Ok(TripleSpec {
            x: v[0],
            y: v[1],
            z: v[2],
        })
    }

    pub fn triple(&self) -> Result<FrickeTriple, CliError> {
        FrickeTriple::new(self.x, self.y, self.z)
            .map_err(|e| CliError::InvalidTriple(e.to_string()))
    }

    /// Integer coordinates required by exact mode.
    pub fn integer(&self) -> Result<(i64, i64, i64), CliError> {
        for v in [self.x, self.y, self.z] {
            if v.fract() != 0.0 || v.abs() > 1e15 {
                return Err(CliError::InvalidTriple(format!(
                    "exact mode requires an integer triple, got {v}"
                )));
            }
        }
        Ok((self.x as i64, self.y as i64, self.z as i64))
    }
}

/// Fully resolved run configuration (flags merged over the config file).
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub triple: TripleSpec,
    pub mode: Mode,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub parallel: usize,
    pub l: Vec<f64>,
    pub depth: u32,
    pub word_bound: u64,
    pub conj_depth: u32,
    pub with_ball: bool,
    pub suite: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            triple: TripleSpec {
                x: 3.0,
                y: 3.0,
                z: 3.0,
            },
            mode: Mode::Float,
            format: Format::Csv,
            out: None,
            parallel: 1,
            l: Vec::new(),
            depth: 8,
            word_bound: 6,
            conj_depth: 4,
            with_ball: false,
            suite: "all".into(),
        }
    }
}

/// 10 significant digits in plain decimal; the CSV regression format.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0.000000000".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    let prec = (9 - mag).max(0) as usize;
    format!("{v:.prec$}")
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn map_farey(e: farey::FareyError) -> CliError {
    match e {
        farey::FareyError::InvalidTriple => CliError::InvalidTriple(e.to_string()),
        other => CliError::InvalidTriple(other.to_string()),
    }
}

/// Spectrum enumeration split over `threads` worker threads: the two
/// quadrant trees are pre-expanded into a frontier of subtrees, the
/// workers collect independently, and a total (length, m, n) sort makes
/// the merged output independent of the split (gather-then-reduce).
pub fn spectrum_parallel(
    triple: FrickeTriple,
    l_max: f64,
    threads: usize,
) -> Result<Vec<SpectrumEntry<f64>>, CliError> {
    if threads <= 1 {
        return farey::enumerate_spectrum(triple, l_max).map_err(map_farey);
    }
    let cutoff = farey::trace_cutoff(l_max);
    let mut entries: Vec<SpectrumEntry<f64>> = Vec::new();
    for (slope, t) in [
        (Slope::new(1, 0).unwrap(), triple.x),
        (Slope::new(0, 1).unwrap(), triple.y),
    ] {
        if t <= cutoff {
            entries.push(SpectrumEntry {
                slope,
                trace: t,
                length: hyperbolic_length(t).expect("axis trace is hyperbolic"),
            });
        }
    }
    // breadth-first expansion until there is enough independent work
    let mut frontier: Vec<TreeNode<f64>> = farey::quadrant_seeds(triple).to_vec();
    while frontier.len() < 4 * threads {
        let Some(pos) = frontier.iter().position(|n| n.t_med <= cutoff) else {
            break;
        };
        let node = frontier.remove(pos);
        entries.push(SpectrumEntry {
            slope: node.mediant_slope(),
            trace: node.t_med,
            length: hyperbolic_length(node.t_med).expect("mediant trace is hyperbolic"),
        });
        let (l, r) = node.children();
        frontier.push(l);
        frontier.push(r);
    }

    let chunk = frontier.len().div_ceil(threads).max(1);
    let partials: Vec<Result<Vec<SpectrumEntry<f64>>, farey::FareyError>> =
        std::thread::scope(|scope| {
            let handles: Vec<_> = frontier
                .chunks(chunk)
                .map(|nodes| {
                    scope.spawn(move || {
                        let mut local = Vec::new();
                        for node in nodes {
                            farey::collect_subtree(node.clone(), cutoff, &mut local)?;
                        }
                        Ok(local)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        });
    for p in partials {
        entries.extend(p.map_err(map_farey)?);
    }
    farey::sort_entries(&mut entries);
    Ok(entries)
}

pub fn run_count(cfg: &RunConfig) -> Result<String, CliError> {
    let triple = cfg.triple.triple()?;
    if cfg.mode == Mode::Exact {
        cfg.triple.integer()?;
    }
    if cfg.l.is_empty() {
        return Err(CliError::Config("count needs at least one --L".into()));
    }
    let mut ls = cfg.l.clone();
    ls.sort_by(f64::total_cmp);
    ls.dedup();
    let mut rows: Vec<(f64, u64, f64)> = Vec::new();
    for &l in &ls {
        let n = spectrum_parallel(triple, l, cfg.parallel)?.len() as u64;
        rows.push((l, n, n as f64 / (l * l)));
    }
    let fitted = if rows.len() >= 3 {
        let series = CountSeries::new(
            rows.iter().map(|&(l, n, _)| (l, n)).collect(),
            Convention::Unoriented,
        );
        Some(
            counting::fit_quadratic_coefficient(&series)
                .expect("length checked")
                .0,
        )
    } else {
        None
    };
    let ball = if cfg.with_ball {
        let b = norm::unit_ball(triple, cfg.depth)
            .map_err(|e| CliError::InvalidTriple(e.to_string()))?;
        Some(norm::predict_c(&b, Convention::Unoriented))
    } else {
        None
    };

    match cfg.format {
        Format::Csv => {
            let mut s = String::from("L,N,N_over_L2\n");
            for (l, n, c) in &rows {
                writeln!(s, "{},{},{}", fmt_sig(*l), n, fmt_sig(*c)).unwrap();
            }
            if let Some(c) = fitted {
                writeln!(s, "# fitted_c = {}", fmt_sig(c)).unwrap();
            }
            if let Some(c) = ball {
                writeln!(s, "# predicted_c_unoriented = {}", fmt_sig(c)).unwrap();
            }
            Ok(s)
        }
        Format::Json => {
            let mut doc = json!({
                "convention": "unoriented",
                "rows": rows
                    .iter()
                    .map(|&(l, n, c)| json!({"L": l, "N": n, "N_over_L2": c}))
                    .collect::<Vec<_>>(),
            });
            if let Some(c) = fitted {
                doc["fitted_c"] = json!(c);
            }
            if let Some(c) = ball {
                doc["predicted_c_unoriented"] = json!(c);
            }
            Ok(format!("{doc}\n"))
        }
    }
}

pub fn run_spectrum(cfg: &RunConfig) -> Result<String, CliError> {
    let l_max = *cfg
        .l
        .first()
        .ok_or_else(|| CliError::Config("spectrum needs --L".into()))?;
    match cfg.mode {
        Mode::Float => {
            let triple = cfg.triple.triple()?;
            let entries = spectrum_parallel(triple, l_max, cfg.parallel)?;
            let rows: Vec<(i64, i64, String, f64)> = entries
                .iter()
                .map(|e| (e.slope.m(), e.slope.n(), fmt_sig(e.trace), e.length))
                .collect();
            Ok(spectrum_table(cfg.format, &rows))
        }
        Mode::Exact => {
            cfg.triple.triple()?;
            let (x, y, z) = cfg.triple.integer()?;
            let entries: Vec<SpectrumEntry<BigInt>> =
                farey::enumerate_spectrum_exact(x, y, z, l_max).map_err(map_farey)?;
            let rows: Vec<(i64, i64, String, f64)> = entries
                .iter()
                .map(|e| (e.slope.m(), e.slope.n(), e.trace.to_string(), e.length))
                .collect();
            Ok(spectrum_table(cfg.format, &rows))
        }
    }
}

fn spectrum_table(format: Format, rows: &[(i64, i64, String, f64)]) -> String {
    match format {
        Format::Csv => {
            let mut s = String::from("m,n,trace,length\n");
            for (m, n, t, len) in rows {
                writeln!(s, "{m},{n},{t},{}", fmt_sig(*len)).unwrap();
            }
            s
        }
        Format::Json => {
            let arr: Vec<_> = rows
                .iter()
                .map(|(m, n, t, len)| json!({"m": m, "n": n, "trace": t, "length": len}))
                .collect();
            format!("{}\n", json!(arr))
        }
    }
}

pub fn run_ball(cfg: &RunConfig) -> Result<String, CliError> {
    let triple = cfg.triple.triple()?;
    let ball = norm::unit_ball(triple, cfg.depth)
        .map_err(|e| CliError::InvalidTriple(e.to_string()))?;
    ball.validate()
        .map_err(|e| CliError::InvalidTriple(format!("ball failed validation: {e}")))?;
    match cfg.format {
        Format::Csv => {
            let mut s = String::from("x,y\n");
            for v in &ball.vertices {
                writeln!(s, "{},{}", fmt_sig(v[0]), fmt_sig(v[1])).unwrap();
            }
            Ok(s)
        }
        Format::Json => {
            let doc = json!({
                "depth": ball.depth,
                "area": ball.area,
                "c_unoriented": norm::predict_c(&ball, Convention::Unoriented),
                "c_oriented": norm::predict_c(&ball, Convention::Oriented),
            });
            Ok(format!("{doc}\n"))
        }
    }
}

pub fn run_cusp(cfg: &RunConfig) -> Result<String, CliError> {
    let triple = cfg.triple.triple()?;
    let rep = build_representation(triple).map_err(|e| CliError::InvalidTriple(e.to_string()))?;
    let normalized =
        cusp::normalize_cusp(&rep).map_err(|e| CliError::InvalidTriple(e.to_string()))?;
    let reports = cusp::verify_cusp_avoidance(&normalized, cfg.word_bound, cfg.conj_depth)
        .map_err(|e| CliError::InvalidTriple(e.to_string()))?;
    match cfg.format {
        Format::Csv => {
            let mut s = String::from("slope_m,slope_n,max_height,conj_depth\n");
            for r in &reports {
                writeln!(
                    s,
                    "{},{},{},{}",
                    r.slope.m(),
                    r.slope.n(),
                    fmt_sig(r.max_height),
                    cfg.conj_depth
                )
                .unwrap();
            }
            Ok(s)
        }
        Format::Json => {
            let arr: Vec<_> = reports
                .iter()
                .map(|r| {
                    json!({
                        "slope_m": r.slope.m(),
                        "slope_n": r.slope.n(),
                        "max_height": r.max_height,
                        "conj_depth": cfg.conj_depth,
                    })
                })
                .collect();
            Ok(format!("{}\n", json!(arr)))
        }
    }
}

// ---- verification suites -------------------------------------------------

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Tree-vs-word oracle equivalence with a pluggable trace recursion, so
/// the test harness can inject a tampered child map and watch the suite
/// fail. The production path passes the true Vieta map a*b - opp.
pub fn oracle_check_with<F>(triple: FrickeTriple, bound: u64, child: F) -> Result<usize, String>
where
    F: Fn(f64, f64, f64) -> f64,
{
    let rep =
        build_representation(triple).map_err(|e| format!("representation failed: {e}"))?;
    let word_trace = |m: i64, n: i64| evaluate(&rep, &oz_word(m, n).unwrap()).trace().abs();
    let mut checked = 0usize;
    let mut compare = |m: i64, n: i64, tree: f64| -> Result<(), String> {
        let w = word_trace(m, n);
        if (tree.abs() - w).abs() > ALG_TOL * w.max(1.0) {
            return Err(format!("slope ({m}, {n}): tree {tree} vs word {w}"));
        }
        checked += 1;
        Ok(())
    };
    compare(1, 0, triple.x)?;
    compare(0, 1, triple.y)?;
    // re-derive both quadrant trees through the supplied recursion
    let seeds = [
        ((1i64, 0i64), (0i64, 1i64), triple.x, triple.y, triple.z),
        (
            (1, 0),
            (0, -1),
            triple.x,
            triple.y,
            child(triple.x, triple.y, triple.z),
        ),
    ];
    for (left, right, tl, tr, tm) in seeds {
        let mut stack = vec![(left, right, tl, tr, tm)];
        while let Some((l, r, tl, tr, tm)) = stack.pop() {
            let med = (l.0 + r.0, l.1 + r.1);
            if med.0.abs() + med.1.abs() > bound as i64 {
                continue;
            }
            let sl = Slope::new(med.0, med.1).unwrap();
            compare(sl.m(), sl.n(), tm)?;
            stack.push((l, med, tl, tm, child(tl, tm, tr)));
            stack.push((med, r, tm, tr, child(tm, tr, tl)));
        }
    }
    Ok(checked)
}

fn suite_oracle(triple: FrickeTriple) -> SuiteResult {
    match oracle_check_with(triple, 12, |a, b, opp| a * b - opp) {
        Ok(n) => SuiteResult {
            name: "oracle-equivalence",
            passed: true,
            detail: format!("{n} slopes matched to 1e-9"),
        },
        Err(e) => SuiteResult {
            name: "oracle-equivalence",
            passed: false,
            detail: e,
        },
    }
}

fn suite_counting() -> SuiteResult {
    for l in 1..=500 {
        let direct = counting::primitive_pairs_count(l);
        let totient = counting::primitive_pairs_count_totient(l);
        if direct != totient {
            return SuiteResult {
                name: "counting-identity",
                passed: false,
                detail: format!("f({l}) = {direct} but totient sum = {totient}"),
            };
        }
    }
    let f = counting::primitive_pairs_count_totient(10_000) as f64;
    let rel = (f / counting::asymptotic_prediction(10_000.0) - 1.0).abs();
    SuiteResult {
        name: "counting-identity",
        passed: rel <= 0.01,
        detail: format!("identity to L=500; |f(1e4)/pred - 1| = {rel:.2e}"),
    }
}

fn suite_triangle(spec: &TripleSpec, triple: FrickeTriple) -> SuiteResult {
    use rand::{Rng, SeedableRng};
    let name = "triangle-inequality";
    let exact = spec.integer().ok();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let mut min_margin = f64::INFINITY;
    for _ in 0..1000 {
        let h = HomologyClass::new(rng.gen_range(-20i64..=20), rng.gen_range(-20i64..=20));
        let g = HomologyClass::new(rng.gen_range(-20i64..=20), rng.gen_range(-20i64..=20));
        let lhs = norm::valuation(triple, h.add(&g));
        let rhs = norm::valuation(triple, h) + norm::valuation(triple, g);
        if lhs > rhs + 1e-9 {
            return SuiteResult {
                name,
                passed: false,
                detail: format!("violated at {h:?} + {g:?}: {lhs} > {rhs}"),
            };
        }
        if h.m * g.n - h.n * g.m != 0 {
            if let Some((x, y, z)) = exact {
                match norm::triangle_margin_exact(x, y, z, h, g) {
                    Ok(m) if m > 0.0 => min_margin = min_margin.min(m),
                    Ok(m) => {
                        return SuiteResult {
                            name,
                            passed: false,
                            detail: format!("non-strict margin {m} at {h:?} + {g:?}"),
                        }
                    }
                    Err(e) => {
                        return SuiteResult {
                            name,
                            passed: false,
                            detail: format!("exact margin failed: {e}"),
                        }
                    }
                }
            }
        }
    }
    let detail = match exact {
        Some(_) => format!("1000 pairs; min strict margin {min_margin:.3e}"),
        None => "1000 pairs to 1e-9 (strictness certified on integer triples only)".into(),
    };
    SuiteResult {
        name,
        passed: true,
        detail,
    }
}

fn suite_convexity(triple: FrickeTriple) -> SuiteResult {
    let name = "strict-convexity";
    let mut pts = norm::ball_boundary_points(triple, 10);
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    let ball = match norm::hull_area(&pts) {
        Ok(b) => b,
        Err(e) => {
            return SuiteResult {
                name,
                passed: false,
                detail: format!("hull failed: {e}"),
            }
        }
    };
    if ball.vertices.len() != pts.len() {
        return SuiteResult {
            name,
            passed: false,
            detail: format!(
                "{} of {} samples fell strictly inside the hull",
                pts.len() - ball.vertices.len(),
                pts.len()
            ),
        };
    }
    match ball.validate() {
        Ok(sym) => SuiteResult {
            name,
            passed: true,
            detail: format!(
                "{} samples all on the hull at depth 10; symmetry gap {sym:.1e}",
                pts.len()
            ),
        },
        Err(e) => SuiteResult {
            name,
            passed: false,
            detail: format!("ball validation failed: {e}"),
        },
    }
}

fn suite_cusp(triple: FrickeTriple, word_bound: u64, conj_depth: u32) -> SuiteResult {
    let name = "cusp-avoidance";
    let run = || -> Result<(f64, usize), String> {
        let rep = build_representation(triple).map_err(|e| e.to_string())?;
        let normalized = cusp::normalize_cusp(&rep).map_err(|e| e.to_string())?;
        let reports = cusp::verify_cusp_avoidance(&normalized, word_bound, conj_depth)
            .map_err(|e| e.to_string())?;
        let worst = reports
            .iter()
            .map(|r| r.max_height)
            .fold(0.0f64, f64::max);
        Ok((worst, reports.len()))
    };
    match run() {
        Ok((worst, slopes)) if worst < 0.5 => SuiteResult {
            name,
            passed: true,
            detail: format!("{slopes} slopes, worst lift height {worst:.6} < 0.5"),
        },
        Ok((worst, _)) => SuiteResult {
            name,
            passed: false,
            detail: format!("lift reached height {worst} >= 0.5"),
        },
        Err(e) => SuiteResult {
            name,
            passed: false,
            detail: e,
        },
    }
}

/// Run the selected suites; the JSON verdict is emitted whether or not
/// everything passed, and the first failing suite is reported.
pub fn run_verify(cfg: &RunConfig) -> Result<(String, Option<String>), CliError> {
    let triple = cfg.triple.triple()?;
    let all = cfg.suite == "all";
    let mut results: Vec<SuiteResult> = Vec::new();
    if all || cfg.suite == "oracle" {
        results.push(suite_oracle(triple));
    }
    if all || cfg.suite == "counting" {
        results.push(suite_counting());
    }
    if all || cfg.suite == "triangle" {
        results.push(suite_triangle(&cfg.triple, triple));
    }
    if all || cfg.suite == "convexity" {
        results.push(suite_convexity(triple));
    }
    if all || cfg.suite == "cusp" {
        results.push(suite_cusp(triple, cfg.word_bound, cfg.conj_depth));
    }
    if results.is_empty() {
        return Err(CliError::Config(format!(
            "unknown suite {:?}; expected all|oracle|counting|triangle|convexity|cusp",
            cfg.suite
        )));
    }
    let failed = results.iter().find(|r| !r.passed).map(|r| r.name.to_string());
    let doc = json!({
        "passed": failed.is_none(),
        "suites": results
            .iter()
            .map(|r| json!({"name": r.name, "passed": r.passed, "detail": r.detail}))
            .collect::<Vec<_>>(),
    });
    Ok((format!("{doc}\n"), failed))
}

/// Execute one resolved command and emit its output; returns the process
/// exit code.
pub fn dispatch(command: &str, cfg: &RunConfig) -> i32 {
    let outcome: Result<String, CliError> = match command {
        "count" => run_count(cfg),
        "spectrum" => run_spectrum(cfg),
        "ball" => run_ball(cfg),
        "cusp" => run_cusp(cfg),
        "verify" => match run_verify(cfg) {
            Ok((text, None)) => Ok(text),
            Ok((text, Some(suite))) => {
                if emit(&cfg.out, &text).is_err() {
                    return 1;
                }
                eprintln!("verification failed in suite {suite}");
                return 1;
            }
            Err(e) => Err(e),
        },
        other => Err(CliError::Config(format!("unknown command {other:?}"))),
    };
    match outcome {
        Ok(text) => match emit(&cfg.out, &text) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("{e}");
                e.exit_code()
            }
        },
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
