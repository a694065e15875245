//! One function per subcommand; each fills a report and a few summary lines.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use num_rational::BigRational;
use serde_json::{json, Value};
use siegel_core::arith::{
    jacobi_decompose, minkowski_min, reduce_gl2, siegel_domain_contains, ExponentMatrix, PointInHn,
    RationalSymmetricMatrix,
};
use siegel_core::chartheta::{
    characteristic_counts, explore_set_orbit, orbits, theta_qexp, theta_values, CharacteristicSet,
    OrbitSearch, ThetaCharacteristic,
};
use siegel_core::coeff::parse_rational_strict;
use siegel_core::constructions::{
    acn3_scan, acn4_scan, construct_named, delta_compare, verify_f12_restriction, FamilyScanReport,
    NamedForm, SampleBox,
};
use siegel_core::formal_fj::{
    assemble_formal_fourier, check_symmetric, fj_decompose, validate_jacobi, FormalFJSeries,
    FourierTable,
};
use siegel_core::paramodular::{
    check_involution, check_strong_symmetry, default_strong_elements,
    generating_elements_small_level, is_paramodular, make_atkin_lehner, mu, Rational4,
    SignCharacter,
};
use siegel_core::qseries::{
    check_gl_symmetry, cuspidality_combinatorial, default_gl_generators, is_cusp_qexp, CuspVerdict,
    SiegelFourierSeries,
};
use thiserror::Error;

use crate::args::*;
use crate::files::{load_json, save_json, CoefficientFile, FileError, FjFile};
use crate::report::{InputRecord, ReportFile, Status, EXIT_INCONCLUSIVE, EXIT_USAGE};

pub const DEFAULT_TRUNC: u64 = 16;
pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_SEED: u64 = 2024;
pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    File(#[from] FileError),
    #[error(transparent)]
    Core(#[from] siegel_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(siegel_core::Error::BudgetExhausted { .. }) => EXIT_INCONCLUSIVE,
            _ => EXIT_USAGE,
        }
    }
}

type CmdResult = Result<Outcome, CliError>;

pub struct Outcome {
    pub report: ReportFile,
    pub text: Vec<String>,
}

struct Ctx<'a> {
    g: &'a GlobalArgs,
    report: ReportFile,
    text: Vec<String>,
    started: Instant,
}

impl<'a> Ctx<'a> {
    fn new(g: &'a GlobalArgs, command: &str) -> Self {
        Ctx {
            g,
            report: ReportFile::new(command),
            text: Vec::new(),
            started: Instant::now(),
        }
    }

    fn trunc(&mut self, default: u64) -> u64 {
        let t = self.g.trunc.unwrap_or(default);
        self.report.param("trunc", t);
        t
    }

    fn tol(&mut self) -> f64 {
        let t = self.g.tol.unwrap_or(DEFAULT_TOL);
        self.report.param("tol", t);
        t
    }

    fn budget(&mut self) -> usize {
        let b = self.g.budget.unwrap_or(DEFAULT_BUDGET);
        self.report.param("budget", b);
        b
    }

    fn seed(&mut self) -> u64 {
        let s = self.g.seed.unwrap_or(DEFAULT_SEED);
        self.report.seed = Some(s);
        s
    }

    fn input(&mut self, path: &Path) -> Result<(), CliError> {
        self.report.inputs.push(InputRecord::hash(path)?);
        Ok(())
    }

    fn load_table(&mut self, path: &Path) -> Result<CoefficientFile, CliError> {
        self.input(path)?;
        Ok(CoefficientFile::load(path)?)
    }

    fn load_series(&mut self, path: &Path) -> Result<SiegelFourierSeries, CliError> {
        Ok(self.load_table(path)?.to_series()?)
    }

    fn check(&mut self, name: &str, status: Status, detail: impl serde::Serialize) {
        self.text.push(format!("{name}: {}", status_word(status)));
        self.report.check(name, status, detail);
    }

    fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    /// Writes the table when a path is given, otherwise embeds it in the
    /// report.
    fn emit_series(&mut self, f: &SiegelFourierSeries, out: Option<&Path>) -> Result<(), CliError> {
        let file = CoefficientFile::from_series(f, None);
        self.line(format!(
            "{} nonzero coefficients through trace {}",
            f.len(),
            f.trunc()
        ));
        match out {
            Some(p) => {
                file.save(p)?;
                self.report.result = json!({ "keys": f.len(), "table": p.display().to_string() });
            }
            None => self.report.result = json!({ "keys": f.len(), "table": file }),
        }
        Ok(())
    }

    fn done(mut self) -> Outcome {
        if self.g.timings {
            let mut t = BTreeMap::new();
            t.insert(
                "total".to_string(),
                self.started.elapsed().as_secs_f64() * 1e3,
            );
            self.report.timings_ms = Some(t);
        }
        self.report.finish();
        Outcome {
            report: self.report,
            text: self.text,
        }
    }
}

pub fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "FAIL",
        Status::Inconclusive => "inconclusive",
    }
}

pub fn dispatch(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Theta(c) => theta(&cli.global, c),
        Command::Series(c) => series(&cli.global, c),
        Command::Construct(a) => construct(&cli.global, a),
        Command::Verify(c) => verify(&cli.global, c),
        Command::Fj(c) => fj(&cli.global, c),
        Command::Para(c) => para(&cli.global, c),
        Command::Reduce(c) => reduce(&cli.global, c),
    }
}

// ---------- parsing helpers ----------

fn parse_json_matrix(s: &str) -> Result<Vec<Vec<Value>>, CliError> {
    let v: Vec<Vec<Value>> = serde_json::from_str(s)
        .map_err(|e| CliError::Usage(format!("expected a JSON matrix: {e}")))?;
    let n = v.len();
    if n == 0 || v.iter().any(|r| r.len() != n) {
        return Err(CliError::Usage("matrix must be square and nonempty".into()));
    }
    Ok(v)
}

fn rational_entry(v: &Value) -> Result<BigRational, CliError> {
    match v {
        Value::Number(n) if n.is_i64() => Ok(BigRational::from_integer(
            n.as_i64().expect("checked").into(),
        )),
        Value::String(s) => Ok(parse_rational_strict(s)?),
        _ => Err(CliError::Usage(format!(
            "entry {v} must be an integer or a \"p/q\" string"
        ))),
    }
}

fn rational_matrix(s: &str) -> Result<Vec<Vec<BigRational>>, CliError> {
    parse_json_matrix(s)?
        .iter()
        .map(|r| r.iter().map(rational_entry).collect())
        .collect()
}

fn float_matrix(s: &str) -> Result<Vec<Vec<f64>>, CliError> {
    parse_json_matrix(s)?
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    x.as_f64()
                        .ok_or_else(|| CliError::Usage(format!("entry {x} is not a number")))
                })
                .collect()
        })
        .collect()
}

fn integer_matrix(s: &str) -> Result<Vec<Vec<i64>>, CliError> {
    parse_json_matrix(s)?
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    x.as_i64()
                        .ok_or_else(|| CliError::Usage(format!("entry {x} is not an integer")))
                })
                .collect()
        })
        .collect()
}

fn parse_point(p: &PointArgs) -> Result<PointInHn, CliError> {
    Ok(PointInHn::from_rows(
        &float_matrix(&p.re)?,
        &float_matrix(&p.im)?,
    )?)
}

fn parse_char(s: &str) -> Result<ThetaCharacteristic, CliError> {
    Ok(s.parse()?)
}

/// `E3`, `E1xE2`, `E1xE3*` (`E*` drops the zero characteristic) or a comma
/// list of characteristics.
pub fn parse_set(s: &str, genus: usize) -> Result<CharacteristicSet, CliError> {
    let s = s.trim();
    let set = if s.contains(';') {
        let members: Vec<ThetaCharacteristic> =
            s.split(',').map(parse_char).collect::<Result<_, _>>()?;
        CharacteristicSet::from_members(genus, members)?
    } else {
        let parts: Vec<CharacteristicSet> = s
            .split(['x', 'X'])
            .map(|b| {
                let b = b.trim();
                let (body, star) = match b.strip_suffix('*') {
                    Some(x) => (x, true),
                    None => (b, false),
                };
                let n: usize = body
                    .strip_prefix(['E', 'e'])
                    .and_then(|d| d.parse().ok())
                    .filter(|&n| (1..=siegel_core::chartheta::MAX_GENUS).contains(&n))
                    .ok_or_else(|| CliError::Usage(format!("bad set block {b:?}")))?;
                Ok(if star {
                    CharacteristicSet::even_nonzero(n)
                } else {
                    CharacteristicSet::even(n)
                })
            })
            .collect::<Result<_, CliError>>()?;
        CharacteristicSet::product(&parts)
    };
    if set.genus() != genus {
        return Err(CliError::Usage(format!(
            "set {s} has genus {}, not {genus}",
            set.genus()
        )));
    }
    Ok(set)
}

fn check_genus(n: usize) -> Result<(), CliError> {
    if !(1..=siegel_core::chartheta::MAX_GENUS).contains(&n) {
        return Err(CliError::Usage(format!(
            "genus must be in 1..={}",
            siegel_core::chartheta::MAX_GENUS
        )));
    }
    Ok(())
}

fn integral_weight(w: &BigRational) -> Result<i64, CliError> {
    if !w.is_integer() {
        return Err(CliError::Usage(format!("weight {w} is not integral")));
    }
    i64::try_from(w.to_integer()).map_err(|_| CliError::Usage(format!("weight {w} out of range")))
}

// ---------- theta ----------

fn theta(g: &GlobalArgs, c: &ThetaCmd) -> CmdResult {
    match c {
        ThetaCmd::Count { genus } => {
            check_genus(*genus)?;
            let mut ctx = Ctx::new(g, "theta count");
            ctx.report.param("genus", genus);
            let (even, odd) = characteristic_counts(*genus);
            let n = *genus as u32;
            let expected = (
                2u64.pow(n - 1) * (2u64.pow(n) + 1),
                2u64.pow(n - 1) * (2u64.pow(n) - 1),
            );
            ctx.line(format!("({even}, {odd})"));
            ctx.report.result = json!({ "even": even, "odd": odd });
            ctx.check(
                "counts match 2^(n-1)(2^n ± 1)",
                Status::from_bool((even, odd) == expected),
                json!(expected),
            );
            Ok(ctx.done())
        }
        ThetaCmd::Orbits { genus, set } => {
            check_genus(*genus)?;
            let mut ctx = Ctx::new(g, "theta orbits");
            ctx.report.param("genus", genus);
            match set {
                None => {
                    let blocks = orbits(*genus)?;
                    let sizes: Vec<usize> = blocks.iter().map(|b| b.len()).collect();
                    let (even, odd) = characteristic_counts(*genus);
                    ctx.line(format!("orbit sizes {sizes:?}"));
                    let expected = if *genus == 1 || odd > 0 {
                        vec![even as usize, odd as usize]
                    } else {
                        vec![]
                    };
                    let mut sorted = sizes.clone();
                    sorted.sort_unstable_by(|a, b| b.cmp(a));
                    ctx.report.result = json!({ "sizes": sizes });
                    ctx.check(
                        "two orbits, even and odd",
                        Status::from_bool(sorted == expected),
                        json!(expected),
                    );
                }
                Some(s) => {
                    let budget = ctx.budget();
                    let cs = parse_set(s, *genus)?;
                    ctx.report.param("set", s);
                    if !cs.all_even() {
                        return Err(siegel_core::Error::OddCharacteristic.into());
                    }
                    match explore_set_orbit::<()>(&cs, budget, |_| None) {
                        OrbitSearch::Exhausted(o) => {
                            ctx.line(format!(
                                "orbit size {}, stabilizer order {}",
                                o.members.len(),
                                o.stabilizer_order
                            ));
                            ctx.report.result = json!({
                                "orbit_size": o.members.len(),
                                "stabilizer_order": o.stabilizer_order.to_string(),
                            });
                            ctx.check("orbit exhausted", Status::Pass, Value::Null);
                        }
                        OrbitSearch::Found(()) => unreachable!("predicate never fires"),
                        OrbitSearch::Inconclusive { explored } => {
                            ctx.report.result = json!({ "explored": explored });
                            ctx.check(
                                "orbit exhausted",
                                Status::Inconclusive,
                                json!({ "explored": explored }),
                            );
                        }
                    }
                }
            }
            Ok(ctx.done())
        }
        ThetaCmd::Qexp {
            characteristic,
            power,
            table_out,
        } => {
            let mut ctx = Ctx::new(g, "theta qexp");
            let trunc = ctx.trunc(DEFAULT_TRUNC);
            let m = parse_char(characteristic)?;
            ctx.report.param("char", m.to_string());
            ctx.report.param("power", power);
            let f = theta_qexp(&m, trunc).pow(*power);
            ctx.emit_series(&f, table_out.as_deref())?;
            ctx.check(
                "odd characteristics vanish identically",
                Status::from_bool(m.is_even() || f.is_zero()),
                Value::Null,
            );
            Ok(ctx.done())
        }
        ThetaCmd::Eval {
            characteristic,
            point,
        } => {
            let mut ctx = Ctx::new(g, "theta eval");
            let tol = ctx.tol();
            let m = parse_char(characteristic)?;
            let tau = parse_point(point)?;
            if tau.genus() != m.genus() {
                return Err(CliError::Usage(format!(
                    "τ has genus {}, characteristic {}",
                    tau.genus(),
                    m.genus()
                )));
            }
            let vals = theta_values(&tau, tol)?;
            let z = vals.value(&m);
            ctx.line(format!(
                "θ{m}(τ) = {:.15e} + {:.15e}i  (error ≤ {tol:.1e})",
                z.re, z.im
            ));
            ctx.report.param("char", m.to_string());
            ctx.report.result = json!({
                "re": z.re,
                "im": z.im,
                "error_bound": tol,
                "majorant": vals.majorant(&m),
                "terms_evaluated": vals.terms_evaluated(),
            });
            Ok(ctx.done())
        }
    }
}

// ---------- series ----------

fn series(g: &GlobalArgs, c: &SeriesCmd) -> CmdResult {
    match c {
        SeriesCmd::Mul {
            a,
            b,
            graded,
            table_out,
        } => {
            let mut ctx = Ctx::new(g, "series mul");
            let (f, h) = (ctx.load_series(a)?, ctx.load_series(b)?);
            ctx.report.param("graded", graded);
            let p = if *graded {
                f.mul_graded(&h)?
            } else {
                f.mul(&h)?
            };
            ctx.emit_series(&p, table_out.as_deref())?;
            Ok(ctx.done())
        }
        SeriesCmd::Phi { table, table_out } => {
            let mut ctx = Ctx::new(g, "series phi");
            let f = ctx.load_series(table)?;
            let p = f.phi()?;
            ctx.emit_series(&p, table_out.as_deref())?;
            Ok(ctx.done())
        }
        SeriesCmd::Restrict {
            table,
            split,
            table_out,
        } => {
            let mut ctx = Ctx::new(g, "series restrict");
            let f = ctx.load_series(table)?;
            ctx.report.param("split", split);
            let r = f.restrict_block(*split)?;
            ctx.emit_series(r.series(), table_out.as_deref())?;
            Ok(ctx.done())
        }
        SeriesCmd::Symmetry { table, weight } => {
            let mut ctx = Ctx::new(g, "series symmetry");
            let f = ctx.load_series(table)?;
            let k = match weight {
                Some(k) => *k,
                None => integral_weight(f.weight())?,
            };
            ctx.report.param("weight", k);
            let r = check_gl_symmetry(&f, k, &default_gl_generators(f.genus()))?;
            for v in r.violations.iter().take(20) {
                ctx.report.witness(v);
            }
            ctx.check(
                "GL_n(Z) symmetry",
                Status::from_bool(r.passed()),
                json!({ "pairs_checked": r.pairs_checked, "violations": r.violations.len() }),
            );
            Ok(ctx.done())
        }
        SeriesCmd::Cusp { table, set, genus } => {
            let mut ctx = Ctx::new(g, "series cusp");
            match (table, set, genus) {
                (Some(t), None, _) => {
                    let f = ctx.load_series(t)?;
                    let cusp = is_cusp_qexp(&f)?;
                    if !cusp {
                        let phi = f.phi()?;
                        if let Some((e, c)) = phi.iter().next() {
                            ctx.report
                                .witness(json!({ "key": e, "coefficient": c.to_string() }));
                        };
                    }
                    ctx.check(
                        "Φf = 0 through the truncation",
                        Status::from_bool(cusp),
                        Value::Null,
                    );
                }
                (None, Some(s), Some(n)) => {
                    check_genus(*n)?;
                    let budget = ctx.budget();
                    let cs = parse_set(s, *n)?;
                    ctx.report.param("set", s);
                    let v = cuspidality_combinatorial(&cs, budget)?;
                    if let CuspVerdict::NotCusp { witness } = &v {
                        ctx.report.witness(witness);
                    }
                    ctx.report.result = serde_json::to_value(&v).expect("serializable");
                    ctx.check(
                        "θ[S]^8 is a cusp form",
                        Status::from_option(v.is_cusp()),
                        &v,
                    );
                }
                _ => {
                    return Err(CliError::Usage(
                        "give --table, or --set with --genus".into(),
                    ))
                }
            }
            Ok(ctx.done())
        }
    }
}

// ---------- construct ----------

fn construct(g: &GlobalArgs, a: &ConstructArgs) -> CmdResult {
    check_genus(a.genus)?;
    let mut ctx = Ctx::new(g, "construct");
    let trunc = ctx.trunc(DEFAULT_TRUNC);
    let form = NamedForm::parse(&a.name, a.genus)?;
    ctx.report.param("name", &form.label);
    ctx.report.param("genus", a.genus);
    let f = construct_named(&form, trunc)?;
    ctx.line(format!("{form}"));
    ctx.emit_series(&f, a.table_out.as_deref())?;
    if let Value::Object(m) = &mut ctx.report.result {
        m.insert("weight".into(), json!(form.weight.to_string()));
    }
    let cusp = is_cusp_qexp(&f)?;
    ctx.line(format!("Φ vanishes through the truncation: {cusp}"));
    ctx.report.param("phi_vanishes", cusp);
    Ok(ctx.done())
}

// ---------- verify ----------

fn scan_outcome(ctx: &mut Ctx<'_>, r: &FamilyScanReport) {
    let worst: Vec<f64> = (0..r.forms.len())
        .map(|i| {
            r.points
                .iter()
                .map(|p| p.log10_relative[i])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let best: Vec<f64> = (0..r.forms.len())
        .map(|i| {
            r.points
                .iter()
                .map(|p| p.log10_relative[i])
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    ctx.line(format!(
        "{} points, {} flagged",
        r.points.len(),
        r.flagged.len()
    ));
    for (i, name) in r.forms.iter().enumerate() {
        ctx.line(format!(
            "  {name}: log10 |F|/scale in [{:.2}, {:.2}]",
            best[i], worst[i]
        ));
    }
    for p in r
        .points
        .iter()
        .filter(|p| p.flagged || !p.vanishing_ok || !p.nonvanishing_ok)
        .take(20)
    {
        ctx.report.witness(p);
    }
    ctx.report.result = json!({
        "forms": r.forms,
        "orbit_sizes": r.orbit_sizes,
        "stabilizer_orders": r.stabilizer_orders,
        "sample_box": r.sample_box,
        "points": r.points,
        "flagged": r.flagged,
    });
    ctx.check(
        "no common zeros flagged",
        Status::from_bool(r.flagged.is_empty()),
        json!(r.flagged),
    );
    // a point that is neither flagged nor clearly nonzero is undecided, not a
    // counterexample
    let ambiguous: Vec<usize> = r
        .points
        .iter()
        .filter(|p| p.vanishing_ok && !p.nonvanishing_ok && !p.flagged)
        .map(|p| p.index)
        .collect();
    let status = if r.passed {
        Status::Pass
    } else if r.points.iter().all(|p| p.vanishing_ok && !p.flagged) {
        Status::Inconclusive
    } else {
        Status::Fail
    };
    ctx.line(format!(
        "{} points below the nonvanishing threshold",
        ambiguous.len()
    ));
    ctx.check(
        "thresholds at every point",
        status,
        json!({ "vanish_tol": r.vanish_tol, "nonvanish_tol": r.nonvanish_tol, "ambiguous": ambiguous }),
    );
}

fn verify(g: &GlobalArgs, c: &VerifyCmd) -> CmdResult {
    match c {
        VerifyCmd::F12 { window } => {
            let mut ctx = Ctx::new(g, "verify f12");
            let trunc = ctx.trunc(DEFAULT_TRUNC);
            ctx.report.param("window", window);
            let r = verify_f12_restriction(trunc, *window)?;
            ctx.check(
                "literal identity through trunc",
                Status::from_bool(r.literal_equal),
                json!({ "nonzero_keys": r.literal_nonzero_keys, "valuation": r.valuation }),
            );
            ctx.check(
                "window identity θ[E1]^80 ⊗ θ[E2]^24",
                Status::from_bool(r.window_equal),
                json!({ "nonzero_keys": r.window_nonzero_keys }),
            );
            ctx.check(
                "single constant against Δ^10 ⊗ χ10^12",
                Status::from_bool(r.product_constant_consistent),
                json!({ "constant": r.product_constant }),
            );
            ctx.check(
                "odd first component restricts to zero",
                Status::from_bool(r.odd_first_nonvanishing.is_empty()),
                json!(r.odd_first_nonvanishing),
            );
            ctx.line(format!(
                "valuation {}, Δ constant {:?}, χ10 constant {:?}",
                r.valuation, r.delta_constant, r.chi10_constant
            ));
            ctx.report.result = serde_json::to_value(&r).expect("serializable");
            Ok(ctx.done())
        }
        VerifyCmd::Delta => {
            let mut ctx = Ctx::new(g, "verify delta");
            let trunc = ctx.trunc(64);
            let r = delta_compare(trunc)?;
            for e in r.mismatches.iter().take(20) {
                ctx.report.witness(e);
            }
            ctx.line(format!(
                "F_null^8 = {} · Δ",
                r.constant.as_deref().unwrap_or("?")
            ));
            ctx.check(
                "F_null^8 proportional to Δ",
                Status::from_bool(r.passed),
                json!({ "constant": r.constant }),
            );
            ctx.report.result = serde_json::to_value(&r).expect("serializable");
            Ok(ctx.done())
        }
        VerifyCmd::Acn3Scan(s) => {
            let mut ctx = Ctx::new(g, "verify acn3-scan");
            let (seed, budget) = (ctx.seed(), ctx.budget());
            ctx.report.param("count", s.count);
            let r = acn3_scan(s.count, seed, budget, SampleBox::default())?;
            scan_outcome(&mut ctx, &r);
            Ok(ctx.done())
        }
        VerifyCmd::Acn4Scan(s) => {
            let mut ctx = Ctx::new(g, "verify acn4-scan");
            let (seed, budget) = (ctx.seed(), ctx.budget());
            ctx.report.param("count", s.count);
            let r = acn4_scan(s.count, seed, budget, SampleBox::default())?;
            scan_outcome(&mut ctx, &r);
            Ok(ctx.done())
        }
    }
}

// ---------- fj ----------

fn load_fj_or_table(
    ctx: &mut Ctx<'_>,
    fj: &Option<std::path::PathBuf>,
    table: &Option<std::path::PathBuf>,
) -> Result<FormalFJSeries, CliError> {
    match (fj, table) {
        (Some(p), None) => {
            ctx.input(p)?;
            let file: FjFile = load_json(p)?;
            Ok(file.to_series()?)
        }
        (None, Some(p)) => {
            let f = ctx.load_series(p)?;
            Ok(fj_decompose(&f)?)
        }
        _ => Err(CliError::Usage(
            "give exactly one of --fj and --table".into(),
        )),
    }
}

fn fj(g: &GlobalArgs, c: &FjCmd) -> CmdResult {
    match c {
        FjCmd::Decompose { table, fj_out } => {
            let mut ctx = Ctx::new(g, "fj decompose");
            let f = ctx.load_series(table)?;
            let s = fj_decompose(&f)?;
            let file = FjFile::from_series(&s);
            let sizes: Vec<usize> = s.tables().iter().map(|t| t.len()).collect();
            ctx.line(format!(
                "denominator {}, {} indices, keys per index {sizes:?}",
                s.denominator(),
                sizes.len()
            ));
            let back = assemble_formal_fourier(&s)?.to_series()?;
            ctx.check(
                "assemble inverts decompose",
                Status::from_bool(back == f),
                Value::Null,
            );
            match fj_out {
                Some(p) => {
                    save_json(p, &file)?;
                    ctx.report.result =
                        json!({ "keys_per_index": sizes, "fj": p.display().to_string() });
                }
                None => ctx.report.result = json!({ "keys_per_index": sizes, "fj": file }),
            }
            Ok(ctx.done())
        }
        FjCmd::Assemble { fj, table_out } => {
            let mut ctx = Ctx::new(g, "fj assemble");
            ctx.input(fj)?;
            let file: FjFile = load_json(fj)?;
            let s = file.to_series()?;
            let t = assemble_formal_fourier(&s)?;
            let f = t.to_series()?;
            ctx.emit_series(&f, table_out.as_deref())?;
            Ok(ctx.done())
        }
        FjCmd::Validate {
            fj,
            table,
            index,
            step,
        } => {
            let mut ctx = Ctx::new(g, "fj validate");
            let s = load_fj_or_table(&mut ctx, fj, table)?;
            ctx.report.param("step", step);
            let mut results = Vec::new();
            for t in s
                .tables()
                .iter()
                .filter(|t| index.is_none_or(|i| t.index() == i))
            {
                let r = validate_jacobi(t, *step)?;
                for v in r.elliptic_violations.iter().take(5) {
                    ctx.report
                        .witness(json!({ "index": t.index(), "violation": v }));
                }
                for k in r.psd_violations.iter().take(5) {
                    ctx.report
                        .witness(json!({ "index": t.index(), "non_psd_key": k }));
                }
                ctx.check(
                    &format!("index {} Jacobi table", t.index()),
                    Status::from_bool(r.passed),
                    json!({ "pairs_checked": r.pairs_checked, "violations": r.elliptic_violations.len() + r.psd_violations.len() }),
                );
                results.push(r.passed);
            }
            if results.is_empty() {
                return Err(CliError::Usage("no table with the requested index".into()));
            }
            Ok(ctx.done())
        }
        FjCmd::Symmetry { fj, table, weight } => {
            let mut ctx = Ctx::new(g, "fj symmetry");
            let s = load_fj_or_table(&mut ctx, fj, table)?;
            let t: FourierTable = assemble_formal_fourier(&s)?;
            let k = weight.unwrap_or(s.weight());
            ctx.report.param("weight", k);
            let r = check_symmetric(&t, k, &siegel_core::qseries::default_gl2_generators())?;
            for v in r.violations.iter().take(20) {
                ctx.report.witness(v);
            }
            ctx.check(
                "a(ᵗuTu) = det(u)^k a(T)",
                Status::from_bool(r.passed()),
                json!({ "pairs_checked": r.pairs_checked, "violations": r.violations.len() }),
            );
            Ok(ctx.done())
        }
    }
}

// ---------- para ----------

fn parse_character(level: u64, s: &str) -> Result<SignCharacter, CliError> {
    let primes: Vec<u64> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse()
                .map_err(|_| CliError::Usage(format!("bad prime {p:?}")))
        })
        .collect::<Result<_, _>>()?;
    Ok(SignCharacter::from_prime_signs(level, &primes)?)
}

fn rows_to_strings(m: &Rational4) -> Vec<Vec<String>> {
    m.0.iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect())
        .collect()
}

fn para(g: &GlobalArgs, c: &ParaCmd) -> CmdResult {
    match c {
        ParaCmd::Member { matrix, level } => {
            let mut ctx = Ctx::new(g, "para member");
            let rows = rational_matrix(matrix)?;
            if rows.len() != 4 {
                return Err(CliError::Usage("matrix must be 4×4".into()));
            }
            let m = Rational4::from_fn(|i, j| rows[i][j].clone());
            let symplectic = m.is_symplectic();
            let member = is_paramodular(&m, *level);
            ctx.report.param("level", level);
            ctx.line(format!("in K({level}): {member}"));
            ctx.report.result = json!({ "symplectic": symplectic, "member": member });
            ctx.check("member of K(N)", Status::from_bool(member), Value::Null);
            Ok(ctx.done())
        }
        ParaCmd::AtkinLehner { level, divisor } => {
            let mut ctx = Ctx::new(g, "para atkin-lehner");
            ctx.report.param("level", level);
            ctx.report.param("divisor", divisor);
            let v = make_atkin_lehner(*level, *divisor)?;
            let factor = v.element.matrix().similitude_factor();
            let similitude = factor == Some(BigRational::from_integer((*divisor as i64).into()));
            let square = v.element.mul(&v.element).projectively_in(*level);
            ctx.check("M·J·ᵗM = d·J", Status::from_bool(similitude), Value::Null);
            ctx.check("V_d² ∈ K(N)", Status::from_bool(square), Value::Null);
            if divisor == level {
                ctx.check(
                    "V_N = μ_N",
                    Status::from_bool(v.element == mu(*level)),
                    Value::Null,
                );
            }
            ctx.report.result = json!({
                "parameters": v.parameters,
                "scale": v.element.scale(),
                "matrix": rows_to_strings(v.element.matrix()),
            });
            Ok(ctx.done())
        }
        ParaCmd::Involution { table, level } => {
            let mut ctx = Ctx::new(g, "para involution");
            let t = ctx.load_table(table)?.to_paramodular(*level)?;
            ctx.report.param("level", t.level());
            let r = check_involution(&t)?;
            if let Some(v) = &r.violation {
                ctx.report.witness(v);
            }
            if let Some((a, b)) = &r.conflict {
                ctx.report.witness(a);
                ctx.report.witness(b);
            }
            match r.epsilon {
                Some(e) => ctx.line(format!("ε = {e:+}")),
                None if r.passed => ctx.line("no pair fixes ε"),
                None => {}
            }
            ctx.report.result = serde_json::to_value(&r).expect("serializable");
            let status = if !r.passed {
                Status::Fail
            } else if r.epsilon.is_none() {
                Status::Inconclusive
            } else {
                Status::Pass
            };
            ctx.check("involution condition", status, json!({ "epsilon": r.epsilon, "pairs_checked": r.pairs_checked, "pairs_skipped": r.pairs_skipped }));
            Ok(ctx.done())
        }
        ParaCmd::StrongSymmetry {
            table,
            level,
            weight,
            character,
            minimal_generators,
        } => {
            let mut ctx = Ctx::new(g, "para strong-symmetry");
            let t = ctx.load_table(table)?.to_paramodular(*level)?;
            let n = t.level();
            let k = weight.unwrap_or(t.weight);
            let chi = parse_character(n, character)?;
            let elements = if *minimal_generators {
                generating_elements_small_level(n)?
            } else {
                default_strong_elements(n)?
            };
            ctx.report.param("level", n);
            ctx.report.param("weight", k);
            ctx.report.param("character", &chi);
            let r = check_strong_symmetry(&t, k, &chi, &elements)?;
            for v in r.violations.iter().take(20) {
                ctx.report.witness(v);
            }
            ctx.check(
                "a(uTᵗu) = χ(d) det(u)^k a(T)",
                Status::from_bool(r.passed),
                json!({ "elements": r.elements, "pairs_checked": r.pairs_checked, "pairs_skipped": r.pairs_skipped, "violations": r.violations.len() }),
            );
            Ok(ctx.done())
        }
    }
}

// ---------- reduce ----------

fn reduce(g: &GlobalArgs, c: &ReduceCmd) -> CmdResult {
    match c {
        ReduceCmd::Min { matrix } => {
            let mut ctx = Ctx::new(g, "reduce min");
            let v = RationalSymmetricMatrix::from_rows(rational_matrix(matrix)?)?;
            let m = minkowski_min(&v)?;
            ctx.line(format!("min = {m}"));
            ctx.report.result = json!({ "min": m.to_string() });
            Ok(ctx.done())
        }
        ReduceCmd::Jacobi { matrix } => {
            let mut ctx = Ctx::new(g, "reduce jacobi");
            let y = RationalSymmetricMatrix::from_rows(rational_matrix(matrix)?)?;
            let j = jacobi_decompose(&y)?;
            let exact = j.reconstruct() == y;
            let d: Vec<String> = j.d.iter().map(|x| x.to_string()).collect();
            let w: Vec<Vec<String>> =
                j.w.iter()
                    .map(|r| r.iter().map(|x| x.to_string()).collect())
                    .collect();
            ctx.line(format!("D = {d:?}"));
            ctx.report.result = json!({ "d": d, "w": w });
            ctx.check(
                "ᵗW·D·W reconstructs Y exactly",
                Status::from_bool(exact),
                Value::Null,
            );
            Ok(ctx.done())
        }
        ReduceCmd::SiegelDomain { point, param } => {
            let mut ctx = Ctx::new(g, "reduce siegel-domain");
            let tau = parse_point(point)?;
            ctx.report.param("param", param);
            let inside = siegel_domain_contains(&tau, *param);
            ctx.line(format!("in the Siegel domain: {inside}"));
            ctx.report.result = json!({ "inside": inside });
            ctx.check(
                "τ lies in the Siegel domain",
                Status::from_bool(inside),
                Value::Null,
            );
            Ok(ctx.done())
        }
        ReduceCmd::Gl2 { key } => {
            let mut ctx = Ctx::new(g, "reduce gl2");
            let e = ExponentMatrix::from_rows(&integer_matrix(key)?)?;
            let (r, u) = reduce_gl2(&e)?;
            let consistent = e.transform(&u) == r;
            ctx.line(format!("{e} ~ {r}"));
            ctx.report.result = json!({ "reduced": r, "u": u.rows() });
            ctx.check(
                "ᵗu·E·u equals the representative",
                Status::from_bool(consistent),
                Value::Null,
            );
            Ok(ctx.done())
        }
    }
}
