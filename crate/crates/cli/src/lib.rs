//! Command-line front end for `cohertk`.
//!
//! Every subcommand writes machine-readable output (JSON unless a plot
//! format is asked for) with floats rounded to 12 significant digits.
//! Exit codes: 0 on success, 2 when a lemma's precondition does not hold,
//! 1 on any other error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Number, Value};

use cohertk::channels::ChannelClass;
use cohertk::io::{parse_channel, parse_state};
use cohertk::majorization::{ic_pure_feasible, licc_bipartite_feasible, locc_pure_feasible, pio_qubit_feasible, sio_qubit_feasible};
use cohertk::monotones::{
    class_spectrum, pio_source_volume, qubit_pio_ca, qubit_pio_cs, qubit_sio_ca, qubit_sio_cs, region_geometry, sio_accessible_volume,
    sio_source_volume, source_coherence_of_spectrum, source_sup_volume, spectrum_volumes, GeometryInput, MonotoneKind, OperationClass,
};
use cohertk::oracle::{
    b3_b4_counterexamples, coordinate_plane_mc, exact_polytope_volume, monotonicity_suite, qubit_accessible_mc, qubit_source_mc, sorted_accessible_mc,
    sorted_source_mc, SuiteMonotone,
};
use cohertk::slicc::{canonical_form_r4, liu_equivalent, slicc_class_2qubit, slicc_equivalent_2qubit};
use cohertk::state::{Bipartition, PureState, QubitBloch, SortedSpectrum, DEFAULT_AMP_TOL};
use cohertk::{Error, C64};

/// Seed used when neither `--seed` nor the environment sets one.
pub const DEFAULT_SEED: u64 = 20_240_917;
/// Environment variable consulted for the seed.
pub const SEED_ENV: &str = "COHERTK_SEED";

#[derive(Parser, Debug)]
#[command(name = "cohertk", version, about = "Coherence resource theory toolkit")]
struct Cli {
    /// RNG seed (overrides COHERTK_SEED)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte-Carlo samples
    #[arg(long, global = true, default_value_t = 1_000_000)]
    samples: u64,
    /// Amplitude tolerance for classification and equivalence
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output format (plots default to svg, everything else to json)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Rescale state files to unit norm instead of rejecting them
    #[arg(long, global = true)]
    renormalize: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EquivMode {
    Liu,
    Slicc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Measure {
    /// Sorted-representative measure (permutation-sum closed form)
    Sorted,
    /// Planar pictures for spectra of length 2 or 3
    Planar,
}

#[derive(Args, Debug)]
struct Input {
    /// Pure state JSON file
    #[arg(long, conflicts_with_all = ["bloch", "spectrum"])]
    state: Option<PathBuf>,
    /// Qubit Bloch vector x,y,z
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1, conflicts_with = "spectrum")]
    bloch: Option<Vec<f64>>,
    /// Probability spectrum p1,p2,...
    #[arg(long, value_delimiter = ',', num_args = 1)]
    spectrum: Option<Vec<f64>>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two-qubit SLICC class of a pure state
    Classify {
        #[arg(long)]
        state: PathBuf,
    },
    /// LIU or two-qubit SLICC equivalence of two pure states
    Equiv {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        other: PathBuf,
        #[arg(long, value_enum, default_value_t = EquivMode::Slicc)]
        mode: EquivMode,
    },
    /// Deterministic conversion feasibility
    Feasible {
        /// IC, SIO, PIO, LOCC, LICC or LSICC
        #[arg(long)]
        class: String,
        #[arg(long, requires = "to")]
        from: Option<PathBuf>,
        #[arg(long)]
        to: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1, requires = "to_bloch", conflicts_with = "from")]
        from_bloch: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
        to_bloch: Option<Vec<f64>>,
    },
    /// Closed-form accessible or source coherence
    Monotone {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        class: String,
        #[arg(long, value_enum, default_value_t = Measure::Sorted)]
        measure: Measure,
        #[command(flatten)]
        input: Input,
    },
    /// Closed-form, exact and Monte-Carlo volumes side by side
    Volume {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        class: String,
        #[arg(long, value_enum, default_value_t = Measure::Sorted)]
        measure: Measure,
        #[command(flatten)]
        input: Input,
    },
    /// Randomized and exact consistency checks
    Check {
        #[command(subcommand)]
        what: Check,
    },
    /// Region boundaries as SVG, CSV or JSON
    Plot {
        /// planar (spectrum pictures) or bloch
        #[arg(long)]
        figure: String,
        #[arg(long, default_value = "source")]
        kind: String,
        #[arg(long, default_value = "IC")]
        class: String,
        #[command(flatten)]
        input: Input,
    },
    /// Strong-monotonicity and convexity counterexample report
    Counterexample,
}

#[derive(Subcommand, Debug)]
enum Check {
    /// Monotonicity of a monotone under random channels of a class
    Monotonicity {
        /// sio-ca, sio-cs, pio-ca, pio-cs or pure-cs
        #[arg(long)]
        monotone: String,
        #[arg(long)]
        class: String,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Permutation-sum volume against the exact polytope volume
    Polytope {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Validate a channel file and report the classes it satisfies
    Channel {
        #[arg(long)]
        channel: PathBuf,
    },
}

struct Ctx {
    seed: u64,
    samples: u64,
    tol: f64,
    renormalize: bool,
}

enum Output {
    Json(Value),
    Text(String),
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit code. Output goes to `out` (or the `--out` file), diagnostics to
/// `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::NotApplicable(_) => 2,
                _ => 1,
            }
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Error> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Error::Parse(format!("{SEED_ENV}={v:?} is not an unsigned 64-bit integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), Error> {
    let ctx = Ctx { seed: resolve_seed(cli.seed)?, samples: cli.samples, tol: cli.tol.unwrap_or(DEFAULT_AMP_TOL), renormalize: cli.renormalize };
    let is_plot = matches!(cli.command, Command::Plot { .. });
    let format = cli.format.unwrap_or(if is_plot { Format::Svg } else { Format::Json });
    if !is_plot && format != Format::Json {
        return Err(Error::Unsupported("only plot emits csv or svg".into()));
    }
    let output = match cli.command {
        Command::Classify { state } => classify(&ctx, &state)?,
        Command::Equiv { state, other, mode } => equiv(&ctx, &state, &other, mode)?,
        Command::Feasible { class, from, to, from_bloch, to_bloch } => feasible(&ctx, &class, from, to, from_bloch, to_bloch)?,
        Command::Monotone { kind, class, measure, input } => monotone(&ctx, &kind.parse()?, &class.parse()?, measure, &input)?,
        Command::Volume { kind, class, measure, input } => volume(&ctx, kind.parse()?, class.parse()?, measure, &input)?,
        Command::Check { what } => check(&ctx, what)?,
        Command::Plot { figure, kind, class, input } => plot(&ctx, &figure, kind.parse()?, class.parse()?, &input, format)?,
        Command::Counterexample => Output::Json(to_value(&b3_b4_counterexamples()?)),
    };
    let text = match output {
        Output::Json(mut v) => {
            round_floats(&mut v);
            let mut s = serde_json::to_string(&v).expect("json value serializes");
            s.push('\n');
            s
        }
        Output::Text(s) => s,
    };
    match cli.out {
        Some(path) => fs::write(&path, text).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Error::Parse(format!("cannot write output: {e}"))),
    }
}

/// Rounds every non-integer number to 12 significant digits.
fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
            *n = Number::from_f64(r).unwrap_or_else(|| n.clone());
        }
        Value::Array(a) => a.iter_mut().for_each(round_floats),
        Value::Object(o) => o.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn round12(x: f64) -> f64 {
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report serializes")
}

fn complex(c: C64) -> Value {
    json!([c.re, c.im])
}

fn read_state(ctx: &Ctx, path: &Path) -> Result<PureState, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse_state(&text, ctx.renormalize)
}

fn bloch(v: &[f64]) -> Result<QubitBloch, Error> {
    match v {
        [x, y, z] => QubitBloch::new(*x, *y, *z),
        _ => Err(Error::Parse(format!("Bloch vector needs 3 components, got {}", v.len()))),
    }
}

fn spectrum(ctx: &Ctx, v: &[f64]) -> Result<SortedSpectrum, Error> {
    if ctx.renormalize {
        SortedSpectrum::normalized(v.to_vec())
    } else {
        SortedSpectrum::from_unsorted(v.to_vec())
    }
}

enum Resolved {
    Spectrum(SortedSpectrum),
    Qubit(QubitBloch),
}

/// A state file is reduced to the spectrum the class acts on.
fn resolve(ctx: &Ctx, input: &Input, class: OperationClass) -> Result<Resolved, Error> {
    match (&input.state, &input.bloch, &input.spectrum) {
        (Some(p), None, None) => Ok(Resolved::Spectrum(class_spectrum(&read_state(ctx, p)?, class)?)),
        (None, Some(b), None) => Ok(Resolved::Qubit(bloch(b)?)),
        (None, None, Some(s)) => Ok(Resolved::Spectrum(spectrum(ctx, s)?)),
        _ => Err(Error::Parse("give exactly one of --state, --bloch, --spectrum".into())),
    }
}

fn classify(ctx: &Ctx, path: &Path) -> Result<Output, Error> {
    let psi = read_state(ctx, path)?;
    let c = slicc_class_2qubit(&psi, ctx.tol)?;
    let canonical = match c.rank {
        4 => {
            let f = canonical_form_r4(&psi)?;
            json!({"alpha": f.alpha, "beta": complex(f.beta)})
        }
        _ => Value::Null,
    };
    Ok(Output::Json(json!({
        "R": c.rank,
        "subclass": to_value(&c.subclass),
        "r": c.invariant.map_or(Value::Null, |(r, _)| complex(r)),
        "r_inverse": c.invariant.map_or(Value::Null, |(_, ri)| complex(ri)),
        "support": c.support,
        "canonical": canonical,
    })))
}

fn equiv(ctx: &Ctx, a: &Path, b: &Path, mode: EquivMode) -> Result<Output, Error> {
    let (psi, phi) = (read_state(ctx, a)?, read_state(ctx, b)?);
    Ok(Output::Json(match mode {
        EquivMode::Liu => {
            let w = liu_equivalent(&psi, &phi)?;
            json!({"mode": "liu", "equivalent": w.is_some(), "witness": w.map_or(Value::Null, |w| to_value(&w))})
        }
        EquivMode::Slicc => json!({"mode": "slicc", "equivalent": slicc_equivalent_2qubit(&psi, &phi, ctx.tol)?}),
    }))
}

fn feasible(
    ctx: &Ctx,
    class: &str,
    from: Option<PathBuf>,
    to: Option<PathBuf>,
    from_bloch: Option<Vec<f64>>,
    to_bloch: Option<Vec<f64>>,
) -> Result<Output, Error> {
    let class = class.to_ascii_uppercase();
    let verdict = match (from, to, from_bloch, to_bloch) {
        (Some(f), Some(t), None, None) => {
            let (psi, phi) = (read_state(ctx, &f)?, read_state(ctx, &t)?);
            match class.as_str() {
                "IC" | "IO" | "SIO" => ic_pure_feasible(&psi, &phi)?,
                "LOCC" => locc_pure_feasible(&psi, &phi, &Bipartition::first(1))?,
                "LICC" | "LSICC" => licc_bipartite_feasible(&psi, &phi)?,
                other => return Err(Error::Unsupported(format!("no pure-state criterion for class {other}"))),
            }
        }
        (None, None, Some(f), Some(t)) => {
            let (r, s) = (bloch(&f)?, bloch(&t)?);
            match class.as_str() {
                "IC" | "IO" | "SIO" => sio_qubit_feasible(&r, &s),
                "PIO" => pio_qubit_feasible(&r, &s),
                other => return Err(Error::Unsupported(format!("no qubit criterion for class {other}"))),
            }
        }
        _ => return Err(Error::Parse("give --from/--to state files or --from-bloch/--to-bloch vectors".into())),
    };
    Ok(Output::Json(to_value(&verdict)))
}

fn qubit_value(r: &QubitBloch, kind: MonotoneKind, class: OperationClass) -> Result<Value, Error> {
    let v = match (class, kind) {
        (OperationClass::SIO | OperationClass::IC, MonotoneKind::Accessible) => qubit_sio_ca(r),
        (OperationClass::SIO | OperationClass::IC, MonotoneKind::Source) => qubit_sio_cs(r),
        (OperationClass::PIO, MonotoneKind::Accessible) => qubit_pio_ca(r),
        (OperationClass::PIO, MonotoneKind::Source) => qubit_pio_cs(r),
        (c, _) => return Err(Error::Unsupported(format!("{c} is not a single-qubit class"))),
    };
    Ok(to_value(&v))
}

fn planar_value(lambda: &SortedSpectrum, kind: MonotoneKind, class: OperationClass) -> Result<Value, Error> {
    let v = spectrum_volumes(lambda)?;
    let (value, volume, sup) = match kind {
        MonotoneKind::Accessible => (v.c_a, v.v_a, v.sup_a),
        MonotoneKind::Source => (v.c_s, v.v_s, v.sup_s),
    };
    Ok(json!({
        "kind": to_value(&kind),
        "value": value,
        "volume": volume,
        "sup_volume": sup,
        "measure": to_value(&v.measure),
        "operation_class": class.to_string(),
    }))
}

fn monotone(ctx: &Ctx, kind: &MonotoneKind, class: &OperationClass, measure: Measure, input: &Input) -> Result<Output, Error> {
    let (kind, class) = (*kind, *class);
    let v = match resolve(ctx, input, class)? {
        Resolved::Qubit(r) => qubit_value(&r, kind, class)?,
        Resolved::Spectrum(l) => match (kind, measure) {
            (MonotoneKind::Source, Measure::Sorted) => to_value(&source_coherence_of_spectrum(&l, class)?),
            (MonotoneKind::Accessible, Measure::Sorted) if l.rank() > 3 => {
                return Err(Error::Unsupported("no closed-form accessible coherence beyond three levels; use the volume subcommand".into()))
            }
            _ => planar_value(&l, kind, class)?,
        },
    };
    Ok(Output::Json(v))
}

fn volume(ctx: &Ctx, kind: MonotoneKind, class: OperationClass, measure: Measure, input: &Input) -> Result<Output, Error> {
    let (seed, n) = (ctx.seed, ctx.samples);
    let v = match resolve(ctx, input, class)? {
        Resolved::Qubit(r) => {
            let (closed, mc) = match (kind, class) {
                (MonotoneKind::Accessible, OperationClass::SIO | OperationClass::IC) => (sio_accessible_volume(&r), qubit_accessible_mc(&r, class, n, seed)?),
                (MonotoneKind::Accessible, OperationClass::PIO) => (2.0 * r.transverse() * (1.0 + r.z.abs()), qubit_accessible_mc(&r, class, n, seed)?),
                (MonotoneKind::Source, OperationClass::SIO | OperationClass::IC) => (sio_source_volume(&r), qubit_source_mc(&r, class, n, seed)?),
                (MonotoneKind::Source, OperationClass::PIO) => (pio_source_volume(&r), qubit_source_mc(&r, class, n, seed)?),
                (_, c) => return Err(Error::Unsupported(format!("{c} is not a single-qubit class"))),
            };
            json!({"closed_form": closed, "exact": Value::Null, "mc": to_value(&mc)})
        }
        Resolved::Spectrum(l) => match measure {
            Measure::Sorted => {
                let d = l.support().len();
                match kind {
                    MonotoneKind::Source => {
                        let closed = source_coherence_of_spectrum(&l, class)?.volume;
                        let exact = exact_polytope_volume(&l).ok();
                        let mc = if d >= 2 { to_value(&sorted_source_mc(&l, n, seed)?) } else { Value::Null };
                        json!({"closed_form": closed, "exact": exact, "mc": mc, "sup_volume": source_sup_volume(d)})
                    }
                    MonotoneKind::Accessible => {
                        let mc = sorted_accessible_mc(&l, n, seed)?;
                        let sup = source_sup_volume(l.len());
                        json!({"closed_form": Value::Null, "exact": Value::Null, "mc": to_value(&mc), "sup_volume": sup, "value_estimate": mc.mean / sup})
                    }
                }
            }
            Measure::Planar => {
                let p = spectrum_volumes(&l)?;
                let closed = if kind == MonotoneKind::Source { p.v_s } else { p.v_a };
                let mc = if p.dim == 3 { to_value(&coordinate_plane_mc(&l, kind, n, seed)?) } else { Value::Null };
                json!({"closed_form": closed, "exact": Value::Null, "mc": mc, "measure": to_value(&p.measure)})
            }
        },
    };
    Ok(Output::Json(v))
}

fn check(ctx: &Ctx, what: Check) -> Result<Output, Error> {
    use rand::{Rng, SeedableRng};
    Ok(Output::Json(match what {
        Check::Monotonicity { monotone, class, trials } => {
            let m: SuiteMonotone = monotone.parse()?;
            let c: ChannelClass = class.parse()?;
            let r = monotonicity_suite(m, c, trials, ctx.seed)?;
            let mut v = to_value(&r);
            v["passed"] = json!(r.passed());
            v
        }
        Check::Polytope { dim, trials } => {
            if !(2..=cohertk::oracle::MAX_EXACT_DIM).contains(&dim) {
                return Err(Error::Unsupported(format!("exact volumes need 2 <= dim <= {}", cohertk::oracle::MAX_EXACT_DIM)));
            }
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(ctx.seed);
            let mut worst: f64 = 0.0;
            for _ in 0..trials {
                let raw: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() + 1e-3).collect();
                let l = SortedSpectrum::normalized(raw)?;
                let closed = source_coherence_of_spectrum(&l, OperationClass::IC)?.volume;
                worst = worst.max((closed - exact_polytope_volume(&l)?).abs());
            }
            json!({"dim": dim, "trials": trials, "seed": ctx.seed, "max_abs_difference": worst, "passed": worst < 1e-9})
        }
        Check::Channel { channel } => {
            let text = fs::read_to_string(&channel).map_err(|e| Error::Parse(format!("cannot read {}: {e}", channel.display())))?;
            let ch = parse_channel(&text)?;
            json!({"class": ch.class().to_string(), "dim": ch.dim(), "kraus": ch.kraus().len(), "report": to_value(&ch.report())})
        }
    }))
}

fn plot(ctx: &Ctx, figure: &str, kind: MonotoneKind, class: OperationClass, input: &Input, format: Format) -> Result<Output, Error> {
    let geometry_input = match (figure.to_ascii_lowercase().as_str(), resolve(ctx, input, class)?) {
        ("planar" | "qutrit" | "segment", Resolved::Spectrum(l)) => GeometryInput::Spectrum(l),
        ("bloch" | "qubit", Resolved::Qubit(r)) => GeometryInput::Qubit(r),
        (f, _) => return Err(Error::Parse(format!("figure {f:?} does not match the input (planar needs --state or --spectrum, bloch needs --bloch)"))),
    };
    let g = region_geometry(&geometry_input, class, kind)?;
    Ok(match format {
        Format::Svg => Output::Text(g.to_svg()),
        Format::Csv => Output::Text(g.to_csv()),
        Format::Json => {
            let mut v = to_value(&g);
            v["measure"] = json!(round12(g.measure()));
            Output::Json(v)
        }
    })
}
