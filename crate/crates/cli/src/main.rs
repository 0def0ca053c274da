//! `gmra`: command-line front end for generalized multiresolution filter
//! systems.
//!
//! Documents are read from a file argument or standard input and written to
//! standard output. Exit status: 0 on success, 1 when a verification fails
//! (the JSON report is still printed), 2 on usage, parse or schema errors.

#![allow(clippy::result_large_err)]

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gmra::document::{Document, Kind, ScalarKind};
use gmra::fixtures;
use gmra::loopgroup::{connecting_element, LoopElement};
use gmra::multiplicity::{check_constant_near, lattice_points};
use gmra::random::{random_loop_element, random_msystem, random_multiplicity, MultiplicityOptions};
use gmra::torus::{format_rational, parse_rational, CellValue, IntervalSet};
use gmra::wavelet::{
    check_classical_lowpass, frame_sum, scaling_function, telescoping_check, wavelet_family,
    ClassicalFilter, ClassicalMSystem, FrameRanges, FrequencyGrid, FrequencyGridFn,
    LowPassOptions, StepFunction,
};
use gmra::{
    Complex64, DimensionProfile, Exact, GmraError, MSystem, Matrix, Rational, Representative,
    Scalar, TorusPoint,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "gmra", version, about = "Generalized multiresolution filter systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Input document; standard input when omitted or "-".
    input: Option<PathBuf>,
}

#[derive(Args)]
struct Tolerance {
    /// Absolute tolerance for floating-point comparisons (exact data ignores it).
    #[arg(long, default_value_t = 1e-12)]
    tolerance: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Check the consistency inequality and constancy near l/N.
    MuCheck {
        #[command(flatten)]
        input: Input,
        /// Neighborhood radius for the constancy check (p/q).
        #[arg(long)]
        radius: Option<String>,
    },
    /// Print the conjugate multiplicity.
    MuConjugate {
        #[command(flatten)]
        input: Input,
    },
    /// Print the level sets of μ and of its conjugate.
    MuLevelsets {
        #[command(flatten)]
        input: Input,
    },
    /// Verify the orthogonality relations, column orthogonality, unitarity and
    /// the low-pass condition of a bank, M-system or classical m-system.
    MsystemVerify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        tol: Tolerance,
        /// Neighborhood radius for the constancy check (p/q).
        #[arg(long)]
        radius: Option<String>,
        /// Grid resolution 2^k for trigonometric classical filters.
        #[arg(long, default_value_t = 12)]
        grid_log2: u32,
    },
    /// Print the matrix K(x) generated by an M-system.
    MsystemMatrix {
        #[command(flatten)]
        input: Input,
        /// The point x (p/q).
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long, value_enum, default_value_t = Lift::Centered)]
        lift: Lift,
    },
    /// Generate a random M-system (or loop element) from a seed.
    MsystemRandom {
        #[arg(long)]
        seed: u64,
        /// Multiplicity document; a random one is drawn when omitted.
        #[arg(long)]
        mu: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long, default_value_t = 3)]
        max_value: u32,
        #[arg(long, default_value_t = 12)]
        max_cells: usize,
        /// Emit a random loop element instead.
        #[arg(long)]
        loop_element: bool,
    },
    /// Apply a loop element to an M-system.
    LoopAct {
        #[arg(long)]
        element: PathBuf,
        #[arg(long)]
        system: PathBuf,
        #[command(flatten)]
        tol: Tolerance,
    },
    /// The loop element carrying one M-system to another.
    LoopConnect {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
        #[command(flatten)]
        tol: Tolerance,
    },
    /// Check dimensions, unitarity, and K = I near 0.
    LoopVerify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        tol: Tolerance,
        #[arg(long)]
        radius: Option<String>,
    },
    /// Pointwise product of two loop elements.
    LoopCompose {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Sample the truncated scaling function or a wavelet on a grid.
    Scaling {
        /// haar, shannon, or a classical-msystem document.
        #[arg(long)]
        filter: String,
        #[arg(long, default_value_t = 16)]
        depth: u32,
        /// Grid step (p/q).
        #[arg(long, default_value = "1/1024")]
        grid_step: String,
        /// The grid covers [-extent, extent] (p/q).
        #[arg(long, default_value = "64")]
        extent: String,
        /// 0 for the scaling function, k ≥ 1 for the wavelet Ψ_k.
        #[arg(long, default_value_t = 0)]
        component: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Truncated frame sum Σ |⟨f, D^j T^v Ψ⟩|² against ‖f‖².
    FrameCheck {
        #[arg(long, value_enum)]
        wavelet: WaveletName,
        /// Grid-function document for f; f = Ψ when neither --f nor --interval is given.
        #[arg(long)]
        f: Option<PathBuf>,
        /// f = indicator of [a, b), written "a,b".
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<String>,
        #[arg(long, default_value_t = 2)]
        jmax: i32,
        #[arg(long, default_value_t = 8)]
        vmax: i64,
        /// Fail unless sum/‖f‖² reaches this ratio.
        #[arg(long)]
        min_ratio: Option<f64>,
    },
    /// Write a built-in fixture as a document.
    Example {
        #[arg(value_enum)]
        name: ExampleName,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Lift {
    Centered,
    Unit,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Report,
}

#[derive(Clone, Copy, ValueEnum)]
enum WaveletName {
    Journe,
    Shannon,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleName {
    Journe,
    JourneMu,
    Haar,
    Shannon,
}

/// What a subcommand produced: text for standard output and whether every
/// check passed.
struct Outcome {
    output: String,
    pass: bool,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome { output, pass: true }
    }

    fn doc(doc: &Document) -> Self {
        Outcome::ok(doc.to_pretty())
    }

    fn report(value: Value, pass: bool) -> Self {
        Outcome {
            output: Document::new(Kind::Report, value).to_pretty(),
            pass,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(outcome) => {
            emit(&outcome.output);
            ExitCode::from(if outcome.pass { 0 } else { 1 })
        }
        Err(e) if is_verification_failure(&e) => {
            emit(&Document::new(Kind::Report, failure_report(&e)).to_pretty());
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(text: &str) {
    let mut out = io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    if !text.ends_with('\n') {
        let _ = out.write_all(b"\n");
    }
}

fn is_verification_failure(e: &GmraError) -> bool {
    matches!(
        e,
        GmraError::NegativeConjugate { .. }
            | GmraError::InvalidBank { .. }
            | GmraError::NotUnitary { .. }
            | GmraError::InvalidMSystem { .. }
    )
}

fn failure_report(e: &GmraError) -> Value {
    let (equation, cell) = match e {
        GmraError::NegativeConjugate { cell, .. } => ("consistency".to_string(), Some(cell)),
        GmraError::InvalidBank { equation, cell, .. } => (equation.clone(), Some(cell)),
        GmraError::NotUnitary { cell, .. } => ("unitarity".to_string(), Some(cell)),
        GmraError::InvalidMSystem { cell, .. } => ("msystem".to_string(), Some(cell)),
        _ => ("error".to_string(), None),
    };
    json!({
        "pass": false,
        "equation": equation,
        "cell": cell.map(|c| c.to_string()),
        "error": e.to_string(),
    })
}

fn read_text(path: Option<&Path>) -> gmra::Result<String> {
    match path {
        None => read_stdin(),
        Some(p) if p.as_os_str() == "-" => read_stdin(),
        Some(p) => fs::read_to_string(p)
            .map_err(|e| GmraError::Parse(format!("cannot read {}: {e}", p.display()))),
    }
}

fn read_stdin() -> gmra::Result<String> {
    let mut s = String::new();
    io::stdin()
        .read_to_string(&mut s)
        .map_err(|e| GmraError::Parse(format!("cannot read standard input: {e}")))?;
    Ok(s)
}

fn read_doc(path: Option<&Path>) -> gmra::Result<Document> {
    Document::parse(&read_text(path)?)
}

fn parse_opt_rational(s: &Option<String>) -> gmra::Result<Option<Rational>> {
    s.as_deref().map(parse_rational).transpose()
}

/// Trigonometric classical filters are sampled on 2^13 cells when embedded as
/// M-systems, so points k/2^12 have preimages at cell left endpoints.
const CLASSICAL_SAMPLE_LOG2: u32 = 13;

enum System {
    Exact(MSystem<Exact>),
    Float(MSystem<Complex64>),
}

impl System {
    fn load(doc: &Document) -> gmra::Result<System> {
        if doc.kind == Kind::ClassicalMsystem {
            let c = doc.to_classical()?;
            return Ok(match c.to_msystem_exact() {
                Some(m) => System::Exact(m),
                None => System::Float(c.to_msystem_sampled(CLASSICAL_SAMPLE_LOG2)),
            });
        }
        match doc.scalar_kind()? {
            ScalarKind::Exact => Ok(System::Exact(doc.to_msystem()?)),
            ScalarKind::Float => Ok(System::Float(doc.to_msystem()?)),
        }
    }

    fn to_float(&self) -> MSystem<Complex64> {
        match self {
            System::Exact(m) => gmra::random::to_float(m),
            System::Float(m) => m.clone(),
        }
    }
}

enum Element {
    Exact(LoopElement<Exact>),
    Float(LoopElement<Complex64>),
}

impl Element {
    fn load(doc: &Document) -> gmra::Result<Element> {
        match doc.scalar_kind()? {
            ScalarKind::Exact => Ok(Element::Exact(doc.to_loop_element()?)),
            ScalarKind::Float => Ok(Element::Float(doc.to_loop_element()?)),
        }
    }

    fn to_float(&self) -> LoopElement<Complex64> {
        match self {
            Element::Exact(k) => LoopElement::new(
                k.profile().clone(),
                k.section().map(|m| m.map(Scalar::to_c64)),
            )
            .expect("same dimensions"),
            Element::Float(k) => k.clone(),
        }
    }
}

fn run(command: Command) -> gmra::Result<Outcome> {
    match command {
        Command::MuCheck { input, radius } => mu_check(&read_doc(input.input.as_deref())?, &parse_opt_rational(&radius)?),
        Command::MuConjugate { input } => mu_conjugate(&read_doc(input.input.as_deref())?),
        Command::MuLevelsets { input } => mu_levelsets(&read_doc(input.input.as_deref())?),
        Command::MsystemVerify {
            input,
            tol,
            radius,
            grid_log2,
        } => msystem_verify(
            &read_doc(input.input.as_deref())?,
            tol.tolerance,
            &parse_opt_rational(&radius)?,
            grid_log2,
        ),
        Command::MsystemMatrix { input, at, lift } => {
            let rep = match lift {
                Lift::Centered => Representative::Centered,
                Lift::Unit => Representative::Unit,
            };
            let x = TorusPoint::new(&parse_rational(&at)?);
            Ok(match System::load(&read_doc(input.input.as_deref())?)? {
                System::Exact(m) => matrix_report(&m, &x, rep),
                System::Float(m) => matrix_report(&m, &x, rep),
            })
        }
        Command::MsystemRandom {
            seed,
            mu,
            n,
            max_value,
            max_cells,
            loop_element,
        } => {
            let mf = match mu {
                Some(path) => read_doc(Some(&path))?.to_multiplicity()?,
                None => random_multiplicity(
                    &MultiplicityOptions {
                        n,
                        max_value,
                        max_cells,
                    },
                    seed,
                )?,
            };
            let profile = DimensionProfile::new(mf)?;
            Ok(if loop_element {
                Outcome::doc(&Document::loop_element(&random_loop_element(&profile, seed)))
            } else {
                Outcome::doc(&Document::msystem(&random_msystem(&profile, seed)))
            })
        }
        Command::LoopAct {
            element,
            system,
            tol,
        } => {
            let k = Element::load(&read_doc(Some(&element))?)?;
            let m = System::load(&read_doc(Some(&system))?)?;
            Ok(match (k, m) {
                (Element::Exact(k), System::Exact(m)) => Outcome::doc(&Document::msystem(&k.act_checked(&m, 0.0)?)),
                (k, m) => Outcome::doc(&Document::msystem(&k.to_float().act_checked(&m.to_float(), tol.tolerance)?)),
            })
        }
        Command::LoopConnect { from, to, tol } => {
            let a = System::load(&read_doc(Some(&from))?)?;
            let b = System::load(&read_doc(Some(&to))?)?;
            Ok(match (a, b) {
                (System::Exact(a), System::Exact(b)) => Outcome::doc(&Document::loop_element(&connecting_element(&a, &b, 0.0)?)),
                (a, b) => Outcome::doc(&Document::loop_element(&connecting_element(
                    &a.to_float(),
                    &b.to_float(),
                    tol.tolerance,
                )?)),
            })
        }
        Command::LoopVerify { input, tol, radius } => {
            let radius = parse_opt_rational(&radius)?;
            let report = match Element::load(&read_doc(input.input.as_deref())?)? {
                Element::Exact(k) => k.verify(0.0, radius.as_ref()),
                Element::Float(k) => k.verify(tol.tolerance, radius.as_ref()),
            };
            Ok(Outcome::report(to_value(&report), report.pass))
        }
        Command::LoopCompose { left, right } => {
            let a = Element::load(&read_doc(Some(&left))?)?;
            let b = Element::load(&read_doc(Some(&right))?)?;
            Ok(match (a, b) {
                (Element::Exact(a), Element::Exact(b)) => Outcome::doc(&Document::loop_element(&a.compose(&b)?)),
                (a, b) => Outcome::doc(&Document::loop_element(&a.to_float().compose(&b.to_float())?)),
            })
        }
        Command::Scaling {
            filter,
            depth,
            grid_step,
            extent,
            component,
            format,
        } => {
            let sys = match filter.as_str() {
                "haar" => gmra::wavelet::haar(),
                "shannon" => gmra::wavelet::shannon(),
                path => read_doc(Some(Path::new(path)))?.to_classical()?,
            };
            let grid = FrequencyGrid::symmetric(&parse_rational(&extent)?, &parse_rational(&grid_step)?)?;
            scaling(&sys, depth, &grid, component, format)
        }
        Command::FrameCheck {
            wavelet,
            f,
            interval,
            jmax,
            vmax,
            min_ratio,
        } => {
            let (name, psi) = match wavelet {
                WaveletName::Journe => ("journe", fixtures::journe_wavelet()),
                WaveletName::Shannon => ("shannon", gmra::wavelet::shannon_wavelet()),
            };
            let psi = psi.to_step();
            let f = match (f, interval) {
                (Some(_), Some(_)) => {
                    return Err(GmraError::InvalidArgument("give either --f or --interval".into()))
                }
                (Some(path), None) => {
                    StepFunction::from_grid(&read_doc(Some(&path))?.to_grid_function::<Complex64>()?)
                }
                (None, Some(iv)) => {
                    let (a, b) = iv
                        .split_once(',')
                        .ok_or_else(|| GmraError::Parse(format!("expected a,b; got {iv:?}")))?;
                    StepFunction::new(vec![(
                        parse_rational(a.trim())?,
                        parse_rational(b.trim())?,
                        Complex64::new(1.0, 0.0),
                    )])?
                }
                (None, None) => psi.clone(),
            };
            let report = frame_sum(&f, &[psi], 2, FrameRanges::symmetric(jmax, vmax))?;
            let pass = min_ratio.is_none_or(|r| report.ratio >= r);
            let mut value = to_value(&report);
            value["wavelet"] = json!(name);
            value["pass"] = json!(pass);
            Ok(Outcome::report(value, pass))
        }
        Command::Example { name } => Ok(Outcome::doc(&match name {
            ExampleName::Journe => Document::bank(&fixtures::journe_bank()),
            ExampleName::JourneMu => Document::multiplicity(&fixtures::journe_multiplicity()),
            ExampleName::Haar => Document::classical(&gmra::wavelet::haar()),
            ExampleName::Shannon => Document::classical(&gmra::wavelet::shannon()),
        })),
    }
}

fn to_value<T: gmra::document::Serializable>(t: &T) -> Value {
    Document::report(t).payload
}

fn intervals(set: &IntervalSet) -> Vec<String> {
    set.indicator()
        .cells()
        .filter(|(_, inside)| **inside)
        .map(|(cell, _)| cell.to_string())
        .collect()
}

fn mu_check(doc: &Document, radius: &Option<Rational>) -> gmra::Result<Outcome> {
    let mf = doc.to_multiplicity()?;
    let consistency = mf.check_consistency();
    let constancy = check_constant_near(mf.mu(), &lattice_points(mf.dilation()), radius.as_ref())?;
    let pass = consistency.pass && constancy.pass;
    Ok(Outcome::report(
        json!({
            "pass": pass,
            "N": mf.dilation(),
            "c": mf.c(),
            "consistency": to_value(&consistency),
            "constant_near_lattice": to_value(&constancy),
        }),
        pass,
    ))
}

fn mu_conjugate(doc: &Document) -> gmra::Result<Outcome> {
    let mf = doc.to_multiplicity()?;
    let cm = mf.conjugate()?;
    Ok(Outcome::report(
        json!({
            "pass": true,
            "d": cm.d(),
            "mu_tilde": cm.mu_tilde().to_json(),
        }),
        true,
    ))
}

fn mu_levelsets(doc: &Document) -> gmra::Result<Outcome> {
    let mf = doc.to_multiplicity()?;
    let cm = mf.conjugate()?;
    let sets = mf.level_sets(&cm);
    let describe = |s: &[IntervalSet]| -> Vec<Value> {
        s.iter()
            .map(|set| {
                json!({
                    "intervals": intervals(set),
                    "measure": format_rational(&set.measure()),
                })
            })
            .collect()
    };
    Ok(Outcome::report(
        json!({
            "pass": true,
            "S": describe(&sets.s),
            "S_tilde": describe(&sets.s_tilde),
        }),
        true,
    ))
}

fn msystem_verify(doc: &Document, tol: f64, radius: &Option<Rational>, grid_log2: u32) -> gmra::Result<Outcome> {
    if doc.kind == Kind::ClassicalMsystem {
        let sys = doc.to_classical()?;
        return Ok(classical_verify(&sys, tol, radius, grid_log2));
    }
    Ok(match System::load(doc)? {
        System::Exact(m) => verify_generic(&m, 0.0),
        System::Float(m) => verify_generic(&m, tol),
    })
}

fn verify_generic<S: Scalar + CellValue>(m: &MSystem<S>, tol: f64) -> Outcome {
    let ortho = m.to_bank().verify_orthogonality(tol);
    let columns = m.verify_column_orthogonality(tol);
    let unitarity = match m.assemble_unitary(Representative::Centered, tol) {
        Ok(field) => {
            let worst = field
                .field
                .values()
                .iter()
                .map(Matrix::unitarity_residual)
                .fold(0.0, f64::max);
            json!({"equation": "unitarity", "pass": true, "worst_residual": worst, "worst_cell": null})
        }
        Err(GmraError::NotUnitary { cell, residual }) => json!({
            "equation": "unitarity", "pass": false, "worst_residual": residual, "worst_cell": cell.to_string(),
        }),
        Err(e) => json!({"equation": "unitarity", "pass": false, "detail": e.to_string()}),
    };
    let pass = ortho.pass && columns.pass && unitarity["pass"] == json!(true);
    Outcome::report(
        json!({
            "pass": pass,
            "scalar": S::KIND,
            "orthogonality": to_value(&ortho),
            "columns": to_value(&columns),
            "unitarity": unitarity,
        }),
        pass,
    )
}

fn classical_verify(sys: &ClassicalMSystem, tol: f64, radius: &Option<Rational>, grid_log2: u32) -> Outcome {
    let opts = LowPassOptions {
        grid_log2,
        tolerance: tol,
        cohen_interval: None,
        radius: radius.clone(),
    };
    let low = check_classical_lowpass(sys.low_pass(), sys.n(), &opts);
    let high = sys.check_highpass(grid_log2, tol);
    let pass = low.pass && high.pass;
    Outcome::report(
        json!({
            "pass": pass,
            "low_pass": to_value(&low),
            "unitarity": to_value(&high),
        }),
        pass,
    )
}

fn matrix_report<S: Scalar + CellValue + std::fmt::Display>(m: &MSystem<S>, x: &TorusPoint, rep: Representative) -> Outcome {
    let (k, _) = m.matrix_at(x, rep);
    let entries: Vec<Vec<String>> = (0..k.rows())
        .map(|i| (0..k.cols()).map(|j| k[(i, j)].to_string()).collect())
        .collect();
    let preimages: Vec<String> = m
        .profile()
        .preimage_list(x, rep)
        .pairs
        .iter()
        .map(|p| format!("({}, {})", p.l, p.j))
        .collect();
    Outcome::report(
        json!({
            "pass": true,
            "x": format_rational(x.value()),
            "dimension": k.rows(),
            "columns": preimages,
            "entries": entries,
            "matrix": k.to_json(),
        }),
        true,
    )
}

fn scaling(sys: &ClassicalMSystem, depth: u32, grid: &FrequencyGrid, component: usize, format: Format) -> gmra::Result<Outcome> {
    let n = sys.n();
    if component >= n as usize {
        return Err(GmraError::InvalidArgument(format!(
            "component must be below {n}, got {component}"
        )));
    }
    match sys.low_pass() {
        ClassicalFilter::Piecewise(_) if sys.filters().iter().all(|f| f.as_piecewise().is_some()) => {
            let eval = |i: usize| {
                let f = sys.filters()[i].as_piecewise().expect("piecewise").clone();
                move |x: &Rational| f.at(x).clone()
            };
            scaling_output::<Exact, _>(eval, n, depth, grid, component, format)
        }
        _ => {
            let eval = |i: usize| {
                let f = sys.filters()[i].clone();
                move |x: &Rational| f.eval_c64(x)
            };
            scaling_output::<Complex64, _>(eval, n, depth, grid, component, format)
        }
    }
}

fn scaling_output<S, F>(
    eval: impl Fn(usize) -> F,
    n: u32,
    depth: u32,
    grid: &FrequencyGrid,
    component: usize,
    format: Format,
) -> gmra::Result<Outcome>
where
    S: Scalar + CellValue,
    F: Fn(&Rational) -> S,
{
    let phi = scaling_function(eval(0), n, depth, grid)?;
    let out: FrequencyGridFn<S> = if component == 0 {
        phi
    } else {
        wavelet_family(&[eval(component)], n, &phi).remove(0)
    };
    Ok(match format {
        Format::Csv => Outcome::ok(out.to_csv()),
        Format::Json => Outcome::doc(&Document::grid_function(&out)),
        Format::Report => {
            let tele = telescoping_check(eval(0), n, depth, grid)?;
            Outcome::report(
                json!({
                    "pass": tele.exact,
                    "component": component,
                    "depth": depth,
                    "norm_sqr": out.norm_sqr(),
                    "telescoping": to_value(&tele),
                }),
                tele.exact,
            )
        }
    })
}
