//! Command-line surface over the valued differential field toolkit.
//!
//! Machine-readable JSON goes to stdout (or `--out`), a short human summary
//! to stderr. Exit codes: 0 success, 2 precondition violation, 3 solver
//! failure, 4 parse error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use valdiff_core::coarsen::CoarseContext;
use valdiff_core::cuts::{classify_delta, ddeg_along_cut, DeltaClass};
use valdiff_core::dhensel::{
    asymptotic_witness, dh_solve, Residual, SolveOptions, SolveStatus, SolverReport,
};
use valdiff_core::error::Error;
use valdiff_core::json::{
    cut_from_dto, derivation_from_dto, group_vector_to_vec, poly_from_dto, poly_to_dto,
    series_from_dto, series_to_dto, CutDto, DerivationDto, PolyDto, SeriesDto,
};
use valdiff_core::ordgroup::{ConvexLevel, GroupVector};
use valdiff_core::oracle::{selftest, standard_rank1, standard_rank2, GenConfig, InstanceGen};
use valdiff_core::pretty;
use valdiff_core::residue::{RatFunc, Rationals, ResidueField};
use valdiff_core::series::{DerivationSpec, SampleOptions};

#[derive(Parser)]
#[command(name = "valdiff", version, about = "Exact computation in valued differential fields")]
struct Cli {
    /// Workspace configuration (rank, residue field, derivation).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the JSON response to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConjKind {
    Add,
    Mul,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a differential polynomial at a series.
    Eval {
        #[arg(short = 'P', long = "poly")]
        poly: PathBuf,
        #[arg(short = 'S', long = "series")]
        series: PathBuf,
    },
    /// Additive or multiplicative conjugation.
    Conj {
        #[arg(long)]
        kind: ConjKind,
        #[arg(short = 'P', long = "poly")]
        poly: PathBuf,
        #[arg(short = 'S', long = "series")]
        series: PathBuf,
    },
    /// Dominant part and dominant degree.
    Ddeg {
        #[arg(short = 'P', long = "poly")]
        poly: PathBuf,
    },
    /// Dominant degree at and beyond an exponent.
    DdegGeq {
        #[arg(short = 'P', long = "poly")]
        poly: PathBuf,
        /// Comma-separated exponent, e.g. `1,-5`.
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
    },
    /// Coefficient valuation of the conjugate by a monomial.
    Vp {
        #[arg(short = 'P', long = "poly")]
        poly: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
    },
    /// Valuation in the quotient by the k-th convex subgroup.
    Coarsen {
        #[arg(long)]
        delta: usize,
        #[arg(short = 'S', long = "series")]
        series: PathBuf,
    },
    /// Image in the specialization (series or polynomial).
    Specialize {
        #[arg(long)]
        delta: usize,
        #[arg(short = 'S', long = "series")]
        series: Option<PathBuf>,
        #[arg(short = 'P', long = "poly")]
        poly: Option<PathBuf>,
    },
    /// Dominant degrees along a cut.
    CutDdeg {
        #[arg(short = 'P', long = "poly")]
        poly: PathBuf,
        #[arg(short = 'C', long = "cut")]
        cut: PathBuf,
    },
    /// Fluent/jammed classification of a cut.
    Classify {
        #[arg(long)]
        delta: usize,
        #[arg(short = 'C', long = "cut")]
        cut: PathBuf,
    },
    /// Refine a root of a polynomial in Hensel position.
    Dhsolve {
        #[arg(short = 'P', long = "poly")]
        poly: PathBuf,
        /// Comma-separated target exponent.
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        #[arg(long, default_value_t = 32)]
        max_steps: usize,
        #[arg(long, default_value_t = 8)]
        search_radius: i64,
    },
    /// Field-level checks of the configured derivation.
    Check {
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Built-in oracle-equivalence run.
    Selftest {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Dump the generated polynomial corpus to a file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

#[derive(Deserialize, Clone)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct ConfigFile {
    rank: usize,
    residue_field: String,
    derivation: DerivationDto,
    #[serde(default)]
    lin_solve_bound: Option<usize>,
}

/// A finished command: response JSON plus a one-line summary.
struct Outcome {
    json: String,
    summary: String,
    exit: u8,
}

struct Failure {
    code: String,
    message: String,
    exit: u8,
}

impl Failure {
    fn parse(message: impl Into<String>) -> Self {
        Failure {
            code: "cli/Parse".into(),
            message: message.into(),
            exit: 4,
        }
    }

    fn from_error(e: Error) -> Self {
        let exit = match e {
            Error::Parse(_) => 4,
            _ => 2,
        };
        Failure {
            code: e.code().into(),
            message: e.to_string(),
            exit,
        }
    }
}

#[derive(Serialize)]
struct ErrorBody {
    code: String,
    message: String,
}

#[derive(Serialize)]
struct ErrorResponse {
    error: ErrorBody,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            eprint!("{}", e);
            return ExitCode::from(4);
        }
    };
    let out_path = cli.out.clone();
    match execute(cli) {
        Ok(outcome) => {
            emit(&out_path, &outcome.json);
            eprintln!("{}", outcome.summary);
            ExitCode::from(outcome.exit)
        }
        Err(failure) => {
            let body = ErrorResponse {
                error: ErrorBody {
                    code: failure.code.clone(),
                    message: failure.message.clone(),
                },
            };
            emit(&out_path, &serde_json::to_string(&body).expect("serializable"));
            eprintln!("error[{}]: {}", failure.code, failure.message);
            ExitCode::from(failure.exit)
        }
    }
}

fn emit(out: &Option<PathBuf>, json: &str) {
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, format!("{}\n", json)) {
                eprintln!("cannot write {}: {}", path.display(), e);
            }
        }
        None => println!("{}", json),
    }
}

fn execute(cli: Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Selftest { seed, count, dump } => run_selftest(*seed, *count, dump.as_deref()),
        _ => {
            let config = load_config(cli.config.as_deref())?;
            match config.residue_field.as_str() {
                "rationals" => {
                    let f = Rationals;
                    run_with_field(&f, &config, &cli.command)
                }
                "ratfunc" => {
                    let f = RatFunc {
                        bound: config.lin_solve_bound.unwrap_or(16),
                    };
                    run_with_field(&f, &config, &cli.command)
                }
                other => Err(Failure::parse(format!(
                    "unknown residue field {:?}; expected \"rationals\" or \"ratfunc\"",
                    other
                ))),
            }
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile, Failure> {
    let path = path.ok_or_else(|| Failure::parse("this command requires --config"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::parse(format!("cannot read {}: {}", path.display(), e)))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::parse(format!("invalid config {}: {}", path.display(), e)))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::parse(format!("cannot read {}: {}", path.display(), e)))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::parse(format!("invalid JSON in {}: {}", path.display(), e)))
}

fn parse_exponent(text: &str, rank: usize) -> Result<GroupVector, Failure> {
    let coords: Result<Vec<i64>, _> = text.split(',').map(|p| p.trim().parse()).collect();
    let coords =
        coords.map_err(|e| Failure::parse(format!("invalid exponent {:?}: {}", text, e)))?;
    if coords.len() != rank {
        return Err(Failure::parse(format!(
            "exponent {:?} has rank {}, expected {}",
            text,
            coords.len(),
            rank
        )));
    }
    Ok(GroupVector::from_i64(&coords))
}

fn level(delta: usize, rank: usize) -> Result<CoarseContext, Failure> {
    let level = ConvexLevel::new(delta, rank).map_err(Failure::from_error)?;
    CoarseContext::new(level).map_err(Failure::from_error)
}

fn env_seed() -> u64 {
    std::env::var("VALDIFF_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(42)
}

// Response shapes; field order here is the emitted byte order.

#[derive(Serialize)]
struct EvalResponse {
    result: SeriesDto,
    pretty: String,
}

#[derive(Serialize)]
struct ConjResponse {
    poly: PolyDto,
}

#[derive(Serialize)]
struct DdegResponse {
    ddeg: usize,
    dominant: String,
    dmonomial: Vec<i64>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DdegGeqResponse {
    gamma: Vec<i64>,
    ddeg_geq: usize,
}

#[derive(Serialize)]
struct VpResponse {
    gamma: Vec<i64>,
    vp: Vec<i64>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CoarsenResponse {
    delta: usize,
    coarse_valuation: Vec<i64>,
}

#[derive(Serialize)]
struct SpecializeSeriesResponse {
    delta: usize,
    series: SeriesDto,
}

#[derive(Serialize)]
struct SpecializePolyResponse {
    delta: usize,
    poly: PolyDto,
}

#[derive(Serialize)]
struct CutDdegResponse {
    values: Vec<usize>,
    stabilized: bool,
    approx: usize,
}

#[derive(Serialize)]
struct ClassifyResponse {
    class: String,
}

#[derive(Serialize)]
#[serde(untagged)]
enum ResidualDto {
    Symbol(String),
    Valuation { valuation: Vec<i64> },
    BeyondFrontier {
        #[serde(rename = "beyondFrontier")]
        beyond_frontier: Vec<i64>,
    },
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct StepDto {
    gamma: Vec<i64>,
    c0: String,
    linear: Vec<String>,
    z: String,
    new_v0: ResidualDto,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DhsolveResponse {
    status: String,
    fail_reason: Option<String>,
    y: SeriesDto,
    y_pretty: String,
    residual: ResidualDto,
    steps: Vec<StepDto>,
}

#[derive(Serialize)]
struct FieldCheckDto {
    pass: bool,
    witness: Option<String>,
}

#[derive(Serialize)]
struct SampleCheckDto {
    pass: bool,
    checked: usize,
    witness: Option<Vec<String>>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ConstantsCheckDto {
    pass: bool,
    constants_seen: usize,
    witness: Option<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CheckResponse {
    small: FieldCheckDto,
    monotone: FieldCheckDto,
    asymptotic: SampleCheckDto,
    /// `null` when the asymptotic samples already failed.
    few_constants: Option<ConstantsCheckDto>,
}

#[derive(Serialize)]
struct SuiteDto {
    name: String,
    cases: usize,
    failures: usize,
}

#[derive(Serialize)]
struct SelftestResponse {
    seed: u64,
    count: usize,
    suites: Vec<SuiteDto>,
    pass: bool,
}

fn ok(json: impl Serialize, summary: String) -> Result<Outcome, Failure> {
    Ok(Outcome {
        json: serde_json::to_string(&json).expect("serializable response"),
        summary,
        exit: 0,
    })
}

fn run_with_field<F: ResidueField>(
    f: &F,
    config: &ConfigFile,
    command: &Command,
) -> Result<Outcome, Failure> {
    let rank = config.rank;
    let spec: DerivationSpec<F> =
        derivation_from_dto(f, rank, &config.derivation).map_err(Failure::from_error)?;
    let load_series = |path: &Path| -> Result<_, Failure> {
        let dto: SeriesDto = read_json(path)?;
        series_from_dto(f, rank, &dto).map_err(Failure::from_error)
    };
    let load_poly = |path: &Path| -> Result<_, Failure> {
        let dto: PolyDto = read_json(path)?;
        poly_from_dto(f, &spec, &dto).map_err(Failure::from_error)
    };
    let load_cut = |path: &Path| -> Result<_, Failure> {
        let dto: CutDto = read_json(path)?;
        cut_from_dto(f, rank, &dto).map_err(Failure::from_error)
    };

    match command {
        Command::Eval { poly, series } => {
            let p = load_poly(poly)?;
            let s = load_series(series)?;
            let value = p.eval(f, &s);
            let dto = series_to_dto(f, &value).map_err(Failure::from_error)?;
            let rendered = pretty::series(f, &value);
            ok(
                EvalResponse {
                    result: dto,
                    pretty: rendered.clone(),
                },
                format!("P(a) = {}", rendered),
            )
        }
        Command::Conj { kind, poly, series } => {
            let p = load_poly(poly)?;
            let s = load_series(series)?;
            let conj = match kind {
                ConjKind::Add => p.add_conj(f, &s),
                ConjKind::Mul => p.mul_conj(f, &s).map_err(Failure::from_error)?,
            };
            let dto = poly_to_dto(f, &conj).map_err(Failure::from_error)?;
            ok(
                ConjResponse { poly: dto },
                format!("conjugate has {} monomials", conj.monomials().len()),
            )
        }
        Command::Ddeg { poly } => {
            let p = load_poly(poly)?;
            let dominant = p.dominant(f).map_err(Failure::from_error)?;
            let dmono = group_vector_to_vec(
                &dominant.dmonomial.valuation().map_err(Failure::from_error)?,
            )
            .map_err(Failure::from_error)?;
            let rendered = pretty::residue_poly(f, &dominant.dpart);
            ok(
                DdegResponse {
                    ddeg: dominant.ddeg,
                    dominant: rendered.clone(),
                    dmonomial: dmono,
                },
                format!("ddeg = {} with dominant part {}", dominant.ddeg, rendered),
            )
        }
        Command::DdegGeq { poly, gamma } => {
            let p = load_poly(poly)?;
            let g = parse_exponent(gamma, rank)?;
            let d = p.ddeg_geq(f, &g).map_err(Failure::from_error)?;
            ok(
                DdegGeqResponse {
                    gamma: group_vector_to_vec(&g).map_err(Failure::from_error)?,
                    ddeg_geq: d,
                },
                format!("ddeg at and beyond {} = {}", pretty::exponent(&g), d),
            )
        }
        Command::Vp { poly, gamma } => {
            let p = load_poly(poly)?;
            let g = parse_exponent(gamma, rank)?;
            let v = p.v_p_gamma(f, &g).map_err(Failure::from_error)?;
            ok(
                VpResponse {
                    gamma: group_vector_to_vec(&g).map_err(Failure::from_error)?,
                    vp: group_vector_to_vec(&v).map_err(Failure::from_error)?,
                },
                format!("v(P at {}) = {}", pretty::exponent(&g), pretty::exponent(&v)),
            )
        }
        Command::Coarsen { delta, series } => {
            let ctx = level(*delta, rank)?;
            let s = load_series(series)?;
            let v = ctx.coarse_valuation(&s).map_err(Failure::from_error)?;
            ok(
                CoarsenResponse {
                    delta: *delta,
                    coarse_valuation: group_vector_to_vec(&v).map_err(Failure::from_error)?,
                },
                format!("coarse valuation = {}", pretty::exponent(&v)),
            )
        }
        Command::Specialize { delta, series, poly } => {
            let ctx = level(*delta, rank)?;
            match (series, poly) {
                (Some(path), None) => {
                    let s = load_series(path)?;
                    let image = ctx.specialize_series(f, &s).map_err(Failure::from_error)?;
                    let dto = series_to_dto(f, &image).map_err(Failure::from_error)?;
                    ok(
                        SpecializeSeriesResponse {
                            delta: *delta,
                            series: dto,
                        },
                        format!("specialized series: {}", pretty::series(f, &image)),
                    )
                }
                (None, Some(path)) => {
                    let p = load_poly(path)?;
                    let image = ctx.specialize_poly(f, &p).map_err(Failure::from_error)?;
                    let dto = poly_to_dto(f, &image).map_err(Failure::from_error)?;
                    ok(
                        SpecializePolyResponse {
                            delta: *delta,
                            poly: dto,
                        },
                        format!("specialized polynomial: {}", pretty::diff_poly(f, &image)),
                    )
                }
                _ => Err(Failure::parse(
                    "specialize needs exactly one of --series or --poly",
                )),
            }
        }
        Command::CutDdeg { poly, cut } => {
            let p = load_poly(poly)?;
            let c = load_cut(cut)?;
            let window = ddeg_along_cut(f, &p, &c).map_err(Failure::from_error)?;
            let approx = window.approx();
            ok(
                CutDdegResponse {
                    values: window.values.clone(),
                    stabilized: window.stabilized,
                    approx,
                },
                format!(
                    "window {:?} ({})",
                    window.values,
                    if window.stabilized {
                        "stabilized"
                    } else {
                        "not stabilized"
                    }
                ),
            )
        }
        Command::Classify { delta, cut } => {
            let ctx = level(*delta, rank)?;
            let c = load_cut(cut)?;
            let class = match classify_delta(&c, &ctx) {
                DeltaClass::Fluent => "Fluent",
                DeltaClass::Jammed => "Jammed",
                DeltaClass::Mixed => "Mixed",
            };
            ok(
                ClassifyResponse {
                    class: class.into(),
                },
                format!("cut is {}", class),
            )
        }
        Command::Dhsolve {
            poly,
            target,
            max_steps,
            search_radius,
        } => {
            let p = load_poly(poly)?;
            let target = parse_exponent(target, rank)?;
            let opts = SolveOptions {
                target,
                max_steps: *max_steps,
                search_radius: *search_radius,
            };
            let report = dh_solve(f, &p, &opts).map_err(Failure::from_error)?;
            let exit = if report.status == SolveStatus::Solved { 0 } else { 3 };
            let summary = format!(
                "{}: y = {}",
                match &report.status {
                    SolveStatus::Solved => "solved".to_string(),
                    SolveStatus::FrontierExhausted => "frontier exhausted".to_string(),
                    SolveStatus::Failed(r) => format!("failed ({:?})", r),
                },
                pretty::series(f, &report.y)
            );
            let json = dhsolve_response(f, &report)?;
            Ok(Outcome {
                json: serde_json::to_string(&json).expect("serializable response"),
                summary,
                exit,
            })
        }
        Command::Check { samples, seed } => {
            let seed = seed.unwrap_or_else(env_seed);
            let opts = SampleOptions {
                samples: *samples,
                seed,
            };
            let small = spec.small_check(f);
            let monotone = spec.monotone_check(f);
            let witness_report = asymptotic_witness(f, &spec, opts);
            let response = CheckResponse {
                small: FieldCheckDto {
                    pass: small.pass,
                    witness: small.witness_exponent.as_ref().map(pretty::exponent),
                },
                monotone: FieldCheckDto {
                    pass: monotone.pass,
                    witness: monotone.witness_exponent.as_ref().map(pretty::exponent),
                },
                asymptotic: SampleCheckDto {
                    pass: witness_report.asymptotic.pass,
                    checked: witness_report.asymptotic.checked,
                    witness: witness_report
                        .asymptotic
                        .witness
                        .as_ref()
                        .map(|(a, b)| vec![pretty::series(f, a), pretty::series(f, b)]),
                },
                few_constants: witness_report.few_constants.as_ref().map(|c| {
                    ConstantsCheckDto {
                        pass: c.pass,
                        constants_seen: c.constants_seen,
                        witness: c.witness.as_ref().map(|w| pretty::series(f, w)),
                    }
                }),
            };
            let summary = format!(
                "small: {}, monotone: {}, asymptotic sample: {}, constants sample: {}",
                small.pass,
                monotone.pass,
                witness_report.asymptotic.pass,
                witness_report.few_constants.as_ref().map(|c| c.pass).unwrap_or(false)
            );
            ok(response, summary)
        }
        Command::Selftest { .. } => unreachable!("handled before field dispatch"),
    }
}

fn dhsolve_response<F: ResidueField>(
    f: &F,
    report: &SolverReport<F>,
) -> Result<DhsolveResponse, Failure> {
    let (status, fail_reason) = match &report.status {
        SolveStatus::Solved => ("Solved".to_string(), None),
        SolveStatus::FrontierExhausted => ("FrontierExhausted".to_string(), None),
        SolveStatus::Failed(r) => ("Failed".to_string(), Some(format!("{:?}", r))),
    };
    let residual_dto = |r: &Residual| -> Result<ResidualDto, Failure> {
        Ok(match r {
            Residual::ExactZero => ResidualDto::Symbol("zero".into()),
            Residual::Valuation(v) => ResidualDto::Valuation {
                valuation: group_vector_to_vec(v).map_err(Failure::from_error)?,
            },
            Residual::BeyondFrontier(v) => ResidualDto::BeyondFrontier {
                beyond_frontier: group_vector_to_vec(v).map_err(Failure::from_error)?,
            },
        })
    };
    let residual = residual_dto(&report.residual)?;
    let steps = report
        .steps
        .iter()
        .map(|s| {
            Ok(StepDto {
                gamma: group_vector_to_vec(&s.gamma).map_err(Failure::from_error)?,
                c0: f.render_elem(&s.c0),
                linear: s.linear.iter().map(|c| f.render_elem(c)).collect(),
                z: f.render_elem(&s.z),
                new_v0: residual_dto(&s.new_v0)?,
            })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(DhsolveResponse {
        status,
        fail_reason,
        y: series_to_dto(f, &report.y).map_err(Failure::from_error)?,
        y_pretty: pretty::series(f, &report.y),
        residual,
        steps,
    })
}

fn run_selftest(seed: Option<u64>, count: usize, dump: Option<&Path>) -> Result<Outcome, Failure> {
    let seed = seed.unwrap_or_else(env_seed);
    let report = selftest(seed, count);
    if let Some(path) = dump {
        let mut corpora = serde_json::Map::new();
        for (name, (f, spec)) in [("rank1", standard_rank1()), ("rank2", standard_rank2())] {
            let mut gen = InstanceGen::new(
                &f,
                spec,
                GenConfig {
                    seed,
                    ..GenConfig::default()
                },
            );
            let polys: Vec<PolyDto> = (0..count)
                .map(|_| poly_to_dto(&f, &gen.poly()).map_err(Failure::from_error))
                .collect::<Result<_, _>>()?;
            corpora.insert(
                name.to_string(),
                serde_json::to_value(polys).expect("serializable corpus"),
            );
        }
        let text = serde_json::to_string(&serde_json::Value::Object(corpora))
            .expect("serializable corpus");
        std::fs::write(path, format!("{}\n", text))
            .map_err(|e| Failure::parse(format!("cannot write {}: {}", path.display(), e)))?;
    }
    let response = SelftestResponse {
        seed: report.seed,
        count: report.count,
        suites: report
            .suites
            .iter()
            .map(|s| SuiteDto {
                name: s.name.clone(),
                cases: s.cases,
                failures: s.failures,
            })
            .collect(),
        pass: report.pass,
    };
    let summary = format!(
        "selftest {}: {} suites",
        if report.pass { "passed" } else { "FAILED" },
        response.suites.len()
    );
    let exit = if report.pass { 0 } else { 3 };
    Ok(Outcome {
        json: serde_json::to_string(&response).expect("serializable response"),
        summary,
        exit,
    })
}
