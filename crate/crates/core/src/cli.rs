//! Command-line front end.
//!
//! [`run`] parses arguments, dispatches to the library and renders the report;
//! it never touches the process streams, so it is directly testable.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::audit::{
    audit_behavior, causality_audit, no_signalling_check, AuditVerdict, NoSignallingReport,
    VerdictKind,
};
use crate::bell::{
    chsh_from_correlations, chsh_quantum, horodecki_oracle, tsirelson_optimize,
    verify_derivation_chain, ChshReport, ChshSetting, DerivationChain,
};
use crate::linalg::{bloch_operator, UnitVec3, Vec3};
use crate::observables::{
    build_joint_povm, coexistence_check, max_equal_lambda, DichotomicObservable, Outcome,
    SharpSpin, UnsharpSpin,
};
use crate::states::{
    behavior_from_state, correlation, joint_behavior_from_state, sample_outcomes, BehaviorTable,
    JointBehavior, TwoQubitState,
};

/// Significant digits of every floating-point number in a report.
pub const SIGNIFICANT_DIGITS: usize = 12;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_SIGNALLING: i32 = 2;

const EXIT_HELP: &str = "\
Exit status:
  0  success
  1  invalid arguments or input document (diagnostic on stderr)
  2  audit verdict ImpliesSignalling

Directions are comma-separated Bloch vectors (x,y,z) and are normalized.
The CHSH combination is |E(A,B)+E(A',B)| + |E(A,B')-E(A',B')|; relabeling
observables permutes which term carries the minus sign.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "jointbell",
    version,
    about = "Unsharp spin observables, joint measurability and CHSH audits for two qubits",
    after_help = EXIT_HELP
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, global = true)]
    pub output: OutputFormat,
    /// Seed for optimize and simulate (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Input document; `-` reads standard input.
    #[arg(long, global = true, value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check whether two unsharp spins can be measured jointly.
    Coexist(PairArgs),
    /// Build the four-outcome joint observable of two unsharp spins.
    JointPovm(PairArgs),
    /// CHSH value of a state (Alice unsharp, Bob sharp) or of a behavior table given with --input.
    Chsh(ChshArgs),
    /// Maximize the sharp CHSH value of a state over all directions.
    Optimize(StateArgs),
    /// Run the joint-measurement Bell derivation on a state or on a joint table given with --input.
    Chain(ChainArgs),
    /// Causality verdict for four correlations or a behavior table given with --input.
    Audit(AuditArgs),
    /// Sample outcome pairs of one pair of spin measurements.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub lambda1: f64,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub dir1: Vec3,
    #[arg(long)]
    pub lambda2: f64,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub dir2: Vec3,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    /// singlet, mixed, product (|00>) or werner:P.
    #[arg(long, default_value = "singlet")]
    pub state: StateChoice,
}

#[derive(Debug, Args)]
pub struct ChshArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Sharpness of Alice's observables.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub a: Option<Vec3>,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub a_prime: Option<Vec3>,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub b: Option<Vec3>,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub b_prime: Option<Vec3>,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Common sharpness of Alice's pair; defaults to the largest jointly measurable value.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub dir1: Option<Vec3>,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub dir2: Option<Vec3>,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub b: Option<Vec3>,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub b_prime: Option<Vec3>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    /// E(A,B),E(A',B),E(A,B'),E(A',B').
    #[arg(long, value_parser = parse_correlations, allow_hyphen_values = true)]
    pub correlations: Option<[f64; 4]>,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub dir1: Vec3,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub dir2: Vec3,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true, default_value = "0,0,1")]
    pub a: Vec3,
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true, default_value = "0,0,1")]
    pub b: Vec3,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_b: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub shots: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateChoice {
    Singlet,
    Mixed,
    Product,
    Werner(f64),
}

impl FromStr for StateChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "singlet" => Ok(Self::Singlet),
            "mixed" => Ok(Self::Mixed),
            "product" => Ok(Self::Product),
            _ => match s.strip_prefix("werner:") {
                Some(p) => p
                    .parse()
                    .map(Self::Werner)
                    .map_err(|_| format!("invalid Werner weight `{p}`")),
                None => Err(format!(
                    "unknown state `{s}` (singlet, mixed, product, werner:P)"
                )),
            },
        }
    }
}

impl StateChoice {
    pub fn build(self) -> crate::Result<TwoQubitState> {
        match self {
            Self::Singlet => Ok(TwoQubitState::singlet()),
            Self::Mixed => Ok(TwoQubitState::maximally_mixed()),
            Self::Product => {
                let up = 0.5
                    * (crate::linalg::HermitianOperator::identity()
                        + bloch_operator(UnitVec3::Z.vec()));
                TwoQubitState::product(&up, &up)
            }
            Self::Werner(p) => TwoQubitState::werner(p),
        }
    }
}

fn parse_floats<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers, got `{s}`"));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| format!("invalid number `{p}`"))?;
    }
    Ok(out)
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    parse_floats::<3>(s).map(Vec3::from)
}

fn parse_correlations(s: &str) -> Result<[f64; 4], String> {
    parse_floats::<4>(s)
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Domain(#[from] crate::Error),
    #[error("malformed input document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read input: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

/// Behavior table in its exchange format.
///
/// `p["x,y"][a][b]` with outcome index 0 meaning `+1` and 1 meaning `−1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehaviorDocument {
    pub settings: SettingCounts,
    pub outcomes: Vec<i32>,
    pub p: BTreeMap<String, [[f64; 2]; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SettingCounts {
    pub x: usize,
    pub y: usize,
}

fn slice_key(x: usize, y: usize) -> String {
    format!("{x},{y}")
}

impl From<&BehaviorTable> for BehaviorDocument {
    fn from(t: &BehaviorTable) -> Self {
        let mut p = BTreeMap::new();
        for x in 0..2 {
            for y in 0..2 {
                p.insert(slice_key(x, y), t.entries()[x][y]);
            }
        }
        Self {
            settings: SettingCounts { x: 2, y: 2 },
            outcomes: vec![1, -1],
            p,
        }
    }
}

impl TryFrom<&BehaviorDocument> for BehaviorTable {
    type Error = CliError;

    fn try_from(doc: &BehaviorDocument) -> Result<Self, CliError> {
        if doc.settings != (SettingCounts { x: 2, y: 2 }) {
            return Err(CliError::Usage(
                "only two settings per party are supported".into(),
            ));
        }
        if doc.outcomes != [1, -1] {
            return Err(CliError::Usage("outcomes must be listed as [1, -1]".into()));
        }
        if doc.p.len() != 4 {
            return Err(CliError::Usage(format!(
                "expected 4 setting pairs, found {}",
                doc.p.len()
            )));
        }
        let mut p = [[[[0.0; 2]; 2]; 2]; 2];
        for (x, row) in p.iter_mut().enumerate() {
            for (y, slice) in row.iter_mut().enumerate() {
                *slice = *doc
                    .p
                    .get(&slice_key(x, y))
                    .ok_or_else(|| CliError::Usage(format!("missing setting pair \"{x},{y}\"")))?;
            }
        }
        Ok(BehaviorTable::new(p)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoexistReport {
    pub coexistent: bool,
    pub lhs: f64,
    /// Largest common sharpness at which the two directions coexist.
    pub max_equal_lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectReport {
    pub j: i32,
    pub k: i32,
    /// `G = identity_weight·I + bloch·σ`.
    pub identity_weight: f64,
    pub bloch: Vec3,
    pub eigenvalues: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointPovmReport {
    pub gamma: f64,
    pub gamma_range: [f64; 2],
    pub effects: Vec<EffectReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshCommandReport {
    #[serde(flatten)]
    pub chsh: ChshReport,
    pub lambda: Option<f64>,
    pub setting: Option<ChshSetting>,
    pub lhv_bound: f64,
    pub tsirelson_bound: f64,
    pub behavior: BehaviorDocument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub value: f64,
    pub horodecki_bound: f64,
    pub seed: u64,
    pub setting: ChshSetting,
    pub correlations: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub passed: bool,
    pub lambda: Option<f64>,
    #[serde(flatten)]
    pub chain: DerivationChain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    #[serde(flatten)]
    pub verdict: AuditVerdict,
    pub no_signalling: Option<NoSignallingReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub shots: u64,
    pub seed: u64,
    /// Indexed `[a][b]`, index 0 meaning `+1`.
    pub counts: Vec<Vec<u64>>,
    pub correlation: f64,
    pub exact_correlation: f64,
}

/// Result of one invocation: exit status and the text destined for each stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Rendered {
    value: Value,
    table: Option<BehaviorTable>,
    status: i32,
}

impl Rendered {
    fn new<T: Serialize>(report: &T) -> Result<Self, CliError> {
        Ok(Self {
            value: serde_json::to_value(report)?,
            table: None,
            status: EXIT_OK,
        })
    }
}

/// Parses `args` (program name first) and executes the command.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => RunOutput {
                    status: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => RunOutput {
                    status: EXIT_INVALID,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    execute(&cli, stdin)
}

/// Executes an already parsed command line.
pub fn execute(cli: &Cli, stdin: &mut dyn Read) -> RunOutput {
    match dispatch(cli, stdin) {
        Ok(rendered) => RunOutput {
            status: rendered.status,
            stdout: render(&rendered, cli.output),
            stderr: String::new(),
        },
        Err(e) => RunOutput {
            status: EXIT_INVALID,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn read_input(cli: &Cli, stdin: &mut dyn Read) -> Result<Option<String>, CliError> {
    match &cli.input {
        None => Ok(None),
        Some(path) if path.as_os_str() == "-" => {
            let mut s = String::new();
            stdin.read_to_string(&mut s)?;
            Ok(Some(s))
        }
        Some(path) => Ok(Some(std::fs::read_to_string(path)?)),
    }
}

fn unit(v: Vec3) -> Result<UnitVec3, CliError> {
    Ok(UnitVec3::normalize(v)?)
}

fn unit_or(v: Option<Vec3>, default: UnitVec3) -> Result<UnitVec3, CliError> {
    v.map_or(Ok(default), unit)
}

fn dispatch(cli: &Cli, stdin: &mut dyn Read) -> Result<Rendered, CliError> {
    let input = read_input(cli, stdin)?;
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Coexist(args) => {
            let (first, second) = pair(args)?;
            let c = coexistence_check(&first, &second);
            Rendered::new(&CoexistReport {
                coexistent: c.coexistent,
                lhs: c.lhs,
                max_equal_lambda: max_equal_lambda(&first.direction(), &second.direction()),
            })
        }
        Command::JointPovm(args) => {
            let (first, second) = pair(args)?;
            let joint = build_joint_povm(&first, &second)?;
            let (lo, hi) = joint.gamma_range();
            let mut effects = Vec::with_capacity(4);
            for j in Outcome::BOTH {
                for k in Outcome::BOTH {
                    let g = joint.effect(j, k);
                    let m = g.operator();
                    effects.push(EffectReport {
                        j: j.value(),
                        k: k.value(),
                        identity_weight: g.trace() / 2.0,
                        bloch: Vec3::new(
                            m[(0, 1)].re,
                            -m[(0, 1)].im,
                            (m[(0, 0)].re - m[(1, 1)].re) / 2.0,
                        ),
                        eigenvalues: g.eigvals()?,
                    });
                }
            }
            Rendered::new(&JointPovmReport {
                gamma: joint.gamma(),
                gamma_range: [lo, hi],
                effects,
            })
        }
        Command::Chsh(args) => {
            let (table, report, lambda, setting) = match input {
                Some(text) => {
                    let doc: BehaviorDocument = serde_json::from_str(&text)?;
                    let table = BehaviorTable::try_from(&doc)?;
                    let [a, b, c, d] = table.correlations();
                    (table, chsh_from_correlations(a, b, c, d)?, None, None)
                }
                None => {
                    let d = ChshSetting::singlet_optimal();
                    let setting = ChshSetting {
                        a: unit_or(args.a, d.a)?,
                        a_prime: unit_or(args.a_prime, d.a_prime)?,
                        b: unit_or(args.b, d.b)?,
                        b_prime: unit_or(args.b_prime, d.b_prime)?,
                    };
                    let state = args.state.state.build()?;
                    let report = chsh_quantum(&state, &setting, args.lambda)?;
                    let alice = [
                        UnsharpSpin::new(args.lambda, setting.a)?.to_povm(),
                        UnsharpSpin::new(args.lambda, setting.a_prime)?.to_povm(),
                    ];
                    let bob = [
                        SharpSpin::new(setting.b).to_povm(),
                        SharpSpin::new(setting.b_prime).to_povm(),
                    ];
                    let table =
                        behavior_from_state(&state, [&alice[0], &alice[1]], [&bob[0], &bob[1]])?;
                    (table, report, Some(args.lambda), Some(setting))
                }
            };
            let mut rendered = Rendered::new(&ChshCommandReport {
                chsh: report,
                lambda,
                setting,
                lhv_bound: 2.0,
                tsirelson_bound: 2.0 * std::f64::consts::SQRT_2,
                behavior: BehaviorDocument::from(&table),
            })?;
            rendered.table = Some(table);
            Ok(rendered)
        }
        Command::Optimize(args) => {
            let state = args.state.build()?;
            let best = tsirelson_optimize(&state, seed)?;
            Rendered::new(&OptimizeReport {
                value: best.report.value,
                horodecki_bound: horodecki_oracle(&state),
                seed,
                setting: best.setting,
                correlations: best.report.correlations(),
            })
        }
        Command::Chain(args) => {
            let (jb, lambda) = match input {
                Some(text) => (serde_json::from_str::<JointBehavior>(&text)?, None),
                None => {
                    let d = ChshSetting::singlet_optimal();
                    let a1 = unit_or(args.dir1, d.a)?;
                    let a2 = unit_or(args.dir2, d.a_prime)?;
                    let lambda = args.lambda.unwrap_or_else(|| max_equal_lambda(&a1, &a2));
                    let joint = build_joint_povm(
                        &UnsharpSpin::new(lambda, a1)?,
                        &UnsharpSpin::new(lambda, a2)?,
                    )?;
                    let bob = [
                        SharpSpin::new(unit_or(args.b, d.b)?),
                        SharpSpin::new(unit_or(args.b_prime, d.b_prime)?),
                    ];
                    let state = args.state.state.build()?;
                    (joint_behavior_from_state(&state, &joint, bob), Some(lambda))
                }
            };
            let chain = verify_derivation_chain(&jb);
            Rendered::new(&ChainReport {
                passed: chain.passed(),
                lambda,
                chain,
            })
        }
        Command::Audit(args) => {
            let a1 = unit(args.dir1)?;
            let a2 = unit(args.dir2)?;
            let (verdict, no_signalling) = match (input, args.correlations) {
                (Some(_), Some(_)) => {
                    return Err(CliError::Usage(
                        "give either --correlations or --input, not both".into(),
                    ))
                }
                (None, None) => {
                    return Err(CliError::Usage(
                        "audit needs --correlations or --input".into(),
                    ))
                }
                (None, Some(e)) => (causality_audit(e, args.lambda, &a1, &a2)?, None),
                (Some(text), None) => {
                    let doc: BehaviorDocument = serde_json::from_str(&text)?;
                    let table = BehaviorTable::try_from(&doc)?;
                    (
                        audit_behavior(&table, args.lambda, &a1, &a2)?,
                        Some(no_signalling_check(&table)),
                    )
                }
            };
            let status = if verdict.kind == VerdictKind::ImpliesSignalling {
                EXIT_SIGNALLING
            } else {
                EXIT_OK
            };
            let mut rendered = Rendered::new(&AuditReport {
                verdict,
                no_signalling,
            })?;
            rendered.status = status;
            Ok(rendered)
        }
        Command::Simulate(args) => {
            if args.shots == 0 {
                return Err(CliError::Usage("--shots must be positive".into()));
            }
            let state = args.state.state.build()?;
            let alice = UnsharpSpin::new(args.lambda_a, unit(args.a)?)?;
            let bob = UnsharpSpin::new(args.lambda_b, unit(args.b)?)?;
            let counts =
                sample_outcomes(&state, &alice.to_povm(), &bob.to_povm(), args.shots, seed);
            Rendered::new(&SimulateReport {
                shots: args.shots,
                seed,
                correlation: counts.correlation().expect("dichotomic counts"),
                counts: counts.counts,
                exact_correlation: correlation(&state, &alice, &bob),
            })
        }
    }
}

fn pair(args: &PairArgs) -> Result<(UnsharpSpin, UnsharpSpin), CliError> {
    Ok((
        UnsharpSpin::new(args.lambda1, unit(args.dir1)?)?,
        UnsharpSpin::new(args.lambda2, unit(args.dir2)?)?,
    ))
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits; `-0` becomes `0`.
pub fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x + 0.0;
    }
    let s = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    s.parse::<f64>().expect("formatted float parses") + 0.0
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_significant(n.as_f64().expect("f64 number"));
            if let Some(r) = serde_json::Number::from_f64(x) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, item, out);
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), item, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render(r: &Rendered, format: OutputFormat) -> String {
    let mut value = r.value.clone();
    round_value(&mut value);
    let mut out = String::new();
    match format {
        OutputFormat::Json => {
            out = serde_json::to_string_pretty(&value).expect("report serializes");
            out.push('\n');
        }
        OutputFormat::Text => {
            let mut rows = Vec::new();
            flatten("", &value, &mut rows);
            for (k, v) in rows {
                let _ = writeln!(out, "{k}: {v}");
            }
        }
        OutputFormat::Csv => match &r.table {
            Some(table) => {
                out.push_str("x,y,a,b,probability\n");
                for x in 0..2 {
                    for y in 0..2 {
                        for a in Outcome::BOTH {
                            for b in Outcome::BOTH {
                                let p =
                                    Value::from(round_significant(table.probability(x, y, a, b)));
                                let _ = writeln!(out, "{x},{y},{},{},{p}", a.value(), b.value());
                            }
                        }
                    }
                }
            }
            None => {
                out.push_str("field,value\n");
                let mut rows = Vec::new();
                flatten("", &value, &mut rows);
                for (k, v) in rows {
                    let _ = writeln!(out, "{},{}", csv_field(&k), csv_field(&v));
                }
            }
        },
    }
    out
}
