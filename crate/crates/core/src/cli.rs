//! Command-line front end.
//!
//! [`dispatch`] parses an argument list, runs one operation and renders a
//! single JSON object `{op, inputs, result, provenance}` (or plain text).
//! Reals are printed with 17 significant digits; rationals and big integers
//! as exact strings. Exit status is 0 on success, 2 on a usage error and 3 on
//! a domain error; on failure nothing is written to standard output.

use std::str::FromStr;

use clap::{ArgAction, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Number, Value};

use crate::binomlimit::{self, TrialSpec};
use crate::conics::{self, Ellipse};
use crate::error::{Error, Result};
use crate::exactnum::{self, ExactInt, ExactRational, Odds};
use crate::games::{self, Square, TourVerdict};
use crate::lifeannuity::{self, DeMoivreLaw, LifeTable, MatyTail, Mortality, RateSpec};
use crate::recurrence::{self, DurationSpec, Recurrence};
use crate::series::{self, PowerSeries};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "doctrine", version, about = "Classical probability and actuarial numerics")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    group: Group,
}

#[derive(Debug, Subcommand)]
enum Group {
    /// Binomial bands, limits, sample sizes and exact combinatorics.
    #[command(subcommand)]
    Binom(Binom),
    /// Probability that play lasts beyond n games.
    #[command(subcommand)]
    Duration(Duration),
    /// Recurrent series.
    #[command(subcommand)]
    Recur(Recur),
    /// Factorization of x^n ± 1 and the multiple-angle identity.
    #[command(subcommand)]
    Factor(Factor),
    /// Power series algebra.
    #[command(subcommand)]
    Series(SeriesCmd),
    /// Life tables and annuities.
    #[command(subcommand)]
    Annuity(Annuity),
    /// Ellipse focal properties and force law.
    #[command(subcommand)]
    Conic(Conic),
    /// Deck odds and knight's tours.
    #[command(subcommand)]
    Games(GamesCmd),
}

#[derive(Debug, Subcommand)]
enum Binom {
    /// Exact P(|X - np| ≤ c·√n/2).
    Exact {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "1/2")]
        p: String,
        #[arg(long)]
        c: f64,
    },
    /// Limiting band probability as n → ∞.
    Limit {
        #[arg(long)]
        c: f64,
    },
    /// Point approximation 2/√(2πn)·exp(-2l²/n).
    Term {
        #[arg(long)]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        l: i64,
    },
    /// The exact fraction 1/(2√n) for perfect-square n.
    Remark1 {
        #[arg(long)]
        n: u64,
    },
    /// Smallest n with P(|X/n - p| ≤ c) ≥ 1 - alpha.
    SampleSize {
        #[arg(long)]
        p: String,
        #[arg(long)]
        c: String,
        #[arg(long)]
        alpha: String,
    },
    /// Seeded simulation of the central band.
    Simulate {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "1/2")]
        p: String,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        reps: u64,
        #[arg(long)]
        seed: u64,
        /// Worker threads; the result does not depend on it.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Odds equivalent to a probability.
    Odds {
        #[arg(long)]
        p: String,
    },
    /// Probability equivalent to odds FOR:AGAINST.
    Probability {
        #[arg(long)]
        odds: String,
    },
    /// n! exactly.
    Factorial {
        #[arg(long)]
        n: u64,
    },
    /// C(n, k) exactly.
    Coefficient {
        #[arg(long)]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
    },
}

#[derive(Debug, Args)]
struct DurationArgs {
    /// Stakes per player.
    #[arg(long)]
    b: u32,
    #[arg(long)]
    p: f64,
    /// Number of games.
    #[arg(long)]
    n: u64,
}

#[derive(Debug, Subcommand)]
enum Duration {
    /// Markov-chain computation.
    Exact(DurationArgs),
    /// Trigonometric closed form (even b).
    Closed(DurationArgs),
}

#[derive(Debug, Args)]
struct RecurArgs {
    /// b_1,...,b_k
    #[arg(long, allow_hyphen_values = true)]
    coeffs: String,
    /// a_0,...,a_(k-1)
    #[arg(long, allow_hyphen_values = true)]
    init: String,
}

#[derive(Debug, Subcommand)]
enum Recur {
    /// Geometric decomposition.
    Solve(RecurArgs),
    /// a_n from the closed form.
    Eval {
        #[command(flatten)]
        rec: RecurArgs,
        #[arg(long)]
        n: u64,
    },
    /// a_0 + ... + a_n.
    Sum {
        #[command(flatten)]
        rec: RecurArgs,
        #[arg(long)]
        n: u64,
    },
}

#[derive(Debug, Subcommand)]
enum Factor {
    /// Real factors of x^n + 1 (sign 1) or x^n - 1 (sign -1).
    Unity {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        sign: i8,
    },
    /// (cos θ + i sin θ)^n two ways.
    DemoivrePower {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
}

#[derive(Debug, Subcommand)]
enum SeriesCmd {
    /// s^power by the multinomial rule.
    Raise {
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long)]
        power: usize,
        #[arg(long)]
        order: usize,
    },
    /// Compositional inverse.
    Revert {
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(long)]
        order: usize,
    },
    /// f(g(x)).
    Compose {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long)]
        order: usize,
    },
    /// Degree multisets and arrangement counts.
    Multinomial {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        power: usize,
    },
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Life table CSV with header `age,lx`.
    #[arg(long)]
    table: Option<String>,
    /// Built-in reconstruction of the Breslau table.
    #[arg(long, action = ArgAction::SetTrue)]
    maty: bool,
    /// Extend the built-in table linearly to age 100.
    #[arg(long, action = ArgAction::SetTrue)]
    maty_tail: bool,
    /// Linear law with this limiting age.
    #[arg(long)]
    law: Option<u32>,
}

#[derive(Debug, Args)]
struct SecondModelArgs {
    #[arg(long)]
    table_b: Option<String>,
    #[arg(long, action = ArgAction::SetTrue)]
    maty_b: bool,
    #[arg(long, action = ArgAction::SetTrue)]
    maty_tail_b: bool,
    #[arg(long)]
    law_b: Option<u32>,
}

#[derive(Debug, Subcommand)]
enum Annuity {
    /// Single-life curtate annuity.
    Value {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        age: u32,
        #[arg(long, allow_hyphen_values = true)]
        rate: f64,
    },
    /// t-year survival probability.
    Survival {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        age: u32,
        #[arg(long)]
        years: u32,
    },
    /// Joint-life annuity on two independent lives.
    Joint {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        age: u32,
        #[command(flatten)]
        second: SecondModelArgs,
        #[arg(long)]
        age_b: u32,
        #[arg(long, allow_hyphen_values = true)]
        rate: f64,
    },
    /// Percentage error of the linear law against a table.
    ErrorTable {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        ages: String,
        #[arg(long)]
        rates: String,
        /// Limiting age of the law being compared.
        #[arg(long, default_value_t = lifeannuity::MATY_OMEGA)]
        omega: u32,
    },
    /// Print the selected life table.
    Table {
        #[command(flatten)]
        model: ModelArgs,
    },
}

#[derive(Debug, Args)]
struct EllipseArgs {
    #[arg(long)]
    a: f64,
    #[arg(long)]
    b: f64,
}

#[derive(Debug, Subcommand)]
enum Conic {
    /// Focal radii product against the squared parallel half-diameter.
    FocalProduct {
        #[command(flatten)]
        ellipse: EllipseArgs,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
    },
    /// Radius of curvature.
    Curvature {
        #[command(flatten)]
        ellipse: EllipseArgs,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
    },
    /// Force FM/(R·FP³) toward the focus.
    Force {
        #[command(flatten)]
        ellipse: EllipseArgs,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
    },
    /// Constancy of force·FM² over the orbit.
    InverseSquare {
        #[command(flatten)]
        ellipse: EllipseArgs,
        #[arg(long, default_value_t = 720)]
        samples: usize,
    },
}

#[derive(Debug, Subcommand)]
enum GamesCmd {
    /// Odds against two decks matching by chance.
    DeckOdds {
        #[arg(long)]
        size: u64,
    },
    /// An open knight's tour.
    Tour {
        #[arg(long, default_value = "a1")]
        start: String,
    },
    /// Check a comma-separated tour.
    Validate {
        #[arg(long)]
        tour: Option<String>,
        #[arg(long)]
        file: Option<String>,
    },
}

/// The full clap command tree, for help generation and coverage checks.
pub fn command() -> clap::Command {
    Cli::command()
}

/// Every `group action` path, in declaration order.
pub fn subcommand_paths() -> Vec<String> {
    let root = Cli::command();
    root.get_subcommands()
        .flat_map(|g| g.get_subcommands().map(move |a| format!("{} {}", g.get_name(), a.get_name())))
        .collect()
}

/// Runs one command line (including the program name).
pub fn dispatch<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let command = Cli::command();
    let matches = match command.try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { status: EXIT_OK, stdout: rendered, stderr: String::new() }
                }
                _ => Outcome { status: EXIT_USAGE, stdout: String::new(), stderr: rendered },
            };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => return Outcome { status: EXIT_USAGE, stdout: String::new(), stderr: e.render().to_string() },
    };
    let (op, inputs) = echo_inputs(&matches);
    match run(&cli.group) {
        Ok((result, provenance)) => {
            let record = json!({
                "op": op,
                "inputs": Value::Object(inputs),
                "result": result,
                "provenance": provenance,
            });
            let stdout = match cli.format {
                Format::Json => format!("{}\n", serde_json::to_string(&record).expect("JSON values serialize")),
                Format::Text => render_text(&record),
            };
            Outcome { status: EXIT_OK, stdout, stderr: String::new() }
        }
        Err(e) => {
            let status = if e.is_usage() { EXIT_USAGE } else { EXIT_DOMAIN };
            Outcome { status, stdout: String::new(), stderr: format!("error: {e}\n") }
        }
    }
}

/// `"group action"` and the explicitly given or defaulted flags of the leaf
/// subcommand, keyed by long flag name. Boolean flags echo as JSON booleans.
fn echo_inputs(matches: &clap::ArgMatches) -> (String, Map<String, Value>) {
    let root = Cli::command();
    let mut names = Vec::new();
    let mut cmd = &root;
    let mut m = matches;
    while let Some((name, sub)) = m.subcommand() {
        names.push(name.to_string());
        cmd = cmd.find_subcommand(name).expect("matched subcommand exists");
        m = sub;
    }
    let mut inputs = Map::new();
    for arg in cmd.get_arguments() {
        let id = arg.get_id().as_str();
        if id == "format" || id == "help" || id == "version" {
            continue;
        }
        let Some(long) = arg.get_long() else { continue };
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            inputs.insert(long.to_string(), Value::Bool(m.get_flag(id)));
        } else if let Ok(Some(mut raw)) = m.try_get_raw(id) {
            if let Some(v) = raw.next() {
                inputs.insert(long.to_string(), Value::String(v.to_string_lossy().into_owned()));
            }
        }
    }
    (names.join(" "), inputs)
}

/// Rebuilds an argument list from an emitted record's `op` and `inputs`.
pub fn argv_from_record(record: &Value) -> Option<Vec<String>> {
    let mut argv = vec!["doctrine".to_string()];
    argv.extend(record.get("op")?.as_str()?.split(' ').map(str::to_string));
    for (k, v) in record.get("inputs")?.as_object()? {
        match v {
            Value::Bool(true) => argv.push(format!("--{k}")),
            Value::Bool(false) => {}
            Value::String(s) => argv.push(format!("--{k}={s}")),
            _ => return None,
        }
    }
    Some(argv)
}

/// A real number rendered with 17 significant digits.
pub fn real(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(x.to_string());
    }
    Value::Number(Number::from_str(&format!("{x:.16e}")).expect("formatted float is a JSON number"))
}

fn reals(xs: impl IntoIterator<Item = f64>) -> Value {
    Value::Array(xs.into_iter().map(real).collect())
}

/// `"num/den"`, always with the denominator.
pub fn rational(r: &ExactRational) -> Value {
    Value::String(format!("{}/{}", r.numer(), r.denom()))
}

fn integer(n: &ExactInt) -> Value {
    Value::String(n.to_string())
}

fn parse_list<T, F>(s: &str, what: &str, parse: F) -> Result<Vec<T>>
where
    F: Fn(&str) -> Option<T>,
{
    s.split(',')
        .map(|item| parse(item.trim()).ok_or_else(|| Error::Usage(format!("bad {what} entry {item:?} in {s:?}"))))
        .collect()
}

fn parse_reals(s: &str) -> Result<Vec<f64>> {
    parse_list(s, "number", |x| x.parse::<f64>().ok().filter(|v| v.is_finite()))
}

fn parse_rationals(s: &str) -> Result<Vec<ExactRational>> {
    s.split(',').map(exactnum::parse_rational).collect()
}

fn load_model(table: &Option<String>, maty: bool, maty_tail: bool, law: Option<u32>) -> Result<Box<dyn Mortality>> {
    match (table, maty, law) {
        (Some(path), false, None) => Ok(Box::new(load_table(path)?)),
        (None, true, None) => Ok(Box::new(maty_table(maty_tail))),
        (None, false, Some(omega)) => Ok(Box::new(DeMoivreLaw::new(omega)?)),
        _ => Err(Error::Usage("choose exactly one of --table FILE, --maty or --law OMEGA".into())),
    }
}

fn load_table(path: &str) -> Result<LifeTable> {
    LifeTable::load(path).map_err(|e| match e {
        Error::Io(io) => Error::Domain(format!("cannot read {path}: {io}")),
        other => other,
    })
}

fn maty_table(tail: bool) -> LifeTable {
    lifeannuity::reconstruct_maty_table_with(if tail { MatyTail::LinearTo100 } else { MatyTail::None })
}

fn table_only(model: &ModelArgs) -> Result<LifeTable> {
    match (&model.table, model.maty, model.law) {
        (Some(path), false, None) => load_table(path),
        (None, true, None) => Ok(maty_table(model.maty_tail)),
        _ => Err(Error::Usage("this command needs exactly one of --table FILE or --maty".into())),
    }
}

fn model_note(model: &ModelArgs) -> Value {
    if model.maty && model.maty_tail {
        Value::String(maty_table(true).note().unwrap_or_default().to_string())
    } else {
        Value::Null
    }
}

fn run(group: &Group) -> Result<(Value, &'static str)> {
    match group {
        Group::Binom(cmd) => run_binom(cmd),
        Group::Duration(cmd) => run_duration(cmd),
        Group::Recur(cmd) => run_recur(cmd),
        Group::Factor(cmd) => run_factor(cmd),
        Group::Series(cmd) => run_series(cmd),
        Group::Annuity(cmd) => run_annuity(cmd),
        Group::Conic(cmd) => run_conic(cmd),
        Group::Games(cmd) => run_games(cmd),
    }
}

const BINOM_1733: &str = "De Moivre (1733), Approximatio ad summam terminorum binomii (a+b)^n in seriem expansi";

fn run_binom(cmd: &Binom) -> Result<(Value, &'static str)> {
    Ok(match cmd {
        Binom::Exact { n, p, c } => {
            let spec = TrialSpec::new(*n, exactnum::parse_rational(p)?)?;
            let prob = binomlimit::exact_central_probability(&spec, *c)?;
            let exact = prob.exact().map(rational).unwrap_or(Value::Null);
            (json!({ "probability": exact, "decimal": real(prob.to_f64()) }), BINOM_1733)
        }
        Binom::Limit { c } => (
            json!({
                "probability": real(binomlimit::limit_central_probability(*c)?),
                "tail": real(binomlimit::limit_tail_probability(*c)?),
                "historical": binomlimit::historical_band_value(*c).map(real),
            }),
            BINOM_1733,
        ),
        Binom::Term { n, l } => {
            let stirling = binomlimit::stirling_point_probability(*n, *l).map(real).unwrap_or(Value::Null);
            if *n == 0 {
                return Err(Error::Domain("n must be at least 1".into()));
            }
            (json!({ "approximation": real(binomlimit::demoivre_term(*n, *l)), "stirling": stirling }), BINOM_1733)
        }
        Binom::Remark1 { n } => (
            json!({ "fraction": rational(&binomlimit::remark1_fraction(*n)?) }),
            "De Moivre, Doctrine of Chances (1738), Remark I on the approximation",
        ),
        Binom::SampleSize { p, c, alpha } => {
            let (p, c, alpha) =
                (exactnum::parse_rational(p)?, exactnum::parse_rational(c)?, exactnum::parse_rational(alpha)?);
            let n = binomlimit::sample_size(&p, &c, &alpha)?;
            let estimate = binomlimit::gaussian_sample_size(
                exactnum::rational_to_f64(&p),
                exactnum::rational_to_f64(&c),
                exactnum::rational_to_f64(&alpha),
            )?;
            (json!({ "n": n, "gaussian_estimate": estimate }), "Jacob Bernoulli, Ars Conjectandi (1713), Part IV")
        }
        Binom::Simulate { n, p, c, reps, seed, threads } => {
            let spec = TrialSpec::new(*n, exactnum::parse_rational(p)?)?;
            let value = match threads {
                Some(t) => {
                    let pool = rayon::ThreadPoolBuilder::new()
                        .num_threads(*t)
                        .build()
                        .map_err(|e| Error::Usage(format!("cannot build a {t}-thread pool: {e}")))?;
                    pool.install(|| binomlimit::simulate_band(&spec, *c, *reps, *seed))?
                }
                None => binomlimit::simulate_band(&spec, *c, *reps, *seed)?,
            };
            (json!({ "probability": real(value) }), "Trials made at De Moivre's request to confirm the 1733 rule")
        }
        Binom::Odds { p } => {
            let p = exactnum::parse_rational(p)?;
            let odds = exactnum::odds_from_probability(&p)?;
            (json!({ "odds": odds.to_string(), "probability": rational(&p) }), BINOM_1733)
        }
        Binom::Probability { odds } => {
            let odds = Odds::from_str(odds)?;
            let p = exactnum::probability_from_odds(&odds);
            (json!({ "probability": rational(&p), "decimal": real(exactnum::rational_to_f64(&p)) }), BINOM_1733)
        }
        Binom::Factorial { n } => {
            let f = exactnum::factorial(*n);
            (
                json!({ "value": integer(&f), "scientific": exactnum::times_power_of_ten(&f, 8) }),
                "De Moivre, Doctrine of Chances (1738), on two packs of piquet cards",
            )
        }
        Binom::Coefficient { n, k } => (
            json!({ "value": integer(&exactnum::binomial_coefficient(*n, *k)) }),
            "Binomial coefficients of (a+b)^n",
        ),
    })
}

fn run_duration(cmd: &Duration) -> Result<(Value, &'static str)> {
    const SOURCE: &str = "De Moivre, Doctrine of Chances (1718), the duration of play";
    Ok(match cmd {
        Duration::Exact(a) => {
            let spec = DurationSpec::new(a.b, a.p, a.n)?;
            (json!({ "probability": real(recurrence::duration_exceeds_exact(&spec)) }), SOURCE)
        }
        Duration::Closed(a) => {
            let spec = DurationSpec::new(a.b, a.p, a.n)?;
            let terms: Vec<Value> = recurrence::duration_terms(a.b, a.p)?
                .into_iter()
                .map(|(c, t)| json!({ "c": real(c), "t": real(t) }))
                .collect();
            (json!({ "probability": real(recurrence::duration_exceeds_closed(&spec)?), "terms": terms }), SOURCE)
        }
    })
}

fn recurrence_from(args: &RecurArgs) -> Result<Recurrence> {
    Recurrence::new(parse_reals(&args.coeffs)?, parse_reals(&args.init)?)
}

fn run_recur(cmd: &Recur) -> Result<(Value, &'static str)> {
    const SOURCE: &str = "De Moivre, Miscellanea Analytica (1730), recurrent series";
    Ok(match cmd {
        Recur::Solve(args) => {
            let cf = recurrence::solve_recurrence(&recurrence_from(args)?)?;
            let terms: Vec<Value> = cf
                .terms
                .iter()
                .map(|t| {
                    json!({
                        "coefficient": reals([t.coefficient.re, t.coefficient.im]),
                        "root": reals([t.root.re, t.root.im]),
                    })
                })
                .collect();
            (json!({ "terms": terms, "real": cf.real }), SOURCE)
        }
        Recur::Eval { rec, n } => {
            let cf = recurrence::solve_recurrence(&recurrence_from(rec)?)?;
            (json!({ "value": real(recurrence::eval_closed_form(&cf, *n)?) }), SOURCE)
        }
        Recur::Sum { rec, n } => (json!({ "value": real(recurrence::partial_sum(&recurrence_from(rec)?, *n)?) }), SOURCE),
    })
}

fn run_factor(cmd: &Factor) -> Result<(Value, &'static str)> {
    Ok(match cmd {
        Factor::Unity { n, sign } => {
            let f = recurrence::factor_unity(*n, *sign)?;
            (
                json!({
                    "linear_factors": reals(f.linear_factors.iter().copied()),
                    "quadratic_cosines": reals(f.quadratic_factors.iter().copied()),
                    "max_coefficient_error": real(f.max_coefficient_error()),
                }),
                "Cotes (1722) and De Moivre, Miscellanea Analytica (1730), factors of x^n ± 1",
            )
        }
        Factor::DemoivrePower { theta, n } => {
            let r = recurrence::demoivre_power(*theta, *n);
            (
                json!({
                    "cos": real(r.multiple_angle.0),
                    "sin": real(r.multiple_angle.1),
                    "repeated_product": reals([r.repeated_product.0, r.repeated_product.1]),
                    "discrepancy": real(r.discrepancy()),
                }),
                "De Moivre's identity (cos θ + i sin θ)^n = cos nθ + i sin nθ",
            )
        }
    })
}

fn series_value(s: &PowerSeries) -> Value {
    Value::Array(s.coefficients().iter().map(rational).collect())
}

fn run_series(cmd: &SeriesCmd) -> Result<(Value, &'static str)> {
    const SOURCE: &str = "De Moivre (1697), raising an infinite multinomial to any power";
    const REVERSION: &str = "De Moivre (1698), reversion of series";
    Ok(match cmd {
        SeriesCmd::Raise { coeffs, power, order } => {
            let s = PowerSeries::new(parse_rationals(coeffs)?);
            (json!({ "coefficients": series_value(&series::raise_series(&s, *power, *order)?) }), SOURCE)
        }
        SeriesCmd::Revert { coeffs, order } => {
            let s = PowerSeries::new(parse_rationals(coeffs)?);
            let t = series::revert_series(&s, *order).map_err(|e| Error::Domain(e.to_string()))?;
            (json!({ "coefficients": series_value(&t) }), REVERSION)
        }
        SeriesCmd::Compose { f, g, order } => {
            let f = PowerSeries::new(parse_rationals(f)?);
            let g = PowerSeries::new(parse_rationals(g)?);
            (json!({ "coefficients": series_value(&series::compose_series(&f, &g, *order)) }), REVERSION)
        }
        SeriesCmd::Multinomial { degree, power } => {
            let terms: Vec<Value> = series::multinomial_coefficient_terms(*degree, *power)
                .iter()
                .map(|t| json!({ "degrees": t.degrees, "count": integer(&t.count) }))
                .collect();
            (json!({ "terms": terms }), SOURCE)
        }
    })
}

fn run_annuity(cmd: &Annuity) -> Result<(Value, &'static str)> {
    const SOURCE: &str = "De Moivre, Annuities upon Lives (1725)";
    Ok(match cmd {
        Annuity::Value { model, age, rate } => {
            let m = load_model(&model.table, model.maty, model.maty_tail, model.law)?;
            let v = lifeannuity::annuity_value(m.as_ref(), *age, RateSpec::new(*rate)?)?;
            (json!({ "value": real(v), "note": model_note(model) }), SOURCE)
        }
        Annuity::Survival { model, age, years } => {
            let m = load_model(&model.table, model.maty, model.maty_tail, model.law)?;
            let p = lifeannuity::survival_probability(m.as_ref(), *age, *years)?;
            (json!({ "probability": real(p), "note": model_note(model) }), SOURCE)
        }
        Annuity::Joint { model, age, second, age_b, rate } => {
            let a = load_model(&model.table, model.maty, model.maty_tail, model.law)?;
            let b = load_model(&second.table_b, second.maty_b, second.maty_tail_b, second.law_b)?;
            let v = lifeannuity::joint_annuity_value(a.as_ref(), *age, b.as_ref(), *age_b, RateSpec::new(*rate)?)?;
            let note = if model.maty_tail || second.maty_tail_b { model_note(&ModelArgs { table: None, maty: true, maty_tail: true, law: None }) } else { Value::Null };
            (json!({ "value": real(v), "note": note }), SOURCE)
        }
        Annuity::ErrorTable { model, ages, rates, omega } => {
            let table = table_only(model)?;
            let ages = parse_list(ages, "age", |x| x.parse::<u32>().ok())?;
            let rates = parse_reals(rates)?;
            let law = DeMoivreLaw::new(*omega)?;
            let grid = lifeannuity::approximation_error_table_against(&table, &law, &ages, &rates)?;
            (
                json!({
                    "ages": grid.ages,
                    "rates": reals(grid.rates.iter().copied()),
                    "entries": grid.entries.iter().map(|row| reals(row.iter().copied())).collect::<Vec<_>>(),
                    "note": grid.note,
                }),
                "Pearson's comparison of De Moivre's hypothesis with Halley's Breslau table",
            )
        }
        Annuity::Table { model } => {
            let table = table_only(model)?;
            (
                json!({
                    "start_age": table.start_age(),
                    "terminal_age": table.terminal_age(),
                    "lx": reals(table.survivors().iter().copied()),
                    "note": table.note(),
                }),
                "Halley (1693), Breslau table as summarized by Maty (1760)",
            )
        }
    })
}

fn run_conic(cmd: &Conic) -> Result<(Value, &'static str)> {
    const FORCE: &str = "De Moivre's central-force theorem, published by Johann Bernoulli (1710)";
    let ellipse = |e: &EllipseArgs| Ellipse::new(e.a, e.b);
    Ok(match cmd {
        Conic::FocalProduct { ellipse: e, theta } => {
            let r = conics::focal_product(&ellipse(e)?, *theta);
            (
                json!({ "product": real(r.product), "halfdiam_sq": real(r.halfdiam_sq) }),
                "De Moivre, focal radii of an ellipse and the conjugate half-diameter",
            )
        }
        Conic::Curvature { ellipse: e, theta } => {
            (json!({ "radius": real(conics::radius_of_curvature(&ellipse(e)?, *theta)) }), FORCE)
        }
        Conic::Force { ellipse: e, theta } => {
            let e = ellipse(e)?;
            let force = conics::centripetal_force(&e, *theta);
            let fm = conics::focal_radius(&e, *theta);
            (
                json!({
                    "force": real(force),
                    "focal_radius": real(fm),
                    "perpendicular": real(conics::focal_perpendicular(&e, *theta)),
                    "radius_of_curvature": real(conics::radius_of_curvature(&e, *theta)),
                    "force_times_fm_sq": real(force * fm * fm),
                }),
                FORCE,
            )
        }
        Conic::InverseSquare { ellipse: e, samples } => {
            let r = conics::inverse_square_constant(&ellipse(e)?, *samples)?;
            (json!({ "constant": real(r.constant), "max_relative_deviation": real(r.max_relative_deviation) }), FORCE)
        }
    })
}

fn run_games(cmd: &GamesCmd) -> Result<(Value, &'static str)> {
    Ok(match cmd {
        GamesCmd::DeckOdds { size } => {
            let odds = games::deck_match_odds(*size)?;
            (
                json!({
                    "odds": odds.to_string(),
                    "for": integer(odds.favour()),
                    "for_scientific": exactnum::times_power_of_ten(odds.favour(), 8),
                }),
                "De Moivre, Doctrine of Chances (1738), two packs of piquet cards in the same order",
            )
        }
        GamesCmd::Tour { start } => {
            let start: Square = start.parse()?;
            (json!({ "tour": games::find_tour(start).to_string() }), "Knight's tours in Ozanam, Récréations (1725)")
        }
        GamesCmd::Validate { tour, file } => {
            let text = match (tour, file) {
                (Some(t), None) => t.clone(),
                (None, Some(path)) => std::fs::read_to_string(path)
                    .map_err(|e| Error::Domain(format!("cannot read {path}: {e}")))?,
                _ => return Err(Error::Usage("give exactly one of --tour or --file".into())),
            };
            let squares = games::parse_squares(&text)?;
            let verdict = match games::validate_tour(&squares) {
                TourVerdict::Valid => json!({ "valid": true }),
                TourVerdict::Invalid(v) => {
                    json!({ "valid": false, "index": v.index, "reason": v.reason.to_string() })
                }
            };
            (verdict, "Knight's tours in Ozanam, Récréations (1725)")
        }
    })
}

fn render_text(record: &Value) -> String {
    fn scalar(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(", "),
            Value::Object(map) => {
                map.iter().map(|(k, v)| format!("{k}={}", scalar(v))).collect::<Vec<_>>().join(" ")
            }
            other => other.to_string(),
        }
    }
    let mut out = String::new();
    out.push_str(&format!("{}\n", scalar(&record["op"])));
    if let Value::Object(result) = &record["result"] {
        for (k, v) in result {
            if v.is_null() {
                continue;
            }
            match v {
                Value::Array(rows) if rows.iter().any(|r| r.is_array() || r.is_object()) => {
                    out.push_str(&format!("{k}:\n"));
                    for r in rows {
                        out.push_str(&format!("  {}\n", scalar(r)));
                    }
                }
                _ => out.push_str(&format!("{k}: {}\n", scalar(v))),
            }
        }
    }
    out.push_str(&format!("source: {}\n", scalar(&record["provenance"])));
    out
}

/// Big integers and rationals from JSON strings, for consumers of the output.
pub fn parse_exact_integer(v: &Value) -> Option<BigInt> {
    v.as_str()?.parse().ok()
}

/// Reads back a real printed by [`real`].
pub fn parse_real(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64().or_else(|| n.to_string().parse().ok()),
        _ => None,
    }
    .filter(|x: &f64| x.to_f64().is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_ok(args: &[&str]) -> Value {
        let mut argv = vec!["doctrine"];
        argv.extend_from_slice(args);
        let out = dispatch(argv);
        assert_eq!(out.status, EXIT_OK, "{}", out.stderr);
        serde_json::from_str(&out.stdout).unwrap()
    }

    #[test]
    fn remark1_json() {
        let v = run_ok(&["binom", "remark1", "--n", "3600", "--format", "json"]);
        assert_eq!(v["result"]["fraction"], "1/120");
        assert_eq!(v["op"], "binom remark1");
        assert_eq!(v["inputs"]["n"], "3600");
    }

    #[test]
    fn real_rendering() {
        assert_eq!(real(0.25).to_string(), "2.5000000000000000e-1");
        assert_eq!(parse_real(&real(0.1)), Some(0.1));
        assert_eq!(real(f64::NAN), Value::String("NaN".into()));
        assert_eq!(rational(&exactnum::ratio(4, 1)), Value::String("4/1".into()));
    }

    #[test]
    fn usage_and_domain_codes() {
        let out = dispatch(["doctrine", "binom", "remark1"]);
        assert_eq!(out.status, EXIT_USAGE);
        assert!(out.stdout.is_empty());
        let out = dispatch(["doctrine", "binom", "remark1", "--n", "3601"]);
        assert_eq!(out.status, EXIT_DOMAIN);
        assert!(out.stdout.is_empty());
        let out = dispatch(["doctrine", "binom", "sample-size", "--p", "x", "--c", "0.1", "--alpha", "0.1"]);
        assert_eq!(out.status, EXIT_USAGE);
        let out = dispatch(["doctrine", "annuity", "value", "--maty", "--law", "86", "--age", "50", "--rate", "0.05"]);
        assert_eq!(out.status, EXIT_USAGE);
        let out = dispatch(["doctrine", "nonsense"]);
        assert_eq!(out.status, EXIT_USAGE);
        let out = dispatch(["doctrine", "--help"]);
        assert_eq!(out.status, EXIT_OK);
    }

    #[test]
    fn negative_values_accepted() {
        let v = run_ok(&["factor", "unity", "--n", "3", "--sign", "-1"]);
        assert_eq!(v["result"]["linear_factors"].as_array().unwrap().len(), 1);
        let v = run_ok(&["series", "revert", "--coeffs", "-2,1/3", "--order", "2"]);
        assert_eq!(v["result"]["coefficients"][0], "-1/2");
    }

    #[test]
    fn text_format() {
        let mut argv = vec!["doctrine", "duration", "closed", "--b", "2", "--p", "0.5", "--n", "4", "--format", "text"];
        let out = dispatch(argv.drain(..));
        assert_eq!(out.status, 0);
        assert!(out.stdout.starts_with("duration closed\nprobability: 2.5000000000000000e-1\n"), "{}", out.stdout);
    }
}
