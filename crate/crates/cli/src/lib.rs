//! Batch front end: one subcommand per invocation, JSON out, exit code by
//! status.

use std::fs;
use std::path::{Path, PathBuf};

use checkers_core::bounds::{self, BoundsReport};
use checkers_core::oracle::{self, Objective, SearchConfig};
use checkers_core::pagoda::{self, WeightSpec};
use checkers_core::sequences;
use checkers_core::strategies::{self, ColumnFill, ConstructionPlan};
use checkers_core::{Error, FieldElement, GameParams, MoveTrace, Position};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Digits shown in the decimal rendering of field elements.
pub const DECIMAL_DIGITS: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    VerificationFailed,
    InvalidInput,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::VerificationFailed => 1,
            Status::InvalidInput => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CommandResult {
    pub status: Status,
    pub payload: Value,
    /// Printed instead of the payload when present (traces, CSV, help).
    pub text: Option<String>,
}

impl CommandResult {
    fn ok(payload: Value) -> Self {
        Self {
            status: Status::Ok,
            payload,
            text: None,
        }
    }

    fn with_status(status: Status, payload: Value) -> Self {
        Self {
            status,
            payload,
            text: None,
        }
    }

    fn text(payload: Value, text: String) -> Self {
        Self {
            status: Status::Ok,
            payload,
            text: Some(text),
        }
    }

    /// What the process writes to stdout.
    pub fn render(&self) -> String {
        match &self.text {
            Some(t) => t.clone(),
            None => format!("{}\n", self.payload),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "checkers", version, about = "Conway (m,k)-checkers on Z^d")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone, Copy)]
struct GameArgs {
    #[arg(long)]
    m: u64,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    d: usize,
}

impl GameArgs {
    fn params(self) -> checkers_core::Result<GameParams> {
        GameParams::new(self.m, self.k, self.d)
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SequenceKind {
    Knacci,
    A,
    PlusOne,
    S,
    Lucas,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ObjectiveArg {
    Row,
    Count,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lower, upper and achieved rows.
    Bounds {
        #[command(flatten)]
        game: GameArgs,
    },
    /// Trace reaching a row: column fill for d = 1, projection otherwise.
    Construct {
        #[command(flatten)]
        game: GameArgs,
        /// Target row (d = 1 only); defaults to the highest reachable row.
        #[arg(long, allow_negative_numbers = true)]
        n: Option<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace stacking checkers on one cell: row 1 for d = 1, a deep cell of
    /// the column otherwise.
    Amass {
        #[command(flatten)]
        game: GameArgs,
        /// Checkers wanted on row 1 (d = 1 only); defaults to the cap.
        #[arg(long)]
        count: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a trace and check its claim.
    Verify {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        energy_check: bool,
    },
    /// CSV of upper and achieved rows over a range of m.
    Scan {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        m_from: u64,
        #[arg(long)]
        m_to: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Energy of the fresh board for a target on the column, and whether
    /// `count` checkers there are ruled out.
    Energy {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, allow_negative_numbers = true)]
        row: i64,
        #[arg(long, default_value_t = 1)]
        count: i64,
    },
    /// Exhaustive search in a finite window.
    Oracle {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long, default_value_t = 8)]
        depth: i64,
        /// Highest row in the window; defaults to `depth`.
        #[arg(long)]
        top: Option<i64>,
        #[arg(long, default_value_t = 0)]
        radius: i64,
        #[arg(long, default_value_t = oracle::DEFAULT_MAX_STATES)]
        budget: usize,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Row)]
        objective: ObjectiveArg,
        /// Cell for the count objective, comma separated; defaults to the
        /// column cell on row 1.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        /// Write the witness trace here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Terms of the integer sequences.
    Sequence {
        #[arg(long, value_enum)]
        kind: SequenceKind,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Argument `n` of `S_i(n)`; the terms are `i = 0..k`.
        #[arg(long, allow_negative_numbers = true)]
        n: Option<i64>,
    },
    /// Decimal expansion of the k-nacci constant.
    Constant {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 30)]
        digits: u32,
    },
}

/// `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    CommandResult::text(Value::Null, text)
                }
                _ => CommandResult {
                    status: Status::InvalidInput,
                    payload: json!({ "error": text.trim_end() }),
                    text: None,
                },
            };
        }
    };
    match dispatch(cli.command) {
        Ok(r) => r,
        Err(e) => CommandResult::with_status(classify(&e), json!({ "error": e.to_string() })),
    }
}

fn classify(e: &Error) -> Status {
    match e {
        Error::IllegalMove { .. }
        | Error::ReplayFailed { .. }
        | Error::ClaimFailed(_)
        | Error::Inconsistent(_) => Status::VerificationFailed,
        _ => Status::InvalidInput,
    }
}

/// Exact coefficients plus a certified truncated decimal.
pub fn field_json(x: &FieldElement) -> Value {
    json!({
        "coeffs": x.coeff_strings(),
        "decimal": x.to_decimal(DECIMAL_DIGITS),
        "exact": x.decimal_is_exact(DECIMAL_DIGITS),
    })
}

fn dispatch(command: Command) -> checkers_core::Result<CommandResult> {
    match command {
        Command::Bounds { game } => cmd_bounds(game.params()?),
        Command::Construct { game, n, out } => cmd_construct(game.params()?, n, out.as_deref()),
        Command::Amass { game, count, out } => cmd_amass(game.params()?, count, out.as_deref()),
        Command::Verify {
            trace,
            energy_check,
        } => cmd_verify(&trace, energy_check),
        Command::Scan {
            k,
            d,
            m_from,
            m_to,
            out,
        } => cmd_scan(k, d, m_from, m_to, out.as_deref()),
        Command::Energy { game, row, count } => cmd_energy(game.params()?, row, count),
        Command::Oracle {
            game,
            depth,
            top,
            radius,
            budget,
            objective,
            at,
            out,
        } => {
            let params = game.params()?;
            let objective = match objective {
                ObjectiveArg::Row => Objective::MaxRow,
                ObjectiveArg::Count => Objective::MaxCountAt(match at {
                    Some(s) => parse_position(&s, params.d)?,
                    None => Position::on_column(params.d, 1),
                }),
            };
            let config = SearchConfig::new(params, depth, top.unwrap_or(depth), radius, objective)?
                .with_max_states(budget);
            cmd_oracle(&config, out.as_deref())
        }
        Command::Sequence { kind, k, count, n } => cmd_sequence(kind, k, count, n),
        Command::Constant { k, digits } => cmd_constant(k, digits),
    }
}

fn parse_position(s: &str, d: usize) -> checkers_core::Result<Position> {
    let coords: Vec<i64> = s
        .split(',')
        .map(|c| c.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::InvalidParameter(format!("bad cell {s:?}: {e}")))?;
    if coords.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: coords.len(),
        });
    }
    Ok(Position::new(coords))
}

fn params_json(p: GameParams) -> Value {
    json!({ "m": p.m, "k": p.k, "d": p.d })
}

fn cmd_bounds(params: GameParams) -> checkers_core::Result<CommandResult> {
    let r = BoundsReport::compute(params)?;
    Ok(CommandResult::ok(json!({
        "params": params_json(params),
        "lower": r.lower,
        "lower_source": r.lower_source,
        "upper": r.upper,
        "upper_raw": r.upper_raw,
        "strict_upper": r.strict_upper,
        "achieved": r.achieved,
        "gap": r.gap(),
        "projected_m": r.projected_m,
        "unit_m_projected": r.unit_m_projected,
        "bound_element": field_json(&bounds::bound_element(params)?),
    })))
}

/// Writes the trace to `out`, or returns it as the command's output.
fn emit_trace(trace: &MoveTrace, summary: Value, out: Option<&Path>) -> checkers_core::Result<CommandResult> {
    let text = trace.to_jsonl();
    match out {
        Some(path) => {
            fs::write(path, text)?;
            let mut summary = summary;
            summary["out"] = json!(path.display().to_string());
            Ok(CommandResult::ok(summary))
        }
        None => Ok(CommandResult::text(summary, text)),
    }
}

fn plan_summary(plan: &ConstructionPlan) -> Value {
    json!({
        "params": params_json(plan.params),
        "target_row": plan.target_row,
        "moves": plan.trace.len(),
        "cutoff": plan.cutoff,
        "lowest_row": plan.lowest_row(),
        "requirements": plan.requirements.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
    })
}

fn cmd_construct(params: GameParams, n: Option<i64>, out: Option<&Path>) -> checkers_core::Result<CommandResult> {
    if params.d >= 2 {
        let achieved = bounds::achieved_row(params)?;
        if n.is_some_and(|n| n != achieved) {
            return Err(Error::InvalidParameter(format!(
                "for d >= 2 only the achieved row {achieved} is constructed"
            )));
        }
        let plan = strategies::projection_plan(params)?;
        let trace = plan.flatten();
        let summary = json!({
            "params": params_json(params),
            "target_row": achieved,
            "moves": trace.len(),
        });
        return emit_trace(&trace, summary, out);
    }
    let n = match n {
        Some(n) => n,
        None => bounds::max_row_1d(params.m, params.k)?,
    };
    if params.m == 1 {
        // only row 1 is reachable
        if n != 1 {
            return Ok(CommandResult::with_status(
                Status::VerificationFailed,
                json!({ "params": params_json(params), "target_row": n, "feasible": false }),
            ));
        }
        let plan = strategies::row1_amass_plan(1, params.k)?;
        let trace = MoveTrace::new(params, plan.trace.moves.clone(), Some(checkers_core::Claim::Row(1)));
        return emit_trace(&trace, plan_summary(&plan), out);
    }
    match strategies::column_fill_plan(params.m, params.k, n)? {
        ColumnFill::Feasible(plan) => emit_trace(&plan.trace, plan_summary(&plan), out),
        ColumnFill::Infeasible(why) => Ok(CommandResult::with_status(
            Status::VerificationFailed,
            json!({
                "params": params_json(params),
                "target_row": n,
                "feasible": false,
                "certificate": why,
            }),
        )),
    }
}

fn cmd_amass(params: GameParams, count: Option<u64>, out: Option<&Path>) -> checkers_core::Result<CommandResult> {
    if params.d >= 2 {
        if count.is_some() {
            return Err(Error::InvalidParameter("--count applies to d = 1 only".into()));
        }
        let plan = strategies::single_square_plan(params)?;
        let (lower, cap) = bounds::single_square_caps(params)?;
        let trace = plan.flatten();
        let summary = json!({
            "params": params_json(params),
            "count": lower,
            "energy_cap": cap,
            "moves": trace.len(),
        });
        return emit_trace(&trace, summary, out);
    }
    let cap = bounds::row1_cap(params.m, params.k)?;
    let count = count.unwrap_or(cap);
    match strategies::amass_plan(params.m, params.k, count)? {
        Some(plan) => {
            let mut summary = plan_summary(&plan);
            summary["count"] = json!(count);
            summary["cap"] = json!(cap);
            emit_trace(&plan.trace, summary, out)
        }
        None => Ok(CommandResult::with_status(
            Status::VerificationFailed,
            json!({
                "params": params_json(params),
                "count": count,
                "cap": cap,
                "feasible": false,
            }),
        )),
    }
}

fn cmd_verify(path: &Path, energy_check: bool) -> checkers_core::Result<CommandResult> {
    let text = fs::read_to_string(path)?;
    let trace = MoveTrace::from_jsonl(&text)?;
    let report = strategies::verify_trace(&trace, energy_check)?;
    let status = if report.passed() {
        Status::Ok
    } else {
        Status::VerificationFailed
    };
    let mut payload = serde_json::to_value(&report).expect("report serializes");
    payload["params"] = params_json(trace.params);
    payload["passed"] = json!(report.passed());
    Ok(CommandResult::with_status(status, payload))
}

fn cmd_scan(k: usize, d: usize, from: u64, to: u64, out: Option<&Path>) -> checkers_core::Result<CommandResult> {
    if from < 1 || from > to {
        return Err(Error::InvalidParameter(format!("bad m range {from}..={to}")));
    }
    let entries = bounds::scan_gap(k, d, from..=to)?;
    let mut csv = String::from("m,upper,achieved\n");
    for e in &entries {
        csv.push_str(&format!("{},{},{}\n", e.m, e.upper, e.achieved));
    }
    let summary = json!({
        "k": k,
        "d": d,
        "m_from": from,
        "m_to": to,
        "rows": entries.len(),
    });
    match out {
        Some(path) => {
            fs::write(path, csv)?;
            let mut summary = summary;
            summary["out"] = json!(path.display().to_string());
            Ok(CommandResult::ok(summary))
        }
        None => Ok(CommandResult::text(summary, csv)),
    }
}

fn cmd_energy(params: GameParams, row: i64, count: i64) -> checkers_core::Result<CommandResult> {
    let target = Position::on_column(params.d, row);
    let spec = WeightSpec::new(params.k, target.clone())?;
    let energy = spec.background_energy(params)?;
    let occupancy = pagoda::occupancy_check(params, target.clone(), count)?;
    Ok(CommandResult::ok(json!({
        "params": params_json(params),
        "target": target,
        "energy": field_json(&energy),
        "count": count,
        "comparison": occupancy.comparison,
        "verdict": occupancy.verdict,
    })))
}

fn cmd_oracle(config: &SearchConfig, out: Option<&Path>) -> checkers_core::Result<CommandResult> {
    let result = oracle::bfs_optimum(config)?;
    let summary = json!({
        "params": params_json(config.params),
        "objective": config.objective,
        "value": result.value,
        "exhausted": result.exhausted,
        "states": result.states,
        "witness_moves": result.witness.len(),
    });
    if let Some(path) = out {
        fs::write(path, result.witness.to_jsonl())?;
    }
    Ok(CommandResult::ok(summary))
}

fn cmd_sequence(kind: SequenceKind, k: usize, count: usize, n: Option<i64>) -> checkers_core::Result<CommandResult> {
    let terms: Vec<String> = match kind {
        SequenceKind::Knacci => (0..count)
            .map(|i| sequences::knacci(k, i).map(|v| v.to_string()))
            .collect::<checkers_core::Result<_>>()?,
        SequenceKind::A => (0..count)
            .map(|i| sequences::cumulative_a(k, i).map(|v| v.to_string()))
            .collect::<checkers_core::Result<_>>()?,
        SequenceKind::PlusOne => sequences::plus_one_recurrence(k, count)?
            .iter()
            .map(|v| v.to_string())
            .collect(),
        SequenceKind::S => {
            let n = n.ok_or_else(|| Error::InvalidParameter("--n is required for S".into()))?;
            (0..k)
                .map(|i| sequences::partial_sum(k, i, n).map(|v| v.to_string()))
                .collect::<checkers_core::Result<_>>()?
        }
        SequenceKind::Lucas => (0..count).map(|i| sequences::lucas(i).to_string()).collect(),
    };
    let name = match kind {
        SequenceKind::Knacci => "knacci",
        SequenceKind::A => "a",
        SequenceKind::PlusOne => "plus-one",
        SequenceKind::S => "s",
        SequenceKind::Lucas => "lucas",
    };
    Ok(CommandResult::ok(json!({
        "kind": name,
        "k": k,
        "n": n,
        "terms": terms,
    })))
}

fn cmd_constant(k: usize, digits: u32) -> checkers_core::Result<CommandResult> {
    if k < 2 {
        return Err(Error::InvalidParameter("k must be at least 2".into()));
    }
    if digits > 10_000 {
        return Err(Error::InvalidParameter("at most 10000 digits".into()));
    }
    let phi = FieldElement::phi(k);
    Ok(CommandResult::ok(json!({
        "k": k,
        "digits": digits,
        "decimal": phi.to_decimal(digits),
        "exact": false,
    })))
}
