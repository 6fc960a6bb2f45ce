use std::path::{Path, PathBuf};
use std::time::Instant;

use hornmc::emit::{emit_c_like_with_params, SWEEP_CSV_HEADER};
use hornmc::gen::{resultant_cached, structured_random, StructuredParams};
use hornmc::search::SweepRow;
use hornmc::{
    emit_stats, emit_sweep_csv, emit_tac, evaluate_order, exhaustive_search, horner_transform, instruction_count,
    mcts_optimize, naive_op_count, occurrence_order, parse_polynomial, parse_tac, random_order_search, sweep,
    tree_op_count, Direction, Error, MctsConfig, OpCount, Polynomial, Result, SearchResult, StatsReport, SweepGrid,
    VariableOrder, Workspace,
};
use serde::Serialize;
use serde_json::json;

use crate::{
    Command, CountArgs, EmitArgs, EmitFormat, Format, GenerateArgs, GenerateKind, InputArgs, Method, OptimizeArgs,
    SweepArgs, CACHE_DIR_ENV,
};

/// 2 usage, 3 parse, 4 resource cap, 1 anything else.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::InvalidVariableName(_)
        | Error::OrderMissingVariable(_)
        | Error::DuplicateVariable(_)
        | Error::UnknownVariable(_) => 2,
        Error::Syntax { .. } | Error::NegativeExponent { .. } | Error::Tac { .. } => 3,
        Error::ResourceLimit { .. } | Error::TooManyVariables { .. } => 4,
        Error::MissingAssignment(_) | Error::Io(_) => 1,
    }
}

pub fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Count(a) => count(a),
        Command::Optimize(a) => optimize(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Generate(a) => generate(a),
        Command::Emit(a) => emit(a),
    }
}

fn cache_dir() -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("hornmc-cache"))
}

#[derive(Serialize, Debug, Clone)]
#[serde(rename_all = "lowercase")]
enum InputDesc {
    File(PathBuf),
    Expr(String),
    Resultant([usize; 2]),
}

struct Loaded {
    poly: Polynomial,
    ws: Workspace,
    desc: InputDesc,
}

impl Loaded {
    fn is_resultant(&self) -> bool {
        matches!(self.desc, InputDesc::Resultant(_))
    }
}

fn load(input: &InputArgs) -> Result<Loaded> {
    let ws = Workspace::new();
    let (poly, desc) = if let Some(mn) = &input.resultant {
        let (m, n) = (mn[0], mn[1]);
        (resultant_cached(m, n, &ws, &cache_dir())?, InputDesc::Resultant([m, n]))
    } else if let Some(text) = &input.expr {
        (parse_polynomial(text, &ws)?, InputDesc::Expr(text.clone()))
    } else if let Some(path) = &input.input {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        (parse_polynomial(&text, &ws)?, InputDesc::File(path.clone()))
    } else {
        return Err(Error::Config("no input: give a file, --expr or --resultant".into()));
    };
    Ok(Loaded { poly, ws, desc })
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn echo_config(config: &serde_json::Value) {
    eprintln!("hornmc config: {config}");
}

fn count(a: CountArgs) -> Result<()> {
    let input = load(&a.input)?;
    let naive = naive_op_count(&input.poly);
    let config = json!({ "command": "count", "input": input.desc });
    echo_config(&config);
    if a.json {
        write_output(None, &emit_stats(&StatsReport::naive_only(naive, config)))
    } else {
        write_output(None, &format!("naive: {naive}\n"))
    }
}

#[derive(Serialize)]
struct OptimizeConfig {
    command: &'static str,
    input: InputDesc,
    method: Method,
    order: Option<Vec<String>>,
    mcts_n: usize,
    cp: f64,
    direction: String,
    seed: u64,
    max_exhaustive_vars: usize,
    format: Format,
    name: String,
    trace: bool,
}

fn search(
    p: &Polynomial,
    a: &OptimizeArgs,
    order: Option<&VariableOrder>,
    direction: Direction,
) -> Result<SearchResult> {
    if p.is_zero() {
        return evaluate_order(p, &VariableOrder::new(Vec::new())?);
    }
    match a.method {
        Method::Occurrence => evaluate_order(p, &occurrence_order(p)),
        Method::GivenOrder => evaluate_order(p, order.expect("checked by caller")),
        Method::Exhaustive => exhaustive_search(p, a.max_exhaustive_vars),
        Method::Random => random_order_search(p, a.mcts_n, a.seed).map(|(r, _)| r),
        Method::Mcts => Ok(mcts_optimize(p, &MctsConfig::new(a.mcts_n, a.cp, direction, a.seed)?)),
    }
}

fn optimize(a: OptimizeArgs) -> Result<()> {
    let start = Instant::now();
    let input = load(&a.input)?;
    let (p, ws) = (&input.poly, &input.ws);
    let order = match (&a.order, a.method) {
        (Some(text), Method::GivenOrder) => Some(VariableOrder::parse(text, ws)?),
        (None, Method::GivenOrder) => return Err(Error::Config("--method given-order needs --order".into())),
        (Some(_), _) => return Err(Error::Config("--order is only used with --method given-order".into())),
        (None, _) => None,
    };
    let direction = a.direction.map(Direction::from).unwrap_or(if input.is_resultant() {
        Direction::Front
    } else {
        Direction::Back
    });
    let config = serde_json::to_value(OptimizeConfig {
        command: "optimize",
        input: input.desc.clone(),
        method: a.method,
        order: order.as_ref().map(|o| o.names(ws)),
        mcts_n: a.mcts_n,
        cp: a.cp,
        direction: direction.to_string(),
        seed: a.seed,
        max_exhaustive_vars: a.max_exhaustive_vars,
        format: a.format,
        name: a.name.clone(),
        trace: a.trace,
    })
    .expect("config serializes");
    echo_config(&config);

    let result = search(p, &a, order.as_ref(), direction)?;
    let horner =
        if p.is_zero() { OpCount::default() } else { tree_op_count(&horner_transform(p, &result.best_order)?) };
    let mut report = StatsReport::optimized(
        naive_op_count(p),
        horner,
        instruction_count(&result.best_code),
        result.best_order.names(ws),
        config.clone(),
    );
    if a.trace {
        report.trace = result.trace.clone();
    }
    if a.wall_time {
        report.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    let stats = emit_stats(&report);
    let code = match a.format {
        Format::Tac => format!("# config: {config}\n{}", emit_tac(&result.best_code, ws)),
        Format::C => {
            let mut params = p.variables();
            params.sort_unstable();
            let comment = config.to_string().replace("*/", "* /");
            format!("/* config: {comment} */\n{}", emit_c_like_with_params(&result.best_code, &a.name, &params, ws)?)
        }
        Format::Json => stats.clone(),
    };
    write_output(a.out.as_deref(), &code)?;
    if let Some(path) = &a.stats {
        write_output(Some(path), &stats)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepConfig {
    command: &'static str,
    input: InputDesc,
    sweep_cp: Vec<f64>,
    sweep_n: Vec<usize>,
    seeds: u64,
    seed: u64,
    direction: String,
}

#[derive(Serialize)]
struct SweepStats<'a> {
    schema_version: u32,
    config: &'a serde_json::Value,
    columns: &'static str,
    rows: &'a [SweepRow],
}

fn run_sweep(a: SweepArgs) -> Result<()> {
    let input = load(&a.input)?;
    let direction = a.direction.map(Direction::from).unwrap_or(if input.is_resultant() {
        Direction::Front
    } else {
        Direction::Back
    });
    let config = serde_json::to_value(SweepConfig {
        command: "sweep",
        input: input.desc.clone(),
        sweep_cp: a.sweep_cp.clone(),
        sweep_n: a.sweep_n.clone(),
        seeds: a.seeds,
        seed: a.seed,
        direction: direction.to_string(),
    })
    .expect("config serializes");
    echo_config(&config);
    let grid = SweepGrid { cps: a.sweep_cp, expansions: a.sweep_n, seeds: a.seeds, base_seed: a.seed, direction };
    let rows = sweep(&input.poly, &grid)?;
    write_output(a.out.as_deref(), &emit_sweep_csv(&rows))?;
    if let Some(path) = &a.stats {
        let doc = SweepStats {
            schema_version: hornmc::emit::STATS_SCHEMA_VERSION,
            config: &config,
            columns: SWEEP_CSV_HEADER,
            rows: &rows,
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("stats serialize");
        text.push('\n');
        write_output(Some(path), &text)?;
    }
    Ok(())
}

fn generate(a: GenerateArgs) -> Result<()> {
    let ws = Workspace::new();
    let (p, config) = match a.kind {
        GenerateKind::Resultant { m, n } => {
            (resultant_cached(m, n, &ws, &cache_dir())?, json!({ "command": "generate", "resultant": [m, n] }))
        }
        GenerateKind::Structured { vars, terms, max_degree, seed, pool, factors } => {
            let mut params = StructuredParams::new(vars, terms, max_degree, seed);
            params.pool_size = pool.unwrap_or(params.pool_size);
            params.factors_per_term = factors.unwrap_or(params.factors_per_term);
            let config = json!({
                "command": "generate",
                "structured": {
                    "vars": vars, "terms": terms, "max_degree": max_degree, "seed": seed,
                    "pool": params.pool_size, "factors": params.factors_per_term,
                }
            });
            (structured_random(&params, &ws)?, config)
        }
    };
    echo_config(&config);
    write_output(a.out.as_deref(), &format!("{}\n", p.display(&ws)))
}

fn emit(a: EmitArgs) -> Result<()> {
    let ws = Workspace::new();
    let text = std::fs::read_to_string(&a.tac).map_err(|e| Error::Io(format!("{}: {e}", a.tac.display())))?;
    let code = parse_tac(&text, &ws)?;
    let out = match a.format {
        EmitFormat::Tac => emit_tac(&code, &ws),
        EmitFormat::C => hornmc::emit_c_like(&code, &a.name, &ws)?,
    };
    write_output(a.out.as_deref(), &out)
}
