//! Text renderings of optimized code: three-address code, a C function,
//! JSON statistics and CSV sweep rows.
//!
//! Temporaries are written as `t<k>`. If a variable of the workspace already
//! has a name of that shape, the prefix grows underscores (`t_0`, `t__0`, ...)
//! until nothing collides, so the text stays unambiguous.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::Serialize;

use crate::cse::{Instruction, InstructionSeq, OpKind, Operand};
use crate::error::{Error, Result};
use crate::expr::{is_valid_name, OpCount, Variable, Workspace};
use crate::search::{SweepRow, TraceRow};

pub const STATS_SCHEMA_VERSION: u32 = 1;

const C_KEYWORDS: &[&str] = &[
    "auto",
    "break",
    "case",
    "char",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extern",
    "float",
    "for",
    "goto",
    "if",
    "inline",
    "int",
    "long",
    "register",
    "restrict",
    "return",
    "short",
    "signed",
    "sizeof",
    "static",
    "struct",
    "switch",
    "typedef",
    "union",
    "unsigned",
    "void",
    "volatile",
    "while",
    "_Bool",
    "_Complex",
    "_Imaginary",
];

/// A prefix `p` such that no workspace variable is named `p<digits>`.
fn temp_prefix(ws: &Workspace) -> String {
    let names = ws.names();
    let mut prefix = String::from("t");
    while names.iter().any(|n| {
        n.strip_prefix(prefix.as_str()).is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|c| c.is_ascii_digit()))
    }) {
        prefix.push('_');
    }
    prefix
}

fn operand_text(o: &Operand, prefix: &str, ws: &Workspace) -> String {
    match o {
        Operand::Const(c) => c.to_string(),
        Operand::Var(v) => ws.name(*v),
        Operand::Temp(t) => format!("{prefix}{t}"),
    }
}

/// One line per instruction followed by a `result = ...` line.
pub fn emit_tac(s: &InstructionSeq, ws: &Workspace) -> String {
    let prefix = temp_prefix(ws);
    let mut out = String::new();
    for ins in &s.instructions {
        let _ = writeln!(
            out,
            "{prefix}{} = {} {} {}",
            ins.dest,
            operand_text(&ins.lhs, &prefix, ws),
            ins.op,
            operand_text(&ins.rhs, &prefix, ws)
        );
    }
    let sign = if s.negate_result { "-" } else { "" };
    let _ = writeln!(out, "result = {sign}{}", operand_text(&s.result, &prefix, ws));
    out
}

/// Reads code in the [`emit_tac`] format. A name counts as a temporary once
/// it has been assigned; before that it is a variable. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_tac(text: &str, ws: &Workspace) -> Result<InstructionSeq> {
    let mut temps: HashMap<&str, u32> = HashMap::new();
    let mut instructions = Vec::new();
    let mut result = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: &str| Error::Tac { line: line_no, message: message.to_string() };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if result.is_some() {
            return Err(err("instruction after result line"));
        }
        let (dest, rhs) = line.split_once('=').ok_or_else(|| err("missing '='"))?;
        let (dest, rhs) = (dest.trim(), rhs.trim());
        let operand = |tok: &str| -> Result<Operand> {
            if let Ok(c) = tok.parse::<BigInt>() {
                return Ok(Operand::Const(c));
            }
            if let Some(&t) = temps.get(tok) {
                return Ok(Operand::Temp(t));
            }
            if !is_valid_name(tok) {
                return Err(err(&format!("bad operand '{tok}'")));
            }
            ws.intern(tok).map(Operand::Var)
        };
        if dest == "result" {
            let (negate, tok) = match rhs.strip_prefix('-') {
                Some(rest) if rest.parse::<BigInt>().is_err() => (true, rest.trim()),
                _ => (false, rhs),
            };
            result = Some((operand(tok)?, negate));
            continue;
        }
        if !is_valid_name(dest) || temps.contains_key(dest) {
            return Err(err(&format!("bad destination '{dest}'")));
        }
        let toks: Vec<&str> = rhs.split_whitespace().collect();
        let [lhs, op, rhs] = toks[..] else {
            return Err(err("expected '<operand> <op> <operand>'"));
        };
        let op = match op {
            "+" => OpKind::Add,
            "-" => OpKind::Sub,
            "*" => OpKind::Mul,
            _ => return Err(err(&format!("unknown operator '{op}'"))),
        };
        let (lhs, rhs) = (operand(lhs)?, operand(rhs)?);
        let dest_id = instructions.len() as u32;
        instructions.push(Instruction { dest: dest_id, op, lhs, rhs });
        temps.insert(dest, dest_id);
    }
    let (result, negate) =
        result.ok_or_else(|| Error::Tac { line: text.lines().count() + 1, message: "missing result line".into() })?;
    InstructionSeq::new(instructions, result, negate)
}

fn c_name(v: Variable, ws: &Workspace) -> String {
    let name = ws.name(v);
    if C_KEYWORDS.contains(&name.as_str()) {
        format!("{name}_")
    } else {
        name
    }
}

fn c_operand(o: &Operand, prefix: &str, ws: &Workspace) -> String {
    match o {
        Operand::Const(c) => format!("{c}.0"),
        Operand::Var(v) => c_name(*v, ws),
        Operand::Temp(t) => format!("{prefix}{t}"),
    }
}

/// A self-contained C function with one `double` parameter per entry of
/// `params`, in the given order.
pub fn emit_c_like_with_params(s: &InstructionSeq, name: &str, params: &[Variable], ws: &Workspace) -> Result<String> {
    if !is_valid_name(name) || C_KEYWORDS.contains(&name) {
        return Err(Error::Config(format!("'{name}' is not a valid C function name")));
    }
    let prefix = temp_prefix(ws);
    let mut out = String::from("/* Generated evaluation code. Arithmetic is in double precision, */\n");
    out.push_str("/* exact results need the three-address code replay. */\n");
    let params = if params.is_empty() {
        "void".to_string()
    } else {
        params.iter().map(|&v| format!("double {}", c_name(v, ws))).collect::<Vec<_>>().join(", ")
    };
    let _ = writeln!(out, "double {name}({params})\n{{");
    for ins in &s.instructions {
        let _ = writeln!(
            out,
            "    const double {prefix}{} = {} {} {};",
            ins.dest,
            c_operand(&ins.lhs, &prefix, ws),
            ins.op,
            c_operand(&ins.rhs, &prefix, ws)
        );
    }
    let sign = if s.negate_result { "-" } else { "" };
    let _ = writeln!(out, "    return {sign}{};\n}}", c_operand(&s.result, &prefix, ws));
    Ok(out)
}

/// [`emit_c_like_with_params`] over the variables the code uses, by id.
pub fn emit_c_like(s: &InstructionSeq, name: &str, ws: &Workspace) -> Result<String> {
    emit_c_like_with_params(s, name, &s.variables(), ws)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountFields {
    pub adds: u64,
    pub muls: u64,
    pub total: u64,
}

impl From<OpCount> for CountFields {
    fn from(c: OpCount) -> Self {
        CountFields { adds: c.adds, muls: c.muls, total: c.total() }
    }
}

/// Everything one optimization run reports. `config` is free-form and is
/// expected to carry every effective setting, including defaulted seeds.
#[derive(Debug, Clone, Serialize)]
pub struct StatsReport {
    pub schema_version: u32,
    pub naive: CountFields,
    pub horner: Option<CountFields>,
    pub cse: Option<CountFields>,
    pub naive_total: u64,
    pub horner_total: Option<u64>,
    pub cse_total: Option<u64>,
    pub order: Vec<String>,
    pub config: serde_json::Value,
    pub trace: Vec<TraceRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl StatsReport {
    /// A report for counting only.
    pub fn naive_only(naive: OpCount, config: serde_json::Value) -> Self {
        StatsReport {
            schema_version: STATS_SCHEMA_VERSION,
            naive: naive.into(),
            horner: None,
            cse: None,
            naive_total: naive.total(),
            horner_total: None,
            cse_total: None,
            order: Vec::new(),
            config,
            trace: Vec::new(),
            wall_time_ms: None,
        }
    }

    pub fn optimized(
        naive: OpCount,
        horner: OpCount,
        cse: OpCount,
        order: Vec<String>,
        config: serde_json::Value,
    ) -> Self {
        StatsReport {
            horner: Some(horner.into()),
            cse: Some(cse.into()),
            horner_total: Some(horner.total()),
            cse_total: Some(cse.total()),
            order,
            ..StatsReport::naive_only(naive, config)
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn emit_stats(report: &StatsReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("stats serialize");
    s.push('\n');
    s
}

pub const SWEEP_CSV_HEADER: &str = "cp,N,seed,best_total";

/// One CSV line for a sweep cell, without newline.
pub fn sweep_csv_row(row: &SweepRow) -> String {
    format!("{},{},{},{}", row.cp, row.expansions, row.seed, row.best_total)
}

/// Header plus one line per row.
pub fn emit_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&sweep_csv_row(row));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cse::{cse, instruction_count, replay};
    use crate::expr::{naive_op_count, parse_polynomial, Point};
    use crate::horner::{horner_transform, tree_op_count, VariableOrder};
    use num_rational::BigRational;

    const EQ2: &str = "y-3*x+5*x*z+2*x^2*y*z-3*x^2*y^2*z+5*x^2*y^2*z^2";

    fn eq2_code(ws: &Workspace) -> InstructionSeq {
        let p = parse_polynomial(EQ2, ws).unwrap();
        let order = VariableOrder::parse("x,y,z", ws).unwrap();
        cse(&horner_transform(&p, &order).unwrap())
    }

    fn point(ws: &Workspace, vals: &[(&str, i64, i64)]) -> Point {
        vals.iter().map(|&(n, a, b)| (ws.lookup(n).unwrap(), BigRational::new(a.into(), b.into()))).collect()
    }

    #[test]
    fn tac_for_introduction_example() {
        let ws = Workspace::new();
        let s = eq2_code(&ws);
        let text = emit_tac(&s, &ws);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 12);
        assert!(lines[11].starts_with("result = "));
        let shared = lines.iter().filter(|l| l.ends_with("= -3 + t0") || l.ends_with("= t0 + -3")).count();
        assert_eq!(shared, 1, "{text}");
    }

    #[test]
    fn tac_round_trips() {
        let ws = Workspace::new();
        let s = eq2_code(&ws);
        let back = parse_tac(&emit_tac(&s, &ws), &ws).unwrap();
        assert_eq!(back, s);
        let pt = point(&ws, &[("x", 2, 3), ("y", -5, 7), ("z", 11, 2)]);
        assert_eq!(replay(&back, &pt, &ws).unwrap(), replay(&s, &pt, &ws).unwrap());
    }

    #[test]
    fn constant_result_is_one_line() {
        let ws = Workspace::new();
        let s = InstructionSeq::new(vec![], Operand::Const(7.into()), false).unwrap();
        assert_eq!(emit_tac(&s, &ws), "result = 7\n");
        assert_eq!(parse_tac("result = 7", &ws).unwrap(), s);
        let neg = parse_tac("result = -7\n", &ws).unwrap();
        assert_eq!(neg.result, Operand::Const((-7).into()));
        assert!(!neg.negate_result);
    }

    #[test]
    fn single_add() {
        let ws = Workspace::new();
        let (a, b) = (ws.intern("a").unwrap(), ws.intern("b").unwrap());
        let s = InstructionSeq::new(
            vec![Instruction { dest: 0, op: OpKind::Add, lhs: Operand::Var(a), rhs: Operand::Var(b) }],
            Operand::Temp(0),
            false,
        )
        .unwrap();
        assert_eq!(emit_tac(&s, &ws), "t0 = a + b\nresult = t0\n");
    }

    #[test]
    fn negated_result_round_trips() {
        let ws = Workspace::new();
        let p = parse_polynomial("-x*y", &ws).unwrap();
        let s = cse(&horner_transform(&p, &VariableOrder::parse("x,y", &ws).unwrap()).unwrap());
        let text = emit_tac(&s, &ws);
        assert!(text.ends_with("result = -t0\n"), "{text}");
        assert_eq!(parse_tac(&text, &ws).unwrap(), s);
    }

    #[test]
    fn temp_names_avoid_variables() {
        let ws = Workspace::new();
        let p = parse_polynomial("t0*t1 + t1*t2 + 3", &ws).unwrap();
        let order = VariableOrder::parse("t1,t0,t2", &ws).unwrap();
        let s = cse(&horner_transform(&p, &order).unwrap());
        let text = emit_tac(&s, &ws);
        assert!(text.contains("t_0 = "), "{text}");
        assert_eq!(parse_tac(&text, &ws).unwrap(), s);
    }

    #[test]
    fn tac_errors_carry_lines() {
        let ws = Workspace::new();
        for (text, line) in [
            ("t0 = a + b\nt1 = t0 ^ b\nresult = t1", 2),
            ("t0 = a +\nresult = t0", 1),
            ("t0 = a + b\n", 2),
            ("result = a\nt0 = a + b", 2),
            ("t0 = a + b\nt0 = a * b\nresult = t0", 2),
        ] {
            match parse_tac(text, &ws) {
                Err(Error::Tac { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn c_function_shape() {
        let ws = Workspace::new();
        let s = eq2_code(&ws);
        let c = emit_c_like(&s, "eval_a", &ws).unwrap();
        assert!(c.contains("double eval_a(double y, double x, double z)"), "{c}");
        assert_eq!(c.matches(';').count(), s.len() + 1);
        assert!(c.contains("double precision"));
    }

    #[test]
    fn c_constant_and_single_mul() {
        let ws = Workspace::new();
        let s = InstructionSeq::new(vec![], Operand::Const(7.into()), false).unwrap();
        let c = emit_c_like(&s, "f", &ws).unwrap();
        assert!(c.contains("double f(void)") && c.contains("return 7.0;"), "{c}");
        let p = parse_polynomial("x*y", &ws).unwrap();
        let s = cse(&horner_transform(&p, &VariableOrder::parse("x,y", &ws).unwrap()).unwrap());
        let c = emit_c_like(&s, "f", &ws).unwrap();
        assert_eq!(c.matches(';').count(), 2);
        assert!(emit_c_like(&s, "2f", &ws).is_err());
        assert!(emit_c_like(&s, "int", &ws).is_err());
    }

    #[test]
    fn c_keywords_are_renamed() {
        let ws = Workspace::new();
        let p = parse_polynomial("int*double", &ws).unwrap();
        let s = cse(&horner_transform(&p, &VariableOrder::parse("int,double", &ws).unwrap()).unwrap());
        let c = emit_c_like(&s, "f", &ws).unwrap();
        assert!(c.contains("double int_, double double_"), "{c}");
    }

    #[test]
    fn stats_for_introduction_example() {
        let ws = Workspace::new();
        let p = parse_polynomial(EQ2, &ws).unwrap();
        let order = VariableOrder::parse("x,y,z", &ws).unwrap();
        let d = horner_transform(&p, &order).unwrap();
        let s = cse(&d);
        let report = StatsReport::optimized(
            naive_op_count(&p),
            tree_op_count(&d),
            instruction_count(&s),
            order.names(&ws),
            serde_json::json!({"method": "given-order"}),
        );
        let v: serde_json::Value = serde_json::from_str(&emit_stats(&report)).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["naive_total"], 23);
        assert_eq!(v["horner_total"], 13);
        assert_eq!(v["cse_total"], 11);
        assert_eq!(v["cse"]["adds"], 4);
        assert_eq!(v["trace"], serde_json::json!([]));
        assert!(v.get("wall_time_ms").is_none());
    }

    #[test]
    fn sweep_csv() {
        let rows = [
            SweepRow { cp: 0.1, expansions: 300, seed: 4, best_total: 41 },
            SweepRow { cp: 10.0, expansions: 3000, seed: 5, best_total: 40 },
        ];
        assert_eq!(emit_sweep_csv(&rows), "cp,N,seed,best_total\n0.1,300,4,41\n10,3000,5,40\n");
    }
}
