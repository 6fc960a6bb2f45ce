//! Common subexpression elimination by binarization and hash-consing.
//!
//! Every n-ary node becomes a left-associated chain over its canonically
//! ordered children. Each binary step is looked up in a table keyed on
//! `(op, lhs, rhs)` with commutative operands sorted, so structurally equal
//! steps share one temporary. Signs never cost an instruction: a `-1` factor
//! is carried outward as a flag until an addition turns it into a
//! subtraction, and a sign left at the root is attached to the result.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::expr::{OpCount, Point, Variable, Workspace};
use crate::horner::{DagBuilder, ExprDag, Node, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Operand {
    Const(BigInt),
    Var(Variable),
    Temp(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpKind {
    Add,
    Sub,
    Mul,
}

impl OpKind {
    pub fn symbol(self) -> char {
        match self {
            OpKind::Add => '+',
            OpKind::Sub => '-',
            OpKind::Mul => '*',
        }
    }

    fn is_commutative(self) -> bool {
        !matches!(self, OpKind::Sub)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instruction {
    pub dest: u32,
    pub op: OpKind,
    pub lhs: Operand,
    pub rhs: Operand,
}

/// Straight-line code. Instruction `k` writes temporary `k`; the value of
/// the whole sequence is `result`, negated when `negate_result` is set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InstructionSeq {
    pub instructions: Vec<Instruction>,
    pub result: Operand,
    pub negate_result: bool,
}

impl InstructionSeq {
    /// Builds a sequence from parts, enforcing dense destinations,
    /// definition before use and the absence of duplicate instructions.
    pub fn new(instructions: Vec<Instruction>, result: Operand, negate_result: bool) -> Result<Self> {
        let mut seen = HashMap::new();
        for (k, ins) in instructions.iter().enumerate() {
            if ins.dest as usize != k {
                return Err(Error::Tac { line: k + 1, message: format!("expected destination t{k}") });
            }
            for operand in [&ins.lhs, &ins.rhs] {
                if let Operand::Temp(t) = operand {
                    if *t as usize >= k {
                        return Err(Error::Tac { line: k + 1, message: format!("t{t} used before definition") });
                    }
                }
            }
            if seen.insert(canonical_key(ins.op, &ins.lhs, &ins.rhs), k).is_some() {
                return Err(Error::Tac { line: k + 1, message: "duplicate instruction".into() });
            }
        }
        if let Operand::Temp(t) = result {
            if t as usize >= instructions.len() {
                return Err(Error::Tac { line: instructions.len() + 1, message: format!("result t{t} is undefined") });
            }
        }
        Ok(InstructionSeq { instructions, result, negate_result })
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Variables referenced anywhere in the code, ascending by id.
    pub fn variables(&self) -> Vec<Variable> {
        let mut vars: Vec<Variable> = self
            .instructions
            .iter()
            .flat_map(|i| [&i.lhs, &i.rhs])
            .chain(std::iter::once(&self.result))
            .filter_map(|o| match o {
                Operand::Var(v) => Some(*v),
                _ => None,
            })
            .collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    /// Rebuilds an expression that mirrors the instructions one to one:
    /// every temporary becomes one shared binary node.
    pub fn to_dag(&self) -> ExprDag {
        let mut b = DagBuilder::new();
        let mut temps: Vec<NodeId> = Vec::with_capacity(self.instructions.len());
        let leaf = |b: &mut DagBuilder, temps: &[NodeId], o: &Operand| match o {
            Operand::Const(c) => b.constant(c.clone()),
            Operand::Var(v) => b.var(*v),
            Operand::Temp(t) => temps[*t as usize],
        };
        for ins in &self.instructions {
            let lhs = leaf(&mut b, &temps, &ins.lhs);
            let rhs = leaf(&mut b, &temps, &ins.rhs);
            let node = match ins.op {
                OpKind::Add => b.push_raw(Node::Add(vec![lhs, rhs])),
                OpKind::Mul => b.push_raw(Node::Mul(vec![lhs, rhs])),
                OpKind::Sub => {
                    let minus = b.constant(-1);
                    let neg = b.push_raw(Node::Mul(vec![minus, rhs]));
                    b.push_raw(Node::Add(vec![lhs, neg]))
                }
            };
            temps.push(node);
        }
        let mut root = leaf(&mut b, &temps, &self.result);
        if self.negate_result {
            let minus = b.constant(-1);
            root = b.push_raw(Node::Mul(vec![minus, root]));
        }
        b.finish(root)
    }
}

fn canonical_key(op: OpKind, lhs: &Operand, rhs: &Operand) -> (OpKind, Operand, Operand) {
    if op.is_commutative() && rhs < lhs {
        (op, rhs.clone(), lhs.clone())
    } else {
        (op, lhs.clone(), rhs.clone())
    }
}

struct Lowering<'a> {
    dag: &'a ExprDag,
    memo: Vec<Option<(Operand, bool)>>,
    table: HashMap<(OpKind, Operand, Operand), u32>,
    out: Vec<Instruction>,
}

impl Lowering<'_> {
    fn emit(&mut self, op: OpKind, lhs: Operand, rhs: Operand) -> Operand {
        let key = canonical_key(op, &lhs, &rhs);
        if let Some(&t) = self.table.get(&key) {
            return Operand::Temp(t);
        }
        let dest = self.out.len() as u32;
        let (op, lhs, rhs) = key.clone();
        self.out.push(Instruction { dest, op, lhs, rhs });
        self.table.insert(key, dest);
        Operand::Temp(dest)
    }

    /// Returns an operand and whether its value must be negated.
    fn lower(&mut self, id: NodeId) -> (Operand, bool) {
        if let Some(done) = &self.memo[id.0 as usize] {
            return done.clone();
        }
        let lowered = match self.dag.node(id) {
            Node::Const(c) => (Operand::Const(c.clone()), false),
            Node::Var(v) => (Operand::Var(*v), false),
            Node::Add(children) => {
                let mut parts = children.iter().map(|&c| self.lower(c)).collect::<Vec<_>>().into_iter();
                let (mut acc, sign) = parts.next().expect("nonempty sum");
                for (operand, negated) in parts {
                    let op = if negated == sign { OpKind::Add } else { OpKind::Sub };
                    acc = self.emit(op, acc, operand);
                }
                (acc, sign)
            }
            Node::Mul(children) => {
                let mut negated = false;
                let mut factors = Vec::with_capacity(children.len());
                for &c in children {
                    match self.dag.node(c) {
                        Node::Const(k) => {
                            negated ^= k.is_negative();
                            if !k.abs().is_one() {
                                factors.push(Operand::Const(k.abs()));
                            }
                        }
                        _ => {
                            let (operand, neg) = self.lower(c);
                            negated ^= neg;
                            factors.push(operand);
                        }
                    }
                }
                let mut factors = factors.into_iter();
                let mut acc = factors.next().unwrap_or(Operand::Const(BigInt::one()));
                for f in factors {
                    acc = self.emit(OpKind::Mul, acc, f);
                }
                (acc, negated)
            }
        };
        self.memo[id.0 as usize] = Some(lowered.clone());
        lowered
    }
}

/// Lowers `d` to straight-line code, sharing structurally identical steps.
pub fn cse(d: &ExprDag) -> InstructionSeq {
    let mut lowering = Lowering { dag: d, memo: vec![None; d.len()], table: HashMap::new(), out: Vec::new() };
    let (result, negated) = lowering.lower(d.root());
    // Fold the sign into a constant result rather than flagging it.
    let (result, negate_result) = match result {
        Operand::Const(c) if negated => (Operand::Const(-c), false),
        other => (other, negated),
    };
    InstructionSeq { instructions: lowering.out, result, negate_result }
}

/// Subtractions count as additions.
pub fn instruction_count(s: &InstructionSeq) -> OpCount {
    let muls = s.instructions.iter().filter(|i| i.op == OpKind::Mul).count() as u64;
    OpCount::new(s.instructions.len() as u64 - muls, muls)
}

/// Runs the code with exact arithmetic.
pub fn replay(s: &InstructionSeq, point: &Point, ws: &Workspace) -> Result<BigRational> {
    let mut temps: Vec<BigRational> = Vec::with_capacity(s.instructions.len());
    let value = |temps: &[BigRational], o: &Operand| -> Result<BigRational> {
        Ok(match o {
            Operand::Const(c) => BigRational::from_integer(c.clone()),
            Operand::Var(v) => point.get(v).cloned().ok_or_else(|| Error::MissingAssignment(ws.name(*v)))?,
            Operand::Temp(t) => temps[*t as usize].clone(),
        })
    };
    for ins in &s.instructions {
        let (a, b) = (value(&temps, &ins.lhs)?, value(&temps, &ins.rhs)?);
        temps.push(match ins.op {
            OpKind::Add => a + b,
            OpKind::Sub => a - b,
            OpKind::Mul => a * b,
        });
    }
    let out = value(&temps, &s.result)?;
    Ok(if s.negate_result { -out } else { out })
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_polynomial;
    use crate::horner::{horner_transform, tree_op_count, VariableOrder};

    const EQ2: &str = "y-3*x+5*x*z+2*x^2*y*z-3*x^2*y^2*z+5*x^2*y^2*z^2";

    fn ws_with(names: &[&str]) -> Workspace {
        let ws = Workspace::new();
        for n in names {
            ws.intern(n).unwrap();
        }
        ws
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn introduction_example_shares_the_inner_sum() {
        let ws = ws_with(&["x", "y", "z"]);
        let p = parse_polynomial(EQ2, &ws).unwrap();
        let d = horner_transform(&p, &VariableOrder::parse("x,y,z", &ws).unwrap()).unwrap();
        let s = cse(&d);
        assert_eq!(instruction_count(&s), OpCount::new(4, 7));
        assert_eq!(s.len(), 11);
        let inner =
            s.instructions.iter().filter(|i| i.op == OpKind::Add && i.lhs == Operand::Const((-3).into())).count();
        assert_eq!(inner, 1);
        let pt: Point = (0..3).map(|i| (Variable(i), q(1))).collect();
        assert_eq!(replay(&s, &pt, &ws).unwrap(), q(7));
    }

    #[test]
    fn square_of_a_sum() {
        let ws = ws_with(&["a", "b"]);
        let mut b = DagBuilder::new();
        let (x, y) = (b.var(Variable(0)), b.var(Variable(1)));
        let s1 = b.add([x, y]);
        let (x2, y2) = (b.var(Variable(0)), b.var(Variable(1)));
        let s2 = b.add([y2, x2]);
        let root = b.mul([s1, s2]);
        let d = b.finish(root);
        let s = cse(&d);
        assert_eq!(
            s.instructions,
            vec![
                Instruction {
                    dest: 0,
                    op: OpKind::Add,
                    lhs: Operand::Var(Variable(0)),
                    rhs: Operand::Var(Variable(1))
                },
                Instruction { dest: 1, op: OpKind::Mul, lhs: Operand::Temp(0), rhs: Operand::Temp(0) },
            ]
        );
        assert_eq!(instruction_count(&s), OpCount::new(1, 1));
        assert_eq!(tree_op_count(&d), OpCount::new(2, 1));
        let pt: Point = [(Variable(0), q(1)), (Variable(1), q(2))].into();
        assert_eq!(replay(&s, &pt, &ws).unwrap(), q(9));
    }

    #[test]
    fn constants_and_plain_sums() {
        let ws = ws_with(&["a", "b"]);
        let mut b = DagBuilder::new();
        let c = b.constant(7);
        let s = cse(&b.finish(c));
        assert!(s.is_empty());
        assert_eq!(s.result, Operand::Const(7.into()));
        assert_eq!(instruction_count(&s), OpCount::default());
        assert_eq!(replay(&s, &Point::new(), &ws).unwrap(), q(7));

        let mut b = DagBuilder::new();
        let (x, y) = (b.var(Variable(0)), b.var(Variable(1)));
        let root = b.add([x, y]);
        let s = cse(&b.finish(root));
        let pt: Point = [(Variable(0), q(1)), (Variable(1), q(2))].into();
        assert_eq!(replay(&s, &pt, &ws).unwrap(), q(3));
        assert_eq!(instruction_count(&s), OpCount::new(1, 0));
    }

    #[test]
    fn signs_become_subtractions() {
        let ws = ws_with(&["a0", "a1", "b0", "b1"]);
        let p = parse_polynomial("a1*b0 - a0*b1", &ws).unwrap();
        let d = horner_transform(&p, &VariableOrder::parse("a0,a1,b0,b1", &ws).unwrap()).unwrap();
        let s = cse(&d);
        assert_eq!(instruction_count(&s), OpCount::new(1, 2));
        assert!(s.instructions.iter().any(|i| i.op == OpKind::Sub));

        let p = parse_polynomial("-a0*b1 - a1*b0", &ws).unwrap();
        let d = horner_transform(&p, &VariableOrder::parse("a0,a1,b0,b1", &ws).unwrap()).unwrap();
        let s = cse(&d);
        assert!(s.negate_result);
        assert_eq!(instruction_count(&s), OpCount::new(1, 2));
        let pt: Point = (0..4).map(|i| (Variable(i), q(i as i64 + 1))).collect();
        assert_eq!(replay(&s, &pt, &ws).unwrap(), p.evaluate(&pt, &ws).unwrap());

        let p = parse_polynomial("-7", &ws).unwrap();
        let s = cse(&horner_transform(&p, &VariableOrder::new(vec![]).unwrap()).unwrap());
        assert_eq!((s.result.clone(), s.negate_result), (Operand::Const((-7).into()), false));
    }

    #[test]
    fn tree_with_nothing_to_share_keeps_its_cost() {
        let ws = ws_with(&["x", "y", "z"]);
        let p = parse_polynomial("1 + 2*x + 3*y + 4*z", &ws).unwrap();
        let d = horner_transform(&p, &VariableOrder::parse("x,y,z", &ws).unwrap()).unwrap();
        assert_eq!(instruction_count(&cse(&d)), tree_op_count(&d));
    }

    #[test]
    fn rebuilt_code_has_the_same_cost() {
        let ws = ws_with(&["x", "y", "z"]);
        let p = parse_polynomial(EQ2, &ws).unwrap();
        let d = horner_transform(&p, &VariableOrder::parse("z,x,y", &ws).unwrap()).unwrap();
        let s = cse(&d);
        let again = cse(&s.to_dag());
        assert_eq!(instruction_count(&again), instruction_count(&s));
    }

    #[test]
    fn constructor_validates_code() {
        let add = |dest, lhs, rhs| Instruction { dest, op: OpKind::Add, lhs, rhs };
        let x = Operand::Var(Variable(0));
        assert!(InstructionSeq::new(vec![add(0, x.clone(), x.clone())], Operand::Temp(0), false).is_ok());
        assert!(InstructionSeq::new(vec![add(1, x.clone(), x.clone())], Operand::Temp(0), false).is_err());
        assert!(InstructionSeq::new(vec![add(0, Operand::Temp(0), x.clone())], Operand::Temp(0), false).is_err());
        assert!(InstructionSeq::new(vec![add(0, x.clone(), x.clone())], Operand::Temp(3), false).is_err());
        let dup = vec![add(0, x.clone(), Operand::Const(1.into())), add(1, Operand::Const(1.into()), x.clone())];
        assert!(InstructionSeq::new(dup, Operand::Temp(1), false).is_err());
    }
}
