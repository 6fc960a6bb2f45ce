//! Multivariate Horner transform.
//!
//! For an order `[v, ...rest]` the terms are grouped by the exponent of `v`
//! and nested as `v^e1 * (c_e1 + v^(e2-e1) * (c_e2 + ...))`, with every
//! grouped coefficient `c_e` transformed recursively under `rest`. Exponent
//! gaps are bridged with repeated multiplication by `v`.
//!
//! Each multiplication by the extracted variable is its own binary node
//! `v * inner`, so `x*(y*(...))` stays nested rather than being flattened to
//! `x*y*(...)`. The nested inner expression is then a single shareable unit
//! for CSE. Sums are flattened.

use std::cmp::Ordering;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::expr::{OpCount, Point, Polynomial, Variable, Workspace};

/// Extraction order; position 0 is factored out first (outermost).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VariableOrder(Vec<Variable>);

impl VariableOrder {
    pub fn new(vars: Vec<Variable>) -> Result<Self> {
        let mut seen = vars.clone();
        seen.sort_unstable();
        for w in seen.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateVariable(format!("#{}", w[0].0)));
            }
        }
        Ok(VariableOrder(vars))
    }

    /// Resolves comma-separated variable names against `ws`.
    pub fn parse(text: &str, ws: &Workspace) -> Result<Self> {
        let vars = text
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|name| ws.lookup(name).ok_or_else(|| Error::UnknownVariable(name.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = vars.iter().find(|v| !seen.insert(**v)) {
            return Err(Error::DuplicateVariable(ws.name(*dup)));
        }
        Ok(VariableOrder(vars))
    }

    pub fn vars(&self) -> &[Variable] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self, ws: &Workspace) -> Vec<String> {
        self.0.iter().map(|&v| ws.name(v)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Const(BigInt),
    Var(Variable),
    Add(Vec<NodeId>),
    Mul(Vec<NodeId>),
}

/// Arena-backed n-ary expression. Nodes may be shared, in which case the
/// arena describes a DAG; costs are still counted as if it were a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprDag {
    nodes: Vec<Node>,
    root: NodeId,
}

impl ExprDag {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn evaluate(&self, point: &Point, ws: &Workspace) -> Result<BigRational> {
        let mut memo: Vec<Option<BigRational>> = vec![None; self.nodes.len()];
        self.eval_node(self.root, point, ws, &mut memo)
    }

    fn eval_node(
        &self,
        id: NodeId,
        point: &Point,
        ws: &Workspace,
        memo: &mut Vec<Option<BigRational>>,
    ) -> Result<BigRational> {
        if let Some(v) = &memo[id.0 as usize] {
            return Ok(v.clone());
        }
        let value = match self.node(id) {
            Node::Const(c) => BigRational::from_integer(c.clone()),
            Node::Var(v) => point.get(v).cloned().ok_or_else(|| Error::MissingAssignment(ws.name(*v)))?,
            Node::Add(children) => {
                let mut acc = BigRational::zero();
                for &c in children {
                    acc += self.eval_node(c, point, ws, memo)?;
                }
                acc
            }
            Node::Mul(children) => {
                let mut acc = BigRational::one();
                for &c in children {
                    acc *= self.eval_node(c, point, ws, memo)?;
                }
                acc
            }
        };
        memo[id.0 as usize] = Some(value.clone());
        Ok(value)
    }

    pub fn display<'a>(&'a self, ws: &Workspace) -> DagDisplay<'a> {
        DagDisplay { dag: self, names: ws.names() }
    }
}

/// Builds [`ExprDag`]s. [`add`](Self::add) and [`mul`](Self::mul) keep nodes
/// flattened with folded constants and canonically ordered children;
/// [`nest`](Self::nest) multiplies by a variable without flattening and
/// [`push_raw`](Self::push_raw) stores a node verbatim.
#[derive(Debug, Default)]
pub struct DagBuilder {
    nodes: Vec<Node>,
}

impl DagBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_raw(&mut self, node: Node) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(node);
        id
    }

    pub fn constant(&mut self, c: impl Into<BigInt>) -> NodeId {
        self.push_raw(Node::Const(c.into()))
    }

    pub fn var(&mut self, v: Variable) -> NodeId {
        self.push_raw(Node::Var(v))
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0 as usize]
    }

    pub fn finish(self, root: NodeId) -> ExprDag {
        ExprDag { nodes: self.nodes, root }
    }

    pub fn add(&mut self, children: impl IntoIterator<Item = NodeId>) -> NodeId {
        let mut constant = BigInt::zero();
        let mut rest = Vec::new();
        for c in children {
            match self.node(c) {
                Node::Add(grand) => {
                    for &g in grand {
                        match self.node(g) {
                            Node::Const(k) => constant += k,
                            _ => rest.push(g),
                        }
                    }
                }
                Node::Const(k) => constant += k,
                _ => rest.push(c),
            }
        }
        if rest.is_empty() {
            return self.constant(constant);
        }
        if constant.is_zero() && rest.len() == 1 {
            return rest[0];
        }
        self.sort_children(&mut rest);
        let mut children = Vec::with_capacity(rest.len() + 1);
        if !constant.is_zero() {
            children.push(self.constant(constant));
        }
        children.extend(rest);
        self.push_raw(Node::Add(children))
    }

    pub fn mul(&mut self, children: impl IntoIterator<Item = NodeId>) -> NodeId {
        let mut constant = BigInt::one();
        let mut rest = Vec::new();
        for c in children {
            match self.node(c) {
                Node::Mul(grand) => {
                    for &g in grand {
                        match self.node(g) {
                            Node::Const(k) => constant *= k,
                            _ => rest.push(g),
                        }
                    }
                }
                Node::Const(k) => constant *= k,
                _ => rest.push(c),
            }
        }
        if constant.is_zero() || rest.is_empty() {
            return self.constant(constant);
        }
        if constant.is_one() && rest.len() == 1 {
            return rest[0];
        }
        self.sort_children(&mut rest);
        let mut children = Vec::with_capacity(rest.len() + 1);
        if !constant.is_one() {
            children.push(self.constant(constant));
        }
        children.extend(rest);
        self.push_raw(Node::Mul(children))
    }

    /// `var * inner` as one binary node. Leaves are folded into an ordinary
    /// product; a composite `inner` is kept intact.
    pub fn nest(&mut self, var: Variable, inner: NodeId) -> NodeId {
        let v = self.var(var);
        match self.node(inner) {
            Node::Const(_) | Node::Var(_) => self.mul([v, inner]),
            _ => self.push_raw(Node::Mul(vec![v, inner])),
        }
    }

    fn sort_children(&self, children: &mut [NodeId]) {
        children.sort_by(|&a, &b| compare_nodes(&self.nodes, a, b));
    }
}

fn rank(node: &Node) -> u8 {
    match node {
        Node::Const(_) => 0,
        Node::Var(_) => 1,
        Node::Mul(_) => 2,
        Node::Add(_) => 3,
    }
}

/// Canonical structural order: constants by value, then variables by id,
/// then composites by kind and children lexicographically.
fn compare_nodes(nodes: &[Node], a: NodeId, b: NodeId) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let (na, nb) = (&nodes[a.0 as usize], &nodes[b.0 as usize]);
    match (na, nb) {
        (Node::Const(x), Node::Const(y)) => x.cmp(y),
        (Node::Var(x), Node::Var(y)) => x.cmp(y),
        (Node::Add(xs), Node::Add(ys)) | (Node::Mul(xs), Node::Mul(ys)) => {
            for (&x, &y) in xs.iter().zip(ys) {
                match compare_nodes(nodes, x, y) {
                    Ordering::Equal => continue,
                    other => return other,
                }
            }
            xs.len().cmp(&ys.len())
        }
        _ => rank(na).cmp(&rank(nb)),
    }
}

/// Polynomial in dense form for repeated Horner transforms under different
/// orders. Columns are the variables of the polynomial in ascending id order.
#[derive(Debug, Clone)]
pub struct PreparedPolynomial {
    vars: Vec<Variable>,
    exps: Vec<u32>,
    coeffs: Vec<BigInt>,
}

impl PreparedPolynomial {
    pub fn new(p: &Polynomial) -> Self {
        let vars = p.variables();
        let width = vars.len();
        let mut exps = vec![0u32; p.len() * width];
        let mut coeffs = Vec::with_capacity(p.len());
        for (row, (m, c)) in p.terms().enumerate() {
            for &(v, e) in m.factors() {
                let col = vars.binary_search(&v).expect("variable of p");
                exps[row * width + col] = e;
            }
            coeffs.push(c.clone());
        }
        PreparedPolynomial { vars, exps, coeffs }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    fn exp(&self, row: usize, col: usize) -> u32 {
        self.exps[row * self.vars.len() + col]
    }

    /// Maps an order onto column indices, checking it covers every variable.
    fn columns(&self, order: &VariableOrder, ws: Option<&Workspace>) -> Result<Vec<usize>> {
        let mut cols = Vec::with_capacity(self.vars.len());
        let mut covered = vec![false; self.vars.len()];
        for v in order.vars() {
            if let Ok(col) = self.vars.binary_search(v) {
                covered[col] = true;
                cols.push(col);
            }
        }
        if let Some(col) = covered.iter().position(|&c| !c) {
            let v = self.vars[col];
            let name = ws.map(|ws| ws.name(v)).unwrap_or_else(|| format!("#{}", v.0));
            return Err(Error::OrderMissingVariable(name));
        }
        Ok(cols)
    }

    pub fn transform(&self, order: &VariableOrder) -> Result<ExprDag> {
        let cols = self.columns(order, None)?;
        Ok(self.transform_columns(&cols))
    }

    /// Transform with an order already expressed as column indices; `cols`
    /// must be a permutation of `0..variables().len()`.
    pub fn transform_columns(&self, cols: &[usize]) -> ExprDag {
        let mut b = DagBuilder::new();
        let mut rows: Vec<usize> = (0..self.num_terms()).collect();
        let root = if rows.is_empty() { b.constant(0) } else { self.build(&mut b, &mut rows, cols) };
        b.finish(root)
    }

    fn build(&self, b: &mut DagBuilder, rows: &mut [usize], order: &[usize]) -> NodeId {
        if rows.len() == 1 {
            return self.monomial(b, rows[0], order);
        }
        let Some(pos) = order.iter().position(|&c| rows.iter().any(|&r| self.exp(r, c) > 0)) else {
            // All remaining exponents vanish; canonical input cannot reach this
            // with more than one row, but fold constants anyway.
            let leaves: Vec<NodeId> = rows.iter().map(|&r| b.constant(self.coeffs[r].clone())).collect();
            return b.add(leaves);
        };
        let col = order[pos];
        let rest = &order[pos + 1..];
        rows.sort_by_key(|&r| self.exp(r, col));

        let mut groups: Vec<(u32, std::ops::Range<usize>)> = Vec::new();
        let mut start = 0;
        for i in 1..=rows.len() {
            if i == rows.len() || self.exp(rows[i], col) != self.exp(rows[start], col) {
                groups.push((self.exp(rows[start], col), start..i));
                start = i;
            }
        }

        let var = self.vars[col];
        let (top_exp, top_range) = groups.pop().expect("at least one group");
        let mut acc = self.build(b, &mut rows[top_range], rest);
        let mut above = top_exp;
        while let Some((e, range)) = groups.pop() {
            let coeff = self.build(b, &mut rows[range], rest);
            let shifted = self.times_power(b, var, above - e, acc);
            acc = b.add([coeff, shifted]);
            above = e;
        }
        if above > 0 {
            acc = self.times_power(b, var, above, acc);
        }
        acc
    }

    fn times_power(&self, b: &mut DagBuilder, var: Variable, power: u32, node: NodeId) -> NodeId {
        (0..power).fold(node, |acc, _| b.nest(var, acc))
    }

    /// A single term restricted to the still-unprocessed variables.
    fn monomial(&self, b: &mut DagBuilder, row: usize, order: &[usize]) -> NodeId {
        let mut factors = vec![b.constant(self.coeffs[row].clone())];
        for &col in order {
            for _ in 0..self.exp(row, col) {
                let v = b.var(self.vars[col]);
                factors.push(v);
            }
        }
        b.mul(factors)
    }
}

/// Applies Horner's rule under `order`, which must cover every variable of `p`.
pub fn horner_transform(p: &Polynomial, order: &VariableOrder) -> Result<ExprDag> {
    PreparedPolynomial::new(p).transform(order)
}

/// Like [`horner_transform`] but names a missing variable in the error.
pub fn horner_transform_named(p: &Polynomial, order: &VariableOrder, ws: &Workspace) -> Result<ExprDag> {
    let prepared = PreparedPolynomial::new(p);
    let cols = prepared.columns(order, Some(ws))?;
    Ok(prepared.transform_columns(&cols))
}

/// Operation count of the expression read as a tree: shared nodes are paid
/// for at every use.
pub fn tree_op_count(d: &ExprDag) -> OpCount {
    let mut memo: Vec<Option<OpCount>> = vec![None; d.len()];
    count_node(d, d.root(), &mut memo)
}

fn count_node(d: &ExprDag, id: NodeId, memo: &mut Vec<Option<OpCount>>) -> OpCount {
    if let Some(c) = memo[id.0 as usize] {
        return c;
    }
    let count = match d.node(id) {
        Node::Const(_) | Node::Var(_) => OpCount::default(),
        Node::Add(children) => {
            let inner = children.iter().fold(OpCount::default(), |acc, &c| acc + count_node(d, c, memo));
            OpCount::new(inner.adds.saturating_add(children.len() as u64 - 1), inner.muls)
        }
        Node::Mul(children) => {
            let inner = children.iter().fold(OpCount::default(), |acc, &c| acc + count_node(d, c, memo));
            // Multiplying by a unit constant is a sign flip or a no-op.
            let units =
                children.iter().filter(|&&c| matches!(d.node(c), Node::Const(k) if k.abs().is_one())).count() as u64;
            let own = (children.len() as u64 - 1).saturating_sub(units);
            OpCount::new(inner.adds, inner.muls.saturating_add(own))
        }
    };
    memo[id.0 as usize] = Some(count);
    count
}

pub struct DagDisplay<'a> {
    dag: &'a ExprDag,
    names: Vec<String>,
}

impl DagDisplay<'_> {
    fn write_node(&self, out: &mut String, id: NodeId) {
        match self.dag.node(id) {
            Node::Const(c) => {
                let _ = write!(out, "{c}");
            }
            Node::Var(v) => out.push_str(&self.names[v.id()]),
            Node::Add(children) => {
                for (i, &c) in children.iter().enumerate() {
                    let mut s = String::new();
                    self.write_factor(&mut s, c, matches!(self.dag.node(c), Node::Add(_)));
                    if i > 0 && !s.starts_with('-') {
                        out.push('+');
                    }
                    out.push_str(&s);
                }
            }
            Node::Mul(children) => self.write_product(out, children),
        }
    }

    fn write_factor(&self, out: &mut String, id: NodeId, parens: bool) {
        if parens {
            out.push('(');
            self.write_node(out, id);
            out.push(')');
        } else {
            self.write_node(out, id);
        }
    }

    fn write_product(&self, out: &mut String, factors: &[NodeId]) {
        let (first, rest) = factors.split_first().expect("nonempty product");
        if matches!(self.dag.node(*first), Node::Const(k) if *k == BigInt::from(-1)) && !rest.is_empty() {
            out.push('-');
            return self.write_product(out, rest);
        }
        for (i, &id) in factors.iter().enumerate() {
            if i > 0 {
                out.push('*');
            }
            self.write_factor(out, id, matches!(self.dag.node(id), Node::Add(_) | Node::Mul(_)));
        }
    }
}

impl fmt::Display for DagDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        self.write_node(&mut out, self.dag.root());
        f.write_str(&out)
    }
}
