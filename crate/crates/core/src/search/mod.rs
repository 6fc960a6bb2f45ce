//! Variable order search.
//!
//! Every method scores an order the same way: Horner transform, then CSE,
//! then count instructions. [`mcts`] implements the tree search; this module
//! holds the shared evaluator, the baselines and the parameter sweep.

pub mod mcts;

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cse::{cse, instruction_count, InstructionSeq};
use crate::error::{Error, Result};
use crate::expr::{naive_op_count, occurrence_counts, OpCount, Polynomial, Variable};
use crate::horner::{PreparedPolynomial, VariableOrder};

pub use mcts::{mcts_optimize, order_from_path, uct_score, Direction, Mcts, MctsConfig, MctsNode};

/// Largest variable count [`exhaustive_search`] accepts by default.
pub const DEFAULT_EXHAUSTIVE_LIMIT: usize = 8;

/// Seeded generator used by all searches. ChaCha8 output is specified
/// independently of platform, so runs are reproducible everywhere.
pub fn search_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub expansion: usize,
    pub total: u64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_order: VariableOrder,
    pub best_cost: OpCount,
    pub best_code: InstructionSeq,
    pub trace: Vec<TraceRow>,
}

/// Scores orders of one polynomial, remembering every order it has seen.
/// Orders are given as column indices into [`Evaluator::variables`].
#[derive(Debug, Clone)]
pub struct Evaluator {
    prepared: PreparedPolynomial,
    naive_total: u64,
    cache: HashMap<Vec<usize>, OpCount>,
}

impl Evaluator {
    pub fn new(p: &Polynomial) -> Self {
        Evaluator {
            prepared: PreparedPolynomial::new(p),
            naive_total: naive_op_count(p).total(),
            cache: HashMap::new(),
        }
    }

    pub fn variables(&self) -> &[Variable] {
        self.prepared.variables()
    }

    pub fn naive_total(&self) -> u64 {
        self.naive_total
    }

    pub fn code(&self, cols: &[usize]) -> InstructionSeq {
        cse(&self.prepared.transform_columns(cols))
    }

    pub fn cost(&mut self, cols: &[usize]) -> OpCount {
        if let Some(&c) = self.cache.get(cols) {
            return c;
        }
        let c = instruction_count(&self.code(cols));
        self.cache.insert(cols.to_vec(), c);
        c
    }

    /// Original cost over optimized cost; larger is better. Orders that need
    /// no instructions at all score 1.
    pub fn score(&self, cost: OpCount) -> f64 {
        if cost.total() == 0 {
            1.0
        } else {
            self.naive_total as f64 / cost.total() as f64
        }
    }

    pub fn order(&self, cols: &[usize]) -> VariableOrder {
        VariableOrder::new(cols.iter().map(|&c| self.variables()[c]).collect()).expect("permutation")
    }

    fn result(&self, best: &[usize], best_cost: OpCount, trace: Vec<TraceRow>) -> SearchResult {
        SearchResult { best_order: self.order(best), best_cost, best_code: self.code(best), trace }
    }
}

/// Variables sorted by descending occurrence count, ties by ascending id.
pub fn occurrence_order(p: &Polynomial) -> VariableOrder {
    let counts = occurrence_counts(p);
    let mut vars = p.variables();
    vars.sort_by_key(|v| (std::cmp::Reverse(counts.get(v).copied().unwrap_or(0)), *v));
    VariableOrder::new(vars).expect("distinct variables")
}

/// Cost of a single order through Horner and CSE.
pub fn evaluate_order(p: &Polynomial, order: &VariableOrder) -> Result<SearchResult> {
    let prepared = PreparedPolynomial::new(p);
    let code = cse(&prepared.transform(order)?);
    let cost = instruction_count(&code);
    let score = if cost.total() == 0 { 1.0 } else { naive_op_count(p).total() as f64 / cost.total() as f64 };
    let best_order =
        VariableOrder::new(order.vars().iter().copied().filter(|v| prepared.variables().contains(v)).collect())?;
    Ok(SearchResult {
        best_order,
        best_cost: cost,
        best_code: code,
        trace: vec![TraceRow { expansion: 0, total: cost.total(), score }],
    })
}

/// Tries every order; the first optimum in lexicographic order wins.
pub fn exhaustive_search(p: &Polynomial, max_vars: usize) -> Result<SearchResult> {
    let mut eval = Evaluator::new(p);
    let v = eval.variables().len();
    if v > max_vars {
        return Err(Error::TooManyVariables { found: v, max: max_vars });
    }
    let mut best: Option<(Vec<usize>, OpCount)> = None;
    let mut trace = Vec::new();
    for (i, perm) in (0..v).permutations(v).enumerate() {
        let cost = eval.cost(&perm);
        trace.push(TraceRow { expansion: i, total: cost.total(), score: eval.score(cost) });
        if best.as_ref().is_none_or(|(_, b)| cost.total() < b.total()) {
            best = Some((perm, cost));
        }
    }
    let (order, cost) = best.expect("at least the empty permutation");
    Ok(eval.result(&order, cost, trace))
}

/// Histogram of optimized totals, keyed by total.
pub type CostHistogram = BTreeMap<u64, u64>;

/// Best of `samples` uniformly random orders.
pub fn random_order_search(p: &Polynomial, samples: usize, seed: u64) -> Result<(SearchResult, CostHistogram)> {
    if samples == 0 {
        return Err(Error::Config("at least one sample is required".into()));
    }
    let mut eval = Evaluator::new(p);
    let mut rng = search_rng(seed);
    let mut cols: Vec<usize> = (0..eval.variables().len()).collect();
    let mut best: Option<(Vec<usize>, OpCount)> = None;
    let mut trace = Vec::with_capacity(samples);
    let mut histogram = CostHistogram::new();
    for i in 0..samples {
        cols.shuffle(&mut rng);
        let cost = eval.cost(&cols);
        trace.push(TraceRow { expansion: i, total: cost.total(), score: eval.score(cost) });
        *histogram.entry(cost.total()).or_default() += 1;
        if best.as_ref().is_none_or(|(_, b)| cost.total() < b.total()) {
            best = Some((cols.clone(), cost));
        }
    }
    let (order, cost) = best.expect("samples >= 1");
    Ok((eval.result(&order, cost, trace), histogram))
}

/// One cell of a parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub cp: f64,
    pub expansions: usize,
    pub seed: u64,
    pub best_total: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub cps: Vec<f64>,
    pub expansions: Vec<usize>,
    /// Number of seeds per `(cp, N)` cell; seed `k` of a cell is `base_seed + k`.
    pub seeds: u64,
    pub base_seed: u64,
    pub direction: Direction,
}

/// Runs one MCTS per grid cell, in parallel. Rows come back in grid order
/// (`cp` outermost, then `N`, then seed) and each row can be reproduced by
/// a single [`mcts_optimize`] call with the same parameters.
pub fn sweep(p: &Polynomial, grid: &SweepGrid) -> Result<Vec<SweepRow>> {
    if grid.cps.is_empty() || grid.expansions.is_empty() || grid.seeds == 0 {
        return Err(Error::Config("sweep grid must be nonempty".into()));
    }
    let cells: Vec<(f64, usize, u64)> = grid
        .cps
        .iter()
        .flat_map(|&cp| {
            grid.expansions
                .iter()
                .flat_map(move |&n| (0..grid.seeds).map(move |k| (cp, n, grid.base_seed.wrapping_add(k))))
        })
        .collect();
    let base = Evaluator::new(p);
    cells
        .into_par_iter()
        .map(|(cp, expansions, seed)| {
            let cfg = MctsConfig::new(expansions, cp, grid.direction, seed)?;
            let result = Mcts::with_evaluator(base.clone(), cfg).run();
            Ok(SweepRow { cp, expansions, seed, best_total: result.best_cost.total() })
        })
        .collect()
}
