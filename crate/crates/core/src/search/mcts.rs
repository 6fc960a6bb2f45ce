//! Monte Carlo tree search over variable orders.
//!
//! A node at depth `d` fixes `d` variables; its children extend that prefix
//! by one of the remaining variables. Each expansion cycle selects by UCT
//! while the current node is fully expanded, adds one random unexpanded
//! child, completes the order at random, scores it, and backpropagates the
//! score to the root. The best order seen in any simulation is returned.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{search_rng, Evaluator, SearchResult, TraceRow};
use crate::error::{Error, Result};
use crate::expr::{OpCount, Polynomial, Variable};

/// Which end of the order the tree decides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Tree picks the outermost variables, first pick at position 0.
    Front,
    /// Tree picks the innermost variables, first pick at the last position.
    Back,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Front => "front",
            Direction::Back => "back",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "front" => Ok(Direction::Front),
            "back" => Ok(Direction::Back),
            other => Err(Error::Config(format!("unknown direction `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MctsConfig {
    pub expansions: usize,
    pub cp: f64,
    pub direction: Direction,
    pub seed: u64,
}

impl MctsConfig {
    pub fn new(expansions: usize, cp: f64, direction: Direction, seed: u64) -> Result<Self> {
        if expansions == 0 {
            return Err(Error::Config("number of tree expansions must be at least 1".into()));
        }
        if !(cp.is_finite() && cp > 0.0) {
            return Err(Error::Config(format!("exploration constant must be positive, got {cp}")));
        }
        Ok(MctsConfig { expansions, cp, direction, seed })
    }
}

#[derive(Debug, Clone)]
pub struct MctsNode {
    /// Column picked at this node; `None` at the root.
    pub chosen: Option<usize>,
    pub parent: Option<usize>,
    pub depth: usize,
    pub children: Vec<usize>,
    /// Columns not yet expanded as children.
    pub untried: Vec<usize>,
    pub visits: u64,
    pub score_sum: f64,
}

impl MctsNode {
    pub fn mean_score(&self) -> f64 {
        self.score_sum / self.visits as f64
    }

    pub fn is_fully_expanded(&self) -> bool {
        self.untried.is_empty()
    }
}

/// `<x> + 2 cp sqrt(2 ln(n_parent) / n_child)`, infinite for unvisited children.
pub fn uct_score(child: &MctsNode, parent_visits: u64, cp: f64) -> f64 {
    if child.visits == 0 {
        return f64::INFINITY;
    }
    let n = child.visits as f64;
    child.score_sum / n + 2.0 * cp * (2.0 * (parent_visits as f64).ln() / n).sqrt()
}

/// Combines the tree's picks with the randomly ordered rest.
///
/// `Front` yields `path ++ remaining`. `Back` yields `remaining ++ reverse(path)`,
/// so the first pick becomes the innermost variable.
pub fn order_from_path<T: Copy>(path: &[T], remaining: &[T], direction: Direction) -> Vec<T> {
    let mut order = Vec::with_capacity(path.len() + remaining.len());
    match direction {
        Direction::Front => {
            order.extend_from_slice(path);
            order.extend_from_slice(remaining);
        }
        Direction::Back => {
            order.extend_from_slice(remaining);
            order.extend(path.iter().rev());
        }
    }
    order
}

/// One search instance. Strictly sequential; run several with different
/// seeds to parallelize.
#[derive(Debug)]
pub struct Mcts {
    eval: Evaluator,
    cfg: MctsConfig,
    rng: ChaCha8Rng,
    nodes: Vec<MctsNode>,
    best: Option<(Vec<usize>, OpCount)>,
    trace: Vec<TraceRow>,
}

impl Mcts {
    pub fn new(p: &Polynomial, cfg: MctsConfig) -> Self {
        Self::with_evaluator(Evaluator::new(p), cfg)
    }

    pub fn with_evaluator(eval: Evaluator, cfg: MctsConfig) -> Self {
        let width = eval.variables().len();
        let root = MctsNode {
            chosen: None,
            parent: None,
            depth: 0,
            children: Vec::new(),
            untried: (0..width).collect(),
            visits: 0,
            score_sum: 0.0,
        };
        Mcts { eval, cfg, rng: search_rng(cfg.seed), nodes: vec![root], best: None, trace: Vec::new() }
    }

    pub fn nodes(&self) -> &[MctsNode] {
        &self.nodes
    }

    pub fn variables(&self) -> &[Variable] {
        self.eval.variables()
    }

    pub fn trace(&self) -> &[TraceRow] {
        &self.trace
    }

    /// Descends by UCT from the root while nodes are fully expanded.
    fn select(&self) -> usize {
        let mut s = 0;
        while self.nodes[s].is_fully_expanded() && !self.nodes[s].children.is_empty() {
            let parent_visits = self.nodes[s].visits.max(1);
            let mut best = self.nodes[s].children[0];
            let mut best_uct = f64::NEG_INFINITY;
            for &c in &self.nodes[s].children {
                let u = uct_score(&self.nodes[c], parent_visits, self.cfg.cp);
                if u > best_uct {
                    best = c;
                    best_uct = u;
                }
            }
            s = best;
        }
        s
    }

    /// Adds one random unexpanded child, or returns `s` unchanged when its
    /// order is already complete.
    fn expand(&mut self, s: usize) -> usize {
        if self.nodes[s].untried.is_empty() {
            return s;
        }
        let pick = self.rng.random_range(0..self.nodes[s].untried.len());
        let col = self.nodes[s].untried.swap_remove(pick);
        let path = self.path(s);
        let untried: Vec<usize> = (0..self.eval.variables().len()).filter(|c| *c != col && !path.contains(c)).collect();
        let child = self.nodes.len();
        self.nodes.push(MctsNode {
            chosen: Some(col),
            parent: Some(s),
            depth: self.nodes[s].depth + 1,
            children: Vec::new(),
            untried,
            visits: 0,
            score_sum: 0.0,
        });
        self.nodes[s].children.push(child);
        child
    }

    /// Columns chosen from the root down to `s`.
    pub fn path(&self, mut s: usize) -> Vec<usize> {
        let mut path = Vec::with_capacity(self.nodes[s].depth);
        while let Some(col) = self.nodes[s].chosen {
            path.push(col);
            s = self.nodes[s].parent.expect("non-root has a parent");
        }
        path.reverse();
        path
    }

    fn simulate(&mut self, s: usize) -> (OpCount, f64) {
        let path = self.path(s);
        let mut remaining: Vec<usize> = (0..self.eval.variables().len()).filter(|c| !path.contains(c)).collect();
        remaining.shuffle(&mut self.rng);
        let order = order_from_path(&path, &remaining, self.cfg.direction);
        let cost = self.eval.cost(&order);
        if self.best.as_ref().is_none_or(|(_, b)| cost.total() < b.total()) {
            self.best = Some((order, cost));
        }
        (cost, self.eval.score(cost))
    }

    fn backpropagate(&mut self, mut s: usize, delta: f64) {
        loop {
            let node = &mut self.nodes[s];
            node.score_sum += delta;
            node.visits += 1;
            match node.parent {
                Some(parent) => s = parent,
                None => break,
            }
        }
    }

    /// One select / expand / simulate / backpropagate cycle.
    pub fn step(&mut self) {
        let selected = self.select();
        let leaf = self.expand(selected);
        let (cost, score) = self.simulate(leaf);
        self.trace.push(TraceRow { expansion: self.trace.len(), total: cost.total(), score });
        self.backpropagate(leaf, score);
    }

    pub fn run(mut self) -> SearchResult {
        for _ in 0..self.cfg.expansions {
            self.step();
        }
        self.finish()
    }

    pub fn finish(self) -> SearchResult {
        let (order, cost) = match self.best {
            Some(best) => best,
            None => {
                let cols: Vec<usize> = (0..self.eval.variables().len()).collect();
                let mut eval = self.eval.clone();
                let cost = eval.cost(&cols);
                (cols, cost)
            }
        };
        self.eval.result(&order, cost, self.trace)
    }
}

/// Runs `cfg.expansions` cycles of MCTS on `p`.
pub fn mcts_optimize(p: &Polynomial, cfg: &MctsConfig) -> SearchResult {
    Mcts::new(p, *cfg).run()
}
