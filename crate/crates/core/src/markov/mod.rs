//! Finite homogeneous Markov chains: hitting probabilities and lumping by equal hitting
//! probabilities into classes.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::equivalence::Partition;
use crate::error::{Error, Result};
use crate::linear::solve;
use crate::rational::{format_rational, in_unit_interval, parse_rational, to_f64, Rational};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Str(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub states: Vec<String>,
    pub rows: Vec<Vec<Entry>>,
    /// Observable labels; lumping never merges differently labelled states.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovChain {
    states: Vec<String>,
    p: Vec<Vec<Rational>>,
    labels: Option<Vec<String>>,
}

impl MarkovChain {
    /// Validates a row-stochastic matrix of exact rationals.
    pub fn new(states: Vec<String>, p: Vec<Vec<Rational>>) -> Result<Self> {
        let n = states.len();
        if n == 0 {
            return Err(Error::validation("states", "at least one state is required"));
        }
        let mut seen = BTreeSet::new();
        for (i, s) in states.iter().enumerate() {
            if !seen.insert(s) {
                return Err(Error::validation(format!("states[{i}]"), format!("duplicate state {s}")));
            }
        }
        if p.len() != n {
            return Err(Error::validation("rows", format!("expected {n} rows, got {}", p.len())));
        }
        for (i, row) in p.iter().enumerate() {
            if row.len() != n {
                return Err(Error::validation(format!("rows[{i}]"), format!("expected {n} entries, got {}", row.len())));
            }
            for (j, v) in row.iter().enumerate() {
                if !in_unit_interval(v) {
                    return Err(Error::validation(format!("rows[{i}][{j}]"), "probability outside [0,1]"));
                }
            }
            let total: Rational = row.iter().sum();
            if !total.is_one() {
                return Err(Error::validation(format!("rows[{i}]"), format!("row sums to {}", format_rational(&total))));
            }
        }
        Ok(MarkovChain { states, p, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::validation("labels", format!("expected {} labels, got {}", self.len(), labels.len())));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn from_file(file: &ChainFile) -> Result<Self> {
        let mut p = Vec::with_capacity(file.rows.len());
        for (i, row) in file.rows.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (j, e) in row.iter().enumerate() {
                out.push(match e {
                    Entry::Int(k) => Rational::from_integer((*k).into()),
                    Entry::Str(s) => parse_rational(s)
                        .ok_or_else(|| Error::validation(format!("rows[{i}][{j}]"), format!("not a rational: {s}")))?,
                });
            }
            p.push(out);
        }
        let chain = MarkovChain::new(file.states.clone(), p)?;
        match &file.labels {
            Some(l) => chain.with_labels(l.clone()),
            None => Ok(chain),
        }
    }

    pub fn to_file(&self) -> ChainFile {
        ChainFile {
            states: self.states.clone(),
            rows: self.p.iter().map(|r| r.iter().map(|v| Entry::Str(format_rational(v))).collect()).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.p
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn matrix_f64(&self) -> Vec<Vec<f64>> {
        self.p.iter().map(|r| r.iter().map(to_f64).collect()).collect()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// States with a path of positive probability into `target`.
    pub fn can_reach(&self, target: &BTreeSet<usize>) -> Vec<bool> {
        let n = self.len();
        let mut reach = vec![false; n];
        let mut queue: VecDeque<usize> = target.iter().copied().collect();
        for &t in target {
            reach[t] = true;
        }
        while let Some(j) = queue.pop_front() {
            for i in 0..n {
                if !reach[i] && !self.p[i][j].is_zero() {
                    reach[i] = true;
                    queue.push_back(i);
                }
            }
        }
        reach
    }

    /// Closed communicating classes, ordered by least member.
    pub fn closed_classes(&self) -> Vec<BTreeSet<usize>> {
        let n = self.len();
        let reach: Vec<Vec<bool>> = (0..n).map(|j| self.can_reach(&BTreeSet::from([j]))).collect();
        // reach[j][i]: i reaches j
        let mut out = Vec::new();
        let mut done = vec![false; n];
        for i in 0..n {
            if done[i] {
                continue;
            }
            let class: BTreeSet<usize> = (0..n).filter(|&j| reach[j][i] && reach[i][j]).collect();
            for &j in &class {
                done[j] = true;
            }
            let closed = (0..n).all(|j| !reach[j][i] || class.contains(&j));
            if closed {
                out.push(class);
            }
        }
        out
    }
}

pub fn parse_chain(doc: &str) -> Result<MarkovChain> {
    let file: ChainFile = serde_json::from_str(doc)?;
    MarkovChain::from_file(&file)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    Exact,
    ValueIteration { tol: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum HitValues {
    Exact(Vec<Rational>),
    Approx(Vec<f64>),
}

impl HitValues {
    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            HitValues::Exact(v) => v.iter().map(to_f64).collect(),
            HitValues::Approx(v) => v.clone(),
        }
    }

    pub fn render(&self) -> Vec<String> {
        match self {
            HitValues::Exact(v) => v.iter().map(format_rational).collect(),
            HitValues::Approx(v) => v.iter().map(|x| format!("{x:.12}")).collect(),
        }
    }
}

/// Probability of ever entering `target` from each state.
#[derive(Clone, Debug, PartialEq)]
pub struct HittingVector {
    pub target: Vec<usize>,
    pub values: HitValues,
    /// Sweeps used by value iteration; zero for exact solves.
    pub iterations: usize,
}

fn check_target(chain: &MarkovChain, target: &BTreeSet<usize>) -> Result<()> {
    if target.is_empty() {
        return Err(Error::EmptyTarget);
    }
    if let Some(&t) = target.iter().find(|&&t| t >= chain.len()) {
        return Err(Error::validation("target", format!("state index {t} out of range")));
    }
    Ok(())
}

/// Iteration cap for value iteration.
pub const MAX_SWEEPS: usize = 1_000_000;

pub fn hitting(chain: &MarkovChain, target: &BTreeSet<usize>, method: Method) -> Result<HittingVector> {
    check_target(chain, target)?;
    let tgt: Vec<usize> = target.iter().copied().collect();
    Ok(match method {
        Method::Exact => HittingVector { target: tgt, values: HitValues::Exact(hitting_exact(chain, target)), iterations: 0 },
        Method::ValueIteration { tol } => {
            let (v, iterations) = value_iteration(chain, target, tol, MAX_SWEEPS);
            HittingVector { target: tgt, values: HitValues::Approx(v), iterations }
        }
    })
}

/// Minimal non-negative solution: states that cannot reach the target get 0, the rest solve
/// `p = P·p` off the target with `p = 1` on it. The reduced system is nonsingular.
fn hitting_exact(chain: &MarkovChain, target: &BTreeSet<usize>) -> Vec<Rational> {
    let n = chain.len();
    let reach = chain.can_reach(target);
    let free: Vec<usize> = (0..n).filter(|i| reach[*i] && !target.contains(i)).collect();
    let pos: BTreeMap<usize, usize> = free.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let m = free.len();
    let mut a = vec![vec![Rational::zero(); m]; m];
    let mut b = vec![Rational::zero(); m];
    for (k, &i) in free.iter().enumerate() {
        a[k][k] = Rational::one();
        for j in 0..n {
            let pij = &chain.p[i][j];
            if pij.is_zero() {
                continue;
            }
            if target.contains(&j) {
                b[k] += pij;
            } else if let Some(&l) = pos.get(&j) {
                a[k][l] -= pij;
            }
        }
    }
    let sol = solve(&a, &b).expect("reduced hitting system is nonsingular");
    (0..n)
        .map(|i| {
            if target.contains(&i) {
                Rational::one()
            } else {
                pos.get(&i).map_or_else(Rational::zero, |&k| sol[k].clone())
            }
        })
        .collect()
}

/// Jacobi sweeps from the target indicator; iterates rise monotonically to the hitting
/// probabilities. Stops once a sweep moves no coordinate by `tol` or more.
pub fn value_iteration(chain: &MarkovChain, target: &BTreeSet<usize>, tol: f64, max_sweeps: usize) -> (Vec<f64>, usize) {
    let p = chain.matrix_f64();
    let n = chain.len();
    let mut x: Vec<f64> = (0..n).map(|i| if target.contains(&i) { 1.0 } else { 0.0 }).collect();
    for sweep in 1..=max_sweeps {
        let next: Vec<f64> = (0..n)
            .map(|i| if target.contains(&i) { 1.0 } else { (0..n).map(|j| p[i][j] * x[j]).sum::<f64>().min(1.0) })
            .collect();
        let delta = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = next;
        if delta < tol {
            return (x, sweep);
        }
    }
    (x, max_sweeps)
}

/// Largest gap between `p_i` and `sup_{n ≤ n_max} Σ_j p_j·Pⁿ(i, j)` off the target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceReport {
    pub n_max: usize,
    pub max_deviation: f64,
}

pub fn check_lemma_recurrence(chain: &MarkovChain, target: &BTreeSet<usize>, n_max: usize) -> Result<RecurrenceReport> {
    check_target(chain, target)?;
    let hit = hitting(chain, target, Method::Exact)?.values.to_f64();
    let p = chain.matrix_f64();
    let n = chain.len();
    // v_n = Pⁿ·hit, so Σ_j p_j Pⁿ(i,j) = v_n(i)
    let mut v = hit.clone();
    let mut sup = hit.clone();
    for _ in 1..=n_max {
        v = (0..n).map(|i| (0..n).map(|j| p[i][j] * v[j]).sum()).collect();
        for i in 0..n {
            sup[i] = sup[i].max(v[i]);
        }
    }
    let max_deviation =
        (0..n).filter(|i| !target.contains(i)).map(|i| (sup[i] - hit[i]).abs()).fold(0.0, f64::max);
    Ok(RecurrenceReport { n_max, max_deviation })
}

/// Kleene chain of `x ↦ f♯ ∨ x∘P` from bottom, with `f` the quotient map onto the blocks of
/// `partition` and ∨ the pointwise max. Entry `[i][b]` approximates hitting block `b` from `i`.
pub fn fixpoint_chain(chain: &MarkovChain, partition: &Partition, n_max: usize) -> Vec<Vec<f64>> {
    let p = chain.matrix_f64();
    let n = chain.len();
    let k = partition.num_blocks();
    let fsharp = |i: usize, b: usize| if partition.block_of()[i] == b { 1.0f64 } else { 0.0 };
    let mut x = vec![vec![0.0; k]; n];
    for _ in 0..n_max {
        x = (0..n)
            .map(|i| (0..k).map(|b| fsharp(i, b).max((0..n).map(|j| p[i][j] * x[j][b]).sum())).collect())
            .collect();
    }
    x
}

/// Arithmetic used when comparing hitting values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Precision {
    Exact,
    Float { tol: f64 },
}

/// Hitting probabilities into each block, as exact values or floats.
fn block_hitting(chain: &MarkovChain, blocks: &[BTreeSet<usize>], prec: Precision) -> Vec<HitValues> {
    blocks
        .iter()
        .map(|b| match prec {
            Precision::Exact => HitValues::Exact(hitting_exact(chain, b)),
            Precision::Float { .. } => HitValues::Approx(hitting_float(chain, b)),
        })
        .collect()
}

/// Same zero-set reduction as the exact solve, in floating point with partial pivoting.
fn hitting_float(chain: &MarkovChain, target: &BTreeSet<usize>) -> Vec<f64> {
    let n = chain.len();
    let p = chain.matrix_f64();
    let reach = chain.can_reach(target);
    let free: Vec<usize> = (0..n).filter(|i| reach[*i] && !target.contains(i)).collect();
    let m = free.len();
    let mut a = vec![vec![0.0; m + 1]; m];
    for (k, &i) in free.iter().enumerate() {
        a[k][k] = 1.0;
        for (l, &j) in free.iter().enumerate() {
            a[k][l] -= p[i][j];
        }
        a[k][m] = target.iter().map(|&j| p[i][j]).sum();
    }
    for col in 0..m {
        let piv = (col..m).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs())).expect("non-empty");
        a.swap(col, piv);
        let d = a[col][col];
        for c in col..=m {
            a[col][c] /= d;
        }
        for r in 0..m {
            if r != col && a[r][col] != 0.0 {
                let f = a[r][col];
                for c in col..=m {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let mut out: Vec<f64> = (0..n).map(|i| if target.contains(&i) { 1.0 } else { 0.0 }).collect();
    for (k, &i) in free.iter().enumerate() {
        out[i] = a[k][m].clamp(0.0, 1.0);
    }
    out
}

/// Groups states by (current block, hitting vector); float vectors join the first earlier
/// group within `tol` in every coordinate.
fn split(prev: &[usize], hits: &[HitValues], prec: Precision) -> Partition {
    let n = prev.len();
    match prec {
        Precision::Exact => {
            let keys: Vec<(usize, Vec<Rational>)> = (0..n)
                .map(|i| {
                    let v = hits
                        .iter()
                        .map(|h| match h {
                            HitValues::Exact(v) => v[i].clone(),
                            HitValues::Approx(_) => unreachable!("exact mode"),
                        })
                        .collect();
                    (prev[i], v)
                })
                .collect();
            Partition::from_labels(&keys)
        }
        Precision::Float { tol } => {
            let vecs: Vec<Vec<f64>> = (0..n).map(|i| hits.iter().map(|h| h.to_f64()[i]).collect()).collect();
            let mut reps: Vec<usize> = Vec::new();
            let mut label = vec![0usize; n];
            for i in 0..n {
                let found = reps.iter().position(|&r| {
                    prev[r] == prev[i] && vecs[r].iter().zip(&vecs[i]).all(|(a, b)| (a - b).abs() <= tol)
                });
                label[i] = match found {
                    Some(k) => k,
                    None => {
                        reps.push(i);
                        reps.len() - 1
                    }
                };
            }
            Partition::from_labels(&label)
        }
    }
}

fn to_sets(p: &Partition) -> Vec<BTreeSet<usize>> {
    p.blocks().into_iter().map(|b| b.into_iter().collect()).collect()
}

/// Starting partition for lumping: the chain's labels when present, otherwise the vector of
/// absorption probabilities into each closed class.
pub fn initial_partition(chain: &MarkovChain, prec: Precision) -> Partition {
    match chain.labels() {
        Some(l) => Partition::from_labels(l),
        None => {
            let closed = chain.closed_classes();
            split(&vec![0; chain.len()], &block_hitting(chain, &closed, prec), prec)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lumping {
    pub partition: Partition,
    pub rounds: usize,
}

/// Refines the initial partition until every block agrees on the probability of hitting each
/// block.
pub fn coarsest_lumping(chain: &MarkovChain, prec: Precision) -> Lumping {
    let mut p = initial_partition(chain, prec);
    let mut rounds = 0;
    loop {
        rounds += 1;
        let hits = block_hitting(chain, &to_sets(&p), prec);
        let next = split(p.block_of(), &hits, prec);
        if next == p {
            return Lumping { partition: p, rounds };
        }
        p = next;
    }
}

/// A related pair and a block on which their hitting probabilities differ.
pub fn lumping_violation(chain: &MarkovChain, r: &Partition, prec: Precision) -> Option<(usize, usize, usize)> {
    let hits = block_hitting(chain, &to_sets(r), prec);
    for block in r.blocks() {
        let x = block[0];
        for &y in &block[1..] {
            for (b, h) in hits.iter().enumerate() {
                let differ = match (h, prec) {
                    (HitValues::Exact(v), _) => v[x] != v[y],
                    (HitValues::Approx(v), Precision::Float { tol }) => (v[x] - v[y]).abs() > tol,
                    (HitValues::Approx(v), Precision::Exact) => v[x] != v[y],
                };
                if differ {
                    return Some((x, y, b));
                }
            }
        }
    }
    None
}
