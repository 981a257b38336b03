use crate::algebra::{LabelAlgebra, StarQuantale};
use crate::error::{Error, Result};

type Scalar<L> = <<L as LabelAlgebra>::Scalar as StarQuantale>::Elem;

/// A Kleisli endomorphism of a (weighted) labelled transition monad, as a matrix over a label algebra.
///
/// Acceptance is modelled as a visible step into a terminal sink: `accept[x]` weighs `x -✓→ sink`
/// and `halt` is the weight of the sink's own silent loop. Raw steps have `halt = bottom`, the
/// identity has `halt = one`. Setting `halt = one` everywhere gives back the usual sticky
/// acceptance `✓ ∈ f(x) or ✓ ∈ g(y)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatrixEndo<L: LabelAlgebra> {
    alg: L,
    dim: usize,
    cells: Vec<L::Elem>,
    accept: Vec<Scalar<L>>,
    halt: Scalar<L>,
}

impl<L: LabelAlgebra> MatrixEndo<L> {
    pub fn bottom(alg: L, dim: usize) -> Self {
        let s = alg.scalar().bottom();
        MatrixEndo { cells: vec![alg.bottom(); dim * dim], accept: vec![s.clone(); dim], halt: s, dim, alg }
    }

    pub fn identity(alg: L, dim: usize) -> Self {
        let mut m = Self::bottom(alg, dim);
        for x in 0..dim {
            m.cells[x * dim + x] = m.alg.one();
        }
        m.halt = m.alg.scalar().one();
        m
    }

    pub fn algebra(&self) -> &L {
        &self.alg
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cell(&self, x: usize, y: usize) -> &L::Elem {
        &self.cells[x * self.dim + y]
    }

    pub fn weight(&self, x: usize, label: usize, y: usize) -> Scalar<L> {
        self.alg.weight(self.cell(x, y), label)
    }

    /// Joins `w` into the `(x, label, y)` entry.
    pub fn add_step(&mut self, x: usize, label: usize, y: usize, w: Scalar<L>) {
        let q = self.alg.scalar();
        let cell = &mut self.cells[x * self.dim + y];
        let joined = q.join(&self.alg.weight(cell, label), &w);
        self.alg.set_weight(cell, label, joined);
    }

    pub fn accept(&self, x: usize) -> &Scalar<L> {
        &self.accept[x]
    }

    pub fn add_accept(&mut self, x: usize, w: Scalar<L>) {
        self.accept[x] = self.alg.scalar().join(&self.accept[x], &w);
    }

    pub fn halt(&self) -> &Scalar<L> {
        &self.halt
    }

    pub fn set_halt(&mut self, w: Scalar<L>) {
        self.halt = w;
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.alg != other.alg {
            return Err(Error::BackendMismatch(format!(
                "{} on {} states vs {} on {} states",
                self.alg.name(),
                self.dim,
                other.alg.name(),
                other.dim
            )));
        }
        Ok(())
    }

    /// `self` followed by `g`.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        self.check(g)?;
        let n = self.dim;
        let a = &self.alg;
        let q = a.scalar();
        let mut out = Self::bottom(a.clone(), n);
        for x in 0..n {
            for y in 0..n {
                let f_xy = self.cell(x, y);
                if a.is_bottom(f_xy) {
                    continue;
                }
                for z in 0..n {
                    let g_yz = g.cell(y, z);
                    if a.is_bottom(g_yz) {
                        continue;
                    }
                    let cell = &mut out.cells[x * n + z];
                    *cell = a.join(cell, &a.mult(f_xy, g_yz));
                }
            }
        }
        for x in 0..n {
            let mut acc = q.mult(&self.accept[x], &g.halt);
            for y in 0..n {
                let t = a.weight(self.cell(x, y), 0);
                if !q.is_bottom(&t) && !q.is_bottom(&g.accept[y]) {
                    acc = q.join(&acc, &q.mult(&t, &g.accept[y]));
                }
            }
            out.accept[x] = acc;
        }
        out.halt = q.mult(&self.halt, &g.halt);
        Ok(out)
    }

    pub fn join(&self, g: &Self) -> Result<Self> {
        self.check(g)?;
        let a = &self.alg;
        let q = a.scalar();
        Ok(MatrixEndo {
            alg: a.clone(),
            dim: self.dim,
            cells: self.cells.iter().zip(&g.cells).map(|(x, y)| a.join(x, y)).collect(),
            accept: self.accept.iter().zip(&g.accept).map(|(x, y)| q.join(x, y)).collect(),
            halt: q.join(&self.halt, &g.halt),
        })
    }

    pub fn leq(&self, g: &Self) -> Result<bool> {
        self.check(g)?;
        let a = &self.alg;
        let q = a.scalar();
        Ok(self.cells.iter().zip(&g.cells).all(|(x, y)| a.leq(x, y))
            && self.accept.iter().zip(&g.accept).all(|(x, y)| q.leq(x, y))
            && q.leq(&self.halt, &g.halt))
    }

    /// Least saturated endomorphism above `self ∨ id`, by Floyd–Warshall–Kleene elimination.
    pub fn star(&self) -> Self {
        let n = self.dim;
        let a = &self.alg;
        let q = a.scalar();
        let mut m = self.cells.clone();
        for k in 0..n {
            let s = a.star(&m[k * n + k]);
            let col: Vec<L::Elem> = (0..n).map(|i| m[i * n + k].clone()).collect();
            let row: Vec<L::Elem> = (0..n).map(|j| m[k * n + j].clone()).collect();
            for i in 0..n {
                if a.is_bottom(&col[i]) {
                    continue;
                }
                let left = a.mult(&col[i], &s);
                for j in 0..n {
                    if a.is_bottom(&row[j]) {
                        continue;
                    }
                    let cell = &mut m[i * n + j];
                    *cell = a.join(cell, &a.mult(&left, &row[j]));
                }
            }
        }
        for x in 0..n {
            m[x * n + x] = a.join(&m[x * n + x], &a.one());
        }
        let halt_star = q.star(&self.halt);
        let mut accept = Vec::with_capacity(n);
        for x in 0..n {
            let mut acc = q.bottom();
            for y in 0..n {
                let t = a.weight(&m[x * n + y], 0);
                if !q.is_bottom(&t) && !q.is_bottom(&self.accept[y]) {
                    acc = q.join(&acc, &q.mult(&t, &self.accept[y]));
                }
            }
            accept.push(q.mult(&acc, &halt_star));
        }
        MatrixEndo { alg: a.clone(), dim: n, cells: m, accept, halt: halt_star }
    }

    /// Non-bottom `(x, label, y, weight)` entries in row-major, label order.
    pub fn steps(&self) -> Vec<(usize, usize, usize, Scalar<L>)> {
        let q = self.alg.scalar();
        let mut out = Vec::new();
        for x in 0..self.dim {
            for y in 0..self.dim {
                let c = self.cell(x, y);
                if self.alg.is_bottom(c) {
                    continue;
                }
                for l in 0..self.alg.labels() {
                    let w = self.alg.weight(c, l);
                    if !q.is_bottom(&w) {
                        out.push((x, l, y, w));
                    }
                }
            }
        }
        out.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
        out
    }

    /// For state `x`: per `(label, block)` the join of weights into that block, then the accept weight.
    pub fn quotient_row(&self, x: usize, block_of: &[usize]) -> (Vec<(usize, usize, Scalar<L>)>, Scalar<L>) {
        let q = self.alg.scalar();
        let mut cells: std::collections::BTreeMap<(usize, usize), Scalar<L>> = Default::default();
        for y in 0..self.dim {
            let c = self.cell(x, y);
            if self.alg.is_bottom(c) {
                continue;
            }
            for l in 0..self.alg.labels() {
                let w = self.alg.weight(c, l);
                if q.is_bottom(&w) {
                    continue;
                }
                let e = cells.entry((l, block_of[y])).or_insert_with(|| q.bottom());
                *e = q.join(e, &w);
            }
        }
        (cells.into_iter().map(|((l, b), w)| (l, b, w)).collect(), self.accept[x].clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{BoolQuantale, Cost, LabelQuantale, Labelled, MaxPlus};

    fn lts(n: usize, labels: usize, steps: &[(usize, usize, usize)]) -> MatrixEndo<LabelQuantale> {
        let mut m = MatrixEndo::bottom(LabelQuantale { labels }, n);
        for &(x, l, y) in steps {
            m.add_step(x, l, y, true);
        }
        m
    }

    #[test]
    fn compose_examples() {
        // x-σ→y then y-τ→z gives x-σ→z
        let f = lts(3, 3, &[(0, 1, 1)]);
        let g = lts(3, 3, &[(1, 0, 2)]);
        assert!(f.compose(&g).unwrap().weight(0, 1, 2));
        // two visible steps do not compose
        let g2 = lts(3, 3, &[(1, 2, 2)]);
        let c = f.compose(&g2).unwrap();
        assert!(c.steps().is_empty());
        // max-plus costs add
        let alg = Labelled { inner: MaxPlus, labels: 2 };
        let mut f = MatrixEndo::bottom(alg.clone(), 3);
        f.add_step(0, 1, 1, Cost::Finite(2));
        let mut g = MatrixEndo::bottom(alg, 3);
        g.add_step(1, 0, 2, Cost::Finite(3));
        assert_eq!(f.compose(&g).unwrap().weight(0, 1, 2), Cost::Finite(5));
    }

    #[test]
    fn fig2_star() {
        // s0-τ→s0, s0-σ→s1, s0-τ→s2, s1-τ→s2, s2-θ→s2 with σ=1, θ=2
        let f = lts(3, 3, &[(0, 0, 0), (0, 1, 1), (0, 0, 2), (1, 0, 2), (2, 2, 2)]);
        let s = f.star();
        let want = lts(
            3,
            3,
            &[
                (0, 0, 0),
                (0, 1, 1),
                (0, 0, 2),
                (1, 0, 2),
                (2, 2, 2),
                (0, 1, 2),
                (0, 2, 2),
                (1, 0, 1),
                (1, 2, 2),
                (2, 0, 2),
            ],
        );
        assert_eq!(s.steps(), want.steps());
    }

    #[test]
    fn maxplus_loop_star_is_infinite() {
        let alg = Labelled { inner: MaxPlus, labels: 1 };
        let mut f = MatrixEndo::bottom(alg, 1);
        f.add_step(0, 0, 0, Cost::Finite(1));
        assert_eq!(f.star().weight(0, 0, 0), Cost::Infinite);
    }

    #[test]
    fn accept_is_a_visible_sink_step() {
        let alg = Labelled { inner: BoolQuantale, labels: 2 };
        // x-σ→y, y accepts: composing with anything after the accept loses it unless g halts
        let mut f = MatrixEndo::bottom(alg.clone(), 2);
        f.add_accept(1, true);
        let mut g = MatrixEndo::bottom(alg.clone(), 2);
        g.add_step(0, 1, 1, true);
        let id = MatrixEndo::identity(alg, 2);
        assert_eq!(f.compose(&id).unwrap(), f);
        assert_eq!(id.compose(&f).unwrap(), f);
        assert!(!*f.compose(&g).unwrap().accept(1));
        let mut tau = g.clone();
        tau.add_step(0, 0, 1, true);
        assert!(*tau.compose(&f).unwrap().accept(0));
        assert!(*tau.star().compose(&f.star()).unwrap().accept(0));
    }
}
