use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::quantale::StarQuantale;

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct AxiomResult {
    pub axiom: &'static str,
    pub checked: usize,
    pub failures: usize,
    pub counterexample: Option<String>,
}

impl AxiomResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantaleReport {
    pub instance: String,
    pub samples: usize,
    pub axioms: Vec<AxiomResult>,
}

impl QuantaleReport {
    pub fn all_pass(&self) -> bool {
        self.axioms.iter().all(AxiomResult::passed)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.axioms.iter().filter(|a| !a.passed()).map(|a| a.axiom).collect()
    }
}

struct Tally {
    results: Vec<AxiomResult>,
}

impl Tally {
    fn record(&mut self, axiom: &'static str, ok: bool, witness: impl FnOnce() -> String) {
        let slot = match self.results.iter().position(|r| r.axiom == axiom) {
            Some(i) => i,
            None => {
                self.results.push(AxiomResult { axiom, checked: 0, failures: 0, counterexample: None });
                self.results.len() - 1
            }
        };
        let r = &mut self.results[slot];
        r.checked += 1;
        if !ok {
            r.failures += 1;
            if r.counterexample.is_none() {
                r.counterexample = Some(witness());
            }
        }
    }
}

/// Checks the quantale and star axioms on `sample_count` random triples.
pub fn verify_quantale<Q: StarQuantale>(q: &Q, sample_count: usize, seed: u64) -> QuantaleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally { results: Vec::new() };
    let one = q.one();
    let bot = q.bottom();
    for _ in 0..sample_count.max(1) {
        let a = q.sample(&mut rng);
        let b = q.sample(&mut rng);
        let c = q.sample(&mut rng);
        let show = || format!("a={a:?} b={b:?} c={c:?}");

        t.record("mult-associative", q.mult(&q.mult(&a, &b), &c) == q.mult(&a, &q.mult(&b, &c)), show);
        t.record("left-unit", q.mult(&one, &a) == a, show);
        t.record("right-unit", q.mult(&a, &one) == a, show);
        t.record("join-associative", q.join(&q.join(&a, &b), &c) == q.join(&a, &q.join(&b, &c)), show);
        t.record("join-commutative", q.join(&a, &b) == q.join(&b, &a), show);
        t.record("join-idempotent", q.join(&a, &a) == a, show);
        t.record("bottom-neutral", q.join(&a, &bot) == a, show);
        t.record(
            "bottom-annihilates",
            q.mult(&a, &bot) == bot && q.mult(&bot, &a) == bot,
            show,
        );
        t.record(
            "left-distributive",
            q.mult(&a, &q.join(&b, &c)) == q.join(&q.mult(&a, &b), &q.mult(&a, &c)),
            show,
        );
        t.record(
            "right-distributive",
            q.mult(&q.join(&a, &b), &c) == q.join(&q.mult(&a, &c), &q.mult(&b, &c)),
            show,
        );
        let s = q.star(&a);
        t.record("star-unfold", s == q.join(&one, &q.mult(&a, &s)), show);
        t.record("star-idempotent", q.star(&s) == s, show);
        // least prefixed point: any b with 1 ∨ a·b ≤ b lies above star(a)
        let pre = q.join(&one, &q.mult(&a, &b));
        t.record("star-least", !q.leq(&pre, &b) || q.leq(&s, &b), show);
    }
    QuantaleReport { instance: q.name(), samples: sample_count, axioms: t.results }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::quantale::*;
    use rand::{Rng, RngCore};

    /// Integers mod 5 under max and addition: a monoid and a semilattice, but
    /// addition wraps around and so does not distribute over max.
    #[derive(Clone, Debug)]
    struct Broken;

    impl StarQuantale for Broken {
        type Elem = u8;
        fn name(&self) -> String {
            "broken".into()
        }
        fn bottom(&self) -> u8 {
            0
        }
        fn one(&self) -> u8 {
            0
        }
        fn join(&self, a: &u8, b: &u8) -> u8 {
            *a.max(b)
        }
        fn mult(&self, a: &u8, b: &u8) -> u8 {
            (a + b) % 5
        }
        fn star(&self, _a: &u8) -> u8 {
            4
        }
        fn sample(&self, rng: &mut dyn RngCore) -> u8 {
            rng.gen_range(0..5)
        }
    }

    #[test]
    fn builtins_pass() {
        assert!(verify_quantale(&BoolQuantale, 100, 1).all_pass());
        assert!(verify_quantale(&MaxPlus, 100, 1).all_pass());
        assert!(verify_quantale(&MinTimes, 100, 1).all_pass());
        assert!(verify_quantale(&LabelQuantale { labels: 4 }, 100, 1).all_pass());
        assert!(verify_quantale(&Labelled { inner: MaxPlus, labels: 3 }, 100, 1).all_pass());
        for d in WeightDomain::ALL {
            let r = verify_quantale(&d, 200, 5);
            assert!(r.all_pass(), "{:?}", r.failed());
        }
    }

    #[test]
    fn broken_instance_is_caught() {
        let r = verify_quantale(&Broken, 200, 2);
        let failed = r.failed();
        assert!(failed.contains(&"left-distributive"), "{failed:?}");
        assert!(r.axioms.iter().find(|a| a.axiom == "left-distributive").unwrap().counterexample.is_some());
    }
}
