//! Seeded generators for random endomorphisms, systems and chains (tests and benchmarks).

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Cost, Likelihood, StarQuantale, Weight, WeightDomain};
use crate::effects::{Backend, ConvexEndo, Dist, EffectEndo, Outcome};
use num_traits::{One, Zero};

use crate::rational::{rat, Rational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed from `TIMEDEQ_SEED` when set, otherwise `default`.
pub fn seed_from_env(default: u64) -> u64 {
    std::env::var("TIMEDEQ_SEED").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(default)
}

/// A random non-bottom transition weight.
pub fn weight(rng: &mut dyn RngCore, d: WeightDomain) -> Weight {
    match d {
        WeightDomain::Bool => Weight::Bool(true),
        WeightDomain::NatInfMaxPlus => {
            if rng.gen_bool(0.05) {
                Weight::Cost(Cost::Infinite)
            } else {
                Weight::Cost(Cost::Finite(rng.gen_range(0..4)))
            }
        }
        WeightDomain::UnitMinTimes => {
            let den = rng.gen_range(1..5);
            Weight::Likelihood(Likelihood::Value(rat(rng.gen_range(0..=den), den)))
        }
    }
}

/// A random sub-distribution with at most `support` points over `dim` states and `labels` labels.
pub fn dist(rng: &mut dyn RngCore, dim: usize, labels: usize, support: usize, accept: bool) -> Dist {
    let k = rng.gen_range(1..=support.max(1));
    let den = [1i64, 2, 3, 4][rng.gen_range(0..4)];
    let mut remaining = den;
    let mut d = Dist::zero();
    for i in 0..k {
        if remaining == 0 {
            break;
        }
        let w = if i + 1 == k { remaining } else { rng.gen_range(1..=remaining) };
        remaining -= w;
        let o = if accept && rng.gen_bool(0.15) {
            Outcome::Accept
        } else {
            Outcome::Step { label: rng.gen_range(0..labels), state: rng.gen_range(0..dim) }
        };
        d.add(o, &rat(w, den));
    }
    if rng.gen_bool(0.1) {
        // occasionally lose some mass
        d = d.scaled(&Rational::new(1.into(), 2.into()));
    }
    d
}

/// A random endo with roughly `density` of the possible entries present.
///
/// Convex rows get one or two generators when `full_rows`, otherwise they may stay empty.
pub fn endo(rng: &mut dyn RngCore, backend: Backend, dim: usize, labels: usize, density: f64, full_rows: bool) -> EffectEndo {
    match backend {
        Backend::Convex => {
            let mut rows = Vec::with_capacity(dim);
            for _ in 0..dim {
                let n = if full_rows { rng.gen_range(1..=2) } else { rng.gen_range(0..=2) };
                rows.push((0..n).map(|_| dist(rng, dim, labels, 2, true)).collect());
            }
            EffectEndo::Convex(ConvexEndo::from_generators(rows))
        }
        _ => {
            let mut e = EffectEndo::bottom(backend, dim, labels);
            for x in 0..dim {
                for y in 0..dim {
                    for l in 0..labels {
                        if rng.gen_bool(density) {
                            add_step(&mut e, x, l, y, rng);
                        }
                    }
                }
                if rng.gen_bool(density / 2.0) {
                    add_accept(&mut e, x, rng);
                }
            }
            e
        }
    }
}

fn add_step(e: &mut EffectEndo, x: usize, l: usize, y: usize, rng: &mut dyn RngCore) {
    match e {
        EffectEndo::NonDet(m) => m.add_step(x, l, y, true),
        EffectEndo::Weighted(m) => {
            let w = weight(rng, m.algebra().inner);
            m.add_step(x, l, y, w)
        }
        EffectEndo::Convex(_) => unreachable!("matrix backends only"),
    }
}

fn add_accept(e: &mut EffectEndo, x: usize, rng: &mut dyn RngCore) {
    match e {
        EffectEndo::NonDet(m) => m.add_accept(x, true),
        EffectEndo::Weighted(m) => {
            let w = weight(rng, m.algebra().inner);
            m.add_accept(x, w)
        }
        EffectEndo::Convex(_) => unreachable!("matrix backends only"),
    }
}

/// Sampled quantale element that is not bottom.
pub fn non_bottom<Q: StarQuantale>(q: &Q, rng: &mut dyn RngCore) -> Q::Elem {
    loop {
        let a = q.sample(rng);
        if !q.is_bottom(&a) {
            return a;
        }
    }
}

/// Shape of a random system.
#[derive(Clone, Debug)]
pub struct SystemShape {
    pub backend: Backend,
    pub states: usize,
    /// Visible labels (τ comes on top).
    pub visible: usize,
    pub durations: Vec<u64>,
    /// Probability of each possible matrix entry; convex rows get 0 to 2 generators.
    pub density: f64,
    pub tau: bool,
    pub accept: bool,
    /// Zero-duration moves only go to higher-numbered states, so no cycle takes zero time.
    pub non_zeno: bool,
}

impl SystemShape {
    pub fn new(backend: Backend, states: usize) -> Self {
        SystemShape { backend, states, visible: 2, durations: vec![0, 1, 2], density: 0.15, tau: true, accept: true, non_zeno: false }
    }
}

/// A random system; state `i` is named `s{i}`, visible labels `a`, `b`, ….
pub fn system(rng: &mut dyn RngCore, shape: &SystemShape) -> crate::systems::TimedSystem {
    use crate::systems::TimedSystem;
    let states: Vec<String> = (0..shape.states).map(|i| format!("s{i}")).collect();
    let alphabet: Vec<String> = (0..shape.visible).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let mut sys = TimedSystem::new(states, alphabet, shape.durations.clone(), shape.backend).expect("valid shape");
    let first_label = if shape.tau { 0 } else { 1 };
    let labels = shape.visible + 1;
    for &t in &shape.durations {
        for x in 0..shape.states {
            match shape.backend {
                Backend::Convex => {
                    let n = rng.gen_range(0..=2);
                    for _ in 0..n {
                        let mut d = dist(rng, shape.states, labels, 2, shape.accept);
                        if !shape.tau {
                            d = Dist::from_pairs(d.iter().map(|(o, w)| match o {
                                Outcome::Step { label: 0, state } => (Outcome::Step { label: 1, state: *state }, w.clone()),
                                o => (*o, w.clone()),
                            }));
                        }
                        if shape.non_zeno && t == 0 {
                            // outcomes pointing backwards lose their mass
                            d = Dist::from_pairs(
                                d.iter()
                                    .filter(|(o, _)| !matches!(o, Outcome::Step { state, .. } if *state <= x))
                                    .map(|(o, w)| (*o, w.clone())),
                            );
                        }
                        sys.add_generator(x, t, d).expect("in range");
                    }
                }
                b => {
                    let d = match b {
                        Backend::Weighted(d) => d,
                        _ => WeightDomain::Bool,
                    };
                    for y in 0..shape.states {
                        if shape.non_zeno && t == 0 && y <= x {
                            continue;
                        }
                        for l in first_label..labels {
                            if rng.gen_bool(shape.density) {
                                sys.add_step(x, l, t, y, weight(rng, d)).expect("in range");
                            }
                        }
                    }
                    if shape.accept && rng.gen_bool(shape.density) {
                        sys.add_accept(x, t, weight(rng, d)).expect("in range");
                    }
                }
            }
        }
    }
    sys
}

/// The same system read in another matrix backend (weights must make sense there).
pub fn recast(sys: &crate::systems::TimedSystem, backend: Backend) -> crate::systems::TimedSystem {
    use crate::systems::TimedSystem;
    let d = match backend {
        Backend::Weighted(d) => d,
        _ => WeightDomain::Bool,
    };
    let mut out =
        TimedSystem::new(sys.states().to_vec(), sys.alphabet().to_vec(), sys.durations().to_vec(), backend).expect("same shape");
    for s in sys.raw_steps() {
        out.add_step(s.from, s.label, s.dur, s.to, d.one()).expect("same shape");
    }
    for a in sys.raw_accepts() {
        out.add_accept(a.state, a.dur, d.one()).expect("same shape");
    }
    out
}

/// A random row-stochastic chain with small-denominator rational entries.
pub fn chain(rng: &mut dyn RngCore, n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|_| {
            let raw: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.4) { 0 } else { rng.gen_range(1..5) }).collect();
            let total: i64 = raw.iter().sum();
            if total == 0 {
                let mut row = vec![Rational::zero(); n];
                row[rng.gen_range(0..n)] = Rational::one();
                row
            } else {
                raw.iter().map(|&w| rat(w, total)).collect()
            }
        })
        .collect()
}
