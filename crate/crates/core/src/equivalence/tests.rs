use super::language::automaton_accepts;
use super::*;
use crate::algebra::{CanonicalHom, WeightDomain};
use crate::effects::Backend;
use crate::fixtures::{ACC1, ACC2, FIG2, WT2};
use crate::random::{self, SystemShape};
use crate::saturation::{saturate_canonical, Bounds};
use crate::systems::{load_system, TimedSystem};
use crate::Error;

fn partition(sys: &TimedSystem, hom: CanonicalHom) -> Partition {
    coarsest_bisimulation(&saturate_canonical(sys, hom, &Bounds::defaults(sys)).unwrap())
}

#[test]
fn partition_basics() {
    let p = Partition::from_labels(&["b", "a", "b"]);
    assert_eq!(p.block_of(), &[0, 1, 0]);
    assert_eq!(p.blocks(), vec![vec![0, 2], vec![1]]);
    assert!(Partition::discrete(3).refines(&p));
    assert!(!p.refines(&Partition::discrete(3)));
    assert!(p.refines(&Partition::trivial(3)));
    assert_eq!(p.merge(0, 1), Partition::trivial(3));
    assert_eq!(Partition::from_blocks(3, &[vec![2, 1]]), Partition::from_labels(&[0, 1, 1]));
}

#[test]
fn fig2_strong_separates_everything() {
    let sys = load_system(FIG2).unwrap();
    assert_eq!(partition(&sys, CanonicalHom::StrongTimed), Partition::discrete(3));
}

#[test]
fn wt2_weak_merges() {
    let sys = load_system(WT2).unwrap();
    let (x, y) = (0, 3);
    let strong = partition(&sys, CanonicalHom::StrongTimed);
    let weak = partition(&sys, CanonicalHom::WeakTimed);
    assert!(!strong.same(x, y));
    assert!(weak.same(x, y));
    assert!(strong.refines(&weak));
    let fam = saturate_canonical(&sys, CanonicalHom::WeakTimed, &Bounds::defaults(&sys)).unwrap();
    assert_eq!(bisimilar(&fam, &weak, x, y), BisimVerdict::Equivalent);
}

#[test]
fn isomorphic_copies_merge() {
    let mut r = random::rng(7);
    let sys = random::system(&mut r, &SystemShape::new(Backend::NonDet, 3));
    // disjoint union with itself
    let n = sys.len();
    let states: Vec<String> = (0..2 * n).map(|i| format!("q{i}")).collect();
    let mut two = TimedSystem::new(states, sys.alphabet().to_vec(), sys.durations().to_vec(), Backend::NonDet).unwrap();
    for s in sys.raw_steps() {
        for off in [0, n] {
            two.add_step(s.from + off, s.label, s.dur, s.to + off, s.weight.clone()).unwrap();
        }
    }
    for a in sys.raw_accepts() {
        for off in [0, n] {
            two.add_accept(a.state + off, a.dur, a.weight.clone()).unwrap();
        }
    }
    for hom in CanonicalHom::ALL {
        let p = partition(&two, hom);
        for x in 0..n {
            assert!(p.same(x, x + n), "{hom:?}");
        }
    }
}

#[test]
fn coarsest_is_a_coarsest_bisimulation() {
    for seed in 0..40 {
        let mut r = random::rng(seed);
        let sys = random::system(&mut r, &SystemShape::new(Backend::NonDet, 5));
        for hom in CanonicalHom::ALL {
            let fam = saturate_canonical(&sys, hom, &Bounds::defaults(&sys)).unwrap();
            let p = coarsest_bisimulation(&fam);
            assert!(check_bisimulation(&fam, &p));
            assert!(check_bisimulation(&fam, &Partition::discrete(sys.len())));
            let blocks = p.blocks();
            for i in 0..blocks.len() {
                for j in i + 1..blocks.len() {
                    assert!(!check_bisimulation(&fam, &p.merge(blocks[i][0], blocks[j][0])), "seed {seed} {hom:?}");
                }
            }
        }
    }
}

#[test]
fn acc1_languages() {
    let sys = load_system(ACC1).unwrap();
    let b = LangBound { len: 1, time: 1 };
    let tl = languages(&sys, 0, LangMode::Tl, &b).unwrap();
    let words: Vec<String> = tl.words.keys().map(|w| w.render(&sys)).collect();
    assert_eq!(words, vec!["1·sigma·0"]);
    let utl = languages(&sys, 0, LangMode::Utl, &b).unwrap();
    assert_eq!(utl.words.keys().map(|w| w.render(&sys)).collect::<Vec<_>>(), vec!["sigma"]);
    assert!(languages(&sys, 2, LangMode::Tl, &b).unwrap().words.is_empty());
    let v = language_equivalent(&sys, 0, 2, LangMode::Tl, &b).unwrap();
    let Verdict::Distinguished { word } = v else { panic!("{v:?}") };
    assert_eq!(word.render(&sys), "1·sigma·0");
    assert_eq!(language_equivalent(&sys, 0, 0, LangMode::Wtl, &b).unwrap(), Verdict::Equal);
}

#[test]
fn acc2_weak_empty_word() {
    let sys = load_system(ACC2).unwrap();
    let b = LangBound { len: 2, time: 0 };
    let wtl = languages(&sys, 0, LangMode::Wtl, &b).unwrap();
    let words: Vec<String> = wtl.words.keys().map(|w| w.render(&sys)).collect();
    assert!(words.contains(&"0".to_string()), "{words:?}");
    let tl = languages(&sys, 0, LangMode::Tl, &b).unwrap();
    let words: Vec<String> = tl.words.keys().map(|w| w.render(&sys)).collect();
    assert!(words.contains(&"0·tau·0".to_string()));
    assert!(!words.contains(&"0".to_string()));
}

#[test]
fn no_acceptance_is_an_error() {
    let sys = load_system(FIG2).unwrap();
    assert!(matches!(languages(&sys, 0, LangMode::Tl, &LangBound::defaults(&sys)), Err(Error::NoAcceptance)));
}

#[test]
fn automaton_agrees_with_enumeration() {
    // every enumerated word is accepted by the automaton, and rejected words are not listed
    for seed in 0..25 {
        let mut r = random::rng(100 + seed);
        let mut shape = SystemShape::new(Backend::NonDet, 4);
        shape.density = 0.2;
        let sys = random::system(&mut r, &shape);
        if !sys.has_acceptance() {
            continue;
        }
        let bound = LangBound { len: 2, time: 4 };
        for mode in LangMode::ALL {
            let table = language_table(&sys, mode, &bound).unwrap();
            for (w, row) in table.words.iter().zip(&table.values) {
                for x in 0..sys.len() {
                    let listed = row[x] == WordWeight::Bool(true);
                    assert_eq!(listed, automaton_accepts(&sys, x, mode, w), "seed {seed} {mode:?} {}", w.render(&sys));
                }
            }
        }
    }
}

#[test]
fn exact_language_partition_matches_bounded_when_short() {
    // exact equality implies bounded equality
    for seed in 0..25 {
        let mut r = random::rng(300 + seed);
        let sys = random::system(&mut r, &SystemShape::new(Backend::NonDet, 4));
        if !sys.has_acceptance() {
            continue;
        }
        let bool_sys = random::recast(&sys, Backend::Weighted(WeightDomain::Bool));
        let bound = LangBound { len: 2, time: 4 };
        for mode in LangMode::ALL {
            let (exact, e) = language_partition(&sys, mode, &bound).unwrap();
            assert!(e);
            let table = language_table(&bool_sys, mode, &bound).unwrap();
            let cols: Vec<_> = (0..sys.len()).map(|x| table.column(x)).collect();
            let bounded = Partition::from_labels(&cols);
            assert!(exact.refines(&bounded), "seed {seed} {mode:?}");
        }
    }
}

#[test]
fn spectrum_edges_hold_on_random_systems() {
    for backend in [Backend::NonDet, Backend::Weighted(WeightDomain::NatInfMaxPlus), Backend::Weighted(WeightDomain::Bool)] {
        for seed in 0..30 {
            let mut r = random::rng(seed);
            let mut shape = SystemShape::new(backend, 4);
            shape.tau = seed % 2 == 0;
            let sys = random::system(&mut r, &shape);
            let report = spectrum(&sys, &Bounds::defaults(&sys), &LangBound::defaults(&sys)).unwrap();
            let bad: Vec<_> = report.violations().collect();
            assert!(bad.is_empty(), "{backend} seed {seed}: {bad:?}\n{}", sys.to_json());
        }
    }
}

#[test]
fn wt2_spectrum() {
    let sys = load_system(WT2).unwrap();
    let report = spectrum(&sys, &Bounds::defaults(&sys), &LangBound::defaults(&sys)).unwrap();
    assert!(report.all_pass());
    let st = report.relation((CanonicalHom::StrongTimed, Semantics::Bisim)).unwrap();
    let wt = report.relation((CanonicalHom::WeakTimed, Semantics::Bisim)).unwrap();
    assert!(!st.partition.same(0, 3) && wt.partition.same(0, 3));
    assert_eq!(report.relations.len(), 4);
}

#[test]
fn bool_weighted_matches_nondet() {
    for seed in 0..30 {
        let mut r = random::rng(500 + seed);
        let sys = random::system(&mut r, &SystemShape::new(Backend::NonDet, 5));
        let b = random::recast(&sys, Backend::Weighted(WeightDomain::Bool));
        for hom in CanonicalHom::ALL {
            assert_eq!(partition(&sys, hom), partition(&b, hom), "seed {seed} {hom:?}");
        }
    }
}
