//! Saturated families Σ_q(π) for the four square homomorphisms and for finite monoids.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};

use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{CanonicalHom, Element, HomKind, MonoidHom, MonoidKind, MonoidSpec};
use crate::effects::{Backend, ConvexEndo, Dist, EffectEndo};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::systems::TimedSystem;

/// Materialization bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    /// Largest duration materialized on the weak timed path.
    pub t_max: u64,
    /// Largest power on the strong time-abstract path; star depth for convex systems.
    pub depth: usize,
    /// Keep materializing past `t_max` until the weak timed members repeat (up to [`EXTEND_CAP`]).
    pub extend: bool,
    /// Refuse results that rely on a non-converged bounded star.
    pub require_exact: bool,
}

/// Hard ceiling for weak timed materialization when extending.
pub const EXTEND_CAP: u64 = 128;

impl Bounds {
    /// `t_max = 2·max(D)·|X|`, depth `|X|` (8 for convex), extension on.
    pub fn defaults(sys: &TimedSystem) -> Self {
        let t_max = 2 * sys.max_duration() * sys.len() as u64;
        let depth = if sys.backend() == Backend::Convex { 8 } else { sys.len().max(1) };
        Bounds { t_max, depth, extend: true, require_exact: false }
    }

    /// Fixed bounds with no extension.
    pub fn fixed(t_max: u64, depth: usize) -> Self {
        Bounds { t_max, depth, extend: false, require_exact: false }
    }
}

/// A materialized saturated family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturatedFamily {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub backend: Backend,
    pub hom: MonoidHom,
    pub members: BTreeMap<Element, EffectEndo>,
    pub bounds: Bounds,
    /// No bounded star was cut short.
    pub exact: bool,
    /// The materialized members determine the bisimulation (for weak timed: the sequence
    /// was seen to repeat).
    pub complete: bool,
}

impl SaturatedFamily {
    pub fn kind(&self) -> Option<CanonicalHom> {
        self.hom.canonical()
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn labels(&self) -> usize {
        self.alphabet.len() + 1
    }

    pub fn member(&self, e: &Element) -> Option<&EffectEndo> {
        self.members.get(e)
    }

    pub fn identity(&self) -> EffectEndo {
        EffectEndo::identity(self.backend, self.dim(), self.labels())
    }

    /// Both flags: results read off this family are proofs, not bounded evidence.
    pub fn conclusive(&self) -> bool {
        self.exact && self.complete
    }

    /// Integer index used when exporting a member as a duration.
    fn export_index(e: &Element) -> Option<u64> {
        match e {
            Element::Nat(t) => Some(*t),
            Element::Unit => Some(0),
            Element::Fin(i) => Some(*i as u64),
            Element::Word(w) if w.is_empty() => None,
            Element::Word(w) if w.len() == 1 => match &w[0] {
                Element::Nat(t) => Some(*t),
                _ => Some(1),
            },
            Element::Word(w) => Some(w.len() as u64),
        }
    }

    /// The family as a system: weak timed members at their duration, abstract powers at their
    /// exponent, the weak abstract member at duration 0. Unit words are dropped.
    pub fn to_system(&self) -> Result<TimedSystem> {
        let mut endos = BTreeMap::new();
        for (e, m) in &self.members {
            if let Some(t) = Self::export_index(e) {
                endos.insert(t, m.clone());
            }
        }
        if endos.is_empty() {
            endos.insert(0, self.identity());
        }
        TimedSystem::from_endos(self.states.clone(), self.alphabet.clone(), self.backend, endos)
    }
}

fn check_source(sys: &TimedSystem, hom: &MonoidHom) -> Result<()> {
    let MonoidKind::FreeWords { letters } = &hom.source.kind else {
        return Err(Error::UnsupportedHom("timed systems saturate along homs out of duration words".into()));
    };
    let ds: Vec<Element> = sys.durations().iter().map(|&t| Element::Nat(t)).collect();
    if *letters != ds {
        return Err(Error::UnsupportedHom("hom source letters must be the system's durations".into()));
    }
    Ok(())
}

/// Σ_q for one of the four square homomorphisms.
pub fn saturate(sys: &TimedSystem, hom: &MonoidHom, bounds: &Bounds) -> Result<SaturatedFamily> {
    check_source(sys, hom)?;
    if bounds.require_exact && sys.backend() == Backend::Convex && !matches!(hom.kind, HomKind::Identity) {
        return Err(Error::UnsupportedExact("convex saturation is bounded".into()));
    }
    let kind = hom
        .canonical()
        .ok_or_else(|| Error::UnsupportedHom("no fast path for this hom; use saturate_finite on finite monoids".into()))?;
    let mut fam = SaturatedFamily {
        states: sys.states().to_vec(),
        alphabet: sys.alphabet().to_vec(),
        backend: sys.backend(),
        hom: hom.clone(),
        members: BTreeMap::new(),
        bounds: *bounds,
        exact: true,
        complete: true,
    };
    match kind {
        CanonicalHom::StrongTimed => {
            fam.members.insert(Element::Word(Vec::new()), sys.identity());
            for (&t, e) in sys.steps() {
                fam.members.insert(Element::Word(vec![Element::Nat(t)]), e.clone());
            }
        }
        CanonicalHom::StrongAbstract => {
            let u = join_all(sys.bottom(), sys.steps().values())?;
            let mut p = sys.identity();
            for n in 0..=bounds.depth {
                fam.members.insert(Element::Word(vec![Element::Unit; n]), p.clone());
                p = p.compose(&u)?;
            }
        }
        CanonicalHom::WeakAbstract => {
            let u = join_all(sys.bottom(), sys.steps().values())?;
            let (w, ok) = closure(&u, bounds.depth)?;
            fam.exact = ok;
            fam.members.insert(Element::Unit, w);
        }
        CanonicalHom::WeakTimed => {
            if sys.backend() == Backend::Convex {
                weak_timed_convex(sys, bounds, &mut fam)?;
            } else {
                weak_timed_matrix(sys, bounds, &mut fam)?;
            }
        }
    }
    if bounds.require_exact && !fam.exact {
        return Err(Error::UnsupportedExact("bounded star did not converge".into()));
    }
    Ok(fam)
}

/// Saturation along one of the canonical homs, built from the system's durations.
pub fn saturate_canonical(sys: &TimedSystem, which: CanonicalHom, bounds: &Bounds) -> Result<SaturatedFamily> {
    let bound = bounds.t_max.max(EXTEND_CAP).max(bounds.depth as u64).max(sys.max_duration());
    let hom = which.hom(sys.durations(), bound);
    saturate(sys, &hom, bounds)
}

fn join_all<'a>(init: EffectEndo, it: impl IntoIterator<Item = &'a EffectEndo>) -> Result<EffectEndo> {
    let mut acc = init;
    for e in it {
        acc = acc.join(e)?;
    }
    Ok(acc)
}

/// Exact star for matrix backends, bounded star for convex.
fn closure(e: &EffectEndo, depth: usize) -> Result<(EffectEndo, bool)> {
    match e {
        EffectEndo::Convex(_) => e.bounded_star(depth, &Rational::zero()),
        _ => Ok((e.star()?, true)),
    }
}

fn fingerprint(window: &[EffectEndo]) -> u64 {
    let mut h = DefaultHasher::new();
    window.hash(&mut h);
    h.finish()
}

/// `m(0) = Z = π₀*`, `m(t) = ⋁_{0<u≤t} Z ; π_u ; m(t−u)`.
fn weak_timed_matrix(sys: &TimedSystem, bounds: &Bounds, fam: &mut SaturatedFamily) -> Result<()> {
    let z = match sys.steps().get(&0) {
        Some(p0) => p0.star()?,
        None => sys.identity(),
    };
    let positive: Vec<(u64, EffectEndo)> = sys
        .steps()
        .iter()
        .filter(|(&t, _)| t > 0)
        .map(|(&t, p)| Ok((t, z.compose(p)?)))
        .collect::<Result<_>>()?;
    let width = positive.iter().map(|(t, _)| *t as usize).max().unwrap_or(1);
    let cap = if bounds.extend { bounds.t_max.max(EXTEND_CAP) } else { bounds.t_max };
    let mut members = vec![z];
    let mut seen: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut repeat = false;
    let mut t = 0usize;
    loop {
        if t + 1 >= width {
            let w = &members[t + 1 - width..=t];
            let key = fingerprint(w);
            let hits = seen.entry(key).or_default();
            if hits.iter().any(|&s| members[s + 1 - width..=s] == *w) {
                repeat = true;
            }
            hits.push(t);
        }
        if (repeat && t as u64 >= bounds.t_max) || t as u64 >= cap {
            break;
        }
        t += 1;
        let mut m = sys.bottom();
        for (u, zp) in &positive {
            if (*u as usize) <= t {
                m = m.join(&zp.compose(&members[t - *u as usize])?)?;
            }
        }
        members.push(m);
    }
    fam.complete = repeat;
    fam.bounds.t_max = t as u64;
    for (t, m) in members.into_iter().enumerate() {
        fam.members.insert(Element::Nat(t as u64), m);
    }
    Ok(())
}

/// Graded recursion: `F₀(0) = id`, `F_{k+1}(t) = F_k(t) ∨ ⋁_{u ≤ t} π_u ; F_k(t−u)`, `k ≤ depth`.
fn weak_timed_convex(sys: &TimedSystem, bounds: &Bounds, fam: &mut SaturatedFamily) -> Result<()> {
    let t_max = bounds.t_max as usize;
    let mut f: Vec<EffectEndo> = (0..=t_max).map(|t| if t == 0 { sys.identity() } else { sys.bottom() }).collect();
    // converged once a round changes nothing; a change in the last round counts as not
    // converged (the round that would confirm it is the most expensive one)
    let mut converged = false;
    for _ in 0..bounds.depth {
        let next = graded_round(sys, &f)?;
        if next == f {
            converged = true;
            break;
        }
        f = next;
    }
    fam.exact = converged;
    fam.complete = false;
    fam.bounds.extend = false;
    for (t, m) in f.into_iter().enumerate() {
        fam.members.insert(Element::Nat(t as u64), m);
    }
    Ok(())
}

/// One round, with a single hull reduction per state and time.
fn graded_round(sys: &TimedSystem, f: &[EffectEndo]) -> Result<Vec<EffectEndo>> {
    let convex = |e: &EffectEndo| e.as_convex().cloned().ok_or_else(|| Error::BackendMismatch("convex round".into()));
    let mut next = Vec::with_capacity(f.len());
    for (t, cur) in f.iter().enumerate() {
        let cur = convex(cur)?;
        let mut rows: Vec<Vec<Dist>> = (0..cur.dim()).map(|x| cur.generators(x).to_vec()).collect();
        for (&u, p) in sys.steps() {
            if (u as usize) <= t {
                let more = convex(p)?.compose_raw(&convex(&f[t - u as usize])?)?;
                for (row, extra) in rows.iter_mut().zip(more) {
                    row.extend(extra);
                }
            }
        }
        // raw steps never halt, so only the current member's flag survives the join
        next.push(EffectEndo::Convex(ConvexEndo::from_parts(rows, cur.halt())));
    }
    Ok(next)
}

/// Σ_q for a hom between finite monoids, by the Kleene construction: start from
/// `Π_{n,0} = ⋁{π_m | q(m) = n}` and close under `id ≤ Π_e` and `Π_a ; Π_b ≤ Π_{ab}`.
pub fn saturate_finite(
    states: Vec<String>,
    alphabet: Vec<String>,
    backend: Backend,
    family: &BTreeMap<usize, EffectEndo>,
    hom: &MonoidHom,
    max_rounds: usize,
) -> Result<SaturatedFamily> {
    let (HomKind::Table(map), MonoidKind::Finite(src), MonoidKind::Finite(tgt)) =
        (&hom.kind, &hom.source.kind, &hom.target.kind)
    else {
        return Err(Error::UnsupportedHom("general saturation needs a table hom between finite monoids".into()));
    };
    if !hom.is_surjective() {
        return Err(Error::UnsupportedHom("saturation needs a surjective hom".into()));
    }
    let dim = states.len();
    let labels = alphabet.len() + 1;
    let bottom = EffectEndo::bottom(backend, dim, labels);
    let mut pi: Vec<EffectEndo> = vec![bottom.clone(); tgt.size()];
    for (&m, e) in family {
        if m >= src.size() {
            return Err(Error::validation("family", format!("m{m} is not in the source monoid")));
        }
        pi[map[m]] = pi[map[m]].join(e)?;
    }
    pi[tgt.unit] = pi[tgt.unit].join(&EffectEndo::identity(backend, dim, labels))?;
    let mut stable = false;
    for _ in 0..max_rounds {
        let mut next = pi.clone();
        for a in 0..tgt.size() {
            for b in 0..tgt.size() {
                let ab = tgt.op(a, b);
                next[ab] = next[ab].join(&pi[a].compose(&pi[b])?)?;
            }
        }
        if next == pi {
            stable = true;
            break;
        }
        pi = next;
    }
    let members = pi.into_iter().enumerate().map(|(n, e)| (Element::Fin(n), e)).collect();
    Ok(SaturatedFamily {
        states,
        alphabet,
        backend,
        hom: hom.clone(),
        members,
        bounds: Bounds { t_max: 0, depth: max_rounds, extend: false, require_exact: false },
        exact: stable,
        complete: true,
    })
}

/// One instance of a lax-functor law.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawCheck {
    /// `unit` or `product`.
    pub law: &'static str,
    pub left: String,
    pub right: Option<String>,
    pub holds: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LaxReport {
    pub checks: Vec<LawCheck>,
}

impl LaxReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LawCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

/// `id ≤ member(e)` and `member(m) ; member(n) ≤ member(m·n)` over materialized pairs.
pub fn check_lax_laws(fam: &SaturatedFamily) -> Result<LaxReport> {
    let mut report = LaxReport::default();
    let target = &fam.hom.target;
    let unit = target.unit();
    if let Some(u) = fam.members.get(&unit) {
        report.checks.push(LawCheck { law: "unit", left: unit.to_string(), right: None, holds: fam.identity().leq(u)? });
    }
    for (m, fm) in &fam.members {
        for (n, fn_) in &fam.members {
            let Ok(mn) = target.op(m, n) else { continue };
            let Some(fmn) = fam.members.get(&mn) else { continue };
            let holds = fm.compose(fn_)?.leq(fmn)?;
            report.checks.push(LawCheck { law: "product", left: m.to_string(), right: Some(n.to_string()), holds });
        }
    }
    Ok(report)
}

/// Pulls the family back along its hom (`π'_t = member(q(t))`) and saturates again.
pub fn pullback_resaturate(fam: &SaturatedFamily) -> Result<SaturatedFamily> {
    let MonoidKind::FreeWords { letters } = &fam.hom.source.kind else {
        return Err(Error::UnsupportedHom("pullback needs a duration-word source".into()));
    };
    let mut endos = BTreeMap::new();
    for l in letters {
        let Element::Nat(t) = l else {
            return Err(Error::UnsupportedHom("pullback needs duration letters".into()));
        };
        let img = fam.hom.apply(&Element::Word(vec![l.clone()]))?;
        let m = fam.members.get(&img).ok_or(Error::BoundExceeded { bound: fam.bounds.t_max })?;
        endos.insert(*t, m.clone());
    }
    let sys = TimedSystem::from_endos(fam.states.clone(), fam.alphabet.clone(), fam.backend, endos)?;
    let bounds = Bounds { extend: false, ..fam.bounds };
    saturate(&sys, &fam.hom, &bounds)
}

fn weak_abstract_from(fam: &SaturatedFamily, hom: MonoidHom) -> Result<SaturatedFamily> {
    let joined = join_all(EffectEndo::bottom(fam.backend, fam.dim(), fam.labels()), fam.members.values())?;
    let (w, ok) = closure(&joined, fam.bounds.depth)?;
    let mut members = BTreeMap::new();
    members.insert(Element::Unit, w);
    Ok(SaturatedFamily {
        states: fam.states.clone(),
        alphabet: fam.alphabet.clone(),
        backend: fam.backend,
        hom,
        members,
        bounds: fam.bounds,
        exact: fam.exact && ok,
        complete: true,
    })
}

/// Bang-saturation of a weak timed family (ℕ → 1): `star(⋁_t member(t))`.
pub fn weak_then_abstract(weak: &SaturatedFamily) -> Result<SaturatedFamily> {
    if weak.kind() != Some(CanonicalHom::WeakTimed) {
        return Err(Error::UnsupportedHom("expected a weak timed family".into()));
    }
    let hom = MonoidHom::compose(MonoidHom::bang(weak.hom.target.clone()), weak.hom.clone())?;
    weak_abstract_from(weak, hom)
}

/// Counit-saturation of a strong time-abstract family (1* → 1): `star(⋁_n U^n)`.
pub fn abstract_then_weak(strong: &SaturatedFamily) -> Result<SaturatedFamily> {
    if strong.kind() != Some(CanonicalHom::StrongAbstract) {
        return Err(Error::UnsupportedHom("expected a strong time-abstract family".into()));
    }
    let counit = MonoidHom::counit(strong.hom.target.clone())?;
    let hom = MonoidHom::compose(counit, strong.hom.clone())?;
    weak_abstract_from(strong, hom)
}

/// The duration-word monoid used by [`saturate_canonical`].
pub fn duration_words(sys: &TimedSystem, bounds: &Bounds) -> MonoidSpec {
    MonoidSpec::durations(sys.durations(), bounds.t_max.max(EXTEND_CAP))
}
