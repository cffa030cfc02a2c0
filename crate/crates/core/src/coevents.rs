//! Multiplicative coevents `φ = F*`: `φ(A) = 1` iff `F ⊆ A`.
//!
//! A support is preclusive when it lies inside no precluded event, and
//! primitive when it is inclusion-minimal among preclusive supports.
//! Preclusivity is upward-closed, so primitivity only needs the
//! single-element deletions.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::histories::{Event, HistorySpace};
use crate::limits::Limits;
use crate::measure::{
    amplitude_classes, binomial_rows, sector_items, walk_precluded_subsets,
    AmplitudeClasses, CountVector, SectorLattice,
};

/// The coevent affirming exactly the supersets of its support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicativeCoevent<'a> {
    support: Event<'a>,
}

impl<'a> MultiplicativeCoevent<'a> {
    pub fn new(support: Event<'a>) -> Self {
        Self { support }
    }

    pub fn support(&self) -> &Event<'a> {
        &self.support
    }

    pub fn space(&self) -> &'a HistorySpace {
        self.support.space()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.support.indices()
    }

    pub fn evaluate(&self, event: &Event<'_>) -> Result<bool> {
        evaluate(self, event)
    }
}

/// `φ(A)`: true iff the support is contained in `A`.
pub fn evaluate(phi: &MultiplicativeCoevent<'_>, event: &Event<'_>) -> Result<bool> {
    phi.support.is_subset(event)
}

/// Preclusion structure of a space: amplitude classes and, per final-site
/// sector, the zero-sum count vectors.
pub struct Preclusion<'a> {
    classes: AmplitudeClasses<'a>,
    lattices: Vec<SectorLattice>,
}

impl<'a> Preclusion<'a> {
    pub fn new(space: &'a HistorySpace, limits: &Limits) -> Result<Self> {
        let classes = amplitude_classes(space);
        let lattices = classes
            .sectors()
            .iter()
            .map(|s| classes.lattice(s, limits))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { classes, lattices })
    }

    pub fn classes(&self) -> &AmplitudeClasses<'a> {
        &self.classes
    }

    pub fn lattices(&self) -> &[SectorLattice] {
        &self.lattices
    }

    /// A support lies in a precluded event iff every sector part extends to
    /// a zero-sum set of its own sector.
    fn vectors_preclusive(&self, vectors: &[CountVector]) -> bool {
        vectors
            .iter()
            .zip(&self.lattices)
            .any(|(v, lattice)| !lattice.extends_to_zero(&v.counts))
    }

    pub fn is_preclusive(&self, support: &Event<'_>) -> Result<bool> {
        let vectors = self.classes.count_vectors(support)?;
        Ok(self.vectors_preclusive(&vectors))
    }

    pub fn is_primitive(&self, support: &Event<'_>) -> Result<bool> {
        let vectors = self.classes.count_vectors(support)?;
        if !self.vectors_preclusive(&vectors) {
            return Ok(false);
        }
        // removing any member of the same class gives the same count vector
        let mut seen = BTreeSet::new();
        for pos in support.iter() {
            let class = self.classes.class_of(pos);
            if !seen.insert(class) {
                continue;
            }
            let mut smaller = vectors.clone();
            let (s, slot) = self.locate(class);
            smaller[s].counts[slot] -= 1;
            if self.vectors_preclusive(&smaller) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn locate(&self, class: usize) -> (usize, usize) {
        for (s, sector) in self.classes.sectors().iter().enumerate() {
            if let Some(slot) = sector.class_ids.iter().position(|&c| c == class) {
                return (s, slot);
            }
        }
        unreachable!("every class belongs to a sector")
    }

    /// Minimal preclusive count vectors of every sector.
    ///
    /// Vectors are visited in increasing total; anything dominating an
    /// already-found minimal vector is skipped.
    pub fn minimal_vectors(&self) -> Vec<CountVector> {
        let mut out = Vec::new();
        for (sector, lattice) in self.classes.sectors().iter().zip(&self.lattices) {
            let counts = lattice.counts();
            let mut all: Vec<Vec<usize>> = counts
                .iter()
                .map(|&c| 0..=c)
                .multi_cartesian_product()
                .collect();
            if counts.is_empty() {
                all.push(Vec::new());
            }
            all.sort_by(|a, b| {
                (a.iter().sum::<usize>(), a).cmp(&(b.iter().sum::<usize>(), b))
            });
            let mut minimal: Vec<Vec<usize>> = Vec::new();
            for v in all {
                if minimal
                    .iter()
                    .any(|m| m.iter().zip(&v).all(|(a, b)| a <= b))
                {
                    continue;
                }
                if !lattice.extends_to_zero(&v) {
                    minimal.push(v);
                }
            }
            out.extend(minimal.into_iter().map(|counts| CountVector {
                final_site: sector.final_site,
                counts,
            }));
        }
        out
    }
}

pub fn is_preclusive(support: &Event<'_>, limits: &Limits) -> Result<bool> {
    Preclusion::new(support.space(), limits)?.is_preclusive(support)
}

pub fn is_primitive(support: &Event<'_>, limits: &Limits) -> Result<bool> {
    Preclusion::new(support.space(), limits)?.is_primitive(support)
}

/// A minimal preclusive count vector and the number of supports realizing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimalVector {
    pub vector: CountVector,
    pub supports: BigUint,
}

/// All primitive coevents of a space, described by their minimal count
/// vectors; explicit supports are expanded on request.
pub struct PrimitiveEnsemble<'a> {
    preclusion: Preclusion<'a>,
    minimal: Vec<MinimalVector>,
    total: BigUint,
}

pub fn primitive_ensemble<'a>(space: &'a HistorySpace, limits: &Limits) -> Result<PrimitiveEnsemble<'a>> {
    // lattice construction enforces the count-vector guard the minimal
    // scan relies on
    let preclusion = Preclusion::new(space, limits)?;
    let minimal: Vec<MinimalVector> = preclusion
        .minimal_vectors()
        .into_iter()
        .map(|vector| {
            let s = preclusion
                .classes()
                .sectors()
                .iter()
                .position(|s| s.final_site == vector.final_site)
                .expect("sector exists");
            let rows = binomial_rows(preclusion.lattices()[s].counts());
            let supports = vector
                .counts
                .iter()
                .enumerate()
                .fold(BigUint::one(), |acc, (i, &k)| acc * &rows[i][k]);
            MinimalVector { vector, supports }
        })
        .collect();
    let total = minimal.iter().map(|m| &m.supports).sum();
    Ok(PrimitiveEnsemble {
        preclusion,
        minimal,
        total,
    })
}

impl<'a> PrimitiveEnsemble<'a> {
    pub fn space(&self) -> &'a HistorySpace {
        self.preclusion.classes().space()
    }

    pub fn preclusion(&self) -> &Preclusion<'a> {
        &self.preclusion
    }

    pub fn minimal_vectors(&self) -> &[MinimalVector] {
        &self.minimal
    }

    /// Number of primitive coevents, without expansion.
    pub fn count(&self) -> &BigUint {
        &self.total
    }

    /// Every primitive support as a sorted position list, in lexicographic
    /// order. Refuses when the total exceeds `limits.max_supports`.
    pub fn supports(&self, limits: &Limits) -> Result<Vec<Vec<usize>>> {
        if self.total > BigUint::from(limits.max_supports) {
            return Err(Error::infeasible(
                "primitive support expansion",
                &self.total,
                limits.max_supports,
            ));
        }
        let classes = self.preclusion.classes();
        let mut supports: Vec<Vec<usize>> = self
            .minimal
            .par_iter()
            .flat_map_iter(|m| expand(classes, &m.vector))
            .collect();
        supports.par_sort_unstable();
        Ok(supports)
    }

    pub fn coevents(&self, limits: &Limits) -> Result<Vec<MultiplicativeCoevent<'a>>> {
        let space = self.space();
        self.supports(limits)?
            .into_iter()
            .map(|s| Ok(MultiplicativeCoevent::new(space.event(s)?)))
            .collect()
    }
}

fn expand(classes: &AmplitudeClasses<'_>, vector: &CountVector) -> Vec<Vec<usize>> {
    let sector = classes
        .sectors()
        .iter()
        .find(|s| s.final_site == vector.final_site)
        .expect("sector exists");
    let choices: Vec<Vec<Vec<usize>>> = sector
        .class_ids
        .iter()
        .zip(&vector.counts)
        .filter(|(_, &k)| k > 0)
        .map(|(&c, &k)| {
            let members: Vec<usize> = classes.classes()[c].members.ones().collect();
            members.into_iter().combinations(k).collect()
        })
        .collect();
    if choices.is_empty() {
        return vec![Vec::new()];
    }
    choices
        .into_iter()
        .multi_cartesian_product()
        .map(|parts| {
            let mut s: Vec<usize> = parts.concat();
            s.sort_unstable();
            s
        })
        .collect()
}

/// All primitive coevents of a space, expanded, in canonical order.
pub fn enumerate_primitive<'a>(
    space: &'a HistorySpace,
    limits: &Limits,
) -> Result<Vec<MultiplicativeCoevent<'a>>> {
    primitive_ensemble(space, limits)?.coevents(limits)
}

// Bit positions whose j-th bit is clear, for j < 6.
const LOW_HALVES: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// Primitive supports by exhaustion over every subset, from explicit
/// containment in precluded events. Works on unrestricted spaces too.
/// Supports come out in size-then-index order.
pub fn enumerate_primitive_bruteforce<'a>(
    space: &'a HistorySpace,
    limits: &Limits,
) -> Result<Vec<MultiplicativeCoevent<'a>>> {
    primitive_masks(&sector_items(space), limits)?
        .into_iter()
        .map(|mask| {
            let members = (0..space.len()).filter(|i| mask >> i & 1 == 1);
            Ok(MultiplicativeCoevent::new(space.event(members)?))
        })
        .collect()
}

fn primitive_masks(items: &[(usize, crate::CycInt)], limits: &Limits) -> Result<Vec<u64>> {
    let n = items.len();
    // precluded sets; the walk enforces the subset cap
    let mut covered = vec![0u64; if n >= 6 { 1usize << (n - 6) } else { 1 }];
    walk_precluded_subsets(items, limits.max_primitive_subsets, limits, |m| {
        covered[(m >> 6) as usize] |= 1 << (m & 63);
    })?;
    let words = covered.len();

    // covered[F] = some precluded Z ⊇ F
    for j in 0..n {
        if j < 6 {
            let (s, low) = (1u32 << j, LOW_HALVES[j]);
            for w in covered.iter_mut() {
                *w |= (*w >> s) & low;
            }
        } else {
            let step = 1usize << (j - 6);
            for w in 0..words {
                if w & step == 0 {
                    covered[w] |= covered[w | step];
                }
            }
        }
    }
    let valid = if n >= 6 { u64::MAX } else { (1u64 << (1 << n)) - 1 };
    let preclusive: Vec<u64> = covered.iter().map(|w| !w & valid).collect();

    // shrinkable[F] = F \ {γ} preclusive for some γ ∈ F
    let mut shrinkable = vec![0u64; words];
    for j in 0..n {
        if j < 6 {
            let (s, low) = (1u32 << j, LOW_HALVES[j]);
            for (d, p) in shrinkable.iter_mut().zip(&preclusive) {
                *d |= (p << s) & !low;
            }
        } else {
            let step = 1usize << (j - 6);
            for w in 0..words {
                if w & step != 0 {
                    shrinkable[w] |= preclusive[w ^ step];
                }
            }
        }
    }

    let mut masks = Vec::new();
    for (w, (p, d)) in preclusive.iter().zip(&shrinkable).enumerate() {
        let mut bits = p & !d;
        while bits != 0 {
            let b = bits.trailing_zeros() as u64;
            masks.push(((w as u64) << 6) | b);
            bits &= bits - 1;
        }
    }
    masks.sort_by_key(|&m| (m.count_ones(), m));
    Ok(masks)
}

fn check_comparable(a: &HistorySpace, b: &HistorySpace) -> Result<()> {
    if a.same_shape(b) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

/// Supports primitive for both spaces (same lattice, duration and final
/// site; different initial states).
pub fn common_supports(a: &HistorySpace, b: &HistorySpace, limits: &Limits) -> Result<Vec<Vec<usize>>> {
    check_comparable(a, b)?;
    let sa: BTreeSet<Vec<usize>> = primitive_ensemble(a, limits)?
        .supports(limits)?
        .into_iter()
        .collect();
    let sb = primitive_ensemble(b, limits)?.supports(limits)?;
    Ok(sb.into_iter().filter(|s| sa.contains(s)).collect())
}

/// Number of supports primitive for both spaces.
pub fn overlap(a: &HistorySpace, b: &HistorySpace, limits: &Limits) -> Result<usize> {
    Ok(common_supports(a, b, limits)?.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histories::{enumerate, FinalSite};
    use crate::model::{initial_state, LatticeSpec, StateLabel};

    fn space(n: usize, t: usize, label: StateLabel, f: FinalSite) -> HistorySpace {
        let spec = LatticeSpec::new(n, t).unwrap();
        let st = initial_state(&spec, label).unwrap();
        enumerate(&spec, &st, f, &Limits::default()).unwrap()
    }

    fn class_members(sp: &HistorySpace, name: &str) -> Vec<usize> {
        let classes = amplitude_classes(sp);
        let c = classes
            .classes()
            .iter()
            .find(|c| c.value.to_string() == name)
            .unwrap();
        c.members.ones().collect()
    }

    #[test]
    fn evaluation() {
        let sp = space(3, 3, StateLabel::Plus, FinalSite::Site(0));
        let phi = MultiplicativeCoevent::new(sp.event([1, 4, 9]).unwrap());
        assert!(phi.evaluate(&sp.full_event()).unwrap());
        assert!(!phi.evaluate(&sp.empty_event()).unwrap());
        // figure-1 style: A ⊇ F, B overlaps F partially, C disjoint
        let a = sp.event([0, 1, 4, 9, 20]).unwrap();
        let b = sp.event([1, 4, 5]).unwrap();
        let c = sp.event([2, 3]).unwrap();
        assert!(phi.evaluate(&a).unwrap());
        assert!(!phi.evaluate(&b).unwrap());
        assert!(!phi.evaluate(&c).unwrap());
        let other = space(3, 3, StateLabel::Plus, FinalSite::Site(0));
        assert_eq!(phi.evaluate(&other.full_event()).unwrap_err(), Error::SpaceMismatch);
    }

    #[test]
    fn preclusivity_by_class_counts() {
        let sp = space(3, 3, StateLabel::Plus, FinalSite::Site(0));
        let limits = Limits::default();
        let ones = class_members(&sp, "1");
        let seven = sp.event(ones[..7].iter().copied()).unwrap();
        let six = sp.event(ones[..6].iter().copied()).unwrap();
        let eight = sp.event(ones[..8].iter().copied()).unwrap();
        assert!(is_preclusive(&seven, &limits).unwrap());
        assert!(!is_preclusive(&six, &limits).unwrap());
        assert!(is_primitive(&seven, &limits).unwrap());
        assert!(!is_primitive(&eight, &limits).unwrap());

        let mut six_six_six = Vec::new();
        for name in ["1", "ω", "ω̄"] {
            six_six_six.extend(class_members(&sp, name).into_iter().take(6));
        }
        let z = sp.event(six_six_six).unwrap();
        assert!(crate::measure::is_precluded(&z));
        assert!(!is_preclusive(&z, &limits).unwrap());
        for p in 0..sp.len() {
            assert!(!is_primitive(&sp.event([p]).unwrap(), &limits).unwrap());
        }
        assert!(!is_preclusive(&sp.empty_event(), &limits).unwrap());
    }

    #[test]
    fn eight_twenty_eight() {
        let limits = Limits::default();
        for label in [StateLabel::Plus, StateLabel::Ground, StateLabel::Minus] {
            let sp = space(3, 3, label, FinalSite::Site(0));
            let ens = primitive_ensemble(&sp, &limits).unwrap();
            assert_eq!(ens.count(), &BigUint::from(828u32));
            let coevents = ens.coevents(&limits).unwrap();
            assert_eq!(coevents.len(), 828);
            let pre = ens.preclusion();
            for phi in &coevents {
                assert_eq!(phi.len(), 7);
                assert!(pre.is_primitive(phi.support()).unwrap());
            }
        }
    }

    #[test]
    fn classical_limit_singletons() {
        // one amplitude class: no nonempty zero sums, every history alone
        // is primitive
        let values = vec![crate::CycInt::one(3).unwrap()];
        let lattice = SectorLattice::new(&values, &[9], &Limits::default()).unwrap();
        assert_eq!(lattice.maximal(), &[vec![0]]);

        let n = 5;
        let items: Vec<(usize, crate::CycInt)> =
            (0..n).map(|_| (0, crate::CycInt::one(3).unwrap())).collect();
        let masks = primitive_masks(&items, &Limits::default()).unwrap();
        assert_eq!(masks, (0..n).map(|i| 1u64 << i).collect::<Vec<_>>());
    }

    #[test]
    fn bruteforce_matches_on_small_space() {
        let limits = Limits::default();
        let sp = space(2, 2, StateLabel::Ground, FinalSite::Site(0));
        let fast: Vec<Vec<usize>> = enumerate_primitive(&sp, &limits)
            .unwrap()
            .iter()
            .map(|c| c.indices())
            .collect();
        let mut slow: Vec<Vec<usize>> = enumerate_primitive_bruteforce(&sp, &limits)
            .unwrap()
            .iter()
            .map(|c| c.indices())
            .collect();
        slow.sort();
        assert_eq!(fast, slow);
    }

    #[test]
    fn sharp_final_position_small() {
        let limits = Limits::default();
        let sp = space(3, 1, StateLabel::Plus, FinalSite::All);
        let brute = enumerate_primitive_bruteforce(&sp, &limits).unwrap();
        assert!(!brute.is_empty());
        for phi in &brute {
            let finals: BTreeSet<usize> = phi.support().histories().map(|h| h.final_site()).collect();
            assert_eq!(finals.len(), 1);
        }
        let mut slow: Vec<Vec<usize>> = brute.iter().map(|c| c.indices()).collect();
        slow.sort();
        let fast: Vec<Vec<usize>> = enumerate_primitive(&sp, &limits)
            .unwrap()
            .iter()
            .map(|c| c.indices())
            .collect();
        assert_eq!(fast, slow);
    }

    #[test]
    fn overlaps() {
        let limits = Limits::default();
        let f = FinalSite::Site(0);
        let g3 = space(3, 3, StateLabel::Ground, f);
        let p3 = space(3, 3, StateLabel::Plus, f);
        let m3 = space(3, 3, StateLabel::Minus, f);
        assert_eq!(overlap(&g3, &p3, &limits).unwrap(), 0);
        assert_eq!(overlap(&p3, &m3, &limits).unwrap(), 0);
        let g2 = space(3, 2, StateLabel::Ground, f);
        let p2 = space(3, 2, StateLabel::Plus, f);
        assert!(overlap(&g2, &p2, &limits).unwrap() > 0);
        assert_eq!(overlap(&g2, &p3, &limits).unwrap_err(), Error::SpaceMismatch);
    }

    #[test]
    fn expansion_guard() {
        let sp = space(3, 3, StateLabel::Plus, FinalSite::Site(0));
        let limits = Limits {
            max_supports: 100,
            ..Limits::default()
        };
        let ens = primitive_ensemble(&sp, &limits).unwrap();
        assert_eq!(ens.count(), &BigUint::from(828u32));
        assert!(matches!(ens.supports(&limits).unwrap_err(), Error::Infeasible { .. }));
    }
}
