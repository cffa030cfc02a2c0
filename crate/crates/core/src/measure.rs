//! Quantal measure and preclusion.
//!
//! Histories ending at different sites never interfere, so the measure of
//! an event is `μ(A) = Σ_f |s_f|²` with `s_f` the amplitude sum over
//! members ending at `f`. An event is precluded iff every `s_f` vanishes.
//!
//! Within one final-site sector, whether a set of histories sums to zero
//! depends only on how many members it takes from each amplitude class.
//! Counting and extremal questions therefore run over the lattice of count
//! vectors `0 ≤ k_i ≤ count_i` rather than over subsets.

use std::collections::{BTreeMap, HashMap};

use fixedbitset::FixedBitSet;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::cyclotomic::{max_abs, CycInt};
use crate::error::{Error, Result};
use crate::histories::{Event, FinalSite, HistorySpace};
use crate::limits::Limits;

/// Histories of one sector sharing one exact amplitude.
#[derive(Clone, Debug)]
pub struct AmplitudeClass {
    pub value: CycInt,
    pub final_site: usize,
    pub members: FixedBitSet,
    pub count: usize,
}

/// Classes whose members end at `final_site`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sector {
    pub final_site: usize,
    pub class_ids: Vec<usize>,
}

/// Partition of a space by (final site, amplitude value). Classes are
/// ordered by smallest member position.
#[derive(Clone, Debug)]
pub struct AmplitudeClasses<'a> {
    space: &'a HistorySpace,
    classes: Vec<AmplitudeClass>,
    sectors: Vec<Sector>,
    class_of: Vec<usize>,
}

/// Per-class multiplicities within one sector, aligned with
/// `Sector::class_ids`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CountVector {
    pub final_site: usize,
    pub counts: Vec<usize>,
}

impl CountVector {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

pub fn amplitude_classes(space: &HistorySpace) -> AmplitudeClasses<'_> {
    let mut classes: Vec<AmplitudeClass> = Vec::new();
    let mut index: HashMap<(usize, Vec<BigInt>), usize> = HashMap::new();
    let mut class_of = Vec::with_capacity(space.len());
    for (pos, (h, amp)) in space.histories().iter().zip(space.amps()).enumerate() {
        let key = (h.final_site(), amp.canonical());
        let id = *index.entry(key).or_insert_with(|| {
            classes.push(AmplitudeClass {
                value: amp.clone(),
                final_site: h.final_site(),
                members: FixedBitSet::with_capacity(space.len()),
                count: 0,
            });
            classes.len() - 1
        });
        classes[id].members.insert(pos);
        classes[id].count += 1;
        class_of.push(id);
    }
    let sectors = space
        .sector_sites()
        .into_iter()
        .map(|f| Sector {
            final_site: f,
            class_ids: (0..classes.len())
                .filter(|&c| classes[c].final_site == f)
                .collect(),
        })
        .collect();
    AmplitudeClasses {
        space,
        classes,
        sectors,
        class_of,
    }
}

impl<'a> AmplitudeClasses<'a> {
    pub fn space(&self) -> &'a HistorySpace {
        self.space
    }

    pub fn classes(&self) -> &[AmplitudeClass] {
        &self.classes
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn class_of(&self, pos: usize) -> usize {
        self.class_of[pos]
    }

    /// The only sector of a fixed-final space.
    pub fn single_sector(&self) -> Result<&Sector> {
        match self.space.final_site() {
            FinalSite::Site(_) => Ok(&self.sectors[0]),
            FinalSite::All => Err(Error::WrongSpace(
                "count vectors are per sector; restrict the space to one final site".into(),
            )),
        }
    }

    /// Count vectors of `event` for every sector, in sector order.
    pub fn count_vectors(&self, event: &Event<'_>) -> Result<Vec<CountVector>> {
        if !std::ptr::eq(event.space(), self.space) {
            return Err(Error::SpaceMismatch);
        }
        let mut per_class = vec![0usize; self.classes.len()];
        for pos in event.iter() {
            per_class[self.class_of[pos]] += 1;
        }
        Ok(self
            .sectors
            .iter()
            .map(|s| CountVector {
                final_site: s.final_site,
                counts: s.class_ids.iter().map(|&c| per_class[c]).collect(),
            })
            .collect())
    }

    pub fn lattice(&self, sector: &Sector, limits: &Limits) -> Result<SectorLattice> {
        let values: Vec<CycInt> = sector
            .class_ids
            .iter()
            .map(|&c| self.classes[c].value.clone())
            .collect();
        let counts: Vec<usize> = sector
            .class_ids
            .iter()
            .map(|&c| self.classes[c].count)
            .collect();
        SectorLattice::new(&values, &counts, limits)
    }
}

/// `Π (count_i + 1)`, or `None` on overflow.
pub fn lattice_size(counts: &[usize]) -> Option<u64> {
    counts
        .iter()
        .try_fold(1u64, |acc, &c| acc.checked_mul(c as u64 + 1))
}

/// The count-vector lattice of one sector together with its zero-sum
/// vectors and the maximal ones among them.
#[derive(Clone, Debug)]
pub struct SectorLattice {
    counts: Vec<usize>,
    zero_vectors: Vec<Vec<usize>>,
    maximal: Vec<Vec<usize>>,
}

impl SectorLattice {
    /// `values[i]` is the amplitude of class `i`, occurring `counts[i]`
    /// times. All values must share one order.
    pub fn new(values: &[CycInt], counts: &[usize], limits: &Limits) -> Result<Self> {
        assert_eq!(values.len(), counts.len(), "one count per class");
        let size = lattice_size(counts)
            .filter(|&s| s <= limits.max_count_vectors)
            .ok_or_else(|| {
                Error::infeasible(
                    "count-vector lattice",
                    format!("product of (count+1) over {:?}", counts),
                    limits.max_count_vectors,
                )
            })?;
        if let Some(first) = values.first() {
            for v in values {
                if v.order() != first.order() {
                    return Err(Error::IncompatibleOrder(first.order(), v.order()));
                }
            }
        }
        let coords = canonical_coords(values, counts)?;
        let dim = coords.first().map_or(0, Vec::len);

        let mut zero_vectors = Vec::new();
        let mut k = vec![0usize; counts.len()];
        let mut walker = ZeroWalk {
            counts,
            coords: &coords,
            k: &mut k,
            out: &mut zero_vectors,
        };
        walker.walk(0, &vec![0i64; dim]);
        debug_assert!(zero_vectors.len() as u64 <= size);

        let maximal = maximal_elements(&zero_vectors);
        Ok(Self {
            counts: counts.to_vec(),
            zero_vectors,
            maximal,
        })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// All zero-sum count vectors in lexicographic order, the zero vector
    /// first.
    pub fn zero_vectors(&self) -> &[Vec<usize>] {
        &self.zero_vectors
    }

    /// Zero-sum vectors not dominated by another zero-sum vector.
    pub fn maximal(&self) -> &[Vec<usize>] {
        &self.maximal
    }

    pub fn is_zero_sum(&self, k: &[usize]) -> bool {
        self.zero_vectors.binary_search_by(|z| z.as_slice().cmp(k)).is_ok()
    }

    /// Whether some zero-sum vector `t ≥ k` exists, i.e. a set with counts
    /// `k` lies inside a precluded set of this sector.
    pub fn extends_to_zero(&self, k: &[usize]) -> bool {
        self.maximal
            .iter()
            .any(|m| m.iter().zip(k).all(|(a, b)| a >= b))
    }

    /// Number of zero-sum subsets: `Σ_zero Π C(count_i, k_i)`.
    pub fn precluded_count(&self) -> BigUint {
        let rows = binomial_rows(&self.counts);
        self.zero_vectors
            .iter()
            .map(|z| {
                z.iter()
                    .enumerate()
                    .fold(BigUint::one(), |acc, (i, &k)| acc * &rows[i][k])
            })
            .sum()
    }
}

struct ZeroWalk<'w> {
    counts: &'w [usize],
    coords: &'w [Vec<i64>],
    k: &'w mut Vec<usize>,
    out: &'w mut Vec<Vec<usize>>,
}

impl ZeroWalk<'_> {
    // Depth-first over classes; `partial` is the canonical-coordinate sum of
    // the choices made so far, so each prefix sum is computed once.
    fn walk(&mut self, depth: usize, partial: &[i64]) {
        if depth == self.counts.len() {
            if partial.iter().all(|&c| c == 0) {
                self.out.push(self.k.clone());
            }
            return;
        }
        let mut p = partial.to_vec();
        for c in 0..=self.counts[depth] {
            self.k[depth] = c;
            self.walk(depth + 1, &p);
            for (x, d) in p.iter_mut().zip(&self.coords[depth]) {
                *x += d;
            }
        }
        self.k[depth] = 0;
    }
}

// Reduction modulo Φ_m is Z-linear, so a count vector sums to zero iff
// Σ k_i·canonical(value_i) = 0. Coordinates are bounded up front so the
// walk can use machine integers.
fn canonical_coords(values: &[CycInt], counts: &[usize]) -> Result<Vec<Vec<i64>>> {
    let canon: Vec<Vec<BigInt>> = values.iter().map(CycInt::canonical).collect();
    let mut bound = BigInt::zero();
    for (c, &n) in canon.iter().zip(counts) {
        bound += max_abs(c) * BigInt::from(n);
    }
    if bound > BigInt::from(i64::MAX / 2) {
        return Err(Error::Overflow("count-vector partial sums"));
    }
    Ok(canon
        .iter()
        .map(|c| c.iter().map(|x| x.to_i64().expect("bounded")).collect())
        .collect())
}

fn maximal_elements(vectors: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut by_total: Vec<&Vec<usize>> = vectors.iter().collect();
    by_total.sort_by_key(|v| std::cmp::Reverse(v.iter().sum::<usize>()));
    let mut maximal: Vec<Vec<usize>> = Vec::new();
    for v in by_total {
        // a dominating vector has a strictly larger total, so it is already
        // in `maximal` or dominated by something that is
        let dominated = maximal
            .iter()
            .any(|m| m != v && m.iter().zip(v).all(|(a, b)| a >= b));
        if !dominated {
            maximal.push(v.clone());
        }
    }
    maximal.sort();
    maximal
}

pub(crate) fn binomial_rows(counts: &[usize]) -> Vec<Vec<BigUint>> {
    counts
        .iter()
        .map(|&n| {
            (0..=n)
                .map(|k| num_integer::binomial(BigUint::from(n), BigUint::from(k)))
                .collect()
        })
        .collect()
}

/// Amplitude sum of an event on a fixed-final space.
pub fn event_sum(event: &Event<'_>) -> Result<CycInt> {
    let space = event.space();
    if space.final_site() == FinalSite::All {
        return Err(Error::WrongSpace(
            "event_sum needs one final site; use sector_sums".into(),
        ));
    }
    Ok(sum_positions(space, event.iter()))
}

fn sum_positions(space: &HistorySpace, positions: impl Iterator<Item = usize>) -> CycInt {
    let m = space.spec().phase_order();
    positions.fold(CycInt::zero_unchecked(m), |acc, p| &acc + &space.amps()[p])
}

/// Amplitude sum per final site, for every sector of the space.
pub fn sector_sums(event: &Event<'_>) -> BTreeMap<usize, CycInt> {
    let space = event.space();
    let m = space.spec().phase_order();
    let mut sums: BTreeMap<usize, CycInt> = space
        .sector_sites()
        .into_iter()
        .map(|f| (f, CycInt::zero_unchecked(m)))
        .collect();
    for p in event.iter() {
        let f = space.history(p).final_site();
        let s = sums.get_mut(&f).expect("sector present");
        *s = &*s + &space.amps()[p];
    }
    sums
}

/// `μ(A) = Σ_f s_f·conj(s_f)`, unnormalized.
pub fn quantal_measure(event: &Event<'_>) -> CycInt {
    let m = event.space().spec().phase_order();
    sector_sums(event)
        .values()
        .fold(CycInt::zero_unchecked(m), |acc, s| &acc + &(s * &s.conj()))
}

pub fn quantal_measure_is_zero(event: &Event<'_>) -> bool {
    sector_sums(event).values().all(CycInt::is_zero)
}

/// Preclusion: `μ(A) = 0`. The empty event is precluded.
pub fn is_precluded(event: &Event<'_>) -> bool {
    quantal_measure_is_zero(event)
}

/// Number of precluded events. Sectors are independent, so the count over
/// an unrestricted space is the product of the per-sector counts.
pub fn count_precluded(classes: &AmplitudeClasses<'_>, limits: &Limits) -> Result<BigUint> {
    classes
        .sectors()
        .iter()
        .try_fold(BigUint::one(), |acc, sector| {
            Ok(acc * classes.lattice(sector, limits)?.precluded_count())
        })
}

/// `log2` of the number of preclusive coevents: every non-precluded event
/// may be affirmed or denied freely, so the exponent is
/// `2^|histories| - #precluded`.
pub fn preclusive_coevent_count_exponent(space: &HistorySpace, limits: &Limits) -> Result<BigUint> {
    let precluded = count_precluded(&amplitude_classes(space), limits)?;
    Ok((BigUint::one() << space.len()) - precluded)
}

/// Maximal zero-sum count vectors of a fixed-final space.
pub fn maximal_zero_count_vectors(
    classes: &AmplitudeClasses<'_>,
    limits: &Limits,
) -> Result<Vec<CountVector>> {
    let sector = classes.single_sector()?;
    let lattice = classes.lattice(sector, limits)?;
    Ok(lattice
        .maximal()
        .iter()
        .map(|m| CountVector {
            final_site: sector.final_site,
            counts: m.clone(),
        })
        .collect())
}

/// Counts precluded events by visiting every subset of the space.
pub fn count_precluded_bruteforce(space: &HistorySpace, limits: &Limits) -> Result<BigUint> {
    let items = sector_items(space);
    let mut count = 0u64;
    walk_precluded_subsets(&items, limits.max_count_subsets, limits, |_| count += 1)?;
    Ok(BigUint::from(count))
}

pub(crate) fn sector_items(space: &HistorySpace) -> Vec<(usize, CycInt)> {
    space
        .histories()
        .iter()
        .zip(space.amps())
        .map(|(h, a)| (h.final_site(), a.clone()))
        .collect()
}

/// Visits all `2^N` subsets of `items` (`(final site, amplitude)` pairs) in
/// Gray-code order and calls `on_precluded(mask)` for each precluded one.
///
/// Histories are grouped by (final site, value) on their own, and each
/// group-count vector's verdict is computed once with direct cyclotomic
/// sums, so this path shares nothing with the lattice walk above.
pub(crate) fn walk_precluded_subsets<F: FnMut(u64)>(
    items: &[(usize, CycInt)],
    max_subsets: u64,
    limits: &Limits,
    mut on_precluded: F,
) -> Result<()> {
    let n = items.len();
    let subsets = if n < 64 { Some(1u64 << n) } else { None };
    let subsets = subsets.filter(|&s| s <= max_subsets).ok_or_else(|| {
        Error::infeasible("brute-force subset walk", format!("2^{n} subsets"), max_subsets)
    })?;

    let mut group_of = Vec::with_capacity(n);
    let mut groups: Vec<(usize, CycInt, usize)> = Vec::new();
    for (f, v) in items {
        let g = match groups.iter().position(|(gf, gv, _)| gf == f && gv == v) {
            Some(g) => g,
            None => {
                groups.push((*f, v.clone(), 0));
                groups.len() - 1
            }
        };
        groups[g].2 += 1;
        group_of.push(g);
    }
    let radix: Vec<usize> = groups.iter().map(|g| g.2).collect();
    let table = lattice_size(&radix)
        .filter(|&s| s <= limits.max_count_vectors)
        .ok_or_else(|| {
            Error::infeasible(
                "brute-force verdict table",
                format!("{radix:?}"),
                limits.max_count_vectors,
            )
        })? as usize;
    let mut strides = Vec::with_capacity(radix.len());
    let mut acc = 1usize;
    for r in &radix {
        strides.push(acc);
        acc *= r + 1;
    }

    let verdict_of = |idx: usize| -> bool {
        let mut sums: BTreeMap<usize, CycInt> = BTreeMap::new();
        let mut rest = idx;
        for (g, (f, v, _)) in groups.iter().enumerate() {
            let k = rest % (radix[g] + 1);
            rest /= radix[g] + 1;
            let term = v.scale(&BigInt::from(k));
            let entry = sums
                .entry(*f)
                .or_insert_with(|| CycInt::zero_unchecked(v.order()));
            *entry = &*entry + &term;
        }
        sums.values().all(CycInt::is_zero)
    };

    // 0 unknown, 1 precluded, 2 not precluded
    let mut cache = vec![0u8; table];
    let mut mask = 0u64;
    let mut idx = 0usize;
    let check = |idx: usize, cache: &mut Vec<u8>| -> bool {
        if cache[idx] == 0 {
            cache[idx] = if verdict_of(idx) { 1 } else { 2 };
        }
        cache[idx] == 1
    };
    if check(0, &mut cache) {
        on_precluded(0);
    }
    for i in 1..subsets {
        let j = i.trailing_zeros() as usize;
        mask ^= 1 << j;
        if mask >> j & 1 == 1 {
            idx += strides[group_of[j]];
        } else {
            idx -= strides[group_of[j]];
        }
        if check(idx, &mut cache) {
            on_precluded(mask);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histories::enumerate;
    use crate::model::{initial_state, LatticeSpec, StateLabel};

    fn space(n: usize, t: usize, label: StateLabel, f: FinalSite) -> HistorySpace {
        let spec = LatticeSpec::new(n, t).unwrap();
        let st = initial_state(&spec, label).unwrap();
        enumerate(&spec, &st, f, &Limits::default()).unwrap()
    }

    fn class_counts(classes: &AmplitudeClasses<'_>) -> Vec<(String, usize)> {
        let mut v: Vec<_> = classes
            .classes()
            .iter()
            .map(|c| (c.value.to_string(), c.count))
            .collect();
        v.sort();
        v
    }

    #[test]
    fn three_site_multisets() {
        for label in [StateLabel::Plus, StateLabel::Ground] {
            let sp = space(3, 3, label, FinalSite::Site(0));
            let classes = amplitude_classes(&sp);
            assert_eq!(
                class_counts(&classes),
                vec![("1".into(), 9), ("ω".into(), 6), ("ω̄".into(), 12)]
            );
        }
        let sp = space(3, 1, StateLabel::Ground, FinalSite::Site(0));
        assert_eq!(
            class_counts(&amplitude_classes(&sp)),
            vec![("1".into(), 1), ("ω".into(), 2)]
        );
    }

    #[test]
    fn classes_partition_space() {
        let sp = space(3, 2, StateLabel::Standing, FinalSite::All);
        let classes = amplitude_classes(&sp);
        let total: usize = classes.classes().iter().map(|c| c.count).sum();
        assert_eq!(total, sp.len());
        let mut seen = FixedBitSet::with_capacity(sp.len());
        for c in classes.classes() {
            assert!(seen.is_disjoint(&c.members));
            seen.union_with(&c.members);
            for p in c.members.ones() {
                assert_eq!(sp.history(p).final_site(), c.final_site);
                assert_eq!(sp.amps()[p], c.value);
            }
        }
        assert_eq!(seen.count_ones(..), sp.len());
        let firsts: Vec<usize> = classes
            .classes()
            .iter()
            .map(|c| c.members.ones().next().unwrap())
            .collect();
        assert!(firsts.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(classes.sectors().len(), 3);
    }

    #[test]
    fn sums_and_preclusion() {
        let sp = space(3, 3, StateLabel::Plus, FinalSite::Site(0));
        let classes = amplitude_classes(&sp);
        let triple: Vec<usize> = classes
            .classes()
            .iter()
            .map(|c| c.members.ones().next().unwrap())
            .collect();
        let e = sp.event(triple.clone()).unwrap();
        assert!(event_sum(&e).unwrap().is_zero());
        assert!(is_precluded(&e));
        assert!(is_precluded(&sp.empty_event()));
        assert!(event_sum(&sp.empty_event()).unwrap().is_zero());
        let single = sp.event([triple[0]]).unwrap();
        assert!(!event_sum(&single).unwrap().is_zero());
        assert!(!is_precluded(&single));
    }

    #[test]
    fn sector_decomposition() {
        let sp = space(3, 3, StateLabel::Ground, FinalSite::All);
        let a = sp
            .event(["0-1-2-0", "1-2-0-1"].iter().map(|s| sp.position_of(&s.parse().unwrap()).unwrap()))
            .unwrap();
        let sums = sector_sums(&a);
        assert_eq!(sums.len(), 3);
        assert!(!sums[&0].is_zero() && !sums[&1].is_zero() && sums[&2].is_zero());
        assert!(!quantal_measure_is_zero(&a));
        assert!(event_sum(&a).is_err());

        // zero-sum triple inside sector 0: 0-0-0-0 (1), 1-0-0-0 (ω), 1-1-0-0... pick by value
        let zero_triple: Vec<usize> = {
            let classes = amplitude_classes(&sp);
            classes.sectors()[0]
                .class_ids
                .iter()
                .map(|&c| classes.classes()[c].members.ones().next().unwrap())
                .collect()
        };
        assert_eq!(zero_triple.len(), 3);
        let z = sp.event(zero_triple.clone()).unwrap();
        assert!(is_precluded(&z));
        assert!(quantal_measure(&z).is_zero());
        let one_more = sp.position_of(&"1-1-1-1".parse().unwrap()).unwrap();
        let zu = sp.event(zero_triple.iter().copied().chain([one_more])).unwrap();
        assert!(!is_precluded(&zu));
        assert_eq!(quantal_measure(&zu), CycInt::one(3).unwrap());
    }

    #[test]
    fn disjoint_sector_union_stays_precluded() {
        let sp = space(3, 2, StateLabel::Plus, FinalSite::All);
        let classes = amplitude_classes(&sp);
        let pick = |sector: usize| -> Vec<usize> {
            classes.sectors()[sector]
                .class_ids
                .iter()
                .map(|&c| classes.classes()[c].members.ones().next().unwrap())
                .collect()
        };
        let a = sp.event(pick(0)).unwrap();
        let b = sp.event(pick(2)).unwrap();
        if is_precluded(&a) && is_precluded(&b) {
            assert!(is_precluded(&a.union(&b).unwrap()));
        }
    }

    #[test]
    fn precluded_counts() {
        for label in [StateLabel::Plus, StateLabel::Ground] {
            let sp = space(3, 3, label, FinalSite::Site(0));
            let classes = amplitude_classes(&sp);
            let limits = Limits::default();
            assert_eq!(count_precluded(&classes, &limits).unwrap(), BigUint::from(2017807u32));
            assert_eq!(
                preclusive_coevent_count_exponent(&sp, &limits).unwrap(),
                BigUint::from(132199921u32)
            );
        }
    }

    #[test]
    fn closed_form_matches_lattice() {
        // Σ_k C(12,k)·C(9,k)·C(6,k)
        let closed: BigUint = (0..=6u32)
            .map(|k| {
                [12u32, 9, 6]
                    .iter()
                    .map(|&n| num_integer::binomial(BigUint::from(n), BigUint::from(k)))
                    .product::<BigUint>()
            })
            .sum();
        assert_eq!(closed, BigUint::from(2017807u32));
    }

    #[test]
    fn synthetic_lattices() {
        let limits = Limits::default();
        let w = CycInt::root(3, 1).unwrap();
        let single = SectorLattice::new(&[w], &[5], &limits).unwrap();
        assert_eq!(single.precluded_count(), BigUint::one());
        assert_eq!(single.maximal(), &[vec![0]]);

        let values = [CycInt::one(2).unwrap(), CycInt::from_integer(2, -1).unwrap()];
        let pm = SectorLattice::new(&values, &[2, 3], &limits).unwrap();
        assert_eq!(pm.maximal(), &[vec![2, 2]]);
        assert_eq!(pm.zero_vectors(), &[vec![0, 0], vec![1, 1], vec![2, 2]]);
        assert!(pm.extends_to_zero(&[0, 2]));
        assert!(!pm.extends_to_zero(&[0, 3]));
        // 1 + 2·3 + 1·3
        assert_eq!(pm.precluded_count(), BigUint::from(10u32));

        let tiny = Limits {
            max_count_vectors: 11,
            ..Limits::default()
        };
        assert!(matches!(
            SectorLattice::new(&values, &[2, 3], &tiny).unwrap_err(),
            Error::Infeasible { .. }
        ));
    }

    #[test]
    fn maximal_vectors() {
        let sp = space(3, 3, StateLabel::Plus, FinalSite::Site(0));
        let classes = amplitude_classes(&sp);
        let maximal = maximal_zero_count_vectors(&classes, &Limits::default()).unwrap();
        assert_eq!(maximal.len(), 1);
        assert_eq!(maximal[0].counts, vec![6, 6, 6]);

        let all = space(3, 3, StateLabel::Plus, FinalSite::All);
        assert!(maximal_zero_count_vectors(&amplitude_classes(&all), &Limits::default()).is_err());
    }

    #[test]
    fn bruteforce_small() {
        let limits = Limits::default();
        let mut empty = 0;
        walk_precluded_subsets(&[], 1, &limits, |_| empty += 1).unwrap();
        assert_eq!(empty, 1);

        let sp = space(2, 2, StateLabel::Ground, FinalSite::Site(0));
        assert_eq!(
            count_precluded_bruteforce(&sp, &limits).unwrap(),
            count_precluded(&amplitude_classes(&sp), &limits).unwrap()
        );
        let sp = space(3, 3, StateLabel::Plus, FinalSite::Site(0));
        let capped = Limits {
            max_count_subsets: 1 << 20,
            ..Limits::default()
        };
        assert!(matches!(
            count_precluded_bruteforce(&sp, &capped).unwrap_err(),
            Error::Infeasible { .. }
        ));
    }

    #[test]
    fn bruteforce_agrees_with_explicit_sums() {
        let sp = space(2, 2, StateLabel::Plus, FinalSite::All);
        let mut masks = Vec::new();
        walk_precluded_subsets(&sector_items(&sp), 1 << 8, &Limits::default(), |m| masks.push(m))
            .unwrap();
        masks.sort_unstable();
        let explicit: Vec<u64> = (0..1u64 << sp.len())
            .filter(|&m| {
                let e = sp.event((0..sp.len()).filter(|i| m >> i & 1 == 1)).unwrap();
                is_precluded(&e)
            })
            .collect();
        assert_eq!(masks, explicit);
    }
}
