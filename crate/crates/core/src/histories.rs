//! Trajectories of the hopper, their amplitudes, and events (sets of
//! trajectories).
//!
//! Histories are indexed canonically by `Σ sites[t]·n^t`, base-n
//! little-endian over time. A space restricted to one final site keeps the
//! relative order of the unrestricted one, so its positions are
//! `Σ_{t<T} sites[t]·n^t`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;

use crate::cyclotomic::CycInt;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::model::{InitialState, LatticeSpec};

/// Start site followed by the position after each step.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct History {
    sites: Vec<usize>,
}

impl History {
    pub fn new(sites: Vec<usize>) -> Self {
        Self { sites }
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn start(&self) -> usize {
        self.sites[0]
    }

    pub fn final_site(&self) -> usize {
        *self.sites.last().expect("history has at least one site")
    }

    pub fn steps(&self) -> usize {
        self.sites.len() - 1
    }

    pub fn hops(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.sites.windows(2).map(|w| (w[0], w[1]))
    }

    /// Canonical index in the unrestricted space of an `n`-site lattice.
    pub fn global_index(&self, n: usize) -> u64 {
        self.sites
            .iter()
            .rev()
            .fold(0u64, |acc, &s| acc * n as u64 + s as u64)
    }

    pub fn from_global_index(mut index: u64, n: usize, steps: usize) -> Self {
        let sites = (0..=steps)
            .map(|_| {
                let s = (index % n as u64) as usize;
                index /= n as u64;
                s
            })
            .collect();
        Self { sites }
    }

    /// Adds `shift` (mod n) to every site.
    pub fn rotated(&self, shift: i64, n: usize) -> Self {
        let s = shift.rem_euclid(n as i64) as usize;
        Self {
            sites: self.sites.iter().map(|&x| (x + s) % n).collect(),
        }
    }

    /// `x ↦ -x (mod n)` on every site.
    pub fn reflected(&self, n: usize) -> Self {
        Self {
            sites: self.sites.iter().map(|&x| (n - x) % n).collect(),
        }
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.sites.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join("-"))
    }
}

impl FromStr for History {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let sites = s
            .split('-')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidHistory(s.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        if sites.is_empty() {
            return Err(Error::InvalidHistory(s.to_string()));
        }
        Ok(Self { sites })
    }
}

/// Classification of a single hop by its displacement `d = x' - x (mod n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HopKind {
    Rest,
    Forward,
    Backward,
    /// `d = n/2` on an even lattice; counts zero toward circulation.
    Halfway,
}

pub fn hop_kind(n: usize, from: usize, to: usize) -> HopKind {
    let d = (to + n - from) % n;
    if d == 0 {
        HopKind::Rest
    } else if 2 * d < n {
        HopKind::Forward
    } else if 2 * d > n {
        HopKind::Backward
    } else {
        HopKind::Halfway
    }
}

/// Forward hops minus backward hops.
pub fn circulation(h: &History, n: usize) -> i64 {
    h.hops()
        .map(|(a, b)| match hop_kind(n, a, b) {
            HopKind::Forward => 1,
            HopKind::Backward => -1,
            HopKind::Rest | HopKind::Halfway => 0,
        })
        .sum()
}

pub fn rest_count(h: &History) -> usize {
    h.hops().filter(|(a, b)| a == b).count()
}

pub fn visited(h: &History) -> BTreeSet<usize> {
    h.sites.iter().copied().collect()
}

pub fn has_halfway_hop(h: &History, n: usize) -> bool {
    h.hops().any(|(a, b)| hop_kind(n, a, b) == HopKind::Halfway)
}

/// Which histories a space contains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FinalSite {
    All,
    Site(usize),
}

impl fmt::Display for FinalSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FinalSite::All => write!(f, "all"),
            FinalSite::Site(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for FinalSite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(FinalSite::All);
        }
        s.parse::<usize>()
            .map(FinalSite::Site)
            .map_err(|_| Error::InvalidLattice(format!("bad final site `{s}`")))
    }
}

/// All histories of a lattice and duration, optionally restricted to one
/// final site, with their exact amplitudes.
#[derive(Clone, Debug)]
pub struct HistorySpace {
    spec: LatticeSpec,
    state: InitialState,
    final_site: FinalSite,
    histories: Vec<History>,
    amps: Vec<CycInt>,
}

/// Builds the canonical space. Refuses spaces above `limits.max_histories`.
pub fn enumerate(
    spec: &LatticeSpec,
    state: &InitialState,
    final_site: FinalSite,
    limits: &Limits,
) -> Result<HistorySpace> {
    let n = spec.sites();
    let t = spec.steps();
    if let FinalSite::Site(f) = final_site {
        spec.check_site(f)?;
    }
    if state.amps().len() != n {
        return Err(Error::InvalidState(format!(
            "state has {} amplitudes for a {n}-site lattice",
            state.amps().len()
        )));
    }
    let free_sites = match final_site {
        FinalSite::All => t + 1,
        FinalSite::Site(_) => t,
    };
    let size = u32::try_from(free_sites)
        .ok()
        .and_then(|e| n.checked_pow(e))
        .filter(|&s| s <= limits.max_histories)
        .ok_or_else(|| {
            Error::infeasible(
                "history space",
                format!("{n}^{free_sites} histories"),
                limits.max_histories,
            )
        })?;

    let mut histories = Vec::with_capacity(size);
    let mut amps = Vec::with_capacity(size);
    for local in 0..size as u64 {
        let h = match final_site {
            FinalSite::All => History::from_global_index(local, n, t),
            FinalSite::Site(f) => {
                let mut h = History::from_global_index(local, n, t - 1);
                h.sites.push(f);
                h
            }
        };
        amps.push(amplitude_of(spec, state, &h));
        histories.push(h);
    }
    Ok(HistorySpace {
        spec: *spec,
        state: state.clone(),
        final_site,
        histories,
        amps,
    })
}

fn amplitude_of(spec: &LatticeSpec, state: &InitialState, h: &History) -> CycInt {
    let exponent: usize = h
        .hops()
        .map(|(a, b)| spec.hop_exponent_unchecked(a, b))
        .sum();
    state.amps()[h.start()].mul_root(exponent as i64)
}

/// Initial amplitude times the product of hop amplitudes.
pub fn history_amplitude(space: &HistorySpace, h: &History) -> Result<CycInt> {
    let spec = space.spec();
    if h.steps() != spec.steps() {
        return Err(Error::InvalidHistory(format!(
            "{h} has {} steps, space has {}",
            h.steps(),
            spec.steps()
        )));
    }
    for &s in h.sites() {
        spec.check_site(s)?;
    }
    Ok(amplitude_of(spec, &space.state, h))
}

impl HistorySpace {
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn state(&self) -> &InitialState {
        &self.state
    }

    pub fn final_site(&self) -> FinalSite {
        self.final_site
    }

    pub fn len(&self) -> usize {
        self.histories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.histories.is_empty()
    }

    pub fn histories(&self) -> &[History] {
        &self.histories
    }

    pub fn history(&self, pos: usize) -> &History {
        &self.histories[pos]
    }

    pub fn amps(&self) -> &[CycInt] {
        &self.amps
    }

    /// Final sites present in the space, ascending.
    pub fn sector_sites(&self) -> Vec<usize> {
        match self.final_site {
            FinalSite::All => (0..self.spec.sites()).collect(),
            FinalSite::Site(f) => vec![f],
        }
    }

    /// Position of `h` in this space, if it belongs here.
    pub fn position_of(&self, h: &History) -> Option<usize> {
        let n = self.spec.sites();
        if h.steps() != self.spec.steps() || h.sites().iter().any(|&s| s >= n) {
            return None;
        }
        let global = h.global_index(n);
        match self.final_site {
            FinalSite::All => Some(global as usize),
            FinalSite::Site(f) if h.final_site() == f => {
                let block = (n as u64).pow(self.spec.steps() as u32);
                Some((global % block) as usize)
            }
            FinalSite::Site(_) => None,
        }
    }

    /// Whether two spaces share lattice, duration and final-site selection.
    pub fn same_shape(&self, other: &HistorySpace) -> bool {
        self.spec == other.spec && self.final_site == other.final_site
    }

    pub fn event<I: IntoIterator<Item = usize>>(&self, positions: I) -> Result<Event<'_>> {
        let mut members = FixedBitSet::with_capacity(self.len());
        for p in positions {
            if p >= self.len() {
                return Err(Error::InvalidHistory(format!(
                    "position {p} outside a space of {} histories",
                    self.len()
                )));
            }
            members.insert(p);
        }
        Ok(Event {
            space: self,
            members,
        })
    }

    pub fn empty_event(&self) -> Event<'_> {
        Event {
            space: self,
            members: FixedBitSet::with_capacity(self.len()),
        }
    }

    pub fn full_event(&self) -> Event<'_> {
        let mut members = FixedBitSet::with_capacity(self.len());
        members.insert_range(..);
        Event {
            space: self,
            members,
        }
    }

    /// The event of all histories satisfying `pred`.
    pub fn event_where<F: Fn(&History) -> bool>(&self, pred: F) -> Event<'_> {
        let mut members = FixedBitSet::with_capacity(self.len());
        for (i, h) in self.histories.iter().enumerate() {
            if pred(h) {
                members.insert(i);
            }
        }
        Event {
            space: self,
            members,
        }
    }
}

/// A set of histories of one space.
#[derive(Clone, Debug)]
pub struct Event<'a> {
    space: &'a HistorySpace,
    members: FixedBitSet,
}

impl PartialEq for Event<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.space, other.space) && self.members == other.members
    }
}

impl Eq for Event<'_> {}

impl<'a> Event<'a> {
    pub fn space(&self) -> &'a HistorySpace {
        self.space
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.members.contains(pos)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    /// Sorted member positions.
    pub fn indices(&self) -> Vec<usize> {
        self.members.ones().collect()
    }

    pub fn histories(&self) -> impl Iterator<Item = &'a History> + '_ {
        let space = self.space;
        self.members.ones().map(move |i| space.history(i))
    }

    pub fn same_space(&self, other: &Event<'_>) -> bool {
        std::ptr::eq(self.space, other.space)
    }

    pub fn is_subset(&self, other: &Event<'_>) -> Result<bool> {
        if !self.same_space(other) {
            return Err(Error::SpaceMismatch);
        }
        Ok(self.members.is_subset(&other.members))
    }

    pub fn union(&self, other: &Event<'a>) -> Result<Event<'a>> {
        if !self.same_space(other) {
            return Err(Error::SpaceMismatch);
        }
        let mut members = self.members.clone();
        members.union_with(&other.members);
        Ok(Event {
            space: self.space,
            members,
        })
    }

    pub fn complement(&self) -> Event<'a> {
        let mut members = self.members.clone();
        members.toggle_range(..);
        Event {
            space: self.space,
            members,
        }
    }

    pub fn without(&self, pos: usize) -> Event<'a> {
        let mut members = self.members.clone();
        members.set(pos, false);
        Event {
            space: self.space,
            members,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{initial_state, StateLabel};

    fn space(n: usize, t: usize, label: StateLabel, f: FinalSite) -> HistorySpace {
        let spec = LatticeSpec::new(n, t).unwrap();
        let st = initial_state(&spec, label).unwrap();
        enumerate(&spec, &st, f, &Limits::default()).unwrap()
    }

    #[test]
    fn sizes() {
        assert_eq!(space(3, 3, StateLabel::Plus, FinalSite::All).len(), 81);
        assert_eq!(space(3, 3, StateLabel::Plus, FinalSite::Site(0)).len(), 27);
        assert_eq!(space(2, 1, StateLabel::Ground, FinalSite::All).len(), 4);
    }

    #[test]
    fn size_guard() {
        let spec = LatticeSpec::new(3, 3).unwrap();
        let st = initial_state(&spec, StateLabel::Ground).unwrap();
        let limits = Limits {
            max_histories: 80,
            ..Limits::default()
        };
        let err = enumerate(&spec, &st, FinalSite::All, &limits).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }));
        assert!(enumerate(&spec, &st, FinalSite::Site(0), &limits).is_ok());
        assert!(enumerate(&spec, &st, FinalSite::Site(3), &limits).is_err());
    }

    #[test]
    fn canonical_order() {
        let all = space(3, 3, StateLabel::Plus, FinalSite::All);
        let fixed = space(3, 3, StateLabel::Plus, FinalSite::Site(2));
        for (i, h) in all.histories().iter().enumerate() {
            assert_eq!(h.global_index(3), i as u64);
            assert_eq!(all.position_of(h), Some(i));
        }
        let globals: Vec<u64> = fixed.histories().iter().map(|h| h.global_index(3)).collect();
        assert!(globals.windows(2).all(|w| w[0] < w[1]));
        for (i, h) in fixed.histories().iter().enumerate() {
            assert_eq!(h.final_site(), 2);
            assert_eq!(fixed.position_of(h), Some(i));
            assert_eq!(fixed.amps()[i], all.amps()[h.global_index(3) as usize]);
        }
        assert_eq!(fixed.position_of(&"0-0-0-0".parse().unwrap()), None);
    }

    #[test]
    fn amplitudes() {
        let sp = space(3, 3, StateLabel::Plus, FinalSite::All);
        let w = |k| CycInt::root(3, k).unwrap();
        let amp = |s: &str| history_amplitude(&sp, &s.parse().unwrap()).unwrap();
        assert_eq!(amp("0-0-0-0"), w(0));
        assert_eq!(amp("0-1-2-0"), w(0));
        assert_eq!(amp("1-1-1-1"), w(1));
        assert_eq!(amp("2-0-0-0"), w(2 + 1));
        assert!(history_amplitude(&sp, &"0-1".parse().unwrap()).is_err());
        assert!(history_amplitude(&sp, &"0-1-2-3".parse().unwrap()).is_err());
        for (h, a) in sp.histories().iter().zip(sp.amps()) {
            assert_eq!(&history_amplitude(&sp, h).unwrap(), a);
        }
    }

    #[test]
    fn ground_state_amplitude_ignores_start() {
        let sp = space(3, 3, StateLabel::Ground, FinalSite::All);
        for h in sp.histories() {
            let a = history_amplitude(&sp, h).unwrap();
            for shift in 1..3 {
                let r = h.rotated(shift, 3);
                assert_eq!(a, history_amplitude(&sp, &r).unwrap());
            }
        }
    }

    #[test]
    fn observables() {
        let h: History = "0-1-2-0".parse().unwrap();
        assert_eq!(circulation(&h, 3), 3);
        assert_eq!(rest_count(&h), 0);
        assert_eq!(visited(&h), [0, 1, 2].into_iter().collect());
        let h: History = "0-0-0-0".parse().unwrap();
        assert_eq!((circulation(&h, 3), rest_count(&h)), (0, 3));
        assert_eq!(visited(&h).len(), 1);
        let h: History = "0-2-0-0".parse().unwrap();
        assert_eq!((circulation(&h, 3), rest_count(&h)), (0, 1));
        let h: History = "0-2-3".parse().unwrap();
        assert!(has_halfway_hop(&h, 4));
        assert_eq!(circulation(&h, 4), 1);
        assert_eq!(h.to_string(), "0-2-3");
    }

    #[test]
    fn reflection_negates_circulation() {
        let sp = space(3, 3, StateLabel::Ground, FinalSite::All);
        for h in sp.histories() {
            let r = h.reflected(3);
            assert_eq!(circulation(&r, 3), -circulation(h, 3));
            assert_eq!(rest_count(&r), rest_count(h));
        }
    }

    #[test]
    fn event_ops() {
        let sp = space(2, 2, StateLabel::Ground, FinalSite::Site(0));
        let other = space(2, 2, StateLabel::Ground, FinalSite::Site(0));
        let a = sp.event([0, 2]).unwrap();
        let full = sp.full_event();
        assert!(a.is_subset(&full).unwrap());
        assert_eq!(a.complement().indices(), vec![1, 3]);
        assert_eq!(a.union(&a.complement()).unwrap(), full);
        assert_eq!(a.without(2).indices(), vec![0]);
        assert!(sp.event([4]).is_err());
        assert_eq!(a.is_subset(&other.full_event()).unwrap_err(), Error::SpaceMismatch);
    }
}
