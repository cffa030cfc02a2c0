//! Questions asked of primitive coevents: how they circulate, how restless
//! they are, which named events they affirm, how they transform under
//! lattice rotations, and whether different initial states share any.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::coevents::{primitive_ensemble, MultiplicativeCoevent};
use crate::error::{Error, Result};
use crate::histories::{
    circulation, enumerate, hop_kind, rest_count, visited, Event, FinalSite, History, HistorySpace,
    HopKind,
};
use crate::limits::Limits;
use crate::model::{initial_state, LatticeSpec, StateLabel};

/// Sum of history circulations over the support.
pub fn net_circulation(phi: &MultiplicativeCoevent<'_>) -> i64 {
    let n = phi.space().spec().sites();
    phi.support().histories().map(|h| circulation(h, n)).sum()
}

/// Exact mean of [`net_circulation`].
pub fn average_net_circulation(coevents: &[MultiplicativeCoevent<'_>]) -> Result<BigRational> {
    if coevents.is_empty() {
        return Err(Error::EmptyList);
    }
    let total: i64 = coevents.iter().map(net_circulation).sum();
    Ok(BigRational::new(
        BigInt::from(total),
        BigInt::from(coevents.len()),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RestBucket {
    /// Every support history hops at every step.
    AllMoving,
    /// One history never moves, all others never rest.
    #[serde(rename = "mixed-6v1")]
    Mixed6v1,
    /// Every support history rests exactly once.
    RestOnceEach,
    Other,
}

impl fmt::Display for RestBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RestBucket::AllMoving => "all-moving",
            RestBucket::Mixed6v1 => "mixed-6v1",
            RestBucket::RestOnceEach => "rest-once-each",
            RestBucket::Other => "other",
        };
        f.write_str(s)
    }
}

/// Sorted per-history rest counts of a support.
pub fn rest_profile(phi: &MultiplicativeCoevent<'_>) -> Vec<usize> {
    let mut p: Vec<usize> = phi.support().histories().map(rest_count).collect();
    p.sort_unstable();
    p
}

pub fn rest_bucket(profile: &[usize], steps: usize) -> RestBucket {
    let never_moving = profile.iter().filter(|&&r| r == steps).count();
    if profile.iter().all(|&r| r == 0) {
        RestBucket::AllMoving
    } else if profile.len() >= 2
        && never_moving == 1
        && profile.iter().filter(|&&r| r == 0).count() == profile.len() - 1
    {
        RestBucket::Mixed6v1
    } else if profile.iter().all(|&r| r == 1) {
        RestBucket::RestOnceEach
    } else {
        RestBucket::Other
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RestHistogram {
    pub all_moving: usize,
    #[serde(rename = "mixed_6v1")]
    pub mixed_6v1: usize,
    pub rest_once_each: usize,
    pub other: usize,
    /// Rest profile (as `"0,0,…,3"`) to number of coevents.
    pub profiles: BTreeMap<String, usize>,
}

impl RestHistogram {
    pub fn total(&self) -> usize {
        self.all_moving + self.mixed_6v1 + self.rest_once_each + self.other
    }
}

pub fn classify_restlessness(coevents: &[MultiplicativeCoevent<'_>]) -> RestHistogram {
    let mut hist = RestHistogram::default();
    for phi in coevents {
        let profile = rest_profile(phi);
        match rest_bucket(&profile, phi.space().spec().steps()) {
            RestBucket::AllMoving => hist.all_moving += 1,
            RestBucket::Mixed6v1 => hist.mixed_6v1 += 1,
            RestBucket::RestOnceEach => hist.rest_once_each += 1,
            RestBucket::Other => hist.other += 1,
        }
        let key = profile
            .iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join(",");
        *hist.profiles.entry(key).or_default() += 1;
    }
    hist
}

/// Events with a name, built intrinsically from the histories.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NamedEvent {
    NeverMoves,
    NeverRests,
    RestsExactlyOnce,
    AvoidsSite(usize),
    AvoidsSomeSite,
    VisitsAllSites,
    /// Only forward hops and rests, at least one forward hop.
    CirculatesPositiveOnly,
    CirculatesNegativeOnly,
    TerminatesAt(usize),
    /// Explicit member positions.
    Custom(Vec<usize>),
}

impl NamedEvent {
    /// The events used to tell initial states apart.
    pub fn witnesses() -> Vec<NamedEvent> {
        vec![
            NamedEvent::NeverMoves,
            NamedEvent::NeverRests,
            NamedEvent::RestsExactlyOnce,
            NamedEvent::CirculatesPositiveOnly,
            NamedEvent::CirculatesNegativeOnly,
            NamedEvent::AvoidsSomeSite,
            NamedEvent::VisitsAllSites,
        ]
    }
}

impl fmt::Display for NamedEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedEvent::NeverMoves => write!(f, "never_moves"),
            NamedEvent::NeverRests => write!(f, "never_rests"),
            NamedEvent::RestsExactlyOnce => write!(f, "rests_exactly_once"),
            NamedEvent::AvoidsSite(s) => write!(f, "avoids_site:{s}"),
            NamedEvent::AvoidsSomeSite => write!(f, "avoids_some_site"),
            NamedEvent::VisitsAllSites => write!(f, "visits_all_sites"),
            NamedEvent::CirculatesPositiveOnly => write!(f, "circulates_positive_only"),
            NamedEvent::CirculatesNegativeOnly => write!(f, "circulates_negative_only"),
            NamedEvent::TerminatesAt(s) => write!(f, "terminates_at:{s}"),
            NamedEvent::Custom(m) => {
                let parts: Vec<String> = m.iter().map(|p| p.to_string()).collect();
                write!(f, "custom:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for NamedEvent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownEvent(s.to_string());
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let site = || -> Result<usize> {
            arg.ok_or_else(unknown)?
                .trim()
                .parse()
                .map_err(|_| unknown())
        };
        Ok(match name {
            "never_moves" => NamedEvent::NeverMoves,
            "never_rests" => NamedEvent::NeverRests,
            "rests_exactly_once" => NamedEvent::RestsExactlyOnce,
            "avoids_site" => NamedEvent::AvoidsSite(site()?),
            "avoids_some_site" => NamedEvent::AvoidsSomeSite,
            "visits_all_sites" => NamedEvent::VisitsAllSites,
            "circulates_positive_only" => NamedEvent::CirculatesPositiveOnly,
            "circulates_negative_only" => NamedEvent::CirculatesNegativeOnly,
            "terminates_at" => NamedEvent::TerminatesAt(site()?),
            "custom" => {
                let body = arg.ok_or_else(unknown)?;
                let members = if body.trim().is_empty() {
                    Vec::new()
                } else {
                    body.split(',')
                        .map(|p| p.trim().parse().map_err(|_| unknown()))
                        .collect::<Result<Vec<usize>>>()?
                };
                NamedEvent::Custom(members)
            }
            _ => return Err(unknown()),
        })
    }
}

fn only_direction(h: &History, n: usize, dir: HopKind) -> bool {
    let mut moved = false;
    for (a, b) in h.hops() {
        match hop_kind(n, a, b) {
            HopKind::Rest => {}
            k if k == dir => moved = true,
            _ => return false,
        }
    }
    moved
}

/// The event a name denotes in `space`.
pub fn named_event<'a>(space: &'a HistorySpace, event: &NamedEvent) -> Result<Event<'a>> {
    let spec = space.spec();
    let n = spec.sites();
    let steps = spec.steps();
    Ok(match event {
        NamedEvent::NeverMoves => space.event_where(|h| rest_count(h) == steps),
        NamedEvent::NeverRests => space.event_where(|h| rest_count(h) == 0),
        NamedEvent::RestsExactlyOnce => space.event_where(|h| rest_count(h) == 1),
        NamedEvent::AvoidsSite(s) => {
            spec.check_site(*s)?;
            space.event_where(|h| !h.sites().contains(s))
        }
        NamedEvent::AvoidsSomeSite => space.event_where(|h| visited(h).len() < n),
        NamedEvent::VisitsAllSites => space.event_where(|h| visited(h).len() == n),
        NamedEvent::CirculatesPositiveOnly => {
            space.event_where(|h| only_direction(h, n, HopKind::Forward))
        }
        NamedEvent::CirculatesNegativeOnly => {
            space.event_where(|h| only_direction(h, n, HopKind::Backward))
        }
        NamedEvent::TerminatesAt(f) => {
            spec.check_site(*f)?;
            space.event_where(|h| h.final_site() == *f)
        }
        NamedEvent::Custom(members) => space.event(members.iter().copied())?,
    })
}

/// How an ensemble of coevents judges one event and its complement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EventVerdicts {
    pub event: String,
    pub verdicts: Vec<bool>,
    pub affirmed: usize,
    pub complement_verdicts: Vec<bool>,
    pub complement_affirmed: usize,
    /// Coevents denying both the event and its complement.
    pub both_denied: usize,
}

pub fn event_verdicts(
    space: &HistorySpace,
    coevents: &[MultiplicativeCoevent<'_>],
    event: &NamedEvent,
) -> Result<EventVerdicts> {
    let e = named_event(space, event)?;
    let complement = e.complement();
    let verdicts = coevents
        .iter()
        .map(|phi| phi.evaluate(&e))
        .collect::<Result<Vec<_>>>()?;
    let complement_verdicts = coevents
        .iter()
        .map(|phi| phi.evaluate(&complement))
        .collect::<Result<Vec<_>>>()?;
    let both_denied = verdicts
        .iter()
        .zip(&complement_verdicts)
        .filter(|(a, b)| !**a && !**b)
        .count();
    Ok(EventVerdicts {
        event: event.to_string(),
        affirmed: verdicts.iter().filter(|&&v| v).count(),
        complement_affirmed: complement_verdicts.iter().filter(|&&v| v).count(),
        verdicts,
        complement_verdicts,
        both_denied,
    })
}

/// Relabels every support history by `x ↦ x + shift (mod n)` and locates
/// the result in `target`.
pub fn rotate_coevent<'b>(
    phi: &MultiplicativeCoevent<'_>,
    shift: i64,
    target: &'b HistorySpace,
) -> Result<MultiplicativeCoevent<'b>> {
    let n = phi.space().spec().sites();
    if target.spec() != phi.space().spec() {
        return Err(Error::SpaceMismatch);
    }
    let positions = phi
        .support()
        .histories()
        .map(|h| {
            let r = h.rotated(shift, n);
            target
                .position_of(&r)
                .ok_or_else(|| Error::InvalidHistory(format!("{r} is not in the target space")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MultiplicativeCoevent::new(target.event(positions)?))
}

/// Support as sorted canonical indices of the unrestricted space.
pub fn global_support(phi: &MultiplicativeCoevent<'_>) -> Vec<u64> {
    let n = phi.space().spec().sites();
    let mut g: Vec<u64> = phi.support().histories().map(|h| h.global_index(n)).collect();
    g.sort_unstable();
    g
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetryReport {
    pub state: String,
    /// Primitive coevents per final site.
    pub sector_sizes: BTreeMap<usize, usize>,
    pub ensemble_size: usize,
    /// Coevents mapped to themselves by some nontrivial rotation.
    pub individually_invariant: usize,
    /// Shift to whether the whole ensemble is mapped onto itself.
    pub ensemble_invariant_under: BTreeMap<usize, bool>,
    pub ensemble_invariant: bool,
}

/// Rotation behaviour of the union, over all final sites, of the
/// primitive coevents of one initial state.
pub fn ensemble_symmetry_report(
    spec: &LatticeSpec,
    state: &StateLabel,
    limits: &Limits,
) -> Result<SymmetryReport> {
    let n = spec.sites();
    let st = initial_state(spec, state.clone())?;
    let spaces = (0..n)
        .map(|f| enumerate(spec, &st, FinalSite::Site(f), limits))
        .collect::<Result<Vec<_>>>()?;
    let mut sector_sizes = BTreeMap::new();
    let mut ensemble: BTreeSet<Vec<u64>> = BTreeSet::new();
    for (f, sp) in spaces.iter().enumerate() {
        let coevents = primitive_ensemble(sp, limits)?.coevents(limits)?;
        sector_sizes.insert(f, coevents.len());
        ensemble.extend(coevents.iter().map(global_support));
    }

    let rotate = |g: &[u64], s: i64| -> Vec<u64> {
        let mut r: Vec<u64> = g
            .iter()
            .map(|&i| History::from_global_index(i, n, spec.steps()).rotated(s, n).global_index(n))
            .collect();
        r.sort_unstable();
        r
    };
    let individually_invariant = ensemble
        .iter()
        .filter(|g| (1..n as i64).any(|s| rotate(g, s) == **g))
        .count();
    let ensemble_invariant_under: BTreeMap<usize, bool> = (1..n)
        .map(|s| {
            (
                s,
                ensemble.iter().all(|g| ensemble.contains(&rotate(g, s as i64))),
            )
        })
        .collect();
    Ok(SymmetryReport {
        state: state.to_string(),
        sector_sizes,
        ensemble_size: ensemble.len(),
        individually_invariant,
        ensemble_invariant: ensemble_invariant_under.values().all(|&v| v),
        ensemble_invariant_under,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairOverlap {
    pub a: String,
    pub b: String,
    pub overlap: usize,
    /// Common supports, each as its history strings.
    pub common: Vec<Vec<String>>,
}

/// An event affirmed by some coevent of `implies` and by none of `over`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub event: String,
    pub implies: String,
    pub over: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscriminationReport {
    pub sites: usize,
    pub steps: usize,
    pub final_site: usize,
    pub states: Vec<String>,
    pub ensemble_sizes: BTreeMap<String, usize>,
    pub overlaps: Vec<PairOverlap>,
    /// Event to state to number of affirming coevents.
    pub affirmations: BTreeMap<String, BTreeMap<String, usize>>,
    pub witnesses: Vec<Witness>,
}

/// Pairwise overlaps of the primitive ensembles of several initial states,
/// with the named events that separate them.
pub fn discrimination_report(
    spec: &LatticeSpec,
    final_site: usize,
    states: &[StateLabel],
    limits: &Limits,
) -> Result<DiscriminationReport> {
    let spaces = states
        .iter()
        .map(|label| {
            let st = initial_state(spec, label.clone())?;
            enumerate(spec, &st, FinalSite::Site(final_site), limits)
        })
        .collect::<Result<Vec<_>>>()?;
    let ensembles = spaces
        .iter()
        .map(|sp| primitive_ensemble(sp, limits)?.coevents(limits))
        .collect::<Result<Vec<_>>>()?;
    let names: Vec<String> = states.iter().map(|s| s.to_string()).collect();

    let support_sets: Vec<BTreeSet<Vec<usize>>> = ensembles
        .iter()
        .map(|e| e.iter().map(|phi| phi.indices()).collect())
        .collect();
    let mut overlaps = Vec::new();
    for i in 0..states.len() {
        for j in (i + 1)..states.len() {
            let common: Vec<Vec<String>> = support_sets[i]
                .intersection(&support_sets[j])
                .map(|s| s.iter().map(|&p| spaces[i].history(p).to_string()).collect())
                .collect();
            overlaps.push(PairOverlap {
                a: names[i].clone(),
                b: names[j].clone(),
                overlap: common.len(),
                common,
            });
        }
    }

    let mut affirmations: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let events = NamedEvent::witnesses();
    for e in &events {
        let row = affirmations.entry(e.to_string()).or_default();
        for (k, sp) in spaces.iter().enumerate() {
            let v = event_verdicts(sp, &ensembles[k], e)?;
            row.insert(names[k].clone(), v.affirmed);
        }
    }
    let mut witnesses = Vec::new();
    for e in &events {
        let row = &affirmations[&e.to_string()];
        for a in &names {
            for b in &names {
                if a != b && row[a] > 0 && row[b] == 0 {
                    witnesses.push(Witness {
                        event: e.to_string(),
                        implies: a.clone(),
                        over: b.clone(),
                    });
                }
            }
        }
    }

    Ok(DiscriminationReport {
        sites: spec.sites(),
        steps: spec.steps(),
        final_site,
        ensemble_sizes: names
            .iter()
            .zip(&ensembles)
            .map(|(n, e)| (n.clone(), e.len()))
            .collect(),
        states: names,
        overlaps,
        affirmations,
        witnesses,
    })
}

/// One primitive coevent, flattened for tabular output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoeventRecord {
    pub id: usize,
    pub support: Vec<usize>,
    pub histories: Vec<String>,
    pub circulation: i64,
    pub rest_profile: Vec<usize>,
    pub bucket: RestBucket,
}

pub fn coevent_records(coevents: &[MultiplicativeCoevent<'_>]) -> Vec<CoeventRecord> {
    coevents
        .iter()
        .enumerate()
        .map(|(id, phi)| {
            let profile = rest_profile(phi);
            CoeventRecord {
                id,
                support: phi.indices(),
                histories: phi.support().histories().map(|h| h.to_string()).collect(),
                circulation: net_circulation(phi),
                bucket: rest_bucket(&profile, phi.space().spec().steps()),
                rest_profile: profile,
            }
        })
        .collect()
}
