//! The `report` bundle: every headline number recomputed and compared with
//! a golden file of expected values.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::render::{big_json, Output, Table};
use super::RunConfig;
use crate::analysis::{
    average_net_circulation, classify_restlessness, discrimination_report,
    ensemble_symmetry_report, event_verdicts, net_circulation, NamedEvent,
};
use crate::coevents::{overlap, primitive_ensemble};
use crate::error::{Error, Result};
use crate::histories::{enumerate, FinalSite, HistorySpace};
use crate::measure::{
    amplitude_classes, count_precluded, count_precluded_bruteforce, maximal_zero_count_vectors,
};
use crate::model::{check_unitarity, initial_state, LatticeSpec, StateLabel};

pub const DEFAULT_GOLDEN: &str = include_str!("../../golden/report_n3_t3.json");

#[derive(Clone, Debug, Deserialize)]
pub struct Golden {
    pub cases: Vec<GoldenCase>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct GoldenCase {
    pub sites: usize,
    pub steps: usize,
    #[serde(rename = "final")]
    pub final_site: usize,
    pub expected: BTreeMap<String, Value>,
}

impl Golden {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Output(format!("golden file: {e}")))
    }

    fn expected(&self, sites: usize, steps: usize, final_site: usize) -> BTreeMap<String, Value> {
        self.cases
            .iter()
            .find(|c| c.sites == sites && c.steps == steps && c.final_site == final_site)
            .map(|c| c.expected.clone())
            .unwrap_or_default()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Unverified,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: String,
    pub value: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<Value>,
    pub status: Status,
}

fn judge(value: &Value, expected: &Value) -> bool {
    if let Some(min) = expected
        .as_object()
        .filter(|o| o.len() == 1)
        .and_then(|o| o.get("min"))
        .and_then(Value::as_f64)
    {
        return value.as_f64().is_some_and(|v| v >= min);
    }
    value == expected
}

struct Collector {
    expected: BTreeMap<String, Value>,
    checks: Vec<Check>,
}

impl Collector {
    fn add(&mut self, id: impl Into<String>, value: Value) {
        let id = id.into();
        let expected = self.expected.get(&id).cloned();
        let status = match &expected {
            None => Status::Unverified,
            Some(e) if judge(&value, e) => Status::Pass,
            Some(_) => Status::Fail,
        };
        self.checks.push(Check {
            id,
            value,
            expected,
            status,
        });
    }
}

pub struct ReportOutcome {
    pub output: Output,
    pub failures: Vec<String>,
}

fn fixed_space(spec: &LatticeSpec, label: &StateLabel, f: usize, cfg: &RunConfig) -> Result<HistorySpace> {
    let st = initial_state(spec, label.clone())?;
    enumerate(spec, &st, FinalSite::Site(f), &cfg.limits)
}

fn state_checks(c: &mut Collector, cfg: &RunConfig, label: &StateLabel, f: usize, bruteforce: bool) -> Result<()> {
    let spec = &cfg.spec;
    let limits = &cfg.limits;
    let space = fixed_space(spec, label, f, cfg)?;
    let classes = amplitude_classes(&space);
    let name = label.to_string();

    let counts: BTreeMap<String, usize> = classes
        .classes()
        .iter()
        .map(|k| (k.value.to_string(), k.count))
        .collect();
    c.add(format!("class_counts.{name}"), json!(counts));

    let precluded = count_precluded(&classes, limits)?;
    c.add(format!("precluded.{name}"), big_json(&precluded));
    if bruteforce {
        let brute = count_precluded_bruteforce(&space, limits)?;
        c.add(format!("precluded_bruteforce.{name}"), big_json(&brute));
    }
    let exponent = (num_bigint::BigUint::from(1u8) << space.len()) - &precluded;
    c.add(format!("preclusive_log2.{name}"), big_json(&exponent));

    let sector = classes.single_sector()?;
    let maximal: Vec<BTreeMap<String, usize>> = maximal_zero_count_vectors(&classes, limits)?
        .iter()
        .map(|v| {
            sector
                .class_ids
                .iter()
                .zip(&v.counts)
                .map(|(&id, &k)| (classes.classes()[id].value.to_string(), k))
                .collect()
        })
        .collect();
    c.add(format!("maximal_vectors.{name}"), json!(maximal));

    let ensemble = primitive_ensemble(&space, limits)?;
    c.add(format!("primitive_count.{name}"), big_json(ensemble.count()));
    let single_class = ensemble
        .minimal_vectors()
        .iter()
        .all(|m| m.vector.counts.iter().filter(|&&k| k > 0).count() == 1);
    let coevents = ensemble.coevents(limits)?;
    let mut sizes: Vec<usize> = coevents.iter().map(|p| p.len()).collect();
    sizes.sort_unstable();
    sizes.dedup();
    c.add(format!("support_sizes.{name}"), json!(sizes));
    c.add(format!("single_class_supports.{name}"), json!(single_class));

    let ccw = event_verdicts(&space, &coevents, &NamedEvent::CirculatesPositiveOnly)?;
    let ccw_circ: Vec<i64> = coevents
        .iter()
        .zip(&ccw.verdicts)
        .filter(|(_, &v)| v)
        .map(|(p, _)| net_circulation(p))
        .collect();
    c.add(format!("ccw_circulation.{name}"), json!(ccw_circ));
    let average = match average_net_circulation(&coevents) {
        Ok(a) => json!(a.to_string()),
        Err(Error::EmptyList) => Value::Null,
        Err(e) => return Err(e),
    };
    c.add(format!("average_circulation.{name}"), average);

    let hist = classify_restlessness(&coevents);
    c.add(
        format!("restlessness.{name}"),
        json!({
            "all_moving": hist.all_moving,
            "mixed_6v1": hist.mixed_6v1,
            "rest_once_each": hist.rest_once_each,
            "other": hist.other,
        }),
    );
    for e in [NamedEvent::NeverMoves, NamedEvent::NeverRests] {
        let v = event_verdicts(&space, &coevents, &e)?;
        c.add(format!("{e}.{name}"), json!(v.affirmed));
    }
    let mut avoid = Vec::new();
    let mut witnesses = 0;
    for s in 0..spec.sites() {
        let v = event_verdicts(&space, &coevents, &NamedEvent::AvoidsSite(s))?;
        avoid.push(v.affirmed);
        witnesses = witnesses.max(v.both_denied);
    }
    c.add(format!("avoids_site.{name}"), json!(avoid));
    c.add(format!("anhomomorphism.{name}"), json!(witnesses));
    let term = event_verdicts(&space, &coevents, &NamedEvent::TerminatesAt(f))?;
    c.add(format!("terminates_at.{name}"), json!(term.affirmed == coevents.len()));

    let sym = ensemble_symmetry_report(spec, label, limits)?;
    c.add(
        format!("symmetry.{name}"),
        json!({
            "ensemble_size": sym.ensemble_size,
            "individually_invariant": sym.individually_invariant,
            "ensemble_invariant": sym.ensemble_invariant,
        }),
    );
    Ok(())
}

/// Runs every check for the configured lattice. The base states are
/// ground, plus and minus; the configured state is added when different.
pub fn report(cfg: &RunConfig, golden: &Golden, bruteforce: bool) -> Result<ReportOutcome> {
    let spec = &cfg.spec;
    let f = match cfg.final_site {
        FinalSite::Site(f) => f,
        FinalSite::All => return Err(Error::WrongSpace("report needs --final <site>".into())),
    };
    spec.check_site(f)?;
    let mut states = vec![StateLabel::Ground, StateLabel::Plus, StateLabel::Minus];
    if !states.contains(&cfg.state) {
        states.push(cfg.state.clone());
    }
    let mut c = Collector {
        expected: golden.expected(spec.sites(), spec.steps(), f),
        checks: Vec::new(),
    };

    c.add("unitarity.n2_8", json!((2..=8).all(|n| LatticeSpec::new(n, 1).map(|s| check_unitarity(&s)).unwrap_or(false))));
    let st = initial_state(spec, cfg.state.clone())?;
    let all = enumerate(spec, &st, FinalSite::All, &cfg.limits)?;
    c.add("histories.all", json!(all.len()));
    c.add("histories.final", json!(fixed_space(spec, &cfg.state, f, cfg)?.len()));

    for label in &states {
        state_checks(&mut c, cfg, label, f, bruteforce && *label == cfg.state)?;
    }

    for i in 0..states.len() {
        for j in (i + 1)..states.len() {
            let a = fixed_space(spec, &states[i], f, cfg)?;
            let b = fixed_space(spec, &states[j], f, cfg)?;
            c.add(format!("overlap.{}_{}", states[i], states[j]), json!(overlap(&a, &b, &cfg.limits)?));
        }
    }
    if spec.steps() >= 2 {
        let short = spec.with_steps(spec.steps() - 1)?;
        for i in 0..states.len() {
            for j in (i + 1)..states.len() {
                let a = fixed_space(&short, &states[i], f, cfg)?;
                let b = fixed_space(&short, &states[j], f, cfg)?;
                c.add(
                    format!("overlap_short.{}_{}", states[i], states[j]),
                    json!(overlap(&a, &b, &cfg.limits)?),
                );
            }
        }
    }

    let disc = discrimination_report(spec, f, &states, &cfg.limits)?;
    for (event, row) in &disc.affirmations {
        for label in &states {
            let name = label.to_string();
            c.add(format!("affirm.{event}.{name}"), json!(row[&name]));
        }
    }
    let witness_lines: Vec<String> = disc
        .witnesses
        .iter()
        .map(|w| format!("{} => {} over {}", w.event, w.implies, w.over))
        .collect();

    let failures: Vec<String> = c
        .checks
        .iter()
        .filter(|k| k.status == Status::Fail)
        .map(|k| {
            format!(
                "{}: got {}, expected {}",
                k.id,
                k.value,
                k.expected.as_ref().expect("failed checks have an expectation")
            )
        })
        .collect();
    let all_pass = failures.is_empty();

    let mut text = String::new();
    let _ = writeln!(text, "report: sites {}, steps {}, final {f}", spec.sites(), spec.steps());
    let mut table = Table::new(&["id", "value", "expected", "status"]);
    for k in &c.checks {
        let status = match k.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Unverified => "unverified",
        };
        let expected = k.expected.as_ref().map(|e| e.to_string()).unwrap_or_default();
        let _ = writeln!(text, "{status:<10}  {}  {}", k.id, k.value);
        table.push(&[k.id.clone(), k.value.to_string(), expected, status.to_string()]);
    }
    let _ = writeln!(text, "witnesses:");
    for w in &witness_lines {
        let _ = writeln!(text, "  {w}");
    }
    let _ = writeln!(text, "all pass: {all_pass}");

    let json = json!({
        "sites": spec.sites(),
        "steps": spec.steps(),
        "final": f,
        "states": states.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
        "checks": c.checks,
        "witnesses": witness_lines,
        "all_pass": all_pass,
    });
    Ok(ReportOutcome {
        output: Output { json, text, table },
        failures,
    })
}
