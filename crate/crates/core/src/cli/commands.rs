use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde_json::{json, Value};

use super::render::{big_json, join, Output, Table};
use super::RunConfig;
use crate::analysis::{
    average_net_circulation, classify_restlessness, coevent_records, discrimination_report,
    event_verdicts, NamedEvent,
};
use crate::coevents::primitive_ensemble;
use crate::error::{Error, Result};
use crate::histories::{FinalSite, HistorySpace};
use crate::measure::{
    amplitude_classes, count_precluded, count_precluded_bruteforce, maximal_zero_count_vectors,
    AmplitudeClasses, CountVector,
};
use crate::model::{check_unitarity, transfer_exponents, transfer_matrix, StateLabel};

fn class_name(classes: &AmplitudeClasses<'_>, id: usize) -> String {
    classes.classes()[id].value.to_string()
}

/// A count vector as `[{"class", "k"}]`, classes of its sector in order.
fn vector_json(classes: &AmplitudeClasses<'_>, v: &CountVector) -> Value {
    let sector = classes
        .sectors()
        .iter()
        .find(|s| s.final_site == v.final_site)
        .expect("vector sector exists");
    Value::Array(
        sector
            .class_ids
            .iter()
            .zip(&v.counts)
            .map(|(&c, &k)| json!({"class": class_name(classes, c), "k": k}))
            .collect(),
    )
}

fn vector_text(classes: &AmplitudeClasses<'_>, v: &CountVector) -> String {
    let sector = classes
        .sectors()
        .iter()
        .find(|s| s.final_site == v.final_site)
        .expect("vector sector exists");
    let parts: Vec<String> = sector
        .class_ids
        .iter()
        .zip(&v.counts)
        .map(|(&c, &k)| format!("{}×{k}", class_name(classes, c)))
        .collect();
    format!("final {}: {}", v.final_site, parts.join(", "))
}

pub fn model(cfg: &RunConfig) -> Result<(Output, bool)> {
    let spec = &cfg.spec;
    let m = spec.phase_order();
    let exps = transfer_exponents(spec);
    let entries: Vec<Vec<String>> = transfer_matrix(spec)
        .iter()
        .map(|row| row.iter().map(|e| e.to_string()).collect())
        .collect();
    let hop: BTreeSet<usize> = exps.iter().flatten().copied().collect();
    let unitary = check_unitarity(spec);

    let mut text = String::new();
    let _ = writeln!(text, "sites {}, phase order {m}", spec.sites());
    let _ = writeln!(text, "exponents k of ζ{m}^k (row x', column x):");
    for row in &exps {
        let _ = writeln!(text, "  {}", join(row, " "));
    }
    let _ = writeln!(text, "entries:");
    for row in &entries {
        let _ = writeln!(text, "  {}", row.join("  "));
    }
    let _ = writeln!(text, "hop exponents: {}", join(&hop.iter().collect::<Vec<_>>(), ", "));
    let _ = writeln!(text, "unitary (U U† = n I): {unitary}");

    let mut table = Table::new(&["to", "from", "exponent", "entry"]);
    for (x2, row) in exps.iter().enumerate() {
        for (x, k) in row.iter().enumerate() {
            table.push(&[x2.to_string(), x.to_string(), k.to_string(), entries[x2][x].clone()]);
        }
    }
    let out = Output {
        json: json!({
            "sites": spec.sites(),
            "phase_order": m,
            "exponents": exps,
            "entries": entries,
            "hop_exponents": hop,
            "unitary": unitary,
        }),
        text,
        table,
    };
    Ok((out, unitary))
}

pub fn histories(cfg: &RunConfig) -> Result<Output> {
    let space = cfg.space(&cfg.state)?;
    let classes = amplitude_classes(&space);
    let n = cfg.spec.sites();

    let mut text = String::new();
    let _ = writeln!(
        text,
        "{} histories (sites {}, steps {}, state {}, final {})",
        space.len(),
        n,
        cfg.spec.steps(),
        cfg.state,
        cfg.final_site
    );
    let _ = writeln!(text, "amplitude classes:");
    let mut class_json = Vec::new();
    for c in classes.classes() {
        let _ = writeln!(text, "  final {}: {} × {}", c.final_site, c.value, c.count);
        class_json.push(json!({"final": c.final_site, "value": c.value.to_string(), "count": c.count}));
    }
    let mut table = Table::new(&["index", "history", "final", "amplitude", "class"]);
    let mut hist_json = Vec::new();
    for (pos, (h, a)) in space.histories().iter().zip(space.amps()).enumerate() {
        let index = h.global_index(n);
        let class = classes.class_of(pos);
        table.push(&[
            index.to_string(),
            h.to_string(),
            h.final_site().to_string(),
            a.to_string(),
            class.to_string(),
        ]);
        hist_json.push(json!({"index": index, "history": h.to_string(), "amplitude": a.to_string(), "class": class}));
    }
    text.push_str(&table.to_text());
    Ok(Output {
        json: json!({
            "sites": n,
            "steps": cfg.spec.steps(),
            "state": cfg.state.to_string(),
            "final": cfg.final_site.to_string(),
            "count": space.len(),
            "classes": class_json,
            "histories": hist_json,
        }),
        text,
        table,
    })
}

pub fn preclusion(cfg: &RunConfig, bruteforce: bool) -> Result<Output> {
    let space = cfg.space(&cfg.state)?;
    let classes = amplitude_classes(&space);
    let precluded = count_precluded(&classes, &cfg.limits)?;
    let exponent = (num_bigint::BigUint::from(1u8) << space.len()) - &precluded;
    let maximal = match cfg.final_site {
        FinalSite::Site(_) => Some(maximal_zero_count_vectors(&classes, &cfg.limits)?),
        FinalSite::All => None,
    };
    let brute = if bruteforce {
        Some(count_precluded_bruteforce(&space, &cfg.limits)?)
    } else {
        None
    };

    let subsets = format!("2^{}", space.len());
    let mut text = String::new();
    let _ = writeln!(text, "histories: {}", space.len());
    let _ = writeln!(text, "events: {subsets}");
    let _ = writeln!(text, "precluded events: {precluded}");
    if let Some(b) = &brute {
        let _ = writeln!(text, "precluded events (exhaustive): {b}");
    }
    let _ = writeln!(text, "preclusive coevents: 2^{exponent}");
    let mut table = Table::new(&["quantity", "value"]);
    table.push(&["histories".to_string(), space.len().to_string()]);
    table.push(&["subsets_total".to_string(), subsets.clone()]);
    table.push(&["precluded".to_string(), precluded.to_string()]);
    table.push(&["preclusive_coevents_log2".to_string(), exponent.to_string()]);

    let mut doc = json!({
        "sites": cfg.spec.sites(),
        "steps": cfg.spec.steps(),
        "state": cfg.state.to_string(),
        "final": cfg.final_site.to_string(),
        "histories": space.len(),
        "subsets_total": subsets,
        "precluded": big_json(&precluded),
        "preclusive_coevents_log2": big_json(&exponent),
    });
    if let Some(b) = &brute {
        doc["precluded_bruteforce"] = big_json(b);
        table.push(&["precluded_bruteforce".to_string(), b.to_string()]);
    }
    if let Some(maximal) = &maximal {
        let _ = writeln!(text, "maximal precluded count vectors:");
        for v in maximal {
            let _ = writeln!(text, "  {}", vector_text(&classes, v));
            table.push(&["maximal_vector".to_string(), vector_text(&classes, v)]);
        }
        doc["maximal_vectors"] = maximal.iter().map(|v| vector_json(&classes, v)).collect();
    }
    Ok(Output { json: doc, text, table })
}

pub fn primitives(cfg: &RunConfig) -> Result<Output> {
    let space = cfg.space(&cfg.state)?;
    let ensemble = primitive_ensemble(&space, &cfg.limits)?;
    let classes = ensemble.preclusion().classes();

    let mut text = String::new();
    let _ = writeln!(text, "primitive coevents: {}", ensemble.count());
    let _ = writeln!(text, "minimal preclusive count vectors:");
    let mut vectors = Vec::new();
    for m in ensemble.minimal_vectors() {
        let _ = writeln!(text, "  {}  (supports: {})", vector_text(classes, &m.vector), m.supports);
        vectors.push(json!({
            "final": m.vector.final_site,
            "vector": vector_json(classes, &m.vector),
            "count": big_json(&m.supports),
        }));
    }
    let mut doc = json!({
        "sites": cfg.spec.sites(),
        "steps": cfg.spec.steps(),
        "state": cfg.state.to_string(),
        "final": cfg.final_site.to_string(),
        "count": big_json(ensemble.count()),
        "minimal_class_vectors": vectors,
    });
    let mut table = Table::new(&["final", "vector", "count"]);
    for m in ensemble.minimal_vectors() {
        table.push(&[
            m.vector.final_site.to_string(),
            join(&m.vector.counts, " "),
            m.supports.to_string(),
        ]);
    }
    if cfg.emit_supports {
        let coevents = ensemble.coevents(&cfg.limits)?;
        let records = coevent_records(&coevents);
        table = Table::new(&["coevent_id", "support", "histories", "circulation", "rest_profile"]);
        let _ = writeln!(text, "supports:");
        for r in &records {
            let _ = writeln!(text, "  {:>5}  {}", r.id, r.histories.join(" "));
            table.push(&[
                r.id.to_string(),
                join(&r.support, " "),
                r.histories.join(" "),
                r.circulation.to_string(),
                join(&r.rest_profile, " "),
            ]);
        }
        doc["supports"] = records.iter().map(|r| json!(r.support)).collect();
    }
    Ok(Output { json: doc, text, table })
}

fn classify_events(space: &HistorySpace) -> Vec<NamedEvent> {
    let mut events = NamedEvent::witnesses();
    for s in 0..space.spec().sites() {
        events.push(NamedEvent::AvoidsSite(s));
    }
    for f in space.sector_sites() {
        events.push(NamedEvent::TerminatesAt(f));
    }
    events
}

pub fn classify(cfg: &RunConfig) -> Result<Output> {
    let space = cfg.space(&cfg.state)?;
    let coevents = primitive_ensemble(&space, &cfg.limits)?.coevents(&cfg.limits)?;
    let average = match average_net_circulation(&coevents) {
        Ok(a) => Some(a.to_string()),
        Err(Error::EmptyList) => None,
        Err(e) => return Err(e),
    };
    let hist = classify_restlessness(&coevents);
    let events = classify_events(&space);
    let verdicts = events
        .iter()
        .map(|e| event_verdicts(&space, &coevents, e))
        .collect::<Result<Vec<_>>>()?;
    let records = coevent_records(&coevents);

    let mut text = String::new();
    let _ = writeln!(text, "primitive coevents: {}", coevents.len());
    let _ = writeln!(
        text,
        "average net circulation: {}",
        average.as_deref().unwrap_or("undefined")
    );
    let _ = writeln!(text, "restlessness:");
    let _ = writeln!(text, "  all-moving      {}", hist.all_moving);
    let _ = writeln!(text, "  mixed-6v1       {}", hist.mixed_6v1);
    let _ = writeln!(text, "  rest-once-each  {}", hist.rest_once_each);
    let _ = writeln!(text, "  other           {}", hist.other);
    let _ = writeln!(text, "events (affirmed / complement affirmed / both denied):");
    for v in &verdicts {
        let _ = writeln!(
            text,
            "  {:<26} {} / {} / {}",
            v.event, v.affirmed, v.complement_affirmed, v.both_denied
        );
    }

    let mut header: Vec<String> = ["coevent_id", "support", "circulation", "rest_profile", "bucket"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(events.iter().map(|e| e.to_string()));
    let mut table = Table { header, rows: Vec::new() };
    for (i, r) in records.iter().enumerate() {
        let mut row = vec![
            r.id.to_string(),
            join(&r.support, " "),
            r.circulation.to_string(),
            join(&r.rest_profile, " "),
            r.bucket.to_string(),
        ];
        row.extend(verdicts.iter().map(|v| u8::from(v.verdicts[i]).to_string()));
        table.rows.push(row);
    }

    let event_json: Vec<Value> = verdicts
        .iter()
        .map(|v| {
            json!({
                "event": v.event,
                "affirmed": v.affirmed,
                "complement_affirmed": v.complement_affirmed,
                "both_denied": v.both_denied,
            })
        })
        .collect();
    Ok(Output {
        json: json!({
            "sites": cfg.spec.sites(),
            "steps": cfg.spec.steps(),
            "state": cfg.state.to_string(),
            "final": cfg.final_site.to_string(),
            "count": coevents.len(),
            "average_net_circulation": average,
            "restlessness": hist,
            "events": event_json,
        }),
        text,
        table,
    })
}

pub fn compare(cfg: &RunConfig, other: &StateLabel) -> Result<Output> {
    let f = match cfg.final_site {
        FinalSite::Site(f) => f,
        FinalSite::All => {
            return Err(Error::WrongSpace("compare needs --final <site>".into()));
        }
    };
    let report = discrimination_report(&cfg.spec, f, &[cfg.state.clone(), other.clone()], &cfg.limits)?;
    let pair = &report.overlaps[0];

    let mut text = String::new();
    let _ = writeln!(
        text,
        "{} vs {} (sites {}, steps {}, final {f})",
        pair.a,
        pair.b,
        cfg.spec.sites(),
        cfg.spec.steps()
    );
    for (s, n) in &report.ensemble_sizes {
        let _ = writeln!(text, "  {s}: {n} primitive coevents");
    }
    let _ = writeln!(text, "overlap: {}", pair.overlap);
    for c in &pair.common {
        let _ = writeln!(text, "  common: {}", c.join(" "));
    }
    let _ = writeln!(text, "witnesses:");
    for w in &report.witnesses {
        let _ = writeln!(text, "  {} => {} (never {})", w.event, w.implies, w.over);
    }
    let mut table = Table::new(&["event", &pair.a, &pair.b]);
    for (e, row) in &report.affirmations {
        table.push(&[e.clone(), row[&pair.a].to_string(), row[&pair.b].to_string()]);
    }
    Ok(Output {
        json: serde_json::to_value(&report).expect("report serializes"),
        text,
        table,
    })
}
