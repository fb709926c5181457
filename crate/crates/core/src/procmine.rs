//! Directly-follows mining over process event logs.
//!
//! Each event log source becomes one TechnologyProcess composed of one
//! TechnologyFunction per activity. Order edges with enough support become
//! flow relations carrying their frequency; entry and exit activities get
//! boundary events (linked by flows) regardless of support, so every mined
//! process has a visible beginning and end.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{DateTime, Utc};

use crate::catalogue::{Confidence, ElementKind, RelationKind};
use crate::error::Result;
use crate::model::GenericModel;
use crate::observation::{AdapterKind, Observation, ObservationKind};
use crate::store::ObservationStore;

/// Activity ordering statistics for one event log.
///
/// Invariants (for any input):
/// - `sum(edges) == sum(case lengths - 1)` over non-empty cases
/// - `sum(starts) == sum(ends) == cases`
/// - `sum(activities) == total events`
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DirectlyFollowsGraph {
    /// Activity label -> number of occurrences.
    pub activities: BTreeMap<String, u64>,
    /// (earlier, later) -> number of direct successions.
    pub edges: BTreeMap<(String, String), u64>,
    /// First activity of a case -> number of cases opening with it.
    pub starts: BTreeMap<String, u64>,
    /// Last activity of a case -> number of cases closing with it.
    pub ends: BTreeMap<String, u64>,
    pub cases: u64,
}

/// One ordered event, carrying the observation it came from.
#[derive(Clone, Debug)]
struct OrderedEvent {
    timestamp: Option<DateTime<Utc>>,
    arrival: usize,
    activity: String,
    obs_id: String,
}

/// Groups events by case and orders each case by timestamp, breaking ties
/// by arrival order. Returns the per-case sequences in case id order.
fn case_sequences<'a>(
    events: impl IntoIterator<Item = &'a Observation>,
) -> BTreeMap<String, Vec<OrderedEvent>> {
    let mut cases: BTreeMap<String, Vec<OrderedEvent>> = BTreeMap::new();
    for (arrival, obs) in events.into_iter().enumerate() {
        let (Some(case_id), Some(activity)) = (obs.attr("case_id"), obs.attr("activity")) else {
            continue;
        };
        cases.entry(case_id.to_string()).or_default().push(OrderedEvent {
            timestamp: obs.timestamp,
            arrival,
            activity: activity.to_string(),
            obs_id: obs.obs_id.clone(),
        });
    }
    for seq in cases.values_mut() {
        seq.sort_by_key(|e| (e.timestamp, e.arrival));
    }
    cases
}

/// Builds the directly-follows graph of an event stream. Case interleaving
/// in the input does not matter; only per-case order does.
pub fn build_dfg<'a>(events: impl IntoIterator<Item = &'a Observation>) -> DirectlyFollowsGraph {
    let mut dfg = DirectlyFollowsGraph::default();
    for seq in case_sequences(events).values() {
        dfg.cases += 1;
        if let Some(first) = seq.first() {
            *dfg.starts.entry(first.activity.clone()).or_insert(0) += 1;
        }
        if let Some(last) = seq.last() {
            *dfg.ends.entry(last.activity.clone()).or_insert(0) += 1;
        }
        for event in seq {
            *dfg.activities.entry(event.activity.clone()).or_insert(0) += 1;
        }
        for pair in seq.windows(2) {
            let key = (pair[0].activity.clone(), pair[1].activity.clone());
            *dfg.edges.entry(key).or_insert(0) += 1;
        }
    }
    dfg
}

/// Materialises one event log as model elements.
///
/// `label` names the process; `threshold` is the minimum frequency for a
/// directly-follows edge to become a flow relation. Boundary events are
/// exempt from the threshold: a process entered or left only once is still
/// entered and left there.
pub fn dfg_to_elements<'a>(
    model: &mut GenericModel,
    label: &str,
    events: impl IntoIterator<Item = &'a Observation> + Clone,
    threshold: u64,
) -> Result<()> {
    let sequences = case_sequences(events.clone());
    let dfg = build_dfg(events);
    if dfg.cases == 0 {
        return Ok(());
    }

    let proc_key = format!("proc:{label}");
    let (proc, _) = model.upsert_element(
        ElementKind::TechnologyProcess,
        &proc_key,
        label,
        Confidence::SemiAuto,
        false,
    );

    // Evidence per activity, in per-case order; the process sees it all.
    let mut by_activity: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for seq in sequences.values() {
        for event in seq {
            by_activity
                .entry(event.activity.as_str())
                .or_default()
                .push(event.obs_id.as_str());
            model.push_provenance(&proc, &event.obs_id);
        }
    }

    let mut functions: BTreeMap<String, String> = BTreeMap::new();
    for (activity, obs_ids) in &by_activity {
        let (func, _) = model.upsert_element(
            ElementKind::TechnologyFunction,
            &format!("{proc_key}/act:{activity}"),
            activity,
            Confidence::SemiAuto,
            false,
        );
        for obs in obs_ids {
            model.push_provenance(&func, obs);
        }
        let prov: Vec<String> = obs_ids.iter().map(|s| s.to_string()).collect();
        model.add_relation(RelationKind::Composition, &proc, &func, &prov)?;
        functions.insert(activity.to_string(), func);
    }

    // Succession evidence: the observation of the later event, per case.
    let mut edge_prov: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
    for seq in sequences.values() {
        for pair in seq.windows(2) {
            edge_prov
                .entry((pair[0].activity.clone(), pair[1].activity.clone()))
                .or_default()
                .push(pair[1].obs_id.clone());
        }
    }
    for ((from, to), count) in &dfg.edges {
        if *count < threshold {
            continue;
        }
        let prov = edge_prov.remove(&(from.clone(), to.clone())).unwrap_or_default();
        let (rel, _) = model.add_relation(
            RelationKind::Flow,
            &functions[from],
            &functions[to],
            &prov,
        )?;
        model.relation_attr(&rel, "frequency", &count.to_string());
    }

    for (activity, count) in &dfg.starts {
        let prov: Vec<String> = sequences
            .values()
            .filter_map(|seq| seq.first())
            .filter(|e| &e.activity == activity)
            .map(|e| e.obs_id.clone())
            .collect();
        let (event, _) = model.upsert_element(
            ElementKind::TechnologyEvent,
            &format!("{proc_key}/start:{activity}"),
            &format!("{activity} (start)"),
            Confidence::SemiAuto,
            false,
        );
        for obs in &prov {
            model.push_provenance(&event, obs);
        }
        let (rel, _) =
            model.add_relation(RelationKind::Flow, &event, &functions[activity], &prov)?;
        model.relation_attr(&rel, "frequency", &count.to_string());
    }
    for (activity, count) in &dfg.ends {
        let prov: Vec<String> = sequences
            .values()
            .filter_map(|seq| seq.last())
            .filter(|e| &e.activity == activity)
            .map(|e| e.obs_id.clone())
            .collect();
        let (event, _) = model.upsert_element(
            ElementKind::TechnologyEvent,
            &format!("{proc_key}/end:{activity}"),
            &format!("{activity} (end)"),
            Confidence::SemiAuto,
            false,
        );
        for obs in &prov {
            model.push_provenance(&event, obs);
        }
        let (rel, _) =
            model.add_relation(RelationKind::Flow, &functions[activity], &event, &prov)?;
        model.relation_attr(&rel, "frequency", &count.to_string());
    }
    Ok(())
}

/// Mines every event log source in the store. The process is named after
/// the log's file stem, so `cases/orders.csv` yields process `orders`.
pub fn mine_processes(
    model: &mut GenericModel,
    store: &ObservationStore,
    threshold: u64,
) -> Result<()> {
    let sources: Vec<String> = store
        .sources()
        .filter(|s| s.adapter == AdapterKind::EventLogCsv)
        .map(|s| s.path.clone())
        .collect();
    for path in sources {
        let label = Path::new(&path)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(path.as_str())
            .to_string();
        let events: Vec<&Observation> = store
            .from_source(&path)
            .filter(|o| o.kind == ObservationKind::ProcessEvent)
            .collect();
        dfg_to_elements(model, &label, events.iter().copied(), threshold)?;
    }
    model.check_integrity()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_source, IngestOptions};
    use crate::observation::SourceDescriptor;
    use proptest::prelude::*;

    fn obs(seq: u64, case: &str, activity: &str, ts: &str) -> Observation {
        let attrs: BTreeMap<String, String> = [
            ("case_id".to_string(), case.to_string()),
            ("activity".to_string(), activity.to_string()),
        ]
        .into();
        let timestamp = format!("{ts}Z").parse::<DateTime<Utc>>().ok();
        Observation::new("log.csv", seq, ObservationKind::ProcessEvent, attrs, timestamp)
    }

    fn log(rows: &[(&str, &str, &str)]) -> Vec<Observation> {
        rows.iter()
            .enumerate()
            .map(|(i, (c, a, t))| obs(i as u64, c, a, t))
            .collect()
    }

    #[test]
    fn two_cases_share_a_graph() {
        let events = log(&[
            ("c1", "A", "2026-01-01T08:00:00"),
            ("c1", "B", "2026-01-01T08:05:00"),
            ("c1", "C", "2026-01-01T08:10:00"),
            ("c2", "A", "2026-01-01T09:00:00"),
            ("c2", "C", "2026-01-01T09:30:00"),
        ]);
        let dfg = build_dfg(events.iter());
        assert_eq!(dfg.cases, 2);
        assert_eq!(dfg.activities["A"], 2);
        assert_eq!(dfg.activities["B"], 1);
        assert_eq!(dfg.edges[&("A".into(), "B".into())], 1);
        assert_eq!(dfg.edges[&("B".into(), "C".into())], 1);
        assert_eq!(dfg.edges[&("A".into(), "C".into())], 1);
        assert_eq!(dfg.starts["A"], 2);
        assert_eq!(dfg.ends["C"], 2);
    }

    #[test]
    fn interleaving_does_not_change_the_graph() {
        let grouped = log(&[
            ("c1", "A", "2026-01-01T08:00:00"),
            ("c1", "B", "2026-01-01T08:05:00"),
            ("c2", "A", "2026-01-01T09:00:00"),
            ("c2", "B", "2026-01-01T09:05:00"),
        ]);
        let interleaved = log(&[
            ("c1", "A", "2026-01-01T08:00:00"),
            ("c2", "A", "2026-01-01T09:00:00"),
            ("c1", "B", "2026-01-01T08:05:00"),
            ("c2", "B", "2026-01-01T09:05:00"),
        ]);
        assert_eq!(build_dfg(grouped.iter()), build_dfg(interleaved.iter()));
    }

    #[test]
    fn equal_timestamps_fall_back_to_arrival_order() {
        let events = log(&[
            ("c1", "B", "2026-01-01T08:00:00"),
            ("c1", "A", "2026-01-01T08:00:00"),
        ]);
        let dfg = build_dfg(events.iter());
        assert_eq!(dfg.edges[&("B".into(), "A".into())], 1, "file order wins ties");
        assert_eq!(dfg.starts["B"], 1);
    }

    #[test]
    fn single_event_case_is_its_own_start_and_end() {
        let events = log(&[("c1", "A", "2026-01-01T08:00:00")]);
        let dfg = build_dfg(events.iter());
        assert!(dfg.edges.is_empty());
        assert_eq!(dfg.starts["A"], 1);
        assert_eq!(dfg.ends["A"], 1);
    }

    #[test]
    fn elements_cover_process_functions_and_boundaries() {
        let events = log(&[
            ("c1", "A", "2026-01-01T08:00:00"),
            ("c1", "B", "2026-01-01T08:05:00"),
            ("c2", "A", "2026-01-01T09:00:00"),
            ("c2", "B", "2026-01-01T09:05:00"),
        ]);
        let mut model = GenericModel::new();
        dfg_to_elements(&mut model, "orders", events.iter(), 1).unwrap();
        model.check_integrity().unwrap();

        let proc = model.find_by_key(ElementKind::TechnologyProcess, "proc:orders").unwrap();
        assert_eq!(proc.name, "orders");
        assert_eq!(proc.provenance.len(), 4);
        assert_eq!(model.of_kind(ElementKind::TechnologyFunction).count(), 2);
        let start = model
            .find_by_key(ElementKind::TechnologyEvent, "proc:orders/start:A")
            .unwrap();
        assert_eq!(start.name, "A (start)");
        let end = model.find_by_key(ElementKind::TechnologyEvent, "proc:orders/end:B").unwrap();
        assert_eq!(end.name, "B (end)");

        let func_a = model
            .find_by_key(ElementKind::TechnologyFunction, "proc:orders/act:A")
            .unwrap();
        let func_b = model
            .find_by_key(ElementKind::TechnologyFunction, "proc:orders/act:B")
            .unwrap();
        let succession = model
            .relations()
            .find(|r| {
                r.kind == RelationKind::Flow
                    && r.source == func_a.elem_id
                    && r.target == func_b.elem_id
            })
            .expect("A -> B flow");
        assert_eq!(succession.attrs["frequency"], "2");
        assert_eq!(succession.provenance.len(), 2, "one succession per case");
        assert_eq!(
            model.relations().filter(|r| r.kind == RelationKind::Composition).count(),
            2
        );
        // start -> A, A -> B, B -> end.
        assert_eq!(
            model.relations().filter(|r| r.kind == RelationKind::Flow).count(),
            3
        );
    }

    #[test]
    fn threshold_prunes_rare_edges_but_not_boundaries() {
        let events = log(&[
            ("c1", "A", "2026-01-01T08:00:00"),
            ("c1", "B", "2026-01-01T08:05:00"),
            ("c2", "A", "2026-01-01T09:00:00"),
            ("c2", "B", "2026-01-01T09:05:00"),
            ("c3", "A", "2026-01-01T10:00:00"),
            ("c3", "C", "2026-01-01T10:05:00"),
        ]);
        let mut model = GenericModel::new();
        dfg_to_elements(&mut model, "orders", events.iter(), 2).unwrap();
        let func = |a: &str| {
            model
                .find_by_key(ElementKind::TechnologyFunction, &format!("proc:orders/act:{a}"))
                .unwrap()
                .elem_id
                .clone()
        };
        let succession = |a: &str, b: &str| {
            let (a, b) = (func(a), func(b));
            model
                .relations()
                .any(|r| r.kind == RelationKind::Flow && r.source == a && r.target == b)
        };
        assert!(succession("A", "B"), "frequency 2 survives");
        assert!(!succession("A", "C"), "frequency 1 is pruned");
        // C survives as a function and keeps its end event.
        assert!(model
            .find_by_key(ElementKind::TechnologyEvent, "proc:orders/end:C")
            .is_some());
        // start -> A, A -> B, B -> end, C -> end.
        assert_eq!(
            model.relations().filter(|r| r.kind == RelationKind::Flow).count(),
            4
        );
    }

    #[test]
    fn empty_log_mines_nothing() {
        let mut model = GenericModel::new();
        dfg_to_elements(&mut model, "orders", std::iter::empty(), 1).unwrap();
        assert_eq!(model.element_count(), 0);
    }

    #[test]
    fn mining_is_keyed_by_file_stem() {
        let mut store = ObservationStore::new();
        let src = SourceDescriptor {
            path: "cases/orders.csv".to_string(),
            adapter: AdapterKind::EventLogCsv,
            priority: 2,
            agent_ip: None,
        };
        store.register_source(src.clone()).unwrap();
        let content = "case_id,activity,timestamp\n\
                       c1,receive,2026-01-01T08:00:00Z\n\
                       c1,ship,2026-01-01T09:00:00Z\n";
        let parsed = parse_source(&src, content, &IngestOptions::default()).unwrap();
        store.append_all(&src.path, &parsed.observations).unwrap();

        let mut model = GenericModel::new();
        mine_processes(&mut model, &store, 1).unwrap();
        assert!(model
            .find_by_key(ElementKind::TechnologyProcess, "proc:orders")
            .is_some());
        let func = model
            .find_by_key(ElementKind::TechnologyFunction, "proc:orders/act:receive")
            .unwrap();
        assert_eq!(func.provenance.len(), 1, "evidence reaches back to the log row");
    }

    proptest! {
        /// Conservation laws pin the whole graph against a brute-force
        /// recount, whatever the interleaving.
        #[test]
        fn dfg_conserves_counts(
            rows in proptest::collection::vec(
                (0u8..4, 0u8..5, 0u32..50),
                0..40,
            )
        ) {
            let events: Vec<Observation> = rows
                .iter()
                .enumerate()
                .map(|(i, (case, act, minute))| {
                    obs(
                        i as u64,
                        &format!("c{case}"),
                        &format!("{}", (b'A' + act) as char),
                        &format!("2026-01-01T08:{:02}:{:02}", minute / 60, minute % 60),
                    )
                })
                .collect();
            let dfg = build_dfg(events.iter());

            let mut case_lens: BTreeMap<&str, u64> = BTreeMap::new();
            for o in &events {
                *case_lens.entry(o.attr("case_id").unwrap()).or_insert(0) += 1;
            }
            let total: u64 = case_lens.values().sum();
            let succession: u64 = case_lens.values().map(|n| n - 1).sum();

            prop_assert_eq!(dfg.cases as usize, case_lens.len());
            prop_assert_eq!(dfg.activities.values().sum::<u64>(), total);
            prop_assert_eq!(dfg.edges.values().sum::<u64>(), succession);
            prop_assert_eq!(dfg.starts.values().sum::<u64>(), dfg.cases);
            prop_assert_eq!(dfg.ends.values().sum::<u64>(), dfg.cases);
        }

        /// With strictly increasing timestamps the graph must not depend on
        /// row order at all.
        #[test]
        fn shuffled_rows_mine_identically(
            rows in proptest::collection::vec((0u8..3, 0u8..4), 1..20),
            seed in 0u64..1000,
        ) {
            let events: Vec<Observation> = rows
                .iter()
                .enumerate()
                .map(|(i, (case, act))| {
                    obs(
                        i as u64,
                        &format!("c{case}"),
                        &format!("{}", (b'A' + act) as char),
                        &format!("2026-01-01T{:02}:{:02}:00", 8 + i / 60, i % 60),
                    )
                })
                .collect();
            let mut shuffled = events.clone();
            // Deterministic Fisher-Yates from the seed.
            let mut state = seed.wrapping_add(1);
            for i in (1..shuffled.len()).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (state >> 33) as usize % (i + 1);
                shuffled.swap(i, j);
            }
            prop_assert_eq!(build_dfg(events.iter()), build_dfg(shuffled.iter()));
        }
    }
}
