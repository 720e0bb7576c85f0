mod support;

use rescue_core::kb::parse_fact;
use rescue_core::planner::{PlanOutcome, PlannerConfig, ReplanOutcome};
use rescue_core::runtime::{parse_goal, LogEntry, RuntimeError, ScenarioBundle, Session};
use rescue_core::world::{parse_events, replay, EventRecord};
use support::{read_scenario_file, tehran_dir};

fn session() -> Session {
    Session::load_dir(tehran_dir()).unwrap()
}

fn fire(a: &str, b: &str) -> rescue_core::kb::Atom {
    parse_fact(&format!("fire('{a}','{b}')")).unwrap()
}

fn crane_goal() -> Vec<rescue_core::kb::Literal> {
    parse_goal("at(crane_1,'Saadi Sq.')").unwrap()
}

#[test]
fn loads_tehran_bundle() {
    let s = session();
    let c = s.counts();
    assert_eq!((c.nodes, c.links, c.rules), (4, 4, 3));
    // crane_1, crane_2 and truck_1.
    assert_eq!(c.resources, 3);
    assert_eq!(c.schemas, 2);
    assert_eq!(s.clock(), 0);
    assert!(s.log().is_empty());
    assert!(s.active_plan().is_none());
    assert_eq!(s.default_goal(), Some(crane_goal().as_slice()));
    assert_eq!(s.graph().nodes.len(), 4);
    assert_eq!(s.graph().nodes[0].name, "Hassanabad Sq.");
    assert_eq!((s.graph().nodes[0].x, s.graph().nodes[0].y), (10.0, 0.0));
}

#[test]
fn missing_actions_file_is_named() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("site.facts"), read_scenario_file("site.facts")).unwrap();
    std::fs::write(dir.path().join("domain.rules"), read_scenario_file("domain.rules")).unwrap();
    let err = Session::load_dir(dir.path()).unwrap_err();
    assert!(matches!(err, RuntimeError::MissingPart { part: "domain.actions", .. }), "{err:?}");
    assert!(err.to_string().contains("domain.actions"));
}

#[test]
fn unstratifiable_rules_fail_at_load() {
    let bundle = ScenarioBundle::from_texts("q(a).", "p :- q(a), not p.", "");
    let err = Session::load(&bundle).unwrap_err();
    assert!(matches!(err, RuntimeError::Inference { ref file, .. } if file == "domain.rules"), "{err:?}");
}

#[test]
fn parse_errors_carry_file_and_location() {
    let bundle = ScenarioBundle::from_texts("node(a).\nnode('Horr Sq.)\n", "", "");
    let err = Session::load(&bundle).unwrap_err();
    assert!(err.to_string().starts_with("site.facts:2:6:"), "{err}");
}

#[test]
fn events_update_state_clock_and_dirty_flag() {
    let mut s = session();
    let out = s.post_event(EventRecord::assert(3, fire("Horr Sq.", "Hassanabad Sq."))).unwrap();
    assert!(out.changed && !out.plan_dirty);
    assert_eq!(s.clock(), 3);

    s.request_plan(parse_goal("at(crane_1,'Hassanabad Sq.')").unwrap(), PlannerConfig::default())
        .unwrap();
    // The fire blocks the only road out of Horr for the crane.
    assert!(s.active_plan().is_none());
    s.post_event(EventRecord::retract(5, fire("Horr Sq.", "Hassanabad Sq."))).unwrap();
    s.request_plan(crane_goal(), PlannerConfig::default()).unwrap();
    assert!(!s.active_plan().unwrap().dirty);

    let out = s.post_event(EventRecord::assert(12, fire("Saadi Sq.", "Hassanabad Sq."))).unwrap();
    assert!(out.changed && out.plan_dirty);

    let out = s.post_event(EventRecord::assert(13, fire("Saadi Sq.", "Hassanabad Sq."))).unwrap();
    assert!(!out.changed);
    assert_eq!(s.clock(), 13);

    let err = s.post_event(EventRecord::assert(4, fire("a", "b"))).unwrap_err();
    assert_eq!(err, RuntimeError::TimestampRegression { clock: 13, timestamp: 4 });
    assert_eq!(s.log().len(), 4);
}

#[test]
fn derived_predicates_cannot_be_posted() {
    let mut s = session();
    let err = s
        .post_event(EventRecord::assert(1, parse_fact("safe_area('Imam Khomeini RIP Sq.')").unwrap()))
        .unwrap_err();
    assert!(matches!(err, RuntimeError::DerivedFact { .. }));
    assert_eq!(s.clock(), 0);
}

#[test]
fn execute_crane_plan_to_completion() {
    let mut s = session();
    assert_eq!(s.execute_step().unwrap_err(), RuntimeError::NoActivePlan);
    let out = s.request_plan(crane_goal(), PlannerConfig::default()).unwrap();
    assert_eq!(out.plan().unwrap().len(), 2);
    let first = s.execute_step().unwrap();
    assert_eq!((first.cursor, first.done), (1, false));
    let second = s.execute_step().unwrap();
    assert_eq!((second.cursor, second.done), (2, true));
    assert!(s.state().contains(&parse_fact("at(crane_1,'Saadi Sq.')").unwrap()));
    assert_eq!(s.execute_step().unwrap_err(), RuntimeError::PlanComplete);
    assert!(matches!(s.log()[1], LogEntry::Action { .. }));
}

#[test]
fn dirty_plan_blocks_execution_until_replanned() {
    let mut s = session();
    s.request_plan(crane_goal(), PlannerConfig::default()).unwrap();
    s.execute_step().unwrap();
    let out = s
        .post_event(EventRecord::assert(1, fire("Hassanabad Sq.", "Saadi Sq.")))
        .unwrap();
    assert!(out.plan_dirty);
    assert_eq!(s.execute_step().unwrap_err(), RuntimeError::DirtyPlan);
    // Both roads out of Hassanabad towards Saadi now burn.
    let r = s.replan(PlannerConfig::default()).unwrap();
    assert!(matches!(r, ReplanOutcome::Unsolvable(_)), "{r:?}");
    assert_eq!(s.execute_step().unwrap_err(), RuntimeError::DirtyPlan);

    s.post_event(EventRecord::retract(2, fire("Hassanabad Sq.", "Saadi Sq.")))
        .unwrap();
    assert_eq!(s.replan(PlannerConfig::default()).unwrap(), ReplanOutcome::KeepPlan);
    assert!(s.execute_step().unwrap().done);
}

#[test]
fn assert_then_retract_restores_hash_and_keeps_plan() {
    let mut s = session();
    let h0 = s.state_hash();
    s.request_plan(crane_goal(), PlannerConfig::default()).unwrap();
    s.post_event(EventRecord::assert(1, fire("Hassanabad Sq.", "Saadi Sq."))).unwrap();
    assert_ne!(s.state_hash(), h0);
    s.post_event(EventRecord::retract(2, fire("Hassanabad Sq.", "Saadi Sq."))).unwrap();
    assert_eq!(s.state_hash(), h0);
    assert!(s.active_plan().unwrap().dirty);
    assert_eq!(s.replan(PlannerConfig::default()).unwrap(), ReplanOutcome::KeepPlan);
    assert!(!s.active_plan().unwrap().dirty);
    s.execute_step().unwrap();
}

#[test]
fn what_if_leaves_session_untouched() {
    let s = session();
    let before = (s.state_hash(), s.log().len(), s.clock());
    let truck = parse_goal("at(truck_1,'Saadi Sq.')").unwrap();
    let live = s.what_if(&[], truck.clone(), PlannerConfig::default()).unwrap();
    assert!(matches!(live, PlanOutcome::Unsolvable(_)));
    let events = parse_events(&read_scenario_file("events/fires_cleared.facts")).unwrap();
    let hypo = s.what_if(&events, truck, PlannerConfig::default()).unwrap();
    assert_eq!(hypo.plan().unwrap().len(), 3);
    assert_eq!((s.state_hash(), s.log().len(), s.clock()), before);
    assert!(s.active_plan().is_none());

    let mut t = session();
    let direct = t.request_plan(crane_goal(), PlannerConfig::default()).unwrap();
    let hypothetical = s.what_if(&[], crane_goal(), PlannerConfig::default()).unwrap();
    assert_eq!(direct.plan(), hypothetical.plan());
}

#[test]
fn replaying_the_log_reproduces_the_session() {
    let mut s = session();
    let initial = s.state().clone();
    s.request_plan(crane_goal(), PlannerConfig::default()).unwrap();
    s.execute_step().unwrap();
    s.post_event(EventRecord::assert(4, fire("Hassanabad Sq.", "Saadi Sq."))).unwrap();
    s.post_event(EventRecord::retract(6, fire("Hassanabad Sq.", "Saadi Sq.")))
        .unwrap();
    s.replan(PlannerConfig::default()).unwrap();
    s.execute_step().unwrap();

    let mut r = session();
    let mut hashes = Vec::new();
    for entry in s.log() {
        match entry {
            LogEntry::Event(e) => {
                r.post_event(e.clone()).unwrap();
            }
            LogEntry::Action { .. } => {
                if r.active_plan().is_none_or(|p| p.dirty) {
                    if r.active_plan().is_none() {
                        r.request_plan(crane_goal(), PlannerConfig::default()).unwrap();
                    } else {
                        r.replan(PlannerConfig::default()).unwrap();
                    }
                }
                r.execute_step().unwrap();
            }
        }
        hashes.push(r.state_hash());
    }
    assert_eq!(r.state_hash(), s.state_hash());
    assert_eq!(r.log(), s.log());

    let events: Vec<EventRecord> = s
        .log()
        .iter()
        .filter_map(|e| match e {
            LogEntry::Event(e) => Some(e.clone()),
            _ => None,
        })
        .collect();
    let replayed = replay(&initial, &events);
    assert_ne!(replayed.hash(), s.state_hash(), "actions moved the crane as well");
    assert_eq!(hashes.len(), s.log().len());
}

#[test]
fn empty_scenario_loads() {
    let s = Session::load(&ScenarioBundle::default()).unwrap();
    assert!(s.graph().nodes.is_empty() && s.graph().edges.is_empty());
    assert!(s.derived().derived.is_empty());
}
