//! Event-driven execution loop.
//!
//! One action runs per tick, starting at t=0. Before an action runs at
//! tick t, every event with timestamp <= t is applied. When an applied
//! event dirties the active plan, or changes the state while no plan is
//! held, the loop prints `REPLAN@t=..` and plans again.

use std::collections::VecDeque;

use rescue_core::kb::Literal;
use rescue_core::planner::{PlanOutcome, PlannerConfig, ReplanOutcome};
use rescue_core::runtime::Session;
use rescue_core::world::EventRecord;

use crate::{report, CmdResult, Failure, EXIT_EXHAUSTED, EXIT_OK, EXIT_UNSOLVABLE};

struct Sim {
    session: Session,
    goal: Vec<Literal>,
    config: PlannerConfig,
    pending: VecDeque<EventRecord>,
    /// Exit code of the last failed planning attempt.
    failure: u8,
}

fn input(e: impl ToString) -> Failure {
    Failure::input(e.to_string())
}

impl Sim {
    /// Applies due events; true if the state changed.
    fn apply_due(&mut self, t: i64) -> Result<bool, Failure> {
        let mut changed = false;
        while self.pending.front().is_some_and(|e| e.timestamp <= t) {
            let e = self.pending.pop_front().expect("front checked");
            let line = format!("t={t} EVENT {} {}", e.op, e.fact);
            let out = self.session.post_event(e).map_err(input)?;
            if out.changed {
                println!("{line}");
            } else {
                println!("{line} (no change)");
            }
            changed |= out.changed;
        }
        Ok(changed)
    }

    fn plan_fresh(&mut self) -> Result<(), Failure> {
        let outcome = self.session.request_plan(self.goal.clone(), self.config).map_err(input)?;
        self.note(&outcome);
        report(&outcome);
        Ok(())
    }

    fn note(&mut self, outcome: &PlanOutcome) {
        self.failure = match outcome {
            PlanOutcome::Found(..) => EXIT_OK,
            PlanOutcome::Unsolvable(_) => EXIT_UNSOLVABLE,
            PlanOutcome::Exhausted(_) => EXIT_EXHAUSTED,
        };
    }

    fn replan(&mut self, t: i64) -> Result<(), Failure> {
        let dirty = self.session.active_plan().is_some_and(|p| p.dirty);
        let stale = self.session.active_plan().is_none() || self.failure != EXIT_OK;
        if !dirty && !stale {
            return Ok(());
        }
        println!("REPLAN@t={t}");
        if !dirty {
            return self.plan_fresh();
        }
        match self.session.replan(self.config).map_err(input)? {
            ReplanOutcome::KeepPlan => {
                let left = self.session.active_plan().map_or(0, |p| p.remaining().len());
                println!("kept: {left} steps remain");
                self.failure = EXIT_OK;
            }
            ReplanOutcome::NewPlan(plan, stats) => self.note_report(&PlanOutcome::Found(plan, stats)),
            ReplanOutcome::Unsolvable(stats) => self.note_report(&PlanOutcome::Unsolvable(stats)),
            ReplanOutcome::Exhausted(stats) => self.note_report(&PlanOutcome::Exhausted(stats)),
        }
        Ok(())
    }

    fn note_report(&mut self, outcome: &PlanOutcome) {
        self.note(outcome);
        report(outcome);
    }
}

pub fn run(session: Session, goal: Vec<Literal>, events: Vec<EventRecord>, config: PlannerConfig) -> CmdResult {
    let mut sim = Sim {
        session,
        goal,
        config,
        pending: events.into(),
        failure: EXIT_OK,
    };
    let mut t = 0;
    sim.apply_due(t)?;
    sim.plan_fresh()?;
    loop {
        let usable = sim
            .session
            .active_plan()
            .filter(|p| !p.dirty && sim.failure == EXIT_OK)
            .map(|p| p.is_done());
        match usable {
            Some(true) => {
                println!("GOAL_REACHED");
                return Ok(EXIT_OK);
            }
            Some(false) => {
                let step = sim.session.execute_step().map_err(input)?;
                println!("t={t} EXEC {}", step.action);
                if step.done {
                    println!("GOAL_REACHED");
                    return Ok(EXIT_OK);
                }
                t += 1;
            }
            None => match sim.pending.front() {
                Some(next) => t = t.max(next.timestamp),
                None => {
                    println!("STUCK@t={t}");
                    return Ok(sim.failure.max(EXIT_UNSOLVABLE));
                }
            },
        }
        if sim.apply_due(t)? {
            sim.replan(t)?;
        }
    }
}

