//! Discrete-time simulation engine.
//!
//! Each tick the demand is cut into fixed-size quanta (the last one may be
//! fractional). Quanta are placed one at a time by the active policy against
//! live buffer levels, so a tick's overflow cascades from one link to the
//! next within the same tick. A quantum that would push its link past the
//! buffer cap is dropped whole. After placement every live link transmits
//! up to `capacity * tick`.

use std::fmt;

use thiserror::Error;

use crate::forwarding::{Forwarder, ForwardingError, PolicyId, WfqDirection};
use crate::link::AggregationGroup;
use crate::trace::DemandTrace;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("trace has no samples")]
    TraceEmpty,
    #[error("invalid engine configuration: {0}")]
    BadConfig(String),
    #[error("invalid demand {0} Mbps")]
    BadDemand(f64),
    #[error("failure schedule names unknown link '{0}'")]
    UnknownLink(String),
    #[error(transparent)]
    Forwarding(#[from] ForwardingError),
}

impl SimError {
    /// True for errors caused by bad inputs rather than by the run itself.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, SimError::Forwarding(ForwardingError::AllLinksFailed))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig {
    /// Seconds per tick.
    pub tick: f64,
    /// Megabits per assignment unit.
    pub quantum: f64,
    pub policy: PolicyId,
    pub wfq_direction: WfqDirection,
    /// Leading ticks excluded from steady-state checks.
    pub warmup_ticks: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            tick: 1.0,
            quantum: 1.0,
            policy: PolicyId::Olb,
            wfq_direction: WfqDirection::InverseCost,
            warmup_ticks: 1,
        }
    }
}

impl EngineConfig {
    pub fn with_policy(policy: PolicyId) -> Self {
        EngineConfig {
            policy,
            ..Default::default()
        }
    }

    pub fn validate(&self, group: &AggregationGroup) -> Result<(), SimError> {
        if !(self.tick.is_finite() && self.tick > 0.0) {
            return Err(SimError::BadConfig(format!(
                "tick must be positive, got {}",
                self.tick
            )));
        }
        if !(self.quantum.is_finite() && self.quantum > 0.0) {
            return Err(SimError::BadConfig(format!(
                "quantum must be positive, got {}",
                self.quantum
            )));
        }
        let min_threshold = group
            .links()
            .iter()
            .map(|l| l.threshold)
            .fold(f64::INFINITY, f64::min);
        if self.quantum > min_threshold {
            return Err(SimError::BadConfig(format!(
                "quantum {} exceeds the smallest link threshold {min_threshold}",
                self.quantum
            )));
        }
        Ok(())
    }
}

/// Everything that happened during one tick. Per-link vectors follow the
/// group's priority order.
#[derive(Debug, Clone, PartialEq)]
pub struct TickRecord {
    pub t: f64,
    pub demand: f64,
    pub assigned: Vec<f64>,
    pub transmitted: Vec<f64>,
    pub buffer_end: Vec<f64>,
    pub dropped: f64,
    pub supplied_mbps: f64,
    /// Consecutive accepted quanta that went to different links.
    pub link_switches: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub config: EngineConfig,
    /// The group as it was when the run started.
    pub group: AggregationGroup,
    pub records: Vec<TickRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkEvent {
    Up,
    Down,
}

impl fmt::Display for LinkEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LinkEvent::Up => "up",
            LinkEvent::Down => "down",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailureEvent {
    pub t: f64,
    pub link_id: String,
    pub event: LinkEvent,
}

/// Link up/down events in time order. An event applies from the first tick
/// whose start time is at or after the event time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FailureSchedule {
    events: Vec<FailureEvent>,
}

impl FailureSchedule {
    pub fn new(mut events: Vec<FailureEvent>) -> Self {
        events.sort_by(|a, b| a.t.total_cmp(&b.t));
        FailureSchedule { events }
    }

    pub fn events(&self) -> &[FailureEvent] {
        &self.events
    }

    fn resolve(&self, group: &AggregationGroup) -> Result<Vec<(f64, usize, bool)>, SimError> {
        self.events
            .iter()
            .map(|e| {
                group
                    .index_of(&e.link_id)
                    .map(|i| (e.t, i, e.event == LinkEvent::Down))
                    .ok_or_else(|| SimError::UnknownLink(e.link_id.clone()))
            })
            .collect()
    }
}

/// Splits `volume` megabits into whole quanta followed by one fractional
/// remainder, if any.
fn quanta(volume: f64, quantum: f64) -> impl Iterator<Item = f64> {
    let whole = (volume / quantum).floor();
    let rest = volume - whole * quantum;
    let whole = whole as u64;
    (0..whole)
        .map(move |_| quantum)
        .chain((rest > 0.0).then_some(rest))
}

/// Advances the group by one tick at time `t` with the given demand.
///
/// `failed` marks links that neither receive nor transmit this tick.
pub fn step(
    group: &mut AggregationGroup,
    forwarder: &mut Forwarder,
    config: &EngineConfig,
    t: f64,
    demand_mbps: f64,
    failed: &[bool],
) -> Result<TickRecord, SimError> {
    if !(demand_mbps.is_finite() && demand_mbps >= 0.0) {
        return Err(SimError::BadDemand(demand_mbps));
    }
    let n = group.len();
    let mut assigned = vec![0.0; n];
    let mut dropped = 0.0;
    let mut switches = 0;
    let mut previous = None;

    for q in quanta(demand_mbps * config.tick, config.quantum) {
        let i = forwarder.select(group, failed)?;
        if group.link_mut(i).try_enqueue(q) {
            assigned[i] += q;
            if previous.is_some_and(|p| p != i) {
                switches += 1;
            }
            previous = Some(i);
        } else {
            dropped += q;
        }
    }

    let transmitted: Vec<f64> = (0..n)
        .map(|i| {
            if failed.get(i).copied().unwrap_or(false) {
                0.0
            } else {
                group.link_mut(i).drain(config.tick)
            }
        })
        .collect();
    let buffer_end = group.links().iter().map(|l| l.buffer()).collect();
    let supplied_mbps = transmitted.iter().sum::<f64>() / config.tick;

    Ok(TickRecord {
        t,
        demand: demand_mbps,
        assigned,
        transmitted,
        buffer_end,
        dropped,
        supplied_mbps,
        link_switches: switches,
    })
}

/// Number of ticks covering `[start, end]` at spacing `tick`.
fn tick_count(start: f64, end: f64, tick: f64) -> usize {
    // slack absorbs rounding in spans like 0.3 / 0.1
    ((end - start) / tick + 1e-9).floor() as usize + 1
}

/// Runs `trace` from empty buffers and fresh policy state.
///
/// Ticks start at the first sample time and are spaced `config.tick` apart
/// through the last sample; each tick uses the most recent sample at or
/// before it.
pub fn run(
    group: &AggregationGroup,
    config: &EngineConfig,
    trace: &DemandTrace,
    failures: Option<&FailureSchedule>,
) -> Result<SimulationResult, SimError> {
    if trace.is_empty() {
        return Err(SimError::TraceEmpty);
    }
    config.validate(group)?;
    let events = failures
        .map(|f| f.resolve(group))
        .transpose()?
        .unwrap_or_default();

    let mut live = group.clone();
    live.clear_buffers();
    let mut forwarder = Forwarder::new(config.policy, &live, config.wfq_direction)?;
    let mut failed = vec![false; live.len()];
    let samples = trace.samples();
    let start = trace.start();
    let ticks = tick_count(start, trace.end(), config.tick);
    let slack = config.tick * 1e-9;

    let mut records = Vec::with_capacity(ticks);
    let mut sample = 0;
    let mut next_event = 0;
    for k in 0..ticks {
        let t = start + k as f64 * config.tick;
        while sample + 1 < samples.len() && samples[sample + 1].t <= t + slack {
            sample += 1;
        }
        while next_event < events.len() && events[next_event].0 <= t + slack {
            let (_, link, down) = events[next_event];
            failed[link] = down;
            next_event += 1;
        }
        let record = step(
            &mut live,
            &mut forwarder,
            config,
            t,
            samples[sample].demand,
            &failed,
        )?;
        records.push(record);
    }

    let mut echo = group.clone();
    echo.clear_buffers();
    Ok(SimulationResult {
        config: *config,
        group: echo,
        records,
    })
}
