//! The two bundled evaluation scenarios.
//!
//! Each scenario is a link group plus a synthetic one-day demand trace
//! sampled once per second. Bundled links hold at most one tick of data
//! (`buffer_cap == threshold`), so load above the group's capacity is shed
//! immediately instead of queueing into later ticks.

use crate::link::{validate_group, AggregationGroup, Link};
use crate::trace::{clock, synth_diurnal, DemandTrace, DiurnalShape};

pub const SAMPLES_PER_HOUR: u32 = 3600;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioName {
    /// Two uplinks, 64 and 32 Mbps, peak from 10:00 to 16:00.
    One,
    /// Three uplinks, 4, 16 and 16 Mbps, peak from 10:30 to 16:00.
    Two,
}

impl ScenarioName {
    pub fn parse(name: &str) -> Option<Self> {
        match name.trim() {
            "1" => Some(ScenarioName::One),
            "2" => Some(ScenarioName::Two),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ScenarioName::One => "scenario1",
            ScenarioName::Two => "scenario2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: ScenarioName,
    pub group: AggregationGroup,
    pub shape: DiurnalShape,
}

impl Scenario {
    pub fn load(name: ScenarioName) -> Scenario {
        match name {
            ScenarioName::One => scenario_one(),
            ScenarioName::Two => scenario_two(),
        }
    }

    pub fn trace(&self) -> DemandTrace {
        synth_diurnal(self.shape).expect("bundled shapes are valid")
    }
}

fn one_tick_link(id: &str, capacity: f64, priority: u32, cost: f64) -> Link {
    let link = Link::new(id, capacity, priority, cost);
    let threshold = link.threshold;
    link.buffer_cap(threshold)
}

pub fn scenario_one() -> Scenario {
    let group = validate_group(
        ScenarioName::One.label(),
        vec![
            one_tick_link("L64", 64.0, 1, 1.0),
            one_tick_link("L32", 32.0, 2, 2.0),
        ],
    )
    .expect("bundled group is valid");
    Scenario {
        name: ScenarioName::One,
        group,
        shape: DiurnalShape {
            peak_start: clock(10, 0),
            peak_end: clock(16, 0),
            base: 20.0,
            peak: 120.0,
            samples_per_hour: SAMPLES_PER_HOUR,
        },
    }
}

/// The 4 Mbps link is primary because it is the cheapest; costs rise with
/// priority number.
pub fn scenario_two() -> Scenario {
    let group = validate_group(
        ScenarioName::Two.label(),
        vec![
            one_tick_link("P4", 4.0, 1, 1.0),
            one_tick_link("S16", 16.0, 2, 2.0),
            one_tick_link("T16", 16.0, 3, 3.0),
        ],
    )
    .expect("bundled group is valid");
    Scenario {
        name: ScenarioName::Two,
        group,
        shape: DiurnalShape {
            peak_start: clock(10, 30),
            peak_end: clock(16, 0),
            base: 2.0,
            peak: 30.0,
            samples_per_hour: SAMPLES_PER_HOUR,
        },
    }
}
