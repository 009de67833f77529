#![allow(dead_code)]

pub mod oracle;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use rla::engine::{FailureEvent, FailureSchedule, LinkEvent};
use rla::trace::Sample;
use rla::{validate_group, AggregationGroup, DemandTrace, Link, PolicyId};

/// A deterministic runner executing exactly `cases` cases.
pub fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

#[derive(Debug, Clone)]
pub struct LinkParams {
    pub capacity: f64,
    pub threshold_factor: f64,
    pub cap_factor: f64,
    pub cost: f64,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub links: Vec<LinkParams>,
    /// Priority permutation: link i gets priority `priorities[i]`.
    pub priorities: Vec<u32>,
    pub demands: Vec<f64>,
    pub policy: PolicyId,
    pub quantum: f64,
    /// Optional outage: (link index, down from tick, back up at tick).
    pub outage: Option<(usize, usize, usize)>,
}

impl Instance {
    pub fn group(&self) -> AggregationGroup {
        let links = self
            .links
            .iter()
            .zip(&self.priorities)
            .enumerate()
            .map(|(i, (p, &prio))| {
                let threshold = p.capacity * p.threshold_factor;
                Link::new(format!("l{i}"), p.capacity, prio, p.cost)
                    .threshold(threshold)
                    .buffer_cap(threshold * p.cap_factor)
            })
            .collect();
        validate_group("random", links).expect("generated group is valid")
    }

    pub fn trace(&self) -> DemandTrace {
        DemandTrace::new(
            self.demands
                .iter()
                .enumerate()
                .map(|(k, &demand)| Sample {
                    t: k as f64,
                    demand,
                })
                .collect(),
        )
        .expect("generated trace is valid")
    }

    pub fn failures(&self, group: &AggregationGroup) -> Option<FailureSchedule> {
        let (link, from, to) = self.outage?;
        let id = group.link(link).id.clone();
        Some(FailureSchedule::new(vec![
            FailureEvent {
                t: from as f64,
                link_id: id.clone(),
                event: LinkEvent::Down,
            },
            FailureEvent {
                t: to as f64,
                link_id: id,
                event: LinkEvent::Up,
            },
        ]))
    }
}

fn link_params() -> impl Strategy<Value = LinkParams> {
    (1u32..=100, 2u32..=4, 1u32..=4, 1u32..=10).prop_map(|(cap2, tf, cf, cost)| LinkParams {
        capacity: cap2 as f64 / 2.0 + 0.5,
        threshold_factor: tf as f64 / 2.0,
        cap_factor: cf as f64,
        cost: cost as f64 / 2.0,
    })
}

pub fn policy() -> impl Strategy<Value = PolicyId> {
    prop::sample::select(PolicyId::ALL.to_vec())
}

/// Random small instances: up to `max_links` links, up to `max_ticks`
/// ticks, fractional demands up to 1.5x total capacity.
pub fn instance(
    max_links: usize,
    max_ticks: usize,
    with_outages: bool,
) -> impl Strategy<Value = Instance> {
    (
        prop::collection::vec(link_params(), 1..=max_links),
        1..=max_ticks,
        policy(),
        prop::sample::select(vec![0.25, 0.5, 1.0]),
    )
        .prop_flat_map(move |(links, ticks, policy, quantum)| {
            let n = links.len();
            let total: f64 = links.iter().map(|l| l.capacity).sum();
            let priorities = Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle();
            let demands = prop::collection::vec(0.0..1.5 * total, ticks);
            let outage = if with_outages && n > 1 {
                prop::option::of((0..n, 0..ticks, 0..=ticks)).boxed()
            } else {
                Just(None).boxed()
            };
            (
                Just(links),
                priorities,
                demands,
                Just(policy),
                Just(quantum),
                outage,
            )
        })
        .prop_map(
            |(links, priorities, demands, policy, quantum, outage)| Instance {
                links,
                priorities,
                demands,
                policy,
                quantum,
                outage: outage.map(|(l, a, b)| (l, a.min(b), a.max(b))),
            },
        )
}
