//! Link selection policies.
//!
//! Every policy picks one egress link per data quantum. Failed links are
//! passed as a mask indexed like the group's links; indices beyond the end
//! of the mask count as up, so `&[]` means "no failures".

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::link::AggregationGroup;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ForwardingError {
    #[error("unknown policy '{0}' (expected olb, rr, wfq or vrrp)")]
    UnknownPolicy(String),
    #[error("unknown WFQ direction '{0}' (expected inverse or direct)")]
    UnknownDirection(String),
    #[error("link '{0}' has zero cost, inverse-cost weights are undefined")]
    ZeroCost(String),
    #[error("every link in the group has failed")]
    AllLinksFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyId {
    Olb,
    RoundRobin,
    Wfq,
    Vrrp,
}

impl PolicyId {
    pub const ALL: [PolicyId; 4] = [
        PolicyId::Olb,
        PolicyId::RoundRobin,
        PolicyId::Wfq,
        PolicyId::Vrrp,
    ];

    /// The short name used on the command line and in CSV column names.
    pub fn short_name(self) -> &'static str {
        match self {
            PolicyId::Olb => "olb",
            PolicyId::RoundRobin => "rr",
            PolicyId::Wfq => "wfq",
            PolicyId::Vrrp => "vrrp",
        }
    }
}

impl fmt::Display for PolicyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            PolicyId::Olb => "OLB",
            PolicyId::RoundRobin => "ROUND_ROBIN",
            PolicyId::Wfq => "WFQ",
            PolicyId::Vrrp => "VRRP",
        };
        f.write_str(name)
    }
}

impl FromStr for PolicyId {
    type Err = ForwardingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "olb" => Ok(PolicyId::Olb),
            "rr" | "round_robin" => Ok(PolicyId::RoundRobin),
            "wfq" => Ok(PolicyId::Wfq),
            "vrrp" => Ok(PolicyId::Vrrp),
            _ => Err(ForwardingError::UnknownPolicy(s.to_string())),
        }
    }
}

/// How link cost maps onto WFQ weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WfqDirection {
    /// Weight proportional to `1 / cost`: cheaper links carry more.
    #[default]
    InverseCost,
    /// Weight proportional to `cost`.
    DirectCost,
}

impl FromStr for WfqDirection {
    type Err = ForwardingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inverse" | "inverse_cost" => Ok(WfqDirection::InverseCost),
            "direct" | "direct_cost" => Ok(WfqDirection::DirectCost),
            _ => Err(ForwardingError::UnknownDirection(s.to_string())),
        }
    }
}

impl fmt::Display for WfqDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WfqDirection::InverseCost => "inverse",
            WfqDirection::DirectCost => "direct",
        })
    }
}

/// Mutable scheduling state for the stateful policies.
///
/// Odd load balancing keeps nothing here; its scan is local to one call.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolicyState {
    /// Next round robin position, always in `[0, n)`.
    pub rr_cursor: usize,
    /// WFQ deficit counters, one per link.
    pub wfq_deficits: Vec<f64>,
    /// Index of the link currently carrying all VRRP traffic.
    pub vrrp_master: Option<usize>,
}

impl PolicyState {
    pub fn new(group: &AggregationGroup) -> Self {
        PolicyState {
            rr_cursor: 0,
            wfq_deficits: vec![0.0; group.len()],
            vrrp_master: None,
        }
    }
}

fn is_up(failed: &[bool], index: usize) -> bool {
    !failed.get(index).copied().unwrap_or(false)
}

/// Outcome of the odd load balancing scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OlbChoice {
    /// The first link, in priority order, whose buffer is below threshold.
    BelowThreshold(usize),
    /// Every live link is at or above threshold; the scan ended on the last one.
    Fallthrough(usize),
}

impl OlbChoice {
    pub fn index(self) -> usize {
        match self {
            OlbChoice::BelowThreshold(i) | OlbChoice::Fallthrough(i) => i,
        }
    }
}

/// Odd load balancing: scan links in priority order and send to the first
/// one whose buffer has not reached its threshold.
///
/// When no live link passes, the last live link in the scan is returned as
/// [`OlbChoice::Fallthrough`]. Returns `None` only if every link has failed.
pub fn olb_select(group: &AggregationGroup, failed: &[bool]) -> Option<OlbChoice> {
    let mut last = None;
    for (z, link) in group.links().iter().enumerate() {
        if !is_up(failed, z) {
            continue;
        }
        if link.buffer() < link.threshold {
            return Some(OlbChoice::BelowThreshold(z));
        }
        last = Some(z);
    }
    last.map(OlbChoice::Fallthrough)
}

/// Cyclic selection over live links, advancing the cursor past the pick.
pub fn rr_select(
    group: &AggregationGroup,
    state: &mut PolicyState,
    failed: &[bool],
) -> Option<usize> {
    let n = group.len();
    let start = state.rr_cursor % n;
    let pick = (0..n)
        .map(|k| (start + k) % n)
        .find(|&i| is_up(failed, i))?;
    state.rr_cursor = (pick + 1) % n;
    Some(pick)
}

/// Normalized per-link WFQ weights derived from link cost.
pub fn wfq_weights(
    group: &AggregationGroup,
    direction: WfqDirection,
) -> Result<Vec<f64>, ForwardingError> {
    let raw = group
        .links()
        .iter()
        .map(|l| match direction {
            WfqDirection::InverseCost if l.cost_per_gb == 0.0 => {
                Err(ForwardingError::ZeroCost(l.id.clone()))
            }
            WfqDirection::InverseCost => Ok(1.0 / l.cost_per_gb),
            WfqDirection::DirectCost => Ok(l.cost_per_gb),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        // direct weights with every cost at zero
        return Err(ForwardingError::ZeroCost(group.link(0).id.clone()));
    }
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// Deficit-based weighted selection.
///
/// Each call credits every live link with its (renormalized) weight. Among
/// links whose deficit is positive, the one whose next quantum is due
/// soonest, `(1 - deficit) / weight`, wins and is charged one quantum. Ties
/// go to the lower priority number. This keeps every link within one
/// quantum of its proportional share after any number of calls.
pub fn wfq_select(
    group: &AggregationGroup,
    state: &mut PolicyState,
    weights: &[f64],
    failed: &[bool],
) -> Option<usize> {
    let n = group.len();
    state.wfq_deficits.resize(n, 0.0);
    let live_total: f64 = (0..n)
        .filter(|&i| is_up(failed, i))
        .map(|i| weights[i])
        .sum();
    if !(0..n).any(|i| is_up(failed, i)) {
        return None;
    }

    for i in (0..n).filter(|&i| is_up(failed, i)) {
        let share = if live_total > 0.0 {
            weights[i] / live_total
        } else {
            0.0
        };
        state.wfq_deficits[i] += share;
    }

    let deadline = |i: usize| {
        let w = if live_total > 0.0 {
            weights[i] / live_total
        } else {
            0.0
        };
        (1.0 - state.wfq_deficits[i]) / w
    };
    let mut pick: Option<usize> = None;
    for i in (0..n).filter(|&i| is_up(failed, i) && state.wfq_deficits[i] > 0.0) {
        match pick {
            Some(p) if deadline(i) >= deadline(p) => {}
            _ => pick = Some(i),
        }
    }
    // Rounding can leave no positive deficit; fall back to the largest.
    let pick = pick.unwrap_or_else(|| {
        (0..n)
            .filter(|&i| is_up(failed, i))
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if state.wfq_deficits[b] >= state.wfq_deficits[i] => Some(b),
                _ => Some(i),
            })
            .expect("at least one live link")
    });
    state.wfq_deficits[pick] -= 1.0;
    Some(pick)
}

/// The VRRP baseline's own preference order: highest capacity first, link
/// id breaking ties. Independent of aggregation priorities.
pub fn vrrp_preference(group: &AggregationGroup) -> Vec<usize> {
    let mut order: Vec<usize> = (0..group.len()).collect();
    order.sort_by(|&a, &b| {
        let (la, lb) = (group.link(a), group.link(b));
        lb.capacity
            .total_cmp(&la.capacity)
            .then_with(|| la.id.cmp(&lb.id))
    });
    order
}

/// Active/standby baseline: all traffic goes to the master link, the most
/// preferred link that is still up.
pub fn vrrp_select(
    group: &AggregationGroup,
    state: &mut PolicyState,
    failed: &[bool],
) -> Result<usize, ForwardingError> {
    let master = vrrp_preference(group)
        .into_iter()
        .find(|&i| is_up(failed, i))
        .ok_or(ForwardingError::AllLinksFailed)?;
    state.vrrp_master = Some(master);
    Ok(master)
}

/// A policy bound to its state, ready to place quanta on one group.
#[derive(Debug, Clone)]
pub struct Forwarder {
    policy: PolicyId,
    state: PolicyState,
    weights: Vec<f64>,
}

impl Forwarder {
    pub fn new(
        policy: PolicyId,
        group: &AggregationGroup,
        direction: WfqDirection,
    ) -> Result<Self, ForwardingError> {
        let weights = match policy {
            PolicyId::Wfq => wfq_weights(group, direction)?,
            _ => Vec::new(),
        };
        Ok(Forwarder {
            policy,
            state: PolicyState::new(group),
            weights,
        })
    }

    pub fn policy(&self) -> PolicyId {
        self.policy
    }

    pub fn state(&self) -> &PolicyState {
        &self.state
    }

    pub fn select(
        &mut self,
        group: &AggregationGroup,
        failed: &[bool],
    ) -> Result<usize, ForwardingError> {
        let pick = match self.policy {
            PolicyId::Olb => olb_select(group, failed).map(OlbChoice::index),
            PolicyId::RoundRobin => rr_select(group, &mut self.state, failed),
            PolicyId::Wfq => wfq_select(group, &mut self.state, &self.weights, failed),
            PolicyId::Vrrp => return vrrp_select(group, &mut self.state, failed),
        };
        pick.ok_or(ForwardingError::AllLinksFailed)
    }
}
