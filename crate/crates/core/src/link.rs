//! Uplinks and aggregation groups.
//!
//! A [`Link`] carries the per-uplink aggregation parameters (priority, cost)
//! together with the buffer state the forwarding policies inspect. An
//! [`AggregationGroup`] is a validated bundle of links kept in ascending
//! priority order, which is the scan order used by odd load balancing.

use std::collections::HashSet;

use thiserror::Error;

/// Multiplier applied to the threshold when a link has no explicit buffer cap.
pub const DEFAULT_CAP_FACTOR: f64 = 4.0;

/// Bits in a decimal gigabyte, expressed in megabits.
pub const MBIT_PER_GB: f64 = 8_000.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupError {
    #[error("aggregation group has no links")]
    EmptyGroup,
    #[error("priority {priority} is used by both '{first}' and '{second}'")]
    DuplicatePriority {
        priority: u32,
        first: String,
        second: String,
    },
    #[error("link '{link}': {reason}")]
    BadParameter { link: String, reason: String },
}

impl GroupError {
    fn bad(link: &str, reason: impl Into<String>) -> Self {
        GroupError::BadParameter {
            link: link.to_string(),
            reason: reason.into(),
        }
    }
}

/// One uplink of an aggregation group.
///
/// Rates are in Mbps, volumes in megabits.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub id: String,
    pub capacity: f64,
    /// 1 is the primary link, 2 the secondary, and so on.
    pub priority: u32,
    pub cost_per_gb: f64,
    /// Occupancy at or above which odd load balancing moves on to the next link.
    pub threshold: f64,
    /// Hard occupancy limit; a quantum that would exceed it is dropped.
    pub buffer_cap: f64,
    buffer: f64,
}

/// One tick's worth of drainable data: `capacity * tick`.
pub fn default_threshold(capacity: f64, tick: f64) -> f64 {
    capacity * tick
}

impl Link {
    /// Creates an empty link with the default threshold for a one second tick.
    pub fn new(id: impl Into<String>, capacity: f64, priority: u32, cost_per_gb: f64) -> Self {
        Self::with_tick(id, capacity, priority, cost_per_gb, 1.0)
    }

    /// Creates an empty link whose threshold and cap use defaults for `tick`.
    pub fn with_tick(
        id: impl Into<String>,
        capacity: f64,
        priority: u32,
        cost_per_gb: f64,
        tick: f64,
    ) -> Self {
        let threshold = default_threshold(capacity, tick);
        Link {
            id: id.into(),
            capacity,
            priority,
            cost_per_gb,
            threshold,
            buffer_cap: threshold * DEFAULT_CAP_FACTOR,
            buffer: 0.0,
        }
    }

    /// Sets the threshold. The cap follows unless set explicitly afterwards.
    pub fn threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self.buffer_cap = threshold * DEFAULT_CAP_FACTOR;
        self
    }

    pub fn buffer_cap(mut self, cap: f64) -> Self {
        self.buffer_cap = cap;
        self
    }

    pub fn buffered(mut self, occupancy: f64) -> Self {
        self.buffer = occupancy;
        self
    }

    /// Current buffer occupancy in megabits.
    pub fn buffer(&self) -> f64 {
        self.buffer
    }

    pub fn is_below_threshold(&self) -> bool {
        self.buffer < self.threshold
    }

    /// Enqueues `volume` unless it would overflow the cap. Returns whether it fit.
    pub(crate) fn try_enqueue(&mut self, volume: f64) -> bool {
        let next = self.buffer + volume;
        if next > self.buffer_cap {
            return false;
        }
        self.buffer = next;
        true
    }

    /// Transmits up to `capacity * tick` and returns the volume sent.
    pub(crate) fn drain(&mut self, tick: f64) -> f64 {
        let sent = self.buffer.min(self.capacity * tick);
        self.buffer -= sent;
        sent
    }

    fn check(&self) -> Result<(), GroupError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.id.trim().is_empty() {
            return Err(GroupError::bad(&self.id, "empty link id"));
        }
        if !positive(self.capacity) {
            return Err(GroupError::bad(&self.id, "capacity must be positive"));
        }
        if self.priority == 0 {
            return Err(GroupError::bad(&self.id, "priority must be at least 1"));
        }
        if !(self.cost_per_gb.is_finite() && self.cost_per_gb >= 0.0) {
            return Err(GroupError::bad(&self.id, "cost per GB must be nonnegative"));
        }
        if !positive(self.threshold) {
            return Err(GroupError::bad(&self.id, "threshold must be positive"));
        }
        if !(self.buffer_cap.is_finite() && self.buffer_cap >= self.threshold) {
            return Err(GroupError::bad(&self.id, "buffer cap is below threshold"));
        }
        if !(self.buffer >= 0.0 && self.buffer <= self.buffer_cap) {
            return Err(GroupError::bad(
                &self.id,
                "buffer occupancy outside [0, cap]",
            ));
        }
        Ok(())
    }
}

/// A validated bundle of links sorted by ascending priority.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregationGroup {
    group_id: String,
    links: Vec<Link>,
}

/// Validates `links` and returns them as a group in ascending priority order.
pub fn validate_group(
    group_id: impl Into<String>,
    mut links: Vec<Link>,
) -> Result<AggregationGroup, GroupError> {
    if links.is_empty() {
        return Err(GroupError::EmptyGroup);
    }
    let mut ids = HashSet::new();
    for link in &links {
        link.check()?;
        if !ids.insert(link.id.as_str()) {
            return Err(GroupError::bad(&link.id, "duplicate link id"));
        }
    }
    links.sort_by_key(|l| l.priority);
    if let Some(pair) = links.windows(2).find(|w| w[0].priority == w[1].priority) {
        return Err(GroupError::DuplicatePriority {
            priority: pair[0].priority,
            first: pair[0].id.clone(),
            second: pair[1].id.clone(),
        });
    }
    Ok(AggregationGroup {
        group_id: group_id.into(),
        links,
    })
}

impl AggregationGroup {
    pub fn group_id(&self) -> &str {
        &self.group_id
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn link(&self, index: usize) -> &Link {
        &self.links[index]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.links.iter().position(|l| l.id == id)
    }

    pub fn total_capacity(&self) -> f64 {
        self.links.iter().map(|l| l.capacity).sum()
    }

    /// Overwrites one link's occupancy, keeping it within `[0, cap]`.
    pub fn set_buffer(&mut self, index: usize, occupancy: f64) -> Result<(), GroupError> {
        let link = &mut self.links[index];
        if !(occupancy >= 0.0 && occupancy <= link.buffer_cap) {
            return Err(GroupError::bad(
                &link.id,
                "buffer occupancy outside [0, cap]",
            ));
        }
        link.buffer = occupancy;
        Ok(())
    }

    pub fn clear_buffers(&mut self) {
        for link in &mut self.links {
            link.buffer = 0.0;
        }
    }

    /// Returns a copy with every rate, volume and threshold multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> AggregationGroup {
        let links = self
            .links
            .iter()
            .map(|l| Link {
                capacity: l.capacity * factor,
                threshold: l.threshold * factor,
                buffer_cap: l.buffer_cap * factor,
                buffer: l.buffer * factor,
                ..l.clone()
            })
            .collect();
        AggregationGroup {
            group_id: self.group_id.clone(),
            links,
        }
    }

    pub(crate) fn link_mut(&mut self, index: usize) -> &mut Link {
        &mut self.links[index]
    }
}
