//! CSV input formats and synthetic demand traces.
//!
//! Three formats are read here, all comma separated with a header row:
//!
//! | file     | header                                                              |
//! |----------|---------------------------------------------------------------------|
//! | demand   | `time_s,demand_mbps`                                                |
//! | links    | `id,capacity_mbps,priority,cost_per_gb,threshold_mbit,buffer_cap_mbit` |
//! | failures | `time_s,link_id,event`                                              |
//!
//! Lines starting with `#` are ignored. Errors carry the 1-based line number
//! of the offending row, counting the header as line 1.

use std::fmt::Write as _;

use thiserror::Error;

use crate::engine::{FailureEvent, FailureSchedule, LinkEvent};
use crate::link::{validate_group, AggregationGroup, GroupError, Link};

pub const TRACE_HEADER: [&str; 2] = ["time_s", "demand_mbps"];
pub const LINK_HEADER: [&str; 6] = [
    "id",
    "capacity_mbps",
    "priority",
    "cost_per_gb",
    "threshold_mbit",
    "buffer_cap_mbit",
];
pub const FAILURE_HEADER: [&str; 3] = ["time_s", "link_id", "event"];

pub const SECONDS_PER_DAY: f64 = 86_400.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("line {line}: {reason}")]
    Parse { line: u64, reason: String },
    #[error("trace has no samples")]
    EmptyTrace,
    #[error("bad diurnal window: {0}")]
    BadWindow(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

fn parse_err(line: u64, reason: impl Into<String>) -> TraceError {
    TraceError::Parse {
        line,
        reason: reason.into(),
    }
}

/// One demand reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub demand: f64,
}

/// Requested bandwidth over time: strictly increasing sample times, at
/// least one sample, nonnegative demand.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandTrace {
    samples: Vec<Sample>,
}

impl DemandTrace {
    pub fn new(samples: Vec<Sample>) -> Result<Self, TraceError> {
        if samples.is_empty() {
            return Err(TraceError::EmptyTrace);
        }
        for (i, s) in samples.iter().enumerate() {
            let line = i as u64 + 2;
            check_sample(s, line)?;
            if i > 0 && s.t <= samples[i - 1].t {
                return Err(parse_err(line, "time is not strictly increasing"));
            }
        }
        Ok(DemandTrace { samples })
    }

    /// A trace holding `demand` for `ticks` one-second samples starting at 0.
    pub fn constant(demand: f64, ticks: usize) -> Result<Self, TraceError> {
        Self::new(
            (0..ticks)
                .map(|k| Sample {
                    t: k as f64,
                    demand,
                })
                .collect(),
        )
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.samples[0].t
    }

    pub fn end(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().map(|s| s.demand).fold(0.0, f64::max)
    }

    /// Multiplies every demand value by `factor`.
    pub fn scaled(&self, factor: f64) -> DemandTrace {
        DemandTrace {
            samples: self
                .samples
                .iter()
                .map(|s| Sample {
                    t: s.t,
                    demand: s.demand * factor,
                })
                .collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", TRACE_HEADER.join(","));
        for s in &self.samples {
            let _ = writeln!(out, "{},{}", s.t, s.demand);
        }
        out
    }
}

fn check_sample(s: &Sample, line: u64) -> Result<(), TraceError> {
    if !s.t.is_finite() {
        return Err(parse_err(line, "time is not a finite number"));
    }
    if !s.demand.is_finite() {
        return Err(parse_err(line, "demand is not a finite number"));
    }
    if s.demand < 0.0 {
        return Err(parse_err(line, "negative demand"));
    }
    Ok(())
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn check_header(rdr: &mut csv::Reader<&[u8]>, expected: &[&str]) -> Result<(), TraceError> {
    let header = rdr
        .headers()
        .map_err(|e| parse_err(csv_line(&e), e.to_string()))?;
    let line = header.position().map_or(1, |p| p.line());
    if header.is_empty() {
        return Err(parse_err(line, "missing header"));
    }
    if header.iter().ne(expected.iter().copied()) {
        return Err(parse_err(
            line,
            format!("expected header '{}'", expected.join(",")),
        ));
    }
    Ok(())
}

fn csv_line(e: &csv::Error) -> u64 {
    e.position().map_or(0, |p| p.line())
}

/// Iterates data rows as `(line, fields)` after validating the header and
/// the number of fields.
fn rows<'a>(
    text: &'a str,
    header: &'a [&'a str],
) -> Result<impl Iterator<Item = Result<(u64, csv::StringRecord), TraceError>> + 'a, TraceError> {
    let mut rdr = reader(text);
    check_header(&mut rdr, header)?;
    Ok(rdr.into_records().map(move |rec| {
        let rec = rec.map_err(|e| parse_err(csv_line(&e), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(parse_err(
                line,
                format!("expected {} fields, found {}", header.len(), rec.len()),
            ));
        }
        Ok((line, rec))
    }))
}

fn number<T: std::str::FromStr>(field: &str, name: &str, line: u64) -> Result<T, TraceError> {
    field
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {name} '{field}'")))
}

/// Parses a `time_s,demand_mbps` demand trace.
pub fn parse_trace(text: &str) -> Result<DemandTrace, TraceError> {
    let mut samples: Vec<Sample> = Vec::new();
    for row in rows(text, &TRACE_HEADER)? {
        let (line, rec) = row?;
        let sample = Sample {
            t: number(&rec[0], "time", line)?,
            demand: number(&rec[1], "demand", line)?,
        };
        check_sample(&sample, line)?;
        if let Some(prev) = samples.last() {
            if sample.t <= prev.t {
                return Err(parse_err(line, "time is not strictly increasing"));
            }
        }
        samples.push(sample);
    }
    if samples.is_empty() {
        return Err(TraceError::EmptyTrace);
    }
    Ok(DemandTrace { samples })
}

/// Parses a link configuration with defaults for a one second tick.
pub fn parse_links(text: &str) -> Result<AggregationGroup, TraceError> {
    parse_links_with_tick(text, "group", 1.0)
}

/// Parses a link configuration. Empty threshold or cap columns fall back to
/// the defaults for `tick`.
pub fn parse_links_with_tick(
    text: &str,
    group_id: &str,
    tick: f64,
) -> Result<AggregationGroup, TraceError> {
    let mut links = Vec::new();
    for row in rows(text, &LINK_HEADER)? {
        let (line, rec) = row?;
        let id = rec[0].to_string();
        if id.is_empty() {
            return Err(parse_err(line, "empty link id"));
        }
        let capacity: f64 = number(&rec[1], "capacity", line)?;
        let priority: u32 = number(&rec[2], "priority", line)?;
        let cost: f64 = number(&rec[3], "cost", line)?;
        let mut link = Link::with_tick(id, capacity, priority, cost, tick);
        if !rec[4].is_empty() {
            link = link.threshold(number(&rec[4], "threshold", line)?);
        }
        if !rec[5].is_empty() {
            link = link.buffer_cap(number(&rec[5], "buffer cap", line)?);
        }
        links.push(link);
    }
    Ok(validate_group(group_id, links)?)
}

/// Writes a group in the link configuration format with every column filled.
pub fn links_to_csv(group: &AggregationGroup) -> String {
    let mut out = format!("{}\n", LINK_HEADER.join(","));
    for l in group.links() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            l.id, l.capacity, l.priority, l.cost_per_gb, l.threshold, l.buffer_cap
        );
    }
    out
}

/// Parses a `time_s,link_id,event` failure schedule. Events must be in
/// nondecreasing time order; `event` is `up` or `down`.
pub fn parse_failures(text: &str) -> Result<FailureSchedule, TraceError> {
    let mut events: Vec<FailureEvent> = Vec::new();
    for row in rows(text, &FAILURE_HEADER)? {
        let (line, rec) = row?;
        let t: f64 = number(&rec[0], "time", line)?;
        if !t.is_finite() {
            return Err(parse_err(line, "time is not a finite number"));
        }
        if events.last().is_some_and(|e| t < e.t) {
            return Err(parse_err(line, "events are not in time order"));
        }
        let event = match rec[2].to_ascii_lowercase().as_str() {
            "up" => LinkEvent::Up,
            "down" => LinkEvent::Down,
            other => return Err(parse_err(line, format!("unknown event '{other}'"))),
        };
        if rec[1].is_empty() {
            return Err(parse_err(line, "empty link id"));
        }
        events.push(FailureEvent {
            t,
            link_id: rec[1].to_string(),
            event,
        });
    }
    Ok(FailureSchedule::new(events))
}

pub fn failures_to_csv(schedule: &FailureSchedule) -> String {
    let mut out = format!("{}\n", FAILURE_HEADER.join(","));
    for e in schedule.events() {
        let _ = writeln!(out, "{},{},{}", e.t, e.link_id, e.event);
    }
    out
}

/// Shape of a one-day synthetic demand curve: flat `base` outside the peak
/// window, a linear ramp up to `peak` at the window midpoint and back down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiurnalShape {
    pub peak_start: f64,
    pub peak_end: f64,
    pub base: f64,
    pub peak: f64,
    pub samples_per_hour: u32,
}

impl DiurnalShape {
    /// Demand at second-of-day `t`.
    pub fn demand_at(&self, t: f64) -> f64 {
        if t <= self.peak_start || t >= self.peak_end {
            return self.base;
        }
        let mid = 0.5 * (self.peak_start + self.peak_end);
        let half = 0.5 * (self.peak_end - self.peak_start);
        let rise = 1.0 - (t - mid).abs() / half;
        self.base + (self.peak - self.base) * rise
    }
}

/// Builds a 24 hour trace following `shape`, one sample every
/// `3600 / samples_per_hour` seconds starting at midnight.
pub fn synth_diurnal(shape: DiurnalShape) -> Result<DemandTrace, TraceError> {
    let DiurnalShape {
        peak_start,
        peak_end,
        base,
        peak,
        samples_per_hour,
    } = shape;
    if !(peak_start.is_finite() && peak_end.is_finite()) {
        return Err(TraceError::BadWindow("window bounds must be finite".into()));
    }
    if !(0.0 <= peak_start && peak_start < peak_end && peak_end <= SECONDS_PER_DAY) {
        return Err(TraceError::BadWindow(format!(
            "need 0 <= start < end <= {SECONDS_PER_DAY}, got {peak_start}..{peak_end}"
        )));
    }
    if !(base.is_finite() && peak.is_finite() && 0.0 <= base && base <= peak) {
        return Err(TraceError::BadWindow(format!(
            "need 0 <= base <= peak, got base {base} peak {peak}"
        )));
    }
    if samples_per_hour == 0 {
        return Err(TraceError::BadWindow(
            "samples_per_hour must be positive".into(),
        ));
    }
    let count = 24 * samples_per_hour as usize;
    let step = 3600.0 / samples_per_hour as f64;
    let samples = (0..count)
        .map(|k| {
            let t = k as f64 * step;
            Sample {
                t,
                demand: shape.demand_at(t),
            }
        })
        .collect();
    DemandTrace::new(samples)
}

/// Seconds since midnight for `hh:mm`.
pub fn clock(hours: u32, minutes: u32) -> f64 {
    (hours * 3600 + minutes * 60) as f64
}
