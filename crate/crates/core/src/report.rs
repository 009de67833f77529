//! Reports derived from a finished simulation, written as CSV.

use std::io::{self, Write};
use std::str::FromStr;

use crate::engine::SimulationResult;
use crate::forwarding::PolicyId;
use crate::link::{AggregationGroup, MBIT_PER_GB};

/// Days per year used to annualize a single representative day.
pub const DAYS_PER_YEAR: f64 = 365.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupplyRow {
    pub t: f64,
    pub demand_mbps: f64,
    pub supplied_mbps: f64,
}

pub fn supply_series(result: &SimulationResult) -> Vec<SupplyRow> {
    result
        .records
        .iter()
        .map(|r| SupplyRow {
            t: r.t,
            demand_mbps: r.demand,
            supplied_mbps: r.supplied_mbps,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShortfallRow {
    pub t: f64,
    pub unmet_mbps: f64,
}

/// Demand left unserved each tick, `max(0, demand - supplied)`.
pub fn shortfall_series(result: &SimulationResult) -> Vec<ShortfallRow> {
    result
        .records
        .iter()
        .map(|r| ShortfallRow {
            t: r.t,
            unmet_mbps: (r.demand - r.supplied_mbps).max(0.0),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkCost {
    pub link_id: String,
    pub transmitted_gb: f64,
    pub cost_per_gb: f64,
    pub cost: f64,
    pub annual_cost: f64,
    /// Transmitted volume over what the link could have sent in the run.
    pub utilization: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    pub links: Vec<LinkCost>,
    pub total: f64,
    pub annual_total: f64,
}

/// Money spent per link on the volume it transmitted. The annual figures
/// treat the run as one representative day.
pub fn cost_report(result: &SimulationResult, group: &AggregationGroup) -> CostReport {
    let duration = result.records.len() as f64 * result.config.tick;
    let links: Vec<LinkCost> = group
        .links()
        .iter()
        .enumerate()
        .map(|(i, link)| {
            let mbit: f64 = result.records.iter().map(|r| r.transmitted[i]).sum();
            let transmitted_gb = mbit / MBIT_PER_GB;
            let cost = transmitted_gb * link.cost_per_gb;
            let possible = link.capacity * duration;
            LinkCost {
                link_id: link.id.clone(),
                transmitted_gb,
                cost_per_gb: link.cost_per_gb,
                cost,
                annual_cost: cost * DAYS_PER_YEAR,
                utilization: if possible > 0.0 { mbit / possible } else { 0.0 },
            }
        })
        .collect();
    let total = links.iter().map(|l| l.cost).sum::<f64>();
    CostReport {
        links,
        total,
        annual_total: total * DAYS_PER_YEAR,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReorderRow {
    pub t: f64,
    pub reorder_pairs: u32,
}

/// Per-tick count of consecutive quanta sent over different links, a proxy
/// for how much out-of-order delivery the policy risks.
pub fn reorder_indicator(result: &SimulationResult) -> Vec<ReorderRow> {
    result
        .records
        .iter()
        .map(|r| ReorderRow {
            t: r.t,
            reorder_pairs: r.link_switches,
        })
        .collect()
}

pub fn write_supply<W: Write>(out: &mut W, rows: &[SupplyRow]) -> io::Result<()> {
    writeln!(out, "time_s,demand_mbps,supplied_mbps")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.t, r.demand_mbps, r.supplied_mbps)?;
    }
    Ok(())
}

pub fn write_shortfall<W: Write>(out: &mut W, rows: &[ShortfallRow]) -> io::Result<()> {
    writeln!(out, "time_s,unmet_mbps")?;
    for r in rows {
        writeln!(out, "{},{}", r.t, r.unmet_mbps)?;
    }
    Ok(())
}

pub fn write_cost<W: Write>(out: &mut W, report: &CostReport) -> io::Result<()> {
    writeln!(
        out,
        "link_id,transmitted_gb,cost_per_gb,cost,annual_cost,utilization"
    )?;
    for l in &report.links {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            l.link_id, l.transmitted_gb, l.cost_per_gb, l.cost, l.annual_cost, l.utilization
        )?;
    }
    let gb: f64 = report.links.iter().map(|l| l.transmitted_gb).sum();
    writeln!(
        out,
        "total,{},,{},{},",
        gb, report.total, report.annual_total
    )
}

pub fn write_reorder<W: Write>(out: &mut W, rows: &[ReorderRow]) -> io::Result<()> {
    writeln!(out, "time_s,reorder_pairs")?;
    for r in rows {
        writeln!(out, "{},{}", r.t, r.reorder_pairs)?;
    }
    Ok(())
}

/// Merged supply table: `time_s,demand_mbps,supplied_<policy>...`.
///
/// All results must come from the same trace and tick.
pub fn write_comparison<W: Write>(
    out: &mut W,
    results: &[(PolicyId, SimulationResult)],
) -> io::Result<()> {
    write!(out, "time_s,demand_mbps")?;
    for (policy, _) in results {
        write!(out, ",supplied_{}", policy.short_name())?;
    }
    writeln!(out)?;
    let Some((_, first)) = results.first() else {
        return Ok(());
    };
    for (k, rec) in first.records.iter().enumerate() {
        write!(out, "{},{}", rec.t, rec.demand)?;
        for (_, res) in results {
            write!(out, ",{}", res.records[k].supplied_mbps)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportKind {
    Supply,
    Shortfall,
    Cost,
    Reorder,
    All,
}

impl FromStr for ReportKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "supply" => Ok(ReportKind::Supply),
            "shortfall" => Ok(ReportKind::Shortfall),
            "cost" => Ok(ReportKind::Cost),
            "reorder" => Ok(ReportKind::Reorder),
            "all" => Ok(ReportKind::All),
            other => Err(format!(
                "unknown report '{other}' (expected supply, shortfall, cost, reorder or all)"
            )),
        }
    }
}

/// Writes the selected report. `All` writes every report in turn, each
/// introduced by a `# <name>` comment line.
pub fn write_report<W: Write>(
    out: &mut W,
    kind: ReportKind,
    result: &SimulationResult,
) -> io::Result<()> {
    match kind {
        ReportKind::Supply => write_supply(out, &supply_series(result)),
        ReportKind::Shortfall => write_shortfall(out, &shortfall_series(result)),
        ReportKind::Cost => write_cost(out, &cost_report(result, &result.group)),
        ReportKind::Reorder => write_reorder(out, &reorder_indicator(result)),
        ReportKind::All => {
            let parts = [
                ("supply", ReportKind::Supply),
                ("shortfall", ReportKind::Shortfall),
                ("cost", ReportKind::Cost),
                ("reorder", ReportKind::Reorder),
            ];
            for (name, part) in parts {
                writeln!(out, "# {name}")?;
                write_report(out, part, result)?;
            }
            Ok(())
        }
    }
}
