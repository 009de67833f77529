use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const LINK_HEADER: &str = "id,capacity_mbps,priority,cost_per_gb,threshold_mbit,buffer_cap_mbit";

fn rla(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rla"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run rla")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

fn scenario(dir: &Path, name: &str) {
    let out = rla(dir, &["scenario", "--name", name, "--out-dir", "."]);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn simulate_scenario_one_peaks_at_96() {
    let dir = tempfile::tempdir().unwrap();
    scenario(dir.path(), "1");
    let out = rla(
        dir.path(),
        &[
            "simulate",
            "--links",
            "scenario1_links.csv",
            "--trace",
            "scenario1_trace.csv",
            "--policy",
            "olb",
            "--report",
            "supply",
            "--out",
            "-",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let supplied = column(&stdout(&out), "supplied_mbps");
    assert_eq!(supplied.len(), 86_400);
    assert_eq!(supplied.iter().cloned().fold(0.0, f64::max), 96.0);
}

#[test]
fn unknown_policy_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    scenario(dir.path(), "1");
    let out = rla(
        dir.path(),
        &[
            "simulate",
            "--links",
            "scenario1_links.csv",
            "--trace",
            "scenario1_trace.csv",
            "--policy",
            "bogus",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown policy"), "{}", stderr(&out));
}

#[test]
fn empty_link_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.csv"), format!("{LINK_HEADER}\n")).unwrap();
    fs::write(dir.path().join("t.csv"), "time_s,demand_mbps\n0,1\n").unwrap();
    let out = rla(
        dir.path(),
        &[
            "simulate",
            "--links",
            "empty.csv",
            "--trace",
            "t.csv",
            "--policy",
            "olb",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("no links"), "{}", stderr(&out));
}

#[test]
fn bad_trace_line_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    scenario(dir.path(), "2");
    fs::write(
        dir.path().join("bad.csv"),
        "time_s,demand_mbps\n0,10\n0,20\n",
    )
    .unwrap();
    let out = rla(
        dir.path(),
        &[
            "simulate",
            "--links",
            "scenario2_links.csv",
            "--trace",
            "bad.csv",
            "--policy",
            "rr",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("bad.csv") && err.contains("line 3"), "{err}");
}

#[test]
fn all_links_failed_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(p.join("links.csv"), format!("{LINK_HEADER}\na,10,1,1,,\n")).unwrap();
    fs::write(p.join("t.csv"), "time_s,demand_mbps\n0,5\n1,5\n").unwrap();
    fs::write(p.join("f.csv"), "time_s,link_id,event\n1,a,down\n").unwrap();
    let out = rla(
        p,
        &[
            "simulate",
            "--links",
            "links.csv",
            "--trace",
            "t.csv",
            "--policy",
            "vrrp",
            "--failures",
            "f.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("failed"));
}

#[test]
fn compare_scenario_one_columns() {
    let dir = tempfile::tempdir().unwrap();
    scenario(dir.path(), "1");
    let out = rla(
        dir.path(),
        &[
            "compare",
            "--links",
            "scenario1_links.csv",
            "--trace",
            "scenario1_trace.csv",
            "--policies",
            "olb,vrrp",
            "--out",
            "cmp.csv",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(dir.path().join("cmp.csv")).unwrap();
    assert!(text.starts_with("time_s,demand_mbps,supplied_olb,supplied_vrrp\n"));
    let demand = column(&text, "demand_mbps");
    let olb = column(&text, "supplied_olb");
    let vrrp = column(&text, "supplied_vrrp");
    for k in 0..demand.len() {
        assert_eq!(olb[k], demand[k].min(96.0));
        assert_eq!(vrrp[k], demand[k].min(64.0));
    }
}

#[test]
fn compare_scenario_two_vrrp_constant_16_under_load() {
    let dir = tempfile::tempdir().unwrap();
    scenario(dir.path(), "2");
    let out = rla(
        dir.path(),
        &[
            "compare",
            "--links",
            "scenario2_links.csv",
            "--trace",
            "scenario2_trace.csv",
            "--policies",
            "olb,vrrp",
            "--out",
            "-",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let demand = column(&text, "demand_mbps");
    let vrrp = column(&text, "supplied_vrrp");
    let olb = column(&text, "supplied_olb");
    for k in 0..demand.len() {
        if demand[k] >= 16.0 {
            assert_eq!(vrrp[k], 16.0);
        }
    }
    assert!(olb.iter().cloned().fold(0.0, f64::max) > 20.0);
}

#[test]
fn compare_single_policy() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("l.csv"),
        format!("{LINK_HEADER}\na,10,1,1,,\n"),
    )
    .unwrap();
    fs::write(dir.path().join("t.csv"), "time_s,demand_mbps\n0,5\n1,15\n").unwrap();
    let out = rla(
        dir.path(),
        &[
            "compare",
            "--links",
            "l.csv",
            "--trace",
            "t.csv",
            "--policies",
            "wfq",
            "--out",
            "-",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        stdout(&out),
        "time_s,demand_mbps,supplied_wfq\n0,5,5\n1,15,10\n"
    );
}

#[test]
fn scenario_files() {
    let dir = tempfile::tempdir().unwrap();
    scenario(dir.path(), "2");
    let links = fs::read_to_string(dir.path().join("scenario2_links.csv")).unwrap();
    assert!(links.starts_with(LINK_HEADER));
    assert!(
        links.contains("P4,4,1,") && links.contains("S16,16,2,") && links.contains("T16,16,3,")
    );
    let trace = fs::read_to_string(dir.path().join("scenario2_trace.csv")).unwrap();
    let demand = column(&trace, "demand_mbps");
    assert!(demand.iter().cloned().fold(0.0, f64::max) > 20.0);

    let out = rla(dir.path(), &["scenario", "--name", "3", "--out-dir", "."]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reports_and_stamp() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    fs::write(
        p.join("l.csv"),
        format!("{LINK_HEADER}\na,64,1,1,,\nb,32,2,2,,\n"),
    )
    .unwrap();
    fs::write(p.join("t.csv"), "time_s,demand_mbps\n0,80\n1,80\n").unwrap();
    let base = ["simulate", "--links", "l.csv", "--trace", "t.csv"];

    let out = rla(
        p,
        &[&base[..], &["--policy", "vrrp", "--report", "shortfall"]].concat(),
    );
    assert_eq!(stdout(&out), "time_s,unmet_mbps\n0,16\n1,16\n");

    let out = rla(
        p,
        &[&base[..], &["--policy", "rr", "--report", "reorder"]].concat(),
    );
    assert_eq!(stdout(&out), "time_s,reorder_pairs\n0,79\n1,79\n");

    let out = rla(
        p,
        &[&base[..], &["--policy", "olb", "--report", "cost"]].concat(),
    );
    let text = stdout(&out);
    assert!(text.starts_with("link_id,transmitted_gb,cost_per_gb,cost,annual_cost,utilization\n"));
    assert!(text.lines().last().unwrap().starts_with("total,"));

    let out = rla(
        p,
        &[
            &base[..],
            &["--policy", "olb", "--report", "all", "--stamp"],
        ]
        .concat(),
    );
    let text = stdout(&out);
    assert!(text.starts_with("# generated by rla"));
    assert!(text.contains("# reorder\n"));

    let out = rla(
        p,
        &[
            &base[..],
            &["--policy", "wfq", "--wfq-direction", "sideways"],
        ]
        .concat(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = rla(dir.path(), &["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("simulate"));
}
