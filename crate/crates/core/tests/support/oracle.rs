//! Brute-force per-quantum reference simulator. Written against plain
//! numbers only; it shares no code with the library under test.

#[derive(Clone, Debug)]
pub struct OLink {
    pub id: String,
    pub capacity: f64,
    pub threshold: f64,
    pub cap: f64,
    pub cost: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OPolicy {
    Olb,
    Rr,
    Wfq,
    Vrrp,
}

/// Per tick: (assigned per link, transmitted per link). `links` must be in
/// ascending priority order; tick is one second.
pub fn simulate(
    links: &[OLink],
    policy: OPolicy,
    demands: &[f64],
    quantum: f64,
) -> Vec<(Vec<f64>, Vec<f64>)> {
    let n = links.len();
    let mut buf = vec![0.0f64; n];
    let mut cursor = 0usize;
    let mut deficit = vec![0.0f64; n];
    let raw: Vec<f64> = links.iter().map(|l| 1.0 / l.cost).collect();
    let raw_sum: f64 = raw.iter().sum();
    let weight: Vec<f64> = raw.iter().map(|r| r / raw_sum).collect();
    let weight_sum: f64 = weight.iter().sum();
    let mut master = 0;
    for j in 1..n {
        let better = links[j].capacity > links[master].capacity
            || (links[j].capacity == links[master].capacity && links[j].id < links[master].id);
        if better {
            master = j;
        }
    }
    let mut out = Vec::new();
    for &d in demands {
        let mut pieces = Vec::new();
        let mut left = d;
        let whole = (d / quantum).floor();
        for _ in 0..whole as u64 {
            pieces.push(quantum);
        }
        left -= whole * quantum;
        if left > 0.0 {
            pieces.push(left);
        }
        let mut assigned = vec![0.0f64; n];
        for q in pieces {
            let target = match policy {
                OPolicy::Olb => {
                    let mut z = n - 1;
                    for k in 0..n {
                        if buf[k] < links[k].threshold {
                            z = k;
                            break;
                        }
                    }
                    z
                }
                OPolicy::Rr => {
                    let z = cursor;
                    cursor = (cursor + 1) % n;
                    z
                }
                OPolicy::Wfq => {
                    for k in 0..n {
                        deficit[k] += weight[k] / weight_sum;
                    }
                    let mut best: Option<(f64, usize)> = None;
                    for k in 0..n {
                        if deficit[k] > 0.0 {
                            let due = (1.0 - deficit[k]) / (weight[k] / weight_sum);
                            if best.is_none_or(|(b, _)| due < b) {
                                best = Some((due, k));
                            }
                        }
                    }
                    let z = best.expect("some deficit is positive").1;
                    deficit[z] -= 1.0;
                    z
                }
                OPolicy::Vrrp => master,
            };
            if buf[target] + q <= links[target].cap {
                buf[target] += q;
                assigned[target] += q;
            }
        }
        let mut sent = vec![0.0f64; n];
        for k in 0..n {
            sent[k] = buf[k].min(links[k].capacity);
            buf[k] -= sent[k];
        }
        out.push((assigned, sent));
    }
    out
}
