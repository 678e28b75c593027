//! The evacuation recursion over an increasing stream of nowhere-dense sets.
//!
//! Step `n` works with `σ_n``E_n` (the stream's `n`-th set moved by the
//! automorphisms chosen so far). It picks a closure-free gap `J_n` inside
//! the `n`-th canonical interval, then chooses `π_n` fixing `σ_n``E_n`
//! pointwise and pushing `σ_n``E_{n+1}` off every recorded `[a_k, b_k]`.
//! Hence every recorded closed gap stays disjoint from the closure of every
//! later shifted set.
//!
//! [`verify_shift_trace`] re-derives everything from the recorded `π_n` and
//! the stream alone.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::enumerate::canonical_interval;
use crate::error::{Error, Result};
use crate::interval::{merge_closed, ClosedInterval, Interval};
use crate::ndset::NdSet;
use crate::plmap::{squeeze_map, PlMap};
use crate::rational::Rational;
use crate::report::Report;

/// Increments `D_0, D_1, …`; `E_n = D_0 ∪ … ∪ D_n`. Increments past the end
/// of the list are empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EStream {
    pub increments: Vec<NdSet>,
}

impl EStream {
    pub fn new(increments: Vec<NdSet>) -> Self {
        EStream { increments }
    }

    /// `E_n`.
    pub fn set_at(&self, n: usize) -> NdSet {
        self.increments
            .iter()
            .take(n + 1)
            .fold(NdSet::empty(), |acc, d| acc.union(d))
    }

    /// Hex SHA-256 of the canonical JSON text.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("stream serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftStep {
    pub n: usize,
    #[serde(rename = "I")]
    pub interval: Interval,
    #[serde(rename = "J")]
    pub gap: Interval,
    pub pi: PlMap,
    #[serde(rename = "sigmaNext")]
    pub sigma_next: PlMap,
    /// `σ_n``E_n`.
    pub shifted: NdSet,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftTrace {
    pub steps: Vec<ShiftStep>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    #[serde(rename = "streamHash")]
    pub stream_hash: String,
    #[serde(rename = "N")]
    pub n: usize,
}

/// On-disk form of a trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceFile {
    pub header: TraceHeader,
    pub steps: Vec<ShiftStep>,
}

impl TraceFile {
    pub fn new(stream: &EStream, trace: ShiftTrace) -> Self {
        TraceFile {
            header: TraceHeader {
                stream_hash: stream.hash(),
                n: trace.steps.len().saturating_sub(1),
            },
            steps: trace.steps,
        }
    }

    pub fn to_pretty_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trace serializes");
        s.push('\n');
        s
    }

    pub fn trace(&self) -> ShiftTrace {
        ShiftTrace {
            steps: self.steps.clone(),
        }
    }
}

/// An automorphism fixing `fixed` pointwise whose image of `moving` has
/// closure disjoint from every blocked interval.
///
/// Each blocked interval gets an open cover with rational endpoints whose
/// closure misses the closure of `fixed`; overlapping covers are merged.
/// Inside a cover that actually needs work, the blocked intervals are pulled
/// into gaps of `moving` by [`squeeze_map`], and the inverse of that pull is
/// the evacuating map: `π(moving) ∩ B = ∅` iff `moving ∩ g(B) = ∅`.
pub fn evacuate(fixed: &NdSet, moving: &NdSet, blocked: &[ClosedInterval]) -> Result<PlMap> {
    for b in blocked {
        if let Some(w) = fixed.closure_meets(b) {
            return Err(Error::BlockedMeetsFixed { witness: w });
        }
    }
    let blocked = merge_closed(blocked.to_vec());

    let mut groups: Vec<(Rational, Rational, Vec<ClosedInterval>)> = Vec::new();
    for b in blocked {
        let lo = match fixed.closure_max_leq(&b.lo) {
            Some(x) => Rational::midpoint(&x, &b.lo),
            None => &b.lo - &Rational::one(),
        };
        let hi = match fixed.closure_min_geq(&b.hi) {
            Some(x) => Rational::midpoint(&b.hi, &x),
            None => &b.hi + &Rational::one(),
        };
        match groups.last_mut() {
            Some((_, last_hi, members)) if lo < *last_hi => {
                if hi > *last_hi {
                    *last_hi = hi;
                }
                members.push(b);
            }
            _ => groups.push((lo, hi, vec![b])),
        }
    }

    let mut pi = PlMap::identity();
    for (lo, hi, members) in groups {
        if members.iter().all(|b| moving.closure_meets(b).is_none()) {
            continue;
        }
        let cover = Interval::open(lo.clone(), hi.clone());
        let m = members.len() as i64;
        let targets: Vec<(ClosedInterval, Interval)> = members
            .into_iter()
            .enumerate()
            .map(|(i, b)| {
                let i = i as i64;
                let slot = Interval::open(
                    Rational::lerp(&lo, &hi, i, m),
                    Rational::lerp(&lo, &hi, i + 1, m),
                );
                (b, moving.find_gap(&slot))
            })
            .collect();
        let pull = squeeze_map(&cover, &targets)?;
        pi = pull.invert().compose(&pi);
    }
    Ok(pi)
}

/// Runs steps `0..=n_max` of the recursion.
pub fn run_shift_construction(stream: &EStream, n_max: usize) -> Result<ShiftTrace> {
    let mut sigma = PlMap::identity();
    let mut blocked: Vec<ClosedInterval> = Vec::with_capacity(n_max + 1);
    let mut steps = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let shifted = stream.set_at(n).image(&sigma);
        let interval = canonical_interval(n as u64);
        let gap = shifted.find_gap(&interval);
        blocked.push(gap.closure().expect("gaps are bounded"));
        let next = stream.set_at(n + 1).image(&sigma);
        let pi = evacuate(&shifted, &next, &blocked)?;
        let sigma_next = pi.compose(&sigma);
        steps.push(ShiftStep {
            n,
            interval,
            gap,
            pi,
            sigma_next: sigma_next.clone(),
            shifted,
        });
        sigma = sigma_next;
    }
    Ok(ShiftTrace { steps })
}

/// Re-derives `σ_n` and `σ_n``E_n` from the recorded `π_n` and checks
/// condition (1) (`π_n` fixes `σ_n``E_n` pointwise) and the closed form of
/// condition (2) (no recorded `[a_k, b_k]` meets the closure of any
/// `σ_m``E_m`).
pub fn verify_shift_trace(trace: &ShiftTrace, stream: &EStream) -> Report {
    let mut report = Report::new();
    let steps = &trace.steps;

    let mut sigmas = Vec::with_capacity(steps.len() + 1);
    sigmas.push(PlMap::identity());
    for (n, step) in steps.iter().enumerate() {
        let next = step.pi.compose(&sigmas[n]);
        let outcome = if step.n != n {
            Err(format!("step recorded as {} at position {n}", step.n))
        } else if next != step.sigma_next {
            Err("recorded sigma differs from pi composed with previous sigma".into())
        } else {
            Ok(())
        };
        report.record("telescoping", Some(n), outcome);
        sigmas.push(next);
    }

    let shifted: Vec<NdSet> = (0..steps.len())
        .into_par_iter()
        .map(|n| stream.set_at(n).image(&sigmas[n]))
        .collect();

    for (n, step) in steps.iter().enumerate() {
        let outcome = if step.shifted == shifted[n] {
            Ok(())
        } else {
            Err(format!(
                "recorded {:?}, recomputed {:?}",
                step.shifted, shifted[n]
            ))
        };
        report.record("shifted-set", Some(n), outcome);

        let outcome = if step.interval != canonical_interval(n as u64) {
            Err(format!(
                "I_{n} is {} but the enumeration gives {}",
                step.interval,
                canonical_interval(n as u64)
            ))
        } else {
            match step.gap.closure() {
                Some(c) if step.interval.contains_closed(&c) => Ok(()),
                _ => Err(format!("[{:?}] is not inside {}", step.gap, step.interval)),
            }
        };
        report.record("gap-inside-interval", Some(n), outcome);
    }

    let condition1: Vec<Result<(), String>> = steps
        .par_iter()
        .enumerate()
        .map(|(n, step)| match shifted[n].moved_by(&step.pi) {
            None => Ok(()),
            Some(w) => Err(format!("pi_{n} moves {w} in sigma_{n}``E_{n}")),
        })
        .collect();
    for (n, outcome) in condition1.into_iter().enumerate() {
        report.record("condition-1", Some(n), outcome);
    }

    let gaps: Vec<Option<ClosedInterval>> = steps.iter().map(|s| s.gap.closure()).collect();
    let condition2: Vec<Result<(), String>> = shifted
        .par_iter()
        .enumerate()
        .map(|(m, set)| {
            for (k, gap) in gaps.iter().enumerate() {
                let Some(gap) = gap else {
                    return Err(format!("J_{k} is unbounded"));
                };
                if set.closure_contains(&gap.lo) || set.closure_contains(&gap.hi) {
                    return Err(format!(
                        "endpoint of J_{k} lies in the closure of sigma_{m}``E_{m}"
                    ));
                }
                if let Some(w) = set.closure_meets(gap) {
                    return Err(format!(
                        "{w} in closure of sigma_{m}``E_{m} lies in [a_{k}, b_{k}]"
                    ));
                }
            }
            Ok(())
        })
        .collect();
    for (m, outcome) in condition2.into_iter().enumerate() {
        report.record("condition-2", Some(m), outcome);
    }
    report
}

/// `E* = ⋃_{m ≤ N} σ_m``E_m`, the support whose pointwise stabilizer sits
/// inside every `K_n` of the prefix.
pub fn witness_subgroup(trace: &ShiftTrace) -> NdSet {
    trace
        .steps
        .iter()
        .fold(NdSet::empty(), |acc, s| acc.union(&s.shifted))
}
