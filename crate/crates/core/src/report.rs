//! Per-check verdicts shared by the verifiers.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Decided exactly.
    Pass,
    /// Held on every sample; not a proof.
    Sampled,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(
        &mut self,
        name: &str,
        index: Option<usize>,
        verdict: Verdict,
        detail: Option<String>,
    ) {
        self.checks.push(Check {
            name: name.to_string(),
            index,
            verdict,
            detail,
        });
    }

    pub fn pass(&mut self, name: &str, index: Option<usize>) {
        self.push(name, index, Verdict::Pass, None);
    }

    pub fn sampled(&mut self, name: &str, index: Option<usize>, samples: usize) {
        self.push(
            name,
            index,
            Verdict::Sampled,
            Some(format!("{samples} samples")),
        );
    }

    pub fn fail(&mut self, name: &str, index: Option<usize>, detail: impl Into<String>) {
        self.push(name, index, Verdict::Fail, Some(detail.into()));
    }

    /// Record `Pass` or `Fail(detail)` depending on `outcome`.
    pub fn record(&mut self, name: &str, index: Option<usize>, outcome: Result<(), String>) {
        match outcome {
            Ok(()) => self.pass(name, index),
            Err(detail) => self.fail(name, index, detail),
        }
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail)
    }

    /// Failing checks with the given name.
    pub fn failed_indices(&self, name: &str) -> Vec<Option<usize>> {
        self.failures()
            .filter(|c| c.name == name)
            .map(|c| c.index)
            .collect()
    }

    pub fn count(&self, name: &str) -> usize {
        self.checks.iter().filter(|c| c.name == name).count()
    }

    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&serde_json::to_string(c).expect("check serializes"));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = match c.verdict {
                Verdict::Pass => "pass",
                Verdict::Sampled => "pass (sampled)",
                Verdict::Fail => "FAIL",
            };
            write!(f, "{tag:>14}  {}", c.name)?;
            if let Some(i) = c.index {
                write!(f, "[{i}]")?;
            }
            if let Some(d) = &c.detail {
                write!(f, ": {d}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
