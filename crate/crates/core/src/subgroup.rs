//! Symbolic subgroups of the automorphism group, given by membership
//! oracles, and the prefix checker for shift witnesses.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hfa::{act, atoms_support, in_sym, HfaValue};
use crate::ndset::{Containment, NdSet};
use crate::plmap::PlMap;
use crate::report::{Report, Verdict};
use crate::sample;

/// Samples drawn per level whenever a containment can only be sampled.
pub const SAMPLES_PER_LEVEL: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubgroupTerm {
    Full,
    /// Pointwise stabilizer of a set of atoms.
    Fix(NdSet),
    /// Setwise stabilizer `sym(x)` of a value.
    Stab(HfaValue),
    /// `by · inner · by⁻¹`.
    Conj {
        by: PlMap,
        inner: Box<SubgroupTerm>,
    },
    Inter(Vec<SubgroupTerm>),
}

impl SubgroupTerm {
    pub fn conj(by: PlMap, inner: SubgroupTerm) -> Self {
        SubgroupTerm::Conj {
            by,
            inner: Box::new(inner),
        }
    }

    pub fn member(&self, f: &PlMap) -> bool {
        match self {
            SubgroupTerm::Full => true,
            SubgroupTerm::Fix(e) => e.fixed_pointwise_by(f),
            SubgroupTerm::Stab(x) => in_sym(f, x),
            SubgroupTerm::Conj { by, inner } => inner.member(&by.conjugate_of(f)),
            SubgroupTerm::Inter(parts) => parts.iter().all(|h| h.member(f)),
        }
    }

    /// Pushes conjugations into the leaves
    /// (`π·Fix(E)·π⁻¹ = Fix(π``E)`, `π·sym(x)·π⁻¹ = sym(π(x))`) and flattens
    /// intersections. The result contains no `Conj`.
    pub fn normalize(&self) -> SubgroupTerm {
        self.conjugated_normal(&PlMap::identity())
    }

    fn conjugated_normal(&self, by: &PlMap) -> SubgroupTerm {
        match self {
            SubgroupTerm::Full => SubgroupTerm::Full,
            SubgroupTerm::Fix(e) => SubgroupTerm::Fix(e.image(by)),
            SubgroupTerm::Stab(x) => SubgroupTerm::Stab(act(by, x)),
            SubgroupTerm::Conj {
                by: inner_by,
                inner,
            } => inner.conjugated_normal(&by.compose(inner_by)),
            SubgroupTerm::Inter(parts) => {
                let mut flat = Vec::new();
                for p in parts {
                    match p.conjugated_normal(by) {
                        SubgroupTerm::Full => {}
                        SubgroupTerm::Inter(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                match flat.len() {
                    0 => SubgroupTerm::Full,
                    1 => flat.pop().expect("one element"),
                    _ => SubgroupTerm::Inter(flat),
                }
            }
        }
    }

    /// A support `E` with `Fix(E)` contained in this subgroup.
    pub fn generator(&self) -> NdSet {
        match self {
            SubgroupTerm::Full => NdSet::empty(),
            SubgroupTerm::Fix(e) => e.clone(),
            SubgroupTerm::Stab(x) => atoms_support(x),
            SubgroupTerm::Conj { by, inner } => inner.generator().image(by),
            SubgroupTerm::Inter(parts) => parts
                .iter()
                .fold(NdSet::empty(), |acc, p| acc.union(&p.generator())),
        }
    }
}

/// Decides `Fix(e) ⊆ Fix(e2)`, i.e. `e2 ⊆ closure(e)`.
pub fn fix_leq(e: &NdSet, e2: &NdSet) -> Containment {
    e2.subset_of_closure(e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FilterDescriptor {
    /// Basis: `Fix(E)` for nowhere-dense `E`.
    NowhereDenseSupports,
    /// Basis: `Fix(E)` for finite `E`.
    FiniteSupports,
}

impl FilterDescriptor {
    pub fn is_basis_support(&self, e: &NdSet) -> bool {
        match self {
            FilterDescriptor::NowhereDenseSupports => true,
            FilterDescriptor::FiniteSupports => e.is_finite(),
        }
    }

    /// Sound test for filter membership: the term contains a basis element.
    pub fn admits(&self, h: &SubgroupTerm) -> bool {
        self.is_basis_support(&h.generator())
    }

    /// Normality on the basis: `π·Fix(E)·π⁻¹ = Fix(π``E)`.
    pub fn conjugate_basis(&self, by: &PlMap, e: &NdSet) -> SubgroupTerm {
        SubgroupTerm::Fix(e.image(by))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftProblem {
    /// `H_0 ⊇ H_1 ⊇ … ⊇ H_N`.
    pub groups: Vec<SubgroupTerm>,
    /// `π_0 … π_{N-1}`.
    pub witness: Vec<PlMap>,
    /// Support whose `Fix` should lie in every `K_n`.
    pub candidate: NdSet,
}

/// `σ_n = π_{n-1} ∘ … ∘ π_0` for `n = 0..=pis.len()`.
pub fn partial_compositions(pis: &[PlMap]) -> Vec<PlMap> {
    let mut out = Vec::with_capacity(pis.len() + 1);
    out.push(PlMap::identity());
    for (n, pi) in pis.iter().enumerate() {
        let next = pi.compose(&out[n]);
        out.push(next);
    }
    out
}

/// `K_n = σ_n H_n σ_n⁻¹`, normalized.
pub fn shifted_groups(groups: &[SubgroupTerm], pis: &[PlMap]) -> Vec<SubgroupTerm> {
    let sigmas = partial_compositions(pis);
    groups
        .iter()
        .enumerate()
        .map(|(n, h)| match sigmas.get(n) {
            Some(s) => SubgroupTerm::conj(s.clone(), h.clone()).normalize(),
            None => h.normalize(),
        })
        .collect()
}

pub fn check_shift_witness(p: &ShiftProblem) -> Report {
    check_shift_witness_seeded(p, 0)
}

/// Checks `π_n ∈ K_n` for `n < N` and `Fix(candidate) ⊆ K_n` for `n ≤ N`.
/// Containments between `Fix` forms are decided; anything else is sampled
/// and reported as such.
pub fn check_shift_witness_seeded(p: &ShiftProblem, seed: u64) -> Report {
    let mut report = Report::new();
    let Some(n_max) = p.groups.len().checked_sub(1) else {
        return report;
    };
    if p.witness.len() < n_max {
        report.fail(
            "witness-length",
            None,
            format!("{} maps for {} groups", p.witness.len(), p.groups.len()),
        );
        return report;
    }
    let pis = &p.witness[..n_max];
    let ks = shifted_groups(&p.groups, pis);

    for n in 0..n_max {
        if let (SubgroupTerm::Fix(e), SubgroupTerm::Fix(e_next)) = (&p.groups[n], &p.groups[n + 1])
        {
            match fix_leq(e_next, e) {
                Containment::Yes => report.pass("decreasing", Some(n)),
                Containment::No(w) => report.fail(
                    "decreasing",
                    Some(n),
                    format!("{w} in E_{n} escapes closure(E_{})", n + 1),
                ),
                Containment::Unknown(why) => {
                    report.push("decreasing", Some(n), Verdict::Sampled, Some(why))
                }
            }
        }
    }

    for (n, pi) in pis.iter().enumerate() {
        if ks[n].member(pi) {
            report.pass("pi-in-K", Some(n));
        } else {
            report.fail("pi-in-K", Some(n), format!("pi_{n} is not in K_{n}"));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (n, k) in ks.iter().enumerate() {
        if let SubgroupTerm::Fix(e) = k {
            match fix_leq(&p.candidate, e) {
                Containment::Yes => {
                    report.pass("candidate-in-K", Some(n));
                    continue;
                }
                Containment::No(w) => {
                    report.fail(
                        "candidate-in-K",
                        Some(n),
                        format!("{w} in K_{n}'s support escapes closure(candidate)"),
                    );
                    continue;
                }
                Containment::Unknown(_) => {}
            }
        }
        let bad = (0..SAMPLES_PER_LEVEL)
            .map(|_| sample::fix_element(&mut rng, &p.candidate))
            .find(|f| !k.member(f));
        match bad {
            None => report.sampled("candidate-in-K", Some(n), SAMPLES_PER_LEVEL),
            Some(f) => report.fail(
                "candidate-in-K",
                Some(n),
                format!("{f:?} fixes the candidate but is not in K_{n}"),
            ),
        }
    }
    report
}
