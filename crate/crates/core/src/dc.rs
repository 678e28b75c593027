//! Finite-prefix runs of the two directions linking shift completeness to
//! dependent choice, on trees of atom sequences ordered by end-extension.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hfa::{act, atoms_support, in_sym, HfaValue};
use crate::ndset::NdSet;
use crate::plmap::PlMap;
use crate::rational::Rational;
use crate::report::Report;
use crate::sample;
use crate::shift::EStream;
use crate::subgroup::{partial_compositions, SubgroupTerm, SAMPLES_PER_LEVEL};

/// The orbit tree `{ π(⟨x_i : i < n⟩) : π ∈ Fix(baseSupport), n ∈ ω }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TreeInstance {
    pub base_sequence: Vec<HfaValue>,
    pub base_support: NdSet,
}

impl TreeInstance {
    pub fn new(base_sequence: Vec<HfaValue>, base_support: NdSet) -> Self {
        TreeInstance {
            base_sequence,
            base_support,
        }
    }

    /// `⟨x_i : i < n⟩`.
    pub fn node(&self, n: usize) -> HfaValue {
        HfaValue::seq(self.base_sequence[..n].iter().cloned())
    }

    fn base_atoms(&self, n: usize) -> Result<Vec<Rational>> {
        if n > self.base_sequence.len() {
            return Err(Error::OutOfScope(format!(
                "node of length {n} exceeds the {} recorded base items",
                self.base_sequence.len()
            )));
        }
        self.base_sequence[..n]
            .iter()
            .map(|x| {
                x.as_atom()
                    .cloned()
                    .ok_or_else(|| Error::OutOfScope("base sequence must consist of atoms".into()))
            })
            .collect()
    }
}

/// Certificate for a branch through the orbit tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchCertificate {
    pub x: Vec<HfaValue>,
    pub t: Vec<HfaValue>,
    pub tau: Vec<PlMap>,
    #[serde(rename = "H")]
    pub groups: Vec<SubgroupTerm>,
}

impl BranchCertificate {
    /// The tree the certificate's branch lives in: base sequence `x`, base
    /// support the generator of `H_0`.
    pub fn instance(&self) -> Result<TreeInstance> {
        let h0 = self
            .groups
            .first()
            .ok_or_else(|| Error::OutOfScope("certificate must declare H_0".into()))?;
        Ok(TreeInstance::new(self.x.clone(), h0.generator()))
    }
}

fn atoms_of(candidate: &HfaValue) -> Result<Vec<Rational>> {
    let items = candidate
        .as_seq()
        .ok_or_else(|| Error::OutOfScope("candidate must be a sequence".into()))?;
    items
        .iter()
        .map(|x| {
            x.as_atom()
                .cloned()
                .ok_or_else(|| Error::OutOfScope("candidate must consist of atoms".into()))
        })
        .collect()
}

/// Same strict order pattern, identical on closure points of the support,
/// and every other coordinate in the same gap of the closure as its base
/// counterpart.
fn same_orbit(support: &NdSet, base: &[Rational], cand: &[Rational]) -> bool {
    if base.len() != cand.len() {
        return false;
    }
    for i in 0..base.len() {
        for j in i + 1..base.len() {
            if base[i].cmp(&base[j]) != cand[i].cmp(&cand[j]) {
                return false;
            }
        }
    }
    base.iter().zip(cand).all(|(b, c)| {
        if support.closure_contains(b) {
            return b == c;
        }
        let (lo, hi) = if b <= c { (b, c) } else { (c, b) };
        support
            .closure_meets(&crate::interval::ClosedInterval::new(
                lo.clone(),
                hi.clone(),
            ))
            .is_none()
    })
}

/// Decides `candidate ∈ T`.
pub fn orbit_member(inst: &TreeInstance, candidate: &HfaValue) -> Result<bool> {
    let cand = atoms_of(candidate)?;
    let base = inst.base_atoms(cand.len())?;
    Ok(same_orbit(&inst.base_support, &base, &cand))
}

/// An element of `Fix(support)` sending `from` to `to` coordinatewise, if
/// one exists.
pub fn orbit_witness(support: &NdSet, from: &[Rational], to: &[Rational]) -> Option<PlMap> {
    if !same_orbit(support, from, to) {
        return None;
    }
    let mut points: Vec<(Rational, Rational)> = Vec::new();
    for (b, c) in from.iter().zip(to) {
        points.push((b.clone(), c.clone()));
        if b != c {
            if let Some(lo) = support.closure_max_leq(b) {
                points.push((lo.clone(), lo));
            }
            if let Some(hi) = support.closure_min_geq(b) {
                points.push((hi.clone(), hi));
            }
        }
    }
    points.sort();
    points.dedup();
    if points.is_empty() {
        return Some(PlMap::identity());
    }
    PlMap::through_points(points).ok()
}

/// `D_0 = baseSupport`, `D_{n+1} = supp(s_n)`, so that
/// `E_n = baseSupport ∪ supp⟨s_i : i ≤ n−1⟩`.
pub fn induced_stream(inst: &TreeInstance, s: &[HfaValue]) -> EStream {
    let mut increments = vec![inst.base_support.clone()];
    increments.extend(s.iter().map(atoms_support));
    EStream::new(increments)
}

/// Direction (1)⇒(2): pushes the chain `s` along the shift witness,
/// `t_n = σ_{n+1}(s_n)` with `σ_{n+1} = π_n ∘ … ∘ π_0`, and checks that the
/// result is again a chain in the tree.
pub fn branch_from_shifts(
    inst: &TreeInstance,
    s: &[HfaValue],
    pis: &[PlMap],
) -> (Vec<HfaValue>, Report) {
    let mut report = Report::new();
    let sigmas = partial_compositions(pis);
    let len = s.len().min(pis.len());
    let t: Vec<HfaValue> = (0..len).map(|n| act(&sigmas[n + 1], &s[n])).collect();

    for n in 0..len.saturating_sub(1) {
        if !s[n].is_proper_prefix_of(&s[n + 1]) {
            report.fail(
                "input-chain",
                Some(n),
                format!("{:?} does not extend to {:?}", s[n], s[n + 1]),
            );
        }
    }

    let stream = induced_stream(inst, s);
    for (n, pi) in pis.iter().enumerate().take(len) {
        let k = SubgroupTerm::conj(sigmas[n].clone(), SubgroupTerm::Fix(stream.set_at(n)));
        if k.member(pi) {
            report.pass("witness", Some(n));
        } else {
            report.fail("witness", Some(n), format!("pi_{n} is not in K_{n}"));
        }
    }

    for n in 0..len.saturating_sub(1) {
        if t[n].is_proper_prefix_of(&t[n + 1]) {
            report.pass("chain", Some(n));
        } else {
            report.fail(
                "chain",
                Some(n),
                format!("{:?} does not extend to {:?}", t[n], t[n + 1]),
            );
        }
    }

    for (n, (tn, next)) in t.iter().zip(pis.iter().skip(1)).enumerate() {
        if in_sym(next, tn) {
            report.pass("fixed-point", Some(n));
        } else {
            report.fail("fixed-point", Some(n), format!("pi_{} moves {tn:?}", n + 1));
        }
    }

    for (n, tn) in t.iter().enumerate() {
        match orbit_member(inst, tn) {
            Ok(true) => report.pass("orbit-member", Some(n)),
            Ok(false) => report.fail(
                "orbit-member",
                Some(n),
                format!("{tn:?} is not in the tree"),
            ),
            Err(e) => report.fail("orbit-member", Some(n), e.to_string()),
        }
    }
    (t, report)
}

/// Output of [`shifts_from_branch`].
#[derive(Clone, Debug)]
pub struct DerivedShifts {
    pub pis: Vec<PlMap>,
    pub ks: Vec<SubgroupTerm>,
    pub report: Report,
}

/// Direction (2)⇒(1): from a branch `t` with `τ_n(⟨x_i : i ≤ n⟩) =
/// ⟨t_i : i ≤ n⟩`, derives `π_n = τ_n ∘ τ_{n−1}⁻¹` and checks both claims.
/// `hs[0]` is the orbit group and `hs[n+1]` stabilizes `⟨x_i : i ≤ n⟩`.
pub fn shifts_from_branch(
    inst: &TreeInstance,
    cert: &BranchCertificate,
    hs: &[SubgroupTerm],
    seed: u64,
) -> Result<DerivedShifts> {
    let Some(h0) = hs.first() else {
        return Err(Error::OutOfScope("H_0 must be supplied".into()));
    };
    for (n, tau) in cert.tau.iter().enumerate() {
        if n >= cert.t.len() || n >= inst.base_sequence.len() {
            return Err(Error::TauInconsistent {
                index: n,
                detail: "no recorded t_n or x_n".into(),
            });
        }
        let image = act(tau, &inst.node(n + 1));
        let expected = HfaValue::seq(cert.t[..=n].iter().cloned());
        if image != expected {
            return Err(Error::TauInconsistent {
                index: n,
                detail: format!(
                    "tau_{n} sends the base prefix to {image:?}, expected {expected:?}"
                ),
            });
        }
    }

    let mut report = Report::new();
    let pis: Vec<PlMap> = cert
        .tau
        .iter()
        .enumerate()
        .map(|(n, tau)| match n {
            0 => tau.clone(),
            _ => tau.compose(&cert.tau[n - 1].invert()),
        })
        .collect();

    let sigmas = partial_compositions(&pis);
    for (n, tau) in cert.tau.iter().enumerate() {
        if &sigmas[n + 1] == tau {
            report.pass("telescoping", Some(n));
        } else {
            report.fail(
                "telescoping",
                Some(n),
                format!("pi_{n} o ... o pi_0 differs from tau_{n}"),
            );
        }
    }

    let ks: Vec<SubgroupTerm> = hs
        .iter()
        .enumerate()
        .map(|(n, h)| match n {
            0 => h.normalize(),
            _ => match cert.tau.get(n - 1) {
                Some(tau) => SubgroupTerm::conj(tau.clone(), h.clone()).normalize(),
                None => h.normalize(),
            },
        })
        .collect();

    for (n, pi) in pis.iter().enumerate().take(ks.len()) {
        if ks[n].member(pi) {
            report.pass("claim-1", Some(n));
        } else {
            report.fail("claim-1", Some(n), format!("pi_{n} is not in K_{n}"));
        }
    }

    let k = SubgroupTerm::Inter(vec![
        SubgroupTerm::Stab(HfaValue::seq(cert.t.iter().cloned())),
        h0.clone(),
    ]);
    let generator = k.generator();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<PlMap> = (0..SAMPLES_PER_LEVEL)
        .map(|_| sample::fix_element(&mut rng, &generator))
        .collect();
    let escaped = samples.iter().find(|f| !k.member(f));
    for (n, kn) in ks.iter().enumerate() {
        let failure = match escaped {
            Some(f) => Some(format!("generated {f:?} escapes K")),
            None => samples
                .iter()
                .find(|f| !kn.member(f))
                .map(|f| format!("{f:?} is in K but not in K_{n}")),
        };
        match failure {
            None => report.sampled("claim-2", Some(n), SAMPLES_PER_LEVEL),
            Some(detail) => report.fail("claim-2", Some(n), detail),
        }
    }

    Ok(DerivedShifts { pis, ks, report })
}

/// Stabilizer groups `Fix(atoms_support(x_n))` generating the essential
/// subfilter along `xs`.
pub fn stabilizer_groups(xs: &[HfaValue]) -> Vec<SubgroupTerm> {
    xs.iter()
        .map(|x| SubgroupTerm::Fix(atoms_support(x)))
        .collect()
}

/// `y_n = σ_n(x_n)`; checks `sym(y_n) = σ_n sym(x_n) σ_n⁻¹` and
/// `sym⟨y_n⟩ = ⋂ K_n` on sampled maps.
pub fn essential_shift(xs: &[HfaValue], pis: &[PlMap], seed: u64) -> (Vec<HfaValue>, Report) {
    let mut report = Report::new();
    if pis.len() + 1 < xs.len() {
        report.fail(
            "witness-length",
            None,
            format!("{} maps for {} values", pis.len(), xs.len()),
        );
        return (Vec::new(), report);
    }
    let sigmas = partial_compositions(pis);
    let ys: Vec<HfaValue> = xs
        .iter()
        .enumerate()
        .map(|(n, x)| act(&sigmas[n], x))
        .collect();

    let groups = stabilizer_groups(xs);
    for (n, pi) in pis.iter().enumerate().take(xs.len()) {
        let k = SubgroupTerm::conj(sigmas[n].clone(), groups[n].clone());
        if k.member(pi) {
            report.pass("witness", Some(n));
        } else {
            report.fail("witness", Some(n), format!("pi_{n} is not in K_{n}"));
        }
    }

    let ks: Vec<SubgroupTerm> = xs
        .iter()
        .enumerate()
        .map(|(n, x)| SubgroupTerm::conj(sigmas[n].clone(), SubgroupTerm::Stab(x.clone())))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for (n, y) in ys.iter().enumerate() {
        let supp = atoms_support(y);
        let disagreement = (0..SAMPLES_PER_LEVEL).find_map(|i| {
            let f = if i % 2 == 0 {
                sample::fix_element(&mut rng, &supp)
            } else {
                sample::plmap(&mut rng, 4)
            };
            (ks[n].member(&f) != in_sym(&f, y)).then_some(f)
        });
        match disagreement {
            None => report.sampled("conjugation", Some(n), SAMPLES_PER_LEVEL),
            Some(f) => report.fail("conjugation", Some(n), format!("routes disagree on {f:?}")),
        }
    }

    let seq = HfaValue::seq(ys.iter().cloned());
    let seq_supp = atoms_support(&seq);
    let disagreement = (0..SAMPLES_PER_LEVEL).find_map(|i| {
        let f = match i % 3 {
            0 => sample::fix_element(&mut rng, &seq_supp),
            1 if !ys.is_empty() => {
                // fixes all but possibly the atoms of one y_j
                let skip = i % ys.len();
                let partial = ys
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != skip)
                    .fold(NdSet::empty(), |acc, (_, y)| acc.union(&atoms_support(y)));
                sample::fix_element(&mut rng, &partial)
            }
            _ => sample::plmap(&mut rng, 4),
        };
        let all = ks.iter().all(|k| k.member(&f));
        (all != in_sym(&f, &seq)).then_some(f)
    });
    match disagreement {
        None => report.sampled("sequence-stabilizer", None, SAMPLES_PER_LEVEL),
        Some(f) => report.fail(
            "sequence-stabilizer",
            None,
            format!("routes disagree on {f:?}"),
        ),
    }

    (ys, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::shift::run_shift_construction;

    fn atom(n: i64) -> HfaValue {
        HfaValue::atom(q(n, 1))
    }

    fn counting_instance(len: i64) -> TreeInstance {
        TreeInstance::new((1..=len).map(atom).collect(), NdSet::singleton(q(0, 1)))
    }

    fn prefix(n: i64) -> HfaValue {
        HfaValue::seq((1..=n).map(atom))
    }

    #[test]
    fn orbit_member_examples() {
        let inst = counting_instance(5);
        assert!(orbit_member(&inst, &inst.node(3)).unwrap());
        let permuted = HfaValue::atom_seq([q(2, 1), q(1, 1), q(3, 1)]);
        assert!(!orbit_member(&inst, &permuted).unwrap());
        let squeezed = HfaValue::atom_seq([q(1, 4), q(1, 2), q(100, 1)]);
        assert!(orbit_member(&inst, &squeezed).unwrap());
        // no increasing map fixing 0 can send 1 to -1
        let crossed = HfaValue::atom_seq([q(-1, 1), q(2, 1)]);
        assert!(!orbit_member(&inst, &crossed).unwrap());
        assert!(orbit_witness(
            &inst.base_support,
            &[q(1, 1), q(2, 1)],
            &[q(-1, 1), q(2, 1)]
        )
        .is_none());
    }

    #[test]
    fn orbit_member_scope() {
        let inst = counting_instance(2);
        assert!(orbit_member(&inst, &prefix(3)).is_err());
        assert!(orbit_member(&inst, &atom(1)).is_err());
        let set_instance = TreeInstance::new(vec![HfaValue::set([])], NdSet::empty());
        assert!(orbit_member(&set_instance, &HfaValue::atom_seq([q(1, 1)])).is_err());
    }

    #[test]
    fn orbit_witness_realizes_members() {
        let support = NdSet::from_points([q(0, 1), q(5, 1)]);
        let from = [q(1, 1), q(2, 1), q(5, 1), q(7, 1), q(-3, 1)];
        let to = [q(3, 1), q(4, 1), q(5, 1), q(6, 1), q(-1, 2)];
        let f = orbit_witness(&support, &from, &to).unwrap();
        assert!(support.fixed_pointwise_by(&f));
        for (a, b) in from.iter().zip(&to) {
            assert_eq!(&f.apply(a), b);
        }
    }

    #[test]
    fn identity_shifts_give_back_the_chain() {
        let inst = counting_instance(6);
        let s: Vec<HfaValue> = (0..5).map(prefix).collect();
        let (t, report) = branch_from_shifts(&inst, &s, &vec![PlMap::identity(); 5]);
        assert_eq!(t, s);
        assert!(report.all_passed(), "{report}");
    }

    #[test]
    fn constructed_shifts_pass_and_corruption_is_caught() {
        let inst = counting_instance(8);
        let s: Vec<HfaValue> = (0..=6).map(prefix).collect();
        let trace = run_shift_construction(&induced_stream(&inst, &s), 6).unwrap();
        let pis: Vec<PlMap> = trace.steps.iter().map(|st| st.pi.clone()).collect();
        let (_, report) = branch_from_shifts(&inst, &s, &pis);
        assert!(report.all_passed(), "{report}");

        let mut bad = pis.clone();
        bad[2] = PlMap::translation(q(1, 3)).compose(&bad[2]);
        let (_, report) = branch_from_shifts(&inst, &s, &bad);
        let failed = report.failed_indices("fixed-point");
        assert!(
            failed.contains(&Some(1)) || failed.contains(&Some(2)),
            "{report}"
        );
    }

    fn translation_certificate(c: Rational, len: usize) -> BranchCertificate {
        let xs: Vec<Rational> = (0..len as i64).map(|i| q(i, 1)).collect();
        let tau = PlMap::translation(c.clone());
        let mut groups = vec![SubgroupTerm::Full];
        for n in 0..len {
            groups.push(SubgroupTerm::Fix(NdSet::from_points(
                xs[..=n].iter().cloned(),
            )));
        }
        BranchCertificate {
            x: xs.iter().cloned().map(HfaValue::atom).collect(),
            t: xs.iter().map(|x| HfaValue::atom(x + &c)).collect(),
            tau: vec![tau; len],
            groups,
        }
    }

    #[test]
    fn translation_certificate_passes() {
        let cert = translation_certificate(q(5, 2), 6);
        let inst = cert.instance().unwrap();
        let out = shifts_from_branch(&inst, &cert, &cert.groups, 1).unwrap();
        assert!(out.report.all_passed(), "{}", out.report);
        assert_eq!(out.pis[0], PlMap::translation(q(5, 2)));
        assert!(out.pis[1..].iter().all(PlMap::is_identity));
    }

    #[test]
    fn identity_certificate_passes() {
        let mut cert = translation_certificate(q(0, 1), 4);
        cert.tau = vec![PlMap::identity(); 4];
        let inst = cert.instance().unwrap();
        let out = shifts_from_branch(&inst, &cert, &cert.groups, 1).unwrap();
        assert!(out.pis.iter().all(PlMap::is_identity));
        assert!(out.report.all_passed());
    }

    #[test]
    fn mutated_branch_is_tau_inconsistent() {
        let mut cert = translation_certificate(q(1, 1), 6);
        cert.t[3] = HfaValue::atom(q(100, 1));
        let inst = cert.instance().unwrap();
        match shifts_from_branch(&inst, &cert, &cert.groups, 1) {
            Err(Error::TauInconsistent { index, .. }) => assert_eq!(index, 3),
            other => panic!("expected inconsistency, got {other:?}"),
        }
    }

    #[test]
    fn missing_h0_is_rejected() {
        let cert = translation_certificate(q(1, 1), 2);
        let inst = cert.instance().unwrap();
        assert!(shifts_from_branch(&inst, &cert, &[], 0).is_err());
    }

    #[test]
    fn essential_shift_examples() {
        let xs: Vec<HfaValue> = (0..3).map(atom).collect();
        let (ys, report) = essential_shift(&xs, &vec![PlMap::identity(); 3], 4);
        assert_eq!(ys, xs);
        assert!(report.all_passed(), "{report}");

        let (ys, _) = essential_shift(&xs[..1], &[], 4);
        assert_eq!(ys, xs[..1]);

        let stream = EStream::new(xs.iter().map(atoms_support).collect());
        let trace = run_shift_construction(&stream, 2).unwrap();
        let pis: Vec<PlMap> = trace.steps.iter().map(|st| st.pi.clone()).collect();
        let (_, report) = essential_shift(&xs, &pis, 4);
        assert!(report.all_passed(), "{report}");
    }

    #[test]
    fn certificate_json_uses_capital_h() {
        let cert = translation_certificate(q(1, 1), 1);
        let text = serde_json::to_string(&cert).unwrap();
        assert!(text.contains(r#""H":["full","#));
        let back: BranchCertificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cert);
    }
}
