//! Hereditarily finite sets and sequences over rational atoms.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ndset::NdSet;
use crate::plmap::PlMap;
use crate::rational::Rational;

/// Sets are `BTreeSet`s, so duplicates collapse and the element order is the
/// derived structural order (atoms by value, then sets, then sequences, each
/// lexicographically). Equality is therefore extensional.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HfaValue {
    Atom(Rational),
    Set(BTreeSet<HfaValue>),
    Seq(Vec<HfaValue>),
}

impl HfaValue {
    pub fn atom(q: Rational) -> Self {
        HfaValue::Atom(q)
    }

    pub fn set(items: impl IntoIterator<Item = HfaValue>) -> Self {
        HfaValue::Set(items.into_iter().collect())
    }

    pub fn seq(items: impl IntoIterator<Item = HfaValue>) -> Self {
        HfaValue::Seq(items.into_iter().collect())
    }

    pub fn atom_seq(atoms: impl IntoIterator<Item = Rational>) -> Self {
        HfaValue::seq(atoms.into_iter().map(HfaValue::Atom))
    }

    /// `⟨x, y⟩`.
    pub fn pair(x: HfaValue, y: HfaValue) -> Self {
        HfaValue::Seq(vec![x, y])
    }

    pub fn as_seq(&self) -> Option<&[HfaValue]> {
        match self {
            HfaValue::Seq(items) => Some(items),
            _ => None,
        }
    }

    pub fn as_atom(&self) -> Option<&Rational> {
        match self {
            HfaValue::Atom(q) => Some(q),
            _ => None,
        }
    }

    /// Proper end-extension of sequences: `self` is a strict prefix of
    /// `other`.
    pub fn is_proper_prefix_of(&self, other: &HfaValue) -> bool {
        match (self.as_seq(), other.as_seq()) {
            (Some(a), Some(b)) => a.len() < b.len() && b.starts_with(a),
            _ => false,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            HfaValue::Atom(_) => 0,
            HfaValue::Set(items) => items.iter().map(|x| x.rank() + 1).max().unwrap_or(1),
            HfaValue::Seq(items) => items.iter().map(|x| x.rank() + 1).max().unwrap_or(1),
        }
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Rational>) {
        match self {
            HfaValue::Atom(q) => {
                out.insert(q.clone());
            }
            HfaValue::Set(items) => items.iter().for_each(|x| x.collect_atoms(out)),
            HfaValue::Seq(items) => items.iter().for_each(|x| x.collect_atoms(out)),
        }
    }
}

/// `π(x) = { π(y) : y ∈ x }`, atoms by `apply`, sequences itemwise.
pub fn act(f: &PlMap, x: &HfaValue) -> HfaValue {
    match x {
        HfaValue::Atom(q) => HfaValue::Atom(f.apply(q)),
        HfaValue::Set(items) => HfaValue::Set(items.iter().map(|y| act(f, y)).collect()),
        HfaValue::Seq(items) => HfaValue::Seq(items.iter().map(|y| act(f, y)).collect()),
    }
}

/// Atoms occurring anywhere in the transitive closure of `x`.
pub fn atoms_support(x: &HfaValue) -> NdSet {
    let mut atoms = BTreeSet::new();
    x.collect_atoms(&mut atoms);
    NdSet::from_points(atoms)
}

/// Membership oracle for `sym(x) = { π : π(x) = x }`.
pub fn in_sym(f: &PlMap, x: &HfaValue) -> bool {
    act(f, x) == *x
}

impl fmt::Debug for HfaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HfaValue::Atom(q) => write!(f, "{q}"),
            HfaValue::Set(items) => f.debug_set().entries(items).finish(),
            HfaValue::Seq(items) => {
                write!(f, "⟨")?;
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x:?}")?;
                }
                write!(f, "⟩")
            }
        }
    }
}
