//! Finite groups as dense multiplication tables.
//!
//! Every group is stored as an `order × order` table of element indices with
//! the identity pinned at index 0. Groups are immutable once built and can be
//! shared freely between threads.

mod builtin;
mod perm;
mod spec;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use builtin::Builtin;
pub use perm::Permutation;
pub use spec::GroupSpec;

/// An element of a [`FiniteGroup`], addressed by its index in the table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(u32);

impl Elem {
    /// The identity element of every group.
    pub const E: Elem = Elem(0);

    pub fn new(index: usize) -> Self {
        Elem(u32::try_from(index).expect("element index exceeds u32"))
    }

    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The group axiom a candidate table violates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomViolation {
    NotClosed { row: usize, col: usize, value: usize },
    NoIdentity,
    MissingInverse { element: usize },
    NonAssociative { a: usize, b: usize, c: usize },
}

impl AxiomViolation {
    pub fn reason(&self) -> &'static str {
        match self {
            AxiomViolation::NotClosed { .. } => "not-closed",
            AxiomViolation::NoIdentity => "no-identity",
            AxiomViolation::MissingInverse { .. } => "missing-inverse",
            AxiomViolation::NonAssociative { .. } => "non-associative",
        }
    }
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::NotClosed { row, col, value } => {
                write!(f, "not-closed: entry ({row},{col}) = {value} is out of range")
            }
            AxiomViolation::NoIdentity => write!(f, "no-identity"),
            AxiomViolation::MissingInverse { element } => {
                write!(f, "missing-inverse: element {element} has no two-sided inverse")
            }
            AxiomViolation::NonAssociative { a, b, c } => {
                write!(f, "non-associative: ({a}*{b})*{c} != {a}*({b}*{c})")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("not a group: {0}")]
    NotAGroup(AxiomViolation),
    #[error("malformed table: {0}")]
    MalformedTable(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("group order exceeds the cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("unknown group family `{0}`")]
    UnknownFamily(String),
    #[error("parameter {parameter} out of range for family `{family}`")]
    ParameterOutOfRange { family: String, parameter: i64 },
    #[error("group spec line {line}: {message}")]
    SpecSyntax { line: usize, message: String },
}

/// Resource limits applied while constructing and validating groups.
#[derive(Clone, Copy, Debug)]
pub struct GroupLimits {
    /// Largest order any constructor will produce.
    pub order_cap: usize,
    /// Orders up to this bound get the full O(n³) associativity scan.
    pub exhaustive_assoc_cap: usize,
    /// Random triples checked above `exhaustive_assoc_cap`.
    pub assoc_spot_checks: usize,
}

impl Default for GroupLimits {
    fn default() -> Self {
        GroupLimits { order_cap: 2000, exhaustive_assoc_cap: 256, assoc_spot_checks: 1_000_000 }
    }
}

/// A finite group given by its multiplication table.
#[derive(Clone)]
pub struct FiniteGroup {
    order: usize,
    mul: Vec<u32>,
    inv: Vec<u32>,
    labels: Option<Vec<String>>,
    perm_images: Option<Vec<Permutation>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup").field("order", &self.order).finish_non_exhaustive()
    }
}

/// Two groups are equal when their tables are identical; labels and
/// permutation images are presentation only.
impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.mul == other.mul && self.inv == other.inv
    }
}

impl Eq for FiniteGroup {}

impl FiniteGroup {
    /// Validates `table` as a group with the default limits.
    pub fn from_table(table: &[Vec<usize>]) -> Result<Self, GroupError> {
        Self::from_table_with(table, &GroupLimits::default())
    }

    /// Validates `table` as a group. The identity is relabelled to index 0 by
    /// swapping it with whatever element sat there.
    pub fn from_table_with(table: &[Vec<usize>], limits: &GroupLimits) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::MalformedTable("table is empty".into()));
        }
        if n > limits.order_cap {
            return Err(GroupError::CapExceeded { cap: limits.order_cap });
        }
        for (r, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::MalformedTable(format!(
                    "row {r} has {} entries, expected {n}",
                    row.len()
                )));
            }
        }
        for (r, row) in table.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(GroupError::NotAGroup(AxiomViolation::NotClosed { row: r, col: c, value: v }));
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or(GroupError::NotAGroup(AxiomViolation::NoIdentity))?;

        let relabel = |i: usize| -> usize {
            if i == identity {
                0
            } else if i == 0 {
                identity
            } else {
                i
            }
        };
        let mut mul = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                mul[relabel(a) * n + relabel(b)] = relabel(table[a][b]) as u32;
            }
        }
        Self::from_raw(n, mul, limits)
    }

    /// Validates a flat, identity-at-zero table. Closure and identity are
    /// checked again here so every constructor goes through one gate.
    pub(crate) fn from_raw(n: usize, mul: Vec<u32>, limits: &GroupLimits) -> Result<Self, GroupError> {
        debug_assert_eq!(mul.len(), n * n);
        if let Some(pos) = mul.iter().position(|&v| v as usize >= n) {
            return Err(GroupError::NotAGroup(AxiomViolation::NotClosed {
                row: pos / n,
                col: pos % n,
                value: mul[pos] as usize,
            }));
        }
        if (0..n).any(|g| mul[g] as usize != g || mul[g * n] as usize != g) {
            return Err(GroupError::NotAGroup(AxiomViolation::NoIdentity));
        }
        let mut inv = vec![0u32; n];
        for g in 0..n {
            let h = (0..n)
                .find(|&h| mul[g * n + h] == 0 && mul[h * n + g] == 0)
                .ok_or(GroupError::NotAGroup(AxiomViolation::MissingInverse { element: g }))?;
            inv[g] = h as u32;
        }
        let group = FiniteGroup { order: n, mul, inv, labels: None, perm_images: None };
        group.check_associativity(limits)?;
        Ok(group)
    }

    fn check_associativity(&self, limits: &GroupLimits) -> Result<(), GroupError> {
        let n = self.order;
        let m = |a: usize, b: usize| self.mul[a * n + b] as usize;
        let fail = |a, b, c| GroupError::NotAGroup(AxiomViolation::NonAssociative { a, b, c });
        if n <= limits.exhaustive_assoc_cap {
            for a in 0..n {
                for b in 0..n {
                    let ab = m(a, b);
                    for c in 0..n {
                        if m(ab, c) != m(a, m(b, c)) {
                            return Err(fail(a, b, c));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x6a09e667);
            for _ in 0..limits.assoc_spot_checks {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if m(m(a, b), c) != m(a, m(b, c)) {
                    return Err(fail(a, b, c));
                }
            }
        }
        Ok(())
    }

    /// Closure of `generators` under composition; see [`Permutation`] for
    /// the composition convention.
    pub fn from_permutations(generators: &[Permutation]) -> Result<Self, GroupError> {
        Self::from_permutations_with(generators, &GroupLimits::default())
    }

    /// Elements are numbered in breadth-first discovery order from the
    /// identity, applying generators in input order.
    pub fn from_permutations_with(generators: &[Permutation], limits: &GroupLimits) -> Result<Self, GroupError> {
        let degree = generators.first().map_or(0, Permutation::degree);
        if let Some(bad) = generators.iter().find(|p| p.degree() != degree) {
            return Err(GroupError::InvalidPermutation(format!(
                "generator {bad} acts on {} points, expected {degree}",
                bad.degree()
            )));
        }
        let mut elements = vec![Permutation::identity(degree)];
        let mut index = std::collections::HashMap::new();
        index.insert(elements[0].clone(), 0usize);
        let mut head = 0;
        while head < elements.len() {
            let current = elements[head].clone();
            head += 1;
            for gen in generators {
                let next = current.then(gen);
                if !index.contains_key(&next) {
                    if elements.len() == limits.order_cap {
                        return Err(GroupError::CapExceeded { cap: limits.order_cap });
                    }
                    index.insert(next.clone(), elements.len());
                    elements.push(next);
                }
            }
        }
        let n = elements.len();
        let mut mul = vec![0u32; n * n];
        for (a, pa) in elements.iter().enumerate() {
            for (b, pb) in elements.iter().enumerate() {
                mul[a * n + b] = index[&pa.then(pb)] as u32;
            }
        }
        let mut group = Self::from_raw(n, mul, limits)?;
        group.labels = Some(elements.iter().map(|p| p.to_string()).collect());
        group.perm_images = Some(elements);
        Ok(group)
    }

    pub fn builtin(b: &Builtin) -> Result<Self, GroupError> {
        b.build()
    }

    pub(crate) fn with_labels(mut self, labels: Vec<String>) -> Self {
        debug_assert_eq!(labels.len(), self.order);
        self.labels = Some(labels);
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.order as u32).map(Elem)
    }

    pub fn contains(&self, g: Elem) -> bool {
        g.idx() < self.order
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.mul[a.idx() * self.order + b.idx()])
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        Elem(self.inv[a.idx()])
    }

    /// `g^k` by square-and-multiply; negative exponents invert the result.
    pub fn pow(&self, g: Elem, k: i64) -> Elem {
        let mut base = g;
        let mut exp = k.unsigned_abs();
        let mut acc = Elem::E;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        if k < 0 {
            self.inv(acc)
        } else {
            acc
        }
    }

    /// `h⁻¹ g h`
    #[inline]
    pub fn conjugate(&self, g: Elem, h: Elem) -> Elem {
        self.mul(self.mul(self.inv(h), g), h)
    }

    /// `[g,h] = g⁻¹ h⁻¹ g h`
    #[inline]
    pub fn commutator(&self, g: Elem, h: Elem) -> Elem {
        self.mul(self.mul(self.inv(g), self.inv(h)), self.mul(g, h))
    }

    pub fn element_order(&self, g: Elem) -> usize {
        let mut k = 1;
        let mut x = g;
        while !x.is_identity() {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// Least common multiple of all element orders.
    pub fn exponent(&self) -> usize {
        self.elements().map(|g| self.element_order(g)).fold(1, lcm)
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order;
        (0..n).all(|a| (a + 1..n).all(|b| self.mul[a * n + b] == self.mul[b * n + a]))
    }

    /// The table as nested rows of indices.
    pub fn table(&self) -> Vec<Vec<usize>> {
        self.mul.chunks(self.order).map(|row| row.iter().map(|&v| v as usize).collect()).collect()
    }

    pub fn inverse_table(&self) -> Vec<usize> {
        self.inv.iter().map(|&v| v as usize).collect()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, g: Elem) -> String {
        match &self.labels {
            Some(l) => l[g.idx()].clone(),
            None => format!("g{}", g.idx()),
        }
    }

    pub fn perm_images(&self) -> Option<&[Permutation]> {
        self.perm_images.as_deref()
    }

    /// The subgroup on `members` (which must contain 0 and be closed) as a
    /// group in its own right. Members keep their relative order, so the
    /// identity stays at index 0. Returns the group and the embedding map.
    pub(crate) fn induced(&self, members: &[Elem]) -> (FiniteGroup, Vec<Elem>) {
        debug_assert!(members.first() == Some(&Elem::E));
        let n = members.len();
        let mut local = vec![u32::MAX; self.order];
        for (i, m) in members.iter().enumerate() {
            local[m.idx()] = i as u32;
        }
        let mut mul = vec![0u32; n * n];
        for (a, &ga) in members.iter().enumerate() {
            for (b, &gb) in members.iter().enumerate() {
                mul[a * n + b] = local[self.mul(ga, gb).idx()];
            }
        }
        let inv = members.iter().map(|&m| local[self.inv(m).idx()]).collect();
        let labels = self.labels.as_ref().map(|l| members.iter().map(|m| l[m.idx()].clone()).collect());
        let perm_images =
            self.perm_images.as_ref().map(|p| members.iter().map(|m| p[m.idx()].clone()).collect());
        (FiniteGroup { order: n, mul, inv, labels, perm_images }, members.to_vec())
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyclic_table(n: usize) -> Vec<Vec<usize>> {
        (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()
    }

    #[test]
    fn trivial_table() {
        let g = FiniteGroup::from_table(&[vec![0]]).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.exponent(), 1);
    }

    #[test]
    fn z2_table() {
        let g = FiniteGroup::from_table(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.inv(Elem::new(1)), Elem::new(1));
    }

    #[test]
    fn identity_is_relabelled_to_zero() {
        // Z3 with the identity stored at index 2.
        let t = vec![vec![1, 2, 0], vec![2, 0, 1], vec![0, 1, 2]];
        let g = FiniteGroup::from_table(&t).unwrap();
        for x in g.elements() {
            assert_eq!(g.mul(Elem::E, x), x);
        }
        assert_eq!(g.exponent(), 3);
    }

    #[test]
    fn perturbed_z6_is_non_associative() {
        let mut t = cyclic_table(6);
        // 2+3 = 5 in Z6; rewriting it to 4 keeps identity and inverses intact.
        t[2][3] = 4;
        let err = FiniteGroup::from_table(&t).unwrap_err();
        match err {
            GroupError::NotAGroup(v) => assert_eq!(v.reason(), "non-associative"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn axiom_violations_are_named() {
        let out_of_range = vec![vec![0, 2], vec![1, 0]];
        assert!(matches!(
            FiniteGroup::from_table(&out_of_range),
            Err(GroupError::NotAGroup(AxiomViolation::NotClosed { .. }))
        ));
        let no_identity = vec![vec![1, 1], vec![1, 1]];
        assert!(matches!(
            FiniteGroup::from_table(&no_identity),
            Err(GroupError::NotAGroup(AxiomViolation::NoIdentity))
        ));
        // Identity 0, but 1*x never yields 0.
        let no_inverse = vec![vec![0, 1], vec![1, 1]];
        assert!(matches!(
            FiniteGroup::from_table(&no_inverse),
            Err(GroupError::NotAGroup(AxiomViolation::MissingInverse { element: 1 }))
        ));
        assert!(matches!(FiniteGroup::from_table(&[vec![0, 1]]), Err(GroupError::MalformedTable(_))));
    }

    #[test]
    fn spot_check_catches_gross_non_associativity() {
        let limits = GroupLimits { exhaustive_assoc_cap: 4, ..GroupLimits::default() };
        let mut t = cyclic_table(20);
        t[7][9] = 3;
        t[9][7] = 3;
        assert!(FiniteGroup::from_table_with(&t, &limits).is_err());
        assert!(FiniteGroup::from_table_with(&cyclic_table(20), &limits).is_ok());
    }

    #[test]
    fn powers() {
        let g = FiniteGroup::from_table(&cyclic_table(5)).unwrap();
        for x in g.elements() {
            assert_eq!(g.pow(x, 0), Elem::E);
            assert_eq!(g.pow(x, 5), Elem::E);
            assert_eq!(g.pow(x, -1), g.inv(x));
            assert_eq!(g.pow(x, -7), g.inv(g.pow(x, 7)));
        }
    }

    #[test]
    fn commutators_vanish_in_abelian_groups() {
        let g = FiniteGroup::from_table(&cyclic_table(7)).unwrap();
        assert!(g.is_abelian());
        for a in g.elements() {
            for b in g.elements() {
                assert_eq!(g.commutator(a, b), Elem::E);
            }
        }
    }

    #[test]
    fn s3_from_permutations() {
        let gens = [Permutation::from_cycles(3, &[&[0, 1]]).unwrap(), Permutation::from_cycles(3, &[&[0, 1, 2]]).unwrap()];
        let g = FiniteGroup::from_permutations(&gens).unwrap();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        assert_eq!(g.exponent(), 6);
    }

    #[test]
    fn empty_generators_give_trivial_group() {
        let g = FiniteGroup::from_permutations(&[]).unwrap();
        assert_eq!(g.order(), 1);
    }

    #[test]
    fn permutation_closure_respects_cap() {
        let gens = [Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap(), Permutation::from_cycles(4, &[&[0, 1]]).unwrap()];
        let limits = GroupLimits { order_cap: 10, ..GroupLimits::default() };
        assert_eq!(
            FiniteGroup::from_permutations_with(&gens, &limits),
            Err(GroupError::CapExceeded { cap: 10 })
        );
    }

    #[test]
    fn permutation_group_round_trips_through_its_table() {
        let gens = [Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap(), Permutation::from_cycles(4, &[&[0, 1]]).unwrap()];
        let g = FiniteGroup::from_permutations(&gens).unwrap();
        assert_eq!(g.order(), 24);
        let h = FiniteGroup::from_table(&g.table()).unwrap();
        assert_eq!(g, h);
    }
}
