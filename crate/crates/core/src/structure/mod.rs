//! Subgroups, series, and the Fitting subgroup.
//!
//! Subgroups are element sets over a parent [`FiniteGroup`]; every operation
//! here is an inherent method on the parent so the two never disagree about
//! element numbering.

mod construct;
mod quotient;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::group::{Elem, FiniteGroup};

pub use construct::{CaseKind, Classification, HConstruction};
pub use quotient::QuotientMap;

/// Normal-subgroup enumeration is only meant for desk-scale groups.
pub const NORMAL_ENUMERATION_CAP: usize = 200;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("element set is not a subgroup: {0}")]
    NotASubgroup(String),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("group is nilpotent")]
    IsNilpotent,
    #[error("group is not solvable")]
    NotSolvable,
    #[error("group of order {order} exceeds the enumeration cap of {cap}")]
    TooLarge { order: usize, cap: usize },
    #[error("internal check failed: {0}")]
    InternalCheckFailed(String),
}

/// A subgroup of some parent group, stored as a sorted member list plus a
/// membership mask over the parent's elements.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    mask: Vec<bool>,
    members: Vec<Elem>,
    normal: bool,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(order {}, {:?})", self.order(), self.members.iter().map(|m| m.idx()).collect::<Vec<_>>())
    }
}

/// Lexicographic order on the sorted member lists; used for tie-breaking.
impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.members.cmp(&other.members)
    }
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Subgroup {
    /// Checks that `members` contains the identity and is closed under
    /// multiplication and inversion.
    pub fn from_members(group: &FiniteGroup, members: impl IntoIterator<Item = Elem>) -> Result<Self, StructureError> {
        let mut mask = vec![false; group.order()];
        for m in members {
            if !group.contains(m) {
                return Err(StructureError::NotASubgroup(format!("element {m} is not in the group")));
            }
            mask[m.idx()] = true;
        }
        if !mask[0] {
            return Err(StructureError::NotASubgroup("identity missing".into()));
        }
        let s = Self::from_mask(group, mask);
        for &a in &s.members {
            if !s.contains(group.inv(a)) {
                return Err(StructureError::NotASubgroup(format!("inverse of {a} missing")));
            }
            for &b in &s.members {
                if !s.contains(group.mul(a, b)) {
                    return Err(StructureError::NotASubgroup(format!("{a}*{b} missing")));
                }
            }
        }
        Ok(s)
    }

    /// Builds from a mask that is already known to be a subgroup.
    fn from_mask(group: &FiniteGroup, mask: Vec<bool>) -> Self {
        let members: Vec<Elem> = mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| Elem::new(i)).collect();
        let normal = members.iter().all(|&m| group.elements().all(|h| mask[group.conjugate(m, h).idx()]));
        Subgroup { mask, members, normal }
    }

    pub fn trivial(group: &FiniteGroup) -> Self {
        let mut mask = vec![false; group.order()];
        mask[0] = true;
        Subgroup { mask, members: vec![Elem::E], normal: true }
    }

    pub fn whole(group: &FiniteGroup) -> Self {
        Subgroup { mask: vec![true; group.order()], members: group.elements().collect(), normal: true }
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[Elem] {
        &self.members
    }

    pub fn contains(&self, g: Elem) -> bool {
        self.mask.get(g.idx()).copied().unwrap_or(false)
    }

    pub fn is_normal(&self) -> bool {
        self.normal
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&m| other.contains(m))
    }

    pub fn member_indices(&self) -> Vec<usize> {
        self.members.iter().map(|m| m.idx()).collect()
    }
}

impl FiniteGroup {
    /// Smallest subgroup containing `seed`.
    pub fn closure(&self, seed: impl IntoIterator<Item = Elem>) -> Subgroup {
        let mut mask = vec![false; self.order()];
        mask[0] = true;
        let mut list = vec![Elem::E];
        let mut gens = Vec::new();
        for g in seed {
            if mask[g.idx()] {
                continue;
            }
            gens.push(g);
            // Re-scan everything: the new generator can combine with old elements.
            let mut head = 0;
            while head < list.len() {
                let x = list[head];
                head += 1;
                for &s in &gens {
                    let y = self.mul(x, s);
                    if !mask[y.idx()] {
                        mask[y.idx()] = true;
                        list.push(y);
                    }
                }
            }
        }
        Subgroup::from_mask(self, mask)
    }

    /// Smallest normal subgroup containing `a`: the closure of its conjugacy class.
    pub fn normal_closure(&self, a: Elem) -> Subgroup {
        self.closure(self.conjugacy_class(a))
    }

    pub fn conjugacy_class(&self, a: Elem) -> Vec<Elem> {
        let mut seen = vec![false; self.order()];
        let mut class = Vec::new();
        for h in self.elements() {
            let c = self.conjugate(a, h);
            if !std::mem::replace(&mut seen[c.idx()], true) {
                class.push(c);
            }
        }
        class
    }

    /// `[V,W]`: the subgroup generated by all `[v,w]`.
    pub fn commutator_subgroup(&self, v: &Subgroup, w: &Subgroup) -> Subgroup {
        let mut seen = vec![false; self.order()];
        let mut seed = Vec::new();
        for &x in v.members() {
            for &y in w.members() {
                let c = self.commutator(x, y);
                if !std::mem::replace(&mut seen[c.idx()], true) {
                    seed.push(c);
                }
            }
        }
        self.closure(seed)
    }

    /// `G'`
    pub fn derived_subgroup(&self) -> Subgroup {
        let g = Subgroup::whole(self);
        self.commutator_subgroup(&g, &g)
    }

    pub fn centralizer(&self, set: &[Elem]) -> Subgroup {
        let mask = self.elements().map(|x| set.iter().all(|&v| self.mul(x, v) == self.mul(v, x))).collect();
        Subgroup::from_mask(self, mask)
    }

    pub fn center(&self) -> Subgroup {
        let all: Vec<Elem> = self.elements().collect();
        self.centralizer(&all)
    }

    /// `[G, G', G'', …]`, starting from `G` itself and ending at the first
    /// repeated member.
    pub fn derived_series(&self) -> Vec<Subgroup> {
        let mut series = vec![Subgroup::whole(self)];
        loop {
            let last = series.last().expect("non-empty");
            let next = self.commutator_subgroup(last, last);
            if &next == last {
                return series;
            }
            series.push(next);
        }
    }

    /// `[S, S', [S,S'], …]` with `S` as the ambient group, ending at the
    /// first repeated member.
    pub fn lower_central_series(&self, of: &Subgroup) -> Vec<Subgroup> {
        let mut series = vec![of.clone()];
        loop {
            let last = series.last().expect("non-empty");
            let next = self.commutator_subgroup(of, last);
            if &next == last {
                return series;
            }
            series.push(next);
        }
    }

    /// `[{e}, Z(G), Z₂, …]` where `Z_{i+1} = {g : [g,h] ∈ Z_i for all h}`.
    pub fn upper_central_series(&self) -> Vec<Subgroup> {
        let mut series = vec![Subgroup::trivial(self)];
        loop {
            let last = series.last().expect("non-empty");
            let mask = self
                .elements()
                .map(|g| self.elements().all(|h| last.contains(self.commutator(g, h))))
                .collect();
            let next = Subgroup::from_mask(self, mask);
            if &next == last {
                return series;
            }
            series.push(next);
        }
    }

    pub fn is_nilpotent(&self, s: &Subgroup) -> bool {
        self.lower_central_series(s).last().is_some_and(Subgroup::is_trivial)
    }

    pub fn is_nilpotent_group(&self) -> bool {
        self.is_nilpotent(&Subgroup::whole(self))
    }

    pub fn is_solvable(&self) -> bool {
        self.derived_series().last().is_some_and(Subgroup::is_trivial)
    }

    /// Whether every `h` reaches the identity under repeated `x ↦ [x,g]`.
    pub fn is_left_engel(&self, g: Elem) -> bool {
        const UNKNOWN: u8 = 0;
        const ON_PATH: u8 = 1;
        const REACHES_E: u8 = 2;
        let mut state = vec![UNKNOWN; self.order()];
        state[0] = REACHES_E;
        let mut path = Vec::new();
        for start in self.elements() {
            let mut x = start;
            while state[x.idx()] == UNKNOWN {
                state[x.idx()] = ON_PATH;
                path.push(x);
                x = self.commutator(x, g);
            }
            // Either a known-good node or a cycle through ON_PATH nodes
            // that never met the identity.
            if state[x.idx()] != REACHES_E {
                return false;
            }
            for p in path.drain(..) {
                state[p.idx()] = REACHES_E;
            }
        }
        true
    }

    /// The Fitting subgroup as the set of left Engel elements, re-verified
    /// to be a nilpotent normal subgroup.
    pub fn fitting_subgroup(&self) -> Result<Subgroup, StructureError> {
        let members: Vec<Elem> = self.elements().filter(|&g| self.is_left_engel(g)).collect();
        let f = Subgroup::from_members(self, members)
            .map_err(|e| StructureError::InternalCheckFailed(format!("Engel set: {e}")))?;
        if !f.is_normal() {
            return Err(StructureError::InternalCheckFailed("Engel set is not normal".into()));
        }
        if !self.is_nilpotent(&f) {
            return Err(StructureError::InternalCheckFailed("Engel set is not nilpotent".into()));
        }
        Ok(f)
    }

    /// All normal subgroups, as joins of normal closures of single elements,
    /// sorted by order and then lexicographically.
    pub fn normal_subgroups(&self) -> Result<Vec<Subgroup>, StructureError> {
        if self.order() > NORMAL_ENUMERATION_CAP {
            return Err(StructureError::TooLarge { order: self.order(), cap: NORMAL_ENUMERATION_CAP });
        }
        let mut found: BTreeSet<Subgroup> = self.elements().map(|a| self.normal_closure(a)).collect();
        let mut frontier: Vec<Subgroup> = found.iter().cloned().collect();
        while !frontier.is_empty() {
            let snapshot: Vec<Subgroup> = found.iter().cloned().collect();
            let mut next = Vec::new();
            for a in &frontier {
                for b in &snapshot {
                    if a.is_subset_of(b) || b.is_subset_of(a) {
                        continue;
                    }
                    let join = self.closure(a.members().iter().chain(b.members()).copied());
                    if found.insert(join.clone()) {
                        next.push(join);
                    }
                }
            }
            frontier = next;
        }
        let mut all: Vec<Subgroup> = found.into_iter().collect();
        all.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.cmp(b)));
        Ok(all)
    }

    /// Inclusion-minimal normal closures of non-identity elements, sorted
    /// lexicographically. Empty for the trivial group.
    pub fn minimal_normal_subgroups(&self) -> Vec<Subgroup> {
        let closures: BTreeSet<Subgroup> = self.elements().skip(1).map(|a| self.normal_closure(a)).collect();
        closures
            .iter()
            .filter(|n| !closures.iter().any(|m| m != *n && m.is_subset_of(n)))
            .cloned()
            .collect()
    }

    /// The subgroup `s` as a standalone group, members numbered in
    /// increasing parent order. Returns the group and its embedding.
    pub fn subgroup_as_group(&self, s: &Subgroup) -> (FiniteGroup, Vec<Elem>) {
        self.induced(s.members())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Builtin;

    fn build(b: Builtin) -> FiniteGroup {
        b.build().unwrap()
    }

    fn orders(series: &[Subgroup]) -> Vec<usize> {
        series.iter().map(Subgroup::order).collect()
    }

    #[test]
    fn closures() {
        let d6 = build(Builtin::Dihedral(6));
        assert!(d6.closure([]).is_trivial());
        assert_eq!(d6.closure([Elem::new(1)]).order(), 3);
        assert_eq!(d6.closure(d6.elements()).order(), 6);
        assert_eq!(d6.closure([Elem::new(1), Elem::new(3)]).order(), 6);
    }

    #[test]
    fn subgroup_validation() {
        let d6 = build(Builtin::Dihedral(6));
        assert!(Subgroup::from_members(&d6, [Elem::E, Elem::new(1)]).is_err());
        assert!(Subgroup::from_members(&d6, [Elem::new(1), Elem::new(2)]).is_err());
        let rot = Subgroup::from_members(&d6, [Elem::E, Elem::new(1), Elem::new(2)]).unwrap();
        assert!(rot.is_normal());
        let refl = Subgroup::from_members(&d6, [Elem::E, Elem::new(3)]).unwrap();
        assert!(!refl.is_normal());
    }

    #[test]
    fn normal_closures() {
        let a4 = build(Builtin::Alternating(4));
        assert!(a4.normal_closure(Elem::E).is_trivial());
        let involutions: Vec<Elem> = a4.elements().filter(|&g| a4.element_order(g) == 2).collect();
        assert_eq!(involutions.len(), 3);
        for g in involutions {
            assert_eq!(a4.normal_closure(g).order(), 4);
        }
        let sl = build(Builtin::Sl23);
        let central = sl.elements().find(|&g| sl.element_order(g) == 2).unwrap();
        let nc = sl.normal_closure(central);
        assert_eq!(nc, sl.center());
        assert_eq!(nc.order(), 2);
    }

    #[test]
    fn commutator_subgroups() {
        let c = build(Builtin::Cyclic(9));
        assert!(c.derived_subgroup().is_trivial());
        let s3 = build(Builtin::Symmetric(3));
        assert_eq!(s3.derived_subgroup().order(), 3);
        let a4 = build(Builtin::Alternating(4));
        let klein = a4.derived_subgroup();
        assert_eq!(klein.order(), 4);
        assert_eq!(a4.commutator_subgroup(&Subgroup::whole(&a4), &klein), klein);
    }

    #[test]
    fn centralizers() {
        let d6 = build(Builtin::Dihedral(6));
        assert_eq!(d6.centralizer(&[Elem::E]).order(), 6);
        assert!(d6.center().is_trivial());
        assert_eq!(build(Builtin::Sl23).center().order(), 2);
        assert_eq!(build(Builtin::Quaternion).center().order(), 2);
    }

    #[test]
    fn series() {
        assert_eq!(orders(&build(Builtin::Cyclic(6)).derived_series()), [6, 1]);
        assert_eq!(orders(&build(Builtin::Symmetric(4)).derived_series()), [24, 12, 4, 1]);
        let q8 = build(Builtin::Quaternion);
        assert_eq!(orders(&q8.lower_central_series(&Subgroup::whole(&q8))), [8, 2, 1]);
        assert_eq!(orders(&q8.upper_central_series()), [1, 2, 8]);
        let d6 = build(Builtin::Dihedral(6));
        assert_eq!(orders(&d6.lower_central_series(&Subgroup::whole(&d6))), [6, 3]);
        assert_eq!(orders(&d6.upper_central_series()), [1]);
    }

    #[test]
    fn nilpotency_and_solvability() {
        assert!(build(Builtin::Cyclic(10)).is_nilpotent_group());
        let d6 = build(Builtin::Dihedral(6));
        assert!(d6.is_solvable() && !d6.is_nilpotent_group());
        assert!(!build(Builtin::Alternating(5)).is_solvable());
        assert!(build(Builtin::Dihedral(8)).is_nilpotent_group());
    }

    #[test]
    fn fitting_subgroups() {
        let q8 = build(Builtin::Quaternion);
        assert_eq!(q8.fitting_subgroup().unwrap().order(), 8);
        let a4 = build(Builtin::Alternating(4));
        assert_eq!(a4.fitting_subgroup().unwrap(), a4.derived_subgroup());
        let d6 = build(Builtin::Dihedral(6));
        assert_eq!(d6.fitting_subgroup().unwrap().member_indices(), [0, 1, 2]);
        let sl = build(Builtin::Sl23);
        assert_eq!(sl.fitting_subgroup().unwrap().order(), 8);
        assert!(build(Builtin::Alternating(5)).fitting_subgroup().unwrap().is_trivial());
    }

    #[test]
    fn minimal_normals() {
        let a5 = build(Builtin::Alternating(5));
        let mins = a5.minimal_normal_subgroups();
        assert_eq!(mins.len(), 1);
        assert_eq!(mins[0].order(), 60);
        let sl = build(Builtin::Sl23);
        assert_eq!(orders(&sl.minimal_normal_subgroups()), [2]);
        let d10 = build(Builtin::Dihedral(10));
        assert_eq!(d10.minimal_normal_subgroups().iter().map(Subgroup::member_indices).collect::<Vec<_>>(), [vec![0, 1, 2, 3, 4]]);
        // Klein four: three minimal normal subgroups of order 2.
        assert_eq!(orders(&build(Builtin::Dihedral(4)).minimal_normal_subgroups()), [2, 2, 2]);
        assert!(build(Builtin::Cyclic(1)).minimal_normal_subgroups().is_empty());
    }

    #[test]
    fn normal_subgroup_enumeration() {
        assert_eq!(orders(&build(Builtin::Symmetric(4)).normal_subgroups().unwrap()), [1, 4, 12, 24]);
        // Klein four: every subgroup is normal.
        assert_eq!(orders(&build(Builtin::Dihedral(4)).normal_subgroups().unwrap()), [1, 2, 2, 2, 4]);
        assert!(matches!(build(Builtin::Dihedral(202)).normal_subgroups(), Err(StructureError::TooLarge { .. })));
    }

    #[test]
    fn subgroup_as_group_keeps_identity_first() {
        let s4 = build(Builtin::Symmetric(4));
        let a4 = s4.derived_subgroup();
        let (g, emb) = s4.subgroup_as_group(&a4);
        assert_eq!(g.order(), 12);
        assert_eq!(emb[0], Elem::E);
        for x in g.elements() {
            for y in g.elements() {
                assert_eq!(emb[g.mul(x, y).idx()], s4.mul(emb[x.idx()], emb[y.idx()]));
            }
        }
    }
}
