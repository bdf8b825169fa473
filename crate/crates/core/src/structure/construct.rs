//! Locating the non-nilpotent layer `L` of the derived series, the case
//! split on `exp(L/F(L))`, and the quotient pipelines that produce a group
//! `H` with a minimal normal subgroup `N` satisfying `[H,N] = N` and
//! `[H',N] = 1`.

use serde::Serialize;

use crate::group::{Elem, FiniteGroup};

use super::{QuotientMap, StructureError, Subgroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseKind {
    Nilpotent,
    NonSolvable,
    /// `exp(L/F(L)) > 2`: the commutator alone yields the coloring gadget.
    Case1,
    /// `exp(L/F(L)) = 2`: the `w` operation yields the SAT gadget.
    Case2,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub kind: CaseKind,
    /// The last non-nilpotent member of the derived series (as a subgroup of G).
    pub l: Option<Subgroup>,
    /// `F(L)`, as a subgroup of G.
    pub fitting_of_l: Option<Subgroup>,
    /// `exp(L/F(L))`.
    pub exponent: Option<usize>,
}

/// Output of [`FiniteGroup::construct_h_eq`] / [`FiniteGroup::construct_h_id`].
#[derive(Clone, Debug)]
pub struct HConstruction {
    /// `L` as a subgroup of the input group.
    pub l: Subgroup,
    /// `L` as a standalone group; the chain starts here.
    pub l_group: FiniteGroup,
    /// `exp(L/F(L))`
    pub exponent: usize,
    /// The chosen non-Engel element, in the input group's numbering.
    pub g: Elem,
    /// The element whose commutator map drove the cycle search (`g` or `g²`).
    pub driver: Elem,
    /// Point on a cycle of `x ↦ [x, driver]` avoiding the identity.
    pub a: Elem,
    /// Quotient maps from `l_group` down to `h`, in order.
    pub chain: Vec<QuotientMap>,
    pub h: FiniteGroup,
    pub n: Subgroup,
    pub g_in_h: Elem,
    pub a_in_h: Elem,
    /// `C_H(N)`
    pub centralizer: Subgroup,
    /// `|H / C_H(N)|`
    pub index: usize,
    pub index_over_2: bool,
}

/// Shared prefix of both constructions.
struct Layer {
    l: Subgroup,
    group: FiniteGroup,
    embedding: Vec<Elem>,
    exponent: usize,
    g: Elem,
    driver: Elem,
    a: Elem,
}

impl FiniteGroup {
    /// The member `L` of the derived series (taken from `G` itself) that is
    /// not nilpotent while `L'` is.
    pub fn last_non_nilpotent_derived(&self) -> Result<Subgroup, StructureError> {
        let series = self.derived_series();
        if !series.last().is_some_and(Subgroup::is_trivial) {
            return Err(StructureError::NotSolvable);
        }
        series.into_iter().rev().find(|s| !self.is_nilpotent(s)).ok_or(StructureError::IsNilpotent)
    }

    pub fn classify(&self) -> Result<Classification, StructureError> {
        let none = |kind| Classification { kind, l: None, fitting_of_l: None, exponent: None };
        let l = match self.last_non_nilpotent_derived() {
            Ok(l) => l,
            Err(StructureError::NotSolvable) => return Ok(none(CaseKind::NonSolvable)),
            Err(StructureError::IsNilpotent) => return Ok(none(CaseKind::Nilpotent)),
            Err(e) => return Err(e),
        };
        let (lg, emb) = self.subgroup_as_group(&l);
        let f = lg.fitting_subgroup()?;
        let exponent = lg.quotient(&f)?.quotient().exponent();
        let fitting_of_l = Subgroup::from_mask(self, mask_of(self.order(), f.members().iter().map(|m| emb[m.idx()])));
        Ok(Classification {
            kind: if exponent > 2 { CaseKind::Case1 } else { CaseKind::Case2 },
            l: Some(l),
            fitting_of_l: Some(fitting_of_l),
            exponent: Some(exponent),
        })
    }

    fn non_nilpotent_layer(&self) -> Result<Layer, StructureError> {
        let l = self.last_non_nilpotent_derived()?;
        let (group, embedding) = self.subgroup_as_group(&l);
        let f = group.fitting_subgroup()?;
        let exponent = group.quotient(&f)?.quotient().exponent();
        // With exp(L/F(L)) > 2 we need g, g² ∉ F(L) and drive the search
        // with g², so that both g and g² act without fixed points on N.
        let (g, driver) = if exponent > 2 {
            let g = group
                .elements()
                .find(|&x| !f.contains(x) && !f.contains(group.mul(x, x)))
                .ok_or_else(|| StructureError::InternalCheckFailed("no g with g, g² outside F(L)".into()))?;
            (g, group.mul(g, g))
        } else {
            let g = group
                .elements()
                .find(|&x| !f.contains(x))
                .ok_or_else(|| StructureError::InternalCheckFailed("F(L) = L".into()))?;
            (g, g)
        };
        let a = group
            .commutator_cycle_point(driver)
            .ok_or_else(|| StructureError::InternalCheckFailed("driver element is left Engel".into()))?;
        Ok(Layer { l, group, embedding, exponent, g, driver, a })
    }

    /// The first `h` (in index order) whose orbit under `x ↦ [x,g]` closes
    /// into a cycle without meeting the identity; returns the first orbit
    /// point lying on that cycle.
    pub fn commutator_cycle_point(&self, g: Elem) -> Option<Elem> {
        let mut seen = vec![false; self.order()];
        for h in self.elements().skip(1) {
            let mut visited = Vec::new();
            let mut x = h;
            while !x.is_identity() && !seen[x.idx()] {
                seen[x.idx()] = true;
                visited.push(x);
                x = self.commutator(x, g);
            }
            let on_cycle = !x.is_identity() && visited.contains(&x);
            for v in visited {
                seen[v.idx()] = false;
            }
            if on_cycle {
                return Some(x);
            }
        }
        None
    }

    /// `H = L/K` where `K` is the first lower-central term of `L'` not
    /// containing `a`.
    pub fn construct_h_eq(&self) -> Result<HConstruction, StructureError> {
        let layer = self.non_nilpotent_layer()?;
        let lg = &layer.group;
        let derived = lg.derived_subgroup();
        if !derived.contains(layer.a) {
            return Err(StructureError::InternalCheckFailed("cycle point is not in L'".into()));
        }
        let k = lg
            .lower_central_series(&derived)
            .into_iter()
            .find(|s| !s.contains(layer.a))
            .ok_or_else(|| StructureError::InternalCheckFailed("L' is not nilpotent".into()))?;
        let q = lg.quotient(&k)?;
        let (g_h, a_h) = (q.image(layer.g), q.image(layer.a));
        let h = q.quotient().clone();
        finish(layer, vec![q], h, g_h, a_h)
    }

    /// `H_0 = L`, `H_{i+1} = H_i / C_{H_i}(H_i')`, stopping at the first `H_i`
    /// in which the image of `a` centralizes `H_i'`.
    pub fn construct_h_id(&self) -> Result<HConstruction, StructureError> {
        let layer = self.non_nilpotent_layer()?;
        let mut current = layer.group.clone();
        let (mut g_h, mut a_h) = (layer.g, layer.a);
        let mut chain = Vec::new();
        loop {
            if a_h.is_identity() {
                return Err(StructureError::InternalCheckFailed("image of a became trivial".into()));
            }
            let derived = current.derived_subgroup();
            let c = current.centralizer(derived.members());
            if c.contains(a_h) {
                break;
            }
            if c.is_trivial() {
                return Err(StructureError::InternalCheckFailed("C(H') is trivial; quotient cannot progress".into()));
            }
            let q = current.quotient(&c)?;
            g_h = q.image(g_h);
            a_h = q.image(a_h);
            current = q.quotient().clone();
            chain.push(q);
        }
        finish(layer, chain, current, g_h, a_h)
    }
}

fn mask_of(order: usize, members: impl IntoIterator<Item = Elem>) -> Vec<bool> {
    let mut mask = vec![false; order];
    for m in members {
        mask[m.idx()] = true;
    }
    mask
}

fn finish(
    layer: Layer,
    chain: Vec<QuotientMap>,
    h: FiniteGroup,
    g_in_h: Elem,
    a_in_h: Elem,
) -> Result<HConstruction, StructureError> {
    let closure_of_a = h.normal_closure(a_in_h);
    let n = h
        .minimal_normal_subgroups()
        .into_iter()
        .find(|m| m.is_subset_of(&closure_of_a))
        .ok_or_else(|| StructureError::InternalCheckFailed("no minimal normal subgroup below ⟨a⟩".into()))?;
    let centralizer = h.centralizer(n.members());
    let index = h.order() / centralizer.order();

    let whole = Subgroup::whole(&h);
    if h.commutator_subgroup(&whole, &n) != n {
        return Err(StructureError::InternalCheckFailed("[H,N] != N".into()));
    }
    if !h.commutator_subgroup(&h.derived_subgroup(), &n).is_trivial() {
        return Err(StructureError::InternalCheckFailed("[H',N] != 1".into()));
    }
    if (index > 2) != (layer.exponent > 2) {
        return Err(StructureError::InternalCheckFailed(format!(
            "|H/C_H(N)| = {index} disagrees with exp(L/F(L)) = {}",
            layer.exponent
        )));
    }
    let to_parent = |x: Elem| layer.embedding[x.idx()];
    Ok(HConstruction {
        g: to_parent(layer.g),
        driver: to_parent(layer.driver),
        a: to_parent(layer.a),
        l: layer.l,
        l_group: layer.group,
        exponent: layer.exponent,
        chain,
        h,
        n,
        g_in_h,
        a_in_h,
        centralizer,
        index,
        index_over_2: index > 2,
    })
}
