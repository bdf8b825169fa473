use crate::group::{Elem, FiniteGroup, GroupLimits};

use super::{StructureError, Subgroup};

/// The canonical projection `G → G/K`.
///
/// Cosets are numbered by their smallest member, so the kernel itself is
/// coset 0 and the quotient's identity sits at index 0.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    kernel: Subgroup,
    coset_of: Vec<Elem>,
    reps: Vec<Elem>,
    quotient: FiniteGroup,
}

impl QuotientMap {
    pub fn kernel(&self) -> &Subgroup {
        &self.kernel
    }

    pub fn quotient(&self) -> &FiniteGroup {
        &self.quotient
    }

    pub fn into_quotient(self) -> FiniteGroup {
        self.quotient
    }

    #[inline]
    pub fn image(&self, g: Elem) -> Elem {
        self.coset_of[g.idx()]
    }

    /// Smallest parent element of coset `q`.
    pub fn representative(&self, q: Elem) -> Elem {
        self.reps[q.idx()]
    }

    pub fn coset_map(&self) -> &[Elem] {
        &self.coset_of
    }

    pub fn image_subgroup(&self, s: &Subgroup) -> Subgroup {
        let mut mask = vec![false; self.quotient.order()];
        for &m in s.members() {
            mask[self.image(m).idx()] = true;
        }
        Subgroup::from_mask(&self.quotient, mask)
    }

    pub fn preimage(&self, parent: &FiniteGroup, s: &Subgroup) -> Subgroup {
        let mask = self.coset_of.iter().map(|&q| s.contains(q)).collect();
        Subgroup::from_mask(parent, mask)
    }
}

impl FiniteGroup {
    pub fn quotient(&self, kernel: &Subgroup) -> Result<QuotientMap, StructureError> {
        if !kernel.is_normal() {
            return Err(StructureError::NotNormal);
        }
        let n = self.order();
        let mut assigned: Vec<Option<Elem>> = vec![None; n];
        let mut reps = Vec::new();
        for g in self.elements() {
            if assigned[g.idx()].is_some() {
                continue;
            }
            let q = Elem::new(reps.len());
            reps.push(g);
            for &k in kernel.members() {
                assigned[self.mul(g, k).idx()] = Some(q);
            }
        }
        let coset_of: Vec<Elem> = assigned.into_iter().map(|q| q.expect("cosets cover the group")).collect();
        let m = reps.len();
        let mut mul = vec![0u32; m * m];
        for (i, &a) in reps.iter().enumerate() {
            for (j, &b) in reps.iter().enumerate() {
                mul[i * m + j] = coset_of[self.mul(a, b).idx()].idx() as u32;
            }
        }
        let quotient = FiniteGroup::from_raw(m, mul, &GroupLimits::default())
            .map_err(|e| StructureError::InternalCheckFailed(format!("quotient table: {e}")))?;
        for a in self.elements() {
            for b in self.elements() {
                if coset_of[self.mul(a, b).idx()] != quotient.mul(coset_of[a.idx()], coset_of[b.idx()]) {
                    return Err(StructureError::InternalCheckFailed(format!(
                        "coset map is not a homomorphism at ({a},{b})"
                    )));
                }
            }
        }
        Ok(QuotientMap { kernel: kernel.clone(), coset_of, reps, quotient })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Builtin;

    #[test]
    fn quotient_by_trivial_is_a_copy() {
        let d6 = Builtin::Dihedral(6).build().unwrap();
        let q = d6.quotient(&Subgroup::trivial(&d6)).unwrap();
        assert_eq!(q.quotient(), &d6);
    }

    #[test]
    fn sl23_mod_center() {
        let sl = Builtin::Sl23.build().unwrap();
        let q = sl.quotient(&sl.center()).unwrap();
        let h = q.quotient();
        assert_eq!(h.order(), 12);
        assert!(h.center().is_trivial());
        assert_eq!(h.derived_subgroup().order(), 4);
        assert_eq!(h.exponent(), 6);
    }

    #[test]
    fn s4_mod_klein() {
        let s4 = Builtin::Symmetric(4).build().unwrap();
        let klein = &s4.derived_series()[2];
        let q = s4.quotient(klein).unwrap();
        assert_eq!(q.quotient().order(), 6);
        assert!(!q.quotient().is_abelian());
        assert_eq!(q.preimage(&s4, &Subgroup::trivial(q.quotient())), *klein);
    }

    #[test]
    fn coset_numbering() {
        let d6 = Builtin::Dihedral(6).build().unwrap();
        let rot = d6.closure([Elem::new(1)]);
        let q = d6.quotient(&rot).unwrap();
        assert_eq!(q.representative(Elem::new(1)), Elem::new(3));
        for g in d6.elements() {
            for h in d6.elements() {
                let same = q.image(g) == q.image(h);
                assert_eq!(same, rot.contains(d6.mul(g, d6.inv(h))));
            }
        }
    }

    #[test]
    fn rejects_non_normal_kernel() {
        let d6 = Builtin::Dihedral(6).build().unwrap();
        let refl = d6.closure([Elem::new(3)]);
        assert_eq!(d6.quotient(&refl).unwrap_err(), StructureError::NotNormal);
    }
}
