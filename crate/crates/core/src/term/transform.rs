use std::collections::HashMap;

use crate::group::FiniteGroup;

use super::{Node, Term};

/// Tree size of `t`: leaves count 1, every operation 1 plus its children.
/// Shared subterms are counted once per occurrence, so this is the length of
/// the printed term (minus punctuation). Saturates at `u64::MAX`.
pub fn length(t: &Term) -> u64 {
    let mut memo: HashMap<*const Node, u64> = HashMap::new();
    for n in t.postorder() {
        let size = n.children().iter().fold(1u64, |acc, c| acc.saturating_add(memo[&c.ptr()]));
        memo.insert(n.ptr(), size);
    }
    memo[&t.ptr()]
}

/// Bottom-up rebuild over the DAG. `f` receives the node and its already
/// rewritten children; returning `None` keeps the node, re-linked to the
/// new children if any changed.
fn rebuild(t: &Term, mut f: impl FnMut(&Term, &[Term]) -> Option<Term>) -> Term {
    let mut memo: HashMap<*const Node, Term> = HashMap::new();
    for n in t.postorder() {
        let kids: Vec<Term> = n.children().iter().map(|c| memo[&c.ptr()].clone()).collect();
        let out = match f(&n, &kids) {
            Some(r) => r,
            None if kids.iter().zip(n.children()).all(|(a, b)| a.ptr() == b.ptr()) => n.clone(),
            None => with_children(&n, &kids),
        };
        memo.insert(n.ptr(), out);
    }
    memo.remove(&t.ptr()).expect("root visited")
}

fn with_children(t: &Term, k: &[Term]) -> Term {
    match t.node() {
        Node::Var(_) | Node::Const(_) | Node::Identity => t.clone(),
        Node::Mul(_) => Term::mul(&k[0], &k[1]),
        Node::Inv(_) => Term::inv(&k[0]),
        Node::Comm(_) => Term::comm(&k[0], &k[1]),
        Node::W(_) => Term::w(&k[0], &k[1], &k[2], &k[3]),
    }
}

fn expanded_comm(a: &Term, b: &Term) -> Term {
    Term::mul(&Term::mul(&Term::inv(a), &Term::inv(b)), &Term::mul(a, b))
}

/// Rewrites commutators and `w` into `{·, e, ⁻¹}`. Arguments are shared, not
/// copied, so the DAG stays small even though [`length`] grows exponentially
/// along a commutator chain.
pub fn expand(t: &Term) -> Term {
    rebuild(t, |n, k| match n.node() {
        Node::Comm(_) => Some(expanded_comm(&k[0], &k[1])),
        Node::W(_) => {
            let c = expanded_comm(&expanded_comm(&expanded_comm(&k[0], &k[1]), &k[2]), &k[3]);
            Some(Term::mul(&Term::power(&k[0], 8), &c))
        }
        _ => None,
    })
}

/// Replaces every occurrence of variable `var` by `replacement`.
pub fn substitute(t: &Term, var: u32, replacement: &Term) -> Term {
    rebuild(t, |n, _| match n.node() {
        Node::Var(i) if *i == var => Some(replacement.clone()),
        _ => None,
    })
}

/// An inversion-free term equal to `t` on every assignment over `group`.
///
/// Inverses are pushed to the leaves with `(ab)⁻¹ = b⁻¹a⁻¹` and
/// `[a,b]⁻¹ = [b,a]`; an inverted variable becomes `x^(|G|-1)` and an
/// inverted constant its inverse in `group`. An inverted `w` has no such
/// identity and is raised to the power `|G|-1` as a whole.
pub fn eliminate_inversion(t: &Term, group: &FiniteGroup) -> Term {
    let flip = group.order().saturating_sub(1) as u64;
    // Each node gets its inversion-free form and that of its inverse.
    let mut pos: HashMap<*const Node, Term> = HashMap::new();
    let mut neg: HashMap<*const Node, Term> = HashMap::new();
    for n in t.postorder() {
        let p = |c: &Term| pos[&c.ptr()].clone();
        let q = |c: &Term| neg[&c.ptr()].clone();
        let (pt, nt) = match n.node() {
            Node::Var(_) => (n.clone(), Term::power(&n, flip)),
            Node::Const(c) if group.contains(*c) => (n.clone(), Term::constant(group.inv(*c))),
            Node::Const(_) => (n.clone(), Term::power(&n, flip)),
            Node::Identity => (n.clone(), n.clone()),
            Node::Mul([a, b]) => {
                let pt = if p(a).ptr() == a.ptr() && p(b).ptr() == b.ptr() { n.clone() } else { Term::mul(&p(a), &p(b)) };
                (pt, Term::mul(&q(b), &q(a)))
            }
            Node::Inv(a) => (q(a), p(a)),
            Node::Comm([a, b]) => {
                let pt = if p(a).ptr() == a.ptr() && p(b).ptr() == b.ptr() { n.clone() } else { Term::comm(&p(a), &p(b)) };
                (pt, Term::comm(&p(b), &p(a)))
            }
            Node::W(args) => {
                let k: Vec<Term> = args.iter().map(p).collect();
                let pt = if k.iter().zip(args).all(|(x, y)| x.ptr() == y.ptr()) {
                    n.clone()
                } else {
                    Term::w(&k[0], &k[1], &k[2], &k[3])
                };
                let nt = Term::power(&pt, flip);
                (pt, nt)
            }
        };
        pos.insert(n.ptr(), pt);
        neg.insert(n.ptr(), nt);
    }
    pos.remove(&t.ptr()).expect("root visited")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Builtin, Elem};
    use crate::term::parse::tests::arb_term;
    use crate::term::{eval, parse, Assignment};
    use proptest::prelude::*;

    fn chain(k: u32) -> Term {
        (1..=k).fold(Term::var(0), |acc, i| Term::comm(&acc, &Term::var(i)))
    }

    /// Calls `f` on every assignment of `vars` variables over `order` elements.
    fn all_assignments(order: usize, vars: usize, mut f: impl FnMut(&Assignment)) {
        let mut v = vec![0usize; vars];
        loop {
            f(&Assignment::new(v.iter().map(|&i| Elem::new(i)).collect()));
            let mut i = 0;
            loop {
                if i == vars {
                    return;
                }
                v[i] += 1;
                if v[i] < order {
                    break;
                }
                v[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn lengths() {
        assert_eq!(length(&Term::var(0)), 1);
        for k in 0..20 {
            assert_eq!(length(&chain(k)), 2 * k as u64 + 1);
        }
        assert!(length(&expand(&chain(3))) >= 8);
        for k in 0..=10 {
            assert!(length(&expand(&chain(k))) >= 1 << k);
        }
        // Sharing keeps the DAG small while the tree length explodes.
        let big = expand(&chain(70));
        assert_eq!(length(&big), u64::MAX);
        assert!(big.postorder().len() < 1000);
    }

    #[test]
    fn expand_keeps_group_terms() {
        let t = parse("x0*x1^-1*(g2*1)").unwrap();
        let e = expand(&t);
        assert_eq!(e.ptr(), t.ptr());
        assert!(!expand(&parse("w(x0,[x1,x2],x3,x0)").unwrap()).uses_commutator());
    }

    #[test]
    fn expanded_commutator_over_s3() {
        let s3 = Builtin::Symmetric(3).build().unwrap();
        let c = Term::comm(&Term::var(0), &Term::var(1));
        let e = expand(&c);
        all_assignments(6, 2, |a| assert_eq!(eval(&c, &s3, a), eval(&e, &s3, a)));
    }

    #[test]
    fn inversion_examples() {
        let s3 = Builtin::Symmetric(3).build().unwrap();
        let t = parse("x0^-1").unwrap();
        let r = eliminate_inversion(&t, &s3);
        assert!(!r.uses_inverse());
        assert_eq!(length(&r), 9, "x^5 as a product of five x");
        all_assignments(6, 1, |a| assert_eq!(eval(&t, &s3, a), eval(&r, &s3, a)));

        let d6 = Builtin::Dihedral(6).build().unwrap();
        let t = parse("(x0*x1)^-1").unwrap();
        let r = eliminate_inversion(&t, &d6);
        assert!(!r.uses_inverse());
        all_assignments(6, 2, |a| assert_eq!(eval(&t, &d6, a), eval(&r, &d6, a)));

        let plain = parse("[x0,g1]*w(x1,x2,x3,1)").unwrap();
        assert_eq!(eliminate_inversion(&plain, &d6).ptr(), plain.ptr());
    }

    #[test]
    fn substitution() {
        let t = parse("[x0,x1]").unwrap();
        let g = Term::constant(Elem::new(3));
        assert_eq!(substitute(&t, 0, &g), parse("[g3,x1]").unwrap());
        assert_eq!(substitute(&t, 7, &g).ptr(), t.ptr());
        assert_eq!(substitute(&parse("x0*x0^-1").unwrap(), 0, &parse("x1*x2").unwrap()).to_string(), "x1*x2*(x1*x2)^-1");
    }

    /// Small groups for exhaustive checks: orders 1..=8 including the
    /// non-abelian ones.
    fn small_groups() -> Vec<crate::group::FiniteGroup> {
        ["cyclic(1)", "cyclic(2)", "cyclic(5)", "dihedral(6)", "dihedral(8)", "quaternion", "direct_product(cyclic(2), cyclic(4))"]
            .iter()
            .map(|s| Builtin::parse(s).unwrap().build().unwrap())
            .collect()
    }

    fn small_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            (0u32..4).prop_map(Term::var),
            (0usize..8).prop_map(|g| Term::constant(Elem::new(g))),
            Just(Term::identity()),
        ];
        leaf.prop_recursive(4, 24, 4, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::mul(&a, &b)),
                inner.clone().prop_map(|a| Term::inv(&a)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::comm(&a, &b)),
                (inner.clone(), inner.clone(), inner.clone(), inner).prop_map(|(x, a, b, c)| Term::w(&x, &a, &b, &c)),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn transforms_preserve_evaluation_exhaustively(t in small_term()) {
            for g in small_groups() {
                let t = substitute_bad_constants(&t, g.order());
                let e = expand(&t);
                let i = eliminate_inversion(&t, &g);
                prop_assert!(Signature::Group.admits(&e));
                prop_assert!(!i.uses_inverse());
                let mut bad = None;
                all_assignments(g.order(), 4, |a| {
                    let want = eval(&t, &g, a).unwrap();
                    if bad.is_none() && (eval(&e, &g, a).unwrap() != want || eval(&i, &g, a).unwrap() != want) {
                        bad = Some(a.clone());
                    }
                });
                prop_assert!(bad.is_none(), "{} disagrees at {:?}", t, bad);
            }
        }

        #[test]
        fn substitution_length_bound(t in arb_term(), s in arb_term(), v in 0u32..6) {
            let r = substitute(&t, v, &s);
            prop_assert!(length(&r) <= length(&t).saturating_mul(length(&s)));
        }
    }

    use crate::term::Signature;

    /// Maps constants into range for a group of the given order.
    fn substitute_bad_constants(t: &Term, order: usize) -> Term {
        rebuild(t, |n, _| match n.node() {
            Node::Const(c) if c.idx() >= order => Some(Term::constant(Elem::new(c.idx() % order))),
            _ => None,
        })
    }
}
