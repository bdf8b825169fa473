//! Terms and polynomials over `{·, e, ⁻¹, [·,·], w}`.
//!
//! A [`Term`] is an immutable DAG node behind an `Arc`: building a chain such
//! as `[[[x,y1],y2],y3]` or the expansion of a commutator reuses subterms
//! instead of copying them. Equality is structural.

mod eval;
pub(crate) mod parse;
mod transform;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::group::Elem;

pub use eval::{eval, Assignment, Program};
pub use parse::{parse, ParseError};
pub use transform::{eliminate_inversion, expand, length, substitute};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("variable x{0} is not bound by the assignment")]
    UnboundVariable(u32),
    #[error("constant g{constant} is outside a group of order {order}")]
    ConstantOutOfRange { constant: usize, order: usize },
}

#[derive(Debug, PartialEq, Eq)]
pub enum Node {
    Var(u32),
    Const(Elem),
    Identity,
    Mul([Term; 2]),
    Inv(Term),
    Comm([Term; 2]),
    W([Term; 4]),
}

#[derive(Clone, Eq)]
pub struct Term(Arc<Node>);

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Term {
    pub fn var(i: u32) -> Self {
        Term(Arc::new(Node::Var(i)))
    }

    pub fn constant(g: Elem) -> Self {
        Term(Arc::new(Node::Const(g)))
    }

    pub fn identity() -> Self {
        Term(Arc::new(Node::Identity))
    }

    pub fn mul(a: &Term, b: &Term) -> Self {
        Term(Arc::new(Node::Mul([a.clone(), b.clone()])))
    }

    pub fn inv(a: &Term) -> Self {
        Term(Arc::new(Node::Inv(a.clone())))
    }

    pub fn comm(a: &Term, b: &Term) -> Self {
        Term(Arc::new(Node::Comm([a.clone(), b.clone()])))
    }

    pub fn w(x: &Term, y1: &Term, y2: &Term, y3: &Term) -> Self {
        Term(Arc::new(Node::W([x.clone(), y1.clone(), y2.clone(), y3.clone()])))
    }

    /// Left-associated product; the empty product is the identity.
    pub fn product<'a>(factors: impl IntoIterator<Item = &'a Term>) -> Self {
        let mut it = factors.into_iter();
        match it.next() {
            None => Term::identity(),
            Some(first) => it.fold(first.clone(), |acc, t| Term::mul(&acc, t)),
        }
    }

    /// `t^k` for `k ≥ 0` as a multiplication tree over shared repeated
    /// squares, so the DAG has O(log k) nodes.
    pub fn power(t: &Term, k: u64) -> Self {
        if k == 0 {
            return Term::identity();
        }
        let mut squares = vec![t.clone()];
        while 1u64 << squares.len() <= k {
            let last = squares.last().expect("non-empty");
            squares.push(Term::mul(last, last));
        }
        let picked: Vec<&Term> = (0..squares.len()).rev().filter(|&i| k >> i & 1 == 1).map(|i| &squares[i]).collect();
        Term::product(picked)
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub(crate) fn ptr(&self) -> *const Node {
        Arc::as_ptr(&self.0)
    }

    pub fn children(&self) -> &[Term] {
        match &*self.0 {
            Node::Var(_) | Node::Const(_) | Node::Identity => &[],
            Node::Mul(ab) | Node::Comm(ab) => ab,
            Node::Inv(a) => std::slice::from_ref(a),
            Node::W(args) => args,
        }
    }

    /// Distinct DAG nodes with every child listed before its parents.
    pub fn postorder(&self) -> Vec<Term> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        let mut stack = vec![(self.clone(), false)];
        while let Some((t, expanded)) = stack.pop() {
            if expanded {
                out.push(t);
                continue;
            }
            if !seen.insert(t.ptr()) {
                continue;
            }
            stack.push((t.clone(), true));
            for c in t.children().iter().rev() {
                if !seen.contains(&c.ptr()) {
                    stack.push((c.clone(), false));
                }
            }
        }
        out
    }

    pub fn variables(&self) -> BTreeSet<u32> {
        self.postorder()
            .iter()
            .filter_map(|t| match t.node() {
                Node::Var(i) => Some(*i),
                _ => None,
            })
            .collect()
    }

    pub fn constants(&self) -> BTreeSet<Elem> {
        self.postorder()
            .iter()
            .filter_map(|t| match t.node() {
                Node::Const(g) => Some(*g),
                _ => None,
            })
            .collect()
    }

    fn any_node(&self, pred: impl Fn(&Node) -> bool) -> bool {
        self.postorder().iter().any(|t| pred(t.node()))
    }

    pub fn uses_commutator(&self) -> bool {
        self.any_node(|n| matches!(n, Node::Comm(..)))
    }

    pub fn uses_w(&self) -> bool {
        self.any_node(|n| matches!(n, Node::W(..)))
    }

    pub fn uses_inverse(&self) -> bool {
        self.any_node(|n| matches!(n, Node::Inv(..)))
    }
}

/// Which extended signature a term lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Signature {
    /// `{·, e, ⁻¹}`
    Group,
    /// `{·, e, ⁻¹, [·,·]}`
    Commutator,
    /// `{·, e, ⁻¹, w}`
    W,
}

impl Signature {
    pub fn admits(self, t: &Term) -> bool {
        match self {
            Signature::Group => !t.uses_commutator() && !t.uses_w(),
            Signature::Commutator => !t.uses_w(),
            Signature::W => !t.uses_commutator(),
        }
    }
}
