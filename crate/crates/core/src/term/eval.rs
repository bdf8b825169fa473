use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::group::{Elem, FiniteGroup};

use super::{Node, Term, TermError};

/// Values for variables `x0, x1, …`, indexed by variable number.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Assignment(Vec<Elem>);

impl Assignment {
    pub fn new(values: Vec<Elem>) -> Self {
        Assignment(values)
    }

    pub fn get(&self, var: u32) -> Option<Elem> {
        self.0.get(var as usize).copied()
    }

    pub fn values(&self) -> &[Elem] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Var(u32),
    Const(Elem),
    Identity,
    Mul(u32, u32),
    Inv(u32),
    Comm(u32, u32),
    W([u32; 4]),
}

/// A term DAG flattened into straight-line code: one slot per distinct
/// node, children before parents. Evaluating costs one table lookup chain
/// per DAG node regardless of how often a subterm is shared.
#[derive(Clone, Debug)]
pub struct Program {
    ops: Vec<Op>,
    roots: Vec<u32>,
    variables: BTreeSet<u32>,
    constants: BTreeSet<Elem>,
}

impl Program {
    /// Compiles several roots into one program so shared subterms are
    /// evaluated once.
    pub fn compile(roots: &[&Term]) -> Program {
        let mut slot: HashMap<*const Node, u32> = HashMap::new();
        let mut ops = Vec::new();
        let mut variables = BTreeSet::new();
        let mut constants = BTreeSet::new();
        let mut root_slots = Vec::with_capacity(roots.len());
        for root in roots {
            for t in root.postorder() {
                if slot.contains_key(&t.ptr()) {
                    continue;
                }
                let s = |c: &Term| slot[&c.ptr()];
                let op = match t.node() {
                    Node::Var(i) => {
                        variables.insert(*i);
                        Op::Var(*i)
                    }
                    Node::Const(g) => {
                        constants.insert(*g);
                        Op::Const(*g)
                    }
                    Node::Identity => Op::Identity,
                    Node::Mul([a, b]) => Op::Mul(s(a), s(b)),
                    Node::Inv(a) => Op::Inv(s(a)),
                    Node::Comm([a, b]) => Op::Comm(s(a), s(b)),
                    Node::W(args) => Op::W([s(&args[0]), s(&args[1]), s(&args[2]), s(&args[3])]),
                };
                slot.insert(t.ptr(), ops.len() as u32);
                ops.push(op);
            }
            root_slots.push(slot[&root.ptr()]);
        }
        Program { ops, roots: root_slots, variables, constants }
    }

    pub fn variables(&self) -> &BTreeSet<u32> {
        &self.variables
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Checks constants against `group` and variables against an
    /// assignment of length `bound`.
    pub fn check(&self, group: &FiniteGroup, bound: usize) -> Result<(), TermError> {
        if let Some(&c) = self.constants.iter().find(|c| !group.contains(**c)) {
            return Err(TermError::ConstantOutOfRange { constant: c.idx(), order: group.order() });
        }
        if let Some(&v) = self.variables.iter().find(|&&v| v as usize >= bound) {
            return Err(TermError::UnboundVariable(v));
        }
        Ok(())
    }

    /// Evaluates every slot into `scratch`. The caller must have passed
    /// [`Program::check`] for `values.len()`.
    #[inline]
    pub fn run(&self, group: &FiniteGroup, values: &[Elem], scratch: &mut Vec<Elem>) {
        scratch.clear();
        for op in &self.ops {
            let v = match *op {
                Op::Var(i) => values[i as usize],
                Op::Const(g) => g,
                Op::Identity => Elem::E,
                Op::Mul(a, b) => group.mul(scratch[a as usize], scratch[b as usize]),
                Op::Inv(a) => group.inv(scratch[a as usize]),
                Op::Comm(a, b) => group.commutator(scratch[a as usize], scratch[b as usize]),
                Op::W([x, y1, y2, y3]) => {
                    let x = scratch[x as usize];
                    let c1 = group.commutator(x, scratch[y1 as usize]);
                    let c2 = group.commutator(c1, scratch[y2 as usize]);
                    let c3 = group.commutator(c2, scratch[y3 as usize]);
                    group.mul(group.pow(x, 8), c3)
                }
            };
            scratch.push(v);
        }
    }

    #[inline]
    pub fn root(&self, i: usize, scratch: &[Elem]) -> Elem {
        scratch[self.roots[i] as usize]
    }
}

/// Evaluates `t` in `group` under `assignment`.
pub fn eval(t: &Term, group: &FiniteGroup, assignment: &Assignment) -> Result<Elem, TermError> {
    let program = Program::compile(&[t]);
    program.check(group, assignment.len())?;
    let mut scratch = Vec::with_capacity(program.len());
    program.run(group, assignment.values(), &mut scratch);
    Ok(program.root(0, &scratch))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Builtin;

    fn a(values: &[usize]) -> Assignment {
        Assignment::new(values.iter().map(|&v| Elem::new(v)).collect())
    }

    #[test]
    fn commutator_of_equal_arguments() {
        let s4 = Builtin::Symmetric(4).build().unwrap();
        let t = Term::comm(&Term::var(0), &Term::var(0));
        for g in 0..24 {
            assert_eq!(eval(&t, &s4, &a(&[g])).unwrap(), Elem::E);
        }
    }

    #[test]
    fn w_on_dihedral_rotations() {
        let d6 = Builtin::Dihedral(6).build().unwrap();
        let w = Term::w(&Term::var(0), &Term::var(1), &Term::var(2), &Term::var(3));
        // x = r, all y reflections: constant e.
        assert_eq!(eval(&w, &d6, &a(&[1, 3, 4, 5])).unwrap(), Elem::E);
        // y2 a rotation (centralizes N): x^8 = r^2.
        assert_eq!(eval(&w, &d6, &a(&[1, 3, 2, 5])).unwrap(), Elem::new(2));
        assert_eq!(eval(&w, &d6, &a(&[0, 3, 4, 5])).unwrap(), Elem::E);
    }

    #[test]
    fn errors() {
        let c3 = Builtin::Cyclic(3).build().unwrap();
        let t = Term::mul(&Term::var(2), &Term::constant(Elem::new(1)));
        assert_eq!(eval(&t, &c3, &a(&[0, 0])), Err(TermError::UnboundVariable(2)));
        let bad = Term::constant(Elem::new(3));
        assert_eq!(eval(&bad, &c3, &a(&[])), Err(TermError::ConstantOutOfRange { constant: 3, order: 3 }));
    }

    #[test]
    fn deep_chains_evaluate_without_recursion() {
        let s3 = Builtin::Symmetric(3).build().unwrap();
        let mut t = Term::var(0);
        for _ in 0..200_000 {
            t = Term::mul(&t, &Term::var(0));
        }
        // x^(200001) with x of order dividing 6: 200001 = 6·33333 + 3.
        let x = Elem::new(1);
        assert_eq!(eval(&t, &s3, &Assignment::new(vec![x])).unwrap(), s3.pow(x, 3));
        // Drop is recursive; keep it off the test thread's stack.
        std::mem::forget(t);
    }
}
