//! Compilers from graph coloring and 3-SAT into equations over `(H, [·,·])`
//! and `(H, w)`, given a group `H` with a minimal normal subgroup `N`
//! satisfying `[H,N] = N` and `[H',N] = 1`.
//!
//! Variable layout of a compiled equation, in index order: one variable per
//! vertex (resp. CNF variable), then the inputs `z1..zk` of `s_N`, then one
//! more variable standing for `x` itself. The main equation substitutes
//! `x := s_N(z̄)`; the restricted twin keeps `x` and quantifies it over `N`.

mod instance;

use serde::Serialize;
use thiserror::Error;

use crate::group::{Elem, FiniteGroup};
use crate::solver::{check_id, coloring_oracle, sat_oracle, solve_eq, EquationInstance, SolverConfig, SolverError};
use crate::structure::{StructureError, Subgroup};
use crate::term::{eval, expand, substitute, Assignment, Term};

pub use instance::{CnfInstance, ColoringInstance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("|H/C_H(N)| = {index} is too small for the coloring gadget (needs > 2)")]
    IndexTooSmall { index: usize },
    #[error("|H/C_H(N)| = {index}; the SAT gadget needs exactly 2")]
    IndexNotTwo { index: usize },
    #[error("witness does not back-translate: {0}")]
    WitnessInvalid(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// `t_k(x, y1..yk) = [...[[x,y1],y2]...,yk]` with `x = x0`, `yi = xi`.
pub fn build_t_chain(k: u32) -> Term {
    t_chain(&Term::var(0), &(1..=k).map(Term::var).collect::<Vec<_>>())
}

fn t_chain(x: &Term, ys: &[Term]) -> Term {
    ys.iter().fold(x.clone(), |acc, y| Term::comm(&acc, y))
}

/// `w_1 = w(x,y1,y2,y3)`, `w_{i+1} = w(w_i, y_{3i+1}, y_{3i+2}, y_{3i+3})`
/// with `x = x0`, `yj = xj`.
pub fn build_w_chain(n: u32) -> Term {
    let ys: Vec<[Term; 3]> = (0..n).map(|i| [1, 2, 3].map(|j| Term::var(3 * i + j))).collect();
    w_chain(&Term::var(0), &ys)
}

fn w_chain(x: &Term, triples: &[[Term; 3]]) -> Term {
    triples.iter().fold(x.clone(), |acc, [a, b, c]| Term::w(&acc, a, b, c))
}

/// A polynomial `[n1,z1]···[nk,zk]` whose range over `H` is exactly `N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SN {
    pub constants: Vec<Elem>,
    /// Variables `z1..zk`.
    pub inputs: Vec<u32>,
    #[serde(serialize_with = "as_text")]
    pub term: Term,
}

fn as_text<S: serde::Serializer>(t: &Term, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(t)
}

/// Checks `N ⊴ H`, `N` abelian, `[H,N] = N`, `[H',N] = 1`.
fn check_pair(h: &FiniteGroup, n: &Subgroup) -> Result<(), ReductionError> {
    if !n.is_normal() {
        return Err(ReductionError::PreconditionFailed("N is not normal in H".into()));
    }
    if n.is_trivial() {
        return Err(ReductionError::PreconditionFailed("N is trivial".into()));
    }
    let m = n.members();
    if m.iter().any(|&a| m.iter().any(|&b| h.mul(a, b) != h.mul(b, a))) {
        return Err(ReductionError::PreconditionFailed("N is not abelian".into()));
    }
    if h.commutator_subgroup(&Subgroup::whole(h), n) != *n {
        return Err(ReductionError::PreconditionFailed("[H,N] != N".into()));
    }
    if !h.commutator_subgroup(&h.derived_subgroup(), n).is_trivial() {
        return Err(ReductionError::PreconditionFailed("[H',N] != 1".into()));
    }
    Ok(())
}

/// Greedy choice of the constants of `s_N`, with inputs numbered from
/// `first_var`. Each round takes the smallest `n ∈ N` maximizing
/// `|S · {[n,z] : z ∈ H}|` until `S = N`.
pub fn find_s_n(h: &FiniteGroup, n: &Subgroup, first_var: u32) -> Result<SN, ReductionError> {
    if !n.is_normal() {
        return Err(ReductionError::PreconditionFailed("N is not normal in H".into()));
    }
    if h.commutator_subgroup(&Subgroup::whole(h), n) != *n {
        return Err(ReductionError::PreconditionFailed("[H,N] != N".into()));
    }
    let range_of = |c: Elem| -> Vec<bool> {
        let mut r = vec![false; h.order()];
        for z in h.elements() {
            r[h.commutator(c, z).idx()] = true;
        }
        r
    };
    let times = |s: &[bool], r: &[bool]| -> Vec<bool> {
        let mut out = vec![false; h.order()];
        for a in h.elements().filter(|a| s[a.idx()]) {
            for b in h.elements().filter(|b| r[b.idx()]) {
                out[h.mul(a, b).idx()] = true;
            }
        }
        out
    };
    let size = |s: &[bool]| s.iter().filter(|&&b| b).count();
    let mut s = vec![false; h.order()];
    s[0] = true;
    let mut constants = Vec::new();
    while size(&s) < n.order() {
        let (best, next) = n
            .members()
            .iter()
            .map(|&c| (c, times(&s, &range_of(c))))
            .max_by(|(ca, a), (cb, b)| size(a).cmp(&size(b)).then(cb.cmp(ca)))
            .expect("N is non-empty");
        if size(&next) == size(&s) {
            return Err(ReductionError::PreconditionFailed("commutator ranges stall below N".into()));
        }
        constants.push(best);
        s = next;
    }
    let inputs: Vec<u32> = (0..constants.len() as u32).map(|i| first_var + i).collect();
    let factors: Vec<Term> =
        constants.iter().zip(&inputs).map(|(&c, &z)| Term::comm(&Term::constant(c), &Term::var(z))).collect();
    let sn = SN { term: Term::product(&factors), constants, inputs };
    verify_s_n(h, n, &sn)?;
    Ok(sn)
}

/// Re-derives the range of `s_N`: by enumeration when `|H|^k` is small,
/// otherwise by composing the factor ranges.
fn verify_s_n(h: &FiniteGroup, n: &Subgroup, sn: &SN) -> Result<(), ReductionError> {
    let k = sn.constants.len() as u32;
    let mut hit = vec![false; h.order()];
    if (h.order() as u64).checked_pow(k).is_some_and(|c| c <= 1_000_000) {
        let width = sn.inputs.last().map_or(0, |&v| v as usize + 1);
        let mut values = vec![Elem::E; width];
        let mut digits = vec![0usize; k as usize];
        loop {
            for (d, &v) in digits.iter().zip(&sn.inputs) {
                values[v as usize] = Elem::new(*d);
            }
            let x = eval(&sn.term, h, &Assignment::new(values.clone())).expect("s_N is well formed");
            hit[x.idx()] = true;
            let Some(i) = (0..digits.len()).rev().find(|&i| digits[i] + 1 < h.order()) else { break };
            digits[i] += 1;
            digits[i + 1..].iter_mut().for_each(|d| *d = 0);
        }
    } else {
        hit[0] = true;
        for &c in &sn.constants {
            let r: Vec<Elem> = h.elements().map(|z| h.commutator(c, z)).collect();
            let mut next = vec![false; h.order()];
            for a in h.elements().filter(|a| hit[a.idx()]) {
                for &b in &r {
                    next[h.mul(a, b).idx()] = true;
                }
            }
            hit = next;
        }
    }
    let range: Vec<Elem> = h.elements().filter(|g| hit[g.idx()]).collect();
    if range != n.members() {
        return Err(ReductionError::PreconditionFailed(format!("range of s_N has {} elements, |N| = {}", range.len(), n.order())));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Equation `lhs = n` for the smallest non-identity `n ∈ N`.
    Eq,
    /// Identity `lhs = e`.
    Id,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhsKind {
    NonidentityN,
    IdentityE,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Coloring(ColoringInstance),
    Sat(CnfInstance),
}

/// Which equation variables play which part.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoleMap {
    pub gadget: &'static str,
    /// Variable of vertex `i` (coloring) or of CNF variable `i + 1` (SAT).
    pub sources: Vec<u32>,
    pub s_n: SN,
    /// The variable that stands for `x` in the restricted twin.
    pub x: u32,
    /// Literal-flip constant `b` (SAT only).
    pub flip: Option<Elem>,
    /// Number of colors `|H/C_H(N)|` (coloring only).
    pub colors: Option<usize>,
    pub rhs: Elem,
    pub rhs_kind: RhsKind,
    pub n: Vec<Elem>,
    pub centralizer: Vec<Elem>,
}

#[derive(Clone, Debug)]
pub struct ReductionOutput {
    pub source: Source,
    pub variant: Variant,
    /// `r(s_N(z̄), ...) = rhs`, every variable over `H`.
    pub equation: EquationInstance,
    /// `r(x, ...) = rhs` with `x` over `N`.
    pub restricted: EquationInstance,
    /// `r` before substitution, in `x` and the source variables.
    pub core: Term,
    pub role_map: RoleMap,
    pub target_subgroup: Subgroup,
    pub centralizer: Subgroup,
}

fn rhs_for(n: &Subgroup, variant: Variant) -> (Elem, RhsKind) {
    match variant {
        Variant::Eq => (n.members()[1], RhsKind::NonidentityN),
        Variant::Id => (Elem::E, RhsKind::IdentityE),
    }
}

struct Assembled {
    core: Term,
    sources: Vec<u32>,
    x: u32,
    sn: SN,
    sn_term: Term,
    flip: Option<Elem>,
    colors: Option<usize>,
}

fn assemble(
    h: &FiniteGroup,
    n: &Subgroup,
    centralizer: &Subgroup,
    variant: Variant,
    source: Source,
    a: Assembled,
) -> ReductionOutput {
    let (rhs, rhs_kind) = rhs_for(n, variant);
    let rhs_term = Term::constant(rhs);
    let lhs = substitute(&a.core, a.x, &a.sn_term);
    let equation = EquationInstance::new(h.clone(), lhs, rhs_term.clone());
    let restricted = EquationInstance::new(h.clone(), a.core.clone(), rhs_term).with_domain(a.x, n.members().iter().copied());
    let gadget = match source {
        Source::Coloring(_) => "coloring",
        Source::Sat(_) => "sat",
    };
    ReductionOutput {
        source,
        variant,
        equation,
        restricted,
        core: a.core,
        role_map: RoleMap {
            gadget,
            sources: a.sources,
            s_n: a.sn,
            x: a.x,
            flip: a.flip,
            colors: a.colors,
            rhs,
            rhs_kind,
            n: n.members().to_vec(),
            centralizer: centralizer.members().to_vec(),
        },
        target_subgroup: n.clone(),
        centralizer: centralizer.clone(),
    }
}

/// Coloring gadget: `r = t_{|E|}(x, (y_u y_v⁻¹)_{(u,v) ∈ E})` in the
/// commutator signature. With no edges `r = x`.
pub fn reduce_coloring(
    h: &FiniteGroup,
    n: &Subgroup,
    graph: &ColoringInstance,
    variant: Variant,
) -> Result<ReductionOutput, ReductionError> {
    check_pair(h, n)?;
    let centralizer = h.centralizer(n.members());
    let index = h.order() / centralizer.order();
    if index <= 2 {
        return Err(ReductionError::IndexTooSmall { index });
    }
    let nv = graph.vertex_count() as u32;
    let sn = find_s_n(h, n, nv)?;
    let x = nv + sn.inputs.len() as u32;
    let ys: Vec<Term> = graph
        .edges()
        .iter()
        .map(|&(u, v)| Term::mul(&Term::var(u as u32), &Term::inv(&Term::var(v as u32))))
        .collect();
    let core = t_chain(&Term::var(x), &ys);
    let sn_term = sn.term.clone();
    let a = Assembled { core, sources: (0..nv).collect(), x, sn, sn_term, flip: None, colors: Some(index) };
    Ok(assemble(h, n, &centralizer, variant, Source::Coloring(graph.clone()), a))
}

/// SAT gadget: one `w` level per clause over the primed literals, where a
/// positive literal `z` becomes `z'` and `¬z` becomes `b·z'` for the
/// smallest `b ∉ C_H(N)`. An empty formula compiles to `w(x,1,1,1)`.
pub fn reduce_sat(h: &FiniteGroup, n: &Subgroup, cnf: &CnfInstance, variant: Variant) -> Result<ReductionOutput, ReductionError> {
    let centralizer = h.centralizer(n.members());
    let b = h
        .elements()
        .find(|g| !centralizer.contains(*g))
        .ok_or_else(|| ReductionError::IndexNotTwo { index: 1 })?;
    reduce_sat_with_flip(h, n, cnf, variant, b)
}

/// [`reduce_sat`] with an explicit flip constant; any `b ∉ C_H(N)` is
/// correct, other choices exist to test that verification notices.
pub fn reduce_sat_with_flip(
    h: &FiniteGroup,
    n: &Subgroup,
    cnf: &CnfInstance,
    variant: Variant,
    b: Elem,
) -> Result<ReductionOutput, ReductionError> {
    check_pair(h, n)?;
    let centralizer = h.centralizer(n.members());
    let index = h.order() / centralizer.order();
    if index != 2 {
        return Err(ReductionError::IndexNotTwo { index });
    }
    if !h.contains(b) {
        return Err(ReductionError::InvalidInstance(format!("flip constant g{b} is not in H")));
    }
    let nv = cnf.variable_count() as u32;
    let sn = find_s_n(h, n, nv)?;
    let x = nv + sn.inputs.len() as u32;
    let bt = Term::constant(b);
    let literal = |l: i32| {
        let z = Term::var(l.unsigned_abs() - 1);
        if l > 0 {
            z
        } else {
            Term::mul(&bt, &z)
        }
    };
    let mut triples: Vec<[Term; 3]> = cnf.clauses().iter().map(|c| c.map(literal)).collect();
    if triples.is_empty() {
        triples.push([Term::identity(), Term::identity(), Term::identity()]);
    }
    let core = w_chain(&Term::var(x), &triples);
    // The w signature has no commutator symbol.
    let sn_term = expand(&sn.term);
    let a = Assembled { core, sources: (0..nv).collect(), x, sn, sn_term, flip: Some(b), colors: None };
    Ok(assemble(h, n, &centralizer, variant, Source::Sat(cnf.clone()), a))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum Solution {
    Coloring(Vec<usize>),
    Truth(Vec<bool>),
}

/// Maps an equation witness back to a coloring (coset of `C_H(N)` of each
/// vertex value) or a truth assignment (`z` true iff `z' ∈ C_H(N)`), and
/// checks the result. CNF variables absent from the formula are false.
pub fn translate_witness(out: &ReductionOutput, witness: &Assignment) -> Result<Solution, ReductionError> {
    if out.variant == Variant::Id {
        return Err(ReductionError::NotApplicable("identity instances have no witness to translate".into()));
    }
    let eq = &out.equation;
    let (l, r) = (eval(&eq.lhs, &eq.group, witness), eval(&eq.rhs, &eq.group, witness));
    if l.is_err() || l != r {
        return Err(ReductionError::WitnessInvalid("assignment does not solve the equation".into()));
    }
    let value = |v: u32| witness.get(v).unwrap_or(Elem::E);
    let used = eq.variables();
    match &out.source {
        Source::Coloring(graph) => {
            let cosets = eq.group.quotient(&out.centralizer)?;
            let colors: Vec<usize> = out.role_map.sources.iter().map(|&v| cosets.image(value(v)).idx()).collect();
            if !graph.is_proper(&colors) {
                return Err(ReductionError::WitnessInvalid(format!("coloring {colors:?} is not proper")));
            }
            Ok(Solution::Coloring(colors))
        }
        Source::Sat(cnf) => {
            let truth: Vec<bool> =
                out.role_map.sources.iter().map(|&v| used.contains(&v) && out.centralizer.contains(value(v))).collect();
            if !cnf.is_satisfied_by(&truth) {
                return Err(ReductionError::WitnessInvalid(format!("assignment {truth:?} does not satisfy the formula")));
            }
            Ok(Solution::Truth(truth))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub gadget: &'static str,
    pub variant: Variant,
    /// Solvable (eq variant) or holds (id variant), with `x := s_N(z̄)`.
    pub decided: bool,
    /// Same question with `x` quantified over `N` directly.
    pub restricted_decided: bool,
    pub oracle_accepts: bool,
    /// What `decided` must be: `oracle_accepts` for eq, its negation for id.
    pub expected: bool,
    pub agreement: bool,
    pub witness: Option<Assignment>,
    pub counterexample: Option<Assignment>,
    pub translated: Option<Solution>,
    /// Why the witness failed to back-translate, if it did.
    pub translation_error: Option<String>,
    pub oracle_witness: Option<Solution>,
    pub assignments_examined: u64,
}

/// Decides the compiled instance and its restricted twin, runs the matching
/// oracle, and back-translates any witness.
pub fn verify_reduction(out: &ReductionOutput, config: &SolverConfig) -> Result<VerificationReport, ReductionError> {
    let oracle_witness = match &out.source {
        Source::Coloring(g) => {
            let k = out.role_map.colors.expect("coloring outputs record the color count");
            coloring_oracle(g, k, config.cap)?.map(Solution::Coloring)
        }
        Source::Sat(f) => sat_oracle(f)?.map(Solution::Truth),
    };
    let oracle_accepts = oracle_witness.is_some();
    let (decided, restricted_decided, witness, counterexample, examined) = match out.variant {
        Variant::Eq => {
            let r = solve_eq(&out.equation, config)?;
            let rr = solve_eq(&out.restricted, config)?;
            (r.solvable, rr.solvable, r.witness, None, r.assignments_examined)
        }
        Variant::Id => {
            let r = check_id(&out.equation, config)?;
            let rr = check_id(&out.restricted, config)?;
            (r.holds, rr.holds, None, r.counterexample, r.assignments_examined)
        }
    };
    let expected = match out.variant {
        Variant::Eq => oracle_accepts,
        Variant::Id => !oracle_accepts,
    };
    let (translated, translation_error) = match witness.as_ref().map(|w| translate_witness(out, w)) {
        Some(Ok(s)) => (Some(s), None),
        Some(Err(e)) => (None, Some(e.to_string())),
        None => (None, None),
    };
    Ok(VerificationReport {
        gadget: out.role_map.gadget,
        variant: out.variant,
        decided,
        restricted_decided,
        oracle_accepts,
        expected,
        agreement: decided == expected && restricted_decided == decided && translation_error.is_none(),
        witness,
        counterexample,
        translated,
        translation_error,
        oracle_witness,
        assignments_examined: examined,
    })
}
