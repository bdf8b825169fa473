//! Exhaustive deciders for equation solvability and identity checking.
//!
//! Assignments are enumerated in lexicographic order: variables by index,
//! the lowest variable most significant, each domain in ascending element
//! order. Both deciders report the lexicographically first witness or
//! counterexample regardless of the worker count. Parallel runs split the
//! rank space into blocks that workers claim in increasing order; a worker
//! that hits stops every block above its own, and blocks below it are
//! always finished, so the smallest hit is the one reported.

mod file;
mod oracle;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::Serialize;
use thiserror::Error;

use crate::group::{Elem, FiniteGroup, GroupError};
use crate::term::{Assignment, Program, Term, TermError};

pub use file::{EquationFile, GroupRef};
pub use oracle::{coloring_oracle, sat_oracle, SAT_ORACLE_MAX_VARIABLES};

pub const DEFAULT_CAP: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("search space of {size} assignments exceeds the cap of {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u64 },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0}")]
    Io(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub cap: u64,
    pub workers: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { cap: DEFAULT_CAP, workers: 1 }
    }
}

impl SolverConfig {
    pub fn with_workers(workers: usize) -> Self {
        SolverConfig { workers, ..Self::default() }
    }
}

/// `lhs = rhs` over `group`, with optional per-variable domains. Variables
/// without an entry range over the whole group.
#[derive(Clone, Debug)]
pub struct EquationInstance {
    pub group: FiniteGroup,
    pub lhs: Term,
    pub rhs: Term,
    pub domains: BTreeMap<u32, Vec<Elem>>,
}

impl EquationInstance {
    pub fn new(group: FiniteGroup, lhs: Term, rhs: Term) -> Self {
        EquationInstance { group, lhs, rhs, domains: BTreeMap::new() }
    }

    pub fn with_domain(mut self, var: u32, domain: impl IntoIterator<Item = Elem>) -> Self {
        self.domains.insert(var, domain.into_iter().collect());
        self
    }

    pub fn variables(&self) -> BTreeSet<u32> {
        let mut v = self.lhs.variables();
        v.extend(self.rhs.variables());
        v
    }

    /// Checks constants, domains, and that every restricted variable occurs
    /// in the equation.
    pub fn validate(&self) -> Result<(), SolverError> {
        let order = self.group.order();
        for t in [&self.lhs, &self.rhs] {
            if let Some(c) = t.constants().into_iter().find(|c| c.idx() >= order) {
                return Err(TermError::ConstantOutOfRange { constant: c.idx(), order }.into());
            }
        }
        let vars = self.variables();
        for (v, d) in &self.domains {
            if !vars.contains(v) {
                return Err(SolverError::InvalidInstance(format!("domain given for x{v}, which does not occur")));
            }
            if d.is_empty() {
                return Err(SolverError::InvalidInstance(format!("domain of x{v} is empty")));
            }
            if let Some(g) = d.iter().find(|g| g.idx() >= order) {
                return Err(SolverError::InvalidInstance(format!("domain of x{v} contains g{g}, outside the group")));
            }
        }
        Ok(())
    }

    /// Number of assignments, saturating.
    pub fn search_space(&self) -> u128 {
        self.layout().1.iter().fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128))
    }

    fn layout(&self) -> (Vec<u32>, Vec<Vec<Elem>>) {
        let vars: Vec<u32> = self.variables().into_iter().collect();
        let domains = vars
            .iter()
            .map(|v| match self.domains.get(v) {
                Some(d) => {
                    let mut d = d.clone();
                    d.sort();
                    d.dedup();
                    d
                }
                None => self.group.elements().collect(),
            })
            .collect();
        (vars, domains)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveResult {
    pub solvable: bool,
    pub witness: Option<Assignment>,
    /// Assignments a sequential scan visits before stopping; independent of
    /// the worker count.
    pub assignments_examined: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityResult {
    pub holds: bool,
    pub counterexample: Option<Assignment>,
    pub assignments_examined: u64,
}

pub fn solve_eq(inst: &EquationInstance, config: &SolverConfig) -> Result<SolveResult, SolverError> {
    let (hit, examined) = search(inst, config, true)?;
    Ok(SolveResult { solvable: hit.is_some(), witness: hit, assignments_examined: examined })
}

pub fn check_id(inst: &EquationInstance, config: &SolverConfig) -> Result<IdentityResult, SolverError> {
    let (hit, examined) = search(inst, config, false)?;
    Ok(IdentityResult { holds: hit.is_none(), counterexample: hit, assignments_examined: examined })
}

/// Compiled instance plus its mixed-radix layout.
struct Space<'a> {
    group: &'a FiniteGroup,
    program: Program,
    vars: Vec<u32>,
    domains: Vec<Vec<Elem>>,
    width: usize,
    want_equal: bool,
}

impl Space<'_> {
    fn digits(&self, mut rank: u64) -> Vec<usize> {
        let mut d = vec![0; self.vars.len()];
        for i in (0..d.len()).rev() {
            let n = self.domains[i].len() as u64;
            d[i] = (rank % n) as usize;
            rank /= n;
        }
        d
    }

    fn assignment(&self, digits: &[usize]) -> Vec<Elem> {
        let mut values = vec![Elem::E; self.width];
        for (i, &v) in self.vars.iter().enumerate() {
            values[v as usize] = self.domains[i][digits[i]];
        }
        values
    }

    /// Scans ranks `[start, end)` and returns the first hit. Polls `stop`
    /// every few thousand assignments and gives up once it drops below
    /// `block`.
    fn scan(&self, start: u64, end: u64, block: u64, stop: &AtomicU64) -> Option<u64> {
        let mut digits = self.digits(start);
        let mut values = self.assignment(&digits);
        let mut scratch = Vec::with_capacity(self.program.len());
        for rank in start..end {
            if rank & 0xfff == 0 && stop.load(Ordering::Relaxed) < block {
                return None;
            }
            self.program.run(self.group, &values, &mut scratch);
            let equal = self.program.root(0, &scratch) == self.program.root(1, &scratch);
            if equal == self.want_equal {
                return Some(rank);
            }
            // Odometer step, last variable fastest.
            for i in (0..digits.len()).rev() {
                digits[i] += 1;
                if digits[i] < self.domains[i].len() {
                    values[self.vars[i] as usize] = self.domains[i][digits[i]];
                    break;
                }
                digits[i] = 0;
                values[self.vars[i] as usize] = self.domains[i][0];
            }
        }
        None
    }
}

fn search(inst: &EquationInstance, config: &SolverConfig, want_equal: bool) -> Result<(Option<Assignment>, u64), SolverError> {
    inst.validate()?;
    let size = inst.search_space();
    if size > config.cap as u128 {
        return Err(SolverError::SearchSpaceTooLarge { size, cap: config.cap });
    }
    let total = size as u64;
    let (vars, domains) = inst.layout();
    let width = vars.last().map_or(0, |&v| v as usize + 1);
    let program = Program::compile(&[&inst.lhs, &inst.rhs]);
    program.check(&inst.group, width)?;
    let space = Space { group: &inst.group, program, vars, domains, width, want_equal };

    let workers = config.workers.max(1);
    let hit = if workers == 1 {
        let stop = AtomicU64::new(u64::MAX);
        space.scan(0, total, 0, &stop)
    } else {
        parallel_scan(&space, total, workers)
    };
    Ok(match hit {
        Some(rank) => (Some(Assignment::new(space.assignment(&space.digits(rank)))), rank + 1),
        None => (None, total),
    })
}

fn parallel_scan(space: &Space<'_>, total: u64, workers: usize) -> Option<u64> {
    let block_size = (total / (workers as u64 * 64)).clamp(256, 1 << 20);
    let blocks = total.div_ceil(block_size);
    let next = AtomicU64::new(0);
    // Lowest block index known to contain a hit.
    let stop = AtomicU64::new(u64::MAX);
    let best: Mutex<Option<u64>> = Mutex::new(None);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let block = next.fetch_add(1, Ordering::Relaxed);
                if block >= blocks || block > stop.load(Ordering::Relaxed) {
                    return;
                }
                let start = block * block_size;
                let end = (start + block_size).min(total);
                if let Some(rank) = space.scan(start, end, block, &stop) {
                    stop.fetch_min(block, Ordering::Relaxed);
                    let mut b = best.lock().expect("no worker panics while holding the lock");
                    if b.map_or(true, |r| rank < r) {
                        *b = Some(rank);
                    }
                    return;
                }
            });
        }
    });
    best.into_inner().expect("workers joined")
}
