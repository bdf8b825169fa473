//! Graph and CNF inputs in DIMACS form.
//!
//! Graphs use `p edge <n> <m>` followed by `m` lines `e <u> <v>`; CNFs use
//! `p cnf <vars> <clauses>` followed by zero-terminated literal lists. Both
//! are 1-based on disk and 0-based in memory for vertices; CNF literals stay
//! signed and 1-based. Lines starting with `c` are comments.

use std::fmt;
use std::str::FromStr;

use super::ReductionError;

fn syntax(line: usize, message: impl Into<String>) -> ReductionError {
    ReductionError::Syntax { line, message: message.into() }
}

/// Simple undirected graph with edges stored as sorted `(u, v)`, `u < v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringInstance {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl ColoringInstance {
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, ReductionError> {
        let mut norm = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(ReductionError::InvalidInstance(format!("self-loop at vertex {u}")));
            }
            if u >= vertex_count || v >= vertex_count {
                return Err(ReductionError::InvalidInstance(format!(
                    "edge ({u},{v}) outside {vertex_count} vertices"
                )));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        norm.dedup();
        Ok(ColoringInstance { vertex_count, edges: norm })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn is_proper(&self, colors: &[usize]) -> bool {
        colors.len() == self.vertex_count && self.edges.iter().all(|&(u, v)| colors[u] != colors[v])
    }
}

fn header<'a>(line: usize, text: &'a str, format: &str) -> Result<(usize, usize), ReductionError> {
    let parts: Vec<&'a str> = text.split_whitespace().collect();
    match parts.as_slice() {
        ["p", f, a, b] if *f == format => Ok((
            a.parse().map_err(|_| syntax(line, format!("bad count `{a}`")))?,
            b.parse().map_err(|_| syntax(line, format!("bad count `{b}`")))?,
        )),
        _ => Err(syntax(line, format!("expected `p {format} <n> <m>`"))),
    }
}

impl FromStr for ColoringInstance {
    type Err = ReductionError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut dims = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let raw = raw.trim();
            if raw.is_empty() || raw.starts_with('c') {
                continue;
            }
            if raw.starts_with('p') {
                if dims.is_some() {
                    return Err(syntax(line, "duplicate problem line"));
                }
                dims = Some(header(line, raw, "edge")?);
                continue;
            }
            let Some((n, _)) = dims else {
                return Err(syntax(line, "edge before problem line"));
            };
            let parts: Vec<&str> = raw.split_whitespace().collect();
            let ["e", u, v] = parts.as_slice() else {
                return Err(syntax(line, "expected `e <u> <v>`"));
            };
            let vertex = |s: &str| match s.parse::<usize>() {
                Ok(x) if (1..=n).contains(&x) => Ok(x - 1),
                _ => Err(syntax(line, format!("vertex `{s}` not in 1..={n}"))),
            };
            let (u, v) = (vertex(u)?, vertex(v)?);
            if u == v {
                return Err(syntax(line, "self-loop"));
            }
            edges.push((u, v));
        }
        let (n, m) = dims.ok_or_else(|| syntax(0, "missing problem line"))?;
        if edges.len() != m {
            return Err(syntax(0, format!("header declares {m} edges, found {}", edges.len())));
        }
        ColoringInstance::new(n, edges)
    }
}

impl fmt::Display for ColoringInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p edge {} {}", self.vertex_count, self.edges.len())?;
        for (u, v) in &self.edges {
            writeln!(f, "e {} {}", u + 1, v + 1)?;
        }
        Ok(())
    }
}

/// 3-CNF with clauses padded to exactly three literals and sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfInstance {
    variable_count: usize,
    clauses: Vec<[i32; 3]>,
}

impl CnfInstance {
    /// Clauses with one or two literals are padded by repeating the last
    /// literal. Empty clauses and clauses wider than three are rejected.
    pub fn new<C: AsRef<[i32]>>(variable_count: usize, clauses: impl IntoIterator<Item = C>) -> Result<Self, ReductionError> {
        let mut out = Vec::new();
        for c in clauses {
            let c = c.as_ref();
            if let Some(&l) = c.iter().find(|l| **l == 0 || l.unsigned_abs() as usize > variable_count) {
                return Err(ReductionError::InvalidInstance(format!("literal {l} outside 1..={variable_count}")));
            }
            let padded = match *c {
                [] => return Err(ReductionError::InvalidInstance("empty clause".into())),
                [a] => [a, a, a],
                [a, b] => [a, b, b],
                [a, b, c] => [a, b, c],
                _ => return Err(ReductionError::InvalidInstance(format!("clause {c:?} has more than 3 literals"))),
            };
            out.push(padded);
        }
        out.sort_unstable();
        Ok(CnfInstance { variable_count, clauses: out })
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn clauses(&self) -> &[[i32; 3]] {
        &self.clauses
    }

    /// `truth[i]` is the value of variable `i + 1`.
    pub fn is_satisfied_by(&self, truth: &[bool]) -> bool {
        truth.len() == self.variable_count
            && self.clauses.iter().all(|c| c.iter().any(|&l| truth[l.unsigned_abs() as usize - 1] == (l > 0)))
    }
}

impl FromStr for CnfInstance {
    type Err = ReductionError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut dims = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let raw = raw.trim();
            if raw.is_empty() || raw.starts_with('c') {
                continue;
            }
            if raw.starts_with('%') {
                break;
            }
            if raw.starts_with('p') {
                if dims.is_some() {
                    return Err(syntax(line, "duplicate problem line"));
                }
                dims = Some(header(line, raw, "cnf")?);
                continue;
            }
            let Some((nv, _)) = dims else {
                return Err(syntax(line, "clause before problem line"));
            };
            for tok in raw.split_whitespace() {
                let l: i32 = tok.parse().map_err(|_| syntax(line, format!("`{tok}` is not a literal")))?;
                if l == 0 {
                    if current.is_empty() {
                        return Err(syntax(line, "empty clause"));
                    }
                    clauses.push(std::mem::take(&mut current));
                } else if l.unsigned_abs() as usize > nv {
                    return Err(syntax(line, format!("literal {l} outside 1..={nv}")));
                } else {
                    current.push(l);
                }
            }
        }
        let (nv, nc) = dims.ok_or_else(|| syntax(0, "missing problem line"))?;
        if !current.is_empty() {
            return Err(syntax(0, "last clause is not terminated by 0"));
        }
        if clauses.len() != nc {
            return Err(syntax(0, format!("header declares {nc} clauses, found {}", clauses.len())));
        }
        CnfInstance::new(nv, clauses)
    }
}

impl fmt::Display for CnfInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p cnf {} {}", self.variable_count, self.clauses.len())?;
        for [a, b, c] in &self.clauses {
            writeln!(f, "{a} {b} {c} 0")?;
        }
        Ok(())
    }
}
