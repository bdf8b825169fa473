//! Equation files.
//!
//! ```text
//! # comment
//! group = builtin:alternating(4)      or a spec path relative to this file
//! lhs = [x0,x1]*x2
//! rhs = g3
//! domain x0 = {0, 1, 2}
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::group::{Builtin, Elem, FiniteGroup, GroupSpec};
use crate::term::{parse, Term};

use super::{EquationInstance, SolverError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupRef {
    Builtin(Builtin),
    Path(PathBuf),
}

impl GroupRef {
    /// Loads the group; relative paths are taken from `base`.
    pub fn load(&self, base: &Path) -> Result<FiniteGroup, SolverError> {
        match self {
            GroupRef::Builtin(b) => Ok(b.build()?),
            GroupRef::Path(p) => {
                let path = base.join(p);
                let text = std::fs::read_to_string(&path).map_err(|e| SolverError::Io(format!("{}: {e}", path.display())))?;
                Ok(text.parse::<GroupSpec>()?.build()?)
            }
        }
    }
}

impl fmt::Display for GroupRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupRef::Builtin(b) => write!(f, "builtin:{b}"),
            GroupRef::Path(p) => write!(f, "{}", p.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquationFile {
    pub group: GroupRef,
    pub lhs: Term,
    pub rhs: Term,
    pub domains: BTreeMap<u32, Vec<Elem>>,
}

impl EquationFile {
    pub fn instance(&self, group: FiniteGroup) -> Result<EquationInstance, SolverError> {
        let inst = EquationInstance { group, lhs: self.lhs.clone(), rhs: self.rhs.clone(), domains: self.domains.clone() };
        inst.validate()?;
        Ok(inst)
    }

    pub fn from_instance(group: GroupRef, inst: &EquationInstance) -> Self {
        EquationFile { group, lhs: inst.lhs.clone(), rhs: inst.rhs.clone(), domains: inst.domains.clone() }
    }
}

fn syntax(line: usize, message: impl Into<String>) -> SolverError {
    SolverError::Syntax { line, message: message.into() }
}

fn parse_domain(line: usize, key: &str, value: &str) -> Result<(u32, Vec<Elem>), SolverError> {
    let var = key
        .strip_prefix('x')
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| syntax(line, format!("`{key}` is not a variable")))?;
    let inner = value
        .strip_prefix('{')
        .and_then(|v| v.strip_suffix('}'))
        .ok_or_else(|| syntax(line, "domain must be written `{i, j, ...}`"))?;
    let elems = inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map(Elem::new).map_err(|_| syntax(line, format!("`{s}` is not an element index"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((var, elems))
}

impl FromStr for EquationFile {
    type Err = SolverError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut group = None;
        let mut lhs = None;
        let mut rhs = None;
        let mut domains = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let raw = raw.trim();
            if raw.is_empty() || raw.starts_with('#') {
                continue;
            }
            let (key, value) = raw.split_once('=').ok_or_else(|| syntax(line, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let term = |v: &str| parse(v).map_err(|e| syntax(line, e.to_string()));
            let fresh = |taken: bool| if taken { Err(syntax(line, format!("duplicate `{key}`"))) } else { Ok(()) };
            match key {
                "group" => {
                    fresh(group.is_some())?;
                    group = Some(match value.strip_prefix("builtin:") {
                        Some(b) => GroupRef::Builtin(Builtin::parse(b).map_err(|e| syntax(line, e.to_string()))?),
                        None if !value.is_empty() => GroupRef::Path(PathBuf::from(value)),
                        None => return Err(syntax(line, "empty group reference")),
                    });
                }
                "lhs" => {
                    fresh(lhs.is_some())?;
                    lhs = Some(term(value)?);
                }
                "rhs" => {
                    fresh(rhs.is_some())?;
                    rhs = Some(term(value)?);
                }
                _ if key.starts_with("domain") => {
                    let (var, elems) = parse_domain(line, key["domain".len()..].trim(), value)?;
                    if domains.insert(var, elems).is_some() {
                        return Err(syntax(line, format!("duplicate domain for x{var}")));
                    }
                }
                _ => return Err(syntax(line, format!("unknown key `{key}`"))),
            }
        }
        let missing = |k: &str| syntax(0, format!("missing `{k}`"));
        Ok(EquationFile {
            group: group.ok_or_else(|| missing("group"))?,
            lhs: lhs.ok_or_else(|| missing("lhs"))?,
            rhs: rhs.ok_or_else(|| missing("rhs"))?,
            domains,
        })
    }
}

impl fmt::Display for EquationFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "group = {}", self.group)?;
        writeln!(f, "lhs = {}", self.lhs)?;
        writeln!(f, "rhs = {}", self.rhs)?;
        for (v, d) in &self.domains {
            let list: Vec<String> = d.iter().map(|g| g.to_string()).collect();
            writeln!(f, "domain x{v} = {{{}}}", list.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# restricted commutator\ngroup = builtin:dihedral(6)\nlhs = [x0, x1]\nrhs = g2\ndomain x0 = {0,1, 2}\n";

    #[test]
    fn parse_and_print() {
        let f: EquationFile = SAMPLE.parse().unwrap();
        assert_eq!(f.group, GroupRef::Builtin(Builtin::Dihedral(6)));
        assert_eq!(f.domains[&0], vec![Elem::new(0), Elem::new(1), Elem::new(2)]);
        let printed = f.to_string();
        assert_eq!(printed, "group = builtin:dihedral(6)\nlhs = [x0,x1]\nrhs = g2\ndomain x0 = {0, 1, 2}\n");
        assert_eq!(printed.parse::<EquationFile>().unwrap(), f);
        let g = f.group.load(Path::new(".")).unwrap();
        assert_eq!(f.instance(g).unwrap().search_space(), 18);
    }

    #[test]
    fn errors() {
        let bad = |s: &str| s.parse::<EquationFile>().unwrap_err();
        assert!(matches!(bad("group = builtin:dihedral(6)\nlhs = x0 *\nrhs = 1"), SolverError::Syntax { line: 2, .. }));
        assert!(matches!(bad("lhs = x0\nrhs = 1"), SolverError::Syntax { line: 0, .. }));
        assert!(matches!(bad("group = builtin:nope(3)\nlhs = x0\nrhs = 1"), SolverError::Syntax { line: 1, .. }));
        assert!(matches!(bad("group = x\nlhs = x0\nlhs = x1\nrhs = 1"), SolverError::Syntax { line: 3, .. }));
        assert!(matches!(bad("group = x\nlhs = x0\nrhs = 1\ndomain y = {1}"), SolverError::Syntax { line: 4, .. }));
        let f: EquationFile = "group = builtin:cyclic(3)\nlhs = x0\nrhs = 1\ndomain x1 = {1}".parse().unwrap();
        let g = f.group.load(Path::new(".")).unwrap();
        assert!(matches!(f.instance(g), Err(SolverError::InvalidInstance(_))));
    }

    #[test]
    fn group_path_is_relative_to_base() {
        let dir = std::env::temp_dir().join(format!("groupeq-eqfile-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("h.group"), "kind = builtin\nname = cyclic(4)\n").unwrap();
        let f: EquationFile = "group = h.group\nlhs = x0\nrhs = 1".parse().unwrap();
        assert_eq!(f.group.load(&dir).unwrap().order(), 4);
        assert!(matches!(f.group.load(Path::new("/nonexistent")), Err(SolverError::Io(_))));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
