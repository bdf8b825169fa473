//! Group-spec files.
//!
//! A spec is a sequence of `key = value` lines; blank lines and lines
//! starting with `#` are ignored. The `kind` key selects the layout:
//!
//! ```text
//! kind = builtin          kind = perm             kind = table
//! name = dihedral(6)      degree = 3              order = 2
//!                         gen = 1 0 2             row = 0 1
//!                         gen = 1 2 0             row = 1 0
//! ```
//!
//! `gen` lines carry one-line permutation images and `row` lines carry the
//! multiplication table in row-major order; both repeat in order. `Display`
//! prints the canonical form, so parse → print → parse is byte-stable.

use std::fmt;
use std::str::FromStr;

use super::{Builtin, FiniteGroup, GroupError, Permutation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Table(Vec<Vec<usize>>),
    Perm { degree: usize, generators: Vec<Permutation> },
    Builtin(Builtin),
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup, GroupError> {
        match self {
            GroupSpec::Table(rows) => FiniteGroup::from_table(rows),
            GroupSpec::Perm { generators, .. } => FiniteGroup::from_permutations(generators),
            GroupSpec::Builtin(b) => b.build(),
        }
    }

    /// A `table` spec reproducing `g` exactly.
    pub fn from_group(g: &FiniteGroup) -> Self {
        GroupSpec::Table(g.table())
    }
}

fn syntax(line: usize, message: impl Into<String>) -> GroupError {
    GroupError::SpecSyntax { line, message: message.into() }
}

fn numbers(line: usize, value: &str) -> Result<Vec<usize>, GroupError> {
    value
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| syntax(line, format!("`{t}` is not a non-negative integer"))))
        .collect()
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut kind: Option<String> = None;
        let mut name: Option<String> = None;
        let mut size: Option<(usize, usize)> = None; // (line, value) of degree/order
        let mut rows: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut gens: Vec<(usize, Vec<usize>)> = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or_else(|| syntax(line, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let set_once = |slot: &mut Option<String>| -> Result<(), GroupError> {
                if slot.replace(value.to_string()).is_some() {
                    return Err(syntax(line, format!("duplicate `{key}`")));
                }
                Ok(())
            };
            match key {
                "kind" => set_once(&mut kind)?,
                "name" => set_once(&mut name)?,
                "degree" | "order" => {
                    let v = value.parse().map_err(|_| syntax(line, format!("bad {key} `{value}`")))?;
                    if size.replace((line, v)).is_some() {
                        return Err(syntax(line, "duplicate degree/order"));
                    }
                }
                "row" => rows.push((line, numbers(line, value)?)),
                "gen" => gens.push((line, numbers(line, value)?)),
                _ => return Err(syntax(line, format!("unknown key `{key}`"))),
            }
        }

        let kind = kind.ok_or_else(|| syntax(0, "missing `kind`"))?;
        let reject = |present: bool, key: &str| -> Result<(), GroupError> {
            if present {
                Err(syntax(0, format!("`{key}` is not allowed for kind = {kind}")))
            } else {
                Ok(())
            }
        };
        match kind.as_str() {
            "builtin" => {
                reject(size.is_some(), "degree/order")?;
                reject(!rows.is_empty(), "row")?;
                reject(!gens.is_empty(), "gen")?;
                let name = name.ok_or_else(|| syntax(0, "missing `name`"))?;
                Ok(GroupSpec::Builtin(Builtin::parse(&name)?))
            }
            "perm" => {
                reject(name.is_some(), "name")?;
                reject(!rows.is_empty(), "row")?;
                let (_, degree) = size.ok_or_else(|| syntax(0, "missing `degree`"))?;
                let generators = gens
                    .into_iter()
                    .map(|(line, images)| {
                        if images.len() != degree {
                            return Err(syntax(line, format!("generator has {} images, expected {degree}", images.len())));
                        }
                        Permutation::from_images(images)
                    })
                    .collect::<Result<_, _>>()?;
                Ok(GroupSpec::Perm { degree, generators })
            }
            "table" => {
                reject(name.is_some(), "name")?;
                reject(!gens.is_empty(), "gen")?;
                let (line, order) = size.ok_or_else(|| syntax(0, "missing `order`"))?;
                if rows.len() != order {
                    return Err(syntax(line, format!("order {order} but {} rows", rows.len())));
                }
                Ok(GroupSpec::Table(rows.into_iter().map(|(_, r)| r).collect()))
            }
            other => Err(syntax(0, format!("unknown kind `{other}`"))),
        }
    }
}

fn join(values: impl IntoIterator<Item = usize>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Builtin(b) => writeln!(f, "kind = builtin\nname = {b}"),
            GroupSpec::Perm { degree, generators } => {
                writeln!(f, "kind = perm\ndegree = {degree}")?;
                for g in generators {
                    writeln!(f, "gen = {}", join(g.images()))?;
                }
                Ok(())
            }
            GroupSpec::Table(rows) => {
                writeln!(f, "kind = table\norder = {}", rows.len())?;
                for r in rows {
                    writeln!(f, "row = {}", join(r.iter().copied()))?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stable(text: &str) {
        let first = text.parse::<GroupSpec>().unwrap().to_string();
        let second = first.parse::<GroupSpec>().unwrap().to_string();
        assert_eq!(first, second);
    }

    #[test]
    fn round_trips_are_byte_stable() {
        stable("# S3\nkind = perm\ndegree = 3\ngen = 1 0 2\n\ngen=1 2 0\n");
        stable("kind=table\norder=2\nrow = 0   1\nrow = 1 0");
        stable("name = direct_product( cyclic(2),quaternion )\nkind = builtin\n");
    }

    #[test]
    fn builds_each_kind() {
        let s3: GroupSpec = "kind = perm\ndegree = 3\ngen = 1 0 2\ngen = 1 2 0\n".parse().unwrap();
        assert_eq!(s3.build().unwrap().order(), 6);
        let d6: GroupSpec = "kind = builtin\nname = dihedral(6)\n".parse().unwrap();
        let g = d6.build().unwrap();
        let again: GroupSpec = GroupSpec::from_group(&g).to_string().parse().unwrap();
        assert_eq!(again.build().unwrap(), g);
    }

    #[test]
    fn rejects_malformed_specs() {
        for bad in [
            "",
            "kind = table\norder = 2\nrow = 0 1\n",
            "kind = perm\ndegree = 3\ngen = 0 1\n",
            "kind = perm\ndegree = 3\ngen = 0 0 1\n",
            "kind = builtin\nname = cyclic(3)\nname = cyclic(4)\n",
            "kind = builtin\nname = cyclic(3)\nrow = 0\n",
            "kind = lattice\n",
            "kind = table\norder = 1\nrow = x\n",
            "colour = blue\n",
        ] {
            assert!(bad.parse::<GroupSpec>().is_err(), "{bad:?}");
        }
    }
}
