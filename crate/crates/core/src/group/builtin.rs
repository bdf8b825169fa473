//! Named group families with fixed element numberings.
//!
//! | family            | numbering                                                     |
//! |-------------------|---------------------------------------------------------------|
//! | `cyclic(n)`       | index `i` is `r^i`                                            |
//! | `dihedral(2n)`    | index `i + n·j` is `r^i s^j`, with `s r s = r⁻¹`              |
//! | `symmetric(n)`    | breadth-first closure of `(0 1)`, `(0 1 … n-1)`               |
//! | `alternating(n)`  | breadth-first closure of `(0 1 2)`, `(1 2 3)`, …              |
//! | `quaternion`      | `1, -1, i, -i, j, -j, k, -k`                                  |
//! | `sl23`            | identity first, then det-1 matrices over GF(3) in row-major lexicographic order |
//! | `direct_product`  | index `a·|B| + b` is the pair `(a, b)`                        |

use std::fmt;

use super::{FiniteGroup, GroupError, GroupLimits, Permutation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Builtin {
    Cyclic(usize),
    /// Parameterised by the group order `2n`.
    Dihedral(usize),
    Symmetric(usize),
    Alternating(usize),
    Quaternion,
    Sl23,
    DirectProduct(Box<Builtin>, Box<Builtin>),
}

const MAX_PERM_DEGREE: usize = 5;

impl Builtin {
    /// Looks up a parameterised family by name.
    pub fn from_family(name: &str, parameter: i64) -> Result<Self, GroupError> {
        let out_of_range = || GroupError::ParameterOutOfRange { family: name.to_string(), parameter };
        let n = usize::try_from(parameter).map_err(|_| out_of_range())?;
        let cap = GroupLimits::default().order_cap;
        let b = match name {
            "cyclic" if (1..=cap).contains(&n) => Builtin::Cyclic(n),
            "dihedral" if n >= 2 && n % 2 == 0 && n <= cap => Builtin::Dihedral(n),
            "symmetric" if (1..=MAX_PERM_DEGREE).contains(&n) => Builtin::Symmetric(n),
            "alternating" if (1..=MAX_PERM_DEGREE).contains(&n) => Builtin::Alternating(n),
            "cyclic" | "dihedral" | "symmetric" | "alternating" => return Err(out_of_range()),
            "quaternion" | "sl23" | "direct_product" => return Err(out_of_range()),
            _ => return Err(GroupError::UnknownFamily(name.to_string())),
        };
        Ok(b)
    }

    /// Parses the textual form produced by `Display`, e.g.
    /// `direct_product(cyclic(2), dihedral(6))`.
    pub fn parse(text: &str) -> Result<Self, GroupError> {
        let mut p = BuiltinParser { src: text.as_bytes(), pos: 0 };
        let b = p.builtin()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(b)
    }

    pub fn build(&self) -> Result<FiniteGroup, GroupError> {
        match self {
            Builtin::Cyclic(n) => cyclic(*n),
            Builtin::Dihedral(order) => dihedral(*order),
            Builtin::Symmetric(n) => symmetric(*n),
            Builtin::Alternating(n) => alternating(*n),
            Builtin::Quaternion => Ok(quaternion()),
            Builtin::Sl23 => Ok(sl23()),
            Builtin::DirectProduct(a, b) => direct_product(&a.build()?, &b.build()?),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::Cyclic(n) => write!(f, "cyclic({n})"),
            Builtin::Dihedral(n) => write!(f, "dihedral({n})"),
            Builtin::Symmetric(n) => write!(f, "symmetric({n})"),
            Builtin::Alternating(n) => write!(f, "alternating({n})"),
            Builtin::Quaternion => write!(f, "quaternion"),
            Builtin::Sl23 => write!(f, "sl23"),
            Builtin::DirectProduct(a, b) => write!(f, "direct_product({a}, {b})"),
        }
    }
}

struct BuiltinParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl BuiltinParser<'_> {
    fn error(&self, message: &str) -> GroupError {
        GroupError::SpecSyntax { line: 0, message: format!("builtin at column {}: {message}", self.pos + 1) }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> Result<(), GroupError> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String, GroupError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a family name"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn integer(&mut self) -> Result<i64, GroupError> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("expected an integer"))
    }

    fn builtin(&mut self) -> Result<Builtin, GroupError> {
        let name = self.ident()?;
        match name.as_str() {
            "quaternion" => Ok(Builtin::Quaternion),
            "sl23" => Ok(Builtin::Sl23),
            "direct_product" => {
                self.eat(b'(')?;
                let a = self.builtin()?;
                self.eat(b',')?;
                let b = self.builtin()?;
                self.eat(b')')?;
                Ok(Builtin::DirectProduct(Box::new(a), Box::new(b)))
            }
            "cyclic" | "dihedral" | "symmetric" | "alternating" => {
                self.eat(b'(')?;
                let n = self.integer()?;
                self.eat(b')')?;
                Builtin::from_family(&name, n)
            }
            _ => Err(GroupError::UnknownFamily(name)),
        }
    }
}

fn from_flat(n: usize, mul: Vec<u32>) -> Result<FiniteGroup, GroupError> {
    FiniteGroup::from_raw(n, mul, &GroupLimits::default())
}

fn cyclic(n: usize) -> Result<FiniteGroup, GroupError> {
    let mut mul = vec![0u32; n * n];
    for a in 0..n {
        for b in 0..n {
            mul[a * n + b] = ((a + b) % n) as u32;
        }
    }
    let labels = (0..n).map(|i| power_label("r", i)).collect();
    Ok(from_flat(n, mul)?.with_labels(labels))
}

fn power_label(base: &str, i: usize) -> String {
    match i {
        0 => String::new(),
        1 => base.to_string(),
        _ => format!("{base}^{i}"),
    }
}

fn dihedral(order: usize) -> Result<FiniteGroup, GroupError> {
    let n = order / 2;
    let mut mul = vec![0u32; order * order];
    for x in 0..order {
        let (a, j) = (x % n, x / n);
        for y in 0..order {
            let (b, k) = (y % n, y / n);
            // r^a s^j · r^b s^k = r^(a ± b) s^(j+k)
            let rot = if j == 0 { (a + b) % n } else { (a + n - b) % n };
            mul[x * order + y] = (rot + n * ((j + k) % 2)) as u32;
        }
    }
    let labels = (0..order)
        .map(|x| {
            let l = format!("{}{}", power_label("r", x % n), if x >= n { "s" } else { "" });
            if l.is_empty() {
                "e".to_string()
            } else {
                l
            }
        })
        .collect();
    Ok(from_flat(order, mul)?.with_labels(labels))
}

fn symmetric(n: usize) -> Result<FiniteGroup, GroupError> {
    let mut gens = Vec::new();
    if n >= 2 {
        gens.push(Permutation::from_cycles(n, &[&[0, 1]])?);
    }
    if n >= 3 {
        let cycle: Vec<usize> = (0..n).collect();
        gens.push(Permutation::from_cycles(n, &[&cycle])?);
    }
    if n == 1 {
        gens.push(Permutation::identity(1));
    }
    FiniteGroup::from_permutations(&gens)
}

fn alternating(n: usize) -> Result<FiniteGroup, GroupError> {
    let gens = if n >= 3 {
        (0..n - 2).map(|i| Permutation::from_cycles(n, &[&[i, i + 1, i + 2]])).collect::<Result<Vec<_>, _>>()?
    } else {
        vec![Permutation::identity(n)]
    };
    FiniteGroup::from_permutations(&gens)
}

fn quaternion() -> FiniteGroup {
    // Unit products: (sign flip, unit) for units 1, i, j, k.
    const UNIT: [[(bool, usize); 4]; 4] = [
        [(false, 0), (false, 1), (false, 2), (false, 3)],
        [(false, 1), (true, 0), (false, 3), (true, 2)],
        [(false, 2), (true, 3), (true, 0), (false, 1)],
        [(false, 3), (false, 2), (true, 1), (true, 0)],
    ];
    let mut mul = vec![0u32; 64];
    for x in 0..8 {
        for y in 0..8 {
            let (flip, unit) = UNIT[x / 2][y / 2];
            let negative = (x % 2 == 1) ^ (y % 2 == 1) ^ flip;
            mul[x * 8 + y] = (2 * unit + usize::from(negative)) as u32;
        }
    }
    let labels = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"].map(String::from).to_vec();
    from_flat(8, mul).expect("quaternion table is a group").with_labels(labels)
}

fn sl23() -> FiniteGroup {
    let mut mats: Vec<[usize; 4]> = Vec::with_capacity(24);
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    if (a * d + 3 * 3 - b * c) % 3 == 1 {
                        mats.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    let id = mats.iter().position(|m| *m == [1, 0, 0, 1]).expect("identity is in SL(2,3)");
    let identity = mats.remove(id);
    mats.insert(0, identity);
    let n = mats.len();
    let mut mul = vec![0u32; n * n];
    for (x, p) in mats.iter().enumerate() {
        for (y, q) in mats.iter().enumerate() {
            let prod = [
                (p[0] * q[0] + p[1] * q[2]) % 3,
                (p[0] * q[1] + p[1] * q[3]) % 3,
                (p[2] * q[0] + p[3] * q[2]) % 3,
                (p[2] * q[1] + p[3] * q[3]) % 3,
            ];
            mul[x * n + y] = mats.iter().position(|m| *m == prod).expect("closed") as u32;
        }
    }
    let labels = mats.iter().map(|m| format!("[{} {}; {} {}]", m[0], m[1], m[2], m[3])).collect();
    from_flat(n, mul).expect("SL(2,3) table is a group").with_labels(labels)
}

fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> Result<FiniteGroup, GroupError> {
    let (na, nb) = (a.order(), b.order());
    let n = na * nb;
    let cap = GroupLimits::default().order_cap;
    if n > cap {
        return Err(GroupError::CapExceeded { cap });
    }
    let mut mul = vec![0u32; n * n];
    for x in 0..n {
        for y in 0..n {
            let left = a.mul(super::Elem::new(x / nb), super::Elem::new(y / nb)).idx();
            let right = b.mul(super::Elem::new(x % nb), super::Elem::new(y % nb)).idx();
            mul[x * n + y] = (left * nb + right) as u32;
        }
    }
    let labels = (0..n)
        .map(|x| format!("({}, {})", a.label(super::Elem::new(x / nb)), b.label(super::Elem::new(x % nb))))
        .collect();
    Ok(from_flat(n, mul)?.with_labels(labels))
}
