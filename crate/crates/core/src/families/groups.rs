use std::collections::BTreeSet;

use serde_json::Value;

use crate::error::{Error, Result};

/// A finite group given by its Cayley table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

/// A subgroup as the sorted list of its element indices.
pub type Subgroup = Vec<usize>;

impl FiniteGroup {
    /// Validate closure, associativity, identity and inverses exactly.
    pub fn new(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::NotAGroup("empty element list".into()));
        }
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::NotAGroup(format!("table is not {n}×{n}")));
        }
        if table.iter().flatten().any(|&x| x >= n) {
            return Err(Error::NotAGroup("closure: table entry out of range".into()));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::NotAGroup(format!(
                            "associativity fails at ({}, {}, {})",
                            labels[a], labels[b], labels[c]
                        )));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::NotAGroup("identity: no neutral element".into()))?;
        let mut inverse = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| table[a][b] == identity && table[b][a] == identity)
                .ok_or_else(|| Error::NotAGroup(format!("inverses: {} has none", labels[a])))?;
            inverse.push(inv);
        }
        Ok(FiniteGroup { labels, table, identity, inverse })
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }
    pub fn labels(&self) -> &[String] {
        &self.labels
    }
    pub fn identity(&self) -> usize {
        self.identity
    }
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }
    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.table[a][b] == self.table[b][a]))
    }

    /// Smallest subgroup containing `gens`.
    pub fn generated(&self, gens: &[usize]) -> Subgroup {
        let mut set: BTreeSet<usize> = BTreeSet::from([self.identity]);
        let mut frontier: Vec<usize> = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.table[x][g];
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        set.into_iter().collect()
    }

    pub fn is_subgroup(&self, set: &[usize]) -> bool {
        let s: BTreeSet<usize> = set.iter().copied().collect();
        !s.is_empty()
            && s.iter().all(|&x| x < self.order())
            && s.iter().all(|&a| s.iter().all(|&b| s.contains(&self.table[a][self.inverse[b]])))
    }

    /// All subgroups: the cyclic subgroups closed under pairwise joins.
    /// Sorted by order, then lexicographically.
    pub fn subgroups(&self) -> Vec<Subgroup> {
        let mut all: BTreeSet<Subgroup> = (0..self.order()).map(|g| self.generated(&[g])).collect();
        loop {
            let current: Vec<Subgroup> = all.iter().cloned().collect();
            let mut grew = false;
            for (i, a) in current.iter().enumerate() {
                for b in &current[i + 1..] {
                    let union: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
                    if all.insert(self.generated(&union)) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let mut out: Vec<Subgroup> = all.into_iter().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        out
    }

    pub fn is_normal(&self, h: &[usize]) -> Result<bool> {
        if !self.is_subgroup(h) {
            return Err(Error::NotASubgroup);
        }
        let s: BTreeSet<usize> = h.iter().copied().collect();
        Ok((0..self.order()).all(|g| s.iter().all(|&x| s.contains(&self.table[self.table[g][x]][self.inverse[g]]))))
    }

    pub fn subgroup_label(&self, h: &[usize]) -> String {
        let names: Vec<&str> = h.iter().map(|&i| self.labels[i].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({ "elements": self.labels, "table": self.table })
    }
}

/// Read `{"elements": [...], "table": [[...], ...]}`.
pub fn parse_cayley(doc: &Value) -> Result<FiniteGroup> {
    let labels = doc
        .get("elements")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Format("missing \"elements\" array".into()))?
        .iter()
        .map(|v| v.as_str().map(str::to_owned).ok_or_else(|| Error::Format("element labels must be strings".into())))
        .collect::<Result<Vec<_>>>()?;
    let table = doc
        .get("table")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Format("missing \"table\" array".into()))?
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Format("table rows must be arrays".into()))?
                .iter()
                .map(|x| x.as_u64().map(|x| x as usize).ok_or_else(|| Error::Format("table entries must be indices".into())))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteGroup::new(labels, table)
}

pub fn cyclic(n: usize) -> FiniteGroup {
    let labels = (0..n).map(|i| i.to_string()).collect();
    let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    FiniteGroup::new(labels, table).expect("Z_n is a group")
}

pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> FiniteGroup {
    let (na, nb) = (a.order(), b.order());
    let labels = (0..na * nb).map(|x| format!("({},{})", a.labels[x / nb], b.labels[x % nb])).collect();
    let table = (0..na * nb)
        .map(|x| (0..na * nb).map(|y| a.mul(x / nb, y / nb) * nb + b.mul(x % nb, y % nb)).collect())
        .collect();
    FiniteGroup::new(labels, table).expect("product of groups is a group")
}

pub fn klein_four() -> FiniteGroup {
    direct_product(&cyclic(2), &cyclic(2))
}

fn cycle_notation(perm: &[usize]) -> String {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut out = String::new();
    for start in 0..n {
        if seen[start] || perm[start] == start {
            continue;
        }
        let mut cycle = vec![start + 1];
        seen[start] = true;
        let mut x = perm[start];
        while x != start {
            seen[x] = true;
            cycle.push(x + 1);
            x = perm[x];
        }
        let parts: Vec<String> = cycle.iter().map(usize::to_string).collect();
        out.push_str(&format!("({})", parts.join(" ")));
    }
    if out.is_empty() {
        "e".into()
    } else {
        out
    }
}

/// `S_n` acting on `{1..n}`; `(στ)(x) = σ(τ(x))`, labels in cycle notation.
pub fn symmetric(n: usize) -> FiniteGroup {
    let mut perms: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    permutations(&mut current, 0, &mut perms);
    perms.sort_by_key(|p| (cycle_notation(p) != "e", p.clone()));
    let index = |p: &Vec<usize>| perms.iter().position(|q| q == p).expect("closed");
    let table = perms
        .iter()
        .map(|s| perms.iter().map(|t| index(&t.iter().map(|&x| s[x]).collect())).collect())
        .collect();
    let labels = perms.iter().map(|p| cycle_notation(p)).collect();
    FiniteGroup::new(labels, table).expect("S_n is a group")
}

fn permutations(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, out);
        v.swap(k, i);
    }
}

/// Dihedral group of order `2n`: rotations `r^i`, reflections `s r^i`.
pub fn dihedral(n: usize) -> FiniteGroup {
    // element (f, i) = s^f r^i stored at f*n + i; r^i s = s r^{-i}
    let labels = (0..2 * n)
        .map(|x| match (x / n, x % n) {
            (0, 0) => "e".to_string(),
            (0, i) => format!("r{i}"),
            (_, 0) => "s".to_string(),
            (_, i) => format!("sr{i}"),
        })
        .collect();
    let table = (0..2 * n)
        .map(|x| {
            (0..2 * n)
                .map(|y| {
                    let (f1, i1) = (x / n, x % n);
                    let (f2, i2) = (y / n, y % n);
                    let i = if f2 == 0 { (i1 + i2) % n } else { (n - i1 + i2) % n };
                    ((f1 + f2) % 2) * n + i
                })
                .collect()
        })
        .collect();
    FiniteGroup::new(labels, table).expect("D_n is a group")
}

/// Quaternion group `{±1, ±i, ±j, ±k}`.
pub fn quaternion() -> FiniteGroup {
    // unit u ∈ {1,i,j,k} with sign: index = 2*u + (sign < 0)
    const UNITS: [&str; 4] = ["1", "i", "j", "k"];
    // u*v = sign * w for u, v ∈ {1, i, j, k}
    let prod = |u: usize, v: usize| -> (bool, usize) {
        match (u, v) {
            (0, v) => (false, v),
            (u, 0) => (false, u),
            (u, v) if u == v => (true, 0),
            (1, 2) => (false, 3),
            (2, 3) => (false, 1),
            (3, 1) => (false, 2),
            (2, 1) => (true, 3),
            (3, 2) => (true, 1),
            (1, 3) => (true, 2),
            _ => unreachable!(),
        }
    };
    let labels = (0..8).map(|x| format!("{}{}", if x % 2 == 1 { "-" } else { "" }, UNITS[x / 2])).collect();
    let table = (0..8)
        .map(|x| {
            (0..8)
                .map(|y| {
                    let (neg, w) = prod(x / 2, y / 2);
                    let sign = (x % 2 == 1) ^ (y % 2 == 1) ^ neg;
                    2 * w + usize::from(sign)
                })
                .collect()
        })
        .collect();
    FiniteGroup::new(labels, table).expect("Q8 is a group")
}

/// Named built-in groups: `Z<n>`, `Z2xZ2`, `S3`, `D<n>`, `Q8`.
pub fn named_group(name: &str) -> Result<FiniteGroup> {
    let bad = || Error::InvalidParameters(format!("unknown group {name:?}"));
    match name {
        "Z2xZ2" | "V4" | "klein" => Ok(klein_four()),
        "Q8" => Ok(quaternion()),
        "S3" => Ok(symmetric(3)),
        "S4" => Ok(symmetric(4)),
        _ => {
            let (kind, num) = name.split_at(1);
            let n: usize = num.parse().map_err(|_| bad())?;
            match kind {
                "Z" if n >= 1 => Ok(cyclic(n)),
                "D" if n >= 2 => Ok(dihedral(n)),
                _ => Err(bad()),
            }
        }
    }
}
