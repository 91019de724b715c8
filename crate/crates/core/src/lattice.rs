//! The order `φ1 ≺ φ2 ⇔ φ1 ⋆ φ2 = φ2` on idempotent states, with joins from
//! Cesàro averages of `⋆` and meets from Cesàro averages of `⊛`.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::{cesaro_projection, sup_norm, CVector, Tolerance, C64};
use crate::states::{forward_fourier, Functional, CLUSTER_RADIUS};

/// Default cap on the number of elements produced by [`build_lattice`].
pub const DEFAULT_MAX_CLOSURE: usize = 512;

fn scale(f: &Functional<'_>) -> f64 {
    sup_norm(f.coeffs().iter()).max(1.0)
}

/// `φ1 ≺ φ2`, decided three ways: `φ1⋆φ2 = φ2`, `φ2⋆φ1 = φ2`, and `φ1⊛φ2 ∝ φ1`.
pub fn precedes<'h>(phi1: &Functional<'h>, phi2: &Functional<'h>, tol: &Tolerance) -> Result<bool> {
    if !std::ptr::eq(phi1.host(), phi2.host()) {
        return Err(Error::HostMismatch);
    }
    let thr = tol.eps_eq * scale(phi2).max(scale(phi1));
    let left = phi1.convolve(phi2)?.sup_dist(phi2) <= thr;
    let right = phi2.convolve(phi1)?.sup_dist(phi2) <= thr;
    let boxed = phi1.box_product(phi2, tol)?;
    let mass = boxed.eval(phi1.host().unit());
    let by_box = mass.norm() > 0.0 && boxed.scaled(C64::new(1.0, 0.0) / mass).sup_dist(phi1) <= thr;
    if left == right && right == by_box {
        Ok(left)
    } else {
        Err(Error::CrossCheckFailed(format!(
            "order tests disagree: φ1⋆φ2=φ2 {left}, φ2⋆φ1=φ2 {right}, φ1⊛φ2∝φ1 {by_box}"
        )))
    }
}

/// `φ1 ∨ φ2`: Cesàro limit of `(φ1⋆φ2)^{⋆n}`.
pub fn sup<'h>(phi1: &Functional<'h>, phi2: &Functional<'h>, tol: &Tolerance) -> Result<Functional<'h>> {
    let prod = phi1.convolve(phi2)?;
    let result = prod.cesaro_limit(tol)?;
    if !result.is_idempotent_state(tol) {
        return Err(Error::VerificationFailed("join is not an idempotent state".into()));
    }
    if !precedes(phi1, &result, tol)? || !precedes(phi2, &result, tol)? {
        return Err(Error::VerificationFailed("join does not dominate its arguments".into()));
    }
    Ok(result)
}

/// `φ1 ∧ φ2`: Cesàro limit of the `⊛`-powers of `h(p̂1)h(p̂2)·(φ1⊛φ2)`,
/// whose inverse Fourier transform is the contraction `p̂1 p̂2`; the power
/// zero is the `⊛`-unit `h`. The limit is normalized to a state.
pub fn inf<'h>(phi1: &Functional<'h>, phi2: &Functional<'h>, tol: &Tolerance) -> Result<Functional<'h>> {
    if !std::ptr::eq(phi1.host(), phi2.host()) {
        return Err(Error::HostMismatch);
    }
    let g = phi1.host();
    let p1 = phi1.associated_projection(tol)?;
    let p2 = phi2.associated_projection(tol)?;
    let q = g.mul(&p1, &p2);
    let hm = g.haar_gram();
    let hm_inv = hm.clone().try_inverse().ok_or(Error::SingularGram)?;
    let op = hm * g.left_mult_matrix(&q) * hm_inv;
    let proj = cesaro_projection(&op, tol)?;
    let limit = proj * g.haar();
    let mass = limit.iter().zip(g.unit().iter()).map(|(a, u)| a * u).sum::<C64>();
    if mass.norm() <= tol.eps_eq {
        return Err(Error::VerificationFailed("meet has zero mass".into()));
    }
    let result = Functional::new(g, limit.map(|z| z / mass))?;
    if !result.is_idempotent_state(tol) {
        return Err(Error::VerificationFailed("meet is not an idempotent state".into()));
    }
    if !precedes(&result, phi1, tol)? || !precedes(&result, phi2, tol)? {
        return Err(Error::VerificationFailed("meet is not below its arguments".into()));
    }
    Ok(result)
}

/// Idempotent states closed under `∨` and `∧`, with order and operation tables.
#[derive(Clone, Debug)]
pub struct IdempotentLattice<'h> {
    pub elements: Vec<Functional<'h>>,
    /// `order[i][j]` iff `elements[i] ≺ elements[j]`.
    pub order: Vec<Vec<bool>>,
    pub joins: Vec<Vec<usize>>,
    pub meets: Vec<Vec<usize>>,
    /// Number of elements present before closure.
    pub seeded: usize,
}

/// A triple violating a distributive law.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributivityViolation {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    /// `true` for `a∨(b∧c) = (a∨b)∧(a∨c)`, `false` for `a∧(b∨c) = (a∧b)∨(a∧c)`.
    pub join_over_meet: bool,
}

fn find(elements: &[Functional<'_>], f: &Functional<'_>) -> Option<usize> {
    elements.iter().position(|e| e.sup_dist(f) <= CLUSTER_RADIUS)
}

fn intern<'h>(elements: &mut Vec<Functional<'h>>, f: Functional<'h>, grew: &mut bool) -> usize {
    find(elements, &f).unwrap_or_else(|| {
        elements.push(f);
        *grew = true;
        elements.len() - 1
    })
}

/// Close `idempotents` under `∨`/`∧` (at most `max_closure` elements) and tabulate.
pub fn build_lattice<'h>(idempotents: &[Functional<'h>], tol: &Tolerance, max_closure: usize) -> Result<IdempotentLattice<'h>> {
    let mut elements: Vec<Functional<'h>> = Vec::new();
    for f in idempotents {
        if !f.is_idempotent_state(tol) {
            return Err(Error::NotIdempotent);
        }
        if find(&elements, f).is_none() {
            elements.push(f.clone());
        }
    }
    if elements.len() > max_closure {
        return Err(Error::ClosureExplosion { cap: max_closure });
    }
    let seeded = elements.len();
    let mut joins: HashMap<(usize, usize), usize> = HashMap::new();
    let mut meets: HashMap<(usize, usize), usize> = HashMap::new();
    loop {
        let n = elements.len();
        let mut grew = false;
        for i in 0..n {
            for j in i..n {
                if let Entry::Vacant(slot) = joins.entry((i, j)) {
                    let f = sup(&elements[i], &elements[j], tol)?;
                    slot.insert(intern(&mut elements, f, &mut grew));
                }
                if let Entry::Vacant(slot) = meets.entry((i, j)) {
                    let f = inf(&elements[i], &elements[j], tol)?;
                    slot.insert(intern(&mut elements, f, &mut grew));
                }
                if elements.len() > max_closure {
                    return Err(Error::ClosureExplosion { cap: max_closure });
                }
            }
        }
        if !grew {
            break;
        }
    }
    let n = elements.len();
    let table = |m: &HashMap<(usize, usize), usize>| -> Vec<Vec<usize>> {
        (0..n).map(|i| (0..n).map(|j| m[&(i.min(j), i.max(j))]).collect()).collect()
    };
    let mut order = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            order[i][j] = i == j || precedes(&elements[i], &elements[j], tol)?;
        }
    }
    Ok(IdempotentLattice { joins: table(&joins), meets: table(&meets), elements, order, seeded })
}

impl<'h> IdempotentLattice<'h> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, f: &Functional<'_>) -> Option<usize> {
        find(&self.elements, f)
    }

    /// Bottom and top elements if they exist.
    pub fn bounds(&self) -> (Option<usize>, Option<usize>) {
        let n = self.len();
        let bottom = (0..n).find(|&i| (0..n).all(|j| self.order[i][j]));
        let top = (0..n).find(|&i| (0..n).all(|j| self.order[j][i]));
        (bottom, top)
    }

    /// Pairs `(i, j)` with `i ≺ j` covering: nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || !self.order[i][j] {
                    continue;
                }
                let between = (0..n).any(|k| k != i && k != j && self.order[i][k] && self.order[k][j]);
                if !between {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Hasse diagram, edges pointing upward.
    pub fn to_dot(&self, labels: &[String]) -> String {
        let mut s = String::from("digraph idempotents {\n  rankdir=BT;\n");
        for i in 0..self.len() {
            let label = labels.get(i).cloned().unwrap_or_else(|| format!("φ{i}"));
            let _ = writeln!(s, "  n{i} [label=\"{}\"];", label.replace('"', "'"));
        }
        for (i, j) in self.covers() {
            let _ = writeln!(s, "  n{i} -> n{j};");
        }
        s.push_str("}\n");
        s
    }

    /// Order matrix with a header row and column of labels.
    pub fn order_csv(&self, labels: &[String]) -> String {
        let name = |i: usize| labels.get(i).cloned().unwrap_or_else(|| format!("φ{i}"));
        let mut s = String::from("precedes");
        for j in 0..self.len() {
            let _ = write!(s, ",{}", name(j));
        }
        s.push('\n');
        for i in 0..self.len() {
            s.push_str(&name(i));
            for j in 0..self.len() {
                s.push_str(if self.order[i][j] { ",1" } else { ",0" });
            }
            s.push('\n');
        }
        s
    }
}

/// Every triple violating either distributive law.
pub fn check_distributivity(l: &IdempotentLattice<'_>) -> Vec<DistributivityViolation> {
    let n = l.len();
    let (j, m) = (&l.joins, &l.meets);
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if j[a][m[b][c]] != m[j[a][b]][j[a][c]] {
                    out.push(DistributivityViolation { a, b, c, join_over_meet: true });
                }
                if m[a][j[b][c]] != j[m[a][b]][m[a][c]] {
                    out.push(DistributivityViolation { a, b, c, join_over_meet: false });
                }
            }
        }
    }
    out
}

/// The state `h(· p)/h(p)` of a group-like projection.
pub fn state_of_projection<'h>(host: &'h crate::qgroup::QuantumStructure, p: &CVector) -> Result<Functional<'h>> {
    let f = forward_fourier(host, p);
    let hp = host.haar_of(p);
    if hp.norm() == 0.0 {
        return Err(Error::InvalidParameters("projection has zero Haar measure".into()));
    }
    Ok(f.scaled(C64::new(1.0, 0.0) / hp))
}
