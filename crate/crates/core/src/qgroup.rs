//! Finite quantum groups described by structure constants.
//!
//! An algebra element is a coefficient vector against the basis `b_0..b_{n-1}`.
//! The carrier [`QuantumStructure`] holds multiplication, unit, involution and
//! coproduct together with the derived data (counit, antipode, Haar state,
//! Haar element). It is shared by [`FiniteQuantumGroup`] and by the
//! hypergroups built in [`crate::hypergroup`]; only the axioms checked differ.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{
    kernel_basis, min_eigenvalue, solve_linear, solve_linear_multi, sup_norm, CVector, ComplexMatrix, Tensor3,
    Tolerance, C64, ONE, ZERO,
};

/// Element of `A ⊗ A`: `Z[(j, k)]` is the coefficient of `b_j ⊗ b_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorSquareElement(pub ComplexMatrix);

impl TensorSquareElement {
    pub fn zeros(n: usize) -> Self {
        TensorSquareElement(ComplexMatrix::zeros(n, n))
    }

    /// `a ⊗ b`.
    pub fn pure(a: &CVector, b: &CVector) -> Self {
        TensorSquareElement(a * b.transpose())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn sup_dist(&self, other: &Self) -> f64 {
        sup_norm((&self.0 - &other.0).iter())
    }

    fn nonzeros(&self) -> Vec<(usize, usize, C64)> {
        let n = self.0.nrows();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..self.0.ncols() {
                let z = self.0[(a, b)];
                if z.norm() >= 1e-15 {
                    out.push((a, b, z));
                }
            }
        }
        out
    }
}

/// Raw ingredients of a structure; `None` fields are filled in by the solvers.
#[derive(Clone, Debug)]
pub struct StructureParts {
    pub basis_labels: Vec<String>,
    pub mult: Tensor3,
    pub unit: CVector,
    pub invol: ComplexMatrix,
    pub coproduct: Tensor3,
    pub counit: Option<CVector>,
    pub antipode: Option<ComplexMatrix>,
    pub haar: Option<CVector>,
    pub haar_element: Option<CVector>,
}

/// Algebra, coalgebra and derived data of a finite-dimensional *-bialgebra-like object.
#[derive(Clone, Debug)]
pub struct QuantumStructure {
    dim: usize,
    basis_labels: Vec<String>,
    mult: Tensor3,
    unit: CVector,
    invol: ComplexMatrix,
    coproduct: Tensor3,
    counit: CVector,
    antipode: ComplexMatrix,
    haar: CVector,
    haar_element: CVector,
    haar_gram: OnceLock<ComplexMatrix>,
    pub(crate) fingerprint: OnceLock<String>,
}

impl QuantumStructure {
    /// Validate shapes and run the solvers for any missing derived data.
    pub fn from_parts(parts: StructureParts, tol: &Tolerance) -> Result<Self> {
        let n = parts.basis_labels.len();
        if n == 0 {
            return Err(Error::InvalidParameters("empty basis".into()));
        }
        let shape_ok = parts.mult.dims() == (n, n, n)
            && parts.coproduct.dims() == (n, n, n)
            && parts.unit.len() == n
            && parts.invol.shape() == (n, n);
        if !shape_ok {
            return Err(Error::Format("structure constants do not match the basis size".into()));
        }
        if !parts.mult.is_finite() || !parts.coproduct.is_finite() {
            return Err(Error::Format("non-finite structure constants".into()));
        }
        let counit = match parts.counit {
            Some(c) => check_vec(c, n)?,
            None => compute_counit(&parts.coproduct, tol)?,
        };
        let haar = match parts.haar {
            Some(h) => check_vec(h, n)?,
            None => compute_haar_state(&parts.coproduct, &parts.unit, tol)?,
        };
        let antipode = match parts.antipode {
            Some(s) if s.shape() == (n, n) => s,
            Some(_) => return Err(Error::Format("antipode has wrong shape".into())),
            None => compute_antipode(&parts.mult, &parts.coproduct, &haar, tol)?,
        };
        let haar_element = match parts.haar_element {
            Some(e) => check_vec(e, n)?,
            None => compute_haar_element(&parts.mult, &counit, tol)?,
        };
        Ok(QuantumStructure {
            dim: n,
            basis_labels: parts.basis_labels,
            mult: parts.mult,
            unit: parts.unit,
            invol: parts.invol,
            coproduct: parts.coproduct,
            counit,
            antipode,
            haar,
            haar_element,
            haar_gram: OnceLock::new(),
            fingerprint: OnceLock::new(),
        })
    }

    pub fn into_parts(self) -> StructureParts {
        StructureParts {
            basis_labels: self.basis_labels,
            mult: self.mult,
            unit: self.unit,
            invol: self.invol,
            coproduct: self.coproduct,
            counit: Some(self.counit),
            antipode: Some(self.antipode),
            haar: Some(self.haar),
            haar_element: Some(self.haar_element),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn basis_labels(&self) -> &[String] {
        &self.basis_labels
    }
    pub fn mult(&self) -> &Tensor3 {
        &self.mult
    }
    pub fn coproduct_tensor(&self) -> &Tensor3 {
        &self.coproduct
    }
    pub fn unit(&self) -> &CVector {
        &self.unit
    }
    pub fn invol(&self) -> &ComplexMatrix {
        &self.invol
    }
    pub fn counit(&self) -> &CVector {
        &self.counit
    }
    pub fn antipode(&self) -> &ComplexMatrix {
        &self.antipode
    }
    pub fn haar(&self) -> &CVector {
        &self.haar
    }
    pub fn haar_element(&self) -> &CVector {
        &self.haar_element
    }

    pub fn basis(&self, i: usize) -> CVector {
        let mut v = CVector::zeros(self.dim);
        v[i] = ONE;
        v
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.basis_labels.iter().position(|l| l == label)
    }

    pub fn check_len(&self, a: &CVector) -> Result<()> {
        if a.len() == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, got: a.len() })
        }
    }

    pub fn multiply(&self, a: &CVector, b: &CVector) -> Result<CVector> {
        self.check_len(a)?;
        self.check_len(b)?;
        Ok(self.mul(a, b))
    }

    pub(crate) fn mul(&self, a: &CVector, b: &CVector) -> CVector {
        let mut out = CVector::zeros(self.dim);
        for (i, ai) in a.iter().enumerate() {
            if ai.norm() == 0.0 {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.norm() == 0.0 {
                    continue;
                }
                let c = ai * bj;
                for &(k, m) in self.mult.fibre(i, j) {
                    out[k] += c * m;
                }
            }
        }
        out
    }

    /// Coefficients of `b_i b_j`.
    pub fn basis_product(&self, i: usize, j: usize) -> CVector {
        let mut out = CVector::zeros(self.dim);
        for &(k, m) in self.mult.fibre(i, j) {
            out[k] += m;
        }
        out
    }

    pub fn star(&self, a: &CVector) -> CVector {
        self.invol.transpose() * a.map(|z| z.conj())
    }

    pub fn apply_antipode(&self, a: &CVector) -> CVector {
        &self.antipode * a
    }

    pub fn counit_of(&self, a: &CVector) -> C64 {
        self.counit.iter().zip(a.iter()).map(|(e, x)| e * x).sum()
    }

    pub fn haar_of(&self, a: &CVector) -> C64 {
        self.haar.iter().zip(a.iter()).map(|(e, x)| e * x).sum()
    }

    pub fn comultiply(&self, a: &CVector) -> Result<TensorSquareElement> {
        self.check_len(a)?;
        let mut z = ComplexMatrix::zeros(self.dim, self.dim);
        for (i, ai) in a.iter().enumerate() {
            if ai.norm() == 0.0 {
                continue;
            }
            for &(j, k, d) in self.coproduct.slice(i) {
                z[(j, k)] += ai * d;
            }
        }
        Ok(TensorSquareElement(z))
    }

    pub(crate) fn comultiply_basis(&self, i: usize) -> TensorSquareElement {
        let mut z = ComplexMatrix::zeros(self.dim, self.dim);
        for &(j, k, d) in self.coproduct.slice(i) {
            z[(j, k)] += d;
        }
        TensorSquareElement(z)
    }

    /// Matrix of `x ↦ a x`.
    pub fn left_mult_matrix(&self, a: &CVector) -> ComplexMatrix {
        let n = self.dim;
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, ai) in a.iter().enumerate() {
            if ai.norm() == 0.0 {
                continue;
            }
            for j in 0..n {
                for &(k, c) in self.mult.fibre(i, j) {
                    m[(k, j)] += ai * c;
                }
            }
        }
        m
    }

    /// Matrix of `x ↦ x a`.
    pub fn right_mult_matrix(&self, a: &CVector) -> ComplexMatrix {
        let n = self.dim;
        let mut m = ComplexMatrix::zeros(n, n);
        for (j, aj) in a.iter().enumerate() {
            if aj.norm() == 0.0 {
                continue;
            }
            for i in 0..n {
                for &(k, c) in self.mult.fibre(i, j) {
                    m[(k, i)] += aj * c;
                }
            }
        }
        m
    }

    /// Product in `A ⊗ A`.
    pub fn tensor_mul(&self, z: &TensorSquareElement, w: &TensorSquareElement) -> TensorSquareElement {
        let nz = z.nonzeros();
        let nw = w.nonzeros();
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for &(a, b, zv) in &nz {
            for &(c, d, wv) in &nw {
                let f1 = self.mult.fibre(a, c);
                if f1.is_empty() {
                    continue;
                }
                let f2 = self.mult.fibre(b, d);
                let s = zv * wv;
                for &(x, m1) in f1 {
                    for &(y, m2) in f2 {
                        out[(x, y)] += s * m1 * m2;
                    }
                }
            }
        }
        TensorSquareElement(out)
    }

    /// `(x ⊗ y) Z`.
    pub fn tensor_left(&self, x: &CVector, y: &CVector, z: &TensorSquareElement) -> TensorSquareElement {
        TensorSquareElement(self.left_mult_matrix(x) * &z.0 * self.left_mult_matrix(y).transpose())
    }

    /// `Z (x ⊗ y)`.
    pub fn tensor_right(&self, z: &TensorSquareElement, x: &CVector, y: &CVector) -> TensorSquareElement {
        TensorSquareElement(self.right_mult_matrix(x) * &z.0 * self.right_mult_matrix(y).transpose())
    }

    /// `(∗ ⊗ ∗) Z`.
    pub fn tensor_star(&self, z: &TensorSquareElement) -> TensorSquareElement {
        TensorSquareElement(self.invol.transpose() * z.0.map(|v| v.conj()) * &self.invol)
    }

    /// `Hm[i][j] = h(b_i b_j)`, the Gram matrix behind the Fourier transform.
    pub fn haar_gram(&self) -> &ComplexMatrix {
        self.haar_gram.get_or_init(|| {
            let n = self.dim;
            ComplexMatrix::from_fn(n, n, |i, j| self.mult.fibre(i, j).iter().map(|&(k, m)| m * self.haar[k]).sum())
        })
    }

    /// `Q[i][j] = h(b_i^* b_j)`, so that `h(a^* b) = a^H Q b`.
    pub fn inner_gram(&self) -> ComplexMatrix {
        &self.invol * self.haar_gram()
    }

    /// `h(a^* b)`.
    pub fn inner(&self, a: &CVector, b: &CVector) -> C64 {
        (a.adjoint() * self.inner_gram() * b)[(0, 0)]
    }

    /// Sup-norm of `[a, b_i]` over all basis elements.
    pub fn commutator_residual(&self, a: &CVector) -> f64 {
        sup_norm((self.left_mult_matrix(a) - self.right_mult_matrix(a)).iter())
    }

    pub fn is_commutative(&self, tol: &Tolerance) -> bool {
        (0..self.dim).all(|i| self.commutator_residual(&self.basis(i)) <= tol.eps_eq)
    }

    pub fn is_cocommutative(&self, tol: &Tolerance) -> bool {
        self.coproduct.nonzeros().all(|(i, j, k, v)| (self.coproduct.get(i, k, j) - v).norm() <= tol.eps_eq)
    }
}

fn check_vec(v: CVector, n: usize) -> Result<CVector> {
    if v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.len() });
    }
    Ok(v)
}

/// Solves `(ε ⊗ id)Δ = id = (id ⊗ ε)Δ`.
pub fn compute_counit(coproduct: &Tensor3, tol: &Tolerance) -> Result<CVector> {
    let (n, _, _) = coproduct.dims();
    let mut a = ComplexMatrix::zeros(2 * n * n, n);
    let mut b = CVector::zeros(2 * n * n);
    for i in 0..n {
        for &(j, k, d) in coproduct.slice(i) {
            a[(i * n + k, j)] += d;
            a[(n * n + i * n + j, k)] += d;
        }
        b[i * n + i] = ONE;
        b[n * n + i * n + i] = ONE;
    }
    let kernel = kernel_basis(&a, tol);
    if !kernel.is_empty() {
        return Err(Error::NonUnique { what: "counit", dim: kernel.len() });
    }
    solve_linear(&a, &b, tol).map_err(|_| Error::NoSolution("counit"))
}

/// Solves `(h ⊗ id)Δ = (id ⊗ h)Δ = h(·)1` with `h(1) = 1`.
pub fn compute_haar_state(coproduct: &Tensor3, unit: &CVector, tol: &Tolerance) -> Result<CVector> {
    let (n, _, _) = coproduct.dims();
    let mut a = ComplexMatrix::zeros(2 * n * n, n);
    for i in 0..n {
        for &(j, k, d) in coproduct.slice(i) {
            a[(i * n + k, j)] += d;
            a[(n * n + i * n + j, k)] += d;
        }
        for k in 0..n {
            a[(i * n + k, i)] -= unit[k];
            a[(n * n + i * n + k, i)] -= unit[k];
        }
    }
    let kernel = kernel_basis(&a, tol);
    match kernel.len() {
        0 => Err(Error::NoSolution("Haar state")),
        1 => {
            let v = &kernel[0];
            let norm: C64 = v.iter().zip(unit.iter()).map(|(x, u)| x * u).sum();
            if norm.norm() <= tol.eps_eq {
                return Err(Error::NoSolution("Haar state (invariant functional vanishes on 1)"));
            }
            Ok(clean(v.unscale(1.0).map(|x| x / norm)))
        }
        d => Err(Error::NonUnique { what: "Haar state", dim: d }),
    }
}

/// Solves `S((ι⊗h)(Δ(a)(1⊗b))) = (ι⊗h)((1⊗a)Δ(b))` over all basis pairs.
pub fn compute_antipode(mult: &Tensor3, coproduct: &Tensor3, haar: &CVector, tol: &Tolerance) -> Result<ComplexMatrix> {
    let (n, _, _) = coproduct.dims();
    // hm[y][j] = h(b_y b_j)
    let hm = ComplexMatrix::from_fn(n, n, |y, j| mult.fibre(y, j).iter().map(|&(k, m)| m * haar[k]).sum());
    // columns indexed by (i, j): x = (ι⊗h)(Δ(b_i)(1⊗b_j)), y = (ι⊗h)((1⊗b_i)Δ(b_j))
    let mut x = ComplexMatrix::zeros(n, n * n);
    let mut y = ComplexMatrix::zeros(n, n * n);
    for i in 0..n {
        for &(a, b, d) in coproduct.slice(i) {
            for j in 0..n {
                let w = hm[(b, j)];
                if w.norm() != 0.0 {
                    x[(a, i * n + j)] += d * w;
                }
                let w2 = hm[(j, b)];
                if w2.norm() != 0.0 {
                    y[(a, j * n + i)] += d * w2;
                }
            }
        }
    }
    // S X = Y  <=>  X^T S^T = Y^T
    let xt = x.transpose();
    let kernel = kernel_basis(&xt, tol);
    if !kernel.is_empty() {
        return Err(Error::NonUnique { what: "antipode", dim: kernel.len() });
    }
    let st = solve_linear_multi(&xt, &y.transpose(), tol).map_err(|_| Error::NoSolution("antipode"))?;
    Ok(st.transpose().map(clean_scalar))
}

/// Solves `b_i η = ε(b_i) η` with `ε(η) = 1`.
pub fn compute_haar_element(mult: &Tensor3, counit: &CVector, tol: &Tolerance) -> Result<CVector> {
    let (n, _, _) = mult.dims();
    let mut a = ComplexMatrix::zeros(n * n, n);
    for i in 0..n {
        for j in 0..n {
            for &(k, m) in mult.fibre(i, j) {
                a[(i * n + k, j)] += m;
            }
        }
        for k in 0..n {
            a[(i * n + k, k)] -= counit[i];
        }
    }
    let kernel = kernel_basis(&a, tol);
    match kernel.len() {
        0 => Err(Error::NoSolution("Haar element")),
        1 => {
            let v = &kernel[0];
            let e: C64 = v.iter().zip(counit.iter()).map(|(x, c)| x * c).sum();
            if e.norm() <= tol.eps_eq {
                return Err(Error::NoSolution("Haar element (co-integral has zero counit)"));
            }
            Ok(clean(v.map(|x| x / e)))
        }
        d => Err(Error::NonUnique { what: "Haar element", dim: d }),
    }
}

fn clean_scalar(z: C64) -> C64 {
    let f = |x: f64| if x.abs() < 1e-14 { 0.0 } else { x };
    C64::new(f(z.re), f(z.im))
}

fn clean(v: CVector) -> CVector {
    v.map(clean_scalar)
}

/// One named axiom with its worst residual.
#[derive(Clone, Debug, PartialEq)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub residual: f64,
    pub passed: bool,
}

/// Per-axiom verdicts; the overall verdict is their conjunction.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AxiomReport {
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub fn push(&mut self, name: &'static str, residual: f64, tol: &Tolerance) {
        let passed = residual.is_finite() && residual <= tol.eps_eq;
        self.checks.push(AxiomCheck { name, residual, passed });
    }

    pub fn push_verdict(&mut self, name: &'static str, residual: f64, passed: bool) {
        self.checks.push(AxiomCheck { name, residual, passed });
    }

    pub fn verdict(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn get(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:<32} {:>12.3e}  {}", c.name, c.residual, if c.passed { "ok" } else { "FAIL" })?;
        }
        write!(f, "verdict: {}", if self.verdict() { "pass" } else { "fail" })
    }
}

/// Residual checks shared by the group and hypergroup verifiers.
pub(crate) mod axioms {
    use super::*;

    pub fn associativity(g: &QuantumStructure) -> f64 {
        let n = g.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let ij = g.basis_product(i, j);
                for k in 0..n {
                    let left = g.mul(&ij, &g.basis(k));
                    let jk = g.basis_product(j, k);
                    let right = g.mul(&g.basis(i), &jk);
                    worst = worst.max(sup_norm((left - right).iter()));
                }
            }
        }
        worst
    }

    pub fn unit(g: &QuantumStructure) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..g.dim() {
            let b = g.basis(i);
            worst = worst.max(sup_norm((g.mul(g.unit(), &b) - &b).iter()));
            worst = worst.max(sup_norm((g.mul(&b, g.unit()) - &b).iter()));
        }
        worst
    }

    pub fn involution_twice(g: &QuantumStructure) -> f64 {
        let n = g.dim();
        let c = g.invol();
        sup_norm((c.map(|z| z.conj()) * c - ComplexMatrix::identity(n, n)).iter())
    }

    pub fn involution_antimultiplicative(g: &QuantumStructure) -> f64 {
        let n = g.dim();
        let stars: Vec<CVector> = (0..n).map(|i| g.star(&g.basis(i))).collect();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let lhs = g.star(&g.basis_product(i, j));
                let rhs = g.mul(&stars[j], &stars[i]);
                worst = worst.max(sup_norm((lhs - rhs).iter()));
            }
        }
        worst
    }

    pub fn coproduct_unital(g: &QuantumStructure) -> f64 {
        let d1 = g.comultiply(g.unit()).expect("unit has the right length");
        d1.sup_dist(&TensorSquareElement::pure(g.unit(), g.unit()))
    }

    pub fn coproduct_star(g: &QuantumStructure) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..g.dim() {
            let lhs = g.comultiply(&g.star(&g.basis(i))).expect("length");
            let rhs = g.tensor_star(&g.comultiply_basis(i));
            worst = worst.max(lhs.sup_dist(&rhs));
        }
        worst
    }

    pub fn coproduct_multiplicative(g: &QuantumStructure) -> f64 {
        let n = g.dim();
        let deltas: Vec<TensorSquareElement> = (0..n).map(|i| g.comultiply_basis(i)).collect();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let lhs = g.comultiply(&g.basis_product(i, j)).expect("length");
                let rhs = g.tensor_mul(&deltas[i], &deltas[j]);
                worst = worst.max(lhs.sup_dist(&rhs));
            }
        }
        worst
    }

    pub fn coassociativity(g: &QuantumStructure) -> f64 {
        let d = g.coproduct_tensor();
        let mut worst: f64 = 0.0;
        for i in 0..g.dim() {
            let mut acc: HashMap<(usize, usize, usize), C64> = HashMap::new();
            for &(j, k, v) in d.slice(i) {
                for &(a, b, w) in d.slice(j) {
                    *acc.entry((a, b, k)).or_insert(ZERO) += v * w;
                }
                for &(a, b, w) in d.slice(k) {
                    *acc.entry((j, a, b)).or_insert(ZERO) -= v * w;
                }
            }
            worst = acc.values().fold(worst, |m, z| m.max(z.norm()));
        }
        worst
    }

    pub fn counit_law(g: &QuantumStructure) -> f64 {
        let n = g.dim();
        let e = g.counit();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let mut left = CVector::zeros(n);
            let mut right = CVector::zeros(n);
            for &(j, k, d) in g.coproduct_tensor().slice(i) {
                left[k] += e[j] * d;
                right[j] += e[k] * d;
            }
            let b = g.basis(i);
            worst = worst.max(sup_norm((left - &b).iter())).max(sup_norm((right - &b).iter()));
        }
        worst
    }

    pub fn counit_multiplicative(g: &QuantumStructure) -> f64 {
        let n = g.dim();
        let e = g.counit();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let lhs = g.counit_of(&g.basis_product(i, j));
                worst = worst.max((lhs - e[i] * e[j]).norm());
            }
            let s = g.counit_of(&g.star(&g.basis(i)));
            worst = worst.max((s - e[i].conj()).norm());
        }
        worst
    }

    /// `m(S ⊗ id)Δ = ε(·)1 = m(id ⊗ S)Δ`.
    pub fn antipode_law(g: &QuantumStructure) -> f64 {
        let n = g.dim();
        let images: Vec<CVector> = (0..n).map(|i| g.apply_antipode(&g.basis(i))).collect();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let mut left = CVector::zeros(n);
            let mut right = CVector::zeros(n);
            for &(j, k, d) in g.coproduct_tensor().slice(i) {
                left += g.mul(&images[j], &g.basis(k)) * d;
                right += g.mul(&g.basis(j), &images[k]) * d;
            }
            let target = g.unit() * g.counit()[i];
            worst = worst.max(sup_norm((left - &target).iter())).max(sup_norm((right - &target).iter()));
        }
        worst
    }

    /// `S((ι⊗h)(Δ(a)(1⊗b))) = (ι⊗h)((1⊗a)Δ(b))`, the antipode relative to `h`.
    pub fn antipode_relative_haar(g: &QuantumStructure) -> f64 {
        let n = g.dim();
        let hm = g.haar_gram();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut x = CVector::zeros(n);
                let mut y = CVector::zeros(n);
                for &(a, b, d) in g.coproduct_tensor().slice(i) {
                    x[a] += d * hm[(b, j)];
                }
                for &(a, b, d) in g.coproduct_tensor().slice(j) {
                    y[a] += d * hm[(i, b)];
                }
                worst = worst.max(sup_norm((g.apply_antipode(&x) - y).iter()));
            }
        }
        worst
    }

    pub fn antipode_involutive(g: &QuantumStructure) -> f64 {
        let n = g.dim();
        let s = g.antipode();
        sup_norm((s * s - ComplexMatrix::identity(n, n)).iter())
    }

    pub fn haar_trace(g: &QuantumStructure) -> f64 {
        let hm = g.haar_gram();
        sup_norm((hm - hm.transpose()).iter())
    }

    pub fn haar_normalized(g: &QuantumStructure) -> f64 {
        (g.haar_of(g.unit()) - ONE).norm()
    }

    /// Smallest eigenvalue of the Gram matrix `[h(b_i^* b_j)]`.
    pub fn haar_gram_min_eig(g: &QuantumStructure) -> (f64, f64) {
        let q = g.inner_gram();
        let herm = sup_norm((&q - q.adjoint()).iter());
        (min_eigenvalue(&q), herm)
    }

    pub fn haar_invariance(g: &QuantumStructure) -> f64 {
        let n = g.dim();
        let h = g.haar();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let mut left = CVector::zeros(n);
            let mut right = CVector::zeros(n);
            for &(j, k, d) in g.coproduct_tensor().slice(i) {
                left[k] += h[j] * d;
                right[j] += h[k] * d;
            }
            let target = g.unit() * h[i];
            worst = worst.max(sup_norm((left - &target).iter())).max(sup_norm((right - &target).iter()));
        }
        worst
    }

    pub fn haar_element(g: &QuantumStructure) -> f64 {
        let eta = g.haar_element();
        let mut worst = (g.counit_of(eta) - ONE).norm();
        for i in 0..g.dim() {
            let lhs = g.mul(&g.basis(i), eta);
            worst = worst.max(sup_norm((lhs - eta * g.counit()[i]).iter()));
        }
        worst = worst.max(sup_norm((g.star(eta) - eta).iter()));
        worst.max(sup_norm((g.mul(eta, eta) - eta).iter()))
    }

    pub fn finite(g: &QuantumStructure) -> f64 {
        let ok = g.mult().is_finite()
            && g.coproduct_tensor().is_finite()
            && [g.unit(), g.counit(), g.haar(), g.haar_element()]
                .iter()
                .all(|v| v.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
            && crate::linalg::matrix_is_finite(g.invol())
            && crate::linalg::matrix_is_finite(g.antipode());
        if ok {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// A finite quantum group (finite-dimensional Kac algebra).
#[derive(Clone, Debug)]
pub struct FiniteQuantumGroup(QuantumStructure);

impl Deref for FiniteQuantumGroup {
    type Target = QuantumStructure;
    fn deref(&self) -> &QuantumStructure {
        &self.0
    }
}

impl FiniteQuantumGroup {
    /// Wrap a structure without checking axioms; see [`verify_quantum_group`].
    pub fn from_structure(s: QuantumStructure) -> Self {
        FiniteQuantumGroup(s)
    }

    pub fn from_parts(parts: StructureParts, tol: &Tolerance) -> Result<Self> {
        Ok(FiniteQuantumGroup(QuantumStructure::from_parts(parts, tol)?))
    }

    pub fn structure(&self) -> &QuantumStructure {
        &self.0
    }

    pub fn into_structure(self) -> QuantumStructure {
        self.0
    }
}

/// Residual report for every finite-quantum-group axiom.
///
/// Cancellation (bijectivity of `a ⊗ b ↦ Δ(a)(1 ⊗ b)`) is not checked
/// separately: in finite dimension it follows from the antipode law.
pub fn verify_quantum_group(g: &QuantumStructure, tol: &Tolerance) -> AxiomReport {
    let mut r = AxiomReport::default();
    r.push("finite_entries", axioms::finite(g), tol);
    if !r.verdict() {
        return r;
    }
    r.push("associativity", axioms::associativity(g), tol);
    r.push("unit", axioms::unit(g), tol);
    r.push("involution_twice", axioms::involution_twice(g), tol);
    r.push("involution_antimultiplicative", axioms::involution_antimultiplicative(g), tol);
    r.push("coproduct_unital", axioms::coproduct_unital(g), tol);
    r.push("coproduct_star", axioms::coproduct_star(g), tol);
    r.push("coproduct_multiplicative", axioms::coproduct_multiplicative(g), tol);
    r.push("coassociativity", axioms::coassociativity(g), tol);
    r.push("counit_law", axioms::counit_law(g), tol);
    r.push("counit_multiplicative", axioms::counit_multiplicative(g), tol);
    r.push("antipode_law", axioms::antipode_law(g), tol);
    r.push("antipode_involutive", axioms::antipode_involutive(g), tol);
    r.push("haar_trace", axioms::haar_trace(g), tol);
    r.push("haar_normalized", axioms::haar_normalized(g), tol);
    let (min_eig, herm) = axioms::haar_gram_min_eig(g);
    let q_norm = sup_norm(g.inner_gram().iter()).max(f64::MIN_POSITIVE);
    r.push_verdict("haar_faithful_positive", (-min_eig).max(0.0).max(herm), herm <= tol.eps_eq && min_eig > tol.eps_psd * q_norm);
    r.push("haar_invariance", axioms::haar_invariance(g), tol);
    r.push("haar_element", axioms::haar_element(g), tol);
    r
}

/// The dual quantum group on the dual basis `δ_i(b_j) = δ_ij`.
pub fn dual(g: &QuantumStructure, tol: &Tolerance) -> Result<QuantumStructure> {
    QuantumStructure::from_parts(dual_parts(g), tol)
}

/// Structure constants of the dual, with Haar data left for the solvers.
pub fn dual_parts(g: &QuantumStructure) -> StructureParts {
    let n = g.dim();
    let mut mult = Tensor3::zeros(n, n, n);
    for (k, i, j, v) in g.coproduct_tensor().nonzeros() {
        mult.set(i, j, k, v);
    }
    let mut coproduct = Tensor3::zeros(n, n, n);
    for (i, j, k, v) in g.mult().nonzeros() {
        coproduct.set(k, i, j, v);
    }
    let invol = g.invol().map(|z| z.conj()).transpose() * g.antipode();
    StructureParts {
        basis_labels: g.basis_labels().iter().map(|l| format!("δ[{l}]")).collect(),
        mult,
        unit: g.counit().clone(),
        invol: invol.map(clean_scalar),
        coproduct,
        counit: Some(g.unit().clone()),
        antipode: Some(g.antipode().transpose()),
        haar: None,
        haar_element: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    /// C(Z_2) written out by hand: basis δ_0, δ_1.
    fn cz2_parts() -> StructureParts {
        let mut mult = Tensor3::zeros(2, 2, 2);
        mult.set(0, 0, 0, ONE);
        mult.set(1, 1, 1, ONE);
        let mut cop = Tensor3::zeros(2, 2, 2);
        for x in 0..2 {
            for y in 0..2 {
                cop.set((x + y) % 2, x, y, ONE);
            }
        }
        StructureParts {
            basis_labels: vec!["δ0".into(), "δ1".into()],
            mult,
            unit: CVector::from_vec(vec![ONE, ONE]),
            invol: ComplexMatrix::identity(2, 2),
            coproduct: cop,
            counit: None,
            antipode: None,
            haar: None,
            haar_element: None,
        }
    }

    #[test]
    fn solvers_on_cz2() {
        let tol = Tolerance::default();
        let g = QuantumStructure::from_parts(cz2_parts(), &tol).unwrap();
        assert!((g.counit()[0] - ONE).norm() < 1e-12 && g.counit()[1].norm() < 1e-12);
        assert!((g.haar()[0] - c(0.5)).norm() < 1e-12 && (g.haar()[1] - c(0.5)).norm() < 1e-12);
        assert!(sup_norm((g.antipode() - ComplexMatrix::identity(2, 2)).iter()) < 1e-12);
        assert!((g.haar_element()[0] - ONE).norm() < 1e-12 && g.haar_element()[1].norm() < 1e-12);
        let report = verify_quantum_group(&g, &tol);
        assert!(report.verdict(), "{report}");
    }

    #[test]
    fn basic_products() {
        let tol = Tolerance::default();
        let g = QuantumStructure::from_parts(cz2_parts(), &tol).unwrap();
        let d0 = g.basis(0);
        let d1 = g.basis(1);
        assert!(sup_norm(g.multiply(&d0, &d1).unwrap().iter()) == 0.0);
        assert_eq!(g.multiply(g.unit(), &d1).unwrap(), d1);
        let one = g.comultiply(g.unit()).unwrap();
        assert!(one.sup_dist(&TensorSquareElement::pure(g.unit(), g.unit())) < 1e-15);
        assert!(matches!(g.multiply(&CVector::zeros(3), &d0), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(g.comultiply(&CVector::zeros(1)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn broken_counit_system_is_reported() {
        let tol = Tolerance::default();
        let mut parts = cz2_parts();
        parts.coproduct = Tensor3::zeros(2, 2, 2);
        assert!(QuantumStructure::from_parts(parts, &tol).is_err());
    }

    #[test]
    fn dual_of_cz2_is_group_algebra() {
        let tol = Tolerance::default();
        let g = QuantumStructure::from_parts(cz2_parts(), &tol).unwrap();
        let d = dual(&g, &tol).unwrap();
        assert!(verify_quantum_group(&d, &tol).verdict());
        // ev_0 is the unit, ev_1 squares to it, both are group-like
        assert!(sup_norm((d.unit() - d.basis(0)).iter()) < 1e-12);
        assert!(d.comultiply_basis(1).sup_dist(&TensorSquareElement::pure(&d.basis(1), &d.basis(1))) < 1e-12);
        assert!((d.haar()[0] - ONE).norm() < 1e-12 && d.haar()[1].norm() < 1e-12);
        // counit of the dual is evaluation at 1
        assert_eq!(d.counit(), g.unit());
    }
}
