//! The commutative hypergroups `B_k`, their duals `C_k`, and the maps `A_k → B_k`.
//!
//! `B_k` basis: `p_0 .. p_{k−1}`, then `q`.
//! `C_k` basis: `r_1 .. r_{k−1}`, then `r_+`, `r_−`.

use crate::error::{Error, Result};
use crate::families::sekine::{d_index, e_index, sekine_k};
use crate::hypergroup::FiniteQuantumHypergroup;
use crate::linalg::{CVector, ComplexMatrix, Tensor3, Tolerance, C64, ONE, ZERO};
use crate::qgroup::{QuantumStructure, StructureParts};
use crate::states::Functional;

fn diagonal_parts(labels: Vec<String>, coproduct: Tensor3) -> StructureParts {
    let n = labels.len();
    StructureParts {
        basis_labels: labels,
        mult: Tensor3::from_fn(n, n, n, |i, j, k| if i == j && j == k { ONE } else { ZERO }),
        unit: CVector::from_element(n, ONE),
        invol: ComplexMatrix::identity(n, n),
        coproduct,
        counit: None,
        antipode: None,
        haar: None,
        haar_element: None,
    }
}

/// `Δ(p_j) = Σ_i p_i⊗p_{j−i} + (1/k) q⊗q`, `Δ(q) = (Σ p_i)⊗q + q⊗(Σ p_i)`.
pub fn build_bk(k: usize, tol: &Tolerance) -> Result<FiniteQuantumHypergroup> {
    if k < 2 {
        return Err(Error::InvalidK(k));
    }
    let q = k;
    let mut cop = Tensor3::zeros(k + 1, k + 1, k + 1);
    for j in 0..k {
        for i in 0..k {
            cop.add(j, i, (j + k - i) % k, ONE);
        }
        cop.add(j, q, q, C64::new(1.0 / k as f64, 0.0));
    }
    for i in 0..k {
        cop.add(q, i, q, ONE);
        cop.add(q, q, i, ONE);
    }
    let mut labels: Vec<String> = (0..k).map(|j| format!("p[{j}]")).collect();
    labels.push("q".into());
    FiniteQuantumHypergroup::from_parts(diagonal_parts(labels, cop), tol)
}

fn r_index(k: usize, m: i64) -> Option<usize> {
    let m = m.rem_euclid(k as i64) as usize;
    (m != 0).then(|| m - 1)
}

/// The dual of `B_k` on its minimal projections.
///
/// `Δ(r_m) = Σ_{a+b≡m; a,b≠0} r_a⊗r_b + r_m⊗(r_++r_−) + (r_++r_−)⊗r_m`,
/// `Δ(r_±) = ½ Σ_{a≠0} r_a⊗r_{−a} + r_+⊗r_± + r_−⊗r_∓`.
pub fn build_ck(k: usize, tol: &Tolerance) -> Result<FiniteQuantumHypergroup> {
    if k < 2 {
        return Err(Error::InvalidK(k));
    }
    let (plus, minus) = (k - 1, k);
    let ki = k as i64;
    let mut cop = Tensor3::zeros(k + 1, k + 1, k + 1);
    for m in 1..ki {
        let rm = r_index(k, m).expect("m ≠ 0");
        for a in 1..ki {
            if let Some(rb) = r_index(k, m - a) {
                cop.add(rm, r_index(k, a).expect("a ≠ 0"), rb, ONE);
            }
        }
        for s in [plus, minus] {
            cop.add(rm, rm, s, ONE);
            cop.add(rm, s, rm, ONE);
        }
    }
    let half = C64::new(0.5, 0.0);
    for (target, same, other) in [(plus, plus, minus), (minus, minus, plus)] {
        for a in 1..ki {
            cop.add(target, r_index(k, a).expect("a ≠ 0"), r_index(k, -a).expect("−a ≠ 0"), half);
        }
        cop.add(target, plus, same, ONE);
        cop.add(target, minus, other, ONE);
    }
    let mut labels: Vec<String> = (1..k).map(|m| format!("r[{m}]")).collect();
    labels.push("r[+]".into());
    labels.push("r[-]".into());
    FiniteQuantumHypergroup::from_parts(diagonal_parts(labels, cop), tol)
}

/// Columns: the `C_k` basis expressed in the dual basis `(p̂_0 .. p̂_{k−1}, q̂)` of `B_k`.
///
/// `r_m = (1/k) Σ_j ω^{mj} p̂_j`, `r_± = (1/2k) Σ_j p̂_j ± ½ q̂`.
pub fn ck_in_dual_basis(k: usize) -> ComplexMatrix {
    let mut t = ComplexMatrix::zeros(k + 1, k + 1);
    for m in 1..k {
        for j in 0..k {
            t[(j, m - 1)] = C64::from_polar(1.0 / k as f64, 2.0 * std::f64::consts::PI * ((m * j) % k) as f64 / k as f64);
        }
    }
    for j in 0..k {
        t[(j, k - 1)] = C64::new(0.5 / k as f64, 0.0);
        t[(j, k)] = C64::new(0.5 / k as f64, 0.0);
    }
    t[(k, k - 1)] = C64::new(0.5, 0.0);
    t[(k, k)] = C64::new(-0.5, 0.0);
    t
}

/// `π: A_k → B_k`, `π(d_{i,0}) = p_i`, `π(d_{i,j}) = 0` for `j ≠ 0`,
/// `π(e_{l,l}) = q`, all other `e_{r,s} ↦ 0`. Returned as a `(k+1) × 2k²` matrix.
pub fn bk_pi(k: usize, l: usize) -> Result<ComplexMatrix> {
    if k < 2 {
        return Err(Error::InvalidK(k));
    }
    if l == 0 || l > k {
        return Err(Error::InvalidParameters(format!("l = {l} outside 1..={k}")));
    }
    let mut pi = ComplexMatrix::zeros(k + 1, 2 * k * k);
    for i in 0..k {
        pi[(i, d_index(k, i as i64, 0))] = ONE;
    }
    pi[(k, e_index(k, l as i64, l as i64))] = ONE;
    Ok(pi)
}

/// Residuals of `π` against `A_k` and `B_k`: `[unital, (π⊗π)Δ − Δπ, h_B∘π − φ]`.
pub fn pi_residuals(a: &QuantumStructure, b: &QuantumStructure, pi: &ComplexMatrix, phi: &Functional<'_>) -> Result<[f64; 3]> {
    let k = sekine_k(a)?;
    if b.dim() != k + 1 || pi.shape() != (k + 1, a.dim()) {
        return Err(Error::DimensionMismatch { expected: k + 1, got: b.dim() });
    }
    let unital = crate::linalg::sup_dist(&(pi * a.unit()), b.unit());
    let mut intertwine = 0.0_f64;
    for i in 0..a.dim() {
        let lhs = pi * a.comultiply(&a.basis(i))?.matrix() * pi.transpose();
        let rhs = b.comultiply(&pi.column(i).into_owned())?;
        intertwine = intertwine.max((lhs - rhs.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let pulled = pi.transpose() * b.haar();
    let haar = crate::linalg::sup_dist(&pulled, phi.coeffs());
    Ok([unital, intertwine, haar])
}

/// A permutation `σ` with `b_i ↦ b'_{σ(i)}` carrying every structure constant of
/// `a` onto those of `b`, if one exists. Exhaustive, for small dimensions.
pub fn find_basis_permutation(a: &QuantumStructure, b: &QuantumStructure, tol: &Tolerance) -> Option<Vec<usize>> {
    let n = a.dim();
    if b.dim() != n {
        return None;
    }
    let close = |x: C64, y: C64| (x - y).norm() <= tol.eps_eq;
    let matches = |s: &[usize]| -> bool {
        (0..n).all(|i| close(a.unit()[i], b.unit()[s[i]]))
            && (0..n).all(|i| (0..n).all(|j| close(a.invol()[(i, j)], b.invol()[(s[i], s[j])])))
            && (0..n).all(|i| {
                (0..n).all(|j| {
                    (0..n).all(|k| {
                        close(a.mult().get(i, j, k), b.mult().get(s[i], s[j], s[k]))
                            && close(a.coproduct_tensor().get(i, j, k), b.coproduct_tensor().get(s[i], s[j], s[k]))
                    })
                })
            })
    };
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    if matches(&perm) {
        return Some(perm);
    }
    // Heap's algorithm
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if matches(&perm) {
                return Some(perm);
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    None
}
