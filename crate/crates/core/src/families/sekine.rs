//! Sekine's quantum groups `A_k = ⊕ C d_{i,j} ⊕ M_k(C)`.
//!
//! Basis order: `d_{i,j}` at `i·k + j` (`i, j ∈ Z_k`), then `e_{r,s}` at
//! `k² + (r−1)·k + (s−1)` (`r, s ∈ {1..k}`). Every index argument is reduced
//! into its range, so `e_{0,0}` means `e_{k,k}`.

use crate::error::{Error, Result};
use crate::families::classical::verified;
use crate::families::groups::{cyclic, direct_product, FiniteGroup};
use crate::linalg::{psd_check, CVector, ComplexMatrix, Tensor3, Tolerance, C64, ONE};
use crate::qgroup::{FiniteQuantumGroup, QuantumStructure, StructureParts};
use crate::states::Functional;

/// Primitive `k`-th root of unity `exp(2πi/k)`.
pub fn root_of_unity(k: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI / k as f64)
}

fn omega_pow(k: usize, e: i64) -> C64 {
    let r = e.rem_euclid(k as i64) as f64;
    let z = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * r / k as f64);
    // exact zeros at quarter turns keep the sparse tensors sparse
    let snap = |x: f64| if x.abs() < 1e-15 { 0.0 } else { x };
    C64::new(snap(z.re), snap(z.im))
}

fn wrap(x: i64, k: usize) -> usize {
    x.rem_euclid(k as i64) as usize
}

/// Basis index of `d_{i,j}`.
pub fn d_index(k: usize, i: i64, j: i64) -> usize {
    wrap(i, k) * k + wrap(j, k)
}

/// Basis index of `e_{r,s}`.
pub fn e_index(k: usize, r: i64, s: i64) -> usize {
    k * k + wrap(r - 1, k) * k + wrap(s - 1, k)
}

/// Recover `k` from a host of dimension `2k²`.
pub fn sekine_k(host: &QuantumStructure) -> Result<usize> {
    let n = host.dim();
    let k = ((n / 2) as f64).sqrt().round() as usize;
    if k == 0 || 2 * k * k != n {
        return Err(Error::DimensionMismatch { expected: 2 * k.max(1) * k.max(1), got: n });
    }
    Ok(k)
}

/// `A_k` with structure constants taken directly from the coproduct formulas.
pub fn build_sekine(k: usize, tol: &Tolerance) -> Result<FiniteQuantumGroup> {
    if k == 0 {
        return Err(Error::InvalidK(k));
    }
    let n = 2 * k * k;
    let ki = k as i64;
    let range = || 0..ki;
    let erange = || 1..=ki;
    let (d, e) = (|i, j| d_index(k, i, j), |r, s| e_index(k, r, s));

    let mut mult = Tensor3::zeros(n, n, n);
    for i in range() {
        for j in range() {
            mult.set(d(i, j), d(i, j), d(i, j), ONE);
        }
    }
    for r in erange() {
        for s in erange() {
            for t in erange() {
                mult.set(e(r, s), e(s, t), e(r, t), ONE);
            }
        }
    }

    let mut cop = Tensor3::zeros(n, n, n);
    let inv_k = 1.0 / k as f64;
    for i in range() {
        for j in range() {
            for m in range() {
                for nn in range() {
                    cop.add(d(i, j), d(m, nn), d(i - m, j - nn), ONE);
                }
            }
            for m in erange() {
                for nn in erange() {
                    cop.add(d(i, j), e(m, nn), e(m + j, nn + j), omega_pow(k, i * (m - nn)) * inv_k);
                }
            }
        }
    }
    for i in erange() {
        for j in erange() {
            for m in range() {
                for nn in range() {
                    cop.add(e(i, j), d(-m, -nn), e(i - nn, j - nn), omega_pow(k, m * (i - j)));
                    cop.add(e(i, j), e(i - nn, j - nn), d(m, nn), omega_pow(k, m * (j - i)));
                }
            }
        }
    }

    let mut unit = CVector::zeros(n);
    for i in range() {
        for j in range() {
            unit[d(i, j)] = ONE;
        }
    }
    for r in erange() {
        unit[e(r, r)] = ONE;
    }
    // e_{r,s}* = e_{s,r}; d's are selfadjoint
    let mut invol = ComplexMatrix::zeros(n, n);
    for i in 0..k * k {
        invol[(i, i)] = ONE;
    }
    for r in erange() {
        for s in erange() {
            invol[(e(r, s), e(s, r))] = ONE;
        }
    }

    let mut labels = Vec::with_capacity(n);
    for i in 0..k {
        for j in 0..k {
            labels.push(format!("d[{i},{j}]"));
        }
    }
    for r in 1..=k {
        for s in 1..=k {
            labels.push(format!("e[{r},{s}]"));
        }
    }

    FiniteQuantumGroup::from_parts(
        StructureParts {
            basis_labels: labels,
            mult,
            unit,
            invol,
            coproduct: cop,
            counit: None,
            antipode: None,
            haar: Some(sekine_haar_closed_form(k)),
            haar_element: None,
        },
        tol,
    )
}

/// `h = (1/2k²) Σ d̃_{i,j} + (1/2k) Σ ẽ_{i,i}`.
pub fn sekine_haar_closed_form(k: usize) -> CVector {
    let n = 2 * k * k;
    let mut h = CVector::zeros(n);
    let ki = k as i64;
    for i in 0..ki {
        for j in 0..ki {
            h[d_index(k, i, j)] = C64::new(1.0 / (2 * k * k) as f64, 0.0);
        }
    }
    for r in 1..=ki {
        h[e_index(k, r, r)] = C64::new(1.0 / (2 * k) as f64, 0.0);
    }
    h
}

/// `φ_l = (1/2k) Σ_i d̃_{i,0} + ½ ẽ_{l,l}`, for `1 ≤ l ≤ k`.
pub fn sekine_phi_l<'h>(host: &'h QuantumStructure, l: usize, tol: &Tolerance) -> Result<Functional<'h>> {
    let k = sekine_k(host)?;
    if l == 0 || l > k {
        return Err(Error::InvalidParameters(format!("l = {l} outside 1..={k}")));
    }
    let mut c = CVector::zeros(host.dim());
    for i in 0..k as i64 {
        c[d_index(k, i, 0)] = C64::new(1.0 / (2 * k) as f64, 0.0);
    }
    c[e_index(k, l as i64, l as i64)] = C64::new(0.5, 0.0);
    verified(Functional::new(host, c)?, tol, "φ_l")
}

/// `γ_{k,p} = (1/2km) Σ_i Σ_l d̃_{i,lp} + (1/2m) Σ_l ẽ_{lp,lp}` with `pm = k`.
pub fn sekine_gamma<'h>(host: &'h QuantumStructure, p: usize, tol: &Tolerance) -> Result<Functional<'h>> {
    let k = sekine_k(host)?;
    if p < 2 || k % p != 0 || k / p < 2 {
        return Err(Error::InvalidParameters(format!("need p·m = {k} with p, m ≥ 2, got p = {p}")));
    }
    let m = k / p;
    let mut c = CVector::zeros(host.dim());
    let dw = C64::new(1.0 / (2 * k * m) as f64, 0.0);
    let ew = C64::new(1.0 / (2 * m) as f64, 0.0);
    for l in 0..m {
        let lp = (l * p) as i64;
        for i in 0..k as i64 {
            c[d_index(k, i, lp)] += dw;
        }
        c[e_index(k, lp, lp)] += ew;
    }
    verified(Functional::new(host, c)?, tol, "γ_{k,p}")
}

/// `Z_k × Z_k`, with `(i, j)` at index `i·k + j` to match `d_{i,j}`.
pub fn sekine_index_group(k: usize) -> FiniteGroup {
    direct_product(&cyclic(k), &cyclic(k))
}

/// `h_Γ = (1/#Γ) Σ_{(i,j)∈Γ} d̃_{i,j}` for `Γ ≤ Z_k×Z_k` given in [`sekine_index_group`] indices.
pub fn sekine_subgroup_state<'h>(host: &'h QuantumStructure, gamma: &[usize], tol: &Tolerance) -> Result<Functional<'h>> {
    let k = sekine_k(host)?;
    let group = sekine_index_group(k);
    if !group.is_subgroup(gamma) {
        return Err(Error::NotASubgroup);
    }
    let mut c = CVector::zeros(host.dim());
    let w = C64::new(1.0 / gamma.len() as f64, 0.0);
    for &x in gamma {
        c[x] = w;
    }
    verified(Functional::new(host, c)?, tol, "h_Γ")
}

/// State criterion on coefficients: `α ≥ 0`, `κ` positive semidefinite, total mass one.
pub fn lemma_is_state(k: usize, coeffs: &CVector, tol: &Tolerance) -> Result<bool> {
    if coeffs.len() != 2 * k * k {
        return Err(Error::DimensionMismatch { expected: 2 * k * k, got: coeffs.len() });
    }
    let alpha_ok = coeffs.iter().take(k * k).all(|a| a.im.abs() <= tol.eps_eq && a.re >= -tol.eps_eq);
    let kappa = ComplexMatrix::from_fn(k, k, |r, s| coeffs[k * k + r * k + s]);
    let herm = (&kappa - kappa.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max) <= tol.eps_eq;
    let mass: C64 = coeffs.iter().take(k * k).sum::<C64>() + (0..k).map(|r| kappa[(r, r)]).sum::<C64>();
    Ok(alpha_ok && herm && psd_check(&kappa, tol) && (mass - ONE).norm() <= tol.eps_eq)
}
