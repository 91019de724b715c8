use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::families::groups::FiniteGroup;
use crate::linalg::{CVector, ComplexMatrix, Tensor3, Tolerance, C64, ONE, ZERO};
use crate::qgroup::{FiniteQuantumGroup, QuantumStructure, StructureParts};
use crate::states::Functional;

fn indicator(n: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[i] = ONE;
    v
}

/// `C(G)`: basis `δ_g`, pointwise product, `Δ(δ_g) = Σ_{xy=g} δ_x⊗δ_y`.
pub fn build_function_algebra(g: &FiniteGroup, tol: &Tolerance) -> Result<FiniteQuantumGroup> {
    let n = g.order();
    let mult = Tensor3::from_fn(n, n, n, |i, j, k| if i == j && j == k { ONE } else { ZERO });
    let mut coproduct = Tensor3::zeros(n, n, n);
    for x in 0..n {
        for y in 0..n {
            coproduct.set(g.mul(x, y), x, y, ONE);
        }
    }
    let antipode = ComplexMatrix::from_fn(n, n, |l, j| if l == g.inv(j) { ONE } else { ZERO });
    FiniteQuantumGroup::from_parts(
        StructureParts {
            basis_labels: g.labels().iter().map(|l| format!("δ[{l}]")).collect(),
            mult,
            unit: CVector::from_element(n, ONE),
            invol: ComplexMatrix::identity(n, n),
            coproduct,
            counit: Some(indicator(n, g.identity())),
            antipode: Some(antipode),
            haar: Some(CVector::from_element(n, C64::new(1.0 / n as f64, 0.0))),
            haar_element: Some(indicator(n, g.identity())),
        },
        tol,
    )
}

/// `C*(Γ)`: basis `λ_γ`, `λ_gλ_h = λ_{gh}`, `Δ(λ_g) = λ_g⊗λ_g`.
pub fn build_group_algebra(g: &FiniteGroup, tol: &Tolerance) -> Result<FiniteQuantumGroup> {
    let n = g.order();
    let mut mult = Tensor3::zeros(n, n, n);
    for x in 0..n {
        for y in 0..n {
            mult.set(x, y, g.mul(x, y), ONE);
        }
    }
    let coproduct = Tensor3::from_fn(n, n, n, |i, j, k| if i == j && j == k { ONE } else { ZERO });
    let inv = ComplexMatrix::from_fn(n, n, |l, j| if l == g.inv(j) { ONE } else { ZERO });
    FiniteQuantumGroup::from_parts(
        StructureParts {
            basis_labels: g.labels().iter().map(|l| format!("λ[{l}]")).collect(),
            mult,
            unit: indicator(n, g.identity()),
            invol: inv.clone(),
            coproduct,
            counit: Some(CVector::from_element(n, ONE)),
            antipode: Some(inv),
            haar: Some(indicator(n, g.identity())),
            haar_element: Some(CVector::from_element(n, C64::new(1.0 / n as f64, 0.0))),
        },
        tol,
    )
}

fn subgroup_set(g: &FiniteGroup, h: &[usize]) -> Result<BTreeSet<usize>> {
    if !g.is_subgroup(h) {
        return Err(Error::NotASubgroup);
    }
    Ok(h.iter().copied().collect())
}

pub(crate) fn verified<'h>(f: Functional<'h>, tol: &Tolerance, what: &str) -> Result<Functional<'h>> {
    if f.is_idempotent_state(tol) {
        Ok(f)
    } else {
        Err(Error::VerificationFailed(format!("{what} is not an idempotent state")))
    }
}

/// `μ_H` on `C(G)`: the uniform probability on `H`.
pub fn function_algebra_subgroup_state<'h>(
    host: &'h QuantumStructure,
    g: &FiniteGroup,
    h: &[usize],
    tol: &Tolerance,
) -> Result<Functional<'h>> {
    let set = subgroup_set(g, h)?;
    host.check_len(&CVector::zeros(g.order()))?;
    let w = C64::new(1.0 / set.len() as f64, 0.0);
    let coeffs = CVector::from_fn(g.order(), |i, _| if set.contains(&i) { w } else { ZERO });
    verified(Functional::new(host, coeffs)?, tol, "subgroup state")
}

/// `χ_H` on `C*(Γ)`: `λ_g ↦ [g ∈ H]`.
pub fn group_algebra_subgroup_state<'h>(
    host: &'h QuantumStructure,
    g: &FiniteGroup,
    h: &[usize],
    tol: &Tolerance,
) -> Result<Functional<'h>> {
    let set = subgroup_set(g, h)?;
    host.check_len(&CVector::zeros(g.order()))?;
    let coeffs = CVector::from_fn(g.order(), |i, _| if set.contains(&i) { ONE } else { ZERO });
    verified(Functional::new(host, coeffs)?, tol, "subgroup indicator")
}

/// The indicator functional of an arbitrary subset of `Γ` on `C*(Γ)`, unverified.
pub fn group_algebra_indicator<'h>(host: &'h QuantumStructure, subset: &[usize]) -> Result<Functional<'h>> {
    let mut coeffs = CVector::zeros(host.dim());
    for &i in subset {
        if i >= host.dim() {
            return Err(Error::DimensionMismatch { expected: host.dim(), got: i + 1 });
        }
        coeffs[i] = ONE;
    }
    Functional::new(host, coeffs)
}

/// Which classical group structure a quantum group carries in its given basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassicalKind {
    /// `C(G)` on the basis of point masses.
    Functions,
    /// `C*(Γ)` on the basis of group elements.
    GroupAlgebra,
}

fn strip_label(label: &str) -> String {
    for prefix in ["δ[", "λ["] {
        if let Some(rest) = label.strip_prefix(prefix).and_then(|r| r.strip_suffix(']')) {
            return rest.to_string();
        }
    }
    label.to_string()
}

fn exact(z: C64, target: f64, tol: &Tolerance) -> bool {
    (z - C64::new(target, 0.0)).norm() <= tol.eps_eq
}

/// Recover `G` from a structure that is literally `C(G)` or `C*(G)` in its basis.
pub fn recover_group(host: &QuantumStructure, tol: &Tolerance) -> Result<(ClassicalKind, FiniteGroup)> {
    let n = host.dim();
    let labels: Vec<String> = host.basis_labels().iter().map(|l| strip_label(l)).collect();
    // the tensor whose fibres encode the group law, and the one that must be diagonal
    let try_kind = |law: &Tensor3, diag: &Tensor3, law_is_coproduct: bool| -> Option<Vec<Vec<usize>>> {
        for i in 0..n {
            let s = diag.slice(i);
            if s.len() != 1 || s[0].0 != i || s[0].1 != i || !exact(s[0].2, 1.0, tol) {
                return None;
            }
        }
        let mut table = vec![vec![usize::MAX; n]; n];
        for (a, b, c, v) in law.nonzeros() {
            if v.norm() <= tol.eps_eq {
                continue;
            }
            if !exact(v, 1.0, tol) {
                return None;
            }
            let (x, y, z) = if law_is_coproduct { (b, c, a) } else { (a, b, c) };
            if table[x][y] != usize::MAX {
                return None;
            }
            table[x][y] = z;
        }
        table.iter().flatten().all(|&z| z != usize::MAX).then_some(table)
    };
    let attempt = |kind, table: Vec<Vec<usize>>| FiniteGroup::new(labels.clone(), table).map(|g| (kind, g));
    if let Some(table) = try_kind(host.coproduct_tensor(), host.mult(), true) {
        return attempt(ClassicalKind::Functions, table);
    }
    if let Some(table) = try_kind(host.mult(), host.coproduct_tensor(), false) {
        return attempt(ClassicalKind::GroupAlgebra, table);
    }
    Err(Error::NotAGroup("structure is neither C(G) nor C*(G) in its basis".into()))
}
