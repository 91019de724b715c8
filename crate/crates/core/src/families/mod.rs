//! Example families: classical groups, Sekine's `A_k`, and the hypergroups `B_k`, `C_k`.

pub mod classical;
pub mod groups;
pub mod hyper;
pub mod sekine;

pub use classical::{
    build_function_algebra, build_group_algebra, function_algebra_subgroup_state, group_algebra_indicator,
    group_algebra_subgroup_state, recover_group, ClassicalKind,
};
pub use groups::{cyclic, dihedral, direct_product, klein_four, named_group, parse_cayley, quaternion, symmetric, FiniteGroup, Subgroup};
pub use hyper::{bk_pi, build_bk, build_ck, ck_in_dual_basis, find_basis_permutation, pi_residuals};
pub use sekine::{
    build_sekine, d_index, e_index, lemma_is_state, root_of_unity, sekine_gamma, sekine_haar_closed_form, sekine_index_group,
    sekine_k, sekine_phi_l, sekine_subgroup_state,
};

use crate::error::Result;
use crate::linalg::Tolerance;
use crate::qgroup::QuantumStructure;
use crate::states::Functional;

/// The group whose subgroups label Haar idempotents on a host.
#[derive(Clone, Copy, Debug)]
pub enum SubgroupHost<'g> {
    /// `C(G)`: `μ_H`.
    Functions(&'g FiniteGroup),
    /// `C*(Γ)`: `χ_H`.
    GroupAlgebra(&'g FiniteGroup),
    /// `A_k`: `h_Γ` for `Γ ≤ Z_k×Z_k`.
    Sekine,
}

/// The idempotent state attached to a subgroup, post-verified.
pub fn subgroup_haar_idempotent<'h>(
    host: &'h QuantumStructure,
    kind: SubgroupHost<'_>,
    h: &[usize],
    tol: &Tolerance,
) -> Result<Functional<'h>> {
    match kind {
        SubgroupHost::Functions(g) => function_algebra_subgroup_state(host, g, h, tol),
        SubgroupHost::GroupAlgebra(g) => group_algebra_subgroup_state(host, g, h, tol),
        SubgroupHost::Sekine => sekine_subgroup_state(host, h, tol),
    }
}
