//! Group-like projections and the compressed objects `pAp` with
//! `Δ₀(b) = (p⊗p)Δ(b)(p⊗p)`.

use std::ops::Deref;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{psd_check, rank, sup_norm, CVector, ComplexMatrix, Tensor3, Tolerance, C64, ONE};
use crate::qgroup::{axioms, AxiomReport, QuantumStructure, StructureParts, TensorSquareElement};
use crate::states::{vector_state, Functional, IdempotentClassification};

/// Up to this dimension positivity of `Δ₀` is tested on the full left regular representation.
const EXACT_POSITIVITY_DIM: usize = 12;
const POSITIVITY_SAMPLES: usize = 50;

/// A finite quantum hypergroup: the coproduct need not be multiplicative.
#[derive(Clone, Debug)]
pub struct FiniteQuantumHypergroup {
    structure: QuantumStructure,
    coproduct_multiplicative: bool,
}

impl Deref for FiniteQuantumHypergroup {
    type Target = QuantumStructure;
    fn deref(&self) -> &QuantumStructure {
        &self.structure
    }
}

impl FiniteQuantumHypergroup {
    /// Fill derived data and record whether `Δ` happens to be multiplicative.
    pub fn from_parts(parts: StructureParts, tol: &Tolerance) -> Result<Self> {
        Ok(Self::from_structure(QuantumStructure::from_parts(parts, tol)?, tol))
    }

    pub fn from_structure(structure: QuantumStructure, tol: &Tolerance) -> Self {
        let coproduct_multiplicative = axioms::coproduct_multiplicative(&structure) <= tol.eps_eq;
        FiniteQuantumHypergroup { structure, coproduct_multiplicative }
    }

    /// Trust a stored multiplicativity flag (used when reading files).
    pub fn with_flag(structure: QuantumStructure, coproduct_multiplicative: bool) -> Self {
        FiniteQuantumHypergroup { structure, coproduct_multiplicative }
    }

    pub fn coproduct_multiplicative(&self) -> bool {
        self.coproduct_multiplicative
    }

    pub fn structure(&self) -> &QuantumStructure {
        &self.structure
    }

    pub fn into_structure(self) -> QuantumStructure {
        self.structure
    }
}

/// Residuals of the (good) group-like identities for `p`.
pub fn group_like_report(g: &QuantumStructure, p: &CVector, tol: &Tolerance) -> AxiomReport {
    let mut r = AxiomReport::default();
    let one = g.unit();
    let dp = g.comultiply(p).expect("caller checks the length");
    let pp = TensorSquareElement::pure(p, p);
    r.push("selfadjoint", sup_norm((g.star(p) - p).iter()), tol);
    r.push("idempotent", sup_norm((g.mul(p, p) - p).iter()), tol);
    r.push("counit_one", (g.counit_of(p) - ONE).norm(), tol);
    r.push("left_group_like", g.tensor_right(&dp, one, p).sup_dist(&pp), tol);
    r.push("right_group_like", g.tensor_right(&dp, p, one).sup_dist(&pp), tol);
    r.push("antipode_invariant", sup_norm((g.apply_antipode(p) - p).iter()), tol);
    r
}

const GROUP_LIKE: [&str; 4] = ["selfadjoint", "idempotent", "counit_one", "left_group_like"];

/// `p = p* = p²`, `ε(p) = 1`, `Δ(p)(1⊗p) = p⊗p`.
pub fn is_group_like(g: &QuantumStructure, p: &CVector, tol: &Tolerance) -> bool {
    if g.check_len(p).is_err() {
        return false;
    }
    let r = group_like_report(g, p, tol);
    GROUP_LIKE.iter().all(|n| r.get(n).is_some_and(|c| c.passed))
}

/// Group-like, and also `Δ(p)(p⊗1) = p⊗p` and `S(p) = p`.
pub fn is_good_group_like(g: &QuantumStructure, p: &CVector, tol: &Tolerance) -> bool {
    g.check_len(p).is_ok() && group_like_report(g, p, tol).verdict()
}

/// `pAp` together with the map `π(a) = pap` in compressed coordinates.
#[derive(Clone, Debug)]
pub struct Compression {
    pub hypergroup: FiniteQuantumHypergroup,
    /// Host indices `i` whose `p b_i p` form the compressed basis.
    pub pivots: Vec<usize>,
    /// Columns: the compressed basis as host elements.
    pub basis: ComplexMatrix,
    /// `π` as an `m × n` matrix on coefficient vectors.
    pub pi: ComplexMatrix,
    /// Largest multiplicativity residual of `Δ₀`.
    pub multiplicativity_residual: f64,
}

impl Compression {
    pub fn apply(&self, a: &CVector) -> CVector {
        &self.pi * a
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }
}

fn compression_matrix(g: &QuantumStructure, p: &CVector) -> ComplexMatrix {
    g.left_mult_matrix(p) * g.right_mult_matrix(p)
}

/// Rank of `a ↦ p a p`.
pub fn compression_rank(g: &QuantumStructure, p: &CVector, tol: &Tolerance) -> usize {
    rank(&compression_matrix(g, p), tol)
}

/// Compress by a good group-like projection; the result is verified.
pub fn compress(g: &QuantumStructure, p: &CVector, tol: &Tolerance) -> Result<Compression> {
    g.check_len(p)?;
    let report = group_like_report(g, p, tol);
    if !report.verdict() {
        return Err(Error::NotGood(report.failures().join(", ")));
    }
    let n = g.dim();
    let q = g.inner_gram();
    let cp = compression_matrix(g, p);
    // pivoted Gram–Schmidt in ⟨a, b⟩ = a^H Q b, pivots in basis order
    let mut pivots = Vec::new();
    let mut ortho: Vec<CVector> = Vec::new();
    for i in 0..n {
        let v = cp.column(i).into_owned();
        let vnorm = (v.adjoint() * &q * &v)[(0, 0)].re.max(0.0).sqrt();
        let mut r = v.clone();
        for u in &ortho {
            let c = (u.adjoint() * &q * &r)[(0, 0)];
            r -= u * c;
        }
        let rnorm = (r.adjoint() * &q * &r)[(0, 0)].re.max(0.0).sqrt();
        if vnorm > 0.0 && rnorm > tol.eps_eq.sqrt() * vnorm {
            ortho.push(r.unscale(rnorm));
            pivots.push(i);
        }
    }
    let m = pivots.len();
    let basis = ComplexMatrix::from_columns(&pivots.iter().map(|&i| cp.column(i).into_owned()).collect::<Vec<_>>());
    let vq = basis.adjoint() * &q;
    let coords = (&vq * &basis)
        .try_inverse()
        .ok_or_else(|| Error::VerificationFailed("compressed basis is degenerate".into()))?
        * vq;
    let pi = &coords * &cp;
    let col = |j: usize| basis.column(j).into_owned();

    let mut mult = Tensor3::zeros(m, m, m);
    for a in 0..m {
        for b in 0..m {
            let prod = &coords * g.mul(&col(a), &col(b));
            for (c, v) in prod.iter().enumerate() {
                if v.norm() >= 1e-15 {
                    mult.set(a, b, c, *v);
                }
            }
        }
    }
    let mut coproduct = Tensor3::zeros(m, m, m);
    for a in 0..m {
        let z = g.comultiply(&col(a))?;
        let z0 = &pi * z.matrix() * pi.transpose();
        for b in 0..m {
            for c in 0..m {
                if z0[(b, c)].norm() >= 1e-15 {
                    coproduct.set(a, b, c, z0[(b, c)]);
                }
            }
        }
    }
    let star_rows: Vec<CVector> = (0..m).map(|a| &coords * g.star(&col(a))).collect();
    let invol = ComplexMatrix::from_fn(m, m, |a, b| star_rows[a][b]);
    let hp = g.haar_of(p);
    let parts = StructureParts {
        basis_labels: pivots.iter().map(|&i| format!("p·{}·p", g.basis_labels()[i])).collect(),
        mult,
        unit: &coords * p,
        invol: invol.map(clean),
        coproduct,
        counit: Some(CVector::from_fn(m, |a, _| g.counit_of(&col(a)))),
        antipode: Some(&coords * g.antipode() * &basis),
        haar: Some(CVector::from_fn(m, |a, _| g.haar_of(&col(a)) / hp)),
        haar_element: Some(&coords * g.haar_element()),
    };
    let structure = QuantumStructure::from_parts(parts, tol)?;
    let multiplicativity_residual = axioms::coproduct_multiplicative(&structure);
    let hypergroup = FiniteQuantumHypergroup::with_flag(structure, multiplicativity_residual <= tol.eps_eq);
    let report = verify_hypergroup(&hypergroup, tol);
    if !report.verdict() {
        return Err(Error::VerificationFailed(format!("compressed object fails: {}", report.failures().join(", "))));
    }
    Ok(Compression { hypergroup, pivots, basis, pi, multiplicativity_residual })
}

fn clean(z: C64) -> C64 {
    let f = |x: f64| if x.abs() < 1e-14 { 0.0 } else { x };
    C64::new(f(z.re), f(z.im))
}

/// Residual report for the finite quantum hypergroup axioms, including a
/// positivity test of `Δ` on random positive elements.
pub fn verify_hypergroup(h: &QuantumStructure, tol: &Tolerance) -> AxiomReport {
    let mut r = AxiomReport::default();
    r.push("finite_entries", axioms::finite(h), tol);
    if !r.verdict() {
        return r;
    }
    r.push("associativity", axioms::associativity(h), tol);
    r.push("unit", axioms::unit(h), tol);
    r.push("involution_twice", axioms::involution_twice(h), tol);
    r.push("involution_antimultiplicative", axioms::involution_antimultiplicative(h), tol);
    r.push("coproduct_unital", axioms::coproduct_unital(h), tol);
    r.push("coproduct_star", axioms::coproduct_star(h), tol);
    r.push("coassociativity", axioms::coassociativity(h), tol);
    r.push("counit_law", axioms::counit_law(h), tol);
    r.push("counit_multiplicative", axioms::counit_multiplicative(h), tol);
    r.push("antipode_relative_haar", axioms::antipode_relative_haar(h), tol);
    r.push("haar_normalized", axioms::haar_normalized(h), tol);
    let (min_eig, herm) = axioms::haar_gram_min_eig(h);
    let q_norm = sup_norm(h.inner_gram().iter()).max(f64::MIN_POSITIVE);
    r.push_verdict("haar_faithful_positive", (-min_eig).max(0.0).max(herm), herm <= tol.eps_eq && min_eig > tol.eps_psd * q_norm);
    r.push("haar_invariance", axioms::haar_invariance(h), tol);
    let (neg, ok) = coproduct_positivity(h, tol);
    r.push_verdict("coproduct_positive", neg, ok);
    r
}

/// Largest negativity of `Δ(x^*x)` over random `x`, and the verdict.
fn coproduct_positivity(h: &QuantumStructure, tol: &Tolerance) -> (f64, bool) {
    let m = h.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let rand_vec = |rng: &mut ChaCha8Rng| CVector::from_fn(m, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let q = h.inner_gram();
    let lefts: Vec<ComplexMatrix> = (0..m).map(|a| h.left_mult_matrix(&h.basis(a))).collect();
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for _ in 0..POSITIVITY_SAMPLES {
        let x = rand_vec(&mut rng);
        let z = h.mul(&h.star(&x), &x);
        let dz = h.comultiply(&z).expect("length");
        if m <= EXACT_POSITIVITY_DIM {
            // Gram form of left multiplication by Δ(z) on L²(A⊗A, h⊗h)
            let mut op = ComplexMatrix::zeros(m * m, m * m);
            for a in 0..m {
                for b in 0..m {
                    let c = dz.matrix()[(a, b)];
                    if c.norm() >= 1e-15 {
                        op += lefts[a].kronecker(&lefts[b]) * c;
                    }
                }
            }
            let form = q.kronecker(&q) * op;
            let scale = sup_norm(form.iter()).max(1.0);
            let min = crate::linalg::min_eigenvalue(&form);
            worst = worst.max((-min / scale).max(0.0));
            ok &= psd_check(&form, tol);
        } else {
            // product vector states: (ω₁ ⊗ ω₂)(Δ(z)) ≥ 0
            for _ in 0..4 {
                let (Ok(w1), Ok(w2)) = (vector_state(h, &rand_vec(&mut rng)), vector_state(h, &rand_vec(&mut rng))) else {
                    continue;
                };
                let (w1, w2) = (w1.coeffs(), w2.coeffs());
                let v = (w1.transpose() * dz.matrix() * w2)[(0, 0)];
                let scale = sup_norm(dz.matrix().iter()).max(1.0);
                let neg = (-v.re).max(v.im.abs()) / scale;
                worst = worst.max(neg.max(0.0));
                ok &= v.re >= -tol.eps_psd * scale && v.im.abs() <= tol.eps_eq * scale;
            }
        }
    }
    (worst, ok)
}

/// The subhypergroup on which `φ` is the Haar state.
#[derive(Clone, Debug)]
pub struct CanonicalSubhypergroup {
    pub compression: Compression,
    pub classification: IdempotentClassification,
    /// Sup-norm of `φ − h₀∘π` on the host basis.
    pub haar_factorization_residual: f64,
}

pub fn canonical_subhypergroup(phi: &Functional<'_>, tol: &Tolerance) -> Result<CanonicalSubhypergroup> {
    let classification = phi.classify(tol)?;
    let p = classification.projection.clone().ok_or(Error::NotIdempotent)?;
    let g = phi.host();
    let compression = compress(g, &p, tol)?;
    let h0 = compression.hypergroup.haar();
    let factored = compression.pi.transpose() * h0;
    let haar_factorization_residual = sup_norm((factored - phi.coeffs()).iter());
    if haar_factorization_residual > tol.eps_eq {
        return Err(Error::VerificationFailed(format!("φ ≠ h₀∘π (residual {haar_factorization_residual:.3e})")));
    }
    if classification.is_haar && !compression.hypergroup.coproduct_multiplicative() {
        return Err(Error::VerificationFailed(format!(
            "Haar idempotent but Δ₀ is not multiplicative (residual {:.3e})",
            compression.multiplicativity_residual
        )));
    }
    Ok(CanonicalSubhypergroup { compression, classification, haar_factorization_residual })
}
