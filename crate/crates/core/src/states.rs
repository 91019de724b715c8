//! Functionals on a finite quantum group: convolution, the box product,
//! Fourier transforms, associated projections and the Haar/non-Haar split.
//!
//! A [`Functional`] borrows its host and stores `φ(b_i)` for every basis
//! element. Equality tests use the sup-norm on these coefficients.

use std::cmp::Ordering;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{cesaro_projection, kernel_basis, psd_check, sup_norm, CVector, ComplexMatrix, Tolerance, C64, ONE};
use crate::qgroup::QuantumStructure;

/// Radius used to merge numerically equal idempotents.
pub const CLUSTER_RADIUS: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Functional<'h> {
    host: &'h QuantumStructure,
    coeffs: CVector,
}

impl PartialEq for Functional<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.host, other.host) && self.coeffs == other.coeffs
    }
}

/// Result of [`Functional::classify`].
#[derive(Clone, Debug, PartialEq)]
pub struct IdempotentClassification {
    pub is_idempotent: bool,
    pub is_state: bool,
    /// `p̂_φ`, present only for idempotent states.
    pub projection: Option<CVector>,
    pub is_haar: bool,
    pub null_space_dim: usize,
    pub null_space_selfadjoint: bool,
    /// Largest commutator `[p̂_φ, b_i]`.
    pub centrality_residual: f64,
}

/// `N_φ = {a : a p̂_φ = 0}` with an orthonormal coefficient basis.
#[derive(Clone, Debug)]
pub struct NullSpace {
    pub basis: Vec<CVector>,
    pub selfadjoint: bool,
    /// Largest `‖v^* p̂_φ‖` over the basis.
    pub selfadjoint_residual: f64,
}

impl<'h> Functional<'h> {
    pub fn new(host: &'h QuantumStructure, coeffs: CVector) -> Result<Self> {
        host.check_len(&coeffs)?;
        if coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameters("non-finite functional coefficients".into()));
        }
        Ok(Functional { host, coeffs })
    }

    pub(crate) fn raw(host: &'h QuantumStructure, coeffs: CVector) -> Self {
        debug_assert_eq!(coeffs.len(), host.dim());
        Functional { host, coeffs }
    }

    pub fn counit(host: &'h QuantumStructure) -> Self {
        Functional::raw(host, host.counit().clone())
    }

    pub fn haar(host: &'h QuantumStructure) -> Self {
        Functional::raw(host, host.haar().clone())
    }

    pub fn host(&self) -> &'h QuantumStructure {
        self.host
    }

    pub fn coeffs(&self) -> &CVector {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> CVector {
        self.coeffs
    }

    pub fn eval(&self, a: &CVector) -> C64 {
        self.coeffs.iter().zip(a.iter()).map(|(c, x)| c * x).sum()
    }

    pub fn sup_dist(&self, other: &Functional<'_>) -> f64 {
        sup_norm((&self.coeffs - &other.coeffs).iter())
    }

    pub fn scaled(&self, s: C64) -> Functional<'h> {
        Functional::raw(self.host, &self.coeffs * s)
    }

    fn same_host(&self, other: &Functional<'_>) -> Result<()> {
        if std::ptr::eq(self.host, other.host) {
            Ok(())
        } else {
            Err(Error::HostMismatch)
        }
    }

    /// `φ ⋆ ψ = (φ ⊗ ψ)Δ`.
    pub fn convolve(&self, other: &Functional<'h>) -> Result<Functional<'h>> {
        self.same_host(other)?;
        Ok(Functional::raw(self.host, self.left_convolution_operator() * &other.coeffs))
    }

    /// Matrix of `ψ ↦ φ ⋆ ψ` on coefficient vectors.
    pub fn left_convolution_operator(&self) -> ComplexMatrix {
        let n = self.host.dim();
        let mut l = ComplexMatrix::zeros(n, n);
        for (i, j, k, d) in self.host.coproduct_tensor().nonzeros() {
            l[(i, k)] += d * self.coeffs[j];
        }
        l
    }

    /// `[φ(b_a b_j)]`.
    fn product_values(&self) -> ComplexMatrix {
        let n = self.host.dim();
        let m = self.host.mult();
        ComplexMatrix::from_fn(n, n, |a, j| m.fibre(a, j).iter().map(|&(k, v)| v * self.coeffs[k]).sum())
    }

    /// `[φ(b_i^* b_j)]`.
    pub fn gram(&self) -> ComplexMatrix {
        self.host.invol() * self.product_values()
    }

    pub fn is_state(&self, tol: &Tolerance) -> bool {
        (self.eval(self.host.unit()) - ONE).norm() <= tol.eps_eq && psd_check(&self.gram(), tol)
    }

    /// Sup-norm of `φ ⋆ φ − φ`.
    pub fn idempotency_residual(&self) -> f64 {
        let sq = self.left_convolution_operator() * &self.coeffs;
        sup_norm((sq - &self.coeffs).iter())
    }

    pub fn is_idempotent_state(&self, tol: &Tolerance) -> bool {
        self.idempotency_residual() <= tol.eps_eq * scale(&self.coeffs) && self.is_state(tol)
    }

    /// The element `X` with `φ = h(· X)`.
    pub fn inverse_fourier(&self) -> Result<CVector> {
        let lu = self.host.haar_gram().clone().lu();
        let x = lu.solve(&self.coeffs).ok_or(Error::SingularGram)?;
        let res = sup_norm((self.host.haar_gram() * &x - &self.coeffs).iter());
        if !res.is_finite() || res > 1e-8 * scale(&self.coeffs) * sup_norm(x.iter()).max(1.0) {
            return Err(Error::SingularGram);
        }
        Ok(x)
    }

    /// `p̂_φ = F⁻¹φ / ε(F⁻¹φ)`, checked against `φ(a) = h(p̂ a p̂)/h(p̂)` and `F⁻¹φ = p̂/h(p̂)`.
    pub fn associated_projection(&self, tol: &Tolerance) -> Result<CVector> {
        if !self.is_idempotent_state(tol) {
            return Err(Error::NotIdempotent);
        }
        let g = self.host;
        let x = self.inverse_fourier()?;
        let e = g.counit_of(&x);
        if e.norm() <= tol.eps_eq {
            return Err(Error::VerificationFailed("ε(F⁻¹φ) vanishes".into()));
        }
        let p = x.map(|z| z / e);
        let report = projection_residuals(self, &p, &x);
        let worst = report.iter().map(|(_, r)| *r).fold(0.0, f64::max);
        if worst > tol.eps_eq * scale(&p) {
            let names: Vec<_> = report.iter().filter(|(_, r)| *r > tol.eps_eq * scale(&p)).map(|(n, r)| format!("{n} ({r:.2e})")).collect();
            return Err(Error::VerificationFailed(names.join(", ")));
        }
        Ok(p)
    }

    pub fn null_space(&self, tol: &Tolerance) -> Result<NullSpace> {
        let p = self.associated_projection(tol)?;
        Ok(null_space_of(self.host, &p, tol))
    }

    /// Haar test by centrality of `p̂_φ` and by selfadjointness of `N_φ`; the two must agree.
    pub fn classify(&self, tol: &Tolerance) -> Result<IdempotentClassification> {
        let is_state = self.is_state(tol);
        let is_idempotent = is_state && self.idempotency_residual() <= tol.eps_eq * scale(&self.coeffs);
        if !is_idempotent {
            return Ok(IdempotentClassification {
                is_idempotent: false,
                is_state,
                projection: None,
                is_haar: false,
                null_space_dim: 0,
                null_space_selfadjoint: false,
                centrality_residual: f64::NAN,
            });
        }
        let p = self.associated_projection(tol)?;
        let centrality_residual = self.host.commutator_residual(&p);
        let central = centrality_residual <= tol.eps_eq * scale(&p);
        let ns = null_space_of(self.host, &p, tol);
        if central != ns.selfadjoint {
            return Err(Error::InconsistentClassification { central, selfadjoint: ns.selfadjoint });
        }
        Ok(IdempotentClassification {
            is_idempotent,
            is_state,
            projection: Some(p),
            is_haar: central,
            null_space_dim: ns.basis.len(),
            null_space_selfadjoint: ns.selfadjoint,
            centrality_residual,
        })
    }

    /// `φ ∘ S = φ`.
    pub fn s_invariant(&self, tol: &Tolerance) -> bool {
        let composed = self.host.antipode().transpose() * &self.coeffs;
        sup_norm((composed - &self.coeffs).iter()) <= tol.eps_eq * scale(&self.coeffs)
    }

    /// `φ ⊛ ψ` through `F⁻¹(φ ⊛ ψ) = F⁻¹φ · F⁻¹ψ`, cross-checked against
    /// `(1/h(η)) φ(S(η₍₂₎)x) ψ(η₍₁₎)`.
    pub fn box_product(&self, other: &Functional<'h>, tol: &Tolerance) -> Result<Functional<'h>> {
        self.same_host(other)?;
        let fourier = self.box_product_fourier(other)?;
        let direct = self.box_product_direct(other)?;
        let diff = fourier.sup_dist(&direct);
        if diff > tol.eps_eq * scale(&fourier.coeffs) {
            return Err(Error::CrossCheckFailed(format!("box product routes differ by {diff:.3e}")));
        }
        Ok(fourier)
    }

    pub fn box_product_fourier(&self, other: &Functional<'h>) -> Result<Functional<'h>> {
        self.same_host(other)?;
        let x = self.inverse_fourier()?;
        let y = other.inverse_fourier()?;
        Ok(forward_fourier(self.host, &self.host.mul(&x, &y)))
    }

    pub fn box_product_direct(&self, other: &Functional<'h>) -> Result<Functional<'h>> {
        self.same_host(other)?;
        let g = self.host;
        let eta = g.haar_element();
        let h_eta = g.haar_of(eta);
        if h_eta.norm() == 0.0 {
            return Err(Error::SingularGram);
        }
        let z = g.comultiply(eta)?;
        // w[b][i] = φ(S(b_b) b_i)
        let w = g.antipode().transpose() * self.product_values();
        let row = other.coeffs.transpose() * z.matrix() * w;
        Ok(Functional::raw(g, row.transpose().map(|v| v / h_eta)))
    }

    /// `ω ↦ ω(p̂_φ)` as a functional on the dual host.
    pub fn dual_idempotent<'d>(&self, dual_host: &'d QuantumStructure, tol: &Tolerance) -> Result<Functional<'d>> {
        let p = self.associated_projection(tol)?;
        let f = Functional::new(dual_host, p)?;
        if !f.is_idempotent_state(tol) {
            return Err(Error::NotIdempotent);
        }
        Ok(f)
    }

    /// Cesàro limit of `φ^{⋆n}`, i.e. the projection of `L_φ` applied to `ε`.
    pub fn cesaro_limit(&self, tol: &Tolerance) -> Result<Functional<'h>> {
        let p = cesaro_projection(&self.left_convolution_operator(), tol)?;
        Ok(Functional::raw(self.host, p * self.host.counit()))
    }
}

fn scale(v: &CVector) -> f64 {
    sup_norm(v.iter()).max(1.0)
}

/// Residuals of the projection identities for `p` against `φ` and `X = F⁻¹φ`.
fn projection_residuals(phi: &Functional<'_>, p: &CVector, x: &CVector) -> Vec<(&'static str, f64)> {
    let g = phi.host;
    let hp = g.haar_of(p);
    let selfadjoint = sup_norm((g.star(p) - p).iter());
    let idempotent = sup_norm((g.mul(p, p) - p).iter());
    let mut compression: f64 = 0.0;
    if hp.norm() > 0.0 {
        let lp = g.left_mult_matrix(p);
        let rp = g.right_mult_matrix(p);
        let comp = &lp * rp;
        for i in 0..g.dim() {
            let v = g.haar_of(&comp.column(i).into_owned()) / hp;
            compression = compression.max((v - phi.coeffs[i]).norm());
        }
    } else {
        compression = f64::INFINITY;
    }
    let fourier = sup_norm((x - p.map(|z| z / hp)).iter());
    vec![("p* = p", selfadjoint), ("p² = p", idempotent), ("φ = h(p·p)/h(p)", compression), ("F⁻¹φ = p/h(p)", fourier)]
}

pub(crate) fn null_space_of(g: &QuantumStructure, p: &CVector, tol: &Tolerance) -> NullSpace {
    let rp = g.right_mult_matrix(p);
    let basis = kernel_basis(&rp, tol);
    let selfadjoint_residual = basis
        .iter()
        .map(|v| sup_norm((&rp * g.star(v)).iter()))
        .fold(0.0, f64::max);
    NullSpace { basis, selfadjoint: selfadjoint_residual <= tol.eps_eq * scale(p), selfadjoint_residual }
}

/// `a ↦ h(· a)`.
pub fn forward_fourier<'h>(host: &'h QuantumStructure, a: &CVector) -> Functional<'h> {
    Functional::raw(host, host.haar_gram() * a)
}

/// The vector state `a ↦ h(c^* a c) / h(c^* c)`.
pub fn vector_state<'h>(host: &'h QuantumStructure, c: &CVector) -> Result<Functional<'h>> {
    host.check_len(c)?;
    let rc = host.right_mult_matrix(c);
    let cs = host.star(c);
    let lcs = host.left_mult_matrix(&cs);
    // coefficient i is h(c^* b_i c)
    let m = lcs * rc;
    let coeffs = m.transpose() * host.haar();
    let norm = host.haar_of(&host.mul(&cs, c));
    if norm.norm() <= 1e-14 {
        return Err(Error::InvalidParameters("vector state of a zero element".into()));
    }
    Ok(Functional::raw(host, coeffs.map(|z| z / norm)))
}

/// Vector state of a random element `c`, cycling through three seed shapes by `round`:
/// a random complex `c` on at most three basis vectors, the indicator of a random
/// subset of the basis, and the same subset with phases in `{±1, ±i}`.
///
/// A dense generic `c` gives a faithful state whose Cesàro limit is always `h`;
/// subset seeds reach the idempotents whose `c` must be invariant under a subgroup.
pub fn random_seed_state<'h>(host: &'h QuantumStructure, round: usize, rng: &mut ChaCha8Rng) -> Functional<'h> {
    let n = host.dim();
    loop {
        let mut c = CVector::zeros(n);
        match round % 3 {
            0 => {
                for _ in 0..rng.gen_range(1..=n.min(3)) {
                    let i = rng.gen_range(0..n);
                    c[i] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
            shape => {
                for z in c.iter_mut() {
                    if rng.gen_bool(0.5) {
                        *z = if shape == 1 { ONE } else { C64::i().powu(rng.gen_range(0..4)) };
                    }
                }
            }
        }
        if let Ok(f) = vector_state(host, &c) {
            return f;
        }
    }
}

/// Outcome of [`discover_idempotents`].
#[derive(Clone, Debug)]
pub struct Discovery<'h> {
    pub idempotents: Vec<Functional<'h>>,
    /// Seeds whose Cesàro limit failed or was not an idempotent state.
    pub dropped: usize,
}

/// Cesàro limits of random vector states, merged within [`CLUSTER_RADIUS`]
/// and sorted by their coefficient vectors.
pub fn discover_idempotents<'h>(host: &'h QuantumStructure, seeds: usize, rng_seed: u64, tol: &Tolerance) -> Discovery<'h> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut found: Vec<Functional<'h>> = Vec::new();
    let mut dropped = 0;
    for round in 0..seeds {
        let phi = random_seed_state(host, round, &mut rng);
        let limit = match phi.cesaro_limit(tol) {
            Ok(l) => l,
            Err(e) => {
                dropped += 1;
                log::debug!("seed dropped: {e}");
                continue;
            }
        };
        if found.iter().any(|f| f.sup_dist(&limit) <= CLUSTER_RADIUS) {
            continue;
        }
        if !limit.is_idempotent_state(tol) {
            dropped += 1;
            continue;
        }
        found.push(limit);
    }
    if dropped > 0 {
        warn!("{dropped} of {seeds} discovery seeds did not yield an idempotent state");
    }
    sort_canonically(&mut found);
    Discovery { idempotents: found, dropped }
}

/// Deterministic order: lexicographic on coefficients rounded to the cluster radius.
pub fn sort_canonically(fs: &mut [Functional<'_>]) {
    fs.sort_by(|a, b| canonical_cmp(a.coeffs(), b.coeffs()));
}

pub(crate) fn canonical_cmp(a: &CVector, b: &CVector) -> Ordering {
    let key = |x: f64| (x / CLUSTER_RADIUS).round() as i64;
    for (x, y) in a.iter().zip(b.iter()) {
        let o = key(y.re).cmp(&key(x.re)).then(key(y.im).cmp(&key(x.im)));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}
