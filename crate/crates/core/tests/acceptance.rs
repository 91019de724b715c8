//! One PASS/FAIL line per acceptance criterion; exits non-zero on any failure
//! not listed in [`KNOWN_FAILURES`].

use std::process::ExitCode;

use idempotent_core::families::*;
use idempotent_core::hypergroup::{canonical_subhypergroup, is_good_group_like, verify_hypergroup};
use idempotent_core::lattice::{build_lattice, check_distributivity, inf, sup, DEFAULT_MAX_CLOSURE};
use idempotent_core::linalg::{cesaro_iterative, cesaro_projection, sup_dist, CESARO_MAX_TERMS};
use idempotent_core::qgroup::{compute_haar_state, dual, verify_quantum_group, QuantumStructure};
use idempotent_core::states::{discover_idempotents, vector_state, Functional};
use idempotent_core::{CVector, FiniteQuantumGroup, Tolerance, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const AXIOM_TOL: f64 = 1e-9;
const HAAR_CLOSED_FORM_TOL: f64 = 1e-12;
const DISTINCT_GAP: f64 = 1e-3;
const CATALOGUE_TOL: f64 = 1e-8;
const WITNESS_TOL: f64 = 1e-12;
const FOURIER_TOL: f64 = 1e-9;
const MULTIPLICATIVE_TOL: f64 = 1e-9;
const NON_MULTIPLICATIVE_GAP: f64 = 1e-3;
const DUALITY_TOL: f64 = 1e-8;
const CESARO_TOL: f64 = 1e-7;
/// Plain averaging converges like `1/m`; this stop keeps `m` below the roundoff drift of `T^m`.
const CESARO_ITERATIVE_STOP: f64 = 1e-8;
const DISCOVERY_SEEDS: usize = 1000;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn matches_one(f: &Functional<'_>, pool: &[Functional<'_>], radius: f64) -> Option<usize> {
    pool.iter().position(|g| f.sup_dist(g) <= radius)
}

fn sekine_catalogue<'h>(a: &'h QuantumStructure, k: usize, t: &Tolerance) -> Result<Vec<Functional<'h>>, String> {
    let mut out = Vec::new();
    for gamma in sekine_index_group(k).subgroups() {
        out.push(sekine_subgroup_state(a, &gamma, t).map_err(e)?);
    }
    for l in 1..=k {
        out.push(sekine_phi_l(a, l, t).map_err(e)?);
    }
    out.push(Functional::haar(a));
    let mut unique: Vec<Functional<'h>> = Vec::new();
    for f in out {
        if matches_one(&f, &unique, CATALOGUE_TOL).is_none() {
            unique.push(f);
        }
    }
    Ok(unique)
}

fn criterion_1() -> Outcome {
    let t = tol();
    let mut hosts: Vec<(String, FiniteQuantumGroup)> = Vec::new();
    for name in ["Z4", "Z2xZ2", "S3", "D4"] {
        hosts.push((format!("C({name})"), build_function_algebra(&named_group(name).map_err(e)?, &t).map_err(e)?));
    }
    for name in ["S3", "Q8"] {
        hosts.push((format!("C*({name})"), build_group_algebra(&named_group(name).map_err(e)?, &t).map_err(e)?));
    }
    for k in 2..=6 {
        hosts.push((format!("A_{k}"), build_sekine(k, &t).map_err(e)?));
    }
    let mut worst: f64 = 0.0;
    for (name, g) in &hosts {
        let report = verify_quantum_group(g, &t);
        worst = worst.max(report.max_residual());
        ensure(report.verdict() && report.max_residual() <= AXIOM_TOL, || format!("{name}: {report}"))?;
    }
    let mut haar_gap: f64 = 0.0;
    for k in 2..=6 {
        let a = build_sekine(k, &t).map_err(e)?;
        let solved = compute_haar_state(a.coproduct_tensor(), a.unit(), &t).map_err(e)?;
        let gap = sup_dist(&solved, &sekine_haar_closed_form(k));
        haar_gap = haar_gap.max(gap);
        ensure(gap <= HAAR_CLOSED_FORM_TOL, || format!("A_{k}: Haar solver off closed form by {gap:.3e}"))?;
    }
    Ok(format!("{} hosts, worst axiom residual {worst:.2e}, Haar closed form gap {haar_gap:.2e}", hosts.len()))
}

fn criterion_2() -> Outcome {
    let t = tol();
    let mut checked = 0;
    for k in 2..=6 {
        let a = build_sekine(k, &t).map_err(e)?;
        for l in 1..=k {
            let phi = sekine_phi_l(&a, l, &t).map_err(e)?;
            let c = phi.classify(&t).map_err(e)?;
            ensure(c.is_idempotent && c.is_state && !c.is_haar, || format!("A_{k}: φ_{l} classified {c:?}"))?;
            checked += 1;
        }
    }
    let mut closest = f64::INFINITY;
    for (k, p) in [(4, 2), (6, 2), (6, 3)] {
        let a = build_sekine(k, &t).map_err(e)?;
        let gamma = sekine_gamma(&a, p, &t).map_err(e)?;
        ensure(!gamma.classify(&t).map_err(e)?.is_haar, || format!("γ_{{{k},{p}}} is Haar"))?;
        let mut others: Vec<Functional<'_>> = (1..=k).map(|l| sekine_phi_l(&a, l, &t)).collect::<Result<_, _>>().map_err(e)?;
        for sub in sekine_index_group(k).subgroups() {
            others.push(sekine_subgroup_state(&a, &sub, &t).map_err(e)?);
        }
        others.push(Functional::haar(&a));
        for o in &others {
            let d = gamma.sup_dist(o);
            closest = closest.min(d);
            ensure(d > DISTINCT_GAP, || format!("γ_{{{k},{p}}} within {d:.3e} of a listed idempotent"))?;
        }
    }
    Ok(format!("{checked} φ_l non-Haar; γ minimum gap {closest:.3e}"))
}

fn criterion_3() -> Outcome {
    let t = tol();
    let a = build_sekine(2, &t).map_err(e)?;
    let found = discover_idempotents(&a, DISCOVERY_SEEDS, 0, &t);
    let catalogue = sekine_catalogue(&a, 2, &t)?;
    ensure(catalogue.len() == 8, || format!("catalogue has {} entries", catalogue.len()))?;
    for c in &catalogue {
        ensure(matches_one(c, &found.idempotents, CATALOGUE_TOL).is_some(), || {
            format!("catalogue entry {:?} not discovered", c.coeffs().as_slice())
        })?;
    }
    let extra = found.idempotents.iter().filter(|f| matches_one(f, &catalogue, CATALOGUE_TOL).is_none()).count();
    ensure(found.idempotents.len() == 8, || {
        format!("found {} idempotents: all 8 catalogue entries plus {extra} outside it", found.idempotents.len())
    })?;
    Ok(format!("8 idempotents from {DISCOVERY_SEEDS} seeds, {} seeds dropped", found.dropped))
}

fn criterion_4() -> Outcome {
    let t = tol();
    let s3 = symmetric(3);
    let host = build_group_algebra(&s3, &t).map_err(e)?;
    let expected: Vec<Functional<'_>> =
        s3.subgroups().iter().map(|h| group_algebra_subgroup_state(&host, &s3, h, &t)).collect::<Result<_, _>>().map_err(e)?;
    let found = discover_idempotents(&host, DISCOVERY_SEEDS, 0, &t);
    ensure(found.idempotents.len() == 6, || format!("found {} idempotents", found.idempotents.len()))?;
    for x in &expected {
        ensure(matches_one(x, &found.idempotents, CATALOGUE_TOL).is_some(), || "missing subgroup indicator".into())?;
    }
    let mut haar = 0;
    for f in &found.idempotents {
        haar += usize::from(f.classify(&t).map_err(e)?.is_haar);
    }
    ensure(haar == 3, || format!("{haar} Haar idempotents"))?;

    let idx = |l: &str| s3.index_of(l).ok_or_else(|| format!("no element {l}"));
    let (g0, s0) = (idx("(1 3)")?, idx("(1 2)")?);
    let subgroup = s3.generated(&[s0]);
    let phi_s = group_algebra_subgroup_state(&host, &s3, &subgroup, &t).map_err(e)?;
    let f = host.basis(s3.mul(g0, s0)) - host.basis(g0);
    let fs = host.star(&f);
    let fsf = phi_s.eval(&host.multiply(&fs, &f).map_err(e)?);
    let ffs = phi_s.eval(&host.multiply(&f, &fs).map_err(e)?);
    ensure((fsf - C64::new(0.0, 0.0)).norm() <= WITNESS_TOL, || format!("φ_S(f*f) = {fsf}"))?;
    ensure((ffs - C64::new(2.0, 0.0)).norm() <= WITNESS_TOL, || format!("φ_S(ff*) = {ffs}"))?;
    Ok(format!("6 indicators, 3 Haar; φ_S(f*f) = {:.1}, φ_S(ff*) = {:.1}", fsf.re, ffs.re))
}

fn criterion_5() -> Outcome {
    let t = tol();
    let s3 = symmetric(3);
    let host = build_function_algebra(&s3, &t).map_err(e)?;
    let subgroups = s3.subgroups();
    let states: Vec<Functional<'_>> =
        subgroups.iter().map(|h| function_algebra_subgroup_state(&host, &s3, h, &t)).collect::<Result<_, _>>().map_err(e)?;
    let found = discover_idempotents(&host, DISCOVERY_SEEDS, 0, &t);
    ensure(found.idempotents.len() == subgroups.len(), || format!("found {} idempotents", found.idempotents.len()))?;
    for f in &found.idempotents {
        ensure(matches_one(f, &states, CATALOGUE_TOL).is_some(), || "idempotent is not a subgroup state".into())?;
        ensure(f.classify(&t).map_err(e)?.is_haar, || "non-Haar idempotent".into())?;
    }
    let lattice = build_lattice(&found.idempotents, &t, DEFAULT_MAX_CLOSURE).map_err(e)?;
    let subgroup_of = |i: usize| -> Result<usize, String> {
        matches_one(&lattice.elements[i], &states, CATALOGUE_TOL).ok_or_else(|| "lattice element is not a subgroup state".into())
    };
    let as_set = |h: &[usize]| h.iter().copied().collect::<std::collections::BTreeSet<usize>>();
    for i in 0..lattice.len() {
        for j in 0..lattice.len() {
            let (hi, hj) = (&subgroups[subgroup_of(i)?], &subgroups[subgroup_of(j)?]);
            let join: Vec<usize> = s3.generated(&[hi.as_slice(), hj.as_slice()].concat());
            let meet: Vec<usize> = as_set(hi).intersection(&as_set(hj)).copied().collect();
            ensure(as_set(&subgroups[subgroup_of(lattice.joins[i][j])?]) == as_set(&join), || "join table mismatch".into())?;
            ensure(as_set(&subgroups[subgroup_of(lattice.meets[i][j])?]) == as_set(&meet), || "meet table mismatch".into())?;
        }
    }
    let order_two: Vec<&Functional<'_>> =
        subgroups.iter().zip(&states).filter(|(h, _)| h.len() == 2).map(|(_, f)| f).collect();
    ensure(order_two.len() == 3, || format!("{} subgroups of order 2", order_two.len()))?;
    let (g1, g2, g3) = (order_two[0], order_two[1], order_two[2]);
    let lhs = inf(g1, &sup(g2, g3, &t).map_err(e)?, &t).map_err(e)?;
    let rhs = sup(&inf(g1, g2, &t).map_err(e)?, &inf(g1, g3, &t).map_err(e)?, &t).map_err(e)?;
    let gap = lhs.sup_dist(&rhs);
    ensure(gap > DISTINCT_GAP, || "distributive on the order-2 witness".into())?;
    let violations = check_distributivity(&lattice);
    ensure(!violations.is_empty(), || "check_distributivity found no violation".into())?;
    Ok(format!("{} elements, tables match subgroups, witness gap {gap:.3}, {} violations", lattice.len(), violations.len()))
}

fn fourier_suite(t: &Tolerance) -> Result<Vec<FiniteQuantumGroup>, String> {
    Ok(vec![
        build_function_algebra(&symmetric(3), t).map_err(e)?,
        build_group_algebra(&symmetric(3), t).map_err(e)?,
        build_group_algebra(&quaternion(), t).map_err(e)?,
        build_sekine(2, t).map_err(e)?,
        build_sekine(3, t).map_err(e)?,
    ])
}

fn criterion_6() -> Outcome {
    let t = tol();
    let mut worst_route: f64 = 0.0;
    let mut worst_product: f64 = 0.0;
    let mut worst_identity: f64 = 0.0;
    let mut pairs = 0;
    for host in fourier_suite(&t)? {
        let found = discover_idempotents(&host, DISCOVERY_SEEDS, 0, &t).idempotents;
        for a in &found {
            let pa = a.associated_projection(&t).map_err(e)?;
            let hp = host.haar_of(&pa);
            let x = a.inverse_fourier().map_err(e)?;
            worst_identity = worst_identity.max(sup_dist(&x, &pa.map(|z| z / hp)));
            for i in 0..host.dim() {
                let pap = host.multiply(&host.multiply(&pa, &host.basis(i)).map_err(e)?, &pa).map_err(e)?;
                worst_identity = worst_identity.max((host.haar_of(&pap) / hp - a.coeffs()[i]).norm());
            }
            for b in &found {
                let pb = b.associated_projection(&t).map_err(e)?;
                let fourier = a.box_product_fourier(b).map_err(e)?;
                let direct = a.box_product_direct(b).map_err(e)?;
                worst_route = worst_route.max(fourier.sup_dist(&direct));
                let back = fourier.inverse_fourier().map_err(e)? * (host.haar_of(&pa) * host.haar_of(&pb));
                worst_product = worst_product.max(sup_dist(&back, &host.multiply(&pa, &pb).map_err(e)?));
                pairs += 1;
            }
        }
    }
    ensure(worst_identity <= FOURIER_TOL, || format!("φ = h(p̂·p̂)/h(p̂) or F⁻¹φ = p̂/h(p̂) off by {worst_identity:.3e}"))?;
    ensure(worst_route <= FOURIER_TOL, || format!("⊛ routes differ by {worst_route:.3e}"))?;
    ensure(worst_product <= FOURIER_TOL, || format!("F⁻¹(φ1⊛φ2) identity off by {worst_product:.3e}"))?;
    Ok(format!(
        "{pairs} pairs; projection identities {worst_identity:.2e}, route gap {worst_route:.2e}, product gap {worst_product:.2e}"
    ))
}

fn criterion_7() -> Outcome {
    let t = tol();
    let mut min_nonmult = f64::INFINITY;
    for k in 2..=4 {
        let a = build_sekine(k, &t).map_err(e)?;
        let b = build_bk(k, &t).map_err(e)?;
        for l in 1..=k {
            let phi = sekine_phi_l(&a, l, &t).map_err(e)?;
            let sub = canonical_subhypergroup(&phi, &t).map_err(e)?;
            let report = verify_hypergroup(sub.compression.hypergroup.structure(), &t);
            ensure(report.verdict(), || format!("A_{k}, φ_{l}: {report}"))?;
            ensure(sub.compression.dim() == k + 1, || format!("A_{k}, φ_{l}: dimension {}", sub.compression.dim()))?;
            let pi = bk_pi(k, l).map_err(e)?;
            let [unital, intertwine, haar] = pi_residuals(&a, &b, &pi, &phi).map_err(e)?;
            ensure(unital.max(intertwine).max(haar) <= AXIOM_TOL, || {
                format!("A_{k}, φ_{l}: π residuals {unital:.2e} {intertwine:.2e} {haar:.2e}")
            })?;
            let r = sub.compression.multiplicativity_residual;
            min_nonmult = min_nonmult.min(r);
            ensure(r > NON_MULTIPLICATIVE_GAP, || format!("A_{k}, φ_{l}: Δ₀ multiplicative ({r:.3e})"))?;
        }
    }
    let s3 = symmetric(3);
    let cs3 = build_function_algebra(&s3, &t).map_err(e)?;
    let a3 = s3.generated(&[s3.index_of("(1 2 3)").ok_or("no 3-cycle")?]);
    let mu = function_algebra_subgroup_state(&cs3, &s3, &a3, &t).map_err(e)?;
    let sub = canonical_subhypergroup(&mu, &t).map_err(e)?;
    ensure(sub.compression.dim() == 3, || format!("μ_A3: dimension {}", sub.compression.dim()))?;
    let r = sub.compression.multiplicativity_residual;
    ensure(r <= MULTIPLICATIVE_TOL, || format!("μ_A3: multiplicativity residual {r:.3e}"))?;
    Ok(format!("φ_l give B_k with Δ₀ residual ≥ {min_nonmult:.3}; μ_A3 gives dimension 3, residual {r:.1e}"))
}

fn duality_gap<'h, 'd>(fs: &[Functional<'h>], d: &'d QuantumStructure, t: &Tolerance) -> Result<(f64, usize), String> {
    let duals: Vec<Functional<'d>> = fs.iter().map(|f| f.dual_idempotent(d, t)).collect::<Result<_, _>>().map_err(e)?;
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for i in 0..fs.len() {
        for j in i + 1..fs.len() {
            let s = sup(&fs[i], &fs[j], t).map_err(e)?.dual_idempotent(d, t).map_err(e)?;
            let m = inf(&fs[i], &fs[j], t).map_err(e)?.dual_idempotent(d, t).map_err(e)?;
            worst = worst.max(s.sup_dist(&inf(&duals[i], &duals[j], t).map_err(e)?));
            worst = worst.max(m.sup_dist(&sup(&duals[i], &duals[j], t).map_err(e)?));
            pairs += 1;
        }
    }
    Ok((worst, pairs))
}

fn criterion_8() -> Outcome {
    let t = tol();
    let a = build_sekine(2, &t).map_err(e)?;
    let d = dual(&a, &t).map_err(e)?;
    let catalogue = sekine_catalogue(&a, 2, &t)?;
    let (worst, pairs) = duality_gap(&catalogue, &d, &t)?;
    ensure(pairs == 28, || format!("{pairs} pairs"))?;
    ensure(worst <= DUALITY_TOL, || format!("duality gap {worst:.3e} on the catalogue"))?;
    let found = discover_idempotents(&a, DISCOVERY_SEEDS, 0, &t).idempotents;
    let (worst_all, pairs_all) = duality_gap(&found, &d, &t)?;
    ensure(worst_all <= DUALITY_TOL, || format!("duality gap {worst_all:.3e} on all discovered idempotents"))?;
    Ok(format!("{pairs} catalogue pairs, worst gap {worst:.2e}; {pairs_all} pairs over all discovered, worst {worst_all:.2e}"))
}

fn criterion_9() -> Outcome {
    let t = tol();
    let mut count = 0;
    for host in fourier_suite(&t)? {
        for f in discover_idempotents(&host, DISCOVERY_SEEDS, 0, &t).idempotents {
            ensure(f.s_invariant(&t), || "idempotent is not S-invariant".into())?;
            let c = f.classify(&t).map_err(e)?;
            let p = c.projection.ok_or("idempotent without projection")?;
            ensure(is_good_group_like(&host, &p, &t), || "p̂ is not a good group-like projection".into())?;
            count += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let hosts = fourier_suite(&t)?;
    let mut worst: f64 = 0.0;
    for n in 0..20 {
        let host = &hosts[n % hosts.len()];
        let c = CVector::from_fn(host.dim(), |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let op = vector_state(host, &c).map_err(e)?.left_convolution_operator();
        let direct = cesaro_projection(&op, &t).map_err(e)?;
        let iterated = cesaro_iterative(&op, &t.with_eq(CESARO_ITERATIVE_STOP), CESARO_MAX_TERMS).map_err(e)?;
        worst = worst.max((direct - iterated).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    ensure(worst <= CESARO_TOL, || format!("Cesàro routes differ by {worst:.3e}"))?;
    Ok(format!("{count} idempotents S-invariant, good and consistently classified; Cesàro gap {worst:.2e}"))
}

/// Criteria expected to fail, with the reason printed beside the FAIL line.
/// A listed criterion that passes is reported as unexpected and fails the run.
const KNOWN_FAILURES: &[(usize, &str)] = &[(
    3,
    "with the coproduct formulas as given and η = exp(2πi/2), A_2 is cocommutative and carries 10 idempotent states",
)];

fn main() -> ExitCode {
    let criteria: [fn() -> Outcome; 9] =
        [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9];
    let mut unexpected = 0;
    for (i, c) in criteria.iter().enumerate() {
        let n = i + 1;
        let known = KNOWN_FAILURES.iter().find(|(k, _)| *k == n).map(|(_, why)| *why);
        match (c(), known) {
            (Ok(msg), None) => println!("criterion {n} PASS: {msg}"),
            (Ok(msg), Some(_)) => {
                unexpected += 1;
                println!("criterion {n} PASS (listed as a known failure): {msg}");
            }
            (Err(msg), Some(why)) => println!("criterion {n} FAIL (known: {why}): {msg}"),
            (Err(msg), None) => {
                unexpected += 1;
                println!("criterion {n} FAIL: {msg}");
            }
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
