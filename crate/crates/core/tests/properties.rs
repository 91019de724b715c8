use std::sync::OnceLock;

use idempotent_core::families::*;
use idempotent_core::states::Functional;
use idempotent_core::{CVector, FiniteQuantumGroup, Tolerance, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn hosts() -> &'static [FiniteQuantumGroup] {
    static HOSTS: OnceLock<Vec<FiniteQuantumGroup>> = OnceLock::new();
    HOSTS.get_or_init(|| {
        let t = Tolerance::default();
        vec![
            build_function_algebra(&symmetric(3), &t).unwrap(),
            build_group_algebra(&quaternion(), &t).unwrap(),
            build_sekine(2, &t).unwrap(),
            build_sekine(3, &t).unwrap(),
        ]
    })
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> CVector {
    CVector::from_fn(n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn max_abs(m: impl Iterator<Item = C64>) -> f64 {
    m.map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn convolution_is_associative_and_counital(family in 0usize..4, seed in any::<u64>()) {
        let g = &hosts()[family];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = |rng: &mut ChaCha8Rng| Functional::new(g, random_vector(g.dim(), rng)).unwrap();
        let (a, b, c) = (f(&mut rng), f(&mut rng), f(&mut rng));
        let left = a.convolve(&b).unwrap().convolve(&c).unwrap();
        let right = a.convolve(&b.convolve(&c).unwrap()).unwrap();
        prop_assert!(left.sup_dist(&right) < 1e-9);
        let eps = Functional::counit(g);
        prop_assert!(eps.convolve(&a).unwrap().sup_dist(&a) < 1e-12);
        prop_assert!(a.convolve(&eps).unwrap().sup_dist(&a) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn haar_element_coproduct_absorbs_the_antipode(family in 0usize..4, seed in any::<u64>()) {
        let g = &hosts()[family];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_vector(g.dim(), &mut rng);
        let z = g.comultiply(g.haar_element()).unwrap();
        let lhs = g.tensor_right(&z, &x, g.unit());
        let rhs = g.tensor_right(&z, g.unit(), &g.apply_antipode(&x));
        prop_assert!(max_abs((lhs.matrix() - rhs.matrix()).iter().copied()) < 1e-9);
    }

    #[test]
    fn haar_state_is_invariant_under_convolution(family in 0usize..4, seed in any::<u64>()) {
        let g = &hosts()[family];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Functional::new(g, random_vector(g.dim(), &mut rng)).unwrap();
        let h = Functional::haar(g);
        let mass = a.eval(g.unit());
        prop_assert!(a.convolve(&h).unwrap().sup_dist(&h.scaled(mass)) < 1e-9);
        prop_assert!(h.convolve(&a).unwrap().sup_dist(&h.scaled(mass)) < 1e-9);
    }
}
