use num_rational::Ratio;
use proptest::prelude::*;
use smech_core::{Blade, Grading, GrassmannElement, Parity};

type Q = Ratio<i64>;
type G = GrassmannElement<Q>;

fn element(q: u32) -> impl Strategy<Value = G> {
    prop::collection::vec((0u32..(1 << q), -6i64..=6, 1i64..=4), 0..8)
        .prop_map(move |terms| G::from_terms(q, terms.into_iter().map(|(b, n, d)| (Blade(b), Q::new(n, d)))).unwrap())
}

fn homogeneous(q: u32) -> impl Strategy<Value = (G, Parity)> {
    (element(q), any::<bool>()).prop_map(|(g, odd)| {
        let p = if odd { Parity::Odd } else { Parity::Even };
        (g.parity_part(p), p)
    })
}

fn triple() -> impl Strategy<Value = (G, G, G)> {
    (0u32..=6).prop_flat_map(|q| (element(q), element(q), element(q)))
}

fn float(g: &G) -> GrassmannElement<f64> {
    GrassmannElement::from_terms(g.q(), g.terms().map(|(b, c)| (b, *c.numer() as f64 / *c.denom() as f64))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn product_is_associative((a, b, c) in triple()) {
        let l = a.try_mul(&b).unwrap().try_mul(&c).unwrap();
        let r = a.try_mul(&b.try_mul(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn product_distributes((a, b, c) in triple()) {
        let l = a.try_mul(&b.try_add(&c).unwrap()).unwrap();
        let r = a.try_mul(&b).unwrap().try_add(&a.try_mul(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn graded_commutativity(((a, pa), (b, pb)) in (0u32..=6).prop_flat_map(|q| (homogeneous(q), homogeneous(q)))) {
        let ab = a.try_mul(&b).unwrap();
        let ba = b.try_mul(&a).unwrap();
        let expected = if pa.is_odd() && pb.is_odd() { -ba.clone() } else { ba };
        prop_assert_eq!(ab, expected);
    }

    #[test]
    fn odd_elements_square_to_zero(g in (0u32..=6).prop_flat_map(element)) {
        let odd = g.parity_part(Parity::Odd);
        prop_assert!(odd.try_mul(&odd).unwrap().is_zero());
        prop_assert!(odd.is_zero() || odd.grading() == Grading::Homogeneous(Parity::Odd));
    }

    #[test]
    fn soul_is_nilpotent(g in (0u32..=6).prop_flat_map(element)) {
        let s = g.soul();
        prop_assert!(s.powi(g.q() as i32 + 1).unwrap().is_zero());
    }

    #[test]
    fn generators_anticommute((q, i, j) in (1u32..=6).prop_flat_map(|q| (Just(q), 1..=q, 1..=q))) {
        let (zi, zj) = (G::generator(q, i).unwrap(), G::generator(q, j).unwrap());
        prop_assert_eq!(zi.try_mul(&zj).unwrap(), -zj.try_mul(&zi).unwrap());
    }

    #[test]
    fn embedding_is_a_homomorphism((a, b, _) in triple(), extra in 0u32..=3) {
        let q2 = (a.q() + extra).min(8);
        let (fa, fb) = (float(&a), float(&b));
        let l = fa.try_mul(&fb).unwrap().embed(q2).unwrap();
        let r = fa.embed(q2).unwrap().try_mul(&fb.embed(q2).unwrap()).unwrap();
        prop_assert!(l.try_sub(&r).unwrap().max_abs() <= 1e-12);
        prop_assert_eq!(fa.embed(q2).unwrap().embed(q2 + 1).unwrap(), fa.embed(q2 + 1).unwrap());
    }

    #[test]
    fn reparametrisations_compose(
        (a, b, phi, psi, (q1, q2)) in (1u32..=4, 1u32..=4, 0u32..=4).prop_flat_map(|(q0, q1, q2)| {
            let odd_images = |n: u32, q: u32| prop::collection::vec(element(q).prop_map(|g| g.parity_part(Parity::Odd)), n as usize);
            (element(q0), element(q0), odd_images(q0, q1), odd_images(q1, q2), Just((q1, q2)))
        })
    ) {
        // algebra homomorphism
        let lhs = a.try_mul(&b).unwrap().map_generators(&phi, q1).unwrap();
        let rhs = a.map_generators(&phi, q1).unwrap().try_mul(&b.map_generators(&phi, q1).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        // (ψ ∘ φ) acting on a equals φ then ψ
        let composed: Vec<G> = phi.iter().map(|g| g.map_generators(&psi, q2).unwrap()).collect();
        let one_step = a.map_generators(&composed, q2).unwrap();
        let two_steps = a.map_generators(&phi, q1).unwrap().map_generators(&psi, q2).unwrap();
        prop_assert_eq!(one_step, two_steps);
    }
}

#[test]
fn inverse_of_invertible_elements() {
    let x = G::from_terms(3, [(Blade(0), Q::new(2, 1)), (Blade(0b011), Q::new(1, 3)), (Blade(0b100), Q::new(-1, 2))]).unwrap();
    let inv = x.inverse().unwrap();
    assert_eq!(x.try_mul(&inv).unwrap(), G::one(3).unwrap());
    assert!(x.soul().inverse().is_err());
}
