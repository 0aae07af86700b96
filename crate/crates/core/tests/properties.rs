//! Property tests over the public API. Structured inputs come from the `random`
//! generators, driven by proptest-chosen seeds so failures shrink to a seed.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kerconf::constructions::{distinguish_witness, standard_extend};
use kerconf::json;
use kerconf::kernel_config::normalize;
use kerconf::poly::{euclid_divmod, gcd_bezout};
use kerconf::random;
use kerconf::ring::RingElem;
use kerconf::{Field, Poly};

fn field_strategy() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Q), Just(Field::gf(5).unwrap()), Just(Field::gf(2).unwrap())]
}

fn poly_strategy(field: Field, max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(-4i64..=4, 0..=max_deg + 1).prop_map(move |c| Poly::from_ints(field, &c))
}

fn field_and_polys(n: usize) -> impl Strategy<Value = (Field, Vec<Poly>)> {
    field_strategy().prop_flat_map(move |f| (Just(f), prop::collection::vec(poly_strategy(f, 5), n)))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn divmod_reconstructs((_, ps) in field_and_polys(2)) {
        let (rho, xi) = (&ps[0], &ps[1]);
        prop_assume!(!xi.is_zero());
        let (q, r) = euclid_divmod(rho, xi).unwrap();
        prop_assert_eq!(&(&q * xi) + &r, rho.clone());
        prop_assert!(r.is_zero() || r.deg() < xi.deg());
    }

    #[test]
    fn bezout_certificate((_, ps) in field_and_polys(3)) {
        let (g, chis) = gcd_bezout(&ps).unwrap();
        let field = ps[0].field();
        let sum = ps.iter().zip(&chis).fold(Poly::zero(field), |acc, (p, c)| &acc + &(p * c));
        prop_assert_eq!(&sum, &g);
        for p in &ps {
            prop_assert!(g.is_zero() || g.divides(p));
        }
    }

    #[test]
    fn gcd_times_lcm_is_product((_, ps) in field_and_polys(2)) {
        let (a, b) = (&ps[0], &ps[1]);
        prop_assume!(!a.is_zero() && !b.is_zero());
        prop_assert_eq!(&a.gcd(b) * &a.lcm(b), (a * b).monic());
    }

    #[test]
    fn normalize_is_idempotent_and_has_witnesses(seed: u64, field in field_strategy()) {
        let mut rng = rng(seed);
        let c = random::config(&mut rng, field);
        let w = random::witness_model(&mut rng, &c, 16);
        prop_assert!(w.is_c_endomorphism(&c).unwrap());
        if let Ok(ext) = standard_extend(&w, &c, 1, None) {
            prop_assert!(ext.is_c_endomorphism(&c).unwrap());
        }
        // Default-0 transcendental configurations are not finitely axiomatized.
        if let Ok(theory) = c.canonical_theory() {
            let back = normalize(&theory).unwrap();
            prop_assert_eq!(back.config(), Some(&c));
        }
    }

    #[test]
    fn leq_is_a_partial_order(seed: u64, field in field_strategy()) {
        let mut rng = rng(seed);
        let cs: Vec<_> = (0..3).map(|_| random::config(&mut rng, field)).collect();
        let leq = |i: usize, j: usize| cs[i].leq(&cs[j]).unwrap();
        for i in 0..3 {
            prop_assert!(leq(i, i));
            for j in 0..3 {
                if leq(i, j) && leq(j, i) {
                    prop_assert_eq!(&cs[i], &cs[j]);
                }
                for k in 0..3 {
                    prop_assert!(!(leq(i, j) && leq(j, k)) || leq(i, k));
                }
            }
        }
    }

    #[test]
    fn distinguishing_witness_separates(seed: u64, field in field_strategy()) {
        let mut rng = rng(seed);
        let (a, b) = (random::config(&mut rng, field), random::config(&mut rng, field));
        prop_assume!(a != b);
        if let Ok(w) = distinguish_witness(&a, &b) {
            prop_assert_ne!(w.is_c_endomorphism(&a).unwrap(), w.is_c_endomorphism(&b).unwrap());
        }
    }

    #[test]
    fn ring_axioms_on_canonical_elements(seed: u64, field in field_strategy()) {
        let mut rng = rng(seed);
        let c = random::config(&mut rng, field);
        let zp = random::zero_value_polys(&mut rng, &c);
        let [x, y, z]: [RingElem; 3] = std::array::from_fn(|_| random::ring_elem(&mut rng, &c, &zp));
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
        prop_assert_eq!(
            x.mul(&y.add(&z).unwrap()).unwrap(),
            x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()
        );
        prop_assert_eq!(x.add(&x.neg()).unwrap(), RingElem::zero(&c));
        prop_assert_eq!(x.mul(&RingElem::one(&c)).unwrap(), x.clone());
    }

    #[test]
    fn json_round_trips(seed: u64, field in field_strategy()) {
        let mut rng = rng(seed);
        let c = random::config(&mut rng, field);
        let v = json::config_to_json(&c);
        let text = json::to_string(&v);
        prop_assert_eq!(json::config_from_json(&json::parse_str(&text).unwrap(), Some(field)).unwrap(), c.clone());

        let m = random::any_model(&mut rng, field, 6);
        let back = json::model_from_json(&json::parse_str(&json::to_string(&json::model_to_json(&m))).unwrap(), None);
        prop_assert_eq!(back.unwrap(), m);

        let zp = random::zero_value_polys(&mut rng, &c);
        let r = random::ring_elem(&mut rng, &c, &zp);
        let back = json::ring_elem_from_json(&json::ring_elem_to_json(&r), None);
        prop_assert_eq!(back.unwrap(), r);
    }
}
