mod common;

use common::*;
use dualpair::lattice::{epipelagic_dichotomy, hom_piece_dim, is_selfdual, jumps, tensor_jumps};
use dualpair::moment::{first_order_osc_check, pairing_identities, star_identity_holds};
use dualpair::sample::{random_combination, random_fe, rng_from_seed};
use dualpair::{Dichotomy, DivisionKind, Fe, LieAlgebra, Mat, MomentSetting, Rational, Sign};
use proptest::prelude::*;

fn fields() -> Vec<std::sync::Arc<dualpair::Field>> {
    vec![
        field(3, 1),
        field(5, 1),
        field(7, 1),
        field(3, 2),
        field(5, 2),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        for f in fields() {
            let (a, b, c) = (random_fe(&f, &mut rng), random_fe(&f, &mut rng), random_fe(&f, &mut rng));
            prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
            if !a.is_zero() {
                prop_assert_eq!(f.mul(a, f.inv(a)), Fe::ONE);
            }
            prop_assert_eq!(f.conj(f.conj(a)), a);
            prop_assert_eq!(f.conj(f.mul(a, b)), f.mul(f.conj(a), f.conj(b)));
            prop_assert_eq!(f.conj(f.add(a, b)), f.add(f.conj(a), f.conj(b)));
        }
    }

    #[test]
    fn pairing_and_star_identities(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        for s in settings(5) {
            let w = random_w(&s, &mut rng);
            let x = random_combination(s.field(), &s.lie_basis(), &mut rng);
            let xp = random_combination(s.field(), &s.lie_basis_p(), &mut rng);
            let vals = pairing_identities(&s, &x, &xp, &w);
            prop_assert!(vals.holds(), "{vals:?}");
            if let MomentSetting::Formed { v, vp } = &s {
                prop_assert!(star_identity_holds(v, vp, &w));
            }
        }
    }

    #[test]
    fn moment_maps_are_equivariant(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        for s in settings(5) {
            let f = &**s.field();
            let w = random_w(&s, &mut rng);
            let (g, gp) = random_group_pair(&s, &mut rng);
            prop_assert!(s.is_group_member(&g) && s.is_group_member_p(&gp));
            let moved = s.act(&g, &gp, &w).unwrap();
            let conj = |h: &Mat, x: &Mat| h.mul(f, x).mul(f, &h.inverse(f).unwrap());
            prop_assert_eq!(s.moment(&moved), conj(&g, &s.moment(&w)));
            prop_assert_eq!(s.moment_p(&moved), conj(&gp, &s.moment_p(&w)));
        }
    }

    #[test]
    fn oscillator_first_order(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        for s in settings(5) {
            let w = random_w(&s, &mut rng);
            let x = random_combination(s.field(), &s.lie_basis(), &mut rng);
            let check = first_order_osc_check(&s, &x, &w);
            prop_assert!(check.holds(), "{check:?}");
        }
    }

    #[test]
    fn invariant_p_agrees_with_centralizer(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let f = field(5, 1);
        let f2 = field(3, 2);
        let u2 = herm(&f2, 2, Sign::Plus);
        let cases = [
            (LieAlgebra::gl(&f, 3), None),
            (LieAlgebra::of_space(&sp(&f, 2)), None),
            (LieAlgebra::of_space(&o(&f, 4)), None),
            (LieAlgebra::of_space(&o(&f, 5)), None),
            (LieAlgebra::of_space(&u2), Some(u2.lie_basis())),
        ];
        for (g, sampling) in &cases {
            let x = match sampling {
                Some(b) => random_combination(&f2, b, &mut rng),
                None => random_combination(&f, g.basis(), &mut rng),
            };
            prop_assert_eq!(g.is_regular_semisimple(&x), g.centralizer_oracle(&x));
        }
    }

    #[test]
    fn jump_sets_are_symmetric(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        for kind in [DivisionKind::Split, DivisionKind::Unramified, DivisionKind::Ramified] {
            for eps in [Sign::Plus, Sign::Minus] {
                let pt = random_point(&mut rng, kind, eps);
                prop_assert!(is_selfdual(&pt));
                prop_assert!(jumps(&pt).is_symmetric());
                prop_assert_eq!(jumps(&pt), jump_oracle(&pt));
            }
        }
    }

    #[test]
    fn tensor_jumps_add(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let pt = random_point(&mut rng, DivisionKind::Split, Sign::Minus);
        let ptp = random_point(&mut rng, DivisionKind::Split, Sign::Plus);
        let t = tensor_jumps(&jumps(&pt), &jumps(&ptp)).unwrap();
        // Every level is a difference of coordinates; compare against a
        // direct count of hom-lattice pieces on that grid.
        let coords: Vec<Rational> = pt.coords().into_iter().chain(ptp.coords()).collect();
        for &a in &coords {
            for &b in &coords {
                let r = dualpair::numeric::rational_mod(a - b, Rational::from_integer(1));
                prop_assert_eq!(t.mult(r), hom_piece_dim(&pt, &ptp, r));
            }
        }
        prop_assert_eq!(t.total(), pt.dim() * ptp.dim());
    }

    #[test]
    fn dichotomy_matches_tensor_levels(seed in any::<u64>(), m in 1i64..5) {
        let mut rng = rng_from_seed(seed);
        let pt = random_graded_point(&mut rng, Sign::Minus, m);
        let ptp = random_graded_point(&mut rng, Sign::Plus, m);
        let t = tensor_jumps(&jumps(&pt), &jumps(&ptp)).unwrap();
        let odd = t.entries.keys().all(|&r| {
            let x = r * Rational::from_integer(2 * m);
            x.is_integer() && x.to_integer().rem_euclid(2) == 1
        });
        let d = epipelagic_dichotomy(&jumps(&pt), &jumps(&ptp), m as u32);
        prop_assert_eq!(odd, d != Dichotomy::Violation, "{:?} {:?}", pt, ptp);
    }
}

/// Jumps read off from the exponents `⌈(r - a_k)/ν⌉`: a level is a jump
/// when some exponent increases just above it. Only coordinate levels and a
/// shifted copy of each are probed, since exponents are constant elsewhere.
fn jump_oracle(pt: &dualpair::ApartmentPoint) -> dualpair::JumpSet {
    let nu = pt.nu();
    let tiny = Rational::new(1, 1_000_003);
    let mut out = dualpair::JumpSet::new(nu);
    let mut probes: Vec<Rational> = pt
        .coords()
        .into_iter()
        .flat_map(|a| [a, a + Rational::new(1, 97)])
        .map(|a| dualpair::numeric::rational_mod(a, nu))
        .collect();
    probes.sort();
    probes.dedup();
    for r in probes {
        let count = (0..pt.dim())
            .filter(|&k| pt.exponent(k, r + tiny) > pt.exponent(k, r))
            .count();
        if count > 0 {
            out.insert(r, count);
        }
    }
    out
}
