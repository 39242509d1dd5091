mod common;

use common::*;
use dualpair::classify::{family_parameters, pair_types, rank_obstruction, torus_element};
use dualpair::sample::{random_combination, random_nonzero, rng_from_seed};
use dualpair::{build_grading, upsilon_check, witness, Ambient, Fe, LieType, Mat, PairType, Twist};
use proptest::prelude::*;
use rand::Rng;

/// Weights making `diag(ζ^u)` a similitude with multiplier exponent `c`.
fn similitude_weights(rng: &mut dualpair::sample::SampleRng, dim: usize, m: i64) -> Vec<i64> {
    let r = dim / 2;
    let c = 2 * rng.random_range(0..m);
    let plus: Vec<i64> = (0..r).map(|_| rng.random_range(0..m)).collect();
    let mut out = plus.clone();
    if dim % 2 == 1 {
        out.push(c / 2);
    }
    out.extend(plus.iter().map(|u| c - u));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gradings_are_compatible_with_brackets(seed in any::<u64>(), m in prop::sample::select(vec![1i64, 2, 3, 6])) {
        let mut rng = rng_from_seed(seed);
        let f = field(7, 1);
        let ambients = [
            Ambient::Formed(sp(&f, 2)),
            Ambient::Formed(o(&f, 5)),
            Ambient::Gl { field: f.clone(), n: 3 },
        ];
        for amb in ambients {
            let weights = match &amb {
                Ambient::Gl { n, .. } => (0..*n).map(|_| rng.random_range(0..m)).collect(),
                a => similitude_weights(&mut rng, a.dim(), m),
            };
            let g = build_grading(amb, m as u32, &weights, Twist::Identity).unwrap();
            let dims = g.piece_dims();
            prop_assert_eq!(dims.iter().sum::<usize>(), g.lie_algebra().dim());
            let x = random_combination(&f, g.lie_algebra().basis(), &mut rng);
            let y = random_combination(&f, g.lie_algebra().basis(), &mut rng);
            // θ is a Lie algebra automorphism of order dividing m.
            prop_assert_eq!(g.theta(&x.bracket(&f, &y)), g.theta(&x).bracket(&f, &g.theta(&y)));
            let mut z = x.clone();
            for _ in 0..m {
                z = g.theta(&z);
            }
            prop_assert_eq!(z, x);
            for i in 0..m {
                for j in 0..m {
                    if g.piece(i).is_empty() || g.piece(j).is_empty() {
                        continue;
                    }
                    let a = random_combination(&f, g.piece(i), &mut rng);
                    let b = random_combination(&f, g.piece(j), &mut rng);
                    prop_assert!(g.in_piece(&a.bracket(&f, &b), i + j));
                }
            }
        }
    }

    #[test]
    fn witness_family_is_torus_stable(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let f = field(7, 1);
        for pair in pair_types(2) {
            let (n, _) = pair.ranks();
            let a: Vec<Fe> = (0..n).map(|_| random_nonzero(&f, &mut rng)).collect();
            let b: Vec<Fe> = (0..n).map(|_| random_nonzero(&f, &mut rng)).collect();
            let w = witness(&pair, &f, &a, &b).unwrap();
            prop_assert_eq!(family_parameters(&pair, &f, &w), Some((a, b)));
            prop_assert!(upsilon_check(&pair, &f, &w));
            let s = pair.setting(&f).unwrap();
            let ts = |t: LieType, rng: &mut dualpair::sample::SampleRng| {
                let k = t.rank();
                let entries: Vec<Fe> = (0..k).map(|_| random_nonzero(&f, rng)).collect();
                torus_element(&f, t, &entries)
            };
            let g = ts(pair.first, &mut rng);
            let gp = ts(pair.second, &mut rng);
            prop_assert!(s.is_group_member(&g) && s.is_group_member_p(&gp));
            let moved = s.act(&g, &gp, &w).unwrap();
            prop_assert!(family_parameters(&pair, &f, &moved).is_some());
            prop_assert!(upsilon_check(&pair, &f, &moved));
        }
    }
}

#[test]
fn rank_obstructions_match_the_list() {
    for pair in pair_types(3) {
        assert_eq!(
            rank_obstruction(&pair).is_none(),
            dualpair::classify::in_admissible_list(&pair),
            "{}",
            pair.name()
        );
    }
}

#[test]
fn witness_family_examples() {
    let f = field(5, 1);
    let gl = PairType::new(LieType::Gl(2), LieType::Gl(2)).unwrap();
    let w = witness(
        &gl,
        &f,
        &[f.from_i64(1), f.from_i64(2)],
        &[Fe::ONE, Fe::ONE],
    )
    .unwrap();
    let s = gl.setting(&f).unwrap();
    let d = Mat::diag(&[f.from_i64(1), f.from_i64(2)]);
    assert_eq!((s.moment(&w), s.moment_p(&w)), (d.clone(), d));

    let spo = PairType::new(LieType::Sp(2), LieType::O(3)).unwrap();
    let w = witness(&spo, &f, &[Fe::ONE], &[Fe::ONE]).unwrap();
    let s = spo.setting(&f).unwrap();
    assert_eq!(
        s.moment_p(&w),
        Mat::diag(&[Fe::ONE, Fe::ZERO, f.from_i64(-1)])
    );
}

#[test]
fn quadratic_extension_supplies_rank_three_witnesses() {
    // Over F5 the nonzero squares take two values, too few for three
    // distinct eigenvalue pairs.
    let f = field(5, 1);
    let pair = PairType::new(LieType::Sp(6), LieType::O(7)).unwrap();
    let v = dualpair::rs_pair_exists(&pair, &f, 0, 1).unwrap();
    match v {
        dualpair::Verdict::Yes { field, .. } => assert_eq!(field, "F25"),
        other => panic!("{other:?}"),
    }
}
