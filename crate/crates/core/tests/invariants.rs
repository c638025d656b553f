use affine_vlab::constants::{alpha_np, critical_exponent, k_np, truncated_bubble_quotient};
use affine_vlab::energy::{energy, kernel, weak_form};
use affine_vlab::fields::{lq_norm_pow, random_field, read_field, truncate, write_field, RandomFieldSpec, ScalarField};
use affine_vlab::geometry::{build_grid, DomainSpec, GridDomain, LinearMap};
use affine_vlab::quadrature::{default_directions, directions};
use proptest::prelude::*;
use std::sync::Arc;

fn disk(h: f64) -> Arc<GridDomain> {
    Arc::new(build_grid(&DomainSpec::unit_ball(2), h).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn field_dump_round_trips(seed in 0u64..100_000, offset in 0.0f64..2.0) {
        let dom = disk(0.125);
        let u = random_field(dom.clone(), &RandomFieldSpec { offset, ..RandomFieldSpec::default() }, seed);
        let back = read_field(&write_field(&u), dom).unwrap();
        prop_assert_eq!(back.values(), u.values());
    }

    #[test]
    fn truncation_splits_the_field(seed in 0u64..100_000, frac in 0.05f64..0.95) {
        let u = random_field(disk(0.1), &RandomFieldSpec::default(), seed);
        let h = frac * u.max_abs();
        let (t, r) = truncate(&u, h).unwrap();
        for ((a, b), c) in t.values().iter().zip(r.values()).zip(u.values()) {
            prop_assert!((a + b - c).abs() <= f64::EPSILON * c.abs());
            prop_assert!(a.abs() <= h);
            prop_assert!(*b == 0.0 || b.signum() == c.signum());
        }
    }

    #[test]
    fn kernel_is_scale_free(seed in 0u64..100_000, c in 0.01f64..100.0, p in 1.2f64..3.5) {
        let ds = default_directions(2).unwrap();
        let u = random_field(disk(0.1), &RandomFieldSpec::default(), seed);
        let (a, b) = (kernel(&u, &ds, p).unwrap(), kernel(&u.scaled(c), &ds, p).unwrap());
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            prop_assert!((x - y).abs() <= 1e-10 * x.abs());
        }
    }

    #[test]
    fn weak_form_is_linear_in_the_test_field(s1 in 0u64..100_000, s2 in 0u64..100_000, a in -3.0f64..3.0) {
        let dom = disk(0.1);
        let ds = default_directions(2).unwrap();
        let u = random_field(dom.clone(), &RandomFieldSpec::default(), 7);
        let (f, g) = (random_field(dom.clone(), &RandomFieldSpec::default(), s1), random_field(dom.clone(), &RandomFieldSpec::default(), s2));
        let mix: Vec<f64> = f.values().iter().zip(g.values()).map(|(x, y)| a * x + y).collect();
        let mix = ScalarField::from_values(dom, mix).unwrap();
        let lhs = weak_form(&u, &ds, 1.7, &mix).unwrap();
        let rhs = a * weak_form(&u, &ds, 1.7, &f).unwrap() + weak_form(&u, &ds, 1.7, &g).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (lhs.abs() + rhs.abs() + 1.0));
    }

    #[test]
    fn default_rule_matches_a_fine_rule(seed in 0u64..100_000, p in 1.3f64..3.0) {
        let u = random_field(disk(0.1), &RandomFieldSpec::default(), seed);
        let fine = directions(2, 2048).unwrap();
        let a = energy(&u, &default_directions(2).unwrap(), p).unwrap().energy;
        let b = energy(&u, &fine, p).unwrap().energy;
        prop_assert!((a - b).abs() <= 2e-5 * b);
        let (a2, b2) = (energy(&u, &default_directions(2).unwrap(), 2.0).unwrap().energy, energy(&u, &fine, 2.0).unwrap().energy);
        prop_assert!((a2 - b2).abs() <= 1e-13 * b2);
    }

    #[test]
    fn lq_norm_is_homogeneous(seed in 0u64..100_000, c in -5.0f64..5.0, q in 1.0f64..6.0) {
        let u = random_field(disk(0.125), &RandomFieldSpec::default(), seed);
        let (a, b) = (lq_norm_pow(&u, q), lq_norm_pow(&u.scaled(c), q));
        prop_assert!((b - c.abs().powf(q) * a).abs() <= 1e-12 * (b + 1e-300));
    }

    #[test]
    fn maps_invert(a in 0.2f64..3.0, b in -2.0f64..2.0, c in -2.0f64..2.0, d in 0.2f64..3.0) {
        prop_assume!((a * d - b * c).abs() > 0.1);
        let m = LinearMap::from_rows(&[vec![a, b], vec![c, d]]).unwrap();
        let id = m.compose(&m.inverse().unwrap());
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((id.entry(i, j) - f64::from(i == j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sobolev_constants_are_positive(n in 2usize..5, t in 0.05f64..0.95) {
        let p = 1.0 + t * (n as f64 - 1.0);
        prop_assert!(alpha_np(n, p) > 0.0);
        prop_assert!(k_np(n, p).unwrap() > 0.0);
        prop_assert!(critical_exponent(n, p) > p);
    }
}

#[test]
fn truncated_bubbles_approach_the_sharp_constant() {
    // from above, with gap O(1/b) for (n, p) = (3, 2)
    let target = k_np(3, 2.0).unwrap().powi(-2);
    let gap: Vec<f64> = [8.0, 32.0, 128.0].iter().map(|&b| truncated_bubble_quotient(3, 2.0, b).unwrap() - target).collect();
    assert!(gap.iter().all(|&g| g > 0.0), "{:?}", gap);
    for w in gap.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.0..5.0).contains(&ratio), "{:?}", gap);
    }
}
