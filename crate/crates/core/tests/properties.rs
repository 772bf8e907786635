use proptest::prelude::*;

use orlicz_lab::domain::{self, GridDomain, SampledField};
use orlicz_lab::modular::{lp_norm, luxemburg_norm, modular};
use orlicz_lab::phi::{self, PhiFunction};

fn interval(res: usize) -> GridDomain {
    GridDomain::build(&[(0.0, 1.0)], &[res], |_| true).unwrap()
}

fn field_strategy(cells: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..10.0f64, cells)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // ‖αf‖ = α‖f‖ for the Luxemburg quasinorm
    #[test]
    fn luxemburg_homogeneity(values in field_strategy(50), alpha in 0.1..10.0f64, p in 1.0..8.0f64) {
        let d = interval(50);
        let phi = PhiFunction::power(p).unwrap();
        let f = SampledField::scalar(values.clone()).unwrap();
        let scaled = SampledField::scalar(values.iter().map(|v| alpha * v).collect()).unwrap();
        let rel_tol = 1e-8;
        let base = luxemburg_norm(&phi, &f, &d, rel_tol).unwrap().value;
        let big = luxemburg_norm(&phi, &scaled, &d, rel_tol).unwrap().value;
        if base > 0.0 {
            let rel = (big - alpha * base).abs() / (alpha * base);
            prop_assert!(rel <= 2.0 * rel_tol, "relative error {rel}");
        } else {
            prop_assert_eq!(big, 0.0);
        }
    }

    // λ ↦ ρ(f/λ) is nonincreasing
    #[test]
    fn modular_monotone_in_scale(values in field_strategy(40), p in 1.0..6.0f64,
                                 l1 in 0.1..5.0f64, l2 in 0.1..5.0f64) {
        let d = interval(40);
        let phi = PhiFunction::power(p).unwrap();
        let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
        let f_lo = SampledField::scalar(values.iter().map(|v| v / lo).collect()).unwrap();
        let f_hi = SampledField::scalar(values.iter().map(|v| v / hi).collect()).unwrap();
        prop_assert!(modular(&phi, &f_lo, &d) >= modular(&phi, &f_hi, &d) - 1e-12);
    }

    // on a unit-measure domain, p ↦ ‖f‖_p is nondecreasing
    #[test]
    fn lp_norm_monotone_in_p(values in field_strategy(60), p in 1.0..10.0f64, dq in 0.0..10.0f64) {
        let d = interval(60);
        let f = SampledField::scalar(values).unwrap();
        let lower = lp_norm(&f, p, &d);
        let upper = lp_norm(&f, p + dq, &d);
        prop_assert!(lower <= upper * (1.0 + 1e-12) + 1e-12, "{lower} > {upper}");
    }

    // the growth-constant estimate is nondecreasing in the probed exponent
    #[test]
    fn ainc_estimate_monotone_in_p(p in 1.0..6.0f64, dp in 0.0..4.0f64, q in 1.5..6.0f64) {
        let d = interval(8);
        let phi = PhiFunction::power(q).unwrap();
        let t_grid = phi::log_spaced(1e-2, 1e2, 24);
        let l_grid = phi::default_lambda_grid();
        let lo = phi::estimate_ainc_constant(&phi, p, &d, &t_grid, &l_grid).unwrap();
        let hi = phi::estimate_ainc_constant(&phi, p + dp, &d, &t_grid, &l_grid).unwrap();
        prop_assert!(hi.estimated_l >= lo.estimated_l * (1.0 - 1e-12));
    }

    // integration is linear
    #[test]
    fn integrate_linearity(a in prop::collection::vec(-5.0..5.0f64, 30),
                           b in prop::collection::vec(-5.0..5.0f64, 30),
                           s in -3.0..3.0f64) {
        let d = interval(30);
        let fa = SampledField::scalar(a.clone()).unwrap();
        let fb = SampledField::scalar(b.clone()).unwrap();
        let combo = SampledField::scalar(
            a.iter().zip(&b).map(|(x, y)| s * x + y).collect(),
        ).unwrap();
        let lhs = domain::integrate(&combo, &d);
        let rhs = s * domain::integrate(&fa, &d) + domain::integrate(&fb, &d);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs().max(rhs.abs())));
    }
}
