use std::f64::consts::SQRT_2;

use jointbell::audit::{causality_audit, no_signalling_check, VerdictKind};
use jointbell::bell::{chsh_quantum, horodecki_oracle, lhv_max, ChshSetting};
use jointbell::cli::round_significant;
use jointbell::linalg::{eigvals_hermitian, UnitVec3};
use jointbell::observables::{
    build_joint_povm, coexistence_check, joint_effect, max_equal_lambda, DichotomicObservable,
    Outcome, SharpSpin, UnsharpSpin,
};
use jointbell::states::{behavior_from_state, correlation, TwoQubitState};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit() -> impl Strategy<Value = UnitVec3> {
    (0.0..std::f64::consts::PI, 0.0..2.0 * std::f64::consts::PI)
        .prop_map(|(t, p)| UnitVec3::from_angles(t, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn unsharp_correlation_is_lambda_times_sharp(seed in any::<u64>(), lam in 0.001..=1.0f64, a in unit(), b in unit()) {
        let state = TwoQubitState::random(&mut rng(seed));
        let bob = SharpSpin::new(b);
        let unsharp = correlation(&state, &UnsharpSpin::new(lam, a).unwrap(), &bob);
        let sharp = correlation(&state, &SharpSpin::new(a), &bob);
        prop_assert!((unsharp - lam * sharp).abs() < 1e-12);
    }

    #[test]
    fn unsharp_chsh_scales_linearly(seed in any::<u64>(), lam in 0.001..=1.0f64) {
        let mut r = rng(seed);
        let state = TwoQubitState::random(&mut r);
        let s = ChshSetting::random(&mut r);
        let sharp = chsh_quantum(&state, &s, 1.0).unwrap().value;
        let unsharp = chsh_quantum(&state, &s, lam).unwrap().value;
        prop_assert!((unsharp - lam * sharp).abs() < 1e-12);
    }

    #[test]
    fn chsh_respects_quantum_bounds(seed in any::<u64>()) {
        let mut r = rng(seed);
        let state = TwoQubitState::random(&mut r);
        let s = ChshSetting::random(&mut r);
        let v = chsh_quantum(&state, &s, 1.0).unwrap().value;
        let oracle = horodecki_oracle(&state);
        prop_assert!(v <= oracle + 1e-10);
        prop_assert!(oracle <= 2.0 * SQRT_2 + 1e-10);
        prop_assert_eq!(lhv_max(&s, &state), 2.0);
    }

    #[test]
    fn coexistence_matches_nonempty_gamma_interval(l1 in 0.001..=1.0f64, l2 in 0.001..=1.0f64, a1 in unit(), a2 in unit()) {
        let first = UnsharpSpin::new(l1, a1).unwrap();
        let second = UnsharpSpin::new(l2, a2).unwrap();
        let c = coexistence_check(&first, &second);
        match build_joint_povm(&first, &second) {
            Ok(joint) => {
                prop_assert!(c.coexistent);
                let (lo, hi) = joint.gamma_range();
                prop_assert!(lo <= joint.gamma() && joint.gamma() <= hi);
            }
            Err(_) => prop_assert!(!c.coexistent),
        }
    }

    #[test]
    fn max_equal_lambda_is_the_threshold(a1 in unit(), a2 in unit(), below in 0.0..0.999f64) {
        let lam = max_equal_lambda(&a1, &a2);
        prop_assert!((1.0 / SQRT_2 - 1e-12..=1.0).contains(&lam));
        let at = |l: f64| coexistence_check(&UnsharpSpin::new(l, a1).unwrap(), &UnsharpSpin::new(l, a2).unwrap());
        prop_assert!(at(lam).coexistent);
        prop_assert!(at(lam * below.max(1e-3)).coexistent);
        if lam < 1.0 - 1e-9 {
            prop_assert!((at(lam).lhs - 2.0).abs() < 1e-12);
            prop_assert!(!at((lam * 1.001).min(1.0)).coexistent);
        }
    }

    #[test]
    fn unsharp_behaviors_are_no_signalling(seed in any::<u64>(), la in 0.001..=1.0f64, lb in 0.001..=1.0f64) {
        let mut r = rng(seed);
        let state = TwoQubitState::random(&mut r);
        let s = ChshSetting::random(&mut r);
        let a = [UnsharpSpin::new(la, s.a).unwrap().to_povm(), UnsharpSpin::new(la, s.a_prime).unwrap().to_povm()];
        let b = [UnsharpSpin::new(lb, s.b).unwrap().to_povm(), UnsharpSpin::new(lb, s.b_prime).unwrap().to_povm()];
        let table = behavior_from_state(&state, [&a[0], &a[1]], [&b[0], &b[1]]).unwrap();
        prop_assert!(no_signalling_check(&table).max_violation < 1e-12);
    }

    #[test]
    fn audit_never_flags_unsharp_quantum_correlations(seed in any::<u64>(), frac in 0.001..=1.0f64) {
        let mut r = rng(seed);
        let state = TwoQubitState::random(&mut r);
        let s = ChshSetting::random(&mut r);
        let lam = frac * max_equal_lambda(&s.a, &s.a_prime);
        let e = chsh_quantum(&state, &s, 1.0).unwrap().correlations();
        let v = causality_audit(e, lam, &s.a, &s.a_prime).unwrap();
        prop_assert_eq!(v.kind, VerdictKind::Consistent);
    }

    #[test]
    fn rounding_is_idempotent_and_close(x in -1e6..1e6f64) {
        let r = round_significant(x);
        prop_assert_eq!(round_significant(r), r);
        prop_assert!((r - x).abs() <= 1e-11 * x.abs());
    }
}

#[test]
fn no_gamma_makes_a_violating_pair_positive() {
    let mut r = rng(31);
    let grid: Vec<f64> = (0..10_000)
        .map(|i| -1.0 + 2.0 * i as f64 / 9_999.0)
        .collect();
    let mut instances = 0;
    while instances < 100 {
        let first = UnsharpSpin::new(r.random_range(0.5..=1.0), UnitVec3::random(&mut r)).unwrap();
        let second = UnsharpSpin::new(r.random_range(0.5..=1.0), UnitVec3::random(&mut r)).unwrap();
        if coexistence_check(&first, &second).lhs <= 2.0 + 1e-6 {
            continue;
        }
        instances += 1;
        for &gamma in &grid {
            let min_eig = Outcome::BOTH
                .iter()
                .flat_map(|&j| Outcome::BOTH.map(|k| (j, k)))
                .map(|(j, k)| {
                    eigvals_hermitian(&joint_effect(&first, &second, gamma, j, k)).unwrap()[0]
                })
                .fold(f64::INFINITY, f64::min);
            assert!(
                min_eig < 0.0,
                "gamma {gamma} gave a positive joint observable"
            );
        }
    }
}
