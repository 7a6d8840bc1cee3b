//! No-signalling checks and the causality verdict for correlation quadruples.
//!
//! Alice is the party who measures jointly. A Bob-side audit is obtained by
//! transposing the behavior table before calling [`audit_behavior`].

use serde::{Deserialize, Serialize};

use crate::bell::chsh_from_correlations;
use crate::error::Result;
use crate::linalg::UnitVec3;
use crate::observables::{coexistence_check, max_equal_lambda, Outcome, UnsharpSpin};
use crate::states::BehaviorTable;

/// Largest marginal discrepancy accepted as no-signalling.
pub const NO_SIGNALLING_TOL: f64 = 1e-9;
/// Slack on the `λ·S > 2` comparison, so that exact saturation is consistent.
pub const VERDICT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoSignallingReport {
    pub ok: bool,
    pub max_violation: f64,
}

/// Largest change of either party's marginal under the other party's setting.
pub fn no_signalling_check(table: &BehaviorTable) -> NoSignallingReport {
    let mut worst: f64 = 0.0;
    for setting in 0..2 {
        for o in Outcome::BOTH {
            let alice = table.alice_marginal(setting, 0, o) - table.alice_marginal(setting, 1, o);
            let bob = table.bob_marginal(0, setting, o) - table.bob_marginal(1, setting, o);
            worst = worst.max(alice.abs()).max(bob.abs());
        }
    }
    NoSignallingReport {
        ok: worst <= NO_SIGNALLING_TOL,
        max_violation: worst,
    }
}

/// Popescu–Rohrlich box: `p(a,b|x,y) = ½` iff `ab = (−1)^{xy}`.
///
/// Its correlations are `(1, 1, 1, −1)` and its CHSH value is 4.
pub fn pr_box() -> BehaviorTable {
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for (x, row) in p.iter_mut().enumerate() {
        for (y, slice) in row.iter_mut().enumerate() {
            let target = if x * y == 1 { -1 } else { 1 };
            for a in Outcome::BOTH {
                for b in Outcome::BOTH {
                    if a.value() * b.value() == target {
                        slice[a.index()][b.index()] = 0.5;
                    }
                }
            }
        }
    }
    BehaviorTable::new(p).expect("PR box is a valid behavior")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    /// The unsharp inequality holds: no contradiction with causality.
    Consistent,
    /// Joint measurement exists at this sharpness, yet the unsharp inequality
    /// fails, so the correlations would allow signalling.
    ImpliesSignalling,
    /// The sharpness is too high for Alice's two observables to be measured
    /// jointly; nothing about signalling follows.
    JointMeasurementImpossible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditVerdict {
    #[serde(rename = "verdict")]
    pub kind: VerdictKind,
    /// `λ·(|E(A,B)+E(A′,B)| + |E(A,B′)−E(A′,B′)|)`.
    pub unsharp_value: f64,
    /// The sharp CHSH value of the supplied correlations.
    pub sharp_value: f64,
    pub lambda: f64,
    /// Largest equal sharpness at which Alice's two directions coexist.
    pub lambda_max: f64,
    pub details: String,
}

/// Classifies sharp correlations `(E(A,B), E(A′,B), E(A,B′), E(A′,B′))` when
/// Alice's observables along `a1` and `a2` are smeared to sharpness `lambda`.
///
/// The joint-measurability gate is applied first: when no joint observable
/// exists the verdict is [`VerdictKind::JointMeasurementImpossible`].
pub fn causality_audit(
    correlations: [f64; 4],
    lambda: f64,
    a1: &UnitVec3,
    a2: &UnitVec3,
) -> Result<AuditVerdict> {
    let [e_ab, e_apb, e_abp, e_apbp] = correlations;
    let report = chsh_from_correlations(e_ab, e_apb, e_abp, e_apbp)?;
    let first = UnsharpSpin::new(lambda, *a1)?;
    let second = UnsharpSpin::new(lambda, *a2)?;
    let lambda_max = max_equal_lambda(a1, a2);
    let unsharp_value = lambda * report.value;

    let (kind, details) = if !coexistence_check(&first, &second).coexistent {
        (
            VerdictKind::JointMeasurementImpossible,
            format!(
                "lambda {lambda:.10} exceeds the joint-measurability limit {lambda_max:.10}; \
                 no conclusion about signalling"
            ),
        )
    } else if unsharp_value > 2.0 + VERDICT_TOL {
        (
            VerdictKind::ImpliesSignalling,
            format!(
                "joint measurement exists, yet lambda * CHSH = {unsharp_value:.10} > 2; \
                 sharp value {:.10} exceeds {:.10}",
                report.value,
                2.0 / lambda
            ),
        )
    } else {
        (
            VerdictKind::Consistent,
            format!("lambda * CHSH = {unsharp_value:.10} <= 2"),
        )
    };
    Ok(AuditVerdict {
        kind,
        unsharp_value,
        sharp_value: report.value,
        lambda,
        lambda_max,
        details,
    })
}

/// Reads the four correlations `E = p(a = b) − p(a = −b)` off a table and audits them.
pub fn audit_behavior(
    table: &BehaviorTable,
    lambda: f64,
    a1: &UnitVec3,
    a2: &UnitVec3,
) -> Result<AuditVerdict> {
    causality_audit(table.correlations(), lambda, a1, a2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{chsh_quantum, ChshSetting};
    use crate::observables::{DichotomicObservable, SharpSpin};
    use crate::states::{behavior_from_state, TwoQubitState};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    fn sharp_table(state: &TwoQubitState, s: &ChshSetting) -> BehaviorTable {
        let a = [
            SharpSpin::new(s.a).to_povm(),
            SharpSpin::new(s.a_prime).to_povm(),
        ];
        let b = [
            SharpSpin::new(s.b).to_povm(),
            SharpSpin::new(s.b_prime).to_povm(),
        ];
        behavior_from_state(state, [&a[0], &a[1]], [&b[0], &b[1]]).unwrap()
    }

    #[test]
    fn pr_box_properties() {
        let t = pr_box();
        assert_eq!(t.correlations(), [1.0, 1.0, 1.0, -1.0]);
        let [a, b, c, d] = t.correlations();
        assert_eq!(chsh_from_correlations(a, b, c, d).unwrap().value, 4.0);
        let ns = no_signalling_check(&t);
        assert!(ns.ok);
        assert_eq!(ns.max_violation, 0.0);
    }

    #[test]
    fn quantum_tables_are_no_signalling() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..100 {
            let t = sharp_table(
                &TwoQubitState::random(&mut rng),
                &ChshSetting::random(&mut rng),
            );
            let ns = no_signalling_check(&t);
            assert!(ns.ok && ns.max_violation < 1e-12);
        }
    }

    #[test]
    fn signalling_table_is_flagged_with_its_gap() {
        let mut p = [[[[0.25; 2]; 2]; 2]; 2];
        // Alice's marginal for x = 0 depends on Bob's setting.
        p[0][1] = [[0.4, 0.3], [0.1, 0.2]];
        let t = BehaviorTable::new(p).unwrap();
        let ns = no_signalling_check(&t);
        assert!(!ns.ok);
        assert!((ns.max_violation - 0.2).abs() < 1e-15);
    }

    #[test]
    fn verdict_examples() {
        let h = FRAC_1_SQRT_2;
        let v = causality_audit([1.0, 1.0, 1.0, -1.0], h, &UnitVec3::X, &UnitVec3::Z).unwrap();
        assert_eq!(v.kind, VerdictKind::ImpliesSignalling);
        assert!((v.unsharp_value - 2.0 * SQRT_2).abs() < 1e-12);

        let v = causality_audit([-h, -h, -h, h], h, &UnitVec3::X, &UnitVec3::Z).unwrap();
        assert_eq!(v.kind, VerdictKind::Consistent);
        assert!((v.unsharp_value - 2.0).abs() < 1e-9);

        let v = causality_audit([0.1, 0.2, 0.3, 0.4], 1.0, &UnitVec3::X, &UnitVec3::Z).unwrap();
        assert_eq!(v.kind, VerdictKind::JointMeasurementImpossible);
        assert!((v.lambda_max - h).abs() < 1e-15);
    }

    #[test]
    fn audit_rejects_bad_inputs() {
        assert!(causality_audit([2.0, 0.0, 0.0, 0.0], 0.5, &UnitVec3::X, &UnitVec3::Z).is_err());
        assert!(causality_audit([0.0; 4], 0.0, &UnitVec3::X, &UnitVec3::Z).is_err());
        assert!(causality_audit([0.0; 4], 1.5, &UnitVec3::X, &UnitVec3::Z).is_err());
    }

    #[test]
    fn audit_behavior_examples() {
        let h = FRAC_1_SQRT_2;
        let v = audit_behavior(&pr_box(), h, &UnitVec3::X, &UnitVec3::Z).unwrap();
        assert_eq!(v.kind, VerdictKind::ImpliesSignalling);

        let s = ChshSetting::singlet_optimal();
        let t = sharp_table(&TwoQubitState::singlet(), &s);
        let v = audit_behavior(&t, h, &s.a, &s.a_prime).unwrap();
        assert_eq!(v.kind, VerdictKind::Consistent);
        assert!((v.unsharp_value - 2.0).abs() < 1e-9);

        let mixed = sharp_table(&TwoQubitState::maximally_mixed(), &s);
        let v = audit_behavior(&mixed, 0.3, &s.a, &s.a_prime).unwrap();
        assert_eq!(v.kind, VerdictKind::Consistent);
        assert!(v.unsharp_value.abs() < 1e-15);
    }

    #[test]
    fn verdicts_form_a_trichotomy() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let e: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
            let (a1, a2) = (UnitVec3::random(&mut rng), UnitVec3::random(&mut rng));
            for step in 1..=10 {
                let lam = step as f64 / 10.0;
                let v = causality_audit(e, lam, &a1, &a2).unwrap();
                let coexist = coexistence_check(
                    &UnsharpSpin::new(lam, a1).unwrap(),
                    &UnsharpSpin::new(lam, a2).unwrap(),
                )
                .coexistent;
                let expected = match (coexist, v.unsharp_value > 2.0 + VERDICT_TOL) {
                    (false, _) => VerdictKind::JointMeasurementImpossible,
                    (true, true) => VerdictKind::ImpliesSignalling,
                    (true, false) => VerdictKind::Consistent,
                };
                assert_eq!(v.kind, expected);
                assert_eq!(coexist, lam <= v.lambda_max + 1e-12);
            }
        }
    }

    #[test]
    fn consistency_is_monotone_in_lambda() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let e: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
            let (a1, a2) = (UnitVec3::random(&mut rng), UnitVec3::random(&mut rng));
            let lam_max = max_equal_lambda(&a1, &a2);
            let hi = rng.random_range(0.01..=1.0) * lam_max;
            let lo = rng.random_range(0.01..=1.0) * hi;
            if causality_audit(e, hi, &a1, &a2).unwrap().kind == VerdictKind::Consistent {
                assert_eq!(
                    causality_audit(e, lo, &a1, &a2).unwrap().kind,
                    VerdictKind::Consistent
                );
            }
        }
    }

    #[test]
    fn quantum_sharp_correlations_never_imply_signalling() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..200 {
            let state = TwoQubitState::random(&mut rng);
            let s = ChshSetting::random(&mut rng);
            let t = sharp_table(&state, &s);
            let lam = rng.random_range(0.01..=1.0) * max_equal_lambda(&s.a, &s.a_prime);
            let v = audit_behavior(&t, lam, &s.a, &s.a_prime).unwrap();
            assert_ne!(v.kind, VerdictKind::ImpliesSignalling);
            let direct = chsh_quantum(&state, &s, 1.0).unwrap().value;
            assert!((v.sharp_value - direct).abs() < 1e-12);
        }
        // Orthogonal directions at the optimal singlet setting saturate exactly.
        let s = ChshSetting::singlet_optimal();
        let t = sharp_table(&TwoQubitState::singlet(), &s);
        let v = audit_behavior(&t, max_equal_lambda(&s.a, &s.a_prime), &s.a, &s.a_prime).unwrap();
        assert_eq!(v.kind, VerdictKind::Consistent);
    }

    #[test]
    fn small_mass_shifts_are_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..50 {
            let t = sharp_table(
                &TwoQubitState::random(&mut rng),
                &ChshSetting::random(&mut rng),
            );
            let mut p = *t.entries();
            // Move ε from a = + to a = − in the (x = 0, y = 1) slice only.
            let eps = 1e-6;
            let b = if p[0][1][0][0] >= eps { 0 } else { 1 };
            p[0][1][0][b] -= eps;
            p[0][1][1][b] += eps;
            let perturbed = BehaviorTable::new(p).unwrap();
            let ns = no_signalling_check(&perturbed);
            assert!(!ns.ok);
            assert!((ns.max_violation - eps).abs() < 1e-12);
        }
    }
}
