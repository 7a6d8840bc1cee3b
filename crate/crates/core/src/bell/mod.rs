//! CHSH evaluation, the joint-measurement Bell chain, and the Tsirelson search.
//!
//! Throughout, the CHSH combination is
//! `|E(A,B) + E(A′,B)| + |E(A,B′) − E(A′,B′)|` with the minus sign on the
//! primed-primed term. Relabeling observables permutes which term is negated.

mod nelder_mead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{pauli, Axis, UnitVec3};
use crate::observables::{Outcome, SharpSpin, UnsharpSpin};
use crate::states::{correlation, expectation, JointBehavior, TwoQubitState};

/// Slack allowed when checking that a correlation lies in `[−1, 1]`.
pub const CORRELATION_RANGE_TOL: f64 = 1e-9;
/// Tolerance for the identities and inequalities of the derivation chain.
pub const CHAIN_TOL: f64 = 1e-10;
/// Tolerance for the no-signalling equality inside the chain.
pub const CHAIN_NO_SIGNALLING_TOL: f64 = 1e-9;
/// Number of random starts used by [`tsirelson_optimize`].
pub const OPTIMIZER_STARTS: usize = 16;

const SIMPLEX_DIAMETER_TOL: f64 = 1e-9;
const MAX_EVALS_PER_RUN: usize = 20_000;
const MAX_RESTARTS: usize = 6;

/// Alice's two and Bob's two measurement directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSetting {
    pub a: UnitVec3,
    pub a_prime: UnitVec3,
    pub b: UnitVec3,
    pub b_prime: UnitVec3,
}

impl ChshSetting {
    /// `a = ẑ, a′ = x̂, b = (ẑ+x̂)/√2, b′ = (ẑ−x̂)/√2`: reaches `2√2` on the singlet.
    pub fn singlet_optimal() -> Self {
        let z = UnitVec3::Z.vec();
        let x = UnitVec3::X.vec();
        Self {
            a: UnitVec3::Z,
            a_prime: UnitVec3::X,
            b: UnitVec3::normalize(z + x).expect("nonzero"),
            b_prime: UnitVec3::normalize(z - x).expect("nonzero"),
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            a: UnitVec3::random(rng),
            a_prime: UnitVec3::random(rng),
            b: UnitVec3::random(rng),
            b_prime: UnitVec3::random(rng),
        }
    }

    fn from_angles(p: &[f64]) -> Self {
        Self {
            a: UnitVec3::from_angles(p[0], p[1]),
            a_prime: UnitVec3::from_angles(p[2], p[3]),
            b: UnitVec3::from_angles(p[4], p[5]),
            b_prime: UnitVec3::from_angles(p[6], p[7]),
        }
    }
}

/// The four correlations and their CHSH combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshReport {
    pub e_ab: f64,
    pub e_apb: f64,
    pub e_abp: f64,
    pub e_apbp: f64,
    pub value: f64,
}

impl ChshReport {
    pub fn correlations(&self) -> [f64; 4] {
        [self.e_ab, self.e_apb, self.e_abp, self.e_apbp]
    }
}

fn chsh_value(e_ab: f64, e_apb: f64, e_abp: f64, e_apbp: f64) -> f64 {
    (e_ab + e_apb).abs() + (e_abp - e_apbp).abs()
}

/// `|E(A,B) + E(A′,B)| + |E(A,B′) − E(A′,B′)|`.
pub fn chsh_from_correlations(
    e_ab: f64,
    e_apb: f64,
    e_abp: f64,
    e_apbp: f64,
) -> Result<ChshReport> {
    for e in [e_ab, e_apb, e_abp, e_apbp] {
        if !e.is_finite() || e.abs() > 1.0 + CORRELATION_RANGE_TOL {
            return Err(Error::CorrelationOutOfRange(e));
        }
    }
    Ok(ChshReport {
        e_ab,
        e_apb,
        e_abp,
        e_apbp,
        value: chsh_value(e_ab, e_apb, e_abp, e_apbp),
    })
}

fn quantum_correlations(state: &TwoQubitState, s: &ChshSetting, lambda: f64) -> Result<[f64; 4]> {
    let a = UnsharpSpin::new(lambda, s.a)?;
    let ap = UnsharpSpin::new(lambda, s.a_prime)?;
    let b = SharpSpin::new(s.b);
    let bp = SharpSpin::new(s.b_prime);
    Ok([
        correlation(state, &a, &b),
        correlation(state, &ap, &b),
        correlation(state, &a, &bp),
        correlation(state, &ap, &bp),
    ])
}

/// CHSH report for Alice measuring unsharply at `lambda` and Bob sharply.
///
/// `lambda = 1` gives the ordinary sharp value; otherwise the value is
/// `lambda` times the sharp one.
pub fn chsh_quantum(
    state: &TwoQubitState,
    setting: &ChshSetting,
    lambda: f64,
) -> Result<ChshReport> {
    let [e_ab, e_apb, e_abp, e_apbp] = quantum_correlations(state, setting, lambda)?;
    chsh_from_correlations(e_ab, e_apb, e_abp, e_apbp)
}

/// Maximum of the CHSH combination over the 16 deterministic strategies.
///
/// Returns the value and the first maximizing assignment `(A, A′, B, B′)` in
/// lexicographic order with `+1` before `−1`.
pub fn lhv_best_strategy() -> (i32, [i32; 4]) {
    let mut best = (i32::MIN, [0; 4]);
    for bits in 0..16u32 {
        let s: [i32; 4] = std::array::from_fn(|i| if bits >> (3 - i) & 1 == 0 { 1 } else { -1 });
        let [a, ap, b, bp] = s;
        let value = (a * b + ap * b).abs() + (a * bp - ap * bp).abs();
        if value > best.0 {
            best = (value, s);
        }
    }
    best
}

/// Local hidden-variable bound of the CHSH combination.
///
/// The maximum over deterministic strategies does not depend on the state or
/// the directions; both are accepted so every evaluator shares one signature.
pub fn lhv_max(_setting: &ChshSetting, _state: &TwoQubitState) -> f64 {
    lhv_best_strategy().0 as f64
}

/// Closed-form maximum of the sharp CHSH value over all settings:
/// `2√(m₁ + m₂)` with `m₁ ≥ m₂` the two largest eigenvalues of `TᵀT`,
/// `T_ij = Tr[ρ σ_i ⊗ σ_j]`.
pub fn horodecki_oracle(state: &TwoQubitState) -> f64 {
    let axes = [Axis::X, Axis::Y, Axis::Z];
    let mut t = [[0.0; 3]; 3];
    for (i, &ai) in axes.iter().enumerate() {
        for (j, &aj) in axes.iter().enumerate() {
            t[i][j] =
                expectation(state, &pauli(ai), &pauli(aj)).expect("Pauli expectations are real");
        }
    }
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = (0..3).map(|k| t[k][i] * t[k][j]).sum();
        }
    }
    let [_, m2, m1] = symmetric3_eigvals(&m);
    2.0 * (m1 + m2).max(0.0).sqrt()
}

// Trigonometric closed form for a real symmetric 3×3 matrix, ascending.
fn symmetric3_eigvals(m: &[[f64; 3]; 3]) -> [f64; 3] {
    let off = m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2);
    let mut vals = if off == 0.0 {
        [m[0][0], m[1][1], m[2][2]]
    } else {
        let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
        let p2 = (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + 2.0 * off;
        let p = (p2 / 6.0).sqrt();
        let b = |i: usize, j: usize| (m[i][j] - if i == j { q } else { 0.0 }) / p;
        let det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1))
            - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
            + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
        let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
        let largest = q + 2.0 * p * phi.cos();
        let smallest = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
        [largest, 3.0 * q - largest - smallest, smallest]
    };
    vals.sort_by(f64::total_cmp);
    vals
}

/// Best sharp CHSH value found for a state, with the directions achieving it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsirelsonOptimum {
    pub report: ChshReport,
    pub setting: ChshSetting,
}

/// Maximizes the sharp CHSH value over the four measurement directions.
///
/// Each direction is parametrized by polar and azimuthal angles. The search
/// runs [`OPTIMIZER_STARTS`] Nelder–Mead descents from uniformly random angles
/// (start `i` draws from ChaCha stream `i` of `seed`), restarting each from its
/// own optimum until the value stops improving, and keeps the best result.
pub fn tsirelson_optimize(state: &TwoQubitState, seed: u64) -> Result<TsirelsonOptimum> {
    let objective = |p: &[f64]| -> f64 {
        let s = ChshSetting::from_angles(p);
        let [e_ab, e_apb, e_abp, e_apbp] =
            quantum_correlations(state, &s, 1.0).expect("lambda = 1 is valid");
        -chsh_value(e_ab, e_apb, e_abp, e_apbp)
    };

    let runs: Vec<nelder_mead::Minimum> = (0..OPTIMIZER_STARTS as u64)
        .into_par_iter()
        .map(|start| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(start);
            let init: Vec<f64> = (0..4)
                .flat_map(|_| {
                    let theta = (1.0 - 2.0 * rng.random::<f64>()).acos();
                    let phi = std::f64::consts::TAU * rng.random::<f64>();
                    [theta, phi]
                })
                .collect();
            let mut opts = nelder_mead::Options {
                step: 0.5,
                diameter_tol: SIMPLEX_DIAMETER_TOL,
                max_evals: MAX_EVALS_PER_RUN,
            };
            let mut best = nelder_mead::minimize(objective, &init, opts);
            opts.step = 0.05;
            for _ in 0..MAX_RESTARTS {
                let next = nelder_mead::minimize(objective, &best.point, opts);
                let improved = next.value < best.value - 1e-13;
                if next.value <= best.value {
                    best = next;
                }
                if !improved {
                    break;
                }
            }
            best
        })
        .collect();

    let (_, best) = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .expect("at least one start");
    if !runs.iter().any(|r| r.converged) {
        return Err(Error::OptimizerFailed(-best.value));
    }
    let setting = ChshSetting::from_angles(&best.point);
    Ok(TsirelsonOptimum {
        report: chsh_quantum(state, &setting, 1.0)?,
        setting,
    })
}

/// How a chain step compares its two sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    AtLeast,
    AtMost,
}

/// One checked relation `lhs (=|≥|≤) rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub holds: bool,
}

impl ChainStep {
    fn new(name: &str, lhs: f64, relation: Relation, rhs: f64, tolerance: f64) -> Self {
        let holds = match relation {
            Relation::Equal => (lhs - rhs).abs() <= tolerance,
            Relation::AtLeast => lhs >= rhs - tolerance,
            Relation::AtMost => lhs <= rhs + tolerance,
        };
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            relation,
            tolerance,
            holds,
        }
    }
}

/// Probabilities and correlations read off one Bob-setting slice of a joint behavior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceQuantities {
    /// `p(A_J = A′_J)`.
    pub p_equal: f64,
    /// `p(A_J = −A′_J)`.
    pub p_opposite: f64,
    /// `p(A_J = A′_J = B)`.
    pub p_equal_with_b: f64,
    /// `p(A_J = A′_J = −B)`.
    pub p_equal_against_b: f64,
    /// `p(A_J = −A′_J = B)`.
    pub p_opposite_with_b: f64,
    /// `p(A_J = −A′_J = −B)`.
    pub p_opposite_against_b: f64,
    /// `E(A_J, B)` from the first marginal.
    pub e_first: f64,
    /// `E(A′_J, B)` from the second marginal.
    pub e_second: f64,
}

fn slice_quantities(jb: &JointBehavior, y: usize) -> SliceQuantities {
    let mut q = SliceQuantities {
        p_equal: 0.0,
        p_opposite: 0.0,
        p_equal_with_b: 0.0,
        p_equal_against_b: 0.0,
        p_opposite_with_b: 0.0,
        p_opposite_against_b: 0.0,
        e_first: 0.0,
        e_second: 0.0,
    };
    for j in Outcome::BOTH {
        for k in Outcome::BOTH {
            for b in Outcome::BOTH {
                let p = jb.probability(y, j, k, b);
                match (j == k, j == b) {
                    (true, true) => q.p_equal_with_b += p,
                    (true, false) => q.p_equal_against_b += p,
                    (false, true) => q.p_opposite_with_b += p,
                    (false, false) => q.p_opposite_against_b += p,
                }
                if j == k {
                    q.p_equal += p;
                } else {
                    q.p_opposite += p;
                }
            }
        }
    }
    for j in Outcome::BOTH {
        for b in Outcome::BOTH {
            let ab = j.sign() * b.sign();
            q.e_first += ab * jb.first_marginal(y, j, b);
            q.e_second += ab * jb.second_marginal(y, j, b);
        }
    }
    q
}

/// Every intermediate quantity of the joint-measurement Bell derivation,
/// with the relation each step asserts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivationChain {
    /// Quantities for Bob's setting `B` (index 0) and `B′` (index 1).
    pub slices: [SliceQuantities; 2],
    pub steps: Vec<ChainStep>,
    /// `|E(A_J,B) + E(A′_J,B)| + |E(A_J,B′) − E(A′_J,B′)|`.
    pub bell_value: f64,
}

impl DerivationChain {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(|s| s.holds)
    }

    pub fn step(&self, name: &str) -> Option<&ChainStep> {
        self.steps.iter().find(|s| s.name == name)
    }

    /// Whether Alice's "outcomes differ" probability is independent of Bob's setting.
    pub fn no_signalling_holds(&self) -> bool {
        self.step("no_signalling").is_some_and(|s| s.holds)
    }
}

/// Runs the joint-measurement Bell derivation on a joint behavior table.
///
/// Steps, in order:
/// `decomposition`: `p(A_J=A′_J; B)` splits into agreement with `B` and `−B`;
/// `nonnegativity`: that sum bounds the absolute difference of its parts;
/// `agreement_identity`: the difference equals `½|E(A_J,B) + E(A′_J,B)|`;
/// `equal_outcomes_bound`: `p(A_J=A′_J; B) ≥ ½|E(A_J,B) + E(A′_J,B)|`;
/// `disagreement_identity` and `opposite_outcomes_bound`: the same for
/// `p(A_J=−A′_J; B′)` and `½|E(A_J,B′) − E(A′_J,B′)|`;
/// `summed_bound`: the sum of both bounds;
/// `no_signalling`: `p(A_J=−A′_J; B) = p(A_J=−A′_J; B′)`;
/// `substituted_bound`: the summed bound with the `B′` term replaced via no-signalling;
/// `normalization`: `p(A_J=A′_J; B) + p(A_J=−A′_J; B) = 1`;
/// `bell_bound`: the resulting CHSH combination is at most 2.
pub fn verify_derivation_chain(jb: &JointBehavior) -> DerivationChain {
    let s = [slice_quantities(jb, 0), slice_quantities(jb, 1)];
    let [b, bp] = &s;
    let half_sum = 0.5 * (b.e_first + b.e_second).abs();
    let half_diff = 0.5 * (bp.e_first - bp.e_second).abs();
    let bell_value = 2.0 * (half_sum + half_diff);
    use Relation::*;
    let steps = vec![
        ChainStep::new(
            "decomposition",
            b.p_equal,
            Equal,
            b.p_equal_with_b + b.p_equal_against_b,
            CHAIN_TOL,
        ),
        ChainStep::new(
            "nonnegativity",
            b.p_equal_with_b + b.p_equal_against_b,
            AtLeast,
            (b.p_equal_with_b - b.p_equal_against_b).abs(),
            CHAIN_TOL,
        ),
        ChainStep::new(
            "agreement_identity",
            (b.p_equal_with_b - b.p_equal_against_b).abs(),
            Equal,
            half_sum,
            CHAIN_TOL,
        ),
        ChainStep::new(
            "equal_outcomes_bound",
            b.p_equal,
            AtLeast,
            half_sum,
            CHAIN_TOL,
        ),
        ChainStep::new(
            "disagreement_identity",
            (bp.p_opposite_with_b - bp.p_opposite_against_b).abs(),
            Equal,
            half_diff,
            CHAIN_TOL,
        ),
        ChainStep::new(
            "opposite_outcomes_bound",
            bp.p_opposite,
            AtLeast,
            half_diff,
            CHAIN_TOL,
        ),
        ChainStep::new(
            "summed_bound",
            b.p_equal + bp.p_opposite,
            AtLeast,
            half_sum + half_diff,
            CHAIN_TOL,
        ),
        ChainStep::new(
            "no_signalling",
            b.p_opposite,
            Equal,
            bp.p_opposite,
            CHAIN_NO_SIGNALLING_TOL,
        ),
        ChainStep::new(
            "substituted_bound",
            b.p_equal + b.p_opposite,
            AtLeast,
            half_sum + half_diff,
            CHAIN_TOL,
        ),
        ChainStep::new(
            "normalization",
            b.p_equal + b.p_opposite,
            Equal,
            1.0,
            CHAIN_TOL,
        ),
        ChainStep::new("bell_bound", bell_value, AtMost, 2.0, CHAIN_TOL),
    ];
    DerivationChain {
        slices: s,
        steps,
        bell_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{build_joint_povm, max_equal_lambda};
    use crate::states::joint_behavior_from_state;
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    #[test]
    fn chsh_from_correlation_examples() {
        assert_eq!(
            chsh_from_correlations(1.0, 1.0, 1.0, -1.0).unwrap().value,
            4.0
        );
        let h = FRAC_1_SQRT_2;
        let r = chsh_from_correlations(-h, -h, -h, h).unwrap();
        assert!((r.value - 2.0 * SQRT_2).abs() < 1e-15);
        assert_eq!(
            chsh_from_correlations(0.0, 0.0, 0.0, 0.0).unwrap().value,
            0.0
        );
        assert!(matches!(
            chsh_from_correlations(1.0 + 1e-6, 0.0, 0.0, 0.0),
            Err(Error::CorrelationOutOfRange(_))
        ));
        assert!(chsh_from_correlations(1.0 + 1e-10, 0.0, 0.0, 0.0).is_ok());
        assert!(chsh_from_correlations(f64::NAN, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn chsh_quantum_examples() {
        let s = ChshSetting::singlet_optimal();
        let singlet = TwoQubitState::singlet();
        let sharp = chsh_quantum(&singlet, &s, 1.0).unwrap();
        assert!((sharp.value - 2.0 * SQRT_2).abs() < 1e-9);
        let h = FRAC_1_SQRT_2;
        for (e, expected) in sharp.correlations().iter().zip([-h, -h, -h, h]) {
            assert!((e - expected).abs() < 1e-12);
        }
        let unsharp = chsh_quantum(&singlet, &s, FRAC_1_SQRT_2).unwrap();
        assert!((unsharp.value - 2.0).abs() < 1e-9);
        let mixed = chsh_quantum(&TwoQubitState::maximally_mixed(), &s, 1.0).unwrap();
        assert!(mixed.value.abs() < 1e-15);
        assert!(chsh_quantum(&singlet, &s, 0.0).is_err());
    }

    #[test]
    fn lhv_enumeration() {
        let (value, strategy) = lhv_best_strategy();
        assert_eq!(value, 2);
        assert_eq!(strategy, [1, 1, 1, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10 {
            let s = ChshSetting::random(&mut rng);
            assert_eq!(lhv_max(&s, &TwoQubitState::random(&mut rng)), 2.0);
        }
        // A = +1, A′ = −1, B = B′ = +1.
        assert_eq!((1 - 1i32).abs() + (1 + 1i32).abs(), 2);
    }

    #[test]
    fn symmetric3_closed_form() {
        let m = [[2.0, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, 5.0]];
        let v = symmetric3_eigvals(&m);
        for (a, b) in v.iter().zip([1.0, 3.0, 5.0]) {
            assert!((a - b).abs() < 1e-12, "{v:?}");
        }
        let m = [[4.0, 1.0, -2.0], [1.0, 2.0, 0.5], [-2.0, 0.5, 3.0]];
        let v = symmetric3_eigvals(&m);
        assert!((v.iter().sum::<f64>() - 9.0).abs() < 1e-12);
        for lambda in v {
            let d = |i: usize, j: usize| m[i][j] - if i == j { lambda } else { 0.0 };
            let det = d(0, 0) * (d(1, 1) * d(2, 2) - d(1, 2) * d(2, 1))
                - d(0, 1) * (d(1, 0) * d(2, 2) - d(1, 2) * d(2, 0))
                + d(0, 2) * (d(1, 0) * d(2, 1) - d(1, 1) * d(2, 0));
            assert!(det.abs() < 1e-10);
        }
    }

    #[test]
    fn horodecki_examples() {
        assert!((horodecki_oracle(&TwoQubitState::singlet()) - 2.0 * SQRT_2).abs() < 1e-12);
        assert!(horodecki_oracle(&TwoQubitState::maximally_mixed()).abs() < 1e-12);
        let ket0 = crate::linalg::HermitianOperator::from_real_diagonal([1.0, 0.0]);
        let zero_zero = TwoQubitState::product(&ket0, &ket0).unwrap();
        assert!((horodecki_oracle(&zero_zero) - 2.0).abs() < 1e-12);
        let w = TwoQubitState::werner(0.5).unwrap();
        assert!((horodecki_oracle(&w) - SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn optimizer_on_reference_states() {
        let singlet = tsirelson_optimize(&TwoQubitState::singlet(), 1).unwrap();
        assert!((singlet.report.value - 2.0 * SQRT_2).abs() < 1e-6);
        let ket0 = crate::linalg::HermitianOperator::from_real_diagonal([1.0, 0.0]);
        let zero_zero = TwoQubitState::product(&ket0, &ket0).unwrap();
        let product = tsirelson_optimize(&zero_zero, 2).unwrap();
        assert!((product.report.value - 2.0).abs() < 1e-6);
        let werner = tsirelson_optimize(&TwoQubitState::werner(0.5).unwrap(), 3).unwrap();
        assert!((werner.report.value - SQRT_2).abs() < 1e-6);
    }

    #[test]
    fn optimizer_is_deterministic_per_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let state = TwoQubitState::random(&mut rng);
        assert_eq!(
            tsirelson_optimize(&state, 5).unwrap(),
            tsirelson_optimize(&state, 5).unwrap()
        );
    }

    fn chain_for(seed: u64) -> DerivationChain {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = TwoQubitState::random(&mut rng);
        let a1 = UnitVec3::random(&mut rng);
        let a2 = UnitVec3::random(&mut rng);
        let lam = max_equal_lambda(&a1, &a2);
        let joint = build_joint_povm(
            &UnsharpSpin::new(lam, a1).unwrap(),
            &UnsharpSpin::new(lam, a2).unwrap(),
        )
        .unwrap();
        let bob = [
            SharpSpin::new(UnitVec3::random(&mut rng)),
            SharpSpin::new(UnitVec3::random(&mut rng)),
        ];
        verify_derivation_chain(&joint_behavior_from_state(&state, &joint, bob))
    }

    #[test]
    fn chain_passes_on_quantum_tables() {
        for seed in 0..50 {
            let chain = chain_for(seed);
            assert!(chain.passed(), "{chain:#?}");
            assert!(chain.bell_value <= 2.0 + 1e-10);
        }
    }

    #[test]
    fn chain_on_uniform_table() {
        let jb = JointBehavior::new([[[[0.125; 2]; 2]; 2]; 2]).unwrap();
        let chain = verify_derivation_chain(&jb);
        assert!(chain.passed());
        assert_eq!(chain.bell_value, 0.0);
        for s in &chain.slices {
            assert_eq!((s.e_first, s.e_second), (0.0, 0.0));
        }
    }

    #[test]
    fn chain_flags_signalling_tables() {
        // Under B Alice's joint outcomes always agree; under B′ they always differ.
        let mut q = [[[[0.0; 2]; 2]; 2]; 2];
        q[0][0][0][0] = 0.5;
        q[0][1][1][1] = 0.5;
        q[1][0][1][0] = 0.5;
        q[1][1][0][1] = 0.5;
        let chain = verify_derivation_chain(&JointBehavior::new(q).unwrap());
        assert!(!chain.no_signalling_holds());
        let ns = chain.step("no_signalling").unwrap();
        assert_eq!((ns.lhs, ns.rhs), (0.0, 1.0));
        assert!(!chain.passed());
        // This table reaches the algebraic maximum once no-signalling is dropped.
        assert!((chain.bell_value - 4.0).abs() < 1e-15);
        assert!(!chain.step("bell_bound").unwrap().holds);
        assert!(chain.step("summed_bound").unwrap().holds);
    }

    #[test]
    fn agreement_identity_matches_correlations() {
        let chain = chain_for(1234);
        let b = chain.slices[0];
        let lhs = (b.p_equal_with_b - b.p_equal_against_b).abs();
        assert!((lhs - 0.5 * (b.e_first + b.e_second).abs()).abs() < 1e-12);
    }
}
