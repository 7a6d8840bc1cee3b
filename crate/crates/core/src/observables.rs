//! Sharp and unsharp spin observables, POVMs, and joint measurability.
//!
//! An unsharp spin observable along `â` with sharpness `λ ∈ (0, 1]` is the
//! dichotomic POVM `{½[I ± λ â·σ]}`. Two such observables can be measured
//! jointly iff `|λ₁â₁ + λ₂â₂| + |λ₁â₁ − λ₂â₂| ≤ 2`; when they can,
//! [`build_joint_povm`] produces an explicit four-outcome joint observable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{bloch_operator, HermitianOperator, UnitVec3, PSD_TOL};

/// Slack on the `≤ 2` comparison in the coexistence condition.
pub const COEXISTENCE_TOL: f64 = 1e-12;
/// Entrywise tolerance for `Σ E = I`.
pub const COMPLETENESS_TOL: f64 = 1e-12;

/// Outcome of a dichotomic measurement. Index 0 is `+1`, index 1 is `−1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn value(self) -> i32 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn sign(self) -> f64 {
        self.value() as f64
    }

    pub fn index(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }

    pub fn from_index(index: usize) -> Self {
        if index == 0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }
}

impl std::ops::Neg for Outcome {
    type Output = Outcome;
    fn neg(self) -> Outcome {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }
}

/// A qubit measurement with outcomes `±1`.
pub trait DichotomicObservable {
    fn effect(&self, outcome: Outcome) -> HermitianOperator<2>;

    fn to_povm(&self) -> Povm<2> {
        Povm {
            effects: Outcome::BOTH.iter().map(|&o| self.effect(o)).collect(),
        }
    }
}

/// Projective spin measurement along a direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpSpin {
    pub direction: UnitVec3,
}

impl SharpSpin {
    pub fn new(direction: UnitVec3) -> Self {
        Self { direction }
    }
}

impl DichotomicObservable for SharpSpin {
    fn effect(&self, outcome: Outcome) -> HermitianOperator<2> {
        sharp_projector(self, outcome)
    }
}

/// Smeared spin measurement `E_λ(±â) = ½[I ± λ â·σ]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnsharpSpin {
    lambda: f64,
    direction: UnitVec3,
}

impl UnsharpSpin {
    pub fn new(lambda: f64, direction: UnitVec3) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::InvalidLambda(lambda));
        }
        Ok(Self { lambda, direction })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn direction(&self) -> UnitVec3 {
        self.direction
    }

    /// The projective measurement this one smears.
    pub fn sharp(&self) -> SharpSpin {
        SharpSpin::new(self.direction)
    }
}

impl DichotomicObservable for UnsharpSpin {
    fn effect(&self, outcome: Outcome) -> HermitianOperator<2> {
        unsharp_effect(self, outcome)
    }
}

/// `½[I + sign·â·σ]`.
pub fn sharp_projector(spin: &SharpSpin, sign: Outcome) -> HermitianOperator<2> {
    0.5 * (HermitianOperator::identity() + bloch_operator(sign.sign() * spin.direction.vec()))
}

/// `½[I + sign·λ â·σ]`; eigenvalues `(1 ± λ)/2`.
pub fn unsharp_effect(spin: &UnsharpSpin, sign: Outcome) -> HermitianOperator<2> {
    let v = (sign.sign() * spin.lambda) * spin.direction.vec();
    0.5 * (HermitianOperator::identity() + bloch_operator(v))
}

/// An unsharp effect written as a mixture of the two sharp projectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDecomposition {
    /// Weight `(1 + λ)/2` on the projector along `+â`.
    pub reality: f64,
    /// Weight `(1 − λ)/2` on the projector along `−â`.
    pub unsharpness: f64,
    pub plus: HermitianOperator<2>,
    pub minus: HermitianOperator<2>,
}

impl SpectralDecomposition {
    pub fn recompose(&self) -> HermitianOperator<2> {
        self.reality * self.plus + self.unsharpness * self.minus
    }
}

pub fn spectral_decompose(spin: &UnsharpSpin) -> SpectralDecomposition {
    let sharp = spin.sharp();
    SpectralDecomposition {
        reality: 0.5 * (1.0 + spin.lambda),
        unsharpness: 0.5 * (1.0 - spin.lambda),
        plus: sharp_projector(&sharp, Outcome::Plus),
        minus: sharp_projector(&sharp, Outcome::Minus),
    }
}

/// Result of the joint-measurability test for two unsharp spins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coexistence {
    pub coexistent: bool,
    pub lhs: f64,
}

/// `|λ₁â₁ + λ₂â₂| + |λ₁â₁ − λ₂â₂| ≤ 2`.
pub fn coexistence_check(first: &UnsharpSpin, second: &UnsharpSpin) -> Coexistence {
    let (sum, diff) = bloch_sum_and_difference(first, second);
    let lhs = sum + diff;
    Coexistence {
        coexistent: lhs <= 2.0 + COEXISTENCE_TOL,
        lhs,
    }
}

fn bloch_sum_and_difference(first: &UnsharpSpin, second: &UnsharpSpin) -> (f64, f64) {
    let u = first.lambda * first.direction.vec();
    let v = second.lambda * second.direction.vec();
    ((u + v).norm(), (u - v).norm())
}

/// Largest common sharpness at which spins along `a1` and `a2` coexist, capped at 1.
pub fn max_equal_lambda(a1: &UnitVec3, a2: &UnitVec3) -> f64 {
    let spread = (a1.vec() + a2.vec()).norm() + (a1.vec() - a2.vec()).norm();
    (2.0 / spread).min(1.0)
}

/// Finite set of effects summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm<const N: usize> {
    effects: Vec<HermitianOperator<N>>,
}

impl<const N: usize> Povm<N> {
    pub fn new(effects: Vec<HermitianOperator<N>>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::InvalidPovm("no effects".into()));
        }
        let identity = HermitianOperator::<N>::identity();
        for (i, e) in effects.iter().enumerate() {
            if !e.is_psd(PSD_TOL) {
                return Err(Error::InvalidPovm(format!("effect {i} is not positive")));
            }
            if !(identity - *e).is_psd(PSD_TOL) {
                return Err(Error::InvalidPovm(format!(
                    "effect {i} exceeds the identity"
                )));
            }
        }
        let total = effects
            .iter()
            .fold(HermitianOperator::<N>::zero(), |acc, e| acc + *e);
        let gap = total.max_abs_diff(&identity);
        if gap > COMPLETENESS_TOL {
            return Err(Error::InvalidPovm(format!(
                "effects sum to identity only within {gap:e}"
            )));
        }
        Ok(Self { effects })
    }

    pub fn effects(&self) -> &[HermitianOperator<N>] {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }
}

/// `G_jk = ¼[(1 + jkγ)I + (jλ₁â₁ + kλ₂â₂)·σ]` for an arbitrary correlation parameter `γ`.
///
/// Positive for all four outcomes iff
/// `|λ₁â₁+λ₂â₂| − 1 ≤ γ ≤ 1 − |λ₁â₁−λ₂â₂|`.
pub fn joint_effect(
    first: &UnsharpSpin,
    second: &UnsharpSpin,
    gamma: f64,
    j: Outcome,
    k: Outcome,
) -> HermitianOperator<2> {
    let jk = j.sign() * k.sign();
    let v = (j.sign() * first.lambda) * first.direction.vec()
        + (k.sign() * second.lambda) * second.direction.vec();
    0.25 * ((1.0 + jk * gamma) * HermitianOperator::identity() + bloch_operator(v))
}

/// Four-outcome observable whose marginals are two coexistent unsharp spins.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpinPovm {
    effects: [[HermitianOperator<2>; 2]; 2],
    first: UnsharpSpin,
    second: UnsharpSpin,
    gamma: f64,
    gamma_range: (f64, f64),
}

impl JointSpinPovm {
    pub fn effect(&self, j: Outcome, k: Outcome) -> HermitianOperator<2> {
        self.effects[j.index()][k.index()]
    }

    pub fn first(&self) -> &UnsharpSpin {
        &self.first
    }

    pub fn second(&self) -> &UnsharpSpin {
        &self.second
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Feasible interval for `γ`; the chosen value is its midpoint.
    pub fn gamma_range(&self) -> (f64, f64) {
        self.gamma_range
    }

    /// `Σ_k G_jk`, which equals `E_λ₁(j·â₁)`.
    pub fn marginal_first(&self, j: Outcome) -> HermitianOperator<2> {
        self.effect(j, Outcome::Plus) + self.effect(j, Outcome::Minus)
    }

    /// `Σ_j G_jk`, which equals `E_λ₂(k·â₂)`.
    pub fn marginal_second(&self, k: Outcome) -> HermitianOperator<2> {
        self.effect(Outcome::Plus, k) + self.effect(Outcome::Minus, k)
    }

    /// Effects in the order `(+,+), (+,−), (−,+), (−,−)`.
    pub fn to_povm(&self) -> Povm<2> {
        Povm {
            effects: self.effects.iter().flatten().copied().collect(),
        }
    }
}

/// Builds the joint observable with `γ` at the midpoint of its feasible interval.
pub fn build_joint_povm(first: &UnsharpSpin, second: &UnsharpSpin) -> Result<JointSpinPovm> {
    let check = coexistence_check(first, second);
    if !check.coexistent {
        return Err(Error::NotCoexistent(check.lhs));
    }
    let (sum, diff) = bloch_sum_and_difference(first, second);
    let gamma_range = (sum - 1.0, 1.0 - diff);
    let gamma = 0.5 * (sum - diff);
    let mut effects = [[HermitianOperator::zero(); 2]; 2];
    for j in Outcome::BOTH {
        for k in Outcome::BOTH {
            effects[j.index()][k.index()] = joint_effect(first, second, gamma, j, k);
        }
    }
    Ok(JointSpinPovm {
        effects,
        first: *first,
        second: *second,
        gamma,
        gamma_range,
    })
}
