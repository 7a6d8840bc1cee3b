//! Two-qubit density operators, correlation functions and behavior tables.
//!
//! Alice's qubit is the first tensor factor. Outcome index 0 stands for `+1`
//! and index 1 for `−1` in every table.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{HermitianOperator, SquareOperator, PSD_TOL};
use crate::observables::{DichotomicObservable, JointSpinPovm, Outcome, Povm, SharpSpin};

/// Trace-one tolerance for density operators.
pub const TRACE_TOL: f64 = 1e-12;
/// Tolerance for probability entries and per-setting normalization.
pub const PROBABILITY_TOL: f64 = 1e-12;
/// Largest imaginary part tolerated in `Tr[ρ(A⊗B)]`.
pub const IMAGINARY_TOL: f64 = 1e-10;

const SAMPLE_CHUNK: u64 = 1 << 16;

/// Positive, trace-one operator on two qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    rho: HermitianOperator<4>,
}

impl TwoQubitState {
    pub fn new(rho: HermitianOperator<4>) -> Result<Self> {
        let tr = rho.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let min = rho.eigvals()?[0];
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "not positive (min eigenvalue {min:e})"
            )));
        }
        Ok(Self { rho })
    }

    /// `|ψ⟩⟨ψ|` for a normalized amplitude vector in the basis `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn pure(psi: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "vector has squared norm {norm}"
            )));
        }
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = psi[i] * psi[j].conj();
            }
        }
        Self::new(HermitianOperator::new(SquareOperator::from_entries(m))?)
    }

    /// `(|01⟩ − |10⟩)/√2`.
    pub fn singlet() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let zero = Complex64::new(0.0, 0.0);
        Self::pure([zero, Complex64::new(h, 0.0), Complex64::new(-h, 0.0), zero])
            .expect("singlet is a valid state")
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho: 0.25 * HermitianOperator::identity(),
        }
    }

    /// `p·singlet + (1 − p)·I/4`, valid for `p ∈ [−1/3, 1]`.
    pub fn werner(p: f64) -> Result<Self> {
        Self::new(p * Self::singlet().rho + (1.0 - p) * Self::maximally_mixed().rho)
    }

    /// `ρ_A ⊗ ρ_B` for two single-qubit density operators.
    pub fn product(alice: &HermitianOperator<2>, bob: &HermitianOperator<2>) -> Result<Self> {
        Self::new(alice.tensor(bob))
    }

    /// Random state `GG†/Tr(GG†)` with `G` a complex Gaussian `4×r` matrix, `r ∈ 1..=4`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let rank = rng.random_range(1..=4usize);
        let mut g = [[Complex64::new(0.0, 0.0); 4]; 4];
        for row in g.iter_mut() {
            for z in row.iter_mut().take(rank) {
                *z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            }
        }
        let g = SquareOperator::from_entries(g);
        let gg = g * g.adjoint();
        let tr = gg.trace().re;
        let rho = HermitianOperator::new(gg.scale(Complex64::new(1.0 / tr, 0.0)))
            .expect("GG† is Hermitian");
        Self::new(rho).expect("GG†/tr is a state")
    }

    pub fn rho(&self) -> &HermitianOperator<4> {
        &self.rho
    }
}

/// `Tr[ρ (A ⊗ B)]`.
pub fn expectation(
    state: &TwoQubitState,
    alice: &HermitianOperator<2>,
    bob: &HermitianOperator<2>,
) -> Result<f64> {
    let value = state
        .rho
        .operator()
        .trace_product(alice.tensor(bob).operator());
    if value.im.abs() > IMAGINARY_TOL {
        return Err(Error::ImaginaryResidue(value.im));
    }
    Ok(value.re)
}

fn joint_probability(
    state: &TwoQubitState,
    alice: &HermitianOperator<2>,
    bob: &HermitianOperator<2>,
) -> f64 {
    // Both factors are Hermitian, so the trace is real up to rounding.
    state
        .rho
        .operator()
        .trace_product(alice.tensor(bob).operator())
        .re
}

/// `E = Σ_{a,b} ab·Tr[ρ(E_a ⊗ F_b)]`.
pub fn correlation<A, B>(state: &TwoQubitState, alice: &A, bob: &B) -> f64
where
    A: DichotomicObservable + ?Sized,
    B: DichotomicObservable + ?Sized,
{
    let mut e = 0.0;
    for a in Outcome::BOTH {
        let ea = alice.effect(a);
        for b in Outcome::BOTH {
            e += a.sign() * b.sign() * joint_probability(state, &ea, &bob.effect(b));
        }
    }
    e
}

fn validate_slice<'a>(
    values: impl Iterator<Item = &'a f64>,
    what: &str,
    slice: usize,
) -> Result<()> {
    let mut total = 0.0;
    for &v in values {
        if !v.is_finite() || !(-PROBABILITY_TOL..=1.0 + PROBABILITY_TOL).contains(&v) {
            return Err(Error::InvalidBehavior(format!(
                "{what} entry {v} is not a probability"
            )));
        }
        total += v;
    }
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::InvalidBehavior(format!(
            "{what} slice {slice} sums to {total}"
        )));
    }
    Ok(())
}

/// Conditional distribution `p(a, b | x, y)` for two dichotomic settings per party.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBehavior", into = "RawBehavior")]
pub struct BehaviorTable {
    // Indexed [x][y][a][b].
    p: [[[[f64; 2]; 2]; 2]; 2],
}

#[derive(Serialize, Deserialize)]
struct RawBehavior {
    p: [[[[f64; 2]; 2]; 2]; 2],
}

impl TryFrom<RawBehavior> for BehaviorTable {
    type Error = Error;
    fn try_from(raw: RawBehavior) -> Result<Self> {
        Self::new(raw.p)
    }
}

impl From<BehaviorTable> for RawBehavior {
    fn from(t: BehaviorTable) -> Self {
        RawBehavior { p: t.p }
    }
}

impl BehaviorTable {
    /// Entries indexed `[x][y][a][b]`; each `(x, y)` slice must sum to one.
    pub fn new(p: [[[[f64; 2]; 2]; 2]; 2]) -> Result<Self> {
        for (x, row) in p.iter().enumerate() {
            for (y, slice) in row.iter().enumerate() {
                validate_slice(slice.iter().flatten(), "behavior", 2 * x + y)?;
            }
        }
        Ok(Self { p })
    }

    pub fn entries(&self) -> &[[[[f64; 2]; 2]; 2]; 2] {
        &self.p
    }

    pub fn probability(&self, x: usize, y: usize, a: Outcome, b: Outcome) -> f64 {
        self.p[x][y][a.index()][b.index()]
    }

    /// `E(x, y) = p(a = b) − p(a = −b)`.
    pub fn correlation(&self, x: usize, y: usize) -> f64 {
        let s = &self.p[x][y];
        s[0][0] + s[1][1] - s[0][1] - s[1][0]
    }

    /// `(E(A,B), E(A′,B), E(A,B′), E(A′,B′))` with settings 0 unprimed, 1 primed.
    pub fn correlations(&self) -> [f64; 4] {
        [
            self.correlation(0, 0),
            self.correlation(1, 0),
            self.correlation(0, 1),
            self.correlation(1, 1),
        ]
    }

    pub fn alice_marginal(&self, x: usize, y: usize, a: Outcome) -> f64 {
        self.p[x][y][a.index()].iter().sum()
    }

    pub fn bob_marginal(&self, x: usize, y: usize, b: Outcome) -> f64 {
        self.p[x][y].iter().map(|row| row[b.index()]).sum()
    }
}

/// `q(a_J, a′_J, b | y)`: Alice measures both of her observables jointly while
/// Bob picks setting `y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawJoint", into = "RawJoint")]
pub struct JointBehavior {
    // Indexed [y][j][k][b].
    q: [[[[f64; 2]; 2]; 2]; 2],
}

#[derive(Serialize, Deserialize)]
struct RawJoint {
    q: [[[[f64; 2]; 2]; 2]; 2],
}

impl TryFrom<RawJoint> for JointBehavior {
    type Error = Error;
    fn try_from(raw: RawJoint) -> Result<Self> {
        Self::new(raw.q)
    }
}

impl From<JointBehavior> for RawJoint {
    fn from(t: JointBehavior) -> Self {
        RawJoint { q: t.q }
    }
}

impl JointBehavior {
    /// Entries indexed `[y][j][k][b]`; each `y` slice must sum to one.
    pub fn new(q: [[[[f64; 2]; 2]; 2]; 2]) -> Result<Self> {
        for (y, slice) in q.iter().enumerate() {
            validate_slice(slice.iter().flatten().flatten(), "joint behavior", y)?;
        }
        Ok(Self { q })
    }

    pub fn entries(&self) -> &[[[[f64; 2]; 2]; 2]; 2] {
        &self.q
    }

    pub fn probability(&self, y: usize, j: Outcome, k: Outcome, b: Outcome) -> f64 {
        self.q[y][j.index()][k.index()][b.index()]
    }

    /// `p(a_J = j, b | y)`, summing out the second joint outcome.
    pub fn first_marginal(&self, y: usize, j: Outcome, b: Outcome) -> f64 {
        Outcome::BOTH
            .iter()
            .map(|&k| self.probability(y, j, k, b))
            .sum()
    }

    /// `p(a′_J = k, b | y)`, summing out the first joint outcome.
    pub fn second_marginal(&self, y: usize, k: Outcome, b: Outcome) -> f64 {
        Outcome::BOTH
            .iter()
            .map(|&j| self.probability(y, j, k, b))
            .sum()
    }
}

/// `p(a, b | x, y) = Tr[ρ (E^x_a ⊗ F^y_b)]`.
pub fn behavior_from_state(
    state: &TwoQubitState,
    alice: [&Povm<2>; 2],
    bob: [&Povm<2>; 2],
) -> Result<BehaviorTable> {
    for povm in alice.iter().chain(bob.iter()) {
        if povm.len() != 2 {
            return Err(Error::NotDichotomic(povm.len()));
        }
    }
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for (x, pa) in alice.iter().enumerate() {
        for (y, pb) in bob.iter().enumerate() {
            for (a, ea) in pa.effects().iter().enumerate() {
                for (b, fb) in pb.effects().iter().enumerate() {
                    p[x][y][a][b] = joint_probability(state, ea, fb);
                }
            }
        }
    }
    Ok(BehaviorTable { p })
}

/// `q(j, k, b | y) = Tr[ρ (G_jk ⊗ F^y_b)]`.
pub fn joint_behavior_from_state(
    state: &TwoQubitState,
    joint: &JointSpinPovm,
    bob: [SharpSpin; 2],
) -> JointBehavior {
    let mut q = [[[[0.0; 2]; 2]; 2]; 2];
    for (y, spin) in bob.iter().enumerate() {
        for j in Outcome::BOTH {
            let row = joint.effect(j, Outcome::Plus);
            let col = joint.effect(j, Outcome::Minus);
            for (k, g) in [(Outcome::Plus, row), (Outcome::Minus, col)] {
                for b in Outcome::BOTH {
                    q[y][j.index()][k.index()][b.index()] =
                        joint_probability(state, &g, &spin.effect(b));
                }
            }
        }
    }
    JointBehavior { q }
}

/// Histogram of sampled outcome pairs, indexed `[alice effect][bob effect]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub counts: Vec<Vec<u64>>,
}

impl OutcomeCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Empirical `Σ ab·freq(a, b)` when both measurements are dichotomic.
    pub fn correlation(&self) -> Option<f64> {
        if self.counts.len() != 2 || self.counts.iter().any(|row| row.len() != 2) {
            return None;
        }
        let c = &self.counts;
        let same = (c[0][0] + c[1][1]) as f64;
        let diff = (c[0][1] + c[1][0]) as f64;
        Some((same - diff) / self.total() as f64)
    }
}

/// Draws `shots` i.i.d. outcome pairs from `Tr[ρ(E_a ⊗ F_b)]` by inverse-CDF lookup.
///
/// Samples are generated in fixed-size chunks; chunk `c` uses the ChaCha stream
/// `c` of the generator seeded with `seed`, so the counts depend only on
/// `(seed, shots)` regardless of how chunks are scheduled across threads.
pub fn sample_outcomes(
    state: &TwoQubitState,
    alice: &Povm<2>,
    bob: &Povm<2>,
    shots: u64,
    seed: u64,
) -> OutcomeCounts {
    let nb = bob.len();
    let probs: Vec<f64> = alice
        .effects()
        .iter()
        .flat_map(|ea| {
            bob.effects()
                .iter()
                .map(move |fb| joint_probability(state, ea, fb).max(0.0))
        })
        .collect();
    let total: f64 = probs.iter().sum();
    let cdf: Vec<f64> = probs
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc / total)
        })
        .collect();
    // The last reachable cell absorbs any rounding in the final cumulative value.
    let last = probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1);

    let chunks = shots.div_ceil(SAMPLE_CHUNK);
    let flat = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let len = SAMPLE_CHUNK.min(shots - chunk * SAMPLE_CHUNK);
            let mut local = vec![0u64; cdf.len()];
            for _ in 0..len {
                let u: f64 = rng.random();
                let cell = cdf.iter().position(|&c| u < c).unwrap_or(last);
                local[cell] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; cdf.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    OutcomeCounts {
        counts: flat.chunks(nb).map(<[u64]>::to_vec).collect(),
    }
}
