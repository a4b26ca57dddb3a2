//! The three-stage sin² driver and the classical Jacobi–Perron algorithm.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::field::AlgebraicReal;
use crate::matrix::IntMatrix3;
use crate::numeric::{BigReal, NumericLiteral};
use crate::periodicity::{certify, CertificateCheck, CertificateFailed, PeriodReport, RepeatDetector, StateKey};
use crate::states::{is_separating, CubicState, StateError};
use crate::transforms::{
    formula_bar_f, formula_f, phi_step, sin2_alpha, sin2_extension_parts, sorting_order, JPTransform,
    TransformError,
};

pub const DEFAULT_MAX_STEPS: usize = 10_000;
pub const DEFAULT_REPORT_DIGITS: u32 = 50;
pub const DEFAULT_STAGE2_BLOCKS: usize = 200;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("a coordinate of xi is zero")]
    ZeroCoordinate,
    #[error("x/y is rational: {0:?}")]
    RationalRatio(Vec<BigInt>),
    #[error("no separating basis after {0} continued-fraction blocks")]
    Stage2Budget(usize),
    #[error("no period within {steps} steps")]
    BudgetExceeded { steps: usize, run: Box<Sin2Run> },
    #[error("certificate check {} failed", failure.check)]
    CertificateFailed { failure: CertificateFailed, run: Box<Sin2Run> },
    #[error("cannot certify a floor at step {step} with {bits} bits")]
    PrecisionExhausted { step: usize, bits: u64 },
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    Stage1,
    Stage2,
    Main,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Stage1 => "stage1",
            Stage::Stage2 => "stage2",
            Stage::Main => "main",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// Sign flips and a reordering making ξ sorted and positive.
    SignedPermutation,
    /// Even continued-fraction convergent blocks with these quotients.
    Separating { quotients: Vec<BigInt> },
    /// Reordering of coordinates only.
    Sort { order: [usize; 3] },
    Phi { choice: JPTransform, order: [usize; 3] },
}

impl StepKind {
    pub fn name(&self) -> &'static str {
        match self {
            StepKind::SignedPermutation => "signed_permutation",
            StepKind::Separating { .. } => "separating",
            StepKind::Sort { .. } => "T",
            StepKind::Phi { choice, .. } => choice.kind(),
        }
    }
}

/// Per-step cross-checks of the main stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepChecks {
    /// `Some(agrees)` when the y-axis intercept formula applies.
    pub formula_f: Option<bool>,
    /// `Some(agrees)` when the x-axis intercept formula applies.
    pub formula_bar_f: Option<bool>,
    /// `Some(true)` when both parts of sin² in the cofactor extension have
    /// zero η-coefficient.
    pub symmetric: Option<bool>,
    pub separating: bool,
    /// The maximum was attained by more than one candidate.
    pub tied: bool,
    /// sin² did not increase.
    pub descent: bool,
    pub candidates: usize,
}

#[derive(Clone, Debug)]
pub struct StepRecord {
    /// Main-stage step number, starting at 1; 0 for preliminary stages.
    pub index: usize,
    pub stage: Stage,
    pub kind: StepKind,
    pub matrix: IntMatrix3,
    pub sin2: AlgebraicReal,
    pub sin2_approx: String,
    pub state_key: StateKey,
    pub checks: Option<StepChecks>,
}

#[derive(Clone, Debug)]
pub struct Limits {
    pub max_steps: usize,
    pub report_digits: u32,
    pub cross_check: bool,
    pub stage2_blocks: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_steps: DEFAULT_MAX_STEPS,
            report_digits: DEFAULT_REPORT_DIGITS,
            cross_check: true,
            stage2_blocks: DEFAULT_STAGE2_BLOCKS,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Sin2Run {
    pub origin: CubicState,
    pub records: Vec<StepRecord>,
    pub final_state: CubicState,
    pub period: Option<PeriodReport>,
    /// Re-running the period from the repeat point reproduced its matrices.
    pub determinism: Option<bool>,
}

impl Sin2Run {
    pub fn main_steps(&self) -> impl Iterator<Item = &StepRecord> {
        self.records.iter().filter(|r| r.stage == Stage::Main)
    }

    pub fn descents(&self) -> usize {
        self.main_steps().filter(|r| r.checks.as_ref().is_some_and(|c| c.descent)).count()
    }

    /// Product of every recorded matrix.
    pub fn accumulated(&self) -> IntMatrix3 {
        self.records.iter().fold(IntMatrix3::identity(), |acc, r| &acc * &r.matrix)
    }
}

/// Signed permutation making the coordinates positive and sorted by
/// decreasing magnitude (stable on ties).
pub fn stage1_supporting(v: &[AlgebraicReal; 3]) -> Result<IntMatrix3, EngineError> {
    if v.iter().any(AlgebraicReal::is_zero) {
        return Err(EngineError::ZeroCoordinate);
    }
    let abs = v.clone().map(|c| if c.is_negative() { -c } else { c });
    let order = sorting_order(&abs);
    let mut m = IntMatrix3::from_rows([[0; 3]; 3]);
    for (j, &i) in order.iter().enumerate() {
        let s = if v[i].sign() == Sign::Minus { -1 } else { 1 };
        m.set(i, j, BigInt::from(s));
    }
    Ok(m)
}

/// First `n` partial quotients of `x/y`.
pub fn cf_partial_quotients(x: &AlgebraicReal, y: &AlgebraicReal, n: usize) -> Result<Vec<BigInt>, EngineError> {
    let mut r = x.checked_div(y).map_err(TransformError::from)?;
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a = r.floor();
        let frac = r.add_rational(&-BigRational::from_integer(a.clone()));
        out.push(a);
        if frac.is_zero() {
            if out.len() < n {
                return Err(EngineError::RationalRatio(out));
            }
            break;
        }
        r = frac.inv().map_err(TransformError::from)?;
    }
    Ok(out)
}

/// `[[1,a,0],[0,1,0],[0,0,1]]·[[1,0,0],[b,1,0],[0,0,1]]`.
fn cf_block(a: &BigInt, b: &BigInt) -> IntMatrix3 {
    let one = BigInt::one;
    let zero = BigInt::zero;
    let u = IntMatrix3::new([[one(), a.clone(), zero()], [zero(), one(), zero()], [zero(), zero(), one()]]);
    let l = IntMatrix3::new([[one(), zero(), zero()], [b.clone(), one(), zero()], [zero(), zero(), one()]]);
    &u * &l
}

/// The first even convergent basis `M_{2n}` (`n ≥ 0`, so at least one
/// block) that is separating, with the quotients used.
pub fn stage2_separating(s: &CubicState, max_blocks: usize) -> Result<(IntMatrix3, Vec<BigInt>), EngineError> {
    let triple = s.conjugate_triple();
    let mut m = IntMatrix3::identity();
    for n in 0..max_blocks {
        let quotients = match cf_partial_quotients(s.x(), s.y(), 2 * n + 2) {
            Ok(q) => q,
            Err(EngineError::RationalRatio(_)) => return Err(EngineError::Stage2Budget(n)),
            Err(e) => return Err(e),
        };
        m = &m * &cf_block(&quotients[2 * n], &quotients[2 * n + 1]);
        if is_separating(&triple, &m)? {
            return Ok((m, quotients));
        }
    }
    Err(EngineError::Stage2Budget(max_blocks))
}

fn record(index: usize, stage: Stage, kind: StepKind, matrix: IntMatrix3, s: &CubicState, digits: u32) -> Result<StepRecord, EngineError> {
    let sin2 = sin2_alpha(s)?.exact;
    Ok(StepRecord {
        index,
        stage,
        kind,
        matrix,
        sin2_approx: sin2.to_decimal(digits),
        sin2,
        state_key: StateKey::of(s),
        checks: None,
    })
}

/// Runs Stage 1, Stage 2 and the main iteration from `origin` (coordinates
/// in the standard basis), certifying the period against `a`, a matrix
/// with the conjugate vectors as eigenvectors.
pub fn run_sin2(origin: &CubicState, a: &IntMatrix3, limits: &Limits) -> Result<Sin2Run, EngineError> {
    let digits = limits.report_digits;
    let mut records = Vec::new();

    let s1_matrix = stage1_supporting(&origin.xi())?;
    let mut state = origin.change_basis(&s1_matrix)?;
    records.push(record(0, Stage::Stage1, StepKind::SignedPermutation, s1_matrix, &state, digits)?);

    let (s2_matrix, quotients) = stage2_separating(&state, limits.stage2_blocks)?;
    state = state.change_basis(&s2_matrix)?;
    records.push(record(0, Stage::Stage2, StepKind::Separating { quotients }, s2_matrix, &state, digits)?);

    let order = sorting_order(&state.xi());
    if order != [0, 1, 2] {
        let p = IntMatrix3::permutation(order);
        state = state.change_basis(&p)?;
        records.push(record(0, Stage::Stage2, StepKind::Sort { order }, p, &state, digits)?);
    }
    let stage_count = records.len();

    let mut detector = RepeatDetector::new();
    detector.probe(StateKey::of(&state), 0);
    let mut prev_sin2 = records.last().unwrap().sin2.clone();

    for n in 1..=limits.max_steps {
        let step = phi_step(&state)?;
        let checks = StepChecks {
            formula_f: cross_check(limits, &step.state, &step.sin2, formula_f)?,
            formula_bar_f: cross_check(limits, &step.state, &step.sin2, formula_bar_f)?,
            symmetric: limits.cross_check.then(|| {
                let (num, den) = sin2_extension_parts(&step.state.cofactor(), &step.state.xi());
                num.is_symmetric() && den.is_symmetric()
            }),
            separating: step.state.is_separating().unwrap_or(false),
            tied: step.tied,
            descent: !step.sin2.compare(&prev_sin2).is_gt(),
            candidates: step.candidates,
        };
        let key = StateKey::of(&step.state);
        let JPTransform::T { order } = step.sort else {
            unreachable!("sort is a permutation")
        };
        records.push(StepRecord {
            index: n,
            stage: Stage::Main,
            kind: StepKind::Phi { choice: step.choice, order },
            matrix: step.matrix,
            sin2_approx: step.sin2.to_decimal(digits),
            sin2: step.sin2.clone(),
            state_key: key.clone(),
            checks: Some(checks),
        });
        prev_sin2 = step.sin2;
        state = step.state;

        // Keys are the full canonical coefficient text, so a map hit is an
        // exact equality of normalized coordinates.
        if let Some((pre, _)) = detector.probe(key, n) {
            let prefix: Vec<IntMatrix3> = records[..stage_count + pre].iter().map(|r| r.matrix.clone()).collect();
            let cycle: Vec<IntMatrix3> = records[stage_count + pre..].iter().map(|r| r.matrix.clone()).collect();
            let determinism = replay_matches(&state, &cycle)?;
            let mut run = Sin2Run {
                origin: origin.clone(),
                records,
                final_state: state,
                period: None,
                determinism: Some(determinism),
            };
            return match certify(a, origin, &prefix, &cycle, pre) {
                Ok(report) if determinism => {
                    run.period = Some(report);
                    Ok(run)
                }
                Ok(report) => Err(EngineError::CertificateFailed {
                    failure: CertificateFailed {
                        check: CertificateCheck::Determinism,
                        report: Box::new(report),
                    },
                    run: Box::new(run),
                }),
                Err(failure) => Err(EngineError::CertificateFailed {
                    failure,
                    run: Box::new(run),
                }),
            };
        }
    }
    Err(EngineError::BudgetExceeded {
        steps: limits.max_steps,
        run: Box::new(Sin2Run {
            origin: origin.clone(),
            records,
            final_state: state,
            period: None,
            determinism: None,
        }),
    })
}

fn cross_check(
    limits: &Limits,
    s: &CubicState,
    sin2: &AlgebraicReal,
    formula: fn(&CubicState) -> Result<Option<AlgebraicReal>, TransformError>,
) -> Result<Option<bool>, EngineError> {
    if !limits.cross_check {
        return Ok(None);
    }
    Ok(formula(s)?.map(|v| (&v - sin2).is_zero()))
}

/// Applies Φ `expected.len()` more times and compares the matrices.
fn replay_matches(s: &CubicState, expected: &[IntMatrix3]) -> Result<bool, EngineError> {
    let mut state = s.clone();
    for m in expected {
        let step = phi_step(&state)?;
        if &step.matrix != m {
            return Ok(false);
        }
        state = step.state;
    }
    Ok(StateKey::of(&state) == StateKey::of(s))
}

#[derive(Clone, Debug)]
pub struct JpOptions {
    pub initial_bits: u64,
    pub max_bits: u64,
}

impl Default for JpOptions {
    fn default() -> Self {
        JpOptions {
            initial_bits: 256,
            max_bits: 1 << 16,
        }
    }
}

#[derive(Clone, Debug)]
pub struct JpRun {
    /// `(⌊z/y⌋, ⌊x/y⌋)` per step.
    pub pairs: Vec<(BigInt, BigInt)>,
    /// Enclosures of `(x, y, z)` before each step and after the last.
    pub states: Vec<[BigReal; 3]>,
    /// The step at which `y = 0` stopped the run.
    pub terminated: bool,
    /// Working precision of the successful attempt.
    pub bits: u64,
}

/// Output pair and image of one classical step.
pub type JpImage = ((BigInt, BigInt), [BigReal; 3]);

/// A floor could not be certified at the working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Undecided;

/// One step `(x, y, z) → (y, z − ⌊z/y⌋y, x − ⌊x/y⌋y)`. `Ok(None)` when
/// `y = 0` exactly.
pub fn jp_step(v: &[BigReal; 3], bits: u64) -> Result<Option<JpImage>, Undecided> {
    let [x, y, z] = v;
    if y.is_exact_zero() {
        return Ok(None);
    }
    let a = z.floor_quotient(y).ok_or(Undecided)?;
    let b = x.floor_quotient(y).ok_or(Undecided)?;
    let nz = z.sub_scaled(y, &a, bits);
    let nx = x.sub_scaled(y, &b, bits);
    Ok(Some(((a, b), [y.clone(), nz, nx])))
}

/// Classical Jacobi–Perron on certified enclosures. A step whose floor is
/// undecided restarts the whole run at twice the precision, up to
/// `opts.max_bits`.
pub fn run_classical_jp(v: &[NumericLiteral; 3], steps: usize, opts: &JpOptions) -> Result<JpRun, EngineError> {
    let mut bits = opts.initial_bits.max(8);
    loop {
        match jp_attempt(v, steps, bits) {
            Ok(run) => return Ok(run),
            Err(step) if bits >= opts.max_bits => return Err(EngineError::PrecisionExhausted { step, bits }),
            Err(_) => bits = (bits * 2).min(opts.max_bits),
        }
    }
}

fn jp_attempt(v: &[NumericLiteral; 3], steps: usize, bits: u64) -> Result<JpRun, usize> {
    let mut cur = v.clone().map(|c| c.enclose(bits));
    let mut run = JpRun {
        pairs: Vec::with_capacity(steps),
        states: vec![cur.clone()],
        terminated: false,
        bits,
    };
    for i in 0..steps {
        match jp_step(&cur, bits) {
            Ok(None) => {
                run.terminated = true;
                break;
            }
            Ok(Some((pair, next))) => {
                run.pairs.push(pair);
                run.states.push(next.clone());
                cur = next;
            }
            Err(Undecided) => return Err(i + 1),
        }
    }
    Ok(run)
}

/// A pair `i < j` of states whose normalized enclosures `(x/y, z/y)` overlap,
/// i.e. a possible repetition. `None` certifies that no two states coincide.
pub fn find_repetition(run: &JpRun) -> Option<(usize, usize)> {
    let mut boxes: Vec<(usize, BigReal, BigReal)> = run
        .states
        .iter()
        .enumerate()
        .filter_map(|(i, [x, y, z])| Some((i, x.quotient(y, run.bits)?, z.quotient(y, run.bits)?)))
        .collect();
    boxes.sort_by(|a, b| a.1.lo().cmp(b.1.lo()));
    let mut best: Option<(usize, usize)> = None;
    for (k, (i, u, w)) in boxes.iter().enumerate() {
        for (j, u2, w2) in &boxes[k + 1..] {
            if u2.lo() > u.hi() {
                break;
            }
            if u.overlaps(u2) && w.overlaps(w2) {
                let pair = ((*i).min(*j), (*i).max(*j));
                best = Some(best.map_or(pair, |b| b.min(pair)));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::CubicField;
    use crate::states::{state_from_matrix, RootChoice};

    fn example_a() -> IntMatrix3 {
        IntMatrix3::from_rows([[0, 0, 1], [1, -15, -9], [-9, 136, 66]])
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&n| BigInt::from(n)).collect()
    }

    #[test]
    fn stage1_examples() {
        let s = state_from_matrix(&example_a(), RootChoice::Largest).unwrap();
        let m = stage1_supporting(&s.xi()).unwrap();
        assert_eq!(m, IntMatrix3::from_rows([[0, 0, 1], [0, -1, 0], [1, 0, 0]]));

        let k = CubicField::from_coeffs([1, 0, -4, 1]).unwrap();
        let v = [3, 2, 1].map(|n| k.integer(0, n));
        assert_eq!(stage1_supporting(&v).unwrap(), IntMatrix3::identity());
        let v = [-1, -2, -3].map(|n| k.integer(0, n));
        let m = stage1_supporting(&v).unwrap();
        assert_eq!(m, IntMatrix3::from_rows([[0, 0, -1], [0, -1, 0], [-1, 0, 0]]));
        let inv = m.inverse_unimodular().unwrap();
        assert_eq!(inv.apply(&v), [3, 2, 1].map(|n| k.integer(0, n)));
        let v = [1, 0, 2].map(|n| k.integer(0, n));
        assert!(matches!(stage1_supporting(&v), Err(EngineError::ZeroCoordinate)));
    }

    #[test]
    fn example_continued_fraction_prefix() {
        let s = state_from_matrix(&example_a(), RootChoice::Largest).unwrap();
        let s1 = s.change_basis(&stage1_supporting(&s.xi()).unwrap()).unwrap();
        assert_eq!(cf_partial_quotients(s1.x(), s1.y(), 4).unwrap(), ints(&[6, 1, 3, 6]));
        let (m, q) = stage2_separating(&s1, 10).unwrap();
        assert_eq!(q, ints(&[6, 1]));
        assert_eq!(m, IntMatrix3::from_rows([[7, 6, 0], [1, 1, 0], [0, 0, 1]]));
    }

    #[test]
    fn rational_and_irrational_quotients() {
        let k = CubicField::from_coeffs([1, 0, -4, 1]).unwrap();
        let (x, y) = (k.integer(0, 7), k.integer(0, 2));
        match cf_partial_quotients(&x, &y, 5) {
            Err(EngineError::RationalRatio(q)) => assert_eq!(q, ints(&[3, 2])),
            other => panic!("{other:?}"),
        }
        assert_eq!(cf_partial_quotients(&x, &y, 2).unwrap(), ints(&[3, 2]));
        let t = k.generator(2);
        assert_eq!(cf_partial_quotients(&t, &k.integer(2, 1), 1).unwrap(), ints(&[1]));
    }

    #[test]
    fn worked_example_period() {
        let a = example_a();
        let s = state_from_matrix(&a, RootChoice::Largest).unwrap();
        let run = run_sin2(&s, &a, &Limits::default()).unwrap();
        let report = run.period.as_ref().unwrap();
        assert_eq!((report.preperiod_len, report.period_len), (3, 8));
        let phis: Vec<String> = run.main_steps().map(|r| r.matrix.to_string()).collect();
        assert_eq!(
            phis,
            [
                "1,3,1;0,1,1;0,1,0",
                "1,1,1;1,0,1;1,0,0",
                "1,1,0;1,0,1;1,0,0",
                "1,1,0;0,1,1;0,0,1",
                "1,0,1;1,0,0;0,1,0",
                "1,0,1;1,0,0;0,1,0",
                "1,1,6;1,0,5;0,0,1",
                "1,16,4;0,4,1;0,1,0",
                "1,0,1;1,0,0;0,1,0",
                "0,1,1;1,0,0;0,0,1",
                "1,1,1;1,1,0;1,0,0",
            ]
        );
        assert_eq!(run.determinism, Some(true));
        assert_eq!(run.accumulated(), run.final_state.basis().clone());
        for r in run.main_steps() {
            let c = r.checks.as_ref().unwrap();
            assert_eq!(c.formula_f, Some(true));
            assert_eq!(c.formula_bar_f, Some(true));
            assert_eq!(c.symmetric, Some(true));
            assert!(c.separating && !c.tied);
        }
    }

    #[test]
    fn zero_budget() {
        let a = example_a();
        let s = state_from_matrix(&a, RootChoice::Largest).unwrap();
        let limits = Limits {
            max_steps: 0,
            ..Limits::default()
        };
        match run_sin2(&s, &a, &limits) {
            Err(EngineError::BudgetExceeded { run, .. }) => assert_eq!(run.main_steps().count(), 0),
            other => panic!("{other:?}"),
        }
    }

    fn lit(s: &str) -> NumericLiteral {
        s.parse().unwrap()
    }

    #[test]
    fn jp_single_step() {
        let v = [lit("10"), lit("4"), lit("3")];
        let run = run_classical_jp(&v, 1, &JpOptions::default()).unwrap();
        assert_eq!(run.pairs, vec![(BigInt::from(0), BigInt::from(2))]);
        assert_eq!(run.states[1], [4, 3, 2].map(BigReal::from_integer));
    }

    #[test]
    fn jp_terminates_on_zero() {
        let v = [lit("6"), lit("3"), lit("9")];
        let run = run_classical_jp(&v, 10, &JpOptions::default()).unwrap();
        assert_eq!(run.pairs, vec![(BigInt::from(3), BigInt::from(2))]);
        assert_eq!(run.states[1], [3, 0, 0].map(BigReal::from_integer));
        assert!(run.terminated);
    }

    #[test]
    fn jp_escalates_and_gives_up() {
        let v = [lit("1"), lit("cbrt(4)"), lit("cbrt(16)")];
        let opts = JpOptions {
            initial_bits: 16,
            max_bits: 32,
        };
        assert!(matches!(run_classical_jp(&v, 200, &opts), Err(EngineError::PrecisionExhausted { bits: 32, .. })));
        let run = run_classical_jp(&v, 30, &JpOptions { initial_bits: 16, max_bits: 4096 }).unwrap();
        assert_eq!(run.pairs.len(), 30);
        assert!(run.bits > 16);
    }

    #[test]
    fn repetition_sweep() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let fuzzy = |c: BigRational| BigReal::from_bounds(&(&c - q(1, 1000)), &(&c + q(1, 1000)), 64);
        let state = |a: i64, b: i64| [fuzzy(q(a, 1)), BigReal::from_integer(b), fuzzy(q(7 * b, 1))];
        let mut run = JpRun {
            pairs: vec![],
            states: vec![state(3, 2), state(5, 2), state(9, 4), state(11, 2)],
            terminated: false,
            bits: 64,
        };
        assert_eq!(find_repetition(&run), None);
        run.states.push(state(6, 4));
        assert_eq!(find_repetition(&run), Some((0, 4)));
    }
}
