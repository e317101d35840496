//! The Hardy state for a two-setting, two-outcome measurement family.
//!
//! Setting 1 on each side is the standard basis; setting 2 is a rotation of
//! it by `theta` with relative phase `phi`:
//!
//! ```text
//! |X2+⟩ =  cos θ |X1+⟩ + e^{iφ} sin θ |X1−⟩
//! |X2−⟩ = −e^{−iφ} sin θ |X1+⟩ + cos θ |X1−⟩
//! ```
//!
//! The state is `|L1+,R1−⟩ − ⟨L2−,R2+|L1+,R1−⟩ |L2−,R2+⟩`, normalized. It is
//! orthogonal to `|L2−,R2+⟩`, `|L1−,R2−⟩` and `|L2+,R1+⟩` for every family,
//! and has a nonzero overlap with `|L1−,R1+⟩` whenever the family is proper.

mod optimize;

pub use optimize::{
    hardy_fraction, optimize_hardy_fraction, optimize_hardy_fraction_symmetric, HardyOptimum,
    OptimizeError, MIN_GRID_RESOLUTION,
};

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qcore::{tensor, ComplexAmplitude, LinalgError, Vec2, Vec4, ZERO_TOLERANCE};

/// A side counts as non-degenerate when `|sin θ cos θ|` exceeds this.
pub const PROPER_THRESHOLD: f64 = 1e-6;

/// Lower bound that `p(11−+)` must exceed for the constraint check to pass.
pub const POSITIVITY_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HardyError {
    #[error("improper measurement family: {side} side has theta = {theta} (|sin·cos| = {measure:e} must exceed {PROPER_THRESHOLD:e})")]
    ImproperFamily { side: Side, theta: f64, measure: f64 },
    #[error("non-finite angle in measurement family: {0:?}")]
    NonFiniteAngle(MeasurementFamily),
    #[error("degenerate Hardy state: raw norm {norm:e} is not above {ZERO_TOLERANCE:e}")]
    DegenerateState { norm: f64 },
}

impl From<LinalgError> for HardyError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::DegenerateState { norm, .. } => HardyError::DegenerateState { norm },
            LinalgError::DimensionMismatch { .. } => unreachable!("fixed-size kets"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Side::Left => 'L',
            Side::Right => 'R',
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

/// Which of the two observables is measured at a station.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Setting {
    One,
    Two,
}

impl Setting {
    pub const ALL: [Setting; 2] = [Setting::One, Setting::Two];

    pub fn number(self) -> u8 {
        match self {
            Setting::One => 1,
            Setting::Two => 2,
        }
    }

    pub fn other(self) -> Setting {
        match self {
            Setting::One => Setting::Two,
            Setting::Two => Setting::One,
        }
    }
}

impl From<Setting> for u8 {
    fn from(s: Setting) -> u8 {
        s.number()
    }
}

impl TryFrom<u8> for Setting {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Setting::One),
            2 => Ok(Setting::Two),
            other => Err(format!("setting must be 1 or 2, got {other}")),
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn flipped(self) -> Outcome {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Outcome::Plus => '+',
            Outcome::Minus => '-',
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SettingPair {
    pub left: Setting,
    pub right: Setting,
}

impl SettingPair {
    /// Ordered 11, 12, 21, 22.
    pub const ALL: [SettingPair; 4] = [
        SettingPair::new(Setting::One, Setting::One),
        SettingPair::new(Setting::One, Setting::Two),
        SettingPair::new(Setting::Two, Setting::One),
        SettingPair::new(Setting::Two, Setting::Two),
    ];

    pub const fn new(left: Setting, right: Setting) -> Self {
        SettingPair { left, right }
    }

    pub fn get(&self, side: Side) -> Setting {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    pub fn with(mut self, side: Side, setting: Setting) -> Self {
        match side {
            Side::Left => self.left = setting,
            Side::Right => self.right = setting,
        }
        self
    }

    /// Position in [`SettingPair::ALL`].
    pub fn index(&self) -> usize {
        2 * (self.left.number() as usize - 1) + (self.right.number() as usize - 1)
    }
}

impl fmt::Display for SettingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.left, self.right)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OutcomePair {
    pub left: Outcome,
    pub right: Outcome,
}

impl OutcomePair {
    /// Ordered ++, +−, −+, −−.
    pub const ALL: [OutcomePair; 4] = [
        OutcomePair::new(Outcome::Plus, Outcome::Plus),
        OutcomePair::new(Outcome::Plus, Outcome::Minus),
        OutcomePair::new(Outcome::Minus, Outcome::Plus),
        OutcomePair::new(Outcome::Minus, Outcome::Minus),
    ];

    pub const fn new(left: Outcome, right: Outcome) -> Self {
        OutcomePair { left, right }
    }

    pub fn get(&self, side: Side) -> Outcome {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    /// Position in [`OutcomePair::ALL`].
    pub fn index(&self) -> usize {
        let bit = |o: Outcome| usize::from(o == Outcome::Minus);
        2 * bit(self.left) + bit(self.right)
    }
}

impl fmt::Display for OutcomePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.left, self.right)
    }
}

/// A single-station statement such as `L1−`: setting 1 measured on the left
/// with outcome −.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub side: Side,
    pub setting: Setting,
    pub outcome: Outcome,
}

impl Literal {
    pub const fn new(side: Side, setting: Setting, outcome: Outcome) -> Self {
        Literal {
            side,
            setting,
            outcome,
        }
    }

    pub fn negated(self) -> Literal {
        Literal {
            outcome: self.outcome.flipped(),
            ..self
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.side.letter(), self.setting, self.outcome)
    }
}

/// Rotation angles and phases defining the four single-particle bases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementFamily {
    pub theta_left: f64,
    pub theta_right: f64,
    pub phi_left: f64,
    pub phi_right: f64,
}

impl MeasurementFamily {
    pub fn new(theta_left: f64, theta_right: f64) -> Self {
        Self::with_phases(theta_left, theta_right, 0.0, 0.0)
    }

    pub fn with_phases(theta_left: f64, theta_right: f64, phi_left: f64, phi_right: f64) -> Self {
        MeasurementFamily {
            theta_left,
            theta_right,
            phi_left,
            phi_right,
        }
    }

    /// Both rotations at π/4, where `p(11−+) = 1/12`.
    pub fn reference() -> Self {
        Self::new(std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_4)
    }

    pub fn theta(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.theta_left,
            Side::Right => self.theta_right,
        }
    }

    pub fn phi(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.phi_left,
            Side::Right => self.phi_right,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.theta_left, self.theta_right, self.phi_left, self.phi_right]
            .iter()
            .all(|x| x.is_finite())
    }

    /// Checks that observables 1 and 2 differ non-trivially on both sides.
    pub fn check_proper(&self) -> Result<(), HardyError> {
        if !self.is_finite() {
            return Err(HardyError::NonFiniteAngle(*self));
        }
        for side in [Side::Left, Side::Right] {
            let theta = self.theta(side);
            let measure = (theta.sin() * theta.cos()).abs();
            if !(measure > PROPER_THRESHOLD) {
                return Err(HardyError::ImproperFamily {
                    side,
                    theta,
                    measure,
                });
            }
        }
        Ok(())
    }

    pub fn is_proper(&self) -> bool {
        self.check_proper().is_ok()
    }

    /// Eigenvector of `setting` with eigenvalue `outcome` on `side`.
    pub fn eigenvector(&self, side: Side, setting: Setting, outcome: Outcome) -> Vec2 {
        let (theta, phi) = (self.theta(side), self.phi(side));
        let (s, c) = theta.sin_cos();
        let real = |x: f64| Complex64::new(x, 0.0);
        match (setting, outcome) {
            (Setting::One, Outcome::Plus) => Vec2::basis(0),
            (Setting::One, Outcome::Minus) => Vec2::basis(1),
            (Setting::Two, Outcome::Plus) => {
                crate::qcore::Ket([real(c), Complex64::from_polar(s, phi)])
            }
            (Setting::Two, Outcome::Minus) => {
                crate::qcore::Ket([Complex64::from_polar(-s, -phi), real(c)])
            }
        }
    }

    /// Product eigenvector `|Lα a, Rβ b⟩`.
    pub fn product_eigenvector(&self, settings: SettingPair, outcomes: OutcomePair) -> Vec4 {
        tensor(
            &self.eigenvector(Side::Left, settings.left, outcomes.left),
            &self.eigenvector(Side::Right, settings.right, outcomes.right),
        )
    }
}

impl Default for MeasurementFamily {
    fn default() -> Self {
        Self::reference()
    }
}

/// Normalized Hardy state together with the family that defines it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardyState {
    vector: Vec4,
    family: MeasurementFamily,
    raw_norm_sqr: f64,
}

impl HardyState {
    pub fn vector(&self) -> &Vec4 {
        &self.vector
    }

    pub fn family(&self) -> &MeasurementFamily {
        &self.family
    }

    /// Squared norm of the state before normalization.
    pub fn raw_norm_sqr(&self) -> f64 {
        self.raw_norm_sqr
    }
}

pub fn build_hardy_state(family: MeasurementFamily) -> Result<HardyState, HardyError> {
    family.check_proper()?;
    let anchor = family.product_eigenvector(
        SettingPair::new(Setting::One, Setting::One),
        OutcomePair::new(Outcome::Plus, Outcome::Minus),
    );
    let excluded = family.product_eigenvector(
        SettingPair::new(Setting::Two, Setting::Two),
        OutcomePair::new(Outcome::Minus, Outcome::Plus),
    );
    let overlap = excluded.inner(&anchor);
    let raw = anchor.sub(&excluded.scale(overlap));
    let vector = raw.normalized(ZERO_TOLERANCE)?;
    Ok(HardyState {
        vector,
        family,
        raw_norm_sqr: raw.norm_sqr(),
    })
}

/// `⟨Lα a, Rβ b|Ψ⟩`.
pub fn amplitude(state: &HardyState, settings: SettingPair, outcomes: OutcomePair) -> ComplexAmplitude {
    state
        .family
        .product_eigenvector(settings, outcomes)
        .inner(&state.vector)
}

/// Born-rule probability of `outcomes` given `settings`.
pub fn joint_probability(state: &HardyState, settings: SettingPair, outcomes: OutcomePair) -> f64 {
    amplitude(state, settings, outcomes).norm_sqr().min(1.0)
}

/// All sixteen joint probabilities, indexed `[settings.index()][outcomes.index()]`.
pub fn probability_table(state: &HardyState) -> [[f64; 4]; 4] {
    let mut table = [[0.0; 4]; 4];
    for s in SettingPair::ALL {
        for o in OutcomePair::ALL {
            table[s.index()][o.index()] = joint_probability(state, s, o);
        }
    }
    table
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Probabilities at or below this count as impossible.
    pub zero: f64,
    /// `p(11−+)` must exceed this.
    pub positivity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            zero: ZERO_TOLERANCE,
            positivity: POSITIVITY_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Requirement {
    Zero,
    Positive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintCheck {
    pub label: String,
    pub settings: SettingPair,
    pub outcomes: OutcomePair,
    pub requirement: Requirement,
    pub probability: f64,
    pub passed: bool,
}

/// The four probabilities that characterize the Hardy state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub family: MeasurementFamily,
    pub tolerances: Tolerances,
    pub checks: Vec<ConstraintCheck>,
    pub passed: bool,
}

impl ConstraintReport {
    pub fn check(&self, settings: SettingPair, outcomes: OutcomePair) -> Option<&ConstraintCheck> {
        self.checks
            .iter()
            .find(|c| c.settings == settings && c.outcomes == outcomes)
    }
}

/// The three events the state forbids and the one it allows, in the order
/// `12−−`, `22−+`, `21++`, `11−+`.
pub const HARDY_EVENTS: [(SettingPair, OutcomePair, Requirement); 4] = [
    (
        SettingPair::new(Setting::One, Setting::Two),
        OutcomePair::new(Outcome::Minus, Outcome::Minus),
        Requirement::Zero,
    ),
    (
        SettingPair::new(Setting::Two, Setting::Two),
        OutcomePair::new(Outcome::Minus, Outcome::Plus),
        Requirement::Zero,
    ),
    (
        SettingPair::new(Setting::Two, Setting::One),
        OutcomePair::new(Outcome::Plus, Outcome::Plus),
        Requirement::Zero,
    ),
    (
        SettingPair::new(Setting::One, Setting::One),
        OutcomePair::new(Outcome::Minus, Outcome::Plus),
        Requirement::Positive,
    ),
];

pub fn verify_constraints(family: MeasurementFamily) -> Result<ConstraintReport, HardyError> {
    verify_constraints_with(family, Tolerances::default())
}

pub fn verify_constraints_with(
    family: MeasurementFamily,
    tolerances: Tolerances,
) -> Result<ConstraintReport, HardyError> {
    let state = build_hardy_state(family)?;
    Ok(constraint_report(&state, tolerances))
}

pub fn constraint_report(state: &HardyState, tolerances: Tolerances) -> ConstraintReport {
    let checks: Vec<_> = HARDY_EVENTS
        .iter()
        .map(|&(settings, outcomes, requirement)| {
            let probability = joint_probability(state, settings, outcomes);
            let passed = match requirement {
                Requirement::Zero => probability <= tolerances.zero,
                Requirement::Positive => probability > tolerances.positivity,
            };
            ConstraintCheck {
                label: format!("p({settings}{outcomes})"),
                settings,
                outcomes,
                requirement,
                probability,
                passed,
            }
        })
        .collect();
    ConstraintReport {
        family: state.family,
        tolerances,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImplicationKind {
    Implies,
    DoesNotImply,
}

/// A conditional between the two stations, meaningful only under the
/// setting pair in `context`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Implication {
    pub context: SettingPair,
    pub antecedent: Literal,
    pub consequent: Literal,
    pub kind: ImplicationKind,
}

impl Implication {
    pub fn implies(antecedent: Literal, consequent: Literal) -> Self {
        Self::build(antecedent, consequent, ImplicationKind::Implies)
    }

    pub fn does_not_imply(antecedent: Literal, consequent: Literal) -> Self {
        Self::build(antecedent, consequent, ImplicationKind::DoesNotImply)
    }

    fn build(antecedent: Literal, consequent: Literal, kind: ImplicationKind) -> Self {
        assert_ne!(antecedent.side, consequent.side, "implication must relate the two stations");
        let context = SettingPair::new(Setting::One, Setting::One)
            .with(antecedent.side, antecedent.setting)
            .with(consequent.side, consequent.setting);
        Implication {
            context,
            antecedent,
            consequent,
            kind,
        }
    }

    /// The joint event `antecedent ∧ ¬consequent` in this context.
    pub fn counter_event(&self) -> OutcomePair {
        let mut pair = OutcomePair::new(Outcome::Plus, Outcome::Plus);
        let negated = self.consequent.negated();
        for lit in [self.antecedent, negated] {
            match lit.side {
                Side::Left => pair.left = lit.outcome,
                Side::Right => pair.right = lit.outcome,
            }
        }
        pair
    }
}

impl fmt::Display for Implication {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = match self.kind {
            ImplicationKind::Implies => "=>",
            ImplicationKind::DoesNotImply => "=/=>",
        };
        write!(f, "{} {arrow} {} [settings {}]", self.antecedent, self.consequent, self.context)
    }
}

/// The four conditionals that follow from the Hardy probabilities, in order:
/// `L1− ⇒ R2+`, `R2+ ⇒ L2+`, `L2+ ⇒ R1−`, `L1− ⇏ R1−`.
pub fn hardy_implications() -> [Implication; 4] {
    use Outcome::*;
    use Setting::*;
    use Side::*;
    [
        Implication::implies(Literal::new(Left, One, Minus), Literal::new(Right, Two, Plus)),
        Implication::implies(Literal::new(Right, Two, Plus), Literal::new(Left, Two, Plus)),
        Implication::implies(Literal::new(Left, Two, Plus), Literal::new(Right, One, Minus)),
        Implication::does_not_imply(Literal::new(Left, One, Minus), Literal::new(Right, One, Minus)),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidatedImplication {
    #[serde(flatten)]
    pub implication: Implication,
    /// Probability of `antecedent ∧ ¬consequent` under the context settings.
    pub counter_probability: f64,
    pub validated: bool,
}

pub fn implication_table(family: MeasurementFamily) -> Result<Vec<ValidatedImplication>, HardyError> {
    let state = build_hardy_state(family)?;
    Ok(validate_implications(&state, Tolerances::default()))
}

pub fn validate_implications(state: &HardyState, tolerances: Tolerances) -> Vec<ValidatedImplication> {
    hardy_implications()
        .into_iter()
        .map(|implication| {
            let p = joint_probability(state, implication.context, implication.counter_event());
            let validated = match implication.kind {
                ImplicationKind::Implies => p <= tolerances.zero,
                ImplicationKind::DoesNotImply => p > tolerances.positivity,
            };
            ValidatedImplication {
                implication,
                counter_probability: p,
                validated,
            }
        })
        .collect()
}
