//! Parameter sequences alpha_n, gamma_n (tau_n = 1/gamma_n) and the
//! validators for the convergence conditions of the implicit, explicit, and
//! Newton-type methods.
//!
//! Power-law families are checked symbolically by closed-form exponent
//! arithmetic; tabulated schedules fall back to numeric traces with an
//! operational "trends to zero" criterion (last decade of the horizon
//! decreases monotonically below 1% of the initial value). The moduli entering
//! condition checks are the bound formulas of the space module, which are
//! upper bounds of the true moduli, so a Satisfied verdict on the smoothness
//! conditions is conservative (sufficient).

use thiserror::Error;

use crate::space::{SpaceKind, SpaceSpec};

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("table schedule exhausted: index {index} out of {len} values")]
    TableExhausted { index: usize, len: usize },
    #[error("invalid schedule parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown preset {name:?}; available: {available:?}")]
    UnknownPreset {
        name: String,
        available: Vec<&'static str>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleRole {
    Alpha,
    Gamma,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleFamily {
    /// coefficient * (n+1)^(-k) for Alpha, coefficient * (n+1)^(+k) for Gamma,
    /// with k = `exponent` >= 0.
    PowerLaw { coefficient: f64, exponent: f64 },
    Table(Vec<f64>),
}

/// A positive parameter sequence with a role: regularization levels (Alpha,
/// nonincreasing) or splitting parameters (Gamma, nondecreasing).
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    family: ScheduleFamily,
    role: ScheduleRole,
}

impl Schedule {
    /// alpha_n = c0 * (n+1)^(-k), k >= 0.
    pub fn power_alpha(c0: f64, k: f64) -> Result<Self, ScheduleError> {
        if !(c0 > 0.0 && c0.is_finite()) || !(k >= 0.0 && k.is_finite()) {
            return Err(ScheduleError::InvalidParameter(format!(
                "power alpha needs c0 > 0 and k >= 0, got c0={c0}, k={k}"
            )));
        }
        Ok(Schedule {
            family: ScheduleFamily::PowerLaw {
                coefficient: c0,
                exponent: k,
            },
            role: ScheduleRole::Alpha,
        })
    }

    /// gamma_n = c0 * (n+1)^(k), k >= 0.
    pub fn power_gamma(c0: f64, k: f64) -> Result<Self, ScheduleError> {
        if !(c0 > 0.0 && c0.is_finite()) || !(k >= 0.0 && k.is_finite()) {
            return Err(ScheduleError::InvalidParameter(format!(
                "power gamma needs c0 > 0 and k >= 0, got c0={c0}, k={k}"
            )));
        }
        Ok(Schedule {
            family: ScheduleFamily::PowerLaw {
                coefficient: c0,
                exponent: k,
            },
            role: ScheduleRole::Gamma,
        })
    }

    pub fn table_alpha(values: Vec<f64>) -> Result<Self, ScheduleError> {
        if values.is_empty() {
            return Err(ScheduleError::InvalidParameter("empty table".into()));
        }
        for w in values.windows(2) {
            if w[1] > w[0] {
                return Err(ScheduleError::InvalidParameter(
                    "alpha table must be nonincreasing".into(),
                ));
            }
        }
        Self::table_checked(values, ScheduleRole::Alpha)
    }

    pub fn table_gamma(values: Vec<f64>) -> Result<Self, ScheduleError> {
        Self::table_checked(values, ScheduleRole::Gamma)
    }

    fn table_checked(values: Vec<f64>, role: ScheduleRole) -> Result<Self, ScheduleError> {
        for (i, v) in values.iter().enumerate() {
            if !(v.is_finite() && *v > 0.0) {
                return Err(ScheduleError::InvalidParameter(format!(
                    "table entry {i} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(Schedule {
            family: ScheduleFamily::Table(values),
            role,
        })
    }

    pub fn role(&self) -> ScheduleRole {
        self.role
    }

    pub fn family(&self) -> &ScheduleFamily {
        &self.family
    }

    /// Value at index n. Panics on an exhausted table; run drivers call
    /// `ensure_horizon` up front so the panic marks a driver bug, not user
    /// input.
    pub fn value(&self, n: usize) -> f64 {
        self.try_value(n)
            .unwrap_or_else(|e| panic!("schedule value: {e}"))
    }

    pub fn try_value(&self, n: usize) -> Result<f64, ScheduleError> {
        match &self.family {
            ScheduleFamily::PowerLaw {
                coefficient,
                exponent,
            } => {
                let signed = match self.role {
                    ScheduleRole::Alpha => -exponent,
                    ScheduleRole::Gamma => *exponent,
                };
                Ok(coefficient * ((n + 1) as f64).powf(signed))
            }
            ScheduleFamily::Table(values) => {
                values
                    .get(n)
                    .copied()
                    .ok_or(ScheduleError::TableExhausted {
                        index: n,
                        len: values.len(),
                    })
            }
        }
    }

    pub fn ensure_horizon(&self, n: usize) -> Result<(), ScheduleError> {
        match &self.family {
            ScheduleFamily::PowerLaw { .. } => Ok(()),
            ScheduleFamily::Table(values) => {
                if values.len() > n {
                    Ok(())
                } else {
                    Err(ScheduleError::TableExhausted {
                        index: n,
                        len: values.len(),
                    })
                }
            }
        }
    }

    /// (coefficient, signed exponent) when the schedule is a power law:
    /// value(n) = c * (n+1)^e.
    fn power(&self) -> Option<(f64, f64)> {
        match &self.family {
            ScheduleFamily::PowerLaw {
                coefficient,
                exponent,
            } => {
                let signed = match self.role {
                    ScheduleRole::Alpha => -exponent,
                    ScheduleRole::Gamma => *exponent,
                };
                Some((*coefficient, signed))
            }
            ScheduleFamily::Table(_) => None,
        }
    }
}

/// Nonnegative level sequences for noise models (zero allowed, unlike
/// `Schedule`).
#[derive(Debug, Clone, PartialEq)]
pub enum LevelSequence {
    Constant(f64),
    /// coefficient * (n+1)^(-exponent)
    PowerDecay { coefficient: f64, exponent: f64 },
    Table(Vec<f64>),
}

impl LevelSequence {
    pub fn zero() -> Self {
        LevelSequence::Constant(0.0)
    }

    pub fn value(&self, n: usize) -> f64 {
        match self {
            LevelSequence::Constant(c) => *c,
            LevelSequence::PowerDecay {
                coefficient,
                exponent,
            } => coefficient * ((n + 1) as f64).powf(-exponent),
            LevelSequence::Table(values) => values
                .get(n)
                .copied()
                .unwrap_or_else(|| panic!("level sequence exhausted at {n}")),
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            LevelSequence::Constant(c) => *c == 0.0,
            LevelSequence::PowerDecay { coefficient, .. } => *coefficient == 0.0,
            LevelSequence::Table(values) => values.iter().all(|v| *v == 0.0),
        }
    }

    /// Decay exponent when the sequence is a (nonzero) power law or constant.
    fn decay_exponent(&self) -> Option<f64> {
        match self {
            LevelSequence::Constant(c) if *c > 0.0 => Some(0.0),
            LevelSequence::PowerDecay {
                coefficient,
                exponent,
            } if *coefficient > 0.0 => Some(*exponent),
            _ => None,
        }
    }

    pub fn ensure_horizon(&self, n: usize) -> Result<(), ScheduleError> {
        match self {
            LevelSequence::Table(values) if values.len() <= n => {
                Err(ScheduleError::TableExhausted {
                    index: n,
                    len: values.len(),
                })
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    SatisfiedSymbolically,
    TrendsToZeroNumerically,
    Violated { first_violating_index: usize },
}

impl Verdict {
    pub fn is_satisfied(&self) -> bool {
        !matches!(self, Verdict::Violated { .. })
    }
}

/// Validator outcome for one condition: the checked horizon, a downsampled
/// trace of the limiting quantity, and the verdict.
#[derive(Debug, Clone)]
pub struct ScheduleReport {
    pub condition: String,
    pub horizon: usize,
    pub trace: Vec<(usize, f64)>,
    pub verdict: Verdict,
    pub note: Option<String>,
    pub certified_rho: Option<f64>,
}

/// Default horizon for numeric traces.
pub const DEFAULT_HORIZON: usize = 100_000;

const TRACE_POINTS: usize = 256;

fn downsample(values: &[f64]) -> Vec<(usize, f64)> {
    let n = values.len();
    if n <= TRACE_POINTS {
        return values.iter().cloned().enumerate().collect();
    }
    let stride = n / TRACE_POINTS;
    let mut out: Vec<(usize, f64)> = values.iter().cloned().enumerate().step_by(stride).collect();
    if out.last().map(|&(i, _)| i) != Some(n - 1) {
        out.push((n - 1, values[n - 1]));
    }
    out
}

/// Operational vanishing check: the last decade of the horizon must be
/// monotonically nonincreasing (tiny relative slack) and either end below 1%
/// of the initial value or keep shrinking across the decade by at least 10%
/// (a power-law decrease that extrapolates to zero; slow decays like
/// (n+1)^(-1/4) are still above 1% of their start at any practical horizon).
/// Returns the first violating index on failure.
fn trends_to_zero(values: &[f64]) -> Result<(), usize> {
    let n = values.len();
    if n < 10 {
        return Err(0);
    }
    if values.iter().all(|v| *v == 0.0) {
        return Ok(());
    }
    let initial = if values[0] > 0.0 {
        values[0]
    } else {
        values.iter().cloned().fold(0.0, f64::max)
    };
    let start = n / 10;
    for i in start..n - 1 {
        if values[i + 1] > values[i] * (1.0 + 1e-12) + 1e-300 {
            return Err(i + 1);
        }
    }
    if values[n - 1] <= 1e-2 * initial || values[n - 1] <= 0.9 * values[start] {
        Ok(())
    } else {
        Err(n - 1)
    }
}

fn report_vanishing(
    condition: &str,
    values: Vec<f64>,
    symbolic: Option<Result<(), usize>>,
    note: Option<String>,
) -> ScheduleReport {
    let horizon = values.len().saturating_sub(1);
    let verdict = match symbolic {
        Some(Ok(())) => Verdict::SatisfiedSymbolically,
        Some(Err(idx)) => Verdict::Violated {
            first_violating_index: idx,
        },
        None => match trends_to_zero(&values) {
            Ok(()) => Verdict::TrendsToZeroNumerically,
            Err(idx) => Verdict::Violated {
                first_violating_index: idx,
            },
        },
    };
    ScheduleReport {
        condition: condition.to_string(),
        horizon,
        trace: downsample(&values),
        verdict,
        note,
        certified_rho: None,
    }
}

/// Exponent multiplier s_p with h_X(tau) ~ tau^(s_p) and the phi-inverse
/// exponent: phi_R^{-1}(u) ~ u^(phi_e).
fn branch_exponents(space: &SpaceSpec) -> (f64, f64) {
    match space.kind() {
        SpaceKind::Hilbert => (1.0, 0.5),
        SpaceKind::Lp { p } if p >= 2.0 => (1.0, 1.0 / p),
        SpaceKind::Lp { p } => (p - 1.0, 0.5),
    }
}

/// Checks the implicit-method conditions: i) alpha_n -> 0 and gamma_n -> inf;
/// ii) gamma_n |alpha_{n+1} - alpha_n| / alpha_n^2 -> 0 and sum alpha_n /
/// gamma_n divergent; iii) h_X(tau_n) phi_R^{-1}(R1 alpha_n) / alpha_n -> 0
/// with R1 = 3 R^2 / 2 and tau_n = 1/gamma_n.
pub fn validate_implicit(
    space: &SpaceSpec,
    alpha: &Schedule,
    gamma: &Schedule,
    r: f64,
    n_max: usize,
) -> Result<Vec<ScheduleReport>, ScheduleError> {
    assert!(r > 0.0, "validate_implicit: R must be positive");
    assert!(n_max >= 100, "validate_implicit: N_max must be at least 100");
    alpha.ensure_horizon(n_max)?;
    gamma.ensure_horizon(n_max)?;

    let alphas: Vec<f64> = (0..=n_max).map(|n| alpha.value(n)).collect();
    let gammas: Vec<f64> = (0..=n_max).map(|n| gamma.value(n)).collect();
    let pow = alpha.power().zip(gamma.power());
    let mut reports = Vec::with_capacity(3);

    // i) alpha -> 0, gamma -> inf; trace max(alpha_n, 1/gamma_n).
    {
        let values: Vec<f64> = alphas
            .iter()
            .zip(gammas.iter())
            .map(|(&a, &g)| a.max(1.0 / g))
            .collect();
        let symbolic = pow.map(|((_, ea), (_, eg))| {
            if ea < 0.0 && eg > 0.0 {
                Ok(())
            } else {
                Err(0)
            }
        });
        reports.push(report_vanishing(
            "i: alpha_n -> 0 and gamma_n -> +inf",
            values,
            symbolic,
            None,
        ));
    }

    // ii) gamma_n |d alpha| / alpha^2 -> 0 and sum alpha/gamma = +inf.
    {
        let values: Vec<f64> = (0..n_max)
            .map(|n| gammas[n] * (alphas[n + 1] - alphas[n]).abs() / (alphas[n] * alphas[n]))
            .collect();
        let symbolic = pow.map(|((_, ea), (_, eg))| {
            let k = -ea;
            let g = eg;
            let damped = k == 0.0 || g + k < 1.0;
            let divergent = k + g <= 1.0;
            if damped && divergent {
                Ok(())
            } else {
                Err(0)
            }
        });
        let note = match pow {
            Some(_) => Some("divergence of sum alpha_n/gamma_n decided by exponent arithmetic".into()),
            None => Some(
                "divergence of sum alpha_n/gamma_n checked heuristically (n * alpha_n/gamma_n not vanishing)"
                    .into(),
            ),
        };
        let mut report = report_vanishing(
            "ii: gamma_n |alpha_{n+1}-alpha_n| / alpha_n^2 -> 0 and sum alpha_n/gamma_n = +inf",
            values,
            symbolic,
            note,
        );
        if pow.is_none() && report.verdict.is_satisfied() {
            // Heuristic divergence check for tables: n * a_n must not die off.
            let probe = |n: usize| (n + 1) as f64 * alphas[n] / gammas[n];
            if probe(n_max) < 0.5 * probe(n_max / 10) {
                report.verdict = Verdict::Violated {
                    first_violating_index: n_max,
                };
            }
        }
        reports.push(report);
    }

    // iii) h_X(tau_n) phi_R^{-1}(R1 alpha_n) / alpha_n -> 0.
    {
        let r1 = 1.5 * r * r;
        let values: Vec<f64> = (0..=n_max)
            .map(|n| {
                let tau = 1.0 / gammas[n];
                space.smoothness_ratio(tau) * space.phi_inverse_function(r, r1 * alphas[n])
                    / alphas[n]
            })
            .collect();
        let (s_p, phi_e) = branch_exponents(space);
        let symbolic = pow.map(|((_, ea), (_, eg))| {
            let k = -ea;
            let g = eg;
            let exponent = -(g * s_p) - k * phi_e + k;
            if exponent < 0.0 {
                Ok(())
            } else {
                Err(0)
            }
        });
        reports.push(report_vanishing(
            "iii: h_X(tau_n) phi_R^{-1}(R1 alpha_n) / alpha_n -> 0",
            values,
            symbolic,
            Some("uses modulus upper bounds; Satisfied is conservative".into()),
        ));
    }

    Ok(reports)
}

/// Checks the explicit-method conditions: tau_n <= d and
/// rho_X(tau_n)/(tau_n alpha_n) <= d^2 for all n, plus the four limit
/// conditions sum alpha_n tau_n = +inf, tau_n/alpha_n -> 0,
/// |alpha_n - alpha_{n+1}|/(tau_n alpha_n^2) -> 0, and
/// rho_X(tau_n)/(tau_n alpha_n) -> 0.
pub fn validate_explicit(
    space: &SpaceSpec,
    alpha: &Schedule,
    gamma: &Schedule,
    d: f64,
    n_max: usize,
) -> Result<Vec<ScheduleReport>, ScheduleError> {
    assert!(d > 0.0 && d < 1.0, "validate_explicit: d must lie in (0, 1)");
    assert!(n_max >= 100, "validate_explicit: N_max must be at least 100");
    alpha.ensure_horizon(n_max)?;
    gamma.ensure_horizon(n_max)?;

    let alphas: Vec<f64> = (0..=n_max).map(|n| alpha.value(n)).collect();
    let taus: Vec<f64> = (0..=n_max).map(|n| 1.0 / gamma.value(n)).collect();
    let pow = alpha.power().zip(gamma.power());
    let (s_p, _) = branch_exponents(space);
    let mut reports = Vec::with_capacity(6);

    let bounded_report = |condition: &str, values: Vec<f64>, bound: f64, tail_exponent: Option<f64>| {
        let first_violation = values.iter().position(|v| *v > bound);
        let verdict = match first_violation {
            Some(idx) => Verdict::Violated {
                first_violating_index: idx,
            },
            None => match tail_exponent {
                Some(e) if e <= 0.0 => Verdict::SatisfiedSymbolically,
                Some(_) => Verdict::Violated {
                    first_violating_index: values.len(),
                },
                None => Verdict::TrendsToZeroNumerically,
            },
        };
        let note = match tail_exponent {
            Some(_) => None,
            None => Some("bound checked over the horizon only (table schedule)".into()),
        };
        ScheduleReport {
            condition: condition.to_string(),
            horizon: values.len() - 1,
            trace: downsample(&values),
            verdict,
            note,
            certified_rho: None,
        }
    };

    // (a) tau_n <= d for all n.
    reports.push(bounded_report(
        "tau_n <= d",
        taus.clone(),
        d,
        pow.map(|((_, _), (_, eg))| -eg),
    ));

    // (b) rho_X(tau_n) / (tau_n alpha_n) <= d^2 for all n.
    let smoothness: Vec<f64> = (0..=n_max)
        .map(|n| space.smoothness_ratio(taus[n]) / alphas[n])
        .collect();
    reports.push(bounded_report(
        "rho_X(tau_n) / (tau_n alpha_n) <= d^2",
        smoothness.clone(),
        d * d,
        pow.map(|((_, ea), (_, eg))| -(eg * s_p) - ea),
    ));

    // (c) sum alpha_n tau_n = +inf.
    {
        let values: Vec<f64> = (0..=n_max).map(|n| alphas[n] * taus[n]).collect();
        let (verdict, note) = match pow {
            Some(((_, ea), (_, eg))) => {
                let total = -ea + eg; // alpha tau ~ (n+1)^(-total)
                if total <= 1.0 {
                    (Verdict::SatisfiedSymbolically, None)
                } else {
                    (
                        Verdict::Violated {
                            first_violating_index: 0,
                        },
                        Some("series converges (p-series exponent > 1)".into()),
                    )
                }
            }
            None => {
                let probe = |n: usize| (n + 1) as f64 * alphas[n] * taus[n];
                if probe(n_max) >= 0.5 * probe(n_max / 10) {
                    (
                        Verdict::TrendsToZeroNumerically,
                        Some("heuristic divergence check (n * alpha_n tau_n not vanishing)".into()),
                    )
                } else {
                    (
                        Verdict::Violated {
                            first_violating_index: n_max,
                        },
                        Some("heuristic divergence check failed".into()),
                    )
                }
            }
        };
        reports.push(ScheduleReport {
            condition: "sum alpha_n tau_n = +inf".into(),
            horizon: n_max,
            trace: downsample(&values),
            verdict,
            note,
            certified_rho: None,
        });
    }

    // (d) tau_n / alpha_n -> 0.
    {
        let values: Vec<f64> = (0..=n_max).map(|n| taus[n] / alphas[n]).collect();
        let symbolic = pow.map(|((_, ea), (_, eg))| if -eg - ea < 0.0 { Ok(()) } else { Err(0) });
        reports.push(report_vanishing("tau_n / alpha_n -> 0", values, symbolic, None));
    }

    // (e) |alpha_n - alpha_{n+1}| / (tau_n alpha_n^2) -> 0.
    {
        let values: Vec<f64> = (0..n_max)
            .map(|n| (alphas[n] - alphas[n + 1]).abs() / (taus[n] * alphas[n] * alphas[n]))
            .collect();
        let symbolic = pow.map(|((_, ea), (_, eg))| {
            let k = -ea;
            if k == 0.0 || eg + k < 1.0 {
                Ok(())
            } else {
                Err(0)
            }
        });
        reports.push(report_vanishing(
            "|alpha_n - alpha_{n+1}| / (tau_n alpha_n^2) -> 0",
            values,
            symbolic,
            None,
        ));
    }

    // (f) rho_X(tau_n) / (tau_n alpha_n) -> 0.
    {
        let symbolic = pow.map(|((_, ea), (_, eg))| {
            if -(eg * s_p) - ea < 0.0 {
                Ok(())
            } else {
                Err(0)
            }
        });
        reports.push(report_vanishing(
            "rho_X(tau_n) / (tau_n alpha_n) -> 0",
            smoothness,
            symbolic,
            Some("uses modulus upper bounds; Satisfied is conservative".into()),
        ));
    }

    Ok(reports)
}

/// Checks the Newton schedule condition alpha_n > 0, alpha_n -> 0,
/// 1 <= alpha_n / alpha_{n+1} <= rho, and certifies the tightest rho over the
/// horizon. For a power law (n+1)^(-k) the symbolic certificate is rho = 2^k
/// (the ratio is maximal at n = 0).
pub fn validate_newton(alpha: &Schedule, n_max: usize) -> Result<ScheduleReport, ScheduleError> {
    assert!(n_max >= 2, "validate_newton: N_max must be at least 2");
    alpha.ensure_horizon(n_max)?;
    let ratios: Vec<f64> = (0..n_max)
        .map(|n| alpha.value(n) / alpha.value(n + 1))
        .collect();

    let (rho, verdict, note) = match alpha.power() {
        Some((_, e)) => {
            let k = -e;
            let rho = 2f64.powf(k);
            if k > 0.0 {
                (rho, Verdict::SatisfiedSymbolically, Some("rho certified as 2^k".into()))
            } else {
                (
                    rho,
                    Verdict::Violated {
                        first_violating_index: 0,
                    },
                    Some("alpha_n does not tend to zero".into()),
                )
            }
        }
        None => {
            let rho = ratios.iter().cloned().fold(1.0f64, f64::max);
            if let Some(idx) = ratios.iter().position(|r| *r < 1.0 - 1e-14) {
                (
                    rho,
                    Verdict::Violated {
                        first_violating_index: idx,
                    },
                    Some("ratio alpha_n/alpha_{n+1} dropped below 1 (increasing alpha)".into()),
                )
            } else {
                let alphas: Vec<f64> = (0..=n_max).map(|n| alpha.value(n)).collect();
                match trends_to_zero(&alphas) {
                    Ok(()) => (rho, Verdict::TrendsToZeroNumerically, None),
                    Err(idx) => (
                        rho,
                        Verdict::Violated {
                            first_violating_index: idx,
                        },
                        Some("alpha_n does not trend to zero over the horizon".into()),
                    ),
                }
            }
        }
    };
    Ok(ScheduleReport {
        condition: "alpha_n > 0, alpha_n -> 0, 1 <= alpha_n/alpha_{n+1} <= rho".into(),
        horizon: n_max,
        trace: downsample(&ratios),
        verdict,
        note,
        certified_rho: Some(rho),
    })
}

/// Checks the noisy coupling condition (h_n + delta_n) / alpha_n -> 0.
pub fn validate_noisy_coupling(
    alpha: &Schedule,
    h: &LevelSequence,
    delta: &LevelSequence,
    n_max: usize,
) -> Result<ScheduleReport, ScheduleError> {
    alpha.ensure_horizon(n_max)?;
    h.ensure_horizon(n_max)?;
    delta.ensure_horizon(n_max)?;
    let values: Vec<f64> = (0..=n_max)
        .map(|n| (h.value(n) + delta.value(n)) / alpha.value(n))
        .collect();

    if h.is_identically_zero() && delta.is_identically_zero() {
        return Ok(ScheduleReport {
            condition: "(h_n + delta_n) / alpha_n -> 0".into(),
            horizon: n_max,
            trace: downsample(&values),
            verdict: Verdict::SatisfiedSymbolically,
            note: Some("zero noise".into()),
            certified_rho: None,
        });
    }

    let symbolic = alpha.power().and_then(|(_, ea)| {
        let k = -ea;
        let numerator_decay = match (h.decay_exponent(), delta.decay_exponent()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (Some(a), None) if delta.is_identically_zero() => Some(a),
            (None, Some(b)) if h.is_identically_zero() => Some(b),
            _ => None,
        }?;
        Some(if numerator_decay > k { Ok(()) } else { Err(0) })
    });
    Ok(report_vanishing(
        "(h_n + delta_n) / alpha_n -> 0",
        values,
        symbolic,
        None,
    ))
}

pub const PRESET_NAMES: [&str; 3] = ["example4-hilbert", "example5-lp", "example6-lp"];

/// Named schedule presets: alpha_n = (n+1)^(-k) with k in (0, 1/2) (default
/// 1/4) paired with gamma_n = (n+1)^(1/2). The three names target Hilbert,
/// l^p with p >= 2, and l^p with 1 < p < 2 respectively; for the last one the
/// validator additionally requires k < p - 1.
pub fn preset(name: &str, k: Option<f64>) -> Result<(Schedule, Schedule), ScheduleError> {
    let k = k.unwrap_or(0.25);
    if !(k > 0.0 && k < 0.5) {
        return Err(ScheduleError::InvalidParameter(format!(
            "preset exponent k must lie in (0, 1/2), got {k}"
        )));
    }
    if !PRESET_NAMES.contains(&name) {
        return Err(ScheduleError::UnknownPreset {
            name: name.to_string(),
            available: PRESET_NAMES.to_vec(),
        });
    }
    Ok((Schedule::power_alpha(1.0, k)?, Schedule::power_gamma(1.0, 0.5)?))
}
