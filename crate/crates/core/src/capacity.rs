//! The quantitative inequality network as a certificate engine.
//!
//! Every operation returns a *certificate* — a value together with the
//! hypothesis list it depends on — or an explicit `NotApplicable` when a
//! hypothesis fails. Bounds are collected into a ledger keyed by quantity
//! name; the ledger reports any lower bound exceeding an upper bound as a
//! contradiction carrying both provenance notes.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exponent::Exponent;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CapacityError {
    #[error("precondition violated: {what}")]
    Precondition { what: String },
    #[error("inconsistent measurement series: {what}")]
    InconsistentSeries { what: String },
    #[error("Hofer bound violated at k = {k}: -c_k = {lhs} > k * length = {rhs}")]
    HoferBoundViolated { k: u64, lhs: Exponent, rhs: Exponent },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Lower,
    Upper,
    Exact,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundKind::Lower => write!(f, "lower"),
            BoundKind::Upper => write!(f, "upper"),
            BoundKind::Exact => write!(f, "exact"),
        }
    }
}

/// A bound with the hypotheses it rests on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub kind: BoundKind,
    pub value: Exponent,
    pub hypotheses: Vec<String>,
}

/// Outcome of a conditional bound: a certificate, or an explicit refusal
/// naming the failed hypothesis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Applicability {
    Applicable(Certificate),
    NotApplicable { reason: String },
}

impl Applicability {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Applicability::Applicable(c) => Some(c),
            Applicability::NotApplicable { .. } => None,
        }
    }
}

/// Lagrangian control: when `β + E₊ - E₋ < ℏ` strictly, the spectral
/// invariant is at least `E₋`. Preconditions `β >= 0`, `ℏ > 0` are hard
/// errors; the strict inequality failing is `NotApplicable`.
pub fn lagrangian_control_bound(
    beta: &Exponent,
    e_plus: &Exponent,
    e_minus: &Exponent,
    hbar: &Exponent,
) -> Result<Applicability, CapacityError> {
    if beta.is_negative() {
        return Err(CapacityError::Precondition {
            what: format!("boundary depth {beta} is negative"),
        });
    }
    if !hbar.is_positive() {
        return Err(CapacityError::Precondition {
            what: format!("disk area bound {hbar} is not positive"),
        });
    }
    let slack = &(&(beta + e_plus) - e_minus);
    if *slack < *hbar {
        Ok(Applicability::Applicable(Certificate {
            kind: BoundKind::Lower,
            value: e_minus.clone(),
            hypotheses: vec![
                format!("beta + E+ - E- = {slack} < hbar = {hbar} (strict)"),
                format!("beta = {beta} >= 0"),
            ],
        }))
    } else {
        Ok(Applicability::NotApplicable {
            reason: format!("beta + E+ - E- = {slack} >= hbar = {hbar}"),
        })
    }
}

/// A non-interfering pair of Lagrangians with disk-area bounds `h1`, `h2`
/// forces spectral norm at least `2 min(h1, h2)`.
pub fn pair_diameter_bound(
    h1: &Exponent,
    h2: &Exponent,
) -> Result<Certificate, CapacityError> {
    if !h1.is_positive() || !h2.is_positive() {
        return Err(CapacityError::Precondition {
            what: format!("disk area bounds must be positive, got {h1} and {h2}"),
        });
    }
    let min = h1.clone().min(h2.clone());
    Ok(Certificate {
        kind: BoundKind::Lower,
        value: &Exponent::from_int(2) * &min,
        hypotheses: vec![
            "the two Lagrangians admit non-interfering neighborhoods".into(),
            format!("min(h1, h2) = {min}"),
        ],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Obstruction {
    Obstructed,
    UnobstructedByThisTest,
}

/// Ball-embedding test: a product Lagrangian with `ℏ >= 1/2` cannot be
/// moved into the unit ball (the norm of the ball is 1, and the theorem
/// requires `ℏ < 1/2` strictly).
pub fn ball_embedding_obstruction(h_product: &Exponent) -> Result<Obstruction, CapacityError> {
    if !h_product.is_positive() {
        return Err(CapacityError::Precondition {
            what: format!("disk area bound {h_product} is not positive"),
        });
    }
    if *h_product >= Exponent::ratio(1, 2) {
        Ok(Obstruction::Obstructed)
    } else {
        Ok(Obstruction::UnobstructedByThisTest)
    }
}

/// Split almost complex structures give
/// `ℏ(L₁ × L₂) >= min(ℏ(L₁), ℏ(L₂))`.
pub fn split_product_lower_bound(h1: &Exponent, h2: &Exponent) -> Exponent {
    h1.clone().min(h2.clone())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DepthConclusion {
    Bound(Certificate),
    NoConclusion,
}

/// Finite spectral capacity forces boundary depth at least the disk-area
/// bound of any Lagrangian in the set.
pub fn depth_from_finite_capacity(
    capacity_is_finite: bool,
    hbar: &Exponent,
) -> Result<DepthConclusion, CapacityError> {
    if !hbar.is_positive() {
        return Err(CapacityError::Precondition {
            what: format!("disk area bound {hbar} is not positive"),
        });
    }
    if capacity_is_finite {
        Ok(DepthConclusion::Bound(Certificate {
            kind: BoundKind::Lower,
            value: hbar.clone(),
            hypotheses: vec!["the spectral capacity of the set is finite".into()],
        }))
    } else {
        Ok(DepthConclusion::NoConclusion)
    }
}

/// The spectral norm of an isotopy: the invariant of the generating system
/// plus the invariant of its inverse-generating system.
pub fn spectral_norm(c_forward: &Exponent, c_backward: &Exponent) -> Exponent {
    c_forward + c_backward
}

/// Same sum, checked nonnegative — valid whenever the two inputs really
/// come from a generating system and its inverse.
pub fn spectral_norm_of_pair(
    c_forward: &Exponent,
    c_backward: &Exponent,
) -> Result<Exponent, CapacityError> {
    let norm = spectral_norm(c_forward, c_backward);
    if norm.is_negative() {
        return Err(CapacityError::Precondition {
            what: format!("spectral norm {norm} of a valid pair cannot be negative"),
        });
    }
    Ok(norm)
}

/// Energy-capacity chain: the spectral invariant is at most the stable
/// displacement energy plus any positive slack; zero energy pins the
/// capacity to zero exactly.
pub fn energy_capacity_upper_bound(
    sde: &Exponent,
    epsilon: &Exponent,
) -> Result<Certificate, CapacityError> {
    if sde.is_negative() {
        return Err(CapacityError::Precondition {
            what: format!("displacement energy {sde} is negative"),
        });
    }
    if !epsilon.is_positive() {
        return Err(CapacityError::Precondition {
            what: format!("slack {epsilon} must be positive"),
        });
    }
    if sde.is_zero() {
        return Ok(Certificate {
            kind: BoundKind::Exact,
            value: Exponent::zero(),
            hypotheses: vec![
                "stable displacement energy is zero".into(),
                "c <= epsilon for every positive epsilon, and c >= 0".into(),
            ],
        });
    }
    Ok(Certificate {
        kind: BoundKind::Upper,
        value: sde + epsilon,
        hypotheses: vec![format!("c <= sde + epsilon = {sde} + {epsilon}")],
    })
}

// --- homogenized measurement ----------------------------------------------

/// Samples of the spectral invariant of mean-normalized iterates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasurementSeries {
    /// `(k, c_k)` with strictly increasing positive `k`.
    pub samples: Vec<(u64, Exponent)>,
    /// Time integral of the mean of the generating function.
    pub mean_integral: Exponent,
    /// Hofer length of the isotopy, when declared.
    pub hofer_length: Option<Exponent>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasurementCertificate {
    /// Consecutive difference slopes all agree: the limit slope is exact.
    Exact,
    /// Slopes settle within the declared tolerance.
    Estimated { tolerance: Exponent },
}

#[derive(Clone, Debug, Serialize)]
pub struct Measurement {
    pub value: Exponent,
    pub certificate: MeasurementCertificate,
    /// Whether the Hofer bound `-c_k <= k * length` was asserted.
    pub hofer_checked: bool,
}

/// Homogenized measurement `m = mean_integral - lim c_k / k`, the limit
/// estimated by the last difference slope. An affine series (constant
/// difference slopes, bounded series included with slope zero) certifies
/// the limit exactly; otherwise the slopes must settle within the declared
/// tolerance. When a Hofer length is declared, asserts `-c_k <= k * length`
/// for every sample.
pub fn homogenized_measurement(
    series: &MeasurementSeries,
    tolerance: Option<&Exponent>,
) -> Result<Measurement, CapacityError> {
    if series.samples.len() < 2 {
        return Err(CapacityError::Precondition {
            what: "need at least two samples".into(),
        });
    }
    for w in series.samples.windows(2) {
        if w[0].0 >= w[1].0 {
            return Err(CapacityError::Precondition {
                what: format!("iteration counts must strictly increase: {} then {}", w[0].0, w[1].0),
            });
        }
    }
    if series.samples[0].0 == 0 {
        return Err(CapacityError::Precondition {
            what: "iteration counts must be positive".into(),
        });
    }

    let slopes: Vec<Exponent> = series
        .samples
        .windows(2)
        .map(|w| {
            let dk = Exponent::from_int((w[1].0 - w[0].0) as i64);
            &(&w[1].1 - &w[0].1) / &dk
        })
        .collect();
    let last = slopes.last().expect("at least one slope").clone();
    let affine = slopes.iter().all(|s| *s == last);
    let certificate = if affine {
        MeasurementCertificate::Exact
    } else {
        match tolerance {
            Some(tol) => {
                let worst = slopes
                    .iter()
                    .map(|s| (s - &last).abs())
                    .max()
                    .expect("nonempty");
                if worst <= *tol {
                    MeasurementCertificate::Estimated {
                        tolerance: tol.clone(),
                    }
                } else {
                    return Err(CapacityError::InconsistentSeries {
                        what: format!(
                            "difference slopes deviate by {worst}, beyond the declared tolerance {tol}"
                        ),
                    });
                }
            }
            None => {
                return Err(CapacityError::InconsistentSeries {
                    what: "difference slopes disagree and no tolerance was declared".into(),
                })
            }
        }
    };

    let value = &series.mean_integral - &last;

    let mut hofer_checked = false;
    if let Some(length) = &series.hofer_length {
        for (k, c_k) in &series.samples {
            let lhs = -c_k;
            let rhs = &Exponent::from_int(*k as i64) * length;
            if lhs > rhs {
                return Err(CapacityError::HoferBoundViolated {
                    k: *k,
                    lhs,
                    rhs,
                });
            }
        }
        if value > *length {
            return Err(CapacityError::HoferBoundViolated {
                k: 0,
                lhs: value,
                rhs: length.clone(),
            });
        }
        hofer_checked = true;
    }

    Ok(Measurement {
        value,
        certificate,
        hofer_checked,
    })
}

// --- the ledger -------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub name: String,
    pub kind: BoundKind,
    pub value: Exponent,
    #[serde(default)]
    pub hypotheses: Vec<String>,
    #[serde(default)]
    pub note: String,
}

/// A contradiction between two recorded bounds on the same quantity.
#[derive(Clone, Debug, Serialize)]
pub struct Contradiction {
    pub name: String,
    pub lower: LedgerEntry,
    pub upper: LedgerEntry,
}

/// Named exact quantities with their provenance. Single-writer while
/// built; immutable and shareable once complete.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CapacityLedger {
    pub entries: Vec<LedgerEntry>,
}

impl CapacityLedger {
    pub fn new() -> Self {
        CapacityLedger::default()
    }

    pub fn record(&mut self, entry: LedgerEntry) {
        self.entries.push(entry);
    }

    pub fn record_certificate(&mut self, name: &str, cert: &Certificate, note: &str) {
        self.entries.push(LedgerEntry {
            name: name.to_string(),
            kind: cert.kind,
            value: cert.value.clone(),
            hypotheses: cert.hypotheses.clone(),
            note: note.to_string(),
        });
    }

    /// All pairs of bounds that contradict each other: a lower (or exact)
    /// bound strictly above an upper (or exact) bound for the same name.
    pub fn contradictions(&self) -> Vec<Contradiction> {
        let mut by_name: BTreeMap<&str, Vec<&LedgerEntry>> = BTreeMap::new();
        for e in &self.entries {
            by_name.entry(&e.name).or_default().push(e);
        }
        let mut out = Vec::new();
        for (name, entries) in by_name {
            for lo in &entries {
                if lo.kind == BoundKind::Upper {
                    continue;
                }
                for hi in &entries {
                    if hi.kind == BoundKind::Lower {
                        continue;
                    }
                    if lo.value > hi.value {
                        out.push(Contradiction {
                            name: name.to_string(),
                            lower: (*lo).clone(),
                            upper: (*hi).clone(),
                        });
                    }
                }
            }
        }
        out
    }
}

// --- chain files -------------------------------------------------------------

/// A chain file: direct entries plus evaluation steps. Each step runs one
/// operation; applicable results are recorded under `record`, refusals
/// become events and never silent bounds.
#[derive(Clone, Debug, Deserialize)]
pub struct ChainFileDoc {
    #[serde(default)]
    pub entries: Vec<LedgerEntry>,
    #[serde(default)]
    pub steps: Vec<ChainStepDoc>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct ChainStepDoc {
    pub op: String,
    #[serde(default)]
    pub args: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub record: Option<String>,
    #[serde(default)]
    pub note: String,
}

/// Result of evaluating a chain file.
#[derive(Clone, Debug, Serialize)]
pub struct ChainEvaluation {
    pub ledger: CapacityLedger,
    pub events: Vec<String>,
    pub contradictions: Vec<Contradiction>,
}

impl ChainEvaluation {
    pub fn pass(&self) -> bool {
        self.contradictions.is_empty()
    }
}

fn arg_exponent(step: &ChainStepDoc, key: &str) -> Result<Exponent, CapacityError> {
    match step.args.get(key) {
        Some(serde_json::Value::String(s)) => {
            s.parse().map_err(|_| CapacityError::Precondition {
                what: format!("step {:?}: bad exponent {s:?} for {key}", step.op),
            })
        }
        Some(serde_json::Value::Number(n)) => {
            n.to_string().parse().map_err(|_| CapacityError::Precondition {
                what: format!("step {:?}: bad number for {key}", step.op),
            })
        }
        _ => Err(CapacityError::Precondition {
            what: format!("step {:?}: missing argument {key}", step.op),
        }),
    }
}

fn arg_bool(step: &ChainStepDoc, key: &str) -> Result<bool, CapacityError> {
    match step.args.get(key) {
        Some(serde_json::Value::Bool(b)) => Ok(*b),
        _ => Err(CapacityError::Precondition {
            what: format!("step {:?}: missing boolean {key}", step.op),
        }),
    }
}

/// Runs every step, collecting bounds and events, then checks consistency.
pub fn evaluate_chain_file(doc: &ChainFileDoc) -> Result<ChainEvaluation, CapacityError> {
    let mut ledger = CapacityLedger::new();
    let mut events = Vec::new();
    for entry in &doc.entries {
        ledger.record(entry.clone());
    }
    for step in &doc.steps {
        let name = step.record.clone().unwrap_or_else(|| step.op.clone());
        match step.op.as_str() {
            "lagrangian-control" => {
                let out = lagrangian_control_bound(
                    &arg_exponent(step, "beta")?,
                    &arg_exponent(step, "eplus")?,
                    &arg_exponent(step, "eminus")?,
                    &arg_exponent(step, "hbar")?,
                )?;
                match out {
                    Applicability::Applicable(cert) => {
                        ledger.record_certificate(&name, &cert, &step.note)
                    }
                    Applicability::NotApplicable { reason } => {
                        events.push(format!("{name}: not applicable: {reason}"))
                    }
                }
            }
            "pair-diameter" => {
                let cert = pair_diameter_bound(
                    &arg_exponent(step, "h1")?,
                    &arg_exponent(step, "h2")?,
                )?;
                ledger.record_certificate(&name, &cert, &step.note);
            }
            "ball-obstruction" => {
                let verdict = ball_embedding_obstruction(&arg_exponent(step, "h")?)?;
                events.push(format!("{name}: {verdict:?}"));
            }
            "depth-from-finite-capacity" => {
                match depth_from_finite_capacity(
                    arg_bool(step, "finite")?,
                    &arg_exponent(step, "hbar")?,
                )? {
                    DepthConclusion::Bound(cert) => {
                        ledger.record_certificate(&name, &cert, &step.note)
                    }
                    DepthConclusion::NoConclusion => {
                        events.push(format!("{name}: no conclusion"))
                    }
                }
            }
            "spectral-norm" => {
                let norm = spectral_norm_of_pair(
                    &arg_exponent(step, "forward")?,
                    &arg_exponent(step, "backward")?,
                )?;
                ledger.record(LedgerEntry {
                    name,
                    kind: BoundKind::Exact,
                    value: norm,
                    hypotheses: vec!["sum of the forward and backward invariants".into()],
                    note: step.note.clone(),
                });
            }
            "energy-capacity" => {
                let cert = energy_capacity_upper_bound(
                    &arg_exponent(step, "sde")?,
                    &arg_exponent(step, "epsilon")?,
                )?;
                ledger.record_certificate(&name, &cert, &step.note);
            }
            "measurement" => {
                let samples = match step.args.get("samples") {
                    Some(serde_json::Value::Array(rows)) => rows
                        .iter()
                        .map(|row| match row {
                            serde_json::Value::Array(kv) if kv.len() == 2 => {
                                let k = kv[0].as_u64().ok_or(CapacityError::Precondition {
                                    what: "bad sample index".into(),
                                })?;
                                let c: Exponent = kv[1]
                                    .as_str()
                                    .ok_or(CapacityError::Precondition {
                                        what: "bad sample value".into(),
                                    })?
                                    .parse()
                                    .map_err(|_| CapacityError::Precondition {
                                        what: "bad sample value".into(),
                                    })?;
                                Ok((k, c))
                            }
                            _ => Err(CapacityError::Precondition {
                                what: "samples must be [k, \"c\"] pairs".into(),
                            }),
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                    _ => {
                        return Err(CapacityError::Precondition {
                            what: "measurement needs samples".into(),
                        })
                    }
                };
                let series = MeasurementSeries {
                    samples,
                    mean_integral: arg_exponent(step, "mean_integral")?,
                    hofer_length: arg_exponent(step, "hofer_length").ok(),
                };
                let tolerance = arg_exponent(step, "tolerance").ok();
                let m = homogenized_measurement(&series, tolerance.as_ref())?;
                ledger.record(LedgerEntry {
                    name,
                    kind: BoundKind::Exact,
                    value: m.value,
                    hypotheses: vec![format!("certificate: {:?}", m.certificate)],
                    note: step.note.clone(),
                });
            }
            other => {
                return Err(CapacityError::Precondition {
                    what: format!("unknown chain operation {other:?}"),
                })
            }
        }
    }
    let contradictions = ledger.contradictions();
    Ok(ChainEvaluation {
        ledger,
        events,
        contradictions,
    })
}
