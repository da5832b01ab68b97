//! Vanishing and non-vanishing predictions for `R^i π_* Ω^p_Y(log E)` and
//! their evaluation on a concrete cone and resolution.
//!
//! For simplicial `σ` with `c = codim Z`:
//! `p < c` gives vanishing for all `i > 0`; `p ≥ c` gives vanishing for
//! `0 < i < c - 1` and `i > p - 1` and non-vanishing at `i = c - 1`.
//! For non-simplicial `σ` and `p = 1`, `R^1 ≠ 0` and `R^i = 0` for `i > 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::fans::{Fan, FanError};
use crate::koszul::{koszul_sweep, KoszulError};
use crate::polyhedra::{Codim, Cone};
use crate::toric_complexes::{
    assemble_degree_complex, experimental_ishida_cohomology, graded_cohomology, kp_crosscheck, nonvanishing_witness,
    p1_higher_image, ComplexKind, GradedCohomologyTable, ResolvedCone, ToricError,
};
use crate::Lattice;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Toric(#[from] ToricError),
    #[error("the fan is not smooth, so it is not a log resolution")]
    NotSmooth,
}

impl From<FanError> for VerifyError {
    fn from(e: FanError) -> Self {
        VerifyError::Toric(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Claim {
    MustVanish,
    MustNotVanish,
    NoClaim,
}

impl Claim {
    pub fn name(self) -> &'static str {
        match self {
            Claim::MustVanish => "must-vanish",
            Claim::MustNotVanish => "must-not-vanish",
            Claim::NoClaim => "no-claim",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prediction {
    pub p: usize,
    pub i: usize,
    pub claim: Claim,
    /// Which case of the vanishing statement produced the claim.
    pub clause: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionSet {
    pub simplicial: bool,
    pub c: Codim,
    pub rank: usize,
    pub p_max: usize,
    pub predictions: Vec<Prediction>,
    /// Empty index ranges and other bookkeeping.
    pub notes: Vec<String>,
}

impl PredictionSet {
    pub fn get(&self, p: usize, i: usize) -> Option<&Prediction> {
        self.predictions.iter().find(|x| x.p == p && x.i == i)
    }
}

/// Predictions for `1 <= p <= min(p_max, rank)` and `1 <= i <= rank`. When
/// `c = 1` an `i = 0` entry records that the degree-0 clause is out of scope.
pub fn predict(simplicial: bool, c: Codim, rank: usize, p_max: usize) -> PredictionSet {
    let mut predictions = Vec::new();
    let mut notes = Vec::new();
    if p_max > rank {
        notes.push(format!("p > {rank} gives Ω^p = 0; predictions stop at p = {rank}"));
    }
    for p in 1..=p_max.min(rank) {
        let mut push = |i, claim, clause| predictions.push(Prediction { p, i, claim, clause });
        match (simplicial, c) {
            (_, Codim::Infinite) => {
                for i in 1..=rank {
                    push(i, Claim::MustVanish, "isomorphism");
                }
            }
            (true, Codim::Finite(c)) if p < c => {
                for i in 1..=rank {
                    push(i, Claim::MustVanish, "simplicial, p < c");
                }
            }
            (true, Codim::Finite(c)) => {
                if c == 1 {
                    push(0, Claim::NoClaim, "simplicial, i = c - 1 = 0 is not a higher image");
                }
                for i in 1..=rank {
                    if i + 1 < c {
                        push(i, Claim::MustVanish, "simplicial, 0 < i < c - 1");
                    } else if i + 1 == c {
                        push(i, Claim::MustNotVanish, "simplicial, i = c - 1");
                    } else if i + 1 > p {
                        push(i, Claim::MustVanish, "simplicial, i > p - 1");
                    } else {
                        push(i, Claim::NoClaim, "simplicial, c - 1 < i <= p - 1");
                    }
                }
                if c <= 2 {
                    notes.push(format!("p = {p}: the range 0 < i < c - 1 is empty"));
                }
            }
            (false, _) if p == 1 => {
                push(1, Claim::MustNotVanish, "non-simplicial, p = 1, i = 1");
                for i in 2..=rank {
                    push(i, Claim::MustVanish, "non-simplicial, p = 1, i > 1");
                }
            }
            (false, _) => {
                for i in 1..=rank {
                    push(i, Claim::NoClaim, "non-simplicial, p >= 2");
                }
            }
        }
    }
    PredictionSet { simplicial, c, rank, p_max, predictions, notes }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Confirmed,
    ConfirmedOnBox,
    ConfirmedStructural,
    Refuted,
    Inconclusive,
    NoClaim,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Confirmed => "confirmed",
            Status::ConfirmedOnBox => "confirmed-on-box",
            Status::ConfirmedStructural => "confirmed-structural",
            Status::Refuted => "refuted",
            Status::Inconclusive => "inconclusive",
            Status::NoClaim => "no-claim",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Evidence {
    /// A degree and the dimension found there.
    pub witness: Option<(Lattice, usize)>,
    /// Total dimension over the enumerated box.
    pub box_total: Option<usize>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub prediction: Prediction,
    pub status: Status,
    pub evidence: Evidence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopDegreeCheck {
    Passed { total: usize },
    Failed { total: usize, witness: Lattice },
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrosscheckSummary {
    pub p: usize,
    pub degree_count: usize,
    pub nonzero_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictReport {
    pub predictions: PredictionSet,
    pub bound: u64,
    pub fan: Fan,
    pub strong: bool,
    pub verdicts: Vec<Verdict>,
    pub top_degree: TopDegreeCheck,
    pub crosschecks: Vec<CrosscheckSummary>,
    /// Every face of `σ` occurs as some `I_u` in the box.
    pub faces_exhausted: bool,
    /// `Some(true)` when the Koszul sweep up to the rank passed.
    pub koszul_backing: Option<bool>,
    /// Totals of the Ishida-shaped complex for non-simplicial `p >= 2`.
    pub experimental: BTreeMap<usize, GradedCohomologyTable>,
    pub notes: Vec<String>,
    pub internal_failures: Vec<String>,
}

impl VerdictReport {
    pub fn refuted(&self) -> usize {
        self.verdicts.iter().filter(|v| v.status == Status::Refuted).count()
    }

    /// `0` iff nothing was refuted and no internal check failed, else `1`.
    pub fn exit_code(&self) -> i32 {
        if self.refuted() == 0 && self.internal_failures.is_empty() {
            0
        } else {
            1
        }
    }
}

/// The table whose entries are `dim R^i π_* Ω^p_Y(log E)_u`.
fn higher_images(rc: &ResolvedCone, p: usize, bound: u64) -> Result<GradedCohomologyTable, ToricError> {
    if rc.sigma().is_simplicial() {
        graded_cohomology(rc, ComplexKind::Residue, p, bound)
    } else {
        p1_higher_image(rc, bound)
    }
}

fn first_nonzero(t: &GradedCohomologyTable, i: usize) -> Option<(Lattice, usize)> {
    t.entries.iter().find_map(|(u, h)| h.get(&i).map(|&d| (u.clone(), d)))
}

/// Runs the predictions against computed tables. Without a fan, a strong
/// resolution is attempted; if the strategy's result is not strong it is
/// used anyway and the report says so.
pub fn verify(sigma: &Cone, fan: Option<Fan>, p_max: usize, bound: u64) -> Result<VerdictReport, VerifyError> {
    let mut notes = Vec::new();
    let rc = match fan {
        Some(f) => ResolvedCone::new(sigma.clone(), f)?,
        None => match ResolvedCone::resolve(sigma.clone(), true) {
            Err(ToricError::Fan(FanError::StrongnessUnachieved { fan, .. })) => {
                notes.push("the computed resolution is not strong".to_string());
                ResolvedCone::new(sigma.clone(), *fan)?
            }
            other => other?,
        },
    };
    if !rc.profile().smooth {
        return Err(VerifyError::NotSmooth);
    }
    let n = sigma.ambient_rank();
    let simplicial = sigma.is_simplicial();
    let preds = predict(simplicial, rc.codim_z(), n, p_max);
    let mut internal_failures = Vec::new();

    let degrees = sigma.enumerate_degrees(bound).map_err(ToricError::from)?;
    let realized: BTreeSet<Vec<usize>> = degrees.iter().map(|u| sigma.vanishing_rays(u)).collect();
    let faces = sigma.face_lattice().map_err(ToricError::from)?;
    let faces_exhausted = faces.faces.iter().all(|f| realized.contains(&f.rays));
    if !faces_exhausted {
        notes.push(format!("the box of bound {bound} does not realize every face of the cone as some I_u"));
    }

    let koszul_backing = if simplicial {
        match koszul_sweep(n) {
            Ok(_) => Some(true),
            Err(KoszulError::LemmaViolation { spec, degree, dimension }) => {
                internal_failures.push(format!("Koszul sweep: {spec:?} has H^{degree} of dimension {dimension}"));
                Some(false)
            }
            Err(e) => {
                internal_failures.push(format!("Koszul sweep: {e}"));
                Some(false)
            }
        }
    } else {
        None
    };

    let mut crosschecks = Vec::new();
    let mut experimental = BTreeMap::new();
    let mut tables: BTreeMap<usize, GradedCohomologyTable> = BTreeMap::new();
    let p_top = p_max.min(n);
    for p in 1..=p_top {
        if simplicial {
            match kp_crosscheck(&rc, p, bound) {
                Ok(r) => crosschecks.push(CrosscheckSummary {
                    p,
                    degree_count: r.degree_count,
                    nonzero_pairs: r.nonzero.len(),
                }),
                Err(e @ (ToricError::CrosscheckFailure { .. } | ToricError::KernelBelowC { .. })) => {
                    internal_failures.push(format!("p = {p}: {e}"));
                }
                Err(e) => return Err(e.into()),
            }
            tables.insert(p, higher_images(&rc, p, bound)?);
        } else if p == 1 {
            tables.insert(p, higher_images(&rc, p, bound)?);
        } else {
            experimental.insert(p, experimental_ishida_cohomology(&rc, p, bound)?);
        }
    }

    let mut verdicts = Vec::new();
    for pred in &preds.predictions {
        let (p, i) = (pred.p, pred.i);
        let mut evidence = Evidence::default();
        let status = match pred.claim {
            Claim::NoClaim => Status::NoClaim,
            Claim::MustVanish => {
                let t = &tables[&p];
                let total = t.total(i);
                evidence.box_total = Some(total);
                if total > 0 {
                    evidence.witness = first_nonzero(t, i);
                    Status::Refuted
                } else if faces_exhausted && koszul_backing != Some(false) {
                    evidence.note = Some("every face of the cone occurs as I_u in the box".into());
                    Status::ConfirmedStructural
                } else {
                    Status::ConfirmedOnBox
                }
            }
            Claim::MustNotVanish if simplicial => match nonvanishing_witness(&rc, p) {
                Ok((j, u)) => {
                    let c = assemble_degree_complex(&rc, ComplexKind::Residue, p, &u)?;
                    let dim = c.cohomology_dims().get(&(i as i64)).copied().unwrap_or(0);
                    evidence.note = Some(format!("face {:?} is missing from the fan", one_based(&j)));
                    evidence.box_total = Some(tables[&p].total(i));
                    evidence.witness = Some((u, dim));
                    if dim > 0 {
                        Status::Confirmed
                    } else {
                        Status::Refuted
                    }
                }
                Err(e @ ToricError::WitnessSearchExhausted { .. }) => {
                    evidence.note = Some(e.to_string());
                    Status::Inconclusive
                }
                Err(e) => return Err(e.into()),
            },
            Claim::MustNotVanish => {
                let zero = vec![crate::Int::from(0); n];
                let dim = p1_higher_image(&rc, 0)?.get(&zero, 1);
                evidence.box_total = Some(tables[&p].total(i));
                evidence.witness = Some((zero, dim));
                if dim > 0 {
                    Status::Confirmed
                } else {
                    Status::Refuted
                }
            }
        };
        verdicts.push(Verdict { prediction: pred.clone(), status, evidence });
    }

    let top_degree = if n < 2 {
        TopDegreeCheck::Skipped { reason: "rank below 2".into() }
    } else {
        let t = match tables.get(&1) {
            Some(t) => t.clone(),
            None => higher_images(&rc, 1, bound)?,
        };
        let total = t.total(n - 1);
        match first_nonzero(&t, n - 1) {
            Some((u, _)) => TopDegreeCheck::Failed { total, witness: u },
            None => TopDegreeCheck::Passed { total },
        }
    };
    if let TopDegreeCheck::Failed { total, .. } = &top_degree {
        internal_failures.push(format!("R^{} of Ω^1(log E) has total {total} on the box", n - 1));
    }

    Ok(VerdictReport {
        strong: rc.profile().strong,
        fan: rc.fan().clone(),
        predictions: preds,
        bound,
        verdicts,
        top_degree,
        crosschecks,
        faces_exhausted,
        koszul_backing,
        experimental,
        notes,
        internal_failures,
    })
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}
