//! What-if transfer analysis across target programs, plus the pathway and
//! tuition-loss estimators.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::audit::{audit, AuditPolicy, AuditResult};
use crate::catalog::CatalogSnapshot;
use crate::equivalence::{receiving_transcript, translate_transcript, TranslationStatus};
use crate::error::{Error, PlanError};
use crate::ids::{CourseId, InstitutionId, NodeId, ProgramId};
use crate::model::{InstitutionKind, Program, Transcript};
use crate::planner::{generate_plan, select_completion_courses, CompletionSet, DegreePlan, PlanConstraints};
use crate::rational::Rational;

/// An amount of money in integer cents.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Cents(pub i64);

impl Cents {
    pub fn from_dollars(dollars: i64) -> Self {
        Cents(dollars * 100)
    }

    /// Rounds half away from zero.
    pub fn from_exact(value: Ratio<i128>) -> Self {
        Cents(value.round().to_integer() as i64)
    }
}

impl fmt::Display for Cents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let dollars = abs / 100;
        let digits = dollars.to_string();
        let mut grouped = String::new();
        for (i, ch) in digits.chars().enumerate() {
            if i > 0 && (digits.len() - i) % 3 == 0 {
                grouped.push(',');
            }
            grouped.push(ch);
        }
        f.pad(&format!("{sign}${grouped}.{:02}", abs % 100))
    }
}

fn exact(r: Rational) -> Ratio<i128> {
    Ratio::new(r.numer() as i128, r.denom() as i128)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostModel {
    pub annual_tuition_cc: Cents,
    pub annual_tuition_univ: Cents,
    pub credits_per_year: Rational,
    pub hours_per_pathway: Rational,
    pub work_hours_per_year: Rational,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            annual_tuition_cc: Cents::from_dollars(3_500),
            annual_tuition_univ: Cents::from_dollars(10_000),
            credits_per_year: Rational::integer(30),
            hours_per_pathway: Rational::integer(1),
            work_hours_per_year: Rational::integer(2_000),
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<(), String> {
        if self.annual_tuition_cc.0 <= 0 || self.annual_tuition_univ.0 <= 0 {
            return Err("tuition must be positive".into());
        }
        if !self.credits_per_year.is_positive()
            || !self.hours_per_pathway.is_positive()
            || !self.work_hours_per_year.is_positive()
        {
            return Err("credits_per_year, hours_per_pathway and work_hours_per_year must be positive".into());
        }
        Ok(())
    }

    pub fn annual_tuition(&self, kind: InstitutionKind) -> Cents {
        match kind {
            InstitutionKind::CommunityCollege => self.annual_tuition_cc,
            InstitutionKind::University => self.annual_tuition_univ,
        }
    }

    /// Cost of `credit_hours` at an institution of `kind`.
    pub fn cost_of(&self, credit_hours: Rational, kind: InstitutionKind) -> Cents {
        let tuition = Ratio::from_integer(self.annual_tuition(kind).0 as i128);
        Cents::from_exact(exact(credit_hours) * tuition / exact(self.credits_per_year))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferAnalysis {
    pub target_program_id: ProgramId,
    pub institution_id: InstitutionId,
    pub title: String,
    pub recognized_hours: Rational,
    pub applied_hours: Rational,
    pub unevaluated_count: usize,
    /// Source courses with no equivalence rule yet; students can request
    /// an evaluation for each.
    pub unevaluated_courses: Vec<CourseId>,
    pub unsatisfied_leaves: Vec<NodeId>,
    pub completion_courses: BTreeSet<CourseId>,
    pub completion_credit_hours: Rational,
    pub estimated_terms: u32,
    pub estimated_cost: Cents,
    pub plan: DegreePlan,
    /// False when any stage fell back to a heuristic.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetError {
    pub target_program_id: ProgramId,
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WhatifReport {
    /// Ranked closest-to-completion first.
    pub analyses: Vec<TransferAnalysis>,
    pub errors: Vec<TargetError>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WhatifOptions {
    pub cost_model: CostModel,
    pub constraints: PlanConstraints,
    pub policy: AuditPolicy,
}

/// Audit of a transcript against one program, after translating any
/// foreign records to the program's institution. Assignment indices refer
/// to `receiving_transcript`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramAudit {
    pub receiving_transcript: Transcript,
    #[serde(flatten)]
    pub result: AuditResult,
}

/// Courses still needed for a program and a schedule for them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramPlan {
    pub program_id: ProgramId,
    pub completion: CompletionSet,
    pub plan: DegreePlan,
}

pub fn audit_program(
    transcript: &Transcript,
    program_id: &ProgramId,
    snapshot: &CatalogSnapshot,
    policy: &AuditPolicy,
) -> Result<ProgramAudit, Error> {
    snapshot.check_transcript(transcript)?;
    let program = snapshot.program(program_id.as_str())?;
    let translated = translate_transcript(transcript, &program.institution_id, snapshot)?;
    let receiving = receiving_transcript(&translated, &program.institution_id);
    let result = audit(&receiving, program, policy)?;
    Ok(ProgramAudit {
        receiving_transcript: receiving,
        result,
    })
}

fn complete_and_plan(
    receiving: &Transcript,
    result: &AuditResult,
    program: &Program,
    snapshot: &CatalogSnapshot,
    constraints: &PlanConstraints,
) -> Result<(CompletionSet, DegreePlan), Error> {
    let completion = select_completion_courses(receiving, result, program, snapshot.catalog())?;
    let completed: BTreeSet<CourseId> = receiving
        .passed_courses()
        .difference(&completion.courses)
        .cloned()
        .collect();
    let plan = generate_plan(&completion.courses, &completed, constraints, snapshot.catalog())?;
    Ok((completion, plan))
}

pub fn plan_program(
    transcript: &Transcript,
    program_id: &ProgramId,
    snapshot: &CatalogSnapshot,
    constraints: &PlanConstraints,
    policy: &AuditPolicy,
) -> Result<ProgramPlan, Error> {
    let audited = audit_program(transcript, program_id, snapshot, policy)?;
    let program = snapshot.program(program_id.as_str())?;
    let (completion, plan) = complete_and_plan(
        &audited.receiving_transcript,
        &audited.result,
        program,
        snapshot,
        constraints,
    )?;
    Ok(ProgramPlan {
        program_id: program.id.clone(),
        completion,
        plan,
    })
}

/// Full pipeline for one target program.
pub fn analyze_target(
    transcript: &Transcript,
    target: &ProgramId,
    snapshot: &CatalogSnapshot,
    options: &WhatifOptions,
) -> Result<TransferAnalysis, Error> {
    let program = snapshot.program(target.as_str())?;
    let institution = &program.institution_id;
    let translated = translate_transcript(transcript, institution, snapshot)?;
    let recognized_hours: Rational = translated.iter().map(|t| t.recognized_credit_hours).sum();
    let unevaluated_courses: Vec<CourseId> = translated
        .iter()
        .filter(|t| t.status == TranslationStatus::Unevaluated)
        .filter_map(|t| t.source.course_id().cloned())
        .collect();
    let receiving = receiving_transcript(&translated, institution);
    let result = audit(&receiving, program, &options.policy)?;
    let (completion, plan) = complete_and_plan(&receiving, &result, program, snapshot, &options.constraints)?;
    let kind = snapshot
        .institution_kind(institution)
        .unwrap_or(InstitutionKind::University);
    Ok(TransferAnalysis {
        target_program_id: program.id.clone(),
        institution_id: institution.clone(),
        title: program.title.clone(),
        recognized_hours,
        applied_hours: result.applied_credit_hours,
        unevaluated_count: unevaluated_courses.len(),
        unevaluated_courses,
        unsatisfied_leaves: result.unsatisfied_leaves(program),
        estimated_terms: plan.terms.len() as u32,
        estimated_cost: options.cost_model.cost_of(completion.credit_hours, kind),
        exact: result.exact && completion.exact && plan.optimal,
        completion_credit_hours: completion.credit_hours,
        completion_courses: completion.courses,
        plan,
    })
}

/// Analyzes every target. Failing targets are reported, not fatal. With
/// `jobs > 1` targets are analyzed in parallel; the report is the same.
pub fn whatif(
    transcript: &Transcript,
    targets: &[ProgramId],
    snapshot: &CatalogSnapshot,
    options: &WhatifOptions,
    jobs: usize,
) -> Result<WhatifReport, Error> {
    options.constraints.validate()?;
    options.cost_model.validate().map_err(PlanError::InvalidConstraints)?;
    snapshot.check_transcript(transcript)?;
    let targets: Vec<ProgramId> = targets.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let run = |t: &ProgramId| analyze_target(transcript, t, snapshot, options);
    let outcomes: Vec<Result<TransferAnalysis, Error>> = if jobs > 1 && targets.len() > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(|| targets.par_iter().map(run).collect()),
            Err(_) => targets.iter().map(run).collect(),
        }
    } else {
        targets.iter().map(run).collect()
    };
    let mut analyses = Vec::new();
    let mut errors = Vec::new();
    for (target, outcome) in targets.iter().zip(outcomes) {
        match outcome {
            Ok(a) => analyses.push(a),
            Err(e) => errors.push(TargetError {
                target_program_id: target.clone(),
                code: e.code().to_string(),
                message: e.to_string(),
            }),
        }
    }
    Ok(WhatifReport {
        analyses: rank_programs(analyses),
        errors,
    })
}

/// Closest to completion first: fewest completion hours, then lowest cost,
/// then program id.
pub fn rank_programs(mut analyses: Vec<TransferAnalysis>) -> Vec<TransferAnalysis> {
    analyses.sort_by(|a, b| {
        a.completion_credit_hours
            .cmp(&b.completion_credit_hours)
            .then(a.estimated_cost.cmp(&b.estimated_cost))
            .then(a.target_program_id.cmp(&b.target_program_id))
    });
    analyses
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathwayScenario {
    pub num_ccs: u32,
    pub programs_per_cc: u32,
    pub targets_per_program: u32,
    pub num_universities: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathwayCount {
    pub per_university: u128,
    pub statewide: u128,
}

pub fn count_pathways(s: &PathwayScenario) -> PathwayCount {
    let per_university = s.num_ccs as u128 * s.programs_per_cc as u128 * s.targets_per_program as u128;
    PathwayCount {
        per_university,
        statewide: per_university * s.num_universities as u128,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffortEstimate {
    pub per_university: Rational,
    pub statewide: Rational,
}

/// Person-years needed to map `pathways` pathways.
pub fn person_years(pathways: u128, model: &CostModel) -> Rational {
    let pathways = i64::try_from(pathways).expect("pathway count fits in i64");
    Rational::integer(pathways) * model.hours_per_pathway / model.work_hours_per_year
}

pub fn estimate_effort(s: &PathwayScenario, model: &CostModel) -> EffortEstimate {
    let count = count_pathways(s);
    EffortEstimate {
        per_university: person_years(count.per_university, model),
        statewide: person_years(count.statewide, model),
    }
}

/// Pathway counts and the effort to map them, as reported to users.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathwayReport {
    pub scenario: PathwayScenario,
    pub pathways: PathwayCount,
    pub person_years: EffortEstimate,
}

pub fn pathway_report(s: &PathwayScenario, model: &CostModel) -> PathwayReport {
    PathwayReport {
        scenario: *s,
        pathways: count_pathways(s),
        person_years: estimate_effort(s, model),
    }
}

/// Inputs of the national tuition-loss estimate.
///
/// Each student who transfers at least once loses `lost_years_per_transfer`
/// once, and those who transfer twice lose it again, so the number of lost
/// years is `population * (once + twice) * lost_years`. A lost year costs
/// the blend of university and community-college tuition weighted by
/// `university_share`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossAssumptions {
    pub population: u64,
    pub transfer_once_rate: Rational,
    pub transfer_twice_rate: Rational,
    pub lost_years_per_transfer: Rational,
    #[serde(default = "half")]
    pub university_share: Rational,
    #[serde(default)]
    pub cost_model: CostModel,
}

fn half() -> Rational {
    Rational::new(1, 2)
}

impl LossAssumptions {
    /// 17 million undergraduates, 35% transferring at least once and 11%
    /// twice, one lost year per transfer, even university/college split at
    /// $10,000 and $3,500 a year.
    pub fn reference() -> Self {
        LossAssumptions {
            population: 17_000_000,
            transfer_once_rate: Rational::new(35, 100),
            transfer_twice_rate: Rational::new(11, 100),
            lost_years_per_transfer: Rational::integer(1),
            university_share: half(),
            cost_model: CostModel::default(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let unit = |r: Rational| !r.is_negative() && r <= Rational::integer(1);
        if !unit(self.transfer_once_rate) || !unit(self.transfer_twice_rate) || !unit(self.university_share) {
            return Err("rates and university_share must lie in [0, 1]".into());
        }
        if self.lost_years_per_transfer.is_negative() {
            return Err("lost_years_per_transfer must be non-negative".into());
        }
        self.cost_model.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LossEstimate {
    pub lost_student_years: Rational,
    pub blended_annual_tuition: Cents,
    pub total: Cents,
    pub assumptions: LossAssumptions,
}

/// Exact loss in cents before rounding.
pub fn national_loss_exact(a: &LossAssumptions) -> Ratio<i128> {
    let share = exact(a.university_share);
    let univ = Ratio::from_integer(a.cost_model.annual_tuition_univ.0 as i128);
    let cc = Ratio::from_integer(a.cost_model.annual_tuition_cc.0 as i128);
    let blended = share * univ + (Ratio::from_integer(1) - share) * cc;
    let years = Ratio::from_integer(a.population as i128)
        * (exact(a.transfer_once_rate) + exact(a.transfer_twice_rate))
        * exact(a.lost_years_per_transfer);
    years * blended
}

pub fn estimate_national_loss(a: &LossAssumptions) -> LossEstimate {
    let share = exact(a.university_share);
    let blended = share * Ratio::from_integer(a.cost_model.annual_tuition_univ.0 as i128)
        + (Ratio::from_integer(1) - share) * Ratio::from_integer(a.cost_model.annual_tuition_cc.0 as i128);
    let years = Ratio::from_integer(a.population as i128)
        * (exact(a.transfer_once_rate) + exact(a.transfer_twice_rate))
        * exact(a.lost_years_per_transfer);
    let years = Rational::new(
        i64::try_from(*years.numer()).unwrap_or(i64::MAX),
        i64::try_from(*years.denom()).unwrap_or(1),
    );
    LossEstimate {
        lost_student_years: years,
        blended_annual_tuition: Cents::from_exact(blended),
        total: Cents::from_exact(national_loss_exact(a)),
        assumptions: a.clone(),
    }
}
