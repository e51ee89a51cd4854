use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use articulate::analyzer::{estimate_national_loss, pathway_report, LossEstimate, PathwayReport};
use articulate::equivalence::TranslationStatus;
use articulate::planner::{PlanCheck, PlanCount};
use articulate::service::{self, AppState};
use articulate::{
    audit_program, check_plan_input, ingest_catalog, plan_count_report, plan_program, translate_transcript, whatif,
    CatalogDocument, CatalogSnapshot, CostModel, CourseCatalog, CourseId, DegreePlan, Error, ErrorClass, InstitutionId,
    LossAssumptions, PathwayScenario, PlanConstraints, ProgramAudit, ProgramId, ProgramPlan, Rational, Transcript,
    TranslatedRecord, WhatifOptions, WhatifReport,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Transfer-articulation engine: audits, what-if analysis, plans and
/// estimates.
#[derive(Debug, Parser)]
#[command(name = "articulate", version)]
struct Cli {
    /// Catalog directory.
    #[arg(long, global = true, env = "CATALOG_DIR")]
    catalog: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for what-if analysis.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Audit a transcript against one program.
    Audit {
        #[arg(long)]
        program: String,
        #[arg(long)]
        transcript: PathBuf,
    },
    /// Rank target programs by what it takes to finish them.
    Whatif {
        #[arg(long)]
        transcript: PathBuf,
        /// Comma-separated program ids. Defaults to every bachelor program.
        #[arg(long, value_delimiter = ',')]
        targets: Option<Vec<String>>,
        #[arg(long)]
        max_credits: Option<Rational>,
        #[arg(long)]
        terms: Option<u32>,
    },
    /// Completion courses and a term-by-term plan for one program.
    Plan {
        #[arg(long)]
        program: String,
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long)]
        max_credits: Option<Rational>,
        #[arg(long)]
        terms: Option<u32>,
    },
    /// Translate a transcript to a receiving institution.
    Translate {
        #[arg(long)]
        transcript: PathBuf,
        #[arg(long)]
        to: String,
    },
    /// Count transfer pathways and the effort to map them.
    CountPathways {
        #[arg(long)]
        ccs: u32,
        #[arg(long)]
        programs: u32,
        #[arg(long)]
        targets: u32,
        #[arg(long)]
        universities: u32,
        /// Work hours to map one pathway.
        #[arg(long, default_value = "1")]
        hours_per_pathway: Rational,
    },
    /// Count the distinct degree plans for a curriculum file.
    CountPlans {
        #[arg(long)]
        curriculum: PathBuf,
        #[arg(long)]
        terms: u32,
        /// Exact number of courses in every term.
        #[arg(long)]
        per_term: Option<u32>,
        #[arg(long)]
        max_credits: Option<Rational>,
    },
    /// National tuition loss under a set of assumptions.
    EstimateLoss {
        #[arg(long)]
        assumptions: PathBuf,
    },
    /// Check a plan file against the catalog.
    CheckPlan {
        #[arg(long)]
        plan: PathBuf,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
    },
}

/// Bad input files or flags; exits with the validation code.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct InputError(String);

fn input_err(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| input_err(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| input_err(format!("parsing {}: {e}", path.display())))
}

fn load_catalog(cli: &Cli) -> anyhow::Result<CatalogSnapshot> {
    let dir = cli
        .catalog
        .as_ref()
        .ok_or_else(|| input_err("--catalog (or CATALOG_DIR) is required for this command"))?;
    Ok(ingest_catalog(dir).map_err(Error::from)?)
}

fn constraints(max_credits: Option<Rational>, terms: Option<u32>) -> PlanConstraints {
    let mut c = PlanConstraints::default();
    if let Some(m) = max_credits {
        c.max_credits_per_term = m;
    }
    if let Some(t) = terms {
        c.num_terms = t;
    }
    c
}

enum Output {
    Audit(ProgramAudit),
    Whatif(WhatifReport),
    Plan(ProgramPlan),
    Translate(Vec<TranslatedRecord>),
    Pathways(PathwayReport),
    PlanCount(PlanCount),
    Loss(LossEstimate),
    Check(PlanCheck),
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("results serialize")
}

impl Output {
    fn to_json(&self) -> String {
        match self {
            Output::Audit(v) => json(v),
            Output::Whatif(v) => json(v),
            Output::Plan(v) => json(v),
            Output::Translate(v) => json(v),
            Output::Pathways(v) => json(v),
            Output::PlanCount(v) => json(v),
            Output::Loss(v) => json(v),
            Output::Check(v) => json(v),
        }
    }

    fn to_table(&self) -> String {
        let mut s = String::new();
        match self {
            Output::Audit(a) => {
                let r = &a.result;
                let _ = writeln!(s, "program         {}", r.program_id);
                let _ = writeln!(s, "applied hours   {}", r.applied_credit_hours);
                let _ = writeln!(s, "unapplied hours {}", r.unapplied_credit_hours);
                let _ = writeln!(s, "exact           {}", r.exact);
                let _ = writeln!(s);
                let _ = writeln!(s, "{:<28} STATUS", "REQUIREMENT");
                for (node, status) in &r.node_status {
                    let _ = writeln!(s, "{:<28} {}", node, json(status).trim_matches('"'));
                }
                if !r.assignment.is_empty() {
                    let _ = writeln!(s);
                    let _ = writeln!(s, "{:<28} APPLIED TO", "RECORD");
                    for (i, leaf) in r.assignment.iter() {
                        let rec = &a.receiving_transcript.records[i];
                        let name = rec
                            .course_id()
                            .map(|c| c.to_string())
                            .unwrap_or_else(|| format!("#{i}"));
                        let _ = writeln!(s, "{name:<28} {leaf}");
                    }
                }
            }
            Output::Whatif(w) => {
                let _ = writeln!(
                    s,
                    "{:<4} {:<20} {:<14} {:>10} {:>8} {:>11} {:>10} {:>6} {:>16}",
                    "RANK",
                    "PROGRAM",
                    "INSTITUTION",
                    "RECOGNIZED",
                    "APPLIED",
                    "UNEVALUATED",
                    "TO FINISH",
                    "TERMS",
                    "COST"
                );
                for (i, a) in w.analyses.iter().enumerate() {
                    let _ = writeln!(
                        s,
                        "{:<4} {:<20} {:<14} {:>10} {:>8} {:>11} {:>10} {:>6} {:>16}",
                        i + 1,
                        a.target_program_id,
                        a.institution_id,
                        a.recognized_hours,
                        a.applied_hours,
                        a.unevaluated_count,
                        a.completion_credit_hours,
                        a.estimated_terms,
                        a.estimated_cost
                    );
                }
                for a in &w.analyses {
                    for c in &a.unevaluated_courses {
                        let _ = writeln!(
                            s,
                            "note: {c} has not yet been evaluated by {}; request an evaluation",
                            a.institution_id
                        );
                    }
                }
                for e in &w.errors {
                    let _ = writeln!(s, "error: {}: {} ({})", e.target_program_id, e.message, e.code);
                }
            }
            Output::Plan(p) => {
                let _ = writeln!(s, "program      {}", p.program_id);
                let _ = writeln!(s, "to finish    {} hours", p.completion.credit_hours);
                let _ = writeln!(s, "optimal      {}", p.plan.optimal && p.completion.exact);
                write_plan(&mut s, &p.plan);
            }
            Output::Translate(records) => {
                let _ = writeln!(
                    s,
                    "{:<20} {:<14} {:<26} {:>10}",
                    "SOURCE", "FROM", "STATUS", "RECOGNIZED"
                );
                for t in records {
                    let source = t
                        .source
                        .course_id()
                        .map(|c| c.to_string())
                        .unwrap_or_else(|| "(exam)".into());
                    let from = t.source.institution_id().map(|i| i.to_string()).unwrap_or_default();
                    let status = match &t.status {
                        TranslationStatus::Native => "NATIVE".to_string(),
                        TranslationStatus::Equivalent { target_course_id } => format!("EQUIVALENT {target_course_id}"),
                        TranslationStatus::Elective { level } => {
                            format!("ELECTIVE {}", json(level).trim_matches('"'))
                        }
                        TranslationStatus::Unevaluated => "UNEVALUATED".to_string(),
                        TranslationStatus::Denied => "DENIED".to_string(),
                    };
                    let _ = writeln!(
                        s,
                        "{source:<20} {from:<14} {status:<26} {:>10}",
                        t.recognized_credit_hours
                    );
                }
            }
            Output::Pathways(p) => {
                let _ = writeln!(s, "pathways per university  {}", p.pathways.per_university);
                let _ = writeln!(s, "pathways statewide       {}", p.pathways.statewide);
                let _ = writeln!(s, "person-years per univ.   {}", p.person_years.per_university);
                let _ = writeln!(s, "person-years statewide   {}", p.person_years.statewide);
            }
            Output::PlanCount(c) => {
                let _ = writeln!(s, "courses  {}", c.courses);
                let _ = writeln!(s, "terms    {}", c.num_terms);
                let _ = writeln!(s, "plans    {}", c.count);
                if c.exceeds_one_million {
                    let _ = writeln!(s, "         > 1,000,000");
                }
            }
            Output::Loss(l) => {
                let _ = writeln!(s, "lost student-years       {}", l.lost_student_years);
                let _ = writeln!(s, "blended annual tuition   {}", l.blended_annual_tuition);
                let _ = writeln!(s, "total loss               {}", l.total);
            }
            Output::Check(c) => {
                let _ = writeln!(s, "valid  {}", c.valid);
                for v in &c.violations {
                    let _ = writeln!(s, "  {}", serde_json::to_string(v).expect("violations serialize"));
                }
            }
        }
        s
    }
}

fn write_plan(s: &mut String, plan: &DegreePlan) {
    for (t, term) in plan.terms.iter().enumerate() {
        let names: Vec<&str> = term.iter().map(|c| c.as_str()).collect();
        let _ = writeln!(
            s,
            "term {:<3} {:>5}  {}",
            t + 1,
            plan.term_credit_hours[t],
            names.join(", ")
        );
    }
    let _ = writeln!(s, "total    {:>5}", plan.total_credit_hours);
}

fn run(cli: &Cli) -> anyhow::Result<Output> {
    Ok(match &cli.command {
        Command::Audit { program, transcript } => {
            let snapshot = load_catalog(cli)?;
            let t: Transcript = read_json(transcript)?;
            Output::Audit(audit_program(
                &t,
                &ProgramId::new(program.as_str()),
                &snapshot,
                &Default::default(),
            )?)
        }
        Command::Whatif {
            transcript,
            targets,
            max_credits,
            terms,
        } => {
            let snapshot = load_catalog(cli)?;
            let t: Transcript = read_json(transcript)?;
            let targets: Vec<ProgramId> = match targets {
                Some(ids) => ids.iter().map(|s| ProgramId::new(s.trim())).collect(),
                None => snapshot.bachelor_programs().map(|p| p.id.clone()).collect(),
            };
            let options = WhatifOptions {
                constraints: constraints(*max_credits, *terms),
                ..WhatifOptions::default()
            };
            Output::Whatif(whatif(&t, &targets, &snapshot, &options, cli.jobs)?)
        }
        Command::Plan {
            program,
            transcript,
            max_credits,
            terms,
        } => {
            let snapshot = load_catalog(cli)?;
            let t: Transcript = read_json(transcript)?;
            Output::Plan(plan_program(
                &t,
                &ProgramId::new(program.as_str()),
                &snapshot,
                &constraints(*max_credits, *terms),
                &Default::default(),
            )?)
        }
        Command::Translate { transcript, to } => {
            let snapshot = load_catalog(cli)?;
            let t: Transcript = read_json(transcript)?;
            snapshot.check_transcript(&t).map_err(Error::from)?;
            let to = InstitutionId::new(to.as_str());
            Output::Translate(translate_transcript(&t, &to, &snapshot).map_err(Error::from)?)
        }
        Command::CountPathways {
            ccs,
            programs,
            targets,
            universities,
            hours_per_pathway,
        } => {
            let scenario = PathwayScenario {
                num_ccs: *ccs,
                programs_per_cc: *programs,
                targets_per_program: *targets,
                num_universities: *universities,
            };
            let model = CostModel {
                hours_per_pathway: *hours_per_pathway,
                ..CostModel::default()
            };
            model.validate().map_err(input_err)?;
            Output::Pathways(pathway_report(&scenario, &model))
        }
        Command::CountPlans {
            curriculum,
            terms,
            per_term,
            max_credits,
        } => {
            let doc: CatalogDocument = read_json(curriculum)?;
            let catalog = CourseCatalog::new(doc.courses, doc.exams);
            let violations = catalog.validate();
            if !violations.is_empty() {
                return Err(Error::from(articulate::CatalogError::Validation(violations)).into());
            }
            let ids: BTreeSet<CourseId> = catalog.courses.keys().cloned().collect();
            let mut c = constraints(*max_credits, Some(*terms));
            c.exact_courses_per_term = *per_term;
            if per_term.is_none() && max_credits.is_none() {
                c.max_credits_per_term = catalog.courses.values().map(|c| c.credit_hours).sum();
            }
            Output::PlanCount(plan_count_report(&ids, &c, &catalog).map_err(Error::from)?)
        }
        Command::EstimateLoss { assumptions } => {
            let a: LossAssumptions = read_json(assumptions)?;
            a.validate().map_err(input_err)?;
            Output::Loss(estimate_national_loss(&a))
        }
        Command::CheckPlan { plan } => {
            let snapshot = load_catalog(cli)?;
            let input = read_json(plan)?;
            Output::Check(check_plan_input(&input, snapshot.catalog()))
        }
        Command::Serve { .. } => return Err(anyhow!("serve is handled separately")),
    })
}

fn serve(cli: &Cli, host: std::net::IpAddr, port: u16) -> anyhow::Result<()> {
    let dir = cli
        .catalog
        .clone()
        .ok_or_else(|| input_err("--catalog (or CATALOG_DIR) is required for serve"))?;
    let state = AppState::from_dir(dir)?.with_jobs(cli.jobs);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .context("starting the async runtime")?;
    runtime
        .block_on(service::serve(Arc::new(state), SocketAddr::new(host, port)))
        .context("serving HTTP")
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<InputError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>().map(Error::class) {
        Some(ErrorClass::Validation | ErrorClass::NotFound) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Command::Serve { port, host } = cli.command {
        return match serve(&cli, host, port) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(exit_code(&e))
            }
        };
    }
    match run(&cli) {
        Ok(out) => {
            let text = match cli.format {
                Format::Json => out.to_json() + "\n",
                Format::Table => out.to_table(),
            };
            print!("{text}");
            match out {
                Output::Check(c) if !c.valid => ExitCode::from(2),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
