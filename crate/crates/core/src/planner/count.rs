//! Exact plan counting.
//!
//! Terms are labeled and order inside a term does not matter. Without
//! prerequisites, toxic pairs or credit bounds the count is the multinomial
//! n!/(k!)^T. Otherwise a dynamic program runs term by term over the sets
//! of already-placed courses, which are always prerequisite-closed.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::PlanError;
use crate::ids::CourseId;
use crate::rational::{common_denominator, to_grid};
use crate::requirements::CourseCatalog;

use super::{CourseGraph, PlanConstraints};

pub const MAX_DAG_COURSES: usize = 24;

/// Result of counting plans for a curriculum, with the count in decimal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanCount {
    pub courses: usize,
    pub num_terms: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_courses_per_term: Option<u32>,
    pub count: String,
    pub exceeds_one_million: bool,
}

pub fn plan_count_report(
    curriculum: &BTreeSet<CourseId>,
    constraints: &PlanConstraints,
    catalog: &CourseCatalog,
) -> Result<PlanCount, PlanError> {
    let count = count_plans(curriculum, constraints, catalog)?;
    Ok(PlanCount {
        courses: curriculum.len(),
        num_terms: constraints.num_terms,
        exact_courses_per_term: constraints.exact_courses_per_term,
        exceeds_one_million: count > BigUint::from(1_000_000u32),
        count: count.to_string(),
    })
}

/// Number of distinct assignments of `curriculum` to the constrained terms.
/// Prerequisites outside the curriculum are taken as already satisfied.
pub fn count_plans(
    curriculum: &BTreeSet<CourseId>,
    constraints: &PlanConstraints,
    catalog: &CourseCatalog,
) -> Result<BigUint, PlanError> {
    constraints.validate()?;
    let graph = CourseGraph::build(curriculum, catalog)?;
    let n = graph.len();
    let terms = constraints.num_terms as usize;
    let has_edges = graph.preds.iter().any(|p| !p.is_empty());
    let has_toxic = constraints
        .toxic_pairs
        .iter()
        .any(|(a, b)| graph.index(a).is_some() && graph.index(b).is_some());

    if let Some(k) = constraints.exact_courses_per_term {
        if !has_edges && !has_toxic {
            return Ok(multinomial(n, k as usize, terms));
        }
    }
    if n > MAX_DAG_COURSES {
        return Err(PlanError::TooLarge {
            courses: n,
            limit: MAX_DAG_COURSES,
        });
    }

    let mut values = graph.hours.clone();
    values.push(constraints.min_credits_per_term);
    values.push(constraints.max_credits_per_term);
    let grid = common_denominator(&values);
    let mut toxic = vec![0u32; n];
    for (a, b) in &constraints.toxic_pairs {
        if let (Some(i), Some(j)) = (graph.index(a), graph.index(b)) {
            toxic[i] |= 1 << j;
            toxic[j] |= 1 << i;
        }
    }
    let term_rule = match constraints.exact_courses_per_term {
        Some(k) => TermRule::Exact(k as usize),
        None => TermRule::Bounded {
            min: to_grid(constraints.min_credits_per_term, grid),
            max: to_grid(constraints.max_credits_per_term, grid),
            max_courses: constraints.max_courses_per_term.map(|c| c as usize),
        },
    };
    let ctx = Ctx {
        hours: graph.hours.iter().map(|h| to_grid(*h, grid)).collect(),
        preds: graph
            .preds
            .iter()
            .map(|ps| ps.iter().fold(0u32, |m, p| m | (1 << p)))
            .collect(),
        toxic,
        rule: term_rule,
    };

    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut layer: HashMap<u32, BigUint> = HashMap::from([(0, BigUint::one())]);
    for _ in 0..terms {
        let mut next: HashMap<u32, BigUint> = HashMap::new();
        for (placed, ways) in &layer {
            let avail: Vec<usize> = (0..n)
                .filter(|i| placed & (1 << i) == 0 && ctx.preds[*i] & !placed == 0)
                .collect();
            ctx.subsets(&avail, 0, 0, 0, &mut |chosen| {
                *next.entry(placed | chosen).or_insert_with(BigUint::zero) += ways;
            });
        }
        layer = next;
    }
    Ok(layer.remove(&full).unwrap_or_default())
}

enum TermRule {
    Exact(usize),
    Bounded {
        min: i64,
        max: i64,
        max_courses: Option<usize>,
    },
}

struct Ctx {
    hours: Vec<i64>,
    preds: Vec<u32>,
    toxic: Vec<u32>,
    rule: TermRule,
}

impl Ctx {
    /// Calls `emit` with every admissible term drawn from `avail[from..]`
    /// on top of `chosen`.
    fn subsets(&self, avail: &[usize], from: usize, chosen: u32, load: i64, emit: &mut impl FnMut(u32)) {
        let size = chosen.count_ones() as usize;
        let admissible = match self.rule {
            TermRule::Exact(k) => size == k,
            TermRule::Bounded { min, .. } => load >= min,
        };
        if admissible {
            emit(chosen);
        }
        for (offset, &i) in avail[from..].iter().enumerate() {
            if self.toxic[i] & chosen != 0 {
                continue;
            }
            let grown = size + 1;
            let next_load = load + self.hours[i];
            let fits = match self.rule {
                TermRule::Exact(k) => grown <= k,
                TermRule::Bounded { max, max_courses, .. } => {
                    next_load <= max && max_courses.is_none_or(|c| grown <= c)
                }
            };
            if fits {
                self.subsets(avail, from + offset + 1, chosen | (1 << i), next_load, emit);
            }
        }
    }
}

/// n!/(k!)^t when n = k*t, zero otherwise.
pub(crate) fn multinomial(n: usize, k: usize, t: usize) -> BigUint {
    if k.checked_mul(t) != Some(n) {
        return BigUint::zero();
    }
    let factorial = |m: usize| (1..=m).fold(BigUint::one(), |acc, i| acc * BigUint::from(i));
    let denom = (0..t).fold(BigUint::one(), |acc, _| acc * factorial(k));
    factorial(n) / denom
}
