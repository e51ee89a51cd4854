//! Plan generation.
//!
//! The number of terms is tried in increasing order from a lower bound.
//! For each count a depth-first search places courses in id order, each
//! into the earliest admissible term first, so the first plan found under
//! a load cap is the lexicographically smallest one. The cap is then
//! lowered below the found maximum load until no plan remains.

use std::collections::BTreeSet;

use crate::error::PlanError;
use crate::ids::CourseId;
use crate::rational::{common_denominator, to_grid, Rational};
use crate::requirements::CourseCatalog;

use super::{CourseGraph, DegreePlan, InfeasibleReason, PlanConstraints};

const NODE_BUDGET: u64 = 4_000_000;

struct Problem {
    n: usize,
    hours: Vec<i64>,
    dist: Vec<Vec<Option<u32>>>,
    /// Longest in-set chain ending / starting at each course, in edges.
    depth: Vec<u32>,
    height: Vec<u32>,
    toxic: Vec<Vec<bool>>,
    min: i64,
    max: i64,
    course_cap: Option<u32>,
}

enum Search {
    Found(Vec<u32>),
    None,
    Exhausted,
}

struct Dfs<'a> {
    p: &'a Problem,
    terms: u32,
    cap: i64,
    term_of: Vec<u32>,
    load: Vec<i64>,
    count: Vec<u32>,
    remaining_hours: i64,
    expanded: u64,
    budget: u64,
}

impl Dfs<'_> {
    fn run(&mut self, i: usize) -> Option<bool> {
        self.expanded += 1;
        if self.expanded > self.budget {
            return None;
        }
        let p = self.p;
        if i == p.n {
            let ok = (0..self.terms as usize).all(|t| self.count[t] > 0 && self.load[t] >= p.min);
            return Some(ok);
        }
        if !self.viable(p.n - i) {
            return Some(false);
        }
        let mut lo = p.depth[i];
        let mut hi = self.terms - 1 - p.height[i];
        for a in 0..i {
            if let Some(d) = p.dist[a][i] {
                lo = lo.max(self.term_of[a] + d);
            }
            if let Some(d) = p.dist[i][a] {
                if self.term_of[a] < d {
                    return Some(false);
                }
                hi = hi.min(self.term_of[a] - d);
            }
        }
        let h = p.hours[i];
        let mut t = lo;
        while t <= hi {
            let tu = t as usize;
            let fits = self.load[tu] + h <= self.cap
                && p.course_cap.is_none_or(|c| self.count[tu] < c)
                && !(0..i).any(|a| self.term_of[a] == t && p.toxic[a][i]);
            if fits {
                self.term_of[i] = t;
                self.load[tu] += h;
                self.count[tu] += 1;
                self.remaining_hours -= h;
                let r = self.run(i + 1);
                self.load[tu] -= h;
                self.count[tu] -= 1;
                self.remaining_hours += h;
                match r {
                    Some(false) => {}
                    other => return other,
                }
            }
            t += 1;
        }
        Some(false)
    }

    fn viable(&self, unplaced: usize) -> bool {
        let mut room = 0i64;
        let mut deficit = 0i64;
        let mut empty = 0usize;
        for t in 0..self.terms as usize {
            room += (self.cap - self.load[t]).max(0);
            deficit += (self.p.min - self.load[t]).max(0);
            empty += usize::from(self.count[t] == 0);
        }
        room >= self.remaining_hours && deficit <= self.remaining_hours && empty <= unplaced
    }
}

impl Problem {
    fn search(&self, terms: u32, cap: i64, budget: &mut u64) -> Search {
        let mut dfs = Dfs {
            p: self,
            terms,
            cap,
            term_of: vec![0; self.n],
            load: vec![0; terms as usize],
            count: vec![0; terms as usize],
            remaining_hours: self.hours.iter().sum(),
            expanded: 0,
            budget: *budget,
        };
        let r = dfs.run(0);
        *budget = budget.saturating_sub(dfs.expanded);
        match r {
            Some(true) => Search::Found(dfs.term_of),
            Some(false) => Search::None,
            None => Search::Exhausted,
        }
    }

    fn lower_bound(&self) -> u32 {
        let chain = self.depth.iter().copied().max().map_or(0, |d| d + 1);
        let total: i64 = self.hours.iter().sum();
        let by_hours = (total + self.max - 1) / self.max;
        let by_count = self.course_cap.map_or(0, |c| self.n.div_ceil(c as usize) as i64);
        chain.max(by_hours.max(by_count).max(1) as u32)
    }

    fn max_load(&self, term_of: &[u32], terms: u32) -> i64 {
        let mut load = vec![0; terms as usize];
        for (i, t) in term_of.iter().enumerate() {
            load[*t as usize] += self.hours[i];
        }
        load.into_iter().max().unwrap_or(0)
    }

    /// Fewest terms, then smallest maximum load.
    fn optimize(&self, num_terms: u32, budget: &mut u64) -> Result<Option<(u32, Vec<u32>, bool)>, ()> {
        let mut exhausted = false;
        for terms in self.lower_bound()..=num_terms {
            match self.search(terms, self.max, budget) {
                Search::None => continue,
                Search::Exhausted => {
                    exhausted = true;
                    continue;
                }
                Search::Found(mut best) => {
                    let mut optimal = !exhausted;
                    loop {
                        let load = self.max_load(&best, terms);
                        match self.search(terms, load - 1, budget) {
                            Search::Found(next) => best = next,
                            Search::None => break,
                            Search::Exhausted => {
                                optimal = false;
                                break;
                            }
                        }
                    }
                    return Ok(Some((terms, best, optimal)));
                }
            }
        }
        if exhausted {
            Err(())
        } else {
            Ok(None)
        }
    }

    fn feasible(&self, num_terms: u32) -> Option<bool> {
        let mut budget = NODE_BUDGET;
        for terms in self.lower_bound()..=num_terms {
            match self.search(terms, self.max, &mut budget) {
                Search::Found(_) => return Some(true),
                Search::None => {}
                Search::Exhausted => return None,
            }
        }
        Some(false)
    }
}

/// Plan for `curriculum` minus `completed` using the fewest non-empty
/// terms, then the smallest maximum term load, then the earliest terms for
/// the smallest course ids.
pub fn generate_plan(
    curriculum: &BTreeSet<CourseId>,
    completed: &BTreeSet<CourseId>,
    constraints: &PlanConstraints,
    catalog: &CourseCatalog,
) -> Result<DegreePlan, PlanError> {
    constraints.validate()?;
    let remaining: BTreeSet<CourseId> = curriculum.difference(completed).cloned().collect();
    if remaining.is_empty() {
        return Ok(DegreePlan::empty());
    }
    let graph = CourseGraph::build(&remaining, catalog)?;
    for id in &graph.ids {
        let course = catalog
            .course(id.as_str())
            .ok_or_else(|| PlanError::UnknownCourse(id.clone()))?;
        if let Some(p) = course
            .prerequisites
            .iter()
            .find(|p| !remaining.contains(*p) && !completed.contains(*p))
        {
            return Err(PlanError::Infeasible(InfeasibleReason::MissingPrerequisite {
                course: id.clone(),
                prerequisite: p.clone(),
            }));
        }
    }
    for (i, h) in graph.hours.iter().enumerate() {
        if *h > constraints.max_credits_per_term {
            return Err(PlanError::Infeasible(InfeasibleReason::CourseExceedsCapacity {
                course: graph.ids[i].clone(),
                credit_hours: *h,
                max_credits_per_term: constraints.max_credits_per_term,
            }));
        }
    }
    let chain = graph.longest_chain();
    if chain.len() > constraints.num_terms as usize {
        return Err(PlanError::Infeasible(InfeasibleReason::PrerequisiteDepth {
            chain: chain.iter().map(|i| graph.ids[*i].clone()).collect(),
            num_terms: constraints.num_terms,
        }));
    }

    let problem = build_problem(&graph, constraints, &constraints.toxic_pairs, true);
    let mut budget = NODE_BUDGET;
    match problem.optimize(constraints.num_terms, &mut budget) {
        Ok(Some((terms, term_of, optimal))) => Ok(to_plan(&graph, terms, &term_of, optimal)),
        Ok(None) => Err(PlanError::Infeasible(diagnose(&graph, constraints))),
        Err(()) => Err(PlanError::LimitExceeded(format!(
            "plan search over {} courses exceeded {NODE_BUDGET} nodes",
            graph.len()
        ))),
    }
}

fn build_problem(
    graph: &CourseGraph,
    constraints: &PlanConstraints,
    toxic_pairs: &[(CourseId, CourseId)],
    with_minimum: bool,
) -> Problem {
    let mut values = graph.hours.clone();
    values.push(constraints.min_credits_per_term);
    values.push(constraints.max_credits_per_term);
    let grid = common_denominator(&values);
    let n = graph.len();
    let dist = graph.longest_paths();
    let depth = (0..n)
        .map(|i| (0..n).filter_map(|a| dist[a][i]).max().unwrap_or(0))
        .collect();
    let height = (0..n)
        .map(|i| (0..n).filter_map(|b| dist[i][b]).max().unwrap_or(0))
        .collect();
    let mut toxic = vec![vec![false; n]; n];
    for (a, b) in toxic_pairs {
        if let (Some(i), Some(j)) = (graph.index(a), graph.index(b)) {
            toxic[i][j] = true;
            toxic[j][i] = true;
        }
    }
    Problem {
        n,
        hours: graph.hours.iter().map(|h| to_grid(*h, grid)).collect(),
        dist,
        depth,
        height,
        toxic,
        min: if with_minimum {
            to_grid(constraints.min_credits_per_term, grid)
        } else {
            0
        },
        max: to_grid(constraints.max_credits_per_term, grid),
        course_cap: constraints.course_cap(),
    }
}

fn diagnose(graph: &CourseGraph, constraints: &PlanConstraints) -> InfeasibleReason {
    let n = constraints.num_terms;
    let relaxed = build_problem(graph, constraints, &[], false);
    if relaxed.feasible(n) != Some(true) {
        return InfeasibleReason::Capacity {
            courses: graph.len(),
            credit_hours: graph.hours.iter().copied().sum(),
            num_terms: n,
        };
    }
    if build_problem(graph, constraints, &[], true).feasible(n) != Some(true) {
        return InfeasibleReason::MinimumLoad {
            min_credits_per_term: constraints.min_credits_per_term,
        };
    }
    // Deletion filter: drop each pair whose removal keeps the plan impossible.
    let mut pairs: Vec<(CourseId, CourseId)> = constraints
        .toxic_pairs
        .iter()
        .filter(|(a, b)| graph.index(a).is_some() && graph.index(b).is_some())
        .cloned()
        .collect();
    let mut i = 0;
    while i < pairs.len() {
        let mut without = pairs.clone();
        without.remove(i);
        if build_problem(graph, constraints, &without, true).feasible(n) == Some(false) {
            pairs = without;
        } else {
            i += 1;
        }
    }
    InfeasibleReason::ToxicPairs { pairs }
}

fn to_plan(graph: &CourseGraph, terms: u32, term_of: &[u32], optimal: bool) -> DegreePlan {
    let mut plan_terms = vec![Vec::new(); terms as usize];
    let mut loads = vec![Rational::ZERO; terms as usize];
    for (i, t) in term_of.iter().enumerate() {
        plan_terms[*t as usize].push(graph.ids[i].clone());
        loads[*t as usize] += graph.hours[i];
    }
    DegreePlan {
        terms: plan_terms,
        total_credit_hours: loads.iter().copied().sum(),
        term_credit_hours: loads,
        optimal,
    }
}
