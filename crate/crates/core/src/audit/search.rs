//! Exact branch-and-bound over record-to-leaf choices.
//!
//! Records are decided in index order; each tries its leaves in id order
//! and then "unassigned", so the first optimum reached is also the
//! lexicographically smallest one. The bound relaxes the tree coupling:
//! every undecided record is credited with its weight if some leaf can
//! still take it, except that records whose only remaining option is the
//! same COURSE leaf share that leaf's single slot.

use std::cmp::Ordering;

use super::instance::{choice_key, Choice, FlatKind, Instance, State};

pub(crate) enum Outcome {
    Optimal(Choice),
    BudgetExhausted(Choice),
}

struct Search<'a> {
    inst: &'a Instance,
    order: Vec<usize>,
    suffix_weight: Vec<i64>,
    state: State<'a>,
    current: Choice,
    best: Choice,
    best_obj: (i64, usize),
    expanded: u64,
    budget: u64,
    exhausted: bool,
    // scratch buffers for the tight bound
    reach: Vec<bool>,
    potential: Vec<i64>,
    course_best: Vec<i64>,
    touched: Vec<usize>,
    assignable_leaves: Vec<usize>,
}

fn replay<'a>(inst: &'a Instance, choice: &Choice) -> State<'a> {
    let mut state = State::new(inst);
    for (r, c) in choice.iter().enumerate() {
        if let Some(pos) = c {
            let leaf = inst.records[r].options[*pos];
            debug_assert!(state.can_assign(r, leaf));
            state.assign(r, leaf);
        }
    }
    state
}

pub(crate) fn objective_of(inst: &Instance, choice: &Choice) -> (i64, usize) {
    replay(inst, choice).objective()
}

pub(crate) fn branch_and_bound(inst: &Instance, incumbent: Choice, budget: u64) -> Outcome {
    let order: Vec<usize> = (0..inst.records.len())
        .filter(|r| !inst.records[*r].options.is_empty())
        .collect();
    let mut suffix_weight = vec![0; order.len() + 1];
    for d in (0..order.len()).rev() {
        suffix_weight[d] = suffix_weight[d + 1] + inst.records[order[d]].weight;
    }
    let n = inst.nodes.len();
    let assignable_leaves = (0..n)
        .filter(|i| matches!(inst.nodes[*i].kind, FlatKind::Course | FlatKind::Credits { .. }))
        .collect();
    let best_obj = objective_of(inst, &incumbent);
    let mut search = Search {
        inst,
        order,
        suffix_weight,
        state: State::new(inst),
        current: vec![None; inst.records.len()],
        best: incumbent,
        best_obj,
        expanded: 0,
        budget,
        exhausted: false,
        reach: vec![false; n],
        potential: vec![0; n],
        course_best: vec![0; n],
        touched: Vec::new(),
        assignable_leaves,
    };
    search.dfs(0);
    if search.exhausted {
        Outcome::BudgetExhausted(search.best)
    } else {
        Outcome::Optimal(search.best)
    }
}

impl Search<'_> {
    fn prefix_cmp(&self, depth: usize) -> Ordering {
        for &r in &self.order[..depth] {
            match choice_key(self.current[r]).cmp(&choice_key(self.best[r])) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    }

    fn full_cmp(&self) -> Ordering {
        self.current
            .iter()
            .zip(&self.best)
            .map(|(a, b)| choice_key(*a).cmp(&choice_key(*b)))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    }

    /// Whether a subtree whose objective cannot exceed `bound` may still
    /// hold something better than the incumbent.
    fn promising(&self, bound: (i64, usize), depth: usize) -> bool {
        match bound.cmp(&self.best_obj) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => self.prefix_cmp(depth) != Ordering::Greater,
        }
    }

    fn cheap_bound(&self, depth: usize) -> (i64, usize) {
        let (applied, satisfied) = self.state.objective();
        let open_leaves = self
            .assignable_leaves
            .iter()
            .filter(|l| !self.state.leaf_satisfied(**l))
            .count();
        (applied + self.suffix_weight[depth], satisfied + open_leaves)
    }

    fn tight_bound(&mut self, depth: usize) -> (i64, usize) {
        for &t in &self.touched {
            self.reach[t] = false;
            self.potential[t] = 0;
            self.course_best[t] = 0;
        }
        self.touched.clear();
        let mut extra = 0i64;
        for &r in &self.order[depth..] {
            let info = &self.inst.records[r];
            let mut feasible = 0usize;
            let mut last = usize::MAX;
            for &leaf in &info.options {
                if self.state.can_assign(r, leaf) {
                    feasible += 1;
                    last = leaf;
                    if !self.reach[leaf] {
                        self.touched.push(leaf);
                    }
                    self.reach[leaf] = true;
                    self.potential[leaf] += info.hours;
                }
            }
            if feasible == 0 || info.weight == 0 {
                continue;
            }
            if feasible == 1 && self.inst.nodes[last].kind == FlatKind::Course {
                self.course_best[last] = self.course_best[last].max(info.weight);
            } else {
                extra += info.weight;
            }
        }
        for &t in &self.touched {
            extra += self.course_best[t];
        }
        let (applied, satisfied) = self.state.objective();
        let reachable_leaves = self
            .assignable_leaves
            .iter()
            .filter(|&&l| {
                !self.state.leaf_satisfied(l)
                    && match self.inst.nodes[l].kind {
                        FlatKind::Course => self.reach[l],
                        FlatKind::Credits { min } => self.state.credit_sum(l) + self.potential[l] >= min,
                        _ => false,
                    }
            })
            .count();
        (applied + extra, satisfied + reachable_leaves)
    }

    fn dfs(&mut self, depth: usize) {
        self.expanded += 1;
        if self.expanded > self.budget {
            self.exhausted = true;
            return;
        }
        if depth == self.order.len() {
            let obj = self.state.objective();
            let better = match obj.cmp(&self.best_obj) {
                Ordering::Greater => true,
                Ordering::Equal => self.full_cmp() == Ordering::Less,
                Ordering::Less => false,
            };
            if better {
                self.best_obj = obj;
                self.best.clone_from(&self.current);
            }
            return;
        }
        if !self.promising(self.cheap_bound(depth), depth) {
            return;
        }
        let bound = self.tight_bound(depth);
        if !self.promising(bound, depth) {
            return;
        }
        let r = self.order[depth];
        let inst = self.inst;
        let options = &inst.records[r].options;
        for (pos, &leaf) in options.iter().enumerate() {
            if !self.state.can_assign(r, leaf) {
                continue;
            }
            self.state.assign(r, leaf);
            self.current[r] = Some(pos);
            self.dfs(depth + 1);
            self.state.unassign(r, leaf);
            self.current[r] = None;
            if self.exhausted {
                return;
            }
        }
        self.dfs(depth + 1);
    }
}
