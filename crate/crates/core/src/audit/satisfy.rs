//! Search for any valid assignment under which the root holds.

use crate::model::{RequirementNode, Transcript};

use super::instance::{Choice, FlatKind, Instance, State};
use super::Assignment;

pub(crate) enum Satisfiability {
    Satisfiable(Choice),
    Unsatisfiable,
    /// Node budget ran out before the question was settled.
    Unknown,
}

/// Some valid assignment that satisfies the root, if one exists.
pub fn find_satisfying_assignment(root: &RequirementNode, transcript: &Transcript) -> Option<Assignment> {
    let inst = Instance::build(root, transcript);
    match satisfiable(&inst, u64::MAX) {
        Satisfiability::Satisfiable(choice) => Some(inst.to_assignment(&choice)),
        _ => None,
    }
}

pub(crate) fn satisfiable(inst: &Instance, budget: u64) -> Satisfiability {
    let order: Vec<usize> = (0..inst.records.len())
        .filter(|r| !inst.records[*r].options.is_empty())
        .collect();
    let mut probe = Probe {
        inst,
        order,
        state: State::new(inst),
        choice: vec![None; inst.records.len()],
        reach: vec![false; inst.nodes.len()],
        potential: vec![0; inst.nodes.len()],
        expanded: 0,
        budget,
    };
    match probe.dfs(0) {
        Some(true) => Satisfiability::Satisfiable(probe.choice),
        Some(false) => Satisfiability::Unsatisfiable,
        None => Satisfiability::Unknown,
    }
}

struct Probe<'a> {
    inst: &'a Instance,
    order: Vec<usize>,
    state: State<'a>,
    choice: Choice,
    reach: Vec<bool>,
    potential: Vec<i64>,
    expanded: u64,
    budget: u64,
}

impl Probe<'_> {
    /// `Some(true)` when found (choice left in place), `Some(false)` when
    /// the subtree holds no solution, `None` when the budget ran out.
    fn dfs(&mut self, depth: usize) -> Option<bool> {
        self.expanded += 1;
        if self.expanded > self.budget {
            return None;
        }
        if self.state.node_satisfied(0) {
            return Some(true);
        }
        if depth == self.order.len() || !self.optimistic_root(depth) {
            return Some(false);
        }
        let r = self.order[depth];
        let inst = self.inst;
        for (pos, &leaf) in inst.records[r].options.iter().enumerate() {
            if !self.state.can_assign(r, leaf) {
                continue;
            }
            self.state.assign(r, leaf);
            self.choice[r] = Some(pos);
            match self.dfs(depth + 1) {
                Some(false) => {}
                found_or_abort => return found_or_abort,
            }
            self.state.unassign(r, leaf);
            self.choice[r] = None;
        }
        self.dfs(depth + 1)
    }

    fn optimistic_root(&mut self, depth: usize) -> bool {
        self.reach.iter_mut().for_each(|x| *x = false);
        self.potential.iter_mut().for_each(|x| *x = 0);
        for &r in &self.order[depth..] {
            for &leaf in &self.inst.records[r].options {
                if self.state.can_assign(r, leaf) {
                    self.reach[leaf] = true;
                    self.potential[leaf] += self.inst.records[r].hours;
                }
            }
        }
        self.optimistic(0)
    }

    fn optimistic(&self, node: usize) -> bool {
        let flat = &self.inst.nodes[node];
        match flat.kind {
            FlatKind::Course => self.state.leaf_satisfied(node) || self.reach[node],
            FlatKind::Credits { min } => self.state.credit_sum(node) + self.potential[node] >= min,
            FlatKind::Fixed(sat) => sat,
            FlatKind::All => flat.children.iter().all(|c| self.optimistic(*c)),
            FlatKind::Limit(k) => {
                let slots = k.saturating_sub(self.state.active_children(node)) as usize;
                let mut count = 0usize;
                let mut activatable = 0usize;
                for &child in &flat.children {
                    if self.state.is_active(child) {
                        count += usize::from(self.optimistic(child));
                    } else if self.state.node_satisfied(child) {
                        // Satisfied through exams or shareable leaves alone.
                        count += 1;
                    } else if self.optimistic(child) {
                        activatable += 1;
                    }
                }
                count + activatable.min(slots) >= k as usize
            }
        }
    }
}
