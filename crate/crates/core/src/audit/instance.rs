//! Flattened audit instance shared by the optimizer, the heuristic and the
//! satisfiability search. Credit hours live on an integer grid.

use crate::ids::NodeId;
use crate::model::{NodeKind, RequirementNode, Transcript};
use crate::rational::{common_denominator, to_grid, Rational};

use super::{compatible, exam_satisfied, Assignment};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FlatKind {
    All,
    /// ANY (limit 1) or CHOOSE (limit k).
    Limit(u32),
    Course,
    Credits {
        min: i64,
    },
    /// EXAM or shareable leaf; its status does not depend on the assignment.
    Fixed(bool),
}

#[derive(Debug, Clone)]
pub(crate) struct FlatNode {
    pub id: NodeId,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub kind: FlatKind,
}

#[derive(Debug, Clone)]
pub(crate) struct RecordInfo {
    pub hours: i64,
    /// Contribution to applied hours when assigned; zero for records a
    /// shareable leaf already uses.
    pub weight: i64,
    /// Assignable leaves, sorted by leaf id.
    pub options: Vec<usize>,
}

/// Per record, the chosen position in `RecordInfo::options`.
pub(crate) type Choice = Vec<Option<usize>>;

/// Comparison key of one record's choice: any leaf before "unassigned".
pub(crate) fn choice_key(c: Option<usize>) -> usize {
    c.unwrap_or(usize::MAX)
}

#[derive(Debug, Clone)]
pub(crate) struct Instance {
    pub nodes: Vec<FlatNode>,
    pub records: Vec<RecordInfo>,
    /// Grid hours of records used by shareable leaves.
    pub base_applied: i64,
    /// Leaves satisfied regardless of the assignment.
    pub base_satisfied: usize,
    leaf_count: usize,
}

impl Instance {
    pub fn build(root: &RequirementNode, transcript: &Transcript) -> Instance {
        let mut hours: Vec<Rational> = transcript.records.iter().map(|r| r.credit_hours()).collect();
        for node in root.walk() {
            if let NodeKind::Credits { min_credit_hours, .. } = &node.kind {
                hours.push(*min_credit_hours);
            }
        }
        let grid = common_denominator(&hours);

        let mut nodes: Vec<FlatNode> = Vec::new();
        let mut originals: Vec<&RequirementNode> = Vec::new();
        let mut stack: Vec<(&RequirementNode, Option<usize>)> = vec![(root, None)];
        while let Some((node, parent)) = stack.pop() {
            let index = nodes.len();
            if let Some(p) = parent {
                nodes[p].children.push(index);
            }
            let kind = match &node.kind {
                NodeKind::All(_) => FlatKind::All,
                NodeKind::Any(_) => FlatKind::Limit(1),
                NodeKind::Choose { choose_k, .. } => FlatKind::Limit(*choose_k),
                NodeKind::Exam { .. } => FlatKind::Fixed(exam_satisfied(transcript, node)),
                NodeKind::Course { .. } if node.shareable => {
                    FlatKind::Fixed(transcript.records.iter().any(|r| compatible(r, node)))
                }
                NodeKind::Credits { min_credit_hours, .. } if node.shareable => {
                    let total: Rational = transcript
                        .records
                        .iter()
                        .filter(|r| compatible(r, node))
                        .map(|r| r.credit_hours())
                        .sum();
                    FlatKind::Fixed(total >= *min_credit_hours)
                }
                NodeKind::Course { .. } => FlatKind::Course,
                NodeKind::Credits { min_credit_hours, .. } => FlatKind::Credits {
                    min: to_grid(*min_credit_hours, grid),
                },
            };
            nodes.push(FlatNode {
                id: node.id.clone(),
                parent,
                children: Vec::new(),
                kind,
            });
            originals.push(node);
            for child in node.children().iter().rev() {
                stack.push((child, Some(index)));
            }
        }

        let mut base_applied = 0;
        let records = transcript
            .records
            .iter()
            .map(|record| {
                let hours = to_grid(record.credit_hours(), grid);
                let shared = originals
                    .iter()
                    .any(|n| n.is_leaf() && n.shareable && compatible(record, n));
                let mut options: Vec<usize> = (0..nodes.len())
                    .filter(|&i| {
                        matches!(nodes[i].kind, FlatKind::Course | FlatKind::Credits { .. })
                            && compatible(record, originals[i])
                    })
                    .collect();
                options.sort_by(|a, b| nodes[*a].id.cmp(&nodes[*b].id));
                if shared {
                    base_applied += hours;
                }
                RecordInfo {
                    hours,
                    weight: if shared { 0 } else { hours },
                    options,
                }
            })
            .collect();

        let leaf_count = originals.iter().filter(|n| n.is_leaf()).count();
        let base_satisfied = nodes.iter().filter(|n| matches!(n.kind, FlatKind::Fixed(true))).count();
        Instance {
            nodes,
            records,
            base_applied,
            base_satisfied,
            leaf_count,
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    pub fn to_assignment(&self, choice: &Choice) -> Assignment {
        choice
            .iter()
            .enumerate()
            .filter_map(|(r, c)| c.map(|pos| (r, self.nodes[self.records[r].options[pos]].id.clone())))
            .collect()
    }
}

/// Mutable search state over an instance.
#[derive(Debug, Clone)]
pub(crate) struct State<'a> {
    pub inst: &'a Instance,
    filled: Vec<bool>,
    credit_hours: Vec<Vec<i64>>,
    credit_sum: Vec<i64>,
    subtree: Vec<u32>,
    active: Vec<u32>,
    /// Grid hours of assigned records (by weight).
    pub applied: i64,
    /// Assignable leaves currently satisfied.
    pub satisfied: usize,
}

impl<'a> State<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        let n = inst.nodes.len();
        State {
            inst,
            filled: vec![false; n],
            credit_hours: vec![Vec::new(); n],
            credit_sum: vec![0; n],
            subtree: vec![0; n],
            active: vec![0; n],
            applied: 0,
            satisfied: 0,
        }
    }

    pub fn leaf_satisfied(&self, leaf: usize) -> bool {
        match self.inst.nodes[leaf].kind {
            FlatKind::Course => self.filled[leaf],
            FlatKind::Credits { min } => self.credit_sum[leaf] >= min,
            FlatKind::Fixed(sat) => sat,
            _ => false,
        }
    }

    pub fn credit_sum(&self, leaf: usize) -> i64 {
        self.credit_sum[leaf]
    }

    pub fn is_active(&self, node: usize) -> bool {
        self.subtree[node] > 0
    }

    pub fn active_children(&self, node: usize) -> u32 {
        self.active[node]
    }

    pub fn can_assign(&self, record: usize, leaf: usize) -> bool {
        let hours = self.inst.records[record].hours;
        match self.inst.nodes[leaf].kind {
            FlatKind::Course => {
                if self.filled[leaf] {
                    return false;
                }
            }
            FlatKind::Credits { min } => {
                let smallest = self.credit_hours[leaf]
                    .iter()
                    .copied()
                    .min()
                    .unwrap_or(i64::MAX)
                    .min(hours);
                if self.credit_sum[leaf] + hours - smallest >= min {
                    return false;
                }
            }
            _ => return false,
        }
        let mut child = leaf;
        while let Some(parent) = self.inst.nodes[child].parent {
            if self.subtree[child] > 0 {
                break;
            }
            if let FlatKind::Limit(limit) = self.inst.nodes[parent].kind {
                if self.active[parent] >= limit {
                    return false;
                }
            }
            child = parent;
        }
        true
    }

    pub fn assign(&mut self, record: usize, leaf: usize) {
        let info = &self.inst.records[record];
        let before = self.leaf_satisfied(leaf);
        match self.inst.nodes[leaf].kind {
            FlatKind::Course => self.filled[leaf] = true,
            FlatKind::Credits { .. } => {
                self.credit_hours[leaf].push(info.hours);
                self.credit_sum[leaf] += info.hours;
            }
            _ => unreachable!("assignment to a non-assignable node"),
        }
        if !before && self.leaf_satisfied(leaf) {
            self.satisfied += 1;
        }
        self.applied += info.weight;
        let mut node = leaf;
        loop {
            self.subtree[node] += 1;
            let Some(parent) = self.inst.nodes[node].parent else {
                break;
            };
            if self.subtree[node] == 1 {
                self.active[parent] += 1;
            }
            node = parent;
        }
    }

    pub fn unassign(&mut self, record: usize, leaf: usize) {
        let info = &self.inst.records[record];
        let before = self.leaf_satisfied(leaf);
        match self.inst.nodes[leaf].kind {
            FlatKind::Course => self.filled[leaf] = false,
            FlatKind::Credits { .. } => {
                let list = &mut self.credit_hours[leaf];
                let pos = list
                    .iter()
                    .rposition(|h| *h == info.hours)
                    .expect("record was assigned");
                list.swap_remove(pos);
                self.credit_sum[leaf] -= info.hours;
            }
            _ => unreachable!("assignment to a non-assignable node"),
        }
        if before && !self.leaf_satisfied(leaf) {
            self.satisfied -= 1;
        }
        self.applied -= info.weight;
        let mut node = leaf;
        loop {
            self.subtree[node] -= 1;
            let Some(parent) = self.inst.nodes[node].parent else {
                break;
            };
            if self.subtree[node] == 0 {
                self.active[parent] -= 1;
            }
            node = parent;
        }
    }

    /// Boolean value of `node` under the current assignment.
    pub fn node_satisfied(&self, node: usize) -> bool {
        let flat = &self.inst.nodes[node];
        match flat.kind {
            FlatKind::All => flat.children.iter().all(|c| self.node_satisfied(*c)),
            FlatKind::Limit(k) => flat.children.iter().filter(|c| self.node_satisfied(**c)).count() >= k as usize,
            _ => self.leaf_satisfied(node),
        }
    }

    /// (applied grid hours, satisfied leaves) including the constant parts.
    pub fn objective(&self) -> (i64, usize) {
        (
            self.inst.base_applied + self.applied,
            self.inst.base_satisfied + self.satisfied,
        )
    }
}
