//! Greedy assignment by descending credit hours followed by single-record
//! exchanges. Used as the incumbent for the exact search and as the
//! flagged fallback above the exact limits.

use super::instance::{Choice, Instance, State};

const MAX_PASSES: usize = 25;

pub(crate) fn greedy_with_exchange(inst: &Instance) -> Choice {
    let mut state = State::new(inst);
    let mut choice: Choice = vec![None; inst.records.len()];

    let mut order: Vec<usize> = (0..inst.records.len())
        .filter(|r| !inst.records[*r].options.is_empty())
        .collect();
    order.sort_by(|a, b| inst.records[*b].hours.cmp(&inst.records[*a].hours).then(a.cmp(b)));
    for &r in &order {
        if let Some(pos) = first_fit(&state, r) {
            state.assign(r, inst.records[r].options[pos]);
            choice[r] = Some(pos);
        }
    }

    for _ in 0..MAX_PASSES {
        let mut improved = false;
        for &r in &order {
            if choice[r].is_some() {
                continue;
            }
            if let Some(pos) = first_fit(&state, r) {
                state.assign(r, inst.records[r].options[pos]);
                choice[r] = Some(pos);
                improved = true;
                continue;
            }
            if let Some((next_state, next_choice)) = try_exchange(&state, &choice, r) {
                state = next_state;
                choice = next_choice;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    choice
}

fn first_fit(state: &State<'_>, record: usize) -> Option<usize> {
    state.inst.records[record]
        .options
        .iter()
        .position(|leaf| state.can_assign(record, *leaf))
}

/// Moves one occupant of one of `record`'s leaves out of the way (to
/// another leaf or to unassigned) when that strictly improves the
/// objective.
fn try_exchange<'a>(state: &State<'a>, choice: &Choice, record: usize) -> Option<(State<'a>, Choice)> {
    let inst = state.inst;
    let before = state.objective();
    for &leaf in &inst.records[record].options {
        let occupants: Vec<usize> = (0..choice.len())
            .filter(|r| choice[*r].map(|pos| inst.records[*r].options[pos]) == Some(leaf))
            .collect();
        for occupant in occupants {
            let mut trial = state.clone();
            let mut trial_choice = choice.clone();
            trial.unassign(occupant, leaf);
            trial_choice[occupant] = None;
            if !trial.can_assign(record, leaf) {
                continue;
            }
            let pos = inst.records[record].options.iter().position(|l| *l == leaf)?;
            trial.assign(record, leaf);
            trial_choice[record] = Some(pos);
            if let Some(alt) = first_fit(&trial, occupant) {
                trial.assign(occupant, inst.records[occupant].options[alt]);
                trial_choice[occupant] = Some(alt);
            }
            if trial.objective() > before {
                return Some((trial, trial_choice));
            }
        }
    }
    None
}
