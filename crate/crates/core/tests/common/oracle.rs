//! Brute-force enumerators for plans, plan counts and completion sets.

use std::collections::BTreeSet;

use articulate::audit::check_assignment;
use articulate::model::NodeKind;
use articulate::{
    evaluate, Assignment, CourseCatalog, CourseId, Grade, NodeId, NodeStatus, PlanConstraints, Program, Rational,
    Transcript, TranscriptRecord,
};
use rand::rngs::StdRng;
use rand::Rng;

use super::{course_name, r, INSTITUTION};

/// Every map from courses to `terms` labeled terms, as term vectors.
pub fn assignments(n: usize, terms: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = terms.pow(n as u32);
    (0..total).map(move |mut code| {
        let mut v = vec![0; n];
        for slot in v.iter_mut() {
            *slot = code % terms;
            code /= terms;
        }
        v
    })
}

pub fn term_ok(
    members: &[usize],
    hours: &[Rational],
    c: &PlanConstraints,
    toxic: &[(usize, usize)],
    counting: bool,
) -> bool {
    if let (true, Some(k)) = (counting, c.exact_courses_per_term) {
        if members.len() != k as usize {
            return false;
        }
    } else {
        let load: Rational = members.iter().map(|i| hours[*i]).sum();
        if load < c.min_credits_per_term || load > c.max_credits_per_term {
            return false;
        }
        let cap = if counting {
            c.max_courses_per_term
        } else {
            [c.exact_courses_per_term, c.max_courses_per_term]
                .into_iter()
                .flatten()
                .min()
        };
        if cap.is_some_and(|k| members.len() > k as usize) {
            return false;
        }
    }
    !toxic.iter().any(|(a, b)| members.contains(a) && members.contains(b))
}

pub fn assignment_ok(
    f: &[usize],
    terms: usize,
    hours: &[Rational],
    edges: &[(usize, usize)],
    c: &PlanConstraints,
    toxic: &[(usize, usize)],
    counting: bool,
) -> bool {
    if edges.iter().any(|(p, q)| f[*p] >= f[*q]) {
        return false;
    }
    (0..terms).all(|t| {
        let members: Vec<usize> = (0..f.len()).filter(|i| f[*i] == t).collect();
        term_ok(&members, hours, c, toxic, counting)
    })
}

pub fn brute_count(
    n: usize,
    hours: &[Rational],
    edges: &[(usize, usize)],
    c: &PlanConstraints,
    toxic: &[(usize, usize)],
) -> u64 {
    let terms = c.num_terms as usize;
    assignments(n, terms)
        .filter(|f| assignment_ok(f, terms, hours, edges, c, toxic, true))
        .count() as u64
}

pub fn toxic_ids(toxic: &[(usize, usize)]) -> Vec<(CourseId, CourseId)> {
    toxic
        .iter()
        .map(|(a, b)| (CourseId::new(course_name(*a)), CourseId::new(course_name(*b))))
        .collect()
}

pub fn random_constraints(rng: &mut StdRng, n: usize) -> (PlanConstraints, Vec<(usize, usize)>) {
    let mut toxic = Vec::new();
    if n >= 2 && rng.gen_bool(0.3) {
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        toxic.push((a.min(b), a.max(b)));
    }
    let c = PlanConstraints {
        num_terms: rng.gen_range(1..=4),
        min_credits_per_term: if rng.gen_bool(0.3) {
            r(rng.gen_range(1..=4))
        } else {
            r(0)
        },
        max_credits_per_term: r(rng.gen_range(4..=10)),
        exact_courses_per_term: if rng.gen_bool(0.25) {
            Some(rng.gen_range(1..=3))
        } else {
            None
        },
        max_courses_per_term: if rng.gen_bool(0.25) {
            Some(rng.gen_range(1..=3))
        } else {
            None
        },
        toxic_pairs: toxic_ids(&toxic),
    };
    (c, toxic)
}

pub struct Best {
    pub terms: usize,
    pub load: Rational,
    pub key: Vec<usize>,
}

/// Fewest terms, then smallest maximum load, then smallest term vector.
pub fn brute_plan(
    n: usize,
    hours: &[Rational],
    edges: &[(usize, usize)],
    c: &PlanConstraints,
    toxic: &[(usize, usize)],
) -> Option<Best> {
    for terms in 1..=c.num_terms as usize {
        let mut best: Option<Best> = None;
        for f in assignments(n, terms) {
            if (0..terms).any(|t| !f.contains(&t)) || !assignment_ok(&f, terms, hours, edges, c, toxic, false) {
                continue;
            }
            let load = (0..terms)
                .map(|t| (0..n).filter(|i| f[*i] == t).map(|i| hours[i]).sum::<Rational>())
                .max()
                .unwrap();
            let better = match &best {
                None => true,
                Some(b) => (load, &f) < (b.load, &b.key),
            };
            if better {
                best = Some(Best { terms, load, key: f });
            }
        }
        if best.is_some() {
            return best;
        }
    }
    None
}

/// Whether some valid assignment satisfies the root, by enumeration.
pub fn brute_satisfiable(p: &Program, t: &Transcript) -> bool {
    fn go(i: usize, p: &Program, t: &Transcript, leaves: &[NodeId], partial: &mut Vec<(usize, NodeId)>) -> bool {
        let a: Assignment = partial.iter().cloned().collect();
        if check_assignment(&p.root, t, &a).is_err() {
            return false;
        }
        if i == t.len() {
            return evaluate(&p.root, &a, t).unwrap()[&p.root.id] == NodeStatus::Satisfied;
        }
        for leaf in leaves {
            partial.push((i, leaf.clone()));
            if go(i + 1, p, t, leaves, partial) {
                return true;
            }
            partial.pop();
        }
        go(i + 1, p, t, leaves, partial)
    }
    let leaves: Vec<NodeId> = p
        .root
        .leaves()
        .into_iter()
        .filter(|l| !l.shareable && matches!(l.kind, NodeKind::Course { .. } | NodeKind::Credits { .. }))
        .map(|l| l.id.clone())
        .collect();
    go(0, p, t, &leaves, &mut Vec::new())
}

pub fn closure(cat: &CourseCatalog, chosen: &BTreeSet<CourseId>, completed: &BTreeSet<CourseId>) -> BTreeSet<CourseId> {
    let mut out = chosen.clone();
    loop {
        let more: BTreeSet<CourseId> = out
            .iter()
            .flat_map(|c| cat.course(c.as_str()).unwrap().prerequisites.iter().cloned())
            .filter(|p| !completed.contains(p))
            .collect();
        let before = out.len();
        out.extend(more);
        if out.len() == before {
            return out;
        }
    }
}

/// Cheapest completion by enumerating every subset of `pool`.
pub fn brute_completion(p: &Program, t: &Transcript, cat: &CourseCatalog, pool: &[CourseId]) -> Option<Rational> {
    let completed = t.passed_courses();
    let mut best: Option<Rational> = None;
    for mask in 0u32..(1 << pool.len()) {
        let chosen: BTreeSet<CourseId> = (0..pool.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| pool[i].clone())
            .collect();
        let all = closure(cat, &chosen, &completed);
        let cost: Rational = all.iter().map(|c| cat.credit_hours(c.as_str()).unwrap()).sum();
        if best.is_some_and(|b| b <= cost) {
            continue;
        }
        let mut ext = t.clone();
        for c in &all {
            ext.records.push(TranscriptRecord::course(
                c.as_str(),
                INSTITUTION,
                Grade::A,
                cat.credit_hours(c.as_str()).unwrap(),
            ));
        }
        if brute_satisfiable(p, &ext) {
            best = Some(cost);
        }
    }
    best
}

/// Courses the student may still take: every referenced course except
/// those already on the transcript with full hours and a grade meeting every
/// leaf that names them.
pub fn retake_pool(p: &Program, t: &Transcript, cat: &CourseCatalog) -> Vec<CourseId> {
    let mut named: Vec<(CourseId, Grade)> = Vec::new();
    for leaf in p.root.leaves() {
        match &leaf.kind {
            NodeKind::Course { course_id, min_grade } => named.push((course_id.clone(), *min_grade)),
            NodeKind::Credits {
                course_pool, min_grade, ..
            } => named.extend(course_pool.iter().map(|c| (c.clone(), *min_grade))),
            _ => {}
        }
    }
    let referenced: BTreeSet<CourseId> = named.iter().map(|(c, _)| c.clone()).collect();
    referenced
        .into_iter()
        .filter(|c| {
            let covered = t.records.iter().any(|r| match r {
                TranscriptRecord::Course(rec) => {
                    &rec.course_id == c
                        && rec.credit_hours >= cat.credit_hours(c.as_str()).unwrap()
                        && named.iter().filter(|(n, _)| n == c).all(|(_, g)| rec.grade >= *g)
                }
                _ => false,
            });
            !covered
        })
        .collect()
}

/// Fewest terms of any valid schedule, by depth-first enumeration of term
/// assignments with partial-assignment pruning.
pub fn min_terms(
    hours: &[Rational],
    edges: &[(usize, usize)],
    c: &PlanConstraints,
    toxic: &[(usize, usize)],
) -> Option<usize> {
    fn go(
        i: usize,
        f: &mut Vec<usize>,
        terms: usize,
        hours: &[Rational],
        edges: &[(usize, usize)],
        c: &PlanConstraints,
        toxic: &[(usize, usize)],
    ) -> bool {
        let n = hours.len();
        if i == n {
            return (0..terms).all(|t| f.contains(&t)) && assignment_ok(f, terms, hours, edges, c, toxic, false);
        }
        for t in 0..terms {
            f.push(t);
            let placed = |x: usize| x <= i;
            let order_ok = edges
                .iter()
                .filter(|(p, q)| placed(*p) && placed(*q))
                .all(|(p, q)| f[*p] < f[*q]);
            let members: Vec<usize> = (0..=i).filter(|x| f[*x] == t).collect();
            let load: Rational = members.iter().map(|x| hours[*x]).sum();
            let cap = [c.exact_courses_per_term, c.max_courses_per_term]
                .into_iter()
                .flatten()
                .min();
            let fits = load <= c.max_credits_per_term
                && cap.is_none_or(|k| members.len() <= k as usize)
                && !toxic.iter().any(|(a, b)| members.contains(a) && members.contains(b));
            if order_ok && fits && go(i + 1, f, terms, hours, edges, c, toxic) {
                return true;
            }
            f.pop();
        }
        false
    }
    (1..=c.num_terms as usize).find(|&terms| go(0, &mut Vec::new(), terms, hours, edges, c, toxic))
}
