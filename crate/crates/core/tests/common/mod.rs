//! Random instance generators and small oracles shared by the integration
//! tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use articulate::model::{Course, ElectiveLevel, ElectiveRecord};
use articulate::{
    CourseCatalog, CourseId, Credential, Grade, InstitutionId, NodeKind, Program, ProgramId, Rational,
    RequirementNode as N, Transcript, TranscriptRecord,
};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub mod oracle;

pub const INSTITUTION: &str = "U";
pub const GRADES: [Grade; 5] = [Grade::F, Grade::D, Grade::C, Grade::B, Grade::A];

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn r(n: i64) -> Rational {
    Rational::integer(n)
}

pub fn course_name(i: usize) -> String {
    format!("C{i}")
}

/// Credit hours of course `Ci` in generated instances.
pub fn course_hours(i: usize) -> Rational {
    match i % 5 {
        0 => r(3),
        1 => r(4),
        2 => r(1),
        3 => Rational::new(3, 2),
        _ => r(3),
    }
}

pub struct TreeGen<'a> {
    pub rng: &'a mut StdRng,
    pub courses: usize,
    pub max_leaves: usize,
    leaves: usize,
    next_id: usize,
}

impl<'a> TreeGen<'a> {
    pub fn new(rng: &'a mut StdRng, courses: usize, max_leaves: usize) -> Self {
        TreeGen {
            rng,
            courses,
            max_leaves,
            leaves: 0,
            next_id: 0,
        }
    }

    fn id(&mut self) -> String {
        self.next_id += 1;
        format!("n{:02}", self.next_id)
    }

    fn course(&mut self) -> String {
        course_name(self.rng.gen_range(0..self.courses))
    }

    fn grade(&mut self) -> Grade {
        *[Grade::D, Grade::D, Grade::C, Grade::B].choose(self.rng).unwrap()
    }

    pub fn leaf(&mut self) -> N {
        self.leaves += 1;
        let id = self.id();
        let mut node = match self.rng.gen_range(0..10) {
            0..=5 => {
                let (c, g) = (self.course(), self.grade());
                N::course(&id, &c, g)
            }
            6..=8 => {
                let size = self.rng.gen_range(1..=4);
                let pool: BTreeSet<String> = (0..size).map(|_| self.course()).collect();
                let pool: Vec<&str> = pool.iter().map(String::as_str).collect();
                let min = Rational::new(self.rng.gen_range(2..=16), 2);
                let mut n = N::credits(&id, "pool", min, &pool);
                if let NodeKind::Credits {
                    accepts_electives,
                    min_grade,
                    ..
                } = &mut n.kind
                {
                    *accepts_electives = self.rng.gen_bool(0.3);
                    *min_grade = *[Grade::D, Grade::C].choose(self.rng).unwrap();
                }
                n
            }
            _ => N::exam(&id, "EX", r(self.rng.gen_range(1..=3) * 20)),
        };
        if self.rng.gen_bool(0.12) {
            node = node.shared();
        }
        node
    }

    pub fn node(&mut self, depth: usize) -> N {
        if depth == 0 || self.leaves + 2 > self.max_leaves || self.rng.gen_bool(0.35) {
            return self.leaf();
        }
        let id = self.id();
        let want = self.rng.gen_range(1..=4);
        let mut children = Vec::new();
        for _ in 0..want {
            if self.leaves >= self.max_leaves {
                break;
            }
            children.push(self.node(depth - 1));
        }
        if children.is_empty() {
            children.push(self.leaf());
        }
        match self.rng.gen_range(0..3) {
            0 => N::all(&id, "all", children),
            1 => N::any(&id, "any", children),
            _ => {
                let k = self.rng.gen_range(1..=children.len() as u32);
                N::choose(&id, "choose", k, children)
            }
        }
    }
}

pub fn program(root: N) -> Program {
    Program {
        id: ProgramId::new("P"),
        institution_id: InstitutionId::new(INSTITUTION),
        credential: Credential::Bachelor,
        title: "Generated".into(),
        root,
        total_credit_hours: r(120),
    }
}

pub fn random_program(rng: &mut StdRng, courses: usize, max_leaves: usize) -> Program {
    let depth = rng.gen_range(1..=3);
    let root = TreeGen::new(rng, courses, max_leaves).node(depth);
    program(root)
}

pub fn random_record(rng: &mut StdRng, courses: usize) -> TranscriptRecord {
    match rng.gen_range(0..12) {
        0 => TranscriptRecord::exam("EX", r(rng.gen_range(0..=6) * 10)),
        1 => TranscriptRecord::Elective(ElectiveRecord {
            elective_level: if rng.gen_bool(0.5) {
                ElectiveLevel::Lower
            } else {
                ElectiveLevel::Upper
            },
            source_course_id: CourseId::new("X100"),
            institution_id: InstitutionId::new(INSTITUTION),
            grade: *GRADES.choose(rng).unwrap(),
            term_index: 0,
            credit_hours: r(rng.gen_range(1..=4)),
        }),
        _ => {
            let i = rng.gen_range(0..courses);
            TranscriptRecord::course(
                &course_name(i),
                INSTITUTION,
                *GRADES.choose(rng).unwrap(),
                course_hours(i),
            )
        }
    }
}

pub fn random_transcript(rng: &mut StdRng, courses: usize, max_records: usize) -> Transcript {
    let n = rng.gen_range(0..=max_records);
    Transcript::new((0..n).map(|_| random_record(rng, courses)).collect())
}

/// Catalog with courses `C0..C{n-1}` and the given prerequisite edges
/// (prerequisite, course).
pub fn catalog(n: usize, hours: impl Fn(usize) -> Rational, edges: &[(usize, usize)]) -> CourseCatalog {
    let mut prereqs: BTreeMap<usize, BTreeSet<CourseId>> = BTreeMap::new();
    for (p, c) in edges {
        prereqs.entry(*c).or_default().insert(CourseId::new(course_name(*p)));
    }
    CourseCatalog::new(
        (0..n).map(|i| Course {
            id: CourseId::new(course_name(i)),
            institution_id: InstitutionId::new(INSTITUTION),
            subject_code: "C".into(),
            number: format!("{i}"),
            title: format!("Course {i}"),
            credit_hours: hours(i),
            prerequisites: prereqs.remove(&i).unwrap_or_default(),
        }),
        [],
    )
}

/// Random DAG on `n` courses: edges only from lower to higher index.
pub fn random_dag(rng: &mut StdRng, n: usize, density: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for c in 0..n {
        for p in 0..c {
            if rng.gen_bool(density) {
                edges.push((p, c));
            }
        }
    }
    edges
}

pub fn ids(v: impl IntoIterator<Item = usize>) -> BTreeSet<CourseId> {
    v.into_iter().map(|i| CourseId::new(course_name(i))).collect()
}
