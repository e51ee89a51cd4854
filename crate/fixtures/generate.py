#!/usr/bin/env python3
"""Regenerates the JSON fixtures in this directory.

Output is deterministic. Run from any directory:

    python3 fixtures/generate.py
"""
import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent


def write(rel, value):
    path = ROOT / rel
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(value, indent=2) + "\n")


def inst(id, name, kind):
    return {"id": id, "name": name, "kind": kind}


def course(id, inst_id, subject, number, title, hours, prereqs=()):
    c = {
        "id": id,
        "institution_id": inst_id,
        "subject_code": subject,
        "number": number,
        "title": title,
        "credit_hours": hours,
    }
    if prereqs:
        c["prerequisites"] = sorted(prereqs)
    return c


def leaf(id, course_id, grade="D", label=None):
    return {"id": id, "label": label or course_id, "kind": "COURSE", "course_id": course_id, "min_grade": grade}


def exam(id, exam_id, score, label=None):
    return {"id": id, "label": label or exam_id, "kind": "EXAM", "exam_id": exam_id, "min_score": score}


def credits(id, label, hours, pool, electives=False, grade="D"):
    n = {"id": id, "label": label, "kind": "CREDITS", "min_credit_hours": hours, "course_pool": sorted(pool), "min_grade": grade}
    if electives:
        n["accepts_electives"] = True
    return n


def comp(kind, id, label, children, k=None):
    n = {"id": id, "label": label, "kind": kind, "children": children}
    if k is not None:
        n["choose_k"] = k
    return n


def program(id, inst_id, credential, title, total, root):
    return {
        "id": id,
        "institution_id": inst_id,
        "credential": credential,
        "title": title,
        "total_credit_hours": total,
        "root": root,
    }


def rule(src, target, disposition, target_course=None, date="2021-08-15"):
    r = {"source_course_id": src, "target_institution_id": target, "disposition": disposition, "evaluated_on": date}
    if target_course:
        r["target_course_id"] = target_course
    return r


def rec(course_id, inst_id, grade, hours, term=0):
    return {"course_id": course_id, "institution_id": inst_id, "grade": grade, "term_index": term, "credit_hours": hours}


def gen_ed():
    v = "valley-cc"
    courses = [
        course("VCC-MAT-142", v, "MAT", "142", "Introductory Statistics", 3),
        course("VCC-MAT-151", v, "MAT", "151", "Precalculus", 4),
        course("VCC-MAT-220", v, "MAT", "220", "Calculus I", 4, ["VCC-MAT-151"]),
        course("VCC-ENG-101", v, "ENG", "101", "Composition I", 3),
        course("VCC-ENG-102", v, "ENG", "102", "Composition II", 3, ["VCC-ENG-101"]),
        course("VCC-HUM-101", v, "HUM", "101", "Introduction to the Humanities", 3),
        course("VCC-PHI-101", v, "PHI", "101", "Introduction to Philosophy", 3),
        course("VCC-HIS-101", v, "HIS", "101", "World History", 3),
        course("VCC-ART-100", v, "ART", "100", "Art Appreciation", 3),
        course("VCC-MUS-100", v, "MUS", "100", "Music Appreciation", 3),
        course("VCC-ART-111", v, "ART", "111", "Drawing I", 3),
    ]
    root = comp("ALL", "gen-ed", "General Education Core", [
        comp("ANY", "math-core", "Math Core", [
            leaf("math-stat", "VCC-MAT-142", "C", "Statistics"),
            leaf("math-precalc", "VCC-MAT-151", "C", "Precalculus"),
            leaf("math-calc", "VCC-MAT-220", "C", "Calculus I"),
            comp("ANY", "math-placement", "Math placement exam", [
                exam("placement-algebra", "MATH-PLACE-ALG", 75, "Algebra placement"),
                exam("placement-calculus", "MATH-PLACE-CALC", 60, "Calculus readiness placement"),
            ]),
        ]),
        comp("CHOOSE", "humanities-core", "Humanities Core", [
            leaf("hum-intro", "VCC-HUM-101"),
            leaf("hum-philosophy", "VCC-PHI-101"),
            leaf("hum-history", "VCC-HIS-101"),
        ], k=2),
        comp("ALL", "writing-core", "Writing Core", [
            leaf("writing-1", "VCC-ENG-101", "C"),
            leaf("writing-2", "VCC-ENG-102", "C"),
        ]),
        comp("ANY", "fine-art-core", "Fine Art Core", [
            leaf("art-appreciation", "VCC-ART-100"),
            leaf("music-appreciation", "VCC-MUS-100"),
            leaf("art-drawing", "VCC-ART-111"),
        ]),
    ])
    write("gen_ed/catalog/valley.json", {
        "institutions": [inst(v, "Valley Community College", "COMMUNITY_COLLEGE")],
        "courses": courses,
        "exams": [
            {"id": "MATH-PLACE-ALG", "title": "Algebra Placement Exam"},
            {"id": "MATH-PLACE-CALC", "title": "Calculus Readiness Exam"},
        ],
        "programs": [program("vcc-gen-ed", v, "ASSOCIATE", "General Education Core", 35, root)],
    })
    write("gen_ed/transcripts/complete.json", {"records": [
        rec("VCC-MAT-142", v, "B", 3, 0),
        rec("VCC-ENG-101", v, "A", 3, 0),
        rec("VCC-HUM-101", v, "C", 3, 0),
        rec("VCC-ENG-102", v, "B", 3, 1),
        rec("VCC-PHI-101", v, "B", 3, 1),
        rec("VCC-MUS-100", v, "A", 3, 1),
        rec("VCC-HIS-101", v, "A", 3, 2),
    ]})
    write("gen_ed/transcripts/exam_only.json", {"records": [
        {"exam_id": "MATH-PLACE-CALC", "score": 72, "term_index": 0},
    ]})


def julia():
    cnm, pima, csu, fru = "cnm", "pima", "csu", "front-range"
    sending = [
        course("CNM-CSCI-1151", cnm, "CSCI", "1151", "Programming I", 4),
        course("CNM-CSCI-1152", cnm, "CSCI", "1152", "Programming II", 4, ["CNM-CSCI-1151"]),
        course("CNM-CSCI-2115", cnm, "CSCI", "2115", "Mathematical Foundations of Computing", 3),
        course("CNM-MATH-1512", cnm, "MATH", "1512", "Calculus I", 4),
        course("PIMA-CIS-120", pima, "CIS", "120", "Computer Networking Fundamentals", 3),
    ]
    cnm_as = program("cnm-cs-as", cnm, "ASSOCIATE", "Computer Science AS", 60, comp("ALL", "as-core", "Core", [
        leaf("as-prog-1", "CNM-CSCI-1151", "C"),
        leaf("as-prog-2", "CNM-CSCI-1152", "C"),
        leaf("as-found", "CNM-CSCI-2115", "C"),
        leaf("as-calc", "CNM-MATH-1512", "C"),
    ]))

    def c(n, title, pre=(), hours=4, subj="CS"):
        return course(f"CSU-{subj}-{n}", csu, subj, str(n), title, hours, [f"CSU-{p}" for p in pre])

    csu_courses = [
        c(163, "Java for CS Majors I"),
        c(164, "Java for CS Majors II", ["CS-163"]),
        c(165, "Data Structures", ["CS-164"]),
        c(220, "Discrete Structures", ["CS-164"]),
        c(253, "Software Development with C++", ["CS-165"]),
        c(270, "Computer Organization", ["CS-165"]),
        c(320, "Algorithms", ["CS-220", "CS-165"]),
        c(370, "Operating Systems", ["CS-270", "CS-253"]),
        c(414, "Object-Oriented Design", ["CS-253"], 3),
        c(440, "Artificial Intelligence", ["CS-320"], 3),
        c(457, "Computer Networks", ["CS-370"], 3),
        c(464, "Principles of Human-Computer Interaction", ["CS-253"], 3),
        c(160, "Calculus for Physical Scientists I", subj="MATH"),
        c(161, "Calculus for Physical Scientists II", ["MATH-160"], subj="MATH"),
    ]
    core = [163, 164, 165, 220, 253, 270, 320, 370]
    csu_bs = program("csu-cs-bs", csu, "BACHELOR", "Computer Science BS", 120, comp("ALL", "cs-bs", "Computer Science BS", [
        comp("ALL", "cs-core", "Major core", [leaf(f"core-{n}", f"CSU-CS-{n}", "C") for n in core]),
        comp("ALL", "math", "Mathematics", [
            leaf("calc-1", "CSU-MATH-160", "C"),
            leaf("calc-2", "CSU-MATH-161", "C"),
        ]),
        credits("upper-division", "Upper-division CS electives", 9,
                [f"CSU-CS-{n}" for n in (414, 440, 457, 464)], grade="C"),
    ]))

    def f(subj, n, title, pre=(), hours=3):
        return course(f"FRU-{subj}-{n}", fru, subj, str(n), title, hours, [f"FRU-{p}" for p in pre])

    fru_courses = [
        f("CSC", 1410, "Programming Fundamentals", hours=4),
        f("CSC", 1420, "Object-Oriented Programming", ["CSC-1410"], 4),
        f("CSC", 2400, "Data Structures", ["CSC-1420"]),
        f("CSC", 2600, "Systems Programming", ["CSC-2400"]),
        f("CSC", 3300, "Algorithms", ["CSC-2400", "MTH-2140"]),
        f("CSC", 3500, "Software Engineering", ["CSC-2400"]),
        f("CSC", 1000, "Computing Elective", hours=3),
        f("MTH", 2140, "Discrete Mathematics"),
        f("MTH", 1410, "Calculus I", hours=4),
    ]
    fru_bs = program("fru-cs-bs", fru, "BACHELOR", "Computer Science BS", 120, comp("ALL", "fru-bs", "Computer Science BS", [
        comp("ALL", "fru-core", "Major core", [
            leaf("fru-prog-1", "FRU-CSC-1410", "C"),
            leaf("fru-prog-2", "FRU-CSC-1420", "C"),
            leaf("fru-ds", "FRU-CSC-2400", "C"),
            leaf("fru-sys", "FRU-CSC-2600", "C"),
            leaf("fru-alg", "FRU-CSC-3300", "C"),
            leaf("fru-se", "FRU-CSC-3500", "C"),
            leaf("fru-discrete", "FRU-MTH-2140", "C"),
        ]),
        comp("ANY", "fru-math", "Calculus", [leaf("fru-calc", "FRU-MTH-1410", "C")]),
        credits("fru-free", "Free electives", 6, ["FRU-CSC-1000"], electives=True),
    ]))

    write("julia/catalog/institutions.json", {"institutions": [
        inst(cnm, "Central New Mexico Community College", "COMMUNITY_COLLEGE"),
        inst(pima, "Pima Community College", "COMMUNITY_COLLEGE"),
        inst(csu, "Colorado State University", "UNIVERSITY"),
        inst(fru, "Front Range University", "UNIVERSITY"),
    ]})
    write("julia/catalog/sending.json", {"courses": sending, "programs": [cnm_as]})
    write("julia/catalog/csu.json", {"courses": csu_courses, "programs": [csu_bs]})
    write("julia/catalog/front_range.json", {"courses": fru_courses, "programs": [fru_bs]})
    write("julia/catalog/equivalences.json", {"equivalences": [
        rule("CNM-CSCI-1151", csu, "elective_lower"),
        rule("PIMA-CIS-120", csu, "elective_lower"),
        rule("CNM-MATH-1512", csu, "denied"),
        rule("CNM-CSCI-1151", fru, "equivalent", "FRU-CSC-1410", "2020-03-02"),
        rule("CNM-CSCI-1152", fru, "equivalent", "FRU-CSC-1420", "2020-03-02"),
        rule("CNM-CSCI-2115", fru, "equivalent", "FRU-MTH-2140", "2020-03-02"),
        rule("PIMA-CIS-120", fru, "elective_lower", date="2019-11-20"),
    ]})
    write("julia/transcript.json", {"records": [
        rec("CNM-CSCI-1151", cnm, "A", 4, 0),
        rec("CNM-CSCI-2115", cnm, "B", 3, 0),
        rec("CNM-CSCI-1152", cnm, "A", 4, 1),
        rec("PIMA-CIS-120", pima, "B", 3, 2),
    ]})


def mini_catalog():
    cc, u = "north-cc", "north-u"
    cc_courses = [course(f"NCC-{n}", cc, "CS", str(n), t, h, p) for n, t, h, p in [
        (101, "Intro to Computing", 3, []),
        (102, "Programming", 4, ["NCC-101"]),
        (110, "College Algebra", 3, []),
        (120, "Composition", 3, []),
        (130, "Statistics", 3, ["NCC-110"]),
        (150, "Web Design", 3, []),
    ]]
    u_courses = [course(f"NU-{n}", u, "CS", str(n), t, h, p) for n, t, h, p in [
        (100, "Computing Concepts", 3, []),
        (110, "Programming I", 4, []),
        (210, "Programming II", 4, ["NU-110"]),
        (220, "Statistics", 3, []),
        (300, "Databases", 3, ["NU-210"]),
        (400, "Capstone", 3, ["NU-300"]),
    ]]
    write("mini_catalog/catalog/catalog.json", {
        "institutions": [inst(cc, "North Community College", "COMMUNITY_COLLEGE"), inst(u, "North University", "UNIVERSITY")],
        "courses": cc_courses + u_courses,
        "programs": [
            program("ncc-as", cc, "ASSOCIATE", "Computing AS", 60, comp("ALL", "as", "Computing AS", [
                leaf("as-intro", "NCC-101"), leaf("as-prog", "NCC-102", "C"),
                comp("ANY", "as-math", "Math", [leaf("as-alg", "NCC-110"), leaf("as-stat", "NCC-130")]),
                leaf("as-comp", "NCC-120"),
            ])),
            program("nu-bs", u, "BACHELOR", "Computing BS", 120, comp("ALL", "bs", "Computing BS", [
                leaf("bs-prog-1", "NU-110", "C"), leaf("bs-prog-2", "NU-210", "C"), leaf("bs-stat", "NU-220"),
                leaf("bs-db", "NU-300", "C"), leaf("bs-cap", "NU-400", "C"),
                credits("bs-free", "Free electives", 6, ["NU-100"], electives=True),
            ])),
        ],
        "equivalences": [
            rule("NCC-102", u, "equivalent", "NU-110"),
            rule("NCC-130", u, "equivalent", "NU-220"),
            rule("NCC-101", u, "elective_lower"),
            rule("NCC-150", u, "denied"),
        ],
    })
    write("mini_catalog/transcript.json", {"records": [
        rec("NCC-101", cc, "A", 3, 0), rec("NCC-110", cc, "B", 3, 0), rec("NCC-102", cc, "B", 4, 1),
        rec("NCC-130", cc, "C", 3, 1), rec("NCC-150", cc, "A", 3, 1), rec("NCC-120", cc, "B", 3, 2),
    ]})


def two_programs():
    cc, ua, ub = "alpha-cc", "univ-a", "univ-b"
    cc_courses = [course(f"ACC-{100 + i}", cc, "GEN", str(100 + i), f"Foundations {i}", 3) for i in range(1, 11)]
    a_courses = [course(f"UA-{100 + i}", ua, "GEN", str(100 + i), f"Course {i}", 3) for i in range(1, 21)]
    b_courses = [course(f"UB-{100 + i}", ub, "GEN", str(100 + i), f"Course {i}", 3) for i in range(1, 21)]
    write("two_programs/catalog/catalog.json", {
        "institutions": [inst(cc, "Alpha Community College", "COMMUNITY_COLLEGE"),
                         inst(ua, "University A", "UNIVERSITY"), inst(ub, "University B", "UNIVERSITY")],
        "courses": cc_courses + a_courses + b_courses,
        "programs": [
            program("program-a", ua, "BACHELOR", "Program A", 120,
                    comp("ALL", "a", "Program A", [leaf(f"a{i}", f"UA-{100 + i}") for i in range(1, 21)])),
            program("program-b", ub, "BACHELOR", "Program B", 120,
                    comp("ALL", "b", "Program B", [leaf(f"b{i}", f"UB-{100 + i}") for i in range(1, 21)])),
        ],
        "equivalences": [rule(f"ACC-{100 + i}", ua, "equivalent", f"UA-{100 + i}") for i in range(1, 11)]
        + [rule(f"ACC-{100 + i}", ub, "denied") for i in range(1, 6)],
    })
    write("two_programs/transcript.json", {"records": [
        rec(f"ACC-{100 + i}", cc, "B", 3, (i - 1) // 5) for i in range(1, 11)]})


def fifty_programs():
    rng = random.Random(50)
    cc = "metro-cc"
    cc_courses = [course(f"MCC-{100 + i}", cc, "GEN", str(100 + i), f"Transfer Course {i}", 3) for i in range(12)]
    institutions = [inst(cc, "Metro Community College", "COMMUNITY_COLLEGE")]
    courses, programs, rules = list(cc_courses), [], []
    for u in range(5):
        uid = f"univ-{u}"
        institutions.append(inst(uid, f"University {u}", "UNIVERSITY"))
        ucourses = []
        for i in range(24):
            pre = [f"U{u}-{100 + i - 6}"] if i >= 6 and rng.random() < 0.5 else []
            ucourses.append(course(f"U{u}-{100 + i}", uid, "GEN", str(100 + i), f"Course {i}", rng.choice([3, 3, 4]), pre))
        courses += ucourses
        for cc_course in cc_courses:
            roll = rng.random()
            if roll < 0.4:
                rules.append(rule(cc_course["id"], uid, "equivalent", rng.choice(ucourses)["id"]))
            elif roll < 0.65:
                rules.append(rule(cc_course["id"], uid, "elective_lower"))
            elif roll < 0.75:
                rules.append(rule(cc_course["id"], uid, "denied"))
        ids = [c["id"] for c in ucourses]
        for p in range(10):
            picks = rng.sample(ids, 10)
            root = comp("ALL", "root", "Major", [
                comp("ALL", "core", "Core", [leaf(f"core-{j}", c, "C") for j, c in enumerate(picks[:5])]),
                comp("CHOOSE", "pick", "Options", [leaf(f"opt-{j}", c) for j, c in enumerate(picks[5:8])], k=2),
                credits("pool", "Electives", 6, picks[8:] + [picks[0]], electives=rng.random() < 0.5),
            ])
            programs.append(program(f"u{u}-p{p}", uid, "BACHELOR", f"University {u} Program {p}", 120, root))
    write("fifty_programs/catalog/catalog.json", {
        "institutions": institutions, "courses": courses, "programs": programs, "equivalences": rules})
    write("fifty_programs/transcript.json", {"records": [
        rec(c["id"], cc, rng.choice(["A", "B", "C"]), 3, i // 4) for i, c in enumerate(cc_courses[:8])]})


def rules35():
    u = "state-u"
    courses = [course(f"SU-{100 + i}", u, "GEN", str(100 + i), f"Course {i}", 3) for i in range(80)]
    children = []
    for r in range(35):
        a, b, c = (f"SU-{100 + (3 * r + j) % 80}" for j in range(3))
        if r % 3 == 0:
            child = comp("ANY", f"rule-{r}", f"Rule {r}", [
                leaf(f"rule-{r}-a", a),
                comp("ALL", f"rule-{r}-pair", f"Rule {r} pair", [leaf(f"rule-{r}-b", b, "C"), leaf(f"rule-{r}-c", c, "C")]),
            ])
        elif r % 3 == 1:
            child = comp("ALL", f"rule-{r}", f"Rule {r}", [
                leaf(f"rule-{r}-a", a),
                comp("ANY", f"rule-{r}-alt", f"Rule {r} alternatives", [leaf(f"rule-{r}-b", b), leaf(f"rule-{r}-c", c)]),
            ])
        else:
            child = comp("CHOOSE", f"rule-{r}", f"Rule {r}", [
                leaf(f"rule-{r}-a", a), leaf(f"rule-{r}-b", b),
                credits(f"rule-{r}-pool", f"Rule {r} pool", 3, [c, a]),
            ], k=1)
        children.append(child)
    write("rules35/catalog/rules35.json", {
        "institutions": [inst(u, "State University", "UNIVERSITY")],
        "courses": courses,
        "exams": [],
        "programs": [program("state-u-bs", u, "BACHELOR", "Thirty-Five Rule Degree", 240, comp("ALL", "root", "Degree", children))],
    })


def curriculum40():
    write("curriculum40.json", {
        "institutions": [inst("c40", "Forty Course College", "UNIVERSITY")],
        "courses": [course(f"K{i:02}", "c40", "K", f"{i:02}", f"Course {i}", 3) for i in range(40)],
    })


def loss():
    write("loss_assumptions.json", {
        "population": 17000000,
        "transfer_once_rate": "0.35",
        "transfer_twice_rate": "0.11",
        "lost_years_per_transfer": 1,
        "university_share": "1/2",
        "cost_model": {"annual_tuition_cc": 350000, "annual_tuition_univ": 1000000},
    })


def plans():
    write("plans/gen_ed_plan.json", {
        "curriculum": ["VCC-ENG-101", "VCC-ENG-102", "VCC-MAT-151", "VCC-MAT-220", "VCC-ART-100"],
        "completed": [],
        "constraints": {"num_terms": 4, "max_credits_per_term": 8},
        "plan": {
            "terms": [["VCC-ENG-101", "VCC-MAT-151"], ["VCC-ENG-102", "VCC-MAT-220"], ["VCC-ART-100"]],
            "term_credit_hours": [7, 7, 3],
            "total_credit_hours": 17,
        },
    })


if __name__ == "__main__":
    write("empty_transcript.json", {"records": []})
    gen_ed()
    julia()
    mini_catalog()
    two_programs()
    fifty_programs()
    rules35()
    curriculum40()
    loss()
    plans()
