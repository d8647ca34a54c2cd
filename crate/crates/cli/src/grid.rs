//! The acceptance grid: every criterion as a list of jobs and checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rbslab_core::category::{random_concrete_category, twisted_arrow, Nerve};
use rbslab_core::flags::{borel_pair, tits_complex, FlagSpace};
use rbslab_core::homology::{
    check_boundary_square, smith_normal_form, universal_coefficients_consistent, Coefficients, HomologyGroup,
    HomologyResult, IntMatrix,
};
use rbslab_core::rbs::{rbs_category, stabilization_functor};
use rbslab_core::ring::Ring;
use rbslab_core::{Caps, Result as LibResult};
use serde::Serialize;
use serde_json::{json, Value};

use crate::job::{parse_target, Command, JobSpec};
use crate::report::{Report, Status};
use crate::run::{fred_poset, run, target_category, Outcome, RunOptions, Stages};

/// Mod-p vanishing: `(ring, rank, p, max degree, degrees that must vanish)`.
pub const VANISHING: [(&str, usize, u32, usize, [i64; 2]); 3] =
    [("F2", 2, 2, 5, [1, 4]), ("F3", 2, 3, 3, [1, 2]), ("F2", 3, 2, 3, [1, 2])];

/// Tits complexes with the rank of their top reduced homology.
pub const TITS: [(&str, usize, usize); 12] = [
    ("F2", 1, 1),
    ("F2", 2, 2),
    ("F2", 3, 8),
    ("F2", 4, 64),
    ("F3", 1, 1),
    ("F3", 2, 3),
    ("F3", 3, 27),
    ("F4", 2, 4),
    ("Z4", 1, 1),
    ("Z4", 2, 5),
    ("Z4", 3, 113),
    ("F2[t]/t^2", 2, 5),
];

/// Cofibre comparisons: `(ring, rank, p, max degree)`.
pub const COFIBRE: [(&str, usize, u32, usize); 5] =
    [("F2", 2, 2, 4), ("F2", 2, 3, 4), ("F3", 2, 2, 3), ("F3", 2, 3, 3), ("F2", 3, 2, 3)];

pub const COINVARIANTS: [(&str, usize); 3] = [("F2", 2), ("F3", 2), ("F2", 3)];

/// `H_1(RBS(F_q^2); Z)` for `q = 2, 3`.
pub const H1: [(&str, &str); 2] = [("F2", "0"), ("F3", "Z/2")];

pub const SNUG: [(&str, &str, &str); 3] = [
    ("1<2<3|4<5|6", "123456", "(123)(45)(6)"),
    ("1<2<3|4<5|6", "654321", "(6)(5)(4)(3)(2)(1)"),
    ("1<2<3|4<5|6", "12423456", "(12)(4)(23)(45)(6)"),
];

/// Twisted arrow targets other than the random categories.
pub const TWISTED: [(&str, Option<(&str, usize)>); 3] = [("rbs", Some(("F2", 2))), ("flags", Some(("F2", 3))), ("bz2", None)];

pub const RANDOM_CATEGORIES: usize = 5;
pub const RANDOM_MAX_MORPHISMS: usize = 12;

/// The first seeds whose random category fits in the morphism budget.
pub fn random_seeds() -> Vec<u64> {
    (0..)
        .filter(|&s| random_concrete_category(s, RANDOM_MAX_MORPHISMS).is_some_and(|c| c.num_morphisms() > c.num_objects()))
        .take(RANDOM_CATEGORIES)
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

pub const TITLES: [&str; 10] = [
    "mod-p vanishing of RBS homology",
    "Tits complex concentration",
    "RBS cofibre against the Borel pair",
    "vanishing line of the relative homology",
    "Steinberg coinvariants",
    "H1 against the abelianized quotient by E",
    "twisted arrow invariance",
    "ordered and partition combinatorics",
    "stabilization functor",
    "property suites",
];

struct Grid<'a> {
    base: &'a JobSpec,
    opts: &'a RunOptions,
    caps: Caps,
    checks: Vec<Check>,
}

impl<'a> Grid<'a> {
    fn job(&self, command: Command) -> JobSpec {
        JobSpec {
            caps: self.base.caps.clone(),
            ..JobSpec::new(command)
        }
    }

    fn ring_job(&self, command: Command, ring: &str, rank: usize, coeff: Option<&str>) -> JobSpec {
        JobSpec {
            ring: Some(ring.into()),
            rank: Some(rank),
            coeff: coeff.map(String::from),
            ..self.job(command)
        }
    }

    fn run(&self, job: &JobSpec) -> Report {
        let report = run(job, self.opts).unwrap_or_else(|e| panic!("grid job `{}` is invalid: {e}", job.command_line()));
        let note = if report.cache_hit == Some(true) { " (cached)" } else { "" };
        eprintln!("    {} -> {:?}{note}", job.command_line(), report.status);
        report
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, expected: impl Into<String>, actual: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            passed,
            expected: expected.into(),
            actual: actual.into(),
        });
    }

    /// Records a failed check when a job did not finish; returns whether
    /// it did.
    fn finished(&mut self, job: &JobSpec, report: &Report) -> bool {
        match report.status {
            Status::Ok | Status::Failed => true,
            Status::CapExceeded => {
                let err = report.result["error"].as_str().unwrap_or_default().to_string();
                self.check(job.command_line(), false, "job completes", format!("cap exceeded in `{}`: {err}", job.command_line()));
                false
            }
            Status::Error => {
                let err = report.result["error"].as_str().unwrap_or_default().to_string();
                self.check(job.command_line(), false, "job completes", format!("error: {err}"));
                false
            }
        }
    }

    /// A library computation inside the grid itself; errors become failed
    /// checks.
    fn inline<T>(&mut self, name: &str, r: LibResult<T>) -> Option<T> {
        match r {
            Ok(x) => Some(x),
            Err(e) => {
                let what = if e.is_cap_exceeded() { "cap exceeded" } else { "error" };
                self.check(name, false, "computation completes", format!("{what} in `{name}`: {e}"));
                None
            }
        }
    }
}

/// Reads a homology table written by [`crate::report::homology_table`].
pub fn table_to_result(v: &Value) -> HomologyResult {
    let coefficients = v["coefficients"].as_str().and_then(|c| c.parse().ok()).unwrap_or(Coefficients::Integers);
    let mut groups: Vec<HomologyGroup> = v["degrees"]
        .as_object()
        .map(|m| {
            m.iter()
                .map(|(d, g)| HomologyGroup {
                    degree: d.parse().unwrap_or_default(),
                    betti: g["betti"].as_u64().unwrap_or_default() as usize,
                    torsion: g["torsion"].as_array().map(|t| t.iter().filter_map(|x| x.as_u64()).collect()).unwrap_or_default(),
                    reliable: g["reliable"].as_bool().unwrap_or(false),
                })
                .collect()
        })
        .unwrap_or_default();
    groups.sort_by_key(|g| g.degree);
    HomologyResult {
        coefficients,
        reduced: v["reduced"].as_bool().unwrap_or(false),
        groups,
        reliable_up_to: v["reliable_up_to"].as_i64(),
    }
}

fn show(h: &HomologyResult) -> String {
    let parts: Vec<String> = h
        .groups
        .iter()
        .map(|g| format!("H{}={}{}", g.degree, g, if g.reliable { "" } else { "?" }))
        .collect();
    parts.join(" ")
}

fn criterion_1(g: &mut Grid) {
    for (ring, n, p, top, [lo, hi]) in VANISHING {
        let job = JobSpec {
            max_degree: Some(top),
            ..g.ring_job(Command::RbsHomology, ring, n, Some(&format!("F{p}")))
        };
        let r = g.run(&job);
        if !g.finished(&job, &r) {
            continue;
        }
        let h = table_to_result(&r.result["homology"]);
        let ok = (lo..=hi).all(|d| h.vanishes_in(d));
        g.check(format!("H_d(RBS({ring}^{n}); F{p})"), ok, format!("0 for {lo} <= d <= {hi}"), show(&h));
    }
}

fn criterion_2(g: &mut Grid) {
    for (ring, n, rank) in TITS {
        let job = g.ring_job(Command::Tits, ring, n, Some("Z"));
        let r = g.run(&job);
        if !g.finished(&job, &r) {
            continue;
        }
        let h = table_to_result(&r.result["homology"]);
        let ok = r.result["concentrated"] == json!(true) && h.betti(n as i64 - 2) == rank;
        g.check(
            format!("Tits({ring}^{n})"),
            ok,
            format!("free, concentrated in degree {} of rank {rank}", n as i64 - 2),
            show(&h),
        );
    }
}

fn cofibre_jobs(g: &Grid) -> Vec<(JobSpec, usize, u32)> {
    COFIBRE
        .iter()
        .map(|&(ring, n, p, top)| {
            let job = JobSpec {
                prime: Some(p),
                max_degree: Some(top),
                ..g.ring_job(Command::CofibreCheck, ring, n, None)
            };
            (job, n, p)
        })
        .collect()
}

fn criterion_3(g: &mut Grid) {
    for (job, _, _) in cofibre_jobs(g) {
        let r = g.run(&job);
        if !g.finished(&job, &r) {
            continue;
        }
        let rbs = table_to_result(&r.result["rbs_relative"]);
        let borel = table_to_result(&r.result["borel_pair"]);
        g.check(
            job.command_line(),
            r.status == Status::Ok,
            "equal dimensions in every exact degree",
            format!("rbs: {} / borel: {} / mismatches {}", show(&rbs), show(&borel), r.result["mismatches"]),
        );
    }
}

fn criterion_4(g: &mut Grid) {
    for (job, n, p) in cofibre_jobs(g) {
        let r = g.run(&job);
        if !g.finished(&job, &r) {
            continue;
        }
        let h = table_to_result(&r.result["rbs_relative"]);
        let ok = (0..n as i64 - 1).all(|d| h.vanishes_in(d));
        g.check(
            format!("H_d(RBS, ∂RBS; F{p}) for {} rank {n}", job.ring.as_deref().unwrap_or_default()),
            ok,
            format!("0 for d < {}", n - 1),
            show(&h),
        );
    }
}

fn criterion_5(g: &mut Grid) {
    for (ring, n) in COINVARIANTS {
        let job = g.ring_job(Command::Coinvariants, ring, n, Some("Z"));
        let r = g.run(&job);
        if !g.finished(&job, &r) {
            continue;
        }
        let co = &r.result["coinvariants"];
        g.check(
            format!("St({ring}^{n})_GL over Z"),
            co["zero"] == json!(true),
            "0",
            co["group"].as_str().unwrap_or_default(),
        );
    }
    // mod p the coinvariants are the relative homology in degree n - 1
    for (cofibre, n, p) in cofibre_jobs(g) {
        let ring = cofibre.ring.clone().unwrap_or_default();
        let job = g.ring_job(Command::Coinvariants, &ring, n, Some(&format!("F{p}")));
        let (rc, rr) = (g.run(&job), g.run(&cofibre));
        if !g.finished(&job, &rc) || !g.finished(&cofibre, &rr) {
            continue;
        }
        let dim = rc.result["coinvariants"]["rank"].as_u64().unwrap_or(u64::MAX) as usize;
        let h = table_to_result(&rr.result["rbs_relative"]);
        let deg = n as i64 - 1;
        let exact = h.group(deg).is_some_and(|x| x.reliable);
        g.check(
            format!("St({ring}^{n}) ⊗ F{p} coinvariants against H_{deg}(RBS, ∂RBS; F{p})"),
            exact && h.betti(deg) == dim,
            format!("dimension {dim}"),
            show(&h),
        );
    }
}

fn criterion_6(g: &mut Grid) {
    for (ring, expected) in H1 {
        let job = g.ring_job(Command::H1, ring, 2, None);
        let r = g.run(&job);
        if !g.finished(&job, &r) {
            continue;
        }
        let nerve = r.result["nerve_h1"].as_str().unwrap_or_default().to_string();
        let group = r.result["gl_mod_e_abelianized"].as_str().unwrap_or_default().to_string();
        g.check(
            format!("H1(RBS({ring}^2); Z)"),
            r.status == Status::Ok && nerve == expected && group == expected,
            format!("{expected} both ways"),
            format!("nerve {nerve}, group {group}"),
        );
    }
}

fn twisted_jobs(g: &Grid) -> Vec<JobSpec> {
    let mut jobs: Vec<JobSpec> = TWISTED
        .iter()
        .map(|&(t, ring)| {
            let mut j = g.job(Command::TwistedArrow);
            j.target = Some(t.into());
            j.coeff = Some("Z".into());
            j.max_degree = Some(3);
            if let Some((r, n)) = ring {
                j.ring = Some(r.into());
                j.rank = Some(n);
            }
            j
        })
        .collect();
    for seed in random_seeds() {
        let mut j = g.job(Command::TwistedArrow);
        j.target = Some(format!("random:{seed}"));
        j.coeff = Some("Z".into());
        j.max_degree = Some(3);
        jobs.push(j);
    }
    jobs
}

fn criterion_7(g: &mut Grid) {
    for job in twisted_jobs(g) {
        let r = g.run(&job);
        if !g.finished(&job, &r) {
            continue;
        }
        let a = table_to_result(&r.result["homology"]);
        let b = table_to_result(&r.result["twisted_homology"]);
        g.check(
            job.command_line(),
            r.status == Status::Ok,
            "equal homology in every exact degree",
            format!("C: {} / Tw(C): {}", show(&a), show(&b)),
        );
    }
}

fn criterion_8(g: &mut Grid) {
    let job = JobSpec {
        max_size: Some(4),
        ..g.job(Command::OrdpmRoundtrip)
    };
    let r = g.run(&job);
    if g.finished(&job, &r) {
        g.check(
            "Δ^op ≃ Ord± round trip and face maps, sizes <= 4",
            r.status == Status::Ok,
            "no failures",
            format!("{} maps, {} faces, failures {} / {}", r.result["maps_checked"], r.result["faces_checked"], r.result["round_trip_failures"], r.result["face_failures"]),
        );
    }
    for (context, word, expected) in SNUG {
        let job = JobSpec {
            context: Some(context.into()),
            word: Some(word.into()),
            ..g.job(Command::Snug)
        };
        let r = g.run(&job);
        if !g.finished(&job, &r) {
            continue;
        }
        let got = r.result["partition"].as_str().unwrap_or_default().to_string();
        g.check(format!("snug {word} in {context}"), got == expected, expected, got);
    }
}

fn criterion_9(g: &mut Grid) {
    let job = JobSpec {
        max_degree: Some(1),
        ..g.ring_job(Command::StabMap, "F2", 3, Some("Z"))
    };
    let r = g.run(&job);
    if !g.finished(&job, &r) {
        return;
    }
    let x = &r.result;
    for key in ["validates", "lands_in_boundary", "factors_through_boundary"] {
        g.check(format!("RBS(F2^2) -> RBS(F2^3) {key}"), x[key] == json!(true), "true", x[key].to_string());
    }
    for d in ["0", "1"] {
        let m = &x["induced"][d];
        g.check(
            format!("induced map on H{d}(-; Z)"),
            m["isomorphism"] == json!(true),
            "isomorphism",
            format!("{} -> {}, surjective {}, injective {}", m["source"], m["target"], m["surjective"], m["injective"]),
        );
    }
}

/// Random integer matrices up to 8x8 with entries in `-9..=9`: the Smith
/// form must reconstruct the input with unimodular transforms and a
/// divisibility chain.
pub fn snf_reconstruction(count: usize, seed: u64) -> std::result::Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let (r, c) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let data: Vec<i64> = (0..r * c).map(|_| rng.gen_range(-9..=9)).collect();
        let a = IntMatrix::from_i64(r, c, &data);
        let s = smith_normal_form(&a);
        let diagonal = (0..r).all(|x| (0..c).all(|y| x == y || s.d.get(x, y) == &0.into()));
        let inv = s.invariants();
        let chain = inv.windows(2).all(|w| &w[1] % &w[0] == 0.into()) && inv.iter().all(|x| x > &0.into());
        let ok = s.u.mul(&a).mul(&s.v) == s.d
            && s.u_inv.mul(&s.d).mul(&s.v_inv) == a
            && s.u.mul(&s.u_inv) == IntMatrix::identity(r)
            && s.v.mul(&s.v_inv) == IntMatrix::identity(c)
            && diagonal
            && chain;
        if !ok {
            return Err(format!("matrix {i} ({r}x{c}): {data:?}"));
        }
    }
    Ok(())
}

fn square_check(g: &mut Grid, name: String, r: LibResult<()>) {
    let ok = g.inline(&name, r).is_some();
    if ok {
        g.check(name, true, "∂∂ = 0", "∂∂ = 0");
    }
}

fn criterion_10(g: &mut Grid) {
    let caps = g.caps;
    // ∂∂ = 0 on every complex the other criteria build
    for (ring, n, _) in TITS {
        let name = format!("∂∂ on Tits({ring}^{n})");
        let r = Ring::parse(ring).and_then(|r| FlagSpace::new(&r, n, &caps)).and_then(|s| tits_complex(&s, &caps));
        let r = r.and_then(|k| check_boundary_square(&k.chain_complex()));
        square_check(g, name, r);
    }
    for (ring, n, _, top, _) in VANISHING {
        let name = format!("∂∂ on N RBS({ring}^{n}) through degree {top}");
        let r = Ring::parse(ring).and_then(|r| rbs_category(&r, n, &caps)).and_then(|c| {
            let (skel, _) = c.skeleton(&caps)?;
            check_boundary_square(&Nerve::new(&skel, top, &caps)?)
        });
        square_check(g, name, r);
    }
    let mut seen = Vec::new();
    for (ring, n, _, top) in COFIBRE {
        if seen.contains(&(ring, n)) {
            continue;
        }
        seen.push((ring, n));
        let name = format!("∂∂ on (N RBS, N ∂RBS)({ring}^{n}) through degree {top}");
        let r = Ring::parse(ring).and_then(|r| rbs_category(&r, n, &caps)).and_then(|c| {
            let (skel, upper) = c.skeleton_pair(&caps)?;
            check_boundary_square(&Nerve::relative(&skel, &upper, top, &caps)?)
        });
        square_check(g, name, r);
        let name = format!("∂∂ on the Borel pair of {ring}^{n} through degree {top}");
        let r = Ring::parse(ring).and_then(|r| borel_pair(&r, n, &caps)).and_then(|(skel, upper)| {
            check_boundary_square(&Nerve::relative(&skel, &upper, top, &caps)?)
        });
        square_check(g, name, r);
    }
    for job in twisted_jobs(g) {
        let name = format!("∂∂ on N C and N Tw(C) for {}", job.target.as_deref().unwrap_or_default());
        let target = parse_target(job.target.as_deref().unwrap_or_default()).expect("grid targets parse");
        let c = match target_category(&job, target, &caps) {
            Ok(c) => c,
            Err(e) => {
                g.check(name, false, "category builds", format!("{e:?}"));
                continue;
            }
        };
        let top = job.max_degree(3);
        let r = twisted_arrow(&c, &caps).and_then(|tw| {
            check_boundary_square(&Nerve::new(&c, top, &caps)?)?;
            check_boundary_square(&Nerve::new(&tw, top, &caps)?)
        });
        square_check(g, name, r);
    }
    {
        let name = "∂∂ on the stabilization nerves F2^2 -> F2^3 through degree 2".to_string();
        let r = Ring::parse("F2").and_then(|r| stabilization_functor(&r, 3, &caps)).and_then(|s| {
            check_boundary_square(&Nerve::new(s.small.category(), 2, &caps)?)?;
            check_boundary_square(&Nerve::new(s.large.category(), 2, &caps)?)
        });
        square_check(g, name, r);
    }

    match snf_reconstruction(100, 0x5eed) {
        Ok(()) => g.check("SNF reconstruction, 100 random matrices up to 8x8", true, "U A V = D", "all reconstruct"),
        Err(e) => g.check("SNF reconstruction, 100 random matrices up to 8x8", false, "U A V = D", e),
    }

    // universal coefficients on every integral homology of criteria 2, 6, 7
    let mut pairs: Vec<(String, JobSpec, &str)> = Vec::new();
    for (ring, n, _) in TITS {
        let job = g.ring_job(Command::Tits, ring, n, Some("Z"));
        pairs.push((format!("Tits({ring}^{n})"), job, "homology"));
    }
    for (ring, _) in H1 {
        let job = JobSpec {
            max_degree: Some(2),
            ..g.ring_job(Command::RbsHomology, ring, 2, Some("Z"))
        };
        pairs.push((format!("N RBS({ring}^2)"), job, "homology"));
    }
    for job in twisted_jobs(g) {
        let t = job.target.clone().unwrap_or_default();
        pairs.push((format!("N C for {t}"), job.clone(), "homology"));
        pairs.push((format!("N Tw(C) for {t}"), job, "twisted_homology"));
    }
    for (name, zjob, key) in pairs {
        let rz = g.run(&zjob);
        if !g.finished(&zjob, &rz) {
            continue;
        }
        let z = table_to_result(&rz.result[key]);
        for p in [2u32, 3] {
            let pjob = JobSpec {
                coeff: Some(format!("F{p}")),
                ..zjob.clone()
            };
            let rp = g.run(&pjob);
            if !g.finished(&pjob, &rp) {
                continue;
            }
            let fp = table_to_result(&rp.result[key]);
            g.check(
                format!("universal coefficients for {name}, F{p}"),
                universal_coefficients_consistent(&z, &fp),
                show(&z),
                show(&fp),
            );
        }
    }

    for ring in ["F2", "F3"] {
        let name = format!("composition coset independence in RBS({ring}^2)");
        if let Some(c) = g.inline(&name, Ring::parse(ring).and_then(|r| rbs_category(&r, 2, &caps))) {
            let v = c.coset_independence_violation();
            g.check(name, v.is_none(), "no violation", format!("{v:?}"));
        }
    }

    for t in 0..=5 {
        let o = fred_poset(t);
        g.check(
            format!("reduced filtered dimension sequences of total {t} form a poset"),
            o.status == Status::Ok,
            "at most one morphism, no non-trivial isomorphisms",
            format!("{} objects, {} morphisms, violations {}", o.result["objects"], o.result["morphisms"], o.result["violations"]),
        );
    }
}

/// Runs the selected criteria (all when `job.only` is empty).
pub fn run_grid(job: &JobSpec, opts: &RunOptions, stages: &mut Stages) -> Outcome {
    let caps = job.caps().expect("validated");
    let runners: [fn(&mut Grid); 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let mut results = Vec::new();
    for (i, runner) in runners.iter().enumerate() {
        let id = i as u32 + 1;
        if !job.only.is_empty() && !job.only.contains(&id) {
            continue;
        }
        eprintln!("criterion {id}: {}", TITLES[i]);
        let mut g = Grid {
            base: job,
            opts,
            caps,
            checks: Vec::new(),
        };
        stages.time(&format!("criterion_{id}"), || runner(&mut g));
        let passed = !g.checks.is_empty() && g.checks.iter().all(|c| c.passed);
        eprintln!("{} criterion {id}: {}", if passed { "PASS" } else { "FAIL" }, TITLES[i]);
        results.push(CriterionResult {
            id,
            title: TITLES[i],
            passed,
            checks: g.checks,
        });
    }
    let failures: Vec<String> = results
        .iter()
        .flat_map(|c| {
            c.checks
                .iter()
                .filter(|k| !k.passed)
                .map(move |k| format!("criterion {}: {}: expected {}, got {}", c.id, k.name, k.expected, k.actual))
        })
        .collect();
    let passed = results.iter().filter(|c| c.passed).count();
    Outcome {
        status: if failures.is_empty() { Status::Ok } else { Status::Failed },
        result: json!({
            "criteria": results,
            "passed": passed,
            "failed": results.len() - passed,
            "failures": failures,
        }),
    }
}
