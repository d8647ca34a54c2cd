use std::time::Instant;

use rbslab_core::category::{random_concrete_category, twisted_arrow, FinCategory, GroupTable, Nerve};
use rbslab_core::flags::{flag_poset, is_concentrated, steinberg, tits_complex, FlagSpace};
use rbslab_core::homology::{homology, Coefficients, HomologyResult};
use rbslab_core::ordpm::{
    delta_to_ordpm, fred_hom, fred_objects, is_maximally_snug, ordpm_to_delta, parse_word, snug_partition,
    FilteredDimSeq, OrdPmMorphism, SnugContext,
};
use rbslab_core::rbs::{abelianized_quotient, cofibre_check, rbs_category, stabilization_functor, unipotent_subgroup};
use rbslab_core::{Caps, Error};
use serde_json::{json, Value};

use crate::cache::Cache;
use crate::grid;
use crate::job::{parse_target, Command, JobSpec, Target, UsageError};
use crate::report::{homology_table, Report, Status, Timing, SCHEMA_VERSION, VERSION};

#[derive(Debug)]
pub enum Failure {
    Usage(UsageError),
    Library(Error),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

/// Wall-clock time of each named stage of a job.
#[derive(Debug, Default)]
pub struct Stages {
    list: Vec<Timing>,
}

impl Stages {
    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.list.push(Timing {
            stage: stage.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }

    pub fn into_vec(self) -> Vec<Timing> {
        self.list
    }
}

pub struct Outcome {
    pub status: Status,
    pub result: Value,
}

impl Outcome {
    fn ok(result: Value) -> Outcome {
        Outcome { status: Status::Ok, result }
    }

    fn verdict(passed: bool, result: Value) -> Outcome {
        Outcome {
            status: if passed { Status::Ok } else { Status::Failed },
            result,
        }
    }
}

/// Options that change how a job is run but never its result.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub cache: Option<Cache>,
}

/// Runs a validated job, consulting and filling the cache. Usage errors
/// are returned; every other failure becomes a report.
pub fn run(job: &JobSpec, opts: &RunOptions) -> Result<Report, UsageError> {
    job.validate()?;
    if let Some(hit) = opts.cache.as_ref().and_then(|c| c.load(job)) {
        return Ok(Report {
            cache_hit: Some(true),
            job: job.clone(),
            ..hit
        });
    }
    let mut stages = Stages::default();
    let (status, result) = match execute(job, opts, &mut stages) {
        Ok(o) => (o.status, o.result),
        Err(Failure::Usage(e)) => return Err(e),
        Err(Failure::Library(e)) if e.is_cap_exceeded() => (
            Status::CapExceeded,
            json!({ "error": e.to_string(), "job": job.command().name() }),
        ),
        Err(Failure::Library(e)) => (Status::Error, json!({ "error": e.to_string() })),
    };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        version: VERSION.to_string(),
        job: job.clone(),
        status,
        cache_hit: Some(false),
        timings: Some(stages.into_vec()),
        result,
    };
    if let Some(cache) = &opts.cache {
        if matches!(report.status, Status::Ok | Status::Failed) {
            // a failed write only costs a recomputation later
            if let Err(e) = cache.store(job, &report) {
                eprintln!("warning: could not write cache entry in {}: {e}", cache.dir().display());
            }
        }
    }
    Ok(report)
}

fn execute(job: &JobSpec, opts: &RunOptions, stages: &mut Stages) -> Result<Outcome, Failure> {
    let caps = job.caps()?;
    match job.command() {
        Command::Tits => tits(job, &caps, stages),
        Command::RbsHomology | Command::RbsRelative => rbs_homology(job, &caps, stages),
        Command::CofibreCheck => cofibre(job, &caps, stages),
        Command::StabMap => stab_map(job, &caps, stages),
        Command::Steinberg => steinberg_job(job, &caps, stages),
        Command::Coinvariants => coinvariants(job, &caps, stages),
        Command::H1 => h1(job, &caps, stages),
        Command::TwistedArrow => twisted(job, &caps, stages),
        Command::Snug => snug(job),
        Command::OrdpmRoundtrip => Ok(ordpm_roundtrip(job.max_size.unwrap_or(4))),
        Command::Fred => fred(job),
        Command::AcceptanceGrid => Ok(grid::run_grid(job, opts, stages)),
    }
}

fn ring_echo(job: &JobSpec) -> Result<(rbslab_core::ring::Ring, usize), Failure> {
    Ok((job.ring()?, job.rank()?))
}

fn tits(job: &JobSpec, caps: &Caps, stages: &mut Stages) -> Result<Outcome, Failure> {
    let (ring, n) = ring_echo(job)?;
    let coeff = job.coefficients()?;
    let space = stages.time("flags", || FlagSpace::new(&ring, n, caps))?;
    let k = stages.time("complex", || tits_complex(&space, caps))?;
    let h = stages.time("homology", || homology(&k.chain_complex(), coeff))?.to_reduced();
    let simplices: Vec<usize> = (0..=k.dimension().max(-1) + 1).filter(|&d| d <= k.dimension()).map(|d| k.count(d as usize)).collect();
    Ok(Outcome::ok(json!({
        "ring": ring.to_string(),
        "rank": n,
        "vertices": k.num_vertices(),
        "simplices": simplices,
        "homology": homology_table(&h),
        "top_degree": n as i64 - 2,
        "top_rank": h.betti(n as i64 - 2),
        "concentrated": is_concentrated(&h, n),
    })))
}

fn rbs_homology(job: &JobSpec, caps: &Caps, stages: &mut Stages) -> Result<Outcome, Failure> {
    let (ring, n) = ring_echo(job)?;
    let coeff = job.coefficients()?;
    let top = job.max_degree(3);
    let c = stages.time("category", || rbs_category(&ring, n, caps))?;
    let (skel, _) = stages.time("skeleton", || c.skeleton(caps))?;
    let relative = job.command() == Command::RbsRelative;
    let h = stages.time("homology", || {
        if relative {
            c.relative_homology(coeff, top, caps)
        } else {
            c.homology(coeff, top, caps)
        }
    })?;
    Ok(Outcome::ok(json!({
        "ring": ring.to_string(),
        "rank": n,
        "relative": relative,
        "objects": c.category().num_objects(),
        "morphisms": c.category().num_morphisms(),
        "skeleton_objects": skel.num_objects(),
        "skeleton_morphisms": skel.num_morphisms(),
        "homology": homology_table(&h),
    })))
}

fn cofibre(job: &JobSpec, caps: &Caps, stages: &mut Stages) -> Result<Outcome, Failure> {
    let (ring, n) = ring_echo(job)?;
    let p = job.prime()?;
    let top = job.max_degree(3);
    let r = stages.time("cofibre", || cofibre_check(&ring, n, p, top, caps))?;
    let passed = r.passed();
    Ok(Outcome::verdict(
        passed,
        json!({
            "ring": r.ring,
            "rank": r.rank,
            "prime": r.prime,
            "rbs_relative": homology_table(&r.rbs),
            "borel_pair": homology_table(&r.borel),
            "compared": r.compared,
            "mismatches": r.mismatches,
            "verdict": if passed { "equal" } else { "different" },
        }),
    ))
}

fn stab_map(job: &JobSpec, caps: &Caps, stages: &mut Stages) -> Result<Outcome, Failure> {
    let (ring, n) = ring_echo(job)?;
    let coeff = job.coefficients()?;
    let top = job.max_degree(1);
    let s = stages.time("functor", || stabilization_functor(&ring, n, caps))?;
    let validates = stages.time("validate", || s.functor().is_ok());
    let factors = stages.time("boundary", || s.check_factors_through_boundary(caps))?;
    let maps = stages.time("induced", || s.induced_maps(coeff, top, caps))?;
    let degrees: serde_json::Map<String, Value> = maps
        .iter()
        .map(|m| {
            (
                m.degree.to_string(),
                json!({
                    "source": m.source.to_string(),
                    "target": m.target.to_string(),
                    "surjective": m.surjective,
                    "injective": m.injective,
                    "isomorphism": m.isomorphism,
                }),
            )
        })
        .collect();
    let all_iso = maps.iter().all(|m| m.isomorphism == Some(true));
    Ok(Outcome::ok(json!({
        "ring": ring.to_string(),
        "source_rank": n - 1,
        "target_rank": n,
        "coefficients": coeff.to_string(),
        "validates": validates,
        "lands_in_boundary": s.lands_in_boundary(),
        "factors_through_boundary": factors,
        "induced": degrees,
        "isomorphisms": all_iso,
    })))
}

fn steinberg_job(job: &JobSpec, caps: &Caps, stages: &mut Stages) -> Result<Outcome, Failure> {
    let (ring, n) = ring_echo(job)?;
    let coeff = job.coefficients()?;
    let st = stages.time("steinberg", || steinberg(&ring, n, coeff, caps))?;
    let co = stages.time("coinvariants", || st.coinvariants())?;
    Ok(Outcome::ok(json!({
        "ring": st.ring,
        "rank": st.rank,
        "coefficients": coeff.to_string(),
        "group_order": st.group_order(),
        "dimension": st.dim(),
        "concentrated": st.concentrated,
        "tits_homology": homology_table(&st.homology),
        "coinvariants": group_json(&co),
    })))
}

fn group_json(g: &rbslab_core::flags::AbelianGroup) -> Value {
    json!({
        "rank": g.rank,
        "torsion": g.torsion,
        "zero": g.is_zero(),
        "group": g.to_string(),
    })
}

fn coinvariants(job: &JobSpec, caps: &Caps, stages: &mut Stages) -> Result<Outcome, Failure> {
    let (ring, n) = ring_echo(job)?;
    let coeff = job.coefficients()?;
    let co = stages.time("coinvariants", || rbslab_core::flags::steinberg_coinvariants(&ring, n, coeff, caps))?;
    Ok(Outcome::ok(json!({
        "ring": ring.to_string(),
        "rank": n,
        "coefficients": coeff.to_string(),
        "coinvariants": group_json(&co),
    })))
}

fn h1(job: &JobSpec, caps: &Caps, stages: &mut Stages) -> Result<Outcome, Failure> {
    let ring = job.ring()?;
    let n = job.rank.unwrap_or(2);
    let c = stages.time("category", || rbs_category(&ring, n, caps))?;
    let h = stages.time("nerve", || c.homology(Coefficients::Integers, 2, caps))?;
    let quotient = stages.time("group", || abelianized_quotient(&c.gl().group, &unipotent_subgroup(&c)));
    let nerve_h1 = h.group(1).expect("degree 1 is computed");
    let equal = nerve_h1.reliable && nerve_h1.betti == 0 && nerve_h1.torsion == quotient.torsion;
    Ok(Outcome::verdict(
        equal,
        json!({
            "ring": ring.to_string(),
            "rank": n,
            "nerve_h1": nerve_h1.to_string(),
            "gl_mod_e_abelianized": quotient.to_string(),
            "verdict": if equal { "equal" } else { "different" },
        }),
    ))
}

/// The category named by a twisted-arrow target.
pub fn target_category(job: &JobSpec, target: Target, caps: &Caps) -> Result<FinCategory, Failure> {
    Ok(match target {
        Target::Rbs => rbs_category(&job.ring()?, job.rank()?, caps)?.category().clone(),
        Target::RbsSkeleton => rbs_category(&job.ring()?, job.rank()?, caps)?.skeleton(caps)?.0,
        Target::Flags => {
            let space = FlagSpace::new(&job.ring()?, job.rank()?, caps)?;
            flag_poset(&space, false)?.0.to_category(caps)?
        }
        Target::Bz2 => FinCategory::from_group(&GroupTable::cyclic(2)),
        Target::Random(seed) => random_concrete_category(seed, 12)
            .ok_or_else(|| Error::InvalidArgument(format!("random category {seed} is larger than 12 morphisms")))?,
    })
}

/// Degrees where both results are exact, and those among them that differ.
pub fn compare_reliable(a: &HomologyResult, b: &HomologyResult) -> (Vec<i64>, Vec<i64>) {
    let mut compared = Vec::new();
    let mut mismatches = Vec::new();
    for g in &a.groups {
        if let Some(h) = b.group(g.degree) {
            if g.reliable && h.reliable {
                compared.push(g.degree);
                if !g.same_group(h) {
                    mismatches.push(g.degree);
                }
            }
        }
    }
    (compared, mismatches)
}

fn twisted(job: &JobSpec, caps: &Caps, stages: &mut Stages) -> Result<Outcome, Failure> {
    let target = parse_target(job.target.as_deref().unwrap_or_default())?;
    let coeff = job.coefficients()?;
    let top = job.max_degree(3);
    let c = stages.time("category", || target_category(job, target, caps))?;
    let tw = stages.time("twisted_arrow", || twisted_arrow(&c, caps))?;
    let hc = stages.time("homology", || homology(&Nerve::new(&c, top, caps)?, coeff))?;
    let ht = stages.time("homology_twisted", || homology(&Nerve::new(&tw, top, caps)?, coeff))?;
    let (compared, mismatches) = compare_reliable(&hc, &ht);
    let passed = mismatches.is_empty() && !compared.is_empty();
    Ok(Outcome::verdict(
        passed,
        json!({
            "target": job.target,
            "objects": c.num_objects(),
            "morphisms": c.num_morphisms(),
            "twisted_objects": tw.num_objects(),
            "twisted_morphisms": tw.num_morphisms(),
            "homology": homology_table(&hc),
            "twisted_homology": homology_table(&ht),
            "compared": compared,
            "mismatches": mismatches,
        }),
    ))
}

fn snug(job: &JobSpec) -> Result<Outcome, Failure> {
    let context = SnugContext::parse(job.context.as_deref().unwrap_or_default())?;
    let word = parse_word(job.word.as_deref().unwrap_or_default())?;
    let obj = snug_partition(&context, &word)?;
    Ok(Outcome::ok(json!({
        "context": job.context,
        "word": word,
        "partition": obj.to_string(),
        "part_sizes": obj.sizes(),
        "maximally_snug": is_maximally_snug(&context, &word, &obj),
    })))
}

/// Exhaustive round trip of `Δ^op ≃ Ord±` for sizes up to `max`, plus the
/// face maps.
pub fn ordpm_roundtrip(max: usize) -> Outcome {
    let mut maps = 0usize;
    let mut failures = Vec::new();
    for m in 0..=max {
        for n in 0..=max {
            for a in OrdPmMorphism::all(m, n) {
                maps += 1;
                let theta = ordpm_to_delta(&a);
                if delta_to_ordpm(&theta, m).as_ref() != Ok(&a) {
                    failures.push(a.to_string());
                }
            }
        }
    }
    let mut faces = 0usize;
    let mut face_failures = Vec::new();
    for n in 1..=max {
        for i in 1..=n {
            faces += 1;
            let ok = OrdPmMorphism::face(n, i).is_ok_and(|f| {
                delta_to_ordpm(&[i - 1, i], n).as_ref() == Ok(&f) && ordpm_to_delta(&f) == [i - 1, i]
            });
            if !ok {
                face_failures.push(format!("θ_{i} on ({n})±"));
            }
        }
    }
    let passed = failures.is_empty() && face_failures.is_empty();
    Outcome::verdict(
        passed,
        json!({
            "max_size": max,
            "maps_checked": maps,
            "round_trip_failures": failures,
            "faces_checked": faces,
            "face_failures": face_failures,
        }),
    )
}

fn fred(job: &JobSpec) -> Result<Outcome, Failure> {
    if let (Some(a), Some(b)) = (&job.from, &job.to) {
        let (d, e) = (FilteredDimSeq::parse(a)?, FilteredDimSeq::parse(b)?);
        let homs = fred_hom(&d, &e);
        return Ok(Outcome::ok(json!({
            "from": d.to_string(),
            "to": e.to_string(),
            "morphisms": homs,
        })));
    }
    let t = job.total.expect("validated");
    Ok(fred_poset(t))
}

/// Objects of total dimension `t`, morphism count, and whether hom sets
/// have at most one element with no non-trivial isomorphisms.
pub fn fred_poset(t: u32) -> Outcome {
    let objs = fred_objects(t);
    let mut morphisms = 0;
    let mut violations = Vec::new();
    for (i, d) in objs.iter().enumerate() {
        for (j, e) in objs.iter().enumerate() {
            let k = fred_hom(d, e).len();
            morphisms += k;
            if k > 1 || (i != j && k == 1 && !fred_hom(e, d).is_empty()) {
                violations.push(format!("{d} -> {e}"));
            }
        }
    }
    Outcome::verdict(
        violations.is_empty(),
        json!({
            "total": t,
            "objects": objs.len(),
            "morphisms": morphisms,
            "poset": violations.is_empty(),
            "violations": violations,
        }),
    )
}
