use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rbslab_core::category::Nerve;
use rbslab_core::flags::{tits_homology, FlagSpace};
use rbslab_core::homology::{boundary_ranks, smith_normal_form, IntMatrix};
use rbslab_core::ordpm::{parse_word, snug_partition, SnugContext};
use rbslab_core::rbs::rbs_category;
use rbslab_core::ring::Ring;
use rbslab_core::Caps;

fn smith(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let data: Vec<i64> = (0..24 * 24).map(|_| rng.gen_range(-20..=20)).collect();
    let a = IntMatrix::from_i64(24, 24, &data);
    c.bench_function("smith_normal_form 24x24", |b| b.iter(|| smith_normal_form(black_box(&a))));
}

fn tits(c: &mut Criterion) {
    let caps = Caps::default();
    let f2 = Ring::parse("F2").unwrap();
    c.bench_function("tits homology F2^3", |b| {
        b.iter(|| {
            let space = FlagSpace::new(&f2, 3, &caps).unwrap();
            tits_homology(&space, "Z".parse().unwrap(), &caps).unwrap()
        })
    });
}

fn nerve_ranks(c: &mut Criterion) {
    let caps = Caps::default();
    let rbs = rbs_category(&Ring::parse("F2").unwrap(), 2, &caps).unwrap();
    let (skel, _) = rbs.skeleton(&caps).unwrap();
    let nerve = Nerve::new(&skel, 4, &caps).unwrap();
    c.bench_function("boundary ranks mod 2, N RBS(F2^2) to degree 4", |b| b.iter(|| boundary_ranks(black_box(&nerve), 2)));
}

fn snug(c: &mut Criterion) {
    let context = SnugContext::parse("1<2<3|4<5|6").unwrap();
    let word = parse_word(&"12423456".repeat(32)).unwrap();
    c.bench_function("snug partition, 256 letters", |b| b.iter(|| snug_partition(&context, black_box(&word)).unwrap()));
}

criterion_group!(benches, smith, tits, nerve_ranks, snug);
criterion_main!(benches);
