//! One worker thread against the default pool on the data-parallel paths.
//! Build with `--no-default-features` for the plain sequential code.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::ThreadPoolBuilder;

use seceq::generate::{generate, FamilyChoice, GeneratorConfig};
use seceq::oracle::{oracle_enumerate, DEFAULT_MAX_PROFILES};
use seceq::payoff::Game;
use seceq::secure::construct_secure_equilibrium;
use seceq::verify::verify_profile;

fn game(seed: u64, family: FamilyChoice, players: usize, states: usize) -> Game {
    let mut cfg = GeneratorConfig::new(seed, family);
    cfg.players = players;
    cfg.states = states;
    cfg.max_actions = 2;
    cfg.deterministic = false;
    generate(&cfg).unwrap()
}

fn bench(c: &mut Criterion) {
    let pools = [
        ("one_thread", ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("default", ThreadPoolBuilder::new().build().unwrap()),
    ];

    let small = game(11, FamilyChoice::FiniteHorizon { horizon: 3 }, 3, 3);
    let mut group = c.benchmark_group("oracle_enumerate");
    for (name, pool) in &pools {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| oracle_enumerate(&small, DEFAULT_MAX_PROFILES).unwrap()))
        });
    }
    group.finish();

    let big = game(12, FamilyChoice::Discounted { discount: (1, 2) }, 3, 8);
    let profile = construct_secure_equilibrium(&big, None).unwrap().profile;
    let mut group = c.benchmark_group("verify_profile");
    for (name, pool) in &pools {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| verify_profile(&big, &profile, None).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
