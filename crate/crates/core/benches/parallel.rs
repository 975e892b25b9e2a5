//! Sequential against data-parallel execution on the three hot loops.
//! Without the `parallel` feature both variants take the sequential path.

use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use regasym_core::counts::CountKind;
use regasym_core::data;
use regasym_core::regular::{c2_series_with, formal_k_interpolate_with, Pruning};
use regasym_core::validation::{residual_table, Which, DEFAULT_PRECISION};
use regasym_core::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn residual_grid(c: &mut Criterion) {
    let all = data::shipped(CountKind::All).unwrap();
    let connected = data::shipped(CountKind::Connected).unwrap();
    let rows = [(2, 4), (3, 3), (4, 3), (5, 3)];
    let ns: Vec<u32> = (10..=100).step_by(10).collect();
    let mut g = c.benchmark_group("residual_table_sg");
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| residual_table(Which::Sg, &rows, &ns, &all, &connected, DEFAULT_PRECISION, exec).unwrap())
        });
    }
    g.finish();
}

fn formal_k(c: &mut Criterion) {
    let mut g = c.benchmark_group("formal_k_interpolate");
    g.sample_size(10).measurement_time(Duration::from_secs(10));
    for r in [2, 3] {
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, r), &r, |b, &r| {
                b.iter(|| formal_k_interpolate_with(r, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn c2(c: &mut Criterion) {
    let mut g = c.benchmark_group("c2_series");
    g.sample_size(10);
    for (k, r) in [(4, 3), (5, 3)] {
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, format!("k{k}_r{r}")), &(k, r), |b, &(k, r)| {
                b.iter(|| c2_series_with(k, r, exec, Pruning::OddMoments).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, residual_grid, formal_k, c2);
criterion_main!(benches);
