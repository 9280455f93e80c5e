//! Timed grounding runs over generated instances.

mod gen;
mod rng;

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::ground::{ground_problem, GroundOptions, Strategy};
use crate::smt::emit_smt;

pub use gen::{expected_truth, generate, BenchSpec, Family, SpecError};
pub use rng::SplitMix64;

pub const CSV_HEADER: [&str; 12] = [
    "benchmark",
    "instance",
    "strategy",
    "size",
    "ratio",
    "seed",
    "ground_us",
    "emit_us",
    "verdict",
    "assertions",
    "peak_bits",
    "timeout",
];

/// One (instance, strategy) measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub benchmark: String,
    pub instance: usize,
    pub strategy: String,
    pub size: usize,
    pub ratio: f64,
    pub seed: u64,
    pub ground_us: u128,
    pub emit_us: u128,
    pub verdict: String,
    pub assertions: usize,
    pub peak_bits: u64,
    pub timeout: bool,
}

/// Grounds and emits one instance with one strategy. Running out of time or
/// tensor budget is recorded as a timeout.
pub fn run_one(
    spec: &BenchSpec,
    instance: usize,
    strategy: Strategy,
    timeout: Duration,
) -> Result<RunRecord, SpecError> {
    let problem = generate(spec)?;
    Ok(measure(&problem, spec, instance, strategy, timeout))
}

fn measure(
    problem: &crate::parser::Problem,
    spec: &BenchSpec,
    instance: usize,
    strategy: Strategy,
    timeout: Duration,
) -> RunRecord {
    let mut rec = RunRecord {
        benchmark: spec.benchmark_id(),
        instance,
        strategy: strategy.label().to_string(),
        size: spec.size,
        ratio: spec.ratio,
        seed: spec.seed,
        ground_us: 0,
        emit_us: 0,
        verdict: "open".to_string(),
        assertions: 0,
        peak_bits: 0,
        timeout: false,
    };
    let start = Instant::now();
    let opts = GroundOptions {
        deadline: Some(start + timeout),
        ..Default::default()
    };
    match ground_problem(problem, strategy, &opts) {
        Ok(g) => {
            rec.ground_us = start.elapsed().as_micros();
            let t = Instant::now();
            let text = emit_smt(&g.theory);
            rec.emit_us = t.elapsed().as_micros();
            std::hint::black_box(text);
            rec.verdict = g.theory.verdict.label().to_string();
            rec.assertions = g.theory.assertions.len();
            rec.peak_bits = g.peak_bits();
        }
        Err(_) => {
            rec.ground_us = start.elapsed().as_micros();
            rec.timeout = true;
        }
    }
    rec
}

/// Runs `instances` instances of every spec (instance `k` uses seed
/// `seed + k`) under every strategy, on up to `jobs` threads. Records come
/// back in (spec, instance, strategy) order.
pub fn run_bench(
    specs: &[BenchSpec],
    instances: usize,
    strategies: &[Strategy],
    timeout: Duration,
    jobs: usize,
) -> Result<Vec<RunRecord>, SpecError> {
    for s in specs {
        s.validate()?;
    }
    let units: Vec<(usize, usize)> = (0..specs.len())
        .flat_map(|i| (0..instances).map(move |k| (i, k)))
        .collect();
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, Vec<RunRecord>)>> = Mutex::new(Vec::new());
    let worker = || loop {
        let u = next.fetch_add(1, Ordering::Relaxed);
        let Some(&(i, k)) = units.get(u) else { break };
        let spec = BenchSpec {
            seed: specs[i].seed.wrapping_add(k as u64),
            ..specs[i].clone()
        };
        let problem = generate(&spec).expect("validated");
        let recs = strategies
            .iter()
            .map(|&st| measure(&problem, &spec, k, st, timeout))
            .collect();
        results.lock().expect("no poisoning").push((u, recs));
    };
    std::thread::scope(|scope| {
        for _ in 0..jobs.max(1) {
            scope.spawn(worker);
        }
    });
    let mut results = results.into_inner().expect("no poisoning");
    results.sort_by_key(|(u, _)| *u);
    Ok(results.into_iter().flat_map(|(_, r)| r).collect())
}

pub fn write_csv<W: Write>(records: &[RunRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Mean grounding time over non-timeout runs, with the timeout count.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub benchmark: String,
    pub size: usize,
    pub ratio: f64,
    pub strategy: String,
    pub mean_ground_s: Option<f64>,
    pub runs: usize,
    pub timeouts: usize,
}

/// (benchmark, size, ratio bits, strategy).
type GroupKey = (String, usize, u64, String);

pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<GroupKey, (Vec<u128>, usize)> = BTreeMap::new();
    let mut order = Vec::new();
    for r in records {
        let key = (r.benchmark.clone(), r.size, r.ratio.to_bits(), r.strategy.clone());
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        let g = groups.entry(key).or_default();
        if r.timeout {
            g.1 += 1;
        } else {
            g.0.push(r.ground_us);
        }
    }
    order
        .into_iter()
        .map(|key| {
            let (times, timeouts) = &groups[&key];
            let mean = (!times.is_empty()).then(|| times.iter().sum::<u128>() as f64 / times.len() as f64 / 1e6);
            SummaryRow {
                benchmark: key.0,
                size: key.1,
                ratio: f64::from_bits(key.2),
                strategy: key.3,
                mean_ground_s: mean,
                runs: times.len() + timeouts,
                timeouts: *timeouts,
            }
        })
        .collect()
}

/// `benchmark size ratio strategy mean(timeouts)` lines.
pub fn format_summary(rows: &[SummaryRow]) -> String {
    let mut s = String::new();
    for r in rows {
        let mean = r.mean_ground_s.map_or("-".to_string(), |m| format!("{m:.6}"));
        s.push_str(&format!(
            "{} {} {} {} {}({})\n",
            r.benchmark, r.size, r.ratio, r.strategy, mean, r.timeouts
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_spec_list_gives_header_only() {
        let recs = run_bench(&[], 1, &Strategy::ALL, Duration::from_secs(1), 1).unwrap();
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "benchmark,instance,strategy,size,ratio,seed,ground_us,emit_us,verdict,assertions,peak_bits,timeout\n"
        );
    }

    #[test]
    fn ci_unsat_verdicts_and_job_order() {
        let spec = BenchSpec {
            family: Family::Ci,
            size: 2000,
            ratio: 0.01,
            seed: 3,
            sat: false,
        };
        let one = run_bench(
            std::slice::from_ref(&spec),
            3,
            &[Strategy::Vec, Strategy::Naive],
            Duration::from_secs(60),
            1,
        )
        .unwrap();
        let many = run_bench(
            &[spec],
            3,
            &[Strategy::Vec, Strategy::Naive],
            Duration::from_secs(60),
            3,
        )
        .unwrap();
        assert_eq!(one.len(), 6);
        for (a, b) in one.iter().zip(&many) {
            assert_eq!((a.instance, &a.strategy, a.seed), (b.instance, &b.strategy, b.seed));
            assert_eq!(a.verdict, "unsat-trivial");
            assert_eq!(a.assertions, 0);
        }
        let rows = summarize(&one);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].runs, 3);
    }

    #[test]
    fn zero_timeout_is_recorded() {
        let spec = BenchSpec {
            family: Family::Cs,
            size: 100_000,
            ratio: 0.0,
            seed: 1,
            sat: true,
        };
        let r = run_one(&spec, 0, Strategy::NoReduce, Duration::ZERO).unwrap();
        assert!(r.timeout);
        let rows = summarize(&[r]);
        assert_eq!((rows[0].mean_ground_s, rows[0].timeouts), (None, 1));
    }
}
