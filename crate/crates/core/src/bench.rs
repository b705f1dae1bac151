//! Timing harness: worker-count sweeps and length-range sweeps over the
//! scanner, with speedups derived from median wall times.

use std::io::Write;
use std::thread;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scanner::{scan, Candidate, ScanSpec};

/// Smallest wall time recorded; keeps every record strictly positive.
const MIN_WALL_TIME_S: f64 = 1e-9;

/// One timed scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub payload_length: usize,
    pub size_down: usize,
    pub size_upper: usize,
    pub bits: usize,
    pub stride: usize,
    pub workers: usize,
    pub repeat: usize,
    #[serde(rename = "wall_time_s")]
    pub wall_time_s: f64,
}

impl BenchRecord {
    fn group_key(&self) -> (usize, usize, usize, usize, usize) {
        (
            self.payload_length,
            self.size_down,
            self.size_upper,
            self.bits,
            self.stride,
        )
    }
}

/// Median time and speedup for one worker count within one scan setup.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub payload_length: usize,
    pub size_down: usize,
    pub size_upper: usize,
    pub workers: usize,
    pub median_time_s: f64,
    pub speedup: f64,
    /// More workers than the hardware reports as available.
    pub oversubscribed: bool,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub rows: Vec<ReportRow>,
    pub hardware_parallelism: usize,
}

impl BenchReport {
    pub fn from_records(records: Vec<BenchRecord>, hardware_parallelism: usize) -> Result<Self> {
        let rows = summarize(&records, hardware_parallelism)?;
        Ok(BenchReport {
            records,
            rows,
            hardware_parallelism,
        })
    }

    pub fn speedups(&self) -> Vec<(usize, f64)> {
        self.rows.iter().map(|r| (r.workers, r.speedup)).collect()
    }

    pub fn any_oversubscribed(&self) -> bool {
        self.rows.iter().any(|r| r.oversubscribed)
    }
}

pub fn hardware_parallelism() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}

/// Median of a nonempty sample; the mean of the middle pair for even sizes.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty sample");
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    }
}

/// Derives per-worker medians and speedups `T(1) / T(n)` from `records`.
///
/// Records are grouped by scan setup (payload length, lengths, bits,
/// stride) in order of first appearance; rows within a group ascend by
/// worker count. Every group needs single-worker records.
pub fn summarize(records: &[BenchRecord], hardware_parallelism: usize) -> Result<Vec<ReportRow>> {
    let mut groups: Vec<(_, Vec<&BenchRecord>)> = Vec::new();
    for r in records {
        match groups.iter_mut().find(|(key, _)| *key == r.group_key()) {
            Some((_, members)) => members.push(r),
            None => groups.push((r.group_key(), vec![r])),
        }
    }

    let mut rows = Vec::new();
    for ((payload_length, size_down, size_upper, _, _), members) in groups {
        let median_for = |workers: usize| {
            let times: Vec<f64> = members
                .iter()
                .filter(|r| r.workers == workers)
                .map(|r| r.wall_time_s)
                .collect();
            median(&times)
        };
        if !members.iter().any(|r| r.workers == 1) {
            return Err(Error::InvalidParameter(format!(
                "no single-worker records for lengths [{size_down}, {size_upper}]"
            )));
        }
        let baseline = median_for(1);
        let mut worker_counts: Vec<usize> = members.iter().map(|r| r.workers).collect();
        worker_counts.sort_unstable();
        worker_counts.dedup();
        for workers in worker_counts {
            let median_time_s = median_for(workers);
            rows.push(ReportRow {
                payload_length,
                size_down,
                size_upper,
                workers,
                median_time_s,
                speedup: baseline / median_time_s,
                oversubscribed: workers > hardware_parallelism,
            });
        }
    }
    Ok(rows)
}

fn timed_scan(payload: &[u8], spec: &ScanSpec) -> (f64, Vec<Candidate>) {
    let t0 = Instant::now();
    let out = scan(payload, spec);
    let elapsed = t0.elapsed().as_secs_f64();
    (elapsed.max(MIN_WALL_TIME_S), out)
}

fn sweep_records(
    payload: &[u8],
    spec: &ScanSpec,
    worker_counts: &[usize],
    repeats: usize,
) -> Result<Vec<BenchRecord>> {
    if repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be at least 1".into()));
    }
    if worker_counts.is_empty() {
        return Err(Error::InvalidParameter("no worker counts given".into()));
    }
    // The single-worker run is the speedup and correctness baseline.
    let mut counts = vec![1];
    for &w in worker_counts {
        if w == 0 {
            return Err(Error::InvalidParameter(
                "worker count must be at least 1".into(),
            ));
        }
        if !counts.contains(&w) {
            counts.push(w);
        }
    }

    let mut records = Vec::new();
    let mut baseline: Option<Vec<Candidate>> = None;
    for workers in counts {
        let spec = spec.clone().with_workers(workers)?;
        for repeat in 0..repeats {
            let (wall_time_s, out) = timed_scan(payload, &spec);
            match &baseline {
                None => baseline = Some(out),
                Some(expected) if *expected != out => {
                    return Err(Error::OutputMismatch { workers })
                }
                Some(_) => {}
            }
            records.push(BenchRecord {
                payload_length: payload.len(),
                size_down: spec.size_down(),
                size_upper: spec.size_upper(),
                bits: spec.bits().get(),
                stride: spec.stride(),
                workers,
                repeat,
                wall_time_s,
            });
        }
    }
    Ok(records)
}

/// Times `scan` for every worker count, `repeats` times each. A
/// single-worker baseline is always included.
pub fn run_sweep(
    payload: &[u8],
    spec: &ScanSpec,
    worker_counts: &[usize],
    repeats: usize,
) -> Result<BenchReport> {
    let records = sweep_records(payload, spec, worker_counts, repeats)?;
    BenchReport::from_records(records, hardware_parallelism())
}

/// Fixes `spec.size_down()` and times 1 and `max_workers` workers for each
/// upper length in `upper_values`.
pub fn run_length_sweep(
    payload: &[u8],
    spec: &ScanSpec,
    upper_values: &[usize],
    max_workers: usize,
    repeats: usize,
) -> Result<BenchReport> {
    if upper_values.is_empty() {
        return Err(Error::InvalidParameter("no upper lengths given".into()));
    }
    if upper_values.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("upper lengths must ascend".into()));
    }
    let mut records = Vec::new();
    for &upper in upper_values {
        let column = ScanSpec::new(spec.size_down(), upper)?
            .with_bits(spec.bits())
            .with_stride(spec.stride())?
            .with_accept(spec.accept().clone());
        records.extend(sweep_records(payload, &column, &[1, max_workers], repeats)?);
    }
    BenchReport::from_records(records, hardware_parallelism())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Raw records: `payload_length,size_down,size_upper,bits,stride,workers,repeat,wall_time_s`.
pub fn write_records_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if records.is_empty() {
        w.write_record([
            "payload_length",
            "size_down",
            "size_upper",
            "bits",
            "stride",
            "workers",
            "repeat",
            "wall_time_s",
        ])
        .map_err(csv_error)?;
    }
    for r in records {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Worker sweep summary: `workers,median_time_s,speedup`.
pub fn write_report_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["workers", "median_time_s", "speedup"])
        .map_err(csv_error)?;
    for r in rows {
        w.write_record([
            r.workers.to_string(),
            format!("{:.6}", r.median_time_s),
            format!("{:.6}", r.speedup),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Length sweep summary: `size_down,size_upper,workers,median_time_s,speedup`.
pub fn write_length_sweep_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "size_down",
        "size_upper",
        "workers",
        "median_time_s",
        "speedup",
    ])
    .map_err(csv_error)?;
    for r in rows {
        w.write_record([
            r.size_down.to_string(),
            r.size_upper.to_string(),
            r.workers.to_string(),
            format!("{:.6}", r.median_time_s),
            format!("{:.6}", r.speedup),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(workers: usize, repeat: usize, wall_time_s: f64) -> BenchRecord {
        BenchRecord {
            payload_length: 1000,
            size_down: 10,
            size_upper: 25,
            bits: 1,
            stride: 1,
            workers,
            repeat,
            wall_time_s,
        }
    }

    #[test]
    fn median_odd_and_even() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median(&[7.5]), 7.5);
    }

    #[test]
    fn speedups_from_fixed_records() {
        let records = vec![
            record(1, 0, 8.0),
            record(1, 1, 10.0),
            record(1, 2, 9.0),
            record(2, 0, 6.0),
            record(2, 1, 4.5),
            record(2, 2, 5.0),
            record(4, 0, 2.0),
            record(4, 1, 2.5),
            record(4, 2, 3.0),
        ];
        let rows = summarize(&records, 2).unwrap();
        let got: Vec<(usize, f64, f64, bool)> = rows
            .iter()
            .map(|r| (r.workers, r.median_time_s, r.speedup, r.oversubscribed))
            .collect();
        assert_eq!(
            got,
            vec![
                (1, 9.0, 1.0, false),
                (2, 5.0, 1.8, false),
                (4, 2.5, 3.6, true),
            ]
        );
    }

    #[test]
    fn groups_are_kept_apart() {
        let mut records = vec![record(1, 0, 4.0), record(8, 0, 1.0)];
        let mut wider = record(1, 0, 10.0);
        wider.size_upper = 30;
        records.push(wider.clone());
        wider.workers = 8;
        wider.wall_time_s = 2.0;
        records.push(wider);
        let rows = summarize(&records, 64).unwrap();
        let got: Vec<(usize, usize, f64)> = rows
            .iter()
            .map(|r| (r.size_upper, r.workers, r.speedup))
            .collect();
        assert_eq!(
            got,
            vec![(25, 1, 1.0), (25, 8, 4.0), (30, 1, 1.0), (30, 8, 5.0)]
        );
    }

    #[test]
    fn missing_baseline_is_rejected() {
        assert!(summarize(&[record(2, 0, 1.0)], 4).is_err());
    }

    #[test]
    fn single_worker_sweep_has_unit_speedup() {
        let payload: Vec<u8> = (0..20_000u32)
            .map(|i| (i.wrapping_mul(2654435761) >> 13) as u8)
            .collect();
        let spec = ScanSpec::new(3, 6).unwrap();
        let report = run_sweep(&payload, &spec, &[1], 3).unwrap();
        assert_eq!(report.records.len(), 3);
        assert_eq!(report.speedups(), vec![(1, 1.0)]);
        assert!(report.records.iter().all(|r| r.wall_time_s > 0.0));
    }

    #[test]
    fn sweep_always_includes_baseline() {
        let payload = vec![0x41u8; 9000];
        let spec = ScanSpec::new(2, 3).unwrap();
        let report = run_sweep(&payload, &spec, &[3], 1).unwrap();
        let workers: Vec<usize> = report.records.iter().map(|r| r.workers).collect();
        assert_eq!(workers, vec![1, 3]);
        assert!(run_sweep(&payload, &spec, &[], 1).is_err());
        assert!(run_sweep(&payload, &spec, &[1], 0).is_err());
    }

    #[test]
    fn length_sweep_layout() {
        let payload: Vec<u8> = (0..10_000u32).map(|i| (i * 31 % 256) as u8).collect();
        let spec = ScanSpec::new(2, 2).unwrap();
        let report = run_length_sweep(&payload, &spec, &[3, 5], 2, 1).unwrap();
        let cols: Vec<(usize, usize)> = report
            .rows
            .iter()
            .map(|r| (r.size_upper, r.workers))
            .collect();
        assert_eq!(cols, vec![(3, 1), (3, 2), (5, 1), (5, 2)]);
        assert!(run_length_sweep(&payload, &spec, &[5, 3], 2, 1).is_err());
    }

    #[test]
    fn csv_layouts() {
        let records = vec![record(1, 0, 2.0), record(2, 0, 0.5)];
        let mut buf = Vec::new();
        write_records_csv(&records, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "payload_length,size_down,size_upper,bits,stride,workers,repeat,wall_time_s\n\
             1000,10,25,1,1,1,0,2.0\n\
             1000,10,25,1,1,2,0,0.5\n"
        );
        let rows = summarize(&records, 8).unwrap();
        let mut buf = Vec::new();
        write_report_csv(&rows, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "workers,median_time_s,speedup\n1,2.000000,1.000000\n2,0.500000,4.000000\n"
        );
        let mut buf = Vec::new();
        write_length_sweep_csv(&rows, &mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("size_down,size_upper,workers"));
    }
}
