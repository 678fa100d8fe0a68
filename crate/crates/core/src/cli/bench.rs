//! Runs every algorithm on every instance of a directory and reports a CSV.

use std::io::Write;
use std::path::Path;
use std::sync::mpsc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::io::{parse_instance, schema_of, INSTANCE_SCHEMA};
use super::{run_algo, Algo, RunOptions};
use crate::model::{lower_bound, validate_packing, Instance};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Timeout,
    Failed,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Timeout => "TIMEOUT",
            Status::Failed => "failed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub instance: String,
    pub algo: Algo,
    pub height: Option<i64>,
    pub lower_bound: i64,
    pub millis: u128,
    pub status: Status,
}

impl BenchRow {
    /// `height / lower_bound`, truncated to four decimals.
    pub fn ratio(&self) -> Option<String> {
        let h = self.height?;
        let lb = self.lower_bound;
        (lb > 0).then(|| format!("{}.{:04}", h / lb, (h % lb) * 10_000 / lb))
    }
}

/// The `strip-v1` files among the `*.json` files of `dir`, sorted by file name.
/// Packings, hints and moldable instances are skipped.
pub fn load_dir(dir: &Path) -> Result<Vec<(String, Instance)>, String> {
    let mut names: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    names.sort();
    let mut out = Vec::new();
    for p in names {
        let text = std::fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))?;
        if schema_of(&text).map_err(|e| format!("{}: {e}", p.display()))? != INSTANCE_SCHEMA {
            continue;
        }
        let inst = parse_instance(&text).map_err(|e| format!("{}: {e}", p.display()))?;
        let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        out.push((name, inst));
    }
    Ok(out)
}

/// Thread count from `STRIP_FORGE_THREADS`, else the machine's parallelism.
pub fn thread_count() -> usize {
    std::env::var("STRIP_FORGE_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn run_one(name: &str, inst: &Instance, algo: Algo, opts: &RunOptions, timeout: Duration) -> BenchRow {
    let lb = lower_bound(inst);
    let (tx, rx) = mpsc::channel();
    let (job, o) = (inst.clone(), opts.clone());
    let start = Instant::now();
    // A timed-out worker is left to finish on its own; its result is dropped.
    std::thread::spawn(move || {
        let r = run_algo(&job, algo, &o).map(|out| {
            let ok = validate_packing(&job, &out.packing, o.rotations).is_valid();
            (out.packing.height, ok)
        });
        let _ = tx.send(r);
    });
    let (height, status) = match rx.recv_timeout(timeout) {
        Ok(Ok((h, true))) => (Some(h), Status::Ok),
        Ok(_) => (None, Status::Failed),
        Err(_) => (None, Status::Timeout),
    };
    BenchRow { instance: name.into(), algo, height, lower_bound: lb, millis: start.elapsed().as_millis(), status }
}

/// One row per `(instance, algo)`, in input order whatever the thread count.
pub fn bench(
    instances: &[(String, Instance)],
    algos: &[Algo],
    opts: &RunOptions,
    timeout: Duration,
    threads: usize,
) -> Vec<BenchRow> {
    let tasks: Vec<(&str, &Instance, Algo)> = instances
        .iter()
        .flat_map(|(n, i)| algos.iter().map(move |&a| (n.as_str(), i, a)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build().expect("thread pool");
    pool.install(|| tasks.par_iter().map(|&(n, i, a)| run_one(n, i, a, opts, timeout)).collect())
}

/// Writes the rows; with `timing` off the millis column is left empty so that
/// repeated runs give identical bytes.
pub fn write_csv(rows: &[BenchRow], out: impl Write, timing: bool) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["instance", "algo", "height", "lower_bound", "ratio", "millis", "status"])?;
    for r in rows {
        w.write_record([
            r.instance.clone(),
            r.algo.name().to_string(),
            r.height.map(|h| h.to_string()).unwrap_or_default(),
            r.lower_bound.to_string(),
            r.ratio().unwrap_or_default(),
            if timing { r.millis.to_string() } else { String::new() },
            r.status.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_truncates() {
        let row = BenchRow {
            instance: "a".into(),
            algo: Algo::Nfdh,
            height: Some(10),
            lower_bound: 3,
            millis: 0,
            status: Status::Ok,
        };
        assert_eq!(row.ratio().unwrap(), "3.3333");
    }

    #[test]
    fn empty_input_gives_header_only() {
        let rows = bench(&[], &[Algo::Nfdh], &RunOptions::default(), Duration::from_secs(1), 2);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf, true).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "instance,algo,height,lower_bound,ratio,millis,status\n");
    }

    #[test]
    fn one_instance_two_algos() {
        let inst = Instance::from_dims(10, &[(5, 4), (5, 4), (6, 2), (4, 2)]);
        let rows = bench(&[("x".into(), inst)], &[Algo::Nfdh, Algo::Ffdh], &RunOptions::default(), Duration::from_secs(5), 2);
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.status == Status::Ok && r.height.unwrap() >= r.lower_bound));
    }
}
