//! Atomic file output, per-fixture fan-out and the verdict tables.

use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{Context, Result};
use transference::harness::{InequalityReport, ReportBundle, Verdict};

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path.file_name().with_context(|| format!("{} has no file name", path.display()))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))
}

/// Applies `f` to every item on a small thread pool; results keep input order.
pub fn fan_out<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len()).max(1);
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                let r = f(item);
                slots.lock().expect("no worker panicked")[i] = Some(r);
            });
        }
    });
    slots.into_inner().expect("no worker panicked").into_iter().map(|r| r.expect("every slot filled")).collect()
}

fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.6}")
    }
}

fn row(r: &InequalityReport) -> String {
    format!(
        "{:<4} {:<22} {:<34} {:>12} {:>12} {:>12}  {}",
        if r.transposed { "ᵗΘ" } else { "Θ" },
        r.family,
        r.name,
        num(r.lhs),
        num(r.rhs),
        num(r.margin),
        r.verdict.as_str()
    )
}

pub fn print_bundle_table(b: &ReportBundle) {
    println!("fixture {} ({}x{})", b.fixture, b.n, b.m);
    println!(
        "{:<4} {:<22} {:<34} {:>12} {:>12} {:>12}  verdict",
        "side", "family", "check", "lhs", "rhs", "margin"
    );
    for r in &b.inequalities {
        println!("{}", row(r));
    }
    print_counts(b);
}

fn print_counts(b: &ReportBundle) {
    println!(
        "{}: holds {}, within tolerance {}, violated {}, vacuous {}, hypothesis failed {}, errors {}",
        b.fixture,
        b.count(Verdict::Holds),
        b.count(Verdict::ViolatedWithinTolerance),
        b.count(Verdict::Violated),
        b.count(Verdict::Vacuous),
        b.count(Verdict::HypothesisFailed),
        b.errors.len()
    );
}

/// Counts for one corpus fixture followed by its failing rows.
pub fn print_corpus_line(b: &ReportBundle) {
    print_counts(b);
    for r in b.inequalities.iter().filter(|r| r.verdict == Verdict::Violated) {
        println!("    {}", row(r));
    }
}
