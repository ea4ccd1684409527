//! Scenario runner for `nonlocal_flow`: TOML scenario files and embedded
//! presets in, trajectory CSV, JSON report and two-column plot data out.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub mod output;
pub mod presets;
pub mod runner;
pub mod scenario;

pub use runner::{run_scenario, CheckResult, Report, RunOutput};
pub use scenario::{Check, ConfigError, Scenario};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

/// A target is a path to a scenario file, or a preset name when no such
/// file exists.
pub fn resolve(target: &str) -> Result<Scenario, ConfigError> {
    let path = Path::new(target);
    if path.is_file() {
        Scenario::load(path)
    } else {
        presets::load(target)
    }
}

enum Status {
    Done { passed: bool, failures: Vec<&'static str>, dir: PathBuf },
    Failed(String),
}

/// Runs every target, writes artifacts under `out`, prints one summary
/// line per scenario in input order, and returns the process exit code.
pub fn execute(targets: &[String], out: &Path, parallel: usize, stdout: &mut impl Write, stderr: &mut impl Write) -> i32 {
    let mut scenarios = Vec::with_capacity(targets.len());
    for t in targets {
        match resolve(t) {
            Ok(sc) => scenarios.push(sc),
            Err(e) => {
                let _ = writeln!(stderr, "{e}");
                return EXIT_CONFIG;
            }
        }
    }
    for (i, sc) in scenarios.iter().enumerate() {
        if scenarios[..i].iter().any(|o| o.name == sc.name) {
            let _ = writeln!(stderr, "config error: `name` {:?} used by two scenarios", sc.name);
            return EXIT_CONFIG;
        }
    }

    let slots: Vec<Mutex<Option<Status>>> = scenarios.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let work = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        let Some(sc) = scenarios.get(i) else { break };
        let status = match run_scenario(sc) {
            Ok(run) => match output::write_outputs(out, &run) {
                Ok(dir) => Status::Done { passed: run.report.passed, failures: run.report.failures.clone(), dir },
                Err(e) => Status::Failed(format!("writing outputs: {e}")),
            },
            Err(e) => Status::Failed(e.to_string()),
        };
        *slots[i].lock().expect("no panics while holding the lock") = Some(status);
    };
    let threads = parallel.clamp(1, scenarios.len().max(1));
    std::thread::scope(|s| {
        for _ in 1..threads {
            s.spawn(work);
        }
        work();
    });

    let mut code = EXIT_OK;
    for (sc, slot) in scenarios.iter().zip(slots) {
        match slot.into_inner().expect("workers finished").expect("every scenario ran") {
            Status::Done { passed: true, dir, .. } => {
                let _ = writeln!(stdout, "{}: PASS -> {}", sc.name, dir.display());
            }
            Status::Done { passed: false, failures, dir } => {
                let _ = writeln!(stdout, "{}: FAIL [{}] -> {}", sc.name, failures.join(", "), dir.display());
                if code == EXIT_OK {
                    code = EXIT_CHECK_FAILED;
                }
            }
            Status::Failed(msg) => {
                let _ = writeln!(stderr, "{}: error: {msg}", sc.name);
                code = EXIT_RUNTIME;
            }
        }
    }
    code
}

/// Plain-text preset table, or a JSON array with `json`.
pub fn list_presets(json: bool) -> String {
    let table = presets::table();
    if json {
        return output::to_json(&table);
    }
    let width = table.iter().map(|p| p.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for p in &table {
        s.push_str(&format!("{:width$}  {:6}  {}\n", p.name, p.nonlinearity, p.exercises));
    }
    s
}
