//! Manifest-driven sweeps. Each run becomes one JSON line carrying the
//! ground truth (when it can be enumerated) and whether the run covered it.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Deserialize;
use serde_json::Value;
use totp_core::oracle::{count_independent_sets, count_sat};
use totp_core::rng::stream;
use totp_core::tree::random_tree;
use totp_core::{capp, estimate_size, CappInput, Error, EstimatorConfig, Result, Schedule};

use crate::instance::{with_tree, Instance, ProblemKind};
use crate::record::{result_fields, Params, RunRecord};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    #[serde(default)]
    runs: Vec<Entry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
enum BenchCommand {
    Estimate,
    Capp,
}

/// One instance source crossed with every listed parameter value and seed.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    command: BenchCommand,
    problem: Option<ProblemKind>,
    /// Relative paths resolve against the manifest's directory.
    input: Option<PathBuf>,
    random_trees: Option<RandomTrees>,
    #[serde(default)]
    xi: Vec<f64>,
    #[serde(default)]
    epsilon: Vec<f64>,
    delta: f64,
    seeds: Vec<u64>,
    #[serde(default = "default_burn")]
    burn_const: f64,
    #[serde(default)]
    schedule: Schedule,
    #[serde(default)]
    memo: bool,
}

fn default_burn() -> f64 {
    2.0
}

/// `count` trees; tree `i` has height `1 + i mod max_height`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomTrees {
    count: usize,
    max_height: usize,
    max_nodes: usize,
    seed: u64,
}

struct Job {
    label: String,
    problem: ProblemKind,
    instance: Instance,
    truth: Option<f64>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

/// Exact count (estimate) or probability (capp), if small enough to enumerate.
fn truth(command: BenchCommand, inst: &Instance) -> Option<f64> {
    let count = |input: CappInput| {
        let n = input.num_vars();
        count_sat(&input).ok().map(|c| (c, n))
    };
    match (command, inst) {
        (BenchCommand::Estimate, Instance::Tree(t)) => Some(t.len() as f64),
        (BenchCommand::Estimate, Instance::Is(g)) => count_independent_sets(g).ok().map(|c| c as f64),
        (BenchCommand::Estimate, Instance::Dnf(f)) => count(CappInput::Dnf(f.clone())).map(|(c, _)| c as f64),
        (BenchCommand::Estimate, Instance::Mono(c)) => count(CappInput::Monotone(c.clone())).map(|(c, _)| c as f64),
        (BenchCommand::Capp, inst) => {
            let input = inst.clone().capp_input().ok()?;
            count(input).map(|(c, n)| c as f64 / (n as f64).exp2())
        }
        _ => None,
    }
}

fn jobs(entry: &Entry, base: &Path) -> Result<Vec<Job>> {
    match (&entry.input, &entry.random_trees) {
        (Some(path), None) => {
            let problem = entry.problem.ok_or_else(|| bad("an entry with 'input' needs 'problem'"))?;
            let full = base.join(path);
            let instance = Instance::load(problem, &full)?;
            Ok(vec![Job {
                label: path.display().to_string(),
                problem,
                truth: truth(entry.command, &instance),
                instance,
            }])
        }
        (None, Some(r)) => {
            if entry.command != BenchCommand::Estimate {
                return Err(bad("random trees only support the estimate command"));
            }
            if r.max_height == 0 || r.max_nodes <= r.max_height {
                return Err(bad("random_trees needs max_height ≥ 1 and max_nodes > max_height"));
            }
            Ok((0..r.count)
                .map(|i| {
                    let h = 1 + i % r.max_height;
                    let t = random_tree(&mut stream(r.seed, &[i as u64]), h, r.max_nodes);
                    Job {
                        label: format!("random:{}:{i}", r.seed),
                        problem: ProblemKind::Tree,
                        truth: Some(t.len() as f64),
                        instance: Instance::Tree(t),
                    }
                })
                .collect())
        }
        _ => Err(bad("each entry needs exactly one of 'input' and 'random_trees'")),
    }
}

fn check(entry: &Entry) -> Result<()> {
    let sweep = match entry.command {
        BenchCommand::Estimate => &entry.xi,
        BenchCommand::Capp => &entry.epsilon,
    };
    if sweep.is_empty() {
        return Err(bad(format!("{:?} entries need a nonempty sweep list", entry.command).to_lowercase()));
    }
    if entry.seeds.is_empty() {
        return Err(bad("each entry needs at least one seed"));
    }
    Ok(())
}

fn run_one(entry: &Entry, job: &Job, value: f64, seed: u64, workers: Option<usize>) -> Result<RunRecord> {
    let start = Instant::now();
    let config = EstimatorConfig {
        burn_in_constant: entry.burn_const,
        memo: entry.memo,
        schedule: entry.schedule,
        ..EstimatorConfig::new(value, entry.delta, seed)
    };
    let mut params = Params {
        delta: Some(entry.delta),
        seed: Some(seed),
        burn_const: Some(entry.burn_const),
        schedule: Some(format!("{:?}", entry.schedule).to_lowercase()),
        memo: Some(entry.memo),
        workers,
        ..Params::default()
    };
    let (command, mut fields, covered) = match entry.command {
        BenchCommand::Estimate => {
            params.xi = Some(value);
            let report = with_tree!(&job.instance, |t| estimate_size(t, &config))?;
            let covered = job.truth.map(|f| (report.estimate - f).abs() <= report.error_radius);
            ("estimate", result_fields(&report), covered)
        }
        BenchCommand::Capp => {
            params.epsilon = Some(value);
            let r = capp(&job.instance.clone().capp_input()?, value, entry.delta, &config)?;
            let covered = job.truth.map(|p| (r.p_hat - p).abs() <= value);
            let mut fields = result_fields(&r);
            fields.insert("steps".into(), r.report.steps.into());
            ("capp", fields, covered)
        }
    };
    fields.insert("truth".into(), job.truth.map_or(Value::Null, Value::from));
    fields.insert("covered".into(), covered.map_or(Value::Null, Value::from));
    Ok(RunRecord {
        command: command.into(),
        problem: job.problem.name().into(),
        input: Some(job.label.clone()),
        params,
        result: fields,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

pub fn run(suite: &Path, out: &Path, workers: Option<usize>) -> Result<()> {
    let text = std::fs::read_to_string(suite)?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| bad(format!("malformed manifest: {e}")))?;
    let base = suite.parent().unwrap_or(Path::new("."));
    let mut plan = Vec::with_capacity(manifest.runs.len());
    for entry in &manifest.runs {
        check(entry)?;
        plan.push((entry, jobs(entry, base)?));
    }

    let mut w = BufWriter::new(File::create(out)?);
    let (mut runs, mut judged, mut covered) = (0usize, 0usize, 0usize);
    for (entry, jobs) in &plan {
        let sweep = match entry.command {
            BenchCommand::Estimate => &entry.xi,
            BenchCommand::Capp => &entry.epsilon,
        };
        for job in jobs {
            for &value in sweep {
                for &seed in &entry.seeds {
                    let rec = run_one(entry, job, value, seed, workers)?;
                    if let Some(c) = rec.result.get("covered").and_then(Value::as_bool) {
                        judged += 1;
                        covered += usize::from(c);
                    }
                    runs += 1;
                    serde_json::to_writer(&mut w, &rec).map_err(|e| Error::Io(e.into()))?;
                    writeln!(w)?;
                }
            }
        }
    }
    w.flush()?;
    if judged > 0 {
        eprintln!("{runs} runs, coverage {covered}/{judged} = {:.3}", covered as f64 / judged as f64);
    } else {
        eprintln!("{runs} runs");
    }
    Ok(())
}
