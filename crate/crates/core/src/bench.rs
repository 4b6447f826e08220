//! Batch runs over a directory of instance documents.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::envy::min_envy_auto;
use crate::error::Result;
use crate::io::format_ratio;
use crate::model::Rational;
use crate::welfare::{maximize_ewsa_simple, solve_uwsa};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub file: String,
    pub agents: Option<usize>,
    pub resources: Option<usize>,
    pub min_envy: Option<usize>,
    pub envy_algorithm: Option<&'static str>,
    /// Best utilitarian welfare with one sharing per agent.
    pub utilitarian: Option<String>,
    /// Best egalitarian welfare with one sharing per agent.
    pub egalitarian: Option<String>,
    pub errors: Vec<String>,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
}

impl BenchReport {
    /// Copy with every timing zeroed, for comparing runs.
    pub fn without_timings(&self) -> BenchReport {
        let mut r = self.clone();
        r.records.iter_mut().for_each(|rec| rec.elapsed_ms = 0.0);
        r
    }
}

fn run_one(dir: &Path, path: &Path) -> BenchRecord {
    let start = Instant::now();
    let mut rec = BenchRecord {
        file: path.strip_prefix(dir).unwrap_or(path).display().to_string(),
        agents: None,
        resources: None,
        min_envy: None,
        envy_algorithm: None,
        utilitarian: None,
        egalitarian: None,
        errors: Vec::new(),
        elapsed_ms: 0.0,
    };
    match crate::io::read_instance(path) {
        Err(e) => rec.errors.push(e.to_string()),
        Ok(inst) => {
            rec.agents = Some(inst.agent_count());
            rec.resources = Some(inst.resource_count());
            match min_envy_auto(&inst) {
                Ok((k, _, alg)) => {
                    rec.min_envy = Some(k);
                    rec.envy_algorithm = Some(alg.name());
                }
                Err(e) => rec.errors.push(format!("envy: {e}")),
            }
            match solve_uwsa(&inst, 1, Rational::from_integer(0)) {
                Ok(s) => rec.utilitarian = Some(format_ratio(s.optimum)),
                Err(e) => rec.errors.push(format!("utilitarian: {e}")),
            }
            match maximize_ewsa_simple(&inst) {
                Ok((v, _)) => rec.egalitarian = Some(format_ratio(v)),
                Err(e) => rec.errors.push(format!("egalitarian: {e}")),
            }
        }
    }
    rec.elapsed_ms = start.elapsed().as_secs_f64() * 1000.0;
    rec
}

/// Every `*.json` file under `dir` (not recursive), sorted by name.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Solves every corpus instance in parallel; records keep corpus order.
pub fn run_bench(dir: &Path) -> Result<BenchReport> {
    let files = corpus_files(dir)?;
    let records = files.par_iter().map(|f| run_one(dir, f)).collect();
    Ok(BenchReport { records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::instance_to_json;
    use crate::random::{generate_random, AttentionModel, GraphModel};

    #[test]
    fn deterministic_and_ordered() {
        let dir = tempfile::tempdir().unwrap();
        for seed in 0..6u64 {
            let inst =
                generate_random(seed, 4, 4, GraphModel::Tree, AttentionModel::SameAsSharingBidirected, 5).unwrap();
            std::fs::write(dir.path().join(format!("i{seed}.json")), instance_to_json(&inst)).unwrap();
        }
        std::fs::write(dir.path().join("broken.json"), "{").unwrap();
        std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
        let a = run_bench(dir.path()).unwrap();
        let b = run_bench(dir.path()).unwrap();
        assert_eq!(a.without_timings(), b.without_timings());
        let names: Vec<_> = a.records.iter().map(|r| r.file.as_str()).collect();
        assert_eq!(names, ["broken.json", "i0.json", "i1.json", "i2.json", "i3.json", "i4.json", "i5.json"]);
        assert_eq!(a.records[0].errors.len(), 1);
        assert!(a.records[1..].iter().all(|r| r.errors.is_empty() && r.min_envy.is_some()));
    }
}
