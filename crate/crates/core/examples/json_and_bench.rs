//! Instance files, seeded generation and the batch runner.
//!
//! Run with `cargo run --release --example json_and_bench`.

use share_alloc::bench::run_bench;
use share_alloc::io::{instance_to_json, parse_instance, parse_sharing, sharing_to_json};
use share_alloc::random::{generate_random, AttentionModel, GraphModel};

const DOC: &str = r#"{
  "agents": 3,
  "resources": 3,
  "utilities": [[1, 4, 0], [3, 1, 2], [0, 2, 5]],
  "allocation": [[0], [1], [2]],
  "sharing_edges": "clique",
  "attention_arcs": "same_as_sharing_bidirected",
  "alpha": "1/2",
  "costs": [[0, 1, 2]],
  "budget": 3
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = parse_instance(DOC.as_bytes())?;
    print!("canonical form:\n{}", instance_to_json(&inst));

    let sharing = parse_sharing(br#"{"bound": 1, "assignments": [{"edge": [0, 1], "resource": 1}]}"#, &inst)?;
    print!("sharing:\n{}", sharing_to_json(&sharing));

    match parse_instance(DOC.replace("1/2", "3/2").as_bytes()) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    let dir = std::env::temp_dir().join(format!("share-alloc-corpus-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let models = [
        (GraphModel::Path, AttentionModel::SameAsSharingBidirected),
        (GraphModel::Tree, AttentionModel::Graph(GraphModel::ErdosRenyi(0.3))),
        (GraphModel::ErdosRenyi(0.5), AttentionModel::Graph(GraphModel::Clique)),
    ];
    for seed in 0..6u64 {
        let (s, a) = models[seed as usize % models.len()];
        let inst = generate_random(seed, 6, 6, s, a, 8)?;
        std::fs::write(dir.join(format!("seed{seed}.json")), instance_to_json(&inst))?;
    }
    let report = run_bench(&dir)?;
    for r in &report.records {
        println!(
            "{}: min envy {:?} ({}), utilitarian {}, egalitarian {}",
            r.file,
            r.min_envy,
            r.envy_algorithm.unwrap_or("-"),
            r.utilitarian.as_deref().unwrap_or("-"),
            r.egalitarian.as_deref().unwrap_or("-")
        );
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
