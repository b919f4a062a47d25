//! Drive the scenario runner from Rust instead of the command line.
//!
//! cargo run --release --example scenario_file -- [out_dir]

use orthoqkd::scenario::{execute, parse_config};

fn main() -> orthoqkd::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| {
        std::env::temp_dir()
            .join("orthoqkd-example")
            .display()
            .to_string()
    });
    let text = format!(
        r#"{{"command": "run", "protocol": "DLL_GV", "n": 64, "seed": 3, "runs": 5,
            "attack": {{"kind": "symmetric_ng", "theta": 0.4, "lambda": 0.5}},
            "out": {out:?}}}"#
    );
    let outcome = execute(&parse_config(&text)?)?;
    for s in outcome.summaries {
        println!("{s}");
    }
    for a in outcome.artifacts {
        println!("wrote {}", a.path.display());
    }
    Ok(())
}
