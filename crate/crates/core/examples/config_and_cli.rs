//! Loading an experiment configuration and driving the command-line entry
//! point in-process.
//!
//! `cargo run --release --example config_and_cli`

use insider::cli::main_with_args;
use insider::config::ExperimentConfig;

const CONFIG: &str = "\
# market with a drift that drops halfway
model.eta = 0:0.1, 0.5:0.05
model.xi = 0.2
info.kind = interval
info.c1 = -1
info.c2 = 1
sim.n_paths = 500
sim.n_steps = 200
";

fn main() -> insider::Result<()> {
    let cfg = ExperimentConfig::parse(CONFIG)?;
    let manifest = cfg.render();
    assert_eq!(ExperimentConfig::parse(&manifest)?, cfg);
    println!("manifest:\n{manifest}");

    match ExperimentConfig::parse("model.xi = 0.2\nmodel.colour = red\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    let dir = std::env::temp_dir().join(format!("insider-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let config_path = dir.join("run.cfg");
    std::fs::write(&config_path, CONFIG)?;
    let out = dir.join("out");
    let cfg_arg = config_path.to_string_lossy().into_owned();
    let out_arg = out.to_string_lossy().into_owned();
    let code = main_with_args(["insider", "--config", &cfg_arg, "--out", &out_arg, "value"]);
    println!("\n`insider value` exited with {code}");
    print!("{}", std::fs::read_to_string(out.join("results.csv"))?);
    let code = main_with_args(["insider", "--out", &out_arg, "verify", "mixture_zero"]);
    println!("`insider verify mixture_zero` exited with {code}");
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
