//! Generate a few floorplans and print one.
//!
//! `cargo run --example generate_floorplans -- [out_dir]`

use gridmapper::worldgen::save_with_sidecar;
use gridmapper::{generate_dataset, GeneratorConfig};

fn main() -> gridmapper::Result<()> {
    let cfg = GeneratorConfig {
        height: 32,
        width: 48,
        ..GeneratorConfig::with_seed(42)
    };
    let maps = generate_dataset(&cfg, 4)?;
    print!("{}", maps[0].to_text());
    for (k, m) in maps.iter().enumerate() {
        println!(
            "seed {}: wall fraction {:.3}",
            cfg.seed + k as u64,
            m.fraction_of_walls()?
        );
    }

    if let Some(dir) = std::env::args().nth(1) {
        std::fs::create_dir_all(&dir)?;
        for (k, m) in maps.iter().enumerate() {
            let map_cfg = GeneratorConfig {
                seed: cfg.seed + k as u64,
                ..cfg.clone()
            };
            println!("wrote {}", save_with_sidecar(dir.as_ref(), &map_cfg, m)?.display());
        }
    }
    Ok(())
}
