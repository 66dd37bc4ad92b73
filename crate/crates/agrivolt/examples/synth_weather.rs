//! Writes a synthetic Khanewal-like weather year and a matching scenario.
//!
//! ```text
//! cargo run --example synth_weather -- demo
//! cargo run -- feasibility --scenario demo/scenario.toml --out demo/out
//! ```

#[path = "../tests/common/synth.rs"]
#[allow(dead_code)]
mod synth;

use std::path::PathBuf;

use agrivolt_core::weather::SiteConfig;

const SCENARIO: &str = r#"[site]
name = "khanewal"
latitude = 30.2864
longitude = 71.932
utc_offset = 5.0
weather = "khanewal.csv"

[layout]
a_lm = 2.0

[scheme]
mode = "st"

[crops]
plan = "HV"

[thresholds]
theta_energy = 0.8
theta_crop = 0.8
enforcement = "seasonal"

[sweep]
scheme = ["N/S", "ST", "CT6", "AT"]
crop_plan = ["LV", "HV"]
a_lm = [2.0, 3.0]
M_L = [10.0, 20.0]
"#;

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "demo".into()));
    std::fs::create_dir_all(&dir)?;
    let series = synth::punjab_like_series(&SiteConfig::khanewal(), 7);
    synth::write_csv(&dir.join("khanewal.csv"), series.records())?;
    std::fs::write(dir.join("scenario.toml"), SCENARIO)?;
    println!("wrote {}", dir.display());
    Ok(())
}
