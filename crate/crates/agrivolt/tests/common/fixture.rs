//! A scenario directory holding synthetic Khanewal-like weather.

use std::path::{Path, PathBuf};

use agrivolt::ingest::Scenario;
use agrivolt_core::weather::SiteConfig;

use super::synth;

pub const SEED: u64 = 7;

pub const SCENARIO: &str = r#"[site]
name = "khanewal"
latitude = 30.2864
longitude = 71.932
utc_offset = 5.0
weather = "khanewal.csv"

[sweep]
scheme = ["N/S", "ST", "CT6", "AT"]
crop_plan = ["LV", "HV"]
a_lm = [2.0, 3.0]
M_L = [10.0, 20.0]
delta_fit = [0.0, 10.0]
"#;

pub struct Fixture {
    pub dir: tempfile::TempDir,
}

impl Fixture {
    pub fn new() -> Self {
        Self::with_scenario(SCENARIO)
    }

    pub fn with_scenario(text: &str) -> Self {
        let dir = tempfile::tempdir().expect("temp dir");
        let series = synth::punjab_like_series(&SiteConfig::khanewal(), SEED);
        synth::write_csv(&dir.path().join("khanewal.csv"), series.records()).expect("write weather");
        std::fs::write(dir.path().join("scenario.toml"), text).expect("write scenario");
        Self { dir }
    }

    pub fn path(&self) -> &Path {
        self.dir.path()
    }

    pub fn scenario_path(&self) -> PathBuf {
        self.path().join("scenario.toml")
    }

    pub fn scenario(&self) -> Scenario {
        Scenario::load(&self.scenario_path()).expect("fixture scenario")
    }
}
