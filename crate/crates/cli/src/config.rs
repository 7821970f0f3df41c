//! Run configuration: an optional JSON file overridden by command-line flags.

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sr_squeeze::config::Tolerances;
use sr_squeeze::fock::DEFAULT_DIM;
use sr_squeeze::Constants;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliConfig {
    pub hbar: f64,
    pub ell0: f64,
    pub fock_dim: usize,
    pub tolerances: Tolerances,
    pub output: Option<Format>,
    pub seed: u64,
}

impl Default for CliConfig {
    fn default() -> Self {
        let suite = sr_squeeze::config::SuiteConfig::default();
        Self {
            hbar: 1.0,
            ell0: 1.0,
            fock_dim: DEFAULT_DIM,
            tolerances: Tolerances::default(),
            output: None,
            seed: suite.seed,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub hbar: Option<f64>,
    pub ell0: Option<f64>,
    pub fock_dim: Option<usize>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
}

pub const MAX_FOCK_DIM: usize = 4096;

impl CliConfig {
    pub fn load(path: Option<&Path>, o: &Overrides) -> Result<Self, String> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("reading config {}: {e}", p.display()))?;
                serde_json::from_str(&text).map_err(|e| format!("config {}: {e}", p.display()))?
            }
            None => CliConfig::default(),
        };
        if let Some(v) = o.hbar {
            cfg.hbar = v;
        }
        if let Some(v) = o.ell0 {
            cfg.ell0 = v;
        }
        if let Some(v) = o.fock_dim {
            cfg.fock_dim = v;
        }
        if o.format.is_some() {
            cfg.output = o.format;
        }
        if let Some(v) = o.seed {
            cfg.seed = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        Constants::new(self.hbar, self.ell0).map_err(|e| e.to_string())?;
        if !(8..=MAX_FOCK_DIM).contains(&self.fock_dim) {
            return Err(format!("fock_dim must lie in 8..={MAX_FOCK_DIM}, got {}", self.fock_dim));
        }
        let tol = serde_json::to_value(self.tolerances).map_err(|e| e.to_string())?;
        for (name, v) in tol.as_object().into_iter().flatten() {
            let x = v.as_f64().unwrap_or(f64::NAN);
            if !(x > 0.0 && x.is_finite()) {
                return Err(format!("tolerances.{name} must be positive and finite, got {v}"));
            }
        }
        Ok(())
    }

    pub fn constants(&self) -> Constants {
        Constants { hbar: self.hbar, ell0: self.ell0 }
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.output.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("squeeze-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("c.json");
        std::fs::write(&p, r#"{"hbar": 2.0, "fock_dim": 64, "tolerances": {"resolution": 1e-3}}"#).unwrap();
        let cfg = CliConfig::load(Some(&p), &Overrides { fock_dim: Some(32), ..Default::default() }).unwrap();
        assert_eq!((cfg.hbar, cfg.ell0, cfg.fock_dim), (2.0, 1.0, 32));
        assert_eq!(cfg.tolerances.resolution, 1e-3);
        assert_eq!(cfg.tolerances.roundtrip, Tolerances::default().roundtrip);
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn rejects_bad_values() {
        let o = |f: fn(&mut Overrides)| {
            let mut o = Overrides::default();
            f(&mut o);
            CliConfig::load(None, &o)
        };
        assert!(o(|o| o.hbar = Some(-1.0)).unwrap_err().contains("hbar"));
        assert!(o(|o| o.fock_dim = Some(2)).unwrap_err().contains("fock_dim"));
        assert!(o(|_| {}).is_ok());
    }

    #[test]
    fn unknown_field_is_reported() {
        let err = serde_json::from_str::<CliConfig>(r#"{"hbar": 1, "fock": 3}"#).unwrap_err();
        assert!(err.to_string().contains("fock"));
    }
}
