//! Run configuration as sectioned TOML.
//!
//! ```toml
//! [background]
//! circumference = 6.283185307179586
//! sphere_radius = 1.0
//! yamabe = 55.4
//!
//! [solve]
//! delta = -1.0
//! t_target = 0.0
//! grid_n = 128
//! scheme = "spectral"
//! warp = [0.05]
//!
//! [spectrum]
//! kappa1 = -1.0
//! kappa2 = -1.0
//! eigs1 = [0.0, 0.1, 1.0]
//! eigs2 = [0.0, 0.1, 1.0]
//! ```
//!
//! Every section and key is optional; omitted solve keys take the
//! [`SolveConfig`] defaults. Unknown keys are rejected.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::S1xS3;
use crate::ledger::builtin;
use crate::paneitz::ProductSpectrumInput;
use crate::solver::SolveConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackgroundSection {
    pub circumference: f64,
    pub sphere_radius: f64,
    /// Yamabe input for the lower-bound monitor.
    pub yamabe: f64,
}

impl Default for BackgroundSection {
    fn default() -> Self {
        Self {
            circumference: 2.0 * PI,
            sphere_radius: 1.0,
            yamabe: builtin::s1xs3().yamabe,
        }
    }
}

impl BackgroundSection {
    pub fn s1xs3(&self) -> Result<S1xS3> {
        S1xS3::new(self.circumference, self.sphere_radius).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub background: BackgroundSection,
    pub solve: SolveConfig,
    pub spectrum: Option<ProductSpectrumInput>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DerivativeScheme;

    #[test]
    fn empty_config_gives_defaults() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c.solve, SolveConfig::default());
        assert_eq!(c.background.s1xs3().unwrap(), S1xS3::standard());
        assert!(c.spectrum.is_none());
    }

    #[test]
    fn sections_parse() {
        let c = RunConfig::parse(
            "[solve]\ndelta = -2.0\nt_target = 0.5\nscheme = \"fd4\"\nwarp = [0.05, 0.01]\n\n[spectrum]\nkappa1 = -1.0\nkappa2 = -1.0\neigs1 = [0.0, 0.1]\neigs2 = [0.0]\n",
        )
        .unwrap();
        assert_eq!(c.solve.delta, -2.0);
        assert_eq!(c.solve.t_target, 0.5);
        assert_eq!(c.solve.scheme, DerivativeScheme::Fd4);
        assert_eq!(c.solve.warp, vec![0.05, 0.01]);
        assert_eq!(c.solve.grid_n, 128);
        assert_eq!(c.spectrum.unwrap().eigs1, vec![0.0, 0.1]);
    }

    #[test]
    fn bad_input_is_config_error() {
        assert!(matches!(RunConfig::parse("[solve]\ndelta = \"x\""), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("[solve]\ndleta = -1.0"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("[sovle]\n"), Err(Error::Config(_))));
        assert!(matches!(
            RunConfig::load(Path::new("/nonexistent/run.toml")),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn round_trips_through_toml() {
        let mut c = RunConfig::default();
        c.solve.warp = vec![0.1];
        c.spectrum = Some(ProductSpectrumInput {
            kappa1: 1.0,
            kappa2: 1.0,
            eigs1: vec![0.0, 2.0],
            eigs2: vec![0.0, 2.0],
        });
        assert_eq!(RunConfig::parse(&c.to_toml().unwrap()).unwrap(), c);
    }
}
