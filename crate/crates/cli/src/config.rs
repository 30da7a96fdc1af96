use std::f64::consts::TAU;
use std::path::Path;

use lattice_akns::darboux::{soliton_type1, soliton_type2, OneSoliton, SolitonFamily, SolitonParams};
use lattice_akns::{AlState, ClosureKind, Complex64, DnlsState, Flow, RankOnePair};
use rand::rngs::StdRng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::{CliError, Model};

/// Reads a JSON parameter block, or the defaults when no file is given.
pub fn load<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Parses `RE` or `RE,IM`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let f = |p: &str| p.parse::<f64>().map_err(|e| format!("{p}: {e}"));
    match parts.as_slice() {
        [re] => Ok(cx(f(re)?, 0.0)),
        [re, im] => Ok(cx(f(re)?, f(im)?)),
        _ => Err(format!("expected RE or RE,IM, got {s}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PairConfig {
    pub n_dim: usize,
    pub m_dim: usize,
    pub closure: ClosureKind,
}

impl Default for PairConfig {
    fn default() -> Self {
        Self { n_dim: 1, m_dim: 1, closure: ClosureKind::TripleProduct }
    }
}

impl PairConfig {
    pub fn build(&self, kappa: Complex64) -> Result<RankOnePair, CliError> {
        Ok(RankOnePair::new(self.n_dim, self.m_dim, kappa, self.closure)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub samples: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self { start: 0.0, stop: 1.0, samples: 11 }
    }
}

impl TimeGrid {
    pub fn times(&self) -> Result<Vec<f64>, CliError> {
        match self.samples {
            0 => Err(CliError::Usage("times.samples must be positive".into())),
            1 => Ok(vec![self.start]),
            n => Ok((0..n).map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64).collect()),
        }
    }
}

/// Default first-family soliton: `ξ = e^{2πi/12}` on twelve periodic sites.
pub fn default_soliton(flow: Flow) -> SolitonParams {
    let mut p = SolitonParams::type1(Complex64::from_polar(1.0, TAU / 12.0), cx(1.1, 0.0), cx(0.5, 0.0), cx(0.3, 0.1), flow);
    p.periodic = true;
    p
}

pub fn build_soliton(
    params: &SolitonParams,
    pair: &RankOnePair,
    first_site: i64,
    n_sites: usize,
    halo: usize,
    t: f64,
) -> Result<OneSoliton, CliError> {
    Ok(match params.family {
        SolitonFamily::Type1 { .. } => soliton_type1(params, pair, first_site, n_sites, halo, t)?,
        SolitonFamily::Type2 { .. } => soliton_type2(params, pair, first_site, n_sites, halo, t)?,
    })
}

/// Initial lattice for the evolution commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Initial {
    /// Uniform entries in `[-amplitude, amplitude]` drawn from the run seed.
    Random { n_sites: usize, n_dim: usize, m_dim: usize, amplitude: f64 },
    /// A one-soliton sampled at `t = 0` (model dnls only).
    Soliton { soliton: SolitonParams, pair: PairConfig, n_sites: usize },
}

impl Default for Initial {
    fn default() -> Self {
        Initial::Random { n_sites: 10, n_dim: 1, m_dim: 2, amplitude: 0.3 }
    }
}

pub enum InitialState {
    Dnls(DnlsState),
    Al(AlState),
}

impl Initial {
    pub fn build(&self, model: Model, rng: &mut StdRng) -> Result<InitialState, CliError> {
        match (self, model) {
            (Initial::Random { n_sites, n_dim, m_dim, amplitude }, Model::Dnls) => {
                Ok(InitialState::Dnls(DnlsState::random(rng, *n_sites, *n_dim, *m_dim, *amplitude)))
            }
            (Initial::Random { n_sites, n_dim, m_dim, amplitude }, Model::Al) => {
                Ok(InitialState::Al(AlState::random(rng, *n_sites, *n_dim, *m_dim, *amplitude)))
            }
            (Initial::Soliton { soliton, pair, n_sites }, Model::Dnls) => {
                let pair = pair.build(soliton.kappa)?;
                Ok(InitialState::Dnls(build_soliton(soliton, &pair, 1, *n_sites, 0, 0.0)?.state()))
            }
            (Initial::Soliton { .. }, Model::Al) => Err(CliError::Usage("soliton initial data needs --model dnls".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_arguments() {
        assert_eq!(parse_complex("0.5").unwrap(), cx(0.5, 0.0));
        assert_eq!(parse_complex("0.5, -1").unwrap(), cx(0.5, -1.0));
        assert!(parse_complex("a,b").is_err());
        assert!(parse_complex("1,2,3").is_err());
    }

    #[test]
    fn time_grid_endpoints() {
        let t = TimeGrid { start: 0.0, stop: 1.0, samples: 3 }.times().unwrap();
        assert_eq!(t, vec![0.0, 0.5, 1.0]);
    }
}
