//! Declarative operator configs.
//!
//! A config is a TOML table with a `kind` key and kind-specific keys:
//!
//! ```toml
//! # Laurent (bilateral) or Toeplitz (unilateral) operator
//! kind = "laurent"
//! mode = "bilateral"            # optional, default bilateral
//! coefficients = [0.0, 1.0]     # a_0, a_1, ..., a_K with a_{-k} = a_k
//! # or a registry symbol, cut to band K:
//! # symbol = "step:-1,1"
//! # band = 8
//! # quadrature_points = 4096
//!
//! kind = "almost_mathieu"
//! theta = 2.221441469           # or sigma = 0.5 for the discretised Hamiltonian
//! potential = "linear:1"
//!
//! kind = "permutation"
//! limit = 8192
//!
//! kind = "periodic"
//! mode = "bilateral"
//! diagonal = [0.0]
//! off_diagonal = [1.0, 0.5]
//! ```
//!
//! Symbols: `constant:c`, `cosine:a` (`a cos x`), `trig:c0,c1,...`
//! (`c0 + Σ c_k cos kx`), `step:lo,hi` (`hi` on `|x| < π/2`, `lo` elsewhere).
//!
//! Potentials: `zero`, `linear:λ` (`2λx`), `cosine:λ` (`2λ cos πx`),
//! `step:a,b` (`a` for `x < 0`, `b` otherwise).

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::operator::{
    almost_mathieu_operator, appendix_permutation, discretized_hamiltonian, fourier_coefficients, laurent_operator,
    permutation_operator, toeplitz_operator, FourierCoefficients, IndexMode, Operator, OperatorSpec,
    PermutationOperator, RealFn, SymbolSpec, DEFAULT_QUADRATURE_POINTS,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Laurent,
    AlmostMathieu,
    Permutation,
    Periodic,
}

/// The raw config table; [`OperatorConfig::build`] validates it.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    pub kind: Option<OperatorKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<IndexMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbol: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub off_diagonal: Option<Vec<f64>>,
}

/// A constructed operator together with its symbol when it has one.
#[derive(Clone, Debug)]
pub enum BuiltOperator {
    Banded { spec: OperatorSpec, symbol: Option<SymbolSpec> },
    Permutation(PermutationOperator),
}

impl BuiltOperator {
    pub fn as_operator(&self) -> &dyn Operator {
        match self {
            BuiltOperator::Banded { spec, .. } => spec,
            BuiltOperator::Permutation(p) => p,
        }
    }

    pub fn spec(&self) -> Option<&OperatorSpec> {
        match self {
            BuiltOperator::Banded { spec, .. } => Some(spec),
            BuiltOperator::Permutation(_) => None,
        }
    }

    /// Symbol of the banded operator actually built (after band truncation).
    pub fn symbol(&self) -> Option<&SymbolSpec> {
        match self {
            BuiltOperator::Banded { symbol, .. } => symbol.as_ref(),
            BuiltOperator::Permutation(_) => None,
        }
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Configuration(msg.into())
}

impl OperatorConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| config_err(format!("invalid operator config: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("operator configs serialise")
    }

    fn reject(&self, kind: &str, keys: &[(&str, bool)]) -> Result<()> {
        match keys.iter().find(|(_, present)| *present) {
            Some((key, _)) => Err(config_err(format!("key `{key}` does not apply to kind = \"{kind}\""))),
            None => Ok(()),
        }
    }

    pub fn build(&self) -> Result<BuiltOperator> {
        match self.kind {
            None => Err(config_err("missing key `kind`")),
            Some(OperatorKind::Laurent) => self.build_laurent(),
            Some(OperatorKind::AlmostMathieu) => self.build_almost_mathieu(),
            Some(OperatorKind::Permutation) => self.build_permutation(),
            Some(OperatorKind::Periodic) => self.build_periodic(),
        }
    }

    fn build_laurent(&self) -> Result<BuiltOperator> {
        self.reject(
            "laurent",
            &[
                ("theta", self.theta.is_some()),
                ("sigma", self.sigma.is_some()),
                ("potential", self.potential.is_some()),
                ("limit", self.limit.is_some()),
                ("diagonal", self.diagonal.is_some()),
                ("off_diagonal", self.off_diagonal.is_some()),
            ],
        )?;
        let points = self.quadrature_points.unwrap_or(DEFAULT_QUADRATURE_POINTS);
        let coeffs = match (&self.coefficients, &self.symbol) {
            (Some(_), Some(_)) => return Err(config_err("give either `coefficients` or `symbol`, not both")),
            (None, None) => return Err(config_err("laurent configs need `coefficients` or `symbol`")),
            (Some(c), None) => {
                if self.band.is_some() {
                    return Err(config_err("`band` only applies to `symbol` configs"));
                }
                FourierCoefficients::symmetric(c)?
            }
            (None, Some(name)) => {
                let (sym, natural_band) = parse_symbol(name, points)?;
                let band = match (self.band, natural_band) {
                    (Some(b), _) => b,
                    (None, Some(b)) => b,
                    (None, None) => return Err(config_err(format!("symbol `{name}` needs a `band`"))),
                };
                fourier_coefficients(&sym, band as i64)?
            }
        };
        let spec = match self.mode.unwrap_or(IndexMode::Bilateral) {
            IndexMode::Bilateral => laurent_operator(&coeffs)?,
            IndexMode::Unilateral => toeplitz_operator(&coeffs)?,
        };
        let symbol = trig_symbol(&coeffs, points)?;
        Ok(BuiltOperator::Banded { spec, symbol: Some(symbol) })
    }

    fn build_almost_mathieu(&self) -> Result<BuiltOperator> {
        self.reject(
            "almost_mathieu",
            &[
                ("coefficients", self.coefficients.is_some()),
                ("symbol", self.symbol.is_some()),
                ("band", self.band.is_some()),
                ("quadrature_points", self.quadrature_points.is_some()),
                ("limit", self.limit.is_some()),
                ("diagonal", self.diagonal.is_some()),
                ("off_diagonal", self.off_diagonal.is_some()),
            ],
        )?;
        if self.mode == Some(IndexMode::Unilateral) {
            return Err(config_err("almost_mathieu operators are bilateral"));
        }
        let v = parse_potential(self.potential.as_deref().unwrap_or("zero"))?;
        let spec = match (self.theta, self.sigma) {
            (Some(theta), None) => almost_mathieu_operator(v, theta)?,
            (None, Some(sigma)) => discretized_hamiltonian(v, sigma)?,
            _ => return Err(config_err("almost_mathieu configs need exactly one of `theta` and `sigma`")),
        };
        Ok(BuiltOperator::Banded { spec, symbol: None })
    }

    fn build_permutation(&self) -> Result<BuiltOperator> {
        self.reject(
            "permutation",
            &[
                ("coefficients", self.coefficients.is_some()),
                ("symbol", self.symbol.is_some()),
                ("band", self.band.is_some()),
                ("quadrature_points", self.quadrature_points.is_some()),
                ("theta", self.theta.is_some()),
                ("sigma", self.sigma.is_some()),
                ("potential", self.potential.is_some()),
                ("diagonal", self.diagonal.is_some()),
                ("off_diagonal", self.off_diagonal.is_some()),
            ],
        )?;
        if self.mode == Some(IndexMode::Bilateral) {
            return Err(config_err("the permutation operator is unilateral"));
        }
        let limit = self.limit.ok_or_else(|| config_err("permutation configs need `limit`"))?;
        Ok(BuiltOperator::Permutation(permutation_operator(appendix_permutation(limit)?)))
    }

    fn build_periodic(&self) -> Result<BuiltOperator> {
        self.reject(
            "periodic",
            &[
                ("coefficients", self.coefficients.is_some()),
                ("symbol", self.symbol.is_some()),
                ("band", self.band.is_some()),
                ("quadrature_points", self.quadrature_points.is_some()),
                ("theta", self.theta.is_some()),
                ("sigma", self.sigma.is_some()),
                ("potential", self.potential.is_some()),
                ("limit", self.limit.is_some()),
            ],
        )?;
        let d = self.diagonal.as_deref().ok_or_else(|| config_err("periodic configs need `diagonal`"))?;
        let e = self.off_diagonal.as_deref().ok_or_else(|| config_err("periodic configs need `off_diagonal`"))?;
        let spec = OperatorSpec::periodic_jacobi(self.mode.unwrap_or(IndexMode::Bilateral), d, e)?;
        Ok(BuiltOperator::Banded { spec, symbol: None })
    }
}

fn parse_numbers(name: &str, args: &str) -> Result<Vec<f64>> {
    args.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| config_err(format!("bad number `{s}` in `{name}`"))))
        .collect()
}

fn split_entry(entry: &str) -> (&str, Option<&str>) {
    match entry.split_once(':') {
        Some((name, args)) => (name.trim(), Some(args)),
        None => (entry.trim(), None),
    }
}

fn arity(entry: &str, args: Option<&str>, n: usize) -> Result<Vec<f64>> {
    let values = match args {
        Some(a) => parse_numbers(entry, a)?,
        None => Vec::new(),
    };
    if values.len() != n {
        return Err(config_err(format!("`{entry}` expects {n} parameter(s)")));
    }
    Ok(values)
}

/// Potential `v` on `[-1, 1]` from the registry.
pub fn parse_potential(entry: &str) -> Result<RealFn> {
    let (name, args) = split_entry(entry);
    let v: RealFn = match name {
        "zero" => {
            arity(entry, args, 0)?;
            Arc::new(|_| 0.0)
        }
        "linear" => {
            let l = arity(entry, args, 1)?[0];
            Arc::new(move |x| 2.0 * l * x)
        }
        "cosine" => {
            let l = arity(entry, args, 1)?[0];
            Arc::new(move |x| 2.0 * l * (PI * x).cos())
        }
        "step" => {
            let p = arity(entry, args, 2)?;
            let (a, b) = (p[0], p[1]);
            Arc::new(move |x| if x < 0.0 { a } else { b })
        }
        _ => return Err(config_err(format!("unknown potential `{entry}`"))),
    };
    Ok(v)
}

/// Symbol from the registry and its natural band, if it has one.
pub fn parse_symbol(entry: &str, points: usize) -> Result<(SymbolSpec, Option<usize>)> {
    let (name, args) = split_entry(entry);
    match name {
        "constant" => {
            let c = arity(entry, args, 1)?[0];
            Ok((SymbolSpec::new(entry, Arc::new(move |_| c), points)?, Some(0)))
        }
        "cosine" => {
            let a = arity(entry, args, 1)?[0];
            Ok((SymbolSpec::new(entry, Arc::new(move |x: f64| a * x.cos()), points)?, Some(1)))
        }
        "trig" => {
            let c = parse_numbers(entry, args.unwrap_or(""))?;
            let band = c.len() - 1;
            let f = move |x: f64| c.iter().enumerate().map(|(k, ck)| ck * (k as f64 * x).cos()).sum::<f64>();
            Ok((SymbolSpec::new(entry, Arc::new(f), points)?, Some(band)))
        }
        "step" => {
            let p = arity(entry, args, 2)?;
            let (lo, hi) = (p[0], p[1]);
            let mid = 0.5 * (lo + hi);
            let f = move |x: f64| {
                let r = x.abs();
                if r < PI / 2.0 {
                    hi
                } else if r == PI / 2.0 {
                    mid
                } else {
                    lo
                }
            };
            Ok((SymbolSpec::new(entry, Arc::new(f), points)?, None))
        }
        _ => Err(config_err(format!("unknown symbol `{entry}`"))),
    }
}

/// `a_0 + 2 Σ a_k cos kx`, the symbol of a Laurent operator with even coefficients.
fn trig_symbol(coeffs: &FourierCoefficients, points: usize) -> Result<SymbolSpec> {
    let k_max = coeffs.k_max() as i64;
    let a: Vec<f64> = (0..=k_max).map(|k| coeffs.get(k)).collect();
    let f = move |x: f64| {
        a.iter().enumerate().map(|(k, ak)| if k == 0 { *ak } else { 2.0 * ak * (k as f64 * x).cos() }).sum::<f64>()
    };
    SymbolSpec::new(format!("trig(K={k_max})"), Arc::new(f), points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(text: &str) -> Result<BuiltOperator> {
        OperatorConfig::from_toml_str(text)?.build()
    }

    #[test]
    fn laurent_from_coefficients() {
        let op = build("kind = \"laurent\"\ncoefficients = [0.0, 1.0]").unwrap();
        let spec = op.spec().unwrap();
        assert_eq!(spec.mode(), IndexMode::Bilateral);
        assert_eq!(spec.entry(3, 4).unwrap(), 1.0);
        assert!((op.symbol().unwrap().eval(0.3) - 2.0 * 0.3f64.cos()).abs() < 1e-15);

        let op = build("kind = \"laurent\"\nmode = \"unilateral\"\ncoefficients = [0.5]").unwrap();
        assert_eq!(op.as_operator().index_mode(), IndexMode::Unilateral);
    }

    #[test]
    fn laurent_from_symbol() {
        let op = build("kind = \"laurent\"\nsymbol = \"cosine:2\"").unwrap();
        assert!((op.spec().unwrap().entry(0, 1).unwrap() - 1.0).abs() < 1e-12);
        let op = build("kind = \"laurent\"\nsymbol = \"step:-1,1\"\nband = 8").unwrap();
        assert_eq!(op.spec().unwrap().band(), 8);
        assert!(matches!(build("kind = \"laurent\"\nsymbol = \"step:-1,1\""), Err(Error::Configuration(_))));
        let op = build("kind = \"laurent\"\nsymbol = \"trig:0.5,0,1\"").unwrap();
        assert!((op.spec().unwrap().entry(0, 2).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn almost_mathieu_and_hamiltonian() {
        let op = build("kind = \"almost_mathieu\"\ntheta = 1.0\npotential = \"linear:1\"").unwrap();
        let spec = op.spec().unwrap();
        assert!((spec.entry(1, 1).unwrap() - 2.0 * 1.0f64.sin()).abs() < 1e-15);
        let op = build("kind = \"almost_mathieu\"\nsigma = 0.5\npotential = \"linear:1\"").unwrap();
        let d = op.spec().unwrap().entry(1, 1).unwrap();
        assert!((d + 2.0 * 0.5f64.sin()).abs() < 1e-15);
        assert!(build("kind = \"almost_mathieu\"\ntheta = 1.0\nsigma = 0.5").is_err());
        assert!(build("kind = \"almost_mathieu\"").is_err());
    }

    #[test]
    fn permutation_and_periodic() {
        let op = build("kind = \"permutation\"\nlimit = 64").unwrap();
        assert_eq!(op.as_operator().entry(17, 4).unwrap(), 1.0);
        assert!(op.spec().is_none());
        let op = build("kind = \"periodic\"\ndiagonal = [0.0]\noff_diagonal = [1.0, 0.5]").unwrap();
        assert_eq!(op.spec().unwrap().entry(0, 1).unwrap(), 1.0);
        assert_eq!(op.spec().unwrap().entry(1, 2).unwrap(), 0.5);
    }

    #[test]
    fn config_errors() {
        for text in [
            "",
            "kind = \"nope\"",
            "kind = \"laurent\"",
            "kind = \"laurent\"\ncoefficients = [1.0]\nlimit = 4",
            "kind = \"laurent\"\ncoefficients = [1.0]\nwhatever = 1",
            "kind = \"permutation\"",
            "kind = \"almost_mathieu\"\ntheta = 1.0\npotential = \"quartic:1\"",
            "kind = \"almost_mathieu\"\ntheta = 1.0\npotential = \"linear\"",
            "kind = \"periodic\"\ndiagonal = [0.0]",
        ] {
            assert!(matches!(build(text), Err(Error::Configuration(_))), "{text:?}");
        }
        assert!(matches!(build("kind = \"permutation\"\nlimit = 3"), Err(Error::Domain(_))));
    }

    #[test]
    fn potentials() {
        let v = parse_potential("step:-1,2").unwrap();
        assert_eq!((v(-0.5), v(0.0), v(0.5)), (-1.0, 2.0, 2.0));
        assert_eq!(parse_potential("zero").unwrap()(0.3), 0.0);
        assert!((parse_potential("cosine:0.5").unwrap()(1.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn config_round_trips() {
        let cfg = OperatorConfig::from_toml_str("kind = \"laurent\"\nsymbol = \"step:-1,1\"\nband = 8").unwrap();
        let again = OperatorConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, again);
    }
}
