//! Run configuration: suite selection, catalog filter, seed, node counts and
//! tolerance tiers, read from a flat `key = value` file and overridden from
//! the command line.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{Error, Result};
use crate::variation::QuadratureSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Algebra,
    NkIdentities,
    Curve,
    Variation,
    Index,
    Cone,
    All,
}

impl Suite {
    pub const CONCRETE: [Suite; 6] =
        [Suite::Algebra, Suite::NkIdentities, Suite::Curve, Suite::Variation, Suite::Index, Suite::Cone];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::NkIdentities => "nk-identities",
            Suite::Curve => "curve",
            Suite::Variation => "variation",
            Suite::Index => "index",
            Suite::Cone => "cone",
            Suite::All => "all",
        }
    }

    /// Concrete suites in execution order.
    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Suite::CONCRETE.to_vec(),
            s => vec![s],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::CONCRETE
            .iter()
            .chain(&[Suite::All])
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}`")))
    }
}

/// Tolerance tiers by derivative depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tier {
    Algebraic,
    Fd1,
    Fd2,
    Integral,
}

impl Tier {
    pub const ALL: [Tier; 4] = [Tier::Algebraic, Tier::Fd1, Tier::Fd2, Tier::Integral];

    pub fn name(self) -> &'static str {
        match self {
            Tier::Algebraic => "algebraic",
            Tier::Fd1 => "fd1",
            Tier::Fd2 => "fd2",
            Tier::Integral => "integral",
        }
    }
}

impl FromStr for Tier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Tier::ALL
            .iter()
            .find(|t| t.name() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown tolerance tier `{s}` (expected algebraic, fd1, fd2 or integral)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub algebraic: f64,
    pub fd1: f64,
    pub fd2: f64,
    pub integral: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { algebraic: 1e-7, fd1: 1e-5, fd2: 1e-4, integral: 1e-3 }
    }
}

impl Tolerances {
    pub fn get(&self, t: Tier) -> f64 {
        match t {
            Tier::Algebraic => self.algebraic,
            Tier::Fd1 => self.fd1,
            Tier::Fd2 => self.fd2,
            Tier::Integral => self.integral,
        }
    }

    pub fn set(&mut self, t: Tier, v: f64) -> Result<()> {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Config(format!("tolerance for `{}` must be positive, got {v}", t.name())));
        }
        *match t {
            Tier::Algebraic => &mut self.algebraic,
            Tier::Fd1 => &mut self.fd1,
            Tier::Fd2 => &mut self.fd2,
            Tier::Integral => &mut self.integral,
        } = v;
        Ok(())
    }

    /// Applies an override of the form `tier=value`.
    pub fn apply(&mut self, spec: &str) -> Result<()> {
        let (k, v) = spec
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("tolerance override `{spec}` is not of the form tier=value")))?;
        let v: f64 = v.trim().parse().map_err(|_| Error::Config(format!("bad tolerance value in `{spec}`")))?;
        self.set(k.trim().parse()?, v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub suite: Suite,
    /// Empty means every shipped entry.
    pub catalog_ids: Vec<String>,
    pub seed: u64,
    pub quadrature: QuadratureSpec,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub output_path: PathBuf,
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suite: Suite::All,
            catalog_ids: Vec::new(),
            seed: 42,
            quadrature: nodes_spec(64),
            tolerances: Tolerances::default(),
            output_path: PathBuf::from("nklab-report.json"),
            parallel: false,
        }
    }
}

/// Interior count `n` with `4n` boundary nodes.
pub fn nodes_spec(n: usize) -> QuadratureSpec {
    QuadratureSpec { interior: n, boundary: 4 * n }
}

pub fn parse_nodes(s: &str) -> Result<usize> {
    let n: usize = s.trim().parse().map_err(|_| Error::Config(format!("node count `{s}` is not an integer")))?;
    check_nodes(n)?;
    Ok(n)
}

fn check_nodes(n: usize) -> Result<()> {
    if n < 16 || !n.is_power_of_two() {
        return Err(Error::Config(format!("node count {n} must be a power of two >= 16")));
    }
    Ok(())
}

pub fn parse_catalog_ids(s: &str) -> Result<Vec<String>> {
    let ids: Vec<String> = s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect();
    for id in &ids {
        if !catalog::IDS.contains(&id.as_str()) {
            return Err(Error::Config(format!("unknown catalog id `{id}`")));
        }
    }
    Ok(ids)
}

fn parse_bool(s: &str) -> Result<bool> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("`{s}` is not a boolean"))),
    }
}

impl RunConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(k.trim(), v.trim()).map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "suite" => self.suite = value.parse()?,
            "catalog" => self.catalog_ids = parse_catalog_ids(value)?,
            "seed" => self.seed = value.parse().map_err(|_| Error::Config(format!("seed `{value}` is not a u64")))?,
            "nodes" => self.quadrature = nodes_spec(parse_nodes(value)?),
            "out" => self.output_path = PathBuf::from(value),
            "parallel" => self.parallel = parse_bool(value)?,
            k => match k.strip_prefix("tol.") {
                Some(t) => {
                    let v = value.parse().map_err(|_| Error::Config(format!("bad tolerance `{value}`")))?;
                    self.tolerances.set(t.parse()?, v)?
                }
                None => return Err(Error::Config(format!("unknown key `{k}`"))),
            },
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        check_nodes(self.quadrature.interior)?;
        for t in Tier::ALL {
            let v = self.tolerances.get(t);
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("tolerance for `{}` must be positive", t.name())));
            }
        }
        parse_catalog_ids(&self.catalog_ids.join(","))?;
        Ok(())
    }

    /// Whether checks on `id` are selected.
    pub fn selects(&self, id: &str) -> bool {
        self.catalog_ids.is_empty() || self.catalog_ids.iter().any(|x| x == id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!(c.quadrature, QuadratureSpec { interior: 64, boundary: 256 });
        assert_eq!(Suite::All.expand().len(), 6);
    }

    #[test]
    fn parses_file_format() {
        let c = RunConfig::parse(
            "# demo\nsuite = cone\ncatalog = hl-torus, halfsphere-lag\nseed = 7\nnodes = 32\ntol.fd1 = 2e-5\nparallel = yes\n",
        )
        .unwrap();
        assert_eq!(c.suite, Suite::Cone);
        assert_eq!(c.catalog_ids, ["hl-torus", "halfsphere-lag"]);
        assert_eq!(c.seed, 7);
        assert_eq!(c.quadrature.interior, 32);
        assert_eq!(c.tolerances.fd1, 2e-5);
        assert!(c.parallel);
        assert!(c.selects("hl-torus") && !c.selects("small-sphere"));
    }

    #[test]
    fn rejects_bad_values() {
        for bad in [
            "suite = everything",
            "catalog = no-such-surface",
            "nodes = 48",
            "nodes = 8",
            "tol.fd1 = -1",
            "tol.fd3 = 1e-3",
            "colour = blue",
            "seed",
        ] {
            assert!(matches!(RunConfig::parse(bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn tier_overrides() {
        let mut t = Tolerances::default();
        t.apply("integral=5e-3").unwrap();
        assert_eq!(t.get(Tier::Integral), 5e-3);
        assert!(t.apply("integral").is_err());
        assert!(t.apply("integral=0").is_err());
    }
}
