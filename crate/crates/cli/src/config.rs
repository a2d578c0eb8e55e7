//! Job configuration files.

use std::path::{Path, PathBuf};

use arrstab_core::characters::CharacterPolynomial;
use arrstab_core::exactlin::{parse_rational, Rational, RationalMatrix};
use arrstab_core::{family_mkr, ArrangementSpec, Generator, MultiIndex, Subspace};
use serde::Deserialize;

use crate::catalog;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Engine(#[from] arrstab_core::Error),
}

/// A constraint coefficient: an integer or a `"p/q"` string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Int(i64),
    Text(String),
}

impl Coefficient {
    fn to_rational(&self) -> Result<Rational, ConfigError> {
        match self {
            Coefficient::Int(v) => Ok(Rational::from_integer((*v).into())),
            Coefficient::Text(s) => Ok(parse_rational(s)?),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub degree: Vec<usize>,
    pub constraints: Vec<Vec<Coefficient>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilyConfig {
    Mkr { m: usize, k: usize, r: usize },
    Braid,
    Conf { r: usize },
    KEquals { k: usize },
    RationalMaps { m: usize },
    Custom {
        m: usize,
        r: usize,
        generators: Vec<GeneratorConfig>,
    },
}

impl FamilyConfig {
    pub fn to_spec(&self) -> Result<ArrangementSpec, ConfigError> {
        let (m, k, r) = match *self {
            FamilyConfig::Mkr { m, k, r } => (m, k, r),
            FamilyConfig::Braid => catalog::BRAID,
            FamilyConfig::Conf { r } => catalog::conf(r),
            FamilyConfig::KEquals { k } => catalog::k_equals(k),
            FamilyConfig::RationalMaps { m } => catalog::rational_maps(m),
            FamilyConfig::Custom {
                m,
                r,
                ref generators,
            } => return custom_spec(m, r, generators),
        };
        Ok(family_mkr(m, k, r)?)
    }
}

fn custom_spec(m: usize, r: usize, generators: &[GeneratorConfig]) -> Result<ArrangementSpec, ConfigError> {
    if generators.is_empty() {
        return Err(ConfigError::Invalid("a custom family needs at least one generator".into()));
    }
    let mut out = Vec::new();
    for g in generators {
        let dim = r * g.degree.iter().sum::<usize>();
        let rows = g
            .constraints
            .iter()
            .map(|row| row.iter().map(Coefficient::to_rational).collect())
            .collect::<Result<Vec<Vec<Rational>>, _>>()?;
        let matrix = RationalMatrix::from_rows(dim, rows)?;
        out.push(Generator {
            degree: MultiIndex::new(g.degree.clone()),
            subspace: Subspace::from_constraints(dim, &matrix)?,
        });
    }
    Ok(ArrangementSpec::new(m, r, out)?)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelRange {
    pub min: Vec<usize>,
    pub max: Vec<usize>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Betti,
    Characters,
    Fit,
    Freeness,
    Normalize,
    Stability,
    Twisted,
}

/// Raw file contents.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub family: FamilyConfig,
    pub levels: LevelRange,
    pub i_max: usize,
    pub outputs: Vec<Output>,
    /// Degree bound for fitting; defaults to `i × (max generator degree)`.
    #[serde(default)]
    pub fit_bound: Option<Vec<usize>>,
    /// Character polynomial of the coefficient module for twisted Betti numbers.
    #[serde(default)]
    pub twisted: Option<String>,
    #[serde(default)]
    pub cache: Option<PathBuf>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

/// A validated job.
#[derive(Clone, Debug)]
pub struct JobConfig {
    pub spec: ArrangementSpec,
    pub levels: Vec<MultiIndex>,
    pub i_max: usize,
    pub outputs: Vec<Output>,
    pub fit_bound: Option<MultiIndex>,
    pub twisted: Option<CharacterPolynomial>,
    pub cache: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = serde_json::from_str(text)?;
        Self::validate(raw)
    }

    pub fn validate(raw: RawConfig) -> Result<Self, ConfigError> {
        let spec = raw.family.to_spec()?;
        let m = spec.m();
        let (lo, hi) = (MultiIndex::new(raw.levels.min), MultiIndex::new(raw.levels.max));
        if lo.m() != m || hi.m() != m {
            return Err(ConfigError::Invalid(format!(
                "level bounds must have {m} entries to match the family"
            )));
        }
        let levels = lo.box_to(&hi);
        if levels.is_empty() {
            return Err(ConfigError::Invalid(format!("empty level range {lo}..{hi}")));
        }
        if raw.outputs.is_empty() {
            return Err(ConfigError::Invalid("no outputs requested".into()));
        }
        let fit_bound = raw.fit_bound.map(MultiIndex::new);
        if fit_bound.as_ref().is_some_and(|b| b.m() != m) {
            return Err(ConfigError::Invalid(format!("fit_bound must have {m} entries")));
        }
        let twisted = raw.twisted.as_deref().map(CharacterPolynomial::parse).transpose()?;
        if twisted.as_ref().is_some_and(|p| p.factors() > m) {
            return Err(ConfigError::Invalid(format!(
                "twisted coefficients use a factor beyond {m}"
            )));
        }
        if raw.outputs.contains(&Output::Twisted) && twisted.is_none() {
            return Err(ConfigError::Invalid(
                "output \"twisted\" needs a \"twisted\" character polynomial".into(),
            ));
        }
        let mut outputs = raw.outputs;
        outputs.sort();
        outputs.dedup();
        Ok(Self {
            spec,
            levels,
            i_max: raw.i_max,
            outputs,
            fit_bound,
            twisted,
            cache: raw.cache,
            out: raw.out,
        })
    }

    pub fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }
}
