//! Input documents and their conversion to library values.

use std::path::{Path, PathBuf};

use bvkit::bv::BVSpace;
use bvkit::json::{GeneratorJson, PolyJson, RationalJson};
use bvkit::linalg::{Matrix, Q};
use bvkit::{Context, Generator, SuperPoly, Window};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::{at, CliError};

/// Raw bytes of every document read for one command, for the input hash.
#[derive(Default)]
pub struct Inputs {
    pub parts: Vec<Vec<u8>>,
}

impl Inputs {
    pub fn read(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
        self.parts.push(bytes.clone());
        Ok(bytes)
    }

    pub fn load<T: DeserializeOwned>(&mut self, path: &Path) -> Result<T, CliError> {
        let bytes = self.read(path)?;
        parse(&bytes)
    }

    pub fn hash(&self) -> String {
        let refs: Vec<&[u8]> = self.parts.iter().map(|p| p.as_slice()).collect();
        crate::report::input_hash(&refs)
    }
}

pub fn parse<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| CliError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

/// Resolves `p` against the directory of the referring document.
pub fn relative(base: &Path, p: &str) -> PathBuf {
    base.parent().unwrap_or(Path::new(".")).join(p)
}

pub fn poly(ctx: &Context, p: &PolyJson, path: &str) -> Result<SuperPoly, CliError> {
    at(path, p.to_poly(ctx))
}

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub name: String,
    #[serde(default)]
    pub gh: i32,
    #[serde(alias = "conjugate")]
    pub antifield: String,
}

/// Canonical pairs (q, p) with gh(q) + gh(p) = −degree, followed by parameters.
#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    #[serde(default)]
    pub degree: Option<i32>,
    pub fields: Vec<FieldSpec>,
    #[serde(default)]
    pub params: Vec<GeneratorJson>,
}

impl SpaceSpec {
    pub fn degree_or(&self, d: i32) -> i32 {
        self.degree.unwrap_or(d)
    }

    /// Context q₁, p₁, q₂, p₂, …, parameters; and the pair indices.
    pub fn context(&self, degree: i32, window: Window, path: &str) -> Result<(Context, Vec<(usize, usize)>), CliError> {
        let mut gens = Vec::new();
        for f in &self.fields {
            gens.push(Generator::new(f.name.clone(), f.gh));
            gens.push(Generator::new(f.antifield.clone(), -degree - f.gh));
        }
        for g in &self.params {
            gens.push(Generator::new(g.name.clone(), g.gh));
        }
        let ctx = at(path, Context::with_window("input", gens, window))?;
        let pairs = (0..self.fields.len()).map(|i| (2 * i, 2 * i + 1)).collect();
        Ok((ctx, pairs))
    }

    pub fn bv(&self, window: Window, path: &str) -> Result<BVSpace, CliError> {
        if self.degree_or(1) != 1 {
            return Err(CliError::Invalid { path: format!("{path}.degree"), message: "a BV space has degree 1".into() });
        }
        let (ctx, pairs) = self.context(1, window, path)?;
        at(path, BVSpace::new(&ctx, pairs))
    }
}

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct CovarianceSpec {
    pub vars: Vec<String>,
    pub matrix: Vec<Vec<RationalJson>>,
}

impl CovarianceSpec {
    pub fn matrix(&self, path: &str) -> Result<Matrix, CliError> {
        let n = self.vars.len();
        if self.matrix.len() != n || self.matrix.iter().any(|r| r.len() != n) {
            return Err(CliError::Invalid { path: format!("{path}.matrix"), message: format!("expected a {n}×{n} matrix") });
        }
        let mut rows = Vec::new();
        for (i, r) in self.matrix.iter().enumerate() {
            let mut row: Vec<Q> = Vec::new();
            for (j, x) in r.iter().enumerate() {
                row.push(at(&format!("{path}.matrix[{i}][{j}]"), x.to_rational())?);
            }
            rows.push(row);
        }
        Ok(Matrix::from_rows(rows))
    }
}
