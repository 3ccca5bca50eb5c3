//! Input documents.
//!
//! A document names a field, the coefficients of `ψ_t` by τ-degree, an
//! optional lattice, and optional parameters. JSON and TOML share one schema.
//! A series is either an integer (a constant in the prime field) or a table
//! `{ terms = [[exponent, coeff], ...], prec = N | "exact" }`, where an
//! exponent is an integer or a string such as `"-3/2"` and a coefficient is a
//! digit list `[c_0, c_1, ...]` over `1, z, ..., z^{d-1}` or an integer code
//! `Σ c_i p^i`.

use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use serde::Deserialize;

use drinfeld_core::drinfeld::{validate, DrinfeldModuleSpec};
use drinfeld_core::ff::{FFElem, FieldSpec, FiniteField};
use drinfeld_core::kummer::LatticeSpec;
use drinfeld_core::laurent::{LaurentElement, Q};
use drinfeld_core::ore::OrePoly;

use crate::CliError;

/// Default degree bound for the independence search.
pub const DEFAULT_SEARCH_DEGREE: usize = 2;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub field: FieldSpec,
    pub module: ModuleBlock,
    #[serde(default)]
    pub lattice: Option<LatticeBlock>,
    #[serde(default)]
    pub params: Params,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleBlock {
    pub psi_t: Vec<SeriesLit>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeBlock {
    #[serde(default)]
    pub generators: Vec<SeriesLit>,
    #[serde(default)]
    pub declared_rank: Option<usize>,
    #[serde(default)]
    pub bound: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default)]
    pub depth: Option<Auto<usize>>,
    #[serde(default)]
    pub prec: Option<Auto<i64>>,
    #[serde(default)]
    pub bound: Option<Rational>,
}

/// A number or the word `auto`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Auto<T> {
    Auto,
    Value(T),
}

impl<T: FromStr> FromStr for Auto<T> {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            Ok(Auto::Auto)
        } else {
            s.parse().map(Auto::Value).map_err(|_| format!("expected a number or \"auto\", got {s:?}"))
        }
    }
}

impl<'de, T: FromStr + TryFrom<i64>> Deserialize<'de> for Auto<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => T::try_from(n)
                .map(Auto::Value)
                .map_err(|_| serde::de::Error::custom(format!("{n} is out of range"))),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Rational literal: an integer or a string `"a/b"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational(pub Q);

impl FromStr for Rational {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Q::from_str(s.trim()).map(Rational).map_err(|_| format!("not a rational number: {s:?}"))
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Rational(Q::from_integer(n))),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CoeffLit {
    Code(i64),
    Digits(Vec<i64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PrecLit {
    Value(Rational),
    Word(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SeriesLit {
    Constant(i64),
    Terms {
        terms: Vec<(Rational, CoeffLit)>,
        #[serde(default)]
        prec: Option<PrecLit>,
    },
}

fn coeff(field: &Arc<FiniteField>, c: &CoeffLit) -> Result<FFElem, CliError> {
    match c {
        CoeffLit::Code(n) if *n < 0 => Ok(FFElem::from_int(field, *n)),
        CoeffLit::Code(n) => {
            if *n >= field.order() as i64 {
                return Err(CliError::Parse(format!(
                    "coefficient code {n} is not below the field order {}",
                    field.order()
                )));
            }
            Ok(FFElem::from_code(field, *n as u32))
        }
        CoeffLit::Digits(ds) => Ok(FFElem::from_coeffs(field, ds)?),
    }
}

/// Builds the element; exponents with `p`-power denominators are allowed.
pub fn series(field: &Arc<FiniteField>, lit: &SeriesLit) -> Result<LaurentElement, CliError> {
    match lit {
        SeriesLit::Constant(n) => Ok(LaurentElement::constant(&FFElem::from_int(field, *n))),
        SeriesLit::Terms { terms, prec } => {
            let mut acc = LaurentElement::zero(field);
            for (e, c) in terms {
                acc = acc.checked_add(&LaurentElement::monomial(&coeff(field, c)?, e.0)?)?;
            }
            match prec {
                None => Ok(acc),
                Some(PrecLit::Word(w)) if w == "exact" => Ok(acc),
                Some(PrecLit::Word(w)) => match w.parse::<Rational>() {
                    Ok(n) => Ok(acc.checked_add(&LaurentElement::big_o(field, n.0)?)?),
                    Err(_) => Err(CliError::Parse(format!("prec must be a number or \"exact\", got {w:?}"))),
                },
                Some(PrecLit::Value(n)) => Ok(acc.checked_add(&LaurentElement::big_o(field, n.0)?)?),
            }
        }
    }
}

/// The document after all literals have been interpreted.
pub struct Resolved {
    pub spec: DrinfeldModuleSpec,
    pub lattice: Option<LatticeSpec>,
    pub params: Params,
}

pub fn load(path: &Path) -> Result<Document, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    parse(&text, path.extension().and_then(|e| e.to_str()))
}

/// Parses by extension; unknown extensions try JSON and then TOML.
pub fn parse(text: &str, ext: Option<&str>) -> Result<Document, CliError> {
    let json = || serde_json::from_str::<Document>(text).map_err(|e| CliError::Parse(format!("JSON: {e}")));
    let toml = || toml::from_str::<Document>(text).map_err(|e| CliError::Parse(format!("TOML: {e}")));
    match ext {
        Some("json") => json(),
        Some("toml") => toml(),
        _ => json().or_else(|_| toml()),
    }
}

pub fn resolve(doc: Document) -> Result<Resolved, CliError> {
    let field = FiniteField::new(doc.field)?;
    let coeffs = doc
        .module
        .psi_t
        .iter()
        .map(|c| series(&field, c))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = validate(&field, OrePoly::new(&field, coeffs))?;
    let lattice = match doc.lattice {
        None => None,
        Some(block) => {
            let gens = block
                .generators
                .iter()
                .map(|g| series(&field, g))
                .collect::<Result<Vec<_>, _>>()?;
            Some(LatticeSpec::new(
                gens,
                block.declared_rank,
                block.bound.unwrap_or(DEFAULT_SEARCH_DEGREE),
            )?)
        }
    };
    Ok(Resolved {
        spec,
        lattice,
        params: doc.params,
    })
}
