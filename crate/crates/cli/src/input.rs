//! Input files: problems, bare generator sets, and structure constants.
//! An argument that names an embedded example is accepted in place of a
//! path.

use std::path::Path;

use hidsym::liealg::{AlgebraWire, LieAlgebra};
use hidsym::problem::{self, ChartWire, GeneratorWire, OdeProblem};
use hidsym::vfield::{Chart, VectorField};
use hidsym::{Error, Result};
use serde::Deserialize;

/// Named generators on one chart, with an optional reduction path.
#[derive(Clone, Debug)]
pub struct FieldSet {
    pub chart: Chart,
    pub names: Vec<String>,
    pub fields: Vec<VectorField>,
    pub path: Vec<String>,
}

impl FieldSet {
    pub fn get(&self, name: &str) -> Result<&VectorField> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| &self.fields[i])
            .ok_or_else(|| Error::UnknownLabel(name.into()))
    }

    pub fn algebra(&self) -> Result<LieAlgebra> {
        LieAlgebra::from_fields(self.names.clone(), &self.fields)
    }

    /// Fields named in `wanted`, or the first `n` when `wanted` is empty.
    pub fn pick(&self, wanted: &[String], n: usize) -> Result<Vec<(String, VectorField)>> {
        if wanted.is_empty() {
            if self.fields.len() < n {
                return Err(Error::InvalidInput(format!("need {n} generators, file has {}", self.fields.len())));
            }
            return Ok(self.names[..n].iter().cloned().zip(self.fields[..n].iter().cloned()).collect());
        }
        if wanted.len() != n {
            return Err(Error::InvalidInput(format!("expected {n} generator names, got {}", wanted.len())));
        }
        wanted.iter().map(|w| Ok((w.clone(), self.get(w)?.clone()))).collect()
    }
}

#[derive(Deserialize)]
struct FieldsWire {
    chart: ChartWire,
    generators: Vec<GeneratorWire>,
    #[serde(default)]
    path: Vec<String>,
}

#[derive(Clone, Debug)]
pub enum Input {
    Problem(Box<OdeProblem>),
    Fields(FieldSet),
    Algebra(LieAlgebra, Vec<String>),
}

impl Input {
    pub fn fields(&self) -> Result<FieldSet> {
        match self {
            Input::Problem(p) => Ok(FieldSet {
                chart: p.equation.chart.with_order(0),
                names: p.names(),
                fields: p.fields(),
                path: p.path.clone(),
            }),
            Input::Fields(f) => Ok(f.clone()),
            Input::Algebra(..) => Err(Error::InvalidInput("structure constants carry no vector fields".into())),
        }
    }

    pub fn algebra(&self) -> Result<(LieAlgebra, Vec<String>)> {
        match self {
            Input::Algebra(l, path) => Ok((l.clone(), path.clone())),
            other => {
                let f = other.fields()?;
                Ok((f.algebra()?, f.path))
            }
        }
    }

    pub fn problem(&self) -> Result<&OdeProblem> {
        match self {
            Input::Problem(p) => Ok(p),
            _ => Err(Error::InvalidInput("this command needs a problem file with an `ode` entry".into())),
        }
    }
}

pub fn parse_fields(text: &str) -> Result<FieldSet> {
    let w: FieldsWire = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("generator JSON: {e}")))?;
    let chart = w.chart.chart(0);
    let mut names = Vec::new();
    let mut fields = Vec::new();
    for g in &w.generators {
        if names.contains(&g.name) {
            return Err(Error::InvalidInput(format!("generator {} declared twice", g.name)));
        }
        names.push(g.name.clone());
        fields.push(VectorField::parse_planar(&chart, &g.xi, &g.eta)?);
    }
    Ok(FieldSet { chart, names, fields, path: w.path })
}

pub fn parse_input(text: &str) -> Result<Input> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("JSON: {e}")))?;
    if v.get("ode").is_some() {
        return Ok(Input::Problem(Box::new(OdeProblem::from_json(text)?)));
    }
    if v.get("basis").is_some() {
        let path: Vec<String> = match v.get("path") {
            Some(p) => serde_json::from_value(p.clone()).map_err(|e| Error::InvalidInput(format!("path: {e}")))?,
            None => vec![],
        };
        let w: AlgebraWire = serde_json::from_value(v).map_err(|e| Error::InvalidInput(format!("algebra JSON: {e}")))?;
        return Ok(Input::Algebra(LieAlgebra::from_wire(&w)?, path));
    }
    if v.get("generators").is_some() {
        return Ok(Input::Fields(parse_fields(text)?));
    }
    Err(Error::InvalidInput("expected a problem (`ode`), generators (`generators`) or structure constants (`basis`)".into()))
}

/// Reads a file, or an embedded example when no such file exists.
pub fn load(arg: &str) -> Result<Input> {
    if !Path::new(arg).exists() {
        if let Some((_, text)) = problem::EXAMPLES.iter().find(|(id, _)| *id == arg) {
            return parse_input(text);
        }
    }
    let text = std::fs::read_to_string(arg).map_err(|e| Error::InvalidInput(format!("cannot read {arg}: {e}")))?;
    parse_input(&text)
}
