//! Problem files: an ODE on a chart, named generators, an optional
//! reduction path with chart names and user coordinates, and reference
//! displays compared against engine output.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::calculus::solve_for;
use crate::error::{Error, Result};
use crate::parse::parse;
use crate::poly::Canon;
use crate::vfield::{Chart, OdeEquation, VectorField};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartWire {
    pub independent: String,
    pub dependent: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OdeWire {
    /// `lhs = rhs`, solved for the top derivative.
    pub equation: String,
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorWire {
    pub name: String,
    pub xi: String,
    pub eta: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinatesWire {
    /// Invariant, the next independent variable.
    pub r: String,
    /// Coordinate straightened to translation.
    pub s: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureWire {
    pub generator: String,
    #[serde(default = "default_rho")]
    pub rho: String,
    #[serde(default = "default_theta")]
    pub theta: String,
}

fn default_rho() -> String {
    "rho".into()
}

fn default_theta() -> String {
    "theta".into()
}

/// Reference output to compare with; a mismatch is a warning.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Display {
    /// Equation on the chart after `step` reductions.
    Equation { label: String, step: usize, equation: String },
    /// Restriction of a generator after `step` reductions.
    Restriction { label: String, step: usize, generator: String, xi: String, eta: String },
    /// `dθ/dρ` of the quadrature.
    Slope { label: String, slope: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Options {
    #[serde(default)]
    pub degree: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemWire {
    #[serde(default)]
    pub id: String,
    pub chart: ChartWire,
    pub ode: OdeWire,
    pub generators: Vec<GeneratorWire>,
    #[serde(default)]
    pub path: Vec<String>,
    /// Chart after each path step.
    #[serde(default)]
    pub charts: Vec<ChartWire>,
    /// User canonical coordinates, keyed by generator, written in the
    /// variables of the chart on which that generator is used.
    #[serde(default)]
    pub coordinates: BTreeMap<String, CoordinatesWire>,
    #[serde(default)]
    pub quadrature: Option<QuadratureWire>,
    #[serde(default)]
    pub displays: Vec<Display>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub field: VectorField,
}

/// Parsed and validated problem.
#[derive(Clone, Debug)]
pub struct OdeProblem {
    pub id: String,
    pub equation: OdeEquation,
    pub generators: Vec<Generator>,
    pub path: Vec<String>,
    pub charts: Vec<Chart>,
    pub coordinates: BTreeMap<String, (Canon, Canon)>,
    pub quadrature: Option<QuadratureWire>,
    pub displays: Vec<Display>,
    pub options: Options,
    pub wire: ProblemWire,
}

pub fn canon(text: &str) -> Result<Canon> {
    Canon::from_expr(&parse(text)?)
}

/// Parses `lhs = rhs` on `chart` and solves for the top derivative.
pub fn parse_equation(chart: &Chart, text: &str) -> Result<OdeEquation> {
    let parts: Vec<&str> = text.split('=').collect();
    let e = match parts.as_slice() {
        [lhs, rhs] => canon(lhs)?.sub(&canon(rhs)?),
        [only] => canon(only)?,
        _ => return Err(Error::InvalidInput(format!("equation must contain one '=': {text}"))),
    };
    let top = chart.derivative(chart.order);
    if !e.contains_symbol(&top) {
        return Err(Error::InvalidInput(format!("equation does not contain {top}")));
    }
    let rhs = solve_for(&e, &top).ok_or_else(|| Error::InvalidInput(format!("cannot solve the equation for {top}")))?;
    if (chart.order + 1..chart.order + 4).any(|k| rhs.contains_symbol(&chart.derivative(k))) {
        return Err(Error::InvalidInput(format!("equation involves derivatives above order {}", chart.order)));
    }
    OdeEquation::new(chart.clone(), rhs)
}

impl ChartWire {
    pub fn chart(&self, order: usize) -> Chart {
        Chart::new(&self.independent, &self.dependent, order)
    }
}

impl OdeProblem {
    pub fn from_wire(w: ProblemWire) -> Result<OdeProblem> {
        let n = w.ode.order;
        if n == 0 {
            return Err(Error::InvalidInput("order must be positive".into()));
        }
        let chart = w.chart.chart(n);
        let equation = parse_equation(&chart, &w.ode.equation)?;
        let mut generators: Vec<Generator> = Vec::new();
        for g in &w.generators {
            if generators.iter().any(|h| h.name == g.name) {
                return Err(Error::InvalidInput(format!("generator {} declared twice", g.name)));
            }
            generators.push(Generator { name: g.name.clone(), field: VectorField::parse_planar(&chart, &g.xi, &g.eta)? });
        }
        for (i, p) in w.path.iter().enumerate() {
            if !generators.iter().any(|g| &g.name == p) {
                return Err(Error::UnknownLabel(p.clone()));
            }
            if w.path[..i].contains(p) {
                return Err(Error::InvalidInput(format!("{p} used twice in the path")));
            }
        }
        if w.path.len() >= n {
            return Err(Error::InvalidInput("path must leave at least a first-order equation".into()));
        }
        let mut charts = Vec::new();
        for j in 0..w.path.len() {
            let c = match w.charts.get(j) {
                Some(c) => c.chart(n - j - 1),
                None => Chart::new(&format!("r{}", j + 1), &format!("v{}", j + 1), n - j - 1),
            };
            charts.push(c);
        }
        let mut coordinates = BTreeMap::new();
        for (k, c) in &w.coordinates {
            if !generators.iter().any(|g| &g.name == k) {
                return Err(Error::UnknownLabel(k.clone()));
            }
            coordinates.insert(k.clone(), (canon(&c.r)?, canon(&c.s)?));
        }
        if let Some(q) = &w.quadrature {
            if !generators.iter().any(|g| g.name == q.generator) {
                return Err(Error::UnknownLabel(q.generator.clone()));
            }
        }
        Ok(OdeProblem {
            id: w.id.clone(),
            equation,
            generators,
            path: w.path.clone(),
            charts,
            coordinates,
            quadrature: w.quadrature.clone(),
            displays: w.displays.clone(),
            options: w.options.clone(),
            wire: w,
        })
    }

    pub fn from_json(text: &str) -> Result<OdeProblem> {
        let w: ProblemWire = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("problem JSON: {e}")))?;
        OdeProblem::from_wire(w)
    }

    pub fn generator(&self, name: &str) -> Result<&Generator> {
        self.generators.iter().find(|g| g.name == name).ok_or_else(|| Error::UnknownLabel(name.into()))
    }

    pub fn names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    pub fn fields(&self) -> Vec<VectorField> {
        self.generators.iter().map(|g| g.field.clone()).collect()
    }
}

/// Embedded worked examples.
pub const EXAMPLES: [(&str, &str); 3] = [
    ("ex-2.1", include_str!("../data/ex-2.1.json")),
    ("ex-2.2", include_str!("../data/ex-2.2.json")),
    ("ex-3", include_str!("../data/ex-3.json")),
];

pub fn example(id: &str) -> Result<OdeProblem> {
    let (_, text) = EXAMPLES
        .iter()
        .find(|(k, _)| *k == id)
        .ok_or_else(|| Error::UnknownLabel(format!("example {id}")))?;
    OdeProblem::from_json(text)
}
