//! The shipped algebras, automorphisms and twisted modules, and the model
//! file format that describes them.

use crate::automorphism::linalg::Mat;
use crate::automorphism::Automorphism;
use crate::error::{CalcError, Result};
use crate::formal_calculus::{Scalar, Q};
use crate::twisted_module::{extend_from_generators, extend_unchecked, GeneratorTwistData, TwistedModule};
use crate::vosa_core::{conformal_vector, Fault, FockSpace, Generator, Statistics, VOSAStructure};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

/// Model files shipped in the repository, by id.
pub const SHIPPED: [(&str, &str); 3] = [
    ("fermion", include_str!("../../../../models/fermion.model")),
    ("boson1", include_str!("../../../../models/boson1.model")),
    ("heis3-unipotent", include_str!("../../../../models/heis3-unipotent.model")),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub stats: Statistics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutomorphismSpec {
    pub name: String,
    /// Rows of the action on generators; entries are `q` or `q*e(r)` with
    /// `e(r) = e^{πi r}`.
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub name: String,
    pub automorphism: String,
    /// g-weight of each generator.
    pub alphas: Vec<String>,
    #[serde(default)]
    pub ramond: bool,
}

/// Parsed contents of a model file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: String,
    pub generators: Vec<GeneratorSpec>,
    pub gram: Vec<Vec<String>>,
    #[serde(default)]
    pub automorphisms: Vec<AutomorphismSpec>,
    pub module: Option<ModuleSpec>,
    #[serde(default)]
    pub faults: Vec<Fault>,
}

/// A built model: the algebra, its automorphisms and optionally a module.
pub struct Model {
    pub spec: ModelSpec,
    pub algebra: Arc<VOSAStructure>,
    pub automorphisms: Vec<Arc<Automorphism>>,
    pub module: Option<Arc<TwistedModule>>,
}

impl Model {
    pub fn automorphism(&self, name: &str) -> Result<Arc<Automorphism>> {
        self.automorphisms
            .iter()
            .find(|a| a.name == name)
            .cloned()
            .ok_or_else(|| CalcError::Model(format!("model {} has no automorphism {name}", self.spec.name)))
    }

    pub fn module(&self) -> Result<Arc<TwistedModule>> {
        self.module.clone().ok_or_else(|| CalcError::Model(format!("model {} has no twisted module", self.spec.name)))
    }
}

fn parse_q(s: &str) -> Result<Q> {
    s.trim().parse::<Q>().map_err(|_| CalcError::Model(format!("bad rational {s:?}")))
}

fn parse_ratio(s: &str) -> Result<Rational64> {
    parse_q(s)?.as_small().ok_or_else(|| CalcError::Model(format!("rational {s:?} too large")))
}

/// `q`, `e(r)` or `q*e(r)`.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    let (q, phase) = match s.find("e(") {
        Some(i) => {
            let inner = s[i + 2..].strip_suffix(')').ok_or_else(|| CalcError::Model(format!("bad phase in {s:?}")))?;
            let head = s[..i].trim().trim_end_matches('*').trim();
            let q = if head.is_empty() { Q::one() } else if head == "-" { Q::int(-1) } else { parse_q(head)? };
            (q, Some(parse_ratio(inner)?))
        }
        None => (parse_q(s)?, None),
    };
    let base = Scalar::from_q(q);
    match phase {
        Some(r) => Ok(&base * &Scalar::expi(r)?),
        None => Ok(base),
    }
}

pub fn parse_model(text: &str) -> Result<ModelSpec> {
    toml::from_str(text).map_err(|e| CalcError::Model(format!("model file: {e}")))
}

fn algebra_from(spec: &ModelSpec) -> Result<Arc<VOSAStructure>> {
    let gens: Vec<Generator> = spec.generators.iter().map(|g| Generator { name: g.name.clone(), stats: g.stats }).collect();
    let gram = spec.gram.iter().map(|r| r.iter().map(|e| parse_q(e)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
    let shifts = gens.iter().map(|g| if g.stats == Statistics::Fermion { 1 } else { 0 }).collect();
    let fock = FockSpace::new(gens, gram, shifts, false)?.with_faults(spec.faults.clone());
    let om = conformal_vector(&fock);
    Ok(Arc::new(VOSAStructure::new(&spec.name, fock, om)))
}

/// Builds every piece a model file describes.
pub fn build_model(spec: &ModelSpec) -> Result<Model> {
    let algebra = algebra_from(spec)?;
    let mut automorphisms = Vec::new();
    for a in &spec.automorphisms {
        let m: Mat = a.matrix.iter().map(|r| r.iter().map(|e| parse_scalar(e)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
        automorphisms.push(Arc::new(Automorphism::orthogonal(&a.name, algebra.fock.clone(), m)?));
    }
    let mut model = Model { spec: spec.clone(), algebra, automorphisms, module: None };
    if let Some(ms) = &spec.module {
        let g = model.automorphism(&ms.automorphism)?;
        let alphas = ms.alphas.iter().map(|a| parse_ratio(a)).collect::<Result<Vec<_>>>()?;
        let seed = GeneratorTwistData { alphas, ramond: ms.ramond };
        let mut m = if spec.faults.is_empty() {
            extend_from_generators(seed, model.algebra.clone(), g)?
        } else {
            extend_unchecked(seed, model.algebra.clone(), g)?
        };
        m.name = ms.name.clone();
        model.module = Some(Arc::new(m));
    }
    Ok(model)
}

/// Resolves a shipped id (or an alias naming its module) or a path.
pub fn model_text(id: &str) -> Result<String> {
    let key = match id {
        "ramond" => "fermion",
        "z2boson" | "z2-boson" => "boson1",
        other => other,
    };
    if let Some((_, t)) = SHIPPED.iter().find(|(n, _)| *n == key) {
        return Ok(t.to_string());
    }
    let p = Path::new(id);
    if p.exists() {
        return std::fs::read_to_string(p).map_err(|e| CalcError::Model(format!("{id}: {e}")));
    }
    Err(CalcError::Model(format!("unknown model {id:?}")))
}

pub fn load_model(id: &str) -> Result<Model> {
    build_model(&parse_model(&model_text(id)?)?)
}

/// Rebuilds a model with faults injected into its mode algebra.
pub fn load_model_with_faults(id: &str, faults: &[Fault]) -> Result<Model> {
    let mut spec = parse_model(&model_text(id)?)?;
    spec.faults.extend_from_slice(faults);
    build_model(&spec)
}

/// Free fermion with `ψ(-1/2)𝟏` of weight 1/2.
pub fn build_free_fermion() -> Arc<VOSAStructure> {
    load_model("fermion").expect("shipped fermion model").algebra
}

/// Heisenberg algebra on weight-one generators with the given Gram matrix.
pub fn build_heisenberg(gram: &[Vec<Q>]) -> Result<Arc<VOSAStructure>> {
    let names = ["a", "b", "c", "d", "e", "f"];
    let r = gram.len();
    if r > names.len() {
        return Err(CalcError::Model("rank above 6".into()));
    }
    let generators = (0..r)
        .map(|i| GeneratorSpec { name: if r == 1 { "h".into() } else { names[i].into() }, stats: Statistics::Boson })
        .collect();
    let gram = gram.iter().map(|row| row.iter().map(|q| q.to_string()).collect()).collect();
    let spec = ModelSpec { name: format!("heisenberg{r}"), generators, gram, automorphisms: vec![], module: None, faults: vec![] };
    algebra_from(&spec)
}

/// `ψ ↦ -ψ`.
pub fn parity_automorphism(fermion: &VOSAStructure) -> Result<Automorphism> {
    Automorphism::orthogonal("parity", fermion.fock.clone(), vec![vec![Scalar::int(-1)]])
}

pub fn orthogonal_automorphism(heisenberg: &VOSAStructure, name: &str, m: Mat) -> Result<Automorphism> {
    Automorphism::orthogonal(name, heisenberg.fock.clone(), m)
}

/// Integral fermion modes on a vacuum pair.
pub fn build_ramond_module(fermion: Arc<VOSAStructure>, parity: Arc<Automorphism>) -> Result<TwistedModule> {
    let mut m = extend_from_generators(GeneratorTwistData { alphas: vec![Rational64::new(1, 2)], ramond: true }, fermion, parity)?;
    m.name = "ramond".into();
    Ok(m)
}

/// Half-integral boson modes for `h ↦ -h`.
pub fn build_z2_twisted_boson(boson: Arc<VOSAStructure>, minus1: Arc<Automorphism>) -> Result<TwistedModule> {
    let mut m = extend_from_generators(GeneratorTwistData { alphas: vec![Rational64::new(1, 2)], ramond: false }, boson, minus1)?;
    m.name = "z2-boson".into();
    Ok(m)
}

/// Single structure-sign faults that the mutation suite injects. Only
/// faults that touch a sign the model actually uses are listed.
pub fn fault_catalog(model: &ModelSpec) -> Vec<Fault> {
    let fermion = model.generators.iter().any(|g| g.stats == Statistics::Fermion);
    let mut out = Vec::new();
    if fermion {
        out.push(Fault::PassSign);
        out.push(Fault::InsertSign);
        for t in [1, 3, 5] {
            out.push(Fault::BracketSign { twice: t });
            out.push(Fault::TranslationSign { twice: -t });
        }
        out.push(Fault::ZeroModeSign { vac: 0 });
        out.push(Fault::ZeroModeSign { vac: 1 });
    } else {
        // even doubled modes live in the algebra, odd ones in the Z2 module
        for t in [2, 4, 6] {
            out.push(Fault::BracketSign { twice: t });
            out.push(Fault::TranslationSign { twice: -t });
        }
        out.push(Fault::BracketSign { twice: 1 });
        out.push(Fault::BracketSign { twice: 3 });
        out.push(Fault::GramSign { i: 0, j: 0 });
    }
    out
}

#[cfg(test)]
mod tests;
