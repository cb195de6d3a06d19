//! Parsing of command-line values: inline JSON, JSON files and shorthands.

use std::path::Path;

use banachlab::optkit::OptBudget;
use banachlab::select::{geometric_epsilons, SequenceSource};
use banachlab::{Error, RenormSpec, Result, SpaceSpec, SparseVec};
use serde::de::DeserializeOwned;
use serde::Deserialize;

/// Returns the JSON text behind `arg`: the argument itself when it looks like
/// JSON, otherwise the contents of the named file.
fn json_text(arg: &str) -> Result<(String, Option<String>)> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok((arg.to_string(), None));
    }
    let text = std::fs::read_to_string(Path::new(arg))?;
    Ok((text, Some(arg.to_string())))
}

fn parse_json<T: DeserializeOwned>(arg: &str, what: &str) -> Result<T> {
    let (text, file) = json_text(arg)?;
    serde_json::from_str(&text).map_err(|e| {
        let origin = file.map(|f| format!(" in {f}")).unwrap_or_default();
        Error::Schema(format!("{what}{origin}: {e}"))
    })
}

/// Space shorthand, inline JSON or JSON file, optionally wrapped by a renorm.
pub fn space(arg: &str, renorm: Option<&str>) -> Result<SpaceSpec> {
    let t = arg.trim_start();
    let base = if t.starts_with('{') || Path::new(arg).is_file() {
        let s: SpaceSpec = parse_json(arg, "space")?;
        s.validate()?;
        s
    } else {
        SpaceSpec::parse(arg)?
    };
    match renorm {
        None => Ok(base),
        Some(r) => {
            let spec: RenormSpec = parse_json(r, "renorm")?;
            spec.validate()?;
            Ok(SpaceSpec::renormed(base, spec))
        }
    }
}

pub fn renorm(arg: &str) -> Result<RenormSpec> {
    let spec: RenormSpec = parse_json(arg, "renorm")?;
    spec.validate()?;
    Ok(spec)
}

pub fn vector(arg: &str) -> Result<SparseVec> {
    parse_json(arg, "vector")
}

#[derive(Deserialize)]
#[serde(untagged)]
enum VectorList {
    Bare(Vec<SparseVec>),
    Wrapped { vectors: Vec<SparseVec> },
}

/// A JSON array of vectors or an object with a `vectors` field.
pub fn vectors(arg: &str) -> Result<Vec<SparseVec>> {
    let (text, file) = json_text(arg)?;
    let origin = file.map(|f| format!(" in {f}")).unwrap_or_default();
    // Try the bare form first so its error (with position) is reported.
    match serde_json::from_str::<Vec<SparseVec>>(&text) {
        Ok(v) => Ok(v),
        Err(bare) => match serde_json::from_str::<VectorList>(&text) {
            Ok(VectorList::Bare(v)) | Ok(VectorList::Wrapped { vectors: v }) => Ok(v),
            Err(_) => Err(Error::Schema(format!("vectors{origin}: {bare}"))),
        },
    }
}

pub fn source(arg: &str) -> Result<SequenceSource> {
    if arg.trim_start().starts_with('{') {
        parse_json(arg, "source")
    } else {
        SequenceSource::named(arg.trim())
    }
}

/// `geometric:r` or a comma-separated list.
pub fn epsilons(arg: &str, stages: usize) -> Result<Vec<f64>> {
    let t = arg.trim();
    if let Some(r) = t.strip_prefix("geometric:") {
        let r: f64 = r.parse().map_err(|_| Error::Schema(format!("invalid ratio in {t:?}")))?;
        return geometric_epsilons(r, stages);
    }
    t.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Schema(format!("invalid epsilon {s:?}"))))
        .collect()
}

/// `key=value` overrides of the default budget (`restarts`, `iters`, `tol`).
pub fn budget(arg: Option<&str>, seed: u64) -> Result<OptBudget> {
    let mut b = OptBudget::default().with_seed(seed);
    for item in arg.unwrap_or("").split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Schema(format!("budget entry {item:?} is not key=value")))?;
        let bad = || Error::Schema(format!("invalid value in budget entry {item:?}"));
        match key.trim() {
            "restarts" => b.restarts = value.trim().parse().map_err(|_| bad())?,
            "iters" | "max_iters" => b.max_iters = value.trim().parse().map_err(|_| bad())?,
            "tol" => b.tol = value.trim().parse().map_err(|_| bad())?,
            other => return Err(Error::Schema(format!("unknown budget key {other:?}"))),
        }
    }
    b.validate()?;
    Ok(b)
}
