//! JSON file formats: instances (`strip-v1`), moldable instances (`mold-v1`),
//! packings (`pack-v1`) and structure hints (`hint-v1`).
//!
//! Rationals travel as `"p/q"` strings so that thresholds stay exact.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::classify::{FSpec, Params};
use crate::model::{Instance, Item, Packing, Placement, Rect};
use crate::rational::{parse_q, Q};
use crate::restructure::{BoxArea, BoxKind};
use crate::solver::{HintSpec, Job};

pub const INSTANCE_SCHEMA: &str = "strip-v1";
pub const MOLD_SCHEMA: &str = "mold-v1";
pub const PACKING_SCHEMA: &str = "pack-v1";
pub const HINT_SCHEMA: &str = "hint-v1";

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("expected schema {expected:?}, found {found:?}")]
    Schema { expected: String, found: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    schema: String,
    width: i64,
    items: Vec<ItemRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ItemRecord {
    id: String,
    width: i64,
    height: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MoldFile {
    schema: String,
    machines: i64,
    jobs: Vec<JobRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobRecord {
    id: String,
    allotments: Vec<AllotmentRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AllotmentRecord {
    machines: i64,
    time: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PackingFile {
    schema: String,
    height: i64,
    placements: Vec<PlacementRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlacementRecord {
    id: String,
    x: i64,
    y: i64,
    #[serde(default)]
    rotated: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HintFile {
    schema: String,
    params: ParamsRecord,
    boxes: Vec<BoxRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsRecord {
    epsilon: String,
    delta: String,
    mu: String,
    #[serde(rename = "T")]
    t: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxRecord {
    kind: BoxKind,
    x: i64,
    y: i64,
    w: i64,
    h: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    uniform_height: Option<i64>,
}

#[derive(Deserialize)]
struct Tag {
    schema: Option<String>,
}

/// Either kind of instance file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InputFile {
    Strip(Instance),
    Mold { machines: i64, jobs: Vec<Job> },
}

fn expect_schema(found: &str, expected: &str) -> Result<(), IoError> {
    if found == expected {
        Ok(())
    } else {
        Err(IoError::Schema { expected: expected.into(), found: found.into() })
    }
}

fn unique<'a>(ids: impl IntoIterator<Item = &'a str>) -> Result<(), IoError> {
    let mut seen = HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(IoError::Invalid(format!("duplicate id {id:?}")));
        }
    }
    Ok(())
}

pub fn schema_of(text: &str) -> Result<String, IoError> {
    let tag: Tag = serde_json::from_str(text)?;
    tag.schema.ok_or_else(|| IoError::Invalid("missing schema tag".into()))
}

pub fn parse_input(text: &str) -> Result<InputFile, IoError> {
    match schema_of(text)?.as_str() {
        MOLD_SCHEMA => parse_mold(text).map(|(machines, jobs)| InputFile::Mold { machines, jobs }),
        _ => parse_instance(text).map(InputFile::Strip),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, IoError> {
    let f: InstanceFile = serde_json::from_str(text)?;
    expect_schema(&f.schema, INSTANCE_SCHEMA)?;
    unique(f.items.iter().map(|i| i.id.as_str()))?;
    if f.width < 1 || f.items.iter().any(|i| i.width < 1 || i.height < 1) {
        return Err(IoError::Invalid("widths and heights must be at least 1".into()));
    }
    let inst = Instance::new(f.width, f.items.into_iter().map(|i| Item::new(i.id, i.width, i.height)).collect());
    inst.check().map_err(|e| IoError::Invalid(e.to_string()))?;
    Ok(inst)
}

pub fn emit_instance(inst: &Instance) -> String {
    let f = InstanceFile {
        schema: INSTANCE_SCHEMA.into(),
        width: inst.strip_width,
        items: inst
            .items
            .iter()
            .map(|i| ItemRecord { id: i.id.clone(), width: i.width, height: i.height })
            .collect(),
    };
    to_json(&f)
}

pub fn parse_mold(text: &str) -> Result<(i64, Vec<Job>), IoError> {
    let f: MoldFile = serde_json::from_str(text)?;
    expect_schema(&f.schema, MOLD_SCHEMA)?;
    unique(f.jobs.iter().map(|j| j.id.as_str()))?;
    if f.machines < 1 {
        return Err(IoError::Invalid("machines must be at least 1".into()));
    }
    let mut jobs = Vec::with_capacity(f.jobs.len());
    for j in f.jobs {
        let pairs: Vec<(i64, i64)> = j.allotments.iter().map(|a| (a.machines, a.time)).collect();
        if pairs.iter().map(|p| p.0).collect::<HashSet<_>>().len() != pairs.len() {
            return Err(IoError::Invalid(format!("job {:?} repeats a machine count", j.id)));
        }
        let job = Job::new(j.id, &pairs);
        job.check(f.machines).map_err(|e| IoError::Invalid(e.to_string()))?;
        jobs.push(job);
    }
    Ok((f.machines, jobs))
}

pub fn emit_mold(machines: i64, jobs: &[Job]) -> String {
    let f = MoldFile {
        schema: MOLD_SCHEMA.into(),
        machines,
        jobs: jobs
            .iter()
            .map(|j| JobRecord {
                id: j.id.clone(),
                allotments: j.allotments.iter().map(|(&machines, &time)| AllotmentRecord { machines, time }).collect(),
            })
            .collect(),
    };
    to_json(&f)
}

pub fn parse_packing(text: &str) -> Result<Packing, IoError> {
    let f: PackingFile = serde_json::from_str(text)?;
    expect_schema(&f.schema, PACKING_SCHEMA)?;
    if f.placements.iter().any(|p| p.x < 0 || p.y < 0) {
        return Err(IoError::Invalid("coordinates must be non-negative".into()));
    }
    let placements = f
        .placements
        .into_iter()
        .map(|p| Placement { item_id: p.id, x: p.x, y: p.y, rotated: p.rotated })
        .collect();
    Ok(Packing { placements, height: f.height })
}

pub fn emit_packing(p: &Packing) -> String {
    let f = PackingFile {
        schema: PACKING_SCHEMA.into(),
        height: p.height,
        placements: p
            .placements
            .iter()
            .map(|q| PlacementRecord { id: q.item_id.clone(), x: q.x, y: q.y, rotated: q.rotated })
            .collect(),
    };
    to_json(&f)
}

fn rational(field: &str, s: &str) -> Result<Q, IoError> {
    parse_q(s).map_err(|e| IoError::Invalid(format!("{field}: {e}")))
}

fn fraction(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Hints carry no `f`; the linear test-scale choice is assumed since hint mode
/// never searches for δ and μ.
pub fn parse_hint(text: &str) -> Result<HintSpec, IoError> {
    let f: HintFile = serde_json::from_str(text)?;
    expect_schema(&f.schema, HINT_SCHEMA)?;
    let params = Params::new(
        rational("epsilon", &f.params.epsilon)?,
        rational("delta", &f.params.delta)?,
        rational("mu", &f.params.mu)?,
        f.params.t,
        FSpec::LINEAR,
    )
    .map_err(|e| IoError::Invalid(e.to_string()))?;
    let boxes = f
        .boxes
        .into_iter()
        .map(|b| BoxArea { kind: b.kind, rect: Rect::new(b.x, b.y, b.w, b.h), uniform_height: b.uniform_height })
        .collect();
    Ok(HintSpec { params, boxes })
}

pub fn emit_hint(h: &HintSpec) -> String {
    let f = HintFile {
        schema: HINT_SCHEMA.into(),
        params: ParamsRecord {
            epsilon: fraction(&h.params.epsilon),
            delta: fraction(&h.params.delta),
            mu: fraction(&h.params.mu),
            t: h.params.t,
        },
        boxes: h
            .boxes
            .iter()
            .map(|b| BoxRecord {
                kind: b.kind,
                x: b.rect.x,
                y: b.rect.y,
                w: b.rect.w,
                h: b.rect.h,
                uniform_height: b.uniform_height,
            })
            .collect(),
    };
    to_json(&f)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain records serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn instance_round_trip() {
        let inst = Instance::from_dims(10, &[(3, 4), (10, 1)]);
        let text = emit_instance(&inst);
        assert_eq!(parse_instance(&text).unwrap(), inst);
        assert_eq!(emit_instance(&parse_instance(&text).unwrap()), text);
    }

    #[test]
    fn schema_is_mandatory() {
        assert!(parse_instance(r#"{"width": 3, "items": []}"#).is_err());
        let e = parse_instance(r#"{"schema": "pack-v1", "width": 3, "items": []}"#).unwrap_err();
        assert!(matches!(e, IoError::Schema { .. }));
        assert!(parse_input(r#"{"width": 3}"#).is_err());
    }

    #[test]
    fn bad_instances() {
        let dup = r#"{"schema":"strip-v1","width":4,"items":[{"id":"a","width":1,"height":1},{"id":"a","width":1,"height":1}]}"#;
        assert!(parse_instance(dup).is_err());
        let zero = r#"{"schema":"strip-v1","width":4,"items":[{"id":"a","width":0,"height":1}]}"#;
        assert!(parse_instance(zero).is_err());
        let wide = r#"{"schema":"strip-v1","width":4,"items":[{"id":"a","width":5,"height":1}]}"#;
        assert!(parse_instance(wide).is_err());
    }

    #[test]
    fn hint_round_trip() {
        let params = Params::new(q(1, 10), q(1, 10), q(1, 100), 1000, FSpec::LINEAR).unwrap();
        let h = HintSpec {
            params,
            boxes: vec![
                BoxArea::new(BoxKind::LargeItem, Rect::new(0, 0, 5, 5)),
                BoxArea::uniform(BoxKind::TallSub, Rect::new(5, 0, 3, 400), 400),
            ],
        };
        let text = emit_hint(&h);
        assert!(text.contains("\"1/100\""));
        assert!(text.contains("\"tall_sub\""));
        assert_eq!(parse_hint(&text).unwrap(), h);
    }

    #[test]
    fn mold_and_packing_round_trip() {
        let jobs = vec![Job::new("a", &[(1, 8), (2, 4)]), Job::new("b", &[(3, 1)])];
        let text = emit_mold(4, &jobs);
        assert_eq!(parse_mold(&text).unwrap(), (4, jobs.clone()));
        assert_eq!(parse_input(&text).unwrap(), InputFile::Mold { machines: 4, jobs });
        let p = Packing { placements: vec![Placement::new("a", 1, 2)], height: 7 };
        assert_eq!(parse_packing(&emit_packing(&p)).unwrap(), p);
    }
}
