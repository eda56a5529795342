//! Link diagrams on S² or T², fully augmented link diagrams, and the
//! planar graphs derived from them.

mod fal;
mod link;
mod pd;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use fal::{BowTie, Circle, FalDiagram, FalRegion, Segment, Strand};
pub use link::{Component, Crossing, Edge, LinkDiagram, Region, Visit};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ambient {
    #[default]
    S3,
    T2,
}

/// A strand end at a crossing or circle: (vertex id, slot 0..3).
pub type SlotRef = (String, u8);

/// `"sphere"`, `"torus"`, or `{"torus": {"periods": [[re, im], [re, im]]}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AmbientInput {
    Named(AmbientName),
    Torus { torus: TorusSpec },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmbientName {
    #[serde(alias = "s3", alias = "s2")]
    Sphere,
    #[serde(alias = "t2")]
    Torus,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusSpec {
    #[serde(default)]
    pub periods: Option<[[f64; 2]; 2]>,
}

impl Default for AmbientInput {
    fn default() -> Self {
        AmbientInput::Named(AmbientName::Sphere)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagramKind {
    Link,
    Fal,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramInput {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub ambient: AmbientInput,
    #[serde(default)]
    pub kind: Option<DiagramKind>,
    /// Lattice periods of the torus as [re, im] pairs.
    #[serde(default)]
    pub periods: Option<[[f64; 2]; 2]>,
    #[serde(default)]
    pub crossings: Vec<CrossingInput>,
    #[serde(default)]
    pub edges: Vec<EdgeInput>,
    #[serde(default)]
    pub pd: Option<Vec<[i64; 4]>>,
    #[serde(default)]
    pub fal: Option<FalInput>,
    /// Explicit bow-tie rotation, also accepted inside the fal block.
    #[serde(default)]
    pub bowtie: Option<BTreeMap<String, Vec<String>>>,
    /// Per-cusp meridian overrides, `p:q` or a pedge word.
    #[serde(default)]
    pub meridians: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingInput {
    pub id: String,
    /// Slots carrying the over strand; `[0, 2]` unless given.
    #[serde(default)]
    pub over: Option<[u8; 2]>,
    #[serde(default)]
    pub sign: Option<i8>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeInput {
    pub id: String,
    pub from: SlotRef,
    pub to: SlotRef,
    #[serde(default)]
    pub shift: Option<[i64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FalInput {
    pub circles: Vec<CircleInput>,
    pub segments: Vec<EdgeInput>,
    /// Optional explicit bow-tie rotation: vertex id → ccw edge names.
    #[serde(default)]
    pub bowtie: Option<BTreeMap<String, Vec<String>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleInput {
    pub id: String,
    /// Segments at slots x1A, x1B, x2B, x2A in counterclockwise order.
    pub slots: [String; 4],
    #[serde(default)]
    pub half_twist: bool,
}

#[derive(Clone, Debug)]
pub enum Diagram {
    Link(LinkDiagram),
    Fal(FalDiagram),
}

#[derive(Clone, Debug)]
pub struct Parsed {
    pub name: String,
    pub diagram: Diagram,
    pub meridians: BTreeMap<String, String>,
    pub periods: [[f64; 2]; 2],
}

impl Parsed {
    pub fn ambient(&self) -> Ambient {
        match &self.diagram {
            Diagram::Link(l) => l.ambient,
            Diagram::Fal(f) => f.ambient,
        }
    }
}

pub fn parse_str(text: &str) -> Result<Parsed> {
    let input: DiagramInput = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    parse(input)
}

pub fn parse(input: DiagramInput) -> Result<Parsed> {
    let name = input.name.clone().unwrap_or_else(|| "diagram".into());
    let (ambient, given) = match &input.ambient {
        AmbientInput::Named(AmbientName::Sphere) => (Ambient::S3, None),
        AmbientInput::Named(AmbientName::Torus) => (Ambient::T2, None),
        AmbientInput::Torus { torus } => (Ambient::T2, torus.periods),
    };
    if ambient == Ambient::S3 && (given.is_some() || input.periods.is_some()) {
        return Err(invalid("periods", "lattice periods only apply on the torus"));
    }
    let periods = given.or(input.periods).unwrap_or([[1.0, 0.0], [0.0, 1.0]]);
    if ambient == Ambient::T2 {
        let (a, b) = (periods[0], periods[1]);
        if (a[0] * b[1] - a[1] * b[0]).abs() < 1e-12 {
            return Err(invalid("periods", "torus periods are linearly dependent"));
        }
    }
    let has_link = !input.crossings.is_empty() || !input.edges.is_empty() || input.pd.is_some();
    match (input.kind, input.fal.is_some()) {
        (Some(DiagramKind::Link), true) => return Err(invalid("kind", "kind is link but a fal block is present")),
        (Some(DiagramKind::Fal), false) => return Err(invalid("kind", "kind is fal but the fal block is missing")),
        _ => {}
    }
    if input.bowtie.is_some() && input.fal.is_none() {
        return Err(invalid("bowtie", "a bow-tie rotation needs a fal block"));
    }
    let diagram = match (&input.fal, has_link) {
        (Some(_), true) => return Err(invalid("diagram", "give either a link diagram or a fal block, not both")),
        (Some(f), false) => {
            let mut f = f.clone();
            if let Some(b) = &input.bowtie {
                if f.bowtie.is_some() {
                    return Err(invalid("bowtie", "bow-tie rotation given twice"));
                }
                f.bowtie = Some(b.clone());
            }
            Diagram::Fal(FalDiagram::build(&name, ambient, &f)?)
        }
        (None, _) => {
            if input.pd.is_some() && (!input.crossings.is_empty() || !input.edges.is_empty()) {
                return Err(invalid("pd", "pd code given together with explicit crossings"));
            }
            let (crossings, edges) = match &input.pd {
                Some(pd) => {
                    if ambient != Ambient::S3 {
                        return Err(invalid("pd", "pd codes describe diagrams on the sphere"));
                    }
                    pd::expand(pd)?
                }
                None => (input.crossings.clone(), input.edges.clone()),
            };
            Diagram::Link(LinkDiagram::build(&name, ambient, &crossings, &edges)?)
        }
    };
    Ok(Parsed { name, diagram, meridians: input.meridians, periods })
}

pub(crate) fn index_ids<'a>(ids: impl Iterator<Item = &'a String>, what: &str) -> Result<BTreeMap<String, usize>> {
    let mut map = BTreeMap::new();
    for (i, id) in ids.enumerate() {
        if id.is_empty() {
            return Err(invalid(what, "empty id"));
        }
        if map.insert(id.clone(), i).is_some() {
            return Err(invalid(id.clone(), format!("duplicate {what} id")));
        }
    }
    Ok(map)
}
