//! JSON document schema for fibers, fibrations, points, and golden values.
//!
//! Documents mirror the engine's domain types field by field.  Exact
//! rationals travel as strings (`"5"`, `"-1/6"`); plain JSON integers are
//! also accepted on input.  The full field list is documented in the
//! repository README.

use fibercalc_core::fiber::{FiberGraph, SingularityDescriptor, TreePoint};
use fibercalc_core::heights::{AdeKind, AlgebraicPoint, SectionLocalData};
use fibercalc_core::invariants::FibrationSummary;
use fibercalc_core::{rat, Error, Rat, Result};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::str::FromStr;

/// Exact rational in a document, serialized as a string.
#[derive(Debug, Clone, PartialEq)]
pub struct RatField(pub Rat);

impl From<Rat> for RatField {
    fn from(r: Rat) -> Self {
        RatField(r)
    }
}

impl Serialize for RatField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for RatField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(RatField(rat(n))),
            Raw::Text(t) => Rat::from_str(t.trim())
                .map(RatField)
                .map_err(|e| D::Error::custom(format!("invalid rational {t:?}: {e}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentDoc {
    pub id: String,
    pub genus: i64,
    pub multiplicity: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchDoc {
    pub component: String,
    pub multiplicity: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreePointDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub proximate_to: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub branches: Vec<BranchDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SingularityBody {
    Node { at: [String; 2] },
    Cusp { at: String },
    Tacnode { at: [String; 2] },
    Ordinary { at: Vec<String> },
    Custom { tree: Vec<TreePointDoc> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(flatten)]
    pub body: SingularityBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberDoc {
    pub components: Vec<ComponentDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub singularities: Vec<SingularityEntry>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub cover_components: BTreeMap<String, i64>,
}

impl FiberDoc {
    pub fn to_graph(&self) -> Result<FiberGraph> {
        let components = self
            .components
            .iter()
            .map(|c| fibercalc_core::fiber::FiberComponent {
                id: c.id.clone(),
                genus: c.genus,
                multiplicity: c.multiplicity,
            })
            .collect();
        let edges: Vec<(String, String)> = self
            .edges
            .iter()
            .map(|[a, b]| (a.clone(), b.clone()))
            .collect();
        let singularities = self
            .singularities
            .iter()
            .map(|entry| {
                let desc = match &entry.body {
                    SingularityBody::Node { at } => SingularityDescriptor::Node {
                        at: (at[0].clone(), at[1].clone()),
                    },
                    SingularityBody::Cusp { at } => {
                        SingularityDescriptor::Cusp { at: at.clone() }
                    }
                    SingularityBody::Tacnode { at } => SingularityDescriptor::Tacnode {
                        at: (at[0].clone(), at[1].clone()),
                    },
                    SingularityBody::Ordinary { at } => {
                        SingularityDescriptor::Ordinary { at: at.clone() }
                    }
                    SingularityBody::Custom { tree } => SingularityDescriptor::Custom {
                        tree: tree
                            .iter()
                            .map(|p| TreePoint {
                                parent: p.parent,
                                proximate_to: p.proximate_to.clone(),
                                branches: p
                                    .branches
                                    .iter()
                                    .map(|b| (b.component.clone(), b.multiplicity))
                                    .collect(),
                            })
                            .collect(),
                    },
                };
                (entry.id.clone(), desc)
            })
            .collect();
        let graph = FiberGraph::new(components, &edges, singularities)?;
        if self.cover_components.is_empty() {
            Ok(graph)
        } else {
            graph.with_cover_components(&self.cover_components)
        }
    }

    /// Schema form of an engine graph (used to emit result graphs).
    pub fn from_graph(g: &FiberGraph) -> FiberDoc {
        let components = g
            .components()
            .iter()
            .map(|c| ComponentDoc {
                id: c.id.clone(),
                genus: c.genus,
                multiplicity: c.multiplicity,
            })
            .collect();
        let edges = g
            .edges()
            .iter()
            .map(|&(i, j)| {
                [
                    g.components()[i].id.clone(),
                    g.components()[j].id.clone(),
                ]
            })
            .collect();
        FiberDoc {
            components,
            edges,
            singularities: Vec::new(),
            cover_components: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub copies: Option<i64>,
    #[serde(flatten)]
    pub fiber: FiberDoc,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibrationDoc {
    pub g: i64,
    pub b: i64,
    pub s: i64,
    pub ksq_rel: RatField,
    pub chi_f: RatField,
    pub e_f: RatField,
    pub semistable: bool,
    /// Caller's assertion that the fibration is not birationally a product.
    #[serde(default = "default_true")]
    pub non_trivial: bool,
    pub fibers: Vec<FiberEntry>,
}

impl FibrationDoc {
    pub fn to_summary(&self) -> Result<FibrationSummary> {
        let mut fibers = Vec::new();
        for entry in &self.fibers {
            let copies = entry.copies.unwrap_or(1);
            if copies < 1 {
                return Err(Error::input("fiber copies must be at least 1"));
            }
            let graph = entry.fiber.to_graph()?;
            for _ in 0..copies {
                fibers.push(graph.clone());
            }
        }
        FibrationSummary::new(
            self.g,
            self.b,
            self.s,
            self.ksq_rel.0.clone(),
            self.chi_f.0.clone(),
            self.e_f.0.clone(),
            fibers,
            self.semistable,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointDoc {
    pub degree: i64,
    pub k_dot_e: RatField,
    pub genus_tilde: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_self: Option<RatField>,
}

impl PointDoc {
    pub fn to_point(&self) -> Result<AlgebraicPoint> {
        AlgebraicPoint::new(
            self.degree,
            self.k_dot_e.0.clone(),
            self.genus_tilde,
            self.e_self.as_ref().map(|r| r.0.clone()),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionDataDoc {
    pub mu_list: Vec<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub splits: Vec<[i64; 3]>,
}

impl SectionDataDoc {
    pub fn to_data(&self) -> SectionLocalData {
        SectionLocalData {
            mu_list: self.mu_list.clone(),
            epsilon_terms: self.splits.iter().map(|&[a, b, c]| (a, b, c)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdeEntry {
    pub kind: String,
    pub r: i64,
}

impl AdeEntry {
    pub fn to_kind(&self) -> Result<(AdeKind, i64)> {
        let kind = match self.kind.as_str() {
            "A" => AdeKind::A,
            "D" => AdeKind::D,
            "E" => AdeKind::E,
            other => {
                return Err(Error::input(format!(
                    "unknown double-point type {other:?}; expected A, D, or E"
                )))
            }
        };
        Ok((kind, self.r))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiyaokaDoc {
    pub c2_s: RatField,
    pub ksq_plus_d: RatField,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ade_list: Vec<AdeEntry>,
    #[serde(default)]
    pub chi_top_d: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberGolden {
    pub c1_sq: RatField,
    pub c2: RatField,
    pub chi: RatField,
    pub c_minus_1: RatField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_total: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_used: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibrationGolden {
    pub i_k: RatField,
    pub i_chi: RatField,
    pub i_e: RatField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical_margin: Option<RatField>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointGolden {
    pub h_k: RatField,
    pub d_disc: RatField,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height_margin: Option<RatField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refined_bound: Option<RatField>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MiyaokaGolden {
    pub margin: RatField,
}

/// One input file: a tagged document of one of four kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InputDocument {
    Fiber {
        name: String,
        fiber: FiberDoc,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        golden: Option<FiberGolden>,
    },
    Fibration {
        name: String,
        fibration: FibrationDoc,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        golden: Option<FibrationGolden>,
    },
    PointCheck {
        name: String,
        fibration: FibrationDoc,
        point: PointDoc,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        section_data: Option<SectionDataDoc>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        golden: Option<PointGolden>,
    },
    MiyaokaCheck {
        name: String,
        miyaoka: MiyaokaDoc,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        golden: Option<MiyaokaGolden>,
    },
}

impl InputDocument {
    pub fn name(&self) -> &str {
        match self {
            InputDocument::Fiber { name, .. }
            | InputDocument::Fibration { name, .. }
            | InputDocument::PointCheck { name, .. }
            | InputDocument::MiyaokaCheck { name, .. } => name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            InputDocument::Fiber { .. } => "fiber",
            InputDocument::Fibration { .. } => "fibration",
            InputDocument::PointCheck { .. } => "point-check",
            InputDocument::MiyaokaCheck { .. } => "miyaoka-check",
        }
    }

    pub fn parse(text: &str) -> Result<InputDocument> {
        serde_json::from_str(text).map_err(|e| {
            Error::input(format!(
                "document schema violation at line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })
    }

    pub fn load(path: &std::path::Path) -> Result<InputDocument> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::input(format!("cannot read {}: {e}", path.display()))
        })?;
        InputDocument::parse(&text)
    }
}
