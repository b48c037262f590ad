//! JSON file formats. Rationals travel as `"p/q"` strings.

use std::collections::BTreeMap;

use posetahedra_core::affine::{AffineError, AffinePoset, AffineTube};
use posetahedra_core::compact::{CompactError, ConfigPoint};
use posetahedra_core::geometry::{Chart, FaceTag, Facet, MeltRecord, RationalPolytope};
use posetahedra_core::rational::{parse_q, to_pq};
use posetahedra_core::{Coords, ElemSet, Poset, PosetError, Q};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid rational {0:?}, expected \"p/q\"")]
    Rational(String),
    #[error("invalid tube key {0:?}, expected comma-separated element ids")]
    Key(String),
    #[error("invalid poset: {0}")]
    Poset(#[from] PosetError),
    #[error("invalid affine poset: {0}")]
    Affine(#[from] AffineError),
    #[error("invalid point: {0}")]
    Compact(#[from] CompactError),
    #[error("{0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, FormatError>;

pub fn q_to_json(x: &Q) -> String {
    to_pq(x)
}

pub fn q_from_json(s: &str) -> Result<Q> {
    parse_q(s).ok_or_else(|| FormatError::Rational(s.to_string()))
}

fn qs_to_json(xs: &[Q]) -> Vec<String> {
    xs.iter().map(q_to_json).collect()
}

fn qs_from_json(xs: &[String]) -> Result<Vec<Q>> {
    xs.iter().map(|s| q_from_json(s)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetJson {
    pub covers: Vec<(i64, i64)>,
}

impl PosetJson {
    pub fn of(p: &Poset) -> PosetJson {
        PosetJson { covers: p.cover_ids() }
    }

    pub fn build(&self) -> Result<Poset> {
        Ok(Poset::from_covers(&self.covers)?)
    }
}

pub fn parse_poset(text: &str) -> Result<Poset> {
    serde_json::from_str::<PosetJson>(text)?.build()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffinePosetJson {
    pub n: usize,
    pub covers: Vec<(i64, i64)>,
}

impl AffinePosetJson {
    pub fn of(a: &AffinePoset) -> AffinePosetJson {
        AffinePosetJson {
            n: a.order(),
            covers: a.generators().to_vec(),
        }
    }

    pub fn build(&self) -> Result<AffinePoset> {
        Ok(AffinePoset::build(self.n, &self.covers)?)
    }
}

pub fn parse_affine_poset(text: &str) -> Result<AffinePoset> {
    serde_json::from_str::<AffinePosetJson>(text)?.build()
}

/// Tube as sorted element ids.
pub fn tube_ids(p: &Poset, t: ElemSet) -> Vec<i64> {
    let mut v = p.ids_of(t);
    v.sort_unstable();
    v
}

pub fn tubing_ids(p: &Poset, ts: &[ElemSet]) -> Vec<Vec<i64>> {
    ts.iter().map(|&t| tube_ids(p, t)).collect()
}

pub fn tubing_from_ids(p: &Poset, ts: &[Vec<i64>]) -> Result<Vec<ElemSet>> {
    let mut out = ts.iter().map(|t| p.subset(t)).collect::<std::result::Result<Vec<_>, _>>()?;
    out.sort();
    Ok(out)
}

pub fn affine_tube_ids(t: &AffineTube) -> Vec<i64> {
    t.members().map(|m| m.to_vec()).unwrap_or_default()
}

pub fn tube_key(ids: &[i64]) -> String {
    ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

pub fn parse_tube_key(key: &str) -> Result<Vec<i64>> {
    key.split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|_| FormatError::Key(key.to_string())))
        .collect()
}

/// A point of `Comp(P)` with every non-singleton tube component.
///
/// `covers` makes the file self-contained; `tubing` and `t` are written for
/// reference and ignored on input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigPointJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covers: Option<Vec<(i64, i64)>>,
    pub tubes: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tubing: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
}

impl ConfigPointJson {
    pub fn of(p: &Poset, c: &ConfigPoint, tubing: Option<&[ElemSet]>) -> ConfigPointJson {
        let tubes = c
            .components()
            .values()
            .map(|x| {
                let mut pairs: Vec<(i64, &Q)> = x.iter().map(|(i, v)| (p.id(i), v)).collect();
                pairs.sort_by_key(|&(id, _)| id);
                let ids: Vec<i64> = pairs.iter().map(|&(id, _)| id).collect();
                (tube_key(&ids), pairs.iter().map(|&(_, v)| q_to_json(v)).collect())
            })
            .collect();
        ConfigPointJson {
            covers: Some(p.cover_ids()),
            tubes,
            tubing: tubing.map(|t| tubing_ids(p, t)),
            t: None,
        }
    }

    /// The poset named by `covers`, if present.
    pub fn poset(&self) -> Result<Option<Poset>> {
        self.covers.as_ref().map(|c| Ok(Poset::from_covers(c)?)).transpose()
    }

    pub fn build(&self, p: &Poset) -> Result<ConfigPoint> {
        let mut comps = BTreeMap::new();
        for (key, vals) in &self.tubes {
            let ids = parse_tube_key(key)?;
            let t = p.subset(&ids)?;
            if ids.len() != t.len() || vals.len() != ids.len() {
                return Err(FormatError::Shape(format!("tube {:?} has {} values for {} elements", key, vals.len(), t.len())));
            }
            let vals = qs_from_json(vals)?;
            let by_id: BTreeMap<i64, Q> = ids.into_iter().zip(vals).collect();
            let x = Coords::from_fn(t, |i| by_id[&p.id(i)].clone());
            if comps.insert(t, x).is_some() {
                return Err(FormatError::Shape(format!("tube {:?} listed twice", key)));
            }
        }
        Ok(ConfigPoint::new(p, comps)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartJson {
    pub origin: Vec<String>,
    pub basis: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FacetJson {
    pub normal: Vec<String>,
    pub offset: String,
    pub tube: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeltJson {
    pub tube: Vec<i64>,
    pub size: usize,
    pub vertices_after: usize,
    pub epsilon: String,
    pub max_bits: u64,
}

/// Exact export of a realized polytope in its chart coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeJson {
    pub ambient_dim: usize,
    pub chart_dim: usize,
    pub chart: ChartJson,
    pub vertices: Vec<Vec<String>>,
    pub facets: Vec<FacetJson>,
    pub vertex_labels: Vec<FaceTag>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub melt_log: Vec<MeltJson>,
}

impl PolytopeJson {
    /// Facet tags must be single tubes, as for realized associahedra and cyclohedra.
    pub fn of(poly: &RationalPolytope, log: &[MeltRecord]) -> PolytopeJson {
        PolytopeJson {
            ambient_dim: poly.ambient_dim,
            chart_dim: poly.dim(),
            chart: ChartJson {
                origin: qs_to_json(&poly.chart.origin),
                basis: poly.chart.basis.iter().map(|b| qs_to_json(b)).collect(),
            },
            vertices: poly.vertices.iter().map(|v| qs_to_json(v)).collect(),
            facets: poly
                .facets
                .iter()
                .zip(&poly.facet_tags)
                .map(|(f, tag)| FacetJson {
                    normal: qs_to_json(&f.normal),
                    offset: q_to_json(&f.offset),
                    tube: tag.concat(),
                })
                .collect(),
            vertex_labels: poly.vertex_tags.clone(),
            melt_log: log
                .iter()
                .map(|m| MeltJson {
                    tube: m.tube.clone(),
                    size: m.size,
                    vertices_after: m.vertices_after,
                    epsilon: q_to_json(&m.epsilon),
                    max_bits: m.max_bits,
                })
                .collect(),
        }
    }

    pub fn build(&self) -> Result<RationalPolytope> {
        let d = self.chart_dim;
        let shape = |what: &str| FormatError::Shape(format!("polytope export: {}", what));
        let origin = qs_from_json(&self.chart.origin)?;
        if origin.len() != self.ambient_dim || self.chart.basis.len() != d {
            return Err(shape("chart does not match the stated dimensions"));
        }
        let basis = self.chart.basis.iter().map(|b| qs_from_json(b)).collect::<Result<Vec<_>>>()?;
        if basis.iter().any(|b| b.len() != self.ambient_dim) {
            return Err(shape("basis vector of the wrong length"));
        }
        let vertices = self.vertices.iter().map(|v| qs_from_json(v)).collect::<Result<Vec<_>>>()?;
        if vertices.iter().any(|v| v.len() != d) || self.vertex_labels.len() != vertices.len() {
            return Err(shape("vertex of the wrong length or missing label"));
        }
        let mut facets = Vec::new();
        let mut tags = Vec::new();
        for f in &self.facets {
            let normal = qs_from_json(&f.normal)?;
            if normal.len() != d {
                return Err(shape("facet normal of the wrong length"));
            }
            facets.push(Facet {
                normal,
                offset: q_from_json(&f.offset)?,
            });
            tags.push(vec![f.tube.clone()]);
        }
        Ok(RationalPolytope::new(Chart { origin, basis }, vertices, facets, self.vertex_labels.clone(), tags))
    }
}

pub fn parse_polytope(text: &str) -> Result<RationalPolytope> {
    serde_json::from_str::<PolytopeJson>(text)?.build()
}

/// Compact JSON with a trailing newline.
pub fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("serializable");
    s.push('\n');
    s
}

/// Pretty JSON with a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use posetahedra_core::compact::canonical_stratum_point;

    #[test]
    fn rationals_and_keys() {
        assert_eq!(q_to_json(&q_from_json("\u{2212}2/4").unwrap()), "-1/2");
        assert_eq!(q_to_json(&q_from_json("3").unwrap()), "3/1");
        assert!(q_from_json("1/0").is_err());
        assert_eq!(parse_tube_key("1, 2,3").unwrap(), [1, 2, 3]);
        assert!(parse_tube_key("1,,2").is_err());
    }

    #[test]
    fn config_points_round_trip() {
        let p = parse_poset("{\"covers\": [[1, 3], [2, 3], [2, 4]]}").unwrap();
        let t = tubing_from_ids(&p, &[vec![2, 4]]).unwrap();
        let c = canonical_stratum_point(&p, &t).unwrap();
        let json = ConfigPointJson::of(&p, &c, Some(&t));
        let text = to_json_line(&json);
        let back: ConfigPointJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.poset().unwrap(), Some(p.clone()));
        assert_eq!(back.build(&p).unwrap(), c);
    }

    #[test]
    fn malformed_points() {
        let p = parse_poset("{\"covers\": [[1, 2], [2, 3]]}").unwrap();
        let bad = |s: &str| serde_json::from_str::<ConfigPointJson>(s).map_err(FormatError::from).and_then(|j| j.build(&p));
        assert!(matches!(bad("{\"tubes\": {\"1,2\": [\"1/2\"]}}"), Err(FormatError::Shape(_))));
        assert!(matches!(bad("{\"tubes\": {\"1,x\": []}}"), Err(FormatError::Key(_))));
        assert!(matches!(bad("{\"tubes\": {}, \"extra\": 1}"), Err(FormatError::Json(_))));
        assert!(matches!(bad("{\"tubes\": {}}"), Err(FormatError::Compact(_))));
    }
}
