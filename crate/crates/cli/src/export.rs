//! Polytope export: exact JSON or approximate OFF.

use std::fmt::Write as _;

use posetahedra_core::geometry::{MeltRecord, RationalPolytope};
use posetahedra_core::rational::{to_decimal, zero};

use crate::formats::{to_json_pretty, PolytopeJson};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ExportFormat {
    Json,
    Off,
}

pub const DEFAULT_PRECISION: usize = 12;

pub fn export(poly: &RationalPolytope, log: &[MeltRecord], format: ExportFormat, precision: usize) -> String {
    match format {
        ExportFormat::Json => to_json_pretty(&PolytopeJson::of(poly, log)),
        ExportFormat::Off => to_off(poly, precision),
    }
}

/// OFF in chart coordinates, padded to three dimensions; `nOFF` above three.
///
/// Polygons are written as one face. In dimension three every facet lists
/// its vertices in cyclic order; higher facets list them in index order.
pub fn to_off(poly: &RationalPolytope, precision: usize) -> String {
    let d = poly.dim();
    let faces: Vec<Vec<usize>> = match d {
        0 | 1 => Vec::new(),
        2 => vec![cyclic_order(poly, &(0..poly.vertices.len()).collect::<Vec<_>>(), None)],
        3 => (0..poly.facets.len())
            .map(|f| cyclic_order(poly, &poly.facet_vertices(f), Some(f)))
            .collect(),
        _ => (0..poly.facets.len()).map(|f| poly.facet_vertices(f)).collect(),
    };
    let mut out = String::new();
    let width = d.max(3);
    if d > 3 {
        let _ = writeln!(out, "nOFF");
        let _ = writeln!(out, "# approximate: decimal coordinates rounded to {} digits", precision);
        let _ = writeln!(out, "{}", d);
    } else {
        let _ = writeln!(out, "OFF");
        let _ = writeln!(out, "# approximate: decimal coordinates rounded to {} digits", precision);
    }
    let edges = if d == 3 { faces.iter().map(|f| f.len()).sum::<usize>() / 2 } else { 0 };
    let _ = writeln!(out, "{} {} {}", poly.vertices.len(), faces.len(), edges);
    for v in &poly.vertices {
        let coords: Vec<String> = (0..width)
            .map(|k| v.get(k).map_or_else(|| to_decimal(&zero(), precision), |x| to_decimal(x, precision)))
            .collect();
        let _ = writeln!(out, "{}", coords.join(" "));
    }
    for f in &faces {
        let idx: Vec<String> = f.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(out, "{} {}", f.len(), idx.join(" "));
    }
    out
}

fn approx(poly: &RationalPolytope, v: usize) -> Vec<f64> {
    poly.vertices[v].iter().map(|x| to_decimal(x, 17).parse::<f64>().unwrap_or(0.0)).collect()
}

/// Vertices of a polygon (`facet == None`, dimension two) or of a facet of a
/// 3-polytope sorted by angle around their centroid, counterclockwise seen
/// from outside.
fn cyclic_order(poly: &RationalPolytope, verts: &[usize], facet: Option<usize>) -> Vec<usize> {
    let pts: Vec<Vec<f64>> = verts.iter().map(|&v| approx(poly, v)).collect();
    let dim = poly.dim();
    let c: Vec<f64> = (0..dim).map(|k| pts.iter().map(|p| p[k]).sum::<f64>() / pts.len() as f64).collect();
    let rel: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().zip(&c).map(|(a, b)| a - b).collect()).collect();
    let (u, w) = match facet {
        None => (vec![1.0, 0.0], vec![0.0, 1.0]),
        Some(f) => {
            let n: Vec<f64> = poly.facets[f].normal.iter().map(|x| to_decimal(x, 17).parse::<f64>().unwrap_or(0.0)).collect();
            let u = rel.iter().max_by(|a, b| norm(a).total_cmp(&norm(b))).cloned().unwrap_or_else(|| vec![1.0, 0.0, 0.0]);
            let w = cross(&n, &u);
            (u, w)
        }
    };
    let mut keyed: Vec<(f64, usize)> = rel
        .iter()
        .zip(verts)
        .map(|(r, &v)| (dotf(r, &w).atan2(dotf(r, &u)), v))
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().map(|(_, v)| v).collect()
}

fn dotf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dotf(a, a).sqrt()
}

fn cross(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}
