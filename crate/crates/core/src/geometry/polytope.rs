use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use super::GeometryError;
use crate::linalg::{affine_dim, rank};
use crate::rational::{centroid, dot, max_bits, one, Q};

/// Combinatorial label: a list of id lists (a tube is a one-entry list).
pub type FaceTag = Vec<Vec<i64>>;

/// Affine chart `x = origin + Σ y_k basis_k` of the working subspace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    pub origin: Vec<Q>,
    pub basis: Vec<Vec<Q>>,
}

impl Chart {
    /// The standard chart of `R^d`.
    pub fn identity(d: usize) -> Chart {
        Chart {
            origin: alloc::vec![Q::zero(); d],
            basis: (0..d)
                .map(|k| (0..d).map(|j| if j == k { one() } else { Q::zero() }).collect())
                .collect(),
        }
    }

    pub fn to_ambient(&self, y: &[Q]) -> Vec<Q> {
        let mut x = self.origin.clone();
        for (yk, b) in y.iter().zip(&self.basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += yk * bi;
            }
        }
        x
    }
}

/// Inequality `<normal, y> <= offset` in chart coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<Q>,
    pub offset: Q,
}

impl Facet {
    pub fn value(&self, y: &[Q]) -> Q {
        dot(&self.normal, y)
    }
}

/// A full-dimensional polytope in its chart with paired V- and H-descriptions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolytope {
    pub ambient_dim: usize,
    pub chart: Chart,
    pub vertices: Vec<Vec<Q>>,
    pub facets: Vec<Facet>,
    /// `incidence[v][f]`: vertex `v` lies on facet `f`.
    pub incidence: Vec<Vec<bool>>,
    pub vertex_tags: Vec<FaceTag>,
    pub facet_tags: Vec<FaceTag>,
}

impl RationalPolytope {
    /// Assembles a polytope and derives its incidence from exact tightness.
    pub fn new(
        chart: Chart,
        vertices: Vec<Vec<Q>>,
        facets: Vec<Facet>,
        vertex_tags: Vec<FaceTag>,
        facet_tags: Vec<FaceTag>,
    ) -> RationalPolytope {
        let incidence = vertices
            .iter()
            .map(|v| facets.iter().map(|f| f.value(v) == f.offset).collect())
            .collect();
        RationalPolytope {
            ambient_dim: chart.origin.len(),
            chart,
            vertices,
            facets,
            incidence,
            vertex_tags,
            facet_tags,
        }
    }

    pub fn dim(&self) -> usize {
        self.chart.basis.len()
    }

    pub fn facet_vertices(&self, f: usize) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.incidence[v][f]).collect()
    }

    pub fn vertex_facets(&self, v: usize) -> Vec<usize> {
        (0..self.facets.len()).filter(|&f| self.incidence[v][f]).collect()
    }

    pub fn vertex_centroid(&self) -> Vec<Q> {
        let refs: Vec<&[Q]> = self.vertices.iter().map(|v| v.as_slice()).collect();
        centroid(&refs)
    }

    /// Largest bit size among all coordinates, normals and offsets.
    pub fn max_bits(&self) -> u64 {
        let v = self.vertices.iter().map(max_bits).max().unwrap_or(0);
        let f = self
            .facets
            .iter()
            .map(|f| max_bits(&f.normal).max(crate::rational::bits(&f.offset)))
            .max()
            .unwrap_or(0);
        v.max(f)
    }

    /// Vertices tight on the inequality `<n, y> <= b`, after checking validity.
    pub fn tight_set(&self, normal: &[Q], offset: &Q) -> Result<Vec<usize>, GeometryError> {
        let mut out = Vec::new();
        for (k, v) in self.vertices.iter().enumerate() {
            let s = dot(normal, v);
            if &s > offset {
                return Err(GeometryError::Certification(String::from("inequality violated by a vertex")));
            }
            if &s == offset {
                out.push(k);
            }
        }
        Ok(out)
    }

    /// Checks validity, incidence, full dimensionality, facet non-redundancy and vertex extremality.
    pub fn certify(&self) -> Result<(), GeometryError> {
        let d = self.dim();
        let fail = |m: &str| Err(GeometryError::Certification(String::from(m)));
        if self.vertices.iter().any(|v| v.len() != d) || self.facets.iter().any(|f| f.normal.len() != d) {
            return fail("coordinate length differs from chart dimension");
        }
        if self.vertex_tags.len() != self.vertices.len() || self.facet_tags.len() != self.facets.len() {
            return fail("tag count mismatch");
        }
        for (k, v) in self.vertices.iter().enumerate() {
            if self.vertices[..k].contains(v) {
                return fail("repeated vertex");
            }
            for (f, fc) in self.facets.iter().enumerate() {
                let s = fc.value(v);
                if s > fc.offset {
                    return fail("vertex violates a facet inequality");
                }
                if (s == fc.offset) != self.incidence[k][f] {
                    return fail("incidence disagrees with tightness");
                }
            }
        }
        let refs: Vec<&[Q]> = self.vertices.iter().map(|v| v.as_slice()).collect();
        if affine_dim(&refs) != d as isize {
            return fail("polytope is not full-dimensional in its chart");
        }
        if d == 0 {
            return if self.vertices.len() == 1 { Ok(()) } else { fail("point polytope with several vertices") };
        }
        for f in 0..self.facets.len() {
            let pts: Vec<&[Q]> = self.facet_vertices(f).iter().map(|&v| self.vertices[v].as_slice()).collect();
            if affine_dim(&pts) != d as isize - 1 {
                return fail("facet hyperplane does not support a facet");
            }
            if self.facets[..f].iter().enumerate().any(|(g, _)| self.facet_vertices(g) == self.facet_vertices(f)) {
                return fail("repeated facet");
            }
        }
        for v in 0..self.vertices.len() {
            let normals: Vec<Vec<Q>> = self.vertex_facets(v).iter().map(|&f| self.facets[f].normal.clone()).collect();
            if rank(&normals) != d {
                return fail("vertex is not extreme");
            }
        }
        Ok(())
    }

    /// Translates the chart so the vertex centroid becomes the origin.
    pub fn centered(&self) -> RationalPolytope {
        let c = self.vertex_centroid();
        if c.iter().all(Zero::is_zero) {
            return self.clone();
        }
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.iter().zip(&c).map(|(a, b)| a - b).collect())
            .collect();
        let facets = self
            .facets
            .iter()
            .map(|f| Facet {
                normal: f.normal.clone(),
                offset: &f.offset - f.value(&c),
            })
            .collect();
        let chart = Chart {
            origin: self.chart.to_ambient(&c),
            basis: self.chart.basis.clone(),
        };
        RationalPolytope {
            ambient_dim: self.ambient_dim,
            chart,
            vertices,
            facets,
            incidence: self.incidence.clone(),
            vertex_tags: self.vertex_tags.clone(),
            facet_tags: self.facet_tags.clone(),
        }
    }

    /// Polar dual about the vertex centroid; vertices and facets swap roles (and tags).
    pub fn polar_dual(&self) -> Result<RationalPolytope, GeometryError> {
        let c = self.centered();
        let d = c.dim();
        if c.facets.iter().any(|f| !f.offset.is_positive()) {
            return Err(GeometryError::OriginNotInterior);
        }
        let vertices: Vec<Vec<Q>> = c
            .facets
            .iter()
            .map(|f| f.normal.iter().map(|x| x / &f.offset).collect())
            .collect();
        let facets: Vec<Facet> = c
            .vertices
            .iter()
            .map(|v| Facet {
                normal: v.clone(),
                offset: one(),
            })
            .collect();
        let incidence = (0..vertices.len())
            .map(|f| (0..facets.len()).map(|v| c.incidence[v][f]).collect())
            .collect();
        Ok(RationalPolytope {
            ambient_dim: d,
            chart: Chart::identity(d),
            vertices,
            facets,
            incidence,
            vertex_tags: c.facet_tags,
            facet_tags: c.vertex_tags,
        })
    }

    /// Same vertex–facet incidence up to the given orders (a combinatorial isomorphism check).
    pub fn same_incidence(&self, other: &RationalPolytope) -> bool {
        self.incidence == other.incidence
    }
}

/// Hyperplane `<n, y> = 1` through the given points, if unique.
pub fn hyperplane_through(points: &[&[Q]], d: usize) -> Option<Facet> {
    let a: Vec<Vec<Q>> = points.iter().map(|p| p.to_vec()).collect();
    let b = alloc::vec![one(); points.len()];
    if a.is_empty() {
        return None;
    }
    crate::linalg::solve_unique(&a, &b).map(|normal| {
        debug_assert_eq!(normal.len(), d);
        Facet { normal, offset: one() }
    })
}
