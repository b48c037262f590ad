use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use super::admissible::{admissible_tubings, AdmissiblePoset, TubeSystem};
use super::polytope::{hyperplane_through, FaceTag, RationalPolytope};
use super::GeometryError;
use crate::linalg::affine_dim;
use crate::rational::{centroid, one, q, Q};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RealizeOptions {
    /// Abort once any coordinate needs more bits than this.
    pub max_bits: Option<u64>,
}

/// What a stellar subdivision did.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StellarStep {
    pub epsilon: Q,
    /// Index of the new vertex in the subdivided polytope.
    pub new_vertex: usize,
    /// The old vertex swallowed when the face was a single vertex.
    pub removed_vertex: Option<usize>,
}

/// `Conv(Q ∪ {(1+ε)·c})` for the centroid `c` of a face of `Q`.
///
/// The vertices of the result are those of `Q` in order, minus the face
/// itself when it is a single vertex, followed by the new vertex. The new
/// facets are given as vertex index sets in that numbering; their
/// hyperplanes are solved from the vertices and certified.
pub fn stellar_subdivide(
    poly: &RationalPolytope,
    face: &[usize],
    new_vertex_tag: FaceTag,
    new_facets: &[(Vec<usize>, FaceTag)],
) -> Result<(RationalPolytope, StellarStep), GeometryError> {
    if face.is_empty() || face.iter().any(|&v| v >= poly.vertices.len()) {
        return Err(GeometryError::NotAFace);
    }
    let pts: Vec<&[Q]> = face.iter().map(|&v| poly.vertices[v].as_slice()).collect();
    let c = centroid(&pts);
    let mut bound: Option<Q> = None;
    for f in &poly.facets {
        if !f.offset.is_positive() {
            return Err(GeometryError::OriginNotInterior);
        }
        let on = face.iter().all(|&v| f.value(&poly.vertices[v]) == f.offset);
        let s = f.value(&c);
        if on {
            continue;
        }
        if s >= f.offset {
            return Err(GeometryError::NotAFace);
        }
        if s.is_positive() {
            let t = &f.offset / &s - one();
            bound = Some(match bound {
                Some(b) if b <= t => b,
                _ => t,
            });
        }
    }
    let eps = match bound {
        Some(b) => b / q(2),
        None => one(),
    };
    if !eps.is_positive() {
        return Err(GeometryError::EpsilonInfeasible);
    }
    let factor = one() + &eps;
    let x: Vec<Q> = c.iter().map(|v| v * &factor).collect();
    for f in &poly.facets {
        let on = face.iter().all(|&v| f.value(&poly.vertices[v]) == f.offset);
        let s = f.value(&x);
        if on != (s > f.offset) {
            return Err(GeometryError::EpsilonInfeasible);
        }
    }
    let removed = if face.len() == 1 { Some(face[0]) } else { None };
    let mut vertices: Vec<Vec<Q>> = Vec::new();
    let mut tags: Vec<FaceTag> = Vec::new();
    for (k, v) in poly.vertices.iter().enumerate() {
        if Some(k) != removed {
            vertices.push(v.clone());
            tags.push(poly.vertex_tags[k].clone());
        }
    }
    vertices.push(x);
    tags.push(new_vertex_tag);
    let d = poly.dim();
    let mut facets = Vec::new();
    let mut ftags = Vec::new();
    for (vs, tag) in new_facets {
        let pts: Vec<&[Q]> = vs.iter().map(|&v| vertices[v].as_slice()).collect();
        let f = hyperplane_through(&pts, d).ok_or_else(|| GeometryError::Mismatch(format!("no unique hyperplane through facet {:?}", tag)))?;
        facets.push(f);
        ftags.push(tag.clone());
    }
    let out = RationalPolytope::new(poly.chart.clone(), vertices, facets, tags, ftags);
    for (k, (vs, tag)) in new_facets.iter().enumerate() {
        if out.facet_vertices(k) != *vs {
            return Err(GeometryError::Mismatch(format!("tight set of facet {:?} differs from its claimed vertices", tag)));
        }
    }
    out.certify()?;
    let new_vertex = out.vertices.len() - 1;
    Ok((
        out,
        StellarStep {
            epsilon: eps,
            new_vertex,
            removed_vertex: removed,
        },
    ))
}

/// One melting step of the pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeltRecord {
    pub tube: Vec<i64>,
    pub size: usize,
    pub vertices_after: usize,
    pub epsilon: Q,
    pub max_bits: u64,
}

/// Output of [`realize`]: the dual polytope, its polar (the realized polytope) and the melting log.
#[derive(Debug, Clone)]
pub struct Realization<T> {
    pub dual: RationalPolytope,
    pub primal: RationalPolytope,
    pub melt_log: Vec<MeltRecord>,
    /// Proper tube dual to each vertex of `dual` (facet of `primal`).
    pub facet_tubes: Vec<T>,
    /// Proper tubing of each vertex of `primal`.
    pub vertex_tubings: Vec<Vec<T>>,
}

fn tag_of<S: TubeSystem>(sys: &S, tubing: &[S::Tube]) -> FaceTag {
    tubing.iter().map(|t| sys.tag(t)).collect()
}

fn is_proper<S: TubeSystem>(sys: &S, t: &S::Tube) -> bool {
    *t != sys.whole() && sys.size(t) > 1
}

fn proper_part<S: TubeSystem>(sys: &S, tubing: &[S::Tube]) -> Vec<S::Tube> {
    tubing.iter().filter(|t| is_proper(sys, t)).cloned().collect()
}

fn mismatch<T>(m: String) -> Result<T, GeometryError> {
    Err(GeometryError::Mismatch(m))
}

/// Certifies a stage: vertices and facets are exactly the right elements of
/// `Adm(P;M)`, and every element's vertex set is the tight set of a
/// supporting hyperplane with the predicted dimension.
pub fn certify_stage<S: TubeSystem>(
    sys: &S,
    poly: &RationalPolytope,
    vtub: &[Vec<S::Tube>],
    ftub: &[Vec<S::Tube>],
    adm: &AdmissiblePoset<S::Tube>,
) -> Result<(), GeometryError> {
    poly.certify()?;
    let d = sys.dim() as isize;
    let as_set = |xs: &[Vec<S::Tube>]| xs.iter().cloned().collect::<BTreeSet<_>>();
    let expect_v: BTreeSet<_> = adm.with_dim(0).into_iter().cloned().collect();
    if as_set(vtub) != expect_v || vtub.len() != expect_v.len() {
        return mismatch(String::from("vertex labels differ from the admissible vertices"));
    }
    let expect_f: BTreeSet<_> = adm.with_dim(d - 1).into_iter().cloned().collect();
    if as_set(ftub) != expect_f || ftub.len() != expect_f.len() {
        return mismatch(String::from("facet labels differ from the admissible facets"));
    }
    for (e, &k) in adm.elements.iter().zip(&adm.dims) {
        if k < 0 {
            continue;
        }
        let vs: Vec<usize> = (0..vtub.len()).filter(|&v| adm.leq(sys, &vtub[v], e)).collect();
        let fs: Vec<usize> = (0..ftub.len()).filter(|&f| adm.leq(sys, e, &ftub[f])).collect();
        if fs.is_empty() {
            return mismatch(format!("face {:?} lies in no facet", e));
        }
        if face_cut(poly, &fs)? != vs {
            return mismatch(format!("tight set of face {:?} differs from its admissible vertices", e));
        }
        let pts: Vec<&[Q]> = vs.iter().map(|&v| poly.vertices[v].as_slice()).collect();
        if affine_dim(&pts) != k {
            return mismatch(format!("face {:?} has dimension {} instead of {}", e, affine_dim(&pts), k));
        }
    }
    Ok(())
}

/// Each ridge of a simplicial polytope lies in exactly two of the listed facets.
fn ridges_closed(poly: &RationalPolytope) -> bool {
    let d = poly.dim();
    let facets: Vec<Vec<usize>> = (0..poly.facets.len()).map(|f| poly.facet_vertices(f)).collect();
    if facets.iter().any(|f| f.len() != d) {
        return false;
    }
    facets.iter().all(|f| {
        (0..f.len()).all(|skip| {
            let ridge: Vec<usize> = f.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
            facets.iter().filter(|g| ridge.iter().all(|v| g.contains(v))).count() == 2
        })
    })
}

fn check_bits(poly: &RationalPolytope, opts: &RealizeOptions) -> Result<u64, GeometryError> {
    let b = poly.max_bits();
    match opts.max_bits {
        Some(cap) if b > cap => Err(GeometryError::BitLimit { bits: b, cap }),
        _ => Ok(b),
    }
}

/// Realizes the polytope of proper tubings of `sys` by stellar subdivisions of
/// the dual order polytope, melting proper tubes by weakly decreasing size
/// (ties in canonical order) and certifying every stage.
pub fn realize<S: TubeSystem>(sys: &S, opts: &RealizeOptions) -> Result<Realization<S::Tube>, GeometryError> {
    let base = sys.base_polytope()?;
    base.polytope.certify()?;
    let whole = sys.whole();
    let singles = sys.singletons();
    if sys.dim() == 0 {
        let primal = RationalPolytope::new(base.polytope.chart.clone(), base.polytope.vertices.clone(), Vec::new(), alloc::vec![Vec::new()], Vec::new());
        return Ok(Realization {
            dual: primal.clone(),
            primal,
            melt_log: Vec::new(),
            facet_tubes: Vec::new(),
            vertex_tubings: alloc::vec![Vec::new()],
        });
    }
    let mut poly = base.polytope.polar_dual()?;
    let mut vtub = base.facet_tubings.clone();
    let mut ftub = base.vertex_tubings.clone();
    let mut melted = alloc::vec![whole.clone()];
    let adm = admissible_tubings(sys, &melted);
    certify_stage(sys, &poly, &vtub, &ftub, &adm)?;
    check_bits(&poly, opts)?;
    let mut order = sys.proper_tubes();
    order.sort_by(|a, b| sys.size(b).cmp(&sys.size(a)).then_with(|| a.cmp(b)));
    let mut log = Vec::new();
    let mut adm = adm;
    for tau in order {
        let mut s: Vec<S::Tube> = alloc::vec![whole.clone(), tau.clone()];
        s.extend(singles.iter().filter(|x| !sys.is_subtube(x, &tau)).cloned());
        s.sort();
        if !adm.elements.contains(&s) {
            return mismatch(format!("subdivision face for {:?} is not admissible", tau));
        }
        let face: Vec<usize> = (0..vtub.len()).filter(|&v| adm.leq(sys, &vtub[v], &s)).collect();
        melted.push(tau.clone());
        let next = admissible_tubings(sys, &melted);
        let mut new_v: Vec<S::Tube> = alloc::vec![whole.clone(), tau.clone()];
        new_v.extend(singles.iter().cloned());
        new_v.sort();
        let mut next_vtub: Vec<Vec<S::Tube>> = vtub
            .iter()
            .enumerate()
            .filter(|&(k, _)| !(face.len() == 1 && face[0] == k))
            .map(|(_, t)| t.clone())
            .collect();
        next_vtub.push(new_v.clone());
        let d = sys.dim() as isize;
        let next_ftub: Vec<Vec<S::Tube>> = next.with_dim(d - 1).into_iter().cloned().collect();
        let plan: Vec<(Vec<usize>, FaceTag)> = next_ftub
            .iter()
            .map(|f| {
                let vs = (0..next_vtub.len()).filter(|&v| next.leq(sys, &next_vtub[v], f)).collect();
                (vs, tag_of(sys, f))
            })
            .collect();
        let (np, step) = stellar_subdivide(&poly, &face, tag_of(sys, &new_v), &plan)?;
        certify_stage(sys, &np, &next_vtub, &next_ftub, &next)?;
        let bits = check_bits(&np, opts)?;
        log.push(MeltRecord {
            tube: sys.tag(&tau),
            size: sys.size(&tau),
            vertices_after: np.vertices.len(),
            epsilon: step.epsilon,
            max_bits: bits,
        });
        poly = np;
        vtub = next_vtub;
        ftub = next_ftub;
        adm = next;
    }
    if !ridges_closed(&poly) {
        return mismatch(String::from("final facets do not close up along ridges"));
    }
    let facet_tubes: Vec<S::Tube> = vtub
        .iter()
        .map(|t| proper_part(sys, t).into_iter().next().expect("vertex carries a proper tube"))
        .collect();
    let vertex_tubings: Vec<Vec<S::Tube>> = ftub.iter().map(|t| proper_part(sys, t)).collect();
    let mut dual = poly;
    dual.vertex_tags = facet_tubes.iter().map(|t| alloc::vec![sys.tag(t)]).collect();
    dual.facet_tags = vertex_tubings.iter().map(|t| tag_of(sys, t)).collect();
    let primal = dual.polar_dual()?;
    primal.certify()?;
    Ok(Realization {
        dual,
        primal,
        melt_log: log,
        facet_tubes,
        vertex_tubings,
    })
}

/// Vertices tight on the sum of the given facet inequalities.
pub fn face_cut(poly: &RationalPolytope, facets: &[usize]) -> Result<Vec<usize>, GeometryError> {
    let mut normal = alloc::vec![Q::zero(); poly.dim()];
    let mut offset = Q::zero();
    for &f in facets {
        for (a, b) in normal.iter_mut().zip(&poly.facets[f].normal) {
            *a += b;
        }
        offset += &poly.facets[f].offset;
    }
    poly.tight_set(&normal, &offset)
}
