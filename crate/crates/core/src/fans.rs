//! Fans refining a full-dimensional cone `σ`.
//!
//! Ray indices follow one convention throughout: the rays of `σ` come first,
//! in the order of the [`Cone`], and any exceptional rays follow. Maximal
//! cones are sorted index sets.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{self, dot, snf, to_rational};
use crate::polyhedra::{
    dual_from_rays, faces_of_rays, frac, int_rank, intersect, is_smooth_set, is_subset, multiplicity_of, Codim, Cone,
    ConeError, DualCone, Face, FaceLattice,
};
use crate::{Int, IntMatrix, Lattice, Rat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error("malformed fan: {0}")]
    Malformed(String),
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("not a refinement of the cone: {0}")]
    NotARefinement(String),
    #[error("the first rays of the fan must be the rays of the cone, in order")]
    RayOrderMismatch,
    #[error("point lies outside the support of the fan")]
    PointOutsideSupport,
    #[error("subdivision point must be a primitive nonzero lattice vector")]
    NonPrimitivePoint,
    #[error("resolution is not strong")]
    StrongnessUnachieved { fan: Box<Fan>, profile: Box<ResolutionProfile> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fan {
    ambient_rank: usize,
    rays: Vec<Lattice>,
    max_cones: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionProfile {
    /// Every maximal cone is unimodular.
    pub smooth: bool,
    /// Every smooth face of `σ` is a cone of the fan.
    pub strong: bool,
    /// Smallest dimension of a face of `σ` that is not a cone of the fan.
    pub codim_z: Codim,
    pub exceptional_rays: Vec<usize>,
    /// Faces of `σ` (as ray index sets) that are not cones of the fan.
    pub missing_faces: Vec<Vec<usize>>,
}

/// Faces of a full-dimensional cone spanned by the given rays. Simplicial
/// cones skip the dual computation.
fn cone_faces(rays: &[&Lattice], n: usize) -> Vec<Vec<usize>> {
    if rays.len() == n {
        let mut out = Vec::with_capacity(1 << n);
        for mask in 0u32..(1 << n) {
            out.push((0..n).filter(|i| mask & (1 << i) != 0).collect());
        }
        out
    } else {
        faces_of_rays(rays, n).1.faces.into_iter().map(|f| f.rays).collect()
    }
}

/// Pulling triangulation of `face` from its first ray.
fn triangulate(face: &Face, lattice: &FaceLattice) -> Vec<Vec<usize>> {
    if face.rays.len() == face.dim {
        return vec![face.rays.clone()];
    }
    let apex = face.rays[0];
    let mut out = Vec::new();
    for g in lattice.facets_of(face) {
        if g.rays.contains(&apex) {
            continue;
        }
        for mut s in triangulate(g, lattice) {
            s.push(apex);
            s.sort_unstable();
            out.push(s);
        }
    }
    out
}

/// `|det| / ∏ ⟨w, v⟩`: volume (up to `n!`) of the simplex cut from the
/// simplicial cone by `⟨w, ·⟩ ≤ 1`.
fn truncated_volume(rays: &[&Lattice], n: usize, w: &[Int]) -> Rat {
    let rows: Vec<Lattice> = rays.iter().map(|r| (*r).clone()).collect();
    let d = linalg::det(&IntMatrix::from_rows(n, &rows)).abs();
    let denom = rays.iter().fold(Int::one(), |acc, r| acc * dot(w, r));
    Rat::new(d, denom)
}

fn cone_volume(rays: &[&Lattice], n: usize, w: &[Int]) -> Rat {
    let (_, lattice) = faces_of_rays(rays, n);
    let top = lattice.faces.last().expect("face lattice contains the cone itself");
    triangulate(top, &lattice)
        .iter()
        .map(|s| {
            let vs: Vec<&Lattice> = s.iter().map(|&i| rays[i]).collect();
            truncated_volume(&vs, n, w)
        })
        .fold(Rat::zero(), |a, b| a + b)
}

impl Fan {
    /// Checks shapes, primitivity, that each maximal cone is a
    /// full-dimensional strongly convex cone whose listed rays are its
    /// extreme rays, and that every ray is used. Cone intersections are
    /// checked by [`Fan::check_axioms`].
    pub fn new(ambient_rank: usize, rays: Vec<Lattice>, max_cones: Vec<Vec<usize>>) -> Result<Self, FanError> {
        if ambient_rank == 0 {
            return Err(FanError::Malformed("ambient rank must be at least 1".into()));
        }
        for (i, r) in rays.iter().enumerate() {
            if r.len() != ambient_rank {
                return Err(FanError::Malformed(format!("ray {} has length {}", i + 1, r.len())));
            }
            if !linalg::content(r).is_one() {
                return Err(FanError::InvalidFan(format!("ray {} is zero or not primitive", i + 1)));
            }
        }
        for i in 0..rays.len() {
            if rays[i + 1..].contains(&rays[i]) {
                return Err(FanError::InvalidFan(format!("ray {} is repeated", i + 1)));
            }
        }
        let mut cones = Vec::with_capacity(max_cones.len());
        for (c, mut cone) in max_cones.into_iter().enumerate() {
            cone.sort_unstable();
            if cone.windows(2).any(|w| w[0] == w[1]) {
                return Err(FanError::Malformed(format!("maximal cone {} repeats a ray", c + 1)));
            }
            if let Some(&bad) = cone.iter().find(|&&i| i >= rays.len()) {
                return Err(FanError::Malformed(format!("maximal cone {} uses unknown ray {}", c + 1, bad + 1)));
            }
            let geometric = Cone::new(ambient_rank, cone.iter().map(|&i| rays[i].clone()).collect())
                .map_err(|e| FanError::InvalidFan(format!("maximal cone {}: {e}", c + 1)))?;
            if !geometric.is_full_dimensional() {
                return Err(FanError::InvalidFan(format!("maximal cone {} is not full-dimensional", c + 1)));
            }
            cones.push(cone);
        }
        cones.sort();
        for i in 0..cones.len() {
            for j in 0..cones.len() {
                if i != j && is_subset(&cones[i], &cones[j]) {
                    return Err(FanError::InvalidFan("maximal cones must not contain each other".into()));
                }
            }
        }
        for i in 0..rays.len() {
            if !cones.iter().any(|c| c.contains(&i)) {
                return Err(FanError::InvalidFan(format!("ray {} lies in no maximal cone", i + 1)));
            }
        }
        Ok(Fan { ambient_rank, rays, max_cones: cones })
    }

    /// The fan of all faces of `σ`.
    pub fn face_fan(sigma: &Cone) -> Self {
        Fan {
            ambient_rank: sigma.ambient_rank(),
            rays: sigma.rays().to_vec(),
            max_cones: vec![(0..sigma.ray_count()).collect()],
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rays(&self) -> &[Lattice] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    fn refs(&self, cone: &[usize]) -> Vec<&Lattice> {
        cone.iter().map(|&i| &self.rays[i]).collect()
    }

    /// Every cone of the fan as a sorted index set.
    pub fn cones(&self) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        for mc in &self.max_cones {
            for local in cone_faces(&self.refs(mc), self.ambient_rank) {
                out.insert(local.into_iter().map(|i| mc[i]).collect());
            }
        }
        out
    }

    /// Dual data and face lattice of a maximal cone, in local indices.
    fn max_cone_data(&self, c: usize) -> (DualCone, FaceLattice) {
        faces_of_rays(&self.refs(&self.max_cones[c]), self.ambient_rank)
    }

    pub fn is_smooth(&self) -> bool {
        self.max_cones.iter().all(|c| is_smooth_set(&self.refs(c), self.ambient_rank))
    }

    /// Pairwise intersections of maximal cones are common faces.
    pub fn check_axioms(&self) -> Result<(), FanError> {
        let data: Vec<(DualCone, FaceLattice)> = (0..self.max_cones.len()).map(|c| self.max_cone_data(c)).collect();
        for a in 0..self.max_cones.len() {
            for b in a + 1..self.max_cones.len() {
                let (ca, cb) = (&self.max_cones[a], &self.max_cones[b]);
                let common = intersect(ca, cb);
                let is_face = |cone: &[usize], lattice: &FaceLattice| {
                    let local: Vec<usize> = common.iter().map(|g| cone.binary_search(g).expect("common ray")).collect();
                    lattice.contains(&local)
                };
                if !is_face(ca, &data[a].1) || !is_face(cb, &data[b].1) {
                    return Err(FanError::InvalidFan(format!(
                        "shared rays of maximal cones {} and {} do not span a common face",
                        a + 1,
                        b + 1
                    )));
                }
                let meet = linalg_meet(
                    self.refs(ca).into_iter().cloned().collect(),
                    data[a].0.generators.clone(),
                    &data[b].0.generators,
                );
                let common_rays: Vec<&Lattice> = common.iter().map(|&i| &self.rays[i]).collect();
                if meet.iter().any(|r| !common_rays.contains(&r)) {
                    return Err(FanError::InvalidFan(format!(
                        "maximal cones {} and {} overlap beyond a common face",
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
        Ok(())
    }

    fn max_cone_duals(&self) -> Vec<DualCone> {
        self.max_cones.iter().map(|c| dual_from_rays(&self.refs(c), self.ambient_rank)).collect()
    }

    /// Indices of the maximal cones containing `x`.
    fn max_cones_containing(&self, x: &[Int]) -> Vec<usize> {
        containing(&self.max_cone_duals(), x)
    }

    pub fn support_contains(&self, x: &[Int]) -> bool {
        !self.max_cones_containing(x).is_empty()
    }
}

fn containing(duals: &[DualCone], x: &[Int]) -> Vec<usize> {
    (0..duals.len()).filter(|&c| duals[c].contains_primal(x)).collect()
}

fn linalg_meet(gens: Vec<Lattice>, known: Vec<Lattice>, extra: &[Lattice]) -> Vec<Lattice> {
    crate::polyhedra::double_description(gens, known, extra)
}

/// Checks that `fan` is a fan with support `σ` whose first rays are those of
/// `σ`, and computes the invariants of the refinement.
pub fn validate_refinement(sigma: &Cone, fan: &Fan) -> Result<ResolutionProfile, FanError> {
    let dual = sigma.dual_cone()?;
    let n = sigma.ambient_rank();
    let k = sigma.ray_count();
    if fan.ambient_rank != n || fan.rays.len() < k || fan.rays[..k] != *sigma.rays() {
        return Err(FanError::RayOrderMismatch);
    }
    fan.check_axioms()?;
    for (i, r) in fan.rays.iter().enumerate() {
        if !dual.contains_primal(r) {
            return Err(FanError::NotARefinement(format!("ray {} lies outside the cone", i + 1)));
        }
    }
    // Relative-interior sample of each maximal cone lies in that cone only.
    let duals = fan.max_cone_duals();
    for (c, mc) in fan.max_cones.iter().enumerate() {
        let mut sample = vec![Int::zero(); n];
        for &i in mc {
            for (s, x) in sample.iter_mut().zip(&fan.rays[i]) {
                *s += x;
            }
        }
        let holders = containing(&duals, &sample);
        if holders != [c] {
            return Err(FanError::InvalidFan(format!("interior of maximal cone {} meets another cone", c + 1)));
        }
    }
    let w = dual.interior_functional(n);
    let sigma_refs: Vec<&Lattice> = sigma.rays().iter().collect();
    let target = cone_volume(&sigma_refs, n, &w);
    let covered = fan.max_cones.iter().map(|mc| cone_volume(&fan.refs(mc), n, &w)).fold(Rat::zero(), |a, b| a + b);
    if covered != target {
        return Err(FanError::NotARefinement(format!("maximal cones cover volume {covered} of {target}")));
    }

    let cones = fan.cones();
    let faces = sigma.face_lattice()?;
    let mut missing = Vec::new();
    let mut strong = true;
    for f in &faces.faces {
        if cones.contains(&f.rays) {
            continue;
        }
        let vs: Vec<&Lattice> = f.rays.iter().map(|&i| &sigma.rays()[i]).collect();
        if is_smooth_set(&vs, n) {
            strong = false;
        }
        missing.push(f.clone());
    }
    let codim_z = missing.iter().map(|f| f.dim).min().map_or(Codim::Infinite, Codim::Finite);
    Ok(ResolutionProfile {
        smooth: fan.is_smooth(),
        strong,
        codim_z,
        exceptional_rays: (k..fan.rays.len()).collect(),
        missing_faces: missing.into_iter().map(|f| f.rays).collect(),
    })
}

/// Indices of the rays of the fan that are not rays of `σ`.
pub fn exceptional_rays(sigma: &Cone, fan: &Fan) -> Result<Vec<usize>, FanError> {
    Ok(validate_refinement(sigma, fan)?.exceptional_rays)
}

/// Star subdivision at the primitive vector `v`.
pub fn star_subdivide(fan: &Fan, v: &[Int]) -> Result<Fan, FanError> {
    if v.len() != fan.ambient_rank || !linalg::content(v).is_one() {
        return Err(FanError::NonPrimitivePoint);
    }
    if fan.rays.iter().any(|r| r.as_slice() == v) {
        return Ok(fan.clone());
    }
    let holders = fan.max_cones_containing(v);
    if holders.is_empty() {
        return Err(FanError::PointOutsideSupport);
    }
    let new_index = fan.rays.len();
    let mut cones = Vec::new();
    for (c, mc) in fan.max_cones.iter().enumerate() {
        if !holders.contains(&c) {
            cones.push(mc.clone());
            continue;
        }
        let (_, lattice) = fan.max_cone_data(c);
        let n = fan.ambient_rank;
        for g in lattice.faces.iter().filter(|g| g.dim + 1 == n) {
            if dot(&g.witness, v).is_zero() {
                continue;
            }
            let mut join: Vec<usize> = g.rays.iter().map(|&i| mc[i]).collect();
            join.push(new_index);
            cones.push(join);
        }
    }
    // Joins of a facet with a point off its hyperplane are full-dimensional
    // with extreme rays as listed, so the checks in `Fan::new` are skipped.
    let mut rays = fan.rays.clone();
    rays.push(v.to_vec());
    cones.sort();
    Ok(Fan { ambient_rank: fan.ambient_rank, rays, max_cones: cones })
}

/// Nonzero lattice points `Σ λ_j v_j`, `0 ≤ λ_j < 1`, of the half-open
/// fundamental parallelotope of linearly independent `rays`, with their
/// coefficients.
pub(crate) fn parallelotope_points(rays: &[&Lattice], n: usize) -> Vec<(Vec<Rat>, Lattice)> {
    let d = rays.len();
    let rows: Vec<Lattice> = rays.iter().map(|r| (*r).clone()).collect();
    let smith = snf(&IntMatrix::from_rows(n, &rows));
    let left = to_rational(&smith.left);
    let divisors: Vec<u64> =
        smith.divisors.iter().map(|x| u64::try_from(x).expect("multiplicity fits in u64")).collect();
    let mut out = Vec::new();
    let mut a = vec![0u64; d];
    loop {
        // μ_i = a_i / d_i gives a lattice point; λ = μ · left
        let mu: Vec<Rat> = a.iter().zip(&divisors).map(|(&x, &dv)| Rat::new(Int::from(x), Int::from(dv))).collect();
        let lambda: Vec<Rat> =
            (0..d).map(|j| (0..d).fold(Rat::zero(), |acc, i| acc + &mu[i] * &left[(i, j)])).map(|x| frac(&x)).collect();
        if lambda.iter().any(|x| !x.is_zero()) {
            let mut p = vec![Rat::zero(); n];
            for (l, r) in lambda.iter().zip(rays) {
                for (pi, ri) in p.iter_mut().zip(r.iter()) {
                    *pi += l * Rat::from_integer(ri.clone());
                }
            }
            let p: Lattice = p.into_iter().map(|x| x.to_integer()).collect();
            out.push((lambda, p));
        }
        let mut pos = 0;
        loop {
            if pos == d {
                return out;
            }
            if a[pos] + 1 < divisors[pos] {
                a[pos] += 1;
                break;
            }
            a[pos] = 0;
            pos += 1;
        }
    }
}

/// Faces of the maximal cones selected by `keep`. Faces of simplicial or
/// unimodular cones are again simplicial or unimodular, so resolve only needs
/// to look inside the offending maximal cones.
fn faces_within(fan: &Fan, keep: impl Fn(&[usize]) -> bool) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for mc in fan.max_cones.iter().filter(|mc| keep(mc)) {
        for local in cone_faces(&fan.refs(mc), fan.ambient_rank) {
            out.insert(local.into_iter().map(|i| mc[i]).collect());
        }
    }
    out
}

/// Full-dimensional simplicial cone of determinant `±1`.
fn is_unimodular(rays: &[&Lattice], n: usize) -> bool {
    let rows: Vec<Lattice> = rays.iter().map(|r| (*r).clone()).collect();
    rays.len() == n && linalg::det(&IntMatrix::from_rows(n, &rows)).abs().is_one()
}

fn rank_of(fan: &Fan, cone: &[usize]) -> usize {
    int_rank(&fan.refs(cone), fan.ambient_rank)
}

/// Resolves `σ` by star subdivisions and reports the achieved profile.
///
/// First every non-simplicial cone is subdivided at the sum of its rays
/// (smallest dimension first, then lexicographically smallest index set).
/// Then, while a cone is not unimodular, the smallest-dimensional such cone
/// is subdivided at the lattice point of its fundamental parallelotope with
/// least coefficient sum (ties broken by the point itself).
pub fn resolve_with_profile(sigma: &Cone) -> Result<(Fan, ResolutionProfile), FanError> {
    if !sigma.is_full_dimensional() {
        return Err(ConeError::NotFullDimensional.into());
    }
    let n = sigma.ambient_rank();
    let mut fan = Fan::face_fan(sigma);

    loop {
        let target = faces_within(&fan, |mc| mc.len() > n)
            .into_iter()
            .map(|c| (rank_of(&fan, &c), c))
            .filter(|(d, c)| c.len() > *d)
            .min();
        let Some((_, cone)) = target else { break };
        let mut sum = vec![Int::zero(); n];
        for &i in &cone {
            for (s, x) in sum.iter_mut().zip(&fan.rays[i]) {
                *s += x;
            }
        }
        let v = linalg::primitive(&sum).expect("sum of rays of a pointed cone is nonzero");
        fan = star_subdivide(&fan, &v)?;
    }

    loop {
        let target = faces_within(&fan, |mc| !is_unimodular(&fan.refs(mc), n))
            .into_iter()
            .filter(|c| !multiplicity_of(&fan.refs(c), n).is_some_and(|m| m.is_one()))
            .map(|c| (c.len(), c))
            .min();
        let Some((_, cone)) = target else { break };
        let (_, v) = parallelotope_points(&fan.refs(&cone), n)
            .into_iter()
            .map(|(lambda, p)| (lambda.into_iter().fold(Rat::zero(), |a, b| a + b), p))
            .min()
            .expect("non-unimodular simplicial cone has a nonzero parallelotope point");
        let v = linalg::primitive(&v).expect("nonzero point");
        fan = star_subdivide(&fan, &v)?;
    }

    let profile = validate_refinement(sigma, &fan)?;
    Ok((fan, profile))
}

/// A smooth fan refining `σ`; with `want_strong`, fails (carrying the fan)
/// unless every smooth face of `σ` survived.
pub fn resolve(sigma: &Cone, want_strong: bool) -> Result<Fan, FanError> {
    let (fan, profile) = resolve_with_profile(sigma)?;
    if want_strong && !profile.strong {
        return Err(FanError::StrongnessUnachieved { fan: Box::new(fan), profile: Box::new(profile) });
    }
    Ok(fan)
}

/// Coordinates of `x` in the basis of linearly independent `rays`, if `x`
/// lies in their span.
#[cfg(test)]
fn coordinates(rays: &[&Lattice], n: usize, x: &[Int]) -> Option<Vec<Rat>> {
    let cols: Vec<Vec<Rat>> = rays.iter().map(|r| r.iter().map(|v| Rat::from_integer(v.clone())).collect()).collect();
    let a = crate::RatMatrix::from_cols(n, &cols);
    let b = crate::RatMatrix::from_cols(n, &[x.iter().map(|v| Rat::from_integer(v.clone())).collect()]);
    linalg::solve(&a, &b).map(|m| m.col(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Lattice {
        xs.iter().map(|&x| Int::from(x)).collect()
    }

    fn cone(n: usize, rays: &[&[i64]]) -> Cone {
        Cone::new(n, rays.iter().map(|r| v(r)).collect()).unwrap()
    }

    fn a1() -> Cone {
        cone(2, &[&[1, 0], &[1, 2]])
    }

    fn quadric() -> Cone {
        cone(3, &[&[1, 0, 0], &[0, 1, 0], &[1, 0, 1], &[0, 1, 1]])
    }

    fn fan(n: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Fan {
        Fan::new(n, rays.iter().map(|r| v(r)).collect(), cones.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    #[test]
    fn a1_refinement_profile() {
        let f = fan(2, &[&[1, 0], &[1, 2], &[1, 1]], &[&[0, 2], &[1, 2]]);
        let p = validate_refinement(&a1(), &f).unwrap();
        assert!(p.smooth && p.strong);
        assert_eq!(p.codim_z, Codim::Finite(2));
        assert_eq!(p.exceptional_rays, vec![2]);
        assert_eq!(p.missing_faces, vec![vec![0, 1]]);
    }

    #[test]
    fn subdividing_a_smooth_cone_is_not_strong() {
        let sq = cone(2, &[&[1, 0], &[0, 1]]);
        let f = star_subdivide(&Fan::face_fan(&sq), &v(&[1, 1])).unwrap();
        let p = validate_refinement(&sq, &f).unwrap();
        assert!(p.smooth && !p.strong);
        assert_eq!(p.codim_z, Codim::Finite(2));
    }

    #[test]
    fn quadric_star_subdivision() {
        let q = quadric();
        let f = star_subdivide(&Fan::face_fan(&q), &v(&[1, 1, 1])).unwrap();
        assert_eq!(f.max_cones().len(), 4);
        let expected: Vec<Vec<usize>> = vec![vec![0, 1, 4], vec![0, 2, 4], vec![1, 3, 4], vec![2, 3, 4]];
        assert_eq!(f.max_cones(), expected.as_slice());
        for mc in f.max_cones() {
            let rows: Vec<Lattice> = mc.iter().map(|&i| f.rays()[i].clone()).collect();
            assert_eq!(linalg::det(&IntMatrix::from_rows(3, &rows)).abs(), Int::one());
        }
        let p = validate_refinement(&q, &f).unwrap();
        assert!(p.smooth && p.strong);
        assert_eq!(p.codim_z, Codim::Finite(3));
    }

    #[test]
    fn star_subdivision_examples() {
        let f = star_subdivide(&Fan::face_fan(&a1()), &v(&[1, 1])).unwrap();
        let expected: Vec<Vec<usize>> = vec![vec![0, 2], vec![1, 2]];
        assert_eq!(f.max_cones(), expected.as_slice());
        let sq = Fan::face_fan(&cone(2, &[&[1, 0], &[0, 1]]));
        assert_eq!(star_subdivide(&sq, &v(&[1, 0])).unwrap(), sq);
        assert_eq!(star_subdivide(&sq, &v(&[-1, 1])), Err(FanError::PointOutsideSupport));
        assert_eq!(star_subdivide(&sq, &v(&[2, 2])), Err(FanError::NonPrimitivePoint));
        assert_eq!(star_subdivide(&sq, &v(&[0, 0])), Err(FanError::NonPrimitivePoint));
    }

    #[test]
    fn resolve_examples() {
        let f = resolve(&a1(), true).unwrap();
        assert_eq!(f.rays(), &[v(&[1, 0]), v(&[1, 2]), v(&[1, 1])]);
        assert_eq!(f.max_cones().len(), 2);

        let f = resolve(&quadric(), true).unwrap();
        assert_eq!(f.rays().len(), 5);
        assert_eq!(f.rays()[4], v(&[1, 1, 1]));
        assert_eq!(f.max_cones().len(), 4);
        assert!(f.is_smooth());

        let e = cone(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let f = resolve(&e, true).unwrap();
        assert_eq!(f, Fan::face_fan(&e));
        assert!(exceptional_rays(&e, &f).unwrap().is_empty());

        let t = cone(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 1, 2]]);
        let f = resolve(&t, true).unwrap();
        assert_eq!(f.rays()[3], v(&[0, 1, 1]));
        assert_eq!(exceptional_rays(&t, &f).unwrap(), vec![3]);
        let p = validate_refinement(&t, &f).unwrap();
        assert_eq!(p.codim_z, Codim::Finite(2));
    }

    #[test]
    fn parallelotope_of_a1() {
        let (a, b) = (v(&[1, 0]), v(&[1, 2]));
        let pts = parallelotope_points(&[&a, &b], 2);
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].1, v(&[1, 1]));
        let half = Rat::new(Int::one(), Int::from(2));
        assert_eq!(pts[0].0, vec![half.clone(), half]);
    }

    #[test]
    fn parallelotope_matches_brute_force() {
        // cone((1,0,0),(1,3,0),(1,1,4)) has multiplicity 12
        let rays = [v(&[1, 0, 0]), v(&[1, 3, 0]), v(&[1, 1, 4])];
        let refs: Vec<&Lattice> = rays.iter().collect();
        let mut got: Vec<Lattice> = parallelotope_points(&refs, 3).into_iter().map(|(_, p)| p).collect();
        got.sort();
        let mut brute = Vec::new();
        for x in 0..=3 {
            for y in 0..=4 {
                for z in 0..=4 {
                    let p = v(&[x, y, z]);
                    if p.iter().all(Zero::is_zero) {
                        continue;
                    }
                    let c = coordinates(&refs, 3, &p).unwrap();
                    if c.iter().all(|l| !l.is_negative() && l < &Rat::one()) {
                        brute.push(p);
                    }
                }
            }
        }
        brute.sort();
        assert_eq!(got.len(), 11);
        assert_eq!(got, brute);
    }

    #[test]
    fn subdivision_lowers_multiplicity() {
        let rays = [v(&[1, 0, 0]), v(&[1, 3, 0]), v(&[1, 1, 4])];
        let sigma = Cone::new(3, rays.to_vec()).unwrap();
        let refs: Vec<&Lattice> = rays.iter().collect();
        let base = multiplicity_of(&refs, 3).unwrap();
        for (_, p) in parallelotope_points(&refs, 3) {
            let Ok(p) = linalg::primitive(&p) else { continue };
            let f = star_subdivide(&Fan::face_fan(&sigma), &p).unwrap();
            for mc in f.max_cones().iter().filter(|c| c.contains(&3)) {
                let m = multiplicity_of(&f.refs(mc), 3).unwrap();
                assert!(m < base, "{m} !< {base}");
            }
        }
    }

    #[test]
    fn refinement_errors() {
        let sigma = a1();
        // wrong ray order
        let f = fan(2, &[&[1, 2], &[1, 0], &[1, 1]], &[&[1, 2], &[0, 2]]);
        assert_eq!(validate_refinement(&sigma, &f), Err(FanError::RayOrderMismatch));
        // only half the cone
        let f = Fan::new(2, vec![v(&[1, 0]), v(&[1, 2]), v(&[1, 1])], vec![vec![0, 2]]);
        assert!(matches!(f, Err(FanError::InvalidFan(_))));
        // support too large
        let big = fan(2, &[&[1, 0], &[1, 2], &[0, 1]], &[&[0, 1], &[1, 2]]);
        assert!(matches!(validate_refinement(&sigma, &big), Err(FanError::NotARefinement(_))));
        // overlapping cones
        let overlap = fan(2, &[&[1, 0], &[1, 2], &[1, 1]], &[&[0, 1], &[0, 2]]);
        assert!(matches!(validate_refinement(&sigma, &overlap), Err(FanError::InvalidFan(_))));
        let flat = Cone::new(2, vec![v(&[1, 0])]).unwrap();
        assert_eq!(
            validate_refinement(&flat, &Fan::face_fan(&sigma)),
            Err(FanError::Cone(ConeError::NotFullDimensional))
        );
        assert!(matches!(Fan::new(2, vec![v(&[1, 0]), v(&[0, 1])], vec![vec![0, 5]]), Err(FanError::Malformed(_))));
    }

    #[test]
    fn chamber_subdivision_of_a1() {
        let f = resolve(&a1(), true).unwrap();
        let g = star_subdivide(&f, &v(&[2, 1])).unwrap();
        assert_eq!(g.max_cones().len(), 3);
        let p = validate_refinement(&a1(), &g).unwrap();
        assert!(p.smooth);
        assert_eq!(p.codim_z, Codim::Finite(2));
        assert_eq!(p.exceptional_rays, vec![2, 3]);
    }
}
