//! Rational polyhedral cones in `N ⊗ ℚ` and their duals in `M ⊗ ℚ`.
//!
//! A [`Cone`] is given by its primitive extreme ray generators. The dual cone
//! is computed by double description (incremental insertion of the
//! inequalities `⟨u, v_j⟩ ≥ 0`); faces are intersections of facets, each with
//! a witness `u₀ ∈ σ^∨` cutting it out.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{self, dot, integral_direction, rank_and_kernel, snf, solve, to_rational, Matrix};
use crate::{Int, IntMatrix, Lattice, Rat, RatMatrix};

/// Variant indices are 0-based; messages count rays from 1.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error("ambient lattice rank must be at least 1")]
    InvalidRank,
    #[error("ray {} has length {got}, expected {expected}", .index + 1)]
    DimensionMismatch { index: usize, expected: usize, got: usize },
    #[error("ray {} is zero", .0 + 1)]
    ZeroRay(usize),
    #[error("ray {} is not primitive", .0 + 1)]
    NonPrimitiveRay(usize),
    #[error("rays {} and {} are parallel", .0 + 1, .1 + 1)]
    ParallelRays(usize, usize),
    #[error("cone contains a line")]
    NotStronglyConvex,
    #[error("ray {} is not an extreme ray of the cone it generates", .0 + 1)]
    NotExtreme(usize),
    #[error("rays do not span the ambient space")]
    NotFullDimensional,
    #[error("vector has length {got}, expected {expected}")]
    VectorLength { expected: usize, got: usize },
}

/// A codimension that may be infinite (the empty locus).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Codim {
    Finite(usize),
    Infinite,
}

impl Codim {
    pub fn finite(self) -> Option<usize> {
        match self {
            Codim::Finite(c) => Some(c),
            Codim::Infinite => None,
        }
    }
}

impl fmt::Display for Codim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Codim::Finite(c) => write!(f, "{c}"),
            Codim::Infinite => f.write_str("infinity"),
        }
    }
}

/// Strongly convex rational polyhedral cone, stored by its extreme rays.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cone {
    ambient_rank: usize,
    rays: Vec<Lattice>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCone {
    /// Extreme rays of `σ^∨`, primitive, lexicographically sorted. These are
    /// the inward facet normals of `σ`.
    pub generators: Vec<Lattice>,
    /// For each generator, the rays of `σ` on which it vanishes (a facet).
    pub facets: Vec<Vec<usize>>,
}

impl DualCone {
    /// `x ∈ σ` test via the facet inequalities.
    pub fn contains_primal(&self, x: &[Int]) -> bool {
        self.generators.iter().all(|g| !dot(g, x).is_negative())
    }

    /// A functional strictly positive on `σ \ {0}`.
    pub fn interior_functional(&self, n: usize) -> Lattice {
        let mut w = vec![Int::zero(); n];
        for g in &self.generators {
            for (a, b) in w.iter_mut().zip(g) {
                *a += b;
            }
        }
        w
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    /// Sorted indices of the rays spanning the face.
    pub rays: Vec<usize>,
    pub dim: usize,
    /// `u₀ ∈ σ^∨` with `face = σ ∩ u₀^⊥`.
    pub witness: Lattice,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceLattice {
    /// Sorted by dimension, then ray indices.
    pub faces: Vec<Face>,
}

impl FaceLattice {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn get(&self, rays: &[usize]) -> Option<&Face> {
        self.faces.iter().find(|f| f.rays == rays)
    }

    pub fn contains(&self, rays: &[usize]) -> bool {
        self.get(rays).is_some()
    }

    /// Faces of `face` of one dimension lower.
    pub fn facets_of<'a>(&'a self, face: &'a Face) -> impl Iterator<Item = &'a Face> + 'a {
        self.faces.iter().filter(move |g| g.dim + 1 == face.dim && is_subset(&g.rays, &face.rays))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeProfile {
    pub simplicial: bool,
    pub smooth: bool,
    /// Product of the elementary divisors of the ray matrix; simplicial only.
    pub multiplicity: Option<Int>,
    /// Smallest dimension of a non-smooth face.
    pub codim_sing: Codim,
}

pub(crate) fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

pub(crate) fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| b.binary_search(x).is_ok()).collect()
}

pub(crate) fn int_rank(vectors: &[&Lattice], n: usize) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<Rat>> =
        vectors.iter().map(|v| v.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect();
    linalg::rank(&Matrix::from_rows(n, &rows))
}

/// Greedy choice of linearly independent vectors, first-come.
fn independent_subset(vectors: &[&Lattice], n: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..vectors.len() {
        let mut trial: Vec<&Lattice> = chosen.iter().map(|&c| vectors[c]).collect();
        trial.push(vectors[i]);
        if int_rank(&trial, n) == trial.len() {
            chosen.push(i);
        }
    }
    chosen
}

/// Elementary divisors of the matrix with the given rows.
pub(crate) fn elementary_divisors(vectors: &[&Lattice], n: usize) -> Vec<Int> {
    let rows: Vec<Lattice> = vectors.iter().map(|v| (*v).clone()).collect();
    snf(&IntMatrix::from_rows(n, &rows)).divisors
}

/// Lattice index of the subgroup generated by linearly independent vectors in
/// its saturation; `None` if the vectors are dependent.
pub(crate) fn multiplicity_of(vectors: &[&Lattice], n: usize) -> Option<Int> {
    if vectors.is_empty() {
        return Some(Int::one());
    }
    let divs = elementary_divisors(vectors, n);
    if divs.len() < vectors.len() || divs.iter().any(Zero::is_zero) {
        return None;
    }
    Some(divs.iter().fold(Int::one(), |acc, d| acc * d))
}

pub(crate) fn is_smooth_set(vectors: &[&Lattice], n: usize) -> bool {
    multiplicity_of(vectors, n).is_some_and(|m| m.is_one())
}

/// Extreme rays of `{x : ⟨a, x⟩ ≥ 0 ∀ a ∈ known ∪ new}` given the extreme rays
/// `gens` of the pointed cone cut out by `known`.
///
/// Each insertion keeps the nonnegative generators and combines every
/// adjacent positive/negative pair; adjacency is the combinatorial test on
/// zero sets.
pub(crate) fn double_description(mut gens: Vec<Lattice>, mut known: Vec<Lattice>, new: &[Lattice]) -> Vec<Lattice> {
    for h in new {
        let vals: Vec<Int> = gens.iter().map(|g| dot(h, g)).collect();
        if vals.iter().all(|v| !v.is_negative()) {
            known.push(h.clone());
            continue;
        }
        let zero_sets: Vec<Vec<bool>> =
            gens.iter().map(|g| known.iter().map(|a| dot(a, g).is_zero()).collect()).collect();
        let mut next: Vec<Lattice> =
            gens.iter().zip(&vals).filter(|(_, v)| !v.is_negative()).map(|(g, _)| g.clone()).collect();
        for a in (0..gens.len()).filter(|&a| vals[a].is_positive()) {
            for b in (0..gens.len()).filter(|&b| vals[b].is_negative()) {
                let common: Vec<usize> = (0..known.len()).filter(|&i| zero_sets[a][i] && zero_sets[b][i]).collect();
                let blocked = (0..gens.len()).any(|c| c != a && c != b && common.iter().all(|&i| zero_sets[c][i]));
                if blocked {
                    continue;
                }
                let combo: Lattice =
                    gens[b].iter().zip(&gens[a]).map(|(gb, ga)| &vals[a] * gb - &vals[b] * ga).collect();
                let Ok(r) = linalg::primitive(&combo) else { continue };
                if !next.contains(&r) {
                    next.push(r);
                }
            }
        }
        gens = next;
        known.push(h.clone());
    }
    gens
}

/// Generators of `{u : ⟨u, v⟩ ≥ 0 ∀ v ∈ rays}` for rays spanning `ℚⁿ`.
fn dual_generators(rays: &[&Lattice], n: usize) -> Vec<Lattice> {
    let basis = independent_subset(rays, n);
    debug_assert_eq!(basis.len(), n);
    let b_rows: Vec<Lattice> = basis.iter().map(|&i| rays[i].clone()).collect();
    let b = to_rational(&IntMatrix::from_rows(n, &b_rows));
    let inv = solve(&b, &RatMatrix::identity(n)).expect("basis rays are independent");
    let initial: Vec<Lattice> = (0..n).map(|j| integral_direction(&inv.col(j))).collect();
    let rest: Vec<Lattice> = (0..rays.len()).filter(|i| !basis.contains(i)).map(|i| rays[i].clone()).collect();
    let mut gens = double_description(initial, b_rows, &rest);
    gens.sort();
    gens
}

/// Coordinates of the rays in a basis of their span (positively rescaled to
/// primitive integer vectors), together with the span dimension.
fn span_coordinates(rays: &[&Lattice], n: usize) -> (usize, Vec<Lattice>) {
    let basis = independent_subset(rays, n);
    let d = basis.len();
    let cols: Vec<Vec<Rat>> =
        basis.iter().map(|&i| rays[i].iter().map(|x| Rat::from_integer(x.clone())).collect()).collect();
    let b = RatMatrix::from_cols(n, &cols);
    let coords = rays
        .iter()
        .map(|v| {
            let rhs = RatMatrix::from_cols(n, &[v.iter().map(|x| Rat::from_integer(x.clone())).collect()]);
            let c = solve(&b, &rhs).expect("ray lies in the span of the basis");
            integral_direction(&c.col(0))
        })
        .collect();
    (d, coords)
}

/// Faces of a full-dimensional cone, from its dual generators.
fn faces_from_dual(rays: &[&Lattice], n: usize, dual: &DualCone) -> FaceLattice {
    let all: Vec<usize> = (0..rays.len()).collect();
    let mut found: BTreeMap<Vec<usize>, Lattice> = BTreeMap::new();
    found.insert(all, vec![Int::zero(); n]);
    let facets: Vec<(Vec<usize>, Lattice)> = dual.facets.iter().cloned().zip(dual.generators.iter().cloned()).collect();
    let mut queue: Vec<(Vec<usize>, Lattice)> = Vec::new();
    for (f, w) in &facets {
        if !found.contains_key(f) {
            found.insert(f.clone(), w.clone());
            queue.push((f.clone(), w.clone()));
        }
    }
    while let Some((f, w)) = queue.pop() {
        for (g, wg) in &facets {
            let i = intersect(&f, g);
            if found.contains_key(&i) {
                continue;
            }
            let wi: Lattice = w.iter().zip(wg).map(|(a, b)| a + b).collect();
            found.insert(i.clone(), wi.clone());
            queue.push((i, wi));
        }
    }
    let mut faces: Vec<Face> = found
        .into_iter()
        .map(|(rs, witness)| {
            let vs: Vec<&Lattice> = rs.iter().map(|&i| rays[i]).collect();
            Face { dim: int_rank(&vs, n), rays: rs, witness }
        })
        .collect();
    faces.sort_by(|a, b| (a.dim, &a.rays).cmp(&(b.dim, &b.rays)));
    FaceLattice { faces }
}

pub(crate) fn dual_from_rays(rays: &[&Lattice], n: usize) -> DualCone {
    let generators = dual_generators(rays, n);
    let facets = generators.iter().map(|g| (0..rays.len()).filter(|&j| dot(g, rays[j]).is_zero()).collect()).collect();
    DualCone { generators, facets }
}

impl Cone {
    /// Validates primitivity, non-parallelism, strong convexity and
    /// extremality of the given rays.
    pub fn new(ambient_rank: usize, rays: Vec<Lattice>) -> Result<Self, ConeError> {
        if ambient_rank == 0 {
            return Err(ConeError::InvalidRank);
        }
        for (i, r) in rays.iter().enumerate() {
            if r.len() != ambient_rank {
                return Err(ConeError::DimensionMismatch { index: i, expected: ambient_rank, got: r.len() });
            }
            let g = linalg::content(r);
            if g.is_zero() {
                return Err(ConeError::ZeroRay(i));
            }
            if !g.is_one() {
                return Err(ConeError::NonPrimitiveRay(i));
            }
        }
        for i in 0..rays.len() {
            for j in i + 1..rays.len() {
                if int_rank(&[&rays[i], &rays[j]], ambient_rank) < 2 {
                    return Err(ConeError::ParallelRays(i, j));
                }
            }
        }
        let refs: Vec<&Lattice> = rays.iter().collect();
        let (d, coords) = span_coordinates(&refs, ambient_rank);
        if d > 0 {
            let crefs: Vec<&Lattice> = coords.iter().collect();
            let gens = dual_generators(&crefs, d);
            let grefs: Vec<&Lattice> = gens.iter().collect();
            if int_rank(&grefs, d) < d {
                return Err(ConeError::NotStronglyConvex);
            }
            for (i, c) in coords.iter().enumerate() {
                let tight: Vec<&Lattice> = gens.iter().filter(|g| dot(g, c).is_zero()).collect();
                if int_rank(&tight, d) != d - 1 {
                    return Err(ConeError::NotExtreme(i));
                }
            }
        }
        Ok(Cone { ambient_rank, rays })
    }

    /// Like [`Cone::new`] but first replaces each ray by its primitive
    /// generator; also returns the indices that were rescaled.
    pub fn normalized(ambient_rank: usize, rays: Vec<Lattice>) -> Result<(Self, Vec<usize>), ConeError> {
        let mut changed = Vec::new();
        let mut out = Vec::with_capacity(rays.len());
        for (i, r) in rays.into_iter().enumerate() {
            match linalg::primitive(&r) {
                Ok(p) => {
                    if p != r {
                        changed.push(i);
                    }
                    out.push(p);
                }
                Err(_) => out.push(r),
            }
        }
        Ok((Cone::new(ambient_rank, out)?, changed))
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rays(&self) -> &[Lattice] {
        &self.rays
    }

    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    fn ray_refs(&self) -> Vec<&Lattice> {
        self.rays.iter().collect()
    }

    pub fn span_dim(&self) -> usize {
        int_rank(&self.ray_refs(), self.ambient_rank)
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.span_dim() == self.ambient_rank
    }

    pub fn is_simplicial(&self) -> bool {
        self.span_dim() == self.rays.len()
    }

    fn require_full(&self) -> Result<(), ConeError> {
        if self.is_full_dimensional() {
            Ok(())
        } else {
            Err(ConeError::NotFullDimensional)
        }
    }

    pub fn check_vector(&self, u: &[Int]) -> Result<(), ConeError> {
        if u.len() == self.ambient_rank {
            Ok(())
        } else {
            Err(ConeError::VectorLength { expected: self.ambient_rank, got: u.len() })
        }
    }

    /// `⟨u, v_j⟩` for every ray.
    pub fn pairings(&self, u: &[Int]) -> Vec<Int> {
        self.rays.iter().map(|v| dot(u, v)).collect()
    }

    /// `u ∈ σ^∨`.
    pub fn dual_contains(&self, u: &[Int]) -> bool {
        self.pairings(u).iter().all(|x| !x.is_negative())
    }

    /// Rays `j` with `⟨u, v_j⟩ = 0`.
    pub fn vanishing_rays(&self, u: &[Int]) -> Vec<usize> {
        self.pairings(u).iter().enumerate().filter(|(_, x)| x.is_zero()).map(|(j, _)| j).collect()
    }

    pub fn dual_cone(&self) -> Result<DualCone, ConeError> {
        self.require_full()?;
        Ok(dual_from_rays(&self.ray_refs(), self.ambient_rank))
    }

    pub fn face_lattice(&self) -> Result<FaceLattice, ConeError> {
        let dual = self.dual_cone()?;
        Ok(faces_from_dual(&self.ray_refs(), self.ambient_rank, &dual))
    }

    pub fn classify(&self) -> Result<ConeProfile, ConeError> {
        let faces = self.face_lattice()?;
        let n = self.ambient_rank;
        let refs = self.ray_refs();
        let simplicial = self.is_simplicial();
        let multiplicity = if simplicial { multiplicity_of(&refs, n) } else { None };
        let smooth = multiplicity.as_ref().is_some_and(One::is_one);
        let codim_sing = faces
            .faces
            .iter()
            .find(|f| {
                let vs: Vec<&Lattice> = f.rays.iter().map(|&i| refs[i]).collect();
                !is_smooth_set(&vs, n)
            })
            .map_or(Codim::Infinite, |f| Codim::Finite(f.dim));
        Ok(ConeProfile { simplicial, smooth, multiplicity, codim_sing })
    }

    /// All `u ∈ M` with `0 ≤ ⟨u, v_j⟩ ≤ bound` for every ray, lexicographic.
    pub fn enumerate_degrees(&self, bound: u64) -> Result<Vec<Lattice>, ConeError> {
        self.require_full()?;
        let n = self.ambient_rank;
        let refs = self.ray_refs();
        let basis = independent_subset(&refs, n);
        let rows: Vec<Lattice> = basis.iter().map(|&i| self.rays[i].clone()).collect();
        let a = to_rational(&IntMatrix::from_rows(n, &rows));
        let inv = solve(&a, &RatMatrix::identity(n)).expect("basis rays are independent");
        let b = Int::from(bound);
        let mut out = Vec::new();
        let mut y = vec![0u64; n];
        loop {
            let yq: Vec<Rat> = y.iter().map(|&x| Rat::from_integer(Int::from(x))).collect();
            let u = inv.mul_vec(&yq);
            if u.iter().all(|x| x.is_integer()) {
                let u: Lattice = u.into_iter().map(|x| x.to_integer()).collect();
                if self.pairings(&u).iter().all(|p| !p.is_negative() && p <= &b) {
                    out.push(u);
                }
            }
            // odometer over [0, bound]^n
            let mut pos = 0;
            loop {
                if pos == n {
                    out.sort();
                    return Ok(out);
                }
                if y[pos] < bound {
                    y[pos] += 1;
                    break;
                }
                y[pos] = 0;
                pos += 1;
            }
        }
    }
}

/// Faces of the cone spanned by full-dimensional, extreme `rays`, where the
/// rays are arbitrary (already validated) lattice vectors.
pub(crate) fn faces_of_rays(rays: &[&Lattice], n: usize) -> (DualCone, FaceLattice) {
    let dual = dual_from_rays(rays, n);
    let faces = faces_from_dual(rays, n, &dual);
    (dual, faces)
}

/// A basis of `{x ∈ M ⊗ ℚ : ⟨x, v⟩ = 0 ∀ v ∈ vectors}`.
pub(crate) fn perp_basis(vectors: &[&Lattice], n: usize) -> Vec<Vec<Rat>> {
    if vectors.is_empty() {
        return (0..n).map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect()).collect();
    }
    let rows: Vec<Vec<Rat>> =
        vectors.iter().map(|v| v.iter().map(|x| Rat::from_integer(x.clone())).collect()).collect();
    rank_and_kernel(&RatMatrix::from_rows(n, &rows)).1
}

/// Fractional part in `[0, 1)`.
pub(crate) fn frac(x: &Rat) -> Rat {
    let f = x.numer().mod_floor(x.denom());
    Rat::new(f, x.denom().clone())
}
