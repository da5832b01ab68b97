//! Degree-`u` pieces of the Ishida complex `S_p`, the residue complex `C_p`
//! and the kernel complex `K_p` of a toric log resolution, and their graded
//! cohomology. `H^i(C_p)_u` is the degree-`u` part of `R^i π_* Ω^p_Y(log E)`.
//!
//! For `u ∈ σ^∨ ∩ M` let `I_u = {j : ⟨u, v_j⟩ = 0}`. The term in degree `m`
//! is `⊕ ∧^{p-m} L_J` over the present `m`-subsets `J ⊆ I_u`, where
//! `L_J = {x ∈ M ⊗ ℚ : ⟨x, v_j⟩ = 0, j ∈ J}` and each line `V / L_j` is
//! identified with `ℚ` by pairing with `v_j`. The block `J → J ∪ {i}` writes
//! `ω = w ∧ α + β` with `⟨w, v_i⟩ = 1` and `α, β` in the exterior algebra of
//! `L_{J ∪ {i}}`, and returns `α`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::exterior::{binomial, subsets, subsets_of, wedge, wedge_basis};
use crate::fans::{resolve, validate_refinement, Fan, FanError, ResolutionProfile};
use crate::koszul::{ComplexError, FiniteComplex, Term};
use crate::linalg::{dot, solve};
use crate::polyhedra::{int_rank, perp_basis, Codim, Cone, ConeError, DualCone, FaceLattice};
use crate::{Int, Lattice, Rat, RatMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComplexKind {
    Ishida,
    Residue,
    Kernel,
    LogDifferentialP1,
}

impl ComplexKind {
    pub fn name(self) -> &'static str {
        match self {
            ComplexKind::Ishida => "ishida",
            ComplexKind::Residue => "residue",
            ComplexKind::Kernel => "kernel",
            ComplexKind::LogDifferentialP1 => "p1",
        }
    }
}

impl fmt::Display for ComplexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ComplexKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ishida" => Ok(ComplexKind::Ishida),
            "residue" => Ok(ComplexKind::Residue),
            "kernel" => Ok(ComplexKind::Kernel),
            "p1" => Ok(ComplexKind::LogDifferentialP1),
            _ => Err(format!("unknown complex kind {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToricError {
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("degree {u:?} is not in the dual cone")]
    DegreeOutsideDualCone { u: Lattice },
    #[error("the {kind} complex needs a simplicial cone")]
    UnsupportedNonSimplicial { kind: ComplexKind },
    #[error("the {kind} complex is only defined for p = 1, got p = {p}")]
    UnsupportedP { kind: ComplexKind, p: usize },
    #[error("the resolution is an isomorphism (codim Z is infinite)")]
    NoSingularLocus,
    #[error("p = {p} is below c = {c}")]
    PBelowC { p: usize, c: usize },
    #[error("no witness degree found up to bound {bound}")]
    WitnessSearchExhausted { bound: u64 },
    #[error("H^{i} of the residue complex is {residue} but H^{} of the kernel complex is {kernel} at u = {u:?}", i + 1)]
    CrosscheckFailure { u: Lattice, i: usize, residue: usize, kernel: usize },
    #[error("kernel complex has a nonzero term in degree {m} < c at u = {u:?}")]
    KernelBelowC { u: Lattice, m: usize },
}

/// A cone together with a validated refinement and its profile.
#[derive(Debug, Clone)]
pub struct ResolvedCone {
    sigma: Cone,
    fan: Fan,
    profile: ResolutionProfile,
    dual: DualCone,
    faces: FaceLattice,
    /// Cones of the fan spanned by rays of `σ` only.
    surviving: BTreeSet<Vec<usize>>,
}

impl ResolvedCone {
    pub fn new(sigma: Cone, fan: Fan) -> Result<Self, ToricError> {
        let profile = validate_refinement(&sigma, &fan)?;
        let k = sigma.ray_count();
        let surviving = fan.cones().into_iter().filter(|c| c.iter().all(|&i| i < k)).collect();
        Ok(ResolvedCone { dual: sigma.dual_cone()?, faces: sigma.face_lattice()?, sigma, fan, profile, surviving })
    }

    /// Uses [`resolve`]; with `want_strong` a non-strong outcome is an error.
    pub fn resolve(sigma: Cone, want_strong: bool) -> Result<Self, ToricError> {
        let fan = resolve(&sigma, want_strong)?;
        Self::new(sigma, fan)
    }

    pub fn sigma(&self) -> &Cone {
        &self.sigma
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn profile(&self) -> &ResolutionProfile {
        &self.profile
    }

    pub fn codim_z(&self) -> Codim {
        self.profile.codim_z
    }

    /// Whether `cone(J)` (indices into the rays of `σ`) is a cone of the fan.
    pub fn in_fan(&self, j: &[usize]) -> bool {
        self.surviving.contains(j)
    }

    /// Whether `cone(J)` is a face of `σ` missing from the fan.
    pub fn in_exceptional_locus(&self, j: &[usize]) -> bool {
        self.faces.contains(j) && !self.in_fan(j)
    }

    fn check_degree(&self, u: &[Int]) -> Result<Vec<usize>, ToricError> {
        self.sigma.check_vector(u)?;
        if !self.sigma.dual_contains(u) {
            return Err(ToricError::DegreeOutsideDualCone { u: u.to_vec() });
        }
        Ok(self.sigma.vanishing_rays(u))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSupport {
    pub u: Lattice,
    pub vanishing: Vec<usize>,
    /// `present[m]` lists the `m`-subsets `J` contributing a term.
    pub present: Vec<Vec<Vec<usize>>>,
}

fn presence(rc: &ResolvedCone, kind: ComplexKind, p: usize, vanishing: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let top = p.min(vanishing.len());
    (0..=top)
        .map(|m| {
            subsets_of(vanishing, m)
                .into_iter()
                .filter(|j| match kind {
                    ComplexKind::Ishida | ComplexKind::LogDifferentialP1 => true,
                    ComplexKind::Residue => rc.in_fan(j),
                    ComplexKind::Kernel => rc.in_exceptional_locus(j),
                })
                .collect()
        })
        .collect()
}

fn check_kind(rc: &ResolvedCone, kind: ComplexKind, p: usize, experimental: bool) -> Result<(), ToricError> {
    match kind {
        ComplexKind::LogDifferentialP1 if p != 1 => Err(ToricError::UnsupportedP { kind, p }),
        ComplexKind::LogDifferentialP1 => Ok(()),
        ComplexKind::Ishida if experimental => Ok(()),
        _ if !rc.sigma.is_simplicial() => Err(ToricError::UnsupportedNonSimplicial { kind }),
        _ => Ok(()),
    }
}

fn support_impl(
    rc: &ResolvedCone,
    kind: ComplexKind,
    p: usize,
    u: &[Int],
    experimental: bool,
) -> Result<DegreeSupport, ToricError> {
    check_kind(rc, kind, p, experimental)?;
    let vanishing = rc.check_degree(u)?;
    let present = presence(rc, kind, p, &vanishing);
    Ok(DegreeSupport { u: u.to_vec(), vanishing, present })
}

/// The subsets `J ⊆ I_u` indexing the terms of the degree-`u` complex.
pub fn degree_support(rc: &ResolvedCone, kind: ComplexKind, p: usize, u: &[Int]) -> Result<DegreeSupport, ToricError> {
    support_impl(rc, kind, p, u, false)
}

fn rat(v: &[Int]) -> Vec<Rat> {
    v.iter().map(|x| Rat::from_integer(x.clone())).collect()
}

fn pair(x: &[Rat], v: &[Int]) -> Rat {
    dot(x, &rat(v))
}

/// Matrix of `ω ↦ α` from `∧^r L_J` (basis wedges of `b`) to `∧^{r-1} L'`
/// (basis wedges of `c`), for a chosen `w ∈ L_J` with `⟨w, v_i⟩ = 1`.
pub(crate) fn block_map_with(b: &[Vec<Rat>], c: &[Vec<Rat>], w: &[Rat], r: usize, n: usize) -> RatMatrix {
    let mut cols = Vec::new();
    for s in subsets(c.len(), r - 1) {
        let mut vs = vec![w.to_vec()];
        vs.extend(s.iter().map(|&t| c[t].clone()));
        cols.push(wedge(&vs, n));
    }
    for t in subsets(c.len(), r) {
        let vs: Vec<Vec<Rat>> = t.iter().map(|&x| c[x].clone()).collect();
        cols.push(wedge(&vs, n));
    }
    let adapted = RatMatrix::from_cols(binomial(n, r), &cols);
    let source = wedge_basis(b, n, r);
    let x = solve(&adapted, &source).expect("w and L' span L_J");
    let alpha_rows = binomial(c.len(), r - 1);
    RatMatrix::new(alpha_rows, x.cols(), x.entries()[..alpha_rows * x.cols()].to_vec())
}

/// The canonical `w`: the first basis vector of `L_J` pairing nonzero with
/// `v`, rescaled to pair to `1`.
fn canonical_w(b: &[Vec<Rat>], v: &[Int]) -> Option<Vec<Rat>> {
    b.iter().find_map(|x| {
        let t = pair(x, v);
        (!t.is_zero()).then(|| x.iter().map(|y| y / &t).collect())
    })
}

struct Assembled {
    complex: FiniteComplex,
    degenerate: bool,
}

fn assemble_from(rc: &ResolvedCone, p: usize, present: &[Vec<Vec<usize>>]) -> Result<Assembled, ToricError> {
    let n = rc.sigma.ambient_rank();
    let rays = rc.sigma.rays();
    let mut bases: HashMap<&[usize], Vec<Vec<Rat>>> = HashMap::new();
    for j in present.iter().flatten() {
        let vs: Vec<&Lattice> = j.iter().map(|&i| &rays[i]).collect();
        bases.insert(j, perp_basis(&vs, n));
    }
    let mut terms = Vec::new();
    // offset of each block inside its term
    let mut offsets: Vec<HashMap<&[usize], usize>> = Vec::new();
    for (m, js) in present.iter().enumerate() {
        let r = p - m;
        let mut off = HashMap::new();
        let mut labels = Vec::new();
        for j in js {
            off.insert(j.as_slice(), labels.len());
            let d = bases[j.as_slice()].len();
            for s in subsets(d, r) {
                labels.push(format!("J={:?} b{:?}", one_based(j), one_based(&s)));
            }
        }
        offsets.push(off);
        terms.push(Term { dimension: labels.len(), basis_labels: labels });
    }
    let mut degenerate = false;
    let mut differentials = Vec::new();
    for m in 0..present.len().saturating_sub(1) {
        let r = p - m;
        let mut d = RatMatrix::zeros(terms[m + 1].dimension, terms[m].dimension);
        for j in &present[m] {
            let b = &bases[j.as_slice()];
            let col0 = offsets[m][j.as_slice()];
            for (&target, &row0) in &offsets[m + 1] {
                if !crate::polyhedra::is_subset(j, target) {
                    continue;
                }
                let i = *target.iter().find(|x| !j.contains(x)).expect("target adds one ray");
                let Some(w) = canonical_w(b, &rays[i]) else {
                    degenerate = true;
                    continue;
                };
                let c = &bases[target];
                let block = block_map_with(b, c, &w, r, n);
                for a in 0..block.rows() {
                    for e in 0..block.cols() {
                        d[(row0 + a, col0 + e)] = block[(a, e)].clone();
                    }
                }
            }
        }
        differentials.push(d);
    }
    Ok(Assembled { complex: FiniteComplex::new(0, terms, differentials)?, degenerate })
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

/// The degree-`u` complex of the given kind, in degrees `0..`.
pub fn assemble_degree_complex(
    rc: &ResolvedCone,
    kind: ComplexKind,
    p: usize,
    u: &[Int],
) -> Result<FiniteComplex, ToricError> {
    let s = degree_support(rc, kind, p, u)?;
    Ok(assemble_from(rc, p, &s.present)?.complex)
}

/// The Ishida-shaped graded complex for any cone. The second value reports
/// whether some block was set to zero because `⟨·, v_i⟩` vanished on `L_J`.
pub fn assemble_experimental_ishida(
    rc: &ResolvedCone,
    p: usize,
    u: &[Int],
) -> Result<(FiniteComplex, bool), ToricError> {
    let s = support_impl(rc, ComplexKind::Ishida, p, u, true)?;
    let a = assemble_from(rc, p, &s.present)?;
    Ok((a.complex, a.degenerate))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedCohomologyTable {
    pub kind: ComplexKind,
    pub p: usize,
    pub bound: u64,
    pub experimental: bool,
    /// Number of degrees enumerated.
    pub degree_count: usize,
    /// Nonzero `dim H^i` per degree; degrees with no cohomology are omitted.
    pub entries: BTreeMap<Lattice, BTreeMap<usize, usize>>,
    pub totals: BTreeMap<usize, usize>,
    /// Degrees where a degenerate block was set to zero.
    pub degenerate_degrees: Vec<Lattice>,
}

impl GradedCohomologyTable {
    pub fn get(&self, u: &[Int], i: usize) -> usize {
        self.entries.get(u).and_then(|e| e.get(&i)).copied().unwrap_or(0)
    }

    pub fn total(&self, i: usize) -> usize {
        self.totals.get(&i).copied().unwrap_or(0)
    }

    fn from_rows(
        kind: ComplexKind,
        p: usize,
        bound: u64,
        experimental: bool,
        rows: Vec<(Lattice, BTreeMap<usize, usize>, bool)>,
    ) -> Self {
        let degree_count = rows.len();
        let mut entries = BTreeMap::new();
        let mut totals = BTreeMap::new();
        let mut degenerate_degrees = Vec::new();
        for (u, h, degenerate) in rows {
            if degenerate {
                degenerate_degrees.push(u.clone());
            }
            for (&i, &d) in &h {
                *totals.entry(i).or_insert(0) += d;
            }
            if !h.is_empty() {
                entries.insert(u, h);
            }
        }
        GradedCohomologyTable { kind, p, bound, experimental, degree_count, entries, totals, degenerate_degrees }
    }
}

/// The complex depends on `u` only through `I_u`, so cohomology is computed
/// once per vanishing set and shared.
fn table_impl(
    rc: &ResolvedCone,
    kind: ComplexKind,
    p: usize,
    bound: u64,
    experimental: bool,
) -> Result<GradedCohomologyTable, ToricError> {
    check_kind(rc, kind, p, experimental)?;
    let degrees = rc.sigma.enumerate_degrees(bound)?;
    let vanishing: Vec<Vec<usize>> = degrees.iter().map(|u| rc.sigma.vanishing_rays(u)).collect();
    let distinct: Vec<Vec<usize>> = vanishing.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let computed: Vec<(BTreeMap<usize, usize>, bool)> = distinct
        .par_iter()
        .map(|iu| {
            let a = assemble_from(rc, p, &presence(rc, kind, p, iu))?;
            let mut h: BTreeMap<usize, usize> =
                a.complex.cohomology_dims().into_iter().map(|(d, x)| (d as usize, x)).collect();
            if kind == ComplexKind::LogDifferentialP1 {
                h.remove(&0);
            }
            Ok((h, a.degenerate))
        })
        .collect::<Result<_, ToricError>>()?;
    let by_set: HashMap<&Vec<usize>, &(BTreeMap<usize, usize>, bool)> = distinct.iter().zip(&computed).collect();
    let rows = degrees
        .into_iter()
        .zip(&vanishing)
        .map(|(u, iu)| {
            let (h, deg) = by_set[iu];
            (u, h.clone(), *deg)
        })
        .collect();
    Ok(GradedCohomologyTable::from_rows(kind, p, bound, experimental, rows))
}

/// Graded cohomology over `enumerate_degrees(σ, bound)`. For
/// [`ComplexKind::LogDifferentialP1`] only `i >= 1` is recorded.
pub fn graded_cohomology(
    rc: &ResolvedCone,
    kind: ComplexKind,
    p: usize,
    bound: u64,
) -> Result<GradedCohomologyTable, ToricError> {
    table_impl(rc, kind, p, bound, false)
}

/// Graded cohomology of [`assemble_experimental_ishida`].
pub fn experimental_ishida_cohomology(
    rc: &ResolvedCone,
    p: usize,
    bound: u64,
) -> Result<GradedCohomologyTable, ToricError> {
    table_impl(rc, ComplexKind::Ishida, p, bound, true)
}

/// `dim R^1 π_* Ω^1_Y(log E)_u = |I_u| - dim span{v_j : j ∈ I_u}`; higher
/// images vanish.
pub fn p1_higher_image(rc: &ResolvedCone, bound: u64) -> Result<GradedCohomologyTable, ToricError> {
    let n = rc.sigma.ambient_rank();
    let rows = rc
        .sigma
        .enumerate_degrees(bound)?
        .into_par_iter()
        .map(|u| {
            let iu = rc.sigma.vanishing_rays(&u);
            let vs: Vec<&Lattice> = iu.iter().map(|&j| &rc.sigma.rays()[j]).collect();
            let r1 = iu.len() - int_rank(&vs, n);
            let h = if r1 > 0 { BTreeMap::from([(1, r1)]) } else { BTreeMap::new() };
            (u, h, false)
        })
        .collect();
    Ok(GradedCohomologyTable::from_rows(ComplexKind::LogDifferentialP1, 1, bound, false, rows))
}

/// A face `J` of `σ` of dimension `c` missing from the fan and a degree `u`
/// with `I_u = J`; then `H^c(K_p)_u ≠ 0` and `R^{c-1} π_* Ω^p_Y(log E)_u ≠ 0`.
///
/// `J` is the lexicographically first such face, and `u` the
/// lexicographically first degree with `I_u = J` in the smallest box that
/// contains one.
pub fn nonvanishing_witness(rc: &ResolvedCone, p: usize) -> Result<(Vec<usize>, Lattice), ToricError> {
    if !rc.sigma.is_simplicial() {
        return Err(ToricError::UnsupportedNonSimplicial { kind: ComplexKind::Kernel });
    }
    let Codim::Finite(c) = rc.codim_z() else {
        return Err(ToricError::NoSingularLocus);
    };
    if p < c {
        return Err(ToricError::PBelowC { p, c });
    }
    let j = rc.profile.missing_faces.iter().find(|f| f.len() == c).expect("a missing face of dimension c").clone();
    let rays = rc.sigma.rays();
    let n = rc.sigma.ambient_rank();
    // relative interior point of the dual face
    let mut star = vec![Int::zero(); n];
    for g in &rc.dual.generators {
        if j.iter().all(|&i| dot(g, &rays[i]).is_zero()) {
            for (s, x) in star.iter_mut().zip(g) {
                *s += x;
            }
        }
    }
    let reach = rays.iter().map(|v| dot(&star, v)).max().unwrap_or_else(Int::zero);
    let reach = reach.to_u64().ok_or(ToricError::WitnessSearchExhausted { bound: u64::MAX })?;
    for bound in 0..=reach {
        if (bound + 1).checked_pow(n as u32).is_none_or(|size| size > WITNESS_BOX_LIMIT) {
            return Err(ToricError::WitnessSearchExhausted { bound });
        }
        if let Some(u) = rc.sigma.enumerate_degrees(bound)?.into_iter().find(|u| rc.sigma.vanishing_rays(u) == j) {
            return Ok((j, u));
        }
    }
    Err(ToricError::WitnessSearchExhausted { bound: reach })
}

const WITNESS_BOX_LIMIT: u64 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrosscheckReport {
    pub p: usize,
    pub bound: u64,
    pub degree_count: usize,
    /// `(u, i, dim)` with `dim H^i(C_p)_u = dim H^{i+1}(K_p)_u ≠ 0`, `i > 0`.
    pub nonzero: Vec<(Lattice, usize, usize)>,
}

/// Checks `H^i(C_p)_u = H^{i+1}(K_p)_u` for `i > 0` and that `K_p` has no
/// terms below degree `c`.
pub fn kp_crosscheck(rc: &ResolvedCone, p: usize, bound: u64) -> Result<CrosscheckReport, ToricError> {
    let residue = graded_cohomology(rc, ComplexKind::Residue, p, bound)?;
    let kernel = graded_cohomology(rc, ComplexKind::Kernel, p, bound)?;
    let degrees = rc.sigma.enumerate_degrees(bound)?;
    let c = rc.codim_z().finite();
    let mut nonzero = Vec::new();
    for u in &degrees {
        for i in 1..=p.max(1) + 1 {
            let (a, b) = (residue.get(u, i), kernel.get(u, i + 1));
            if a != b {
                return Err(ToricError::CrosscheckFailure { u: u.clone(), i, residue: a, kernel: b });
            }
            if a > 0 {
                nonzero.push((u.clone(), i, a));
            }
        }
        let present = presence(rc, ComplexKind::Kernel, p, &rc.sigma.vanishing_rays(u));
        for (m, js) in present.iter().enumerate() {
            if !js.is_empty() && c.is_none_or(|c| m < c) {
                return Err(ToricError::KernelBelowC { u: u.clone(), m });
            }
        }
    }
    Ok(CrosscheckReport { p, bound, degree_count: degrees.len(), nonzero })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::koszul::{build_koszul_quotient, KoszulSpec};
    use proptest::prelude::*;

    fn v(xs: &[i64]) -> Lattice {
        xs.iter().map(|&x| Int::from(x)).collect()
    }

    fn cone(n: usize, rays: &[&[i64]]) -> Cone {
        Cone::new(n, rays.iter().map(|r| v(r)).collect()).unwrap()
    }

    fn a1() -> ResolvedCone {
        ResolvedCone::resolve(cone(2, &[&[1, 0], &[1, 2]]), true).unwrap()
    }

    fn quadric() -> ResolvedCone {
        ResolvedCone::resolve(cone(3, &[&[1, 0, 0], &[0, 1, 0], &[1, 0, 1], &[0, 1, 1]]), true).unwrap()
    }

    fn threefold() -> ResolvedCone {
        ResolvedCone::resolve(cone(3, &[&[1, 0, 0], &[0, 1, 0], &[0, 1, 2]]), true).unwrap()
    }

    fn dims(c: &FiniteComplex) -> Vec<usize> {
        c.terms().iter().map(|t| t.dimension).collect()
    }

    #[test]
    fn a1_supports() {
        let rc = a1();
        let s = degree_support(&rc, ComplexKind::Ishida, 2, &v(&[0, 0])).unwrap();
        assert_eq!(s.present, vec![vec![vec![]], vec![vec![0], vec![1]], vec![vec![0, 1]]]);
        let s = degree_support(&rc, ComplexKind::Residue, 2, &v(&[0, 0])).unwrap();
        assert_eq!(s.present, vec![vec![vec![]], vec![vec![0], vec![1]], vec![]]);
        let s = degree_support(&rc, ComplexKind::Kernel, 2, &v(&[0, 0])).unwrap();
        assert_eq!(s.present, vec![vec![], vec![], vec![vec![0, 1]]]);
        let s = degree_support(&rc, ComplexKind::Ishida, 2, &v(&[2, -1])).unwrap();
        assert_eq!(s.vanishing, vec![1]);
        assert_eq!(s.present, vec![vec![vec![]], vec![vec![1]]]);
        for kind in [ComplexKind::Ishida, ComplexKind::Residue] {
            let s = degree_support(&rc, kind, 2, &v(&[1, 1])).unwrap();
            assert_eq!(s.present, vec![vec![Vec::<usize>::new()]]);
        }
        let s = degree_support(&rc, ComplexKind::Kernel, 2, &v(&[1, 1])).unwrap();
        assert!(s.present.iter().all(Vec::is_empty));
        assert_eq!(
            degree_support(&rc, ComplexKind::Ishida, 2, &v(&[-1, 0])),
            Err(ToricError::DegreeOutsideDualCone { u: v(&[-1, 0]) })
        );
    }

    #[test]
    fn a1_complexes() {
        let rc = a1();
        let k = assemble_degree_complex(&rc, ComplexKind::Kernel, 2, &v(&[0, 0])).unwrap();
        assert_eq!(dims(&k), vec![0, 0, 1]);
        assert_eq!(k.cohomology_dims(), BTreeMap::from([(2, 1)]));

        let s = assemble_degree_complex(&rc, ComplexKind::Ishida, 2, &v(&[2, -1])).unwrap();
        assert_eq!(dims(&s), vec![1, 1]);
        assert!(s.cohomology_dims().is_empty());
        // e1∧e2 = e1 ∧ (-(2,-1)) + 0 and L_2 has basis (-2, 1)
        assert_eq!(s.differentials()[0][(0, 0)], Rat::from_integer(1.into()));

        let r = assemble_degree_complex(&rc, ComplexKind::Residue, 2, &v(&[0, 0])).unwrap();
        assert_eq!(dims(&r), vec![1, 2, 0]);
        assert_eq!(crate::linalg::rank(&r.differentials()[0]), 1);
        assert_eq!(r.cohomology_dims(), BTreeMap::from([(1, 1)]));
    }

    #[test]
    fn a1_tables() {
        let rc = a1();
        let t = graded_cohomology(&rc, ComplexKind::Residue, 1, 6).unwrap();
        assert!(t.totals.keys().all(|&i| i == 0));
        let t = graded_cohomology(&rc, ComplexKind::Residue, 2, 6).unwrap();
        assert_eq!(t.total(1), 1);
        assert_eq!(t.get(&v(&[0, 0]), 1), 1);
        assert!(t.totals.keys().all(|&i| i <= 1));
        let t = graded_cohomology(&rc, ComplexKind::Ishida, 2, 6).unwrap();
        assert!(t.totals.keys().all(|&i| i == 0));
    }

    #[test]
    fn p1_examples() {
        let rc = quadric();
        let t = p1_higher_image(&rc, 3).unwrap();
        assert_eq!(t.get(&v(&[0, 0, 0]), 1), 1);
        assert_eq!(t.get(&v(&[0, 0, 1]), 1), 0);
        assert_eq!(rc.sigma().vanishing_rays(&v(&[0, 0, 1])), vec![0, 1]);
        assert_eq!(t.entries.len(), 1);
        let assembled = graded_cohomology(&rc, ComplexKind::LogDifferentialP1, 1, 3).unwrap();
        assert_eq!(assembled.entries, t.entries);
        for rc in [a1(), threefold()] {
            assert!(p1_higher_image(&rc, 4).unwrap().entries.is_empty());
        }
        assert_eq!(
            graded_cohomology(&rc, ComplexKind::Residue, 2, 1),
            Err(ToricError::UnsupportedNonSimplicial { kind: ComplexKind::Residue })
        );
        assert!(matches!(
            graded_cohomology(&rc, ComplexKind::LogDifferentialP1, 2, 1),
            Err(ToricError::UnsupportedP { .. })
        ));
    }

    #[test]
    fn witnesses() {
        assert_eq!(nonvanishing_witness(&a1(), 2).unwrap(), (vec![0, 1], v(&[0, 0])));
        assert_eq!(nonvanishing_witness(&a1(), 1), Err(ToricError::PBelowC { p: 1, c: 2 }));
        assert_eq!(nonvanishing_witness(&threefold(), 2).unwrap(), (vec![1, 2], v(&[1, 0, 0])));
        let smooth = ResolvedCone::resolve(cone(2, &[&[1, 0], &[0, 1]]), true).unwrap();
        assert_eq!(nonvanishing_witness(&smooth, 2), Err(ToricError::NoSingularLocus));
    }

    #[test]
    fn crosschecks() {
        let r = kp_crosscheck(&a1(), 2, 6).unwrap();
        assert_eq!(r.nonzero, vec![(v(&[0, 0]), 1, 1)]);
        assert!(kp_crosscheck(&a1(), 1, 6).unwrap().nonzero.is_empty());
        let smooth = ResolvedCone::resolve(cone(2, &[&[1, 0], &[0, 1]]), true).unwrap();
        for p in 0..=2 {
            assert!(kp_crosscheck(&smooth, p, 4).unwrap().nonzero.is_empty());
        }
        kp_crosscheck(&threefold(), 2, 3).unwrap();
        kp_crosscheck(&threefold(), 3, 3).unwrap();
    }

    #[test]
    fn p_zero_convention() {
        let rc = a1();
        for kind in [ComplexKind::Ishida, ComplexKind::Residue] {
            let t = graded_cohomology(&rc, kind, 0, 3).unwrap();
            assert_eq!(t.total(0), t.degree_count);
            assert_eq!(t.totals.len(), 1);
        }
        assert!(graded_cohomology(&rc, ComplexKind::Kernel, 0, 3).unwrap().entries.is_empty());
    }

    #[test]
    fn non_simplicial_experimental_mode() {
        let rc = quadric();
        assert!(matches!(
            assemble_degree_complex(&rc, ComplexKind::Ishida, 2, &v(&[0, 0, 0])),
            Err(ToricError::UnsupportedNonSimplicial { .. })
        ));
        let (c, _) = assemble_experimental_ishida(&rc, 2, &v(&[0, 0, 0])).unwrap();
        assert_eq!(c.terms()[0].dimension, 3);
        experimental_ishida_cohomology(&rc, 2, 2).unwrap();
    }

    /// `ι_v(x_1 ∧ … ∧ x_r) = Σ (-1)^{l} ⟨x_l, v⟩ x_1 ∧ … x̂_l … ∧ x_r`.
    fn contract(vectors: &[Vec<Rat>], v: &[Int], n: usize) -> Vec<Rat> {
        let r = vectors.len();
        let mut out = vec![Rat::zero(); binomial(n, r - 1)];
        for l in 0..r {
            let rest: Vec<Vec<Rat>> = (0..r).filter(|&t| t != l).map(|t| vectors[t].clone()).collect();
            let coeff = pair(&vectors[l], v) * Rat::from_integer(if l % 2 == 0 { 1.into() } else { (-1).into() });
            for (o, x) in out.iter_mut().zip(wedge(&rest, n)) {
                *o += &coeff * x;
            }
        }
        out
    }

    fn small_vec(n: usize) -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(-3i64..=3, n)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// The block map is contraction with `v_i`, independently of `w`.
        #[test]
        fn block_map_is_contraction(
            rays in proptest::collection::vec(small_vec(4), 1..=3),
            extra in small_vec(4),
            r in 1usize..=3,
        ) {
            let n = 4;
            let (j, vi) = rays.split_at(rays.len() - 1);
            let vi = v(&vi[0]);
            let jv: Vec<Lattice> = j.iter().map(|x| v(x)).collect();
            let mut all: Vec<&Lattice> = jv.iter().collect();
            prop_assume!(int_rank(&all, n) == jv.len());
            all.push(&vi);
            prop_assume!(int_rank(&all, n) == jv.len() + 1);
            let b = perp_basis(&jv.iter().collect::<Vec<_>>(), n);
            prop_assume!(r <= b.len());
            let c = perp_basis(&all, n);
            let w1 = canonical_w(&b, &vi).unwrap();
            // a second choice: w1 plus an element of L_{J ∪ i}
            let shift = c.iter().zip(&extra).fold(vec![Rat::zero(); n], |acc, (ci, &e)| {
                acc.iter().zip(ci).map(|(a, x)| a + x * Rat::from_integer(e.into())).collect()
            });
            let w2: Vec<Rat> = w1.iter().zip(&shift).map(|(a, s)| a + s).collect();
            let m1 = block_map_with(&b, &c, &w1, r, n);
            let m2 = block_map_with(&b, &c, &w2, r, n);
            prop_assert_eq!(&m1, &m2);
            let target = wedge_basis(&c, n, r - 1);
            for (col, s) in subsets(b.len(), r).iter().enumerate() {
                let vs: Vec<Vec<Rat>> = s.iter().map(|&t| b[t].clone()).collect();
                let expected = contract(&vs, &vi, n);
                let got = target.mul_vec(&m1.col(col));
                prop_assert_eq!(got, expected);
            }
        }

        /// Ishida pieces of simplicial cones match the Koszul model and are
        /// exact above degree 0.
        #[test]
        fn ishida_matches_koszul(
            rows in proptest::collection::vec(small_vec(3), 3),
            p in 1usize..=3,
            bound in 0u64..=2,
        ) {
            let rays: Vec<Lattice> = rows.iter().map(|r| v(r)).collect();
            prop_assume!(rays.iter().all(|r| crate::linalg::content(r) == Int::from(1)));
            let sigma = Cone::new(3, rays);
            prop_assume!(sigma.as_ref().is_ok_and(|s| s.is_full_dimensional()));
            let sigma = sigma.unwrap();
            let m = crate::polyhedra::multiplicity_of(&sigma.rays().iter().collect::<Vec<_>>(), 3).unwrap();
            prop_assume!(m <= Int::from(8));
            let rc = ResolvedCone::resolve(sigma, false).unwrap();
            for u in rc.sigma().enumerate_degrees(bound).unwrap() {
                let s = assemble_degree_complex(&rc, ComplexKind::Ishida, p, &u).unwrap();
                let k0 = rc.sigma().vanishing_rays(&u).len();
                let model = build_koszul_quotient(KoszulSpec::new(3, k0, p).unwrap()).unwrap();
                let model_dims: Vec<usize> = model.terms().iter().map(|t| t.dimension).collect();
                let got = dims(&s);
                prop_assert_eq!(&got[..], &model_dims[..got.len()]);
                prop_assert!(model_dims[got.len()..].iter().all(|&d| d == 0));
                let shifted: BTreeMap<i64, usize> =
                    model.cohomology_dims().into_iter().map(|(d, h)| (d + p as i64, h)).collect();
                prop_assert_eq!(s.cohomology_dims(), shifted.clone());
                prop_assert!(shifted.keys().all(|&d| d == 0));
            }
            kp_crosscheck(&rc, p, bound).unwrap();
            let p1 = p1_higher_image(&rc, bound).unwrap();
            let res = graded_cohomology(&rc, ComplexKind::Residue, 1, bound).unwrap();
            let positive: BTreeMap<Lattice, BTreeMap<usize, usize>> = res
                .entries
                .into_iter()
                .map(|(u, h)| (u, h.into_iter().filter(|(i, _)| *i > 0).collect::<BTreeMap<_, _>>()))
                .filter(|(_, h)| !h.is_empty())
                .collect();
            prop_assert_eq!(p1.entries, positive);
        }
    }
}
