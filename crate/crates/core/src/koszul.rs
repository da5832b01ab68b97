//! Finite cochain complexes of `ℚ`-vector spaces and the quotient complexes
//! `C_{n,k,p}` of the graded Koszul complex.
//!
//! `C_{n,k,p}` lives in degrees `-p..=0`. Its term in degree `-p+m` is
//! `⊕_{J ⊆ {1..k}, |J| = m} ∧^{p-m} L_J ⊗ ē_J` where `L_J` is spanned by the
//! `e_i` with `i ∉ J`, and the differential removes a wedge factor `e_i`
//! with `i ≤ k` and records it as a tensor leg `ē_i`.

use std::collections::{BTreeMap, HashMap};

use num_traits::One;
use rayon::prelude::*;
use thiserror::Error;

use crate::exterior::{binomial, subsets};
use crate::linalg::rank;
use crate::{Rat, RatMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("differential {index} has shape {got:?}, expected {expected:?}")]
    ShapeMismatch { index: usize, expected: (usize, usize), got: (usize, usize) },
    #[error("expected {expected} differentials, got {got}")]
    WrongDifferentialCount { expected: usize, got: usize },
    #[error("d∘d is nonzero starting at degree {degree}")]
    NotAComplex { degree: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KoszulError {
    #[error("invalid Koszul data (n, k, p) = ({n}, {k}, {p}); need 0 <= k <= n and 0 < p <= n")]
    InvalidSpec { n: usize, k: usize, p: usize },
    #[error("complex C_(n,k,p) for {spec:?} has H^{degree} of dimension {dimension}")]
    LemmaViolation { spec: KoszulSpec, degree: i64, dimension: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub dimension: usize,
    pub basis_labels: Vec<String>,
}

/// Terms in degrees `lowest_degree ..`; `differentials[m]` maps term `m` to
/// term `m + 1` (rows index the target).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteComplex {
    lowest_degree: i64,
    terms: Vec<Term>,
    differentials: Vec<RatMatrix>,
}

impl FiniteComplex {
    pub fn new(lowest_degree: i64, terms: Vec<Term>, differentials: Vec<RatMatrix>) -> Result<Self, ComplexError> {
        let expected = terms.len().saturating_sub(1);
        if differentials.len() != expected {
            return Err(ComplexError::WrongDifferentialCount { expected, got: differentials.len() });
        }
        for (i, d) in differentials.iter().enumerate() {
            let want = (terms[i + 1].dimension, terms[i].dimension);
            if (d.rows(), d.cols()) != want {
                return Err(ComplexError::ShapeMismatch { index: i, expected: want, got: (d.rows(), d.cols()) });
            }
        }
        for i in 1..differentials.len() {
            if !differentials[i].mul(&differentials[i - 1]).is_zero() {
                return Err(ComplexError::NotAComplex { degree: lowest_degree + i as i64 - 1 });
            }
        }
        Ok(FiniteComplex { lowest_degree, terms, differentials })
    }

    pub fn zero() -> Self {
        FiniteComplex { lowest_degree: 0, terms: Vec::new(), differentials: Vec::new() }
    }

    pub fn lowest_degree(&self) -> i64 {
        self.lowest_degree
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn differentials(&self) -> &[RatMatrix] {
        &self.differentials
    }

    /// `(degree, dimension)` for every term.
    pub fn term_dims(&self) -> Vec<(i64, usize)> {
        self.terms.iter().enumerate().map(|(i, t)| (self.lowest_degree + i as i64, t.dimension)).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.term_dims().into_iter().map(|(d, dim)| if d.rem_euclid(2) == 0 { dim as i64 } else { -(dim as i64) }).sum()
    }

    /// Nonzero cohomology dimensions by degree.
    pub fn cohomology_dims(&self) -> BTreeMap<i64, usize> {
        let ranks: Vec<usize> = self.differentials.iter().map(rank).collect();
        let mut out = BTreeMap::new();
        for (i, t) in self.terms.iter().enumerate() {
            let outgoing = ranks.get(i).copied().unwrap_or(0);
            let incoming = if i == 0 { 0 } else { ranks[i - 1] };
            let h = t.dimension - outgoing - incoming;
            if h > 0 {
                out.insert(self.lowest_degree + i as i64, h);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KoszulSpec {
    pub n: usize,
    pub k: usize,
    pub p: usize,
}

impl KoszulSpec {
    pub fn new(n: usize, k: usize, p: usize) -> Result<Self, KoszulError> {
        if k > n || p == 0 || p > n {
            return Err(KoszulError::InvalidSpec { n, k, p });
        }
        Ok(KoszulSpec { n, k, p })
    }

    /// `C(k,m)·C(n-m,p-m)`.
    pub fn term_dimension(&self, m: usize) -> usize {
        if m > self.p {
            return 0;
        }
        binomial(self.k, m) * binomial(self.n - m, self.p - m)
    }
}

fn label(wedge: &[usize], legs: &[usize]) -> String {
    let w = if wedge.is_empty() {
        "1".to_string()
    } else {
        wedge.iter().map(|i| format!("e{}", i + 1)).collect::<Vec<_>>().join("∧")
    };
    let mut s = w;
    for j in legs {
        s.push_str(&format!("⊗ē{}", j + 1));
    }
    s
}

/// `(J, I)`: outer and inner index sets of a basis vector.
type Label = (Vec<usize>, Vec<usize>);

/// Builds `C_{n,k,p}` with basis `e_I ⊗ ē_J`, `J` outer and `I` inner, both
/// in lexicographic order.
pub fn build_koszul_quotient(spec: KoszulSpec) -> Result<FiniteComplex, KoszulError> {
    let KoszulSpec { n, k, p } = KoszulSpec::new(spec.n, spec.k, spec.p)?;
    let mut bases: Vec<Vec<Label>> = Vec::with_capacity(p + 1);
    for m in 0..=p {
        let mut basis = Vec::new();
        for j in subsets(k, m) {
            let rest: Vec<usize> = (0..n).filter(|i| !j.contains(i)).collect();
            for local in subsets(rest.len(), p - m) {
                basis.push((j.clone(), local.iter().map(|&t| rest[t]).collect()));
            }
        }
        bases.push(basis);
    }
    let index: Vec<HashMap<&Label, usize>> =
        bases.iter().map(|b| b.iter().enumerate().map(|(i, x)| (x, i)).collect()).collect();
    let mut differentials = Vec::with_capacity(p);
    for m in 0..p {
        let mut d = RatMatrix::zeros(bases[m + 1].len(), bases[m].len());
        for (col, (j, i)) in bases[m].iter().enumerate() {
            for (l, &il) in i.iter().enumerate() {
                if il >= k {
                    continue;
                }
                let mut j2 = j.clone();
                j2.push(il);
                j2.sort_unstable();
                let i2: Vec<usize> = i.iter().copied().filter(|&x| x != il).collect();
                let row = index[m + 1][&(j2, i2)];
                d[(row, col)] = if l % 2 == 0 { Rat::one() } else { -Rat::one() };
            }
        }
        differentials.push(d);
    }
    let terms = bases
        .iter()
        .map(|b| Term { dimension: b.len(), basis_labels: b.iter().map(|(j, i)| label(i, j)).collect() })
        .collect();
    Ok(FiniteComplex::new(-(p as i64), terms, differentials)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepEntry {
    pub spec: KoszulSpec,
    pub term_dims: Vec<usize>,
    /// `dim H^{-p}`; every other cohomology group vanishes.
    pub bottom_dimension: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KoszulSweep {
    pub n_max: usize,
    pub entries: Vec<SweepEntry>,
}

/// Every `(n, k, p)` with `1 <= n <= n_max`, `0 <= k <= n`, `0 < p <= n`, in
/// that lexicographic order.
pub fn sweep_specs(n_max: usize) -> Vec<KoszulSpec> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for k in 0..=n {
            for p in 1..=n {
                out.push(KoszulSpec { n, k, p });
            }
        }
    }
    out
}

/// Checks that each `C_{n,k,p}` is exact away from degree `-p`.
pub fn koszul_sweep(n_max: usize) -> Result<KoszulSweep, KoszulError> {
    if n_max == 0 {
        return Err(KoszulError::InvalidSpec { n: 0, k: 0, p: 0 });
    }
    let entries: Vec<Result<SweepEntry, KoszulError>> = sweep_specs(n_max)
        .into_par_iter()
        .map(|spec| {
            let c = build_koszul_quotient(spec)?;
            let h = c.cohomology_dims();
            if let Some((&degree, &dimension)) = h.iter().find(|(&d, _)| d != -(spec.p as i64)) {
                return Err(KoszulError::LemmaViolation { spec, degree, dimension });
            }
            Ok(SweepEntry {
                spec,
                term_dims: c.terms().iter().map(|t| t.dimension).collect(),
                bottom_dimension: h.get(&-(spec.p as i64)).copied().unwrap_or(0),
            })
        })
        .collect();
    Ok(KoszulSweep { n_max, entries: entries.into_iter().collect::<Result<_, _>>()? })
}
