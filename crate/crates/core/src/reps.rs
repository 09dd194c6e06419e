//! Characters of `M = {±1}^n` and `A`, the Weyl group `S_n`, exterior
//! powers realized as compound matrices, and the lowest `K`-types of the
//! principal series.
//!
//! Subsets of `{0, .., n-1}` index the wedge basis `e_S`; they are always
//! enumerated lexicographically on sorted tuples, which fixes every matrix
//! entry of the `O(n)` action.

use std::fmt;

use crate::linalg::{require_orthogonal, SquareMatrix, Tolerances};
use crate::{Error, Result};

/// A character of `M = {±1}^n`: `delta(m) = prod_i m_i^{eps_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MCharacter {
    eps: Vec<u8>,
}

impl MCharacter {
    pub fn new(eps: Vec<u8>) -> Result<Self> {
        if eps.is_empty() {
            return Err(Error::InvalidArgument("character of M needs n >= 1".into()));
        }
        if let Some(bad) = eps.iter().find(|&&e| e > 1) {
            return Err(Error::InvalidArgument(format!(
                "sign exponents must be 0 or 1, got {bad}"
            )));
        }
        Ok(Self { eps })
    }

    /// `delta_r`: nontrivial exactly on the first `r` slots.
    pub fn normal(r: usize, n: usize) -> Result<Self> {
        if r > n {
            return Err(Error::InvalidDegree { r, n });
        }
        Self::new((0..n).map(|i| u8::from(i < r)).collect())
    }

    /// Indicator character of a subset of slots.
    pub fn indicator(n: usize, subset: &[usize]) -> Self {
        let mut eps = vec![0; n];
        for &i in subset {
            eps[i] = 1;
        }
        Self { eps }
    }

    pub fn n(&self) -> usize {
        self.eps.len()
    }

    pub fn eps(&self) -> &[u8] {
        &self.eps
    }

    /// Number of nontrivial slots, i.e. the `r` of its normal form.
    pub fn weight(&self) -> usize {
        self.eps.iter().filter(|&&e| e == 1).count()
    }

    /// Positions of the nontrivial slots, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.eps[i] == 1).collect()
    }

    /// Value on `m = diag(signs)`.
    pub fn eval(&self, signs: &[i8]) -> i8 {
        self.eps
            .iter()
            .zip(signs)
            .map(|(&e, &s)| if e == 1 { s } else { 1 })
            .product()
    }

    /// Product with another character (sum of exponents mod 2).
    pub fn twist(&self, other: &MCharacter) -> MCharacter {
        MCharacter {
            eps: self
                .eps
                .iter()
                .zip(&other.eps)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }
}

impl fmt::Display for MCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.eps.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A real character of `A`: `nu(a) = prod_i a_i^{exponents_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ACharacter {
    exponents: Vec<f64>,
}

impl ACharacter {
    pub fn new(exponents: Vec<f64>) -> Result<Self> {
        if exponents.is_empty() {
            return Err(Error::InvalidArgument("character of A needs n >= 1".into()));
        }
        if exponents.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "character exponents must be finite reals".into(),
            ));
        }
        Ok(Self { exponents })
    }

    pub fn trivial(n: usize) -> Self {
        Self {
            exponents: vec![0.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn eval(&self, a: &[f64]) -> f64 {
        self.exponents
            .iter()
            .zip(a)
            .map(|(&e, &ai)| ai.powf(e))
            .product()
    }
}

/// A permutation `sigma` of `{0, .., n-1}`, acting on slots by `i -> sigma(i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeylElement {
    perm: Vec<usize>,
}

impl WeylElement {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidArgument(format!(
                    "{perm:?} is not a permutation"
                )));
            }
            seen[p] = true;
        }
        Ok(Self { perm })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
        }
    }

    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(i, j);
        Self { perm }
    }

    /// All of `S_n` in lexicographic order.
    pub fn all(n: usize) -> Vec<WeylElement> {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut out = vec![Self { perm: perm.clone() }];
        // Standard next-permutation walk.
        loop {
            let Some(i) = (1..n).rev().find(|&i| perm[i - 1] < perm[i]) else {
                return out;
            };
            let j = (i..n).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
            perm.swap(i - 1, j);
            perm[i..].reverse();
            out.push(Self { perm: perm.clone() });
        }
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        assert_eq!(self.n(), other.n(), "order mismatch");
        WeylElement {
            perm: other.perm.iter().map(|&i| self.perm[i]).collect(),
        }
    }

    pub fn inverse(&self) -> WeylElement {
        let mut inv = vec![0; self.n()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        WeylElement { perm: inv }
    }

    /// `iota(sigma) = sum_i E_{sigma(i), i}`.
    pub fn matrix(&self) -> SquareMatrix {
        SquareMatrix::permutation(&self.perm)
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.perm.iter().map(|p| (p + 1).to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// `(r, sigma)` with `sigma . delta_r = delta`; `sigma` is increasing on the
/// first `r` slots and on the remaining ones.
pub fn normal_form(delta: &MCharacter) -> (usize, WeylElement) {
    let n = delta.n();
    let ones = delta.support();
    let zeros = (0..n).filter(|&i| delta.eps[i] == 0);
    let r = ones.len();
    let perm: Vec<usize> = ones.iter().copied().chain(zeros).collect();
    (r, WeylElement { perm })
}

/// `(sigma . delta, sigma . nu)`, permuting slots: `eps'_{sigma(i)} = eps_i`.
pub fn weyl_act(
    sigma: &WeylElement,
    delta: &MCharacter,
    nu: &ACharacter,
) -> Result<(MCharacter, ACharacter)> {
    let n = sigma.n();
    for found in [delta.n(), nu.n()] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    let mut eps = vec![0; n];
    let mut exponents = vec![0.0; n];
    for i in 0..n {
        eps[sigma.apply(i)] = delta.eps[i];
        exponents[sigma.apply(i)] = nu.exponents[i];
    }
    Ok((MCharacter { eps }, ACharacter { exponents }))
}

/// All `r`-subsets of `{0, .., n-1}` in lexicographic order.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    if r > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..r).collect();
    loop {
        out.push(current.clone());
        let Some(i) = (0..r).rev().find(|&i| current[i] < n - r + i) else {
            return out;
        };
        current[i] += 1;
        for j in i + 1..r {
            current[j] = current[j - 1] + 1;
        }
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// The `r`-th compound matrix: entry `(S, T)` is the minor on rows `S`,
/// columns `T`. This is the action of `A` on `Λ^r R^n` in the basis `e_S`.
pub fn compound(a: &SquareMatrix, r: usize) -> Result<SquareMatrix> {
    let n = a.n();
    if r > n {
        return Err(Error::InvalidDegree { r, n });
    }
    let basis = subsets(n, r);
    let dim = basis.len();
    let mut data = Vec::with_capacity(dim * dim);
    for s in &basis {
        for t in &basis {
            data.push(a.minor(s, t));
        }
    }
    SquareMatrix::new(dim, data)
}

/// Which lowest `K`-type: `Λ^r` or `det ⊗ Λ^{n-r}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KTypeDescriptor {
    pub n: usize,
    pub r: usize,
    pub twisted: bool,
    pub wedge_degree: usize,
    pub dim: usize,
    /// Basis subset `S` whose vector `e_S` spans the `delta_r`-isotypic line.
    pub iso_subset: Vec<usize>,
}

impl KTypeDescriptor {
    /// Highest weight of the underlying `SO(n)` representation,
    /// `(1, .., 1, 0, .., 0)` with `wedge_degree` ones.
    pub fn highest_weight(&self) -> Result<HighestWeight> {
        let m = self.n / 2;
        HighestWeight::new(
            self.n,
            (0..m).map(|i| i64::from(i < self.wedge_degree)).collect(),
        )
    }

    /// Basis subset spanning the `delta`-isotypic line for any `delta` in the
    /// Weyl orbit of `delta_r`.
    pub fn isotypic_subset(&self, delta: &MCharacter) -> Result<Vec<usize>> {
        if delta.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: delta.n(),
            });
        }
        if delta.weight() != self.r {
            return Err(Error::InvalidArgument(format!(
                "character {delta} is not in the Weyl orbit of delta_{}",
                self.r
            )));
        }
        Ok(if self.twisted {
            (0..self.n).filter(|&i| delta.eps[i] == 0).collect()
        } else {
            delta.support()
        })
    }
}

/// The lowest `K`-type of the principal series induced from `delta_r`.
pub fn lowest_ktype(r: usize, n: usize) -> Result<KTypeDescriptor> {
    if n == 0 || r > n {
        return Err(Error::InvalidDegree { r, n });
    }
    let twisted = r > n / 2;
    let wedge_degree = if twisted { n - r } else { r };
    let iso_subset = if twisted {
        (r..n).collect()
    } else {
        (0..r).collect()
    };
    Ok(KTypeDescriptor {
        n,
        r,
        twisted,
        wedge_degree,
        dim: binomial(n, wedge_degree),
        iso_subset,
    })
}

/// `pi_alpha(k)`: the compound matrix, times `det k` when twisted.
pub fn ktype_operator(
    k: &SquareMatrix,
    desc: &KTypeDescriptor,
    tol: &Tolerances,
) -> Result<SquareMatrix> {
    require_orthogonal(k, tol.ortho_tol)?;
    ktype_operator_unchecked(k, desc)
}

pub(crate) fn ktype_operator_unchecked(
    k: &SquareMatrix,
    desc: &KTypeDescriptor,
) -> Result<SquareMatrix> {
    if k.n() != desc.n {
        return Err(Error::DimensionMismatch {
            expected: desc.n,
            found: k.n(),
        });
    }
    let c = compound(k, desc.wedge_degree)?;
    Ok(if desc.twisted { c.scale(k.det()) } else { c })
}

/// `M`-characters of the wedge basis vectors of the `K`-type, one per basis
/// vector (a multiset, in basis order).
pub fn m_restriction(desc: &KTypeDescriptor) -> Vec<MCharacter> {
    let all_ones = MCharacter {
        eps: vec![1; desc.n],
    };
    subsets(desc.n, desc.wedge_degree)
        .iter()
        .map(|s| {
            let chi = MCharacter::indicator(desc.n, s);
            if desc.twisted {
                chi.twist(&all_ones)
            } else {
                chi
            }
        })
        .collect()
}

/// Highest weight `(b_1, .., b_m)` of an `SO(n)` representation, `m = n / 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HighestWeight {
    n: usize,
    b: Vec<i64>,
}

impl HighestWeight {
    /// Odd `n`: `b_1 >= .. >= b_m >= 0`. Even `n`: `b_1 >= .. >= b_{m-1} >= |b_m|`.
    pub fn new(n: usize, b: Vec<i64>) -> Result<Self> {
        let m = n / 2;
        if n == 0 || b.len() != m {
            return Err(Error::InvalidWeight(format!(
                "n = {n} needs {m} components, got {}",
                b.len()
            )));
        }
        let decreasing = b.windows(2).all(|w| w[0] >= w[1]);
        let ok = if n % 2 == 1 {
            decreasing && b.last().is_none_or(|&v| v >= 0)
        } else if m >= 2 {
            b[..m - 1].windows(2).all(|w| w[0] >= w[1]) && b[m - 2] >= b[m - 1].abs()
        } else {
            true
        };
        if !ok {
            return Err(Error::InvalidWeight(format!(
                "{b:?} is not dominant for n = {n}"
            )));
        }
        Ok(Self { n, b })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[i64] {
        &self.b
    }
}

/// `|lambda| = |lambda + 2 rho_c|` in closed form: with `m = n / 2`,
/// `sqrt(sum_i (2m - 2i + 1 + b_i)^2)` for odd `n` and
/// `sqrt(sum_i (2m - 2i + b_i)^2)` for even `n`.
pub fn ktype_norm(lam: &HighestWeight) -> f64 {
    let m = (lam.n / 2) as i64;
    let shift = i64::from(lam.n % 2 == 1);
    lam.b
        .iter()
        .enumerate()
        .map(|(idx, &bi)| {
            let i = idx as i64 + 1;
            let v = (2 * m - 2 * i + shift + bi) as f64;
            v * v
        })
        .sum::<f64>()
        .sqrt()
}

/// Diagonal entry of `pi_alpha(k)` at basis vector `e_S`: the principal
/// minor on `S`, times `det k` when twisted.
pub(crate) fn isotypic_entry(k: &SquareMatrix, desc: &KTypeDescriptor, subset: &[usize]) -> f64 {
    let minor = k.minor(subset, subset);
    if desc.twisted {
        k.det() * minor
    } else {
        minor
    }
}

/// `Tr(E_{delta_r} pi_alpha(k))`: the leading `r x r` minor of `k` when
/// untwisted, `det k` times the trailing `(n-r) x (n-r)` minor when twisted.
pub fn iso_projection_trace(
    k: &SquareMatrix,
    desc: &KTypeDescriptor,
    tol: &Tolerances,
) -> Result<f64> {
    require_orthogonal(k, tol.ortho_tol)?;
    if k.n() != desc.n {
        return Err(Error::DimensionMismatch {
            expected: desc.n,
            found: k.n(),
        });
    }
    Ok(isotypic_entry(k, desc, &desc.iso_subset))
}
