//! Graded cohomology of line bundles on a hypersurface `X = V(f)` in `P^n`,
//! the maps Frobenius induces on it, and the dimension tables of `B^1_X(s)`.
//!
//! Two concrete models are used throughout:
//!
//! * `H^0(X, O_X(s))` is the degree-`s` part of `S/(f)`. A basis is given by
//!   the standard monomials: those not divisible by the lex-leading monomial
//!   of `f` (a principal ideal is its own Gröbner basis).
//! * `H^{n-1}(X, O_X(m))` is the kernel of multiplication by `f` from
//!   `H^n(P^n, O(m-d))` to `H^n(P^n, O(m))`, where `H^n(P^n, O(j))` has the
//!   inverse monomials `x^a` (all `a_i <= -1`, `sum a_i = j`) as basis.
//!
//! Inverse monomials are stored through their dual exponent `c = -a - 1`,
//! which is a non-negative exponent vector of degree `-j - n - 1`. In these
//! coordinates multiplication by `x^b` sends `c` to `c - b` (dropped unless
//! `b <= c`) and the Frobenius lift `x^a -> x^{pa}` sends `c` to `pc + p - 1`.
//!
//! The Frobenius map on top cohomology is `[x^a] -> [f^{p-1} x^{pa}]`. With
//! the inverse monomials ordered lexicographically ascending in `a`, the
//! reduced-echelon kernel basis of `·f` has its free columns exactly at the
//! duals of standard monomials; target coordinates are therefore read off
//! at those positions without eliminating the (large) target matrix.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::{Echelon, FpMatrix};
use crate::poly::{monomials_of_degree, Monomial, MultiPoly};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CanonicalClass {
    Fano,
    CalabiYau,
    GeneralType,
}

/// A hypersurface `X = V(f)` in `P^n` over F_p.
#[derive(Debug, Clone)]
pub struct HypersurfaceDatum {
    f: MultiPoly,
    n: usize,
    d: u32,
    frob_power: OnceLock<MultiPoly>,
}

impl HypersurfaceDatum {
    /// `f` must be a nonzero homogeneous form in at least three variables.
    pub fn new(f: MultiPoly) -> Result<Self> {
        if f.nvars() < 3 {
            return Err(Error::Precondition(format!(
                "need a hypersurface in P^n with n >= 2, got {} variables",
                f.nvars()
            )));
        }
        if f.is_zero() {
            return Err(Error::Precondition("defining form is zero".into()));
        }
        let d = f.homogeneous_degree().ok_or_else(|| {
            Error::Precondition("defining form is not homogeneous".into())
        })?;
        if d == 0 {
            return Err(Error::Precondition("defining form is constant".into()));
        }
        let d = u32::try_from(d).map_err(|_| Error::ExponentOverflow)?;
        Ok(HypersurfaceDatum {
            n: f.nvars() - 1,
            f,
            d,
            frob_power: OnceLock::new(),
        })
    }

    pub fn parse(text: &str, p: u64, n: usize) -> Result<Self> {
        Self::new(MultiPoly::parse(text, p, n + 1)?)
    }

    pub fn field(&self) -> PrimeField {
        self.f.field()
    }

    pub fn p(&self) -> u32 {
        self.f.modulus()
    }

    /// Ambient projective dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.n + 1
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.n - 1
    }

    pub fn polynomial(&self) -> &MultiPoly {
        &self.f
    }

    /// `d - n - 1`; `omega_X = O_X(d - n - 1)`.
    pub fn canonical_level(&self) -> i64 {
        self.d as i64 - self.n as i64 - 1
    }

    pub fn canonical_class(&self) -> CanonicalClass {
        match self.canonical_level() {
            l if l < 0 => CanonicalClass::Fano,
            0 => CanonicalClass::CalabiYau,
            _ => CanonicalClass::GeneralType,
        }
    }

    /// Arithmetic genus of a plane curve.
    pub fn genus(&self) -> Option<u64> {
        (self.n == 2).then(|| {
            let d = self.d as u64;
            (d - 1) * d.saturating_sub(2) / 2
        })
    }

    /// `f^{p-1}`, computed once.
    pub fn frobenius_power(&self) -> &MultiPoly {
        self.frob_power.get_or_init(|| {
            self.f
                .pow(self.p() as u64 - 1)
                .expect("exponents of f^(p-1) overflow u32")
        })
    }

    pub fn leading_monomial(&self) -> &Monomial {
        self.f.leading_term().expect("nonzero form").0
    }

    pub fn permute_vars(&self, perm: &[usize]) -> Result<Self> {
        Self::new(self.f.permute_vars(perm))
    }

    fn is_standard(&self, m: &Monomial) -> bool {
        !self.leading_monomial().divides(m)
    }
}

/// Generalized binomial coefficient `x(x-1)...(x-k+1)/k!` for any integer `x`.
pub fn binomial(x: i64, k: usize) -> i128 {
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for i in 0..k as i128 {
        num *= x as i128 - i;
        den *= i + 1;
    }
    num / den
}

/// `(h^0, h^n)` of `O(j)` on `P^n`; middle cohomology of `P^n` vanishes.
pub fn h_line_bundle_pn(n: usize, j: i64) -> (u64, u64) {
    let h0 = if j >= 0 { binomial(n as i64 + j, n) as u64 } else { 0 };
    let htop = if j <= -(n as i64 + 1) {
        binomial(-j - 1, n) as u64
    } else {
        0
    };
    (h0, htop)
}

/// `chi(O_X(j))` for a degree-`d` hypersurface in `P^n`, as a polynomial in `j`.
pub fn chi_line_bundle(n: usize, d: u32, j: i64) -> i128 {
    binomial(n as i64 + j, n) - binomial(n as i64 + j - d as i64, n)
}

/// Closed form `h^0(X, O_X(s)) = C(n+s, n) - C(n+s-d, n)`.
pub fn h0_dim(x: &HypersurfaceDatum, s: i64) -> u64 {
    let n = x.n();
    h_line_bundle_pn(n, s).0 - h_line_bundle_pn(n, s - x.degree() as i64).0
}

/// Closed form `h^{n-1}(X, O_X(m)) = h^n(P^n, O(m-d)) - h^n(P^n, O(m))`.
pub fn htop_dim(x: &HypersurfaceDatum, m: i64) -> u64 {
    let n = x.n();
    h_line_bundle_pn(n, m - x.degree() as i64).1 - h_line_bundle_pn(n, m).1
}

/// Standard monomials of degree `degree` (lex descending).
fn standard_monomials(x: &HypersurfaceDatum, degree: i64) -> Vec<Monomial> {
    if degree < 0 {
        return Vec::new();
    }
    monomials_of_degree(x.nvars(), degree as u32)
        .into_iter()
        .filter(|m| x.is_standard(m))
        .collect()
}

/// Reduction of `g` modulo `(f)` by division with respect to the
/// lexicographic leading monomial of `f`. The remainder is supported on
/// standard monomials and is unique.
pub fn reduce_mod_f(x: &HypersurfaceDatum, g: &MultiPoly) -> MultiPoly {
    let field = x.field();
    let (lm, lc) = x.f.leading_term().expect("nonzero form");
    let lc_inv = field.inv(lc);
    let tail: Vec<(&Monomial, u32)> = x.f.terms().filter(|(m, _)| *m != lm).collect();
    let mut work: std::collections::BTreeMap<Monomial, u32> =
        g.terms().map(|(m, c)| (m.clone(), c)).collect();
    let mut remainder = Vec::new();
    while let Some((t, c)) = work.pop_last() {
        match lm.quotient_of(&t) {
            Some(u) => {
                let factor = field.mul(c, lc_inv);
                for (b, cb) in &tail {
                    let key = u.checked_mul(b).expect("exponent overflow");
                    let old = work.get(&key).copied().unwrap_or(0);
                    let updated = field.sub(old, field.mul(factor, *cb));
                    if updated == 0 {
                        work.remove(&key);
                    } else {
                        work.insert(key, updated);
                    }
                }
            }
            None => remainder.push((t, c)),
        }
    }
    MultiPoly::from_terms(field, g.nvars(), remainder)
}

/// Basis of `H^n(P^n, O(j))` by inverse monomials, ordered lexicographically
/// ascending in the (negative) exponents.
#[derive(Debug, Clone)]
pub struct NegMonomialBasis {
    nvars: usize,
    twist: i64,
    duals: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl NegMonomialBasis {
    pub fn new(n: usize, j: i64) -> Self {
        let dual_degree = -j - n as i64 - 1;
        let duals = if dual_degree >= 0 {
            monomials_of_degree(n + 1, dual_degree as u32)
        } else {
            Vec::new()
        };
        let index = duals.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        NegMonomialBasis {
            nvars: n + 1,
            twist: j,
            duals,
            index,
        }
    }

    pub fn twist(&self) -> i64 {
        self.twist
    }

    pub fn len(&self) -> usize {
        self.duals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.duals.is_empty()
    }

    /// The exponent vector `a` (all entries `<= -1`) of the i-th basis element.
    pub fn exponents(&self, i: usize) -> Vec<i64> {
        self.duals[i].exponents().iter().map(|&c| -(c as i64) - 1).collect()
    }

    pub fn dual(&self, i: usize) -> &Monomial {
        &self.duals[i]
    }

    pub fn position(&self, dual: &Monomial) -> Option<usize> {
        self.index.get(dual).copied()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
}

/// Matrix of `·f : H^n(P^n, O(j)) -> H^n(P^n, O(j+d))` in inverse-monomial bases.
pub fn ambient_mult_by_f(x: &HypersurfaceDatum, j: i64) -> FpMatrix {
    let source = NegMonomialBasis::new(x.n(), j);
    let target = NegMonomialBasis::new(x.n(), j + x.degree() as i64);
    let mut m = FpMatrix::zeros(x.field(), target.len(), source.len());
    for (col, c) in source.duals.iter().enumerate() {
        for (b, cb) in x.f.terms() {
            if let Some(t) = b.quotient_of(c) {
                let row = target.position(&t).expect("target dual in basis");
                m.set(row, col, cb);
            }
        }
    }
    m
}

/// `H^{n-1}(X, O_X(m))` as a subspace of `H^n(P^n, O(m-d))`.
#[derive(Debug, Clone)]
pub struct HtopBasis {
    pub twist: i64,
    pub ambient: NegMonomialBasis,
    /// Reduced-echelon kernel vectors in `ambient` coordinates.
    pub vectors: Vec<Vec<u32>>,
    /// Free column of each vector; coordinates of a kernel element are its
    /// entries at these positions.
    pub free_columns: Vec<usize>,
}

impl HtopBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

pub fn htop_kernel_basis(x: &HypersurfaceDatum, m: i64) -> HtopBasis {
    let j = m - x.degree() as i64;
    let ambient = NegMonomialBasis::new(x.n(), j);
    let mult = ambient_mult_by_f(x, j);
    let (vectors, free_columns) = mult.kernel();
    let standard: Vec<usize> = (0..ambient.len())
        .filter(|&i| x.is_standard(ambient.dual(i)))
        .collect();
    assert_eq!(
        free_columns, standard,
        "free columns of the kernel differ from standard positions"
    );
    let serre = h0_quotient_basis(x, x.canonical_level() - m).len();
    assert_eq!(vectors.len(), serre, "Serre duality check failed at twist {m}");
    HtopBasis {
        twist: m,
        ambient,
        vectors,
        free_columns,
    }
}

/// `H^0(X, O_X(s))` with its standard-monomial basis, obtained by
/// eliminating `f · S_{s-d}` inside `S_s`.
#[derive(Debug, Clone)]
pub struct H0Basis {
    pub twist: i64,
    pub monomials: Vec<Monomial>,
    columns: Vec<Monomial>,
    echelon: Option<Echelon>,
}

impl H0Basis {
    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    /// Coordinates of the class of a degree-`s` form, by echelon reduction.
    pub fn coordinates(&self, g: &MultiPoly) -> Vec<u32> {
        let field = g.field();
        let mut v: Vec<u32> = self.columns.iter().map(|m| g.coeff(m).value).collect();
        if let Some(ech) = &self.echelon {
            for (r, &pc) in ech.pivots.iter().enumerate() {
                let factor = v[pc];
                if factor == 0 {
                    continue;
                }
                for (k, slot) in v.iter_mut().enumerate() {
                    *slot = field.sub(*slot, field.mul(factor, ech.matrix.get(r, k)));
                }
            }
        }
        let pos: HashMap<&Monomial, usize> =
            self.columns.iter().enumerate().map(|(i, m)| (m, i)).collect();
        self.monomials.iter().map(|m| v[pos[m]]).collect()
    }
}

pub fn h0_quotient_basis(x: &HypersurfaceDatum, s: i64) -> H0Basis {
    if s < 0 {
        return H0Basis {
            twist: s,
            monomials: Vec::new(),
            columns: Vec::new(),
            echelon: None,
        };
    }
    let columns = monomials_of_degree(x.nvars(), s as u32);
    let lower = s - x.degree() as i64;
    let echelon = (lower >= 0).then(|| {
        let pos: HashMap<&Monomial, usize> =
            columns.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let multipliers = monomials_of_degree(x.nvars(), lower as u32);
        let mut mat = FpMatrix::zeros(x.field(), multipliers.len(), columns.len());
        for (r, u) in multipliers.iter().enumerate() {
            for (b, cb) in x.f.terms() {
                let t = u.checked_mul(b).expect("exponent overflow");
                mat.set(r, pos[&t], cb);
            }
        }
        mat.rref()
    });
    let mut is_pivot = vec![false; columns.len()];
    if let Some(e) = &echelon {
        for &c in &e.pivots {
            is_pivot[c] = true;
        }
    }
    let monomials: Vec<Monomial> = columns
        .iter()
        .zip(&is_pivot)
        .filter(|(_, &p)| !p)
        .map(|(m, _)| m.clone())
        .collect();
    debug_assert!(monomials.iter().all(|m| x.is_standard(m)));
    assert_eq!(monomials.len() as u64, h0_dim(x, s), "h^0 count mismatch at {s}");
    H0Basis {
        twist: s,
        monomials,
        columns,
        echelon,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CohomLevel {
    Zero,
    Top,
}

/// Matrix of the Frobenius-induced map `H^i(O_X(m)) -> H^i(O_X(pm))`.
/// Columns are source basis vectors, rows target coordinates.
#[derive(Debug, Clone)]
pub struct FrobTwistMap {
    pub level: CohomLevel,
    pub source_twist: i64,
    pub target_twist: i64,
    pub matrix: FpMatrix,
}

impl FrobTwistMap {
    pub fn source_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn kernel_dim(&self) -> usize {
        self.source_dim() - self.rank()
    }

    pub fn cokernel_dim(&self) -> usize {
        self.target_dim() - self.rank()
    }
}

/// `g -> g^p` on `H^0(O_X(s)) -> H^0(O_X(ps))`.
pub fn frobenius_h0_map(x: &HypersurfaceDatum, s: i64) -> FrobTwistMap {
    let p = x.p() as i64;
    let field = x.field();
    let source = h0_quotient_basis(x, s);
    let target = standard_monomials(x, p * s);
    let index: HashMap<&Monomial, usize> = target.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut mat = FpMatrix::zeros(field, target.len(), source.len());
    for (col, b) in source.monomials.iter().enumerate() {
        let power = MultiPoly::monomial(field, b.scaled(x.p()).expect("overflow"), 1);
        let reduced = reduce_mod_f(x, &power);
        for (t, c) in reduced.terms() {
            mat.set(index[t], col, c);
        }
    }
    let map = FrobTwistMap {
        level: CohomLevel::Zero,
        source_twist: s,
        target_twist: p * s,
        matrix: mat,
    };
    assert_eq!(map.rank(), map.source_dim(), "Frobenius on H^0 must be injective");
    map
}

/// Image of one ambient vector (given by dual-exponent coefficients) under
/// `[x^a] -> [f^{p-1} x^{pa}]`.
fn frobenius_image(
    x: &HypersurfaceDatum,
    source: &NegMonomialBasis,
    vector: &[u32],
) -> HashMap<Monomial, u32> {
    let field = x.field();
    let p = x.p();
    let fp1 = x.frobenius_power();
    let mut image: HashMap<Monomial, u32> = HashMap::new();
    for (i, &v) in vector.iter().enumerate() {
        if v == 0 {
            continue;
        }
        let lifted: Vec<u32> = source.dual(i).exponents().iter().map(|&c| p * c + p - 1).collect();
        let lifted = Monomial::new(lifted);
        for (b, cb) in fp1.terms() {
            if let Some(t) = b.quotient_of(&lifted) {
                let slot = image.entry(t).or_insert(0);
                *slot = field.mul_add(*slot, v, cb);
            }
        }
    }
    image.retain(|_, c| *c != 0);
    image
}

/// Checks that `f · image = 0` in `H^n(P^n, O(pm))`.
fn image_in_kernel(x: &HypersurfaceDatum, image: &HashMap<Monomial, u32>) -> bool {
    let field = x.field();
    let mut prod: HashMap<Monomial, u32> = HashMap::new();
    for (t, &c) in image {
        for (b, cb) in x.f.terms() {
            if let Some(u) = b.quotient_of(t) {
                let slot = prod.entry(u).or_insert(0);
                *slot = field.mul_add(*slot, c, cb);
            }
        }
    }
    prod.values().all(|&c| c == 0)
}

/// Frobenius on top cohomology, `H^{n-1}(O_X(m)) -> H^{n-1}(O_X(pm))`.
///
/// Column `j` is the image of source basis vector `j`; target coordinates
/// are read at standard dual monomials only.
pub fn frobenius_htop_map(x: &HypersurfaceDatum, m: i64) -> FrobTwistMap {
    let p = x.p() as i64;
    let target_twist = p * m;
    let source = htop_kernel_basis(x, m);
    let target_dim = htop_dim(x, target_twist) as usize;
    if source.is_empty() {
        return FrobTwistMap {
            level: CohomLevel::Top,
            source_twist: m,
            target_twist,
            matrix: FpMatrix::zeros(x.field(), target_dim, 0),
        };
    }
    let target_dual_degree = x.canonical_level() - target_twist;
    let target = standard_monomials(x, target_dual_degree);
    assert_eq!(target.len(), target_dim);
    let index: HashMap<&Monomial, usize> = target.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut mat = FpMatrix::zeros(x.field(), target_dim, source.len());
    for (col, v) in source.vectors.iter().enumerate() {
        let image = frobenius_image(x, &source.ambient, v);
        assert!(
            image_in_kernel(x, &image),
            "Frobenius image leaves the kernel of f at twist {m}"
        );
        for (t, &c) in &image {
            if let Some(&row) = index.get(t) {
                mat.set(row, col, c);
            }
        }
    }
    FrobTwistMap {
        level: CohomLevel::Top,
        source_twist: m,
        target_twist,
        matrix: mat,
    }
}

/// Same map with target coordinates taken from a full kernel computation of
/// `·f` at the target twist. Slow; used to cross-check the fast path.
pub fn frobenius_htop_map_full(x: &HypersurfaceDatum, m: i64) -> FrobTwistMap {
    let p = x.p() as i64;
    let source = htop_kernel_basis(x, m);
    let target = htop_kernel_basis(x, p * m);
    let mut mat = FpMatrix::zeros(x.field(), target.len(), source.len());
    for (col, v) in source.vectors.iter().enumerate() {
        let image = frobenius_image(x, &source.ambient, v);
        for (row, &fc) in target.free_columns.iter().enumerate() {
            let c = image.get(target.ambient.dual(fc)).copied().unwrap_or(0);
            mat.set(row, col, c);
        }
    }
    FrobTwistMap {
        level: CohomLevel::Top,
        source_twist: m,
        target_twist: p * m,
        matrix: mat,
    }
}

/// Hasse–Witt matrix of a plane curve: Frobenius on `H^1(X, O_X)`.
pub fn hasse_witt(x: &HypersurfaceDatum) -> Result<FpMatrix> {
    if x.n() != 2 {
        return Err(Error::Precondition(format!(
            "Hasse-Witt needs a plane curve, got n = {}",
            x.n()
        )));
    }
    let map = frobenius_htop_map(x, 0);
    let g = x.genus().unwrap_or(0) as usize;
    assert_eq!((map.source_dim(), map.target_dim()), (g, g));
    Ok(map.matrix)
}

/// `h^i(X, B^1_X(s))` for `i = 0..=dim X`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct B1Row {
    pub twist: i64,
    pub dims: Vec<u64>,
    /// Kernel and rank of Frobenius on top cohomology at this twist.
    pub frob_kernel: u64,
    pub frob_rank: u64,
}

impl B1Row {
    pub fn euler_characteristic(&self) -> i128 {
        self.dims
            .iter()
            .enumerate()
            .map(|(i, &h)| if i % 2 == 0 { h as i128 } else { -(h as i128) })
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&h| h == 0)
    }
}

/// `chi(B^1_X(s)) = chi(O_X(ps)) - chi(O_X(s))`.
pub fn chi_b1(x: &HypersurfaceDatum, s: i64) -> i128 {
    let p = x.p() as i64;
    chi_line_bundle(x.n(), x.degree(), p * s) - chi_line_bundle(x.n(), x.degree(), s)
}

/// Cohomology of `B^1_X(s)` from the twisted sequence
/// `0 -> O_X(s) -> F_*(O_X(ps)) -> B^1_X(s) -> 0`.
pub fn b1_dims(x: &HypersurfaceDatum, s: i64) -> B1Row {
    let p = x.p() as i64;
    let dim = x.dim();
    let ftop = frobenius_htop_map(x, s);
    let rank = ftop.rank() as u64;
    let kernel = ftop.source_dim() as u64 - rank;
    let mut dims = vec![0u64; dim + 1];
    let h0_gap = h0_dim(x, p * s) - h0_dim(x, s);
    dims[dim] = ftop.target_dim() as u64 - rank;
    if dim == 1 {
        dims[0] = h0_gap + kernel;
    } else {
        dims[0] = h0_gap;
        dims[dim - 1] = kernel;
    }
    let row = B1Row {
        twist: s,
        dims,
        frob_kernel: kernel,
        frob_rank: rank,
    };
    assert_eq!(
        row.euler_characteristic(),
        chi_b1(x, s),
        "Euler characteristic additivity failed at twist {s}"
    );
    row
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct B1Table {
    pub rows: Vec<B1Row>,
}

impl B1Table {
    pub fn compute(x: &HypersurfaceDatum, twists: std::ops::RangeInclusive<i64>) -> Self {
        B1Table {
            rows: twists.map(|s| b1_dims(x, s)).collect(),
        }
    }

    pub fn row(&self, s: i64) -> Option<&B1Row> {
        self.rows.iter().find(|r| r.twist == s)
    }
}

/// Dimensions `h^i(X, F_*(O_X)(m)) = h^i(X, O_X(pm))`, `i = 0..=dim X`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PushforwardDims {
    pub twist: i64,
    pub frobenius_twist: i64,
    pub dims: Vec<u64>,
}

pub fn pushforward_twist_dims(x: &HypersurfaceDatum, m: i64) -> PushforwardDims {
    let pm = x.p() as i64 * m;
    let mut dims = vec![0u64; x.dim() + 1];
    dims[0] = h0_dim(x, pm);
    dims[x.dim()] += htop_dim(x, pm);
    PushforwardDims {
        twist: m,
        frobenius_twist: pm,
        dims,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fermat(p: u64, n: usize, d: u32) -> HypersurfaceDatum {
        let text = (0..=n).map(|i| format!("x{i}^{d}")).collect::<Vec<_>>().join("+");
        HypersurfaceDatum::parse(&text, p, n).unwrap()
    }

    #[test]
    fn line_bundles_on_pn() {
        assert_eq!(h_line_bundle_pn(2, -3), (0, 1));
        assert_eq!(h_line_bundle_pn(3, 0), (1, 0));
        assert_eq!(h_line_bundle_pn(2, 4), (15, 0));
        assert_eq!(h_line_bundle_pn(2, -1), (0, 0));
    }

    #[test]
    fn datum_classification() {
        let k3 = fermat(3, 3, 4);
        assert_eq!(k3.canonical_class(), CanonicalClass::CalabiYau);
        assert_eq!(k3.dim(), 2);
        assert_eq!(fermat(5, 3, 3).canonical_class(), CanonicalClass::Fano);
        assert_eq!(fermat(3, 2, 4).canonical_class(), CanonicalClass::GeneralType);
        assert_eq!(fermat(3, 2, 4).genus(), Some(3));
        assert!(HypersurfaceDatum::parse("x0^2 + x1", 5, 2).is_err());
        assert!(HypersurfaceDatum::parse("x0 - x0", 5, 2).is_err());
        assert!(HypersurfaceDatum::parse("x0^2 + x1^2", 5, 1).is_err());
    }

    #[test]
    fn h0_quotient_examples() {
        assert_eq!(h0_quotient_basis(&fermat(3, 3, 4), 0).len(), 1);
        assert_eq!(h0_quotient_basis(&fermat(7, 2, 3), 3).len(), 9);
        assert!(h0_quotient_basis(&fermat(7, 2, 3), -1).is_empty());
    }

    #[test]
    fn htop_examples() {
        assert_eq!(htop_kernel_basis(&fermat(3, 3, 4), 0).len(), 1);
        assert_eq!(htop_kernel_basis(&fermat(7, 2, 3), 0).len(), 1);
        let quartic = fermat(3, 2, 4);
        assert_eq!(
            htop_kernel_basis(&quartic, 1).len(),
            h0_quotient_basis(&quartic, 0).len()
        );
        assert_eq!(htop_kernel_basis(&quartic, 1).len(), 1);
    }

    #[test]
    fn frobenius_h0_examples() {
        let cubic = fermat(7, 2, 3);
        let id = frobenius_h0_map(&cubic, 0);
        assert_eq!(id.matrix, FpMatrix::identity(cubic.field(), 1));
        let c2 = HypersurfaceDatum::parse("x0^3+x1^3+x2^3", 2, 2).unwrap();
        let m = frobenius_h0_map(&c2, 1);
        assert_eq!((m.target_dim(), m.source_dim()), (6, 3));
        assert_eq!(m.rank(), 3);
        assert_eq!(frobenius_h0_map(&cubic, -2).source_dim(), 0);
    }

    #[test]
    fn frobenius_htop_examples() {
        let k3 = fermat(3, 3, 4);
        let m = frobenius_htop_map(&k3, 0);
        assert_eq!(m.matrix.to_rows(), vec![vec![0]]);
        let cubic = fermat(7, 2, 3);
        assert_eq!(frobenius_htop_map(&cubic, 0).matrix.to_rows(), vec![vec![6]]);
        assert_eq!(frobenius_htop_map(&cubic, 1).source_dim(), 0);
    }

    #[test]
    fn hasse_witt_examples() {
        let c2 = fermat(2, 2, 3);
        assert_eq!(hasse_witt(&c2).unwrap().to_rows(), vec![vec![0]]);
        let legendre = HypersurfaceDatum::parse("x1^2*x2 - x0^3 + 3*x0^2*x2 - 2*x0*x2^2", 3, 2)
            .unwrap();
        assert_eq!(hasse_witt(&legendre).unwrap().to_rows(), vec![vec![0]]);
        assert!(hasse_witt(&fermat(3, 3, 4)).is_err());
    }

    #[test]
    fn b1_examples() {
        let ordinary = fermat(7, 2, 3);
        assert_eq!(b1_dims(&ordinary, 0).dims, vec![0, 0]);
        let k3 = fermat(3, 3, 4);
        assert_eq!(b1_dims(&k3, 0).dims, vec![0, 1, 1]);
        let c2 = fermat(2, 2, 3);
        assert_eq!(b1_dims(&c2, 1).dims, vec![3, 0]);
    }

    #[test]
    fn pushforward_examples() {
        let k3 = fermat(3, 3, 4);
        assert_eq!(pushforward_twist_dims(&k3, 0).dims, vec![1, 0, 1]);
        let quintic = fermat(3, 4, 5);
        let d = pushforward_twist_dims(&quintic, -1);
        assert_eq!(d.dims[3], h0_quotient_basis(&quintic, 3).len() as u64);
        assert_eq!(d.dims[1..3], [0, 0]);
    }

    #[test]
    fn reduction_agrees_with_elimination() {
        let x = HypersurfaceDatum::parse("x0^2*x1 + 2*x1^3 + x0*x2^2 + x2^3", 5, 2).unwrap();
        let basis = h0_quotient_basis(&x, 5);
        for m in monomials_of_degree(3, 5) {
            let g = MultiPoly::monomial(x.field(), m, 1);
            let r = reduce_mod_f(&x, &g);
            let by_division: Vec<u32> = basis.monomials.iter().map(|b| r.coeff(b).value).collect();
            assert_eq!(by_division, basis.coordinates(&g));
        }
    }

    #[test]
    fn fast_target_coordinates_match_full_kernel() {
        let x = HypersurfaceDatum::parse("x0^4 + x1^4 + x2^4 + x0*x1*x2^2 + 2*x0^3*x1", 3, 2)
            .unwrap();
        for m in -2..=1 {
            let fast = frobenius_htop_map(&x, m);
            let full = frobenius_htop_map_full(&x, m);
            assert_eq!(fast.matrix, full.matrix, "twist {m}");
        }
    }

    #[test]
    fn binomial_generalized() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(-1, 2), 1);
        assert_eq!(binomial(-2, 3), -4);
        assert_eq!(binomial(1, 3), 0);
    }
}
