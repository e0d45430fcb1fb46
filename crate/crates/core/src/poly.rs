//! Sparse multivariate polynomials over F_p.
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`] under graded
//! lexicographic order, so two equal polynomials always have identical term
//! sequences. Multiplication packs exponent vectors into a single `u64` when
//! the product's degree bounds fit, and falls back to full vectors otherwise.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FpScalar, PrimeField};

/// Exponent vector of a term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    /// `(x_0 ... x_{nvars-1})^e`
    pub fn diagonal(nvars: usize, e: u32) -> Self {
        Monomial(vec![e; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn checked_mul(&self, other: &Monomial) -> Result<Monomial> {
        if self.0.len() != other.0.len() {
            return Err(Error::NvarsMismatch(self.0.len(), other.0.len()));
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::ExponentOverflow))
            .collect::<Result<Vec<_>>>()
            .map(Monomial)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self` when `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        Some(Monomial(
            other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect(),
        ))
    }

    pub fn scaled(&self, k: u32) -> Result<Monomial> {
        self.0
            .iter()
            .map(|e| e.checked_mul(k).ok_or(Error::ExponentOverflow))
            .collect::<Result<Vec<_>>>()
            .map(Monomial)
    }

    pub fn permuted(&self, perm: &[usize]) -> Monomial {
        let mut out = vec![0; self.0.len()];
        for (i, &e) in self.0.iter().enumerate() {
            out[perm[i]] = e;
        }
        Monomial(out)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors of total degree `degree` in `nvars` variables, in
/// lexicographically descending order (`x_0^degree` first).
pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
    fn rec(nvars: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if prefix.len() + 1 == nvars {
            prefix.push(left);
            out.push(Monomial(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            rec(nvars, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if degree == 0 {
            out.push(Monomial(Vec::new()));
        }
        return out;
    }
    rec(nvars, degree, &mut Vec::with_capacity(nvars), &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    field: PrimeField,
    nvars: usize,
    terms: BTreeMap<Monomial, u32>,
    homogeneous_degree: Option<u64>,
}

impl MultiPoly {
    pub fn zero(field: PrimeField, nvars: usize) -> Self {
        MultiPoly {
            field,
            nvars,
            terms: BTreeMap::new(),
            homogeneous_degree: None,
        }
    }

    pub fn one(field: PrimeField, nvars: usize) -> Self {
        Self::monomial(field, Monomial::one(nvars), 1)
    }

    pub fn monomial(field: PrimeField, m: Monomial, coeff: u32) -> Self {
        let nvars = m.nvars();
        Self::from_terms(field, nvars, [(m, coeff)])
    }

    /// Builds a polynomial from possibly repeated, unreduced terms.
    pub fn from_terms<I>(field: PrimeField, nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, u32)>,
    {
        let mut map: BTreeMap<Monomial, u32> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial has wrong variable count");
            let c = c % field.modulus();
            let slot = map.entry(m).or_insert(0);
            *slot = field.add(*slot, c);
        }
        map.retain(|_, c| *c != 0);
        Self::from_map(field, nvars, map)
    }

    fn from_map(field: PrimeField, nvars: usize, terms: BTreeMap<Monomial, u32>) -> Self {
        let mut degrees = terms.keys().map(Monomial::degree);
        let homogeneous_degree = match degrees.next() {
            Some(first) if degrees.all(|d| d == first) => Some(first),
            _ => None,
        };
        MultiPoly {
            field,
            nvars,
            terms,
            homogeneous_degree,
        }
    }

    /// Parses the textual grammar
    /// `term (('+'|'-') term)*` with `term ::= [sign] [integer '*'] factor ('*' factor)*`
    /// and `factor ::= 'x' index ['^' integer]`. Whitespace is ignored.
    pub fn parse(text: &str, p: u64, nvars: usize) -> Result<Self> {
        let field = PrimeField::new(p)?;
        Parser::new(text, field, nvars).parse()
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn modulus(&self) -> u32 {
        self.field.modulus()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common degree of all terms; `None` for the zero polynomial or mixed degrees.
    pub fn homogeneous_degree(&self) -> Option<u64> {
        self.homogeneous_degree
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree.is_some()
    }

    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Terms in ascending graded lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, u32)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, m: &Monomial) -> FpScalar {
        self.field.scalar(self.terms.get(m).copied().unwrap_or(0))
    }

    /// Largest term in lexicographic order (graded lex within one degree).
    pub fn leading_term(&self) -> Option<(&Monomial, u32)> {
        self.terms.iter().next_back().map(|(m, &c)| (m, c))
    }

    fn check_compatible(&self, other: &MultiPoly) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch(self.modulus(), other.modulus()));
        }
        if self.nvars != other.nvars {
            return Err(Error::NvarsMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_compatible(other)?;
        let terms = self
            .terms
            .iter()
            .chain(other.terms.iter())
            .map(|(m, &c)| (m.clone(), c));
        Ok(Self::from_terms(self.field, self.nvars, terms))
    }

    pub fn neg(&self) -> MultiPoly {
        self.scale(self.field.neg(1))
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u32) -> MultiPoly {
        let f = self.field;
        Self::from_terms(
            f,
            self.nvars,
            self.terms.iter().map(|(m, &a)| (m.clone(), f.mul(a, c % f.modulus()))),
        )
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_compatible(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.field, self.nvars));
        }
        let bounds: Vec<u64> = (0..self.nvars)
            .map(|i| self.max_exponent(i) as u64 + other.max_exponent(i) as u64)
            .collect();
        if bounds.iter().any(|&b| b > u32::MAX as u64) {
            return Err(Error::ExponentOverflow);
        }
        match PackedLayout::for_bounds(&bounds) {
            Some(layout) => Ok(self.mul_packed(other, &layout)),
            None => Ok(self.mul_wide(other)),
        }
    }

    fn max_exponent(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    fn mul_packed(&self, other: &MultiPoly, layout: &PackedLayout) -> MultiPoly {
        let f = self.field;
        let a: Vec<(u64, u32)> = self.terms.iter().map(|(m, &c)| (layout.pack(m), c)).collect();
        let b: Vec<(u64, u32)> = other.terms.iter().map(|(m, &c)| (layout.pack(m), c)).collect();
        let mut acc: HashMap<u64, u32> = HashMap::with_capacity(a.len() * b.len() / 2 + 1);
        for &(ka, ca) in &a {
            for &(kb, cb) in &b {
                let slot = acc.entry(ka + kb).or_insert(0);
                *slot = f.mul_add(*slot, ca, cb);
            }
        }
        let terms = acc
            .into_iter()
            .filter(|&(_, c)| c != 0)
            .map(|(k, c)| (layout.unpack(k), c))
            .collect();
        Self::from_map(f, self.nvars, terms)
    }

    fn mul_wide(&self, other: &MultiPoly) -> MultiPoly {
        let f = self.field;
        let mut acc: HashMap<Vec<u32>, u32> = HashMap::new();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let key: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(x, y)| x + y).collect();
                let slot = acc.entry(key).or_insert(0);
                *slot = f.mul_add(*slot, ca, cb);
            }
        }
        let terms = acc
            .into_iter()
            .filter(|&(_, c)| c != 0)
            .map(|(k, c)| (Monomial(k), c))
            .collect();
        Self::from_map(f, self.nvars, terms)
    }

    /// Substitutes `x_i -> x_i^k` for every variable. Over F_p with `k` a
    /// power of p this is exactly `f^k`.
    pub fn scale_exponents(&self, k: u32) -> Result<MultiPoly> {
        let terms = self
            .terms
            .iter()
            .map(|(m, &c)| Ok((m.scaled(k)?, c)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(Self::from_map(self.field, self.nvars, terms))
    }

    fn pow_binary(&self, mut e: u64) -> Result<MultiPoly> {
        let mut result = Self::one(self.field, self.nvars);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// `self^e`, computed digit by digit in base p: each digit power is
    /// taken by binary powering and lifted to its place value by exponent
    /// scaling (the Frobenius identity), then the pieces are multiplied.
    pub fn pow(&self, e: u64) -> Result<MultiPoly> {
        let p = self.modulus() as u64;
        let mut result = Self::one(self.field, self.nvars);
        if e == 0 {
            return Ok(result);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.field, self.nvars));
        }
        let mut rest = e;
        let mut place: u64 = 1;
        loop {
            let digit = rest % p;
            if digit > 0 {
                let scale = u32::try_from(place).map_err(|_| Error::ExponentOverflow)?;
                let piece = self.pow_binary(digit)?.scale_exponents(scale)?;
                result = result.mul(&piece)?;
            }
            rest /= p;
            if rest == 0 {
                break;
            }
            place = place.checked_mul(p).ok_or(Error::ExponentOverflow)?;
        }
        Ok(result)
    }

    /// Formal partial derivatives `df/dx_i` for every variable.
    pub fn partials(&self) -> Vec<MultiPoly> {
        let f = self.field;
        (0..self.nvars)
            .map(|i| {
                let terms = self.terms.iter().filter(|(m, _)| m.0[i] > 0).map(|(m, &c)| {
                    let mut e = m.0.clone();
                    let k = f.reduce_u64(e[i] as u64);
                    e[i] -= 1;
                    (Monomial(e), f.mul(c, k))
                });
                Self::from_terms(f, self.nvars, terms)
            })
            .collect()
    }

    /// Renames variable `x_i` to `x_{perm[i]}`.
    pub fn permute_vars(&self, perm: &[usize]) -> MultiPoly {
        assert_eq!(perm.len(), self.nvars);
        Self::from_terms(
            self.field,
            self.nvars,
            self.terms.iter().map(|(m, &c)| (m.permuted(perm), c)),
        )
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, &c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let mut factors = Vec::new();
            for (v, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("x{v}")),
                    _ => factors.push(format!("x{v}^{e}")),
                }
            }
            if factors.is_empty() {
                // constant term: the grammar needs a factor, use x0^0
                factors.push("x0^0".to_string());
            }
            if c != 1 {
                write!(f, "{c}*")?;
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

struct PackedLayout {
    shifts: Vec<u32>,
    masks: Vec<u64>,
}

impl PackedLayout {
    fn for_bounds(bounds: &[u64]) -> Option<Self> {
        let mut shifts = Vec::with_capacity(bounds.len());
        let mut masks = Vec::with_capacity(bounds.len());
        let mut used = 0u32;
        for &b in bounds {
            let width = (64 - b.leading_zeros()).max(1);
            if used + width > 64 {
                return None;
            }
            shifts.push(used);
            masks.push(if width == 64 { u64::MAX } else { (1u64 << width) - 1 });
            used += width;
        }
        Some(PackedLayout { shifts, masks })
    }

    fn pack(&self, m: &Monomial) -> u64 {
        m.0.iter()
            .zip(&self.shifts)
            .fold(0u64, |acc, (&e, &s)| acc | ((e as u64) << s))
    }

    fn unpack(&self, key: u64) -> Monomial {
        Monomial(
            self.shifts
                .iter()
                .zip(&self.masks)
                .map(|(&s, &mask)| ((key >> s) & mask) as u32)
                .collect(),
        )
    }
}

struct Parser {
    // non-whitespace bytes with their offsets in the original text
    chars: Vec<(usize, u8)>,
    idx: usize,
    end: usize,
    field: PrimeField,
    nvars: usize,
}

impl Parser {
    fn new(text: &str, field: PrimeField, nvars: usize) -> Self {
        let chars: Vec<(usize, u8)> = text
            .bytes()
            .enumerate()
            .filter(|(_, b)| !b.is_ascii_whitespace())
            .collect();
        Parser {
            chars,
            idx: 0,
            end: text.len(),
            field,
            nvars,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.chars.get(self.idx).map(|&(_, b)| b)
    }

    fn pos(&self) -> usize {
        self.chars.get(self.idx).map_or(self.end, |&(p, _)| p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn parse(mut self) -> Result<MultiPoly> {
        let mut terms = Vec::new();
        terms.push(self.term(false)?);
        while let Some(b) = self.peek() {
            let negate = match b {
                b'+' => false,
                b'-' => true,
                _ => return self.err(format!("expected '+' or '-', found '{}'", b as char)),
            };
            self.idx += 1;
            terms.push(self.term(negate)?);
        }
        Ok(MultiPoly::from_terms(self.field, self.nvars, terms))
    }

    fn term(&mut self, mut negate: bool) -> Result<(Monomial, u32)> {
        match self.peek() {
            Some(b'+') => self.idx += 1,
            Some(b'-') => {
                negate = !negate;
                self.idx += 1;
            }
            _ => {}
        }
        let mut coeff = 1 % self.field.modulus();
        if matches!(self.peek(), Some(b) if b.is_ascii_digit()) {
            coeff = self.integer_mod_p();
            if self.peek() != Some(b'*') {
                return self.err("expected '*' after coefficient");
            }
            self.idx += 1;
        }
        let mut exps = vec![0u32; self.nvars];
        self.factor(&mut exps)?;
        while self.peek() == Some(b'*') {
            self.idx += 1;
            self.factor(&mut exps)?;
        }
        if negate {
            coeff = self.field.neg(coeff);
        }
        Ok((Monomial(exps), coeff))
    }

    fn factor(&mut self, exps: &mut [u32]) -> Result<()> {
        if self.peek() != Some(b'x') {
            return self.err("expected variable 'x<index>'");
        }
        self.idx += 1;
        let index = match self.small_integer()? {
            Some(i) => usize::try_from(i).unwrap_or(usize::MAX),
            None => return self.err("expected variable index"),
        };
        if index >= self.nvars {
            return Err(Error::VariableIndex {
                index,
                nvars: self.nvars,
            });
        }
        let mut e: u32 = 1;
        if self.peek() == Some(b'^') {
            self.idx += 1;
            e = match self.small_integer()? {
                Some(v) => u32::try_from(v).map_err(|_| Error::ExponentOverflow)?,
                None => return self.err("expected exponent"),
            };
        }
        exps[index] = exps[index].checked_add(e).ok_or(Error::ExponentOverflow)?;
        Ok(())
    }

    /// Reads decimal digits reduced mod p (arbitrary length).
    fn integer_mod_p(&mut self) -> u32 {
        let f = self.field;
        let mut acc = 0u32;
        while let Some(b) = self.peek().filter(u8::is_ascii_digit) {
            acc = f.reduce_u64(acc as u64 * 10 + (b - b'0') as u64);
            self.idx += 1;
        }
        acc
    }

    /// Reads decimal digits into a u64; overflow is a syntax error.
    fn small_integer(&mut self) -> Result<Option<u64>> {
        let mut acc: Option<u64> = None;
        while let Some(b) = self.peek().filter(u8::is_ascii_digit) {
            let v = acc
                .unwrap_or(0)
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as u64));
            match v {
                Some(v) => acc = Some(v),
                None => return self.err("integer too large"),
            }
            self.idx += 1;
        }
        Ok(acc)
    }
}
