//! Exact arithmetic: the arrow-polynomial ring Z[A^±1, K1, K2, ...], integral
//! group rings of cyclic groups, and linear algebra over Z/n.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("modulus {0} is not prime")]
    NonPrimeModulus(u64),
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("solution count does not fit in 128 bits")]
    Overflow,
    #[error("cannot parse polynomial {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("group ring elements live in different groups")]
    GroupMismatch,
}

/// A monomial in the K variables, stored as sorted `(index, exponent)` pairs
/// with index ≥ 1 and exponent ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct KMonomial(Vec<(u32, u32)>);

impl KMonomial {
    pub fn one() -> KMonomial {
        KMonomial(Vec::new())
    }

    /// `K_i`, with `K_0 = 1`.
    pub fn var(i: u32) -> KMonomial {
        if i == 0 {
            KMonomial::one()
        } else {
            KMonomial(vec![(i, 1)])
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> KMonomial {
        let mut map: BTreeMap<u32, u32> = BTreeMap::new();
        for (i, e) in pairs {
            if i > 0 && e > 0 {
                *map.entry(i).or_default() += e;
            }
        }
        KMonomial(map.into_iter().collect())
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// The k-degree: Σ index · exponent.
    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&(i, e)| i as u64 * e as u64).sum()
    }

    pub fn mul(&self, other: &KMonomial) -> KMonomial {
        KMonomial::from_pairs(self.0.iter().chain(other.0.iter()).copied())
    }
}

/// Element of Z[A^±1, K1, K2, ...]. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ArrowPolynomial {
    terms: BTreeMap<(KMonomial, i32), i64>,
}

impl ArrowPolynomial {
    pub fn zero() -> ArrowPolynomial {
        ArrowPolynomial::default()
    }

    pub fn one() -> ArrowPolynomial {
        ArrowPolynomial::constant(1)
    }

    pub fn constant(c: i64) -> ArrowPolynomial {
        ArrowPolynomial::monomial(c, 0, KMonomial::one())
    }

    /// `A^e`.
    pub fn a_pow(e: i32) -> ArrowPolynomial {
        ArrowPolynomial::monomial(1, e, KMonomial::one())
    }

    /// `K_i`; `K_0` is 1.
    pub fn k(i: u32) -> ArrowPolynomial {
        ArrowPolynomial::monomial(1, 0, KMonomial::var(i))
    }

    pub fn monomial(coeff: i64, a_exp: i32, k: KMonomial) -> ArrowPolynomial {
        let mut p = ArrowPolynomial::zero();
        p.add_term(coeff, a_exp, k);
        p
    }

    /// The loop value d = −A² − A⁻².
    pub fn loop_value() -> ArrowPolynomial {
        ArrowPolynomial::from_a_terms(&[(2, -1), (-2, -1)])
    }

    /// Build a K-free Laurent polynomial from `(exponent, coefficient)` pairs.
    pub fn from_a_terms(terms: &[(i32, i64)]) -> ArrowPolynomial {
        let mut p = ArrowPolynomial::zero();
        for &(e, c) in terms {
            p.add_term(c, e, KMonomial::one());
        }
        p
    }

    pub fn add_term(&mut self, coeff: i64, a_exp: i32, k: KMonomial) {
        if coeff == 0 {
            return;
        }
        let key = (k, a_exp);
        let slot = self.terms.entry(key.clone()).or_insert(0);
        *slot += coeff;
        if *slot == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as `(coefficient, A-exponent, K-monomial)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, i32, &KMonomial)> {
        self.terms.iter().map(|((k, a), c)| (*c, *a, k))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, a_exp: i32, k: &KMonomial) -> i64 {
        self.terms.get(&(k.clone(), a_exp)).copied().unwrap_or(0)
    }

    pub fn is_k_free(&self) -> bool {
        self.terms.keys().all(|(k, _)| k.is_one())
    }

    /// k-degrees of the K-monomials that survive with nonzero coefficient.
    pub fn k_degrees(&self) -> BTreeSet<u64> {
        self.terms.keys().map(|(k, _)| k.degree()).collect()
    }

    pub fn scale(&self, c: i64) -> ArrowPolynomial {
        if c == 0 {
            return ArrowPolynomial::zero();
        }
        ArrowPolynomial { terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    /// Multiply by A^e.
    pub fn shift(&self, e: i32) -> ArrowPolynomial {
        ArrowPolynomial {
            terms: self.terms.iter().map(|((k, a), v)| ((k.clone(), a + e), *v)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> ArrowPolynomial {
        let mut out = ArrowPolynomial::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Substitute A ↦ A⁻¹.
    pub fn invert_a(&self) -> ArrowPolynomial {
        ArrowPolynomial {
            terms: self.terms.iter().map(|((k, a), v)| ((k.clone(), -a), *v)).collect(),
        }
    }

    pub fn to_string_with(&self, var: char) -> String {
        let mut keys: Vec<(&KMonomial, i32, i64)> = self.terms.iter().map(|((k, a), c)| (k, *a, *c)).collect();
        keys.sort_by(|x, y| x.0.cmp(y.0).then(y.1.cmp(&x.1)));
        if keys.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (n, (k, a, c)) in keys.into_iter().enumerate() {
            let body = monomial_text(a, k, var);
            let mag = c.unsigned_abs();
            let term = match (body.is_empty(), mag) {
                (true, _) => mag.to_string(),
                (false, 1) => body,
                (false, _) => format!("{mag}*{body}"),
            };
            match (n, c < 0) {
                (0, false) => out.push_str(&term),
                (0, true) => {
                    out.push('-');
                    out.push_str(&term)
                }
                (_, false) => {
                    out.push_str(" + ");
                    out.push_str(&term)
                }
                (_, true) => {
                    out.push_str(" - ");
                    out.push_str(&term)
                }
            }
        }
        out
    }

    pub fn to_terms(&self) -> Vec<Term> {
        self.terms
            .iter()
            .map(|((k, a), c)| Term { coeff: *c, a_exp: *a, k: k.0.iter().map(|&(i, e)| (i, e)).collect() })
            .collect()
    }
}

fn monomial_text(a: i32, k: &KMonomial, var: char) -> String {
    let mut parts = Vec::new();
    match a {
        0 => {}
        1 => parts.push("A".to_string()),
        _ => parts.push(format!("A^{a}")),
    }
    for &(i, e) in k.pairs() {
        if e == 1 {
            parts.push(format!("{var}{i}"));
        } else {
            parts.push(format!("{var}{i}^{e}"));
        }
    }
    parts.join("*")
}

/// JSON form of one term: `{"coeff": -1, "a_exp": -4, "k": {"1": 1}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: i64,
    pub a_exp: i32,
    pub k: BTreeMap<u32, u32>,
}

impl Serialize for ArrowPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_terms().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ArrowPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<ArrowPolynomial, D::Error> {
        let terms = Vec::<Term>::deserialize(d)?;
        let mut p = ArrowPolynomial::zero();
        for t in terms {
            p.add_term(t.coeff, t.a_exp, KMonomial::from_pairs(t.k));
        }
        Ok(p)
    }
}

impl fmt::Display for ArrowPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with('K'))
    }
}

/// Parses the text form, accepting `K` or `Z` for the state variables,
/// e.g. `A^2 + K1 - A^-4*K1` or `3*A^-2*K1^2 - 1`.
impl FromStr for ArrowPolynomial {
    type Err = AlgebraError;

    fn from_str(text: &str) -> Result<ArrowPolynomial, AlgebraError> {
        let err = |reason: &str| AlgebraError::Parse { text: text.to_string(), reason: reason.to_string() };
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(err("empty input"));
        }
        // Split into signed terms; a '-' right after '^' belongs to an exponent.
        let mut terms: Vec<(i64, String)> = Vec::new();
        let mut sign = 1;
        let mut cur = String::new();
        let mut prev = '\0';
        for ch in compact.chars() {
            if (ch == '+' || ch == '-') && prev != '^' {
                if !cur.is_empty() {
                    terms.push((sign, std::mem::take(&mut cur)));
                } else if prev != '\0' {
                    return Err(err("dangling sign"));
                }
                sign = if ch == '-' { -1 } else { 1 };
            } else {
                cur.push(ch);
            }
            prev = ch;
        }
        if cur.is_empty() {
            return Err(err("trailing sign"));
        }
        terms.push((sign, cur));

        let mut p = ArrowPolynomial::zero();
        for (sign, body) in terms {
            let mut coeff: i64 = sign;
            let mut a_exp = 0;
            let mut k = Vec::new();
            for factor in body.split('*') {
                let (base, exp) = match factor.split_once('^') {
                    Some((b, e)) => (b, e.parse::<i64>().map_err(|_| err("bad exponent"))?),
                    None => (factor, 1),
                };
                if base == "A" {
                    a_exp += i32::try_from(exp).map_err(|_| err("exponent out of range"))?;
                } else if let Some(idx) = base.strip_prefix('K').or_else(|| base.strip_prefix('Z')) {
                    let i: u32 = idx.parse().map_err(|_| err("bad variable index"))?;
                    let e = u32::try_from(exp).map_err(|_| err("negative K exponent"))?;
                    k.push((i, e));
                } else if let Ok(c) = base.parse::<i64>() {
                    if factor.contains('^') {
                        return Err(err("powers of constants are not supported"));
                    }
                    coeff *= c;
                } else {
                    return Err(err("unknown factor"));
                }
            }
            p.add_term(coeff, a_exp, KMonomial::from_pairs(k));
        }
        Ok(p)
    }
}

impl Add for &ArrowPolynomial {
    type Output = ArrowPolynomial;
    fn add(self, rhs: &ArrowPolynomial) -> ArrowPolynomial {
        let mut out = self.clone();
        for ((k, a), c) in &rhs.terms {
            out.add_term(*c, *a, k.clone());
        }
        out
    }
}

impl Sub for &ArrowPolynomial {
    type Output = ArrowPolynomial;
    fn sub(self, rhs: &ArrowPolynomial) -> ArrowPolynomial {
        self + &(-rhs)
    }
}

impl Neg for &ArrowPolynomial {
    type Output = ArrowPolynomial;
    fn neg(self) -> ArrowPolynomial {
        self.scale(-1)
    }
}

impl Mul for &ArrowPolynomial {
    type Output = ArrowPolynomial;
    fn mul(self, rhs: &ArrowPolynomial) -> ArrowPolynomial {
        let mut out = ArrowPolynomial::zero();
        for ((k1, a1), c1) in &self.terms {
            for ((k2, a2), c2) in &rhs.terms {
                out.add_term(c1 * c2, a1 + a2, k1.mul(k2));
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ArrowPolynomial {
            type Output = ArrowPolynomial;
            fn $m(self, rhs: ArrowPolynomial) -> ArrowPolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ArrowPolynomial {
    type Output = ArrowPolynomial;
    fn neg(self) -> ArrowPolynomial {
        -&self
    }
}

pub fn poly_add(p: &ArrowPolynomial, q: &ArrowPolynomial) -> ArrowPolynomial {
    p + q
}

pub fn poly_mul(p: &ArrowPolynomial, q: &ArrowPolynomial) -> ArrowPolynomial {
    p * q
}

pub fn poly_scale(p: &ArrowPolynomial, c: i64) -> ArrowPolynomial {
    p.scale(c)
}

/// (−A)^{−3w} · p.
pub fn normalize(p: &ArrowPolynomial, w: i64) -> ArrowPolynomial {
    let e = -3 * w;
    let sign = if e.rem_euclid(2) == 0 { 1 } else { -1 };
    p.shift(e as i32).scale(sign)
}

/// The cyclic group generated by `u`, either infinite or of order `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CyclicGroup {
    Infinite,
    Finite(u64),
}

impl CyclicGroup {
    /// Canonical exponent of u^e in this group.
    pub fn reduce(self, e: i64) -> i64 {
        match self {
            CyclicGroup::Infinite => e,
            CyclicGroup::Finite(m) => e.rem_euclid(m as i64),
        }
    }
}

/// Element of Z[G] for a cyclic group G = ⟨u⟩.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRingElement {
    pub group: CyclicGroup,
    #[serde(with = "exp_map")]
    terms: BTreeMap<i64, i64>,
}

mod exp_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<i64, i64>, s: S) -> Result<S::Ok, S::Error> {
        m.iter().map(|(e, c)| (*e, *c)).collect::<Vec<(i64, i64)>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<i64, i64>, D::Error> {
        Ok(Vec::<(i64, i64)>::deserialize(d)?.into_iter().filter(|(_, c)| *c != 0).collect())
    }
}

impl GroupRingElement {
    pub fn zero(group: CyclicGroup) -> GroupRingElement {
        GroupRingElement { group, terms: BTreeMap::new() }
    }

    /// c · u^e.
    pub fn term(group: CyclicGroup, c: i64, e: i64) -> GroupRingElement {
        let mut g = GroupRingElement::zero(group);
        g.add_term(c, e);
        g
    }

    pub fn add_term(&mut self, c: i64, e: i64) {
        if c == 0 {
            return;
        }
        let e = self.group.reduce(e);
        let slot = self.terms.entry(e).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.terms.remove(&e);
        }
    }

    /// Coefficient of u^e.
    pub fn coefficient(&self, e: i64) -> i64 {
        self.terms.get(&self.group.reduce(e)).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, *c))
    }

    /// Sum of all coefficients (the augmentation).
    pub fn augmentation(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn add(&self, other: &GroupRingElement) -> Result<GroupRingElement, AlgebraError> {
        if self.group != other.group {
            return Err(AlgebraError::GroupMismatch);
        }
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(c, e);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &GroupRingElement) -> Result<GroupRingElement, AlgebraError> {
        if self.group != other.group {
            return Err(AlgebraError::GroupMismatch);
        }
        let mut out = GroupRingElement::zero(self.group);
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                out.add_term(c1 * c2, e1 + e2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: i64) -> GroupRingElement {
        let mut out = GroupRingElement::zero(self.group);
        for (e, v) in self.terms() {
            out.add_term(v * c, e);
        }
        out
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (e, c)) in self.terms().enumerate() {
            let var = match e {
                0 => String::new(),
                1 => "u".to_string(),
                _ => format!("u^{e}"),
            };
            let mag = c.unsigned_abs();
            let body = match (var.is_empty(), mag) {
                (true, _) => mag.to_string(),
                (false, 1) => var,
                (false, _) => format!("{mag}*{var}"),
            };
            match (n, c < 0) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

/// Dense matrix over Z/n with entries kept in [0, n).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModMatrix {
    rows: usize,
    cols: usize,
    modulus: u64,
    data: Vec<u64>,
}

impl ModMatrix {
    pub fn zeros(rows: usize, cols: usize, modulus: u64) -> ModMatrix {
        ModMatrix { rows, cols, modulus, data: vec![0; rows * cols] }
    }

    pub fn identity(size: usize, modulus: u64) -> ModMatrix {
        let mut m = ModMatrix::zeros(size, size, modulus);
        for i in 0..size {
            m.set(i, i, 1);
        }
        m
    }

    /// Build from integer rows; all rows must have length `cols`.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize, modulus: u64) -> ModMatrix {
        let mut m = ModMatrix::zeros(rows.len(), cols, modulus);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "row {i} has the wrong length");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v.rem_euclid(self.modulus as i64) as u64;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Same integer entries read modulo `m`.
    pub fn with_modulus(&self, m: u64) -> ModMatrix {
        ModMatrix {
            rows: self.rows,
            cols: self.cols,
            modulus: m,
            data: self.data.iter().map(|v| v % m).collect(),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as u64)
}

/// Dimension of the right kernel of `m` over the field Z/p, p the modulus.
pub fn nullity_mod_prime(m: &ModMatrix) -> Result<usize, AlgebraError> {
    let p = m.modulus;
    if !is_prime(p) {
        return Err(AlgebraError::NonPrimeModulus(p));
    }
    let mut a = m.clone();
    let mut rank = 0;
    for col in 0..a.cols {
        let Some(piv) = (rank..a.rows).find(|&r| a.get(r, col) != 0) else {
            continue;
        };
        for j in 0..a.cols {
            a.data.swap(piv * a.cols + j, rank * a.cols + j);
        }
        let inv = inverse_mod(a.get(rank, col), p).expect("nonzero in a field");
        for r in 0..a.rows {
            if r == rank || a.get(r, col) == 0 {
                continue;
            }
            let f = mul_mod(a.get(r, col), inv, p);
            for j in col..a.cols {
                let v = (a.get(r, j) + p - mul_mod(f, a.get(rank, j), p)) % p;
                a.data[r * a.cols + j] = v;
            }
        }
        rank += 1;
    }
    Ok(a.cols - rank)
}

/// Number of x ∈ (Z/n)^cols with Mx ≡ 0, n the modulus of `m`.
///
/// Splits n into prime powers and diagonalizes over each local ring Z/p^e,
/// always pivoting on an entry of least p-adic valuation.
pub fn solution_count_mod_n(m: &ModMatrix) -> Result<u128, AlgebraError> {
    if m.modulus < 2 {
        return Err(AlgebraError::ModulusTooSmall(m.modulus));
    }
    let mut total: u128 = 1;
    for (p, e) in factorize(m.modulus) {
        let c = count_prime_power(&m.with_modulus(p.pow(e)), p, e)?;
        total = total.checked_mul(c).ok_or(AlgebraError::Overflow)?;
    }
    Ok(total)
}

fn valuation(mut v: u64, p: u64, e: u32) -> u32 {
    if v == 0 {
        return e;
    }
    let mut k = 0;
    while v.is_multiple_of(p) {
        v /= p;
        k += 1;
    }
    k
}

fn count_prime_power(m: &ModMatrix, p: u64, e: u32) -> Result<u128, AlgebraError> {
    let q = p.pow(e);
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut count: u128 = 1;
    let mut k = 0;
    while k < rows.min(cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for r in k..rows {
            for c in k..cols {
                let v = valuation(a.get(r, c), p, e);
                if v < e && best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, r, c));
                }
            }
        }
        let Some((v, pr, pc)) = best else { break };
        for j in 0..cols {
            a.data.swap(pr * cols + j, k * cols + j);
        }
        for r in 0..rows {
            a.data.swap(r * cols + pc, r * cols + k);
        }
        let pv = p.pow(v);
        let unit_inv = inverse_mod(a.get(k, k) / pv, q).expect("unit part is invertible");
        for r in k + 1..rows {
            let f = mul_mod(a.get(r, k) / pv, unit_inv, q);
            if f == 0 {
                continue;
            }
            for j in k..cols {
                let val = (a.get(r, j) + q - mul_mod(f, a.get(k, j), q)) % q;
                a.data[r * cols + j] = val;
            }
        }
        // Column operations are invertible changes of variables.
        for c in k + 1..cols {
            let f = mul_mod(a.get(k, c) / pv, unit_inv, q);
            if f == 0 {
                continue;
            }
            for r in k..rows {
                let val = (a.get(r, c) + q - mul_mod(f, a.get(r, k), q)) % q;
                a.data[r * cols + c] = val;
            }
        }
        count = count.checked_mul(pv as u128).ok_or(AlgebraError::Overflow)?;
        k += 1;
    }
    for _ in k..cols {
        count = count.checked_mul(q as u128).ok_or(AlgebraError::Overflow)?;
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> ArrowPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn trefoil_sum_prints_canonically() {
        let a2 = ArrowPolynomial::a_pow(2);
        let rest = &(&ArrowPolynomial::one() - &ArrowPolynomial::a_pow(-4)) * &ArrowPolynomial::k(1);
        let sum = poly_add(&a2, &rest);
        assert_eq!(sum.to_string(), "A^2 + K1 - A^-4*K1");
        assert_eq!(sum.to_string_with('Z'), "A^2 + Z1 - A^-4*Z1");
        assert_eq!(p("A^2 + K1 - A^-4*K1"), sum);
        assert_eq!(p("A^2 + Z1 - A^-4*Z1"), sum);
    }

    #[test]
    fn difference_of_squares() {
        let x = p("A + A^-1");
        let y = p("A - A^-1");
        assert_eq!(poly_mul(&x, &y), p("A^2 - A^-2"));
        assert_eq!(poly_mul(&x, &ArrowPolynomial::one()), x);
        assert_eq!(poly_scale(&x, 0), ArrowPolynomial::zero());
    }

    #[test]
    fn k_zero_is_one() {
        assert_eq!(ArrowPolynomial::k(0), ArrowPolynomial::one());
        assert_eq!(p("K0*A"), p("A"));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&p("A^2"), 2), p("A^-4"));
        assert_eq!(normalize(&p("A^2"), 1), p("-A^-1"));
        let q = p("A^2 + K1 - A^-4*K1");
        assert_eq!(normalize(&q, 0), q);
        assert_eq!(normalize(&q, 2), p("A^-4 + A^-6*K1 - A^-10*K1"));
        assert_eq!(normalize(&normalize(&q, 3), -3), q);
    }

    #[test]
    fn display_edge_cases() {
        assert_eq!(ArrowPolynomial::zero().to_string(), "0");
        assert_eq!(p("-1").to_string(), "-1");
        assert_eq!(p("3*A^-2*K1^2*K2 - 2*A").to_string(), "-2*A + 3*A^-2*K1^2*K2");
        assert_eq!(ArrowPolynomial::loop_value().to_string(), "-A^2 - A^-2");
        assert!("A^".parse::<ArrowPolynomial>().is_err());
        assert!("A +".parse::<ArrowPolynomial>().is_err());
        assert!("B2".parse::<ArrowPolynomial>().is_err());
    }

    #[test]
    fn k_degrees() {
        let q = p("A^2 + K1 - A^-4*K1^2*K3");
        assert_eq!(q.k_degrees(), BTreeSet::from([0, 1, 5]));
    }

    #[test]
    fn json_terms_round_trip() {
        let q = p("A^2 + K1 - A^-4*K1");
        let json = serde_json::to_value(&q).unwrap();
        assert_eq!(json[0], serde_json::json!({"coeff": 1, "a_exp": 2, "k": {}}));
        let back: ArrowPolynomial = serde_json::from_value(json).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn group_ring() {
        let g = CyclicGroup::Infinite;
        let mut x = GroupRingElement::term(g, 14, 0);
        x.add_term(2, 1);
        assert_eq!(x.to_string(), "14 + 2*u");
        let sq = x.mul(&x).unwrap();
        assert_eq!(sq.to_string(), "196 + 56*u + 4*u^2");
        let z3 = CyclicGroup::Finite(3);
        let y = GroupRingElement::term(z3, 1, 2).mul(&GroupRingElement::term(z3, 1, 2)).unwrap();
        assert_eq!(y.coefficient(1), 1);
        assert_eq!(x.add(&y), Err(AlgebraError::GroupMismatch));
    }

    fn paper_matrix() -> ModMatrix {
        ModMatrix::from_rows(
            &[
                vec![0, 0, 3, 6, 5, 0, 0],
                vec![3, 5, 6, 0, 0, 0, 0],
                vec![6, 0, 0, 0, 3, 0, 5],
                vec![0, 6, 0, 0, 0, 3, 5],
                vec![0, 6, 0, 3, 0, 0, 5],
                vec![0, 0, 0, 0, 3, 6, 5],
            ],
            7,
            7,
        )
    }

    #[test]
    fn paper_matrix_nullity() {
        let m = paper_matrix();
        assert_eq!(nullity_mod_prime(&m), Ok(1));
        assert_eq!(solution_count_mod_n(&m), Ok(7));
    }

    #[test]
    fn small_nullities() {
        assert_eq!(nullity_mod_prime(&ModMatrix::zeros(2, 3, 5)), Ok(3));
        assert_eq!(nullity_mod_prime(&ModMatrix::identity(4, 3)), Ok(0));
        assert_eq!(nullity_mod_prime(&ModMatrix::zeros(1, 1, 4)), Err(AlgebraError::NonPrimeModulus(4)));
    }

    #[test]
    fn composite_counts() {
        assert_eq!(solution_count_mod_n(&ModMatrix::zeros(0, 3, 4)), Ok(64));
        // 2x ≡ 0 mod 4 has two solutions
        assert_eq!(solution_count_mod_n(&ModMatrix::from_rows(&[vec![2]], 1, 4)), Ok(2));
        // x + y ≡ 0, 2x ≡ 0 mod 12
        let m = ModMatrix::from_rows(&[vec![1, 1], vec![2, 0]], 2, 12);
        assert_eq!(solution_count_mod_n(&m), Ok(2));
        assert_eq!(solution_count_mod_n(&ModMatrix::zeros(1, 1, 1)), Err(AlgebraError::ModulusTooSmall(1)));
    }
}
