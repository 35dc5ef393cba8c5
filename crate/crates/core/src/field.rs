//! Arithmetic in the finite field `F_q` for a prime power `q = p^e`.
//!
//! Elements are stored as a single integer in `[0, q)`: for `e = 1` this is
//! the residue mod `p`, for `e > 1` it is the base-`p` packing
//! `c_0 + c_1 p + ... + c_{e-1} p^{e-1}` of the coefficient vector of the
//! reduced polynomial `c_0 + c_1 x + ... + c_{e-1} x^{e-1}`.
//!
//! Extension-field multiplication goes through discrete log tables built
//! once at construction, so [`FieldSpec`] is meant to be built once and
//! shared (it is cheap to clone behind an [`Arc`](std::sync::Arc)).

use std::fmt;

use thiserror::Error;

/// Largest field order for which extension-field tables are built.
pub const MAX_EXTENSION_ORDER: u64 = 1 << 16;

/// Largest prime accepted for prime-field arithmetic (elements are `u32`).
pub const MAX_PRIME_ORDER: u64 = u32::MAX as u64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime power")]
    NotAPrimePower(u64),
    #[error("field of order {0} is not supported (extension fields are limited to q <= 65536)")]
    Unsupported(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid element encoding {0:?}")]
    InvalidElement(String),
}

/// A field element in canonical packed form. Only meaningful together with
/// the [`FieldSpec`] that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FqElem(u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    /// The packed index in `[0, q)`.
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Unchecked constructor; callers guarantee `i < q`.
    pub(crate) fn from_index(i: u32) -> FqElem {
        FqElem(i)
    }
}

/// The field operations exposed by [`FieldSpec::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    /// Inverts the second operand; the first is ignored.
    Inv,
}

/// Factor `q` as `p^e`. Returns `None` when `q < 2` or `q` has two distinct
/// prime factors.
pub fn prime_power_parts(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = smallest_prime_factor(q);
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

pub fn is_prime_power(q: u64) -> bool {
    prime_power_parts(q).is_some()
}

fn smallest_prime_factor(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 2;
    }
    n
}

/// Built-in irreducible moduli, coefficients from the constant term up,
/// without the leading 1.
fn builtin_modulus(q: u64) -> Option<&'static [u32]> {
    Some(match q {
        4 => &[1, 1],                // x^2 + x + 1
        8 => &[1, 1, 0],             // x^3 + x + 1
        9 => &[1, 0],                // x^2 + 1
        16 => &[1, 1, 0, 0],         // x^4 + x + 1
        25 => &[2, 0],               // x^2 + 2
        27 => &[1, 2, 0],            // x^3 + 2x + 1
        32 => &[1, 0, 1, 0, 0],      // x^5 + x^2 + 1
        49 => &[1, 0],               // x^2 + 1
        64 => &[1, 1, 0, 0, 0, 0],   // x^6 + x + 1
        _ => return None,
    })
}

/// A validated field `F_q` together with its arithmetic tables.
#[derive(Clone)]
pub struct FieldSpec {
    q: u64,
    p: u64,
    e: u32,
    /// Monic modulus of degree `e`, low coefficients first, leading 1 included.
    /// Empty for prime fields.
    modulus: Vec<u32>,
    tables: Option<LogTables>,
}

#[derive(Clone)]
struct LogTables {
    /// `exp[i] = g^i` for `i` in `[0, 2(q-1))`, doubled to skip a reduction.
    exp: Vec<u32>,
    /// `log[a]` for nonzero `a`; `log[0]` is unused.
    log: Vec<u32>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("q", &self.q)
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

impl FieldSpec {
    /// Validate `q` as a prime power and build `F_q`.
    ///
    /// Extension fields use a built-in modulus for the common small orders
    /// and otherwise the lexicographically first monic irreducible polynomial.
    pub fn new(q: u64) -> Result<Self, FieldError> {
        let (p, e) = prime_power_parts(q).ok_or(FieldError::NotAPrimePower(q))?;
        if e == 1 {
            if q > MAX_PRIME_ORDER {
                return Err(FieldError::Unsupported(q));
            }
            return Ok(FieldSpec { q, p, e, modulus: Vec::new(), tables: None });
        }
        if q > MAX_EXTENSION_ORDER {
            return Err(FieldError::Unsupported(q));
        }
        let mut modulus = match builtin_modulus(q) {
            Some(low) => low.to_vec(),
            None => search_irreducible(p as u32, e as usize),
        };
        modulus.push(1);
        Self::with_modulus(p, e, modulus)
    }

    /// Build `F_{p^e}` from an explicit monic modulus (low coefficients
    /// first, leading 1 included). The modulus is checked for irreducibility.
    pub fn with_modulus(p: u64, e: u32, modulus: Vec<u32>) -> Result<Self, FieldError> {
        let q = p.checked_pow(e).ok_or(FieldError::Unsupported(u64::MAX))?;
        if prime_power_parts(p) != Some((p, 1)) {
            return Err(FieldError::NotAPrimePower(p));
        }
        if e == 1 {
            return Self::new(p);
        }
        if q > MAX_EXTENSION_ORDER {
            return Err(FieldError::Unsupported(q));
        }
        let p32 = p as u32;
        let poly = Poly::normalized(modulus.iter().map(|&c| c % p32).collect());
        if poly.degree() != Some(e as usize) || poly.0[e as usize] != 1 || !is_irreducible(&poly, p32) {
            return Err(FieldError::InvalidElement(format!("modulus {modulus:?} is not monic irreducible of degree {e}")));
        }
        let mut spec = FieldSpec { q, p, e, modulus: poly.0, tables: None };
        spec.tables = Some(spec.build_tables());
        Ok(spec)
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    /// The modulus, low coefficients first with the leading 1; empty for
    /// prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.e == 1
    }

    /// Element with packed index `i`, which must be below `q`.
    pub fn elem(&self, i: u64) -> Result<FqElem, FieldError> {
        if i < self.q {
            Ok(FqElem(i as u32))
        } else {
            Err(FieldError::InvalidElement(i.to_string()))
        }
    }

    /// Element from its polynomial coefficients, constant term first.
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FqElem, FieldError> {
        if coeffs.len() != self.e as usize || coeffs.iter().any(|&c| c as u64 >= self.p) {
            return Err(FieldError::InvalidElement(format!("{coeffs:?}")));
        }
        let p = self.p as u32;
        Ok(FqElem(coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)))
    }

    /// Coefficient vector of `a`, constant term first, length `e`.
    pub fn coeffs(&self, a: FqElem) -> Vec<u32> {
        let p = self.p as u32;
        let mut v = a.0;
        (0..self.e)
            .map(|_| {
                let c = v % p;
                v /= p;
                c
            })
            .collect()
    }

    /// All `q` elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.q as u32).map(FqElem)
    }

    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        if self.e == 1 {
            return FqElem(((a.0 as u64 + b.0 as u64) % self.p) as u32);
        }
        if self.p == 2 {
            return FqElem(a.0 ^ b.0);
        }
        self.digitwise(a, b, |x, y, p| (x + y) % p)
    }

    pub fn neg(&self, a: FqElem) -> FqElem {
        if self.e == 1 {
            return FqElem(((self.p - a.0 as u64) % self.p) as u32);
        }
        if self.p == 2 {
            return a;
        }
        self.digitwise(FqElem::ZERO, a, |x, y, p| (x + p - y) % p)
    }

    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        if self.e == 1 {
            return FqElem(((a.0 as u64 + self.p - b.0 as u64) % self.p) as u32);
        }
        if self.p == 2 {
            return FqElem(a.0 ^ b.0);
        }
        self.digitwise(a, b, |x, y, p| (x + p - y) % p)
    }

    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        if a.0 == 0 || b.0 == 0 {
            return FqElem::ZERO;
        }
        match &self.tables {
            None => FqElem(((a.0 as u64 * b.0 as u64) % self.p) as u32),
            Some(t) => FqElem(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
        }
    }

    pub fn inv(&self, a: FqElem) -> Result<FqElem, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match &self.tables {
            None => FqElem(mod_inverse(a.0 as u64, self.p) as u32),
            Some(t) => {
                let l = t.log[a.0 as usize] as u64;
                FqElem(t.exp[((self.q - 1 - l) % (self.q - 1)) as usize])
            }
        })
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> Result<FqElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FqElem, mut k: u64) -> FqElem {
        let mut base = a;
        let mut acc = FqElem::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// Apply `op` to `(a, b)`. For [`FieldOp::Inv`] the result is `b^{-1}`.
    pub fn apply(&self, op: FieldOp, a: FqElem, b: FqElem) -> Result<FqElem, FieldError> {
        match op {
            FieldOp::Add => Ok(self.add(a, b)),
            FieldOp::Sub => Ok(self.sub(a, b)),
            FieldOp::Mul => Ok(self.mul(a, b)),
            FieldOp::Inv => self.inv(b),
        }
    }

    /// Render `a` in the text format: the integer index for prime fields,
    /// otherwise the coefficients (constant term first) joined by `:`.
    pub fn encode(&self, a: FqElem) -> String {
        if self.e == 1 {
            a.0.to_string()
        } else {
            self.coeffs(a).iter().map(|c| c.to_string()).collect::<Vec<_>>().join(":")
        }
    }

    /// Inverse of [`encode`](Self::encode).
    pub fn decode(&self, s: &str) -> Result<FqElem, FieldError> {
        let bad = || FieldError::InvalidElement(s.to_string());
        if self.e == 1 {
            let v: u64 = s.trim().parse().map_err(|_| bad())?;
            return self.elem(v).map_err(|_| bad());
        }
        let coeffs = s
            .trim()
            .split(':')
            .map(|c| c.parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        self.from_coeffs(&coeffs).map_err(|_| bad())
    }

    fn digitwise(&self, a: FqElem, b: FqElem, f: impl Fn(u32, u32, u32) -> u32) -> FqElem {
        let p = self.p as u32;
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.e {
            out += f(x % p, y % p, p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        FqElem(out)
    }

    /// Slow polynomial multiplication mod the modulus, used to build tables.
    fn poly_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u32;
        let e = self.e as usize;
        let ca = self.coeffs(FqElem(a));
        let cb = self.coeffs(FqElem(b));
        let mut prod = vec![0u32; 2 * e - 1];
        for (i, &x) in ca.iter().enumerate() {
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        for d in (e..prod.len()).rev() {
            let c = prod[d];
            if c != 0 {
                for k in 0..=e {
                    let idx = d - e + k;
                    prod[idx] = (prod[idx] + p * p - c * self.modulus[k] % p) % p;
                }
            }
        }
        prod[..e].iter().rev().fold(0, |acc, &c| acc * p + c)
    }

    fn build_tables(&self) -> LogTables {
        let order = (self.q - 1) as usize;
        let q = self.q as usize;
        for g in 2..q as u32 {
            let mut exp = Vec::with_capacity(2 * order);
            let mut x = 1u32;
            let mut cycled_early = false;
            for i in 0..order {
                if i > 0 && x == 1 {
                    cycled_early = true;
                    break;
                }
                exp.push(x);
                x = self.poly_mul(x, g);
            }
            if cycled_early {
                continue;
            }
            let mut log = vec![0u32; q];
            for (i, &v) in exp.iter().enumerate() {
                log[v as usize] = i as u32;
            }
            exp.extend_from_within(..order);
            return LogTables { exp, log };
        }
        unreachable!("every finite field has a primitive element")
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    old_s.rem_euclid(p as i128) as u64
}

/// Dense polynomial over `F_p`, low coefficients first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Poly(Vec<u32>);

impl Poly {
    fn normalized(mut c: Vec<u32>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        Poly(c)
    }

    fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// Remainder of `self` modulo a monic `divisor`.
    fn rem_monic(&self, divisor: &Poly, p: u32) -> Poly {
        let dd = divisor.degree().expect("nonzero divisor");
        let mut r = self.0.clone();
        while r.len() > dd {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - dd;
            if lead != 0 {
                for (k, &c) in divisor.0.iter().enumerate() {
                    r[shift + k] = (r[shift + k] + p - (lead * c) % p) % p;
                }
            }
            r.pop();
        }
        Poly::normalized(r)
    }
}

/// Monic polynomials of exactly `degree` over `F_p`, lower coefficients in
/// lexicographic order (constant term least significant).
fn monic_polys(p: u32, degree: usize) -> impl Iterator<Item = Poly> {
    let count = (p as u64).pow(degree as u32);
    (0..count).map(move |mut idx| {
        let mut c = Vec::with_capacity(degree + 1);
        for _ in 0..degree {
            c.push((idx % p as u64) as u32);
            idx /= p as u64;
        }
        c.push(1);
        Poly(c)
    })
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn is_irreducible(f: &Poly, p: u32) -> bool {
    let Some(deg) = f.degree() else { return false };
    if deg == 0 {
        return false;
    }
    (1..=deg / 2).all(|d| monic_polys(p, d).all(|g| !f.rem_monic(&g, p).0.is_empty()))
}

fn search_irreducible(p: u32, e: usize) -> Vec<u32> {
    let mut candidates = monic_polys(p, e);
    let found = candidates
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree");
    found.0[..e].to_vec()
}

/// Whether the monic polynomial with the given coefficients (low first,
/// leading 1 included) is irreducible over `F_p`.
pub fn is_irreducible_over(coeffs: &[u32], p: u32) -> bool {
    is_irreducible(&Poly::normalized(coeffs.to_vec()), p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_validation() {
        let f = FieldSpec::new(13).unwrap();
        assert_eq!((f.characteristic(), f.degree()), (13, 1));
        assert!(f.modulus().is_empty());

        let f4 = FieldSpec::new(4).unwrap();
        assert_eq!((f4.characteristic(), f4.degree()), (2, 2));
        assert_eq!(f4.modulus(), &[1, 1, 1]);

        assert_eq!(FieldSpec::new(6).unwrap_err(), FieldError::NotAPrimePower(6));
        assert_eq!(FieldSpec::new(1).unwrap_err(), FieldError::NotAPrimePower(1));
        assert_eq!(FieldSpec::new(0).unwrap_err(), FieldError::NotAPrimePower(0));
        assert!(matches!(FieldSpec::new(1 << 17), Err(FieldError::Unsupported(_))));
    }

    #[test]
    fn builtin_moduli_are_irreducible() {
        for q in [4u64, 8, 9, 16, 25, 27, 32, 49, 64] {
            let f = FieldSpec::new(q).unwrap();
            assert_eq!(f.modulus().len(), f.degree() as usize + 1);
            assert!(is_irreducible_over(f.modulus(), f.characteristic() as u32), "q = {q}");
        }
    }

    #[test]
    fn searched_modulus_is_first_irreducible() {
        // Over F_2 the first degree-7 irreducible in this order is x^7 + x + 1.
        let f = FieldSpec::new(128).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 0, 0, 0, 0, 0, 1]);
        // 121 = 11^2: x^2 + 1 is irreducible since 11 = 3 mod 4, and
        // nothing earlier (x^2 + c for c a non-residue, c < 1) exists.
        let f = FieldSpec::new(121).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 + 1 = (x + 1)^2 over F_2
        assert!(FieldSpec::with_modulus(2, 2, vec![1, 0, 1]).is_err());
    }

    #[test]
    fn small_examples() {
        let f2 = FieldSpec::new(2).unwrap();
        assert_eq!(f2.add(FqElem::ONE, FqElem::ONE), FqElem::ZERO);

        let f4 = FieldSpec::new(4).unwrap();
        let x = f4.from_coeffs(&[0, 1]).unwrap();
        let x_plus_1 = f4.from_coeffs(&[1, 1]).unwrap();
        assert_eq!(f4.mul(x, x), x_plus_1);

        let f7 = FieldSpec::new(7).unwrap();
        let three = f7.elem(3).unwrap();
        assert_eq!(f7.apply(FieldOp::Inv, FqElem::ZERO, three).unwrap(), f7.elem(5).unwrap());
        assert_eq!(f7.inv(FqElem::ZERO), Err(FieldError::DivisionByZero));
        assert_eq!(f4.apply(FieldOp::Inv, x, FqElem::ZERO), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn exhaustive_axioms_small_fields() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let f = FieldSpec::new(q).unwrap();
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, FqElem::ZERO), a);
                assert_eq!(f.mul(a, FqElem::ONE), a);
                assert_eq!(f.add(a, f.neg(a)), FqElem::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FqElem::ONE);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.sub(f.add(a, b), b), a);
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn multiplicative_group_order() {
        for q in 2..=64u64 {
            let Ok(f) = FieldSpec::new(q) else { continue };
            for a in f.elements().skip(1) {
                assert_eq!(f.pow(a, q - 1), FqElem::ONE, "q = {q}, a = {a:?}");
            }
        }
    }

    #[test]
    fn table_mul_matches_polynomial_mul() {
        for q in [8u64, 9, 27, 49] {
            let f = FieldSpec::new(q).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b).index(), f.poly_mul(a.index(), b.index()));
                }
            }
        }
    }

    #[test]
    fn text_encoding() {
        let f4 = FieldSpec::new(4).unwrap();
        let x = f4.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f4.encode(x), "0:1");
        assert_eq!(f4.decode("0:1").unwrap(), x);
        assert!(f4.decode("2:0").is_err());
        assert!(f4.decode("1").is_err());
        let f5 = FieldSpec::new(5).unwrap();
        assert_eq!(f5.decode("4").unwrap().index(), 4);
        assert!(f5.decode("5").is_err());
    }
}
