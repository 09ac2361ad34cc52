//! Finite fields `F_q`, `q = p^e`, realised as `F_p[x]/(m(x))` with lookup tables.
//!
//! Elements are encoded as integers in `[0, q)`: the coefficient vector of the
//! polynomial representative read in base `p`, constant term least
//! significant. Index 0 is zero, index 1 is one, and indices `< p` form the
//! prime subfield.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest supported field order.
pub const MAX_FIELD_ORDER: u32 = 4096;

/// Fields up to this order carry full `q x q` addition and multiplication tables.
const FULL_TABLE_ORDER: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    CompositeCharacteristic(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{e} exceeds the supported maximum of {MAX_FIELD_ORDER}")]
    FieldTooLarge { p: u32, e: u32 },
    #[error("no monic irreducible polynomial of degree {e} over F_{p}")]
    NoIrreducibleFound { p: u32, e: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("element index {index} out of range for F_{q}")]
    ElementOutOfRange { index: u32, q: u32 },
    #[error("cannot parse field spec {0:?}; expected \"p^e\" or a prime power")]
    BadSpec(String),
}

/// An element of some `F_q`, stored as its integer encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[repr(transparent)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parameters identifying a constructed field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u32,
    pub e: u32,
    pub q: u32,
    /// Coefficients of the monic modulus, constant term first; length `e + 1`.
    pub modulus: Vec<u32>,
    /// Index of the fixed primitive element.
    pub generator: u32,
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}^{}", self.p, self.e)
        }
    }
}

/// `(p, e)` as written on the command line: `"p^e"` or a plain prime power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldOrder {
    pub p: u32,
    pub e: u32,
}

impl FromStr for FieldOrder {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FieldError::BadSpec(s.to_string());
        let s = s.trim();
        if let Some((p, e)) = s.split_once('^') {
            let p: u32 = p.trim().parse().map_err(|_| bad())?;
            let e: u32 = e.trim().parse().map_err(|_| bad())?;
            return Ok(FieldOrder { p, e });
        }
        let q: u32 = s.parse().map_err(|_| bad())?;
        if q < 2 {
            return Err(bad());
        }
        let p = smallest_prime_factor(q);
        let mut rest = q;
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        if rest != 1 {
            return Err(bad());
        }
        Ok(FieldOrder { p, e })
    }
}

/// Immutable arithmetic context for `F_q`.
#[derive(Clone)]
pub struct FieldCtx {
    spec: FieldSpec,
    q: usize,
    p: usize,
    neg: Vec<u16>,
    inv: Vec<u16>,
    /// `log[a]` for `a != 0`; `log[0]` is unused.
    log: Vec<u32>,
    /// `exp[k] = g^k` for `k` in `[0, 2(q-1))`, doubled to skip a reduction.
    exp: Vec<u16>,
    trace: Vec<u16>,
    add_table: Option<Vec<u16>>,
    mul_table: Option<Vec<u16>>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx").field("spec", &self.spec).finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for FieldCtx {}

impl FieldCtx {
    /// Builds `F_{p^e}` using the lexicographically smallest monic irreducible
    /// modulus of degree `e` and the smallest primitive element.
    pub fn new(p: u32, e: u32) -> Result<Self, FieldError> {
        if p < 2 || smallest_prime_factor(p) != p {
            return Err(FieldError::CompositeCharacteristic(p));
        }
        if e == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u64)
            .checked_pow(e)
            .filter(|&q| q <= MAX_FIELD_ORDER as u64)
            .ok_or(FieldError::FieldTooLarge { p, e })? as u32;

        let modulus = smallest_irreducible(p, e).ok_or(FieldError::NoIrreducibleFound { p, e })?;
        let poly = PolyArith {
            p,
            e,
            modulus: &modulus,
        };

        let generator = (1..q)
            .find(|&g| multiplicative_order(&poly, g, q) == q - 1)
            .expect("the multiplicative group of a finite field is cyclic");

        let qs = q as usize;
        let mut exp = vec![0u16; 2 * (qs - 1)];
        let mut log = vec![0u32; qs];
        let mut acc = 1u32;
        for k in 0..qs - 1 {
            exp[k] = acc as u16;
            exp[k + qs - 1] = acc as u16;
            log[acc as usize] = k as u32;
            acc = poly.mul(acc, generator);
        }
        debug_assert_eq!(acc, 1);

        let neg: Vec<u16> = (0..q).map(|a| poly.neg(a) as u16).collect();
        let mut inv = vec![0u16; qs];
        for a in 1..qs {
            let l = log[a] as usize;
            inv[a] = exp[(qs - 1 - l) % (qs - 1)];
        }

        let mut trace = vec![0u16; qs];
        for a in 0..q {
            // Tr(a) = a + a^p + ... + a^{p^{e-1}}
            let mut sum = 0;
            let mut frob = a;
            for _ in 0..e {
                sum = poly.add(sum, frob);
                frob = poly.pow(frob, p);
            }
            debug_assert!(sum < p, "trace must land in the prime subfield");
            trace[a as usize] = sum as u16;
        }

        let (add_table, mul_table) = if q <= FULL_TABLE_ORDER {
            let mut add = vec![0u16; qs * qs];
            let mut mul = vec![0u16; qs * qs];
            for a in 0..q {
                for b in 0..q {
                    add[a as usize * qs + b as usize] = poly.add(a, b) as u16;
                    mul[a as usize * qs + b as usize] = poly.mul(a, b) as u16;
                }
            }
            (Some(add), Some(mul))
        } else {
            (None, None)
        };

        Ok(FieldCtx {
            spec: FieldSpec {
                p,
                e,
                q,
                modulus,
                generator,
            },
            q: qs,
            p: p as usize,
            neg,
            inv,
            log,
            exp,
            trace,
            add_table,
            mul_table,
        })
    }

    pub fn from_order(order: FieldOrder) -> Result<Self, FieldError> {
        Self::new(order.p, order.e)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn characteristic(&self) -> usize {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.spec.e
    }

    pub fn generator(&self) -> FieldElement {
        FieldElement(self.spec.generator as u16)
    }

    pub fn element(&self, index: u32) -> Result<FieldElement, FieldError> {
        if (index as usize) < self.q {
            Ok(FieldElement(index as u16))
        } else {
            Err(FieldError::ElementOutOfRange {
                index,
                q: self.spec.q,
            })
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q as u16).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if let Some(t) = &self.add_table {
            return FieldElement(t[a.index() * self.q + b.index()]);
        }
        if self.spec.e == 1 {
            let s = a.index() + b.index();
            return FieldElement(if s >= self.p { s - self.p } else { s } as u16);
        }
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        // digit-wise addition in base p
        let (mut x, mut y) = (a.index(), b.index());
        let (mut out, mut place) = (0usize, 1usize);
        while x > 0 || y > 0 {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * place;
            place *= self.p;
            x /= self.p;
            y /= self.p;
        }
        FieldElement(out as u16)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if let Some(t) = &self.mul_table {
            return FieldElement(t[a.index() * self.q + b.index()]);
        }
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        FieldElement(self.exp[(self.log[a.index()] + self.log[b.index()]) as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            Err(FieldError::DivisionByZero)
        } else {
            Ok(FieldElement(self.inv[a.index()]))
        }
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, k: u64) -> FieldElement {
        if k == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        let ord = (self.q - 1) as u64;
        let l = (self.log[a.index()] as u64 * (k % ord)) % ord;
        FieldElement(self.exp[l as usize])
    }

    /// Discrete logarithm to the base of [`FieldCtx::generator`]; `None` for zero.
    #[inline]
    pub fn log(&self, a: FieldElement) -> Option<u32> {
        (!a.is_zero()).then(|| self.log[a.index()])
    }

    /// `g^k` for the fixed generator `g`.
    #[inline]
    pub fn exp(&self, k: u64) -> FieldElement {
        FieldElement(self.exp[(k % (self.q as u64 - 1)) as usize])
    }

    /// Absolute trace `F_q -> F_p`, returned as an integer in `[0, p)`.
    #[inline]
    pub fn trace(&self, a: FieldElement) -> u32 {
        self.trace[a.index()] as u32
    }
}

fn smallest_prime_factor(n: u32) -> u32 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 2;
    }
    n
}

fn distinct_prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    while n > 1 {
        let d = smallest_prime_factor(n);
        out.push(d);
        while n.is_multiple_of(d) {
            n /= d;
        }
    }
    out
}

fn multiplicative_order(poly: &PolyArith<'_>, g: u32, q: u32) -> u32 {
    let group = q - 1;
    let mut ord = group;
    for l in distinct_prime_factors(group) {
        while ord.is_multiple_of(l) && poly.pow(g, ord / l) == 1 {
            ord /= l;
        }
    }
    ord
}

/// Polynomial arithmetic over `F_p` on dense coefficient vectors (constant first).
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = mod_inv(b[db], p);
    while r.len() > db && !r.is_empty() {
        let top = *r.last().unwrap();
        if top != 0 {
            let shift = r.len() - 1 - db;
            let c = top * lead_inv % p;
            for (i, &bc) in b.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + p - c * bc % p) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

fn mod_inv(a: u32, p: u32) -> u32 {
    // p is prime and small
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut k = p - 2;
    while k > 0 {
        if k & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        k >>= 1;
    }
    result as u32
}

/// Monic polynomial of degree `deg` whose lower coefficients are the base-`p`
/// digits of `code`.
fn monic_from_code(code: u32, deg: u32, p: u32) -> Vec<u32> {
    let mut c = Vec::with_capacity(deg as usize + 1);
    let mut x = code;
    for _ in 0..deg {
        c.push(x % p);
        x /= p;
    }
    c.push(1);
    c
}

/// Exhaustive trial division by every monic polynomial of degree `1..=deg/2`.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = (f.len() - 1) as u32;
    if deg <= 1 {
        return deg == 1;
    }
    for d in 1..=deg / 2 {
        for code in 0..p.pow(d) {
            let g = monic_from_code(code, d, p);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, e: u32) -> Option<Vec<u32>> {
    (0..p.pow(e))
        .map(|code| monic_from_code(code, e, p))
        .find(|f| is_irreducible(f, p))
}

/// Table-free arithmetic on element indices, used only while building tables.
struct PolyArith<'a> {
    p: u32,
    e: u32,
    modulus: &'a [u32],
}

impl PolyArith<'_> {
    fn digits(&self, a: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.e as usize);
        let mut x = a;
        for _ in 0..self.e {
            out.push(x % self.p);
            x /= self.p;
        }
        out
    }

    fn undigits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (self.digits(a), self.digits(b));
        let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.undigits(&s)
    }

    fn neg(&self, a: u32) -> u32 {
        let d: Vec<u32> = self
            .digits(a)
            .iter()
            .map(|&x| (self.p - x) % self.p)
            .collect();
        self.undigits(&d)
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u32; 2 * self.e as usize];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let mut r = poly_rem(&prod, self.modulus, self.p);
        r.resize(self.e as usize, 0);
        self.undigits(&r)
    }

    fn pow(&self, a: u32, mut k: u32) -> u32 {
        let mut result = 1;
        let mut base = a;
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        result
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(i: u16) -> FieldElement {
        FieldElement(i)
    }

    #[test]
    fn f2_basics() {
        let f = FieldCtx::new(2, 1).unwrap();
        assert_eq!(f.order(), 2);
        assert_eq!(f.add(fe(1), fe(1)), fe(0));
        assert_eq!(f.mul(fe(1), fe(1)), fe(1));
    }

    #[test]
    fn f4_modulus_and_products() {
        let f = FieldCtx::new(2, 2).unwrap();
        // x^2 + x + 1
        assert_eq!(f.spec().modulus, vec![1, 1, 1]);
        // x = 2, x + 1 = 3
        assert_eq!(f.mul(fe(2), fe(3)), fe(1));
        assert_eq!(f.inv(fe(2)).unwrap(), fe(3));
        assert_eq!(f.trace(fe(2)), 1);
    }

    #[test]
    fn f3_generator() {
        let f = FieldCtx::new(3, 1).unwrap();
        assert_eq!(f.generator(), fe(2));
        assert_eq!(f.mul(fe(2), fe(2)), fe(1));
    }

    #[test]
    fn f5_mul() {
        let f = FieldCtx::new(5, 1).unwrap();
        assert_eq!(f.mul(fe(2), fe(3)), fe(1));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            FieldCtx::new(4, 1).unwrap_err(),
            FieldError::CompositeCharacteristic(4)
        );
        assert_eq!(
            FieldCtx::new(2, 13).unwrap_err(),
            FieldError::FieldTooLarge { p: 2, e: 13 }
        );
        assert_eq!(FieldCtx::new(3, 0).unwrap_err(), FieldError::ZeroDegree);
        let f = FieldCtx::new(7, 1).unwrap();
        assert_eq!(f.inv(FieldElement::ZERO), Err(FieldError::DivisionByZero));
        assert!(f.element(7).is_err());
    }

    #[test]
    fn largest_fields_build() {
        for (p, e) in [(2, 12), (4093, 1), (3, 7), (5, 5), (7, 4), (11, 3), (13, 3), (17, 2)] {
            let f = FieldCtx::new(p, e).unwrap();
            assert_eq!(f.order() as u32, p.pow(e));
            let g = f.generator();
            assert_eq!(f.pow(g, f.order() as u64 - 1), FieldElement::ONE);
            for a in f.elements().step_by(97).skip(1) {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
                assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
            }
        }
    }

    #[test]
    fn parse_orders() {
        assert_eq!("2^2".parse::<FieldOrder>().unwrap(), FieldOrder { p: 2, e: 2 });
        assert_eq!("7".parse::<FieldOrder>().unwrap(), FieldOrder { p: 7, e: 1 });
        assert_eq!("9".parse::<FieldOrder>().unwrap(), FieldOrder { p: 3, e: 2 });
        assert!("6".parse::<FieldOrder>().is_err());
        assert!("x^2".parse::<FieldOrder>().is_err());
        assert!("1".parse::<FieldOrder>().is_err());
    }

    /// Full triple loops over every field of order at most 64.
    #[test]
    fn field_axioms_exhaustive() {
        for (p, e) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (2, 5), (5, 2), (7, 2), (2, 6), (3, 3), (61, 1)] {
            let f = FieldCtx::new(p, e).unwrap();
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, FieldElement::ZERO), a);
                assert_eq!(f.mul(a, FieldElement::ONE), a);
                assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
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
    fn generator_powers_enumerate_units() {
        for (p, e) in [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2), (2, 6), (3, 3), (2, 10)] {
            let f = FieldCtx::new(p, e).unwrap();
            let q = f.order();
            let mut seen = vec![false; q];
            let mut x = FieldElement::ONE;
            for _ in 0..q - 1 {
                assert!(!seen[x.index()], "repeat in powers of generator");
                seen[x.index()] = true;
                x = f.mul(x, f.generator());
            }
            assert_eq!(x, FieldElement::ONE);
            assert!(!seen[0]);
            assert_eq!(seen.iter().filter(|&&s| s).count(), q - 1);
        }
    }

    #[test]
    fn trace_linear_and_surjective() {
        for (p, e) in [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2), (2, 6), (3, 3), (7, 2)] {
            let f = FieldCtx::new(p, e).unwrap();
            assert_eq!(f.trace(FieldElement::ZERO), 0);
            let mut hit = vec![false; p as usize];
            for a in f.elements() {
                hit[f.trace(a) as usize] = true;
                if e == 1 {
                    assert_eq!(f.trace(a), a.0 as u32);
                }
                for b in f.elements() {
                    assert_eq!(f.trace(f.add(a, b)), (f.trace(a) + f.trace(b)) % p);
                }
                // F_p-linearity: scalars c in the prime subfield
                for c in 0..p as u16 {
                    assert_eq!(f.trace(f.mul(fe(c), a)), (c as u32 * f.trace(a)) % p);
                }
            }
            assert!(hit.iter().all(|&h| h));
        }
    }

    #[test]
    fn table_free_path_matches_tables() {
        // 3^6 = 729 exceeds FULL_TABLE_ORDER, so the log/digit path is used;
        // compare with the construction-time polynomial arithmetic.
        let f = FieldCtx::new(3, 6).unwrap();
        assert!(f.mul_table.is_none());
        let poly = PolyArith {
            p: 3,
            e: 6,
            modulus: &f.spec().modulus,
        };
        for a in (0..729u32).step_by(7) {
            for b in (0..729u32).step_by(11) {
                assert_eq!(f.mul(fe(a as u16), fe(b as u16)).0 as u32, poly.mul(a, b));
                assert_eq!(f.add(fe(a as u16), fe(b as u16)).0 as u32, poly.add(a, b));
            }
        }
    }
}
