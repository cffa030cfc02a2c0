//! Exact arithmetic in the ring `Z[ζ_m]` of integer combinations of m-th
//! roots of unity.
//!
//! A value is stored as the full coefficient vector modulo `x^m - 1`, so
//! ring operations are plain index arithmetic. Equality is decided by the
//! remainder modulo the m-th cyclotomic polynomial, which is the only sound
//! test: distinct coefficient vectors routinely denote the same number
//! (`1 + ω + ω²` and `0`, for instance).

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An element of `Z[ζ_m]`, `ζ_m = exp(2πi/m)`.
///
/// `coeffs[k]` is the coefficient of `ζ_m^k`.
#[derive(Clone, Debug)]
pub struct CycInt {
    order: usize,
    coeffs: Vec<BigInt>,
}

impl CycInt {
    pub fn zero(order: usize) -> Result<Self> {
        check_order(order)?;
        Ok(Self::zero_unchecked(order))
    }

    pub fn one(order: usize) -> Result<Self> {
        Self::root(order, 0)
    }

    /// `ζ_m^k`, with `k` reduced mod `m`.
    pub fn root(order: usize, k: i64) -> Result<Self> {
        check_order(order)?;
        let mut v = Self::zero_unchecked(order);
        v.coeffs[wrap(k, order)] = BigInt::one();
        Ok(v)
    }

    /// An integer, viewed as an element of `Z[ζ_m]`.
    pub fn from_integer(order: usize, value: impl Into<BigInt>) -> Result<Self> {
        check_order(order)?;
        let mut v = Self::zero_unchecked(order);
        v.coeffs[0] = value.into();
        Ok(v)
    }

    pub fn from_coeffs(order: usize, coeffs: Vec<BigInt>) -> Result<Self> {
        check_order(order)?;
        if coeffs.len() != order {
            return Err(Error::CoefficientLength {
                expected: order,
                got: coeffs.len(),
            });
        }
        Ok(Self { order, coeffs })
    }

    /// Sum of `coeff · ζ_m^exponent` terms; exponents wrap.
    pub fn from_terms(order: usize, terms: &[(i64, i64)]) -> Result<Self> {
        let mut v = Self::zero(order)?;
        for &(k, c) in terms {
            v.coeffs[wrap(k, order)] += c;
        }
        Ok(v)
    }

    pub(crate) fn zero_unchecked(order: usize) -> Self {
        debug_assert!(order >= 1);
        Self {
            order,
            coeffs: vec![BigInt::zero(); order],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    fn same_order(&self, other: &Self) -> Result<()> {
        if self.order == other.order {
            Ok(())
        } else {
            Err(Error::IncompatibleOrder(self.order, other.order))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            order: self.order,
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            order: self.order,
            coeffs,
        })
    }

    /// Cyclic convolution of the coefficient vectors.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_order(other)?;
        let m = self.order;
        let mut out = Self::zero_unchecked(m);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out.coeffs[(i + j) % m] += a * b;
            }
        }
        Ok(out)
    }

    pub fn negate(&self) -> Self {
        Self {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Complex conjugate: `ζ^k ↦ ζ^(m-k)`.
    pub fn conj(&self) -> Self {
        let m = self.order;
        let mut out = Self::zero_unchecked(m);
        for (k, c) in self.coeffs.iter().enumerate() {
            out.coeffs[(m - k) % m] = c.clone();
        }
        out
    }

    /// Multiplies by `ζ_m^k`, a rotation of the coefficient vector.
    pub fn mul_root(&self, k: i64) -> Self {
        let m = self.order;
        let shift = wrap(k, m);
        let mut out = Self::zero_unchecked(m);
        for (i, c) in self.coeffs.iter().enumerate() {
            out.coeffs[(i + shift) % m] = c.clone();
        }
        out
    }

    pub fn scale(&self, factor: &BigInt) -> Self {
        Self {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Re-expresses the value as an element of `Z[ζ_m2]`; requires `m | m2`.
    pub fn embed(&self, target: usize) -> Result<Self> {
        check_order(target)?;
        if !target.is_multiple_of(self.order) {
            return Err(Error::InvalidEmbedding {
                from: self.order,
                to: target,
            });
        }
        let step = target / self.order;
        let mut out = Self::zero_unchecked(target);
        for (k, c) in self.coeffs.iter().enumerate() {
            out.coeffs[k * step] = c.clone();
        }
        Ok(out)
    }

    /// Remainder of `Σ coeffs[k] x^k` modulo `Φ_m(x)`; a vector of length
    /// `φ(m)` that is zero exactly when the value is zero. The map is
    /// Z-linear, so remainders of sums are sums of remainders.
    pub fn canonical(&self) -> Vec<BigInt> {
        let phi = cyclotomic_polynomial_cached(self.order);
        let degree = phi.len() - 1;
        let mut rem = self.coeffs.clone();
        for top in (degree..rem.len()).rev() {
            if rem[top].is_zero() {
                continue;
            }
            let lead = std::mem::take(&mut rem[top]);
            let base = top - degree;
            for (j, p) in phi.iter().enumerate().take(degree) {
                if !p.is_zero() {
                    rem[base + j] -= &lead * p;
                }
            }
        }
        rem.truncate(degree);
        rem
    }

    pub fn is_zero(&self) -> bool {
        if self.coeffs.iter().all(Zero::is_zero) {
            return true;
        }
        self.canonical().iter().all(Zero::is_zero)
    }

    /// Value equality; operands of different orders are compared in the
    /// least common multiple order.
    pub fn eq_value(&self, other: &Self) -> bool {
        let m = self.order.lcm(&other.order);
        let a = self.embed(m).expect("lcm is a multiple");
        let b = other.embed(m).expect("lcm is a multiple");
        a.checked_sub(&b).expect("same order").is_zero()
    }

    /// If the value is `±ζ_m^k`, returns `(negative, k)`; positive forms are
    /// preferred.
    pub fn as_signed_root(&self) -> Option<(bool, usize)> {
        let target = self.canonical();
        for negative in [false, true] {
            for k in 0..self.order {
                let mut r = Self::zero_unchecked(self.order);
                r.coeffs[k] = if negative { -BigInt::one() } else { BigInt::one() };
                if r.canonical() == target {
                    return Some((negative, k));
                }
            }
        }
        None
    }

    /// Floating-point value `(re, im)`.
    pub fn to_complex(&self) -> (f64, f64) {
        let m = self.order as f64;
        self.coeffs
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(re, im), (k, c)| {
                let c = c.to_f64().unwrap_or(f64::NAN);
                let theta = std::f64::consts::TAU * k as f64 / m;
                (re + c * theta.cos(), im + c * theta.sin())
            })
    }
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        Err(Error::InvalidOrder(order))
    } else {
        Ok(())
    }
}

fn wrap(k: i64, m: usize) -> usize {
    k.rem_euclid(m as i64) as usize
}

/// `Φ_m` as ascending integer coefficients, by exact division of `x^m - 1`
/// by `Φ_d` for every proper divisor `d` of `m`.
pub fn cyclotomic_polynomial(order: usize) -> Result<Vec<BigInt>> {
    check_order(order)?;
    Ok(cyclotomic_polynomial_cached(order).as_ref().clone())
}

fn cyclotomic_polynomial_cached(order: usize) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().expect("cache poisoned").get(&order) {
        return Arc::clone(p);
    }
    let mut poly = vec![BigInt::zero(); order + 1];
    poly[0] = -BigInt::one();
    poly[order] = BigInt::one();
    for d in (1..order).filter(|d| order.is_multiple_of(*d)) {
        let divisor = cyclotomic_polynomial_cached(d);
        poly = divide_monic(&poly, &divisor);
    }
    let poly = Arc::new(poly);
    cache
        .lock()
        .expect("cache poisoned")
        .insert(order, Arc::clone(&poly));
    poly
}

/// Exact quotient of `num` by the monic polynomial `den`.
fn divide_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); num.len() - dd];
    for top in (dd..num.len()).rev() {
        let lead = rem[top].clone();
        if lead.is_zero() {
            continue;
        }
        quot[top - dd] = lead.clone();
        for (j, p) in den.iter().enumerate() {
            rem[top - dd + j] -= &lead * p;
        }
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "division was not exact");
    quot
}

fn root_name(order: usize, k: usize) -> String {
    let g = k.gcd(&order);
    let (m, k) = (order / g, k / g);
    match (m, k) {
        (1, _) => "1".into(),
        (2, _) => "-1".into(),
        (3, 1) => "ω".into(),
        (3, 2) => "ω̄".into(),
        (4, 1) => "i".into(),
        (4, 3) => "-i".into(),
        _ => format!("ζ{m}^{k}"),
    }
}

impl fmt::Display for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((negative, k)) = self.as_signed_root() {
            let name = root_name(self.order, k);
            return if negative {
                match name.strip_prefix('-') {
                    Some(rest) => write!(f, "{rest}"),
                    None => write!(f, "-{name}"),
                }
            } else {
                write!(f, "{name}")
            };
        }
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let name = root_name(self.order, k);
            let term = if name == "1" {
                c.to_string()
            } else if c.is_one() {
                name
            } else if *c == -BigInt::one() {
                format!("-{name}")
            } else {
                format!("{c}·{name}")
            };
            terms.push(term);
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = terms[0].clone();
        for t in &terms[1..] {
            match t.strip_prefix('-') {
                Some(rest) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                None => {
                    out.push_str(" + ");
                    out.push_str(t);
                }
            }
        }
        write!(f, "{out}")
    }
}

impl PartialEq for CycInt {
    fn eq(&self, other: &Self) -> bool {
        self.eq_value(other)
    }
}

impl Eq for CycInt {}

// Operator forms panic on mismatched orders; use the `checked_*` methods
// when orders are not known to agree.

impl Add for &CycInt {
    type Output = CycInt;
    fn add(self, rhs: &CycInt) -> CycInt {
        self.checked_add(rhs).expect("mismatched CycInt orders")
    }
}

impl Sub for &CycInt {
    type Output = CycInt;
    fn sub(self, rhs: &CycInt) -> CycInt {
        self.checked_sub(rhs).expect("mismatched CycInt orders")
    }
}

impl Mul for &CycInt {
    type Output = CycInt;
    fn mul(self, rhs: &CycInt) -> CycInt {
        self.checked_mul(rhs).expect("mismatched CycInt orders")
    }
}

impl Neg for &CycInt {
    type Output = CycInt;
    fn neg(self) -> CycInt {
        self.negate()
    }
}

/// Absolute value of the largest coefficient, used by overflow guards.
pub(crate) fn max_abs(values: &[BigInt]) -> BigInt {
    values
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(BigInt::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn roots() {
        assert_eq!(CycInt::root(3, 0).unwrap(), CycInt::one(3).unwrap());
        let minus_i = CycInt::root(12, 3).unwrap().negate();
        assert_eq!(CycInt::root(12, 9).unwrap(), minus_i);
        assert_eq!(CycInt::root(3, 4).unwrap(), CycInt::root(3, 1).unwrap());
        assert_eq!(CycInt::root(3, -2).unwrap(), CycInt::root(3, 1).unwrap());
        assert_eq!(CycInt::root(0, 1).unwrap_err(), Error::InvalidOrder(0));
    }

    #[test]
    fn ring_ops() {
        let w = CycInt::root(3, 1).unwrap();
        let w2 = CycInt::root(3, 2).unwrap();
        let one = CycInt::one(3).unwrap();
        assert!((&(&w + &w2) + &one).is_zero());
        let i = CycInt::root(12, 3).unwrap();
        assert_eq!(&i * &i, CycInt::root(12, 6).unwrap());
        assert_eq!(CycInt::root(12, 6).unwrap(), CycInt::from_integer(12, -1).unwrap());
        assert_eq!(w.conj(), w2);
        assert_eq!(
            w.checked_add(&i).unwrap_err(),
            Error::IncompatibleOrder(3, 12)
        );
        assert!(w.checked_mul(&i).is_err());
    }

    #[test]
    fn embedding() {
        let w = CycInt::root(3, 1).unwrap();
        let e = w.embed(6).unwrap();
        assert_eq!(e.order(), 6);
        assert_eq!(e.coeffs(), &b(&[0, 0, 1, 0, 0, 0])[..]);
        assert!(CycInt::zero(3).unwrap().embed(9).unwrap().is_zero());
        assert_eq!(
            CycInt::root(2, 1).unwrap().embed(12).unwrap().coeffs(),
            CycInt::root(12, 6).unwrap().coeffs()
        );
        assert_eq!(
            w.embed(4).unwrap_err(),
            Error::InvalidEmbedding { from: 3, to: 4 }
        );
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1).unwrap(), b(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(2).unwrap(), b(&[1, 1]));
        assert_eq!(cyclotomic_polynomial(3).unwrap(), b(&[1, 1, 1]));
        assert_eq!(cyclotomic_polynomial(4).unwrap(), b(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6).unwrap(), b(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12).unwrap(), b(&[1, 0, -1, 0, 1]));
        // Φ_105 is the first with a coefficient outside {-1, 0, 1}.
        assert!(cyclotomic_polynomial(105)
            .unwrap()
            .contains(&BigInt::from(-2)));
    }

    #[test]
    fn zero_tests() {
        let sum3 = CycInt::from_terms(3, &[(0, 1), (1, 1), (2, 1)]).unwrap();
        assert!(sum3.is_zero());
        assert!(!CycInt::root(3, 1).unwrap().is_zero());
        let sum6 = CycInt::from_terms(6, &[(0, 1), (1, 1), (2, 1), (3, 1), (4, 1), (5, 1)]).unwrap();
        assert!(sum6.is_zero());
        // ζ_6 + ζ_6^5 = 1
        let two_roots = CycInt::from_terms(6, &[(1, 1), (5, 1)]).unwrap();
        assert_eq!(two_roots, CycInt::one(6).unwrap());
        // mixed orders compare through the lcm
        assert_eq!(CycInt::root(3, 1).unwrap(), CycInt::root(6, 2).unwrap());
        assert_ne!(CycInt::root(3, 1).unwrap(), CycInt::root(4, 1).unwrap());
    }

    #[test]
    fn display_names() {
        let show = |m, k| CycInt::root(m, k).unwrap().to_string();
        assert_eq!(show(3, 0), "1");
        assert_eq!(show(3, 1), "ω");
        assert_eq!(show(3, 2), "ω̄");
        assert_eq!(show(4, 1), "i");
        assert_eq!(show(12, 9), "-i");
        assert_eq!(show(6, 3), "-1");
        assert_eq!(show(12, 1), "ζ12^1");
        assert_eq!(CycInt::root(3, 1).unwrap().negate().to_string(), "-ω");
        assert_eq!(CycInt::from_integer(3, 2).unwrap().to_string(), "2");
        assert_eq!(CycInt::zero(5).unwrap().to_string(), "0");
        let mixed = CycInt::from_terms(5, &[(0, 2), (1, -1)]).unwrap();
        assert_eq!(mixed.to_string(), "2 - ζ5^1");
    }

    fn arb_cyc(order: usize) -> impl Strategy<Value = CycInt> {
        prop::collection::vec(-4i64..=4, order).prop_map(move |v| {
            CycInt::from_coeffs(order, v.into_iter().map(BigInt::from).collect()).unwrap()
        })
    }

    fn arb_triple() -> impl Strategy<Value = (CycInt, CycInt, CycInt)> {
        (1usize..=12).prop_flat_map(|m| (arb_cyc(m), arb_cyc(m), arb_cyc(m)))
    }

    proptest! {
        #[test]
        fn additive_inverse((a, _, _) in arb_triple()) {
            prop_assert!((&a + &a.negate()).is_zero());
        }

        #[test]
        fn mul_commutes_and_associates((a, b, c) in arb_triple()) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn conj_involution((a, _, _) in arb_triple()) {
            prop_assert_eq!(a.conj().conj(), a);
        }

        #[test]
        fn unit_norm_nonzero(m in 1usize..=24, k in 0i64..24) {
            let r = CycInt::root(m, k).unwrap();
            prop_assert!(!(&r * &r.conj()).is_zero());
            prop_assert_eq!(&r * &r.conj(), CycInt::one(m).unwrap());
        }

        #[test]
        fn embed_preserves_equality((a, b, _) in arb_triple(), factor in 1usize..=4) {
            let m2 = a.order() * factor;
            let ea = a.embed(m2).unwrap();
            let eb = b.embed(m2).unwrap();
            prop_assert_eq!(a == b, ea == eb);
            prop_assert_eq!(ea, a);
        }

        #[test]
        fn zero_test_matches_floats(m in 1usize..=24, mask in any::<u32>()) {
            let terms: Vec<(i64, i64)> = (0..m)
                .filter(|k| mask >> k & 1 == 1)
                .map(|k| (k as i64, 1))
                .collect();
            let v = CycInt::from_terms(m, &terms).unwrap();
            let (re, im) = v.to_complex();
            prop_assert_eq!(v.is_zero(), re.hypot(im) < 1e-9);
        }
    }
}
