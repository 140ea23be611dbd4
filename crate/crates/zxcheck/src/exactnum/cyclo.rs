//! Exact arithmetic in cyclotomic fields ℚ(ζ_N).
//!
//! A [`Cyclotomic`] value is a polynomial in ζ_N = e^{2πi/N} with rational
//! coefficients, kept reduced modulo the N-th cyclotomic polynomial Φ_N.
//! Reduction makes the representation canonical: two values are equal exactly
//! when their coefficient vectors agree after lifting to a common order, and
//! zero-testing is a plain comparison against the zero vector. Orders are kept
//! to multiples of 8 so that √2 = ζ₈ − ζ₈³ is always available, and are
//! capped at [`MAX_ORDER`] to bound the coefficient dimension φ(N).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Largest supported cyclotomic order N.
pub const MAX_ORDER: u64 = 240;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    /// The requested value would need ℚ(ζ_N) with N beyond [`MAX_ORDER`];
    /// callers are expected to fall back to floating point.
    #[error("cyclotomic order {0} exceeds the supported maximum 240")]
    OrderTooLarge(u64),
    #[error("division by zero in ℚ(ζ_{0})")]
    DivisionByZero(u64),
    #[error("order {from} does not divide {to}, so the value cannot be lifted")]
    NotASubfield { from: u64, to: u64 },
}

/// Euler's totient φ(n), by trial-division factorization (n ≤ 240 here).
pub fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Exact division of integer polynomials, `num / den`, requiring `den` monic
/// and the division to leave no remainder. Coefficient index = degree.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = num.len() - 1;
    let dd = den.len() - 1;
    debug_assert!(den[dd].is_one(), "divisor must be monic");
    let mut rem: Vec<BigInt> = num.to_vec();
    let mut quot = vec![BigInt::zero(); dn - dd + 1];
    for k in (0..=dn - dd).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for j in 0..=dd {
            let t = &den[j] * &c;
            rem[k + j] -= t;
        }
        quot[k] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "division must be exact");
    quot
}

/// Coefficients of the n-th cyclotomic polynomial Φ_n (integer, monic),
/// computed as (x^n − 1) / ∏_{d|n, d<n} Φ_d and memoized.
fn cyclotomic_poly(n: u64) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return Arc::clone(p);
    }
    let mut poly = Vec::with_capacity(n as usize + 1);
    poly.push(BigInt::from(-1));
    poly.extend((1..n).map(|_| BigInt::zero()));
    poly.push(BigInt::one());
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_poly(d);
            poly = poly_div_exact(&poly, &phi_d);
        }
    }
    let arc = Arc::new(poly);
    cache
        .lock()
        .unwrap()
        .insert(n, Arc::clone(&arc));
    arc
}

/// Reduction table for order N: row k holds the coefficients (length φ(N))
/// of x^{φ(N)+k} mod Φ_N, for k in 0..N−φ(N). Since Φ_N is monic with integer
/// coefficients, the rows are integer vectors. Memoized per order.
fn reduction_rows(order: u64) -> Arc<Vec<Vec<BigInt>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<Vec<BigInt>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rows) = cache.lock().unwrap().get(&order) {
        return Arc::clone(rows);
    }
    let phi_poly = cyclotomic_poly(order);
    let phi = phi_poly.len() - 1;
    let count = (order as usize).saturating_sub(phi);
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(count);
    if count > 0 {
        // x^φ = −(Φ_N − x^φ)
        rows.push((0..phi).map(|i| -&phi_poly[i]).collect());
        for k in 1..count {
            let top = rows[k - 1][phi - 1].clone();
            let mut next = vec![BigInt::zero(); phi];
            for i in 1..phi {
                next[i] = rows[k - 1][i - 1].clone();
            }
            if !top.is_zero() {
                for i in 0..phi {
                    let t = &top * &rows[0][i];
                    next[i] += t;
                }
            }
            rows.push(next);
        }
    }
    let arc = Arc::new(rows);
    cache
        .lock()
        .unwrap()
        .insert(order, Arc::clone(&arc));
    arc
}

fn rat_mul_int(r: &BigRational, i: &BigInt) -> BigRational {
    BigRational::new(r.numer() * i, r.denom().clone())
}

/// An element of ℚ(ζ_N), reduced modulo Φ_N.
///
/// Binary operations lift both operands to the lcm of their orders. They
/// panic if that lcm exceeds [`MAX_ORDER`]; every public entry point that
/// builds cyclotomic values validates the combined order up front and reports
/// [`CycloError::OrderTooLarge`] instead, so the panic marks an internal
/// invariant violation, not a user-reachable state.
#[derive(Debug, Clone)]
pub struct Cyclotomic {
    order: u64,
    /// Length φ(order); coefficient i belongs to ζ_order^i.
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    fn assert_valid_order(order: u64) {
        assert!(
            order % 8 == 0 && order <= MAX_ORDER && order > 0,
            "internal error: cyclotomic order {order} is not a multiple of 8 in 8..=240"
        );
    }

    /// Smallest valid order accommodating e^{2πi/q}: lcm(8, q).
    pub fn required_order(q: u64) -> Result<u64, CycloError> {
        let q = q.max(1);
        let n = q.lcm(&8);
        if n > MAX_ORDER {
            Err(CycloError::OrderTooLarge(n))
        } else {
            Ok(n)
        }
    }

    pub fn zero(order: u64) -> Self {
        Self::assert_valid_order(order);
        let phi = euler_phi(order) as usize;
        Cyclotomic {
            order,
            coeffs: vec![BigRational::zero(); phi],
        }
    }

    pub fn one(order: u64) -> Self {
        Self::from_rational(BigRational::one(), order)
    }

    pub fn from_rational(r: BigRational, order: u64) -> Self {
        let mut v = Self::zero(order);
        v.coeffs[0] = r;
        v
    }

    pub fn from_integer(i: i64, order: u64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(i)), order)
    }

    /// ζ_order^exp for exp < order, reduced mod Φ_N.
    fn from_power(order: u64, exp: u64) -> Self {
        Self::assert_valid_order(order);
        debug_assert!(exp < order);
        let phi = euler_phi(order) as usize;
        let mut coeffs = vec![BigRational::zero(); phi];
        if (exp as usize) < phi {
            coeffs[exp as usize] = BigRational::one();
        } else {
            let rows = reduction_rows(order);
            for (i, c) in rows[exp as usize - phi].iter().enumerate() {
                if !c.is_zero() {
                    coeffs[i] = BigRational::from(c.clone());
                }
            }
        }
        Cyclotomic { order, coeffs }
    }

    /// e^{2πi·p/q}, represented at order lcm(8, q).
    pub fn root_of_unity(p: i64, q: u64) -> Result<Self, CycloError> {
        let q = q.max(1);
        let order = Self::required_order(q)?;
        let exp = p.rem_euclid(q as i64) as u64 * (order / q);
        Ok(Self::from_power(order, exp))
    }

    /// e^{iπ·num/den} — convenience for phases given as rational multiples of π.
    pub fn phase_pi(num: i64, den: u64) -> Result<Self, CycloError> {
        Self::root_of_unity(num, 2 * den.max(1))
    }

    /// √2 = ζ₈ − ζ₈³, at order 8.
    pub fn sqrt_two() -> Self {
        Self::sqrt_two_at(8)
    }

    /// √2 represented at the given order (a multiple of 8).
    pub fn sqrt_two_at(order: u64) -> Self {
        Self::assert_valid_order(order);
        let a = Self::from_power(order, order / 8);
        let b = Self::from_power(order, 3 * order / 8);
        &a - &b
    }

    /// 1/√2 = (ζ₈ − ζ₈³)/2.
    pub fn inv_sqrt_two_at(order: u64) -> Self {
        Self::sqrt_two_at(order).scale(&BigRational::new(BigInt::one(), BigInt::from(2)))
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Reinterpret in ℚ(ζ_M) for a multiple M of the current order, fixing the value.
    pub fn lift(&self, new_order: u64) -> Result<Self, CycloError> {
        if new_order == self.order {
            return Ok(self.clone());
        }
        if new_order > MAX_ORDER {
            return Err(CycloError::OrderTooLarge(new_order));
        }
        if new_order % self.order != 0 {
            return Err(CycloError::NotASubfield {
                from: self.order,
                to: new_order,
            });
        }
        let k = new_order / self.order;
        let phi_new = euler_phi(new_order) as usize;
        let rows = reduction_rows(new_order);
        let mut out = vec![BigRational::zero(); phi_new];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = i as u64 * k;
            if (e as usize) < phi_new {
                out[e as usize] += c;
            } else {
                for (j, r) in rows[e as usize - phi_new].iter().enumerate() {
                    if !r.is_zero() {
                        out[j] += rat_mul_int(c, r);
                    }
                }
            }
        }
        Ok(Cyclotomic {
            order: new_order,
            coeffs: out,
        })
    }

    /// Lift both values to the lcm of their orders.
    pub fn lift_pair(a: &Self, b: &Self) -> Result<(Self, Self), CycloError> {
        if a.order == b.order {
            return Ok((a.clone(), b.clone()));
        }
        let n = a.order.lcm(&b.order);
        if n > MAX_ORDER {
            return Err(CycloError::OrderTooLarge(n));
        }
        Ok((a.lift(n)?, b.lift(n)?))
    }

    fn lifted_pair_or_panic(a: &Self, b: &Self) -> (Self, Self) {
        Self::lift_pair(a, b).unwrap_or_else(|e| {
            panic!(
                "internal error: unvalidated cyclotomic order combination \
                 ({} with {}): {e}",
                a.order, b.order
            )
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The value as a rational if it lies in ℚ (only the degree-0 coefficient
    /// nonzero — canonical reduction makes this exact).
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Complex conjugate: ζ^i ↦ ζ^{N−i}.
    pub fn conj(&self) -> Self {
        let order = self.order;
        let mut out = Self::zero(order);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = if i == 0 { 0 } else { order - i as u64 };
            let term = Self::from_power(order, e).scale(c);
            out = &out + &term;
        }
        out
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in ℚ[x]
    /// against Φ_N (irreducible, so every nonzero element is invertible).
    pub fn inverse(&self) -> Result<Self, CycloError> {
        if self.is_zero() {
            return Err(CycloError::DivisionByZero(self.order));
        }
        let phi = self.coeffs.len();
        let modulus: Vec<BigRational> = cyclotomic_poly(self.order)
            .iter()
            .map(|c| BigRational::from(c.clone()))
            .collect();
        let mut r0 = modulus;
        let mut r1 = self.coeffs.clone();
        poly_trim(&mut r1);
        let mut t0: Vec<BigRational> = vec![BigRational::zero()];
        let mut t1: Vec<BigRational> = vec![BigRational::one()];
        loop {
            if poly_is_zero(&r1) {
                unreachable!("Φ_N is irreducible, gcd with a nonzero element is a unit");
            }
            if r1.len() == 1 {
                break;
            }
            let (q, r) = poly_divmod(&r0, &r1);
            r0 = std::mem::replace(&mut r1, r);
            let qt1 = poly_mul(&q, &t1);
            let t_new = poly_sub(&t0, &qt1);
            t0 = std::mem::replace(&mut t1, t_new);
        }
        let inv_c = r1[0].recip();
        let mut coeffs = vec![BigRational::zero(); phi];
        for (i, c) in t1.iter().enumerate() {
            debug_assert!(i < phi);
            coeffs[i] = c * &inv_c;
        }
        Ok(Cyclotomic {
            order: self.order,
            coeffs,
        })
    }

    /// Floating-point value Σ cᵢ·e^{2πi·i/N}; within 1e-12 of the exact value
    /// for all supported orders.
    pub fn to_complex(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let angle = 2.0 * std::f64::consts::PI * i as f64 / self.order as f64;
            let cf = c.to_f64().expect("rational should convert to f64");
            acc += Complex64::from_polar(cf, angle);
        }
        acc
    }

    /// Exact equality test that reports an error instead of panicking when
    /// the orders cannot be combined within the cap.
    pub fn try_equal(&self, other: &Self) -> Result<bool, CycloError> {
        let (x, y) = Self::lift_pair(self, other)?;
        Ok(x.coeffs == y.coeffs)
    }
}

fn poly_is_zero(p: &[BigRational]) -> bool {
    p.iter().all(Zero::is_zero)
}

fn poly_trim(p: &mut Vec<BigRational>) {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    poly_trim(&mut out);
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    poly_trim(&mut out);
    out
}

/// Polynomial division with remainder over ℚ; returns (quotient, remainder).
fn poly_divmod(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let dd = den.len() - 1;
    debug_assert!(!den[dd].is_zero());
    let mut rem = num.to_vec();
    poly_trim(&mut rem);
    if rem.len() <= dd || (rem.len() == 1 && rem[0].is_zero()) {
        return (vec![BigRational::zero()], rem);
    }
    let dn = rem.len() - 1;
    let lead_inv = den[dd].recip();
    let mut quot = vec![BigRational::zero(); dn - dd + 1];
    for k in (0..=dn - dd).rev() {
        let c = &rem[k + dd] * &lead_inv;
        if c.is_zero() {
            continue;
        }
        for j in 0..=dd {
            let t = &den[j] * &c;
            rem[k + j] -= t;
        }
        quot[k] = c;
    }
    poly_trim(&mut rem);
    poly_trim(&mut quot);
    (quot, rem)
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Self::lifted_pair_or_panic(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyclotomic {}

impl std::ops::Add for &Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (mut a, b) = Cyclotomic::lifted_pair_or_panic(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a
    }
}

impl std::ops::Sub for &Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (mut a, b) = Cyclotomic::lifted_pair_or_panic(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x -= y;
        }
        a
    }
}

impl std::ops::Neg for &Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl std::ops::Mul for &Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: &Cyclotomic) -> Cyclotomic {
        let (a, b) = Cyclotomic::lifted_pair_or_panic(self, rhs);
        let phi = a.coeffs.len();
        let mut acc = vec![BigRational::zero(); 2 * phi - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    acc[i + j] += x * y;
                }
            }
        }
        let rows = reduction_rows(a.order);
        let mut coeffs: Vec<BigRational> = acc[..phi].to_vec();
        for (k, c) in acc.iter().enumerate().skip(phi) {
            if c.is_zero() {
                continue;
            }
            for (i, r) in rows[k - phi].iter().enumerate() {
                if !r.is_zero() {
                    coeffs[i] += rat_mul_int(c, r);
                }
            }
        }
        Cyclotomic {
            order: a.order,
            coeffs,
        }
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &BigRational::zero();
            let mag = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_coeff = mag.is_one() && i > 0;
            if !unit_coeff {
                write!(f, "{mag}")?;
            }
            if i > 0 {
                if !unit_coeff {
                    write!(f, "·")?;
                }
                write!(f, "ζ{}", self.order)?;
                if i > 1 {
                    write!(f, "^{i}")?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
