//! Finite Grassmann algebras Λ_q.
//!
//! An element is a sparse map from basis monomials ζ^{i₁}⋯ζ^{iₖ} (stored as
//! bitmasks, generator `i` at bit `i - 1`) to coefficients. Products carry the
//! sign of the permutation that sorts the concatenated generator lists, and
//! monomials sharing a generator annihilate.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_traits::{Float, FromPrimitive};
use thiserror::Error;

use crate::scalar::Scalar;

/// Generator cap used when `SMECH_QCAP` is unset.
pub const DEFAULT_Q_CAP: u32 = 16;

/// Bitmask keys are `u32`, so no configuration can exceed this.
pub const MAX_Q: u32 = 32;

/// Current generator cap: `SMECH_QCAP` when set to a valid value, otherwise
/// [`DEFAULT_Q_CAP`]. Read once per process.
pub fn q_cap() -> u32 {
    static CAP: OnceLock<u32> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("SMECH_QCAP").ok().and_then(|v| v.trim().parse::<u32>().ok()).map(|v| v.min(MAX_Q)).unwrap_or(DEFAULT_Q_CAP)
    })
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrassmannError {
    #[error("dimension mismatch: Λ_{left} vs Λ_{right}")]
    DimensionMismatch { left: u32, right: u32 },
    #[error("generator count {q} exceeds cap {cap}")]
    CapExceeded { q: u32, cap: u32 },
    #[error("generator index {index} out of range 1..={q}")]
    GeneratorOutOfRange { index: u32, q: u32 },
    #[error("element with zero body is not invertible")]
    NotInvertible,
}

/// Grassmann parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_degree(degree: u32) -> Parity {
        if degree.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// `(-1)^{|a||b|}` as ±1.
    pub fn koszul_sign(self, other: Parity) -> f64 {
        if self.is_odd() && other.is_odd() {
            -1.0
        } else {
            1.0
        }
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        if self == rhs {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Grading of a possibly inhomogeneous element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grading {
    Homogeneous(Parity),
    Inhomogeneous,
}

impl Grading {
    pub fn parity(self) -> Option<Parity> {
        match self {
            Grading::Homogeneous(p) => Some(p),
            Grading::Inhomogeneous => None,
        }
    }
}

/// A basis monomial of Λ_q as a generator bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Blade(pub u32);

impl Blade {
    pub const ONE: Blade = Blade(0);

    /// The single generator ζ^index (1-based).
    pub fn generator(index: u32) -> Blade {
        debug_assert!((1..=MAX_Q).contains(&index));
        Blade(1 << (index - 1))
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn parity(self) -> Parity {
        Parity::of_degree(self.degree())
    }

    /// 1-based generator indices in ascending order.
    pub fn generators(self) -> impl Iterator<Item = u32> {
        let bits = self.0;
        (0..32u32).filter(move |i| bits & (1 << i) != 0).map(|i| i + 1)
    }

    pub fn fits(self, q: u32) -> bool {
        q >= 32 || self.0 >> q == 0
    }

    /// Product of two monomials: `None` when they share a generator,
    /// otherwise the sorted monomial and the sign of the sorting permutation.
    pub fn product(self, other: Blade) -> Option<(Blade, bool)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        // each generator of `other` moves left past the larger ones of `self`
        let mut swaps = 0u32;
        let mut rest = other.0;
        while rest != 0 {
            let j = rest.trailing_zeros();
            rest &= rest - 1;
            let above = if j >= 31 { 0 } else { self.0 >> (j + 1) };
            swaps += above.count_ones();
        }
        Some((Blade(self.0 | other.0), swaps % 2 == 1))
    }

    /// Column label used in trajectory files: `1` for the body, else `z1z3`.
    pub fn label(self) -> String {
        if self.0 == 0 {
            "1".to_string()
        } else {
            self.generators().map(|g| format!("z{g}")).collect()
        }
    }

    pub fn parse_label(label: &str) -> Option<Blade> {
        if label == "1" {
            return Some(Blade::ONE);
        }
        let mut bits = 0u32;
        let mut last = 0u32;
        for part in label.split('z').skip(1) {
            let g: u32 = part.parse().ok()?;
            if g == 0 || g > MAX_Q || g <= last {
                return None;
            }
            last = g;
            bits |= 1 << (g - 1);
        }
        if !label.starts_with('z') || bits == 0 {
            return None;
        }
        Some(Blade(bits))
    }

    /// All monomials of Λ_q with the given parity, in ascending bitmask order.
    pub fn all_with_parity(q: u32, parity: Parity) -> Vec<Blade> {
        (0..(1u64 << q)).map(|b| Blade(b as u32)).filter(|b| b.parity() == parity).collect()
    }
}

/// Element of the Grassmann algebra Λ_q.
///
/// Invariants: no stored coefficient is zero and every stored monomial only
/// uses generators 1..=q.
#[derive(Clone, PartialEq)]
pub struct GrassmannElement<T> {
    q: u32,
    terms: BTreeMap<Blade, T>,
}

impl<T: Scalar> GrassmannElement<T> {
    pub fn zero(q: u32) -> Result<Self, GrassmannError> {
        check_cap(q)?;
        Ok(GrassmannElement { q, terms: BTreeMap::new() })
    }

    pub fn scalar(q: u32, value: T) -> Result<Self, GrassmannError> {
        Self::from_terms(q, [(Blade::ONE, value)])
    }

    pub fn one(q: u32) -> Result<Self, GrassmannError> {
        Self::scalar(q, T::one())
    }

    /// The generator ζ^index, 1-based.
    pub fn generator(q: u32, index: u32) -> Result<Self, GrassmannError> {
        if index == 0 || index > q {
            return Err(GrassmannError::GeneratorOutOfRange { index, q });
        }
        Self::from_terms(q, [(Blade::generator(index), T::one())])
    }

    /// Builds an element, summing repeated monomials and dropping zeros.
    pub fn from_terms(q: u32, terms: impl IntoIterator<Item = (Blade, T)>) -> Result<Self, GrassmannError> {
        check_cap(q)?;
        let mut map: BTreeMap<Blade, T> = BTreeMap::new();
        for (blade, c) in terms {
            if !blade.fits(q) {
                let index = 32 - blade.0.leading_zeros();
                return Err(GrassmannError::GeneratorOutOfRange { index, q });
            }
            accumulate(&mut map, blade, c);
        }
        map.retain(|_, c| !c.is_zero());
        Ok(GrassmannElement { q, terms: map })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, &T)> {
        self.terms.iter().map(|(b, c)| (*b, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn component(&self, blade: Blade) -> T {
        self.terms.get(&blade).cloned().unwrap_or_else(T::zero)
    }

    /// Coefficient of the empty monomial.
    pub fn body(&self) -> T {
        self.component(Blade::ONE)
    }

    /// The element minus its body.
    pub fn soul(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&Blade::ONE);
        out
    }

    pub fn grading(&self) -> Grading {
        let mut seen: Option<Parity> = None;
        for blade in self.terms.keys() {
            let p = blade.parity();
            match seen {
                None => seen = Some(p),
                Some(s) if s != p => return Grading::Inhomogeneous,
                _ => {}
            }
        }
        Grading::Homogeneous(seen.unwrap_or(Parity::Even))
    }

    /// Part of the element with the given parity.
    pub fn parity_part(&self, parity: Parity) -> Self {
        GrassmannElement {
            q: self.q,
            terms: self.terms.iter().filter(|(b, _)| b.parity() == parity).map(|(b, c)| (*b, c.clone())).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, GrassmannError> {
        same_q(self.q, other.q)?;
        let mut terms = self.terms.clone();
        for (b, c) in &other.terms {
            accumulate(&mut terms, *b, c.clone());
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(GrassmannElement { q: self.q, terms })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, GrassmannError> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, GrassmannError> {
        same_q(self.q, other.q)?;
        let mut terms: BTreeMap<Blade, T> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((blade, negative)) = a.product(*b) {
                    let c = ca.clone() * cb.clone();
                    accumulate(&mut terms, blade, if negative { -c } else { c });
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(GrassmannElement { q: self.q, terms })
    }

    pub fn scale(&self, factor: &T) -> Self {
        let mut terms = BTreeMap::new();
        for (b, c) in &self.terms {
            let v = c.clone() * factor.clone();
            if !v.is_zero() {
                terms.insert(*b, v);
            }
        }
        GrassmannElement { q: self.q, terms }
    }

    fn neg_ref(&self) -> Self {
        GrassmannElement { q: self.q, terms: self.terms.iter().map(|(b, c)| (*b, -c.clone())).collect() }
    }

    /// Two-sided inverse, from the geometric series in the nilpotent part.
    pub fn inverse(&self) -> Result<Self, GrassmannError> {
        let body = self.body();
        if body.is_zero() {
            return Err(GrassmannError::NotInvertible);
        }
        let inv_body = T::one() / body;
        // a = b (1 + m) with m = soul / b; a⁻¹ = b⁻¹ Σ (-m)^k, m^(q+1) = 0
        let minus_m = self.soul().scale(&-inv_body.clone());
        let mut sum = Self::one(self.q)?;
        let mut power = Self::one(self.q)?;
        for _ in 0..self.q {
            power = power.try_mul(&minus_m)?;
            if power.is_zero() {
                break;
            }
            sum = sum.try_add(&power)?;
        }
        Ok(sum.scale(&inv_body))
    }

    /// Integer power; negative exponents go through [`inverse`](Self::inverse).
    pub fn powi(&self, n: i32) -> Result<Self, GrassmannError> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut out = Self::one(self.q)?;
        for _ in 0..n.unsigned_abs() {
            out = out.try_mul(&base)?;
        }
        Ok(out)
    }

    /// Image in Λ_{q'} for q' ≥ q under ζ^i ↦ ζ^i.
    pub fn embed(&self, q_new: u32) -> Result<Self, GrassmannError> {
        if q_new < self.q {
            return Err(GrassmannError::DimensionMismatch { left: self.q, right: q_new });
        }
        check_cap(q_new)?;
        Ok(GrassmannElement { q: q_new, terms: self.terms.clone() })
    }

    /// Applies an algebra homomorphism given by the images of the generators.
    /// `images[i]` is the image of ζ^{i+1}; all images must share one `q`.
    pub fn map_generators(&self, images: &[Self], target_q: u32) -> Result<Self, GrassmannError> {
        same_q(images.len() as u32, self.q)?;
        let mut out = Self::zero(target_q)?;
        for (blade, c) in &self.terms {
            let mut mono = Self::scalar(target_q, c.clone())?;
            for g in blade.generators() {
                mono = mono.try_mul(&images[(g - 1) as usize])?;
                if mono.is_zero() {
                    break;
                }
            }
            out = out.try_add(&mono)?;
        }
        Ok(out)
    }
}

impl<T: Scalar + Float + FromPrimitive> GrassmannElement<T> {
    /// Largest absolute coefficient (0 for the zero element).
    pub fn max_abs(&self) -> T {
        self.terms.values().fold(T::zero(), |m, c| if c.abs() > m { c.abs() } else { m })
    }

    pub fn is_finite(&self) -> bool {
        self.terms.values().all(|c| c.is_finite())
    }

    /// `f(self)` from the Taylor series at the body, `derivative(k)` being
    /// `f^(k)(body)`. The series terminates since the soul is nilpotent.
    pub fn apply_analytic(&self, mut derivative: impl FnMut(u32) -> T) -> Result<Self, GrassmannError> {
        let soul = self.soul();
        let mut out = Self::scalar(self.q, derivative(0))?;
        let mut power = Self::one(self.q)?;
        let mut factorial = T::one();
        let mut k = 0u32;
        loop {
            power = power.try_mul(&soul)?;
            if power.is_zero() {
                break;
            }
            k += 1;
            factorial = factorial * T::from_u32(k).unwrap_or_else(T::one);
            out = out.try_add(&power.scale(&(derivative(k) / factorial)))?;
        }
        Ok(out)
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for GrassmannElement<T> {
    /// Text form `c0 + c1*z1 + c12*z1^z2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (blade, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if *blade == Blade::ONE {
                write!(f, "{c}")?;
            } else {
                let wedge: Vec<String> = blade.generators().map(|g| format!("z{g}")).collect();
                write!(f, "{c}*{}", wedge.join("^"))?;
            }
        }
        Ok(())
    }
}

impl<T: fmt::Debug> fmt::Debug for GrassmannElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Λ{}", self.q)?;
        f.debug_map().entries(self.terms.iter().map(|(b, c)| (b.label(), c))).finish()
    }
}

fn accumulate<T: Scalar>(map: &mut BTreeMap<Blade, T>, blade: Blade, c: T) {
    match map.get_mut(&blade) {
        Some(existing) => *existing = existing.clone() + c,
        None => {
            map.insert(blade, c);
        }
    }
}

fn same_q(left: u32, right: u32) -> Result<(), GrassmannError> {
    if left == right {
        Ok(())
    } else {
        Err(GrassmannError::DimensionMismatch { left, right })
    }
}

fn check_cap(q: u32) -> Result<(), GrassmannError> {
    let cap = q_cap();
    if q > cap {
        Err(GrassmannError::CapExceeded { q, cap })
    } else {
        Ok(())
    }
}

// Operator sugar. These panic on dimension mismatch; use the `try_` methods
// where the operands come from different sources.

impl<T: Scalar> Add for &GrassmannElement<T> {
    type Output = GrassmannElement<T>;
    fn add(self, rhs: Self) -> GrassmannElement<T> {
        self.try_add(rhs).expect("Grassmann add")
    }
}

impl<T: Scalar> Sub for &GrassmannElement<T> {
    type Output = GrassmannElement<T>;
    fn sub(self, rhs: Self) -> GrassmannElement<T> {
        self.try_sub(rhs).expect("Grassmann sub")
    }
}

impl<T: Scalar> Mul for &GrassmannElement<T> {
    type Output = GrassmannElement<T>;
    fn mul(self, rhs: Self) -> GrassmannElement<T> {
        self.try_mul(rhs).expect("Grassmann mul")
    }
}

impl<T: Scalar> Neg for &GrassmannElement<T> {
    type Output = GrassmannElement<T>;
    fn neg(self) -> GrassmannElement<T> {
        self.neg_ref()
    }
}

impl<T: Scalar> Neg for GrassmannElement<T> {
    type Output = GrassmannElement<T>;
    fn neg(self) -> GrassmannElement<T> {
        self.neg_ref()
    }
}
