//! The decidable non-Archimedean ordered field: truncated Laurent series in
//! the canonical positive infinitesimal `eps`.
//!
//! A [`HyperSeries`] stores coefficients `a_v, a_(v+1), ...` of
//! `Σ a_i eps^i`. A series is either *exact* (every coefficient past the
//! stored ones is zero) or *truncated* at some order `k`, meaning only the
//! terms below `eps^k` are known. Exact inputs stay exact until a result
//! needs more than `window` terms.
//!
//! Order is decided by the sign of the leading coefficient, which agrees
//! with the ultrapower order for every nonprincipal ultrafilter since each
//! such value has a representative sequence of eventually constant sign.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed};

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::rational::{render_exact, Q};

pub const DEFAULT_WINDOW: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Zero,
    Infinitesimal,
    Appreciable,
    Unlimited,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Zero => "zero",
            Classification::Infinitesimal => "infinitesimal",
            Classification::Appreciable => "appreciable",
            Classification::Unlimited => "unlimited",
        }
    }

    pub fn is_limited(self) -> bool {
        self != Classification::Unlimited
    }

    /// Zero or infinitesimal.
    pub fn is_infinitesimal(self) -> bool {
        matches!(self, Classification::Zero | Classification::Infinitesimal)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HyperSeries {
    val: i32,
    coeffs: Vec<Coefficient>,
    window: usize,
    /// `Some(k)`: only terms below eps^k are known.
    order: Option<i32>,
}

impl HyperSeries {
    pub fn zero(window: usize) -> Self {
        HyperSeries { val: 0, coeffs: Vec::new(), window, order: None }
    }

    pub fn constant(c: Coefficient, window: usize) -> Self {
        HyperSeries { val: 0, coeffs: vec![c], window, order: None }.normalized_unchecked()
    }

    pub fn from_rational(v: Q, window: usize) -> Self {
        Self::constant(Coefficient::exact(v), window)
    }

    pub fn from_int(v: i64, window: usize) -> Self {
        Self::from_rational(crate::rational::q(v), window)
    }

    /// `c · eps^k`
    pub fn monomial(c: Coefficient, k: i32, window: usize) -> Self {
        HyperSeries { val: k, coeffs: vec![c], window, order: None }.normalized_unchecked()
    }

    /// The canonical positive infinitesimal.
    pub fn eps(window: usize) -> Self {
        Self::monomial(Coefficient::one(), 1, window)
    }

    /// `H = 1/eps`, an unlimited value.
    pub fn big_h(window: usize) -> Self {
        Self::monomial(Coefficient::one(), -1, window)
    }

    /// Builds `Σ coeffs[i] eps^(val+i)` (exact) and normalizes it.
    pub fn from_terms(val: i32, coeffs: Vec<Coefficient>, window: usize) -> Result<Self> {
        HyperSeries { val, coeffs, window, order: None }.normalize()
    }

    /// Same as [`from_terms`](Self::from_terms) but with a known truncation order.
    pub fn from_terms_truncated(val: i32, coeffs: Vec<Coefficient>, window: usize, order: i32) -> Result<Self> {
        HyperSeries { val, coeffs, window, order: Some(order) }.normalize()
    }

    pub fn valuation(&self) -> i32 {
        self.val
    }

    pub fn coeffs(&self) -> &[Coefficient] {
        &self.coeffs
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn with_window(mut self, window: usize) -> Result<Self> {
        self.window = window;
        self.normalize()
    }

    /// Truncation order, `None` for exact series.
    pub fn order(&self) -> Option<i32> {
        self.order
    }

    pub fn is_truncated(&self) -> bool {
        self.order.is_some()
    }

    /// Number of stored terms; smaller than the window when an operation
    /// narrowed it.
    pub fn known_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.order.is_none()
    }

    /// All coefficients are exact rationals.
    pub fn is_exact_rational(&self) -> bool {
        self.coeffs.iter().all(Coefficient::is_exact)
    }

    /// Coefficient of `eps^k`; zero outside the stored range (callers check
    /// the truncation order when it matters).
    pub fn coeff(&self, k: i32) -> Coefficient {
        if k < self.val {
            return Coefficient::zero();
        }
        self.coeffs.get((k - self.val) as usize).cloned().unwrap_or_else(Coefficient::zero)
    }

    fn end(&self) -> i32 {
        self.val + self.coeffs.len() as i32
    }

    /// First coefficient whose ball excludes zero.
    pub fn lead(&self) -> Option<(i32, &Coefficient)> {
        self.coeffs.iter().enumerate().find(|(_, c)| !c.is_negligible()).map(|(i, c)| (self.val + i as i32, c))
    }

    fn normalized_unchecked(self) -> Self {
        self.normalize().expect("single-term series are always representable")
    }

    /// Strips exactly-zero leading and trailing coefficients, enforces the
    /// window and the valuation floor `-window`.
    fn normalize(mut self) -> Result<Self> {
        let lead_zeros = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        self.coeffs.drain(..lead_zeros);
        self.val += lead_zeros as i32;
        if let Some(k) = self.order {
            let keep = (k - self.val).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        if self.coeffs.len() > self.window {
            self.coeffs.truncate(self.window);
            let cut = self.val + self.window as i32;
            self.order = Some(self.order.map_or(cut, |k| k.min(cut)));
        }
        if self.order.is_none() {
            while self.coeffs.last().is_some_and(Coefficient::is_zero) {
                self.coeffs.pop();
            }
        }
        if self.coeffs.is_empty() {
            return match self.order {
                None => Ok(HyperSeries::zero(self.window)),
                Some(k) => Err(Error::WindowCollapse { order: k }),
            };
        }
        if self.val < -(self.window as i32) {
            return Err(Error::WindowCollapse { order: self.val });
        }
        Ok(self)
    }

    pub fn neg(&self) -> Self {
        HyperSeries {
            val: self.val,
            coeffs: self.coeffs.iter().map(|c| c.scale(&-Q::one())).collect(),
            window: self.window,
            order: self.order,
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        let window = self.window.min(o.window);
        if self.is_zero() {
            return o.clone().with_window(window);
        }
        if o.is_zero() {
            return self.clone().with_window(window);
        }
        let order = match (self.order, o.order) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let lo = self.val.min(o.val);
        let mut hi = self.end().max(o.end());
        if let Some(k) = order {
            hi = hi.min(k);
        }
        let coeffs = (lo..hi.max(lo)).map(|k| self.coeff(k).add(&o.coeff(k))).collect();
        HyperSeries { val: lo, coeffs, window, order }.normalize()
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        if self == o {
            // x - x = 0 holds for the represented value whatever its tail.
            return Ok(HyperSeries::zero(self.window.min(o.window)));
        }
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let window = self.window.min(o.window);
        if self.is_zero() || o.is_zero() {
            return Ok(HyperSeries::zero(window));
        }
        let val = self.val + o.val;
        // Relative number of known terms of each factor.
        let rel = |s: &Self| s.order.map(|k| (k - s.val) as usize);
        let known = match (rel(self), rel(o)) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let full = self.coeffs.len() + o.coeffs.len() - 1;
        let len = known.map_or(full, |k| k.min(full)).min(window);
        let mut coeffs = vec![Coefficient::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        let order = if let Some(k) = known {
            Some(val + k.min(window) as i32)
        } else if full > window {
            Some(val + window as i32)
        } else {
            None
        };
        HyperSeries { val, coeffs, window, order }.normalize()
    }

    /// Multiplicative inverse through the window.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let lead = &self.coeffs[0];
        if lead.is_negligible() {
            return Err(Error::PrecisionUndecided);
        }
        let inv_lead = lead.recip()?;
        if self.coeffs.len() == 1 && self.order.is_none() {
            return HyperSeries { val: -self.val, coeffs: vec![inv_lead], window: self.window, order: None }
                .normalize();
        }
        let known = self.order.map_or(usize::MAX, |k| (k - self.val) as usize);
        let len = known.min(self.window);
        // y_0 = 1/a_0,  y_k = -(1/a_0) Σ_{j=1..k} a_j y_(k-j)
        let mut out: Vec<Coefficient> = Vec::with_capacity(len);
        out.push(inv_lead.clone());
        for k in 1..len {
            let mut acc = Coefficient::zero();
            for j in 1..=k {
                if let Some(a) = self.coeffs.get(j) {
                    if !a.is_zero() {
                        acc = acc.add(&a.mul(&out[k - j]));
                    }
                }
            }
            out.push(acc.mul(&inv_lead).scale(&-Q::one()));
        }
        let val = -self.val;
        HyperSeries { val, coeffs: out, window: self.window, order: Some(val + len as i32) }.normalize()
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        self.mul(&o.inverse()?)
    }

    pub fn powi(&self, n: i64) -> Result<Self> {
        let mut base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = HyperSeries::from_int(1, self.window);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &Coefficient) -> Result<Self> {
        self.mul(&HyperSeries::constant(c.clone(), self.window))
    }

    /// Drops every term at or beyond `eps^k`.
    pub fn truncate_at(&self, k: i32) -> Result<Self> {
        let order = Some(self.order.map_or(k, |o| o.min(k)));
        HyperSeries { val: self.val, coeffs: self.coeffs.clone(), window: self.window, order }.normalize()
    }

    /// Total order, decided by the sign of the leading coefficient of `o - self`.
    pub fn compare(&self, o: &Self) -> Result<Ordering> {
        let d = o.sub(self)?;
        for c in &d.coeffs {
            match c.sign() {
                Some(Ordering::Equal) => continue,
                // o - self > 0  ⇒  self < o
                Some(Ordering::Greater) => return Ok(Ordering::Less),
                Some(Ordering::Less) => return Ok(Ordering::Greater),
                None => return Err(Error::PrecisionUndecided),
            }
        }
        Ok(Ordering::Equal)
    }

    /// Sign relative to zero.
    pub fn signum(&self) -> Result<Ordering> {
        HyperSeries::zero(self.window).compare(self).map(Ordering::reverse)
    }

    /// Classification by the valuation of the first significant term.
    /// Coefficients indistinguishable from zero at the working precision are
    /// skipped.
    pub fn classify(&self) -> Classification {
        match self.lead() {
            None => Classification::Zero,
            Some((v, _)) if v < 0 => Classification::Unlimited,
            Some((0, _)) => Classification::Appreciable,
            Some(_) => Classification::Infinitesimal,
        }
    }

    /// The unique real infinitely close to a limited value.
    pub fn standard_part(&self) -> Result<Coefficient> {
        if self.classify() == Classification::Unlimited {
            return Err(Error::UnlimitedHasNoStandardPart);
        }
        if let Some(k) = self.order {
            if k <= 0 {
                return Err(Error::WindowCollapse { order: k });
            }
        }
        Ok(self.coeff(0))
    }

    /// The infinitesimal tail `x - st(x)`.
    pub fn infinitesimal_part(&self) -> Result<Self> {
        self.standard_part()?;
        let shifted = HyperSeries {
            val: self.val,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if self.val + i as i32 <= 0 { Coefficient::zero() } else { c.clone() })
                .collect(),
            window: self.window,
            order: self.order,
        };
        match shifted.normalize() {
            Ok(s) => Ok(s),
            Err(Error::WindowCollapse { order }) if order > 0 => Ok(HyperSeries::zero(self.window)),
            Err(e) => Err(e),
        }
    }

    /// Adequality: `self - o` is zero or infinitesimal.
    pub fn adequal(&self, o: &Self) -> bool {
        match self.sub(o) {
            Ok(d) => d.classify().is_infinitesimal(),
            // Only an O(eps^k) tail with k > 0 survives: infinitely close.
            Err(Error::WindowCollapse { order }) => order > 0,
            Err(_) => false,
        }
    }

    /// The coefficient list as exact rationals, if every coefficient is exact.
    pub fn exact_coeffs(&self) -> Option<Vec<Q>> {
        self.coeffs.iter().map(|c| c.as_exact().cloned()).collect()
    }
}

fn monomial_text(k: i32) -> Option<String> {
    match k {
        0 => None,
        1 => Some("eps".into()),
        -1 => Some("H".into()),
        k if k > 0 => Some(format!("eps^{k}")),
        k => Some(format!("H^{}", -k)),
    }
}

impl fmt::Display for HyperSeries {
    /// Terms in increasing eps-exponent, e.g. `H^2 + 2 + eps^2`; a truncated
    /// series ends in `+ O(eps^k)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let k = self.val + i as i32;
            let negative = c.value().is_negative();
            let mag = c.abs();
            let mag_text = if mag.is_exact() { render_exact(mag.value()) } else { mag.to_string() };
            let body = match monomial_text(k) {
                None => mag_text,
                Some(m) if mag.is_exact() && mag.value().is_one() => m,
                Some(m) => format!("{mag_text}*{m}"),
            };
            match (first, negative) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
            first = false;
        }
        if first && self.order.is_none() {
            f.write_str("0")?;
        }
        if let Some(k) = self.order {
            let tail = match k {
                0 => "O(1)".to_string(),
                k => format!("O({})", monomial_text(k).unwrap_or_default()),
            };
            if first {
                f.write_str(&tail)?;
            } else {
                write!(f, " + {tail}")?;
            }
        }
        Ok(())
    }
}
