//! Polynomials in the deformation parameter `hbar` with exact rational
//! coefficients.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num::{One, Zero};

use crate::Rational;

/// An element of `Q[hbar]`, stored densely by power. Trailing zeros are
/// never stored, so the zero polynomial is the empty vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HPoly {
    coeffs: Vec<Rational>,
}

impl HPoly {
    pub fn zero() -> Self {
        HPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c.into()))
    }

    /// `c * hbar^k`
    pub fn monomial(c: Rational, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        HPoly { coeffs }
    }

    pub fn hbar() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut p = HPoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree in `hbar`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Lowest power of `hbar` with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// Nonzero `(power, coefficient)` pairs in increasing power.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        HPoly { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Multiply by `hbar^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        HPoly { coeffs }
    }

    /// Exact division by `hbar`; `None` when the constant term is nonzero.
    pub fn div_hbar(&self) -> Option<Self> {
        match self.coeffs.first() {
            None => Some(Self::zero()),
            Some(c) if c.is_zero() => Some(HPoly { coeffs: self.coeffs[1..].to_vec() }),
            Some(_) => None,
        }
    }

    /// Value at `hbar = 0`.
    pub fn at_zero(&self) -> Rational {
        self.coeff(0)
    }

    /// Drop all powers above `max_power`.
    pub fn truncate(&self, max_power: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(max_power + 1);
        Self::from_coeffs(coeffs)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }
}

impl From<Rational> for HPoly {
    fn from(c: Rational) -> Self {
        HPoly::constant(c)
    }
}

impl AddAssign<&HPoly> for HPoly {
    fn add_assign(&mut self, rhs: &HPoly) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), Rational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
        self.trim();
    }
}

impl SubAssign<&HPoly> for HPoly {
    fn sub_assign(&mut self, rhs: &HPoly) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), Rational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
        self.trim();
    }
}

impl Add<&HPoly> for &HPoly {
    type Output = HPoly;
    fn add(self, rhs: &HPoly) -> HPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&HPoly> for &HPoly {
    type Output = HPoly;
    fn sub(self, rhs: &HPoly) -> HPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&HPoly> for &HPoly {
    type Output = HPoly;
    fn mul(self, rhs: &HPoly) -> HPoly {
        if self.is_zero() || rhs.is_zero() {
            return HPoly::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        HPoly::from_coeffs(coeffs)
    }
}

impl Neg for &HPoly {
    type Output = HPoly;
    fn neg(self) -> HPoly {
        HPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for HPoly {
    type Output = HPoly;
    fn neg(self) -> HPoly {
        -&self
    }
}

pub(crate) fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Write the coefficient of a term in a sum, including the joining sign.
/// Single-term coefficients print bare (`-2*`, `hbar*`); others are
/// parenthesized. A unit coefficient on a nonempty body prints nothing.
pub(crate) fn write_coeff(f: &mut fmt::Formatter<'_>, first: bool, c: &HPoly, has_body: bool) -> fmt::Result {
    let single = c.terms().count() == 1;
    let (k, x) = c.terms().next().expect("nonzero coefficient");
    let neg = single && x < &Rational::zero();
    if !first {
        write!(f, "{}", if neg { " - " } else { " + " })?;
    } else if neg {
        write!(f, "-")?;
    }
    let shown = if neg { -c } else { c.clone() };
    let sep = if has_body { "*" } else { "" };
    if !single {
        return write!(f, "({shown}){sep}");
    }
    if k == 0 && shown.coeff(0).is_one() && has_body {
        return Ok(());
    }
    write!(f, "{shown}{sep}")
}

impl fmt::Display for HPoly {
    /// Prints e.g. `3/2 - 2*hbar + hbar^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms() {
            let neg = c < &Rational::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = abs.is_one();
            match k {
                0 => write!(f, "{}", fmt_rational(&abs))?,
                _ => {
                    if !unit {
                        write!(f, "{}*", fmt_rational(&abs))?;
                    }
                    if k == 1 {
                        write!(f, "hbar")?;
                    } else {
                        write!(f, "hbar^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn arithmetic_trims_and_divides() {
        let p = &HPoly::from_int(2) + &HPoly::monomial(q(1, 2), 2);
        let m = &p - &HPoly::from_int(2);
        assert_eq!(m.valuation(), Some(2));
        assert_eq!(m.div_hbar().unwrap(), HPoly::monomial(q(1, 2), 1));
        assert!(p.div_hbar().is_none());
        assert!((&p - &p).is_zero());
        let sq = &HPoly::hbar() * &HPoly::hbar();
        assert_eq!(sq, HPoly::monomial(q(1, 1), 2));
    }

    #[test]
    fn display() {
        let p = HPoly::from_coeffs(vec![q(3, 2), q(-2, 1), q(1, 1)]);
        assert_eq!(p.to_string(), "3/2 - 2*hbar + hbar^2");
        assert_eq!((-HPoly::hbar()).to_string(), "-hbar");
    }
}
