use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient field: a prime field `F_p` or the rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Field {
    Fp { p: u32 },
    Q,
}

impl Field {
    /// Prime field of order `p`; rejects composites.
    pub fn prime(p: u64) -> Result<Self> {
        if p < 2 || p > u32::MAX as u64 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field::Fp { p: p as u32 })
    }

    pub fn rationals() -> Self {
        Field::Q
    }

    pub fn characteristic(&self) -> u32 {
        match self {
            Field::Fp { p } => *p,
            Field::Q => 0,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Field::Fp { .. } => Scalar::Fp(0),
            Field::Q => Scalar::Q(BigRational::zero()),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            Field::Fp { p } => Scalar::Fp(v.rem_euclid(*p as i64) as u32),
            Field::Q => Scalar::Q(BigRational::from_integer(BigInt::from(v))),
        }
    }

    /// Checks that `s` is a canonical element of this field.
    pub fn contains(&self, s: &Scalar) -> bool {
        match (self, s) {
            (Field::Fp { p }, Scalar::Fp(v)) => v < p,
            (Field::Q, Scalar::Q(_)) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Fp { p } => write!(f, "F_{p}"),
            Field::Q => write!(f, "Q"),
        }
    }
}

impl std::str::FromStr for Field {
    type Err = Error;

    /// Accepts `q` or `fp:P`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "q" {
            return Ok(Field::Q);
        }
        let p = t
            .strip_prefix("fp:")
            .ok_or_else(|| Error::parse("field", format!("expected `q` or `fp:P`, got `{s}`")))?;
        let p: u64 = p
            .parse()
            .map_err(|_| Error::parse("field", format!("bad prime `{p}`")))?;
        Field::prime(p)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 4 {
        return n >= 2;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A single field element. Residues are reduced, fractions are in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Fp(u32),
    Q(BigRational),
}

impl Scalar {
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Fp(v) => *v == 0,
            Scalar::Q(q) => q.is_zero(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Fp(v) => write!(f, "{v}"),
            Scalar::Q(q) => write!(f, "{}/{}", q.numer(), q.denom()),
        }
    }
}

/// Parses `num/den` or a bare integer into a canonical rational.
pub(crate) fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Monomorphic arithmetic used by the elimination kernels.
pub(crate) trait Arith {
    type E: Clone + PartialEq + fmt::Debug;
    fn zero(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
    /// `a - b * c`
    fn sub_mul(&self, a: &Self::E, b: &Self::E, c: &Self::E) -> Self::E {
        self.sub(a, &self.mul(b, c))
    }
    fn to_scalar(&self, a: &Self::E) -> Scalar;
    fn from_scalar(&self, s: &Scalar) -> Self::E;
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Zp(pub u32);

impl Arith for Zp {
    type E = u32;

    #[inline]
    fn zero(&self) -> u32 {
        0
    }
    #[inline]
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    #[inline]
    fn add(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 + *b as u64) % self.0 as u64) as u32
    }
    #[inline]
    fn sub(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 + self.0 as u64 - *b as u64) % self.0 as u64) as u32
    }
    #[inline]
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        ((*a as u64 * *b as u64) % self.0 as u64) as u32
    }
    #[inline]
    fn neg(&self, a: &u32) -> u32 {
        if *a == 0 {
            0
        } else {
            self.0 - *a
        }
    }
    fn inv(&self, a: &u32) -> u32 {
        assert!(*a != 0, "inverse of zero in F_{}", self.0);
        // Fermat: a^(p-2)
        let p = self.0 as u64;
        let mut base = *a as u64 % p;
        let mut exp = p - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        acc as u32
    }
    #[inline]
    fn sub_mul(&self, a: &u32, b: &u32, c: &u32) -> u32 {
        let p = self.0 as u64;
        let prod = (*b as u64 * *c as u64) % p;
        ((*a as u64 + p - prod) % p) as u32
    }
    fn to_scalar(&self, a: &u32) -> Scalar {
        Scalar::Fp(*a)
    }
    fn from_scalar(&self, s: &Scalar) -> u32 {
        match s {
            Scalar::Fp(v) => *v % self.0,
            Scalar::Q(_) => panic!("rational scalar used in F_{}", self.0),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Qf;

impl Arith for Qf {
    type E = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        if a.is_integer() && b.is_integer() {
            return BigRational::from_integer(a.numer() + b.numer());
        }
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        if a.is_integer() && b.is_integer() {
            return BigRational::from_integer(a.numer() - b.numer());
        }
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        if a.is_integer() && b.is_integer() {
            return BigRational::from_integer(a.numer() * b.numer());
        }
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero in Q");
        a.recip()
    }
    fn sub_mul(&self, a: &BigRational, b: &BigRational, c: &BigRational) -> BigRational {
        if b.is_zero() || c.is_zero() {
            a.clone()
        } else if a.is_integer() && b.is_integer() && c.is_integer() {
            BigRational::from_integer(a.numer() - b.numer() * c.numer())
        } else {
            a - b * c
        }
    }
    fn to_scalar(&self, a: &BigRational) -> Scalar {
        Scalar::Q(a.clone())
    }
    fn from_scalar(&self, s: &Scalar) -> BigRational {
        match s {
            Scalar::Q(q) => q.clone(),
            Scalar::Fp(_) => panic!("residue scalar used in Q"),
        }
    }
}

#[allow(dead_code)]
pub(crate) fn rational_is_canonical(q: &BigRational) -> bool {
    use num_integer::Integer;
    q.denom().is_positive() && q.numer().gcd(q.denom()).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_check() {
        assert!(Field::prime(2).is_ok());
        assert!(Field::prime(7).is_ok());
        assert_eq!(Field::prime(9), Err(Error::NotPrime(9)));
        assert_eq!(Field::prime(1), Err(Error::NotPrime(1)));
    }

    #[test]
    fn residues_reduce() {
        let f = Field::prime(5).unwrap();
        assert_eq!(f.from_i64(-1), Scalar::Fp(4));
        assert_eq!(f.from_i64(12), Scalar::Fp(2));
        let z = Zp(5);
        assert_eq!(z.mul(&z.inv(&3), &3), 1);
        assert_eq!(z.sub_mul(&1, &2, &3), 0);
    }

    #[test]
    fn fractions_canonical() {
        let q = parse_rational("4/-6").unwrap();
        assert!(rational_is_canonical(&q));
        assert_eq!(Scalar::Q(q).to_string(), "-2/3");
        assert_eq!(Field::Q.zero().to_string(), "0/1");
        assert!(parse_rational("1/0").is_none());
    }

    #[test]
    fn field_from_str() {
        assert_eq!("fp:5".parse::<Field>().unwrap(), Field::Fp { p: 5 });
        assert_eq!("Q".parse::<Field>().unwrap(), Field::Q);
        assert!("fp:6".parse::<Field>().is_err());
    }
}
