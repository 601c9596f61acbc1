//! Exact scalars: rationals and Gaussian rationals.
//!
//! Both serialize as text ("p/q", "p/q+r/s i") so that arbitrary precision
//! survives a round trip through JSON.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse(format!("empty rational in {s:?}")));
    }
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(
            BigInt::from_str(t).map_err(|_| bad())?,
        )),
    }
}

pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Element of Q(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        GaussRational {
            re,
            im: Rational::zero(),
        }
    }

    pub fn i() -> Self {
        GaussRational {
            re: Rational::zero(),
            im: Rational::one(),
        }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRational::new(int(re), int(im))
    }

    pub fn conj(&self) -> Self {
        GaussRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// |z|^2 = re^2 + im^2.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "inverse of zero Gaussian rational");
        GaussRational {
            re: &self.re / &n,
            im: -(&self.im / &n),
        }
    }

    /// `i^k` for any integer k.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => GaussRational::one(),
            1 => GaussRational::i(),
            2 => -GaussRational::one(),
            _ => -GaussRational::i(),
        }
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write!(f, "{} i", self.im);
        }
        if self.im.is_negative() {
            write!(f, "{}-{} i", self.re, -self.im.clone())
        } else {
            write!(f, "{}+{} i", self.re, self.im)
        }
    }
}

impl FromStr for GaussRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty Gaussian rational".into()));
        }
        let Some(body) = t.strip_suffix('i') else {
            return Ok(GaussRational::real(parse_rational(&t)?));
        };
        // split at the last sign that is not the leading one
        let split = body
            .char_indices()
            .skip(1)
            .filter(|(_, c)| *c == '+' || *c == '-')
            .map(|(k, _)| k)
            .last();
        let imag = |txt: &str| -> Result<Rational> {
            match txt {
                "" | "+" => Ok(Rational::one()),
                "-" => Ok(-Rational::one()),
                other => parse_rational(other.trim_start_matches('+')),
            }
        };
        match split {
            Some(k) => Ok(GaussRational::new(
                parse_rational(&body[..k])?,
                imag(&body[k..])?,
            )),
            None => Ok(GaussRational::new(Rational::zero(), imag(body)?)),
        }
    }
}

impl Zero for GaussRational {
    fn zero() -> Self {
        GaussRational::new(Rational::zero(), Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRational {
    fn one() -> Self {
        GaussRational::real(Rational::one())
    }
}

impl Add for GaussRational {
    type Output = GaussRational;
    fn add(self, o: Self) -> Self {
        GaussRational::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for GaussRational {
    type Output = GaussRational;
    fn sub(self, o: Self) -> Self {
        GaussRational::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for GaussRational {
    type Output = GaussRational;
    fn mul(self, o: Self) -> Self {
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        GaussRational::new(re, im)
    }
}

impl Div for GaussRational {
    type Output = GaussRational;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.inv()
    }
}

impl Neg for GaussRational {
    type Output = GaussRational;
    fn neg(self) -> Self {
        GaussRational::new(-self.re, -self.im)
    }
}

impl AddAssign for GaussRational {
    fn add_assign(&mut self, o: Self) {
        self.re += o.re;
        self.im += o.im;
    }
}

impl SubAssign for GaussRational {
    fn sub_assign(&mut self, o: Self) {
        self.re -= o.re;
        self.im -= o.im;
    }
}

impl MulAssign for GaussRational {
    fn mul_assign(&mut self, o: Self) {
        *self = self.clone() * o;
    }
}

/// The operations the linear algebra kernel needs from a coefficient field.
///
/// Implemented for `Rational` (conjugation is the identity) and
/// `GaussRational`.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_rational(r: &Rational) -> Self;
    fn conj(&self) -> Self;
    /// Real part; used for the sign of Hermitian diagonal entries.
    fn real_part(&self) -> Rational;
    fn is_real(&self) -> bool;
    fn to_text(&self) -> String;
    fn parse_text(s: &str) -> Result<Self>;
    /// Multiplies `v` by a nonzero scalar so that it has integral, primitive
    /// coordinates. Only meaningful over Q; the default leaves `v` unchanged.
    fn normalize_vector(_v: &mut [Self]) {}
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn real_part(&self) -> Rational {
        self.clone()
    }
    fn is_real(&self) -> bool {
        true
    }
    fn to_text(&self) -> String {
        format_rational(self)
    }
    fn parse_text(s: &str) -> Result<Self> {
        parse_rational(s)
    }
    fn normalize_vector(v: &mut [Self]) {
        use num_integer::Integer;
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for x in v.iter().filter(|x| !x.is_zero()) {
            den = den.lcm(x.denom());
            num = num.gcd(x.numer());
        }
        if num.is_zero() {
            return;
        }
        let scale = Rational::new(den, num);
        for x in v.iter_mut() {
            *x = &*x * &scale;
        }
    }
}

impl Scalar for GaussRational {
    fn from_rational(r: &Rational) -> Self {
        GaussRational::real(r.clone())
    }
    fn conj(&self) -> Self {
        GaussRational::conj(self)
    }
    fn real_part(&self) -> Rational {
        self.re.clone()
    }
    fn is_real(&self) -> bool {
        GaussRational::is_real(self)
    }
    fn to_text(&self) -> String {
        self.to_string()
    }
    fn parse_text(s: &str) -> Result<Self> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_stay_reduced() {
        let r = rat(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(&r * &(Rational::one() / &r), Rational::one());
    }

    #[test]
    fn gauss_text_round_trip() {
        for s in ["1/2+3/4 i", "-1/2-3 i", "5", "-7/3", "2 i", "-1 i"] {
            let z: GaussRational = s.parse().unwrap();
            let back: GaussRational = z.to_string().parse().unwrap();
            assert_eq!(z, back, "{s}");
        }
        assert_eq!("i".parse::<GaussRational>().unwrap(), GaussRational::i());
        assert_eq!(
            "1-i".parse::<GaussRational>().unwrap(),
            GaussRational::from_ints(1, -1)
        );
        assert!("1/0".parse::<GaussRational>().is_err());
        assert!("x".parse::<GaussRational>().is_err());
    }

    #[test]
    fn i_powers() {
        assert_eq!(GaussRational::i_pow(-2), -GaussRational::one());
        assert_eq!(GaussRational::i_pow(3), -GaussRational::i());
        assert_eq!(
            GaussRational::i() * GaussRational::i(),
            GaussRational::i_pow(2)
        );
    }

    #[test]
    fn division_is_exact() {
        let a = GaussRational::new(rat(1, 3), rat(-2, 5));
        let b = GaussRational::new(rat(7, 2), rat(1, 9));
        assert_eq!((a.clone() / b.clone()) * b, a);
    }

    #[test]
    fn normalize_makes_primitive_integers() {
        let mut v = vec![rat(1, 2), rat(-3, 4), Rational::zero()];
        Rational::normalize_vector(&mut v);
        assert_eq!(v, vec![int(2), int(-3), int(0)]);
    }
}
