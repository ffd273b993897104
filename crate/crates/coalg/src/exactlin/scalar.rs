//! Exact field scalars: arbitrary-precision rationals and prime-field residues.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

/// The ground field of a computation.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Field {
    /// The rational numbers, with arbitrary-precision arithmetic.
    Q,
    /// The prime field GF(p).
    Fp(u64),
}

impl Field {
    pub fn zero(self) -> Scalar {
        match self {
            Field::Q => Scalar::Q(BigRational::zero()),
            Field::Fp(p) => Scalar::Fp { p, value: 0 },
        }
    }

    pub fn one(self) -> Scalar {
        match self {
            Field::Q => Scalar::Q(BigRational::one()),
            Field::Fp(p) => Scalar::Fp { p, value: 1 % p },
        }
    }

    pub fn integer(self, n: i64) -> Scalar {
        match self {
            Field::Q => Scalar::Q(BigRational::from_integer(BigInt::from(n))),
            Field::Fp(p) => Scalar::Fp {
                p,
                value: (n as i128).rem_euclid(p as i128) as u64,
            },
        }
    }

    /// Parse an exact scalar from a string: an integer `"-3"` or a fraction
    /// `"3/2"`. Over GF(p) a fraction denotes division in the field.
    pub fn parse(self, s: &str) -> Result<Scalar, String> {
        let s = s.trim();
        let (num_str, den_str) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let num: BigInt = num_str
            .parse()
            .map_err(|_| format!("malformed integer `{num_str}`"))?;
        let den: BigInt = match den_str {
            Some(d) => d
                .parse()
                .map_err(|_| format!("malformed integer `{d}`"))?,
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        match self {
            Field::Q => Ok(Scalar::Q(BigRational::new(num, den))),
            Field::Fp(p) => {
                let pb = BigInt::from(p);
                let n = ((num % &pb) + &pb) % &pb;
                let d = ((den % &pb) + &pb) % &pb;
                let n = n.to_u64().expect("reduced residue fits in u64");
                let d = d.to_u64().expect("reduced residue fits in u64");
                if d == 0 {
                    return Err(format!("denominator of `{s}` vanishes mod {p}"));
                }
                let inv = mod_inverse(d, p).ok_or_else(|| format!("`{d}` not invertible mod {p}"))?;
                Ok(Scalar::Fp {
                    p,
                    value: mod_mul(n, inv, p),
                })
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Q => write!(f, "Q"),
            Field::Fp(p) => write!(f, "GF({p})"),
        }
    }
}

/// An exact field element. Rationals are kept in lowest terms with positive
/// denominator (the canonical form `num::BigRational` maintains); prime-field
/// residues are reduced representatives in `0..p`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    Fp { p: u64, value: u64 },
}

fn mod_mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, p);
        }
        base = mod_mul(base, base, p);
        exp >>= 1;
    }
    acc
}

fn mod_inverse(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        return None;
    }
    Some(mod_pow(a, p - 2, p))
}

/// Deterministic Miller–Rabin, exact for all u64 inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mod_mul(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Q(_) => Field::Q,
            Scalar::Fp { p, .. } => Field::Fp(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_zero(),
            Scalar::Fp { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_one(),
            Scalar::Fp { p, value } => *value == 1 % p,
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::Q(r) => {
                if r.is_zero() {
                    None
                } else {
                    Some(Scalar::Q(r.recip()))
                }
            }
            Scalar::Fp { p, value } => mod_inverse(*value, *p).map(|v| Scalar::Fp { p: *p, value: v }),
        }
    }

    /// Exact division; panics on a zero divisor.
    pub fn div(&self, rhs: &Scalar) -> Scalar {
        self * &rhs.inv().expect("division by zero scalar")
    }

    fn check_same_field(&self, rhs: &Scalar) {
        assert_eq!(self.field(), rhs.field(), "scalar field mismatch");
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(r) => write!(f, "{r}"),
            Scalar::Fp { value, .. } => write!(f, "{value}"),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(r) => write!(f, "{r}"),
            Scalar::Fp { p, value } => write!(f, "{value} (mod {p})"),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => a.cmp(b),
            (Scalar::Fp { p: p1, value: v1 }, Scalar::Fp { p: p2, value: v2 }) => {
                (p1, v1).cmp(&(p2, v2))
            }
            (Scalar::Q(_), Scalar::Fp { .. }) => Ordering::Less,
            (Scalar::Fp { .. }, Scalar::Q(_)) => Ordering::Greater,
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.check_same_field(rhs);
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Fp { p, value: a }, Scalar::Fp { value: b, .. }) => Scalar::Fp {
                p: *p,
                value: ((*a as u128 + *b as u128) % *p as u128) as u64,
            },
            _ => unreachable!(),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.check_same_field(rhs);
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a - b),
            (Scalar::Fp { p, value: a }, Scalar::Fp { value: b, .. }) => Scalar::Fp {
                p: *p,
                value: ((*a as u128 + (*p - *b) as u128) % *p as u128) as u64,
            },
            _ => unreachable!(),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.check_same_field(rhs);
        match (self, rhs) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Fp { p, value: a }, Scalar::Fp { value: b, .. }) => Scalar::Fp {
                p: *p,
                value: mod_mul(*a, *b, *p),
            },
            _ => unreachable!(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::Fp { p, value } => Scalar::Fp {
                p: *p,
                value: if *value == 0 { 0 } else { p - value },
            },
        }
    }
}

/// Absolute "size" used only to pick small pivots over Q; over GF(p) all
/// nonzero entries are equally good.
pub(crate) fn pivot_weight(s: &Scalar) -> usize {
    match s {
        Scalar::Q(r) => (r.numer().abs().bits() + r.denom().bits()) as usize,
        Scalar::Fp { .. } => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_canonical_form() {
        let f = Field::Q;
        let a = f.parse("4/6").unwrap();
        let b = f.parse("2/3").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "2/3");
        let c = f.parse("-4/-6").unwrap();
        assert_eq!(c, b);
        let d = f.parse("3/-6").unwrap();
        assert_eq!(d.to_string(), "-1/2");
    }

    #[test]
    fn rational_field_axioms_spotcheck() {
        let f = Field::Q;
        let a = f.parse("2/3").unwrap();
        let b = f.parse("-5/7").unwrap();
        assert_eq!(&(&a + &b) - &b, a);
        assert_eq!((&a * &a.inv().unwrap()), f.one());
        assert!(f.zero().inv().is_none());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::Fp(7);
        let a = f.integer(5);
        let b = f.integer(4);
        assert_eq!(&a * &b, f.integer(6)); // 20 = 6 mod 7
        assert_eq!(&a + &b, f.integer(2));
        assert_eq!(a.inv().unwrap(), f.integer(3)); // 5*3 = 15 = 1
        assert_eq!(f.parse("1/2").unwrap(), f.integer(4)); // 2*4 = 1 mod 7
        assert_eq!(-&f.integer(0), f.integer(0));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(Field::Q.parse("1/0").is_err());
        assert!(Field::Fp(5).parse("1/5").is_err()); // 5 = 0 mod 5
    }

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(is_prime(101));
        assert!(is_prime(10007));
        assert!(!is_prime(1));
        assert!(!is_prime(91));
        assert!(is_prime(4294967311)); // first prime above 2^32
        assert!(!is_prime(4294967297)); // 641 * 6700417
    }
}
