//! Characteristic polynomials and exact root finding over Q and GF(p).
//!
//! Only roots in the ground field are needed: they drive the eigenspace
//! splitting of commutative semisimple algebras in the pointedness test.

use num::bigint::BigInt;
use num::integer::Integer;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::Matrix;
use super::scalar::{Field, Scalar};

/// Coefficients in ascending degree order; the leading coefficient is
/// nonzero except for the zero polynomial `[]`.
pub type Poly = Vec<Scalar>;

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn eval(p: &[Scalar], x: &Scalar) -> Scalar {
    let field = x.field();
    let mut acc = field.zero();
    for c in p.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

/// Exact polynomial division; panics if the remainder is nonzero.
pub fn div_exact(num: &[Scalar], den: &[Scalar]) -> Poly {
    assert!(!den.is_empty(), "division by zero polynomial");
    let field = den.last().unwrap().field();
    let mut rem: Vec<Scalar> = num.to_vec();
    let mut quot = vec![field.zero(); num.len().saturating_sub(den.len()) + 1];
    let lead_inv = den.last().unwrap().inv().expect("unit leading coefficient");
    while rem.len() >= den.len() && !rem.is_empty() {
        let c = &rem.last().unwrap().clone() * &lead_inv;
        let shift = rem.len() - den.len();
        quot[shift] = c.clone();
        for (i, d) in den.iter().enumerate() {
            rem[shift + i] = &rem[shift + i] - &(&c * d);
        }
        rem = trim(rem);
    }
    assert!(rem.is_empty(), "non-exact polynomial division");
    trim(quot)
}

/// Characteristic polynomial det(xI − A) by the Faddeev–LeVerrier recursion.
/// The recursion divides by 1..n, which is valid over Q always and over
/// GF(p) when p > n; callers enforce that restriction.
pub fn char_poly(a: &Matrix) -> Poly {
    assert_eq!(a.rows(), a.cols(), "char_poly of non-square matrix");
    let n = a.rows();
    let field = a.field();
    if let Field::Fp(p) = field {
        assert!(
            (p as u128) > n as u128,
            "Faddeev-LeVerrier needs p > matrix dimension"
        );
    }
    let mut coeffs = vec![field.zero(); n + 1];
    coeffs[n] = field.one();
    let mut m = Matrix::zero(field, n, n);
    let mut c = field.one();
    for k in 1..=n {
        // M_k = A·M_{k-1} + c_{n-k+1}·I  with c from the previous step
        m = a.mul(&m).add(&Matrix::identity(field, n).scale(&c));
        let am = a.mul(&m);
        let k_inv = field.integer(k as i64).inv().expect("k invertible");
        c = -&(&am.trace() * &k_inv);
        coeffs[n - k] = c.clone();
    }
    coeffs
}

/// All roots of `p` lying in the ground field, without multiplicity, in a
/// deterministic order. Over GF(p) the residues are enumerated directly,
/// which is only reasonable for desk-scale primes; larger primes are
/// reported as an error rather than guessed at.
pub fn field_roots(p: &[Scalar], field: Field) -> Result<Vec<Scalar>, RootsError> {
    let p = trim(p.to_vec());
    if p.len() <= 1 {
        return Ok(Vec::new());
    }
    match field {
        Field::Q => Ok(rational_roots(&p)),
        Field::Fp(q) => {
            if q > 1 << 16 {
                return Err(RootsError::PrimeTooLarge(q));
            }
            let mut roots = Vec::new();
            for v in 0..q {
                let x = Scalar::Fp { p: q, value: v };
                if eval(&p, &x).is_zero() {
                    roots.push(x);
                }
            }
            Ok(roots)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootsError {
    /// Root enumeration over GF(p) is capped at p ≤ 2^16.
    PrimeTooLarge(u64),
}

impl std::fmt::Display for RootsError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RootsError::PrimeTooLarge(p) => {
                write!(f, "exact root enumeration over GF({p}) exceeds the supported prime bound")
            }
        }
    }
}

impl std::error::Error for RootsError {}

/// Rational roots by the rational-root theorem after clearing denominators:
/// p/q in lowest terms must satisfy p | a_0 and q | a_n.
fn rational_roots(p: &[Scalar]) -> Vec<Scalar> {
    let mut ints: Vec<BigInt> = Vec::with_capacity(p.len());
    let mut lcm = BigInt::one();
    for c in p {
        let Scalar::Q(r) = c else { unreachable!() };
        lcm = lcm.lcm(r.denom());
    }
    for c in p {
        let Scalar::Q(r) = c else { unreachable!() };
        ints.push(r.numer() * (&lcm / r.denom()));
    }
    let mut roots: Vec<BigRational> = Vec::new();
    // Factor out x^k first so the constant term is nonzero.
    let mut low = 0;
    while ints[low].is_zero() {
        low += 1;
    }
    if low > 0 {
        roots.push(BigRational::zero());
    }
    let ints = &ints[low..];
    if ints.len() > 1 {
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        for num in divisors(&a0) {
            for den in divisors(&an) {
                if num.gcd(&den) != BigInt::one() {
                    continue;
                }
                for sign in [1, -1] {
                    let cand = BigRational::new(&num * BigInt::from(sign), den.clone());
                    if eval_rational(ints, &cand).is_zero() {
                        roots.push(cand);
                    }
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    roots.into_iter().map(Scalar::Q).collect()
}

fn eval_rational(ints: &[BigInt], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in ints.iter().rev() {
        acc = acc * x + BigRational::from_integer(c.clone());
    }
    acc
}

/// Positive divisors by trial division. Coefficients stay desk-scale here;
/// a hard cap keeps pathological inputs from spinning.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![];
    }
    let cap = n.to_u64().unwrap_or(u64::MAX);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d: u64 = 1;
    while (d as u128) * (d as u128) <= cap as u128 && d < 20_000_000 {
        let db = BigInt::from(d);
        if (&n % &db).is_zero() {
            small.push(db.clone());
            let q = &n / &db;
            if q != db {
                large.push(q);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Field::Q.integer(n)
    }

    #[test]
    fn char_poly_of_diagonal() {
        // diag(1, 2): x^2 - 3x + 2
        let a = Matrix::from_rows(Field::Q, vec![vec![q(1), q(0)], vec![q(0), q(2)]]);
        assert_eq!(char_poly(&a), vec![q(2), q(-3), q(1)]);
    }

    #[test]
    fn char_poly_of_nilpotent() {
        let a = Matrix::from_rows(Field::Q, vec![vec![q(0), q(1)], vec![q(0), q(0)]]);
        assert_eq!(char_poly(&a), vec![q(0), q(0), q(1)]);
    }

    #[test]
    fn rational_roots_found() {
        // (x - 1/2)(x + 3) = x^2 + 5/2 x - 3/2
        let p = vec![
            Field::Q.parse("-3/2").unwrap(),
            Field::Q.parse("5/2").unwrap(),
            q(1),
        ];
        let roots = field_roots(&p, Field::Q).unwrap();
        assert_eq!(
            roots,
            vec![q(-3), Field::Q.parse("1/2").unwrap()]
        );
    }

    #[test]
    fn irreducible_has_no_rational_roots() {
        // x^2 + 1
        let p = vec![q(1), q(0), q(1)];
        assert!(field_roots(&p, Field::Q).unwrap().is_empty());
    }

    #[test]
    fn roots_mod_p() {
        // x^2 + 1 over GF(5): roots 2 and 3
        let f = Field::Fp(5);
        let p = vec![f.integer(1), f.integer(0), f.integer(1)];
        let roots = field_roots(&p, f).unwrap();
        assert_eq!(roots, vec![f.integer(2), f.integer(3)]);
    }

    #[test]
    fn exact_division() {
        // (x^2 - 1) / (x - 1) = x + 1
        let num = vec![q(-1), q(0), q(1)];
        let den = vec![q(-1), q(1)];
        assert_eq!(div_exact(&num, &den), vec![q(1), q(1)]);
    }
}
