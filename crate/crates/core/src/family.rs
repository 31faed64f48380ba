//! Parameter space of the vulnerable `Q(ζ_p, √d)` family.
//!
//! A triple `(p, d, q)` is admissible when `p` is an odd prime, `d > 1` is
//! squarefree, `d ≡ 2, 3 (mod 4)`, `gcd(d, p) = 1`, `q` is an odd prime with
//! `q ≡ 1 (mod p)`, and `d` is a nonresidue modulo `q`. Then `q` splits
//! completely in `Q(ζ_p)` and is inert in `Q(√d)`, so it has residue
//! degree 2 in the composite field.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffield::{is_prime, legendre};

const SQUAREFREE_TRIAL_LIMIT: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    PNotOddPrime,
    DNotAboveOne,
    DNotSquarefree,
    DSquarefreeUndecided,
    DNotTwoOrThreeModFour,
    DNotCoprimeToP,
    QNotOddPrime,
    QNotOneModP,
    DNotNonresidueModQ,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Violation::PNotOddPrime => "p is not an odd prime",
            Violation::DNotAboveOne => "d must be greater than 1",
            Violation::DNotSquarefree => "d is not squarefree",
            Violation::DSquarefreeUndecided => "squarefreeness of d could not be decided",
            Violation::DNotTwoOrThreeModFour => "d is not 2 or 3 mod 4",
            Violation::DNotCoprimeToP => "d is not coprime to p",
            Violation::QNotOddPrime => "q is not an odd prime",
            Violation::QNotOneModP => "q is not 1 mod p",
            Violation::DNotNonresidueModQ => "d is not a quadratic nonresidue mod q",
        };
        f.write_str(s)
    }
}

/// A validated `(p, d, q)` triple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FamilyParams {
    pub p: u64,
    pub d: u64,
    pub q: u64,
    /// `2(p-1)`
    pub deg: usize,
    /// `log2 |disc(O_K)|`
    pub log2_disc: f64,
}

impl FamilyParams {
    /// `|disc|^{1/(2·deg)}`, the factor between `r` and `r0`.
    pub fn root_volume(&self) -> f64 {
        2f64.powf(self.log2_disc / (2.0 * self.deg as f64))
    }

    /// Width `r` whose scaled width is `r0`.
    pub fn r_for_r0(&self, r0: f64) -> f64 {
        r0 * self.root_volume()
    }
}

/// Squarefree test: trial division to 10^6, then exact reasoning about the
/// cofactor. Errors when the cofactor is too large to decide.
pub fn is_squarefree(n: u64) -> Result<bool> {
    if n == 0 {
        return Ok(false);
    }
    let mut c = n;
    let mut f = 2u64;
    while f <= SQUAREFREE_TRIAL_LIMIT && f * f <= c {
        if c.is_multiple_of(f) {
            c /= f;
            if c.is_multiple_of(f) {
                return Ok(false);
            }
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if c == 1 || f * f > c {
        // c is 1 or a prime
        return Ok(true);
    }
    // Every prime factor of c exceeds 10^6 from here on.
    let s = c.isqrt();
    if s * s == c {
        return Ok(false);
    }
    if is_prime(c) {
        return Ok(true);
    }
    // c = a·b with a, b > 10^6; a hidden square needs at least three such factors.
    if c < SQUAREFREE_TRIAL_LIMIT.pow(3) {
        return Ok(true);
    }
    Err(Error::Undecided(n))
}

fn d_violations(p: u64, d: u64) -> Vec<Violation> {
    let mut v = Vec::new();
    if p == 2 || !is_prime(p) {
        v.push(Violation::PNotOddPrime);
    }
    if d <= 1 {
        v.push(Violation::DNotAboveOne);
    } else {
        match is_squarefree(d) {
            Ok(true) => {}
            Ok(false) => v.push(Violation::DNotSquarefree),
            Err(_) => v.push(Violation::DSquarefreeUndecided),
        }
    }
    if d % 4 != 2 && d % 4 != 3 {
        v.push(Violation::DNotTwoOrThreeModFour);
    }
    if p > 0 && gcd(d, p) != 1 {
        v.push(Violation::DNotCoprimeToP);
    }
    v
}

fn q_violations(p: u64, d: u64, q: u64) -> Vec<Violation> {
    let mut v = Vec::new();
    if q == 2 || !is_prime(q) {
        v.push(Violation::QNotOddPrime);
        if p > 0 && q % p != 1 {
            v.push(Violation::QNotOneModP);
        }
        return v;
    }
    if p > 0 && q % p != 1 {
        v.push(Violation::QNotOneModP);
    }
    if legendre(d as i64, q).map(|s| s != -1).unwrap_or(true) {
        v.push(Violation::DNotNonresidueModQ);
    }
    v
}

/// Checks every family condition and reports all violations at once.
pub fn validate(p: u64, d: u64, q: u64) -> std::result::Result<FamilyParams, Vec<Violation>> {
    let mut v = d_violations(p, d);
    v.extend(q_violations(p, d, q));
    if !v.is_empty() {
        return Err(v);
    }
    let deg = 2 * (p - 1) as usize;
    let log2_disc = 2.0 * (p as f64 - 2.0) * (p as f64).log2() + (p as f64 - 1.0) * (4.0 * d as f64).log2();
    Ok(FamilyParams { p, d, q, deg, log2_disc })
}

/// All primes `q ∈ [q_min, q_max]` completing `(p, d)` to a valid triple,
/// ascending.
pub fn search_q(p: u64, d: u64, q_min: u64, q_max: u64) -> Result<Vec<FamilyParams>> {
    let bad = d_violations(p, d);
    if !bad.is_empty() {
        return Err(Error::InvalidFamily(bad));
    }
    let mut out = Vec::new();
    if q_min > q_max {
        return Ok(out);
    }
    // q ≡ 1 (mod p): start at the first such value ≥ q_min
    let mut q = q_min + (p + 1 - q_min % p) % p;
    if q == 1 {
        q += p;
    }
    while q <= q_max {
        if let Ok(params) = validate(p, d, q) {
            out.push(params);
        }
        q += p;
    }
    Ok(out)
}

/// The `d' = d + 4kq` for `k = 1..=k_max` that remain valid.
pub fn extend_d(p: u64, q: u64, d: u64, k_max: u64) -> Result<Vec<FamilyParams>> {
    validate(p, d, q).map_err(Error::InvalidFamily)?;
    Ok((1..=k_max).filter_map(|k| validate(p, d + 4 * k * q, q).ok()).collect())
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn validate_examples() {
        let t = validate(43, 4871, 173).unwrap();
        assert_eq!(t.deg, 84);
        let bad = validate(3, 4, 13).unwrap_err();
        assert!(bad.contains(&Violation::DNotSquarefree));
        // 4 is a square mod 13 as well
        assert_eq!(bad, vec![Violation::DNotSquarefree, Violation::DNotTwoOrThreeModFour, Violation::DNotNonresidueModQ]);
        assert_eq!(validate(3, 2, 7).unwrap_err(), vec![Violation::DNotNonresidueModQ]);
        assert!(validate(3, 2, 13).is_ok());
        assert!(validate(5, 10, 11).unwrap_err().contains(&Violation::DNotCoprimeToP));
        assert!(validate(4, 2, 13).unwrap_err().contains(&Violation::PNotOddPrime));
        assert!(validate(3, 2, 15).unwrap_err().contains(&Violation::QNotOddPrime));
    }

    #[test]
    fn all_table_rows_validate() {
        for (p, d, q) in [
            (31, 4967, 311),
            (43, 4871, 173),
            (61, 4643, 367),
            (83, 4903, 167),
            (103, 4951, 619),
            (109, 4919, 1091),
            (151, 100447, 907),
            (181, 100267, 1087),
        ] {
            assert!(validate(p, d, q).is_ok(), "({p}, {d}, {q})");
        }
    }

    #[test]
    fn search_examples() {
        let qs: Vec<u64> = search_q(3, 2, 3, 20).unwrap().iter().map(|f| f.q).collect();
        // 19 ≡ 1 (mod 3) and 19 ≡ 3 (mod 8), so (2/19) = −1 as well
        assert_eq!(qs, vec![13, 19]);
        let qs: Vec<u64> = search_q(3, 2, 3, 18).unwrap().iter().map(|f| f.q).collect();
        assert_eq!(qs, vec![13]);
        let qs: Vec<u64> = search_q(43, 4871, 100, 200).unwrap().iter().map(|f| f.q).collect();
        assert!(qs.contains(&173));
        assert!(search_q(3, 2, 20, 3).unwrap().is_empty());
        assert!(search_q(3, 4, 3, 20).is_err());
    }

    #[test]
    fn extend_examples() {
        assert_eq!(54 % 9, 0);
        let ds: Vec<u64> = extend_d(3, 13, 2, 2).unwrap().iter().map(|f| f.d).collect();
        assert_eq!(ds, vec![106]);
        for f in extend_d(43, 173, 4871, 50).unwrap() {
            assert_eq!(f.d % (4 * 173), 4871 % (4 * 173));
        }
    }

    #[test]
    fn squarefree() {
        assert!(is_squarefree(4871).unwrap());
        assert!(!is_squarefree(54).unwrap());
        assert!(is_squarefree(106).unwrap());
        assert!(!is_squarefree(1_000_003u64 * 1_000_003).unwrap());
        assert!(is_squarefree(1_000_003u64 * 1_000_033).unwrap());
        assert!(!is_squarefree(1_000_003u64 * 1_000_003 * 3).unwrap());
        let naive = |n: u64| (2..).take_while(|f| f * f <= n).all(|f| !n.is_multiple_of(f * f));
        for n in 1..3000 {
            assert_eq!(is_squarefree(n).unwrap(), naive(n), "{n}");
        }
    }

    proptest! {
        #[test]
        fn search_has_no_false_positives(p_idx in 0usize..6, d in 2u64..5000) {
            let p = [3u64, 5, 7, 11, 13, 43][p_idx];
            if d_violations(p, d).is_empty() {
                for f in search_q(p, d, 3, 3000).unwrap() {
                    prop_assert!(validate(f.p, f.d, f.q).is_ok());
                }
            }
        }
    }
}
