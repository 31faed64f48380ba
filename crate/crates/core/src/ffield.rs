//! Arithmetic in `F_q` and in the quadratic extension `F_{q^2} = F_q[√d]`.
//!
//! Residues are plain `u64` values in `[0, q)`. Products go through `u128`,
//! so any odd prime below 2^63 is supported; the workbench only ever uses
//! moduli of a few thousand.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bound for the trial-division stage of [`is_prime`].
const TRIAL_DIVISION_LIMIT: u64 = 1 << 20;

/// Strong-pseudoprime bases that are deterministic for every `n < 2^64`.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
pub fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, q: u64) -> u64 {
    let mut acc = 1 % q;
    base %= q;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, q);
        }
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo `q` by extended Euclid. `None` when `gcd(a, q) != 1`.
pub fn inv_mod(a: u64, q: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % q as i128, q as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(q as i128) as u64)
}

/// Reduces a signed integer into `[0, q)`.
#[inline]
pub fn reduce_signed(x: i64, q: u64) -> u64 {
    x.rem_euclid(q as i64) as u64
}

/// Deterministic primality test for the full `u64` range: trial division
/// up to 2^20, then a fixed-base strong-pseudoprime battery.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut f = 17u64;
    while f < TRIAL_DIVISION_LIMIT {
        if f * f > n {
            return true;
        }
        if n.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    miller_rabin(n)
}

fn miller_rabin(n: u64) -> bool {
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'bases: for &a in MR_BASES.iter() {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors of `n`, ascending.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f * f <= n {
        if n.is_multiple_of(f) {
            out.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Legendre symbol `(a/q)` for an odd prime `q`.
pub fn legendre(a: i64, q: u64) -> Result<i8> {
    if q == 2 || !is_prime(q) {
        return Err(Error::NotOddPrime(q));
    }
    let a = reduce_signed(a, q);
    if a == 0 {
        return Ok(0);
    }
    Ok(if pow_mod(a, (q - 1) / 2, q) == 1 { 1 } else { -1 })
}

/// Smallest generator of `F_q^*`.
pub fn multiplicative_generator(q: u64) -> u64 {
    let factors = prime_factors(q - 1);
    (2..q)
        .find(|&g| factors.iter().all(|&l| pow_mod(g, (q - 1) / l, q) != 1))
        .unwrap_or(1)
}

/// Returns an element of exact multiplicative order `order` in `F_q`,
/// namely `g^((q-1)/order)` for the smallest generator `g`.
pub fn element_of_order(order: u64, q: u64) -> Result<u64> {
    if order == 0 || !(q - 1).is_multiple_of(order) {
        return Err(Error::NoElementOfOrder { order, q });
    }
    let g = multiplicative_generator(q);
    Ok(pow_mod(g, (q - 1) / order, q))
}

/// Multiplicative order of a nonzero residue.
pub fn order_of(x: u64, q: u64) -> u64 {
    let mut n = q - 1;
    for l in prime_factors(q - 1) {
        while n.is_multiple_of(l) && pow_mod(x, n / l, q) == 1 {
            n /= l;
        }
    }
    n
}

/// An element `u + v·√d` of `F_{q^2}`; `v` is the coefficient of `√d`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fq2 {
    pub u: u64,
    pub v: u64,
}

impl Fq2 {
    pub const ZERO: Fq2 = Fq2 { u: 0, v: 0 };
    pub const ONE: Fq2 = Fq2 { u: 1, v: 0 };

    pub fn new(u: u64, v: u64) -> Self {
        Fq2 { u, v }
    }

    /// Whether the element lies in the prime subfield.
    pub fn in_base_field(&self) -> bool {
        self.v == 0
    }
}

impl fmt::Display for Fq2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}·√d", self.u, self.v)
    }
}

/// A prime modulus together with its quadratic extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCtx {
    q: u64,
    d_red: u64,
    alpha_p: Option<(u64, u64)>,
}

impl FieldCtx {
    /// Context over `q` using the smallest quadratic nonresidue as `d`.
    pub fn new(q: u64) -> Result<Self> {
        if q == 2 || !is_prime(q) {
            return Err(Error::NotOddPrime(q));
        }
        let d = (2..q)
            .find(|&d| pow_mod(d, (q - 1) / 2, q) == q - 1)
            .expect("odd prime has a nonresidue");
        Ok(FieldCtx { q, d_red: d, alpha_p: None })
    }

    /// Context with the given `d`, which must be a nonresidue modulo `q`.
    pub fn with_nonresidue(q: u64, d: i64) -> Result<Self> {
        if legendre(d, q)? != -1 {
            return Err(Error::NotNonresidue { d, q });
        }
        Ok(FieldCtx { q, d_red: reduce_signed(d, q), alpha_p: None })
    }

    /// Attaches an element of exact order `p` (the image of `ζ_p`).
    pub fn with_order_p(mut self, p: u64) -> Result<Self> {
        let a = find_order_p_element(p, &self)?;
        self.alpha_p = Some((p, a));
        Ok(self)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn d_red(&self) -> u64 {
        self.d_red
    }

    /// The attached order-`p` element, if any, as `(p, alpha)`.
    pub fn alpha_p(&self) -> Option<(u64, u64)> {
        self.alpha_p
    }

    // --- F_q ---

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.q)
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        inv_mod(a, self.q)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.q)
    }

    // --- F_{q^2} ---

    pub fn embed(&self, a: u64) -> Fq2 {
        Fq2 { u: a % self.q, v: 0 }
    }

    /// The basis element `√d`.
    pub fn sqrt_d(&self) -> Fq2 {
        Fq2 { u: 0, v: 1 }
    }

    #[inline]
    pub fn add2(&self, x: Fq2, y: Fq2) -> Fq2 {
        Fq2 { u: self.add(x.u, y.u), v: self.add(x.v, y.v) }
    }

    #[inline]
    pub fn sub2(&self, x: Fq2, y: Fq2) -> Fq2 {
        Fq2 { u: self.sub(x.u, y.u), v: self.sub(x.v, y.v) }
    }

    #[inline]
    pub fn neg2(&self, x: Fq2) -> Fq2 {
        Fq2 { u: self.neg(x.u), v: self.neg(x.v) }
    }

    #[inline]
    pub fn mul2(&self, x: Fq2, y: Fq2) -> Fq2 {
        let q = self.q as u128;
        let (xu, xv, yu, yv) = (x.u as u128, x.v as u128, y.u as u128, y.v as u128);
        let u = (xu * yu + (xv * yv % q) * self.d_red as u128) % q;
        let v = (xu * yv + xv * yu) % q;
        Fq2 { u: u as u64, v: v as u64 }
    }

    #[inline]
    pub fn scale2(&self, c: u64, x: Fq2) -> Fq2 {
        Fq2 { u: self.mul(c, x.u), v: self.mul(c, x.v) }
    }

    /// Norm `x · x̄ = u² − d v²`, an element of `F_q`.
    pub fn norm(&self, x: Fq2) -> u64 {
        self.sub(self.mul(x.u, x.u), self.mul(self.d_red, self.mul(x.v, x.v)))
    }

    pub fn inv2(&self, x: Fq2) -> Option<Fq2> {
        let n_inv = self.inv(self.norm(x))?;
        Some(self.scale2(n_inv, frobenius(x, self)))
    }

    pub fn pow2(&self, mut base: Fq2, mut e: u64) -> Fq2 {
        let mut acc = Fq2::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul2(acc, base);
            }
            base = self.mul2(base, base);
            e >>= 1;
        }
        acc
    }

    /// Smallest generator of `F_{q^2}^*` in `(v, u)` lexicographic order.
    pub fn generator2(&self) -> Fq2 {
        let order = self.q * self.q - 1;
        let factors = prime_factors(order);
        for v in 1..self.q {
            for u in 0..self.q {
                let g = Fq2 { u, v };
                if factors.iter().all(|&l| self.pow2(g, order / l) != Fq2::ONE) {
                    return g;
                }
            }
        }
        unreachable!("F_q^2 is cyclic")
    }

    /// Element of exact order `order` in `F_{q^2}^*`.
    pub fn element_of_order2(&self, order: u64) -> Result<Fq2> {
        let group = self.q * self.q - 1;
        if order == 0 || !group.is_multiple_of(order) {
            return Err(Error::NoElementOfOrder { order, q: self.q * self.q });
        }
        Ok(self.pow2(self.generator2(), group / order))
    }
}

/// Element of exact order `p` (prime) in `F_q`: `g^((q-1)/p)` for the first
/// `g` whose image is not 1.
pub fn find_order_p_element(p: u64, ctx: &FieldCtx) -> Result<u64> {
    let q = ctx.q;
    if p < 2 || !is_prime(p) || !(q - 1).is_multiple_of(p) {
        return Err(Error::NoElementOfOrder { order: p, q });
    }
    let e = (q - 1) / p;
    (2..q)
        .map(|g| pow_mod(g, e, q))
        .find(|&x| x != 1)
        .ok_or(Error::NoElementOfOrder { order: p, q })
}

/// `x ↦ x^q`, which is `(u, v) ↦ (u, −v)` in the `√d` basis.
#[inline]
pub fn frobenius(x: Fq2, ctx: &FieldCtx) -> Fq2 {
    Fq2 { u: x.u, v: ctx.neg(x.v) }
}

/// `Tr(x) = x + x^q = 2u`.
#[inline]
pub fn trace(x: Fq2, ctx: &FieldCtx) -> u64 {
    ctx.add(x.u, x.u)
}

/// One representative per additive coset of `F_q` in `F_{q^2}`:
/// `t_j = j·√d` for `j = 0..q`.
pub fn coset_reps(ctx: &FieldCtx) -> Vec<Fq2> {
    (0..ctx.q).map(|j| Fq2 { u: 0, v: j }).collect()
}
