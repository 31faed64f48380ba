//! Fourier estimates of how far the reduced error of 2-power cyclotomic
//! RLWE is from uniform.
//!
//! With coefficients `e_i ~ V_k` and `ρ(ζ_m) = α`, the reduced error
//! `Σ e_i α^i mod q` has transform `Π_i cos(π α^i y / q)^k`, so
//!
//! ```text
//! ε(m, q, k, α) = ½ Σ_{y≠0} Π_{i<n} cos(π α^i y / q)^k
//! ```
//!
//! bounds its statistical distance to uniform. Terms are summed in log2 space
//! (values go down to `2^-431` and beyond). Multiplying `y` by `α` permutes
//! the factors up to sign, so each term only depends on the coset
//! `y·⟨α⟩`; [`epsilon`] sums one representative per coset.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::attack::{chi_square, critical_value};
use crate::error::{Error, Result};
use crate::ffield::{self, is_prime, mul_mod, pow_mod, trace, FieldCtx, Fq2};
use crate::numberring::CycloRing;
use crate::oracle::{ErrorSpec, RlweInstance};
use crate::numberring::Ring;
use crate::sampler::{BinomialSpec, GaussianSpec, RngHandle};

/// Terms below `2^-1100` are dropped.
const LOG2_FLUSH: f64 = -1100.0;

/// Largest `n·q·(k+1)` the exact convolution oracle will attempt.
pub const BRUTE_FORCE_WORK_LIMIT: u64 = 1 << 30;

/// `ν̂_k(y) = cos(πy/q)^k`, the transform of `V_k` reduced mod `q`.
pub fn nu_hat(y: u64, q: u64, k: u32) -> f64 {
    (PI * (y % q) as f64 / q as f64).cos().powi(k as i32)
}

/// `log2 |cos(πt/q)|` for `t ∈ [0, q)`.
fn log2_cos_table(q: u64) -> Vec<f64> {
    (0..q).map(|t| (PI * t as f64 / q as f64).cos().abs().log2()).collect()
}

/// Streaming `log2 Σ 2^{x_i}`.
#[derive(Clone, Copy, Debug)]
struct Log2Sum {
    max: f64,
    scaled: f64,
}

impl Log2Sum {
    const EMPTY: Log2Sum = Log2Sum { max: f64::NEG_INFINITY, scaled: 0.0 };

    fn add(mut self, x: f64) -> Self {
        if x < LOG2_FLUSH {
            return self;
        }
        if x <= self.max {
            self.scaled += (x - self.max).exp2();
        } else {
            self.scaled = self.scaled * (self.max - x).exp2() + 1.0;
            self.max = x;
        }
        self
    }

    fn merge(self, other: Log2Sum) -> Self {
        if other.max == f64::NEG_INFINITY {
            return self;
        }
        if self.max == f64::NEG_INFINITY {
            return other;
        }
        let max = self.max.max(other.max);
        Log2Sum { max, scaled: self.scaled * (self.max - max).exp2() + other.scaled * (other.max - max).exp2() }
    }

    fn value(self) -> f64 {
        if self.scaled == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.log2()
        }
    }
}

fn check_cyclo(m: u64, q: u64, k: u32) -> Result<()> {
    if m < 4 || !m.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("m = {m} must be a power of two ≥ 4")));
    }
    if q == 2 || !is_prime(q) {
        return Err(Error::NotOddPrime(q));
    }
    BinomialSpec::new(k)?;
    Ok(())
}

fn check_deg1(m: u64, q: u64, k: u32) -> Result<()> {
    check_cyclo(m, q, k)?;
    if !(q - 1).is_multiple_of(m) {
        return Err(Error::InvalidParameter(format!("q = {q} is not 1 mod m = {m}")));
    }
    Ok(())
}

fn check_deg2(m: u64, q: u64, k: u32) -> Result<()> {
    check_cyclo(m, q, k)?;
    if !(q * q - 1).is_multiple_of(m) || (q - 1).is_multiple_of(m) {
        return Err(Error::InvalidParameter(format!(
            "residue degree 2 needs m | q² − 1 and m ∤ q − 1; m = {m}, q = {q}"
        )));
    }
    Ok(())
}

/// `k·Σ_{i<n} log2|cos(π α^i y / q)|`.
fn log2_term(y: u64, alpha: u64, n: u64, q: u64, k: u32, table: &[f64]) -> f64 {
    let mut x = y;
    let mut acc = 0.0;
    for _ in 0..n {
        acc += table[x as usize];
        x = mul_mod(x, alpha, q);
    }
    k as f64 * acc
}

/// `log2 ε(m, q, k, α)` by the direct sum over all `y ≠ 0`.
pub fn epsilon_for_alpha(m: u64, q: u64, k: u32, alpha: u64) -> Result<f64> {
    check_deg1(m, q, k)?;
    if pow_mod(alpha, m / 2, q) != q - 1 {
        return Err(Error::InvalidParameter(format!("{alpha} does not have order {m} mod {q}")));
    }
    let table = log2_cos_table(q);
    let n = m / 2;
    let s = (1..q)
        .into_par_iter()
        .fold(|| Log2Sum::EMPTY, |acc, y| acc.add(log2_term(y, alpha, n, q, k, &table)))
        .reduce(|| Log2Sum::EMPTY, Log2Sum::merge);
    Ok(s.value() - 1.0)
}

/// All primitive `m`-th roots of unity mod `q`, ascending.
pub fn primitive_roots(m: u64, q: u64) -> Result<Vec<u64>> {
    let a = ffield::element_of_order(m, q)?;
    let mut roots: Vec<u64> = (1..m).step_by(2).map(|j| pow_mod(a, j, q)).collect();
    roots.sort_unstable();
    Ok(roots)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootValue {
    /// `α` as `(u, v)`; `v = 0` in residue degree 1.
    pub alpha: Fq2,
    pub log2_eps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimateReport {
    pub m: u64,
    pub q: u64,
    pub k: u32,
    pub degree: u32,
    pub per_root: Vec<RootValue>,
    pub log2_eps: f64,
    /// `−⌊log2 ε⌋`.
    pub neg_floor_log2_eps: i64,
    /// Gauss-sum bound; absent when `q ≥ m²`.
    pub log2_bound: Option<f64>,
    /// `(1 + √q/m)/2`
    pub beta: f64,
    pub runtime_ms: u64,
}

fn report(m: u64, q: u64, k: u32, degree: u32, per_root: Vec<RootValue>, start: Instant) -> EstimateReport {
    let log2_eps = per_root.iter().map(|r| r.log2_eps).fold(f64::NEG_INFINITY, f64::max);
    EstimateReport {
        m,
        q,
        k,
        degree,
        per_root,
        log2_eps,
        neg_floor_log2_eps: -(log2_eps.floor() as i64),
        log2_bound: theoretical_bound(m, q, k).ok(),
        beta: cyclo_beta(m, q),
        runtime_ms: start.elapsed().as_millis() as u64,
    }
}

/// `ε(m, q, k)` over every primitive root, residue degree 1.
pub fn epsilon(m: u64, q: u64, k: u32) -> Result<EstimateReport> {
    check_deg1(m, q, k)?;
    let start = Instant::now();
    let table = log2_cos_table(q);
    let n = m / 2;
    let g = ffield::multiplicative_generator(q);
    // one y per coset of ⟨α⟩ in F_q^*, each standing for m values
    let reps: Vec<u64> = {
        let mut v = Vec::with_capacity(((q - 1) / m) as usize);
        let mut y = 1u64;
        for _ in 0..(q - 1) / m {
            v.push(y);
            y = mul_mod(y, g, q);
        }
        v
    };
    let per_root = primitive_roots(m, q)?
        .into_par_iter()
        .map(|alpha| {
            let s = reps.iter().fold(Log2Sum::EMPTY, |acc, &y| acc.add(log2_term(y, alpha, n, q, k, &table)));
            RootValue { alpha: Fq2::new(alpha, 0), log2_eps: s.value() + (m as f64).log2() - 1.0 }
        })
        .collect();
    Ok(report(m, q, k, 1, per_root, start))
}

/// Degree-2 analogue: `½ Σ_{y ∈ F_{q²}^*} Π_{i=1}^{n} cos(π Tr(α^i y)/q)^k`
/// with `α` of order `m` in `F_{q²}`.
pub fn epsilon_deg2(m: u64, q: u64, k: u32) -> Result<EstimateReport> {
    check_deg2(m, q, k)?;
    let start = Instant::now();
    let ctx = FieldCtx::new(q)?;
    let table = log2_cos_table(q);
    let n = m / 2;
    let g = ctx.generator2();
    let cosets = (q * q - 1) / m;
    let a0 = ctx.element_of_order2(m)?;
    let mut roots: Vec<Fq2> = (1..m).step_by(2).map(|j| ctx.pow2(a0, j)).collect();
    roots.sort_unstable();
    let per_root = roots
        .iter()
        .map(|&alpha| {
            // the coset walk y = g^j is split into chunks, each with its own start
            let chunk = 4096u64;
            let s = (0..cosets.div_ceil(chunk))
                .into_par_iter()
                .map(|c| {
                    let lo = c * chunk;
                    let hi = (lo + chunk).min(cosets);
                    let mut y = ctx.pow2(g, lo);
                    let mut acc = Log2Sum::EMPTY;
                    for _ in lo..hi {
                        let mut x = ctx.mul2(alpha, y);
                        let mut t = 0.0;
                        for _ in 0..n {
                            t += table[trace(x, &ctx) as usize];
                            x = ctx.mul2(x, alpha);
                        }
                        acc = acc.add(k as f64 * t);
                        y = ctx.mul2(y, g);
                    }
                    acc
                })
                .reduce(|| Log2Sum::EMPTY, Log2Sum::merge);
            RootValue { alpha, log2_eps: s.value() + (m as f64).log2() - 1.0 }
        })
        .collect();
    Ok(report(m, q, k, 2, per_root, start))
}

/// Direct degree-2 sum over every `y ≠ 0`, for cross-checking.
pub fn epsilon_deg2_for_alpha(m: u64, q: u64, k: u32, alpha: Fq2) -> Result<f64> {
    check_deg2(m, q, k)?;
    let ctx = FieldCtx::new(q)?;
    if ctx.pow2(alpha, m / 2) != ctx.neg2(Fq2::ONE) {
        return Err(Error::InvalidParameter(format!("{alpha} does not have order {m}")));
    }
    let table = log2_cos_table(q);
    let mut acc = Log2Sum::EMPTY;
    for u in 0..q {
        for v in 0..q {
            if u == 0 && v == 0 {
                continue;
            }
            let mut x = ctx.mul2(alpha, Fq2::new(u, v));
            let mut t = 0.0;
            for _ in 0..m / 2 {
                t += table[trace(x, &ctx) as usize];
                x = ctx.mul2(x, alpha);
            }
            acc = acc.add(k as f64 * t);
        }
    }
    Ok(acc.value() - 1.0)
}

/// `(1 + √q/m)/2`
pub fn cyclo_beta(m: u64, q: u64) -> f64 {
    (1.0 + (q as f64).sqrt() / m as f64) / 2.0
}

/// `log2((q−1)/2 · β^{km/4})`; requires `q < m²`.
pub fn theoretical_bound(m: u64, q: u64, k: u32) -> Result<f64> {
    if q >= m * m {
        return Err(Error::InvalidParameter(format!("bound needs q < m², got q = {q}, m = {m}")));
    }
    Ok(((q - 1) as f64 / 2.0).log2() + (k as f64 * m as f64 / 4.0) * cyclo_beta(m, q).log2())
}

/// Exact pmf of `Σ_{i<n} α^i e_i mod q` with `e_i ~ V_k`, by convolution.
pub fn reduced_pmf(m: u64, q: u64, k: u32, alpha: u64) -> Result<Vec<f64>> {
    check_deg1(m, q, k)?;
    let n = m / 2;
    let work = n.saturating_mul(q).saturating_mul(k as u64 + 1);
    if work > BRUTE_FORCE_WORK_LIMIT {
        return Err(Error::TooLarge(format!("convolution needs {work} steps")));
    }
    let spec = BinomialSpec::new(k)?;
    let half = (k / 2) as i64;
    let mut pmf = vec![0.0; q as usize];
    pmf[0] = 1.0;
    let mut w = 1u64;
    for _ in 0..n {
        let mut next = vec![0.0; q as usize];
        for t in -half..=half {
            let shift = mul_mod(ffield::reduce_signed(t, q), w, q) as usize;
            let pt = spec.pmf(t);
            for (x, &px) in pmf.iter().enumerate() {
                next[(x + shift) % q as usize] += px * pt;
            }
        }
        pmf = next;
        w = mul_mod(w, alpha, q);
    }
    Ok(pmf)
}

/// `Δ(e_α, U) = ½ Σ_a |P(a) − 1/q|` for the canonical root.
pub fn brute_force_distance(m: u64, q: u64, k: u32) -> Result<f64> {
    check_deg1(m, q, k)?;
    let alpha = ffield::element_of_order(m, q)?;
    let pmf = reduced_pmf(m, q, k, alpha)?;
    Ok(0.5 * pmf.iter().map(|p| (p - 1.0 / q as f64).abs()).sum::<f64>())
}

/// `max_{y≠0} |Σ_{j<m} exp(2πi α^j y / q)|`.
pub fn gauss_sum_check(m: u64, q: u64, alpha: u64) -> f64 {
    (1..q)
        .map(|y| {
            let mut x = y;
            let mut s = Complex64::new(0.0, 0.0);
            for _ in 0..m {
                s += Complex64::from_polar(1.0, 2.0 * PI * x as f64 / q as f64);
                x = mul_mod(x, alpha, q);
            }
            s.norm()
        })
        .fold(0.0, f64::max)
}

/// `L_Ω(len) = Π_{j=1}^{len} (1 − exp(2πi ω_j))` with
/// `ω_j = (α^{j−1} y mod q)/q + ½`.
pub fn l_omega(len: u64, q: u64, alpha: u64, y: u64) -> Complex64 {
    let mut x = y % q;
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..len {
        let w = x as f64 / q as f64 + 0.5;
        acc *= Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, 2.0 * PI * w);
        x = mul_mod(x, alpha, q);
    }
    acc
}

/// Closest prime to `q` admitting residue degree 2 for `m`; ties go to the
/// smaller one.
pub fn nearest_deg2_prime(m: u64, q: u64) -> Option<u64> {
    (0..q).find_map(|delta| {
        [q.checked_sub(delta), q.checked_add(delta)]
            .into_iter()
            .flatten()
            .find(|&c| c > 2 && check_deg2(m, c, 2).is_ok())
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalReport {
    pub m: u64,
    pub q: u64,
    pub error_kind: String,
    pub width_or_k: f64,
    pub count: usize,
    pub seed: u64,
    pub chi2: f64,
    pub threshold: f64,
    pub uniform: bool,
}

/// Draws `count` errors, reduces them at the canonical prime above `q`, and
/// tests the `q`-bin histogram against uniform at `confidence`.
///
/// With `r0` the error is `D_{ι(R), r}` for `r = r0·√n` (coefficients
/// `D_{Z, r0}`); otherwise it is `P_{m,k}`.
pub fn empirical_uniformity(m: u64, q: u64, k: u32, r0: Option<f64>, count: usize, seed: u64, confidence: f64) -> Result<EmpiricalReport> {
    let ring = CycloRing::new(m, q)?;
    let error = match r0 {
        Some(r0) => ErrorSpec::Gaussian(GaussianSpec::new(r0 * (ring.n() as f64).sqrt())?),
        None => ErrorSpec::Binomial(BinomialSpec::new(k)?),
    };
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    let inst = RlweInstance::new(Ring::Cyclo(ring.clone()), error, seed)?;
    let root = RngHandle::new(seed);
    let residues: Vec<u64> = (0..count as u64)
        .into_par_iter()
        .map(|i| ring.reduce(&inst.sample_error(&mut root.fork(i))))
        .collect();
    let mut hist = vec![0u64; q as usize];
    for r in residues {
        hist[r as usize] += 1;
    }
    let chi2 = chi_square(&hist, &vec![count as f64 / q as f64; q as usize])?;
    let threshold = critical_value(q - 1, confidence)?;
    Ok(EmpiricalReport {
        m,
        q,
        error_kind: error.kind().into(),
        width_or_k: error.width_or_k(),
        count,
        seed,
        chi2,
        threshold,
        uniform: chi2 <= threshold,
    })
}
