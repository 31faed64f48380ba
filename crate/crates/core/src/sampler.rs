//! Randomness for the workbench.
//!
//! Every Gaussian drawn here uses the width convention
//! `ρ_r(x) = exp(−‖x‖² / r²)`. The tail bound [`tail_bound`] and the family
//! β of [`compute_beta`] keep the `exp(−π s²)` normalization of the lemma
//! they come from; the two conventions never mix inside a sampler.

use std::f64::consts::{E, PI};

use nalgebra::DMatrix;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numberring::{Ring, RingElem};

/// Per-level Klein widths below this are flagged as low fidelity.
pub const FIDELITY_FLOOR: f64 = 4.0;

/// Default tail cut, in multiples of the width.
pub const DEFAULT_TAIL_CUT: u32 = 10;

/// Seeded, forkable random stream.
#[derive(Clone, Debug)]
pub struct RngHandle {
    seed: u64,
    rng: ChaCha20Rng,
}

impl RngHandle {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        RngHandle { seed, rng: ChaCha20Rng::from_seed(key) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream: `child_seed = SHA-256(parent_seed ‖ index)`.
    pub fn fork(&self, index: u64) -> RngHandle {
        let mut h = Sha256::new();
        h.update(b"rlwe-fork");
        h.update(self.seed.to_le_bytes());
        h.update(index.to_le_bytes());
        let digest = h.finalize();
        let child = u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"));
        RngHandle::new(child)
    }
}

impl RngCore for RngHandle {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Width and truncation of a discrete Gaussian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianSpec {
    pub r: f64,
    pub tail_cut: u32,
}

impl GaussianSpec {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("Gaussian width must be positive, got {r}")));
        }
        Ok(GaussianSpec { r, tail_cut: DEFAULT_TAIL_CUT })
    }

    /// Half-width of the truncated support, `⌈tail_cut·r⌉ + 1`.
    pub fn support_bound(&self) -> i64 {
        (self.tail_cut as f64 * self.r).ceil() as i64 + 1
    }
}

/// Shifted binomial `V_k`: the sum of `k` fair bits minus `k/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BinomialSpec {
    pub k: u32,
}

impl BinomialSpec {
    pub fn new(k: u32) -> Result<Self> {
        if k < 2 || !k.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("k = {k} must be even and at least 2")));
        }
        Ok(BinomialSpec { k })
    }

    /// `P(V_k = t) = C(k, t + k/2) / 2^k`.
    pub fn pmf(&self, t: i64) -> f64 {
        let half = (self.k / 2) as i64;
        if t.abs() > half {
            return 0.0;
        }
        binomial(self.k as u64, (t + half) as u64) / 2f64.powi(self.k as i32)
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> i64 {
        let mut ones = 0u32;
        let mut left = self.k;
        while left > 0 {
            let take = left.min(64);
            let bits = rng.next_u64();
            let mask = if take == 64 { u64::MAX } else { (1u64 << take) - 1 };
            ones += (bits & mask).count_ones();
            left -= take;
        }
        ones as i64 - (self.k / 2) as i64
    }
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Centered `D_{Z,r}` by inverse CDF over a precomputed table.
#[derive(Clone, Debug)]
pub struct DiscreteGaussian {
    spec: GaussianSpec,
    lo: i64,
    cdf: Vec<f64>,
}

impl DiscreteGaussian {
    pub fn new(spec: GaussianSpec) -> Self {
        let t = spec.support_bound();
        let weights: Vec<f64> = (-t..=t).map(|x| (-((x * x) as f64) / (spec.r * spec.r)).exp()).collect();
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        *cdf.last_mut().expect("nonempty support") = 1.0;
        DiscreteGaussian { spec, lo: -t, cdf }
    }

    pub fn spec(&self) -> GaussianSpec {
        self.spec
    }

    /// Truncated, normalized probability of `x`.
    pub fn pmf(&self, x: i64) -> f64 {
        let i = x - self.lo;
        if i < 0 || i as usize >= self.cdf.len() {
            return 0.0;
        }
        let i = i as usize;
        if i == 0 {
            self.cdf[0]
        } else {
            self.cdf[i] - self.cdf[i - 1]
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> i64 {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&c| c <= u);
        self.lo + i.min(self.cdf.len() - 1) as i64
    }
}

/// One draw from centered `D_{Z,r}`.
pub fn sample_dgauss_z<R: RngCore + ?Sized>(spec: GaussianSpec, rng: &mut R) -> i64 {
    DiscreteGaussian::new(spec).sample(rng)
}

/// One draw from `V_k`.
pub fn sample_binomial_vk<R: RngCore + ?Sized>(spec: BinomialSpec, rng: &mut R) -> i64 {
    spec.sample(rng)
}

/// `D_{Z,s,c}` by rejection from the uniform law on the truncated window.
pub fn sample_dgauss_shifted<R: RngCore + ?Sized>(s: f64, center: f64, tail_cut: u32, rng: &mut R) -> i64 {
    let t = (tail_cut as f64 * s).ceil() as i64 + 1;
    let base = center.floor() as i64;
    loop {
        let z = rng.random_range(base - t..=base + t + 1);
        let dz = z as f64 - center;
        if rng.random::<f64>() < (-(dz * dz) / (s * s)).exp() {
            return z;
        }
    }
}

/// Randomized nearest-plane sampler over a lattice given by its Gram matrix.
///
/// With `G = L·Lᵀ` (Cholesky), the rows of `L` realize the basis isometrically
/// and the Gram–Schmidt vectors are `L_ii·e_i`, so level `i` samples
/// `D_{Z, r/L_ii, c_i/L_ii}`.
#[derive(Clone, Debug)]
pub struct KleinSampler {
    l: DMatrix<f64>,
    widths: Vec<f64>,
    tail_cut: u32,
}

impl KleinSampler {
    pub fn from_gram(gram: &DMatrix<f64>, spec: GaussianSpec) -> Result<Self> {
        let chol = nalgebra::Cholesky::new(gram.clone())
            .ok_or_else(|| Error::InvalidParameter("Gram matrix is not positive definite".into()))?;
        let l = chol.l();
        let widths = (0..l.nrows()).map(|i| spec.r / l[(i, i)]).collect();
        Ok(KleinSampler { l, widths, tail_cut: spec.tail_cut })
    }

    /// Per-level one-dimensional widths `r / ‖b*_i‖`.
    pub fn level_widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn below_fidelity_floor(&self) -> bool {
        self.widths.iter().any(|&w| w < FIDELITY_FLOOR)
    }

    /// Coefficients of a lattice point w.r.t. the basis.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Vec<i64> {
        let n = self.l.nrows();
        let mut c = vec![0.0f64; n];
        let mut z = vec![0i64; n];
        for i in (0..n).rev() {
            let lii = self.l[(i, i)];
            let zi = sample_dgauss_shifted(self.widths[i], c[i] / lii, self.tail_cut, rng);
            z[i] = zi;
            if zi != 0 {
                for j in 0..=i {
                    c[j] -= zi as f64 * self.l[(i, j)];
                }
            }
        }
        z
    }
}

/// A lattice Gaussian sample and whether the sampler ran below its floor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeDraw {
    pub elem: RingElem,
    pub below_fidelity_floor: bool,
}

/// `D_{ι(R), r}` for either ring family.
///
/// The family ring splits orthogonally as `V ⊕ W` (`W = √d·V`), so the two
/// blocks are sampled independently with Klein's sampler. For 2-power
/// cyclotomics `‖ι(x)‖ = √n·‖x‖`, so coefficients are i.i.d. `D_{Z, r/√n}`.
#[derive(Clone, Debug)]
pub enum LatticeSampler {
    Family { v: KleinSampler, w: KleinSampler },
    Cyclo { coeff: DiscreteGaussian, n: usize },
}

impl LatticeSampler {
    pub fn new(ring: &Ring, spec: GaussianSpec) -> Result<Self> {
        match ring {
            Ring::Family(f) => {
                let h = f.family_n();
                let g = f.gram_matrix();
                let gv = g.view((0, 0), (h, h)).into_owned();
                let gw = g.view((h, h), (h, h)).into_owned();
                Ok(LatticeSampler::Family {
                    v: KleinSampler::from_gram(&gv, spec)?,
                    w: KleinSampler::from_gram(&gw, spec)?,
                })
            }
            Ring::Cyclo(c) => {
                let coeff_spec = GaussianSpec { r: spec.r / (c.n() as f64).sqrt(), tail_cut: spec.tail_cut };
                Ok(LatticeSampler::Cyclo { coeff: DiscreteGaussian::new(coeff_spec), n: c.n() })
            }
        }
    }

    pub fn below_fidelity_floor(&self) -> bool {
        match self {
            LatticeSampler::Family { v, w } => v.below_fidelity_floor() || w.below_fidelity_floor(),
            LatticeSampler::Cyclo { .. } => false,
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> LatticeDraw {
        let coeffs = match self {
            LatticeSampler::Family { v, w } => {
                let mut c = v.sample(rng);
                c.extend(w.sample(rng));
                c
            }
            LatticeSampler::Cyclo { coeff, n } => (0..*n).map(|_| coeff.sample(rng)).collect(),
        };
        LatticeDraw { elem: RingElem::new(coeffs), below_fidelity_floor: self.below_fidelity_floor() }
    }
}

/// Convenience wrapper; build a [`LatticeSampler`] once when drawing many.
pub fn sample_lattice_gauss<R: RngCore + ?Sized>(ring: &Ring, spec: GaussianSpec, rng: &mut R) -> Result<LatticeDraw> {
    Ok(LatticeSampler::new(ring, spec)?.sample(rng))
}

/// `min(C_{c/r}^n, 1)` with `C_s = s·√(2πe)·exp(−π s²)`, a bound on
/// `P(‖v‖ > c√n)` for `v ~ D_{Λ,r}`.
pub fn tail_bound(c: f64, r: f64, n: u64) -> Result<f64> {
    Ok(log2_tail_bound(c, r, n)?.exp2())
}

/// `log2` of [`tail_bound`]; stays finite where the bound underflows.
pub fn log2_tail_bound(c: f64, r: f64, n: u64) -> Result<f64> {
    if !(r > 0.0) || c <= r / (2.0 * PI).sqrt() {
        return Err(Error::InvalidParameter(format!("tail bound is vacuous for c = {c}, r = {r}")));
    }
    let s = c / r;
    let log2_cs = s.log2() + 0.5 * (2.0 * PI * E).log2() - PI * s * s / std::f64::consts::LN_2;
    Ok((n as f64 * log2_cs).min(0.0))
}

/// Family β: `min((√(4πed)/r · e^{−2πd/r²})^n, 1)` with `n = p − 1`; it bounds
/// the probability that an error has a nonzero `√d`-part.
pub fn compute_beta(d: u64, r: f64, family_n: u64) -> Result<f64> {
    Ok(log2_beta(d, r, family_n)?.exp2())
}

pub fn log2_beta(d: u64, r: f64, family_n: u64) -> Result<f64> {
    if r >= 2.0 * (PI * d as f64).sqrt() {
        return Err(Error::InvalidParameter(format!("r = {r} is not below 2√(πd) = {}", 2.0 * (PI * d as f64).sqrt())));
    }
    log2_tail_bound((2.0 * d as f64).sqrt(), r, family_n)
}

/// Uniform element of `R/qR`.
pub fn uniform_elem<R: RngCore + ?Sized>(deg: usize, q: u64, rng: &mut R) -> RingElem {
    RingElem::new((0..deg).map(|_| rng.random_range(0..q) as i64).collect())
}
