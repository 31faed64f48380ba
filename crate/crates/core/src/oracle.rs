//! RLWE sample sets: generation, the JSONL file format, and loading.
//!
//! File layout, one JSON object per line:
//!
//! ```text
//! {"schema_version":1,"ring_kind":"family","p":43,"d":4871,"q":173,"error_kind":"gaussian","width_or_k":694.94,"seed":1,"count":1730,"secret_hash":"…"}
//! {"a":[…],"b":[…]}
//! …
//! ```
//!
//! `p`/`d` appear for `ring_kind = "family"`, `m` for `"cyclo"`. Coefficients
//! are in `[0, q)`. `secret_hash` is the hex SHA-256 of the secret's
//! coefficients, each as an 8-byte little-endian integer.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numberring::{CycloRing, FamilyRing, Ring, RingElem};
use crate::sampler::{uniform_elem, BinomialSpec, GaussianSpec, LatticeSampler, RngHandle};

pub const SCHEMA_VERSION: u32 = 1;

/// Fork index reserved for deriving the secret from the instance seed.
const SECRET_STREAM: u64 = u64::MAX;
/// Fork index of the stream family used for uniform decoys.
const UNIFORM_STREAM: u64 = u64::MAX - 1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ErrorSpec {
    /// `D_{ι(R), r}`
    Gaussian(GaussianSpec),
    /// coefficient-wise `V_k`
    Binomial(BinomialSpec),
    /// Degenerate test hook: `e = 0`.
    Zero,
}

impl ErrorSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ErrorSpec::Gaussian(_) => "gaussian",
            ErrorSpec::Binomial(_) => "binomial",
            ErrorSpec::Zero => "zero",
        }
    }

    pub fn width_or_k(&self) -> f64 {
        match self {
            ErrorSpec::Gaussian(g) => g.r,
            ErrorSpec::Binomial(b) => b.k as f64,
            ErrorSpec::Zero => 0.0,
        }
    }
}

/// Error sampler built once per instance.
#[derive(Clone, Debug)]
enum ErrorSampler {
    Lattice(LatticeSampler),
    Binomial(BinomialSpec, usize),
    Zero(usize),
}

impl ErrorSampler {
    fn sample(&self, rng: &mut RngHandle) -> RingElem {
        match self {
            ErrorSampler::Lattice(s) => s.sample(rng).elem,
            ErrorSampler::Binomial(b, n) => RingElem::new((0..*n).map(|_| b.sample(rng)).collect()),
            ErrorSampler::Zero(n) => RingElem::zero(*n),
        }
    }
}

/// A ring, an error law, a secret in `R/qR`, and the seed driving all draws.
#[derive(Clone, Debug)]
pub struct RlweInstance {
    ring: Ring,
    error: ErrorSpec,
    secret: RingElem,
    seed: u64,
    sampler: ErrorSampler,
}

impl RlweInstance {
    /// The secret is uniform in `R/qR`, drawn from a fork of `seed`.
    pub fn new(ring: Ring, error: ErrorSpec, seed: u64) -> Result<Self> {
        let mut rng = RngHandle::new(seed).fork(SECRET_STREAM);
        let secret = uniform_elem(ring.deg(), ring.q(), &mut rng);
        let sampler = match error {
            ErrorSpec::Gaussian(g) => ErrorSampler::Lattice(LatticeSampler::new(&ring, g)?),
            ErrorSpec::Binomial(b) => ErrorSampler::Binomial(b, ring.deg()),
            ErrorSpec::Zero => ErrorSampler::Zero(ring.deg()),
        };
        Ok(RlweInstance { ring, error, secret, seed, sampler })
    }

    /// Replaces the secret (reduced mod `q`).
    pub fn with_secret(mut self, secret: RingElem) -> Result<Self> {
        if secret.len() != self.ring.deg() {
            return Err(Error::RingMismatch(format!("secret of length {} for degree {}", secret.len(), self.ring.deg())));
        }
        self.secret = self.ring.reduce_coeffs(&secret);
        Ok(self)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn error(&self) -> ErrorSpec {
        self.error
    }

    pub fn secret(&self) -> &RingElem {
        &self.secret
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn secret_hash(&self) -> String {
        secret_hash(&self.secret)
    }

    /// True when the lattice sampler runs some level below the fidelity floor.
    pub fn below_fidelity_floor(&self) -> bool {
        matches!(&self.sampler, ErrorSampler::Lattice(s) if s.below_fidelity_floor())
    }

    /// Draws one error term with the instance's law.
    pub fn sample_error(&self, rng: &mut RngHandle) -> RingElem {
        self.sampler.sample(rng)
    }

    fn header(&self, error_kind: &str, width_or_k: f64, count: usize) -> SampleHeader {
        let (ring_kind, p, d, m) = match &self.ring {
            Ring::Family(f) => ("family", Some(f.p()), Some(f.d()), None),
            Ring::Cyclo(c) => ("cyclo", None, None, Some(c.m())),
        };
        SampleHeader {
            schema_version: SCHEMA_VERSION,
            ring_kind: ring_kind.to_string(),
            p,
            d,
            m,
            q: self.ring.q(),
            error_kind: error_kind.to_string(),
            width_or_k,
            seed: self.seed,
            count,
            secret_hash: self.secret_hash(),
        }
    }
}

/// SHA-256 over the coefficients as 8-byte little-endian integers.
pub fn secret_hash(secret: &RingElem) -> String {
    let mut h = Sha256::new();
    for &c in &secret.coeffs {
        h.update((c as u64).to_le_bytes());
    }
    hex::encode(h.finalize())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleHeader {
    pub schema_version: u32,
    pub ring_kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    pub q: u64,
    pub error_kind: String,
    pub width_or_k: f64,
    pub seed: u64,
    pub count: usize,
    pub secret_hash: String,
}

impl SampleHeader {
    /// Rebuilds the ring the samples live in.
    pub fn ring(&self) -> Result<Ring> {
        match self.ring_kind.as_str() {
            "family" => {
                let (p, d) = self
                    .p
                    .zip(self.d)
                    .ok_or_else(|| Error::InvalidParameter("family header needs p and d".into()))?;
                Ok(Ring::Family(FamilyRing::new(p, d, self.q)?))
            }
            "cyclo" => {
                let m = self.m.ok_or_else(|| Error::InvalidParameter("cyclo header needs m".into()))?;
                Ok(Ring::Cyclo(CycloRing::new(m, self.q)?))
            }
            other => Err(Error::InvalidParameter(format!("unknown ring_kind {other:?}"))),
        }
    }

    /// The error law named by the header, when it is one an instance can draw.
    pub fn error_spec(&self) -> Result<ErrorSpec> {
        match self.error_kind.as_str() {
            "gaussian" => Ok(ErrorSpec::Gaussian(GaussianSpec::new(self.width_or_k)?)),
            "binomial" => Ok(ErrorSpec::Binomial(BinomialSpec::new(self.width_or_k as u32)?)),
            "zero" => Ok(ErrorSpec::Zero),
            other => Err(Error::InvalidParameter(format!("error_kind {other:?} has no sampler"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub a: RingElem,
    pub b: RingElem,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub header: SampleHeader,
    pub records: Vec<SampleRecord>,
}

/// `count` pairs `(a, a·s + e)` with `a` uniform.
///
/// Record `i` uses the stream `fork(i)` of the instance seed, so the output
/// does not depend on how rayon splits the work.
pub fn draw_rlwe(inst: &RlweInstance, count: usize) -> Result<SampleSet> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    let root = RngHandle::new(inst.seed);
    let (deg, q) = (inst.ring.deg(), inst.ring.q());
    let records = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = root.fork(i);
            let a = uniform_elem(deg, q, &mut rng);
            let e = inst.sampler.sample(&mut rng);
            let b = inst.ring.add(&inst.ring.mul(&a, &inst.secret)?, &e)?;
            Ok(SampleRecord { a, b })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleSet { header: inst.header(inst.error.kind(), inst.error.width_or_k(), count), records })
}

/// `count` pairs with both coordinates uniform; the header names
/// `error_kind = "uniform"`.
pub fn draw_uniform(inst: &RlweInstance, count: usize) -> Result<SampleSet> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    let root = RngHandle::new(inst.seed).fork(UNIFORM_STREAM);
    let (deg, q) = (inst.ring.deg(), inst.ring.q());
    let records = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = root.fork(i);
            let a = uniform_elem(deg, q, &mut rng);
            let b = uniform_elem(deg, q, &mut rng);
            SampleRecord { a, b }
        })
        .collect();
    Ok(SampleSet { header: inst.header("uniform", 0.0, count), records })
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn ring(&self) -> Result<Ring> {
        self.header.ring()
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        serde_json::to_writer(&mut w, &self.header)?;
        w.write_all(b"\n")?;
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        w.flush()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let io = |source| Error::Io { path: path.to_path_buf(), source };
        let f = File::create(path).map_err(io)?;
        self.write_to(BufWriter::new(f)).map_err(io)
    }

    pub fn load(path: &Path) -> Result<SampleSet> {
        let f = File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        SampleSet::read_from(f, path)
    }

    /// Parses the JSONL format; `path` only labels errors.
    pub fn read_from<R: Read>(r: R, path: &Path) -> Result<SampleSet> {
        let perr = |line: usize, message: String| Error::Parse { path: path.to_path_buf(), line, message };
        let mut lines = BufReader::new(r).lines();
        let first = match lines.next() {
            Some(l) => l.map_err(|source| Error::Io { path: path.to_path_buf(), source })?,
            None => return Err(perr(1, "missing header".into())),
        };
        let header: SampleHeader = serde_json::from_str(&first).map_err(|e| perr(1, format!("bad header: {e}")))?;
        if header.schema_version != SCHEMA_VERSION {
            return Err(perr(1, format!("unsupported schema_version {}", header.schema_version)));
        }
        let ring = header.ring().map_err(|e| perr(1, e.to_string()))?;
        let (deg, q) = (ring.deg(), ring.q() as i64);
        let mut records = Vec::new();
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let line = line.map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: SampleRecord =
                serde_json::from_str(&line).map_err(|e| perr(lineno, format!("record {}: {e}", records.len())))?;
            for (name, v) in [("a", &rec.a), ("b", &rec.b)] {
                if v.len() != deg {
                    return Err(perr(lineno, format!("record {}: {name} has length {}, expected {deg}", records.len(), v.len())));
                }
                if let Some(c) = v.coeffs.iter().find(|&&c| c < 0 || c >= q) {
                    return Err(perr(lineno, format!("record {}: {name} coefficient {c} outside [0, {q})", records.len())));
                }
            }
            records.push(rec);
        }
        Ok(SampleSet { header, records })
    }
}
