//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Set `RLWE_LONG_RUN=1` to include the optional
//! degree-2 row (256, 1279).

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rlwe_core::attack::{self, AttackConfig, Verdict};
use rlwe_core::estimator::{self, brute_force_distance, epsilon, epsilon_deg2, epsilon_for_alpha, nu_hat, theoretical_bound};
use rlwe_core::ffield::{frobenius, is_prime, FieldCtx, Fq2};
use rlwe_core::oracle::{draw_rlwe, draw_uniform, ErrorSpec, RlweInstance, SampleSet};
use rlwe_core::sampler::{BinomialSpec, GaussianSpec};
use rlwe_core::{FamilyRing, Ring};

struct Check {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn row(p: u64, d: u64, q: u64, r: f64, seed: u64) -> RlweInstance {
    let ring = Ring::Family(FamilyRing::new(p, d, q).unwrap());
    RlweInstance::new(ring, ErrorSpec::Gaussian(GaussianSpec::new(r).unwrap()), seed).unwrap()
}

fn rho_secret(inst: &RlweInstance) -> Fq2 {
    match inst.ring() {
        Ring::Family(f) => f.reduce(inst.secret()),
        Ring::Cyclo(_) => unreachable!(),
    }
}

const ATTACK_ROWS: [(u64, u64, u64, f64, usize); 2] = [(43, 4871, 173, 694.94, 1730), (83, 4903, 167, 963.84, 1670)];

fn criterion_1() -> Check {
    let mut parts = Vec::new();
    let mut pass = true;
    for (p, d, q, r, count) in ATTACK_ROWS {
        let mut hits = 0;
        let mut slowest = Duration::ZERO;
        for seed in 1..=10 {
            let start = Instant::now();
            let inst = row(p, d, q, r, seed);
            let set = draw_rlwe(&inst, count).unwrap();
            let out = attack::coset_attack(&set, &AttackConfig::coset_default(q)).unwrap();
            slowest = slowest.max(start.elapsed());
            hits += (out.verdict == Verdict::Guess && out.candidate == Some(rho_secret(&inst))) as u32;
        }
        pass &= hits >= 9 && slowest < Duration::from_secs(600);
        parts.push(format!("p={p}: {hits}/10 correct GUESS, slowest run {:.2}s", slowest.as_secs_f64()));
    }
    Check { id: "1 coset attack (p=43, p=83)", pass, detail: parts.join("; ") }
}

fn criterion_2() -> Check {
    let mut parts = Vec::new();
    let mut pass = true;
    for (p, d, q, r, count) in ATTACK_ROWS {
        let (mut two, mut coset) = (0, 0);
        for seed in 1..=10 {
            let set = draw_uniform(&row(p, d, q, r, seed), count).unwrap();
            two += (attack::two_bin_attack(&set, &AttackConfig::two_bin_default(q, set.len())).unwrap().verdict == Verdict::NotRlwe) as u32;
            coset += (attack::coset_attack(&set, &AttackConfig::coset_default(q)).unwrap().verdict == Verdict::NotRlwe) as u32;
        }
        pass &= two >= 9 && coset >= 9;
        parts.push(format!("p={p}: two-bin {two}/10, coset {coset}/10 NOT-RLWE"));
    }
    Check { id: "2 decoy soundness", pass, detail: parts.join("; ") }
}

const DEG1_ROWS: [(u64, u64, i64); 4] = [(64, 193, 40), (128, 1153, 97), (256, 3329, 194), (512, 10753, 431)];
const DEG2_ROWS: [(u64, u64, i64); 2] = [(64, 383, 31), (128, 1151, 54)];

fn criterion_3() -> Check {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for (m, q, want) in DEG1_ROWS {
        let got = epsilon(m, q, 2).unwrap().neg_floor_log2_eps;
        pass &= (got - want).abs() <= 1;
        parts.push(format!("({m},{q}) {got} vs {want}"));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 900.0;
    Check { id: "3 degree-1 −⌊log2 ε⌋ ±1", pass, detail: format!("{} [{secs:.2}s]", parts.join(", ")) }
}

fn criterion_4() -> Check {
    let mut pass = true;
    let mut parts = Vec::new();
    for (m, q, want) in DEG2_ROWS {
        let got = epsilon_deg2(m, q, 2).unwrap().neg_floor_log2_eps;
        pass &= (got - want).abs() <= 1;
        parts.push(format!("({m},{q}) {got} vs {want}"));
    }
    if std::env::var_os("RLWE_LONG_RUN").is_some() {
        let got = epsilon_deg2(256, 1279, 2).unwrap().neg_floor_log2_eps;
        pass &= (got - 159).abs() <= 1;
        parts.push(format!("(256,1279) {got} vs 159"));
    } else {
        parts.push("(256,1279) skipped without RLWE_LONG_RUN".into());
    }
    let composite = !is_prime(5583);
    pass &= composite;
    let alt = estimator::nearest_deg2_prime(512, 5583).unwrap();
    parts.push(format!("(512,5583) inadmissible as printed (5583 = 3·1861), nearest admissible prime {alt}"));
    Check { id: "4 degree-2 −⌊log2 ε⌋ ±1", pass, detail: parts.join(", ") }
}

fn criterion_5() -> Check {
    let mut pass = true;
    let mut parts = Vec::new();
    let deg1 = DEG1_ROWS.iter().map(|&(m, q, _)| (m, q, epsilon(m, q, 2).unwrap().log2_eps));
    let deg2 = DEG2_ROWS.iter().map(|&(m, q, _)| (m, q, epsilon_deg2(m, q, 2).unwrap().log2_eps));
    for (m, q, eps) in deg1.chain(deg2) {
        if q >= m * m {
            continue;
        }
        let bound = theoretical_bound(m, q, 2).unwrap();
        pass &= eps <= bound;
        parts.push(format!("({m},{q}) 2^{eps:.1} ≤ 2^{bound:.1}"));
    }
    Check { id: "5 ε ≤ (q−1)/2·β^{km/4}", pass, detail: parts.join(", ") }
}

fn criterion_6() -> Check {
    let mut max_err = 0f64;
    for q in [5u64, 13, 97] {
        for k in [2u32, 4, 8] {
            let spec = BinomialSpec::new(k).unwrap();
            let mut pmf = vec![0.0; q as usize];
            for t in -(k as i64 / 2)..=(k as i64 / 2) {
                pmf[t.rem_euclid(q as i64) as usize] += spec.pmf(t);
            }
            for y in 0..q {
                let (mut re, mut im) = (0.0, 0.0);
                for (a, &pa) in pmf.iter().enumerate() {
                    let th = 2.0 * std::f64::consts::PI * (a as u64 * y) as f64 / q as f64;
                    re += pa * th.cos();
                    im += pa * th.sin();
                }
                max_err = max_err.max((re - nu_hat(y, q, k)).abs()).max(im.abs());
            }
        }
    }
    let delta = brute_force_distance(4, 5, 2).unwrap();
    let eps = epsilon_for_alpha(4, 5, 2, 2).unwrap().exp2();
    let pass = max_err < 1e-12 && (delta - 0.05).abs() <= 1e-12 && (eps - 0.125).abs() <= 1e-12 && delta <= eps;
    Check {
        id: "6 Fourier correctness",
        pass,
        detail: format!("max |ν̂ − DFT| = {max_err:.2e}, Δ(4,5,2) = {delta}, ε(4,5,2) = {eps}"),
    }
}

fn criterion_7() -> Check {
    let q = 13u64;
    let ctx = FieldCtx::new(q).unwrap();
    let all: Vec<Fq2> = (0..q).flat_map(|u| (0..q).map(move |v| Fq2::new(u, v))).collect();
    let outside: Vec<Fq2> = all.iter().copied().filter(|x| !x.in_base_field()).collect();
    let mut bijective = true;
    for &delta in &outside {
        let mut seen = HashSet::new();
        for &a in &outside {
            let x = ctx.sub2(frobenius(a, &ctx), a);
            let ad = ctx.mul2(a, delta);
            let y = ctx.sub2(frobenius(ad, &ctx), ad);
            bijective &= x.u == 0 && x.v != 0 && y.u == 0 && seen.insert((x, y));
        }
        bijective &= seen.len() == ((q - 1) * q) as usize;
    }
    let mut balanced = true;
    for s in [Fq2::new(3, 5), Fq2::new(11, 0)] {
        for e in [Fq2::ZERO, Fq2::new(4, 0), Fq2::new(2, 9)] {
            for j in (0..q).filter(|&j| j != s.v) {
                let mut hist = vec![0u64; q as usize];
                for &a in &outside {
                    let b = ctx.add2(ctx.mul2(a, s), e);
                    hist[attack::m_value(&ctx, a, b, Fq2::new(0, j)).unwrap() as usize] += 1;
                }
                balanced &= hist.iter().all(|&h| h == q - 1);
            }
        }
    }
    Check {
        id: "7 coset-attack math at q=13",
        pass: bijective && balanced,
        detail: format!("bijection onto (V∖0)×V: {bijective}; wrong cosets balanced (q−1 each): {balanced}"),
    }
}

fn criterion_8() -> Check {
    let r0 = (2.0 * std::f64::consts::PI).sqrt();
    let uniform = (1..=10)
        .filter(|&seed| estimator::empirical_uniformity(64, 193, 2, Some(r0), 1930, seed, 0.99).unwrap().uniform)
        .count();
    Check { id: "8 empirical uniformity (64,193,√(2π))", pass: uniform >= 9, detail: format!("{uniform}/10 runs uniform") }
}

fn criterion_9() -> Check {
    let (p, d, q, _, count) = ATTACK_ROWS[0];
    let inst = row(p, d, q, 60.0, 7);
    let set: SampleSet = draw_rlwe(&inst, count).unwrap();
    let coset = attack::coset_attack(&set, &AttackConfig::coset_default(q)).unwrap();
    let two = attack::two_bin_attack(&set, &AttackConfig::two_bin_default(q, set.len())).unwrap();
    let pass = coset.guess_loop_iterations == q
        && two.guess_loop_iterations == q * q
        && coset.candidate.is_some()
        && coset.candidate == two.candidate;
    Check {
        id: "9 guess-loop counts",
        pass,
        detail: format!(
            "coset {} (q = {q}), two-bin {} (q² = {}), same candidate: {}",
            coset.guess_loop_iterations,
            two.guess_loop_iterations,
            q * q,
            coset.candidate == two.candidate
        ),
    }
}

fn main() {
    let checks: [fn() -> Check; 9] =
        [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9];
    let mut failed = 0;
    for f in checks {
        let c = f();
        println!("{} criterion {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.id, c.detail);
        failed += !c.pass as u32;
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
