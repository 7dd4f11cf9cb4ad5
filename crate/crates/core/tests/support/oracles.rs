//! Reference implementations written without looking at the library kernels.

use std::f64::consts::PI;

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Minimum total cost over every monotone path, by exhaustive recursion.
pub fn brute_dtw(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    fn walk(a: &[Vec<f64>], b: &[Vec<f64>], i: usize, j: usize, acc: f64, best: &mut f64) {
        let acc = acc + euclid(&a[i], &b[j]);
        if i + 1 == a.len() && j + 1 == b.len() {
            *best = best.min(acc);
            return;
        }
        if i + 1 < a.len() && j + 1 < b.len() {
            walk(a, b, i + 1, j + 1, acc, best);
        }
        if i + 1 < a.len() {
            walk(a, b, i + 1, j, acc, best);
        }
        if j + 1 < b.len() {
            walk(a, b, i, j + 1, acc, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(a, b, 0, 0, 0.0, &mut best);
    best
}

/// Minimum total cost over every alignment of `a` and `b`, by exhaustive
/// enumeration. `cost(x, y)` receives `None` for a gap.
pub fn brute_lev(a: &[&str], b: &[&str], cost: &dyn Fn(Option<&str>, Option<&str>) -> f64) -> f64 {
    fn walk(
        a: &[&str],
        b: &[&str],
        cost: &dyn Fn(Option<&str>, Option<&str>) -> f64,
        acc: f64,
        best: &mut f64,
    ) {
        match (a.split_first(), b.split_first()) {
            (None, None) => *best = best.min(acc),
            (Some((x, ra)), Some((y, rb))) => {
                walk(ra, rb, cost, acc + cost(Some(x), Some(y)), best);
                walk(ra, b, cost, acc + cost(Some(x), None), best);
                walk(a, rb, cost, acc + cost(None, Some(y)), best);
            }
            (Some((x, ra)), None) => walk(ra, b, cost, acc + cost(Some(x), None), best),
            (None, Some((y, rb))) => walk(a, rb, cost, acc + cost(None, Some(y)), best),
        }
    }
    let mut best = f64::INFINITY;
    walk(a, b, cost, 0.0, &mut best);
    best
}

/// Complementary error function: power series below 3, Lentz continued
/// fraction above.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 3.0 {
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= -x * x / n;
            let add = term / (2.0 * n + 1.0);
            sum += add;
            if add.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        1.0 - 2.0 / PI.sqrt() * sum
    } else {
        // erfc(x) = exp(-x²)/sqrt(pi) · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        let tiny = 1e-300;
        let mut f = x;
        let mut c = x;
        let mut d = 0.0;
        for k in 1..500 {
            let a = k as f64 / 2.0;
            d = x + a * d;
            if d.abs() < tiny {
                d = tiny;
            }
            c = x + a / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x * x).exp() / PI.sqrt() / f
    }
}

/// Steiger's modified Z coded from its covariance form:
/// `psi = r_kh(1 - 2m) - m(1 - 2m - r_kh²)/2` with `m = r̄²`,
/// `c = psi / (1 - m)²`, `Z = (z_jk - z_jh) / sqrt((2 - 2c)/(n - 3))`.
pub fn steiger(r_jk: f64, r_jh: f64, r_kh: f64, n: usize) -> (f64, f64) {
    let fisher = |r: f64| 0.5 * ((1.0 + r) / (1.0 - r)).ln();
    let rbar = 0.5 * (r_jk + r_jh);
    let m = rbar * rbar;
    let psi = r_kh * (1.0 - 2.0 * m) - 0.5 * m * (1.0 - 2.0 * m - r_kh * r_kh);
    let c = psi / ((1.0 - m) * (1.0 - m));
    let se = ((2.0 - 2.0 * c) / (n as f64 - 3.0)).sqrt();
    let z = (fisher(r_jk) - fisher(r_jh)) / se;
    (z, erfc(z.abs() / 2f64.sqrt()))
}

/// Static cepstra (13 per frame) of a 16 kHz signal: 25 ms Hamming frames
/// every 10 ms, 0.97 pre-emphasis, naive 512-point DFT, 26 triangular mel
/// filters on FFT-bin boundaries over 0-8000 Hz, orthonormal DCT, and the log
/// of the summed power spectrum in place of c0.
pub fn reference_mfcc(signal: &[f64]) -> Vec<Vec<f64>> {
    const SR: f64 = 16000.0;
    const WIN: usize = 400;
    const HOP: usize = 160;
    const NFFT: usize = 512;
    const NFILT: usize = 26;
    const NCEP: usize = 13;

    let mut emph = vec![signal[0]];
    for t in 1..signal.len() {
        emph.push(signal[t] - 0.97 * signal[t - 1]);
    }
    let mel = |f: f64| 1127.0 * (1.0 + f / 700.0).ln();
    let inv = |m: f64| 700.0 * ((m / 1127.0).exp() - 1.0);
    let points: Vec<usize> = (0..NFILT + 2)
        .map(|i| {
            let hz = inv(mel(0.0) + (mel(SR / 2.0) - mel(0.0)) * i as f64 / (NFILT + 1) as f64);
            ((NFFT + 1) as f64 * hz / SR).floor() as usize
        })
        .collect();
    let half = NFFT / 2 + 1;
    let mut bank = vec![vec![0.0; half]; NFILT];
    for (m, row) in bank.iter_mut().enumerate() {
        let (l, c, r) = (points[m], points[m + 1], points[m + 2]);
        for (k, w) in row.iter_mut().enumerate() {
            if k >= l && k < c && c > l {
                *w = (k - l) as f64 / (c - l) as f64;
            } else if k >= c && k < r && r > c {
                *w = (r - k) as f64 / (r - c) as f64;
            }
        }
    }

    let frames = if signal.len() < WIN { 0 } else { (signal.len() - WIN) / HOP + 1 };
    (0..frames)
        .map(|f| {
            let frame: Vec<f64> = (0..WIN)
                .map(|n| {
                    let w = 0.54 - 0.46 * (2.0 * PI * n as f64 / (WIN as f64 - 1.0)).cos();
                    emph[f * HOP + n] * w
                })
                .collect();
            let power: Vec<f64> = (0..half)
                .map(|k| {
                    let (mut re, mut im) = (0.0, 0.0);
                    for (n, x) in frame.iter().enumerate() {
                        let ang = -2.0 * PI * (k * n) as f64 / NFFT as f64;
                        re += x * ang.cos();
                        im += x * ang.sin();
                    }
                    (re * re + im * im) / NFFT as f64
                })
                .collect();
            let logmel: Vec<f64> = bank
                .iter()
                .map(|row| row.iter().zip(&power).map(|(w, p)| w * p).sum::<f64>().max(1e-10).ln())
                .collect();
            let mut cep: Vec<f64> = (0..NCEP)
                .map(|q| {
                    let norm = if q == 0 { (1.0 / NFILT as f64).sqrt() } else { (2.0 / NFILT as f64).sqrt() };
                    norm * logmel
                        .iter()
                        .enumerate()
                        .map(|(j, v)| v * (PI * q as f64 * (2 * j + 1) as f64 / (2 * NFILT) as f64).cos())
                        .sum::<f64>()
                })
                .collect();
            cep[0] = power.iter().sum::<f64>().max(1e-10).ln();
            cep
        })
        .collect()
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}
