//! Fourier coefficients of level-1 Hecke eigenforms.
//!
//! The weight-12 discriminant form is generated natively from the eta
//! product `q * prod_{n>=1} (1 - q^n)^24`; other one-dimensional weights
//! (16, 18, 20, 22, 26) enter through the JSON coefficient format. All
//! exact arithmetic is 128-bit signed with checked overflow, so the
//! dual-method consistency checks are exact integer comparisons.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};

/// Exact and normalized Hecke eigenvalues `a(1..N)` of a weight-`k` form.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficients {
    weight: u32,
    exact: Vec<i128>,
    normalized: Vec<f64>,
}

/// Report produced by [`verify_coefficients`].
#[derive(Debug, Clone, Default, Serialize)]
pub struct CoefficientReport {
    /// Coprime pairs `(m, n)` with `a(m*n) != a(m)*a(n)`.
    pub multiplicativity_violations: Vec<(usize, usize)>,
    /// Pairs `(p, r)` violating `a(p^{r+1}) = a(p) a(p^r) - p^{k-1} a(p^{r-1})`.
    pub recurrence_violations: Vec<(usize, u32)>,
    /// Indices with `|a(n)| > d(n) n^{(k-1)/2}`.
    pub bound_violations: Vec<usize>,
    /// Samples of `|sum_{n<=x} a(n)| / (x^{k/2} log x)` on a geometric grid.
    pub partial_sum_samples: Vec<PartialSumSample>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PartialSumSample {
    pub x: usize,
    pub ratio: f64,
}

impl CoefficientReport {
    pub fn is_clean(&self) -> bool {
        self.multiplicativity_violations.is_empty()
            && self.recurrence_violations.is_empty()
            && self.bound_violations.is_empty()
    }
}

/// On-disk JSON schema: exact values as decimal strings to avoid 64-bit
/// truncation in JSON readers.
#[derive(Serialize, Deserialize)]
struct CoefficientFile {
    weight: u32,
    count: usize,
    exact: Vec<String>,
}

const MAX_COUNT: usize = 1_000_000;

impl FourierCoefficients {
    /// Build a table from exact values, validating eigenform invariants.
    pub fn from_exact(weight: u32, exact: Vec<i128>) -> Result<Self> {
        if weight < 12 || weight % 2 != 0 {
            return Err(Error::InvalidCoefficients(format!(
                "weight must be an even integer >= 12, got {weight}"
            )));
        }
        if exact.is_empty() {
            return Err(Error::InvalidCoefficients("empty coefficient table".into()));
        }
        if exact[0] != 1 {
            return Err(Error::InvalidCoefficients(format!(
                "eigenform normalization requires a(1) = 1, got {}",
                exact[0]
            )));
        }
        let normalized = normalize(weight, &exact);
        let table = Self {
            weight,
            exact,
            normalized,
        };
        let report = verify_coefficients(&table);
        if let Some(&(m, n)) = report.multiplicativity_violations.first() {
            return Err(Error::InvalidCoefficients(format!(
                "multiplicativity fails first at a({m}*{n}) != a({m})*a({n})"
            )));
        }
        if let Some(&(p, r)) = report.recurrence_violations.first() {
            return Err(Error::InvalidCoefficients(format!(
                "Hecke recurrence fails first at p = {p}, exponent {r}"
            )));
        }
        if let Some(&n) = report.bound_violations.first() {
            return Err(Error::InvalidCoefficients(format!(
                "Deligne bound fails first at n = {n}"
            )));
        }
        Ok(table)
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn count(&self) -> usize {
        self.exact.len()
    }

    /// Exact `a(n)` (1-indexed).
    pub fn exact(&self, n: usize) -> i128 {
        self.exact[n - 1]
    }

    pub fn exact_slice(&self) -> &[i128] {
        &self.exact
    }

    /// Normalized `a(n) * n^{-(k-1)/2}` (1-indexed).
    pub fn normalized(&self, n: usize) -> f64 {
        self.normalized[n - 1]
    }

    pub fn normalized_slice(&self) -> &[f64] {
        &self.normalized
    }

    /// Exact values rounded to `f64`, used by series evaluation.
    pub fn exact_f64(&self) -> Vec<f64> {
        self.exact.iter().map(|&a| a as f64).collect()
    }

    /// Write the table in the coefficient JSON format.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = CoefficientFile {
            weight: self.weight,
            count: self.exact.len(),
            exact: self.exact.iter().map(|a| a.to_string()).collect(),
        };
        let mut text = serde_json::to_string_pretty(&file)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

fn normalize(weight: u32, exact: &[i128]) -> Vec<f64> {
    let half = (weight as f64 - 1.0) / 2.0;
    exact
        .iter()
        .enumerate()
        .map(|(i, &a)| a as f64 * ((i + 1) as f64).powf(-half))
        .collect()
}

/// Dense integer polynomial product, truncated at degree `n_max`.
///
/// When both operands fit in `i64`, products widen to `i128` directly;
/// otherwise each multiplication is checked. The accumulating sums are
/// checked in both paths. On overflow the reported index is the series
/// index `n = degree + 1` of the offending coefficient.
fn poly_mul(a: &[i128], b: &[i128], n_max: usize) -> Result<Vec<i128>> {
    let fits_i64 =
        |v: &[i128]| v.iter().all(|&x| x >= i64::MIN as i128 && x <= i64::MAX as i128);
    let len = n_max + 1;
    let mut out = vec![0i128; len.min(a.len() + b.len() - 1)];

    if fits_i64(a) && fits_i64(b) {
        let a64: Vec<i64> = a.iter().map(|&x| x as i64).collect();
        let b64: Vec<i64> = b.iter().map(|&x| x as i64).collect();
        for (i, &ai) in a64.iter().enumerate() {
            if ai == 0 || i >= out.len() {
                continue;
            }
            let jmax = (out.len() - i).min(b64.len());
            for (j, &bj) in b64.iter().enumerate().take(jmax) {
                if bj == 0 {
                    continue;
                }
                let prod = ai as i128 * bj as i128;
                out[i + j] = out[i + j]
                    .checked_add(prod)
                    .ok_or(Error::Overflow { n: i + j + 1 })?;
            }
        }
    } else {
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 || i >= out.len() {
                continue;
            }
            let jmax = (out.len() - i).min(b.len());
            for (j, &bj) in b.iter().enumerate().take(jmax) {
                if bj == 0 {
                    continue;
                }
                let prod = ai.checked_mul(bj).ok_or(Error::Overflow { n: i + j + 1 })?;
                out[i + j] = out[i + j]
                    .checked_add(prod)
                    .ok_or(Error::Overflow { n: i + j + 1 })?;
            }
        }
    }
    Ok(out)
}

/// Ramanujan tau coefficients `tau(1..n)` for the weight-12 form.
///
/// Expands `q * prod (1-q^n)^24` with `prod (1-q^n)` as the sparse
/// pentagonal-number series and the 24th power as repeated squaring:
/// `E24 = (E8)^3` with `E8 = ((E^2)^2)^2`.
pub fn tau_coefficients(n: usize) -> Result<FourierCoefficients> {
    if n == 0 {
        return Err(Error::Config("coefficient count must be >= 1".into()));
    }
    if n > MAX_COUNT {
        return Err(Error::Config(format!(
            "coefficient count {n} exceeds the supported maximum {MAX_COUNT}"
        )));
    }
    // tau(m) is the coefficient of q^{m-1} in E24.
    let deg = n - 1;

    // Pentagonal series: prod (1-q^m) = sum_j (-1)^j q^{j(3j-1)/2}.
    let mut pent = vec![0i128; deg + 1];
    pent[0] = 1;
    let mut j = 1i64;
    loop {
        let g1 = j * (3 * j - 1) / 2;
        let g2 = j * (3 * j + 1) / 2;
        if g1 as usize > deg && g2 as usize > deg {
            break;
        }
        let sign = if j % 2 == 0 { 1 } else { -1 };
        if (g1 as usize) <= deg {
            pent[g1 as usize] += sign;
        }
        if (g2 as usize) <= deg {
            pent[g2 as usize] += sign;
        }
        j += 1;
    }

    let e2 = poly_mul(&pent, &pent, deg)?;
    let e4 = poly_mul(&e2, &e2, deg)?;
    let e8 = poly_mul(&e4, &e4, deg)?;
    let e16 = poly_mul(&e8, &e8, deg)?;
    let mut e24 = poly_mul(&e16, &e8, deg)?;
    e24.resize(deg + 1, 0);

    FourierCoefficients::from_exact(12, e24)
}

/// Smallest-prime-factor sieve for `1..=n`.
fn spf_sieve(n: usize) -> Vec<usize> {
    let mut spf: Vec<usize> = (0..=n).collect();
    let mut p = 2;
    while p * p <= n {
        if spf[p] == p {
            let mut q = p * p;
            while q <= n {
                if spf[q] == q {
                    spf[q] = p;
                }
                q += p;
            }
        }
        p += 1;
    }
    spf
}

/// Divisor counts `d(1..=n)`.
fn divisor_counts(n: usize, spf: &[usize]) -> Vec<u32> {
    let mut d = vec![1u32; n + 1];
    for m in 2..=n {
        let p = spf[m];
        let mut mm = m;
        let mut e = 0;
        while mm % p == 0 {
            mm /= p;
            e += 1;
        }
        d[m] = d[mm] * (e + 1);
    }
    d
}

/// Check eigenform invariants and sample partial-sum growth (report-only).
pub fn verify_coefficients(c: &FourierCoefficients) -> CoefficientReport {
    let n = c.count();
    let k = c.weight();
    let mut report = CoefficientReport::default();
    let spf = spf_sieve(n);
    let d = divisor_counts(n, &spf);

    // Multiplicativity at coprime pairs: check a(m*q^e) = a(m) a(q^e) with
    // q^e the full power of the smallest prime factor; this factorization
    // covers every composite once and implies the general coprime identity.
    'outer: for m in 2..=n {
        let p = spf[m];
        let mut pe = p;
        let mut rest = m / p;
        while rest % p == 0 {
            pe *= p;
            rest /= p;
        }
        if rest == 1 {
            continue; // prime power, handled by the recurrence below
        }
        let lhs = c.exact(m);
        let rhs = match c.exact(pe).checked_mul(c.exact(rest)) {
            Some(v) => v,
            None => {
                report.multiplicativity_violations.push((pe, rest));
                continue 'outer;
            }
        };
        if lhs != rhs {
            report.multiplicativity_violations.push((pe, rest));
        }
    }

    // Hecke recurrence at prime powers: a(p^{r+1}) = a(p) a(p^r) - p^{k-1} a(p^{r-1}).
    let mut p = 2;
    while p * p <= n {
        if spf[p] == p {
            let pk1 = (p as i128).checked_pow(k - 1);
            let mut pe = p * p; // p^{r+1}
            let mut r = 1u32;
            while pe <= n {
                let prev2 = c.exact(pe / (p * p));
                let prev1 = c.exact(pe / p);
                let ok = (|| {
                    let t1 = c.exact(p).checked_mul(prev1)?;
                    let t2 = pk1?.checked_mul(prev2)?;
                    t1.checked_sub(t2)
                })();
                match ok {
                    Some(v) if v == c.exact(pe) => {}
                    _ => report.recurrence_violations.push((p, r)),
                }
                pe *= p;
                r += 1;
            }
        }
        p += 1;
    }

    // Deligne bound |a(n)| <= d(n) n^{(k-1)/2}. At primes the comparison
    // a(p)^2 <= 4 p^{k-1} is exact when it fits; otherwise a float check
    // with a small slack for the n^{(k-1)/2} rounding.
    for m in 1..=n {
        let is_prime = m > 1 && spf[m] == m;
        if is_prime {
            if let (Some(sq), Some(bound)) = (
                c.exact(m).checked_mul(c.exact(m)),
                (m as i128).checked_pow(k - 1).and_then(|v| v.checked_mul(4)),
            ) {
                if sq > bound {
                    report.bound_violations.push(m);
                }
                continue;
            }
        }
        let norm = c.normalized(m).abs();
        if norm > d[m] as f64 * (1.0 + 1e-10) {
            report.bound_violations.push(m);
        }
    }

    // Partial-sum growth |sum_{m<=x} a(m)| / (x^{k/2} log x) on x = 10^{j/2}.
    let mut partial: i128 = 0;
    let mut overflowed = false;
    let mut grid: Vec<usize> = Vec::new();
    let mut x = 10.0f64;
    while x <= n as f64 + 0.5 {
        grid.push(x.round() as usize);
        x *= 10.0f64.sqrt();
    }
    if !grid.contains(&n) {
        grid.push(n);
    }
    let mut gi = 0;
    for m in 1..=n {
        if !overflowed {
            match partial.checked_add(c.exact(m)) {
                Some(v) => partial = v,
                None => overflowed = true,
            }
        }
        while gi < grid.len() && grid[gi] == m {
            if !overflowed {
                let xf = m as f64;
                let denom = xf.powf(k as f64 / 2.0) * xf.ln();
                report.partial_sum_samples.push(PartialSumSample {
                    x: m,
                    ratio: (partial as f64).abs() / denom,
                });
            }
            gi += 1;
        }
    }

    report
}

/// Load a coefficient table from the JSON format, re-validating invariants.
pub fn load_coefficients(path: &Path) -> Result<FourierCoefficients> {
    let text = std::fs::read_to_string(path)?;
    let file: CoefficientFile = serde_json::from_str(&text)?;
    if file.exact.len() != file.count {
        return Err(Error::InvalidCoefficients(format!(
            "count field {} disagrees with {} stored values",
            file.count,
            file.exact.len()
        )));
    }
    let mut exact = Vec::with_capacity(file.exact.len());
    for (i, s) in file.exact.iter().enumerate() {
        let v: i128 = s.trim().parse().map_err(|_| {
            Error::InvalidCoefficients(format!("entry {} is not a decimal integer: {s:?}", i + 1))
        })?;
        exact.push(v);
    }
    FourierCoefficients::from_exact(file.weight, exact)
}
