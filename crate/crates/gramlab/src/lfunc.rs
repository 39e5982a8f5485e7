//! The analytic core: the functional-equation factor `Delta_L` and its
//! explicit holomorphic logarithm, the phase function `theta`, the cusp
//! form on the upper half plane, and L / Hardy-type Z evaluation.
//!
//! # Evaluation strategy
//!
//! `l_eval` uses the completed-integral representation
//!
//! ```text
//! L(s) = (2pi)^s / Gamma(s) * Int_1^inf f(iy) (y^{s-1} + i^k y^{k-s-1}) dy
//! ```
//!
//! with one twist: on the real axis the two `y`-powers cancel against each
//! other to a relative level of about `exp(-pi t / 2)`, which exhausts
//! double precision already near `t = 25`. The integrand is holomorphic in
//! `Re(y) > 0` and decays on every ray `arg(y) = phi < pi/2`, so each of
//! the two pieces is integrated along its own rotated ray `y = u e^{+-i
//! phi}` with `phi = pi/2 - delta`, `delta ~ budget/t`. The rotation pulls
//! the factor `e^{i s phi}` (of modulus `e^{-t phi}`) out of the integral
//! analytically; what remains is an oscillatory but cancellation-free
//! integral handled by the adaptive panels in [`crate::quad`]. All
//! exponentially large/small prefactors combine in log space.

use std::sync::Arc;

use crate::coeffs::FourierCoefficients;
use crate::error::{Error, Result};
use crate::ksum::{KahanComplex, KahanSum};
use crate::quad::{self, QuadOptions};
use crate::special::{digamma, log_gamma};
use crate::Complex;

const LN_2PI: f64 = 1.837_877_066_409_345_5;
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Largest `|Im s|` the quadrature is validated for.
pub const T_MAX: f64 = 2000.0;

/// Rotation budget: the ray angle is `pi/2 - budget/t`, so roughly
/// `e^budget` of the exponential cancellation is left in place.
const ROTATION_BUDGET: f64 = 9.0;

/// Relative truncation target for the Fourier series of `f`.
const F_SERIES_EPS: f64 = 1e-16;

/// Immutable evaluation context for one eigenform.
#[derive(Debug, Clone)]
pub struct LContext {
    weight: u32,
    coeffs: Arc<FourierCoefficients>,
    exact_f64: Arc<Vec<f64>>,
    quad_tol: f64,
    tail_cut: f64,
    c: f64,
    d: f64,
}

impl LContext {
    /// Context with default tolerances and tuning constants
    /// (`quad_tol = 1e-12`, `c = 0.5001`, `d = 0.75`).
    pub fn new(coeffs: FourierCoefficients) -> Result<Self> {
        let quad_tol = 1e-12;
        let exact_f64 = Arc::new(coeffs.exact_f64());
        let ctx = Self {
            weight: coeffs.weight(),
            coeffs: Arc::new(coeffs),
            exact_f64,
            quad_tol,
            tail_cut: default_tail_cut(quad_tol),
            c: 0.5001,
            d: 0.75,
        };
        Ok(ctx)
    }

    pub fn with_quad_tol(mut self, quad_tol: f64) -> Result<Self> {
        if !(1e-14..=1e-6).contains(&quad_tol) {
            return Err(Error::Config(format!(
                "quad_tol must lie in [1e-14, 1e-6], got {quad_tol:e}"
            )));
        }
        self.quad_tol = quad_tol;
        self.tail_cut = default_tail_cut(quad_tol);
        Ok(self)
    }

    pub fn with_c(mut self, c: f64) -> Result<Self> {
        if !(c > 0.5 && c < self.weight as f64 / 2.0) {
            return Err(Error::Config(format!(
                "c must lie in (1/2, k/2) = (0.5, {}), got {c}",
                self.weight as f64 / 2.0
            )));
        }
        self.c = c;
        Ok(self)
    }

    pub fn with_d(mut self, d: f64) -> Result<Self> {
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::Config(format!("d must lie in (0, 1), got {d}")));
        }
        self.d = d;
        Ok(self)
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn coefficients(&self) -> &FourierCoefficients {
        &self.coeffs
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad_tol
    }

    /// Baseline upper quadrature limit for the unrotated (small-`t`) regime.
    pub fn tail_cut(&self) -> f64 {
        self.tail_cut
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// Sign `i^k` in the functional equation (`+1` for `k % 4 == 0`).
    pub fn fe_sign(&self) -> f64 {
        if self.weight % 4 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn half_shift(&self) -> f64 {
        (self.weight as f64 - 1.0) / 2.0
    }

    fn in_strip(&self, s: Complex) -> Result<()> {
        let k = self.weight as f64;
        if !(s.re > 0.0 && s.re < k) {
            return Err(Error::Domain(format!(
                "s = {s} outside the strip 0 < Re(s) < {k}"
            )));
        }
        Ok(())
    }
}

fn default_tail_cut(quad_tol: f64) -> f64 {
    (quad_tol.recip().ln() / TWO_PI + 2.0).max(6.0)
}

/// Evaluation result carrying an a-posteriori error estimate.
///
/// Consumers must treat results with `est_error` above their requested
/// tolerance as failures.
#[derive(Debug, Clone, Copy)]
pub struct EvalResult {
    pub value: Complex,
    pub est_error: f64,
}

/// One Hardy-type Z value with its discarded imaginary residual.
#[derive(Debug, Clone, Copy)]
pub struct ZValue {
    pub value: f64,
    pub im_residual: f64,
    pub est_error: f64,
}

// ---------------------------------------------------------------------------
// log Delta_L and theta
// ---------------------------------------------------------------------------

/// Explicit holomorphic logarithm of the functional-equation factor on the
/// strip `0 < Re(s) < k`:
///
/// `log Delta(s) = k pi i/2 + (2s - k) log(2pi) + log_gamma(k-s) - log_gamma(s)`.
pub fn log_delta(ctx: &LContext, s: Complex) -> Result<Complex> {
    ctx.in_strip(s)?;
    let k = ctx.weight as f64;
    let val = Complex::new(0.0, k * std::f64::consts::FRAC_PI_2)
        + (s * 2.0 - k) * LN_2PI
        + log_gamma(Complex::new(k, 0.0) - s)?
        - log_gamma(s)?;
    Ok(val)
}

/// Large-`t` approximation of [`log_delta`], uniform on the strip:
/// `(k - 2 sigma) log(t/2pi) - 2 i t log(t/(2pi e)) + pi i/2`.
pub fn log_delta_asymptotic(ctx: &LContext, s: Complex) -> Result<Complex> {
    ctx.in_strip(s)?;
    let t = s.im;
    if t < 10.0 {
        return Err(Error::Domain(format!(
            "asymptotic form requires Im(s) >= 10, got {t}"
        )));
    }
    let k = ctx.weight as f64;
    let re = (k - 2.0 * s.re) * (t / TWO_PI).ln();
    let im = -2.0 * t * (t / (TWO_PI * std::f64::consts::E)).ln() + std::f64::consts::FRAC_PI_2;
    Ok(Complex::new(re, im))
}

/// Exact derivative `d/ds log Delta(s) = 2 log(2pi) - psi(k-s) - psi(s)`.
pub fn log_delta_deriv(ctx: &LContext, s: Complex) -> Result<Complex> {
    ctx.in_strip(s)?;
    let k = ctx.weight as f64;
    Ok(Complex::new(2.0 * LN_2PI, 0.0) - digamma(Complex::new(k, 0.0) - s)? - digamma(s)?)
}

/// Large-`t` approximation of the derivative:
/// `-2 log(t/2pi) - i (k - 2 sigma)/t`.
pub fn log_delta_deriv_asymptotic(ctx: &LContext, s: Complex) -> Result<Complex> {
    ctx.in_strip(s)?;
    let t = s.im;
    if t < 10.0 {
        return Err(Error::Domain(format!(
            "asymptotic form requires Im(s) >= 10, got {t}"
        )));
    }
    let k = ctx.weight as f64;
    Ok(Complex::new(
        -2.0 * (t / TWO_PI).ln(),
        -(k - 2.0 * s.re) / t,
    ))
}

/// `Delta(s)^z := exp(z log Delta(s))`.
pub fn delta_pow(ctx: &LContext, s: Complex, z: Complex) -> Result<Complex> {
    Ok((z * log_delta(ctx, s)?).exp())
}

/// Phase function and the imaginary residual discarded to make it real.
///
/// `theta(t) = (i/2) log Delta(k/2 + it)` is real-valued in exact
/// arithmetic; the residual `|Re log Delta|/2` measures the numerical
/// deviation and stays below `1e-10` on the validated range.
pub fn theta_with_residual(ctx: &LContext, t: f64) -> Result<(f64, f64)> {
    if t < 0.0 {
        return Err(Error::Domain(format!("theta requires t >= 0, got {t}")));
    }
    let s = Complex::new(ctx.weight as f64 / 2.0, t);
    let ld = log_delta(ctx, s)?;
    Ok((-0.5 * ld.im, 0.5 * ld.re.abs()))
}

/// `theta(t)`, the continuous branch of the argument of `Delta^{-1/2}` on
/// the critical line, with `theta(0) = -k pi / 4`.
pub fn theta(ctx: &LContext, t: f64) -> Result<f64> {
    Ok(theta_with_residual(ctx, t)?.0)
}

/// `theta'(t) = -(1/2) d/ds log Delta(k/2 + it)` (real part; the imaginary
/// part vanishes by conjugate symmetry).
pub fn theta_prime(ctx: &LContext, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::Domain(format!(
            "theta_prime requires t >= 0, got {t}"
        )));
    }
    let s = Complex::new(ctx.weight as f64 / 2.0, t);
    Ok(-0.5 * log_delta_deriv(ctx, s)?.re)
}

// ---------------------------------------------------------------------------
// The cusp form
// ---------------------------------------------------------------------------

/// `f(iy) = sum a(n) e^{-2 pi n y}` for real `y >= 1/2`, truncated when the
/// Deligne-bound tail estimate drops below `quad_tol * e^{-2 pi y}`.
pub fn f_upper_half(ctx: &LContext, y: f64) -> Result<f64> {
    if !(y >= 0.5) {
        return Err(Error::Domain(format!(
            "f_upper_half requires y >= 1/2, got {y}"
        )));
    }
    let coeffs = &ctx.exact_f64;
    let half = (ctx.weight as f64 + 1.0) / 2.0;
    let target = ctx.quad_tol * (-TWO_PI * y).exp();
    let mut acc = KahanSum::new();
    let mut n = 1usize;
    loop {
        // Deligne tail bound: |a(m)| <= d(m) m^{(k-1)/2} <= m^{(k+1)/2}
        let bound = (half * (n as f64).ln() - TWO_PI * y * n as f64).exp();
        if bound < target && n > 1 {
            break;
        }
        if n > coeffs.len() {
            let mut m = n;
            while (half * (m as f64).ln() - TWO_PI * y * m as f64).exp() >= target {
                m += 1;
            }
            return Err(Error::InsufficientCoefficients {
                required: m,
                available: coeffs.len(),
            });
        }
        acc.add(coeffs[n - 1] * (-TWO_PI * y * n as f64).exp());
        n += 1;
    }
    Ok(acc.value())
}

/// `f(i u e^{i phi})` for `u >= 1`, together with a bound on the truncation
/// error. `cos_phi` must be positive.
fn f_on_ray(
    exact: &[f64],
    weight: u32,
    u: f64,
    cos_phi: f64,
    sin_phi: f64,
) -> Result<(Complex, f64)> {
    let half = (weight as f64 + 1.0) / 2.0;
    let ln_q_abs = -TWO_PI * u * cos_phi;
    let q_abs = ln_q_abs.exp();
    let q = Complex::from_polar(q_abs, -TWO_PI * u * sin_phi);

    let mut acc = KahanComplex::new();
    let mut q_pow = Complex::new(1.0, 0.0);
    let mut n = 0usize;
    loop {
        // chunk of 32 terms between truncation checks
        let chunk_end = (n + 32).min(exact.len());
        while n < chunk_end {
            q_pow *= q;
            acc.add(q_pow * exact[n]);
            n += 1;
        }
        // remaining-terms bound: sum_{m>n} m^{(k+1)/2} |q|^m, estimated by
        // the next term over a geometric factor once the terms decrease
        let m = (n + 1) as f64;
        let next_bound = (half * m.ln() + m * ln_q_abs).exp();
        let ratio = ((m + 1.0) / m).powf(half) * q_abs;
        if ratio < 0.95 {
            let remainder = next_bound / (1.0 - ratio);
            if remainder < F_SERIES_EPS * (q_abs + acc.value().norm()) {
                return Ok((acc.value(), remainder));
            }
        }
        if n >= exact.len() {
            // estimate how many coefficients would have been needed
            let mut m = n as f64;
            while half * m.ln() + m * ln_q_abs >= (F_SERIES_EPS * q_abs).ln() {
                m *= 1.25;
                if m > 1e9 {
                    break;
                }
            }
            return Err(Error::InsufficientCoefficients {
                required: m as usize,
                available: exact.len(),
            });
        }
    }
}

// ---------------------------------------------------------------------------
// L evaluation
// ---------------------------------------------------------------------------

/// Truncated Dirichlet series `sum a(n) n^{-s}` in the region of absolute
/// convergence, with a divisor-bound tail estimate in `est_error`.
pub fn l_direct(ctx: &LContext, s: Complex) -> Result<EvalResult> {
    let k = ctx.weight as f64;
    let abscissa = (k + 1.0) / 2.0;
    if s.re < abscissa + 0.5 {
        return Err(Error::Domain(format!(
            "l_direct requires Re(s) >= {} (absolute convergence with margin), got {}",
            abscissa + 0.5,
            s.re
        )));
    }
    // normalized coefficients against the shifted exponent keep both
    // factors of each term near unit scale
    let w = s - ctx.half_shift();
    let mut acc = KahanComplex::new();
    for (i, &a) in ctx.coeffs.normalized_slice().iter().enumerate() {
        if a != 0.0 {
            let n = (i + 1) as f64;
            acc.add((-w * n.ln()).exp() * a);
        }
    }
    let alpha = s.re - ctx.half_shift();
    let m = ctx.coeffs.count() as f64;
    // sum_{n>M} d(n) n^{-alpha}
    //   <= alpha M^{1-alpha} [ (1+ln M)/(alpha-1) + 1/(alpha-1)^2 ]
    let tail = alpha
        * m.powf(1.0 - alpha)
        * ((1.0 + m.ln()) / (alpha - 1.0) + (alpha - 1.0).powi(-2));
    Ok(EvalResult {
        value: acc.value(),
        est_error: tail,
    })
}

/// Ray geometry for the completed integral at height `t >= 0`.
struct Ray {
    phi: f64,
    cos_phi: f64,
    sin_phi: f64,
}

fn rotation(t: f64) -> Ray {
    let delta = if t <= ROTATION_BUDGET / std::f64::consts::FRAC_PI_2 {
        std::f64::consts::FRAC_PI_2
    } else {
        ROTATION_BUDGET / t
    };
    let phi = std::f64::consts::FRAC_PI_2 - delta;
    Ray {
        phi,
        cos_phi: delta.sin(),
        sin_phi: delta.cos(),
    }
}

/// Upper limit `U` with `e^{-2 pi U cos_phi} U^m < target`, past the peak
/// of that envelope.
fn ray_cutoff(m: f64, cos_phi: f64, target_log: f64) -> f64 {
    let alpha = TWO_PI * cos_phi;
    let peak = (m / alpha).max(1.0);
    let mut u = 2.0 * peak + 4.0;
    for _ in 0..200 {
        if m * u.ln() - alpha * u < target_log {
            break;
        }
        u *= 1.2;
    }
    u
}

/// One rotated-ray piece `Int_1^U f(i u e^{sign * i phi}) u^{w-1} du`.
fn ray_integral(
    ctx: &LContext,
    ray: &Ray,
    w: Complex,
    sign: f64,
    abs_tol: f64,
) -> Result<(Complex, f64)> {
    let exact = ctx.exact_f64.as_slice();
    let weight = ctx.weight;
    let t_abs = w.im.abs();

    // pre-check coefficient supply at u = 1 (the hungriest point)
    f_on_ray(exact, weight, 1.0, ray.cos_phi, sign * ray.sin_phi)?;

    // tail cutoff from the envelope |f(iue^{i phi})| u^{Re w - 1}
    let m = (w.re - 1.0).max(0.0);
    let target_log = (abs_tol * 1e-2).max(1e-280).ln();
    let u_max = ray_cutoff(m, ray.cos_phi, target_log).max(ctx.tail_cut);

    let integrand = |u: f64| -> Complex {
        match f_on_ray(exact, weight, u, ray.cos_phi, sign * ray.sin_phi) {
            Ok((f, _)) => f * ((w - 1.0) * u.ln()).exp(),
            Err(_) => Complex::new(f64::NAN, f64::NAN),
        }
    };
    let tan_phi = ray.sin_phi / ray.cos_phi;
    let freq = move |u: f64| (t_abs + 1.2 * (weight as f64 + 1.0) * tan_phi + TWO_PI) / u;

    let opts = QuadOptions {
        abs_tol,
        ..QuadOptions::default()
    };
    let r = quad::integrate(&integrand, 1.0, u_max, &freq, opts)?;
    if !r.value.re.is_finite() || !r.value.im.is_finite() {
        return Err(Error::Numeric(
            "non-finite ray integral (coefficient table exhausted mid-quadrature)".into(),
        ));
    }
    // analytic bound on the discarded tail
    let alpha = TWO_PI * ray.cos_phi;
    let tail = if alpha * u_max > m + 1.0 {
        3.0 * (m * u_max.ln() - alpha * u_max).exp() / (alpha - m / u_max)
    } else {
        f64::INFINITY
    };
    Ok((r.value, r.est_error + tail))
}

/// L(s) on the strip `0 < Re(s) < k`, `|Im s| <= 2000`, by the
/// completed-integral representation on rotated rays.
pub fn l_eval(ctx: &LContext, s: Complex) -> Result<EvalResult> {
    ctx.in_strip(s)?;
    if s.im.abs() > T_MAX {
        return Err(Error::Domain(format!(
            "|Im s| = {} exceeds the validated range {T_MAX}",
            s.im.abs()
        )));
    }
    if s.im < 0.0 {
        let r = l_eval(ctx, s.conj())?;
        return Ok(EvalResult {
            value: r.value.conj(),
            est_error: r.est_error,
        });
    }

    let k = ctx.weight as f64;
    let ray = rotation(s.im);

    // prefactor exponents; Re is ~ t*delta + O(log t), never large
    let lg = log_gamma(s)?;
    let w_plus = s * LN_2PI - lg + Complex::i() * s * ray.phi;
    let w_minus = s * LN_2PI - lg + Complex::i() * (s - k) * ray.phi;
    let scale_plus = w_plus.re.exp();
    let scale_minus = w_minus.re.exp();

    // aim the quadrature at ~quad_tol absolute error on the final L value
    let tol_plus = (ctx.quad_tol / scale_plus).max(1e-300);
    let tol_minus = (ctx.quad_tol / scale_minus).max(1e-300);

    let (j_plus, e_plus) = ray_integral(ctx, &ray, s, 1.0, tol_plus)?;
    let (j_minus, e_minus) =
        ray_integral(ctx, &ray, Complex::new(k, 0.0) - s, -1.0, tol_minus)?;

    let value = w_plus.exp() * j_plus + ctx.fe_sign() * w_minus.exp() * j_minus;
    let est_error = scale_plus * e_plus + scale_minus * e_minus + 2.0 * ctx.quad_tol;
    Ok(EvalResult { value, est_error })
}

/// Hardy-type `Z(t) = Re[e^{i theta(t)} L(k/2 + it)]`.
///
/// The discarded imaginary part is returned and must satisfy
/// `|Im| <= max(1e-8, 1e-8 |Z|)`; a larger residual signals a quadrature
/// or branch fault and is reported as an error.
pub fn z_eval(ctx: &LContext, t: f64) -> Result<ZValue> {
    if t < 0.0 {
        return Err(Error::Domain(format!("z_eval requires t >= 0, got {t}")));
    }
    let s = Complex::new(ctx.weight as f64 / 2.0, t);
    let l = l_eval(ctx, s)?;
    let th = theta(ctx, t)?;
    let rotated = Complex::from_polar(1.0, th) * l.value;
    let value = rotated.re;
    let im_residual = rotated.im;
    let bound = (1e-8f64).max(1e-8 * value.abs());
    if im_residual.abs() > bound {
        return Err(Error::Numeric(format!(
            "Z({t}) imaginary residual {im_residual:.3e} exceeds bound {bound:.3e}"
        )));
    }
    Ok(ZValue {
        value,
        im_residual,
        est_error: l.est_error,
    })
}

/// One sample of the empirical convexity profile `|Delta^{-1/2} L| t^{-c}`.
#[derive(Debug, Clone, Copy)]
pub struct ConvexitySample {
    pub sigma: f64,
    pub t: f64,
    pub modulus: f64,
    pub scaled: f64,
}

/// Sample `|Delta(s)^{-1/2} L(s)| * t^{-c}` on the three vertical lines
/// `sigma = k/2 - c, k/2, k/2 + c`. Reported, not asserted: the growth
/// exponent carries no explicit constant.
pub fn convexity_profile(ctx: &LContext, ts: &[f64]) -> Result<Vec<ConvexitySample>> {
    let k = ctx.weight as f64;
    let sigmas = [k / 2.0 - ctx.c, k / 2.0, k / 2.0 + ctx.c];
    let mut out = Vec::with_capacity(sigmas.len() * ts.len());
    for &sigma in &sigmas {
        for &t in ts {
            let s = Complex::new(sigma, t);
            let l = l_eval(ctx, s)?;
            let dp = delta_pow(ctx, s, Complex::new(-0.5, 0.0))?;
            let modulus = (dp * l.value).norm();
            out.push(ConvexitySample {
                sigma,
                t,
                modulus,
                scaled: modulus * t.powf(-ctx.c),
            });
        }
    }
    Ok(out)
}
