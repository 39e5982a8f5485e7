//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands.
//!
//! Panels start from an oscillation-aware initial subdivision: the caller
//! supplies a local frequency bound (radians per unit of the integration
//! variable) and initial panel widths are capped at `2*pi*(15/4)/freq`,
//! i.e. roughly four Kronrod nodes per period. Each initial panel is then
//! bisected recursively until its G7/K15 error estimate meets its share of
//! the tolerance. Values combine in fixed tree order, so results do not
//! depend on the number of worker threads.

use crate::error::{Error, Result};
use crate::Complex;

// 15-point Kronrod abscissae (positive half) with embedded 7-point Gauss.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex,
    pub est_error: f64,
    pub panels: usize,
}

/// Tuning knobs for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    /// Target absolute error over the whole interval.
    pub abs_tol: f64,
    /// Maximum bisection depth per initial panel.
    pub max_depth: u32,
    /// Hard cap on the total number of panels.
    pub max_panels: usize,
    /// Give up (error) once the estimate exceeds `abs_tol * fail_factor`
    /// and no further refinement helps.
    pub fail_factor: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_depth: 44,
            max_panels: 400_000,
            fail_factor: 16.0,
        }
    }
}

/// One G7/K15 evaluation over `[a, b]`: value, error estimate, and the
/// roundoff floor below which the estimate is meaningless.
fn gk15<F: Fn(f64) -> Complex>(f: &F, a: f64, b: f64) -> (Complex, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut kronrod = f_center * WGK[7];
    let mut gauss = f_center * WG[3];
    let mut res_abs = f_center.norm() * WGK[7];
    let mut samples = [Complex::new(0.0, 0.0); 15];
    samples[7] = f_center;

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        samples[j] = f1;
        samples[14 - j] = f2;
        let fsum = f1 + f2;
        kronrod += fsum * WGK[j];
        res_abs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            // odd Kronrod indices carry the embedded Gauss nodes
            gauss += fsum * WG[j / 2];
        }
    }

    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (samples[7] - mean).norm();
    for j in 0..7 {
        res_asc += WGK[j] * ((samples[j] - mean).norm() + (samples[14 - j] - mean).norm());
    }
    res_asc *= half.abs();

    let raw_err = ((kronrod - gauss) * half).norm();
    let mut err = raw_err;
    if res_asc != 0.0 && raw_err != 0.0 {
        let scale = (200.0 * raw_err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    let min_err = 50.0 * f64::EPSILON * res_abs * half.abs();
    if min_err > err {
        err = min_err;
    }

    (kronrod * half, err, min_err)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex,
    err: f64,
    floor: f64,
    depth: u32,
    frozen: bool,
}

// Worst error first; panel start as a deterministic tiebreak.
impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.a == other.a
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err
            .total_cmp(&other.err)
            .then(other.a.total_cmp(&self.a))
    }
}

/// Integrate `f` over `[a, b]` by globally adaptive bisection: the panel
/// with the worst error estimate is refined first, and a panel whose
/// bisection no longer reduces the estimate is frozen (its error is
/// dominated by roundoff, not resolution).
///
/// `freq` bounds the local oscillation frequency in radians per unit of
/// the variable; pass `|_| 0.0` for smooth integrands.
pub fn integrate<F>(
    f: &F,
    a: f64,
    b: f64,
    freq: &dyn Fn(f64) -> f64,
    opts: QuadOptions,
) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex,
{
    assert!(b >= a, "integration bounds out of order");
    if a == b {
        return Ok(QuadResult {
            value: Complex::new(0.0, 0.0),
            est_error: 0.0,
            panels: 0,
        });
    }

    // Oscillation-aware initial subdivision: at most ~3.75 periods per panel.
    let mut edges = vec![a];
    let mut u = a;
    let len = b - a;
    while u < b {
        let cap = 2.0 * std::f64::consts::PI * (15.0 / 4.0) / (freq(u).abs() + 1e-300);
        let step = cap.min(len).max(len * 1e-9);
        u = (u + step).min(b);
        edges.push(u);
        if edges.len() > opts.max_panels {
            return Err(Error::Quadrature {
                a,
                b,
                est_error: f64::INFINITY,
                tol: opts.abs_tol,
                panels: edges.len(),
            });
        }
    }

    let mut heap = std::collections::BinaryHeap::new();
    let mut total_err = 0.0;
    let mut count = 0usize;
    for w in edges.windows(2) {
        let (value, err, floor) = gk15(f, w[0], w[1]);
        total_err += err;
        count += 1;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            err,
            floor,
            depth: 0,
            frozen: false,
        });
    }

    let mut frozen: Vec<Panel> = Vec::new();
    while total_err > opts.abs_tol && count < opts.max_panels {
        let worst = match heap.pop() {
            Some(p) => p,
            None => break, // everything frozen
        };
        if worst.frozen || worst.depth >= opts.max_depth {
            frozen.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le, lf) = gk15(f, worst.a, mid);
        let (rv, re, rf) = gk15(f, mid, worst.b);
        count += 1;
        total_err += le + re - worst.err;
        // no improvement after several bisections: roundoff floor
        let frozen_now = worst.depth >= 6 && le + re >= 0.98 * worst.err;
        for p in [
            Panel {
                a: worst.a,
                b: mid,
                value: lv,
                err: le,
                floor: lf,
                depth: worst.depth + 1,
                frozen: frozen_now,
            },
            Panel {
                a: mid,
                b: worst.b,
                value: rv,
                err: re,
                floor: rf,
                depth: worst.depth + 1,
                frozen: frozen_now,
            },
        ] {
            if p.frozen {
                frozen.push(p);
            } else {
                heap.push(p);
            }
        }
    }

    // Deterministic final reduction in interval order.
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut vre = crate::ksum::KahanSum::new();
    let mut vim = crate::ksum::KahanSum::new();
    let mut errs = crate::ksum::KahanSum::new();
    let mut floors = crate::ksum::KahanSum::new();
    for p in &panels {
        vre.add(p.value.re);
        vim.add(p.value.im);
        errs.add(p.err);
        floors.add(p.floor);
    }
    let est_error = errs.value();

    // A result pinned at the roundoff floor is as good as double precision
    // allows; only genuinely unresolved integrals are errors.
    if est_error > opts.abs_tol * opts.fail_factor && est_error > 4.0 * floors.value() {
        return Err(Error::Quadrature {
            a,
            b,
            est_error,
            tol: opts.abs_tol,
            panels: panels.len(),
        });
    }

    Ok(QuadResult {
        value: Complex::new(vre.value(), vim.value()),
        est_error,
        panels: panels.len(),
    })
}

/// Composite G7/K15 over `panels` equal subintervals, no adaptivity.
///
/// Used by convergence-order checks that need a controlled node count.
pub fn integrate_fixed<F>(f: &F, a: f64, b: f64, panels: usize) -> QuadResult
where
    F: Fn(f64) -> Complex,
{
    let h = (b - a) / panels as f64;
    let mut value = Complex::new(0.0, 0.0);
    let mut err = 0.0;
    for i in 0..panels {
        let (v, e, _) = gk15(f, a + i as f64 * h, a + (i + 1) as f64 * h);
        value += v;
        err += e;
    }
    QuadResult {
        value,
        est_error: err,
        panels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        // K15 integrates degree <= 22 exactly.
        let f = |x: f64| Complex::new(x.powi(7) - 3.0 * x.powi(2) + 1.0, x.powi(3));
        let r = integrate(&f, -1.0, 2.0, &|_| 0.0, QuadOptions::default()).unwrap();
        // antiderivative: x^8/8 - x^3 + x, x^4/4
        let expect_re = (256.0 / 8.0 - 8.0 + 2.0) - (1.0 / 8.0 + 1.0 - 1.0);
        let expect_im = 4.0 - 0.25;
        assert!((r.value.re - expect_re).abs() < 1e-12);
        assert!((r.value.im - expect_im).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_exponential() {
        // integral of e^{i w x} over [0, 10] = (e^{10 i w} - 1)/(i w)
        let w = 40.0;
        let f = move |x: f64| (Complex::i() * w * x).exp();
        let r = integrate(&f, 0.0, 10.0, &|_| w, QuadOptions::default()).unwrap();
        let exact = ((Complex::i() * w * 10.0).exp() - 1.0) / (Complex::i() * w);
        assert!((r.value - exact).norm() < 1e-11, "err {:e}", (r.value - exact).norm());
    }

    #[test]
    fn peaked_integrand_refines() {
        // narrow Gaussian: needs adaptivity, integral ~ sqrt(pi)*0.01
        let f = |x: f64| Complex::new((-((x - 0.3) / 0.01).powi(2)).exp(), 0.0);
        let r = integrate(&f, 0.0, 1.0, &|_| 0.0, QuadOptions::default()).unwrap();
        let exact = std::f64::consts::PI.sqrt() * 0.01;
        assert!((r.value.re - exact).abs() < 1e-13);
        assert!(r.panels > 4);
    }

    #[test]
    fn fixed_panels_converge() {
        let f = |x: f64| Complex::new((5.0 * x).sin() * x.exp(), 0.0);
        let coarse = integrate_fixed(&f, 0.0, 3.0, 2);
        let fine = integrate_fixed(&f, 0.0, 3.0, 4);
        let exact = integrate(&f, 0.0, 3.0, &|_| 5.0, QuadOptions::default())
            .unwrap()
            .value;
        let e_coarse = (coarse.value - exact).norm();
        let e_fine = (fine.value - exact).norm();
        assert!(e_fine < e_coarse);
    }
}
