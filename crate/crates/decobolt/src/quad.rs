//! Adaptive Gauss–Kronrod quadrature on finite and semi-infinite intervals.
//!
//! The integrands in this crate are Planck-weighted moments and sinc
//! moments: smooth, positive, exponentially decaying, sometimes
//! oscillatory. A 15-point Kronrod rule with adaptive bisection covers
//! the finite pieces; semi-infinite integrals go through the t → (1-t)/t
//! substitution.

use std::collections::BinaryHeap;

use crate::{Error, Result};

/// Tolerances for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Relative tolerance on the integral value.
    pub rel_tol: f64,
    /// Absolute tolerance floor.
    pub abs_tol: f64,
    /// Maximum number of interval bisections before giving up.
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { rel_tol: 1e-10, abs_tol: 1e-14, max_subdivisions: 2000 }
    }
}

impl QuadratureConfig {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !(abs_tol > 0.0) {
            return Err(Error::Config(format!(
                "quadrature tolerances must be positive (rel {rel_tol}, abs {abs_tol})"
            )));
        }
        Ok(QuadratureConfig { rel_tol, abs_tol, max_subdivisions })
    }

    /// Default config with the relative tolerance optionally overridden by
    /// the `DECOBOLT_QUAD_TOL` environment variable.
    pub fn from_env() -> Result<Self> {
        match std::env::var("DECOBOLT_QUAD_TOL") {
            Err(_) => Ok(Self::default()),
            Ok(raw) => {
                let rel: f64 = raw.trim().parse().map_err(|_| {
                    Error::Config(format!("DECOBOLT_QUAD_TOL is not a number: {raw:?}"))
                })?;
                let base = Self::default();
                Self::new(rel, base.abs_tol.min(rel * 1e-4), base.max_subdivisions)
            }
        }
    }
}

// 15-point Kronrod nodes with the embedded 7-point Gauss rule (QUADPACK dqk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_33,
    0.949_107_912_342_758_524_526_189_684_047_85,
    0.864_864_423_359_769_072_789_712_788_640_93,
    0.741_531_185_599_394_439_863_864_773_280_79,
    0.586_087_235_467_691_130_294_144_838_258_73,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_24,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_2,
    0.104_790_010_322_250_183_839_876_322_541_52,
    0.140_653_259_715_525_918_745_189_590_510_24,
    0.169_004_726_639_267_902_826_583_426_598_55,
    0.190_350_578_064_785_409_913_256_402_421_01,
    0.204_432_940_075_298_892_414_161_999_234_65,
    0.209_482_141_084_727_828_012_999_174_891_71,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_08,
    0.279_705_391_489_276_667_901_467_771_423_78,
    0.381_830_050_505_118_944_950_369_775_488_97,
    0.417_959_183_673_469_387_755_102_040_816_33,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One Kronrod-15 application on [a, b]: (value, error estimate, ∫|f|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let f_center = f(center);
    let mut res_gauss = f_center * WG[3];
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();

    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];

    // Gauss nodes sit at the odd Kronrod indices.
    for j in 0..3 {
        let jtw = 2 * j + 1;
        let abscissa = half * XGK[jtw];
        let fval1 = f(center - abscissa);
        let fval2 = f(center + abscissa);
        fv1[jtw] = fval1;
        fv2[jtw] = fval2;
        let fsum = fval1 + fval2;
        res_gauss += WG[j] * fsum;
        res_kronrod += WGK[jtw] * fsum;
        res_abs += WGK[jtw] * (fval1.abs() + fval2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        if jtwm1 == 7 {
            continue;
        }
        let abscissa = half * XGK[jtwm1];
        let fval1 = f(center - abscissa);
        let fval2 = f(center + abscissa);
        fv1[jtwm1] = fval1;
        fv2[jtwm1] = fval2;
        res_kronrod += WGK[jtwm1] * (fval1 + fval2);
        res_abs += WGK[jtwm1] * (fval1.abs() + fval2.abs());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (res_kronrod - res_gauss) * half;
    (
        res_kronrod * half,
        rescale_error(err, res_abs * half.abs(), res_asc * half.abs()),
        res_abs * half.abs(),
    )
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Adaptively integrate f over the finite interval [a, b].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (value, error, abs) = gk15(&f, a, b);
    if !value.is_finite() {
        return Err(Error::Quadrature {
            context: format!("non-finite integrand on [{a:.6e}, {b:.6e}]"),
            residual: f64::INFINITY,
        });
    }

    // Can't resolve below the rounding noise of Σ∫|f|.
    let floor = |abs_sum: f64| 50.0 * f64::EPSILON * abs_sum;

    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error, abs });
    let mut total = value;
    let mut err_sum = error;
    let mut abs_sum = abs;

    for _ in 0..cfg.max_subdivisions {
        if err_sum <= cfg.abs_tol.max(cfg.rel_tol * total.abs()).max(floor(abs_sum)) {
            break;
        }
        let worst = match heap.pop() {
            Some(seg) => seg,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at machine resolution; keep its estimate as is.
            heap.push(worst);
            break;
        }
        let (lv, le, la) = gk15(&f, worst.a, mid);
        let (rv, re, ra) = gk15(&f, mid, worst.b);
        if !(lv.is_finite() && rv.is_finite()) {
            return Err(Error::Quadrature {
                context: format!("non-finite integrand near x = {mid:.6e}"),
                residual: err_sum,
            });
        }
        total += lv + rv - worst.value;
        err_sum += le + re - worst.error;
        abs_sum += la + ra - worst.abs;
        heap.push(Segment { a: worst.a, b: mid, value: lv, error: le, abs: la });
        heap.push(Segment { a: mid, b: worst.b, value: rv, error: re, abs: ra });
    }

    // Recompute the totals with compensation; the incremental updates above
    // can drift after thousands of corrections.
    let mut acc = CompensatedSum::default();
    let mut errs = CompensatedSum::default();
    let mut abss = CompensatedSum::default();
    for seg in heap.iter() {
        acc.add(seg.value);
        errs.add(seg.error);
        abss.add(seg.abs);
    }
    let total = acc.value();
    let err_sum = errs.value();
    let abs_sum = abss.value();

    if err_sum <= cfg.abs_tol.max(cfg.rel_tol * total.abs()).max(floor(abs_sum)) {
        Ok(total)
    } else {
        Err(Error::Quadrature {
            context: format!(
                "[{a:.6e}, {b:.6e}] not converged after {} subdivisions",
                cfg.max_subdivisions
            ),
            residual: err_sum,
        })
    }
}

/// Adaptively integrate f over [a, ∞) via the substitution x = a + (1-t)/t.
///
/// The integrand must decay fast enough to be integrable; divergent tails
/// surface as a non-convergence error.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    integrate(
        |t| {
            let x = a + (1.0 - t) / t;
            let fx = f(x);
            if fx == 0.0 {
                0.0
            } else {
                fx / (t * t)
            }
        },
        0.0,
        1.0,
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x * x, 0.0, 1.0, &cfg()).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn sine_full_periods() {
        let v = integrate(f64::sin, 0.0, 20.0 * std::f64::consts::PI, &cfg()).unwrap();
        assert!(v.abs() < 1e-10, "v = {v}");
        let v = integrate(f64::sin, 0.0, std::f64::consts::PI, &cfg()).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_tail() {
        let v = integrate_semi_infinite(|x| (-x).exp(), 0.0, &cfg()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        // Γ(4) = 6 with the tail starting away from zero.
        let v = integrate_semi_infinite(|x| x.powi(3) * (-x).exp(), 0.0, &cfg()).unwrap();
        assert!((v - 6.0).abs() / 6.0 < 1e-12);
    }

    #[test]
    fn gaussian_with_offset_origin() {
        let v = integrate_semi_infinite(|x| (-(x - 3.0) * (x - 3.0)).exp(), 3.0, &cfg()).unwrap();
        assert!((v - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn divergent_integrand_is_an_error() {
        let err = integrate_semi_infinite(|x| 1.0 / (1.0 + x), 0.0, &cfg()).unwrap_err();
        match err {
            Error::Quadrature { residual, .. } => assert!(residual.is_finite() || residual.is_infinite()),
            other => panic!("expected quadrature error, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        assert!(integrate(|x| 1.0 / x, -1.0, 1.0, &cfg()).is_err());
    }

    #[test]
    fn config_rejects_bad_tolerances() {
        assert!(QuadratureConfig::new(0.0, 1e-14, 100).is_err());
        assert!(QuadratureConfig::new(1e-10, -1.0, 100).is_err());
    }

    #[test]
    fn compensated_sum_handles_cancellation() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        s.add(1.0);
        s.add(-1e16);
        assert_eq!(s.value(), 1.0);
    }
}
