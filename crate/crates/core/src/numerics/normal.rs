//! Univariate and bivariate standard normal distribution functions.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::quadrature::Quadrature;
use crate::error::{Error, Result};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Below this the standard normal density underflows to zero in `f64`.
const LOWER_CUTOFF: f64 = -38.5;

/// Standard normal density.
pub fn std_normal_pdf(z: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * z * z).exp()
}

/// Standard normal distribution function, `Φ(z) = erfc(-z/√2)/2`.
pub fn std_normal_cdf(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::invalid("z", format!("must be finite, got {z}")));
    }
    Ok(phi(z))
}

#[inline]
pub(crate) fn phi(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Inverse of the standard normal distribution function.
///
/// Wichura's AS 241 (PPND16) initial value, polished by one Halley step
/// against [`std_normal_cdf`].
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("p", format!("must lie in (0, 1), got {p}")));
    }
    Ok(phi_inv(p))
}

pub(crate) fn phi_inv(p: f64) -> f64 {
    let z = ppnd16(p);
    // Halley refinement; the tails are handled through the complementary
    // probability so the residual keeps its relative accuracy.
    let (resid, dens) = if p < 0.5 {
        (phi(z) - p, std_normal_pdf(z))
    } else {
        (-(0.5 * libm::erfc(z * FRAC_1_SQRT_2) - (1.0 - p)), std_normal_pdf(z))
    };
    if dens <= 0.0 {
        return z;
    }
    let u = resid / dens;
    z - u / (1.0 + 0.5 * z * u)
}

fn ppnd16(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q
            * (((((((2.509_080_928_730_122_7e3 * r + 3.343_057_558_358_813e4) * r
                + 6.726_577_092_700_87e4)
                * r
                + 4.592_195_393_154_987e4)
                * r
                + 1.373_169_376_550_946e4)
                * r
                + 1.971_590_950_306_551_3e3)
                * r
                + 1.331_416_678_917_843_8e2)
                * r
                + 3.387_132_872_796_366_5)
            / (((((((5.226_495_278_852_545e3 * r + 2.872_908_573_572_194_3e4) * r
                + 3.930_789_580_009_271e4)
                * r
                + 2.121_379_430_158_659_7e4)
                * r
                + 5.394_196_021_424_751e3)
                * r
                + 6.871_870_074_920_579e2)
                * r
                + 4.231_333_070_160_091e1)
                * r
                + 1.0);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let val = if r <= 5.0 {
        let r = r - 1.6;
        (((((((7.745_450_142_783_414e-4 * r + 2.272_384_498_926_918_4e-2) * r
            + 2.417_807_251_774_506e-1)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_546)
            * r
            + 1.423_437_110_749_683_5)
            / (((((((1.050_750_071_644_416_9e-9 * r + 5.475_938_084_995_345e-4) * r
                + 1.519_866_656_361_645_7e-2)
                * r
                + 1.481_039_764_274_800_7e-1)
                * r
                + 6.897_673_349_851e-1)
                * r
                + 1.676_384_830_183_803_8)
                * r
                + 2.053_191_626_637_759)
                * r
                + 1.0)
    } else {
        let r = r - 5.0;
        (((((((2.010_334_399_292_288_1e-7 * r + 2.711_555_568_743_487_6e-5) * r
            + 1.242_660_947_388_078_4e-3)
            * r
            + 2.653_218_952_657_612_4e-2)
            * r
            + 2.965_605_718_285_048_7e-1)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103)
            / (((((((2.044_263_103_389_939_7e-15 * r + 1.421_511_758_316_446e-7) * r
                + 1.846_318_317_510_054_8e-5)
                * r
                + 7.868_691_311_456_133e-4)
                * r
                + 1.487_536_129_085_061_5e-2)
                * r
                + 1.369_298_809_227_358e-1)
                * r
                + 5.998_322_065_558_88e-1)
                * r
                + 1.0)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

/// Bivariate standard normal distribution function with correlation `rho`.
///
/// Integrates the conditional normal along the first coordinate:
/// `Φ₂(z1, z2; ρ) = ∫_{-∞}^{z1} φ(x) Φ((z2 - ρx)/√(1-ρ²)) dx`.
pub fn bivariate_normal_cdf(z1: f64, z2: f64, rho: f64) -> Result<f64> {
    if !(rho > -1.0 && rho < 1.0) {
        return Err(Error::invalid("rho", format!("must lie in (-1, 1), got {rho}")));
    }
    if z1.is_nan() || z2.is_nan() {
        return Err(Error::invalid("z", "NaN argument"));
    }
    if z1 <= LOWER_CUTOFF || z2 <= LOWER_CUTOFF {
        return Ok(0.0);
    }
    // Integrate over the smaller coordinate; the integrand is symmetric in
    // the roles of z1 and z2.
    let (lo_arg, other) = if z1 <= z2 { (z1, z2) } else { (z2, z1) };
    if other >= -LOWER_CUTOFF {
        return Ok(phi(lo_arg));
    }
    let upper = lo_arg.min(-LOWER_CUTOFF);
    let scale = (1.0 - rho * rho).sqrt();
    let integrand = |x: f64| std_normal_pdf(x) * phi((other - rho * x) / scale);

    let mut breaks = vec![LOWER_CUTOFF];
    // The conditional argument changes sign here; for |ρ| near one the
    // integrand is nearly a step at this point.
    if rho != 0.0 {
        let kink = other / rho;
        if kink > LOWER_CUTOFF && kink < upper {
            breaks.push(kink);
        }
    }
    if 0.0 > LOWER_CUTOFF && 0.0 < upper {
        breaks.push(0.0);
    }
    breaks.push(upper);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let quad = Quadrature {
        abs_tol: 1e-14,
        rel_tol: 1e-14,
        max_depth: 50,
    };
    let v = quad.integrate_with_breaks(integrand, &breaks)?;
    Ok(v.clamp(0.0, 1.0))
}

/// `asin(ρ)/(2π) + 1/4`, the orthant probability at the origin.
pub fn orthant_probability(rho: f64) -> f64 {
    0.25 + rho.asin() / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_reference_values() {
        assert_eq!(std_normal_cdf(0.0).unwrap(), 0.5);
        assert!((std_normal_cdf(8.0).unwrap() - 1.0).abs() < 1e-12);
        // mpmath: ncdf(1) = 0.841344746068542948585232545632
        assert!((std_normal_cdf(1.0).unwrap() - 0.841_344_746_068_542_9).abs() < 1e-15);
        // mpmath: ncdf(-5) = 2.86651571879193911673752333790e-7
        assert!((std_normal_cdf(-5.0).unwrap() - 2.866_515_718_791_939e-7).abs() < 1e-20);
        assert!(std_normal_cdf(f64::INFINITY).is_err());
        assert!(std_normal_cdf(f64::NAN).is_err());
    }

    #[test]
    fn quantile_inverts_cdf() {
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        for k in 1..100 {
            let p = k as f64 / 100.0;
            let z = std_normal_quantile(p).unwrap();
            assert!((std_normal_cdf(z).unwrap() - p).abs() < 1e-10, "p = {p}");
        }
        for p in [1e-300, 1e-20, 1e-8, 1.0 - 1e-12] {
            let z = std_normal_quantile(p).unwrap();
            let back = std_normal_cdf(z).unwrap();
            assert!(((back - p) / p).abs() < 1e-9, "p = {p}");
        }
        assert!(std_normal_quantile(0.0).is_err());
        assert!(std_normal_quantile(1.0).is_err());
    }

    #[test]
    fn quantile_against_bisection() {
        let target = 0.223_606_8;
        let (mut lo, mut hi) = (-5.0_f64, 5.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phi(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let z = std_normal_quantile(target).unwrap();
        assert!((z - 0.5 * (lo + hi)).abs() < 1e-12);
        assert!((z + 0.7600).abs() < 1e-4);
    }

    #[test]
    fn bivariate_reference_values() {
        assert!((bivariate_normal_cdf(0.0, 0.0, 0.0).unwrap() - 0.25).abs() < 1e-12);
        let v = bivariate_normal_cdf(0.0, 0.0, 0.8).unwrap();
        assert!((v - orthant_probability(0.8)).abs() < 1e-11);
        assert!((v - 0.397_583_617_650_433_3).abs() < 1e-10);
        for z in [-2.5, -1.0, 0.3, 2.0] {
            let v = bivariate_normal_cdf(z, 8.0, 0.5).unwrap();
            assert!((v - phi(z)).abs() < 1e-9);
        }
        assert!(bivariate_normal_cdf(0.0, 0.0, 1.0).is_err());
        assert!(bivariate_normal_cdf(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn bivariate_independence_and_symmetry() {
        for i in -3..=3 {
            for j in -3..=3 {
                let (a, b) = (i as f64, j as f64);
                let v = bivariate_normal_cdf(a, b, 0.0).unwrap();
                assert!((v - phi(a) * phi(b)).abs() < 1e-10);
                for rho in [-0.95, -0.8, 0.3, 0.8, 0.99] {
                    let x = bivariate_normal_cdf(a, b, rho).unwrap();
                    let y = bivariate_normal_cdf(b, a, rho).unwrap();
                    assert!((x - y).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn bivariate_orthant_identity_across_correlations() {
        for k in -9..=9 {
            let rho = k as f64 / 10.0;
            let v = bivariate_normal_cdf(0.0, 0.0, rho).unwrap();
            assert!((v - orthant_probability(rho)).abs() < 1e-10, "rho = {rho}");
        }
    }
}
