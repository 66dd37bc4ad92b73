//! Price and performance of an agrivoltaic array relative to a ground-mounted array.
//!
//! Everything is normalised by the module hardware cost of the ground-mounted
//! reference spread over the discounted lifetime, `A_M c_M / chi`. The price
//! `p'` is the extra cost of producing the reference's energy with the
//! agrivoltaic array; the performance benefit `pb'` is the crop profit it keeps.
//! The array is worth building when `ppr = p' / pb' <= 1`.

use alloc::format;

use crate::error::check_range;
use crate::{Error, Result};

/// Hardware cost ratio of an elevated fixed array to a ground-mounted one.
pub const ELEVATED_KAPPA_M: f64 = 1.38;
/// Extra hardware cost factor of a single-axis tracker.
pub const TRACKER_PREMIUM: f64 = 1.2;
pub const SQUARE_METRES_PER_HECTARE: f64 = 10_000.0;

/// How the tracker premium combines with the elevated-mounting cost ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PremiumMode {
    /// `kappa_M = elevated * premium`.
    #[default]
    Multiplicative,
    /// `kappa_M = elevated + (premium - 1)`.
    Additive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EconParams {
    /// Hardware cost ratio for fixed elevated arrays.
    pub kappa_m_fixed: f64,
    pub tracker_premium: f64,
    pub premium_mode: PremiumMode,
    /// Soft-cost ratio of the agrivoltaic array to the reference.
    pub rho_l: f64,
    /// How soft costs scale with the extra land area, `(0, 1]`.
    pub epsilon: f64,
    /// Module hardware to soft cost ratio of the reference.
    pub m_l: f64,
    /// Land-to-module ratio of the reference.
    pub a_lm_gmpv: f64,
    /// Annual degradation.
    pub d: f64,
    /// Discount rate.
    pub r: f64,
    /// Lifetime in years; `None` for an infinite horizon.
    pub horizon: Option<u32>,
    /// Reference module hardware cost, $/m².
    pub c_m_gmpv: f64,
    /// Baseline feed-in tariff, $/kWh.
    pub fit_baseline: f64,
    /// Feed-in tariff increase for agrivoltaic energy, % of the baseline.
    pub delta_fit: f64,
}

impl Default for EconParams {
    fn default() -> Self {
        Self {
            kappa_m_fixed: ELEVATED_KAPPA_M,
            tracker_premium: TRACKER_PREMIUM,
            premium_mode: PremiumMode::Multiplicative,
            rho_l: 1.5,
            epsilon: 1.0,
            m_l: 10.0,
            a_lm_gmpv: 2.0,
            d: 0.01,
            r: 0.05,
            horizon: None,
            c_m_gmpv: 100.0,
            fit_baseline: 0.06,
            delta_fit: 0.0,
        }
    }
}

impl EconParams {
    pub fn validate(&self) -> Result<()> {
        check_range("econ.kappa_m", self.kappa_m_fixed, self.kappa_m_fixed > 0.0, "> 0")?;
        check_range(
            "econ.tracker_premium",
            self.tracker_premium,
            self.tracker_premium > 0.0,
            "> 0",
        )?;
        check_range("econ.rho_l", self.rho_l, self.rho_l > 0.0, "> 0")?;
        check_range(
            "econ.epsilon",
            self.epsilon,
            self.epsilon > 0.0 && self.epsilon <= 1.0,
            "(0, 1]",
        )?;
        check_range("econ.m_l", self.m_l, self.m_l > 0.0, "> 0")?;
        check_range("econ.a_lm_gmpv", self.a_lm_gmpv, self.a_lm_gmpv >= 1.0, ">= 1")?;
        check_range("econ.d", self.d, (0.0..1.0).contains(&self.d), "[0, 1)")?;
        check_range("econ.r", self.r, (0.0..1.0).contains(&self.r), "[0, 1)")?;
        check_range("econ.c_m_gmpv", self.c_m_gmpv, self.c_m_gmpv > 0.0, "> 0 $/m2")?;
        check_range(
            "econ.fit_baseline",
            self.fit_baseline,
            self.fit_baseline > 0.0,
            "> 0 $/kWh",
        )?;
        check_range("econ.delta_fit", self.delta_fit, self.delta_fit >= 0.0, ">= 0 %")?;
        if self.horizon == Some(0) {
            return Err(Error::Invalid("econ.horizon must be at least one year".into()));
        }
        Ok(())
    }

    /// Whether `m_l` lies in the commonly observed 5 to 35 band.
    pub fn m_l_is_typical(&self) -> bool {
        (5.0..=35.0).contains(&self.m_l)
    }

    pub fn kappa_m(&self, tracked: bool) -> f64 {
        if !tracked {
            return self.kappa_m_fixed;
        }
        match self.premium_mode {
            PremiumMode::Multiplicative => self.kappa_m_fixed * self.tracker_premium,
            PremiumMode::Additive => self.kappa_m_fixed + self.tracker_premium - 1.0,
        }
    }

    pub fn chi(&self) -> Result<f64> {
        chi(self.d, self.r, self.horizon)
    }
}

/// Discounted, degraded lifetime factor `sum_k ((1 - d) / (1 + r))^k` for `k = 1..=N`.
pub fn chi(d: f64, r: f64, horizon: Option<u32>) -> Result<f64> {
    match horizon {
        None => {
            if r + d <= 0.0 {
                return Err(Error::Divergent(r + d));
            }
            Ok((1.0 - d) / (r + d))
        }
        Some(n) => {
            let q = (1.0 - d) / (1.0 + r);
            if (q - 1.0).abs() < 1e-15 {
                return Ok(f64::from(n));
            }
            Ok(q * (1.0 - crate::math::powi(q, n as i32)) / (1.0 - q))
        }
    }
}

pub fn kappa_l(epsilon: f64, a_lm: f64, m_l: f64, rho_l: f64) -> f64 {
    epsilon * a_lm / m_l * rho_l
}

/// Relative energy yield weighted by the reference's soft-cost share.
pub fn y_pv_prime(a_lm_gmpv: f64, m_l: f64, y_pv: f64) -> f64 {
    (a_lm_gmpv / m_l + 1.0) * y_pv
}

pub fn price_normalized(kappa_m: f64, kappa_l: f64, y_pv_prime: f64) -> f64 {
    kappa_m + kappa_l - y_pv_prime
}

/// `crop_profit_per_land` in $/m²/yr of land.
pub fn pb_normalized(crop_profit_per_land: f64, a_lm: f64, c_m_gmpv: f64, chi: f64) -> f64 {
    a_lm * crop_profit_per_land * chi / c_m_gmpv
}

/// Increase of `pb'` per percent of feed-in tariff increase.
pub fn fit_coefficient(fit_baseline: f64, yy_ref: f64, y_pv: f64, chi: f64, c_m_gmpv: f64) -> f64 {
    fit_baseline / 100.0 * yy_ref * y_pv * chi / c_m_gmpv
}

/// `pb'` including a feed-in tariff increase of `delta_fit` percent.
pub fn apply_fit(
    pb_prime: f64,
    delta_fit: f64,
    fit_baseline: f64,
    yy_ref: f64,
    y_pv: f64,
    chi: f64,
    c_m_gmpv: f64,
) -> f64 {
    pb_prime + delta_fit * fit_coefficient(fit_baseline, yy_ref, y_pv, chi, c_m_gmpv)
}

/// `p' / pb'`; infinite when there is no benefit and a positive price.
pub fn ppr(p_prime: f64, pb_prime: f64) -> f64 {
    if pb_prime > 0.0 {
        p_prime / pb_prime
    } else if p_prime <= 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Smallest feed-in tariff increase, in percent, with `ppr <= 1`.
/// Infinite when the energy term cannot close the gap.
pub fn delta_fit_threshold(
    p_prime: f64,
    pb_prime_0: f64,
    fit_baseline: f64,
    yy_ref: f64,
    y_pv: f64,
    chi: f64,
    c_m_gmpv: f64,
) -> f64 {
    let gap = p_prime - pb_prime_0;
    if gap <= 0.0 {
        return 0.0;
    }
    let coef = fit_coefficient(fit_baseline, yy_ref, y_pv, chi, c_m_gmpv);
    if coef > 0.0 {
        gap / coef
    } else {
        f64::INFINITY
    }
}

/// Quantities that come from the simulation for one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EconInputs {
    pub a_lm: f64,
    pub y_pv: f64,
    /// Realized crop revenue, $/ha/yr.
    pub crop_revenue: f64,
    /// Reference electricity yield per module area, kWh/m²/yr.
    pub yy_ref: f64,
    pub tracked: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EconResult {
    pub chi: f64,
    pub kappa_m: f64,
    pub kappa_l: f64,
    pub y_pv_prime: f64,
    pub p_prime: f64,
    /// Performance benefit without a tariff increase.
    pub pb_prime_0: f64,
    /// Performance benefit with the configured tariff increase.
    pub pb_prime: f64,
    pub ppr: f64,
    /// Price per hectare of the agrivoltaic array, $/yr.
    pub p_abs: f64,
    /// Performance benefit per hectare, $/yr.
    pub pb_abs: f64,
    /// Tariff increase needed for `ppr <= 1`, % of the baseline.
    pub delta_fit_th: f64,
}

impl EconResult {
    pub fn is_feasible(&self) -> bool {
        self.ppr <= 1.0
    }

    pub fn is_price_negative(&self) -> bool {
        self.p_prime < 0.0
    }
}

pub fn evaluate(params: &EconParams, inputs: &EconInputs) -> Result<EconResult> {
    params.validate()?;
    check_range("a_lm", inputs.a_lm, inputs.a_lm >= 1.0, ">= 1")?;
    check_range("y_pv", inputs.y_pv, inputs.y_pv >= 0.0, ">= 0")?;
    check_range(
        "crop_revenue",
        inputs.crop_revenue,
        inputs.crop_revenue >= 0.0,
        ">= 0 $/ha",
    )?;
    check_range("yy_ref", inputs.yy_ref, inputs.yy_ref >= 0.0, ">= 0 kWh/m2")?;
    let chi = params.chi()?;
    let kappa_m = params.kappa_m(inputs.tracked);
    let kl = kappa_l(params.epsilon, inputs.a_lm, params.m_l, params.rho_l);
    let ypp = y_pv_prime(params.a_lm_gmpv, params.m_l, inputs.y_pv);
    let p_prime = price_normalized(kappa_m, kl, ypp);
    let profit = inputs.crop_revenue / SQUARE_METRES_PER_HECTARE;
    let pb_prime_0 = pb_normalized(profit, inputs.a_lm, params.c_m_gmpv, chi);
    let pb_prime = apply_fit(
        pb_prime_0,
        params.delta_fit,
        params.fit_baseline,
        inputs.yy_ref,
        inputs.y_pv,
        chi,
        params.c_m_gmpv,
    );
    let scale = SQUARE_METRES_PER_HECTARE / inputs.a_lm * params.c_m_gmpv / chi;
    Ok(EconResult {
        chi,
        kappa_m,
        kappa_l: kl,
        y_pv_prime: ypp,
        p_prime,
        pb_prime_0,
        pb_prime,
        ppr: ppr(p_prime, pb_prime),
        p_abs: p_prime * scale,
        pb_abs: pb_prime * scale,
        delta_fit_th: delta_fit_threshold(
            p_prime,
            pb_prime_0,
            params.fit_baseline,
            inputs.yy_ref,
            inputs.y_pv,
            chi,
            params.c_m_gmpv,
        ),
    })
}

/// Lifetime costs of both arrays built from unit costs, for the same delivered energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostComponents {
    /// Agrivoltaic module area, m².
    pub module_area_av: f64,
    pub a_lm_av: f64,
    pub a_lm_gmpv: f64,
    pub c_m_gmpv: f64,
    pub c_m_av: f64,
    /// Reference soft cost per land area, $/m².
    pub c_l_gmpv: f64,
    pub c_l_av: f64,
    pub epsilon: f64,
    pub y_pv: f64,
    pub chi: f64,
}

impl CostComponents {
    /// Annualised price `p` from lifetime costs: the agrivoltaic array's hardware
    /// and scaled soft costs less those of a reference array delivering the same energy.
    pub fn price(&self) -> f64 {
        let av = self.c_m_av * self.module_area_av + self.epsilon * self.c_l_av * self.a_lm_av * self.module_area_av;
        let gmpv_area = self.y_pv * self.module_area_av;
        let gmpv = self.c_m_gmpv * gmpv_area + self.c_l_gmpv * self.a_lm_gmpv * gmpv_area;
        (av - gmpv) / self.chi
    }

    /// `p` divided by `A_M c_M / chi`.
    pub fn price_normalized(&self) -> f64 {
        self.price() / (self.module_area_av * self.c_m_gmpv / self.chi)
    }
}

pub fn describe(result: &EconResult) -> alloc::string::String {
    format!(
        "p'={:.4} pb'={:.4} ppr={:.4} dFIT_th={:.2}%",
        result.p_prime, result.pb_prime, result.ppr, result.delta_fit_th
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_forms() {
        assert!((chi(0.01, 0.05, None).unwrap() - 16.5).abs() < 1e-12);
        assert!((chi(0.01, 0.05, Some(1)).unwrap() - 0.99 / 1.05).abs() < 1e-15);
        assert!(chi(0.0, 0.0, None).is_err());
        assert!(chi(0.01, 1e6, None).unwrap() < 1e-5);
    }

    #[test]
    fn worked_price() {
        let kl = kappa_l(0.5, 4.0, 10.0, 1.0);
        assert!((kl - 0.2).abs() < 1e-15);
        let p = price_normalized(1.38, kl, y_pv_prime(2.0, 10.0, 1.0));
        assert!((p - 0.38).abs() < 1e-12);
        assert_eq!(
            price_normalized(1.0, kappa_l(1.0, 2.0, 10.0, 1.0), y_pv_prime(2.0, 10.0, 1.0)),
            0.0
        );
    }

    #[test]
    fn threshold_zero_when_already_feasible() {
        assert_eq!(delta_fit_threshold(0.2, 0.3, 0.06, 400.0, 1.0, 16.5, 100.0), 0.0);
        assert_eq!(ppr(0.0, 0.0), 0.0);
        assert_eq!(ppr(0.1, 0.0), f64::INFINITY);
    }

    #[test]
    fn tracker_premium_modes() {
        let mut p = EconParams::default();
        assert!((p.kappa_m(true) - 1.656).abs() < 1e-12);
        p.premium_mode = PremiumMode::Additive;
        assert!((p.kappa_m(true) - 1.58).abs() < 1e-12);
        assert_eq!(p.kappa_m(false), 1.38);
    }

    #[test]
    fn validation() {
        let p = EconParams {
            epsilon: 0.0,
            ..EconParams::default()
        };
        assert!(p.validate().is_err());
        let p = EconParams {
            horizon: Some(0),
            ..EconParams::default()
        };
        assert!(p.validate().is_err());
    }
}
