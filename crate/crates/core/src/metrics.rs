//! Spectral-efficiency metrics of `m` uniformly dropped users, evaluated in
//! closed form from per-cell statistics.

use crate::error::{Error, Result};
use crate::occupancy::{occupied_indicator_covariance, InverseOccupancy};
use crate::partition::CellStats;
use crate::scalar::{complement_pow, one_minus_complement_pow, CompensatedSum, Real};

/// Means and standard deviations of total and typical-user SE at `m` users,
/// plus the `m -> infinity` mean total SE and fairness.
///
/// The remaining limits are identically zero: the total-SE deviation and the
/// typical-user mean and deviation all vanish as `m` grows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSet<T> {
    pub mu_m: T,
    pub sigma_m: T,
    pub mu_u_m: T,
    pub sigma_u_m: T,
    pub mu_bar: T,
    pub c_bar: T,
}

/// Mean total SE: `sum_i (1 - (1-p_i)^m) psi_i`.
pub fn mean_total_se<T: Real>(stats: &CellStats<T>, m: u64) -> T {
    stats
        .p()
        .iter()
        .zip(stats.psi1())
        .map(|(&p, &psi)| one_minus_complement_pow(p, m) * psi)
        .collect::<CompensatedSum<T>>()
        .value()
}

/// Asymptotic mean total SE: `sum_i psi_i`.
pub fn asymptotic_mean_total_se<T: Real>(stats: &CellStats<T>) -> T {
    stats.psi1().iter().copied().collect::<CompensatedSum<T>>().value()
}

/// Mean SE of a uniformly chosen user.
pub fn mean_typical_se<T: Real>(stats: &CellStats<T>, m: u64) -> T {
    mean_total_se(stats, m) / T::from_count(m)
}

fn clamp_variance<T: Real>(value: T, scale: T) -> Result<T> {
    if value >= T::zero() {
        return Ok(value);
    }
    let window = T::lit(1e-10).max(T::epsilon() * T::lit(64.0) * scale);
    if value >= -window {
        Ok(T::zero())
    } else {
        Err(Error::NegativeVariance { value: value.to_f64_lossy() })
    }
}

/// Variance of the total SE.
pub fn variance_total_se<T: Real>(stats: &CellStats<T>, m: u64, mode: InverseOccupancy) -> Result<T> {
    let (p, psi, psi2) = (stats.p(), stats.psi1(), stats.psi2());
    let n = p.len();
    let mut acc = CompensatedSum::new();
    let mut scale = T::zero();
    for i in 0..n {
        let within = (psi2[i] - psi[i] * psi[i]) * mode.evaluate(m, p[i])?;
        let q_m = complement_pow(p[i], m);
        let occupancy = psi[i] * psi[i] * one_minus_complement_pow(p[i], m) * q_m;
        acc.add(within);
        acc.add(occupancy);
        scale = scale + within.abs() + occupancy.abs();
        for j in i + 1..n {
            let cross = T::lit(2.0) * psi[i] * psi[j] * occupied_indicator_covariance(m, p[i], p[j])?;
            acc.add(cross);
            scale = scale + cross.abs();
        }
    }
    clamp_variance(acc.value(), scale)
}

/// Standard deviation of the total SE.
pub fn std_total_se<T: Real>(stats: &CellStats<T>, m: u64, mode: InverseOccupancy) -> Result<T> {
    Ok(variance_total_se(stats, m, mode)?.sqrt())
}

/// Variance of a uniformly chosen user's SE.
pub fn variance_typical_se<T: Real>(stats: &CellStats<T>, m: u64, mode: InverseOccupancy) -> Result<T> {
    let (p, psi, psi2) = (stats.p(), stats.psi1(), stats.psi2());
    let n = p.len();
    let mf = T::from_count(m);
    let m2 = mf * mf;
    let mut acc = CompensatedSum::new();
    let mut scale = T::zero();
    for i in 0..n {
        let second = psi2[i] * mode.evaluate(m, p[i])? / mf;
        let occ = one_minus_complement_pow(p[i], m);
        let square = psi[i] * psi[i] * occ * occ / m2;
        acc.add(second);
        acc.add(-square);
        scale = scale + second.abs() + square.abs();
        for j in i + 1..n {
            let both = T::one() + complement_pow(p[i], m) * complement_pow(p[j], m)
                - complement_pow(p[i], m)
                - complement_pow(p[j], m);
            let cross = T::lit(2.0) * psi[i] * psi[j] * both / m2;
            acc.add(-cross);
            scale = scale + cross.abs();
        }
    }
    clamp_variance(acc.value(), scale)
}

/// Standard deviation of a uniformly chosen user's SE.
pub fn std_typical_se<T: Real>(stats: &CellStats<T>, m: u64, mode: InverseOccupancy) -> Result<T> {
    Ok(variance_typical_se(stats, m, mode)?.sqrt())
}

/// Chiu-Jain fairness `(sum x)^2 / (m sum x^2)`, in `[1/m, 1]`.
pub fn jain_fairness<T: Real>(values: &[T]) -> Result<T> {
    if values.is_empty() {
        return Err(Error::Empty("fairness of an empty vector"));
    }
    if values.iter().any(|v| !(v.is_finite() && *v >= T::zero())) {
        return Err(Error::UndefinedFairness("entries must be finite and nonnegative".into()));
    }
    let sum = values.iter().copied().collect::<CompensatedSum<T>>().value();
    let sum_sq = values.iter().map(|&v| v * v).collect::<CompensatedSum<T>>().value();
    if sum_sq == T::zero() {
        return Err(Error::UndefinedFairness("all entries are zero".into()));
    }
    Ok(sum * sum / (T::from_count(values.len() as u64) * sum_sq))
}

/// Limit of the per-user fairness as `m` grows:
/// `(sum_i psi_i)^2 / sum_i (psi2_i / p_i)` over occupied cells.
pub fn asymptotic_fairness<T: Real>(stats: &CellStats<T>) -> Result<T> {
    let mut num = CompensatedSum::new();
    let mut den = CompensatedSum::new();
    for ((&p, &psi), &psi2) in stats.p().iter().zip(stats.psi1()).zip(stats.psi2()) {
        if p == T::zero() {
            continue;
        }
        num.add(psi);
        den.add(psi2 / p);
    }
    let (num, den) = (num.value(), den.value());
    if num == T::zero() || den == T::zero() {
        return Err(Error::UndefinedFairness("every occupied cell has zero rate".into()));
    }
    Ok(num * num / den)
}

/// All six stored metrics at `m` users.
pub fn metric_set<T: Real>(stats: &CellStats<T>, m: u64, mode: InverseOccupancy) -> Result<MetricSet<T>> {
    if m == 0 {
        return Err(Error::InvalidProbability("user count m must be at least 1".into()));
    }
    let mu_m = mean_total_se(stats, m);
    Ok(MetricSet {
        mu_m,
        sigma_m: std_total_se(stats, m, mode)?,
        mu_u_m: mu_m / T::from_count(m),
        sigma_u_m: std_typical_se(stats, m, mode)?,
        mu_bar: asymptotic_mean_total_se(stats),
        c_bar: asymptotic_fairness(stats)?,
    })
}
