//! Binomial and multinomial occupancy functionals.
//!
//! `M ~ bin(m, p)` counts the users landing in one cell and
//! `I = 1{M > 0} / M` is the timeshare each of them receives.

use crate::error::{Error, Result};
use crate::scalar::{complement_pow, one_minus_complement_pow, CompensatedSum, Real};

fn check_probability<T: Real>(p: T) -> Result<()> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::InvalidProbability(format!("{p} is not in [0, 1]")));
    }
    Ok(())
}

fn check_users(m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::InvalidProbability("user count m must be at least 1".into()));
    }
    Ok(())
}

/// How `E[1{M > 0} / M]` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InverseOccupancy {
    /// Direct `O(m)` sum over the binomial support.
    #[default]
    Exact,
    /// Constant-time substitute `E[1 / (M + 1)]`.
    Approximate,
}

impl InverseOccupancy {
    pub fn evaluate<T: Real>(self, m: u64, p: T) -> Result<T> {
        match self {
            Self::Exact => expected_inverse_occupancy(m, p),
            // E[1/(M+1)] tends to 1 as p -> 0, but an empty cell has no users to share.
            Self::Approximate if p == T::zero() => Ok(T::zero()),
            Self::Approximate => expected_inverse_occupancy_approx(m, p),
        }
    }
}

/// `E[1{M > 0} / M]` for `M ~ bin(m, p)`.
///
/// The pmf is built from its mode outwards by term ratios and normalised by
/// its own total, so rounding does not grow with `m` and nothing overflows.
pub fn expected_inverse_occupancy<T: Real>(m: u64, p: T) -> Result<T> {
    check_users(m)?;
    check_probability(p)?;
    if p == T::zero() {
        return Ok(T::zero());
    }
    if p == T::one() {
        return Ok(T::from_count(m).recip());
    }
    let odds = p / (T::one() - p);
    let mode = (((m + 1) as f64) * p.to_f64_lossy()).floor().min(m as f64) as u64;
    let cutoff = T::min_positive_value() / T::epsilon();
    let mut mass = CompensatedSum::new();
    let mut acc = CompensatedSum::new();
    let mut visit = |k: u64, t: T| {
        mass.add(t);
        if k > 0 {
            acc.add(t / T::from_count(k));
        }
    };
    visit(mode, T::one());
    let mut t = T::one();
    for k in mode + 1..=m {
        t = t * odds * T::from_count(m - k + 1) / T::from_count(k);
        if t < cutoff {
            break;
        }
        visit(k, t);
    }
    t = T::one();
    for k in (0..mode).rev() {
        t = t * T::from_count(k + 1) / (odds * T::from_count(m - k));
        if t < cutoff {
            break;
        }
        visit(k, t);
    }
    Ok(acc.value() / mass.value())
}

/// `E[1 / (M + 1)] = (1 - (1-p)^(m+1)) / (p (m+1))`, a constant-time stand-in
/// for [`expected_inverse_occupancy`].
pub fn expected_inverse_occupancy_approx<T: Real>(m: u64, p: T) -> Result<T> {
    check_users(m)?;
    check_probability(p)?;
    if p == T::zero() {
        return Err(Error::InvalidProbability("approximation divides by p = 0".into()));
    }
    let m1 = m + 1;
    Ok(one_minus_complement_pow(p, m1) / (p * T::from_count(m1)))
}

/// `f(m) = E[m I]` by the first-order recurrence
/// `f(m) = 1 - (1-p)^m + m/(m-1) (1-p) f(m-1)`, `f(1) = p`.
pub fn f_recurrence<T: Real>(m: u64, p: T) -> Result<T> {
    Ok(*recurrences(m, p)?.0.last().expect("m >= 1"))
}

/// `w(m) = E[(m I)^2]` by `w(m) = (1-p) (m/(m-1))^2 w(m-1) + f(m)`, `w(1) = p`.
pub fn w_recurrence<T: Real>(m: u64, p: T) -> Result<T> {
    Ok(*recurrences(m, p)?.1.last().expect("m >= 1"))
}

/// Full `f` and `w` sequences for `1..=m`.
pub fn recurrences<T: Real>(m: u64, p: T) -> Result<(Vec<T>, Vec<T>)> {
    check_users(m)?;
    check_probability(p)?;
    let q = T::one() - p;
    let mut f = Vec::with_capacity(m as usize);
    let mut w = Vec::with_capacity(m as usize);
    f.push(p);
    w.push(p);
    for k in 2..=m {
        let ratio = T::from_count(k) / T::from_count(k - 1);
        let fk = one_minus_complement_pow(p, k) + ratio * q * f[f.len() - 1];
        let wk = q * ratio * ratio * w[w.len() - 1] + fk;
        f.push(fk);
        w.push(wk);
    }
    Ok((f, w))
}

/// `(1 - p_i - p_j)^m`, formed like `complement_pow` so that a zero `p_j`
/// reproduces `(1 - p_i)^m` bit for bit.
fn check_pair<T: Real>(m: u64, p_i: T, p_j: T) -> Result<T> {
    check_users(m)?;
    check_probability(p_i)?;
    check_probability(p_j)?;
    let both = p_i + p_j;
    if both > T::one() + T::epsilon() * T::lit(4.0) {
        return Err(Error::InvalidProbability(format!("p_i + p_j = {both} exceeds 1")));
    }
    if both >= T::one() {
        return Ok(T::zero());
    }
    Ok(complement_pow(both, m))
}

/// `P(M_i > 0, M_j > 0)` for two distinct cells of a multinomial occupancy.
pub fn joint_occupied_probability<T: Real>(m: u64, p_i: T, p_j: T) -> Result<T> {
    let rest = check_pair(m, p_i, p_j)?;
    let value = one_minus_complement_pow(p_i, m) - (complement_pow(p_j, m) - rest);
    Ok(value.max(T::zero()).min(T::one()))
}

/// `Cov(1{M_i > 0}, 1{M_j > 0}) = (1 - p_i - p_j)^m - ((1-p_i)(1-p_j))^m`; never positive.
pub fn occupied_indicator_covariance<T: Real>(m: u64, p_i: T, p_j: T) -> Result<T> {
    let rest = check_pair(m, p_i, p_j)?;
    Ok(rest - complement_pow(p_i, m) * complement_pow(p_j, m))
}

/// Smallest `m` in `1..=m_max` from which the exact value exceeds the
/// approximation for every larger `m` in range.
pub fn approximation_crossing<T: Real>(p: T, m_max: u64) -> Result<Option<u64>> {
    let mut crossing = None;
    for m in 1..=m_max {
        let exact = expected_inverse_occupancy(m, p)?;
        let approx = expected_inverse_occupancy_approx(m, p)?;
        if exact > approx {
            crossing.get_or_insert(m);
        } else {
            crossing = None;
        }
    }
    Ok(crossing)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_user() {
        for &p in &[0.0f64, 0.1, 0.5, 1.0] {
            assert!((expected_inverse_occupancy(1, p).unwrap() - p).abs() < 1e-15);
            assert_eq!(f_recurrence(1, p).unwrap(), p);
            assert_eq!(w_recurrence(1, p).unwrap(), p);
        }
    }

    #[test]
    fn degenerate_probabilities() {
        assert_eq!(expected_inverse_occupancy(7, 0.0).unwrap(), 0.0);
        assert_eq!(expected_inverse_occupancy(7, 1.0).unwrap(), 1.0 / 7.0);
        assert!(expected_inverse_occupancy(7, 1.5).is_err());
        assert!(expected_inverse_occupancy(0, 0.5).is_err());
    }

    #[test]
    fn approximation_small_cases() {
        assert_eq!(expected_inverse_occupancy_approx(1, 1.0).unwrap(), 0.5);
        // M in {0, 1} with equal weight: E[1/(M+1)] = (1 + 1/2) / 2.
        let enumerated: f64 = 0.5 * 1.0 + 0.5 * 0.5;
        assert!((expected_inverse_occupancy_approx(1, 0.5).unwrap() - enumerated).abs() < 1e-15);
        assert!(expected_inverse_occupancy_approx(3, 0.0).is_err());
        assert_eq!(InverseOccupancy::Approximate.evaluate(3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn two_users_certain() {
        assert!((f_recurrence(2, 1.0f64).unwrap() - 1.0).abs() < 1e-15);
        assert!((w_recurrence(2, 1.0f64).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn direct_sum_matches_recurrence_at_ten_users() {
        let exact = expected_inverse_occupancy(10, 0.25f64).unwrap();
        let f = f_recurrence(10, 0.25).unwrap();
        assert!((10.0 * exact - f).abs() < 1e-12);
    }

    #[test]
    fn pair_functionals_edge_cases() {
        assert!(joint_occupied_probability(1, 0.3f64, 0.4).unwrap().abs() < 1e-15);
        assert_eq!(joint_occupied_probability(5, 0.3, 0.0).unwrap(), 0.0);
        assert_eq!(occupied_indicator_covariance(5, 0.0, 0.3).unwrap(), 0.0);
        assert!((occupied_indicator_covariance(1, 0.5f64, 0.5).unwrap() + 0.25).abs() < 1e-15);
        assert!(joint_occupied_probability(3, 0.7, 0.4).is_err());
    }

    #[test]
    fn crossing_exists_for_fig_probabilities() {
        for &p in &[0.25f64, 0.75] {
            let m = approximation_crossing(p, 200).unwrap();
            assert!(m.is_some(), "p = {p}: {m:?}");
        }
    }
}
