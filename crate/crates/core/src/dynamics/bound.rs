use num_traits::{One, Zero};

use crate::error::{invalid, Error, Result};
use crate::rational::{ceil_i128, pow, to_f64, Rational};

/// `base^exponent` kept symbolic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPower {
    pub base: Rational,
    pub exponent: Rational,
}

impl RationalPower {
    pub fn to_f64(&self) -> f64 {
        let b = to_f64(&self.base);
        ((b - 1.0).ln_1p() * to_f64(&self.exponent)).exp()
    }

    /// `1 - base^exponent`, accurate when the power is close to 1.
    pub fn one_minus(&self) -> f64 {
        -((to_f64(&self.base) - 1.0).ln_1p() * to_f64(&self.exponent)).exp_m1()
    }
}

/// Constants in `μ(D_N) ≤ c_1 c_0^N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundConstants {
    pub alpha: Rational,
    pub beta: Rational,
    pub bound: Rational,
    pub delta: Rational,
    pub eps: Rational,
    /// Grid index `k` with `ε = 2^{-k}/4`.
    pub grid_index: u32,
    pub q: u64,
    pub lambda: Rational,
    /// `(1+δ/2)^{-1/(2q)}`.
    pub c0: RationalPower,
    /// `(1+δ/2)^3`.
    pub c1: Rational,
}

impl BoundConstants {
    pub fn bound_at(&self, n: u64) -> f64 {
        to_f64(&self.c1) * (self.c0.to_f64().ln() * n as f64).exp()
    }
}

const GRID_LIMIT: u32 = 40;

/// The three inequalities tying `ε` to `δ`, `α`, `β`, `S`.
pub fn eps_feasible(alpha: &Rational, beta: &Rational, s: &Rational, delta: &Rational, eps: &Rational) -> bool {
    let one = Rational::one();
    let two = Rational::from_integer(2);
    let four = Rational::from_integer(4);
    *eps > Rational::zero()
        && *eps < Rational::new(1, 4)
        && (*beta - four * eps * s) * (one - eps) / alpha >= one + delta
        && (one - eps) * (one + delta) >= one + delta / two
        && (one - eps) * (one + delta / two) >= one
}

pub fn theorem_bound(alpha: &Rational, beta: &Rational, s: &Rational) -> Result<BoundConstants> {
    if !(Rational::zero() < *alpha && alpha < beta) {
        return Err(invalid(format!("need 0 < alpha < beta, got ({alpha}, {beta})")));
    }
    if s < beta {
        return Err(invalid(format!("need S >= beta, got S = {s}")));
    }
    let one = Rational::one();
    let half = Rational::new(1, 2);
    let delta = ((beta / alpha - one) / Rational::from_integer(2)).min(half);
    let (grid_index, eps) = (1..=GRID_LIMIT)
        .map(|k| (k, Rational::new(1, 4) / pow(&Rational::from_integer(2), k)))
        .find(|(_, e)| eps_feasible(alpha, beta, s, &delta, e))
        .ok_or_else(|| {
            Error::Infeasible(format!("no eps >= 2^-{} satisfies the constraints for gap ({alpha}, {beta}), S = {s}", GRID_LIMIT + 2))
        })?;
    let half_eps = eps / Rational::from_integer(2);
    let q = ceil_i128(&(Rational::from_integer(20) / (half_eps * half_eps))) as u64;
    let lambda = eps / Rational::from_integer(16);
    let base = one + delta / Rational::from_integer(2);
    Ok(BoundConstants {
        alpha: *alpha,
        beta: *beta,
        bound: *s,
        delta,
        eps,
        grid_index,
        q,
        lambda,
        c0: RationalPower { base, exponent: -Rational::new(1, 2 * q as i128) },
        c1: pow(&base, 3),
    })
}

/// General `(α, β)` and `‖f‖_∞`: shift everything by `‖f‖_∞` so that
/// `0 ≤ f + ‖f‖_∞ ≤ 2‖f‖_∞`.
pub fn theorem_bound_shifted(alpha: &Rational, beta: &Rational, sup_norm: &Rational) -> Result<BoundConstants> {
    if *sup_norm <= Rational::zero() {
        return Err(invalid("sup norm must be positive"));
    }
    if alpha >= beta {
        return Err(invalid("need alpha < beta"));
    }
    let a = alpha + sup_norm;
    let b = beta + sup_norm;
    if a <= Rational::zero() {
        return Err(Error::Precondition(format!("alpha = {alpha} lies below -||f||: every average exceeds alpha")));
    }
    if *beta > *sup_norm {
        return Err(Error::Precondition(format!("beta = {beta} exceeds ||f||: no average reaches beta")));
    }
    theorem_bound(&a, &b, &(sup_norm * Rational::from_integer(2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_gap() {
        let c = theorem_bound(&Rational::from_integer(1), &Rational::from_integer(2), &Rational::from_integer(2)).unwrap();
        assert_eq!(c.delta, Rational::new(1, 2));
        assert_eq!(c.eps, Rational::new(1, 32));
        assert_eq!(c.q, 81_920);
        assert_eq!(c.c1, Rational::new(125, 64));
        assert!(c.c0.one_minus() > 0.0 && c.c0.one_minus() < 1e-5);
    }

    #[test]
    fn tiny_gap_is_still_feasible_or_reported() {
        let r = theorem_bound(&Rational::from_integer(1000), &Rational::from_integer(1001), &Rational::from_integer(1001));
        match r {
            Ok(c) => assert!(eps_feasible(&c.alpha, &c.beta, &c.bound, &c.delta, &c.eps)),
            Err(e) => assert!(matches!(e, Error::Infeasible(_))),
        }
    }
}
