//! Closed-form lower bounds from the layered construction at finite size.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, rat, Rational};

/// `s = sum_{i=0}^{k} q^i` and `t = q^(k+1)`.
fn geometric(q: &Rational, k: u32) -> (Rational, Rational) {
    let mut s = Rational::zero();
    let mut power = Rational::one();
    for _ in 0..=k {
        s += &power;
        power *= q;
    }
    (s, power)
}

/// Smallest `alpha` compatible with `1 - alpha/3 <= ((alpha-2)/3 + 8/(3n)) s + t`,
/// i.e. `(3 - 3t + 2s - 8s/n) / (s + 1)` with ratio `2/3`.
pub fn bound_alpha(n: u64, k: u32) -> Result<Rational> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let (s, t) = geometric(&rat(2, 3), k);
    let n = Rational::from_integer(n.into());
    Ok((int(3) - int(3) * &t + int(2) * &s - int(8) * &s / n) / (s + int(1)))
}

pub fn bound_alpha_limit() -> Rational {
    rat(9, 4)
}

/// The degree-`l` analogue. With `a = beta/l`, `q = 2/l`, the step
/// `p' <= a + 2/n - q + q p + q/n` expands to `p_(k+1) <= A s + t` with
/// `A = beta/l - q + 2/n + 2/(l n)`; requiring `p_(k+1) >= 2/l` gives
/// `beta >= (2 - l t)/s + 2 - 2l/n - 2/n`.
pub fn bound_beta(l: u64, n: u64, k: u32) -> Result<Rational> {
    if l < 3 {
        return Err(Error::invalid(format!("l = {l} < 3")));
    }
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let l = Rational::from_integer(l.into());
    let n = Rational::from_integer(n.into());
    let (s, t) = geometric(&(int(2) / &l), k);
    Ok((int(2) - &l * t) / s + int(2) - int(2) * &l / &n - int(2) / n)
}

pub fn bound_beta_limit(l: u64) -> Result<Rational> {
    if l < 3 {
        return Err(Error::invalid(format!("l = {l} < 3")));
    }
    Ok(int(4) - int(4) / Rational::from_integer(l.into()))
}
