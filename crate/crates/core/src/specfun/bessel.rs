//! Bessel functions of the first kind for integer and half-integer orders.
//!
//! Only the orders `N/2` (and their neighbours used by the derivative
//! recurrence) are needed, so the order is carried as twice its value.

use crate::{Error, Result};

/// Largest supported value of `2 * order`.
pub const MAX_TWICE_ORDER: u32 = 102;
/// Largest supported argument.
pub const MAX_ARG: f64 = 100.0;

/// Below this argument the ascending series is used. Cancellation in the
/// alternating sum costs about `e^x` in relative accuracy, so the series is
/// kept to small arguments and backward recurrence handles the rest.
const SERIES_LIMIT: f64 = 4.0;

/// A Bessel order `n / 2`, `n` a non-negative integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfOrder(u32);

impl HalfOrder {
    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice > MAX_TWICE_ORDER {
            return Err(Error::Domain(format!(
                "Bessel order {}/2 exceeds the supported maximum {}/2",
                twice, MAX_TWICE_ORDER
            )));
        }
        Ok(Self(twice))
    }

    /// The order `N/2` attached to the unit ball in dimension `N`.
    pub fn for_dim(dim: usize) -> Result<Self> {
        Self::from_twice(dim as u32)
    }

    pub fn from_f64(order: f64) -> Result<Self> {
        let twice = 2.0 * order;
        if order < 0.0 || (twice - twice.round()).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "Bessel order {order} is not a non-negative multiple of 1/2"
            )));
        }
        Self::from_twice(twice.round() as u32)
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_half_integer(self) -> bool {
        self.0 % 2 == 1
    }

    /// `order - 1`, if non-negative.
    pub fn lower(self) -> Option<Self> {
        self.0.checked_sub(2).map(Self)
    }

    pub fn raise(self) -> Self {
        Self(self.0 + 2)
    }
}

/// `ln Γ(order + 1)` for half-integer or integer `order`, by exact products.
pub fn ln_gamma_plus_one(order: HalfOrder) -> f64 {
    // Γ(1) = 1, Γ(3/2) = √π / 2, and Γ(z + 1) = z Γ(z).
    let mut acc = 0.0;
    let mut z = order.value();
    while z > 1.0 + 1e-12 {
        acc += z.ln();
        z -= 1.0;
    }
    if order.is_half_integer() {
        // z == 1/2 here: Γ(3/2)
        acc + (0.5 * std::f64::consts::PI.sqrt()).ln()
    } else {
        acc
    }
}

/// `Γ(dim/2 + 1)`.
pub fn gamma_half_dim_plus_one(dim: usize) -> f64 {
    ln_gamma_plus_one(HalfOrder(dim as u32)).exp()
}

fn check_arg(x: f64) -> Result<()> {
    if !(0.0..=MAX_ARG).contains(&x) || x.is_nan() {
        return Err(Error::Domain(format!("Bessel argument {x} outside [0, {MAX_ARG}]")));
    }
    Ok(())
}

/// `J_order(x)`.
pub fn bessel_j(order: f64, x: f64) -> Result<f64> {
    let order = HalfOrder::from_f64(order)?;
    check_arg(x)?;
    Ok(j(order, x))
}

/// `J_order(x)` for an already validated order.
pub fn j(order: HalfOrder, x: f64) -> f64 {
    if x == 0.0 {
        return if order.twice() == 0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_LIMIT {
        series(order, x)
    } else {
        backward_recurrence(order, x)
    }
}

/// `J'_order(x)` via `J'_ν = J_{ν-1} - (ν/x) J_ν` (and `J'_0 = -J_1`).
pub fn bessel_j_derivative(order: f64, x: f64) -> Result<f64> {
    let order = HalfOrder::from_f64(order)?;
    check_arg(x)?;
    Ok(j_derivative(order, x))
}

pub fn j_derivative(order: HalfOrder, x: f64) -> f64 {
    match order.lower() {
        None if order.twice() == 0 => -j(HalfOrder(2), x),
        None => {
            // order 1/2: J_{-1/2}(x) = sqrt(2/(πx)) cos x
            if x == 0.0 {
                return f64::INFINITY;
            }
            let jm = (2.0 / (std::f64::consts::PI * x)).sqrt() * x.cos();
            jm - 0.5 / x * j(order, x)
        }
        Some(lower) => {
            if x == 0.0 {
                return if order.twice() == 2 { 0.5 } else { 0.0 };
            }
            j(lower, x) - order.value() / x * j(order, x)
        }
    }
}

/// The entire function `J_ν(x) / x^ν`.
///
/// Regular at `x = 0` (value `1 / (2^ν Γ(ν+1))`); used wherever the radial
/// eigenprofile is needed near the origin.
pub fn reduced(order: HalfOrder, x: f64) -> f64 {
    let nu = order.value();
    if x > SERIES_LIMIT {
        return backward_recurrence(order, x) / x.powf(nu);
    }
    let lead = (-(nu * std::f64::consts::LN_2) - ln_gamma_plus_one(order)).exp();
    lead * alternating_sum(nu, x)
}

/// `Σ_m (-1)^m (x²/4)^m / (m! (ν+1)_m)` with Neumaier compensation.
fn alternating_sum(nu: f64, x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut comp = 0.0;
    let mut m = 0.0;
    loop {
        m += 1.0;
        term *= -q / (m * (m + nu));
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if term.abs() <= 1e-18 * (sum + comp).abs() && m > q.sqrt() {
            break;
        }
        if m > 500.0 {
            break;
        }
    }
    sum + comp
}

fn series(order: HalfOrder, x: f64) -> f64 {
    let nu = order.value();
    let lead = (nu * (0.5 * x).ln() - ln_gamma_plus_one(order)).exp();
    lead * alternating_sum(nu, x)
}

/// Miller's backward recurrence, normalised by `J_0 + 2 Σ J_{2k} = 1` for
/// integer orders and by the closed forms of `J_{±1/2}` for half-integer ones.
fn backward_recurrence(order: HalfOrder, x: f64) -> f64 {
    let nu = order.value();
    let frac = if order.is_half_integer() { 0.5 } else { 0.0 };
    let top = (nu.max(x) + 30.0 + (40.0 * nu.max(x)).sqrt()).ceil() as usize * 2;
    let mut upper = 0.0; // J_{m+1}
    let mut cur = 1e-300; // J_m
    let mut wanted = 0.0;
    let mut even_sum = 0.0;
    let mut j_half = 0.0;
    let target = (nu - frac).round() as usize;
    for m in (0..=top).rev() {
        let mu = m as f64 + frac;
        if m == target {
            wanted = cur;
        }
        if frac == 0.0 && m > 0 && m % 2 == 0 {
            even_sum += cur;
        }
        if m == 0 {
            j_half = cur;
            break;
        }
        let lower = 2.0 * mu / x * cur - upper;
        upper = cur;
        cur = lower;
        if cur.abs() > 1e250 {
            // rescale everything accumulated so far
            let s = 1e-250;
            cur *= s;
            upper *= s;
            wanted *= s;
            even_sum *= s;
        }
    }
    if frac == 0.0 {
        let norm = j_half + 2.0 * even_sum;
        wanted / norm
    } else {
        // cur holds J_{1/2} (unnormalised), upper holds J_{3/2}
        let jm_half = 1.0 / x * cur - upper;
        let pref = (2.0 / (std::f64::consts::PI * x)).sqrt();
        let exact_half = pref * x.sin();
        let exact_mhalf = pref * x.cos();
        let norm = cur.hypot(jm_half);
        let scale = (exact_half * (cur / norm) + exact_mhalf * (jm_half / norm)) / norm;
        wanted * scale
    }
}
