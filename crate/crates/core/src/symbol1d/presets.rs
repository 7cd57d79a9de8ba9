//! Named symbol presets.

use num_traits::Zero;

use super::SymbolFunction;
use crate::scalar::{Real, C};

fn re<T: Real>(x: T) -> C<T> {
    C::new(x, T::zero())
}

/// `a = c`, order 0.
pub fn constant<T: Real>(c: C<T>) -> SymbolFunction<T> {
    SymbolFunction::scalar(format!("constant({c})"), 0.0, move |_, _| c, move |_, _| c)
}

/// `a = xi`, the symbol of `-i d/dtheta`.
pub fn xi<T: Real>() -> SymbolFunction<T> {
    SymbolFunction::scalar("xi", 1.0, |_, x| re(x), |_, x| re(x))
}

/// `a = (1 + xi^2)^(m/2)` with principal part `|xi|^m`.
pub fn abs_xi_m<T: Real>(m: f64) -> SymbolFunction<T> {
    let mt = T::lit(m);
    let half = T::lit(0.5 * m);
    SymbolFunction::scalar(
        format!("abs_xi_m({m})"),
        m,
        move |_, x| re((T::one() + x * x).powf(half)),
        move |_, x| re(x.abs().powf(mt)),
    )
}

/// `a = (c0 + c1 cos theta) xi + shift`, principal part `(c0 + c1 cos theta) xi`.
pub fn c_theta_times_xi<T: Real>(c0: f64, c1: f64, shift: f64) -> SymbolFunction<T> {
    c_theta_times_xi_pow(c0, c1, 1, shift)
}

/// `a = (c0 + c1 cos theta) xi^m + shift` for integer `m >= 1`.
pub fn c_theta_times_xi_pow<T: Real>(c0: f64, c1: f64, m: u32, shift: f64) -> SymbolFunction<T> {
    let (c0t, c1t, sh) = (T::lit(c0), T::lit(c1), T::lit(shift));
    let name = if shift == 0.0 {
        format!("({c0}+{c1}cos)xi^{m}")
    } else {
        format!("({c0}+{c1}cos)xi^{m}+{shift}")
    };
    SymbolFunction::scalar(
        name,
        m as f64,
        move |t: T, x: T| re((c0t + c1t * t.cos()) * x.powi(m as i32) + sh),
        move |t: T, x: T| re((c0t + c1t * t.cos()) * x.powi(m as i32)),
    )
}

/// `a = e^{i theta}`, the unit shift `k -> k + 1`.
pub fn shift<T: Real>() -> SymbolFunction<T> {
    let f = |t: T, _| C::new(t.cos(), t.sin());
    SymbolFunction::scalar("shift", 0.0, f, f)
}

/// Two-band system `xi sigma_3 + mass (cos theta sigma_1 + sin theta sigma_2)`:
/// Hermitian, with principal part `xi sigma_3` and a mass term winding once
/// around the circle.
pub fn pauli_monopole<T: Real>(mass: f64) -> SymbolFunction<T> {
    let mt = T::lit(mass);
    SymbolFunction::new(
        format!("pauli_monopole({mass})"),
        1.0,
        2,
        move |t: T, x: T, out: &mut [C<T>]| {
            let e = C::new(t.cos(), t.sin()) * mt;
            out[0] = re(x);
            out[1] = e.conj();
            out[2] = e;
            out[3] = re(-x);
        },
        |_, x: T, out: &mut [C<T>]| {
            out[0] = re(x);
            out[1] = C::zero();
            out[2] = C::zero();
            out[3] = re(-x);
        },
    )
}
