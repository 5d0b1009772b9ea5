//! Euler characteristics on curves and surfaces over an arbitrary base field.
//!
//! Only `χ` is modelled; `h⁰` and `h¹` never appear individually.

use crate::error::{Error, Result};
use crate::lattice::{canonical_degree, check_divisor, degree_on_curve, intersect, Configuration, CurveDivisor, Divisor};
use crate::rational::{frac, int, Q};

/// `χ(C, L) = deg_k L + χ(C, O_C)` for a Cartier divisor on a curve.
pub fn euler_char_curve(d: &CurveDivisor, chi0: i64) -> Result<Q> {
    if let Some((p, _)) = d.terms.iter().find(|(_, t)| !t.coefficient.is_integer()) {
        return Err(Error::Argument(format!(
            "coefficient at {p} is not an integer; χ needs a Cartier divisor"
        )));
    }
    Ok(degree_on_curve(d) + int(chi0))
}

/// `χ(O_C) = -(C² + K·C)/2`, from adjunction.
pub fn chi_of_curve(config: &Configuration, curve: usize) -> Result<i64> {
    if curve >= config.len() {
        return Err(Error::Structural(format!("curve index {curve} out of range")));
    }
    let c = config.curve(curve);
    let s = c.self_int + c.canon_int;
    if s % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "adjunction parity fails for {}: {} + {} is odd",
            c.id, c.self_int, c.canon_int
        )));
    }
    Ok(-s / 2)
}

/// `χ(X, D) = χ(O_X) + ½ D·(D − K)` on the ambient regular surface.
pub fn euler_char_surface(config: &Configuration, d: &Divisor) -> Result<Q> {
    let chi = config.chi_structure().ok_or_else(|| {
        Error::Argument("surface Riemann–Roch needs chi_structure to be declared".into())
    })?;
    check_divisor(config, d)?;
    if !d.is_integral() {
        return Err(Error::Argument(
            "surface Riemann–Roch needs an integral divisor".into(),
        ));
    }
    let dd = intersect(config, d, d)?;
    let dk = canonical_degree(config, d);
    Ok(int(chi) + frac(1, 2) * (dd - dk))
}
