//! Low-level blocks on which truncated identities are checked.
//!
//! A finite basis breaks `[a, a†] = 1` at the top level and every operator
//! built from the truncated ladder inherits that defect on the columns whose
//! image reaches the top. Identity checks are therefore restricted to a
//! block of levels `n < block`.
//!
//! State vectors use the fixed buffer `⌈4|w|⌉ + 8`. Operator identities need
//! the whole image `D|n>` or `S|n>` to stay inside the basis, which grows with
//! `n`: a displaced number state lives inside radius `√n + |w|` in phase space,
//! a squeezed one inside `√n e^r` plus a tail that lengthens with `r`.

/// `⌈4|w|⌉ + 8`.
pub fn displacement_buffer(amplitude: f64) -> usize {
    (4.0 * amplitude).ceil() as usize + 8
}

/// `⌈8 sinh² r⌉ + 16`.
pub fn squeeze_buffer(strength: f64) -> usize {
    (8.0 * strength.sinh().powi(2)).ceil() as usize + 16
}

/// Levels of a state vector that are free of truncation artifacts.
pub fn state_block(dim: usize, amplitude: f64) -> usize {
    dim.saturating_sub(displacement_buffer(amplitude))
}

/// Block for identities involving a displacement by `amplitude`:
/// `√n + |w| + 2 <= √dim`, capped by the fixed buffer.
pub fn displacement_block(dim: usize, amplitude: f64) -> usize {
    let radius = (dim as f64).sqrt() - amplitude - 2.0;
    spread_block(radius).min(state_block(dim, amplitude))
}

/// Block for identities involving a squeeze of strength `r = rho^upsilon`:
/// `√n e^r + 1.5 + 4r <= √dim`, capped by the fixed buffer.
pub fn squeezing_block(dim: usize, strength: f64) -> usize {
    let radius = ((dim as f64).sqrt() - 1.5 - 4.0 * strength) * (-strength).exp();
    spread_block(radius).min(dim.saturating_sub(squeeze_buffer(strength)))
}

/// Block for a displacement applied after a squeeze.
pub fn composite_block(dim: usize, amplitude: f64, strength: f64) -> usize {
    let radius = ((dim as f64).sqrt() - amplitude - 2.0 - 4.0 * strength) * (-strength).exp();
    spread_block(radius)
        .min(dim.saturating_sub(displacement_buffer(amplitude) + squeeze_buffer(strength)))
}

fn spread_block(radius: f64) -> usize {
    if radius <= 0.0 {
        0
    } else {
        (radius * radius).floor() as usize
    }
}
