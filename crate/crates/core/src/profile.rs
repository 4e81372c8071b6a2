//! Smooth one-dimensional profiles shared by the bump, hat and cutoff
//! constructions.

/// Standard mollifier rescaled so that `mollifier(0) == 1`; vanishes for `|t| >= 1`.
pub fn mollifier(t: f64) -> f64 {
    let s = t * t;
    if s >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s)).exp()
    }
}

fn flat_exp(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// C-infinity step: 0 for `t <= 0`, 1 for `t >= 1`, monotone in between.
pub fn smooth_step(t: f64) -> f64 {
    let a = flat_exp(t);
    let b = flat_exp(1.0 - t);
    if a + b == 0.0 {
        return if t > 0.5 { 1.0 } else { 0.0 };
    }
    a / (a + b)
}

/// Even plateau: 1 on `|t| <= inner`, 0 on `|t| >= outer`, nonincreasing in `|t|`.
pub fn plateau(t: f64, inner: f64, outer: f64) -> f64 {
    debug_assert!(outer > inner && inner >= 0.0);
    1.0 - smooth_step((t.abs() - inner) / (outer - inner))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mollifier_shape() {
        assert_eq!(mollifier(0.0), 1.0);
        assert_eq!(mollifier(1.0), 0.0);
        assert_eq!(mollifier(-1.5), 0.0);
        assert!(mollifier(0.5) > mollifier(0.7));
    }

    #[test]
    fn step_and_plateau() {
        assert_eq!(smooth_step(-0.1), 0.0);
        assert_eq!(smooth_step(1.1), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(plateau(0.3, 0.5, 1.0), 1.0);
        assert_eq!(plateau(-1.0, 0.5, 1.0), 0.0);
        let mut last = 1.0;
        for i in 0..=100 {
            let v = plateau(i as f64 / 100.0, 0.5, 1.0);
            assert!(v <= last + 1e-15);
            last = v;
        }
    }
}
