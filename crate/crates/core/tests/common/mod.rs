#![allow(dead_code)]

/// J₀ by Miller's backward recurrence normalized with `J₀ + 2ΣJ_{2k} = 1`.
pub fn bessel_j0(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let start = 2 * ((x.abs() as usize + 40) / 2 + 20);
    let (mut next, mut cur) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    let mut j0 = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * cur;
        }
        if k - 1 == 0 {
            j0 = cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
        }
    }
    j0 / (norm + j0)
}

/// Composite Simpson rule on `[a, b]` with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn j0_known_values() {
    assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-14);
    assert!((bessel_j0(10.0) - (-0.245_935_764_451_348_3)).abs() < 1e-14);
    // J0(x) = (1/π)∫_0^π cos(x sin t) dt.
    let x = 125.66;
    let q = simpson(|t| (x * t.sin()).cos(), 0.0, std::f64::consts::PI, 20000) / std::f64::consts::PI;
    assert!((bessel_j0(x) - q).abs() < 1e-12);
}
