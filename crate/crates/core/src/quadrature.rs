//! Gauss–Legendre rules on intervals and small helpers built on them.

use gauss_quad::GaussLegendre;
use std::num::NonZeroUsize;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[a, b]`, nodes ascending.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let n = NonZeroUsize::new(n).expect("at least one node");
    let rule = GaussLegendre::new(n);
    let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    pairs.into_iter().map(|(x, w)| (mid + half * x, half * w)).unzip()
}

/// Composite Gauss–Legendre on `[a, b]` with `panels` equal panels of `order` nodes.
pub fn composite_gauss_legendre(order: usize, panels: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x0, w0) = gauss_legendre(order, -1.0, 1.0);
    let h = (b - a) / panels as f64;
    let mut xs = Vec::with_capacity(order * panels);
    let mut ws = Vec::with_capacity(order * panels);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in x0.iter().zip(&w0) {
            xs.push(mid + 0.5 * h * x);
            ws.push(0.5 * h * w);
        }
    }
    (xs, ws)
}

/// Barycentric weights for the `n`-point Gauss–Legendre nodes (any affine image),
/// `(-1)^j·sqrt((1 - x_j²)·w_j)`, ordered like [`gauss_legendre`].
pub fn gauss_legendre_barycentric(n: usize) -> Vec<f64> {
    let (x, w) = gauss_legendre(n, -1.0, 1.0);
    x.iter()
        .zip(&w)
        .enumerate()
        .map(|(j, (x, w))| {
            let s = ((1.0 - x * x) * w).sqrt();
            if j % 2 == 0 {
                s
            } else {
                -s
            }
        })
        .collect()
}

/// Barycentric weights for interpolation on arbitrary distinct nodes.
pub fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    // Scale differences to keep the products in range for a few hundred nodes.
    let span = nodes.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - nodes.iter().cloned().fold(f64::INFINITY, f64::min);
    let c = 4.0 / span.max(f64::MIN_POSITIVE);
    nodes
        .iter()
        .enumerate()
        .map(|(j, xj)| {
            1.0 / nodes
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, xk)| c * (xj - xk))
                .product::<f64>()
        })
        .collect()
}

/// Second-form barycentric interpolation of `values` at `x`.
pub fn barycentric_eval<T>(nodes: &[f64], weights: &[f64], values: &[T], x: f64) -> T
where
    T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + std::ops::Div<f64, Output = T>,
{
    let mut num: Option<T> = None;
    let mut den = 0.0;
    for ((xj, wj), vj) in nodes.iter().zip(weights).zip(values) {
        let d = x - xj;
        if d == 0.0 {
            return *vj;
        }
        let c = wj / d;
        num = Some(match num {
            None => *vj * c,
            Some(acc) => acc + *vj * c,
        });
        den += c;
    }
    num.expect("nonempty node set") / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(5, 0.0, 2.0);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(9)).sum();
        assert!((s - 2f64.powi(10) / 10.0).abs() < 1e-10);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn composite_rule_on_exp() {
        let (x, w) = composite_gauss_legendre(8, 10, -1.0, 3.0);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.exp()).sum();
        assert!((s - (3f64.exp() - (-1f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn barycentric_on_gauss_nodes() {
        let (x, _) = gauss_legendre(40, -1.0, 1.0);
        let bw = barycentric_weights(&x);
        let v: Vec<f64> = x.iter().map(|t| t.cos()).collect();
        for t in [-0.99, -0.3, 0.0, 0.77] {
            assert!((barycentric_eval(&x, &bw, &v, t) - f64::cos(t)).abs() < 1e-13);
        }
        let (x, _) = gauss_legendre(400, -2.0, 2.0);
        let bw = gauss_legendre_barycentric(400);
        let v: Vec<f64> = x.iter().map(|t| (3.0 * t).sin()).collect();
        for t in [-1.999, -0.3, 0.0, 1.5] {
            assert!((barycentric_eval(&x, &bw, &v, t) - f64::sin(3.0 * t)).abs() < 1e-12);
        }
    }
}
