//! Gauss-Legendre quadrature on [0, 1].

/// Nodes and weights of an n-point Gauss-Legendre rule, mapped to `[0, 1]`.
/// Exact for polynomials up to degree `2n - 1`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // Roots of P_n on [-1, 1] by Newton iteration from Chebyshev guesses.
        for k in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // Map [-1, 1] -> [0, 1]; Chebyshev guesses enumerate the positive
            // roots first.
            nodes[k] = 0.5 * (1.0 - x);
            weights[k] = 0.5 * w;
            nodes[n - 1 - k] = 0.5 * (1.0 + x);
            weights[n - 1 - k] = 0.5 * w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.points().map(|(z, w)| w * f(z)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let q = GaussLegendre::new(8);
        // x^k on [0,1] integrates to 1/(k+1); exact through degree 15.
        for k in 0..=15u32 {
            let got = q.integrate(|x| x.powi(k as i32));
            assert!((got - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "k={k} got={got}");
        }
    }

    #[test]
    fn integrates_tilted_exponential() {
        // The normalizer of the exploration-scale law: 1 - 1/e.
        let q = GaussLegendre::new(64);
        let got = q.integrate(|z| (z - 1.0).exp());
        assert!((got - (1.0 - 1.0 / std::f64::consts::E)).abs() < 1e-14);
        // And its mean numerator: 1/e.
        let got2 = q.integrate(|z| z * (z - 1.0).exp());
        assert!((got2 - 1.0 / std::f64::consts::E).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 5, 33, 64] {
            let q = GaussLegendre::new(n);
            let s: f64 = q.points().map(|(_, w)| w).sum();
            assert!((s - 1.0).abs() < 1e-13);
            assert!(q.points().all(|(z, w)| z > 0.0 && z < 1.0 && w > 0.0));
        }
    }
}
