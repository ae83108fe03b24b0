#![allow(dead_code)]

use xccy_eps::market::{simulate_terminal, MarketParams, TerminalSample};
use xccy_eps::numerics::GaussianStream;

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss-Legendre integral of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    static GL: std::sync::OnceLock<Vec<(f64, f64)>> = std::sync::OnceLock::new();
    let gl = GL.get_or_init(|| gauss_legendre(20));
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
        let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        total += r * gl.iter().map(|&(x, w)| w * f(c + r * x)).sum::<f64>();
    }
    total
}

pub fn density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Φ by quadrature of the density; mass more than 12 below the lower
/// point is under 1e-32.
pub fn phi_oracle(x: f64) -> f64 {
    if x <= 0.0 {
        integrate(density, x - 12.0, x, 48)
    } else {
        1.0 - phi_oracle(-x)
    }
}

/// Φ₂ by quadrature of φ(x)·P(Y ≤ b | X = x) with the conditional law
/// integrated numerically as well.
pub fn phi2_oracle(a: f64, b: f64, rho: f64) -> f64 {
    let s = (1.0 - rho * rho).sqrt();
    integrate(
        |x| density(x) * phi_oracle((b - rho * x) / s),
        -12.0,
        a.min(12.0),
        120,
    )
}

/// Sample mean and standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Terminal draws from a dedicated seed, independent of the pricer's streams.
pub fn terminals(p: &MarketParams, n: usize, seed: u64) -> Vec<TerminalSample> {
    simulate_terminal(p, 1.0, n, GaussianStream::new(seed, 9_999)).unwrap()
}

/// The 26 reference rows `(w, eps)`: twelve buffers then fourteen floors.
pub fn reference_rows() -> Vec<(f64, xccy_eps::TwoLegEps)> {
    use xccy_eps::TwoLegEps;
    let buffers = [
        (0.5, -0.05, 0.05, 0.5, 0.5),
        (0.5, -0.05, 0.05, 0.8, 0.5),
        (0.2, -0.05, 0.10, 0.5, 0.5),
        (0.5, -0.05, 0.10, 0.5, 0.5),
        (0.8, -0.05, 0.10, 0.5, 0.5),
        (0.2, -0.05, 0.10, 0.8, 0.5),
        (0.5, -0.05, 0.10, 0.8, 0.5),
        (0.8, -0.05, 0.10, 0.8, 0.5),
        (0.5, -0.05, 0.10, 0.8, 0.8),
        (0.2, -0.10, 0.10, 0.8, 0.5),
        (0.5, -0.10, 0.10, 0.8, 0.5),
        (0.8, -0.10, 0.10, 0.8, 0.5),
    ];
    let floors = [
        (0.5, -0.05, 0.05, 0.8, 0.5),
        (0.5, -0.05, 0.10, 0.5, 0.5),
        (0.2, -0.05, 0.10, 0.8, 0.5),
        (0.5, -0.05, 0.10, 0.8, 0.5),
        (0.8, -0.05, 0.10, 0.8, 0.5),
        (0.5, -0.05, 0.10, 0.8, 0.8),
        (0.5, -0.10, 0.10, 0.8, 0.5),
        (0.2, -0.15, 0.10, 0.5, 0.5),
        (0.5, -0.15, 0.10, 0.5, 0.5),
        (0.8, -0.15, 0.10, 0.5, 0.5),
        (0.2, -0.15, 0.10, 0.8, 0.5),
        (0.5, -0.15, 0.10, 0.8, 0.5),
        (0.8, -0.15, 0.10, 0.8, 0.5),
        (0.5, -0.15, 0.10, 0.8, 0.8),
    ];
    let b = buffers
        .iter()
        .map(|&(w, l, g, p, f)| (w, TwoLegEps::buffer(l, g, p, f)));
    let f = floors
        .iter()
        .map(|&(w, l, g, p, f)| (w, TwoLegEps::floor(l, g, p, f)));
    b.chain(f).collect()
}
