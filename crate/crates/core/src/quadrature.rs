//! Gauss–Legendre rules and the associated spectral integration matrix.

use crate::scalar::Real;

/// Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

/// Legendre values P_0..=P_n at x.
fn legendre_all<T: Real>(n: usize, x: T) -> Vec<T> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(T::one());
    if n >= 1 {
        p.push(x);
    }
    for k in 1..n {
        let kf = T::from_usize(k).unwrap();
        let next = ((kf + kf + T::one()) * x * p[k] - kf * p[k - 1]) / (kf + T::one());
        p.push(next);
    }
    p
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let nf = T::from_usize(n).unwrap();
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        for i in 0..n.div_ceil(2) {
            let guess = T::PI() * (T::from_usize(i).unwrap() + T::lit(0.75)) / (nf + T::lit(0.5));
            let mut x = guess.cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let p = legendre_all(n, x);
                dp = nf * (x * p[n] - p[n - 1]) / (x * x - T::one());
                let dx = p[n] / dp;
                x -= dx;
                if dx.abs() <= T::epsilon() * T::lit(4.0) {
                    let p = legendre_all(n, x);
                    dp = nf * (x * p[n] - p[n - 1]) / (x * x - T::one());
                    break;
                }
            }
            let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: T, b: T) -> (Vec<T>, Vec<T>) {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        let xs = self.nodes.iter().map(|&x| mid + half * x).collect();
        let ws = self.weights.iter().map(|&w| w * half).collect();
        (xs, ws)
    }

    /// Composite rule on [a, b] with `panels` equal panels.
    pub fn composite(&self, a: T, b: T, panels: usize) -> (Vec<T>, Vec<T>) {
        let panels = panels.max(1);
        let h = (b - a) / T::from_usize(panels).unwrap();
        let mut xs = Vec::with_capacity(panels * self.len());
        let mut ws = Vec::with_capacity(panels * self.len());
        for k in 0..panels {
            let lo = a + h * T::from_usize(k).unwrap();
            let (x, w) = self.mapped(lo, lo + h);
            xs.extend(x);
            ws.extend(w);
        }
        (xs, ws)
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        let (xs, ws) = self.mapped(a, b);
        xs.into_iter().zip(ws).fold(T::zero(), |acc, (x, w)| acc + w * f(x))
    }

    /// Spectral integration matrix on [0, 1]: `S[i][j]` such that
    /// `∫_0^{x_i} f ≈ Σ_j S[i][j] f(x_j)` with `x` the nodes mapped to [0, 1].
    /// Exact for polynomials of degree below the node count.
    pub fn integration_matrix(&self) -> Vec<Vec<T>> {
        let n = self.len();
        let half = T::lit(0.5);
        // Antiderivatives of P_k from -1, evaluated at each node.
        let anti: Vec<Vec<T>> = self
            .nodes
            .iter()
            .map(|&x| {
                let p = legendre_all(n + 1, x);
                (0..n)
                    .map(|k| {
                        if k == 0 {
                            x + T::one()
                        } else {
                            let kf = T::from_usize(k).unwrap();
                            (p[k + 1] - p[k - 1]) / (kf + kf + T::one())
                        }
                    })
                    .collect()
            })
            .collect();
        let vals: Vec<Vec<T>> = self.nodes.iter().map(|&x| legendre_all(n, x)).collect();
        let mut s = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = T::zero();
                for k in 0..n {
                    let kf = T::from_usize(k).unwrap();
                    acc += (kf + half) * vals[j][k] * anti[i][k];
                }
                // Factor 1/2 maps [-1, 1] to [0, 1].
                s[i][j] = acc * self.weights[j] * half;
            }
        }
        s
    }

    /// Nodes mapped to [0, 1].
    pub fn unit_nodes(&self) -> Vec<T> {
        self.nodes.iter().map(|&x| (x + T::one()) * T::lit(0.5)).collect()
    }
}
