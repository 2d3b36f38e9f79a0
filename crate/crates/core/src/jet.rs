//! Truncated Taylor series arithmetic.
//!
//! A jet of order `k` at `x0` is the coefficient vector `a_j = f^{(j)}(x0)/j!`
//! for `j = 0..=k`. Smooth multipliers expose jets so that reductions can ask
//! for arbitrary derivatives without symbolic work.

use std::sync::Arc;

/// Taylor coefficients; `c[j]` multiplies `h^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet(pub Vec<f64>);

impl Jet {
    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Jet(c)
    }

    /// The identity map `x0 + h`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = x0;
        if order >= 1 {
            c[1] = 1.0;
        }
        Jet(c)
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// `j`-th derivative at the expansion point.
    pub fn derivative(&self, j: usize) -> f64 {
        self.0.get(j).copied().unwrap_or(0.0) * factorial(j)
    }

    pub fn scale(&self, k: f64) -> Self {
        Jet(self.0.iter().map(|v| v * k).collect())
    }

    pub fn add(&self, o: &Jet) -> Self {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn add_const(&self, k: f64) -> Self {
        let mut c = self.0.clone();
        c[0] += k;
        Jet(c)
    }

    pub fn mul(&self, o: &Jet) -> Self {
        let n = self.0.len().min(o.0.len());
        let mut c = vec![0.0; n];
        for (i, a) in self.0.iter().enumerate().take(n) {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in o.0.iter().enumerate().take(n - i) {
                c[i + j] += a * b;
            }
        }
        Jet(c)
    }

    pub fn recip(&self) -> Self {
        let g = &self.0;
        let n = g.len();
        let mut r = vec![0.0; n];
        r[0] = 1.0 / g[0];
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += g[j] * r[k - j];
            }
            r[k] = -s / g[0];
        }
        Jet(r)
    }

    pub fn exp(&self) -> Self {
        let u = &self.0;
        let n = u.len();
        let mut e = vec![0.0; n];
        e[0] = u[0].exp();
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * u[j] * e[k - j];
            }
            e[k] = s / k as f64;
        }
        Jet(e)
    }

    /// Returns `(sin u, cos u)`.
    pub fn sin_cos(&self) -> (Self, Self) {
        let u = &self.0;
        let n = u.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        s[0] = u[0].sin();
        c[0] = u[0].cos();
        for k in 1..n {
            let (mut ss, mut cc) = (0.0, 0.0);
            for j in 1..=k {
                let w = j as f64 * u[j];
                ss += w * c[k - j];
                cc -= w * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = cc / k as f64;
        }
        (Jet(s), Jet(c))
    }

    /// `u^a` for a series with positive constant term.
    pub fn powf(&self, a: f64) -> Self {
        let g = &self.0;
        let n = g.len();
        let mut p = vec![0.0; n];
        p[0] = g[0].powf(a);
        for k in 1..n {
            let mut s = 0.0;
            for j in 1..=k {
                s += (a * j as f64 - (k - j) as f64) * g[j] * p[k - j];
            }
            p[k] = s / (k as f64 * g[0]);
        }
        Jet(p)
    }

    /// Evaluate an outer jet (expanded at `self.value()`) on this inner series.
    pub fn compose(outer: &Jet, inner: &Jet) -> Self {
        let n = inner.0.len();
        let mut d = inner.0.clone();
        d[0] = 0.0;
        let mut acc = Jet::constant(0.0, n - 1);
        for k in (0..outer.0.len()).rev() {
            acc = acc.mul(&Jet(d.clone())).add_const(outer.0[k]);
        }
        acc
    }

    /// Jet of the `j`-th derivative, truncated to `order`.
    pub fn differentiate(&self, j: usize, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        for (i, slot) in c.iter_mut().enumerate() {
            if let Some(v) = self.0.get(i + j) {
                *slot = v * falling(i + j, j);
            }
        }
        Jet(c)
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

/// `n (n-1) ... (n-j+1)`
fn falling(n: usize, j: usize) -> f64 {
    (0..j).fold(1.0, |a, k| a * (n - k) as f64)
}

/// Polynomial with coefficients `c` (ascending) expanded at `x0`.
pub fn poly_jet(c: &[f64], x0: f64, order: usize) -> Jet {
    let x = Jet::variable(x0, order);
    let mut acc = Jet::constant(0.0, order);
    for &ck in c.iter().rev() {
        acc = acc.mul(&x).add_const(ck);
    }
    acc
}

/// A function that can report its local Taylor expansion.
pub trait SmoothFn: Send + Sync {
    fn jet(&self, x: f64, order: usize) -> Jet;

    fn value(&self, x: f64) -> f64 {
        self.jet(x, 0).value()
    }
}

pub type SmoothRef = Arc<dyn SmoothFn>;

/// `j`-th derivative of another smooth function.
pub struct Derivative {
    pub inner: SmoothRef,
    pub order: usize,
}

impl SmoothFn for Derivative {
    fn jet(&self, x: f64, order: usize) -> Jet {
        self.inner
            .jet(x, order + self.order)
            .differentiate(self.order, order)
    }
}

/// Pointwise product of smooth functions; the empty product is 1.
#[derive(Clone, Default)]
pub struct Product(pub Vec<SmoothRef>);

impl SmoothFn for Product {
    fn jet(&self, x: f64, order: usize) -> Jet {
        let mut acc = Jet::constant(1.0, order);
        for f in &self.0 {
            acc = acc.mul(&f.jet(x, order));
        }
        acc
    }
}

/// `(b - x)^beta` or `(x - a)^beta` on the open side of the endpoint.
pub struct PowerWeight {
    pub endpoint: f64,
    pub beta: f64,
    pub towards_left: bool,
}

impl SmoothFn for PowerWeight {
    fn jet(&self, x: f64, order: usize) -> Jet {
        let v = Jet::variable(x, order);
        let d = if self.towards_left {
            v.add_const(-self.endpoint)
        } else {
            v.scale(-1.0).add_const(self.endpoint)
        };
        if d.value() <= 0.0 {
            return Jet::constant(0.0, order);
        }
        d.powf(self.beta)
    }
}

/// Closure-backed smooth function, handy in tests and for kernels.
pub struct FnJet<F: Fn(f64, usize) -> Jet + Send + Sync>(pub F);

impl<F: Fn(f64, usize) -> Jet + Send + Sync> SmoothFn for FnJet<F> {
    fn jet(&self, x: f64, order: usize) -> Jet {
        (self.0)(x, order)
    }
}
