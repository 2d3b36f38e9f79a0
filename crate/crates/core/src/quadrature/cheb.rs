//! Adaptive piecewise Chebyshev approximation.
//!
//! Each panel stores coefficients of `f = sum c_j T_j(y)` on `[a, b]` with
//! `y` the affine image in `[-1, 1]`. Tables integrate exactly, so iterated
//! primitives are again tables.

use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub c: Vec<f64>,
}

impl Panel {
    fn half(&self) -> f64 {
        0.5 * (self.b - self.a)
    }

    fn to_unit(&self, x: f64) -> f64 {
        ((2.0 * x - self.a - self.b) / (self.b - self.a)).clamp(-1.0, 1.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        clenshaw(&self.c, self.to_unit(x))
    }

    pub fn integral(&self) -> f64 {
        let s: f64 = self
            .c
            .iter()
            .enumerate()
            .step_by(2)
            .map(|(j, c)| c * 2.0 / (1.0 - (j * j) as f64))
            .sum();
        s * self.half()
    }

    /// Coefficients of the primitive vanishing at `a`.
    fn primitive(&self) -> Panel {
        let n = self.c.len();
        let get = |j: usize| self.c.get(j).copied().unwrap_or(0.0);
        let mut p = vec![0.0; n + 1];
        p[1] = get(0) - 0.5 * get(2);
        for k in 2..=n {
            p[k] = (get(k - 1) - get(k + 1)) / (2.0 * k as f64);
        }
        let h = self.half();
        for v in p.iter_mut() {
            *v *= h;
        }
        let at_left: f64 = p.iter().enumerate().skip(1).map(|(k, v)| if k % 2 == 0 { *v } else { -*v }).sum();
        p[0] = -at_left;
        Panel { a: self.a, b: self.b, c: p }
    }
}

pub fn clenshaw(c: &[f64], y: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let t = 2.0 * y * b1 - b2 + ck;
        b2 = b1;
        b1 = t;
    }
    y * b1 - b2 + c.first().copied().unwrap_or(0.0)
}

/// Chebyshev coefficients from values at first-kind nodes.
struct Basis {
    nodes: Vec<f64>,
    cos: Vec<Vec<f64>>,
}

impl Basis {
    fn new(degree: usize) -> Basis {
        let n = degree + 1;
        let theta: Vec<f64> = (0..n).map(|k| PI * (k as f64 + 0.5) / n as f64).collect();
        let nodes = theta.iter().map(|t| t.cos()).collect();
        let cos = (0..n)
            .map(|j| theta.iter().map(|t| (j as f64 * t).cos()).collect())
            .collect();
        Basis { nodes, cos }
    }

    fn coeffs(&self, vals: &[f64]) -> Vec<f64> {
        let n = vals.len() as f64;
        self.cos
            .iter()
            .enumerate()
            .map(|(j, row)| {
                let s: f64 = row.iter().zip(vals).map(|(c, v)| c * v).sum();
                if j == 0 {
                    s / n
                } else {
                    2.0 * s / n
                }
            })
            .collect()
    }
}

pub struct ChebOpts<'a> {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub degree: usize,
    pub max_evals: usize,
    /// Upper bound on the panel width near a point.
    pub width_hint: Option<&'a dyn Fn(f64) -> f64>,
}

impl Default for ChebOpts<'_> {
    fn default() -> Self {
        ChebOpts { abs_tol: 1e-12, rel_tol: 1e-12, degree: 16, max_evals: 10_000_000, width_hint: None }
    }
}

#[derive(Debug, Clone)]
pub struct ChebTable {
    pub panels: Vec<Panel>,
    /// Integral from the table start to the left end of each panel.
    cum: Vec<f64>,
    pub error: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl ChebTable {
    /// Approximate `f` on `[breaks[0], breaks[last]]`, splitting at every break.
    pub fn build(f: &dyn Fn(f64) -> f64, breaks: &[f64], opts: &ChebOpts) -> ChebTable {
        let basis = Basis::new(opts.degree);
        let lo = breaks[0];
        let hi = *breaks.last().unwrap();
        let total = (hi - lo).abs().max(f64::MIN_POSITIVE);
        let mut seeds: Vec<(f64, f64)> = Vec::new();
        for w in breaks.windows(2) {
            if w[1] > w[0] {
                split_by_hint(w[0], w[1], opts.width_hint, &mut seeds);
            }
        }
        let mut stack: Vec<(f64, f64, usize)> = seeds.into_iter().rev().map(|(a, b)| (a, b, 0)).collect();
        let mut panels = Vec::new();
        let mut evals = 0usize;
        let mut error = 0.0;
        let mut converged = true;
        let mut absint = 0.0;
        let mut vals = vec![0.0; basis.nodes.len()];
        while let Some((a, b, depth)) = stack.pop() {
            let mid = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            let mut finite = true;
            for (v, y) in vals.iter_mut().zip(&basis.nodes) {
                *v = f(mid + h * y);
                finite &= v.is_finite();
            }
            evals += vals.len();
            let too_small = h <= 4.0 * f64::EPSILON * mid.abs().max(total) || depth > 60;
            let over_budget = evals > opts.max_evals;
            if !finite {
                if too_small || over_budget {
                    converged = false;
                    error = f64::INFINITY;
                    panels.push(Panel { a, b, c: vec![0.0] });
                    continue;
                }
                stack.push((mid, b, depth + 1));
                stack.push((a, mid, depth + 1));
                continue;
            }
            let c = basis.coeffs(&vals);
            let n = c.len();
            let tail = c[n - 1].abs() + c[n - 2].abs() + 0.5 * c[n - 3].abs();
            let p = Panel { a, b, c };
            let pint = p.integral();
            let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let est = 2.0 * h * tail;
            let allowed = opts.abs_tol * (2.0 * h / total) + opts.rel_tol * pint.abs().max(2.0 * h * scale);
            let noise = noise_floor(&p.c, scale);
            if est <= allowed || noise || too_small || over_budget {
                if est > allowed && !noise {
                    converged = false;
                }
                error += est;
                absint += 2.0 * h * scale;
                panels.push(p);
            } else {
                stack.push((mid, b, depth + 1));
                stack.push((a, mid, depth + 1));
            }
        }
        error += 8.0 * f64::EPSILON * absint;
        let mut cum = Vec::with_capacity(panels.len());
        let mut acc = 0.0;
        for p in &panels {
            cum.push(acc);
            acc += p.integral();
        }
        ChebTable { panels, cum, error, evaluations: evals, converged }
    }

    pub fn lo(&self) -> f64 {
        self.panels[0].a
    }

    pub fn hi(&self) -> f64 {
        self.panels.last().unwrap().b
    }

    fn locate(&self, x: f64) -> usize {
        let i = self.panels.partition_point(|p| p.b < x);
        i.min(self.panels.len() - 1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.panels[self.locate(x)].eval(x)
    }

    pub fn integral(&self) -> f64 {
        let last = self.panels.len() - 1;
        self.cum[last] + self.panels[last].integral()
    }

    /// `int_{lo}^{x} f`, with `x` clamped into the table range.
    pub fn cumulative(&self, x: f64) -> f64 {
        let i = self.locate(x);
        let p = &self.panels[i];
        if x >= p.b {
            return self.cum[i] + p.integral();
        }
        self.cum[i] + p.primitive().eval(x)
    }

    /// The primitive vanishing at the left end, as another table.
    pub fn primitive(&self) -> ChebTable {
        let panels: Vec<Panel> = self
            .panels
            .iter()
            .zip(&self.cum)
            .map(|(p, off)| {
                let mut q = p.primitive();
                q.c[0] += off;
                q
            })
            .collect();
        let mut cum = Vec::with_capacity(panels.len());
        let mut acc = 0.0;
        for p in &panels {
            cum.push(acc);
            acc += p.integral();
        }
        ChebTable {
            panels,
            cum,
            error: self.error * (self.hi() - self.lo()),
            evaluations: self.evaluations,
            converged: self.converged,
        }
    }
}

/// A flat, tiny upper half of the spectrum means rounding noise in `f`,
/// which further splitting cannot remove.
fn noise_floor(c: &[f64], scale: f64) -> bool {
    let n = c.len();
    let upper = c[n / 2..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tail = c[n - 3..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    upper <= 1e-7 * scale && upper <= 10.0 * tail && tail > 0.0
}

fn split_by_hint(a: f64, b: f64, hint: Option<&dyn Fn(f64) -> f64>, out: &mut Vec<(f64, f64)>) {
    let Some(h) = hint else {
        out.push((a, b));
        return;
    };
    let mut x = a;
    let mut guard = 0usize;
    while x < b && guard < 50_000_000 {
        let w = h(x).max((b - a) * 1e-15).max(f64::MIN_POSITIVE);
        let next = if x + w >= b || b - (x + w) < 0.25 * w { b } else { x + w };
        out.push((x, next));
        x = next;
        guard += 1;
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (mut q0, mut q1) = (1.0, z);
                for k in 2..=n {
                    let q2 = ((2 * k - 1) as f64 * z * q1 - (k - 1) as f64 * q0) / k as f64;
                    q0 = q1;
                    q1 = q2;
                }
                let dq = n as f64 * (z * q1 - q0) / (z * z - 1.0);
                w[i] = 2.0 / ((1.0 - z * z) * dq * dq);
                break;
            }
        }
        x[i] = z;
    }
    (x, w)
}
