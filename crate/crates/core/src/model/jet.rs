//! Truncated Taylor series of an expression at a point, by series arithmetic on the tree.
//! Cost is linear in the tree size, unlike repeated symbolic differentiation.

use super::expr::{expand_step, piece_index, pow_real, Expr};

type Jet = Vec<f64>;

fn constant(v: f64, n: usize) -> Jet {
    let mut j = vec![0.0; n + 1];
    j[0] = v;
    j
}

fn mul(a: &[f64], b: &[f64]) -> Jet {
    (0..a.len()).map(|k| (0..=k).map(|i| a[i] * b[k - i]).sum()).collect()
}

fn div(a: &[f64], b: &[f64]) -> Jet {
    let mut c = vec![0.0; a.len()];
    for k in 0..a.len() {
        let s: f64 = (1..=k).map(|j| b[j] * c[k - j]).sum();
        c[k] = (a[k] - s) / b[0];
    }
    c
}

fn exp(a: &[f64]) -> Jet {
    let mut e = vec![0.0; a.len()];
    e[0] = a[0].exp();
    for k in 1..a.len() {
        e[k] = (1..=k).map(|j| j as f64 * a[j] * e[k - j]).sum::<f64>() / k as f64;
    }
    e
}

fn log(a: &[f64]) -> Jet {
    let mut l = vec![0.0; a.len()];
    l[0] = a[0].ln();
    for k in 1..a.len() {
        let s: f64 = (1..k).map(|j| j as f64 * l[j] * a[k - j]).sum::<f64>() / k as f64;
        l[k] = (a[k] - s) / a[0];
    }
    l
}

fn pow(a: &[f64], c: f64) -> Jet {
    if a[0] == 0.0 && c == c.trunc() && (0.0..=64.0).contains(&c) {
        // the recurrence divides by a[0]
        let mut p = constant(1.0, a.len() - 1);
        for _ in 0..c as usize {
            p = mul(&p, a);
        }
        return p;
    }
    let mut p = vec![0.0; a.len()];
    p[0] = pow_real(a[0], c);
    for k in 1..a.len() {
        let s: f64 = (1..=k).map(|j| ((c + 1.0) * j as f64 - k as f64) * a[j] * p[k - j]).sum();
        p[k] = s / (k as f64 * a[0]);
    }
    p
}

impl Expr {
    /// `f^(j)(r0) / j!` for `j = 0..=n`. With `left`, piecewise selectors sitting exactly on a
    /// break take the piece to the left. Non-analytic points give non-finite coefficients.
    pub(crate) fn taylor(&self, r0: f64, n: usize, left: bool) -> Vec<f64> {
        match self {
            Expr::Const(v) => constant(*v, n),
            Expr::Var => {
                let mut j = constant(r0, n);
                if n > 0 {
                    j[1] = 1.0;
                }
                j
            }
            Expr::Add(ts) => {
                let mut acc = vec![0.0; n + 1];
                for t in ts {
                    for (x, y) in acc.iter_mut().zip(t.taylor(r0, n, left)) {
                        *x += y;
                    }
                }
                acc
            }
            Expr::Mul(fs) => {
                let mut acc = constant(1.0, n);
                for f in fs {
                    acc = mul(&acc, &f.taylor(r0, n, left));
                }
                acc
            }
            Expr::Div(a, b) => div(&a.taylor(r0, n, left), &b.taylor(r0, n, left)),
            Expr::Pow(b, c) => pow(&b.taylor(r0, n, left), *c),
            Expr::Exp(a) => exp(&a.taylor(r0, n, left)),
            Expr::Log(a) => log(&a.taylor(r0, n, left)),
            Expr::ExpInv(a) => {
                let u = a.taylor(r0, n, left);
                if u[0] > 0.0 {
                    exp(&div(&constant(-1.0, n), &u))
                } else {
                    // identically zero below, flat at the edge
                    vec![0.0; n + 1]
                }
            }
            Expr::Step { arg, lo, hi } => expand_step(arg, *lo, *hi).taylor(r0, n, left),
            Expr::Piecewise { arg, breaks, pieces } => {
                let v = arg.eval(r0);
                let mut idx = piece_index(breaks, v);
                if left && idx > 0 && breaks[idx - 1] == v {
                    idx -= 1;
                }
                pieces[idx].taylor(r0, n, left)
            }
        }
    }
}
