//! Symbolic expressions in the single real variable `r`.
//!
//! The constructors in this module simplify as they build (constant folding,
//! flattening of sums and products, dropping neutral elements). The raw enum
//! variants are public so that a parser can rebuild a tree verbatim.

use std::f64::consts::E;

/// Expression tree over the radius `r`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// The radial variable `r`.
    Var,
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// `base^exponent` with a constant exponent.
    Pow(Box<Expr>, f64),
    Exp(Box<Expr>),
    /// Natural logarithm.
    Log(Box<Expr>),
    /// `exp(-1/u)` for `u > 0`, and `0` for `u <= 0`. The C^infinity building block of bumps.
    ExpInv(Box<Expr>),
    /// Smooth monotone transition of `arg` from 0 (at `lo` and below) to 1 (at `hi` and above).
    Step { arg: Box<Expr>, lo: f64, hi: f64 },
    /// `pieces[i]` is selected when `breaks[i-1] <= arg < breaks[i]`.
    Piecewise { arg: Box<Expr>, breaks: Vec<f64>, pieces: Vec<Expr> },
}

impl Expr {
    pub fn r() -> Expr {
        Expr::Var
    }

    pub fn c(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(v) if *v == 0.0)
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Const(v) if *v == 1.0)
    }

    pub fn add(terms: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(terms.len());
        let mut constant = 0.0;
        for t in terms {
            match t {
                Expr::Add(inner) => {
                    for u in inner {
                        match u {
                            Expr::Const(v) => constant += v,
                            other => flat.push(other),
                        }
                    }
                }
                Expr::Const(v) => constant += v,
                other => flat.push(other),
            }
        }
        if constant != 0.0 {
            flat.push(Expr::Const(constant));
        }
        match flat.len() {
            0 => Expr::Const(0.0),
            1 => flat.pop().unwrap(),
            _ => Expr::Add(flat),
        }
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(factors.len());
        let mut constant = 1.0;
        for f in factors {
            match f {
                Expr::Mul(inner) => {
                    for u in inner {
                        match u {
                            Expr::Const(v) => constant *= v,
                            other => flat.push(other),
                        }
                    }
                }
                Expr::Const(v) => constant *= v,
                other => flat.push(other),
            }
        }
        if constant == 0.0 {
            return Expr::Const(0.0);
        }
        if constant != 1.0 {
            flat.insert(0, Expr::Const(constant));
        }
        match flat.len() {
            0 => Expr::Const(1.0),
            1 => flat.pop().unwrap(),
            _ => Expr::Mul(flat),
        }
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::mul(vec![Expr::Const(-1.0), e])
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::add(vec![a, Expr::neg(b)])
    }

    pub fn scale(c: f64, e: Expr) -> Expr {
        Expr::mul(vec![Expr::Const(c), e])
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            return Expr::Const(0.0);
        }
        if b.is_one() {
            return a;
        }
        match (&a, &b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x / y),
            (_, Expr::Const(y)) => Expr::scale(1.0 / y, a),
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(base: Expr, exponent: f64) -> Expr {
        if exponent == 0.0 {
            return Expr::Const(1.0);
        }
        if exponent == 1.0 {
            return base;
        }
        match base {
            Expr::Const(v) => Expr::Const(pow_real(v, exponent)),
            other => Expr::Pow(Box::new(other), exponent),
        }
    }

    pub fn exp(e: Expr) -> Expr {
        match e {
            Expr::Const(v) => Expr::Const(v.exp()),
            other => Expr::Exp(Box::new(other)),
        }
    }

    pub fn log(e: Expr) -> Expr {
        match e {
            Expr::Const(v) => Expr::Const(v.ln()),
            other => Expr::Log(Box::new(other)),
        }
    }

    pub fn expinv(e: Expr) -> Expr {
        match e {
            Expr::Const(v) => Expr::Const(expinv(v)),
            other => Expr::ExpInv(Box::new(other)),
        }
    }

    pub fn step(arg: Expr, lo: f64, hi: f64) -> Expr {
        match arg {
            Expr::Const(v) => Expr::Const(step_value(v, lo, hi)),
            other => Expr::Step { arg: Box::new(other), lo, hi },
        }
    }

    pub fn piecewise(arg: Expr, breaks: Vec<f64>, pieces: Vec<Expr>) -> Expr {
        debug_assert_eq!(breaks.len() + 1, pieces.len());
        if let Expr::Const(v) = arg {
            return pieces[piece_index(&breaks, v)].clone();
        }
        if pieces.iter().all(|p| p == &pieces[0]) {
            return pieces[0].clone();
        }
        Expr::Piecewise { arg: Box::new(arg), breaks, pieces }
    }

    /// `r^c`.
    pub fn power_of_r(c: f64) -> Expr {
        Expr::pow(Expr::Var, c)
    }

    /// Affine map `slope * r + shift`.
    pub fn affine(slope: f64, shift: f64) -> Expr {
        Expr::add(vec![Expr::scale(slope, Expr::Var), Expr::Const(shift)])
    }

    /// Unit-peak C^infinity bump supported on `[lo, hi]`: `e * exp(-1/(1 - x^2))` with `x`
    /// the affine image of `r` onto `[-1, 1]`.
    pub fn bump(lo: f64, hi: f64) -> Expr {
        let x = Expr::affine(2.0 / (hi - lo), -(hi + lo) / (hi - lo));
        let u = Expr::sub(Expr::Const(1.0), Expr::pow(x, 2.0));
        Expr::scale(E, Expr::expinv(u))
    }

    /// Evaluate at `r`. A product or quotient with an exactly vanishing factor (numerator)
    /// evaluates to 0 even when another factor is infinite, so that cutoffs annihilate
    /// singular companions outside their support.
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Expr::Const(v) => *v,
            Expr::Var => r,
            Expr::Add(ts) => ts.iter().map(|t| t.eval(r)).sum(),
            Expr::Mul(fs) => {
                let mut acc = 1.0;
                let mut zero = false;
                for f in fs {
                    let v = f.eval(r);
                    if v == 0.0 {
                        zero = true;
                    }
                    acc *= v;
                }
                if zero {
                    0.0
                } else {
                    acc
                }
            }
            Expr::Div(a, b) => {
                let num = a.eval(r);
                if num == 0.0 {
                    0.0
                } else {
                    num / b.eval(r)
                }
            }
            Expr::Pow(b, c) => pow_real(b.eval(r), *c),
            Expr::Exp(a) => a.eval(r).exp(),
            Expr::Log(a) => a.eval(r).ln(),
            Expr::ExpInv(a) => expinv(a.eval(r)),
            Expr::Step { arg, lo, hi } => step_value(arg.eval(r), *lo, *hi),
            Expr::Piecewise { arg, breaks, pieces } => {
                let v = arg.eval(r);
                pieces[piece_index(breaks, v)].eval(r)
            }
        }
    }

    /// Exact derivative with respect to `r`.
    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var => Expr::Const(1.0),
            Expr::Add(ts) => Expr::add(ts.iter().map(|t| t.derivative()).collect()),
            Expr::Mul(fs) => {
                let mut terms = Vec::with_capacity(fs.len());
                for i in 0..fs.len() {
                    let di = fs[i].derivative();
                    if di.is_zero() {
                        continue;
                    }
                    let mut prod = Vec::with_capacity(fs.len());
                    for (j, f) in fs.iter().enumerate() {
                        prod.push(if i == j { di.clone() } else { f.clone() });
                    }
                    terms.push(Expr::mul(prod));
                }
                Expr::add(terms)
            }
            Expr::Div(a, b) => {
                let da = a.derivative();
                let db = b.derivative();
                if db.is_zero() {
                    return Expr::div(da, (**b).clone());
                }
                let num = Expr::sub(
                    Expr::mul(vec![da, (**b).clone()]),
                    Expr::mul(vec![(**a).clone(), db]),
                );
                Expr::div(num, Expr::pow((**b).clone(), 2.0))
            }
            Expr::Pow(b, c) => {
                let db = b.derivative();
                Expr::mul(vec![Expr::Const(*c), Expr::pow((**b).clone(), c - 1.0), db])
            }
            Expr::Exp(a) => Expr::mul(vec![self.clone(), a.derivative()]),
            Expr::Log(a) => Expr::div(a.derivative(), (**a).clone()),
            Expr::ExpInv(a) => Expr::mul(vec![
                self.clone(),
                a.derivative(),
                Expr::pow((**a).clone(), -2.0),
            ]),
            Expr::Step { arg, lo, hi } => expand_step(arg, *lo, *hi).derivative(),
            Expr::Piecewise { arg, breaks, pieces } => Expr::piecewise(
                (**arg).clone(),
                breaks.clone(),
                pieces.iter().map(|p| p.derivative()).collect(),
            ),
        }
    }

    /// Replace every occurrence of `r` by `inner`.
    pub fn substitute(&self, inner: &Expr) -> Expr {
        match self {
            Expr::Const(v) => Expr::Const(*v),
            Expr::Var => inner.clone(),
            Expr::Add(ts) => Expr::add(ts.iter().map(|t| t.substitute(inner)).collect()),
            Expr::Mul(fs) => Expr::mul(fs.iter().map(|f| f.substitute(inner)).collect()),
            Expr::Div(a, b) => Expr::div(a.substitute(inner), b.substitute(inner)),
            Expr::Pow(b, c) => Expr::pow(b.substitute(inner), *c),
            Expr::Exp(a) => Expr::exp(a.substitute(inner)),
            Expr::Log(a) => Expr::log(a.substitute(inner)),
            Expr::ExpInv(a) => Expr::expinv(a.substitute(inner)),
            Expr::Step { arg, lo, hi } => Expr::step(arg.substitute(inner), *lo, *hi),
            Expr::Piecewise { arg, breaks, pieces } => Expr::piecewise(
                arg.substitute(inner),
                breaks.clone(),
                pieces.iter().map(|p| p.substitute(inner)).collect(),
            ),
        }
    }

    /// Number of nodes, used to keep an eye on derivative growth.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var => 1,
            Expr::Add(ts) | Expr::Mul(ts) => 1 + ts.iter().map(Expr::size).sum::<usize>(),
            Expr::Div(a, b) => 1 + a.size() + b.size(),
            Expr::Pow(b, _) => 1 + b.size(),
            Expr::Exp(a) | Expr::Log(a) | Expr::ExpInv(a) => 1 + a.size(),
            Expr::Step { arg, .. } => 1 + arg.size(),
            Expr::Piecewise { arg, pieces, .. } => {
                1 + arg.size() + pieces.iter().map(Expr::size).sum::<usize>()
            }
        }
    }

    /// Scale of the value at `r` without cancellation: sums are taken over absolute values, so
    /// rounding noise in [`Expr::eval`] is a small multiple of `EPSILON` times this.
    pub(crate) fn magnitude(&self, r: f64, left: bool) -> f64 {
        match self {
            Expr::Add(ts) => ts.iter().map(|t| t.magnitude(r, left)).sum(),
            Expr::Mul(fs) => fs.iter().map(|f| f.magnitude(r, left)).product(),
            Expr::Div(a, b) => a.magnitude(r, left) / b.eval(r).abs(),
            Expr::Piecewise { arg, breaks, pieces } => {
                let v = arg.eval(r);
                let mut idx = piece_index(breaks, v);
                if left && idx > 0 && breaks[idx - 1] == v {
                    idx -= 1;
                }
                pieces[idx].magnitude(r, left)
            }
            other => other.eval(r).abs(),
        }
    }
}

/// `x^c`, using repeated multiplication for small integral exponents.
pub fn pow_real(x: f64, c: f64) -> f64 {
    if c == c.trunc() && c.abs() <= 64.0 {
        x.powi(c as i32)
    } else {
        x.powf(c)
    }
}

pub fn expinv(u: f64) -> f64 {
    if u > 0.0 {
        (-1.0 / u).exp()
    } else {
        0.0
    }
}

pub fn step_value(v: f64, lo: f64, hi: f64) -> f64 {
    if v <= lo {
        return 0.0;
    }
    if v >= hi {
        return 1.0;
    }
    let u = (v - lo) / (hi - lo);
    let a = expinv(u);
    let b = expinv(1.0 - u);
    a / (a + b)
}

pub(crate) fn piece_index(breaks: &[f64], v: f64) -> usize {
    breaks.iter().take_while(|b| v >= **b).count()
}

/// The smooth step written out in primitive nodes, used for differentiation.
pub(crate) fn expand_step(arg: &Expr, lo: f64, hi: f64) -> Expr {
    let u = Expr::add(vec![
        Expr::scale(1.0 / (hi - lo), arg.clone()),
        Expr::Const(-lo / (hi - lo)),
    ]);
    let a = Expr::expinv(u.clone());
    let b = Expr::expinv(Expr::sub(Expr::Const(1.0), u));
    Expr::div(a.clone(), Expr::add(vec![a, b]))
}
