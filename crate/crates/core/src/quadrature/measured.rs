/// A value with an absolute error bound, propagated to first order with worst-case signs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Measured {
    pub value: f64,
    pub err: f64,
}

impl Measured {
    pub fn new(value: f64, err: f64) -> Self {
        Self { value, err: err.abs() }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, err: 0.0 }
    }

    pub fn add(self, o: Measured) -> Measured {
        Measured::new(self.value + o.value, self.err + o.err)
    }

    pub fn sub(self, o: Measured) -> Measured {
        Measured::new(self.value - o.value, self.err + o.err)
    }

    pub fn mul(self, o: Measured) -> Measured {
        Measured::new(
            self.value * o.value,
            self.value.abs() * o.err + o.value.abs() * self.err + self.err * o.err,
        )
    }

    pub fn scale(self, c: f64) -> Measured {
        Measured::new(self.value * c, self.err * c.abs())
    }

    /// Quotient; a zero denominator with a zero numerator gives 0.
    pub fn div(self, o: Measured) -> Measured {
        if self.value == 0.0 && o.value == 0.0 {
            return Measured::new(0.0, 0.0);
        }
        let q = self.value / o.value;
        let denom = (o.value.abs() - o.err).max(o.value.abs() * 0.5);
        Measured::new(q, (self.err + q.abs() * o.err) / denom)
    }

    /// `x^e` for `x >= 0`; the bound covers the whole interval `[x - err, x + err]`.
    pub fn powf(self, e: f64) -> Measured {
        let x = self.value.max(0.0);
        let v = x.powf(e);
        let lo = (x - self.err).max(0.0).powf(e);
        let hi = (x + self.err).powf(e);
        let err = if x - self.err <= 0.0 && e < 0.0 {
            f64::INFINITY
        } else {
            (v - lo).abs().max((hi - v).abs())
        };
        Measured::new(v, err)
    }
}
