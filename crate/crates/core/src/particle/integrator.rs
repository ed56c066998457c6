//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Right-hand side of y' = f(t, y); may fail (e.g. leaving the domain).
pub trait OdeSystem<T, const N: usize> {
    fn rhs(&self, t: T, y: &[T; N]) -> Result<[T; N]>;
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5<T> {
    pub rtol: T,
    pub atol: T,
    pub max_steps: usize,
    /// Last accepted step size, reused as the next initial guess.
    pub h: T,
}

impl<T: Scalar> Dopri5<T> {
    pub fn new(rtol: T, atol: T) -> Self {
        Self {
            rtol,
            atol,
            max_steps: 10_000_000,
            h: T::zero(),
        }
    }

    /// Integrates from `t0` to `t1` (either direction), returning y(t1).
    pub fn integrate<S: OdeSystem<T, N>, const N: usize>(
        &mut self,
        sys: &S,
        t0: T,
        y0: [T; N],
        t1: T,
    ) -> Result<[T; N]> {
        let span = t1 - t0;
        if span == T::zero() {
            return Ok(y0);
        }
        let dir = span.signum();
        let mut h = if self.h > T::zero() { self.h } else { span.abs() * lit(1e-3) };
        h = h.min(span.abs());
        let mut t = t0;
        let mut y = y0;
        let mut steps = 0usize;
        let safety = lit::<T>(0.9);
        while (t1 - t) * dir > T::zero() {
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::InvalidInput("ODE step budget exhausted".into()));
            }
            let remaining = (t1 - t).abs();
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            let (y_new, err) = self.attempt(sys, t, &y, step * dir)?;
            if err <= T::one() {
                t = if last { t1 } else { t + step * dir };
                y = y_new;
                if !last {
                    self.h = step;
                }
                let grow = if err > T::zero() {
                    safety * err.powf(lit(-0.2))
                } else {
                    lit(5.0)
                };
                h = step * grow.min(lit(5.0)).max(lit(0.2));
            } else {
                let shrink = (safety * err.powf(lit(-0.25))).max(lit(0.1));
                h = step * shrink;
                if h < T::epsilon() * (T::one() + t.abs()) {
                    return Err(Error::InvalidInput("ODE step size underflow".into()));
                }
            }
        }
        Ok(y)
    }

    fn attempt<S: OdeSystem<T, N>, const N: usize>(
        &self,
        sys: &S,
        t: T,
        y: &[T; N],
        h: T,
    ) -> Result<([T; N], T)> {
        let mut k = [[T::zero(); N]; 7];
        for s in 0..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = lit::<T>(A[s][j]);
                if a != T::zero() {
                    for i in 0..N {
                        ys[i] = ys[i] + h * a * kj[i];
                    }
                }
            }
            k[s] = sys.rhs(t + h * lit(C[s]), &ys)?;
        }
        let mut y5 = *y;
        let mut err = T::zero();
        for i in 0..N {
            let (mut s5, mut s4) = (T::zero(), T::zero());
            for s in 0..7 {
                s5 = s5 + lit::<T>(B5[s]) * k[s][i];
                s4 = s4 + lit::<T>(B4[s]) * k[s][i];
            }
            y5[i] = y[i] + h * s5;
            let scale = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
            let e = h * (s5 - s4) / scale;
            err = err + e * e;
        }
        Ok((y5, (err / lit(N as f64)).sqrt()))
    }
}
