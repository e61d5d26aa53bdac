//! Classical fixed-step fourth-order Runge–Kutta for complex state vectors.

use num_complex::Complex64;

pub struct Rk4 {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); dim];
        Self { k1: z.clone(), k2: z.clone(), k3: z.clone(), k4: z.clone(), tmp: z }
    }

    /// Advance `y` from `t` to `t + dt` for `y' = f(t, y)`; `f` writes the
    /// derivative into its third argument.
    pub fn step<F>(&mut self, f: &mut F, t: f64, dt: f64, y: &mut [Complex64])
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]),
    {
        let h = dt / 2.0;
        f(t, y, &mut self.k1);
        for ((o, yi), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k1) {
            *o = yi + k * h;
        }
        f(t + h, &self.tmp, &mut self.k2);
        for ((o, yi), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k2) {
            *o = yi + k * h;
        }
        f(t + h, &self.tmp, &mut self.k3);
        for ((o, yi), k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k3) {
            *o = yi + k * dt;
        }
        f(t + dt, &self.tmp, &mut self.k4);
        let w = dt / 6.0;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]) * w;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_order_on_rotation() {
        // y' = -i ω y, exact solution e^{-iωt}.
        let omega = 2.0;
        let run = |n: usize| {
            let mut rk = Rk4::new(1);
            let mut y = [Complex64::new(1.0, 0.0)];
            let dt = 1.0 / n as f64;
            let mut f = |_t: f64, y: &[Complex64], d: &mut [Complex64]| d[0] = -Complex64::i() * omega * y[0];
            for s in 0..n {
                rk.step(&mut f, s as f64 * dt, dt, &mut y);
            }
            (y[0] - Complex64::from_polar(1.0, -omega)).norm()
        };
        let (e1, e2) = (run(50), run(100));
        let order = (e1 / e2).log2();
        assert!((order - 4.0).abs() < 0.2, "observed order {order}");
    }
}
