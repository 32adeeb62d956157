//! Adaptive Dormand-Prince 5(4) integrator with dense output, operating on
//! complex matrix states (a vectorized state is a d² x 1 matrix).
//!
//! Coefficients and the quartic interpolant follow Hairer, Nørsett & Wanner,
//! "Solving Ordinary Differential Equations I" (DOPRI5).

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

#[derive(Debug, Clone)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub initial_step: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            max_steps: 1_000_000,
            initial_step: None,
        }
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// 5th-order solution weights are the last row of A (FSAL); these are the
// differences to the embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57_600.0,
    0.0,
    -71.0 / 16_695.0,
    71.0 / 1_920.0,
    -17_253.0 / 339_200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// dense-output weights for the quartic interpolant
const D: [f64; 7] = [
    -12_715_105_075.0 / 11_282_082_432.0,
    0.0,
    87_487_479_700.0 / 32_700_410_799.0,
    -10_690_763_975.0 / 1_880_347_072.0,
    701_980_252_875.0 / 199_316_789_632.0,
    -1_453_857_185.0 / 822_651_844.0,
    69_997_945.0 / 29_380_423.0,
];

fn scaled_error(y: &CMat, y_new: &CMat, err: &CMat, atol: f64, rtol: f64) -> f64 {
    let n = y.len() as f64;
    let mut acc = 0.0;
    for ((a, b), e) in y.iter().zip(y_new.iter()).zip(err.iter()) {
        let sc = atol + rtol * a.norm().max(b.norm());
        let r = e.norm() / sc;
        acc += r * r;
    }
    (acc / n).sqrt()
}

/// Integrate dy/dt = rhs(t, y) from `grid[0]` and return the dense-output
/// solution at every grid point. The grid must be strictly ascending.
pub fn integrate_on_grid<F>(
    mut rhs: F,
    y0: CMat,
    grid: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<CMat>>
where
    F: FnMut(f64, &CMat) -> CMat,
{
    if grid.is_empty() {
        return Err(Error::Grid("empty time grid".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Grid("time grid must be strictly ascending".into()));
    }
    let t0 = grid[0];
    let t_end = *grid.last().expect("nonempty");

    let mut out = Vec::with_capacity(grid.len());
    out.push(y0.clone());
    if grid.len() == 1 {
        return Ok(out);
    }
    let mut next_out = 1;

    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    let mut h = opts
        .initial_step
        .unwrap_or_else(|| initial_step(&mut rhs, t, &y, &k1, t_end, opts));

    let mut rejected = false;
    for _step in 0..opts.max_steps {
        if h < f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::Integration {
                time: t,
                reason: format!("step size underflow (h = {h:.3e})"),
            });
        }
        h = h.min(t_end - t);

        let mut k = Vec::with_capacity(7);
        k.push(k1.clone());
        for stage in 1..7 {
            let mut arg = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = A[stage][j];
                if a != 0.0 {
                    arg += kj * C64::new(a * h, 0.0);
                }
            }
            k.push(rhs(t + C[stage] * h, &arg));
        }
        // stage 7 argument equals the 5th-order solution (FSAL)
        let y_new = {
            let mut acc = y.clone();
            for (j, kj) in k.iter().enumerate().take(6) {
                let a = A[6][j];
                if a != 0.0 {
                    acc += kj * C64::new(a * h, 0.0);
                }
            }
            acc
        };
        let err_vec = {
            let mut acc: CMat = &k[0] * C64::new(E[0] * h, 0.0);
            for (j, kj) in k.iter().enumerate().skip(1) {
                if E[j] != 0.0 {
                    acc += kj * C64::new(E[j] * h, 0.0);
                }
            }
            acc
        };
        let err = scaled_error(&y, &y_new, &err_vec, opts.atol, opts.rtol);

        if err <= 1.0 {
            // dense output for grid points inside (t, t + h]
            if next_out < grid.len() && grid[next_out] <= t + h + 1e-14 * t_end.abs().max(1.0) {
                let ydiff = &y_new - &y;
                let bspl = &k[0] * C64::new(h, 0.0) - &ydiff;
                let cont4 = &ydiff - &k[6] * C64::new(h, 0.0) - &bspl;
                let mut cont5 = &k[0] * C64::new(D[0] * h, 0.0);
                for (j, kj) in k.iter().enumerate().skip(1) {
                    if D[j] != 0.0 {
                        cont5 += kj * C64::new(D[j] * h, 0.0);
                    }
                }
                while next_out < grid.len()
                    && grid[next_out] <= t + h + 1e-14 * t_end.abs().max(1.0)
                {
                    let theta = ((grid[next_out] - t) / h).clamp(0.0, 1.0);
                    let theta1 = 1.0 - theta;
                    let inner3 = &cont4 + &cont5 * C64::new(theta1, 0.0);
                    let inner2 = &bspl + inner3 * C64::new(theta, 0.0);
                    let inner1 = &ydiff + inner2 * C64::new(theta1, 0.0);
                    out.push(&y + inner1 * C64::new(theta, 0.0));
                    next_out += 1;
                }
            }

            t += h;
            y = y_new;
            k1 = k.pop().expect("seven stages"); // FSAL
            if next_out >= grid.len() || t >= t_end {
                return Ok(out);
            }
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, if rejected { 1.0 } else { 10.0 });
            h *= fac;
            rejected = false;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            rejected = true;
        }
    }
    Err(Error::Integration {
        time: t,
        reason: format!("exceeded {} steps", opts.max_steps),
    })
}

/// Step-size guess following the classic hinit heuristic.
fn initial_step<F>(rhs: &mut F, t0: f64, y0: &CMat, f0: &CMat, t_end: f64, opts: &OdeOptions) -> f64
where
    F: FnMut(f64, &CMat) -> CMat,
{
    let span = t_end - t0;
    let sc = |y: &CMat, v: &CMat| -> f64 {
        let n = y.len() as f64;
        let mut acc = 0.0;
        for (yi, vi) in y.iter().zip(v.iter()) {
            let s = opts.atol + opts.rtol * yi.norm();
            let r = vi.norm() / s;
            acc += r * r;
        }
        (acc / n).sqrt()
    };
    let dnf = sc(y0, f0);
    let dny = sc(y0, y0);
    let mut h0 = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        0.01 * (dny / dnf)
    };
    h0 = h0.min(span);
    let y1 = y0 + f0 * C64::new(h0, 0.0);
    let f1 = rhs(t0 + h0, &y1);
    let der2 = sc(y0, &(&f1 - f0)) / h0;
    let der12 = der2.max(dnf);
    let h1 = if der12 <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}
