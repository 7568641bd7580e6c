//! Dormand-Prince 5(4) embedded Runge-Kutta pair with PI step-size control
//! and fourth-order continuous output.

/// A first-order system `y' = f(t, y)` of fixed dimension.
pub trait OdeSystem<const N: usize> {
    type Error;

    fn rhs(&mut self, t: f64, y: &[f64; N]) -> Result<[f64; N], Self::Error>;

    /// Called after every accepted step; an error stops the integration.
    fn accept(&mut self, _t: f64, _y: &[f64; N]) -> Result<(), Self::Error> {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// Safety factor on the predicted step.
    pub safety: f64,
    /// PI stabilisation exponent.
    pub beta: f64,
    pub min_factor: f64,
    pub max_factor: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-9,
            h_init: 1e-3,
            h_min: 1e-14,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
            safety: 0.9,
            beta: 0.04,
            min_factor: 0.2,
            max_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveError<E> {
    System { t: f64, error: E },
    StepUnderflow { t: f64 },
    StepBudget { t: f64, steps: usize },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution<const N: usize> {
    /// `(t, y)` at each requested output time, in order.
    pub samples: Vec<(f64, [f64; N])>,
    pub stats: SolverStats,
}

/// A partially completed integration: the output gathered before `error`.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure<const N: usize, E> {
    pub partial: Solution<N>,
    pub error: SolveError<E>,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[inline]
fn combine<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

/// Integrate from `(t0, y0)` to `t_end`, reporting the solution at each time
/// in `outputs` (sorted, within `[t0, t_end]`).
pub fn integrate<S, const N: usize>(
    system: &mut S,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    outputs: &[f64],
    ctrl: &StepControl,
) -> Result<Solution<N>, Failure<N, S::Error>>
where
    S: OdeSystem<N>,
{
    let mut sol = Solution {
        samples: Vec::with_capacity(outputs.len()),
        stats: SolverStats::default(),
    };
    let mut next_out = 0;
    while next_out < outputs.len() && outputs[next_out] <= t0 {
        sol.samples.push((outputs[next_out], y0));
        next_out += 1;
    }

    macro_rules! fail {
        ($err:expr) => {
            return Err(Failure { partial: sol, error: $err })
        };
    }
    macro_rules! eval {
        ($t:expr, $y:expr) => {{
            sol.stats.evaluations += 1;
            match system.rhs($t, $y) {
                Ok(k) => k,
                Err(error) => fail!(SolveError::System { t: $t, error }),
            }
        }};
    }

    let mut t = t0;
    let mut y = y0;
    let mut k1 = eval!(t, &y);
    let mut h = ctrl.h_init.min(ctrl.h_max);
    let expo1 = 0.2 - 0.75 * ctrl.beta;
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;
    let mut steps = 0usize;

    while t < t_end {
        if steps >= ctrl.max_steps {
            fail!(SolveError::StepBudget { t, steps });
        }
        steps += 1;
        let remaining = t_end - t;
        let last = h >= remaining;
        if last {
            h = remaining;
        } else if h < ctrl.h_min {
            fail!(SolveError::StepUnderflow { t });
        }

        let k2 = eval!(t + C2 * h, &combine(&y, h, &[(A21, &k1)]));
        let k3 = eval!(t + C3 * h, &combine(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = eval!(t + C4 * h, &combine(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = eval!(
            t + C5 * h,
            &combine(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)])
        );
        let t_new = if last { t_end } else { t + h };
        let k6 = eval!(
            t_new,
            &combine(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)])
        );
        let y_new = combine(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = eval!(t_new, &y_new);

        let mut err_sq = 0.0;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sk = ctrl.abs_tol + ctrl.rel_tol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / sk) * (e / sk);
        }
        let err = (err_sq / N as f64).sqrt();
        let fac11 = err.powf(expo1);

        if err <= 1.0 {
            sol.stats.accepted += 1;
            // Dense output on (t, t_new].
            while next_out < outputs.len() && outputs[next_out] <= t_new {
                let to = outputs[next_out];
                let value = if to == t_new {
                    y_new
                } else {
                    let theta = (to - t) / h;
                    let theta1 = 1.0 - theta;
                    let mut v = [0.0; N];
                    for i in 0..N {
                        let r2 = y_new[i] - y[i];
                        let r3 = h * k1[i] - r2;
                        let r4 = r2 - h * k7[i] - r3;
                        let r5 = h
                            * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                        v[i] = y[i] + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
                    }
                    v
                };
                sol.samples.push((to, value));
                next_out += 1;
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            if let Err(error) = system.accept(t, &y) {
                fail!(SolveError::System { t, error });
            }
            let mut fac = fac11 / facold.powf(ctrl.beta);
            facold = err.max(1e-4);
            fac = (fac / ctrl.safety).clamp(1.0 / ctrl.max_factor, 1.0 / ctrl.min_factor);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
            h = h_new.min(ctrl.h_max);
        } else {
            sol.stats.rejected += 1;
            last_rejected = true;
            h /= (fac11 / ctrl.safety).min(1.0 / ctrl.min_factor);
        }
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    struct Oscillator;

    impl OdeSystem<2> for Oscillator {
        type Error = Infallible;
        fn rhs(&mut self, _t: f64, y: &[f64; 2]) -> Result<[f64; 2], Infallible> {
            Ok([y[1], -y[0]])
        }
    }

    struct Growth;

    impl OdeSystem<1> for Growth {
        type Error = Infallible;
        fn rhs(&mut self, t: f64, y: &[f64; 1]) -> Result<[f64; 1], Infallible> {
            Ok([y[0] * t.cos()])
        }
    }

    #[test]
    fn oscillator_endpoint_and_dense_output() {
        let outputs: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        let ctrl = StepControl {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            ..StepControl::default()
        };
        let sol = integrate(&mut Oscillator, 0.0, [1.0, 0.0], 10.0, &outputs, &ctrl).unwrap();
        assert_eq!(sol.samples.len(), outputs.len());
        for (t, y) in &sol.samples {
            assert!((y[0] - t.cos()).abs() < 1e-8, "t = {t}: {}", y[0] - t.cos());
            assert!((y[1] + t.sin()).abs() < 1e-8);
        }
        assert_eq!(sol.samples.last().unwrap().0, 10.0);
        assert!(sol.stats.accepted < 400, "{:?}", sol.stats);
    }

    #[test]
    fn nonautonomous_growth() {
        let sol = integrate(&mut Growth, 0.0, [1.0], 6.0, &[3.0, 6.0], &StepControl::default()).unwrap();
        for (t, y) in &sol.samples {
            let exact = t.sin().exp();
            assert!((y[0] - exact).abs() < 1e-8 * exact);
        }
    }

    #[test]
    fn error_decreases_with_tolerance() {
        let run = |tol: f64| {
            let ctrl = StepControl {
                rel_tol: tol,
                abs_tol: tol,
                ..StepControl::default()
            };
            let sol = integrate(&mut Oscillator, 0.0, [1.0, 0.0], 20.0, &[20.0], &ctrl).unwrap();
            (sol.samples[0].1[0] - 20.0f64.cos()).abs()
        };
        assert!(run(1e-10) < run(1e-6));
    }

    struct Stiffening;

    impl OdeSystem<1> for Stiffening {
        type Error = Infallible;
        fn rhs(&mut self, t: f64, _y: &[f64; 1]) -> Result<[f64; 1], Infallible> {
            Ok([1.0 / (1.0 - t)])
        }
    }

    #[test]
    fn singularity_triggers_underflow() {
        let ctrl = StepControl {
            h_min: 1e-10,
            ..StepControl::default()
        };
        let err = integrate(&mut Stiffening, 0.0, [0.0], 2.0, &[2.0], &ctrl).unwrap_err();
        assert!(matches!(err.error, SolveError::StepUnderflow { t } if t < 1.0));
    }
}
