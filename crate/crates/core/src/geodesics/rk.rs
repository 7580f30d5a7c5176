//! Dormand–Prince 5(4) embedded pair for autonomous three-component systems.

pub type State = [f64; 3];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus the embedded fourth-order ones
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub struct Step {
    pub y: State,
    pub err: State,
}

/// One Dormand–Prince step of size `h` from `y`.
pub fn step<F: Fn(&State) -> State>(f: &F, y: &State, h: f64) -> Step {
    let mut k = [[0.0; 3]; 7];
    k[0] = f(y);
    for stage in 1..7 {
        let mut tmp = *y;
        for (j, kj) in k.iter().enumerate().take(stage) {
            let a = A[stage][j];
            if a != 0.0 {
                for i in 0..3 {
                    tmp[i] += h * a * kj[i];
                }
            }
        }
        k[stage] = f(&tmp);
    }
    // stage 7 is evaluated at the fifth-order solution (FSAL)
    let mut out = *y;
    for (j, kj) in k.iter().enumerate().take(6) {
        for i in 0..3 {
            out[i] += h * A[6][j] * kj[i];
        }
    }
    let mut err = [0.0; 3];
    for (j, kj) in k.iter().enumerate() {
        for i in 0..3 {
            err[i] += h * E[j] * kj[i];
        }
    }
    Step { y: out, err }
}

/// Scaled RMS error; non-finite values reject the step.
pub fn error_norm(y0: &State, s: &Step, tol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..3 {
        let scale = tol * (1.0 + y0[i].abs().max(s.y[i].abs()));
        let e = s.err[i] / scale;
        acc += e * e;
    }
    let n = (acc / 3.0).sqrt();
    if n.is_finite() && s.y.iter().all(|v| v.is_finite()) {
        n
    } else {
        f64::INFINITY
    }
}

pub fn next_step(h: f64, err: f64) -> f64 {
    let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
    h * factor
}
