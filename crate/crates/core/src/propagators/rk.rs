//! Explicit Runge-Kutta integrators for `y' = -i H(t) y`.

use num_complex::Complex64;

use super::{check_tolerance, Method, Problem, PropagationRecord, Run, RunOptions};
use crate::error::{Error, Result};
use crate::sparse::MatvecCounter;
use crate::vector::{self, StateVector, ZERO};

/// Embedded explicit pair with `S` stages.
pub struct Rk8Tableau<const S: usize> {
    pub c: [f64; S],
    /// Strictly lower triangular, row `i` uses stages `0..i`.
    pub a: [[f64; S]; S],
    /// Propagating (8th-order) weights.
    pub b: [f64; S],
    /// Embedded (7th-order) weights.
    pub b_hat: [f64; S],
}

/// Prince-Dormand RK8(7)13M.
pub const RK8: Rk8Tableau<13> = Rk8Tableau {
    c: [
        0.0,
        1.0 / 18.0,
        1.0 / 12.0,
        1.0 / 8.0,
        5.0 / 16.0,
        3.0 / 8.0,
        59.0 / 400.0,
        93.0 / 200.0,
        5490023248.0 / 9719169821.0,
        13.0 / 20.0,
        1201146811.0 / 1299019798.0,
        1.0,
        1.0,
    ],
    a: [
        [0.0; 13],
        [1.0 / 18.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1.0 / 48.0, 1.0 / 16.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1.0 / 32.0, 0.0, 3.0 / 32.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [5.0 / 16.0, 0.0, -75.0 / 64.0, 75.0 / 64.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 80.0, 0.0, 0.0, 3.0 / 16.0, 3.0 / 20.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [
            29443841.0 / 614563906.0,
            0.0,
            0.0,
            77736538.0 / 692538347.0,
            -28693883.0 / 1125000000.0,
            23124283.0 / 1800000000.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            16016141.0 / 946692911.0,
            0.0,
            0.0,
            61564180.0 / 158732637.0,
            22789713.0 / 633445777.0,
            545815736.0 / 2771057229.0,
            -180193667.0 / 1043307555.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            39632708.0 / 573591083.0,
            0.0,
            0.0,
            -433636366.0 / 683701615.0,
            -421739975.0 / 2616292301.0,
            100302831.0 / 723423059.0,
            790204164.0 / 839813087.0,
            800635310.0 / 3783071287.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            246121993.0 / 1340847787.0,
            0.0,
            0.0,
            -37695042795.0 / 15268766246.0,
            -309121744.0 / 1061227803.0,
            -12992083.0 / 490766935.0,
            6005943493.0 / 2108947869.0,
            393006217.0 / 1396673457.0,
            123872331.0 / 1001029789.0,
            0.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            -1028468189.0 / 846180014.0,
            0.0,
            0.0,
            8478235783.0 / 508512852.0,
            1311729495.0 / 1432422823.0,
            -10304129995.0 / 1701304382.0,
            -48777925059.0 / 3047939560.0,
            15336726248.0 / 1032824649.0,
            -45442868181.0 / 3398467696.0,
            3065993473.0 / 597172653.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            185892177.0 / 718116043.0,
            0.0,
            0.0,
            -3185094517.0 / 667107341.0,
            -477755414.0 / 1098053517.0,
            -703635378.0 / 230739211.0,
            5731566787.0 / 1027545527.0,
            5232866602.0 / 850066563.0,
            -4093664535.0 / 808688257.0,
            3962137247.0 / 1805957418.0,
            65686358.0 / 487910083.0,
            0.0,
            0.0,
        ],
        [
            403863854.0 / 491063109.0,
            0.0,
            0.0,
            -5068492393.0 / 434740067.0,
            -411421997.0 / 543043805.0,
            652783627.0 / 914296604.0,
            11173962825.0 / 925320556.0,
            -13158990841.0 / 6184727034.0,
            3936647629.0 / 1978049680.0,
            -160528059.0 / 685178525.0,
            248638103.0 / 1413531060.0,
            0.0,
            0.0,
        ],
    ],
    b: [
        14005451.0 / 335480064.0,
        0.0,
        0.0,
        0.0,
        0.0,
        -59238493.0 / 1068277825.0,
        181606767.0 / 758867731.0,
        561292985.0 / 797845732.0,
        -1041891430.0 / 1371343529.0,
        760417239.0 / 1151165299.0,
        118820643.0 / 751138087.0,
        -528747749.0 / 2220607170.0,
        1.0 / 4.0,
    ],
    b_hat: [
        13451932.0 / 455176623.0,
        0.0,
        0.0,
        0.0,
        0.0,
        -808719846.0 / 976000145.0,
        1757004468.0 / 5645159321.0,
        656045339.0 / 265891186.0,
        -3867574721.0 / 1518517206.0,
        465885868.0 / 322736535.0,
        53011238.0 / 667516719.0,
        2.0 / 45.0,
        0.0,
    ],
};

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// One RK8(7) step of a general linear system `y' = rhs(t, y)`, where
/// `rhs` writes into its output slice. Returns the 8th-order solution and
/// the Euclidean norm of its difference from the embedded 7th-order one.
pub fn rk8_step<F>(mut rhs: F, t: f64, y: &[Complex64], h: f64) -> (StateVector, f64)
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y.len();
    let tab = &RK8;
    let mut k: Vec<StateVector> = Vec::with_capacity(13);
    let mut stage = vec![ZERO; n];
    for i in 0..13 {
        stage.copy_from_slice(y);
        for (j, kj) in k.iter().enumerate() {
            let aij = tab.a[i][j];
            if aij != 0.0 {
                vector::axpy(Complex64::new(h * aij, 0.0), kj, &mut stage);
            }
        }
        let mut ki = vec![ZERO; n];
        rhs(t + tab.c[i] * h, &stage, &mut ki);
        k.push(ki);
    }
    let mut out = y.to_vec();
    let mut diff = vec![ZERO; n];
    for (i, ki) in k.iter().enumerate() {
        if tab.b[i] != 0.0 {
            vector::axpy(Complex64::new(h * tab.b[i], 0.0), ki, &mut out);
        }
        let e = tab.b[i] - tab.b_hat[i];
        if e != 0.0 {
            vector::axpy(Complex64::new(h * e, 0.0), ki, &mut diff);
        }
    }
    (out, vector::norm(&diff))
}

/// `k = -i H(t) y`, one matvec.
fn schrodinger_rhs<'p>(
    problem: &'p Problem,
    counter: &'p MatvecCounter,
) -> impl FnMut(f64, &[Complex64], &mut [Complex64]) + 'p {
    move |t, y, k| {
        problem.apply_h(t, y, k, counter);
        for z in k.iter_mut() {
            *z = Complex64::new(z.im, -z.re);
        }
    }
}

/// Adaptive RK8(7): accept when the embedded error is within `tol`, halve on
/// rejection, and size the next step as `0.9 h (tol/err)^(1/8)` clamped to
/// `[0.2, 5] h`.
pub fn propagate_rk8(
    problem: &Problem,
    psi0: &[Complex64],
    t_span: (f64, f64),
    tol: f64,
    options: RunOptions,
) -> Result<(StateVector, PropagationRecord)> {
    check_tolerance(tol)?;
    let mut run = Run::start(problem, Method::Rk8, psi0, t_span, options)?;
    let mut psi = psi0.to_vec();
    let mut dt = t_span.1 - t_span.0;
    let mut just_rejected = false;
    while !run.finished() {
        run.check_underflow(dt)?;
        let (h, shortened) = run.clamp(dt);
        let (next, error) = rk8_step(schrodinger_rhs(problem, &run.counter), run.t, &psi, h);
        if error <= tol {
            run.accept(&next, h, error, 0, 0);
            psi = next;
            if !shortened {
                // no growth right after a rejection, or the controller keeps
                // bouncing off the same failing size
                let max_factor = if just_rejected { 1.0 } else { MAX_FACTOR };
                let factor = if error == 0.0 {
                    max_factor
                } else {
                    (SAFETY * (tol / error).powf(1.0 / 8.0)).clamp(MIN_FACTOR, max_factor)
                };
                dt = h * factor;
            }
            just_rejected = false;
        } else {
            run.reject(h, error, 0);
            dt = 0.5 * h;
            just_rejected = true;
        }
    }
    Ok((psi, run.finish()))
}

pub(super) fn check_fixed_step(dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("fixed step must be positive, got {dt}")));
    }
    Ok(())
}

/// Classical fourth-order Runge-Kutta with a fixed step (the last step is
/// shortened to land on the end time). Four matvecs per step.
pub fn propagate_rk4_fixed(
    problem: &Problem,
    psi0: &[Complex64],
    t_span: (f64, f64),
    dt: f64,
    options: RunOptions,
) -> Result<(StateVector, PropagationRecord)> {
    check_fixed_step(dt)?;
    let mut run = Run::start(problem, Method::Rk4, psi0, t_span, options)?;
    let n = psi0.len();
    let mut psi = psi0.to_vec();
    let mut stage = vec![ZERO; n];
    let (mut k1, mut k2, mut k3, mut k4) = (vec![ZERO; n], vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]);
    while !run.finished() {
        let t = run.t;
        let (h, _) = run.clamp(dt);
        let mut rhs = schrodinger_rhs(problem, &run.counter);
        rhs(t, &psi, &mut k1);
        stage.copy_from_slice(&psi);
        vector::axpy(Complex64::new(0.5 * h, 0.0), &k1, &mut stage);
        rhs(t + 0.5 * h, &stage, &mut k2);
        stage.copy_from_slice(&psi);
        vector::axpy(Complex64::new(0.5 * h, 0.0), &k2, &mut stage);
        rhs(t + 0.5 * h, &stage, &mut k3);
        stage.copy_from_slice(&psi);
        vector::axpy(Complex64::new(h, 0.0), &k3, &mut stage);
        rhs(t + h, &stage, &mut k4);
        for (k, w) in [(&k1, 1.0), (&k2, 2.0), (&k3, 2.0), (&k4, 1.0)] {
            vector::axpy(Complex64::new(h * w / 6.0, 0.0), k, &mut psi);
        }
        drop(rhs);
        run.accept(&psi, h, 0.0, 0, 0);
    }
    Ok((psi, run.finish()))
}
