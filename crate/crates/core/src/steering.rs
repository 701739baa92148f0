//! Minimum-energy output steering and trajectory simulation.
//!
//! The open-loop input
//!
//! ```text
//! u(t) = B^T e^{A^T (tf - t)} H^T W_o^{-1} (yf - H e^{A tf} x0)
//! ```
//!
//! drives the target outputs to `yf` whenever the output Gramian
//! `W_o = H (int_0^tf e^{As} B B^T e^{A^T s} ds) H^T` is invertible. The
//! Gramian comes from one augmented-matrix exponential; the state is then
//! integrated with fixed-step RK4 on the augmented system
//! `d/dt (x, v) = (Ax + B B^T v, -A^T v)`, whose `v` component reproduces
//! the input profile, so runs are deterministic step for step.

use nalgebra::{DMatrix, DVector};

use crate::graph::SystemTriple;
use crate::numeric::{expm, FloatMatrix};
use crate::{Error, Result};

/// Condition-number ceiling beyond which the Gramian is treated as
/// singular and steering is refused.
pub const GRAMIAN_CONDITION_LIMIT: f64 = 1e12;

/// Output-steering task on a float-cast system.
#[derive(Clone, Debug)]
pub struct SteeringProblem {
    a: FloatMatrix,
    b: FloatMatrix,
    h: FloatMatrix,
    x0: Vec<f64>,
    yf: Vec<f64>,
    tf: f64,
    steps: usize,
}

impl SteeringProblem {
    /// Builds a problem from an exact system, casting it to floats.
    /// `x0` must have the state dimension and `yf` the output dimension;
    /// `steps` counts samples, so at least 2, and `tf` must be positive
    /// and finite.
    pub fn new(
        triple: &SystemTriple,
        x0: Vec<f64>,
        yf: Vec<f64>,
        tf: f64,
        steps: usize,
    ) -> Result<Self> {
        Self::from_float(
            triple.a().to_float(),
            triple.b().to_float(),
            triple.h().to_float(),
            x0,
            yf,
            tf,
            steps,
        )
    }

    pub fn from_float(
        a: FloatMatrix,
        b: FloatMatrix,
        h: FloatMatrix,
        x0: Vec<f64>,
        yf: Vec<f64>,
        tf: f64,
        steps: usize,
    ) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || b.nrows() != n || h.ncols() != n {
            return Err(Error::Dimension("system matrices disagree on the state dimension".into()));
        }
        if x0.len() != n {
            return Err(Error::Dimension(format!(
                "x0 has length {}, state dimension is {n}",
                x0.len()
            )));
        }
        if yf.len() != h.nrows() {
            return Err(Error::Dimension(format!(
                "yf has length {}, output dimension is {}",
                yf.len(),
                h.nrows()
            )));
        }
        if !(tf > 0.0 && tf.is_finite()) {
            return Err(Error::InvalidArgument("tf must be positive and finite".into()));
        }
        if steps < 2 {
            return Err(Error::InvalidArgument("need at least 2 samples".into()));
        }
        if x0.iter().chain(&yf).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("x0/yf entries must be finite".into()));
        }
        Ok(SteeringProblem {
            a,
            b,
            h,
            x0,
            yf,
            tf,
            steps,
        })
    }
}

/// Sampled closed-form-input trajectory.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub inputs: Vec<Vec<f64>>,
    pub outputs: Vec<Vec<f64>>,
    /// Condition number of the output Gramian that was inverted.
    pub gramian_condition: f64,
    /// `|y(tf) - yf|_2` of the integrated trajectory.
    pub terminal_error: f64,
}

impl Trajectory {
    /// CSV rendering: header `t,x1..xn,u1..ul,y1..yp`, one row per sample,
    /// 17 significant digits, then a `# terminal_error` footer comment.
    pub fn to_csv(&self) -> String {
        let n = self.states.first().map_or(0, Vec::len);
        let l = self.inputs.first().map_or(0, Vec::len);
        let p = self.outputs.first().map_or(0, Vec::len);
        let mut out = String::from("t");
        for i in 1..=n {
            out.push_str(&format!(",x{i}"));
        }
        for i in 1..=l {
            out.push_str(&format!(",u{i}"));
        }
        for i in 1..=p {
            out.push_str(&format!(",y{i}"));
        }
        out.push('\n');
        for k in 0..self.times.len() {
            out.push_str(&format!("{:.16e}", self.times[k]));
            for v in self.states[k].iter().chain(&self.inputs[k]).chain(&self.outputs[k]) {
                out.push_str(&format!(",{v:.16e}"));
            }
            out.push('\n');
        }
        out.push_str(&format!("# gramian_condition {:.16e}\n", self.gramian_condition));
        out.push_str(&format!("# terminal_error {:.16e}\n", self.terminal_error));
        out
    }
}

/// Controllability Gramian `int_0^tf e^{As} B B^T e^{A^T s} ds` via the
/// augmented exponential of `[[-A, B B^T], [0, A^T]]`: with its top-right
/// block `G` and bottom-right block `F = e^{A^T tf}`, the Gramian is
/// `F^T G`. Returns the pair `(gramian, F)`.
fn state_gramian(a: &DMatrix<f64>, b: &DMatrix<f64>, tf: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let bbt = b * b.transpose();
    let mut aug = DMatrix::<f64>::zeros(2 * n, 2 * n);
    aug.view_mut((0, 0), (n, n)).copy_from(&(-a));
    aug.view_mut((0, n), (n, n)).copy_from(&bbt);
    aug.view_mut((n, n), (n, n)).copy_from(&a.transpose());
    let e = expm(&FloatMatrix::from_na(&(aug * tf)))?.to_na();
    let g = e.view((0, n), (n, n)).into_owned();
    let f = e.view((n, n), (n, n)).into_owned();
    Ok((f.transpose() * g, f))
}

/// Output Gramian `H W_c(tf) H^T`.
pub fn output_gramian(t: &SystemTriple, tf: f64) -> Result<FloatMatrix> {
    if !(tf > 0.0 && tf.is_finite()) {
        return Err(Error::InvalidArgument("tf must be positive and finite".into()));
    }
    let a = t.a().to_float().to_na();
    let b = t.b().to_float().to_na();
    let h = t.h().to_float().to_na();
    let (wc, _) = state_gramian(&a, &b, tf)?;
    Ok(FloatMatrix::from_na(&(&h * wc * h.transpose())))
}

/// Minimum-energy steering of the target outputs to `yf`.
///
/// Refuses with [`Error::SingularGramian`] when the output Gramian has
/// condition number above [`GRAMIAN_CONDITION_LIMIT`]; the diagnostic
/// carries the measured condition number.
pub fn steer(problem: &SteeringProblem) -> Result<Trajectory> {
    let n = problem.a.nrows();
    let l = problem.b.ncols();
    let p = problem.h.nrows();
    let a = problem.a.to_na();
    let b = problem.b.to_na();
    let h = problem.h.to_na();
    let tf = problem.tf;

    let (wc, e_at_t) = state_gramian(&a, &b, tf)?;
    let wo = &h * &wc * h.transpose();

    let svd = wo
        .clone()
        .svd_unordered(false, false)
        .singular_values
        .iter()
        .copied()
        .collect::<Vec<f64>>();
    let smax = svd.iter().copied().fold(0.0, f64::max);
    let smin = svd.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !condition.is_finite() || condition > GRAMIAN_CONDITION_LIMIT {
        return Err(Error::SingularGramian(format!(
            "output Gramian condition {condition:.3e} exceeds {GRAMIAN_CONDITION_LIMIT:.0e}; \
             the requested outputs are not steerable"
        )));
    }

    let x0 = DVector::from_column_slice(&problem.x0);
    let yf = DVector::from_column_slice(&problem.yf);
    // e^{A tf} x0 = (e^{A^T tf})^T x0.
    let free_output = &h * (e_at_t.transpose() * &x0);
    let deficit = &yf - free_output;
    let z = wo
        .lu()
        .solve(&deficit)
        .ok_or_else(|| Error::SingularGramian("output Gramian LU solve failed".into()))?;
    let v0 = &e_at_t * (h.transpose() * z);

    // Augmented dynamics: x' = A x + B B^T v, v' = -A^T v.
    let bbt = &b * b.transpose();
    let neg_at = -a.transpose();
    let deriv = |state: &DVector<f64>| -> DVector<f64> {
        let x = state.rows(0, n);
        let v = state.rows(n, n);
        let mut out = DVector::<f64>::zeros(2 * n);
        out.rows_mut(0, n).copy_from(&(&a * x + &bbt * v));
        out.rows_mut(n, n).copy_from(&(&neg_at * v));
        out
    };

    let steps = problem.steps;
    let dt = tf / (steps - 1) as f64;
    let mut state = DVector::<f64>::zeros(2 * n);
    state.rows_mut(0, n).copy_from(&x0);
    state.rows_mut(n, n).copy_from(&v0);

    let mut times = Vec::with_capacity(steps);
    let mut states = Vec::with_capacity(steps);
    let mut inputs = Vec::with_capacity(steps);
    let mut outputs = Vec::with_capacity(steps);
    let record = |state: &DVector<f64>,
                  states: &mut Vec<Vec<f64>>,
                  inputs: &mut Vec<Vec<f64>>,
                  outputs: &mut Vec<Vec<f64>>| {
        let x = state.rows(0, n).into_owned();
        let v = state.rows(n, n).into_owned();
        let u = b.transpose() * &v;
        let y = &h * &x;
        states.push(x.iter().copied().collect());
        inputs.push(u.iter().copied().take(l).collect());
        outputs.push(y.iter().copied().take(p).collect());
    };

    for k in 0..steps {
        times.push(tf * k as f64 / (steps - 1) as f64);
        record(&state, &mut states, &mut inputs, &mut outputs);
        if k + 1 == steps {
            break;
        }
        let k1 = deriv(&state);
        let k2 = deriv(&(&state + &k1 * (dt / 2.0)));
        let k3 = deriv(&(&state + &k2 * (dt / 2.0)));
        let k4 = deriv(&(&state + &k3 * dt));
        state += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }

    let last_y = DVector::from_column_slice(outputs.last().unwrap());
    let terminal_error = (&last_y - &yf).norm();
    Ok(Trajectory {
        times,
        states,
        inputs,
        outputs,
        gramian_condition: condition,
        terminal_error,
    })
}

/// Steers the `m_order`-lifted system. The initial condition `x0` must
/// have the lifted dimension `n * m_order` (positions first, then the
/// higher derivative blocks); `m_order = 1` reduces to [`steer`].
pub fn simulate_high_order(
    triple: &SystemTriple,
    m_order: usize,
    x0: Vec<f64>,
    yf: Vec<f64>,
    tf: f64,
    steps: usize,
) -> Result<Trajectory> {
    if m_order < 1 {
        return Err(Error::InvalidArgument("order must be at least 1".into()));
    }
    let lifted = crate::extensions::lift_high_order(triple, m_order);
    steer(&SteeringProblem::new(&lifted, x0, yf, tf, steps)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::RatMatrix;
    use crate::graph::Graph;

    fn seven_node() -> Graph {
        Graph::parse(include_str!("../fixtures/seven_node.graph")).unwrap()
    }

    fn scalar_integrator() -> SystemTriple {
        SystemTriple::new(
            RatMatrix::zeros(1, 1),
            RatMatrix::identity(1),
            RatMatrix::identity(1),
        )
    }

    #[test]
    fn gramian_of_scalar_integrator() {
        let w = output_gramian(&scalar_integrator(), 2.0).unwrap();
        assert!((w.get(0, 0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gramian_zero_inputs() {
        let t = SystemTriple::new(
            RatMatrix::identity(2),
            RatMatrix::zeros(2, 1),
            RatMatrix::identity(2),
        );
        let w = output_gramian(&t, 1.0).unwrap();
        assert_eq!(w.max_abs(), 0.0);
    }

    #[test]
    fn gramian_matches_trapezoid_quadrature() {
        let t = seven_node().system_triple();
        let tf = 1.0;
        let w = output_gramian(&t, tf).unwrap();

        let a = t.a().to_float().to_na();
        let b = t.b().to_float().to_na();
        let h = t.h().to_float().to_na();
        let steps = 100_000usize;
        let dt = tf / steps as f64;
        let step = expm(&FloatMatrix::from_na(&(&a * dt))).unwrap().to_na();
        let mut e_as = DMatrix::<f64>::identity(7, 7);
        let mut acc = DMatrix::<f64>::zeros(2, 2);
        for k in 0..=steps {
            let hb = &h * &e_as * &b;
            let term = &hb * hb.transpose();
            let weight = if k == 0 || k == steps { 0.5 } else { 1.0 };
            acc += term * (weight * dt);
            e_as = &e_as * &step;
        }
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (w.get(i, j) - acc[(i, j)]).abs() <= 1e-6,
                    "({i},{j}): {} vs {}",
                    w.get(i, j),
                    acc[(i, j)]
                );
            }
        }
    }

    #[test]
    fn gramian_is_numerically_symmetric() {
        let t = seven_node().system_triple();
        let w = output_gramian(&t, 1.0).unwrap();
        let asym = (0..w.nrows())
            .flat_map(|i| (0..w.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| (w.get(i, j) - w.get(j, i)).abs())
            .fold(0.0, f64::max);
        assert!(asym <= 1e-9 * w.max_abs().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn scalar_integrator_constant_input() {
        let p = SteeringProblem::new(&scalar_integrator(), vec![0.0], vec![1.0], 1.0, 11).unwrap();
        let traj = steer(&p).unwrap();
        for u in &traj.inputs {
            assert!((u[0] - 1.0).abs() < 1e-9, "u = {}", u[0]);
        }
        assert!((traj.outputs.last().unwrap()[0] - 1.0).abs() < 1e-9);
        assert!(traj.terminal_error < 1e-9);
    }

    #[test]
    fn branching_fixture_reaches_random_outputs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let t = seven_node().system_triple();
        for _ in 0..3 {
            let x0: Vec<f64> = (0..7).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let yf: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let p = SteeringProblem::new(&t, x0, yf, 1.0, 2000).unwrap();
            let traj = steer(&p).unwrap();
            assert!(traj.terminal_error <= 1e-6, "err {}", traj.terminal_error);
        }
    }

    #[test]
    fn unsteerable_outputs_are_refused() {
        let g = Graph::parse(include_str!("../fixtures/four_node_fan.graph")).unwrap();
        let p = SteeringProblem::new(
            &g.system_triple(),
            vec![0.0; 4],
            vec![1.0, -1.0],
            1.0,
            100,
        )
        .unwrap();
        match steer(&p) {
            Err(Error::SingularGramian(msg)) => assert!(msg.contains("condition")),
            other => panic!("expected Gramian refusal, got {other:?}"),
        }
    }

    #[test]
    fn high_order_one_matches_steer() {
        let t = seven_node().system_triple();
        let x0 = vec![0.1; 7];
        let yf = vec![0.5, -0.25];
        let direct = steer(&SteeringProblem::new(&t, x0.clone(), yf.clone(), 1.0, 50).unwrap())
            .unwrap();
        let lifted = simulate_high_order(&t, 1, x0, yf, 1.0, 50).unwrap();
        assert_eq!(direct.states, lifted.states);
        assert_eq!(direct.terminal_error, lifted.terminal_error);
    }

    #[test]
    fn double_integrator_matches_analytic_solution() {
        // Single second-order agent: u(t) = c (tf - t) with
        // c = 3 (yf - x0_pos - tf x0_vel) / tf^3 steers the position, and
        // the position solves x(t) = x0_pos + x0_vel t + c (tf t^2/2 - t^3/6).
        let g = Graph::parse("n 1\nleaders 1\ntargets 1\n").unwrap();
        let (x0p, x0v, yf, tf) = (0.25, -0.5, 2.0, 1.0);
        let traj =
            simulate_high_order(&g.system_triple(), 2, vec![x0p, x0v], vec![yf], tf, 2001)
                .unwrap();
        let c = 3.0 * (yf - x0p - tf * x0v) / tf.powi(3);
        for (k, &t) in traj.times.iter().enumerate() {
            let want = x0p + x0v * t + c * (tf * t * t / 2.0 - t * t * t / 6.0);
            let got = traj.states[k][0];
            assert!((got - want).abs() <= 1e-8, "t={t}: {got} vs {want}");
            let want_u = c * (tf - t);
            assert!((traj.inputs[k][0] - want_u).abs() <= 1e-8);
        }
        assert!(traj.terminal_error <= 1e-9);
    }

    #[test]
    fn csv_shape_and_footer() {
        let p = SteeringProblem::new(&scalar_integrator(), vec![0.0], vec![1.0], 1.0, 3).unwrap();
        let traj = steer(&p).unwrap();
        assert!((traj.gramian_condition - 1.0).abs() < 1e-12);
        let csv = traj.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,x1,u1,y1");
        assert_eq!(lines.len(), 6);
        assert!(lines[4].starts_with("# gramian_condition "));
        assert!(lines[5].starts_with("# terminal_error "));
        assert_eq!(lines[1].split(',').count(), 4);
    }

    #[test]
    fn gramian_is_positive_semidefinite() {
        let t = seven_node().system_triple();
        let w = output_gramian(&t, 1.0).unwrap();
        let eigs = crate::numeric::eigenvalues(&w).unwrap();
        for z in eigs {
            assert!(z.re >= -1e-9 * w.max_abs(), "negative eigenvalue {z}");
            assert!(z.im.abs() <= 1e-9 * w.max_abs().max(1.0));
        }
    }

    #[test]
    fn problem_validation() {
        let t = scalar_integrator();
        assert!(SteeringProblem::new(&t, vec![0.0, 0.0], vec![1.0], 1.0, 10).is_err());
        assert!(SteeringProblem::new(&t, vec![0.0], vec![1.0, 2.0], 1.0, 10).is_err());
        assert!(SteeringProblem::new(&t, vec![0.0], vec![1.0], 0.0, 10).is_err());
        assert!(SteeringProblem::new(&t, vec![0.0], vec![1.0], 1.0, 1).is_err());
        assert!(SteeringProblem::new(&t, vec![f64::NAN], vec![1.0], 1.0, 10).is_err());
    }
}
