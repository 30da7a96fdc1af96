//! Fixed-step classical Runge–Kutta over paired block fields.

use num_complex::Complex64;

use crate::algebra::CMatrix;
use crate::error::{Error, Result};

/// Time derivatives of the upper-right and lower-left field blocks.
#[derive(Debug, Clone)]
pub struct FieldRates {
    pub upper: Vec<CMatrix>,
    pub lower: Vec<CMatrix>,
}

impl FieldRates {
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let d = |a: &[CMatrix], b: &[CMatrix]| {
            a.iter()
                .zip(b)
                .map(|(p, q)| (p - q).max_abs())
                .fold(0.0, f64::max)
        };
        d(&self.upper, &other.upper).max(d(&self.lower, &other.lower))
    }
}

/// A lattice state made of two block sequences.
pub trait BlockFields: Clone {
    fn upper(&self) -> &[CMatrix];
    fn lower(&self) -> &[CMatrix];
    fn upper_mut(&mut self) -> &mut [CMatrix];
    fn lower_mut(&mut self) -> &mut [CMatrix];

    fn is_finite(&self) -> bool {
        self.upper().iter().chain(self.lower()).all(CMatrix::is_finite)
    }

    /// Largest entrywise difference between two states of equal shape.
    fn max_abs_diff(&self, other: &Self) -> f64 {
        let d = |a: &[CMatrix], b: &[CMatrix]| {
            a.iter()
                .zip(b)
                .map(|(p, q)| (p - q).max_abs())
                .fold(0.0, f64::max)
        };
        d(self.upper(), other.upper()).max(d(self.lower(), other.lower()))
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
}

impl<S> Trajectory<S> {
    pub fn last(&self) -> &S {
        self.states.last().expect("trajectory holds the initial state")
    }
}

fn shifted<S: BlockFields>(base: &S, rates: &FieldRates, h: f64) -> S {
    let mut out = base.clone();
    let h = Complex64::new(h, 0.0);
    for (m, r) in out.upper_mut().iter_mut().zip(&rates.upper) {
        m.axpy(h, r);
    }
    for (m, r) in out.lower_mut().iter_mut().zip(&rates.lower) {
        m.axpy(h, r);
    }
    out
}

pub fn rk4_step<S, F>(state: &S, dt: f64, rhs: &F) -> Result<S>
where
    S: BlockFields,
    F: Fn(&S) -> Result<FieldRates>,
{
    let k1 = rhs(state)?;
    let k2 = rhs(&shifted(state, &k1, dt / 2.0))?;
    let k3 = rhs(&shifted(state, &k2, dt / 2.0))?;
    let k4 = rhs(&shifted(state, &k3, dt))?;
    let mut out = state.clone();
    let w = [dt / 6.0, dt / 3.0, dt / 3.0, dt / 6.0];
    for (k, w) in [&k1, &k2, &k3, &k4].into_iter().zip(w) {
        let w = Complex64::new(w, 0.0);
        for (m, r) in out.upper_mut().iter_mut().zip(&k.upper) {
            m.axpy(w, r);
        }
        for (m, r) in out.lower_mut().iter_mut().zip(&k.lower) {
            m.axpy(w, r);
        }
    }
    Ok(out)
}

/// Integrates `steps` RK4 steps, keeping every `sample_every`-th state and the last one.
pub fn integrate<S, F>(
    initial: &S,
    dt: f64,
    steps: usize,
    sample_every: usize,
    rhs: F,
) -> Result<Trajectory<S>>
where
    S: BlockFields,
    F: Fn(&S) -> Result<FieldRates>,
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
    }
    let every = sample_every.max(1);
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![initial.clone()],
    };
    let mut cur = initial.clone();
    for step in 1..=steps {
        cur = rk4_step(&cur, dt, &rhs)?;
        if !cur.is_finite() {
            return Err(Error::BlowUp { step });
        }
        if step % every == 0 || step == steps {
            traj.times.push(step as f64 * dt);
            traj.states.push(cur.clone());
        }
    }
    Ok(traj)
}
