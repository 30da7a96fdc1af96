//! Transfer matrices, the local charges `H_1..H_4` and conservation diagnostics.

use num_complex::Complex64;
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::algebra::{CMatrix, SpectralMatrixPoly};
use crate::dnls::{self, DnlsState};
use crate::error::{Error, Result};

/// A periodic chain of site Lax operators.
pub trait LaxChain {
    fn n_sites(&self) -> usize;
    fn site_lax_poly(&self, site: usize) -> Result<SpectralMatrixPoly>;
    fn site_lax(&self, site: usize, s: Complex64) -> Result<CMatrix>;
}

impl LaxChain for DnlsState {
    fn n_sites(&self) -> usize {
        DnlsState::n_sites(self)
    }
    fn site_lax_poly(&self, site: usize) -> Result<SpectralMatrixPoly> {
        dnls::lax_poly(self, site)
    }
    fn site_lax(&self, site: usize, s: Complex64) -> Result<CMatrix> {
        dnls::lax(self, site, s)
    }
}

/// `T = L_N ⋯ L_1` as a polynomial in the spectral parameter.
pub fn transfer_matrix<C: LaxChain>(chain: &C) -> Result<SpectralMatrixPoly> {
    let mut t = chain.site_lax_poly(0)?;
    for site in 1..chain.n_sites() {
        t = chain.site_lax_poly(site)?.try_mul(&t)?;
    }
    Ok(t)
}

/// `tr T(s)` from the numeric product of site matrices.
pub fn transfer_trace<C: LaxChain>(chain: &C, s: Complex64) -> Result<Complex64> {
    let mut t = chain.site_lax(0, s)?;
    for site in 1..chain.n_sites() {
        t = &chain.site_lax(site, s)? * &t;
    }
    Ok(t.trace())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChargeReport {
    pub h: [Complex64; 4],
    /// Normalized expansion coefficients of `λ^{-N} tr T`; absent unless the upper block is scalar.
    pub tau: Option<[Complex64; 5]>,
    pub trace_samples: Vec<(Complex64, Complex64)>,
}

impl Serialize for ChargeReport {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Sample {
            lambda: Complex64,
            trace: Complex64,
        }
        let mut map = ser.serialize_map(Some(10))?;
        for (k, h) in self.h.iter().enumerate() {
            map.serialize_entry(&format!("h{}", k + 1), h)?;
        }
        for k in 0..5 {
            map.serialize_entry(&format!("tau{k}"), &self.tau.map(|t| t[k]))?;
        }
        let samples: Vec<Sample> = self
            .trace_samples
            .iter()
            .map(|&(lambda, trace)| Sample { lambda, trace })
            .collect();
        map.serialize_entry("trace_samples", &samples)?;
        map.end()
    }
}

fn tr(m: &CMatrix) -> Complex64 {
    m.trace()
}

/// Closed-form `H_1..H_4`. Exact as log-expansion coefficients when `N > k`.
pub fn closed_form_charges(s: &DnlsState) -> [Complex64; 4] {
    let n_sites = s.n_sites() as i64;
    let (x, y) = (|k| s.xs(k), |k| s.ys(k));
    let mut h = [Complex64::new(0.0, 0.0); 4];
    for n in 0..n_sites {
        let n0 = s.big_n(n);
        let n1 = s.big_n(n - 1);
        let n2 = s.big_n(n - 2);
        let n0sq = &n0 * &n0;
        let xy1 = x(n) * y(n - 1);
        let xy2 = x(n) * y(n - 2);
        h[0] += tr(&n0);
        h[1] += tr(&xy1) - 0.5 * tr(&n0sq);
        h[2] += tr(&xy2) - tr(&(&(&n0 + &n1) * &xy1)) + tr(&(&n0sq * &n0)) / 3.0;
        h[3] += tr(&(x(n) * y(n - 3)))
            - tr(&(&(&(&n2 + &n1) + &n0) * &xy2))
            + tr(&(&(&n1 * &n0) * &xy1))
            + tr(&(&(&(&n1 * &n1) + &n0sq) * &xy1))
            - 0.5 * tr(&(&xy1 * &xy1))
            - tr(&(&xy1 * &(x(n - 1) * y(n - 2))))
            - 0.25 * tr(&(&n0sq * &n0sq));
    }
    h
}

/// `τ_0..τ_4`: coefficients of `λ^{-k}` in `λ^{-N} tr T(λ)`, normalized so `τ_0 = 1`.
pub fn tau_coefficients(s: &DnlsState) -> Result<[Complex64; 5]> {
    if s.n_dim() != 1 {
        return Err(Error::NotNormalized(s.n_dim()));
    }
    let trace = transfer_matrix(s)?.trace_coefficients();
    let n = s.n_sites();
    let lead = trace[n];
    let mut tau = [Complex64::new(0.0, 0.0); 5];
    for (k, t) in tau.iter_mut().enumerate() {
        if k <= n {
            *t = trace[n - k] / lead;
        }
    }
    Ok(tau)
}

/// Charges, normalized expansion (scalar upper block only) and trace samples.
pub fn local_charges(s: &DnlsState, samples: &[Complex64]) -> Result<ChargeReport> {
    let tau = match tau_coefficients(s) {
        Ok(t) => Some(t),
        Err(Error::NotNormalized(_)) => None,
        Err(e) => return Err(e),
    };
    let trace_samples = samples
        .iter()
        .map(|&l| transfer_trace(s, l).map(|t| (l, t)))
        .collect::<Result<_>>()?;
    Ok(ChargeReport {
        h: closed_form_charges(s),
        tau,
        trace_samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChargeRule {
    /// The expanded relations for `k ≤ 4`.
    Validated,
    /// General sum with weight `1 / max(j_1!, j_2!, …)`.
    MaxFactorial,
    /// General sum with weight `1 / (j_1! j_2! ⋯)`, the log-expansion of an exponential.
    Multinomial,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Multiplicity vectors `j` with `Σ i·j_i = k`, parts smaller than `k`.
fn compositions(k: usize) -> Vec<Vec<usize>> {
    fn rec(part: usize, remaining: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if part == 0 {
            if remaining == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for j in 0..=remaining / part {
            cur[part - 1] = j;
            rec(part - 1, remaining - j * part, cur, out);
        }
        cur[part - 1] = 0;
    }
    let mut out = Vec::new();
    if k >= 2 {
        let mut cur = vec![0; k - 1];
        rec(k - 1, k, &mut cur, &mut out);
    }
    out
}

/// `H_1..H_{up_to}` from expansion coefficients `τ` (with `τ_0 = 1`).
pub fn charge_recursion(tau: &[Complex64], up_to: usize, rule: ChargeRule) -> Result<Vec<Complex64>> {
    if rule == ChargeRule::Validated && up_to > 4 {
        return Err(Error::UnvalidatedOrder(up_to));
    }
    if tau.len() <= up_to {
        return Err(Error::Dimension(format!("need tau_0..tau_{up_to}, got {}", tau.len())));
    }
    let mut h: Vec<Complex64> = Vec::with_capacity(up_to);
    for k in 1..=up_to {
        let hk = match rule {
            ChargeRule::Validated => {
                let t = tau[k];
                match k {
                    1 => t,
                    2 => t - 0.5 * h[0] * h[0],
                    3 => t - h[0] * h[1] - h[0].powi(3) / 6.0,
                    _ => {
                        t - h[0] * h[2] - 0.5 * h[1] * h[1] - 0.5 * h[0] * h[0] * h[1] - h[0].powi(4) / 24.0
                    }
                }
            }
            ChargeRule::MaxFactorial | ChargeRule::Multinomial => {
                let mut acc = tau[k];
                for js in compositions(k) {
                    let weight = match rule {
                        ChargeRule::MaxFactorial => 1.0 / js.iter().map(|&j| factorial(j)).fold(1.0, f64::max),
                        _ => 1.0 / js.iter().map(|&j| factorial(j)).product::<f64>(),
                    };
                    let term: Complex64 = js
                        .iter()
                        .enumerate()
                        .map(|(i, &j)| h[i].powi(j as i32))
                        .product();
                    acc -= weight * term;
                }
                acc
            }
        };
        h.push(hk);
    }
    Ok(h)
}

/// Largest relative change of `tr T(s)` along a sequence of states, per sample.
pub fn trace_drift<C: LaxChain>(states: &[C], samples: &[Complex64]) -> Result<Vec<f64>> {
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty trajectory".into()))?;
    samples
        .iter()
        .map(|&s| {
            let t0 = transfer_trace(first, s)?;
            let mut worst: f64 = 0.0;
            for st in &states[1..] {
                worst = worst.max((transfer_trace(st, s)? - t0).norm() / t0.norm());
            }
            Ok(worst)
        })
        .collect()
}

/// Largest absolute change of each closed-form charge along a sequence of states.
pub fn charge_drift(states: &[DnlsState]) -> Result<[f64; 4]> {
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty trajectory".into()))?;
    let h0 = closed_form_charges(first);
    let mut worst = [0.0; 4];
    for st in &states[1..] {
        let h = closed_form_charges(st);
        for k in 0..4 {
            worst[k] = f64::max(worst[k], (h[k] - h0[k]).norm());
        }
    }
    Ok(worst)
}
