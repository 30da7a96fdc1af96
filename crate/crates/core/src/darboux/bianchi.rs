use super::{checked_div, LatticeSolution, OneSoliton, SolitonFamily};
use crate::error::{Error, Result};

const COINCIDENCE_TOL: f64 = 1e-12;

fn family_parameter(s: &OneSoliton) -> Option<(u8, num_complex::Complex64)> {
    s.params.as_ref().map(|p| match p.family {
        SolitonFamily::Type1 { xi } => (1, xi),
        SolitonFamily::Type2 { c } => (2, c),
    })
}

/// Algebraic superposition of two one-solitons sharing a pair, window and time.
///
/// With `Δf = f⁽¹⁾ - f⁽²⁾` the new fields are
/// `X_n = x⁽¹⁾_n + (κx⁽²⁾_nΔa² + y⁽²⁾_{n-1}Δx² - κ(a⁽²⁾_n - d⁽²⁾_n)ΔaΔx) / Δ_n` and
/// `Y_{n-1} = y⁽¹⁾_{n-1} + (κy⁽²⁾_{n-1}Δd² + x⁽²⁾_nΔy² + κ(a⁽²⁾_n - d⁽²⁾_n)ΔdΔy) / Δ_n`
/// with `Δ_n = ΔxΔy + κΔaΔd`, all differences taken at `(n, n-1, n, n)`.
pub fn bianchi_two_soliton(s1: &OneSoliton, s2: &OneSoliton) -> Result<LatticeSolution> {
    let (f1, f2) = (&s1.field, &s2.field);
    if f1.first_site != f2.first_site || f1.n_sites != f2.n_sites || f1.halo != f2.halo {
        return Err(Error::Dimension("solitons live on different windows".into()));
    }
    if f1.halo < 1 {
        return Err(Error::InvalidParameter("superposition needs one halo site".into()));
    }
    if (f1.pair.kappa - f2.pair.kappa).norm() > COINCIDENCE_TOL || (&f1.pair.b_hat - &f2.pair.b_hat).max_abs() > 0.0 {
        return Err(Error::InvalidParameter("solitons use different rank-one pairs".into()));
    }
    if s1.time != s2.time {
        return Err(Error::InvalidParameter("solitons are evaluated at different times".into()));
    }
    if let (Some(p1), Some(p2)) = (family_parameter(s1), family_parameter(s2)) {
        if p1.0 == p2.0 && (p1.1 - p2.1).norm() < COINCIDENCE_TOL {
            return Err(Error::DegenerateBianchi(format!("coincident parameters {}", p1.1)));
        }
    }
    let k = f1.pair.kappa;
    let parts = |n: i64| {
        let dx = f1.x_at(n) - f2.x_at(n);
        let dy = f1.y_at(n - 1) - f2.y_at(n - 1);
        let da = s1.a_at(n) - s2.a_at(n);
        let dd = s1.d_at(n) - s2.d_at(n);
        let den = dx * dy + da * dd * k;
        (dx, dy, da, dd, den)
    };
    LatticeSolution::build(&f1.pair, f1.first_site, f1.n_sites, f1.halo - 1, |n| {
        let (dx, _, da, _, den) = parts(n);
        let split = (s2.a_at(n) - s2.d_at(n)) * k;
        let x = f1.x_at(n)
            + checked_div(
                f2.x_at(n) * da * da * k + f2.y_at(n - 1) * dx * dx - split * da * dx,
                den,
                n,
            )?;
        let (_, dy, _, dd, den) = parts(n + 1);
        let split = (s2.a_at(n + 1) - s2.d_at(n + 1)) * k;
        let y = f1.y_at(n)
            + checked_div(
                f2.y_at(n) * dd * dd * k + f2.x_at(n + 1) * dy * dy + split * dd * dy,
                den,
                n + 1,
            )?;
        Ok((x, y))
    })
}
