use crate::matgroup::{Mat2, TorsionPoint};
use crate::modring::{solve_linear, ModMatrix};
use crate::structure::ParameterProfile;

use super::{coboundary, Cocycle, CohomologyError};

/// A cohomologous representative with `Z_{τ_U} = Z_{τ_L} = Z_ρ = 0` and `Z_δ = (p^m β, 0)`.
#[derive(Debug, Clone)]
pub struct Normalized {
    pub cocycle: Cocycle,
    /// `cocycle = input - coboundary(shift)`.
    pub shift: TorsionPoint,
    pub beta: u64,
}

// Some `W` with `(θ - 1) W = Z_θ` for each listed element, if one exists.
fn common_witness(z: &Cocycle, elements: &[Mat2]) -> Result<Option<[u64; 2]>, CohomologyError> {
    let g = z.group();
    let m = g.modulus();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for e in elements {
        let idx = g.index_of(e).ok_or_else(|| {
            CohomologyError::NormalizationObstructed(format!("{e} is not an element of the group"))
        })?;
        let d = e.minus_identity();
        rows.push(vec![d[0], d[1]]);
        rows.push(vec![d[2], d[3]]);
        rhs.extend_from_slice(&z.raw(idx));
    }
    let a = ModMatrix::from_rows(m, &rows).unwrap();
    Ok(solve_linear(&a, &rhs).unwrap().map(|s| [s.particular[0], s.particular[1]]))
}

/// Moves a locally trivial cocycle to the normal form used in the vanishing argument.
///
/// The restriction to `<ρ, τ_L>` is trivialised by subtracting a coboundary; the
/// restrictions to `<ρ, τ_U>` and `<ρ, δ>` must then be coboundaries of points on the
/// first axis, which forces the remaining shape. When the input is itself a
/// coboundary the output is the zero cocycle.
pub fn normalize(z: &Cocycle, profile: &ParameterProfile) -> Result<Normalized, CohomologyError> {
    if !z.is_cocycle() {
        return Err(CohomologyError::NotACocycle);
    }
    if !z.local_conditions()?.satisfied() {
        return Err(CohomologyError::NotLocallyTrivial);
    }
    let g = z.group();
    let m = g.modulus();
    let obstructed = |what: &str| CohomologyError::NormalizationObstructed(what.to_string());

    let r = common_witness(z, &[profile.rho, profile.tau_l])?
        .ok_or_else(|| obstructed("restriction to <rho, tau_L> is not a coboundary"))?;
    let mut shift = TorsionPoint::from_raw(m, r);
    let mut out = z.sub(&coboundary(g, &shift));

    common_witness(&out, &[profile.rho, profile.tau_u])?
        .ok_or_else(|| obstructed("restriction to <rho, tau_U> is not a coboundary"))?;
    common_witness(&out, &[profile.rho, profile.delta])?
        .ok_or_else(|| obstructed("restriction to <rho, delta> is not a coboundary"))?;

    if let Some(v) = out.coboundary_witness() {
        shift = TorsionPoint::from_raw(m, [m.add(shift.coords()[0], v.coords()[0]), m.add(shift.coords()[1], v.coords()[1])]);
        out = Cocycle::zero(g.clone());
    }

    let at = |x: &Mat2| out.raw(g.index_of(x).expect("checked above"));
    if at(&profile.tau_u) != [0, 0] || at(&profile.tau_l) != [0, 0] || at(&profile.rho) != [0, 0] {
        return Err(obstructed("generator values did not vanish"));
    }
    let zd = at(&profile.delta);
    if zd[1] != 0 || m.val(zd[0]) < profile.m {
        return Err(obstructed("value at delta is not of the form (p^m beta, 0)"));
    }
    let beta = zd[0] / m.pow_p(profile.m);
    Ok(Normalized { cocycle: out, shift, beta })
}
