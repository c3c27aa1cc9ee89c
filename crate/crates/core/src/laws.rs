//! Closed-form interface constitutive algebra: mode-mixity angles,
//! fracture-energy laws, the mode-II trigger of the plasticity model and
//! the fits of the brittle model to it.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AlphaLaw, AprimParams, FitScenario, InterfaceLaw, InterfaceModel};

/// Jumps below this magnitude carry no mode information.
pub const MIXITY_EPS: f64 = 1e-15;

/// Distance kept from the tangent singularity when evaluating Hutchinson-Suo.
pub const HS_CLAMP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixityAngles {
    /// Energetic angle.
    pub psi_g: f64,
    /// Kinematic angle.
    pub psi_u: f64,
    /// Traction angle.
    pub psi_sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Mixity {
    Defined(MixityAngles),
    /// Both jump components vanish.
    Undefined,
}

impl Mixity {
    pub fn psi_g(&self) -> Option<f64> {
        match self {
            Mixity::Defined(a) => Some(a.psi_g),
            Mixity::Undefined => None,
        }
    }
}

pub fn mixity(jump_n: f64, jump_t: f64, kappa_n: f64, kappa_t: f64) -> Mixity {
    let gt = jump_t.abs();
    if jump_n.abs() < MIXITY_EPS && gt < MIXITY_EPS {
        return Mixity::Undefined;
    }
    if jump_n <= 0.0 {
        // Shear against closed contact.
        return Mixity::Defined(MixityAngles { psi_g: FRAC_PI_2, psi_u: FRAC_PI_2, psi_sigma: FRAC_PI_2 });
    }
    let r = gt / jump_n;
    Mixity::Defined(MixityAngles {
        psi_g: ((kappa_t / kappa_n).sqrt() * r).atan(),
        psi_u: r.atan(),
        psi_sigma: (kappa_t / kappa_n * r).atan(),
    })
}

/// Returns the fracture energy and whether the tangent argument was clamped.
pub fn alpha_hutchinson_suo(psi_g: f64, a_i: f64, lambda: f64) -> (f64, bool) {
    let mut arg = (1.0 - lambda) * psi_g;
    let limit = FRAC_PI_2 - HS_CLAMP;
    let clamped = arg >= limit;
    if clamped {
        arg = limit;
    }
    let t = arg.tan();
    (a_i * (1.0 + t * t), clamped)
}

/// Mode-II tangential strength `sqrt(2 kappa_t a_I)`.
pub fn sigma_t_crit(kappa_t: f64, a_i: f64) -> f64 {
    (2.0 * kappa_t * a_i).sqrt()
}

/// Admissible yield stresses: `sigma_crit / 2 < sigma_y <= sigma_crit`.
pub fn check_yield_window(a_i: f64, kappa_t: f64, sigma_yield: f64) -> Result<()> {
    let crit = sigma_t_crit(kappa_t, a_i);
    if !(sigma_yield > 0.5 * crit && sigma_yield <= crit) {
        return Err(Error::YieldWindow(format!(
            "sigma_t_yield = {sigma_yield} Pa not in ({}, {crit}] Pa (ratio {})",
            0.5 * crit,
            sigma_yield / crit
        )));
    }
    Ok(())
}

/// Knee angle below which the plasticity-derived law is mode-insensitive.
pub fn plasticity_knee(a_i: f64, kappa_t: f64, sigma_yield: f64) -> f64 {
    (sigma_yield / sigma_t_crit(kappa_t, a_i)).min(1.0).asin()
}

pub fn alpha_plasticity_derived(psi_g: f64, a_i: f64, kappa_t: f64, kappa_h: f64, sigma_yield: f64) -> Result<f64> {
    check_yield_window(a_i, kappa_t, sigma_yield)?;
    if psi_g <= plasticity_knee(a_i, kappa_t, sigma_yield) {
        return Ok(a_i);
    }
    Ok(plasticity_branch(psi_g, a_i, kappa_t, kappa_h, sigma_yield))
}

/// Mode-dependent branch, written with `cos`/`sin` so that it stays finite at
/// a right angle; equal to `(2 a_I (kt + kH) - sy^2)(1 + tan^2)/(2(kt + kH + kH tan^2))`.
pub fn plasticity_branch(psi_g: f64, a_i: f64, kappa_t: f64, kappa_h: f64, sigma_yield: f64) -> f64 {
    let (s, c) = psi_g.sin_cos();
    let num = 2.0 * a_i * (kappa_t + kappa_h) - sigma_yield * sigma_yield;
    num / (2.0 * ((kappa_t + kappa_h) * c * c + kappa_h * s * s))
}

/// Energy `alpha_PLAST = alpha - a_I` dissipated by the non-adhesive part.
pub fn alpha_plastic_part(law: &AlphaLaw, psi_g: f64) -> Result<f64> {
    Ok(law.alpha(psi_g)? - law.a_i())
}

/// Fracture energy for a given jump; zero jumps fall back to `a_I`.
pub fn alpha_for_jump(law: &AlphaLaw, jump_n: f64, jump_t: f64, kappa_n: f64, kappa_t: f64) -> Result<(f64, Mixity)> {
    let mix = mixity(jump_n, jump_t, kappa_n, kappa_t);
    let alpha = match mix.psi_g() {
        Some(psi) => law.alpha(psi)?,
        None => law.a_i(),
    };
    Ok((alpha, mix))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeTwoTrigger {
    pub u_ii: f64,
    pub pi_ii: f64,
    pub a_ii: f64,
    pub sigma_t_crit: f64,
    pub sigma_n_crit: f64,
    pub ratio: f64,
}

impl ModeTwoTrigger {
    /// Split of `a_II` into adhesive, plastic-dissipated and hardening-stored parts.
    pub fn decomposition(&self, a_i: f64, sigma_yield: f64, kappa_h: f64) -> (f64, f64, f64) {
        (a_i, sigma_yield * self.pi_ii, 0.5 * kappa_h * self.pi_ii * self.pi_ii)
    }
}

pub fn mode_two_trigger(kappa_n: f64, kappa_t: f64, params: &AprimParams) -> Result<ModeTwoTrigger> {
    let a_i = params.a_i();
    let (kh, sy) = (params.kappa_h, params.sigma_yield);
    check_yield_window(a_i, kappa_t, sy)?;
    if !(kh > 0.0) {
        return Err(Error::InvalidParameter(format!("kappa_H must be positive, got {kh}")));
    }
    let sc = sigma_t_crit(kappa_t, a_i);
    let pi_ii = (sc - sy) / kh;
    let u_ii = (sc * (kappa_t + kh) - sy * kappa_t) / (kappa_t * kh);
    let a_ii = a_i + sy * pi_ii + 0.5 * kh * pi_ii * pi_ii;
    Ok(ModeTwoTrigger {
        u_ii,
        pi_ii,
        a_ii,
        sigma_t_crit: sc,
        sigma_n_crit: (2.0 * kappa_n * a_i).sqrt(),
        ratio: sensitivity_ratio(a_i, kappa_t, kh, sy),
    })
}

/// `a_II / a_I = 1 + kt/kH - sy^2 / (2 kH a_I)`.
pub fn sensitivity_ratio(a_i: f64, kappa_t: f64, kappa_h: f64, sigma_yield: f64) -> f64 {
    1.0 + kappa_t / kappa_h - sigma_yield * sigma_yield / (2.0 * kappa_h * a_i)
}

/// Brittle-interface law matched to a plasticity interface in mode I and at
/// full mode-II rupture.
pub fn fit_lebim_to_aprim(aprim: &InterfaceLaw, scenario: FitScenario) -> Result<InterfaceLaw> {
    let params = match &aprim.model {
        InterfaceModel::Aprim { params } => params,
        InterfaceModel::Lebim { .. } => return Err(Error::WrongModel { expected: "plasticity" }),
    };
    let trigger = mode_two_trigger(aprim.kappa_n, aprim.kappa_t, params)?;
    let alpha = AlphaLaw::PlasticityDerived {
        a_i: params.a_i(),
        kappa_t: aprim.kappa_t,
        kappa_h: params.kappa_h,
        sigma_yield: params.sigma_yield,
    };
    let kappa_t = match scenario {
        FitScenario::SameStiffness => aprim.kappa_t,
        FitScenario::SameRuptureSlip => 2.0 * trigger.a_ii / (trigger.u_ii * trigger.u_ii),
    };
    Ok(InterfaceLaw::lebim(aprim.kappa_n, kappa_t, alpha))
}
