//! Analytic kernel-entry derivatives with respect to the natural
//! parameters, accumulated into a flat gradient indexed by [`ParamLayout`]
//! slots. Parameters tied across channels receive summed contributions
//! through their shared slot, which realizes the chain rule for the tie.

use std::f64::consts::TAU;

use crate::kernel::{KernelSpec, ParamLayout, Variant};

/// Adds `weight * d k_ij(tau) / d(param)` into `grad` for every natural
/// parameter the `(i, j)` entry depends on.
pub(crate) fn accumulate_entry_grad(
    spec: &KernelSpec,
    layout: &ParamLayout,
    i: usize,
    j: usize,
    tau: &[f64],
    weight: f64,
    grad: &mut [f64],
) {
    let n = spec.input_dims();
    match spec.variant() {
        Variant::Mosm => {
            for (q, comp) in spec.components().iter().enumerate() {
                let (wi, wj) = (comp.weights[i], comp.weights[j]);
                let (si, sj) = (&comp.sigma[i], &comp.sigma[j]);
                let (mi, mj) = (&comp.mu[i], &comp.mu[j]);

                let mut envelope = 1.0; // prod sqrt(sigma_ij)
                let mut damp = 0.0;
                let mut eexp = 0.0;
                let mut carg = comp.phi[i] - comp.phi[j];
                for d in 0..n {
                    let total = si[d] + sj[d];
                    let p = 2.0 * si[d] * sj[d] / total;
                    envelope *= p.sqrt();
                    let delta = mi[d] - mj[d];
                    damp += TAU * TAU * delta * delta / total;
                    let u = tau[d] + comp.theta[i][d] - comp.theta[j][d];
                    eexp += -0.5 * p * u * u;
                    carg += TAU * (si[d] * mj[d] + sj[d] * mi[d]) / total * u;
                }
                let shape = TAU.powf(n as f64 / 2.0) * envelope * (-0.25 * damp).exp();
                let env = eexp.exp();
                let (c, s) = (carg.cos(), carg.sin());
                let k = wi * wj * shape * env * c;
                let aes = wi * wj * shape * env * s;

                grad[layout.slot_weight(q, i)] += weight * wj * shape * env * c;
                grad[layout.slot_weight(q, j)] += weight * wi * shape * env * c;
                if let Some(slot) = layout.slot_phi(q, i) {
                    grad[slot] += weight * -aes;
                }
                if let Some(slot) = layout.slot_phi(q, j) {
                    grad[slot] += weight * aes;
                }
                for d in 0..n {
                    let total = si[d] + sj[d];
                    let p = 2.0 * si[d] * sj[d] / total;
                    let delta = mi[d] - mj[d];
                    let u = tau[d] + comp.theta[i][d] - comp.theta[j][d];
                    let m_d = (si[d] * mj[d] + sj[d] * mi[d]) / total;

                    let dtheta = k * -p * u - aes * TAU * m_d;
                    if let Some(slot) = layout.slot_theta(q, i, d) {
                        grad[slot] += weight * dtheta;
                    }
                    if let Some(slot) = layout.slot_theta(q, j, d) {
                        grad[slot] += weight * -dtheta;
                    }

                    let damp_i = -0.5 * TAU * TAU * delta / total * k;
                    grad[layout.slot_mu(q, i, d)] +=
                        weight * (damp_i - aes * TAU * u * sj[d] / total);
                    grad[layout.slot_mu(q, j, d)] +=
                        weight * (-damp_i - aes * TAU * u * si[d] / total);

                    let tt = total * total;
                    let shared = 0.25 * TAU * TAU * delta * delta / tt;
                    let dsig_i = k * (sj[d] / (2.0 * si[d] * total) + shared
                        - u * u * sj[d] * sj[d] / tt)
                        + aes * TAU * u * sj[d] * delta / tt;
                    let dsig_j = k * (si[d] / (2.0 * sj[d] * total) + shared
                        - u * u * si[d] * si[d] / tt)
                        - aes * TAU * u * si[d] * delta / tt;
                    grad[layout.slot_sigma(q, i, d)] += weight * dsig_i;
                    grad[layout.slot_sigma(q, j, d)] += weight * dsig_j;
                }
            }
        }
        Variant::Csm => {
            for (q, comp) in spec.components().iter().enumerate() {
                let (wi, wj) = (comp.weights[i], comp.weights[j]);
                let a = (wi * wj).sqrt();
                let mut eexp = 0.0;
                let mut carg = comp.phi[i] - comp.phi[j];
                for d in 0..n {
                    eexp += -0.5 * comp.sigma[0][d] * tau[d] * tau[d];
                    carg += TAU * comp.mu[0][d] * tau[d];
                }
                let env = eexp.exp();
                let (c, s) = (carg.cos(), carg.sin());
                let k = a * env * c;
                let aes = a * env * s;

                grad[layout.slot_weight(q, i)] += weight * 0.5 * (wj / wi).sqrt() * env * c;
                grad[layout.slot_weight(q, j)] += weight * 0.5 * (wi / wj).sqrt() * env * c;
                if let Some(slot) = layout.slot_phi(q, i) {
                    grad[slot] += weight * -aes;
                }
                if let Some(slot) = layout.slot_phi(q, j) {
                    grad[slot] += weight * aes;
                }
                for d in 0..n {
                    // Shared coordinates: scatter exactly once per entry.
                    grad[layout.slot_mu(q, 0, d)] += weight * -aes * TAU * tau[d];
                    grad[layout.slot_sigma(q, 0, d)] += weight * -0.5 * tau[d] * tau[d] * k;
                }
            }
        }
        Variant::SmLmc => {
            for (q, comp) in spec.components().iter().enumerate() {
                let (ai, aj) = (comp.weights[i], comp.weights[j]);
                let mut eexp = 0.0;
                let mut carg = 0.0;
                for d in 0..n {
                    eexp += -0.5 * comp.sigma[0][d] * tau[d] * tau[d];
                    carg += TAU * comp.mu[0][d] * tau[d];
                }
                let env = eexp.exp();
                let (c, s) = (carg.cos(), carg.sin());
                let k = ai * aj * env * c;
                let aes = ai * aj * env * s;

                grad[layout.slot_weight(q, i)] += weight * aj * env * c;
                grad[layout.slot_weight(q, j)] += weight * ai * env * c;
                for d in 0..n {
                    grad[layout.slot_mu(q, 0, d)] += weight * -aes * TAU * tau[d];
                    grad[layout.slot_sigma(q, 0, d)] += weight * -0.5 * tau[d] * tau[d] * k;
                }
            }
        }
        Variant::SmIgp => {
            if i != j {
                return;
            }
            for (q, comp) in spec.components().iter().enumerate() {
                let w = comp.weights[i];
                let mut eexp = 0.0;
                let mut carg = 0.0;
                for d in 0..n {
                    eexp += -0.5 * comp.sigma[0][d] * tau[d] * tau[d];
                    carg += TAU * comp.mu[0][d] * tau[d];
                }
                let env = eexp.exp();
                let (c, s) = (carg.cos(), carg.sin());
                let k = w * env * c;
                let aes = w * env * s;

                grad[layout.slot_weight(q, i)] += weight * env * c;
                for d in 0..n {
                    grad[layout.slot_mu(q, 0, d)] += weight * -aes * TAU * tau[d];
                    grad[layout.slot_sigma(q, 0, d)] += weight * -0.5 * tau[d] * tau[d] * k;
                }
            }
        }
    }
}
