//! Cross-spectral parameter construction and kernel evaluation.

use std::f64::consts::TAU;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernel::{KernelSpec, Variant};

/// Cross-spectral parameters for one (component, channel pair).
#[derive(Debug, Clone, PartialEq)]
pub struct CrossParams {
    /// Magnitude.
    pub alpha: f64,
    /// Frequency mean, cycles/day, length `N`.
    pub mu: Vec<f64>,
    /// Frequency scale (diagonal), length `N`, strictly positive.
    pub sigma: Vec<f64>,
    /// Delay, days, length `N`.
    pub theta: Vec<f64>,
    /// Phase, radians.
    pub phi: f64,
}

/// Derives the cross-spectral parameters of component `q` between channels
/// `i` and `j`.
///
/// For MOSM the scale and mean mix the per-channel values,
/// `sigma_ij = 2 sigma_i sigma_j / (sigma_i + sigma_j)` and
/// `mu_ij = (sigma_i mu_j + sigma_j mu_i) / (sigma_i + sigma_j)`, and the
/// magnitude carries the Gaussian overlap of the two spectral densities.
/// The overlap is evaluated on the angular scale, matching the angular
/// frequency convention used inside [`kernel_eval`]; this is what makes the
/// construction a product of spectral densities and hence positive
/// semidefinite. Constrained variants use their own magnitude rules with
/// channel-shared means and scales.
pub fn cross_params(spec: &KernelSpec, q: usize, i: usize, j: usize) -> Result<CrossParams> {
    let m = spec.num_channels();
    if i >= m || j >= m {
        return Err(Error::DimensionMismatch(format!(
            "channel index out of range: ({i}, {j}) with M={m}"
        )));
    }
    if q >= spec.num_components() {
        return Err(Error::DimensionMismatch(format!(
            "component index {q} out of range (Q={})",
            spec.num_components()
        )));
    }
    let comp = &spec.components()[q];
    let n = spec.input_dims();

    match spec.variant() {
        Variant::Mosm => {
            let (si, sj) = (&comp.sigma[i], &comp.sigma[j]);
            let (mi, mj) = (&comp.mu[i], &comp.mu[j]);
            let mut sigma = Vec::with_capacity(n);
            let mut mu = Vec::with_capacity(n);
            let mut det_sigma = 1.0;
            let mut damp = 0.0;
            for d in 0..n {
                let total = si[d] + sj[d];
                let cross_scale = 2.0 * si[d] * sj[d] / total;
                sigma.push(cross_scale);
                det_sigma *= cross_scale;
                mu.push((si[d] * mj[d] + sj[d] * mi[d]) / total);
                // Angular-scale frequency separation.
                let delta = TAU * (mi[d] - mj[d]);
                damp += delta * delta / total;
            }
            let alpha = comp.weights[i]
                * comp.weights[j]
                * TAU.powf(n as f64 / 2.0)
                * det_sigma.sqrt()
                * (-0.25 * damp).exp();
            let theta = (0..n).map(|d| comp.theta[i][d] - comp.theta[j][d]).collect();
            Ok(CrossParams {
                alpha,
                mu,
                sigma,
                theta,
                phi: comp.phi[i] - comp.phi[j],
            })
        }
        Variant::Csm => Ok(CrossParams {
            alpha: (comp.weights[i] * comp.weights[j]).sqrt(),
            mu: comp.mu[0].clone(),
            sigma: comp.sigma[0].clone(),
            theta: vec![0.0; n],
            phi: comp.phi[i] - comp.phi[j],
        }),
        Variant::SmLmc => Ok(CrossParams {
            alpha: comp.weights[i] * comp.weights[j],
            mu: comp.mu[0].clone(),
            sigma: comp.sigma[0].clone(),
            theta: vec![0.0; n],
            phi: 0.0,
        }),
        Variant::SmIgp => Ok(CrossParams {
            alpha: if i == j { comp.weights[i] } else { 0.0 },
            mu: comp.mu[0].clone(),
            sigma: comp.sigma[0].clone(),
            theta: vec![0.0; n],
            phi: 0.0,
        }),
    }
}

/// One spectral-mixture term: a Gaussian lag envelope times a cosine with
/// the stored cycles/day mean converted to angular frequency.
pub(crate) fn term_value(cp: &CrossParams, tau: &[f64]) -> f64 {
    let mut quad = 0.0;
    let mut phase = cp.phi;
    for d in 0..tau.len() {
        let u = tau[d] + cp.theta[d];
        quad += cp.sigma[d] * u * u;
        phase += TAU * cp.mu[d] * u;
    }
    cp.alpha * (-0.5 * quad).exp() * phase.cos()
}

/// Evaluates `k_ij(tau)`, summing all `Q` cross terms.
pub fn kernel_eval(spec: &KernelSpec, i: usize, j: usize, tau: &[f64]) -> Result<f64> {
    if tau.len() != spec.input_dims() {
        return Err(Error::DimensionMismatch(format!(
            "lag vector has length {}, expected N={}",
            tau.len(),
            spec.input_dims()
        )));
    }
    if tau.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite lag".into()));
    }
    let mut total = 0.0;
    for q in 0..spec.num_components() {
        total += term_value(&cross_params(spec, q, i, j)?, tau);
    }
    Ok(total)
}

/// All cross parameters of a spec, indexed `[q][i * M + j]`.
pub(crate) fn all_cross_params(spec: &KernelSpec) -> Result<Vec<Vec<CrossParams>>> {
    let m = spec.num_channels();
    let mut per_q = Vec::with_capacity(spec.num_components());
    for q in 0..spec.num_components() {
        let mut flat = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                flat.push(cross_params(spec, q, i, j)?);
            }
        }
        per_q.push(flat);
    }
    Ok(per_q)
}

/// Assembles the symmetric Gram matrix over `(channel, t)` inputs, adding
/// per-channel noise variance on the diagonal. Requires `N = 1`.
pub fn gram(spec: &KernelSpec, inputs: &[(usize, f64)], noise: &[f64]) -> Result<DMatrix<f64>> {
    if spec.input_dims() != 1 {
        return Err(Error::DimensionMismatch(
            "gram assembly over (channel, t) inputs requires N = 1".into(),
        ));
    }
    if noise.len() != spec.num_channels() {
        return Err(Error::DimensionMismatch(format!(
            "noise vector has length {}, expected M={}",
            noise.len(),
            spec.num_channels()
        )));
    }
    if noise.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "noise variances must be finite and nonnegative".into(),
        ));
    }
    let m = spec.num_channels();
    for &(ch, t) in inputs {
        if ch >= m {
            return Err(Error::DimensionMismatch(format!(
                "input channel {ch} out of range (M={m})"
            )));
        }
        if !t.is_finite() {
            return Err(Error::InvalidParameter("non-finite input time".into()));
        }
    }

    let cps = all_cross_params(spec)?;
    let npts = inputs.len();
    let mut k = DMatrix::zeros(npts, npts);
    for a in 0..npts {
        let (ca, ta) = inputs[a];
        for b in a..npts {
            let (cb, tb) = inputs[b];
            let tau = [ta - tb];
            let mut val = 0.0;
            for per_q in &cps {
                val += term_value(&per_q[ca * m + cb], &tau);
            }
            if a == b {
                val += noise[ca];
            }
            k[(a, b)] = val;
            if a != b {
                // Mirror the upper triangle so symmetry is exact by fiat.
                k[(b, a)] = val;
            }
        }
    }
    Ok(k)
}

/// Gram matrix without observation noise.
pub fn gram_noiseless(spec: &KernelSpec, inputs: &[(usize, f64)]) -> Result<DMatrix<f64>> {
    gram(spec, inputs, &vec![0.0; spec.num_channels()])
}

/// Channel prior variance `k_ii(0)`.
pub fn prior_variance(spec: &KernelSpec, ch: usize) -> Result<f64> {
    kernel_eval(spec, ch, ch, &vec![0.0; spec.input_dims()])
}
