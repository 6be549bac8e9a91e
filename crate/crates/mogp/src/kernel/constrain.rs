//! Constraining a spec to a less expressive variant.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::kernel::{KernelSpec, SpectralComponent, Variant};

/// Applies the parameter ties of a more constrained variant.
///
/// Frequency means and scales are shared (channel-1 values), delays are
/// zeroed, phases are zeroed where the target has none, and magnitudes are
/// remapped so that a source spec which already satisfies the target's
/// ties produces an identical Gram matrix.
pub fn constrain(spec: &KernelSpec, target: Variant) -> Result<KernelSpec> {
    let source = spec.variant();
    if source == target {
        return Ok(spec.clone());
    }
    if target.rank() >= source.rank() {
        return Err(Error::UnsupportedConstraint {
            from: source.to_string(),
            to: target.to_string(),
        });
    }

    let m = spec.num_channels();
    let n = spec.input_dims();
    let mut components = Vec::with_capacity(spec.num_components());
    for comp in spec.components() {
        let shared_mu = comp.mu[0].clone();
        let shared_sigma = comp.sigma[0].clone();
        // Envelope normalization the MOSM magnitude rule attaches per pair:
        // (2*pi)^(N/2) * |sigma|^(1/2) with the shared scale.
        let envelope = TAU.powf(n as f64 / 2.0)
            * shared_sigma.iter().product::<f64>().sqrt();

        let weights: Vec<f64> = comp
            .weights
            .iter()
            .map(|&w| map_weight(w, envelope, source, target))
            .collect();
        let phi = if target.has_phases() {
            comp.phi.clone()
        } else {
            vec![0.0; m]
        };
        components.push(SpectralComponent {
            weights,
            mu: vec![shared_mu; m],
            sigma: vec![shared_sigma; m],
            theta: vec![vec![0.0; n]; m],
            phi,
        });
    }
    KernelSpec::new(target, m, n, components)
}

// Magnitude mapping between variant parametrizations. MOSM weights enter
// cross terms as w_i * w_j * envelope, CSM as sqrt(w_i * w_j), SM-LMC as
// a_i * a_j, SM-IGP diagonals as w_i.
fn map_weight(w: f64, envelope: f64, source: Variant, target: Variant) -> f64 {
    match (source, target) {
        (Variant::Mosm, Variant::Csm) | (Variant::Mosm, Variant::SmIgp) => w * w * envelope,
        (Variant::Mosm, Variant::SmLmc) => w * envelope.sqrt(),
        (Variant::Csm, Variant::SmLmc) => w.sqrt(),
        (Variant::Csm, Variant::SmIgp) => w,
        (Variant::SmLmc, Variant::SmIgp) => w * w,
        _ => unreachable!("restriction order already checked"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{gram_noiseless, kernel_eval};
    use approx::assert_abs_diff_eq;

    fn tied_mosm(phi: [f64; 2]) -> KernelSpec {
        let comp = SpectralComponent {
            weights: vec![0.9, 1.4],
            mu: vec![vec![0.12], vec![0.12]],
            sigma: vec![vec![0.04], vec![0.04]],
            theta: vec![vec![0.0], vec![0.0]],
            phi: phi.to_vec(),
        };
        KernelSpec::new(Variant::Mosm, 2, 1, vec![comp]).unwrap()
    }

    fn inputs() -> Vec<(usize, f64)> {
        (0..14).map(|k| (k % 2, k as f64 * 2.3 - 9.0)).collect()
    }

    #[test]
    fn same_variant_is_identity() {
        let spec = tied_mosm([0.0, 0.0]);
        assert_eq!(constrain(&spec, Variant::Mosm).unwrap(), spec);
    }

    #[test]
    fn upward_constraint_rejected() {
        let spec = constrain(&tied_mosm([0.0, 0.0]), Variant::SmIgp).unwrap();
        assert!(matches!(
            constrain(&spec, Variant::Mosm),
            Err(Error::UnsupportedConstraint { .. })
        ));
        assert!(constrain(&spec, Variant::Csm).is_err());
    }

    #[test]
    fn tied_mosm_to_csm_preserves_gram() {
        let spec = tied_mosm([0.4, -0.2]);
        let csm = constrain(&spec, Variant::Csm).unwrap();
        let a = gram_noiseless(&spec, &inputs()).unwrap();
        let b = gram_noiseless(&csm, &inputs()).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn tied_mosm_to_smlmc_preserves_gram() {
        let spec = tied_mosm([0.0, 0.0]);
        let lmc = constrain(&spec, Variant::SmLmc).unwrap();
        let a = gram_noiseless(&spec, &inputs()).unwrap();
        let b = gram_noiseless(&lmc, &inputs()).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn smigp_from_csm_zeroes_cross_blocks() {
        let spec = tied_mosm([0.4, -0.2]);
        let csm = constrain(&spec, Variant::Csm).unwrap();
        let igp = constrain(&csm, Variant::SmIgp).unwrap();
        for tau in [-3.0, 0.0, 1.5] {
            assert_eq!(kernel_eval(&igp, 0, 1, &[tau]).unwrap(), 0.0);
        }
        // Diagonals survive unchanged (phases cancel on the diagonal).
        for tau in [-3.0, 0.0, 1.5] {
            for ch in 0..2 {
                assert_abs_diff_eq!(
                    kernel_eval(&igp, ch, ch, &[tau]).unwrap(),
                    kernel_eval(&csm, ch, ch, &[tau]).unwrap(),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn csm_to_smlmc_drops_phases_keeps_diag() {
        let spec = tied_mosm([0.7, 0.1]);
        let csm = constrain(&spec, Variant::Csm).unwrap();
        let lmc = constrain(&csm, Variant::SmLmc).unwrap();
        for tau in [-2.0, 0.5, 4.0] {
            for ch in 0..2 {
                assert_abs_diff_eq!(
                    kernel_eval(&lmc, ch, ch, &[tau]).unwrap(),
                    kernel_eval(&csm, ch, ch, &[tau]).unwrap(),
                    epsilon = 1e-12
                );
            }
        }
    }
}
