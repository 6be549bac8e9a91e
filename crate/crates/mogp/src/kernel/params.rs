//! Flat unconstrained parameter vectors for optimization.
//!
//! Positive parameters (scales, magnitudes, frequency means, noise) live on
//! the log scale; delays, phases and SM-LMC coefficients pass through
//! unchanged. Parameters tied by the variant's constraints occupy a single
//! shared coordinate.

use crate::error::{Error, Result};
use crate::kernel::{KernelSpec, SpectralComponent, Variant};

/// What a coordinate of the unconstrained vector controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Weight,
    FreqMean,
    FreqScale,
    Delay,
    Phase,
    Noise,
}

/// Mapping between a coordinate and its natural parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    /// Natural value is `exp(x)`.
    Log,
    /// Natural value is `x`.
    Identity,
}

/// Coordinate addressing for one `(variant, Q, M, N)` family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamLayout {
    variant: Variant,
    q: usize,
    m: usize,
    n: usize,
}

impl ParamLayout {
    pub fn new(variant: Variant, q: usize, m: usize, n: usize) -> Self {
        Self { variant, q, m, n }
    }

    pub fn for_spec(spec: &KernelSpec) -> Self {
        Self::new(
            spec.variant(),
            spec.num_components(),
            spec.num_channels(),
            spec.input_dims(),
        )
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Coordinates used by one component.
    fn block(&self) -> usize {
        let (m, n) = (self.m, self.n);
        match self.variant {
            // Per channel: weight, mu, sigma, theta, phi.
            Variant::Mosm => m * (3 * n + 2),
            // Per-channel weights and phases, shared mu and sigma.
            Variant::Csm => 2 * m + 2 * n,
            // Per-channel coefficients, shared mu and sigma.
            Variant::SmLmc | Variant::SmIgp => m + 2 * n,
        }
    }

    /// Total coordinate count including per-channel noise variances.
    pub fn len(&self) -> usize {
        self.q * self.block() + self.m
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn slot_weight(&self, q: usize, ch: usize) -> usize {
        match self.variant {
            Variant::Mosm => q * self.block() + ch * (3 * self.n + 2),
            _ => q * self.block() + ch,
        }
    }

    pub fn slot_mu(&self, q: usize, ch: usize, d: usize) -> usize {
        match self.variant {
            Variant::Mosm => q * self.block() + ch * (3 * self.n + 2) + 1 + d,
            Variant::Csm => q * self.block() + 2 * self.m + d,
            // Shared coordinate: the channel index is ignored.
            Variant::SmLmc | Variant::SmIgp => {
                let _ = ch;
                q * self.block() + self.m + d
            }
        }
    }

    pub fn slot_sigma(&self, q: usize, ch: usize, d: usize) -> usize {
        match self.variant {
            Variant::Mosm => q * self.block() + ch * (3 * self.n + 2) + 1 + self.n + d,
            Variant::Csm => q * self.block() + 2 * self.m + self.n + d,
            Variant::SmLmc | Variant::SmIgp => {
                let _ = ch;
                q * self.block() + self.m + self.n + d
            }
        }
    }

    pub fn slot_theta(&self, q: usize, ch: usize, d: usize) -> Option<usize> {
        match self.variant {
            Variant::Mosm => {
                Some(q * self.block() + ch * (3 * self.n + 2) + 1 + 2 * self.n + d)
            }
            _ => None,
        }
    }

    pub fn slot_phi(&self, q: usize, ch: usize) -> Option<usize> {
        match self.variant {
            Variant::Mosm => Some(q * self.block() + ch * (3 * self.n + 2) + 1 + 3 * self.n),
            Variant::Csm => Some(q * self.block() + self.m + ch),
            _ => None,
        }
    }

    pub fn slot_noise(&self, ch: usize) -> usize {
        self.q * self.block() + ch
    }

    /// Scale of each coordinate.
    pub fn scale(&self, slot: usize) -> Scale {
        match self.kind(slot).0 {
            ParamKind::Delay | ParamKind::Phase => Scale::Identity,
            ParamKind::Weight if self.variant.signed_weights() => Scale::Identity,
            _ => Scale::Log,
        }
    }

    /// Kind and (component, channel-or-0, dim) address of a coordinate.
    pub fn kind(&self, slot: usize) -> (ParamKind, usize, usize, usize) {
        let block = self.block();
        if slot >= self.q * block {
            return (ParamKind::Noise, 0, slot - self.q * block, 0);
        }
        let q = slot / block;
        let r = slot % block;
        let (m, n) = (self.m, self.n);
        match self.variant {
            Variant::Mosm => {
                let per = 3 * n + 2;
                let ch = r / per;
                let o = r % per;
                if o == 0 {
                    (ParamKind::Weight, q, ch, 0)
                } else if o < 1 + n {
                    (ParamKind::FreqMean, q, ch, o - 1)
                } else if o < 1 + 2 * n {
                    (ParamKind::FreqScale, q, ch, o - 1 - n)
                } else if o < 1 + 3 * n {
                    (ParamKind::Delay, q, ch, o - 1 - 2 * n)
                } else {
                    (ParamKind::Phase, q, ch, 0)
                }
            }
            Variant::Csm => {
                if r < m {
                    (ParamKind::Weight, q, r, 0)
                } else if r < 2 * m {
                    (ParamKind::Phase, q, r - m, 0)
                } else if r < 2 * m + n {
                    (ParamKind::FreqMean, q, 0, r - 2 * m)
                } else {
                    (ParamKind::FreqScale, q, 0, r - 2 * m - n)
                }
            }
            Variant::SmLmc | Variant::SmIgp => {
                if r < m {
                    (ParamKind::Weight, q, r, 0)
                } else if r < m + n {
                    (ParamKind::FreqMean, q, 0, r - m)
                } else {
                    (ParamKind::FreqScale, q, 0, r - m - n)
                }
            }
        }
    }

    /// Multiplier `d(natural)/d(unconstrained)` per coordinate at `x`.
    pub fn chain_factors(&self, x: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|s| match self.scale(s) {
                Scale::Log => x[s].exp(),
                Scale::Identity => 1.0,
            })
            .collect()
    }
}

/// Maps a spec and noise vector to the unconstrained coordinate vector.
pub fn to_unconstrained(spec: &KernelSpec, noise: &[f64]) -> Result<Vec<f64>> {
    let layout = ParamLayout::for_spec(spec);
    if noise.len() != spec.num_channels() {
        return Err(Error::DimensionMismatch(format!(
            "noise vector has length {}, expected M={}",
            noise.len(),
            spec.num_channels()
        )));
    }
    let mut x = vec![0.0; layout.len()];
    let log_pos = |v: f64, what: &str| -> Result<f64> {
        if v > 0.0 && v.is_finite() {
            Ok(v.ln())
        } else {
            Err(Error::InvalidParameter(format!(
                "{what} must be strictly positive to map to the unconstrained scale, got {v}"
            )))
        }
    };

    for (q, comp) in spec.components().iter().enumerate() {
        for ch in 0..spec.num_channels() {
            let w = comp.weights[ch];
            x[layout.slot_weight(q, ch)] = if spec.variant().signed_weights() {
                w
            } else {
                log_pos(w, "weight")?
            };
            if let Some(slot) = layout.slot_phi(q, ch) {
                x[slot] = comp.phi[ch];
            }
            for d in 0..spec.input_dims() {
                x[layout.slot_mu(q, ch, d)] = log_pos(comp.mu[ch][d], "frequency mean")?;
                x[layout.slot_sigma(q, ch, d)] = log_pos(comp.sigma[ch][d], "frequency scale")?;
                if let Some(slot) = layout.slot_theta(q, ch, d) {
                    x[slot] = comp.theta[ch][d];
                }
            }
        }
    }
    for ch in 0..spec.num_channels() {
        x[layout.slot_noise(ch)] = log_pos(noise[ch], "noise variance")?;
    }
    Ok(x)
}

/// Rebuilds the spec and noise vector from unconstrained coordinates.
pub fn from_unconstrained(layout: &ParamLayout, x: &[f64]) -> Result<(KernelSpec, Vec<f64>)> {
    if x.len() != layout.len() {
        return Err(Error::DimensionMismatch(format!(
            "parameter vector has length {}, expected {}",
            x.len(),
            layout.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "unconstrained parameter vector contains non-finite entries".into(),
        ));
    }
    let (m, n) = (layout.m, layout.n);
    let mut components = Vec::with_capacity(layout.q);
    for q in 0..layout.q {
        let mut comp = SpectralComponent::neutral(m, n);
        for ch in 0..m {
            let xw = x[layout.slot_weight(q, ch)];
            comp.weights[ch] = if layout.variant.signed_weights() {
                xw
            } else {
                xw.exp()
            };
            comp.phi[ch] = layout.slot_phi(q, ch).map_or(0.0, |s| x[s]);
            for d in 0..n {
                comp.mu[ch][d] = x[layout.slot_mu(q, ch, d)].exp();
                comp.sigma[ch][d] = x[layout.slot_sigma(q, ch, d)].exp();
                comp.theta[ch][d] = layout.slot_theta(q, ch, d).map_or(0.0, |s| x[s]);
            }
        }
        components.push(comp);
    }
    let spec = KernelSpec::new(layout.variant, m, n, components)?;
    let noise = (0..m).map(|ch| x[layout.slot_noise(ch)].exp()).collect();
    Ok((spec, noise))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mosm_spec() -> KernelSpec {
        let comp = SpectralComponent {
            weights: vec![1.2, 0.7],
            mu: vec![vec![0.1], vec![0.25]],
            sigma: vec![vec![0.02], vec![0.05]],
            theta: vec![vec![1.5], vec![-2.0]],
            phi: vec![0.3, -0.6],
        };
        KernelSpec::new(Variant::Mosm, 2, 1, vec![comp]).unwrap()
    }

    #[test]
    fn csm_parameter_count_matches_tie_structure() {
        // Q=2, M=3, N=1: 2*(3 weights + 3 phases + 1 mu + 1 sigma) + 3 noise.
        let layout = ParamLayout::new(Variant::Csm, 2, 3, 1);
        assert_eq!(layout.len(), 19);
    }

    #[test]
    fn mosm_parameter_count() {
        let layout = ParamLayout::new(Variant::Mosm, 3, 4, 1);
        assert_eq!(layout.len(), 3 * 4 * 5 + 4);
    }

    #[test]
    fn smigp_parameter_count() {
        let layout = ParamLayout::new(Variant::SmIgp, 2, 3, 1);
        assert_eq!(layout.len(), 2 * (3 + 2) + 3);
    }

    #[test]
    fn round_trip_is_identity() {
        let spec = mosm_spec();
        let noise = vec![0.01, 0.4];
        let x = to_unconstrained(&spec, &noise).unwrap();
        let layout = ParamLayout::for_spec(&spec);
        let (spec2, noise2) = from_unconstrained(&layout, &x).unwrap();
        for (a, b) in spec
            .components()
            .iter()
            .zip(spec2.components())
        {
            for ch in 0..2 {
                assert!((a.weights[ch] - b.weights[ch]).abs() <= 1e-12 * a.weights[ch].abs());
                assert!((a.phi[ch] - b.phi[ch]).abs() <= 1e-12);
                assert!((a.mu[ch][0] - b.mu[ch][0]).abs() <= 1e-12 * a.mu[ch][0]);
                assert!((a.sigma[ch][0] - b.sigma[ch][0]).abs() <= 1e-12 * a.sigma[ch][0]);
                assert!((a.theta[ch][0] - b.theta[ch][0]).abs() <= 1e-12);
            }
        }
        for ch in 0..2 {
            assert!((noise[ch] - noise2[ch]).abs() <= 1e-12 * noise[ch]);
        }
    }

    #[test]
    fn zero_vector_gives_unit_positive_parameters() {
        let layout = ParamLayout::new(Variant::Csm, 1, 2, 1);
        let x = vec![0.0; layout.len()];
        let (spec, noise) = from_unconstrained(&layout, &x).unwrap();
        let comp = &spec.components()[0];
        assert_eq!(comp.weights, vec![1.0, 1.0]);
        assert_eq!(comp.mu[0], vec![1.0]);
        assert_eq!(comp.sigma[1], vec![1.0]);
        assert_eq!(comp.phi, vec![0.0, 0.0]);
        assert_eq!(noise, vec![1.0, 1.0]);
    }

    #[test]
    fn tied_spec_round_trip_broadcasts_shared_values() {
        let comp = SpectralComponent {
            weights: vec![0.5, 2.0, 1.1],
            mu: vec![vec![0.2]; 3],
            sigma: vec![vec![0.03]; 3],
            theta: vec![vec![0.0]; 3],
            phi: vec![0.1, -0.4, 0.0],
        };
        let spec = KernelSpec::new(Variant::Csm, 3, 1, vec![comp]).unwrap();
        let noise = vec![0.1, 0.2, 0.3];
        let x = to_unconstrained(&spec, &noise).unwrap();
        assert_eq!(x.len(), 1 * (2 * 3 + 2) + 3);
        let (spec2, _) = from_unconstrained(&ParamLayout::for_spec(&spec), &x).unwrap();
        let c = &spec2.components()[0];
        assert_eq!(c.mu[0], c.mu[2]);
        assert_eq!(c.sigma[0], c.sigma[1]);
    }

    #[test]
    fn non_finite_vector_rejected() {
        let layout = ParamLayout::new(Variant::SmIgp, 1, 1, 1);
        let mut x = vec![0.0; layout.len()];
        x[0] = f64::NAN;
        assert!(from_unconstrained(&layout, &x).is_err());
    }

    #[test]
    fn kind_addresses_are_consistent() {
        for variant in [Variant::Mosm, Variant::Csm, Variant::SmLmc, Variant::SmIgp] {
            let layout = ParamLayout::new(variant, 2, 3, 2);
            for q in 0..2 {
                for ch in 0..3 {
                    let (k, qq, cc, _) = layout.kind(layout.slot_weight(q, ch));
                    assert_eq!((k, qq, cc), (ParamKind::Weight, q, ch));
                    if let Some(s) = layout.slot_phi(q, ch) {
                        let (k, qq, cc, _) = layout.kind(s);
                        assert_eq!((k, qq, cc), (ParamKind::Phase, q, ch));
                    }
                    for d in 0..2 {
                        let (k, qq, _, dd) = layout.kind(layout.slot_mu(q, ch, d));
                        assert_eq!((k, qq, dd), (ParamKind::FreqMean, q, d));
                        let (k, qq, _, dd) = layout.kind(layout.slot_sigma(q, ch, d));
                        assert_eq!((k, qq, dd), (ParamKind::FreqScale, q, d));
                        if let Some(s) = layout.slot_theta(q, ch, d) {
                            let (k, qq, cc, dd) = layout.kind(s);
                            assert_eq!((k, qq, cc, dd), (ParamKind::Delay, q, ch, d));
                        }
                    }
                }
            }
            for ch in 0..3 {
                let (k, _, cc, _) = layout.kind(layout.slot_noise(ch));
                assert_eq!((k, cc), (ParamKind::Noise, ch));
            }
        }
    }
}
