//! Spectral mixture kernels for multi-output GPs.
//!
//! One per-channel spectral parametrization covers four kernel variants:
//! the full multi-output spectral mixture (MOSM) plus its constrained
//! special cases (CSM, SM-LMC, SM-IGP). Cross-channel parameters are
//! derived from the per-channel ones by a product-of-spectral-densities
//! construction, which keeps every assembled Gram matrix positive
//! semidefinite.

mod constrain;
mod eval;
pub(crate) mod grad;
mod params;

pub use constrain::constrain;
pub use eval::{cross_params, gram, gram_noiseless, kernel_eval, CrossParams};
pub use params::{from_unconstrained, to_unconstrained, ParamKind, ParamLayout, Scale};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kernel variant tag. Ordering reflects expressiveness: every variant is a
/// constrained special case of the ones before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "MOSM")]
    Mosm,
    #[serde(rename = "CSM")]
    Csm,
    #[serde(rename = "SM-LMC")]
    SmLmc,
    #[serde(rename = "SM-IGP")]
    SmIgp,
}

impl Variant {
    /// Expressiveness rank used to decide which constraints are restrictions.
    pub(crate) fn rank(self) -> u8 {
        match self {
            Variant::Mosm => 3,
            Variant::Csm => 2,
            Variant::SmLmc => 1,
            Variant::SmIgp => 0,
        }
    }

    /// Frequency means and scales are shared across channels.
    pub fn shares_frequencies(self) -> bool {
        self != Variant::Mosm
    }

    /// Per-channel delays are free parameters.
    pub fn has_delays(self) -> bool {
        self == Variant::Mosm
    }

    /// Per-channel phases are free parameters.
    pub fn has_phases(self) -> bool {
        matches!(self, Variant::Mosm | Variant::Csm)
    }

    /// Weights are sign-free mixing coefficients rather than magnitudes.
    pub fn signed_weights(self) -> bool {
        self == Variant::SmLmc
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Mosm => "MOSM",
            Variant::Csm => "CSM",
            Variant::SmLmc => "SM-LMC",
            Variant::SmIgp => "SM-IGP",
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "mosm" => Ok(Variant::Mosm),
            "csm" => Ok(Variant::Csm),
            "smlmc" => Ok(Variant::SmLmc),
            "smigp" => Ok(Variant::SmIgp),
            other => Err(Error::InvalidParameter(format!(
                "unknown kernel variant '{other}'"
            ))),
        }
    }
}

/// Per-channel spectral parameters of one mixture component.
///
/// All outer vectors have length `M`; the inner vectors of `mu`, `sigma`
/// and `theta` have length `N`. Frequencies are in cycles per day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralComponent {
    /// Magnitude weight per channel (sign-free for SM-LMC coefficients).
    #[serde(rename = "w")]
    pub weights: Vec<f64>,
    /// Frequency means per channel, cycles/day, nonnegative.
    pub mu: Vec<Vec<f64>>,
    /// Frequency scales per channel (diagonal), strictly positive.
    pub sigma: Vec<Vec<f64>>,
    /// Delays per channel, days.
    pub theta: Vec<Vec<f64>>,
    /// Phases per channel, radians.
    pub phi: Vec<f64>,
}

impl SpectralComponent {
    /// Component with every vector zeroed except unit weights and scales.
    pub fn neutral(m: usize, n: usize) -> Self {
        Self {
            weights: vec![1.0; m],
            mu: vec![vec![0.0; n]; m],
            sigma: vec![vec![1.0; n]; m],
            theta: vec![vec![0.0; n]; m],
            phi: vec![0.0; m],
        }
    }

    fn validate(&self, variant: Variant, m: usize, n: usize) -> Result<()> {
        let dims_ok = self.weights.len() == m
            && self.phi.len() == m
            && self.mu.len() == m
            && self.sigma.len() == m
            && self.theta.len() == m
            && self.mu.iter().all(|v| v.len() == n)
            && self.sigma.iter().all(|v| v.len() == n)
            && self.theta.iter().all(|v| v.len() == n);
        if !dims_ok {
            return Err(Error::DimensionMismatch(format!(
                "spectral component does not match M={m}, N={n}"
            )));
        }
        let finite = self.weights.iter().all(|v| v.is_finite())
            && self.phi.iter().all(|v| v.is_finite())
            && self
                .mu
                .iter()
                .chain(self.sigma.iter())
                .chain(self.theta.iter())
                .all(|v| v.iter().all(|x| x.is_finite()));
        if !finite {
            return Err(Error::InvalidParameter(
                "spectral component contains non-finite entries".into(),
            ));
        }
        for row in &self.sigma {
            for &s in row {
                if s <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "frequency scale must be strictly positive, got {s}"
                    )));
                }
            }
        }
        for row in &self.mu {
            for &f in row {
                if f < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "frequency mean must be nonnegative, got {f}"
                    )));
                }
            }
        }
        if !variant.signed_weights() {
            for &w in &self.weights {
                if w < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "{variant} weights must be nonnegative, got {w}"
                    )));
                }
            }
        }
        // Table 1 ties must hold exactly by construction.
        if variant.shares_frequencies() {
            for ch in 1..m {
                if self.mu[ch] != self.mu[0] || self.sigma[ch] != self.sigma[0] {
                    return Err(Error::InvalidParameter(format!(
                        "{variant} requires frequency means and scales shared across channels"
                    )));
                }
            }
        }
        if !variant.has_delays() && self.theta.iter().any(|v| v.iter().any(|&x| x != 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "{variant} requires all delays fixed to zero"
            )));
        }
        if !variant.has_phases() && self.phi.iter().any(|&x| x != 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{variant} requires all phases fixed to zero"
            )));
        }
        Ok(())
    }
}

/// A kernel variant plus its `Q` spectral mixture components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    variant: Variant,
    #[serde(rename = "Q")]
    q: usize,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    components: Vec<SpectralComponent>,
}

impl KernelSpec {
    pub fn new(
        variant: Variant,
        m: usize,
        n: usize,
        components: Vec<SpectralComponent>,
    ) -> Result<Self> {
        if m == 0 || n == 0 || components.is_empty() {
            return Err(Error::InvalidParameter(
                "kernel spec needs M >= 1, N >= 1 and at least one component".into(),
            ));
        }
        for comp in &components {
            comp.validate(variant, m, n)?;
        }
        Ok(Self {
            variant,
            q: components.len(),
            m,
            n,
            components,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn num_components(&self) -> usize {
        self.q
    }

    pub fn num_channels(&self) -> usize {
        self.m
    }

    pub fn input_dims(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[SpectralComponent] {
        &self.components
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: KernelSpec = serde_json::from_str(text)?;
        KernelSpec::new(spec.variant, spec.m, spec.n, spec.components)
    }
}
