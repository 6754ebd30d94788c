use super::ModelError;
use serde::{Deserialize, Serialize};

/// Homogeneous dimension `Q` and surface measure `sigma` of the unit quasi-sphere.
///
/// A radial integral over the group is `sigma * int_0^inf f(r) r^(Q-1) dr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSetting", into = "RawSetting")]
pub struct HomogeneousSetting {
    q: f64,
    sigma: f64,
}

#[derive(Serialize, Deserialize)]
struct RawSetting {
    #[serde(rename = "Q")]
    q: f64,
    #[serde(default = "one")]
    sigma: f64,
}

fn one() -> f64 {
    1.0
}

impl TryFrom<RawSetting> for HomogeneousSetting {
    type Error = ModelError;
    fn try_from(r: RawSetting) -> Result<Self, Self::Error> {
        HomogeneousSetting::with_sigma(r.q, r.sigma)
    }
}

impl From<HomogeneousSetting> for RawSetting {
    fn from(s: HomogeneousSetting) -> Self {
        RawSetting { q: s.q, sigma: s.sigma }
    }
}

impl HomogeneousSetting {
    pub fn new(q: f64) -> Result<Self, ModelError> {
        Self::with_sigma(q, 1.0)
    }

    pub fn with_sigma(q: f64, sigma: f64) -> Result<Self, ModelError> {
        if q > 1.0 && q.is_finite() && sigma > 0.0 && sigma.is_finite() {
            Ok(Self { q, sigma })
        } else {
            Err(ModelError::InvalidSetting { q, sigma })
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}
