//! The catalog of observation transforms Z(t) = Phi(t, X(t)).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::{PathMeta, SamplePath};

/// Transform family, as exercised in the benchmark study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiTag {
    Identity,
    Square,
    Exp,
    /// `sin(t) X(t)`, t in radians on [0, 1].
    SinTTimesX,
    /// `sin(t)^2 + X(t)^2`.
    Sin2PlusX2,
    /// `W(t) X(t)` with an independent Brownian motion W.
    WTimesX,
    /// `W(t)^2 + X(t)^2`.
    W2PlusX2,
}

impl PhiTag {
    pub const ALL: [PhiTag; 7] = [
        PhiTag::Identity,
        PhiTag::Square,
        PhiTag::Exp,
        PhiTag::SinTTimesX,
        PhiTag::Sin2PlusX2,
        PhiTag::WTimesX,
        PhiTag::W2PlusX2,
    ];

    pub fn needs_aux(self) -> bool {
        matches!(self, PhiTag::WTimesX | PhiTag::W2PlusX2)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PhiTag::Identity => "identity",
            PhiTag::Square => "square",
            PhiTag::Exp => "exp",
            PhiTag::SinTTimesX => "sin_t_times_x",
            PhiTag::Sin2PlusX2 => "sin2_plus_x2",
            PhiTag::WTimesX => "w_times_x",
            PhiTag::W2PlusX2 => "w2_plus_x2",
        }
    }
}

impl std::str::FromStr for PhiTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PhiTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown phi form `{s}`")))
    }
}

/// A transform instance; W-driven forms carry the seed of their independent
/// Brownian path, the others must not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiForm {
    pub tag: PhiTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux_seed: Option<u64>,
}

impl PhiForm {
    pub fn new(tag: PhiTag) -> Result<Self> {
        let form = PhiForm {
            tag,
            aux_seed: None,
        };
        form.validate()?;
        Ok(form)
    }

    pub fn with_aux(tag: PhiTag, aux_seed: u64) -> Result<Self> {
        let form = PhiForm {
            tag,
            aux_seed: Some(aux_seed),
        };
        form.validate()?;
        Ok(form)
    }

    pub fn validate(&self) -> Result<()> {
        match (self.tag.needs_aux(), self.aux_seed) {
            (true, None) => Err(Error::invalid(format!(
                "form {} requires aux_seed for its independent W path",
                self.tag.as_str()
            ))),
            (false, Some(_)) => Err(Error::invalid(format!(
                "form {} must not carry an aux_seed",
                self.tag.as_str()
            ))),
            _ => Ok(()),
        }
    }
}

/// Applies the transform elementwise on the same grid.
pub fn apply_phi(x: &SamplePath, form: &PhiForm) -> Result<SamplePath> {
    form.validate()?;
    let n = x.grid_n();
    let w = if form.tag.needs_aux() {
        let aux = form.aux_seed.unwrap();
        if x.meta.seed == Some(aux) {
            return Err(Error::invalid(
                "aux_seed equals the path seed; W would not be independent of X",
            ));
        }
        Some(super::simulate_fbm(0.5, n, aux)?)
    } else {
        None
    };
    let values: Vec<f64> = x
        .values()
        .iter()
        .enumerate()
        .map(|(u, &xv)| {
            let t = u as f64 / n as f64;
            match form.tag {
                PhiTag::Identity => xv,
                PhiTag::Square => xv * xv,
                PhiTag::Exp => xv.exp(),
                PhiTag::SinTTimesX => t.sin() * xv,
                PhiTag::Sin2PlusX2 => t.sin().powi(2) + xv * xv,
                PhiTag::WTimesX => w.as_ref().unwrap().values()[u] * xv,
                PhiTag::W2PlusX2 => {
                    let wv = w.as_ref().unwrap().values()[u];
                    wv * wv + xv * xv
                }
            }
        })
        .collect();
    let mut meta = PathMeta::new("phi", x.meta.seed)
        .with_param("form", form.tag.as_str())
        .with_param("base_generator", x.meta.generator.clone());
    if let Some(aux) = form.aux_seed {
        meta = meta.with_param("aux_seed", aux);
    }
    SamplePath::new(values, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::simulate_fbm;

    fn toy_path(values: Vec<f64>, seed: u64) -> SamplePath {
        SamplePath::new(values, PathMeta::new("test", Some(seed))).unwrap()
    }

    #[test]
    fn identity_is_bit_identical() {
        let x = simulate_fbm(0.6, 64, 4).unwrap();
        let y = apply_phi(&x, &PhiForm::new(PhiTag::Identity).unwrap()).unwrap();
        assert_eq!(x.values(), y.values());
    }

    #[test]
    fn square_example() {
        let x = toy_path(vec![0.0, 1.0, -2.0], 1);
        let y = apply_phi(&x, &PhiForm::new(PhiTag::Square).unwrap()).unwrap();
        assert_eq!(y.values(), &[0.0, 1.0, 4.0]);
    }

    #[test]
    fn sin_t_vanishes_at_zero() {
        let x = toy_path(vec![5.0, 1.0, 2.0], 1);
        let y = apply_phi(&x, &PhiForm::new(PhiTag::SinTTimesX).unwrap()).unwrap();
        assert_eq!(y.values()[0], 0.0);
    }

    #[test]
    fn aux_seed_rules_are_enforced() {
        assert!(PhiForm::new(PhiTag::WTimesX).is_err());
        assert!(PhiForm::with_aux(PhiTag::Square, 3).is_err());
        let x = simulate_fbm(0.6, 32, 7).unwrap();
        let same = PhiForm::with_aux(PhiTag::WTimesX, 7).unwrap();
        assert!(apply_phi(&x, &same).is_err());
        let ok = PhiForm::with_aux(PhiTag::WTimesX, 8).unwrap();
        assert!(apply_phi(&x, &ok).is_ok());
    }

    #[test]
    fn catalog_preserves_grid_and_finiteness() {
        let x = simulate_fbm(0.3, 100, 21).unwrap();
        for tag in PhiTag::ALL {
            let form = if tag.needs_aux() {
                PhiForm::with_aux(tag, 22).unwrap()
            } else {
                PhiForm::new(tag).unwrap()
            };
            let y = apply_phi(&x, &form).unwrap();
            assert_eq!(y.grid_n(), x.grid_n(), "{tag:?}");
            assert!(y.values().iter().all(|v| v.is_finite()), "{tag:?}");
        }
    }
}
