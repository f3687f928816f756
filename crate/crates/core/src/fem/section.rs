use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cross-section and material data of a beam element, SI units.
///
/// The bending inertias are expressed in the element's local frame:
/// `i_min` is the second moment about local `y` (it governs deflection along
/// local `z`) and `i_max` the second moment about local `z` (deflection
/// along local `y`). Orient plate-like members so local `z` is the thin
/// direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    pub youngs_modulus: f64,
    pub shear_modulus: f64,
    pub density: f64,
    pub area: f64,
    pub i_min: f64,
    pub i_max: f64,
    /// Saint-Venant torsional constant `J`.
    pub torsion: f64,
}

/// A section property that an updating parameter can override.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    YoungsModulus,
    ShearModulus,
    Density,
    Area,
    IMin,
    IMax,
    Torsion,
}

impl Property {
    pub const ALL: [Property; 7] = [
        Property::YoungsModulus,
        Property::ShearModulus,
        Property::Density,
        Property::Area,
        Property::IMin,
        Property::IMax,
        Property::Torsion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::YoungsModulus => "youngs_modulus",
            Property::ShearModulus => "shear_modulus",
            Property::Density => "density",
            Property::Area => "area",
            Property::IMin => "i_min",
            Property::IMax => "i_max",
            Property::Torsion => "torsion",
        }
    }
}

impl MaterialSection {
    pub fn validate(&self) -> Result<()> {
        for p in Property::ALL {
            let v = self.get(p);
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidGeometry(format!(
                    "section property {} must be positive and finite, got {v}",
                    p.name()
                )));
            }
        }
        Ok(())
    }

    pub fn get(&self, p: Property) -> f64 {
        match p {
            Property::YoungsModulus => self.youngs_modulus,
            Property::ShearModulus => self.shear_modulus,
            Property::Density => self.density,
            Property::Area => self.area,
            Property::IMin => self.i_min,
            Property::IMax => self.i_max,
            Property::Torsion => self.torsion,
        }
    }

    pub fn set(&mut self, p: Property, value: f64) {
        match p {
            Property::YoungsModulus => self.youngs_modulus = value,
            Property::ShearModulus => self.shear_modulus = value,
            Property::Density => self.density = value,
            Property::Area => self.area = value,
            Property::IMin => self.i_min = value,
            Property::IMax => self.i_max = value,
            Property::Torsion => self.torsion = value,
        }
    }

    /// Polar moment of area used for torsional rotary inertia.
    pub fn polar_moment(&self) -> f64 {
        self.i_min + self.i_max
    }

    /// Solid rectangle `width` (along local y) by `height` (along local z).
    pub fn rectangle(
        youngs_modulus: f64,
        poisson: f64,
        density: f64,
        width: f64,
        height: f64,
    ) -> Self {
        let (long, short) = if width >= height {
            (width, height)
        } else {
            (height, width)
        };
        // Roark's approximation for the torsion constant of a solid rectangle.
        let ratio = short / long;
        let torsion = long * short.powi(3)
            * (1.0 / 3.0 - 0.21 * ratio * (1.0 - ratio.powi(4) / 12.0));
        Self {
            youngs_modulus,
            shear_modulus: youngs_modulus / (2.0 * (1.0 + poisson)),
            density,
            area: width * height,
            i_min: width * height.powi(3) / 12.0,
            i_max: height * width.powi(3) / 12.0,
            torsion,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive_properties() {
        let mut s = MaterialSection::rectangle(210e9, 0.3, 7800.0, 0.01, 0.01);
        assert!(s.validate().is_ok());
        s.density = 0.0;
        assert!(matches!(s.validate(), Err(Error::InvalidGeometry(_))));
        s.density = f64::NAN;
        assert!(s.validate().is_err());
    }

    #[test]
    fn rectangle_matches_plate_values() {
        // 100 mm x 10 mm aluminium strip.
        let s = MaterialSection::rectangle(70e9, 0.33, 2785.0, 0.1, 0.01);
        assert!((s.i_min - 8.333_333e-9).abs() < 1e-14);
        assert!((s.i_max - 8.333_333e-7).abs() < 1e-12);
        assert!(s.torsion > 3.0e-8 && s.torsion < 3.5e-8);
    }

    #[test]
    fn get_set_round_trip() {
        let mut s = MaterialSection::rectangle(1.0, 0.25, 1.0, 1.0, 1.0);
        for (k, p) in Property::ALL.into_iter().enumerate() {
            s.set(p, k as f64 + 0.5);
            assert_eq!(s.get(p), k as f64 + 0.5);
        }
    }
}
