//! Changes of parametrisation Λ_{q_S} → Λ_{q_P} acting on trajectories.

use crate::grassmann::{Grading, GrassmannElement, Parity};
use crate::scalar::Real;
use crate::scurves::{CurveError, Trajectory};

/// An algebra homomorphism fixed by the images of the source generators.
#[derive(Debug, Clone, PartialEq)]
pub struct Reparametrisation<T = f64> {
    target_q: u32,
    images: Vec<GrassmannElement<T>>,
}

impl<T: Real> Reparametrisation<T> {
    /// `images[i]` is the image of `z{i+1}`; each must be odd (or zero) in
    /// Λ_{target_q}.
    pub fn new(images: Vec<GrassmannElement<T>>, target_q: u32) -> Result<Self, CurveError> {
        for (i, v) in images.iter().enumerate() {
            if v.q() != target_q {
                return Err(CurveError::Schema(format!("image of z{} has q = {}, expected {target_q}", i + 1, v.q())));
            }
            if !v.is_zero() && v.grading() != Grading::Homogeneous(Parity::Odd) {
                return Err(CurveError::Parity(format!("z{}", i + 1)));
            }
        }
        Ok(Reparametrisation { target_q, images })
    }

    pub fn identity(q: u32) -> Result<Self, CurveError> {
        let images = (1..=q).map(|i| GrassmannElement::generator(q, i)).collect::<Result<Vec<_>, _>>()?;
        Self::new(images, q)
    }

    /// `z_i ↦ z_i` for `i ≤ target_q`, the remaining generators to zero.
    pub fn projection(source_q: u32, target_q: u32) -> Result<Self, CurveError> {
        let images = (1..=source_q)
            .map(|i| if i <= target_q { GrassmannElement::generator(target_q, i) } else { GrassmannElement::zero(target_q) })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(images, target_q)
    }

    pub fn source_q(&self) -> u32 {
        self.images.len() as u32
    }

    pub fn target_q(&self) -> u32 {
        self.target_q
    }

    pub fn apply(&self, v: &GrassmannElement<T>) -> Result<GrassmannElement<T>, CurveError> {
        Ok(v.map_generators(&self.images, self.target_q)?)
    }
}

/// Applies `psi` to every value of every sample.
pub fn reparametrise<T: Real>(traj: &Trajectory<T>, psi: &Reparametrisation<T>) -> Result<Trajectory<T>, CurveError> {
    if psi.source_q() != traj.q() {
        return Err(CurveError::Schema(format!(
            "reparametrisation expects q = {}, trajectory has q = {}",
            psi.source_q(),
            traj.q()
        )));
    }
    traj.map_values(psi.target_q, |v| psi.apply(v))
}
