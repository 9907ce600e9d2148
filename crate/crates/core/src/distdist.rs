//! Law of the optimal squared antenna-user distance `L*`.
//!
//! With the antenna at the foot of the perpendicular from the user, `L* =
//! h^2 + s^2` where `s` is the ground distance from the user to the
//! waveguide line. For the axis-parallel schemes `s` is uniform on
//! `[0, D_y / n]` (`n` = 1 edge, 2 center). For the diagonal scheme `s` has
//! the triangular law `F(s) = (2 Lambda s - s^2) / Lambda^2` on `[0, Lambda]`.
//!
//! Expectations are integrated over `s`, not `l`: the density of `L*` has a
//! `1/sqrt(l - h^2)` singularity at the lower support edge which the change of
//! variables `l = h^2 + s^2` removes exactly.

use thiserror::Error;

use crate::geometry::{Deployment, Scheme};
use crate::quadrature::{integrate_with_breaks, Integral, QuadratureError, QuadratureOptions};
use crate::sysconfig::RegionGeometry;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistributionError {
    #[error("density is unbounded at the lower support edge l = h^2 = {0:e}")]
    SingularPoint(f64),
    #[error("argument is not finite")]
    NonFinite,
    #[error("uniform variate {0} is outside (0, 1)")]
    UniformOutOfRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquaredDistanceDistribution<T> {
    deployment: Deployment<T>,
}

impl<T: Scalar> SquaredDistanceDistribution<T> {
    pub fn new(deployment: Deployment<T>) -> Self {
        Self { deployment }
    }

    pub fn scheme(&self) -> Scheme {
        self.deployment.scheme
    }

    pub fn region(&self) -> &RegionGeometry<T> {
        &self.deployment.region
    }

    fn h2(&self) -> T {
        let h = self.deployment.region.height();
        h * h
    }

    /// Largest user-to-waveguide ground distance: `D_y / n` or `Lambda`.
    pub fn span(&self) -> T {
        let r = &self.deployment.region;
        match self.deployment.scheme.strips() {
            Some(n) => r.d_y() / T::lit(f64::from(n)),
            None => r.diagonal_reach(),
        }
    }

    /// `[h^2, h^2 + span^2]`.
    pub fn support(&self) -> (T, T) {
        let s = self.span();
        (self.h2(), self.h2() + s * s)
    }

    /// CDF of the ground distance `s`.
    fn ground_cdf(&self, s: T) -> T {
        let span = self.span();
        if s <= T::zero() {
            return T::zero();
        }
        if s >= span {
            return T::one();
        }
        match self.deployment.scheme {
            Scheme::Eds | Scheme::Cds => s / span,
            Scheme::Dds => (T::two() * span * s - s * s) / (span * span),
        }
    }

    pub fn cdf(&self, l: T) -> T {
        let (lo, hi) = self.support();
        if l <= lo {
            T::zero()
        } else if l >= hi {
            T::one()
        } else {
            self.ground_cdf((l - lo).sqrt())
        }
    }

    /// Density of `L*`. Zero outside the support; undefined at `l = h^2`.
    pub fn pdf(&self, l: T) -> Result<T, DistributionError> {
        if !l.is_finite() {
            return Err(DistributionError::NonFinite);
        }
        let (lo, hi) = self.support();
        if l == lo {
            return Err(DistributionError::SingularPoint(lo.to_f64_lossy()));
        }
        if l < lo || l > hi {
            return Ok(T::zero());
        }
        let s = (l - lo).sqrt();
        let span = self.span();
        Ok(match self.deployment.scheme {
            Scheme::Eds | Scheme::Cds => T::one() / (T::two() * span * s),
            Scheme::Dds => (T::one() / (span * s) - T::one() / (span * span)).max(T::zero()),
        })
    }

    /// Density of the ground distance `s`; `L* = h^2 + s^2`.
    pub fn ground_density(&self, s: T) -> T {
        let span = self.span();
        if s < T::zero() || s > span {
            return T::zero();
        }
        match self.deployment.scheme {
            Scheme::Eds | Scheme::Cds => T::one() / span,
            Scheme::Dds => T::two() / span * (T::one() - s / span),
        }
    }

    /// Inverse-CDF draw from a uniform variate `u` in `(0, 1)`.
    pub fn sample(&self, u: T) -> Result<T, DistributionError> {
        if !(u > T::zero() && u < T::one()) {
            return Err(DistributionError::UniformOutOfRange(u.to_f64_lossy()));
        }
        let span = self.span();
        let s = match self.deployment.scheme {
            Scheme::Eds | Scheme::Cds => u * span,
            Scheme::Dds => span * (T::one() - (T::one() - u).sqrt()),
        };
        Ok(self.h2() + s * s)
    }

    /// `E[g(L*)]` by adaptive quadrature over the ground distance.
    pub fn expectation<G: Fn(T) -> T>(
        &self,
        g: G,
        opts: &QuadratureOptions<T>,
    ) -> Result<Integral<T>, QuadratureError> {
        self.expectation_with_breaks(g, &[], opts)
    }

    /// Like [`expectation`](Self::expectation), with extra break points given
    /// as ground distances. Points outside `(0, span)` are ignored.
    pub fn expectation_with_breaks<G: Fn(T) -> T>(
        &self,
        g: G,
        ground_breaks: &[T],
        opts: &QuadratureOptions<T>,
    ) -> Result<Integral<T>, QuadratureError> {
        let span = self.span();
        let h2 = self.h2();
        let mut points = Vec::with_capacity(ground_breaks.len() + 2);
        points.push(T::zero());
        points.extend(
            ground_breaks
                .iter()
                .copied()
                .filter(|&s| s > T::zero() && s < span),
        );
        points.push(span);
        points.sort_by(|a, b| a.partial_cmp(b).expect("finite break points"));
        points.dedup();
        integrate_with_breaks(|s| g(h2 + s * s) * self.ground_density(s), &points, opts)
    }
}

/// CDF of the ground distance from a uniformly placed user to the diagonal of
/// the rectangle: `(2 Lambda x - x^2) / Lambda^2`, clamped outside `[0, Lambda]`.
pub fn ground_projection_cdf<T: Scalar>(region: &RegionGeometry<T>, x: T) -> T {
    let reach = region.diagonal_reach();
    if x <= T::zero() {
        T::zero()
    } else if x >= reach {
        T::one()
    } else {
        (T::two() * reach * x - x * x) / (reach * reach)
    }
}
