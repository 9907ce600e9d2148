//! Globally adaptive 7/15-point Gauss-Kronrod quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate drops below `max(abs_tol, rel_tol * |I|)`. Local error estimates
//! follow the QUADPACK `qk15` heuristics.

use thiserror::Error;

use crate::Scalar;

// Tabulated to 33 digits, as published.
#[allow(clippy::excessive_precision)]
const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd Kronrod nodes (1, 3, 5) and the center.
#[allow(clippy::excessive_precision)]
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error(
        "quadrature did not converge after {intervals} intervals \
         (estimate {value:e}, error {error_estimate:e})"
    )]
    NonConvergence {
        value: f64,
        error_estimate: f64,
        intervals: usize,
    },
    #[error("integrand is not finite at x = {at:e}")]
    NonFinite { at: f64 },
    #[error("integration limits must be finite and ordered, got [{lower:e}, {upper:e}]")]
    BadLimits { lower: f64, upper: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_intervals: usize,
}

impl<T: Scalar> Default for QuadratureOptions<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-12).max(T::lit(1000.0) * T::epsilon()),
            abs_tol: T::zero(),
            max_intervals: 2000,
        }
    }
}

impl<T: Scalar> QuadratureOptions<T> {
    pub fn with_rel_tol(rel_tol: T) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error_estimate: T,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    lower: T,
    upper: T,
    value: T,
    error: T,
}

fn kronrod15<T: Scalar, F: Fn(T) -> T>(
    f: &F,
    lower: T,
    upper: T,
) -> Result<Segment<T>, QuadratureError> {
    let center = T::half() * (lower + upper);
    let half = T::half() * (upper - lower);
    let eval = |x: T| -> Result<T, QuadratureError> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadratureError::NonFinite {
                at: x.to_f64_lossy(),
            })
        }
    };

    let f_center = eval(center)?;
    let mut kronrod = f_center * T::lit(KRONROD_WEIGHTS[7]);
    let mut gauss = f_center * T::lit(GAUSS_WEIGHTS[3]);
    let mut abs_sum = kronrod.abs();
    let mut values = [(T::zero(), T::zero()); 7];
    for (j, slot) in values.iter_mut().enumerate() {
        let dx = half * T::lit(KRONROD_NODES[j]);
        let lo = eval(center - dx)?;
        let hi = eval(center + dx)?;
        let w = T::lit(KRONROD_WEIGHTS[j]);
        kronrod = kronrod + w * (lo + hi);
        abs_sum = abs_sum + w * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss = gauss + T::lit(GAUSS_WEIGHTS[j / 2]) * (lo + hi);
        }
        *slot = (lo, hi);
    }

    let mean = kronrod * T::half();
    let mut asc = T::lit(KRONROD_WEIGHTS[7]) * (f_center - mean).abs();
    for (j, (lo, hi)) in values.iter().enumerate() {
        asc = asc + T::lit(KRONROD_WEIGHTS[j]) * ((*lo - mean).abs() + (*hi - mean).abs());
    }

    let value = kronrod * half;
    let abs_sum = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != T::zero() && error != T::zero() {
        let scale = (T::lit(200.0) * error / asc).powf(T::lit(1.5));
        error = if scale < T::one() { asc * scale } else { asc };
    }
    let floor = T::lit(50.0) * T::epsilon() * abs_sum;
    if floor > error {
        error = floor;
    }
    Ok(Segment {
        lower,
        upper,
        value,
        error,
    })
}

/// Integrates `f` over `[lower, upper]`.
pub fn integrate<T: Scalar, F: Fn(T) -> T>(
    f: F,
    lower: T,
    upper: T,
    opts: &QuadratureOptions<T>,
) -> Result<Integral<T>, QuadratureError> {
    integrate_with_breaks(f, &[lower, upper], opts)
}

/// Integrates `f` over `[points[0], points[last]]`, starting from the
/// partition given by `points` (sorted ascending). Placing a break where the
/// integrand changes character saves the adaptive loop from hunting for it.
pub fn integrate_with_breaks<T: Scalar, F: Fn(T) -> T>(
    f: F,
    points: &[T],
    opts: &QuadratureOptions<T>,
) -> Result<Integral<T>, QuadratureError> {
    let bad = || QuadratureError::BadLimits {
        lower: points.first().map_or(f64::NAN, |p| p.to_f64_lossy()),
        upper: points.last().map_or(f64::NAN, |p| p.to_f64_lossy()),
    };
    if points.len() < 2 || points.iter().any(|p| !p.is_finite()) {
        return Err(bad());
    }
    if points.windows(2).any(|w| w[1] < w[0]) {
        return Err(bad());
    }

    let mut segments = Vec::with_capacity(opts.max_intervals.max(points.len()));
    for w in points.windows(2) {
        if w[1] > w[0] {
            segments.push(kronrod15(&f, w[0], w[1])?);
        }
    }
    if segments.is_empty() {
        return Ok(Integral {
            value: T::zero(),
            error_estimate: T::zero(),
            intervals: 0,
        });
    }

    loop {
        let value = segments.iter().fold(T::zero(), |acc, s| acc + s.value);
        let error = segments.iter().fold(T::zero(), |acc, s| acc + s.error);
        if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            segments.sort_by(|a, b| a.lower.partial_cmp(&b.lower).expect("finite limits"));
            let value = segments.iter().fold(T::zero(), |acc, s| acc + s.value);
            return Ok(Integral {
                value,
                error_estimate: error,
                intervals: segments.len(),
            });
        }

        let (worst, _) =
            segments
                .iter()
                .enumerate()
                .fold((0, T::neg_infinity()), |best, (i, s)| {
                    if s.error > best.1 {
                        (i, s.error)
                    } else {
                        best
                    }
                });
        let seg = segments[worst];
        let mid = T::half() * (seg.lower + seg.upper);
        let unsplittable = !(mid > seg.lower && mid < seg.upper);
        if segments.len() >= opts.max_intervals || unsplittable {
            return Err(QuadratureError::NonConvergence {
                value: value.to_f64_lossy(),
                error_estimate: error.to_f64_lossy(),
                intervals: segments.len(),
            });
        }
        segments[worst] = kronrod15(&f, seg.lower, mid)?;
        segments.push(kronrod15(&f, mid, seg.upper)?);
    }
}
