use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use evalexpr::error::EvalexprResultValue;
use evalexpr::{Context, DefaultNumericTypes, EvalexprError, Node, Value};
use thiserror::Error;

use crate::quad1d;

use super::quadrature::{default_quadrature, integrate_points, QuadratureSpec};
use crate::specfun::gamma_half_integer;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("dimension {0} is not supported (need 2 ≤ d ≤ 10)")]
    Dimension(u32),
    #[error("{0}")]
    Shape(String),
    #[error("volume estimate {value} has relative error {rel:.2e}, above the allowed {allowed:.0e}")]
    NoisyVolume { value: f64, rel: f64, allowed: f64 },
    #[error("quadrature {quad} cannot be used here: {reason}")]
    QuadratureMismatch { quad: String, reason: String },
    #[error("tensor grid with {0} cells exceeds the limit")]
    GridTooLarge(u128),
}

/// `|B_1|` in `R^d`.
pub fn unit_ball_volume(d: u32) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma_half_integer(d + 2)
}

/// Surface area of the unit sphere `S^(d-1)`.
pub fn unit_sphere_area(d: u32) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / gamma_half_integer(d)
}

/// Membership given by an expression in `x1..xd` (and `x, y, z, w` for the
/// first four axes). A boolean result is used as is; a number means inside
/// when `≤ 0`.
#[derive(Clone)]
pub struct Implicit {
    pub source: String,
    tree: Arc<Node<DefaultNumericTypes>>,
    names: Vec<String>,
    /// Bounding box `[lo, hi]` per axis in shape coordinates.
    pub bounds: Vec<(f64, f64)>,
    /// Exact volume, if the user knows it.
    pub volume: Option<f64>,
}

impl fmt::Debug for Implicit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Implicit")
            .field("source", &self.source)
            .field("bounds", &self.bounds)
            .field("volume", &self.volume)
            .finish()
    }
}

impl PartialEq for Implicit {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.bounds == other.bounds && self.volume == other.volume
    }
}

const AXIS_ALIASES: [&str; 4] = ["x", "y", "z", "w"];

struct PointContext<'a> {
    names: &'a [String],
    values: Vec<Value<DefaultNumericTypes>>,
}

impl Context for PointContext<'_> {
    type NumericTypes = DefaultNumericTypes;

    fn get_value(&self, identifier: &str) -> Option<&Value<DefaultNumericTypes>> {
        if let Some(k) = AXIS_ALIASES.iter().position(|a| *a == identifier) {
            return self.values.get(k);
        }
        self.names.iter().position(|n| n == identifier).map(|k| &self.values[k])
    }

    fn call_function(
        &self,
        identifier: &str,
        _argument: &Value<DefaultNumericTypes>,
    ) -> EvalexprResultValue<DefaultNumericTypes> {
        Err(EvalexprError::FunctionIdentifierNotFound(identifier.to_string()))
    }

    fn are_builtin_functions_disabled(&self) -> bool {
        false
    }

    fn set_builtin_functions_disabled(&mut self, _disabled: bool) -> evalexpr::EvalexprResult<(), DefaultNumericTypes> {
        Err(EvalexprError::CustomMessage("builtin functions cannot be toggled".into()))
    }
}

impl Implicit {
    pub fn new(source: &str, bounds: Vec<(f64, f64)>, volume: Option<f64>) -> Result<Self, GeomError> {
        let tree = evalexpr::build_operator_tree::<DefaultNumericTypes>(source)
            .map_err(|e| GeomError::Shape(format!("cannot parse expression `{source}`: {e}")))?;
        if bounds.iter().any(|(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite()) {
            return Err(GeomError::Shape("implicit bounds must satisfy lo < hi on every axis".into()));
        }
        let shape = Self {
            source: source.to_string(),
            tree: Arc::new(tree),
            names: (1..=bounds.len()).map(|k| format!("x{k}")).collect(),
            bounds,
            volume,
        };
        let mid: Vec<f64> = shape.bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
        shape.evaluate(&mid)?;
        Ok(shape)
    }

    fn evaluate(&self, y: &[f64]) -> Result<bool, GeomError> {
        let ctx = PointContext {
            names: &self.names,
            values: y.iter().map(|&v| Value::from_float(v)).collect(),
        };
        let value = self
            .tree
            .eval_with_context(&ctx)
            .map_err(|e| GeomError::Shape(format!("cannot evaluate `{}`: {e}", self.source)))?;
        match value {
            Value::Boolean(b) => Ok(b),
            other => other
                .as_number()
                .map(|v| v <= 0.0)
                .map_err(|e| GeomError::Shape(format!("`{}` is neither boolean nor numeric: {e}", self.source))),
        }
    }

    fn contains(&self, y: &[f64]) -> bool {
        let inside_box = y.iter().zip(&self.bounds).all(|(v, (lo, hi))| v >= lo && v <= hi);
        inside_box && self.evaluate(y).unwrap_or(false)
    }
}

/// Reference shapes, centered at the origin of their own coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Ball { radius: f64 },
    Ellipsoid { semiaxes: Vec<f64> },
    Box { sides: Vec<f64> },
    /// Spherical shell `inner ≤ |x| ≤ outer`.
    Annulus { inner: f64, outer: f64 },
    TwoBalls { c1: Vec<f64>, r1: f64, c2: Vec<f64>, r2: f64 },
    Implicit(Implicit),
}

impl Shape {
    fn name(&self) -> &'static str {
        match self {
            Shape::Ball { .. } => "ball",
            Shape::Ellipsoid { .. } => "ellipsoid",
            Shape::Box { .. } => "box",
            Shape::Annulus { .. } => "annulus",
            Shape::TwoBalls { .. } => "two_balls",
            Shape::Implicit(_) => "implicit",
        }
    }

    fn contains(&self, y: &[f64]) -> bool {
        let norm2 = |v: &[f64]| v.iter().map(|t| t * t).sum::<f64>();
        match self {
            Shape::Ball { radius } => norm2(y) <= radius * radius,
            Shape::Ellipsoid { semiaxes } => y.iter().zip(semiaxes).map(|(v, a)| (v / a).powi(2)).sum::<f64>() <= 1.0,
            Shape::Box { sides } => y.iter().zip(sides).all(|(v, s)| v.abs() <= 0.5 * s),
            Shape::Annulus { inner, outer } => {
                let r2 = norm2(y);
                r2 >= inner * inner && r2 <= outer * outer
            }
            Shape::TwoBalls { c1, r1, c2, r2 } => {
                let d1: f64 = y.iter().zip(c1).map(|(v, c)| (v - c).powi(2)).sum();
                let d2: f64 = y.iter().zip(c2).map(|(v, c)| (v - c).powi(2)).sum();
                d1 <= r1 * r1 || d2 <= r2 * r2
            }
            Shape::Implicit(s) => s.contains(y),
        }
    }

    fn bbox(&self, d: usize) -> Vec<(f64, f64)> {
        match self {
            Shape::Ball { radius } => vec![(-radius, *radius); d],
            Shape::Ellipsoid { semiaxes } => semiaxes.iter().map(|a| (-a, *a)).collect(),
            Shape::Box { sides } => sides.iter().map(|s| (-0.5 * s, 0.5 * s)).collect(),
            Shape::Annulus { outer, .. } => vec![(-outer, *outer); d],
            Shape::TwoBalls { c1, r1, c2, r2 } => (0..d)
                .map(|k| ((c1[k] - r1).min(c2[k] - r2), (c1[k] + r1).max(c2[k] + r2)))
                .collect(),
            Shape::Implicit(s) => s.bounds.clone(),
        }
    }

    fn volume(&self, d: u32) -> Option<f64> {
        let vb = unit_ball_volume(d);
        match self {
            Shape::Ball { radius } => Some(vb * radius.powi(d as i32)),
            Shape::Ellipsoid { semiaxes } => Some(vb * semiaxes.iter().product::<f64>()),
            Shape::Box { sides } => Some(sides.iter().product()),
            Shape::Annulus { inner, outer } => Some(vb * (outer.powi(d as i32) - inner.powi(d as i32))),
            Shape::TwoBalls { c1, r1, c2, r2 } => {
                let s = c1.iter().zip(c2).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                Some(vb * (r1.powi(d as i32) + r2.powi(d as i32)) - lens_volume(d, s, *r1, *r2))
            }
            Shape::Implicit(s) => s.volume,
        }
    }

    fn validate(&self, d: usize) -> Result<(), GeomError> {
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(GeomError::Shape(format!("{what} must be positive and finite, got {v}")))
            }
        };
        let length = |n: usize, what: &str| {
            if n == d {
                Ok(())
            } else {
                Err(GeomError::Shape(format!("{what} needs {d} entries, got {n}")))
            }
        };
        match self {
            Shape::Ball { radius } => positive(*radius, "radius"),
            Shape::Ellipsoid { semiaxes } => {
                length(semiaxes.len(), "semiaxes")?;
                semiaxes.iter().try_for_each(|&a| positive(a, "semiaxis"))
            }
            Shape::Box { sides } => {
                length(sides.len(), "sides")?;
                sides.iter().try_for_each(|&s| positive(s, "side"))
            }
            Shape::Annulus { inner, outer } => {
                positive(*outer, "outer radius")?;
                if !(*inner >= 0.0 && inner < outer) {
                    return Err(GeomError::Shape(format!("annulus needs 0 ≤ inner < outer, got {inner}, {outer}")));
                }
                Ok(())
            }
            Shape::TwoBalls { c1, r1, c2, r2 } => {
                length(c1.len(), "center1")?;
                length(c2.len(), "center2")?;
                positive(*r1, "radius1")?;
                positive(*r2, "radius2")
            }
            Shape::Implicit(s) => {
                length(s.bounds.len(), "bounds")?;
                if let Some(v) = s.volume {
                    positive(v, "volume")?;
                }
                Ok(())
            }
        }
    }
}

/// Volume of the intersection of two `d`-balls with centers `s` apart.
fn lens_volume(d: u32, s: f64, r1: f64, r2: f64) -> f64 {
    if s >= r1 + r2 {
        return 0.0;
    }
    if s <= (r1 - r2).abs() {
        return unit_ball_volume(d) * r1.min(r2).powi(d as i32);
    }
    // Slice area of a (d-1)-ball of radius sqrt(r² - t²), integrated over the cap.
    let slice = unit_ball_volume(d - 1);
    let cap = |r: f64, from: f64| {
        quad1d::integrate(
            |t| slice * (r * r - t * t).max(0.0).powf((d as f64 - 1.0) / 2.0),
            from,
            r,
            &[],
            1e-14,
            0.0,
            500,
        )
        .value
    };
    let x1 = (s * s + r1 * r1 - r2 * r2) / (2.0 * s);
    cap(r1, x1) + cap(r2, s - x1)
}

/// Volume with an error bar; the error is zero for closed-form volumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Volume {
    pub value: f64,
    pub error: f64,
}

/// A shape placed in `R^d`: `x ∈ Ω ⟺ (x - translation)/scale ∈ shape`.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub d: u32,
    pub shape: Shape,
    pub scale: f64,
    pub translation: Vec<f64>,
}

impl Domain {
    pub fn new(d: u32, shape: Shape) -> Result<Self, GeomError> {
        if !(2..=10).contains(&d) {
            return Err(GeomError::Dimension(d));
        }
        shape.validate(d as usize)?;
        Ok(Self {
            d,
            shape,
            scale: 1.0,
            translation: vec![0.0; d as usize],
        })
    }

    pub fn ball(d: u32, radius: f64) -> Result<Self, GeomError> {
        Self::new(d, Shape::Ball { radius })
    }

    pub fn translated(mut self, offset: &[f64]) -> Self {
        for (t, o) in self.translation.iter_mut().zip(offset) {
            *t += o;
        }
        self
    }

    /// `sΩ`, scaling about the origin.
    pub fn scaled(mut self, s: f64) -> Self {
        self.scale *= s;
        for t in self.translation.iter_mut() {
            *t *= s;
        }
        self
    }

    pub fn shape_name(&self) -> &'static str {
        self.shape.name()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let mut y = [0.0; 10];
        let d = self.d as usize;
        for k in 0..d {
            y[k] = (x[k] - self.translation[k]) / self.scale;
        }
        self.shape.contains(&y[..d])
    }

    /// Axis-aligned bounding box as `(lo, hi)` per axis.
    pub fn bbox(&self) -> Vec<(f64, f64)> {
        self.shape
            .bbox(self.d as usize)
            .into_iter()
            .zip(&self.translation)
            .map(|((lo, hi), t)| (t + self.scale * lo, t + self.scale * hi))
            .collect()
    }

    pub fn bbox_volume(&self) -> f64 {
        self.bbox().iter().map(|(lo, hi)| hi - lo).product()
    }

    /// Largest distance between two bounding-box corners.
    pub fn diameter_bound(&self) -> f64 {
        self.bbox().iter().map(|(lo, hi)| (hi - lo).powi(2)).sum::<f64>().sqrt()
    }

    /// Closed-form volume where available.
    pub fn exact_volume(&self) -> Option<f64> {
        self.shape.volume(self.d).map(|v| v * self.scale.powi(self.d as i32))
    }

    /// The ball `(center, radius)` if the shape is one.
    pub fn as_ball(&self) -> Option<(Vec<f64>, f64)> {
        match self.shape {
            Shape::Ball { radius } => Some((self.translation.clone(), radius * self.scale)),
            _ => None,
        }
    }

    /// Exact volume, or an estimate with the given quadrature.
    pub fn volume(&self, quad: &QuadratureSpec) -> Result<Volume, GeomError> {
        if let Some(v) = self.exact_volume() {
            return Ok(Volume { value: v, error: 0.0 });
        }
        let est = integrate_points(self, 1, &|_, out| out[0] = 1.0, quad)?;
        Ok(Volume {
            value: est.values[0],
            error: est.errors[0],
        })
    }
}

/// Relative volume error tolerated by [`normalize_volume`].
pub const VOLUME_REL_TOL: f64 = 1e-4;

/// Scale `Ω` about the origin so that `|sΩ| = target` (default `|B_1|`).
/// Returns the scaled domain and `s`.
pub fn normalize_volume(domain: &Domain, target: Option<f64>) -> Result<(Domain, f64), GeomError> {
    let target = target.unwrap_or_else(|| unit_ball_volume(domain.d));
    let vol = domain.volume(&default_quadrature(domain.d))?;
    let rel = vol.error / vol.value;
    if !(rel < VOLUME_REL_TOL) {
        return Err(GeomError::NoisyVolume {
            value: vol.value,
            rel,
            allowed: VOLUME_REL_TOL,
        });
    }
    let s = (target / vol.value).powf(1.0 / domain.d as f64);
    Ok((domain.clone().scaled(s), s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        for d in 2..10 {
            assert!((unit_sphere_area(d) - d as f64 * unit_ball_volume(d)).abs() < 1e-13);
        }
    }

    #[test]
    fn normalization_examples() {
        let (_, s) = normalize_volume(&Domain::ball(2, 2.0).unwrap(), None).unwrap();
        assert!((s - 0.5).abs() < 1e-15);
        let e = Domain::new(2, Shape::Ellipsoid { semiaxes: vec![2.0, 0.5] }).unwrap();
        let (_, s) = normalize_volume(&e, None).unwrap();
        assert!((s - 1.0).abs() < 1e-15);
        let sq = Domain::new(2, Shape::Box { sides: vec![1.0, 1.0] }).unwrap();
        let (n, s) = normalize_volume(&sq, None).unwrap();
        assert!((s - PI.sqrt()).abs() < 1e-15);
        assert!((n.exact_volume().unwrap() - PI).abs() < 1e-14);
    }

    #[test]
    fn lens_matches_disk_formula() {
        // two unit disks at distance 1: 2π/3 - √3/2
        let v = lens_volume(2, 1.0, 1.0, 1.0);
        assert!((v - (2.0 * PI / 3.0 - 3f64.sqrt() / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn membership_and_transform() {
        let b = Domain::ball(2, 1.0).unwrap().translated(&[0.3, 0.0]).scaled(2.0);
        assert!(b.contains(&[0.6 + 1.9, 0.0]));
        assert!(!b.contains(&[0.6 - 2.1, 0.0]));
        let bb = b.bbox();
        assert_eq!(bb[0], (0.6 - 2.0, 0.6 + 2.0));
    }

    #[test]
    fn implicit_boolean_and_numeric() {
        let l = Implicit::new("!(x > 0 && y > 0)", vec![(-1.0, 1.0), (-1.0, 1.0)], Some(3.0)).unwrap();
        assert!(l.contains(&[-0.5, 0.5]));
        assert!(!l.contains(&[0.5, 0.5]));
        let disk = Implicit::new("x1^2 + x2^2 - 1", vec![(-1.0, 1.0), (-1.0, 1.0)], None).unwrap();
        assert!(disk.contains(&[0.5, 0.5]));
        assert!(!disk.contains(&[0.9, 0.9]));
        assert!(Implicit::new("q + 1", vec![(-1.0, 1.0), (-1.0, 1.0)], None).is_err());
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Domain::new(2, Shape::Ellipsoid { semiaxes: vec![1.0] }).is_err());
        assert!(Domain::new(2, Shape::Annulus { inner: 1.0, outer: 0.5 }).is_err());
        assert!(Domain::new(1, Shape::Ball { radius: 1.0 }).is_err());
    }
}
