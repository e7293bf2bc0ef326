//! Seeded sampling boxes with excluded regions.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::expr::EvalPoint;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Plane coordinates an exclusion refers to: two real variables, or the
/// real and imaginary parts of one complex variable.
#[derive(Clone, Debug, PartialEq)]
pub enum Plane {
    Xy(String, String),
    Complex(String),
}

impl Plane {
    pub fn xy() -> Self {
        Plane::Xy("x".into(), "y".into())
    }

    fn coords(&self, p: &EvalPoint) -> Option<(f64, f64)> {
        match self {
            Plane::Xy(a, b) => Some((p.get(a)?.re, p.get(b)?.re)),
            Plane::Complex(z) => p.get(z).map(|v| (v.re, v.im)),
        }
    }
}

type Predicate = Arc<dyn Fn(&EvalPoint) -> bool + Send + Sync>;

/// A region removed from a sampling box.
#[derive(Clone)]
pub enum Exclusion {
    /// Open disk around `center`.
    Disk {
        plane: Plane,
        center: (f64, f64),
        radius: f64,
    },
    /// Points with `lo < var < hi`.
    Band { var: String, lo: f64, hi: f64 },
    /// Points within `width` of the ray from `origin` in direction `angle`.
    Cut {
        plane: Plane,
        origin: (f64, f64),
        angle: f64,
        width: f64,
    },
    Custom { label: String, excluded: Predicate },
}

impl fmt::Debug for Exclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

impl Exclusion {
    pub fn disk(center: (f64, f64), radius: f64) -> Self {
        Exclusion::Disk {
            plane: Plane::xy(),
            center,
            radius,
        }
    }

    pub fn band(var: &str, lo: f64, hi: f64) -> Self {
        Exclusion::Band {
            var: var.into(),
            lo,
            hi,
        }
    }

    pub fn cut(origin: (f64, f64), angle: f64, width: f64) -> Self {
        Exclusion::Cut {
            plane: Plane::xy(),
            origin,
            angle,
            width,
        }
    }

    pub fn custom(label: &str, excluded: impl Fn(&EvalPoint) -> bool + Send + Sync + 'static) -> Self {
        Exclusion::Custom {
            label: label.into(),
            excluded: Arc::new(excluded),
        }
    }

    pub fn excludes(&self, p: &EvalPoint) -> bool {
        match self {
            Exclusion::Disk {
                plane,
                center,
                radius,
            } => plane
                .coords(p)
                .is_some_and(|(x, y)| (x - center.0).hypot(y - center.1) < *radius),
            Exclusion::Band { var, lo, hi } => p.get(var).is_some_and(|v| *lo < v.re && v.re < *hi),
            Exclusion::Cut {
                plane,
                origin,
                angle,
                width,
            } => plane.coords(p).is_some_and(|(x, y)| {
                let (dx, dy) = (x - origin.0, y - origin.1);
                let (c, s) = (angle.cos(), angle.sin());
                let along = dx * c + dy * s;
                let across = (-dx * s + dy * c).abs();
                if along >= 0.0 {
                    across < *width
                } else {
                    dx.hypot(dy) < *width
                }
            }),
            Exclusion::Custom { excluded, .. } => excluded(p),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Exclusion::Disk { center, radius, .. } => {
                format!("disk(center=({}, {}), r={})", center.0, center.1, radius)
            }
            Exclusion::Band { var, lo, hi } => format!("band({lo} < {var} < {hi})"),
            Exclusion::Cut {
                origin,
                angle,
                width,
                ..
            } => format!(
                "cut(origin=({}, {}), angle={}, width={})",
                origin.0, origin.1, angle, width
            ),
            Exclusion::Custom { label, .. } => label.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Range {
    Real(f64, f64),
    Complex { re: (f64, f64), im: (f64, f64) },
}

/// Per-variable ranges plus exclusions. Variables are drawn in insertion
/// order, so a seed fixes the whole sample sequence.
#[derive(Clone, Debug, Default)]
pub struct SamplingBox {
    ranges: Vec<(String, Range)>,
    exclusions: Vec<Exclusion>,
}

pub const MAX_REJECTIONS: usize = 100_000;

impl SamplingBox {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn real(mut self, name: &str, lo: f64, hi: f64) -> Self {
        self.set(name, Range::Real(lo, hi));
        self
    }

    pub fn complex(mut self, name: &str, re: (f64, f64), im: (f64, f64)) -> Self {
        self.set(name, Range::Complex { re, im });
        self
    }

    pub fn exclude(mut self, ex: Exclusion) -> Self {
        self.exclusions.push(ex);
        self
    }

    pub fn set(&mut self, name: &str, range: Range) {
        match self.ranges.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = range,
            None => self.ranges.push((name.to_string(), range)),
        }
    }

    pub fn ranges(&self) -> &[(String, Range)] {
        &self.ranges
    }

    pub fn exclusions(&self) -> &[Exclusion] {
        &self.exclusions
    }

    pub fn range(&self, name: &str) -> Option<&Range> {
        self.ranges.iter().find(|(n, _)| n == name).map(|(_, r)| r)
    }

    pub fn is_excluded(&self, p: &EvalPoint) -> bool {
        self.exclusions.iter().any(|e| e.excludes(p))
    }

    /// One point outside every exclusion, and the number of rejected draws.
    pub fn sample(&self, rng: &mut Rng8) -> Result<(EvalPoint, usize), Error> {
        for rejected in 0..MAX_REJECTIONS {
            let mut p = EvalPoint::new();
            self.draw_into(rng, &mut p);
            if !self.is_excluded(&p) {
                return Ok((p, rejected));
            }
        }
        Err(Error::Sampling(format!(
            "no admissible point after {MAX_REJECTIONS} draws; exclusions cover the box"
        )))
    }

    /// Draw every range into `p` without checking exclusions.
    pub fn draw_into(&self, rng: &mut Rng8, p: &mut EvalPoint) {
        for (name, range) in &self.ranges {
            match range {
                Range::Real(lo, hi) => {
                    p.set(name, uniform(rng, *lo, *hi));
                }
                Range::Complex { re, im } => {
                    let v = Complex64::new(uniform(rng, re.0, re.1), uniform(rng, im.0, im.1));
                    p.set_complex(name, v);
                }
            }
        }
    }
}

pub fn uniform(rng: &mut Rng8, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    rng.gen_range(lo..hi)
}

/// Sorted real coordinates of a point, for reports. Complex values
/// contribute `name.re` and `name.im`.
pub fn point_map(p: &EvalPoint) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for (k, v) in p.iter() {
        if v.im == 0.0 {
            out.insert(k.to_string(), v.re);
        } else {
            out.insert(format!("{k}.re"), v.re);
            out.insert(format!("{k}.im"), v.im);
        }
    }
    out
}

pub fn format_point(p: &EvalPoint) -> String {
    point_map(p)
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_points() {
        let bx = SamplingBox::new()
            .real("x", -1.0, 1.0)
            .complex("z", (0.0, 1.0), (-1.0, 0.0));
        let a = bx.sample(&mut rng(7)).unwrap().0;
        let b = bx.sample(&mut rng(7)).unwrap().0;
        assert_eq!(point_map(&a), point_map(&b));
        let c = bx.sample(&mut rng(8)).unwrap().0;
        assert_ne!(point_map(&a), point_map(&c));
    }

    #[test]
    fn exclusions_respected() {
        let bx = SamplingBox::new()
            .real("x", -1.0, 1.0)
            .real("y", -1.0, 1.0)
            .exclude(Exclusion::disk((0.0, 0.0), 0.5))
            .exclude(Exclusion::band("x", 0.5, 0.7))
            .exclude(Exclusion::cut((0.0, 0.0), std::f64::consts::PI, 0.1));
        let mut r = rng(1);
        let mut total_rejected = 0;
        for _ in 0..500 {
            let (p, rej) = bx.sample(&mut r).unwrap();
            total_rejected += rej;
            let (x, y) = (p.get("x").unwrap().re, p.get("y").unwrap().re);
            assert!(x.hypot(y) >= 0.5);
            assert!(!(0.5 < x && x < 0.7));
            assert!(!(x < 0.0 && y.abs() < 0.1));
        }
        assert!(total_rejected > 0);
    }

    #[test]
    fn fully_excluded_box_errors() {
        let bx = SamplingBox::new()
            .real("x", 0.0, 1.0)
            .exclude(Exclusion::band("x", -1.0, 2.0));
        assert!(bx.sample(&mut rng(0)).is_err());
    }
}
