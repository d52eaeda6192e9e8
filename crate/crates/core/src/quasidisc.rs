//! Quasidisc quantities: admissible exponents from the dilatation `K`, the
//! resulting bound on the constant `M`, and a numerical estimate of the
//! Ahlfors three-point constant of a closed polygonal curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `sup_p = 2K²/(K²−1)` and the exponent actually used,
/// `(2K²−1)/(K²−1)`. Both are `+∞` for `K = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleExponent<T> {
    pub sup_p: T,
    pub chosen_p: T,
}

fn check_k<T: Scalar>(k: T) -> Result<()> {
    if !(k >= T::one()) || !k.is_finite() {
        return Err(Error::InvalidK { k: k.to_f64_lossy() });
    }
    Ok(())
}

pub fn admissible_exponent<T: Scalar>(k: T) -> Result<AdmissibleExponent<T>> {
    check_k(k)?;
    if k == T::one() {
        return Ok(AdmissibleExponent {
            sup_p: T::infinity(),
            chosen_p: T::infinity(),
        });
    }
    let k2 = k * k;
    let den = k2 - T::one();
    Ok(AdmissibleExponent {
        sup_p: (k2 + k2) / den,
        chosen_p: (k2 + k2 - T::one()) / den,
    })
}

/// Upper bound `1 + ((K−1)/(K+1))²` on the Hausdorff dimension of a
/// `K`-quasicircle.
pub fn smirnov_dim_bound<T: Scalar>(k: T) -> Result<T> {
    check_k(k)?;
    let t = (k - T::one()) / (k + T::one());
    Ok(T::one() + t * t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MConstant<T> {
    /// Exponent the constant is evaluated at, `4(2K² − 1)`.
    pub q: T,
    pub c_q: T,
    /// `C(q)²`
    pub m: T,
    pub estimated: bool,
}

/// `M = [C(4(2K²−1))]²` with `C` supplied by `estimator`.
pub fn m_constant_formula<T: Scalar>(k: T, estimator: impl FnOnce(T) -> Result<T>) -> Result<MConstant<T>> {
    check_k(k)?;
    let q = T::lit(4.0) * (T::lit(2.0) * k * k - T::one());
    let c_q = estimator(q)?;
    if !(c_q > T::zero()) || !c_q.is_finite() {
        return Err(Error::NonFinite { functional: "C(q)" });
    }
    Ok(MConstant {
        q,
        c_q,
        m: c_q * c_q,
        estimated: true,
    })
}

/// Closed polygon with vertices in order; the closing edge is implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolylineCurve<T> {
    points: Vec<[T; 2]>,
    /// `cumulative[i]` is the arc length from vertex 0 to vertex `i`;
    /// the last entry is the total length.
    cumulative: Vec<T>,
}

fn orient<T: Scalar>(a: [T; 2], b: [T; 2], c: [T; 2]) -> T {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment<T: Scalar>(a: [T; 2], b: [T; 2], p: [T; 2]) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

fn segments_meet<T: Scalar>(a: [T; 2], b: [T; 2], c: [T; 2], d: [T; 2]) -> bool {
    let z = T::zero();
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > z && d2 < z) || (d1 < z && d2 > z)) && ((d3 > z && d4 < z) || (d3 < z && d4 > z)) {
        return true;
    }
    (d1 == z && on_segment(c, d, a))
        || (d2 == z && on_segment(c, d, b))
        || (d3 == z && on_segment(a, b, c))
        || (d4 == z && on_segment(a, b, d))
}

fn dist<T: Scalar>(a: [T; 2], b: [T; 2]) -> T {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl<T: Scalar> PolylineCurve<T> {
    pub fn new(points: Vec<[T; 2]>) -> Result<Self> {
        let n = points.len();
        if n < 8 {
            return Err(Error::InvalidCurve(format!("need at least 8 points, got {n}")));
        }
        if let Some(i) = points.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::InvalidCurve(format!("point {i} is not finite")));
        }
        let seg = |i: usize| (points[i], points[(i + 1) % n]);
        for i in 0..n {
            let (a, b) = seg(i);
            if a == b {
                return Err(Error::InvalidCurve(format!("repeated point at index {i}")));
            }
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (c, d) = seg(j);
                if segments_meet(a, b, c, d) {
                    return Err(Error::InvalidCurve(format!("segments {i} and {j} intersect")));
                }
            }
        }
        let mut cumulative = Vec::with_capacity(n + 1);
        let mut acc = T::zero();
        cumulative.push(acc);
        for i in 0..n {
            let (a, b) = seg(i);
            acc += dist(a, b);
            cumulative.push(acc);
        }
        Ok(Self { points, cumulative })
    }

    /// Parses one `x y` pair per line; blank lines and `#` comments are
    /// skipped and a repeated closing point is dropped.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty());
            let mut coord = || -> Result<T> {
                let tok = it
                    .next()
                    .ok_or_else(|| Error::InvalidCurve(format!("line {}: expected two numbers", lineno + 1)))?;
                tok.parse::<f64>()
                    .map(T::lit)
                    .map_err(|_| Error::InvalidCurve(format!("line {}: bad number {tok:?}", lineno + 1)))
            };
            let p = [coord()?, coord()?];
            if it.next().is_some() {
                return Err(Error::InvalidCurve(format!("line {}: expected two numbers", lineno + 1)));
            }
            points.push(p);
        }
        if points.len() > 1 && points.first() == points.last() {
            points.pop();
        }
        Self::new(points)
    }

    pub fn points(&self) -> &[[T; 2]] {
        &self.points
    }

    pub fn length(&self) -> T {
        self.cumulative[self.points.len()]
    }

    /// Point at arc length `s` (taken modulo the length) from vertex 0.
    pub fn point_at(&self, s: T) -> [T; 2] {
        let len = self.length();
        let mut s = s % len;
        if s < T::zero() {
            s += len;
        }
        let n = self.points.len();
        let i = match self.cumulative.binary_search_by(|c| c.partial_cmp(&s).unwrap_or(std::cmp::Ordering::Less)) {
            Ok(i) => i.min(n - 1),
            Err(i) => i - 1,
        };
        let seg_len = self.cumulative[i + 1] - self.cumulative[i];
        let t = (s - self.cumulative[i]) / seg_len;
        let a = self.points[i];
        let b = self.points[(i + 1) % n];
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    }

    /// `count` points equally spaced in arc length, starting at vertex 0.
    pub fn sample_by_arclength(&self, count: usize) -> Vec<[T; 2]> {
        let step = self.length() / T::from_usize(count);
        (0..count).map(|i| self.point_at(step * T::from_usize(i))).collect()
    }

    /// Regular `n`-gon inscribed in the circle of radius `r`.
    pub fn regular_polygon(n: usize, r: T) -> Result<Self> {
        let tau = T::PI() + T::PI();
        Self::new(
            (0..n)
                .map(|i| {
                    let t = tau * T::from_usize(i) / T::from_usize(n);
                    [r * t.cos(), r * t.sin()]
                })
                .collect(),
        )
    }

    /// Ellipse with semi-axes `a`, `b` sampled at `n` equally spaced
    /// parameter values.
    pub fn ellipse(a: T, b: T, n: usize) -> Result<Self> {
        let tau = T::PI() + T::PI();
        Self::new(
            (0..n)
                .map(|i| {
                    let t = tau * T::from_usize(i) / T::from_usize(n);
                    [a * t.cos(), b * t.sin()]
                })
                .collect(),
        )
    }

    /// Koch snowflake after `level` subdivisions of the unit triangle.
    pub fn koch_snowflake(level: usize) -> Result<Self> {
        if level > 6 {
            return Err(Error::arg("level", "need level <= 6"));
        }
        let h = T::lit(3f64.sqrt() / 2.0);
        let mut pts = vec![[T::zero(), T::zero()], [T::one(), T::zero()], [T::lit(0.5), h]];
        // the triangle is counterclockwise, so outward is to the right
        let (c, s) = (T::lit(0.5), -h);
        for _ in 0..level {
            let n = pts.len();
            let mut next = Vec::with_capacity(4 * n);
            for i in 0..n {
                let a = pts[i];
                let b = pts[(i + 1) % n];
                let d = [(b[0] - a[0]) / T::lit(3.0), (b[1] - a[1]) / T::lit(3.0)];
                let p1 = [a[0] + d[0], a[1] + d[1]];
                let p3 = [p1[0] + d[0], p1[1] + d[1]];
                let peak = [p1[0] + c * d[0] - s * d[1], p1[1] + s * d[0] + c * d[1]];
                next.extend([a, p1, peak, p3]);
            }
            pts = next;
        }
        Self::new(pts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AhlforsEstimate<T> {
    /// `max diam(smaller arc(a, b)) / |a − b|` over sample pairs.
    pub constant: T,
    pub samples: usize,
    /// Pairs closer than `1e-12` that were left out.
    pub skipped_pairs: usize,
}

/// Estimates the Ahlfors constant from `samples` points equally spaced in
/// arc length. For every pair the smaller arc is the one with fewer sample
/// steps; for antipodal pairs the smaller of the two arc diameters is used.
pub fn ahlfors_constant<T: Scalar>(curve: &PolylineCurve<T>, samples: usize) -> Result<AhlforsEstimate<T>> {
    if samples < 32 {
        return Err(Error::arg("samples", "need samples >= 32"));
    }
    let pts = curve.sample_by_arclength(samples);
    let n = samples;
    let eps = T::lit(1e-12);
    let half = n / 2;
    let even = n.is_multiple_of(2);
    let mut best = T::one();
    let mut skipped = 0;
    let mut half_diam = vec![T::zero(); n];
    for i in 0..n {
        let mut diam = T::zero();
        for t in 1..=half {
            let j = (i + t) % n;
            for u in 0..t {
                diam = diam.max(dist(pts[(i + u) % n], pts[j]));
            }
            if even && t == half {
                half_diam[i] = diam;
                continue;
            }
            let chord = dist(pts[i], pts[j]);
            if chord < eps {
                skipped += 1;
                continue;
            }
            best = best.max(diam / chord);
        }
    }
    if even {
        for i in 0..half {
            let chord = dist(pts[i], pts[i + half]);
            if chord < eps {
                skipped += 1;
                continue;
            }
            best = best.max(half_diam[i].min(half_diam[i + half]) / chord);
        }
    }
    Ok(AhlforsEstimate {
        constant: best,
        samples: n,
        skipped_pairs: skipped,
    })
}
