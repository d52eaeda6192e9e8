//! Polar Gauss quadrature on the unit disc and the integral functionals that
//! compare two conformal maps. All pair functionals are evaluated on one
//! shared rule so that inequalities between them see identical
//! discretization error.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::conformal::ConformalMap;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tensor rule: Gauss–Legendre in `r` (weight `r dr`, `level + 1` nodes) times
/// the trapezoid rule in `θ` with `4·level` points. Integrates `x^i y^j`
/// exactly for `i + j ≤ 2·level`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    nodes: Vec<(Complex<T>, T)>,
    level: usize,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre<T: Scalar>(n: usize) -> Vec<(T, T)> {
    let mut out = vec![(T::zero(), T::zero()); n];
    let nt = T::from_usize(n);
    let half = T::lit(0.5);
    for i in 0..n.div_ceil(2) {
        let mut x = (T::PI() * (T::from_usize(i) + T::lit(0.75)) / (nt + half)).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (mut p0, mut p1) = (T::one(), x);
            for k in 2..=n {
                let kt = T::from_usize(k);
                let p2 = ((kt + kt - T::one()) * x * p1 - (kt - T::one()) * p0) / kt;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = T::one();
            }
            // p1 = P_n(x), p0 = P_{n-1}(x)
            dp = nt * (x * p1 - p0) / (x * x - T::one());
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() <= T::epsilon() * T::lit(4.0) {
                break;
            }
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    if n % 2 == 1 {
        out[n / 2].0 = T::zero();
    }
    out
}

impl<T: Scalar> QuadratureRule<T> {
    pub fn new(level: usize) -> Result<Self> {
        if level < 4 {
            return Err(Error::arg("level", "need level >= 4"));
        }
        let radial = gauss_legendre::<T>(level + 1);
        let n_theta = 4 * level;
        let half = T::lit(0.5);
        let dtheta = (T::PI() + T::PI()) / T::from_usize(n_theta);
        let mut nodes = Vec::with_capacity(radial.len() * n_theta);
        for &(x, w) in &radial {
            let r = half * (x + T::one());
            let wr = half * w * r * dtheta;
            for j in 0..n_theta {
                nodes.push((Complex::from_polar(r, dtheta * T::from_usize(j)), wr));
            }
        }
        Ok(Self { nodes, level })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn nodes(&self) -> &[(Complex<T>, T)] {
        &self.nodes
    }

    /// `∬_D f dx dy`, accumulated in node order.
    pub fn integrate(&self, mut f: impl FnMut(Complex<T>) -> T) -> T {
        let mut acc = T::zero();
        for &(z, w) in &self.nodes {
            acc += w * f(z);
        }
        acc
    }

    fn integrate_checked(
        &self,
        functional: &'static str,
        mut f: impl FnMut(Complex<T>) -> Result<T>,
    ) -> Result<T> {
        let mut acc = T::zero();
        for &(z, w) in &self.nodes {
            acc += w * f(z)?;
        }
        if acc.is_finite() {
            Ok(acc)
        } else {
            Err(Error::NonFinite { functional })
        }
    }
}

/// `(∬ |φ'|^α)^{1/α}`.
pub fn lp_norm_deriv<T: Scalar>(map: &ConformalMap<T>, alpha: T, rule: &QuadratureRule<T>) -> Result<T> {
    if !(alpha >= T::one()) {
        return Err(Error::arg("alpha", "need alpha >= 1"));
    }
    let total = rule.integrate_checked("lp_norm", |z| Ok(map.deriv(z).norm().powf(alpha)))?;
    Ok(total.powf(alpha.recip()))
}

/// `E_α(φ₁, φ₂) = (∬ max{|φ₁'|^α/|φ₂'|^{α−2}, |φ₂'|^α/|φ₁'|^{α−2}})^{1/α}`.
pub fn e_alpha<T: Scalar>(
    map1: &ConformalMap<T>,
    map2: &ConformalMap<T>,
    alpha: T,
    rule: &QuadratureRule<T>,
) -> Result<T> {
    if !(alpha > T::lit(2.0)) {
        return Err(Error::arg("alpha", "need alpha > 2"));
    }
    let am2 = alpha - T::lit(2.0);
    let total = rule.integrate_checked("e_alpha", |z| {
        let a = map1.deriv(z).norm();
        let b = map2.deriv(z).norm();
        let v = (a.powf(alpha) / b.powf(am2)).max(b.powf(alpha) / a.powf(am2));
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { functional: "e_alpha" })
        }
    })?;
    Ok(total.powf(alpha.recip()))
}

/// `d_s(h₁, h₂) = (∬ |h₁ − h₂|^s · min{h₁, h₂}^{1−s})^{1/s}`.
pub fn d_s<T: Scalar>(map1: &ConformalMap<T>, map2: &ConformalMap<T>, s: T, rule: &QuadratureRule<T>) -> Result<T> {
    if !(s > T::one() && s <= T::lit(2.0)) {
        return Err(Error::arg("s", "need 1 < s <= 2"));
    }
    let tiny = T::lit(1e-14);
    let total = rule.integrate_checked("d_s", |z| {
        let h1 = map1.weight(z);
        let h2 = map2.weight(z);
        let diff = (h1 - h2).abs();
        let lo = h1.min(h2);
        if lo < tiny && diff > tiny {
            return Err(Error::NonFinite { functional: "d_s" });
        }
        if diff == T::zero() {
            return Ok(T::zero());
        }
        Ok(diff.powf(s) * lo.powf(T::one() - s))
    })?;
    Ok(total.powf(s.recip()))
}

/// `‖ |φ₁'| − |φ₂'| ‖_{L²(D)}`.
pub fn l2_deriv_gap<T: Scalar>(map1: &ConformalMap<T>, map2: &ConformalMap<T>, rule: &QuadratureRule<T>) -> Result<T> {
    let total = rule.integrate_checked("l2_gap", |z| {
        let d = map1.deriv(z).norm() - map2.deriv(z).norm();
        Ok(d * d)
    })?;
    Ok(total.sqrt())
}

/// `∬_D |J₁ − J₂|`, which equals
/// `[|φ₁(D⁺)| − |φ₂(D⁺)|] + [|φ₂(D⁻)| − |φ₁(D⁻)|]` with `D⁺ = {J₁ ≥ J₂}`.
pub fn measure_variation<T: Scalar>(
    map1: &ConformalMap<T>,
    map2: &ConformalMap<T>,
    rule: &QuadratureRule<T>,
) -> Result<T> {
    rule.integrate_checked("measure_variation", |z| Ok((map1.weight(z) - map2.weight(z)).abs()))
}

/// Image areas of `D⁺` and `D⁻` under both maps:
/// `(|φ₁(D⁺)|, |φ₂(D⁺)|, |φ₁(D⁻)|, |φ₂(D⁻)|)`.
pub fn split_image_areas<T: Scalar>(
    map1: &ConformalMap<T>,
    map2: &ConformalMap<T>,
    rule: &QuadratureRule<T>,
) -> [T; 4] {
    let mut out = [T::zero(); 4];
    for &(z, w) in rule.nodes() {
        let j1 = map1.weight(z);
        let j2 = map2.weight(z);
        if j1 >= j2 {
            out[0] += w * j1;
            out[1] += w * j2;
        } else {
            out[2] += w * j1;
            out[3] += w * j2;
        }
    }
    out
}

/// The two integrals `∬|φ₂'|^α|φ₁'|^{2−α}` (= `∬_{Ω₁}|ψ'|^α` for
/// `ψ = φ₂∘φ₁⁻¹`) and `∬|φ₁'|^α|φ₂'|^{2−α}` (its inverse).
pub fn pair_regularity<T: Scalar>(
    map1: &ConformalMap<T>,
    map2: &ConformalMap<T>,
    alpha: T,
    rule: &QuadratureRule<T>,
) -> Result<(T, T)> {
    if !(alpha > T::lit(2.0)) {
        return Err(Error::arg("alpha", "need alpha > 2"));
    }
    let two_m = T::lit(2.0) - alpha;
    let forward =
        rule.integrate_checked("pair_regularity", |z| Ok(map2.deriv(z).norm().powf(alpha) * map1.deriv(z).norm().powf(two_m)))?;
    let inverse =
        rule.integrate_checked("pair_regularity", |z| Ok(map1.deriv(z).norm().powf(alpha) * map2.deriv(z).norm().powf(two_m)))?;
    Ok((forward, inverse))
}

/// `|Ω| = ∬_D h`.
pub fn domain_area<T: Scalar>(map: &ConformalMap<T>, rule: &QuadratureRule<T>) -> T {
    rule.integrate(|z| map.weight(z))
}

/// Exponents tied to an integrability exponent `p > 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentBridge<T> {
    /// `s = 2p/(p+2)`
    pub s: T,
    /// `q = 2s/(s−1) = 4p/(p−2)`
    pub q: T,
}

pub fn exponent_bridge<T: Scalar>(p: T) -> Result<ExponentBridge<T>> {
    if !(p > T::lit(2.0)) || p.is_nan() {
        return Err(Error::InvalidExponent { p: p.to_f64_lossy() });
    }
    let two = T::lit(2.0);
    if p.is_infinite() {
        return Ok(ExponentBridge { s: two, q: T::lit(4.0) });
    }
    let s = two * p / (p + two);
    let q = T::lit(4.0) * p / (p - two);
    Ok(ExponentBridge { s, q })
}

/// Every functional the stability bounds consume, for one map pair at one
/// exponent `p` (`alpha == p`, `s = 2p/(p+2)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairFunctionals<T> {
    pub alpha: T,
    pub s: T,
    pub p: T,
    pub lp_norm_1: T,
    pub lp_norm_2: T,
    pub e_alpha: T,
    pub d_s: T,
    pub l2_gap: T,
    pub measure_variation: T,
    pub area_1: T,
    pub area_2: T,
}

impl<T: Scalar> PairFunctionals<T> {
    pub fn compute(map1: &ConformalMap<T>, map2: &ConformalMap<T>, p: T, rule: &QuadratureRule<T>) -> Result<Self> {
        let bridge = exponent_bridge(p)?;
        Ok(Self {
            alpha: p,
            s: bridge.s,
            p,
            lp_norm_1: lp_norm_deriv(map1, p, rule)?,
            lp_norm_2: lp_norm_deriv(map2, p, rule)?,
            e_alpha: e_alpha(map1, map2, p, rule)?,
            d_s: d_s(map1, map2, bridge.s, rule)?,
            l2_gap: l2_deriv_gap(map1, map2, rule)?,
            measure_variation: measure_variation(map1, map2, rule)?,
            area_1: domain_area(map1, rule),
            area_2: domain_area(map2, rule),
        })
    }
}
