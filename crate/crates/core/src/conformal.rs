//! Conformal maps of the unit disc of the form `φ = P ∘ m_a`, where
//! `m_a(z) = (z − a)/(1 − āz)` is a disc automorphism and `P` a polynomial.
//! The derivative is evaluated exactly by the chain rule.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct ConformalMap<T> {
    moebius_param: Complex<T>,
    poly_coeffs: Vec<Complex<T>>,
    label: String,
}

/// Outcome of [`ConformalMap::check_univalent`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnivalenceReport<T> {
    pub min_abs_deriv: T,
    /// `Re φ' > 0` at every grid point (Noshiro–Warschawski).
    pub re_deriv_positive: bool,
    /// Winding number of `φ(|z| = 1 − 10⁻⁶)` about `φ(0)`.
    pub boundary_winding: i64,
    /// Zeros of `φ'` inside the disc, by the argument principle.
    pub critical_points: i64,
}

impl<T: Scalar> ConformalMap<T> {
    /// General constructor. Fails if `|a| ≥ 1`, any coefficient is non-finite
    /// or the polynomial is empty.
    pub fn new(
        moebius_param: Complex<T>,
        poly_coeffs: Vec<Complex<T>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if !(moebius_param.norm() < T::one()) {
            return Err(Error::arg("moebius_param", "need |a| < 1"));
        }
        if poly_coeffs.is_empty() {
            return Err(Error::arg("poly_coeffs", "need at least one coefficient"));
        }
        if poly_coeffs
            .iter()
            .chain(std::iter::once(&moebius_param))
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::arg("poly_coeffs", "coefficients must be finite"));
        }
        Ok(Self {
            moebius_param,
            poly_coeffs,
            label: label.into(),
        })
    }

    pub fn identity() -> Self {
        Self {
            moebius_param: Complex::new(T::zero(), T::zero()),
            poly_coeffs: vec![Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero())],
            label: "identity".into(),
        }
    }

    /// `z ↦ c z`, `c > 0`.
    pub fn scale(c: T) -> Result<Self> {
        if !(c > T::zero()) || !c.is_finite() {
            return Err(Error::arg("scale", "need a finite factor c > 0"));
        }
        Ok(Self {
            moebius_param: Complex::new(T::zero(), T::zero()),
            poly_coeffs: vec![Complex::new(T::zero(), T::zero()), Complex::new(c, T::zero())],
            label: format!("scale:{c}"),
        })
    }

    /// The disc automorphism `(z − a)/(1 − āz)`.
    pub fn moebius(a: Complex<T>) -> Result<Self> {
        let label = if a.im == T::zero() {
            format!("moebius:{}", a.re)
        } else {
            format!("moebius:{},{}", a.re, a.im)
        };
        Self::new(
            a,
            vec![Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero())],
            label,
        )
    }

    /// `z + (ε/k) z^k`, univalent for `0 ≤ ε < 1` since `|φ' − 1| ≤ ε`.
    pub fn poly_perturb(eps: T, k: usize) -> Result<Self> {
        if !(eps >= T::zero() && eps < T::one()) {
            return Err(Error::arg("poly_perturb", "need 0 <= eps < 1"));
        }
        if k < 2 {
            return Err(Error::arg("poly_perturb", "need k >= 2"));
        }
        let mut coeffs = vec![Complex::new(T::zero(), T::zero()); k + 1];
        coeffs[1] = Complex::new(T::one(), T::zero());
        coeffs[k] = Complex::new(eps / T::from_usize(k), T::zero());
        Ok(Self {
            moebius_param: Complex::new(T::zero(), T::zero()),
            poly_coeffs: coeffs,
            label: format!("poly:{eps}:{k}"),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn moebius_param(&self) -> Complex<T> {
        self.moebius_param
    }

    pub fn poly_coeffs(&self) -> &[Complex<T>] {
        &self.poly_coeffs
    }

    #[inline]
    fn automorphism(&self, z: Complex<T>) -> (Complex<T>, Complex<T>) {
        let a = self.moebius_param;
        if a.re == T::zero() && a.im == T::zero() {
            return (z, Complex::new(T::one(), T::zero()));
        }
        let den = Complex::new(T::one(), T::zero()) - a.conj() * z;
        let m = (z - a) / den;
        let dm = Complex::new(T::one() - a.norm_sqr(), T::zero()) / (den * den);
        (m, dm)
    }

    /// `w = φ(z) = P(m_a(z))`.
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        let (m, _) = self.automorphism(z);
        let mut acc = Complex::new(T::zero(), T::zero());
        for c in self.poly_coeffs.iter().rev() {
            acc = acc * m + *c;
        }
        acc
    }

    /// `φ'(z) = P'(m_a(z)) · m_a'(z)`.
    pub fn deriv(&self, z: Complex<T>) -> Complex<T> {
        let (m, dm) = self.automorphism(z);
        let mut acc = Complex::new(T::zero(), T::zero());
        for (j, c) in self.poly_coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * m + *c * T::from_usize(j);
        }
        acc * dm
    }

    /// Conformal weight `h(z) = |φ'(z)|²`.
    #[inline]
    pub fn weight(&self, z: Complex<T>) -> T {
        self.deriv(z).norm_sqr()
    }

    fn poly_degree(&self) -> usize {
        self.poly_coeffs
            .iter()
            .rposition(|c| c.re != T::zero() || c.im != T::zero())
            .unwrap_or(0)
    }

    /// Samples `φ'` on a `grid_n × grid_n` polar grid (radii `i/(grid_n−1)`)
    /// and computes winding numbers on `|z| = 1 − 10⁻⁶`.
    pub fn check_univalent(&self, grid_n: usize) -> Result<UnivalenceReport<T>> {
        if grid_n < 16 {
            return Err(Error::arg("grid_n", "need grid_n >= 16"));
        }
        let two_pi = T::PI() + T::PI();
        let mut min_abs = T::infinity();
        let mut re_pos = true;
        for i in 0..grid_n {
            let r = T::from_usize(i) / T::from_usize(grid_n - 1);
            for j in 0..grid_n {
                let th = two_pi * T::from_usize(j) / T::from_usize(grid_n);
                let d = self.deriv(Complex::from_polar(r, th));
                min_abs = min_abs.min(d.norm());
                if !(d.re > T::zero()) {
                    re_pos = false;
                }
            }
        }

        // Boundary samples must resolve both the polynomial degree and the
        // clustering produced by the automorphism near |a| → 1.
        let squeeze = (T::one() + self.moebius_param.norm()) / (T::one() - self.moebius_param.norm());
        let per_turn = (64 * (self.poly_degree() + 1)).max(4096).max(64 * grid_n);
        let samples = (T::from_usize(per_turn) * squeeze).ceil().to_usize().unwrap_or(per_turn);
        let rho = T::one() - T::lit(1e-6);
        let centre = self.eval(Complex::new(T::zero(), T::zero()));
        let winding_of = |f: &dyn Fn(Complex<T>) -> Complex<T>| -> i64 {
            let mut total = T::zero();
            let z0 = Complex::from_polar(rho, T::zero());
            let mut prev = f(z0);
            for s in 1..=samples {
                let th = two_pi * T::from_usize(s) / T::from_usize(samples);
                let cur = f(Complex::from_polar(rho, th));
                total += (cur / prev).arg();
                prev = cur;
            }
            (total / two_pi).round().to_i64().unwrap_or(i64::MIN)
        };
        let winding = winding_of(&|z| self.eval(z) - centre);
        let critical = winding_of(&|z| self.deriv(z));

        let report = UnivalenceReport {
            min_abs_deriv: min_abs,
            re_deriv_positive: re_pos,
            boundary_winding: winding,
            critical_points: critical,
        };
        if !(min_abs > T::lit(1e-12)) || winding != 1 || critical != 0 {
            return Err(Error::UnivalenceSuspect {
                label: self.label.clone(),
                min_abs_deriv: min_abs.to_f64_lossy(),
                winding,
            });
        }
        Ok(report)
    }

    /// Boundary image `φ(e^{iθ})` at `n` equally spaced angles.
    pub fn boundary_image(&self, n: usize) -> Vec<Complex<T>> {
        let two_pi = T::PI() + T::PI();
        (0..n)
            .map(|j| self.eval(Complex::from_polar(T::one(), two_pi * T::from_usize(j) / T::from_usize(n))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    #[test]
    fn eval_examples() {
        let id = ConformalMap::<f64>::identity();
        assert_eq!(id.eval(C::new(0.3, 0.4)), C::new(0.3, 0.4));
        let s = ConformalMap::scale(0.5).unwrap();
        assert_eq!(s.eval(C::new(1.0, 0.0)), C::new(0.5, 0.0));
        let p = ConformalMap::poly_perturb(0.4, 2).unwrap();
        assert_relative_eq!(p.eval(C::new(1.0, 0.0)).re, 1.2, epsilon = 1e-15);
    }

    #[test]
    fn deriv_examples() {
        let id = ConformalMap::<f64>::identity();
        assert_eq!(id.deriv(C::new(-0.2, 0.7)), C::new(1.0, 0.0));
        let s = ConformalMap::scale(0.7).unwrap();
        assert_eq!(s.deriv(C::new(0.1, 0.1)), C::new(0.7, 0.0));
        let a = C::new(0.3, -0.2);
        let m = ConformalMap::moebius(a).unwrap();
        let d = m.deriv(C::new(0.0, 0.0));
        assert_relative_eq!(d.re, 1.0 - a.norm_sqr(), epsilon = 1e-15);
        assert_relative_eq!(d.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn weight_examples() {
        assert_eq!(ConformalMap::<f64>::identity().weight(C::new(0.5, 0.5)), 1.0);
        assert_eq!(ConformalMap::scale(0.5).unwrap().weight(C::new(0.2, 0.0)), 0.25);
        let p = ConformalMap::poly_perturb(0.4, 2).unwrap();
        assert_relative_eq!(p.weight(C::new(0.5, 0.0)), 1.44, epsilon = 1e-14);
    }

    #[test]
    fn deriv_matches_central_differences() {
        let maps = [
            ConformalMap::moebius(C::new(0.3, 0.1)).unwrap(),
            ConformalMap::poly_perturb(0.6, 3).unwrap(),
            ConformalMap::new(
                C::new(-0.2, 0.25),
                vec![C::new(0.1, 0.0), C::new(1.0, 0.2), C::new(0.1, -0.05), C::new(0.02, 0.01)],
                "mixed",
            )
            .unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = 1e-5;
        for map in &maps {
            for _ in 0..100 {
                let r: f64 = 0.95 * rng.gen::<f64>().sqrt();
                let th: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                let z = C::from_polar(r, th);
                let fd = (map.eval(z + h) - map.eval(z - h)) / (2.0 * h);
                let d = map.deriv(z);
                assert!((fd - d).norm() / d.norm() < 1e-6, "{}: {fd} vs {d}", map.label());
                assert_eq!(map.weight(z), d.norm_sqr());
            }
        }
    }

    #[test]
    fn builtins_are_univalent() {
        let id = ConformalMap::<f64>::identity().check_univalent(16).unwrap();
        assert_eq!(id.min_abs_deriv, 1.0);
        assert!(id.re_deriv_positive);
        assert_eq!(id.boundary_winding, 1);
        let p = ConformalMap::poly_perturb(0.4, 2).unwrap().check_univalent(32).unwrap();
        assert!(p.re_deriv_positive);
        ConformalMap::moebius(C::new(0.4, 0.0)).unwrap().check_univalent(32).unwrap();
        ConformalMap::scale(0.5).unwrap().check_univalent(16).unwrap();
    }

    #[test]
    fn zero_linear_coefficient_is_rejected() {
        let m = ConformalMap::new(C::new(0.0, 0.0), vec![C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)], "z^2")
            .unwrap();
        assert!(matches!(m.check_univalent(16), Err(Error::UnivalenceSuspect { .. })));
        let flat = ConformalMap::new(C::new(0.0, 0.0), vec![C::new(1.0, 0.0), C::new(0.0, 0.0)], "const").unwrap();
        assert!(matches!(flat.check_univalent(16), Err(Error::UnivalenceSuspect { .. })));
    }

    #[test]
    fn critical_point_inside_is_rejected() {
        // φ'(z) = 1 + 2z vanishes at z = −1/2.
        let m = ConformalMap::new(C::new(0.0, 0.0), vec![C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(1.0, 0.0)], "bad")
            .unwrap();
        assert!(m.check_univalent(16).is_err());
    }

    #[test]
    fn constructor_preconditions() {
        assert!(ConformalMap::moebius(C::new(1.0, 0.0)).is_err());
        assert!(ConformalMap::<f64>::poly_perturb(1.0, 2).is_err());
        assert!(ConformalMap::<f64>::poly_perturb(0.5, 1).is_err());
        assert!(ConformalMap::<f64>::scale(0.0).is_err());
        assert!(ConformalMap::<f64>::identity().check_univalent(8).is_err());
    }

    #[test]
    fn single_precision_evaluation() {
        let p = ConformalMap::<f32>::poly_perturb(0.4, 2).unwrap();
        assert!((p.weight(Complex::new(0.5f32, 0.0)) - 1.44).abs() < 1e-6);
    }

    proptest::proptest! {
        #[test]
        fn poly_perturb_has_positive_real_derivative(eps in 0.0f64..0.99, k in 2usize..8) {
            let rep = ConformalMap::poly_perturb(eps, k).unwrap().check_univalent(16).unwrap();
            proptest::prop_assert!(rep.re_deriv_positive);
        }
    }
}
