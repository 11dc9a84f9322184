//! Symmetric Gauss rules on the reference triangle and a 1D composite rule.

use crate::error::{Error, Result};

/// Quadrature rule on a triangle in barycentric form. Weights sum to one and
/// are scaled by the cell area at the use site.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    /// Polynomial degree integrated exactly.
    pub order: u32,
}

impl QuadratureRule {
    /// Smallest built-in rule exact for polynomials of degree `order`.
    /// Built-in exactness orders are 1, 2, 4 and 6.
    pub fn for_order(order: u32) -> Result<Self> {
        match order {
            0 | 1 => Ok(Self::centroid()),
            2 => Ok(Self::order2()),
            3 | 4 => Ok(Self::order4()),
            5 | 6 => Ok(Self::order6()),
            _ => Err(Error::InvalidArgument(format!(
                "no triangle quadrature rule of order {order} (max 6)"
            ))),
        }
    }

    pub fn centroid() -> Self {
        Self {
            points: vec![[1.0 / 3.0; 3]],
            weights: vec![1.0],
            order: 1,
        }
    }

    pub fn order2() -> Self {
        let mut rule = Self::empty(2);
        rule.push_orbit3(2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0);
        rule
    }

    pub fn order4() -> Self {
        let mut rule = Self::empty(4);
        rule.push_orbit3(0.108103018168070, 0.445948490915965, 0.223381589678011);
        rule.push_orbit3(0.816847572980459, 0.091576213509771, 0.109951743655322);
        rule
    }

    pub fn order6() -> Self {
        let mut rule = Self::empty(6);
        rule.push_orbit3(0.501426509658179, 0.249286745170910, 0.116786275726379);
        rule.push_orbit3(0.873821971016996, 0.063089014491502, 0.050844906370207);
        rule.push_orbit6(
            0.053145049844817,
            0.310352451033784,
            0.636502499121399,
            0.082851075618374,
        );
        rule
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    fn empty(order: u32) -> Self {
        Self {
            points: Vec::new(),
            weights: Vec::new(),
            order,
        }
    }

    fn push_orbit3(&mut self, a: f64, b: f64, w: f64) {
        for p in [[a, b, b], [b, a, b], [b, b, a]] {
            self.points.push(p);
            self.weights.push(w);
        }
    }

    fn push_orbit6(&mut self, a: f64, b: f64, c: f64, w: f64) {
        for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
            self.points.push(p);
            self.weights.push(w);
        }
    }
}

const GAUSS4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GAUSS4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_8,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_8,
];

/// Composite 4-point Gauss-Legendre rule on `[a, b]` with `panels` equal
/// panels. Returns `(node, weight)` pairs in increasing node order.
pub fn composite_gauss(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let width = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(4 * panels);
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * width;
        for (s, w) in GAUSS4_NODES.iter().zip(GAUSS4_WEIGHTS) {
            out.push((mid + 0.5 * width * s, 0.5 * width * w));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    // Integral of x^a y^b over the unit right triangle is a! b! / (a + b + 2)!
    fn monomial_exact(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn rules_integrate_monomials_up_to_their_order() {
        for rule in [
            QuadratureRule::centroid(),
            QuadratureRule::order2(),
            QuadratureRule::order4(),
            QuadratureRule::order6(),
        ] {
            assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            for deg in 0..=rule.order {
                for a in 0..=deg {
                    let b = deg - a;
                    let approx: f64 = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(p, w)| 0.5 * w * p[1].powi(a as i32) * p[2].powi(b as i32))
                        .sum();
                    let exact = monomial_exact(a, b);
                    assert!(
                        (approx - exact).abs() < 1e-14,
                        "order {} rule fails on x^{a} y^{b}: {approx} vs {exact}",
                        rule.order
                    );
                }
            }
        }
    }

    #[test]
    fn order_selection() {
        assert_eq!(QuadratureRule::for_order(3).unwrap().order, 4);
        assert_eq!(QuadratureRule::for_order(6).unwrap().len(), 12);
        assert!(QuadratureRule::for_order(7).is_err());
    }

    #[test]
    fn composite_gauss_integrates_cosine_bump() {
        let nodes = composite_gauss(-1.0, 1.0, 16);
        assert_eq!(nodes.len(), 64);
        let total: f64 = nodes
            .iter()
            .map(|&(s, w)| w * 0.5 * (1.0 + (std::f64::consts::PI * s).cos()))
            .sum();
        assert!((total - 1.0).abs() < 1e-14);
    }
}
