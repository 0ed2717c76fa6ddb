//! Reference quadrature rules for triangles, segments, and circular arcs.
//!
//! Triangle rules are given in barycentric coordinates with weights summing
//! to one; integrate by `area * sum(w_i * f(p_i))`. Segment rules live on
//! [0, 1] with weights summing to one.

/// A triangle rule: barycentric points and weights summing to one.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

/// Symmetric rule exact for polynomials up to the requested degree
/// (supported degrees: 1, 2, 4, 6; higher requests fall back to 6).
pub fn triangle_rule(degree: usize) -> TriangleRule {
    match degree {
        0 | 1 => TriangleRule {
            points: vec![[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]],
            weights: vec![1.0],
        },
        2 => {
            let p = |a: f64| [1.0 - 2.0 * a, a, a];
            TriangleRule {
                points: vec![
                    p(1.0 / 6.0),
                    [1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
                    [1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
                ],
                weights: vec![1.0 / 3.0; 3],
            }
        }
        3 | 4 => {
            let a = 0.445948490915965;
            let b = 0.091576213509771;
            let wa = 0.223381589678011;
            let wb = 0.109951743655322;
            TriangleRule {
                points: vec![
                    [1.0 - 2.0 * a, a, a],
                    [a, 1.0 - 2.0 * a, a],
                    [a, a, 1.0 - 2.0 * a],
                    [1.0 - 2.0 * b, b, b],
                    [b, 1.0 - 2.0 * b, b],
                    [b, b, 1.0 - 2.0 * b],
                ],
                weights: vec![wa, wa, wa, wb, wb, wb],
            }
        }
        _ => {
            // 12-point rule, exact through degree 6.
            let a1 = 0.063089014491502;
            let a2 = 0.249286745170910;
            let a3 = 0.310352451033785;
            let b3 = 0.053145049844816;
            let w1 = 0.050844906370207;
            let w2 = 0.116786275726379;
            let w3 = 0.082851075618374;
            let mut points = vec![
                [1.0 - 2.0 * a1, a1, a1],
                [a1, 1.0 - 2.0 * a1, a1],
                [a1, a1, 1.0 - 2.0 * a1],
                [1.0 - 2.0 * a2, a2, a2],
                [a2, 1.0 - 2.0 * a2, a2],
                [a2, a2, 1.0 - 2.0 * a2],
            ];
            let c3 = 1.0 - a3 - b3;
            for perm in [
                [a3, b3, c3],
                [b3, a3, c3],
                [a3, c3, b3],
                [b3, c3, a3],
                [c3, a3, b3],
                [c3, b3, a3],
            ] {
                points.push(perm);
            }
            let mut weights = vec![w1, w1, w1, w2, w2, w2];
            weights.extend_from_slice(&[w3; 6]);
            TriangleRule { points, weights }
        }
    }
}

/// Gauss-Legendre nodes and weights on [0, 1]; weights sum to one.
/// Supported sizes: 1 through 5 and 8 (other sizes round up).
pub fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    // Nodes/weights on [-1, 1], mapped below.
    let (xs, ws): (Vec<f64>, Vec<f64>) = match n {
        0 | 1 => (vec![0.0], vec![2.0]),
        2 => {
            let a = 1.0 / 3.0_f64.sqrt();
            (vec![-a, a], vec![1.0, 1.0])
        }
        3 => {
            let a = (3.0 / 5.0_f64).sqrt();
            (vec![-a, 0.0, a], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
        }
        4 => (
            vec![
                -0.8611363115940526,
                -0.3399810435848563,
                0.3399810435848563,
                0.8611363115940526,
            ],
            vec![
                0.3478548451374538,
                0.6521451548625461,
                0.6521451548625461,
                0.3478548451374538,
            ],
        ),
        5 => (
            vec![
                -0.9061798459386640,
                -0.5384693101056831,
                0.0,
                0.5384693101056831,
                0.9061798459386640,
            ],
            vec![
                0.2369268850561891,
                0.4786286704993665,
                0.5688888888888889,
                0.4786286704993665,
                0.2369268850561891,
            ],
        ),
        _ => (
            vec![
                -0.9602898564975363,
                -0.7966664774136267,
                -0.5255324099163290,
                -0.1834346424956498,
                0.1834346424956498,
                0.5255324099163290,
                0.7966664774136267,
                0.9602898564975363,
            ],
            vec![
                0.1012285362903763,
                0.2223810344533745,
                0.3137066458778873,
                0.3626837833783620,
                0.3626837833783620,
                0.3137066458778873,
                0.2223810344533745,
                0.1012285362903763,
            ],
        ),
    };
    let nodes = xs.iter().map(|x| 0.5 * (x + 1.0)).collect();
    let weights = ws.iter().map(|w| 0.5 * w).collect();
    (nodes, weights)
}

/// Composite Gauss rule on an origin-centered arc of radius `r` from
/// `theta0` to `theta1`; returns points with arc-length weights summing to
/// `r * |theta1 - theta0|` exactly.
pub fn arc_quadrature(r: f64, theta0: f64, theta1: f64, n_panels: usize) -> Vec<([f64; 2], f64)> {
    let n_panels = n_panels.max(1);
    let (nodes, weights) = gauss_legendre_01(4);
    let dth = (theta1 - theta0) / n_panels as f64;
    let mut out = Vec::with_capacity(4 * n_panels);
    for p in 0..n_panels {
        let a = theta0 + p as f64 * dth;
        for (t, w) in nodes.iter().zip(&weights) {
            let th = a + t * dth;
            out.push(([r * th.sin(), r * th.cos()], w * dth.abs() * r));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate_monomial(rule: &TriangleRule, p: u32, q: u32) -> f64 {
        // Integral over the unit reference triangle {x, y >= 0, x + y <= 1}.
        let area = 0.5;
        rule.points
            .iter()
            .zip(&rule.weights)
            .map(|(l, w)| {
                let x = l[1];
                let y = l[2];
                w * x.powi(p as i32) * y.powi(q as i32)
            })
            .sum::<f64>()
            * area
    }

    fn exact_monomial(p: u32, q: u32) -> f64 {
        // int_T x^p y^q = p! q! / (p + q + 2)!
        let fact = |n: u32| (1..=n).map(|k| k as f64).product::<f64>().max(1.0);
        fact(p) * fact(q) / fact(p + q + 2)
    }

    #[test]
    fn triangle_rules_integrate_monomials_exactly() {
        for degree in [1usize, 2, 4, 6] {
            let rule = triangle_rule(degree);
            assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            for p in 0..=degree as u32 {
                for q in 0..=(degree as u32 - p) {
                    let got = integrate_monomial(&rule, p, q);
                    let want = exact_monomial(p, q);
                    assert!(
                        (got - want).abs() < 1e-14,
                        "degree {degree} monomial x^{p} y^{q}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn gauss_rules_integrate_polynomials() {
        for n in [2usize, 3, 4, 5, 8] {
            let (x, w) = gauss_legendre_01(n);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            for p in 0..(2 * n) as u32 {
                let got: f64 = x
                    .iter()
                    .zip(&w)
                    .map(|(x, w)| w * x.powi(p as i32))
                    .sum();
                let want = 1.0 / (p as f64 + 1.0);
                assert!((got - want).abs() < 1e-13, "n={n} x^{p}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn arc_rule_length_and_moments() {
        let pts = arc_quadrature(2.0, std::f64::consts::PI, 0.0, 16);
        let len: f64 = pts.iter().map(|(_, w)| w).sum();
        assert!((len - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        // int over half-circle of x1 ds = int_0^pi R sin(th) R dth = 2 R^2.
        let m1: f64 = pts.iter().map(|(p, w)| p[0] * w).sum();
        assert!((m1 - 8.0).abs() < 1e-10, "moment {m1}");
    }
}
