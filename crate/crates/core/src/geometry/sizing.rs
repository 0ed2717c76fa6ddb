//! Target mesh size as a function of position.

use super::{GradingPolicy, PiecewiseBoundary, SizeCap};

/// Evaluates the local target edge length.
///
/// The size is the minimum of
/// - the far-field size `h_far`, replaced by the radial growth rule
///   `h_junction * (1 + |x|)` on domains meshed for exterior problems
///   (where the domain diameter is large and resolution concentrates near
///   the junction),
/// - `h_junction + (grading_ratio - 1) * dist(x, anchor)` for each anchor,
/// - any size caps attached to the boundary (tube interiors).
#[derive(Debug, Clone)]
pub struct SizingField {
    h_far: f64,
    h_junction: f64,
    slope: f64,
    anchors: Vec<[f64; 2]>,
    caps: Vec<SizeCap>,
    radial_growth: bool,
}

impl SizingField {
    pub fn new(boundary: &PiecewiseBoundary, policy: &GradingPolicy) -> Self {
        Self {
            h_far: policy.h_far,
            h_junction: policy.h_junction,
            slope: policy.grading_ratio - 1.0,
            anchors: boundary.anchors.clone(),
            caps: boundary.size_caps.clone(),
            radial_growth: boundary.radial_growth,
        }
    }

    /// Smallest size the field can attain (used for sanity bounds).
    pub fn h_min(&self) -> f64 {
        let mut h = if self.anchors.is_empty() {
            self.h_far
        } else {
            self.h_junction
        };
        if self.radial_growth {
            h = h.min(self.h_junction);
        }
        for c in &self.caps {
            h = h.min(c.h_cap);
        }
        h
    }

    pub fn h(&self, p: [f64; 2]) -> f64 {
        let mut h = if self.radial_growth {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            self.h_junction * (1.0 + r)
        } else {
            self.h_far
        };
        for a in &self.anchors {
            let d = ((p[0] - a[0]).powi(2) + (p[1] - a[1]).powi(2)).sqrt();
            h = h.min(self.h_junction + self.slope * d);
        }
        for c in &self.caps {
            if c.contains(p) {
                h = h.min(c.h_cap);
            }
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_domain, DomainSpec};

    #[test]
    fn size_attains_bounds() {
        let b = build_domain(&DomainSpec::perturbed(2.0, 0.1)).unwrap();
        let policy = GradingPolicy {
            h_far: 0.1,
            h_junction: 0.01,
            grading_ratio: 1.5,
        };
        let s = SizingField::new(&b, &policy);
        // At the mouth anchor the size is h_junction.
        assert!((s.h([0.0, 0.1]) - 0.01).abs() < 1e-14);
        // Far from the mouth it relaxes to h_far.
        assert!((s.h([0.0, 1.9]) - 0.1).abs() < 1e-14);
        // Inside the tube the cap of eps / 2 applies.
        assert!(s.h([-0.5, 0.0]) <= 0.05 + 1e-14);
        // Growth away from an anchor is linear with the grading slope.
        let d = 0.04;
        assert!((s.h([d, 0.1]) - (0.01 + 0.5 * d)).abs() < 1e-14);
    }

    #[test]
    fn radial_growth_controls_exterior_size() {
        let b = build_domain(&DomainSpec::exterior_truncated(16.0)).unwrap();
        let policy = GradingPolicy {
            h_far: 0.05,
            h_junction: 0.02,
            grading_ratio: 1.5,
        };
        let s = SizingField::new(&b, &policy);
        // Near the origin the radial rule binds at h_junction.
        assert!(s.h([0.0, 0.0]) <= 0.02 + 1e-14);
        // Far out the size grows linearly with radius.
        let h_far_out = s.h([0.0, 15.0]);
        assert!((h_far_out - 0.02 * 16.0).abs() < 1e-12, "{h_far_out}");
    }
}
