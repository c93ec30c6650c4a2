//! Distance reports from fixed anchors and position recovery by
//! trilateration.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::ChannelError;
use crate::geometry::Vec2;

/// Three fixed sensor nodes. Must not be collinear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 2]; 3]", into = "[[f64; 2]; 3]")]
pub struct AnchorSet {
    anchors: [Vec2; 3],
}

impl Default for AnchorSet {
    fn default() -> Self {
        Self {
            anchors: [
                Vec2::new(0.0, 0.0),
                Vec2::new(60.0, 0.0),
                Vec2::new(0.0, 60.0),
            ],
        }
    }
}

impl AnchorSet {
    pub fn new(anchors: [Vec2; 3]) -> Result<Self, ChannelError> {
        if anchors.iter().any(|a| !a.is_finite()) || is_degenerate(&anchors) {
            return Err(ChannelError::DegenerateAnchors);
        }
        Ok(Self { anchors })
    }

    pub fn positions(&self) -> &[Vec2; 3] {
        &self.anchors
    }

    pub fn get(&self, i: usize) -> Vec2 {
        self.anchors[i]
    }
}

impl TryFrom<[[f64; 2]; 3]> for AnchorSet {
    type Error = ChannelError;
    fn try_from(v: [[f64; 2]; 3]) -> Result<Self, Self::Error> {
        AnchorSet::new(v.map(|[x, y]| Vec2::new(x, y)))
    }
}

impl From<AnchorSet> for [[f64; 2]; 3] {
    fn from(a: AnchorSet) -> Self {
        a.anchors.map(|p| [p.x, p.y])
    }
}

/// Twice the signed triangle area, relative to the squared spread of the
/// anchors. Below this the 2×2 system is numerically singular.
const DEGENERACY_TOL: f64 = 1e-9;

fn cross(anchors: &[Vec2; 3]) -> f64 {
    let u = anchors[1] - anchors[0];
    let v = anchors[2] - anchors[0];
    u.x * v.y - u.y * v.x
}

fn is_degenerate(anchors: &[Vec2; 3]) -> bool {
    let scale = (anchors[1] - anchors[0])
        .norm()
        .max((anchors[2] - anchors[0]).norm())
        .max((anchors[2] - anchors[1]).norm());
    scale == 0.0 || cross(anchors).abs() <= DEGENERACY_TOL * scale * scale
}

/// Euclidean distance plus zero-mean Gaussian noise of std `sigma`.
pub fn measure_distance<R: Rng + ?Sized>(
    anchor: Vec2,
    drone_pos: Vec2,
    sigma: f64,
    rng: &mut R,
) -> f64 {
    let d = anchor.distance(drone_pos);
    if sigma > 0.0 {
        let noise = Normal::new(0.0, sigma).expect("sigma is finite and positive");
        d + noise.sample(rng)
    } else {
        d
    }
}

/// Position from three ranges.
///
/// Subtracting the first circle equation from the other two leaves a 2×2
/// linear system, solved directly. Exact for consistent ranges; for noisy
/// ranges this is the point satisfying both difference equations, not a
/// nonlinear least-squares fit.
pub fn trilaterate(anchors: &AnchorSet, d: [f64; 3]) -> Result<Vec2, ChannelError> {
    let a = &anchors.anchors;
    if is_degenerate(a) {
        return Err(ChannelError::DegenerateAnchors);
    }
    // Work relative to the first anchor to keep magnitudes small.
    let p1 = a[1] - a[0];
    let p2 = a[2] - a[0];
    let b1 = 0.5 * (d[0] * d[0] - d[1] * d[1] + p1.x * p1.x + p1.y * p1.y);
    let b2 = 0.5 * (d[0] * d[0] - d[2] * d[2] + p2.x * p2.x + p2.y * p2.y);
    let det = p1.x * p2.y - p1.y * p2.x;
    let x = (b1 * p2.y - b2 * p1.y) / det;
    let y = (p1.x * b2 - p2.x * b1) / det;
    Ok(a[0] + Vec2::new(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn distance_examples() {
        let mut r = rng::stream(1, rng::labels::RANGING, 0);
        let d = measure_distance(Vec2::new(0.0, 0.0), Vec2::new(10.0, 10.0), 0.0, &mut r);
        assert!((d - 200f64.sqrt()).abs() < 1e-12);
        assert!((d - 14.1421).abs() < 1e-4);
        let p = Vec2::new(3.0, 4.0);
        assert_eq!(measure_distance(p, p, 0.0, &mut r), 0.0);
    }

    #[test]
    fn noisy_distance_is_unbiased() {
        let mut r = rng::stream(2, rng::labels::RANGING, 0);
        let sigma = 0.5;
        let n = 100_000;
        let truth = 200f64.sqrt();
        let mean = (0..n)
            .map(|_| measure_distance(Vec2::new(0.0, 0.0), Vec2::new(10.0, 10.0), sigma, &mut r))
            .sum::<f64>()
            / n as f64;
        assert!(
            (mean - truth).abs() < 3.0 * sigma / (n as f64).sqrt(),
            "{mean}"
        );
    }

    #[test]
    fn recovers_known_position() {
        let anchors = AnchorSet::default();
        let p = Vec2::new(10.0, 10.0);
        let d = anchors.positions().map(|a| a.distance(p));
        let q = trilaterate(&anchors, d).unwrap();
        assert!(q.distance(p) < 1e-9);

        // a drone sitting on an anchor
        let a1 = anchors.get(1);
        let d = anchors.positions().map(|a| a.distance(a1));
        assert!(trilaterate(&anchors, d).unwrap().distance(a1) < 1e-9);
    }

    #[test]
    fn collinear_anchors_rejected() {
        let line = [
            Vec2::new(0.0, 0.0),
            Vec2::new(30.0, 0.0),
            Vec2::new(60.0, 0.0),
        ];
        assert_eq!(AnchorSet::new(line), Err(ChannelError::DegenerateAnchors));
        let forced = AnchorSet { anchors: line };
        assert_eq!(
            trilaterate(&forced, [1.0, 1.0, 1.0]),
            Err(ChannelError::DegenerateAnchors)
        );
        assert_eq!(
            ChannelError::DegenerateAnchors.to_string(),
            "degenerate anchor geometry"
        );
    }

    #[test]
    fn anchors_serde_validates() {
        let ok: AnchorSet = serde_json::from_str("[[0,0],[60,0],[0,60]]").unwrap();
        assert_eq!(ok, AnchorSet::default());
        assert!(serde_json::from_str::<AnchorSet>("[[0,0],[30,0],[60,0]]").is_err());
    }
}
