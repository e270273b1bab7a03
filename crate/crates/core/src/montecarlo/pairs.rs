//! Canonical pairs of distant two-particle cubes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::lattice::{cubes_ell_distant, Cube, DistanceMode, Point};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairKind {
    #[serde(rename = "NI")]
    NonInteractive,
    #[serde(rename = "I")]
    Interactive,
    /// First cube non-interactive, second interactive.
    #[serde(rename = "mixed")]
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubePair {
    pub a: Cube,
    pub b: Cube,
    pub kind: PairKind,
}

fn two_point(x1: i64, x2: i64, d: usize) -> Point {
    let pad = |x: i64| {
        let mut v = vec![0; d];
        v[0] = x;
        Point::new(v)
    };
    Point::join(&pad(x1), &pad(x2))
}

impl CubePair {
    /// Extremal representatives at symmetrized center distance `8L + 1`
    /// (first coordinate of each particle; the others are zero):
    ///
    /// * NI: `(0, a)` and `(0, a + 8L + 1)` with `a = 2L + r0 + 1`;
    /// * I: `(0, 0)` and `(8L + 1, 8L + 1)`;
    /// * mixed: `(0, a)` and `(b, b)` with `b = a + 8L + 1`.
    pub fn canonical(kind: PairKind, l: usize, d: usize, r0: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Unconstructible("d must be positive".into()));
        }
        let li = l as i64;
        let a = 2 * li + r0 as i64 + 1;
        let sep = 8 * li + 1;
        let (u, v) = match kind {
            PairKind::NonInteractive => (two_point(0, a, d), two_point(0, a + sep, d)),
            PairKind::Interactive => (two_point(0, 0, d), two_point(sep, sep, d)),
            PairKind::Mixed => (two_point(0, a, d), two_point(a + sep, a + sep, d)),
        };
        Self::custom(u, v, l, kind, r0)
    }

    /// A pair with explicit centers, checked to be `L`-distant and of the
    /// requested kind.
    pub fn custom(u: Point, v: Point, l: usize, kind: PairKind, r0: u64) -> Result<Self> {
        if u.dim() != v.dim() || u.dim() % 2 != 0 || u.dim() == 0 {
            return Err(Error::Unconstructible(format!(
                "centers {u} and {v} are not two-particle points of one dimension"
            )));
        }
        let a = Cube::two_particle(u, l);
        let b = Cube::two_particle(v, l);
        if !cubes_ell_distant(&a, &b, l as u64, DistanceMode::Center)? {
            return Err(Error::Unconstructible(format!(
                "cubes at {} and {} are not {l}-distant",
                a.center(),
                b.center()
            )));
        }
        let (ia, ib) = (a.is_interactive(r0), b.is_interactive(r0));
        let ok = match kind {
            PairKind::NonInteractive => !ia && !ib,
            PairKind::Interactive => ia && ib,
            PairKind::Mixed => !ia && ib,
        };
        if !ok {
            return Err(Error::Unconstructible(format!(
                "cubes at {} (interactive: {ia}) and {} (interactive: {ib}) do not form a {kind:?} pair",
                a.center(),
                b.center()
            )));
        }
        Ok(CubePair { a, b, kind })
    }

    pub fn radius(&self) -> usize {
        self.a.radius()
    }

    /// Single-particle sites whose disorder enters either cube, sorted.
    pub fn sites(&self) -> Vec<Point> {
        let mut s: BTreeSet<Point> = self.a.projection_sites();
        s.extend(self.b.projection_sites());
        s.into_iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{projections_disjoint, sym_distance};

    #[test]
    fn canonical_pairs_have_the_promised_geometry() {
        for l in 1..6 {
            for r0 in 0..3 {
                for kind in [PairKind::NonInteractive, PairKind::Interactive, PairKind::Mixed] {
                    let pair = CubePair::canonical(kind, l, 1, r0).unwrap();
                    let ds = sym_distance(pair.a.center(), pair.b.center()).unwrap();
                    assert!(ds > 8 * l as u64);
                    if kind == PairKind::Interactive {
                        assert_eq!(ds, 8 * l as u64 + 1);
                        if l as u64 > r0 {
                            assert!(projections_disjoint(&pair.a, &pair.b).unwrap());
                        }
                    }
                }
            }
        }
        let p = CubePair::canonical(PairKind::Interactive, 2, 1, 1).unwrap();
        assert_eq!(p.sites().len(), 10);
        let p = CubePair::canonical(PairKind::NonInteractive, 1, 2, 0).unwrap();
        assert_eq!(p.a.center().dim(), 4);
    }

    #[test]
    fn custom_pairs_are_validated() {
        let err = CubePair::custom(Point::new(vec![0, 0]), Point::new(vec![3, 3]), 1, PairKind::Interactive, 0);
        assert!(matches!(err, Err(Error::Unconstructible(_))));
        let err = CubePair::custom(Point::new(vec![0, 0]), Point::new(vec![20, 20]), 1, PairKind::NonInteractive, 0);
        assert!(matches!(err, Err(Error::Unconstructible(_))));
        assert!(CubePair::custom(Point::new(vec![0, 0]), Point::new(vec![20, 20]), 1, PairKind::Interactive, 0).is_ok());
    }
}
