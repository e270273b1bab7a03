//! Integer-lattice geometry: points, max-norm cubes, boundaries and the
//! symmetrized distance of two-particle configurations.
//!
//! A two-particle point in `ℤ^d × ℤ^d` is stored as one `2d`-vector whose
//! first half is `x₁` and second half `x₂`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<i64>);

impl Point {
    pub fn new(coords: Vec<i64>) -> Self {
        Point(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0; dim])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    fn check_dim(&self, other: &Point) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    /// `|x - y|` in the max norm.
    pub fn max_dist(&self, other: &Point) -> u64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.abs_diff(*b))
            .max()
            .unwrap_or(0)
    }

    /// `|x - y|₁`.
    pub fn l1_dist(&self, other: &Point) -> u64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a.abs_diff(*b)).sum()
    }

    /// Splits a two-particle point into `(x₁, x₂)`.
    pub fn split(&self) -> (Point, Point) {
        let d = self.dim() / 2;
        (Point(self.0[..d].to_vec()), Point(self.0[d..].to_vec()))
    }

    pub fn join(x1: &Point, x2: &Point) -> Point {
        let mut c = x1.0.clone();
        c.extend_from_slice(&x2.0);
        Point(c)
    }

    /// Particle exchange `S(x₁, x₂) = (x₂, x₁)`.
    pub fn exchanged(&self) -> Point {
        let (a, b) = self.split();
        Point::join(&b, &a)
    }

    pub fn offset(&self, axis: usize, delta: i64) -> Point {
        let mut c = self.0.clone();
        c[axis] += delta;
        Point(c)
    }
}

impl From<Vec<i64>> for Point {
    fn from(v: Vec<i64>) -> Self {
        Point(v)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParticleKind {
    One,
    Two,
}

impl fmt::Display for ParticleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParticleKind::One => write!(f, "one-particle"),
            ParticleKind::Two => write!(f, "two-particle"),
        }
    }
}

/// The max-norm ball `C_L(u) = { x : |x - u| ≤ L }`.
///
/// Sites are enumerated lexicographically with the first coordinate varying
/// slowest; this order is the matrix index order used by every assembled
/// operator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cube {
    center: Point,
    radius: usize,
    kind: ParticleKind,
}

impl Cube {
    pub fn one_particle(center: Point, radius: usize) -> Self {
        Cube {
            center,
            radius,
            kind: ParticleKind::One,
        }
    }

    /// Panics if `center` has odd dimension.
    pub fn two_particle(center: Point, radius: usize) -> Self {
        assert!(
            center.dim() % 2 == 0 && center.dim() > 0,
            "two-particle centers need even dimension"
        );
        Cube {
            center,
            radius,
            kind: ParticleKind::Two,
        }
    }

    pub fn new(center: Point, radius: usize, kind: ParticleKind) -> Self {
        match kind {
            ParticleKind::One => Cube::one_particle(center, radius),
            ParticleKind::Two => Cube::two_particle(center, radius),
        }
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn kind(&self) -> ParticleKind {
        self.kind
    }

    /// Lattice dimension `n` of the cube (`d` or `2d`).
    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Single-particle dimension `d`.
    pub fn d(&self) -> usize {
        match self.kind {
            ParticleKind::One => self.dim(),
            ParticleKind::Two => self.dim() / 2,
        }
    }

    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn len(&self) -> usize {
        self.side().pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim() && self.center.max_dist(p) <= self.radius as u64
    }

    /// True when `other ⊆ self`.
    pub fn contains_cube(&self, other: &Cube) -> bool {
        other.dim() == self.dim()
            && other.radius <= self.radius
            && self.center.max_dist(&other.center) + other.radius as u64 <= self.radius as u64
    }

    /// Matrix index of a site, or `None` outside the cube.
    pub fn index_of(&self, p: &Point) -> Option<usize> {
        if !self.contains(p) {
            return None;
        }
        let side = self.side() as i64;
        let mut idx = 0i64;
        for (x, c) in p.coords().iter().zip(self.center.coords()) {
            idx = idx * side + (x - c + self.radius as i64);
        }
        Some(idx as usize)
    }

    pub fn site(&self, mut index: usize) -> Point {
        let side = self.side();
        let mut coords = vec![0i64; self.dim()];
        for axis in (0..self.dim()).rev() {
            let off = (index % side) as i64;
            index /= side;
            coords[axis] = self.center.coords()[axis] - self.radius as i64 + off;
        }
        Point(coords)
    }

    /// All sites in index order.
    pub fn sites(&self) -> Vec<Point> {
        (0..self.len()).map(|i| self.site(i)).collect()
    }

    /// Index of the center site.
    pub fn center_index(&self) -> usize {
        (self.len() - 1) / 2
    }

    /// Indices of the in-cube nearest neighbours of site `index`.
    pub fn neighbor_indices(&self, index: usize) -> Vec<usize> {
        let side = self.side();
        let mut out = Vec::with_capacity(2 * self.dim());
        let mut stride = 1usize;
        let mut rest = index;
        for _ in 0..self.dim() {
            let off = rest % side;
            rest /= side;
            if off > 0 {
                out.push(index - stride);
            }
            if off + 1 < side {
                out.push(index + stride);
            }
            stride *= side;
        }
        out.sort_unstable();
        out
    }

    /// Outer boundary `∂⁺` (sites outside with an ℓ¹-neighbour inside) and
    /// inner boundary `∂⁻ = { v ∈ C : |v - u| = L }`.
    pub fn boundaries(&self) -> Boundaries {
        let mut outer = BTreeSet::new();
        let mut inner = BTreeSet::new();
        let r = self.radius as u64;
        for site in self.sites() {
            if self.center.max_dist(&site) == r {
                inner.insert(site.clone());
                for axis in 0..self.dim() {
                    for delta in [-1, 1] {
                        let q = site.offset(axis, delta);
                        if !self.contains(&q) {
                            outer.insert(q);
                        }
                    }
                }
            }
        }
        Boundaries { outer, inner }
    }

    /// Indices of the inner boundary `∂⁻`, ascending.
    pub fn inner_boundary_indices(&self) -> Vec<usize> {
        let r = self.radius as u64;
        (0..self.len())
            .filter(|&i| self.center.max_dist(&self.site(i)) == r)
            .collect()
    }

    /// Centers `y` such that `C_ell(y) ⊆ self`.
    pub fn subcube_centers(&self, ell: usize) -> Vec<Point> {
        if ell > self.radius {
            return Vec::new();
        }
        Cube::new(self.center.clone(), self.radius - ell, self.kind).sites()
    }

    pub fn subcube(&self, center: Point, radius: usize) -> Cube {
        Cube::new(center, radius, self.kind)
    }

    /// The single-particle factors `(C_L(u₁), C_L(u₂))` of a two-particle cube.
    pub fn projections(&self) -> Result<(Cube, Cube)> {
        if self.kind != ParticleKind::Two {
            return Err(Error::WrongParticleKind {
                expected: ParticleKind::Two,
            });
        }
        let (u1, u2) = self.center.split();
        Ok((
            Cube::one_particle(u1, self.radius),
            Cube::one_particle(u2, self.radius),
        ))
    }

    /// Single-particle sites whose disorder values enter the cube's
    /// Hamiltonian: the cube itself, or `ΠC = C_L(u₁) ∪ C_L(u₂)`.
    pub fn projection_sites(&self) -> BTreeSet<Point> {
        match self.kind {
            ParticleKind::One => self.sites().into_iter().collect(),
            ParticleKind::Two => {
                let (a, b) = self.projections().expect("two-particle");
                a.sites().into_iter().chain(b.sites()).collect()
            }
        }
    }

    /// Smallest `|x₁ - x₂|` over the cube's sites (two-particle only).
    pub fn min_particle_gap(&self) -> Option<u64> {
        if self.kind != ParticleKind::Two {
            return None;
        }
        let (u1, u2) = self.center.split();
        let two_l = 2 * self.radius as u64;
        Some(
            u1.coords()
                .iter()
                .zip(u2.coords())
                .map(|(a, b)| a.abs_diff(*b).saturating_sub(two_l))
                .max()
                .unwrap_or(0),
        )
    }

    /// `C ∩ 𝔻_{r0} ≠ ∅`. One-particle cubes are never interactive.
    pub fn is_interactive(&self, r0: u64) -> bool {
        self.min_particle_gap().is_some_and(|g| g <= r0)
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C_{}{}", self.radius, self.center)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Boundaries {
    pub outer: BTreeSet<Point>,
    pub inner: BTreeSet<Point>,
}

/// `d_S(x, y) = min(|x - y|, |Sx - y|)`.
pub fn sym_distance(x: &Point, y: &Point) -> Result<u64> {
    x.check_dim(y)?;
    if x.dim() % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "symmetrized distance needs two-particle points, got dimension {}",
            x.dim()
        )));
    }
    Ok(x.max_dist(y).min(x.exchanged().max_dist(y)))
}

/// `d_S(a, b) > 8ℓ`.
pub fn are_ell_distant(a: &Point, b: &Point, ell: u64) -> Result<bool> {
    Ok(sym_distance(a, b)? > 8 * ell)
}

/// How the `ℓ`-distant test is applied to a pair of cubes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMode {
    /// Symmetrized distance between the centers.
    #[default]
    Center,
    /// Symmetrized distance between the cubes as sets.
    Set,
}

fn box_gap(u: &Point, v: &Point, reach: u64) -> u64 {
    u.coords()
        .iter()
        .zip(v.coords())
        .map(|(a, b)| a.abs_diff(*b).saturating_sub(reach))
        .max()
        .unwrap_or(0)
}

/// Symmetrized set distance `min_{x∈A, y∈B} d_S(x, y)` of two two-particle cubes.
pub fn cube_sym_set_distance(a: &Cube, b: &Cube) -> Result<u64> {
    a.center.check_dim(&b.center)?;
    let reach = (a.radius + b.radius) as u64;
    // S maps C_L(u) onto C_L(Su).
    Ok(box_gap(&a.center, &b.center, reach).min(box_gap(&a.center.exchanged(), &b.center, reach)))
}

pub fn cubes_ell_distant(a: &Cube, b: &Cube, ell: u64, mode: DistanceMode) -> Result<bool> {
    let dist = match mode {
        DistanceMode::Center => sym_distance(a.center(), b.center())?,
        DistanceMode::Set => cube_sym_set_distance(a, b)?,
    };
    Ok(dist > 8 * ell)
}

/// `ΠC₁ ∩ ΠC₂ = ∅` for two two-particle cubes.
pub fn projections_disjoint(a: &Cube, b: &Cube) -> Result<bool> {
    a.center.check_dim(&b.center)?;
    let (a1, a2) = a.projections()?;
    let (b1, b2) = b.projections()?;
    let meet = |x: &Cube, y: &Cube| x.center.max_dist(&y.center) <= (x.radius + y.radius) as u64;
    Ok(!(meet(&a1, &b1) || meet(&a1, &b2) || meet(&a2, &b1) || meet(&a2, &b2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> Point {
        Point::new(c.to_vec())
    }

    #[test]
    fn single_site_cube() {
        let c = Cube::one_particle(p(&[0]), 0);
        assert_eq!(c.sites(), vec![p(&[0])]);
        assert_eq!(c.index_of(&p(&[0])), Some(0));
        let b = c.boundaries();
        assert_eq!(b.outer, [p(&[-1]), p(&[1])].into_iter().collect());
        assert_eq!(b.inner, [p(&[0])].into_iter().collect());
    }

    #[test]
    fn one_particle_enumeration_and_boundaries() {
        let c = Cube::one_particle(p(&[0]), 1);
        assert_eq!(c.sites(), vec![p(&[-1]), p(&[0]), p(&[1])]);
        let b = c.boundaries();
        assert_eq!(b.outer, [p(&[-2]), p(&[2])].into_iter().collect());
        assert_eq!(b.inner, [p(&[-1]), p(&[1])].into_iter().collect());
    }

    #[test]
    fn two_particle_grid() {
        let c = Cube::two_particle(p(&[0, 0]), 1);
        let sites = c.sites();
        assert_eq!(sites.len(), 9);
        assert_eq!(sites[0], p(&[-1, -1]));
        assert_eq!(sites[8], p(&[1, 1]));
        assert_eq!(sites[1], p(&[-1, 0]));
        let inner = c.boundaries().inner;
        assert_eq!(inner.len(), 8);
        assert!(!inner.contains(&p(&[0, 0])));
        assert_eq!(c.center_index(), 4);
    }

    #[test]
    fn symmetrized_distance_examples() {
        assert_eq!(sym_distance(&p(&[1, 5]), &p(&[5, 1])).unwrap(), 0);
        // |x - y| = 3, |Sx - y| = 3
        assert_eq!(sym_distance(&p(&[0, 0]), &p(&[3, -3])).unwrap(), 3);
        assert_eq!(sym_distance(&p(&[2, 7]), &p(&[2, 7])).unwrap(), 0);
        assert!(sym_distance(&p(&[0, 0]), &p(&[0, 0, 0, 0])).is_err());
        assert!(sym_distance(&p(&[0]), &p(&[1])).is_err());
    }

    #[test]
    fn ell_distant_is_strict() {
        assert!(!are_ell_distant(&p(&[0, 0]), &p(&[8, 8]), 1).unwrap());
        assert!(are_ell_distant(&p(&[0, 0]), &p(&[9, 9]), 1).unwrap());
        assert!(!are_ell_distant(&p(&[0, 0]), &p(&[16, 0]), 2).unwrap());
        assert!(are_ell_distant(&p(&[0, 0]), &p(&[17, 0]), 2).unwrap());
    }

    #[test]
    fn interactive_examples() {
        assert!(Cube::two_particle(p(&[0, 3]), 1).is_interactive(1));
        assert!(!Cube::two_particle(p(&[0, 10]), 1).is_interactive(1));
        for l in 0..4 {
            for r0 in 0..3 {
                assert!(Cube::two_particle(p(&[5, 5]), l).is_interactive(r0));
            }
        }
        assert!(!Cube::one_particle(p(&[0]), 2).is_interactive(5));
    }

    #[test]
    fn projection_examples() {
        let a = Cube::two_particle(p(&[0, 0]), 1);
        assert!(!projections_disjoint(&a, &a).unwrap());
        let b = Cube::two_particle(p(&[10, 10]), 1);
        assert!(projections_disjoint(&a, &b).unwrap());
        let c = Cube::two_particle(p(&[2, 10]), 1);
        assert!(!projections_disjoint(&a, &c).unwrap());
    }

    #[test]
    fn neighbor_indices_match_geometry() {
        let c = Cube::two_particle(p(&[1, -2]), 2);
        for i in 0..c.len() {
            let s = c.site(i);
            let mut expect: Vec<usize> = c
                .sites()
                .iter()
                .enumerate()
                .filter(|(_, q)| s.l1_dist(q) == 1)
                .map(|(j, _)| j)
                .collect();
            expect.sort_unstable();
            assert_eq!(c.neighbor_indices(i), expect);
        }
    }

    #[test]
    fn set_distance_matches_enumeration() {
        let a = Cube::two_particle(p(&[0, 3]), 1);
        let b = Cube::two_particle(p(&[6, -2]), 2);
        let mut best = u64::MAX;
        for x in a.sites() {
            for y in b.sites() {
                best = best.min(sym_distance(&x, &y).unwrap());
            }
        }
        assert_eq!(cube_sym_set_distance(&a, &b).unwrap(), best);
    }

    fn arb_point(dim: usize) -> impl Strategy<Value = Point> {
        proptest::collection::vec(-12i64..12, dim).prop_map(Point::new)
    }

    proptest! {
        #[test]
        fn sym_distance_properties(x in arb_point(2), y in arb_point(2), z in arb_point(2)) {
            let dxy = sym_distance(&x, &y).unwrap();
            prop_assert_eq!(dxy, sym_distance(&y, &x).unwrap());
            prop_assert!(dxy <= x.max_dist(&y));
            prop_assert!(dxy <= sym_distance(&x, &z).unwrap() + z.max_dist(&y));
        }

        #[test]
        fn cube_counts_and_boundaries(c in arb_point(2), l in 0usize..4) {
            let cube = Cube::two_particle(c, l);
            let sites = cube.sites();
            prop_assert_eq!(sites.len(), (2 * l + 1).pow(2));
            for (i, s) in sites.iter().enumerate() {
                prop_assert_eq!(cube.index_of(s), Some(i));
            }
            prop_assert!(sites.windows(2).all(|w| w[0] < w[1]));
            let b = cube.boundaries();
            prop_assert!(b.inner.iter().all(|v| cube.contains(v)));
            prop_assert!(b.outer.iter().all(|v| !cube.contains(v)));
            prop_assert!(b.inner.is_disjoint(&b.outer));
        }

        #[test]
        fn interactive_formula_matches_enumeration(c in arb_point(2), l in 0usize..4, r0 in 0u64..4) {
            let cube = Cube::two_particle(c, l);
            let brute = cube.sites().iter().any(|s| {
                let (a, b) = s.split();
                a.max_dist(&b) <= r0
            });
            prop_assert_eq!(cube.is_interactive(r0), brute);
        }

        #[test]
        fn interactive_distant_pairs_have_disjoint_projections(
            a in -20i64..20, gap in 0i64..12, s in 0i64..3, t in 0i64..3,
            l in 1usize..5, r0 in 0u64..4,
        ) {
            let r0 = r0.min(l as u64 - 1);
            let b = a + 8 * l as i64 + gap - 2;
            let c1 = Cube::two_particle(Point::new(vec![a, a + s]), l);
            let c2 = Cube::two_particle(Point::new(vec![b + t, b]), l);
            prop_assume!(c1.is_interactive(r0) && c2.is_interactive(r0));
            prop_assume!(cubes_ell_distant(&c1, &c2, l as u64, DistanceMode::Center).unwrap());
            prop_assert!(projections_disjoint(&c1, &c2).unwrap());
        }
    }
}
