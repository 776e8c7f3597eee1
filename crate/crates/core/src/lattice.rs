//! Torus geometry and the two-qubits-per-site register layout.
//!
//! Sites are indexed row-major (`rx + Lx * ry`). The register holds all
//! physical qubits first, followed by all auxiliary qubits, so the flat
//! qubit index of `aux(r)` is `N + site_index(r)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lattice extent plus the on-site parity factor entering the horizontal
/// hopping terms and the row-loop constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    lx: usize,
    ly: usize,
    rho: i8,
}

impl LatticeSpec {
    /// Builds a lattice with the parity factor implied by its shape:
    /// `+1` for even-by-even, `-1` for odd-by-odd.
    pub fn new(lx: usize, ly: usize) -> Result<Self> {
        Self::validate_shape(lx, ly)?;
        let rho = if lx.is_multiple_of(2) { 1 } else { -1 };
        Ok(Self { lx, ly, rho })
    }

    /// Builds a lattice with an explicit parity factor. Mismatched parity
    /// factors are accepted so that negative controls (wrong `rho`) can be
    /// constructed; [`LatticeSpec::has_canonical_rho`] reports the mismatch.
    pub fn with_rho(lx: usize, ly: usize, rho: i8) -> Result<Self> {
        Self::validate_shape(lx, ly)?;
        if rho != 1 && rho != -1 {
            return Err(Error::InvalidLattice(format!("rho must be +1 or -1, got {rho}")));
        }
        Ok(Self { lx, ly, rho })
    }

    fn validate_shape(lx: usize, ly: usize) -> Result<()> {
        if lx < 2 || ly < 2 {
            return Err(Error::InvalidLattice(format!("lattice extents must be at least 2, got {lx}x{ly}")));
        }
        if lx % 2 != ly % 2 {
            return Err(Error::InvalidLattice(format!("Lx and Ly must be both odd or both even, got {lx}x{ly}")));
        }
        Ok(())
    }

    pub fn lx(&self) -> usize {
        self.lx
    }

    pub fn ly(&self) -> usize {
        self.ly
    }

    pub fn rho(&self) -> i8 {
        self.rho
    }

    pub fn has_canonical_rho(&self) -> bool {
        self.lx.is_multiple_of(2) == (self.rho == 1)
    }

    pub fn is_even(&self) -> bool {
        self.lx.is_multiple_of(2)
    }

    /// Number of lattice sites `N`.
    pub fn n_sites(&self) -> usize {
        self.lx * self.ly
    }

    /// Register size `2N`.
    pub fn n_qubits(&self) -> usize {
        2 * self.n_sites()
    }

    /// Wraps arbitrary (possibly negative) coordinates onto the torus.
    pub fn site(&self, rx: i64, ry: i64) -> Site {
        Site { rx: rx.rem_euclid(self.lx as i64) as usize, ry: ry.rem_euclid(self.ly as i64) as usize }
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.n_sites()).map(move |i| self.site_at(i))
    }

    pub fn site_at(&self, index: usize) -> Site {
        Site { rx: index % self.lx, ry: index / self.lx }
    }

    pub fn site_index(&self, s: Site) -> usize {
        (s.rx % self.lx) + self.lx * (s.ry % self.ly)
    }

    pub fn qubit_index(&self, q: QubitRef) -> usize {
        match q.system {
            System::Physical => self.site_index(q.site),
            System::Auxiliary => self.n_sites() + self.site_index(q.site),
        }
    }

    pub fn phys(&self, s: Site) -> usize {
        self.qubit_index(QubitRef::phys(s))
    }

    pub fn aux(&self, s: Site) -> usize {
        self.qubit_index(QubitRef::aux(s))
    }

    pub fn qubit_ref(&self, index: usize) -> Option<QubitRef> {
        let n = self.n_sites();
        if index < n {
            Some(QubitRef::phys(self.site_at(index)))
        } else if index < 2 * n {
            Some(QubitRef::aux(self.site_at(index - n)))
        } else {
            None
        }
    }

    pub fn shift(&self, s: Site, dx: i64, dy: i64) -> Site {
        self.site(s.rx as i64 + dx, s.ry as i64 + dy)
    }

    /// All edges: x-edges row-major, then y-edges row-major.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(2 * self.n_sites());
        out.extend(self.sites().map(|s| Edge { origin: s, direction: Direction::X }));
        out.extend(self.sites().map(|s| Edge { origin: s, direction: Direction::Y }));
        out
    }

    pub fn x_edges(&self) -> Vec<Edge> {
        self.sites().map(|s| Edge { origin: s, direction: Direction::X }).collect()
    }

    pub fn y_edges(&self) -> Vec<Edge> {
        self.sites().map(|s| Edge { origin: s, direction: Direction::Y }).collect()
    }

    /// The site an edge points to.
    pub fn edge_target(&self, e: Edge) -> Site {
        match e.direction {
            Direction::X => self.shift(e.origin, 1, 0),
            Direction::Y => self.shift(e.origin, 0, 1),
        }
    }

    /// True when the edge crosses the periodic boundary.
    pub fn is_wraparound(&self, e: Edge) -> bool {
        match e.direction {
            Direction::X => e.origin.rx == self.lx - 1,
            Direction::Y => e.origin.ry == self.ly - 1,
        }
    }

    /// Plaquette corners `(r, r+x, r+x+y, r+y)`.
    pub fn plaquette_sites(&self, r: Site) -> (Site, Site, Site, Site) {
        (self.shift(r, 0, 0), self.shift(r, 1, 0), self.shift(r, 1, 1), self.shift(r, 0, 1))
    }

    /// Anchors of the plaquettes prepared explicitly by the vacuum circuit:
    /// every plaquette that does not cross the boundary.
    pub fn vacuum_plaquette_set(&self) -> Vec<Site> {
        let mut out = Vec::with_capacity((self.lx - 1) * (self.ly - 1));
        for ry in 0..self.ly - 1 {
            for rx in 0..self.lx - 1 {
                out.push(Site { rx, ry });
            }
        }
        out
    }
}

impl fmt::Display for LatticeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} (rho={:+})", self.lx, self.ly, self.rho)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub rx: usize,
    pub ry: usize,
}

impl Site {
    pub const fn new(rx: usize, ry: usize) -> Self {
        Self { rx, ry }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.rx, self.ry)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub origin: Site,
    pub direction: Direction,
}

impl Edge {
    pub const fn x(origin: Site) -> Self {
        Self { origin, direction: Direction::X }
    }

    pub const fn y(origin: Site) -> Self {
        Self { origin, direction: Direction::Y }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum System {
    Physical,
    Auxiliary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QubitRef {
    pub site: Site,
    pub system: System,
}

impl QubitRef {
    pub const fn phys(site: Site) -> Self {
        Self { site, system: System::Physical }
    }

    pub const fn aux(site: Site) -> Self {
        Self { site, system: System::Auxiliary }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(lx: usize, ly: usize) -> LatticeSpec {
        LatticeSpec::new(lx, ly).unwrap()
    }

    #[test]
    fn site_index_is_row_major() {
        assert_eq!(spec(4, 4).site_index(Site::new(0, 0)), 0);
        assert_eq!(spec(4, 4).site_index(Site::new(1, 2)), 9);
        assert_eq!(spec(2, 4).site_index(Site::new(1, 3)), 7);
    }

    #[test]
    fn qubit_index_layout() {
        assert_eq!(spec(2, 2).qubit_index(QubitRef::phys(Site::new(1, 1))), 3);
        assert_eq!(spec(2, 2).qubit_index(QubitRef::aux(Site::new(0, 0))), 4);
        assert_eq!(spec(4, 4).qubit_index(QubitRef::aux(Site::new(3, 3))), 31);
    }

    #[test]
    fn edge_counts() {
        assert_eq!(spec(2, 2).edges().len(), 8);
        assert_eq!(spec(2, 4).edges().len(), 16);
        assert_eq!(spec(3, 3).edges().len(), 18);
    }

    #[test]
    fn edge_order_is_x_then_y() {
        let e = spec(2, 2).edges();
        assert!(e[..4].iter().all(|e| e.direction == Direction::X));
        assert!(e[4..].iter().all(|e| e.direction == Direction::Y));
        assert_eq!(e[1].origin, Site::new(1, 0));
    }

    #[test]
    fn width_two_keeps_both_wraparound_edges() {
        let s = spec(2, 4);
        let between: Vec<_> =
            s.x_edges().into_iter().filter(|e| e.origin.ry == 0).map(|e| (e.origin, s.edge_target(e))).collect();
        assert_eq!(between, vec![(Site::new(0, 0), Site::new(1, 0)), (Site::new(1, 0), Site::new(0, 0))]);
    }

    #[test]
    fn plaquette_wraps() {
        let p = spec(3, 3).plaquette_sites(Site::new(2, 2));
        assert_eq!(p, (Site::new(2, 2), Site::new(0, 2), Site::new(0, 0), Site::new(2, 0)));
        let p = spec(4, 4).plaquette_sites(Site::new(0, 0));
        assert_eq!(p, (Site::new(0, 0), Site::new(1, 0), Site::new(1, 1), Site::new(0, 1)));
        let p = spec(2, 2).plaquette_sites(Site::new(1, 0));
        assert_eq!(p, (Site::new(1, 0), Site::new(0, 0), Site::new(0, 1), Site::new(1, 1)));
    }

    #[test]
    fn vacuum_plaquettes() {
        assert_eq!(spec(4, 4).vacuum_plaquette_set().len(), 9);
        assert_eq!(spec(2, 2).vacuum_plaquette_set(), vec![Site::new(0, 0)]);
        assert_eq!(spec(3, 3).vacuum_plaquette_set().len(), 4);
    }

    #[test]
    fn shape_validation() {
        assert!(LatticeSpec::new(3, 4).is_err());
        assert!(LatticeSpec::new(1, 3).is_err());
        assert_eq!(spec(3, 3).rho(), -1);
        assert_eq!(spec(2, 4).rho(), 1);
        assert!(LatticeSpec::with_rho(3, 3, 1).is_ok_and(|s| !s.has_canonical_rho()));
    }

    #[test]
    fn every_site_is_each_corner_once() {
        for s in [spec(2, 2), spec(3, 3), spec(2, 4), spec(4, 4)] {
            let mut count = vec![[0usize; 4]; s.n_sites()];
            for r in s.sites() {
                let (a, b, c, d) = s.plaquette_sites(r);
                for (k, site) in [a, b, c, d].into_iter().enumerate() {
                    count[s.site_index(site)][k] += 1;
                }
            }
            assert!(count.iter().all(|c| *c == [1, 1, 1, 1]));
        }
    }

    #[test]
    fn qubit_index_is_bijective() {
        for s in [spec(2, 2), spec(3, 3), spec(2, 4), spec(4, 4)] {
            let mut seen = vec![false; s.n_qubits()];
            for r in s.sites() {
                for q in [QubitRef::phys(r), QubitRef::aux(r)] {
                    let i = s.qubit_index(q);
                    assert!(!seen[i]);
                    seen[i] = true;
                    assert_eq!(s.qubit_ref(i), Some(q));
                }
            }
            assert!(seen.iter().all(|&b| b));
        }
    }
}
