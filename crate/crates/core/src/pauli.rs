//! Pauli strings, Pauli sums, and the operator builders for the bosonized
//! t-V model: Gauss and loop constraints, hopping terms, the Hamiltonian
//! and the fermion-number operator.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Direction, Edge, LatticeSpec, Site};

/// Coefficients whose magnitude falls below this after merging are dropped.
pub const PRUNE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    /// Single-qubit product `a * b = i^k * c`, returning `(k, c)`.
    pub fn product(a: Pauli, b: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (a, b) {
            (I, p) | (p, I) => (0, p),
            (X, X) | (Y, Y) | (Z, Z) => (0, I),
            (X, Y) => (1, Z),
            (Y, X) => (3, Z),
            (Y, Z) => (1, X),
            (Z, Y) => (3, X),
            (Z, X) => (1, Y),
            (X, Z) => (3, Y),
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Global phase `i^k` of a Pauli string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u8) -> Self {
        Phase(k % 4)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn value(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;

    fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        })
    }
}

/// A phase times a tensor product of single-qubit Paulis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    phase: Phase,
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        Self { phase: Phase::ONE, letters: vec![Pauli::I; n_qubits] }
    }

    /// Builds a string from `(qubit, letter)` factors, multiplied left to right.
    pub fn from_factors(n_qubits: usize, factors: &[(usize, Pauli)]) -> Self {
        let mut s = Self::identity(n_qubits);
        for &(q, p) in factors {
            let (k, c) = Pauli::product(s.letters[q], p);
            s.letters[q] = c;
            s.phase = s.phase * Phase(k);
        }
        s
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn letter(&self, q: usize) -> Pauli {
        self.letters[q]
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.0.is_multiple_of(2)
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn support(&self) -> Vec<usize> {
        self.letters.iter().enumerate().filter(|(_, &p)| p != Pauli::I).map(|(i, _)| i).collect()
    }

    /// Bit masks `(x, z)`: bit `q` of `x` is set for X/Y letters, of `z` for Z/Y.
    /// Registers are limited to 64 qubits for mask-based kernels.
    pub fn masks(&self) -> (u64, u64) {
        debug_assert!(self.letters.len() <= 64);
        let mut x = 0u64;
        let mut z = 0u64;
        for (q, p) in self.letters.iter().enumerate() {
            let (bx, bz) = p.bits();
            if bx {
                x |= 1 << q;
            }
            if bz {
                z |= 1 << q;
            }
        }
        (x, z)
    }

    pub fn y_count(&self) -> u32 {
        self.letters.iter().filter(|&&p| p == Pauli::Y).count() as u32
    }

    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_size(other)?;
        let mut phase = self.phase * other.phase;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (k, c) = Pauli::product(a, b);
                phase = phase * Phase(k);
                c
            })
            .collect();
        Ok(PauliString { phase, letters })
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_size(other)?;
        let anti =
            self.letters.iter().zip(&other.letters).filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b).count();
        Ok(anti % 2 == 0)
    }

    fn check_size(&self, other: &PauliString) -> Result<()> {
        if self.letters.len() != other.letters.len() {
            return Err(Error::SizeMismatch { expected: self.letters.len(), got: other.letters.len() });
        }
        Ok(())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.phase)?;
        for (q, p) in self.letters.iter().enumerate() {
            if *p != Pauli::I {
                write!(f, " {}{}", p.symbol(), q)?;
            }
        }
        Ok(())
    }
}

impl PauliString {
    /// Parses the textual form produced by `Display`, e.g. `"+1 Z0 Y4 X5"`.
    pub fn parse(text: &str, n_qubits: usize) -> Result<Self> {
        let err = |msg: String| Error::Parse { line: 1, msg };
        let mut tokens = text.split_whitespace();
        let phase = match tokens.next() {
            Some("+1") | Some("1") => Phase::ONE,
            Some("+i") | Some("i") => Phase::I,
            Some("-1") => Phase::MINUS_ONE,
            Some("-i") => Phase::MINUS_I,
            other => return Err(err(format!("bad phase token {other:?}"))),
        };
        let mut factors = Vec::new();
        for tok in tokens {
            let mut chars = tok.chars();
            let p = match chars.next() {
                Some('X') => Pauli::X,
                Some('Y') => Pauli::Y,
                Some('Z') => Pauli::Z,
                Some('I') => Pauli::I,
                _ => return Err(err(format!("bad letter in {tok:?}"))),
            };
            let q = usize::from_str(chars.as_str()).map_err(|e| err(format!("{tok:?}: {e}")))?;
            if q >= n_qubits {
                return Err(err(format!("qubit {q} outside register of {n_qubits}")));
            }
            factors.push((q, p));
        }
        let s = PauliString::from_factors(n_qubits, &factors);
        Ok(PauliString { phase: s.phase * phase, letters: s.letters })
    }
}

/// Linear combination of Pauli strings. Stored strings always carry phase
/// `+1`; string phases are folded into the coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(Complex64, PauliString)>,
    index: HashMap<Vec<Pauli>, usize>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, terms: Vec::new(), index: HashMap::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(Complex64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coeff * string`, merging with an existing term of equal letters.
    pub fn add(&mut self, coeff: Complex64, string: PauliString) -> Result<()> {
        if string.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, got: string.n_qubits() });
        }
        let coeff = coeff * string.phase().value();
        let string = string.with_phase(Phase::ONE);
        match self.index.get(&string.letters) {
            Some(&k) => self.terms[k].0 += coeff,
            None => {
                self.index.insert(string.letters.clone(), self.terms.len());
                self.terms.push((coeff, string));
            }
        }
        Ok(())
    }

    pub fn add_real(&mut self, coeff: f64, string: PauliString) -> Result<()> {
        self.add(Complex64::new(coeff, 0.0), string)
    }

    pub fn add_sum(&mut self, other: &PauliSum, scale: Complex64) -> Result<()> {
        for (c, s) in &other.terms {
            self.add(c * scale, s.clone())?;
        }
        Ok(())
    }

    /// Drops terms whose merged coefficient is below [`PRUNE_TOL`].
    pub fn pruned(mut self) -> Self {
        self.terms.retain(|(c, _)| c.norm() >= PRUNE_TOL);
        self.index = self.terms.iter().enumerate().map(|(k, (_, s))| (s.letters.clone(), k)).collect();
        self
    }

    /// Largest imaginary part among the coefficients.
    pub fn hermiticity_residue(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_residue() < PRUNE_TOL
    }

    /// Coefficient of the identity term.
    pub fn identity_coefficient(&self) -> Complex64 {
        self.terms.iter().filter(|(_, s)| s.is_identity()).map(|(c, _)| *c).sum()
    }

    pub fn commutes_with(&self, s: &PauliString) -> Result<bool> {
        for (_, t) in &self.terms {
            if !t.commutes(s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Which constraint a stabilizer encodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    Gauss(Site),
    /// `⊗ Z(1)Z(2)` along the row at height `ry`.
    RowLoop(usize),
    /// `⊗ Z(2)` along the column at `rx`.
    ColumnLoop(usize),
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintKind::Gauss(r) => write!(f, "gauss{r}"),
            ConstraintKind::RowLoop(ry) => write!(f, "row_loop(ry={ry})"),
            ConstraintKind::ColumnLoop(rx) => write!(f, "column_loop(rx={rx})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Stabilizer {
    pub kind: ConstraintKind,
    pub string: PauliString,
    pub target: i8,
}

#[derive(Clone, Debug)]
pub struct ConstraintSet {
    pub stabilizers: Vec<Stabilizer>,
}

impl ConstraintSet {
    pub fn n_qubits(&self) -> usize {
        self.stabilizers.first().map_or(0, |s| s.string.n_qubits())
    }

    pub fn gauss(&self) -> impl Iterator<Item = &Stabilizer> {
        self.stabilizers.iter().filter(|s| matches!(s.kind, ConstraintKind::Gauss(_)))
    }

    pub fn loops(&self) -> impl Iterator<Item = &Stabilizer> {
        self.stabilizers.iter().filter(|s| !matches!(s.kind, ConstraintKind::Gauss(_)))
    }

    pub fn mutually_commute(&self) -> bool {
        self.stabilizers
            .iter()
            .enumerate()
            .all(|(i, a)| self.stabilizers[i + 1..].iter().all(|b| a.string.commutes(&b.string).unwrap_or(false)))
    }
}

/// `G_r = [Z(1)Y(2)]_r [X(2)]_{r+x} [Y(2)]_{r+x+y} [Z(1)X(2)]_{r+y}`.
pub fn gauss_string(spec: &LatticeSpec, r: Site) -> PauliString {
    let (a, b, c, d) = spec.plaquette_sites(r);
    PauliString::from_factors(
        spec.n_qubits(),
        &[
            (spec.phys(a), Pauli::Z),
            (spec.aux(a), Pauli::Y),
            (spec.aux(b), Pauli::X),
            (spec.aux(c), Pauli::Y),
            (spec.phys(d), Pauli::Z),
            (spec.aux(d), Pauli::X),
        ],
    )
}

/// Wen plaquette operator `C_r = Y(2)_r X(2)_{r+x} Y(2)_{r+x+y} X(2)_{r+y}`.
pub fn plaquette_string(spec: &LatticeSpec, r: Site) -> PauliString {
    let (a, b, c, d) = spec.plaquette_sites(r);
    PauliString::from_factors(
        spec.n_qubits(),
        &[(spec.aux(a), Pauli::Y), (spec.aux(b), Pauli::X), (spec.aux(c), Pauli::Y), (spec.aux(d), Pauli::X)],
    )
}

/// Gauss stabilizers (target +1) followed by the column loops and the row
/// loops, with constant prefactors folded into the stored targets.
pub fn constraint_set(spec: &LatticeSpec) -> ConstraintSet {
    let n = spec.n_qubits();
    let mut stabilizers: Vec<Stabilizer> = spec
        .sites()
        .map(|r| Stabilizer { kind: ConstraintKind::Gauss(r), string: gauss_string(spec, r), target: 1 })
        .collect();
    let column_target = if spec.ly().is_multiple_of(2) { -1 } else { 1 };
    for rx in 0..spec.lx() {
        let factors: Vec<_> = (0..spec.ly()).map(|ry| (spec.aux(Site::new(rx, ry)), Pauli::Z)).collect();
        stabilizers.push(Stabilizer {
            kind: ConstraintKind::ColumnLoop(rx),
            string: PauliString::from_factors(n, &factors),
            target: column_target,
        });
    }
    let rho_pow = if spec.rho() == -1 && spec.lx() % 2 == 1 { -1 } else { 1 };
    for ry in 0..spec.ly() {
        let factors: Vec<_> = (0..spec.lx())
            .flat_map(|rx| {
                let s = Site::new(rx, ry);
                [(spec.phys(s), Pauli::Z), (spec.aux(s), Pauli::Z)]
            })
            .collect();
        stabilizers.push(Stabilizer {
            kind: ConstraintKind::RowLoop(ry),
            string: PauliString::from_factors(n, &factors),
            target: -rho_pow,
        });
    }
    ConstraintSet { stabilizers }
}

/// Bosonized hopping `T` on one edge (coefficient of `f†f' + h.c.`).
pub fn hopping_terms(spec: &LatticeSpec, e: Edge) -> PauliSum {
    let n = spec.n_qubits();
    let r = e.origin;
    let r2 = spec.edge_target(e);
    let (p1, p2) = (spec.phys(r), spec.phys(r2));
    let mut sum = PauliSum::new(n);
    match e.direction {
        Direction::X => {
            let half_rho = 0.5 * spec.rho() as f64;
            let za = (spec.aux(r2), Pauli::Z);
            sum.add_real(half_rho, PauliString::from_factors(n, &[(p1, Pauli::X), (p2, Pauli::X), za])).unwrap();
            sum.add_real(half_rho, PauliString::from_factors(n, &[(p1, Pauli::Y), (p2, Pauli::Y), za])).unwrap();
        }
        Direction::Y => {
            let (ya, xb) = ((spec.aux(r), Pauli::Y), (spec.aux(r2), Pauli::X));
            sum.add_real(-0.5, PauliString::from_factors(n, &[(p1, Pauli::X), (p2, Pauli::Y), ya, xb])).unwrap();
            sum.add_real(0.5, PauliString::from_factors(n, &[(p1, Pauli::Y), (p2, Pauli::X), ya, xb])).unwrap();
        }
    }
    sum
}

/// `(1 - Z_a)(1 - Z_b)/4 = n_a n_b` expanded into Pauli strings, scaled.
fn add_density_density(sum: &mut PauliSum, n: usize, a: usize, b: usize, scale: f64) {
    let q = scale / 4.0;
    sum.add_real(q, PauliString::identity(n)).unwrap();
    sum.add_real(-q, PauliString::from_factors(n, &[(a, Pauli::Z)])).unwrap();
    sum.add_real(-q, PauliString::from_factors(n, &[(b, Pauli::Z)])).unwrap();
    sum.add_real(q, PauliString::from_factors(n, &[(a, Pauli::Z), (b, Pauli::Z)])).unwrap();
}

/// The interaction part `V * sum_edges n_r n_r'`.
pub fn interaction_terms(spec: &LatticeSpec, v: f64) -> PauliSum {
    let n = spec.n_qubits();
    let mut sum = PauliSum::new(n);
    for e in spec.edges() {
        add_density_density(&mut sum, n, spec.phys(e.origin), spec.phys(spec.edge_target(e)), v);
    }
    sum.pruned()
}

/// `V n_r n_r'` on a single edge.
pub fn interaction_terms_on(spec: &LatticeSpec, e: Edge, v: f64) -> PauliSum {
    let n = spec.n_qubits();
    let mut sum = PauliSum::new(n);
    add_density_density(&mut sum, n, spec.phys(e.origin), spec.phys(spec.edge_target(e)), v);
    sum.pruned()
}

/// Bosonized t-V Hamiltonian with optional on-site potentials `sum_r mu_r n_r`.
pub fn tv_hamiltonian(spec: &LatticeSpec, t: f64, v: f64, potentials: &[(Site, f64)]) -> PauliSum {
    let n = spec.n_qubits();
    let mut h = PauliSum::new(n);
    for e in spec.edges() {
        h.add_sum(&hopping_terms(spec, e), Complex64::new(-t, 0.0)).unwrap();
    }
    for e in spec.edges() {
        add_density_density(&mut h, n, spec.phys(e.origin), spec.phys(spec.edge_target(e)), v);
    }
    for &(site, mu) in potentials {
        let q = spec.phys(spec.site(site.rx as i64, site.ry as i64));
        h.add_real(mu / 2.0, PauliString::identity(n)).unwrap();
        h.add_real(-mu / 2.0, PauliString::from_factors(n, &[(q, Pauli::Z)])).unwrap();
    }
    h.pruned()
}

/// Total fermion number `sum_r (1 - Z(1)_r)/2`.
pub fn number_sum(spec: &LatticeSpec) -> PauliSum {
    let n = spec.n_qubits();
    let mut sum = PauliSum::new(n);
    for r in spec.sites() {
        sum.add_real(0.5, PauliString::identity(n)).unwrap();
        sum.add_real(-0.5, PauliString::from_factors(n, &[(spec.phys(r), Pauli::Z)])).unwrap();
    }
    sum
}

/// Occupation `n_r = (1 - Z(1)_r)/2` of a single site.
pub fn occupation(spec: &LatticeSpec, r: Site) -> PauliSum {
    let n = spec.n_qubits();
    let mut sum = PauliSum::new(n);
    sum.add_real(0.5, PauliString::identity(n)).unwrap();
    sum.add_real(-0.5, PauliString::from_factors(n, &[(spec.phys(r), Pauli::Z)])).unwrap();
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(lx: usize, ly: usize) -> LatticeSpec {
        LatticeSpec::new(lx, ly).unwrap()
    }

    #[test]
    fn single_qubit_products() {
        let x = PauliString::from_factors(1, &[(0, Pauli::X)]);
        let y = PauliString::from_factors(1, &[(0, Pauli::Y)]);
        let xy = x.multiply(&y).unwrap();
        assert_eq!(xy.phase(), Phase::I);
        assert_eq!(xy.letter(0), Pauli::Z);
        let yx = y.multiply(&x).unwrap();
        assert_eq!(yx.phase(), Phase::MINUS_I);
    }

    #[test]
    fn square_is_phase_squared() {
        let s = PauliString::from_factors(3, &[(0, Pauli::X), (2, Pauli::Y)]).with_phase(Phase::I);
        let sq = s.multiply(&s).unwrap();
        assert!(sq.is_identity());
        assert_eq!(sq.phase(), Phase::MINUS_ONE);
    }

    #[test]
    fn commutation() {
        let xx = PauliString::from_factors(2, &[(0, Pauli::X), (1, Pauli::X)]);
        let zz = PauliString::from_factors(2, &[(0, Pauli::Z), (1, Pauli::Z)]);
        let xi = PauliString::from_factors(2, &[(0, Pauli::X)]);
        let zi = PauliString::from_factors(2, &[(0, Pauli::Z)]);
        assert!(xx.commutes(&zz).unwrap());
        assert!(!xi.commutes(&zi).unwrap());
        assert!(xi.commutes(&PauliString::identity(3)).is_err());
    }

    #[test]
    fn gauss_string_letters_on_4x4() {
        let s = spec(4, 4);
        let g = gauss_string(&s, Site::new(0, 0));
        assert_eq!(g.phase(), Phase::ONE);
        assert_eq!(g.letter(s.phys(Site::new(0, 0))), Pauli::Z);
        assert_eq!(g.letter(s.phys(Site::new(0, 1))), Pauli::Z);
        assert_eq!(g.letter(s.aux(Site::new(0, 0))), Pauli::Y);
        assert_eq!(g.letter(s.aux(Site::new(1, 1))), Pauli::Y);
        assert_eq!(g.letter(s.aux(Site::new(1, 0))), Pauli::X);
        assert_eq!(g.letter(s.aux(Site::new(0, 1))), Pauli::X);
        assert_eq!(g.support().len(), 6);
        assert!(g.is_hermitian());
        assert!(g.multiply(&g).unwrap() == PauliString::identity(32));
    }

    #[test]
    fn gauss_is_plaquette_times_physical_z() {
        for s in [spec(2, 2), spec(3, 3), spec(4, 4)] {
            for r in s.sites() {
                let zz = PauliString::from_factors(
                    s.n_qubits(),
                    &[(s.phys(r), Pauli::Z), (s.phys(s.shift(r, 0, 1)), Pauli::Z)],
                );
                let prod = plaquette_string(&s, r).multiply(&zz).unwrap();
                assert_eq!(prod, gauss_string(&s, r));
            }
        }
    }

    #[test]
    fn product_of_plaquettes_on_2x2_is_pm_identity() {
        // Brute force: multiply all four plaquette strings.
        let s = spec(2, 2);
        let prod = s
            .sites()
            .map(|r| plaquette_string(&s, r))
            .fold(PauliString::identity(8), |acc, p| acc.multiply(&p).unwrap());
        assert!(prod.is_identity());
        assert!(prod.is_hermitian());
    }

    #[test]
    fn plaquettes_commute_with_gauss() {
        let s = spec(3, 3);
        for r in s.sites() {
            for r2 in s.sites() {
                assert!(plaquette_string(&s, r).commutes(&gauss_string(&s, r2)).unwrap());
            }
        }
    }

    #[test]
    fn constraint_targets() {
        let cs = constraint_set(&spec(4, 4));
        assert_eq!(cs.stabilizers.len(), 16 + 8);
        assert!(cs.loops().all(|s| s.target == -1));
        assert!(cs.gauss().all(|s| s.target == 1));
        let cs = constraint_set(&spec(3, 3));
        assert!(cs.loops().all(|s| s.target == 1));
        assert!(cs.mutually_commute());
    }

    #[test]
    fn hopping_coefficients() {
        let s = spec(4, 4);
        let hx = hopping_terms(&s, Edge::x(Site::new(1, 1)));
        let c: Vec<f64> = hx.terms().iter().map(|(c, _)| c.re).collect();
        assert_eq!(c, vec![0.5, 0.5]);
        let hy = hopping_terms(&s, Edge::y(Site::new(1, 1)));
        let c: Vec<f64> = hy.terms().iter().map(|(c, _)| c.re).collect();
        assert_eq!(c, vec![-0.5, 0.5]);
        let hx3 = hopping_terms(&spec(3, 3), Edge::x(Site::new(0, 0)));
        assert!(hx3.terms().iter().all(|(c, _)| c.re == -0.5));
    }

    #[test]
    fn hopping_commutes_with_constraints_2x4() {
        let s = spec(2, 4);
        let cs = constraint_set(&s);
        for e in s.edges() {
            let h = hopping_terms(&s, e);
            for st in &cs.stabilizers {
                assert!(h.commutes_with(&st.string).unwrap(), "{e:?} vs {}", st.kind);
            }
            assert!(h.terms().iter().all(|(_, p)| p.support().len() <= 4));
        }
    }

    #[test]
    fn interaction_expansion() {
        let s = spec(4, 4);
        let h = tv_hamiltonian(&s, 0.0, 2.0, &[]);
        // 32 edges of V/4 identity each.
        assert!((h.identity_coefficient().re - 32.0 * 0.5).abs() < 1e-12);
        let zz = PauliString::from_factors(32, &[(0, Pauli::Z), (1, Pauli::Z)]);
        let c = h.terms().iter().find(|(_, p)| *p == zz).unwrap().0;
        assert!((c.re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_is_hermitian_and_commutes() {
        let s = spec(2, 4);
        let h = tv_hamiltonian(&s, 1.0, 3.0, &[(Site::new(0, 0), -1.0), (Site::new(0, 1), -1.0)]);
        assert!(h.is_hermitian());
        assert!(h.terms().iter().all(|(_, p)| p.is_hermitian()));
        for st in &constraint_set(&s).stabilizers {
            assert!(h.commutes_with(&st.string).unwrap());
        }
    }

    #[test]
    fn number_commutes_with_hamiltonian_2x2() {
        use crate::linalg::{max_abs_diff, pauli_sum_matrix};
        let s = spec(2, 2);
        let h = pauli_sum_matrix(&tv_hamiltonian(&s, 1.0, 2.0, &[(Site::new(1, 0), 0.3)]));
        let nf = pauli_sum_matrix(&number_sum(&s));
        assert!(max_abs_diff(&(&h * &nf), &(&nf * &h)) < 1e-12);
    }

    #[test]
    fn display_and_parse() {
        let s = spec(2, 2);
        let g = gauss_string(&s, Site::new(0, 0));
        let text = g.to_string();
        assert_eq!(text, "+1 Z0 Z2 Y4 X5 X6 Y7");
        assert_eq!(PauliString::parse(&text, 8).unwrap(), g);
        assert!(PauliString::parse("+1 Q3", 8).is_err());
    }
}
