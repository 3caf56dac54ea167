//! Pauli operators, spin systems and Hamiltonians built from Pauli-string terms.
//!
//! Units: ħ = 1 and the gate time Δt = 1, so coefficients are dimensionless
//! energies. Site 0 is the leftmost Kronecker factor and each single-spin
//! basis lists the up state |1⟩ before the down state |0⟩.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::ComplexMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PauliError {
    #[error("spin system needs at least one site")]
    NoSites,
    #[error("duplicate site name `{0}`")]
    DuplicateSiteName(String),
    #[error("invalid site name `{0}`")]
    InvalidSiteName(String),
    #[error("site {site} out of range for a {sites}-site system")]
    SiteOutOfRange { site: usize, sites: usize },
    #[error("site {0} appears twice in one term")]
    DuplicateSite(usize),
    #[error("identity factor on site {0}; terms list only non-identity factors")]
    IdentityFactor(usize),
    #[error("term has no factors")]
    EmptyTerm,
    #[error("non-finite coefficient {0}")]
    NonFiniteCoefficient(f64),
    #[error("invalid site permutation {0:?}")]
    InvalidPermutation(Vec<usize>),
}

pub type PauliResult<T> = Result<T, PauliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PauliLabel {
    I,
    X,
    Y,
    Z,
}

impl PauliLabel {
    pub const NON_IDENTITY: [PauliLabel; 3] = [PauliLabel::X, PauliLabel::Y, PauliLabel::Z];

    /// Entry `(row, col)` of the 2×2 matrix, up state first.
    pub fn entry(self, row: usize, col: usize) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match (self, row, col) {
            (PauliLabel::I, r, c) => {
                if r == c {
                    one
                } else {
                    zero
                }
            }
            (PauliLabel::X, r, c) => {
                if r != c {
                    one
                } else {
                    zero
                }
            }
            (PauliLabel::Y, 0, 1) => Complex64::new(0.0, -1.0),
            (PauliLabel::Y, 1, 0) => Complex64::new(0.0, 1.0),
            (PauliLabel::Y, _, _) => zero,
            (PauliLabel::Z, 0, 0) => one,
            (PauliLabel::Z, 1, 1) => -one,
            (PauliLabel::Z, _, _) => zero,
        }
    }

    /// Whether the operator swaps up and down.
    pub fn flips(self) -> bool {
        matches!(self, PauliLabel::X | PauliLabel::Y)
    }

    pub fn letter(self) -> char {
        match self {
            PauliLabel::I => 'i',
            PauliLabel::X => 'x',
            PauliLabel::Y => 'y',
            PauliLabel::Z => 'z',
        }
    }
}

impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter().to_ascii_uppercase())
    }
}

pub fn single_pauli(label: PauliLabel) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    for r in 0..2 {
        for c in 0..2 {
            m[(r, c)] = label.entry(r, c);
        }
    }
    m
}

/// Named two-state sites. Site `k` is the `k`-th Kronecker factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinSystem {
    names: Vec<String>,
}

impl SpinSystem {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> PauliResult<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(PauliError::NoSites);
        }
        let mut seen = BTreeSet::new();
        for name in &names {
            if !is_site_name(name) {
                return Err(PauliError::InvalidSiteName(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(PauliError::DuplicateSiteName(name.clone()));
            }
        }
        Ok(SpinSystem { names })
    }

    /// `n` sites named `A`, `B`, `C`, ... (`S26`, `S27`, ... past `Z`).
    pub fn with_sites(n: usize) -> PauliResult<Self> {
        Self::new((0..n).map(|k| {
            if k < 26 {
                char::from(b'A' + k as u8).to_string()
            } else {
                format!("S{k}")
            }
        }))
    }

    pub fn site_count(&self) -> usize {
        self.names.len()
    }

    pub fn dimension(&self) -> usize {
        1 << self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, site: usize) -> &str {
        &self.names[site]
    }

    pub fn site_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Site names are identifiers: a letter or underscore, then letters, digits or underscores.
pub fn is_site_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Real coefficient times a product of non-identity Pauli factors on distinct sites.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    coefficient: f64,
    factors: BTreeMap<usize, PauliLabel>,
}

impl PauliTerm {
    pub fn new(
        coefficient: f64,
        factors: impl IntoIterator<Item = (usize, PauliLabel)>,
    ) -> PauliResult<Self> {
        if !coefficient.is_finite() {
            return Err(PauliError::NonFiniteCoefficient(coefficient));
        }
        let mut map = BTreeMap::new();
        for (site, label) in factors {
            if label == PauliLabel::I {
                return Err(PauliError::IdentityFactor(site));
            }
            if map.insert(site, label).is_some() {
                return Err(PauliError::DuplicateSite(site));
            }
        }
        if map.is_empty() {
            return Err(PauliError::EmptyTerm);
        }
        Ok(PauliTerm {
            coefficient,
            factors: map,
        })
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    /// Factors keyed by site, in ascending site order.
    pub fn factors(&self) -> &BTreeMap<usize, PauliLabel> {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.factors.len()
    }

    pub fn sites(&self) -> impl Iterator<Item = usize> + '_ {
        self.factors.keys().copied()
    }

    pub fn label_at(&self, site: usize) -> PauliLabel {
        self.factors.get(&site).copied().unwrap_or(PauliLabel::I)
    }

    pub fn with_coefficient(&self, coefficient: f64) -> PauliTerm {
        PauliTerm {
            coefficient,
            factors: self.factors.clone(),
        }
    }

    fn check_sites(&self, sites: usize) -> PauliResult<()> {
        match self.factors.keys().next_back() {
            Some(&site) if site >= sites => Err(PauliError::SiteOutOfRange { site, sites }),
            _ => Ok(()),
        }
    }
}

/// Embed a term as `coefficient · P_0 ⊗ P_1 ⊗ … ⊗ P_{n-1}` with identity on absent sites.
pub fn embed_term(term: &PauliTerm, system: &SpinSystem) -> PauliResult<ComplexMatrix> {
    let mut m = ComplexMatrix::zeros(system.dimension());
    accumulate_term(&mut m, term, system.site_count())?;
    Ok(m)
}

// A Pauli string has exactly one nonzero entry per column: each flipping factor
// toggles that site's local index, and the value is the product of the 2×2 entries.
fn accumulate_term(m: &mut ComplexMatrix, term: &PauliTerm, sites: usize) -> PauliResult<()> {
    term.check_sites(sites)?;
    let dim = 1usize << sites;
    let flip_mask = term
        .factors
        .iter()
        .filter(|(_, l)| l.flips())
        .fold(0usize, |mask, (&site, _)| mask | 1 << (sites - 1 - site));
    for col in 0..dim {
        let row = col ^ flip_mask;
        let mut value = Complex64::new(term.coefficient, 0.0);
        for (&site, &label) in &term.factors {
            let shift = sites - 1 - site;
            value *= label.entry((row >> shift) & 1, (col >> shift) & 1);
        }
        m[(row, col)] += value;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    system: SpinSystem,
    terms: Vec<PauliTerm>,
}

impl Hamiltonian {
    pub fn new(system: SpinSystem, terms: Vec<PauliTerm>) -> PauliResult<Self> {
        for term in &terms {
            term.check_sites(system.site_count())?;
        }
        Ok(Hamiltonian { system, terms })
    }

    pub fn empty(system: SpinSystem) -> Self {
        Hamiltonian {
            system,
            terms: Vec::new(),
        }
    }

    pub fn system(&self) -> &SpinSystem {
        &self.system
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Terms sorted by factors, then coefficient.
    fn canonical_terms(&self) -> Vec<&PauliTerm> {
        let mut v: Vec<&PauliTerm> = self.terms.iter().collect();
        v.sort_by(|a, b| {
            a.factors
                .iter()
                .cmp(b.factors.iter())
                .then(a.coefficient.total_cmp(&b.coefficient))
        });
        v
    }

    /// Same system and the same multiset of terms, in any order.
    pub fn same_terms(&self, other: &Hamiltonian) -> bool {
        self.system == other.system && self.canonical_terms() == other.canonical_terms()
    }

    /// Dense matrix `Σ_k embed_term(term_k)`. Terms are accumulated in
    /// canonical order, so the result is bit-identical under reordering.
    pub fn assemble(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.system.dimension());
        for term in self.canonical_terms() {
            accumulate_term(&mut m, term, self.system.site_count())
                .expect("terms validated at construction");
        }
        m
    }

    /// Largest number of factors in any term (0 when there are no terms).
    pub fn max_interaction_order(&self) -> usize {
        self.terms.iter().map(PauliTerm::order).max().unwrap_or(0)
    }

    /// Unordered site pairs coupled by at least one term, sorted.
    pub fn interaction_pairs(&self) -> BTreeSet<(usize, usize)> {
        let mut pairs = BTreeSet::new();
        for term in &self.terms {
            let sites: Vec<usize> = term.sites().collect();
            for (k, &a) in sites.iter().enumerate() {
                for &b in &sites[k + 1..] {
                    pairs.insert((a.min(b), a.max(b)));
                }
            }
        }
        pairs
    }

    pub fn couples(&self, a: usize, b: usize) -> bool {
        self.interaction_pairs().contains(&(a.min(b), a.max(b)))
    }

    /// True when the interaction graph has no cycle.
    pub fn is_loopless(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.system.site_count()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (a, b) in self.interaction_pairs() {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return false;
            }
            parent[ra] = rb;
        }
        true
    }

    /// Move every factor from site `k` to site `permutation[k]`.
    pub fn relabel(&self, permutation: &[usize]) -> PauliResult<Hamiltonian> {
        let n = self.system.site_count();
        let mut seen = vec![false; n];
        if permutation.len() != n
            || permutation
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(PauliError::InvalidPermutation(permutation.to_vec()));
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                PauliTerm::new(
                    t.coefficient,
                    t.factors.iter().map(|(&s, &l)| (permutation[s], l)),
                )
            })
            .collect::<PauliResult<Vec<_>>>()?;
        Ok(Hamiltonian {
            system: self.system.clone(),
            terms,
        })
    }
}

/// The three-spin two-body XOR Hamiltonian
/// `(π/4)(√2 Z_A Y_B + √2 Z_B Y_C − Y_B X_C)` with ħ = Δt = 1.
pub fn xor_hamiltonian() -> Hamiltonian {
    use PauliLabel::*;
    let strong = PI * SQRT_2 / 4.0;
    let weak = -PI / 4.0;
    let terms = vec![
        PauliTerm::new(strong, [(0, Z), (1, Y)]),
        PauliTerm::new(strong, [(1, Z), (2, Y)]),
        PauliTerm::new(weak, [(1, Y), (2, X)]),
    ]
    .into_iter()
    .collect::<PauliResult<Vec<_>>>()
    .expect("static terms are valid");
    Hamiltonian::new(SpinSystem::with_sites(3).expect("three sites"), terms)
        .expect("static terms fit three sites")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity;
    use proptest::prelude::*;
    use PauliLabel::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Oracle: explicit Kronecker chain over all sites.
    fn kron_chain(term: &PauliTerm, n: usize) -> ComplexMatrix {
        let mut m = single_pauli(term.label_at(0));
        for site in 1..n {
            m = m.kron(&single_pauli(term.label_at(site)));
        }
        m.scale(c(term.coefficient(), 0.0))
    }

    #[test]
    fn single_pauli_constants() {
        let z = single_pauli(Z);
        assert_eq!(
            z,
            ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap()
        );
        assert_eq!(single_pauli(I), identity(2));
        let y = single_pauli(Y);
        assert_eq!(y[(0, 1)], c(0.0, -1.0));
        assert_eq!(y[(1, 0)], c(0.0, 1.0));
        assert_eq!(y[(0, 0)], c(0.0, 0.0));
    }

    #[test]
    fn pauli_algebra() {
        for k in PauliLabel::NON_IDENTITY {
            let p = single_pauli(k);
            assert_eq!(p.multiply(&p).unwrap(), identity(2));
            assert_eq!(p.trace(), c(0.0, 0.0));
        }
        let i = c(0.0, 1.0);
        let cyc = [(X, Y, Z), (Y, Z, X), (Z, X, Y)];
        for (a, b, r) in cyc {
            let lhs = single_pauli(a).multiply(&single_pauli(b)).unwrap();
            assert_eq!(lhs, single_pauli(r).scale(i));
        }
    }

    #[test]
    fn embed_single_site_z() {
        let sys = SpinSystem::with_sites(2).unwrap();
        let m = embed_term(&PauliTerm::new(1.0, [(0, Z)]).unwrap(), &sys).unwrap();
        let d = [1.0, 1.0, -1.0, -1.0].map(|x| c(x, 0.0));
        assert_eq!(m, ComplexMatrix::diagonal(&d));
    }

    #[test]
    fn embed_zy_identity_three_sites() {
        let sys = SpinSystem::with_sites(3).unwrap();
        let term = PauliTerm::new(1.0, [(0, Z), (1, Y)]).unwrap();
        let m = embed_term(&term, &sys).unwrap();
        assert_eq!(m[(0, 2)], c(0.0, -1.0));
        assert_eq!(m[(2, 0)], c(0.0, 1.0));
        let hand = single_pauli(Z).kron(&single_pauli(Y)).kron(&identity(2));
        assert_eq!(m, hand);
    }

    #[test]
    fn embed_scaled_x() {
        let sys = SpinSystem::with_sites(1).unwrap();
        let m = embed_term(&PauliTerm::new(2.5, [(0, X)]).unwrap(), &sys).unwrap();
        assert_eq!(
            m,
            ComplexMatrix::from_real_rows(&[vec![0.0, 2.5], vec![2.5, 0.0]]).unwrap()
        );
    }

    #[test]
    fn embed_rejects_out_of_range_site() {
        let sys = SpinSystem::with_sites(2).unwrap();
        let term = PauliTerm::new(1.0, [(2, X)]).unwrap();
        assert_eq!(
            embed_term(&term, &sys),
            Err(PauliError::SiteOutOfRange { site: 2, sites: 2 })
        );
        assert!(Hamiltonian::new(sys, vec![term]).is_err());
    }

    #[test]
    fn term_validation() {
        assert_eq!(
            PauliTerm::new(1.0, [(0, Z), (0, Y)]),
            Err(PauliError::DuplicateSite(0))
        );
        assert_eq!(PauliTerm::new(1.0, []), Err(PauliError::EmptyTerm));
        assert_eq!(
            PauliTerm::new(1.0, [(1, I)]),
            Err(PauliError::IdentityFactor(1))
        );
        assert!(PauliTerm::new(f64::NAN, [(0, X)]).is_err());
    }

    #[test]
    fn system_validation() {
        assert_eq!(
            SpinSystem::new(Vec::<String>::new()),
            Err(PauliError::NoSites)
        );
        assert!(SpinSystem::new(["A", "A"]).is_err());
        assert!(SpinSystem::new(["1x"]).is_err());
        let s = SpinSystem::with_sites(28).unwrap();
        assert_eq!(s.name(25), "Z");
        assert_eq!(s.name(27), "S27");
        assert_eq!(SpinSystem::with_sites(3).unwrap().dimension(), 8);
    }

    #[test]
    fn assemble_edge_cases() {
        let empty = Hamiltonian::empty(SpinSystem::with_sites(3).unwrap());
        assert_eq!(empty.assemble(), ComplexMatrix::zeros(8));
        let h = Hamiltonian::new(
            SpinSystem::with_sites(1).unwrap(),
            vec![PauliTerm::new(1.0, [(0, Z)]).unwrap()],
        )
        .unwrap();
        assert_eq!(h.assemble(), single_pauli(Z));
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn xor_hamiltonian_structure() {
        let h = xor_hamiltonian();
        let coeffs: Vec<f64> = h.terms().iter().map(PauliTerm::coefficient).collect();
        // π√2/4 and π/4 to 10 decimals, from a 30-digit evaluation.
        let expected = [1.1107207345, 1.1107207345, -0.7853981634];
        for (got, want) in coeffs.iter().zip(expected) {
            assert!((got - want).abs() < 0.5e-10, "{got} vs {want}");
        }
        assert!(!h.couples(0, 2));
        assert!(h.couples(0, 1) && h.couples(1, 2));
        assert!(h.is_loopless());
        assert_eq!(h.max_interaction_order(), 2);

        let m = h.assemble();
        assert!(m.is_hermitian(1e-14));
        for k in 0..8 {
            assert!(m[(k, k)].norm() <= 1e-15);
        }
    }

    #[test]
    fn loop_detection() {
        let sys = SpinSystem::with_sites(3).unwrap();
        let mut terms = xor_hamiltonian().terms().to_vec();
        terms.push(PauliTerm::new(0.1, [(0, X), (2, X)]).unwrap());
        let h = Hamiltonian::new(sys, terms).unwrap();
        assert!(!h.is_loopless());
    }

    #[test]
    fn relabel_swaps_sites() {
        let h = xor_hamiltonian();
        let swapped = h.relabel(&[1, 0, 2]).unwrap();
        let f: Vec<Vec<(usize, PauliLabel)>> = swapped
            .terms()
            .iter()
            .map(|t| t.factors().iter().map(|(&s, &l)| (s, l)).collect())
            .collect();
        assert_eq!(
            f,
            vec![
                vec![(0, Y), (1, Z)],
                vec![(0, Z), (2, Y)],
                vec![(0, Y), (2, X)]
            ]
        );
        assert_eq!(h.relabel(&[0, 1, 2]).unwrap(), h);
        assert!(h.relabel(&[0, 0, 2]).is_err());
        assert!(h.relabel(&[0, 1]).is_err());
    }

    fn arb_term(n: usize) -> impl Strategy<Value = PauliTerm> {
        (
            -3.0f64..3.0,
            proptest::collection::vec(prop_oneof![Just(I), Just(X), Just(Y), Just(Z)], n),
            0..n,
        )
            .prop_map(move |(coef, mut labels, forced)| {
                if labels.iter().all(|&l| l == I) {
                    labels[forced] = X;
                }
                PauliTerm::new(
                    coef,
                    labels.into_iter().enumerate().filter(|(_, l)| *l != I),
                )
                .unwrap()
            })
    }

    fn arb_hamiltonian() -> impl Strategy<Value = Hamiltonian> {
        (1usize..=4).prop_flat_map(|n| {
            proptest::collection::vec(arb_term(n), 0..8).prop_map(move |terms| {
                Hamiltonian::new(SpinSystem::with_sites(n).unwrap(), terms).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn assembled_matrix_is_hermitian(h in arb_hamiltonian()) {
            prop_assert!(h.assemble().is_hermitian(1e-14));
        }

        #[test]
        fn embedding_matches_kronecker_chain(
            (n, term) in (1usize..=4).prop_flat_map(|n| (Just(n), arb_term(n)))
        ) {
            let sys = SpinSystem::with_sites(n).unwrap();
            prop_assert_eq!(embed_term(&term, &sys).unwrap(), kron_chain(&term, n));
        }

        #[test]
        fn assembly_ignores_term_order(
            (h, shuffled) in arb_hamiltonian()
                .prop_flat_map(|h| (Just(h.clone()), Just(h.terms().to_vec()).prop_shuffle()))
        ) {
            let r = Hamiltonian::new(h.system().clone(), shuffled).unwrap();
            prop_assert_eq!(h.assemble(), r.assemble());
        }
    }
}
