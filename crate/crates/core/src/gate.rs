//! Basis indexing, Boolean gate specifications, and the leakage-based check
//! that an evolution unitary writes `f(inputs)` into a designated output spin.
//!
//! Basis states are listed from all-ones down to all-zeros: for three spins
//! the order is |111⟩, |110⟩, …, |000⟩, so `index = (2^n − 1) − Σ_k bit_k 2^(n−1−k)`.
//! Phases and the final state of every non-output spin are left unconstrained:
//! a basis column passes when all of its weight sits on rows whose output bit
//! equals the gate value of the column's input bits.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{unitarity_defect, ComplexMatrix};

/// Default leakage tolerance for [`verify_gate`].
pub const DEFAULT_VERIFY_TOL: f64 = 1e-10;

/// Largest `||U^H U − I||_F` accepted by [`verify_gate`].
pub const UNITARITY_LIMIT: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("expected {expected} bits, got {actual}")]
    BitCount { expected: usize, actual: usize },
    #[error("basis index {index} out of range for {sites} sites")]
    IndexOutOfRange { index: usize, sites: usize },
    #[error("truth table must have {expected} rows, got {actual}")]
    TableSize { expected: usize, actual: usize },
    #[error("gate needs at least one input site")]
    NoInputs,
    #[error("site {0} listed more than once")]
    RepeatedSite(usize),
    #[error("output site {0} is also an input")]
    OutputIsInput(usize),
    #[error("matrix dimension {0} is not a power of two")]
    NotQubitDimension(usize),
    #[error("gate uses site {site} but the unitary acts on {sites} sites")]
    SiteOutOfRange { site: usize, sites: usize },
    #[error("matrix is not unitary: defect {0:e}")]
    NotUnitary(f64),
}

pub type GateResult<T> = Result<T, GateError>;

/// Bijection between basis indices and per-site bit tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisIndexing {
    site_count: usize,
}

impl BasisIndexing {
    pub fn new(site_count: usize) -> Self {
        BasisIndexing { site_count }
    }

    /// Site count of a `dim × dim` operator, if `dim` is a power of two.
    pub fn for_dimension(dim: usize) -> Option<Self> {
        (dim.is_power_of_two()).then(|| Self::new(dim.trailing_zeros() as usize))
    }

    pub fn site_count(&self) -> usize {
        self.site_count
    }

    pub fn dimension(&self) -> usize {
        1 << self.site_count
    }

    pub fn index_of(&self, bits: &[bool]) -> GateResult<usize> {
        if bits.len() != self.site_count {
            return Err(GateError::BitCount {
                expected: self.site_count,
                actual: bits.len(),
            });
        }
        let ones = bits.iter().fold(0usize, |acc, &b| acc << 1 | b as usize);
        Ok(self.dimension() - 1 - ones)
    }

    pub fn bits_of(&self, index: usize) -> GateResult<Vec<bool>> {
        if index >= self.dimension() {
            return Err(GateError::IndexOutOfRange {
                index,
                sites: self.site_count,
            });
        }
        Ok((0..self.site_count).map(|k| self.bit(index, k)).collect())
    }

    /// Bit of site `site` in basis state `index` (1 = up).
    pub fn bit(&self, index: usize, site: usize) -> bool {
        (index >> (self.site_count - 1 - site)) & 1 == 0
    }

    /// `|101⟩`-style label.
    pub fn label(&self, index: usize) -> String {
        let bits: String = (0..self.site_count)
            .map(|k| if self.bit(index, k) { '1' } else { '0' })
            .collect();
        format!("|{bits}⟩")
    }
}

/// Boolean function of the input sites, written into one output site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateSpec {
    input_sites: Vec<usize>,
    output_site: usize,
    /// Row `r` holds the value for inputs whose bits, first input most
    /// significant, spell `r` in binary.
    truth_table: Vec<bool>,
}

impl GateSpec {
    pub fn new(
        input_sites: Vec<usize>,
        output_site: usize,
        truth_table: Vec<bool>,
    ) -> GateResult<Self> {
        if input_sites.is_empty() {
            return Err(GateError::NoInputs);
        }
        for (k, &s) in input_sites.iter().enumerate() {
            if input_sites[..k].contains(&s) {
                return Err(GateError::RepeatedSite(s));
            }
        }
        if input_sites.contains(&output_site) {
            return Err(GateError::OutputIsInput(output_site));
        }
        let expected = 1usize << input_sites.len();
        if truth_table.len() != expected {
            return Err(GateError::TableSize {
                expected,
                actual: truth_table.len(),
            });
        }
        Ok(GateSpec {
            input_sites,
            output_site,
            truth_table,
        })
    }

    pub fn from_fn(
        input_sites: Vec<usize>,
        output_site: usize,
        f: impl Fn(&[bool]) -> bool,
    ) -> GateResult<Self> {
        let k = input_sites.len();
        let table = (0..1usize << k)
            .map(|row| {
                let bits: Vec<bool> = (0..k).map(|j| (row >> (k - 1 - j)) & 1 == 1).collect();
                f(&bits)
            })
            .collect();
        Self::new(input_sites, output_site, table)
    }

    pub fn input_sites(&self) -> &[usize] {
        &self.input_sites
    }

    pub fn output_site(&self) -> usize {
        self.output_site
    }

    pub fn truth_table(&self) -> &[bool] {
        &self.truth_table
    }

    pub fn evaluate(&self, inputs: &[bool]) -> GateResult<bool> {
        if inputs.len() != self.input_sites.len() {
            return Err(GateError::BitCount {
                expected: self.input_sites.len(),
                actual: inputs.len(),
            });
        }
        let row = inputs.iter().fold(0usize, |acc, &b| acc << 1 | b as usize);
        Ok(self.truth_table[row])
    }

    /// Largest site index mentioned.
    pub fn max_site(&self) -> usize {
        self.input_sites
            .iter()
            .copied()
            .chain([self.output_site])
            .max()
            .unwrap_or(0)
    }

    /// Gate value for basis state `index`.
    fn target_bit(&self, basis: &BasisIndexing, index: usize) -> bool {
        let row = self
            .input_sites
            .iter()
            .fold(0usize, |acc, &s| acc << 1 | basis.bit(index, s) as usize);
        self.truth_table[row]
    }
}

/// XOR of sites 0 and 1 (A, B) into site 2 (C).
pub fn xor_gate_spec() -> GateSpec {
    GateSpec::from_fn(vec![0, 1], 2, |b| b[0] ^ b[1]).expect("static spec")
}

/// Column-by-column classical map of a signed permutation unitary:
/// basis state `j` goes to `phase[j] · |image[j]⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedPermutation {
    pub image: Vec<usize>,
    pub phase: Vec<Complex64>,
}

impl SignedPermutation {
    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.image.len());
        for (col, (&row, &phase)) in self.image.iter().zip(&self.phase).enumerate() {
            m[(row, col)] = phase;
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub passed: bool,
    pub tolerance: f64,
    pub column_leakage: Vec<f64>,
    pub max_leakage: f64,
    pub induced_map: Option<SignedPermutation>,
}

impl VerificationReport {
    pub fn total_leakage(&self) -> f64 {
        self.column_leakage.iter().sum()
    }
}

/// Per-column probability mass on rows whose output bit disagrees with the gate.
pub fn column_leakage(u: &ComplexMatrix, spec: &GateSpec) -> GateResult<Vec<f64>> {
    let basis =
        BasisIndexing::for_dimension(u.dim()).ok_or(GateError::NotQubitDimension(u.dim()))?;
    let sites = basis.site_count();
    if spec.max_site() >= sites {
        return Err(GateError::SiteOutOfRange {
            site: spec.max_site(),
            sites,
        });
    }
    let out = spec.output_site();
    let dim = u.dim();
    let mut leakage = vec![0.0; dim];
    for (col, leak) in leakage.iter_mut().enumerate() {
        let want = spec.target_bit(&basis, col);
        *leak = (0..dim)
            .filter(|&row| basis.bit(row, out) != want)
            .map(|row| u[(row, col)].norm_sqr())
            .sum();
    }
    Ok(leakage)
}

/// Check that `u` realizes `spec`. Rejects non-unitary input.
pub fn verify_gate(
    u: &ComplexMatrix,
    spec: &GateSpec,
    tolerance: f64,
) -> GateResult<VerificationReport> {
    let column_leakage = column_leakage(u, spec)?;
    let defect = unitarity_defect(u);
    if defect.is_nan() || defect > UNITARITY_LIMIT {
        return Err(GateError::NotUnitary(defect));
    }
    let max_leakage = column_leakage.iter().copied().fold(0.0, f64::max);
    Ok(VerificationReport {
        passed: max_leakage <= tolerance,
        tolerance,
        column_leakage,
        max_leakage,
        induced_map: induced_map(u, tolerance),
    })
}

/// Read `u` as a signed permutation: every column must hold one entry of
/// modulus within `tolerance` of 1 and all others below `tolerance`.
pub fn induced_map(u: &ComplexMatrix, tolerance: f64) -> Option<SignedPermutation> {
    let dim = u.dim();
    let mut image = Vec::with_capacity(dim);
    let mut phase = Vec::with_capacity(dim);
    let mut hit = vec![false; dim];
    for col in 0..dim {
        let mut found = None;
        for row in 0..dim {
            let z = u[(row, col)];
            let r = z.norm();
            if (r - 1.0).abs() <= tolerance {
                if found.is_some() {
                    return None;
                }
                found = Some((row, z / r));
            } else if r > tolerance {
                return None;
            }
        }
        let (row, p) = found?;
        if std::mem::replace(&mut hit[row], true) {
            return None;
        }
        image.push(row);
        phase.push(p);
    }
    Some(SignedPermutation { image, phase })
}

/// The exact 8×8 signed permutation produced by the XOR Hamiltonian at t = 1.
pub fn canonical_xor_unitary() -> ComplexMatrix {
    const U: [[f64; 8]; 8] = [
        [0., 0., -1., 0., 0., 0., 0., 0.],
        [1., 0., 0., 0., 0., 0., 0., 0.],
        [0., 0., 0., 1., 0., 0., 0., 0.],
        [0., 1., 0., 0., 0., 0., 0., 0.],
        [0., 0., 0., 0., 0., -1., 0., 0.],
        [0., 0., 0., 0., 0., 0., 0., 1.],
        [0., 0., 0., 0., -1., 0., 0., 0.],
        [0., 0., 0., 0., 0., 0., -1., 0.],
    ];
    let rows: Vec<Vec<f64>> = U.iter().map(|r| r.to_vec()).collect();
    ComplexMatrix::from_real_rows(&rows).expect("static matrix")
}
