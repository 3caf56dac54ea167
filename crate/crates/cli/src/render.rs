//! JSON shapes written to stdout. Complex numbers are `[re, im]`, matrices
//! are arrays of rows, and every float carries 17 significant digits.

use std::io;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::ser::Formatter;

use spingate::{ComplexMatrix, SignedPermutation, VerificationReport};

/// Compact JSON with floats written as `d.ddddddddddddddddde±x`.
struct SignificantDigits;

impl Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SignificantDigits);
    value.serialize(&mut ser).expect("in-memory serialization");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

pub type ComplexJson = (f64, f64);

pub fn complex(z: Complex64) -> ComplexJson {
    (z.re, z.im)
}

pub fn matrix(m: &ComplexMatrix) -> Vec<Vec<ComplexJson>> {
    m.rows()
        .map(|row| row.iter().copied().map(complex).collect())
        .collect()
}

#[derive(Debug, Serialize)]
pub struct MapJson {
    pub image: Vec<usize>,
    pub phases: Vec<ComplexJson>,
}

impl From<&SignedPermutation> for MapJson {
    fn from(p: &SignedPermutation) -> Self {
        MapJson {
            image: p.image.clone(),
            phases: p.phase.iter().copied().map(complex).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ReportJson {
    pub passed: bool,
    pub tolerance: f64,
    pub max_leakage: f64,
    pub column_leakage: Vec<f64>,
    pub induced_map: Option<MapJson>,
}

impl From<&VerificationReport> for ReportJson {
    fn from(r: &VerificationReport) -> Self {
        ReportJson {
            passed: r.passed,
            tolerance: r.tolerance,
            max_leakage: r.max_leakage,
            column_leakage: r.column_leakage.clone(),
            induced_map: r.induced_map.as_ref().map(MapJson::from),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SearchJson {
    pub succeeded: bool,
    pub best_objective: f64,
    pub restart_index: usize,
    pub iterations_used: usize,
    pub best_parameters: Vec<f64>,
    /// The found Hamiltonian as `.ham` text.
    pub hamiltonian: String,
}

#[derive(Debug, Serialize)]
pub struct DemoJson {
    pub hamiltonian_file: String,
    pub hamiltonian: Vec<Vec<ComplexJson>>,
    pub unitary: Vec<Vec<ComplexJson>>,
    pub reference: Vec<Vec<ComplexJson>>,
    pub max_deviation: f64,
    pub report: ReportJson,
}
