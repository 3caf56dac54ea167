use std::f64::consts::PI;

use num_complex::Complex64;
use spingate::{
    canonical_xor_unitary, hermitian_eigen, induced_map, parse_file, unitary_exponential,
    verify_gate, write_file, xor_gate_spec, xor_hamiltonian, ComplexMatrix, HamFileDocument,
};

const XOR_FILE: &str = "spins A B C\nsqrt(2)*pi/4 zA yB\nsqrt(2)*pi/4 zB yC\n-pi/4 yB xC\n";

/// tr(M^k) for k = 1..=kmax by repeated multiplication.
fn power_traces(m: &ComplexMatrix, kmax: usize) -> Vec<Complex64> {
    let mut p = m.clone();
    let mut out = Vec::with_capacity(kmax);
    for _ in 0..kmax {
        out.push(p.trace());
        p = p.multiply(m).unwrap();
    }
    out
}

#[test]
fn xor_spectrum_matches_power_sums() {
    let h = xor_hamiltonian().assemble();
    let eig = hermitian_eigen(&h, 1e-12).unwrap();
    let traces = power_traces(&h, 8);
    for (k, t) in traces.iter().enumerate() {
        let sum: f64 = eig.eigenvalues.iter().map(|l| l.powi(k as i32 + 1)).sum();
        assert!(t.im.abs() <= 1e-12);
        assert!(
            (t.re - sum).abs() <= 1e-10 * (1.0 + sum.abs()),
            "k={}",
            k + 1
        );
    }
    // The eight power sums pin the spectrum: +-pi/4 and +-3pi/4, each twice.
    let expected = [-3.0, -3.0, -1.0, -1.0, 1.0, 1.0, 3.0, 3.0].map(|x| x * PI / 4.0);
    for (got, want) in eig.eigenvalues.iter().zip(expected) {
        assert!((got - want).abs() <= 1e-12, "{got} vs {want}");
    }
}

#[test]
fn evolution_phases_match_permutation_cycles() {
    let u = unitary_exponential(&xor_hamiltonian().assemble(), 1.0).unwrap();
    let map = induced_map(&u, 1e-8).expect("signed permutation");

    // Characteristic polynomial of a signed permutation: product over cycles
    // of (z^L - s) with s the product of signs along the cycle.
    let mut seen = [false; 8];
    let mut cycles = Vec::new();
    for start in 0..8 {
        if seen[start] {
            continue;
        }
        let (mut k, mut len, mut sign) = (start, 0, Complex64::new(1.0, 0.0));
        while !seen[k] {
            seen[k] = true;
            sign *= map.phase[k];
            k = map.image[k];
            len += 1;
        }
        cycles.push((len, sign));
    }
    let mut oracle: Vec<f64> = Vec::new();
    for (len, sign) in cycles {
        let base = sign.arg();
        for j in 0..len {
            let angle = (base + 2.0 * PI * j as f64) / len as f64;
            oracle.push(angle.sin().atan2(angle.cos()));
        }
    }

    let eig = hermitian_eigen(&xor_hamiltonian().assemble(), 1e-12).unwrap();
    let mut from_h: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|l| Complex64::new(0.0, -l).exp().arg())
        .collect();
    oracle.sort_by(f64::total_cmp);
    from_h.sort_by(f64::total_cmp);
    for (a, b) in oracle.iter().zip(&from_h) {
        assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }
}

#[test]
fn file_to_gate_pipeline() {
    let doc = parse_file(XOR_FILE).unwrap();
    let h = doc.to_hamiltonian().unwrap();
    let hm = h.assemble();
    assert!(hm.max_abs_diff(&xor_hamiltonian().assemble()).unwrap() <= 1e-15);

    let u = unitary_exponential(&hm, 1.0).unwrap();
    assert!(u.max_abs_diff(&canonical_xor_unitary()).unwrap() <= 1e-10);
    let report = verify_gate(&u, &xor_gate_spec(), 1e-10).unwrap();
    assert!(report.passed);

    let written = write_file(&HamFileDocument::from_hamiltonian(&h));
    let again = parse_file(&written).unwrap().to_hamiltonian().unwrap();
    assert_eq!(again.assemble().max_abs_diff(&hm).unwrap(), 0.0);
}
