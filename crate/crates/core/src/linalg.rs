//! Dense complex matrix helpers: unitarity, global-phase equivalence,
//! generalized-permutation detection and random unitaries.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = Array2<Complex64>;

/// `max |U^dag U - I|` over all entries.
pub fn unitarity_error(u: &CMatrix) -> f64 {
    let (rows, cols) = u.dim();
    if rows != cols {
        return f64::INFINITY;
    }
    let product = u.t().mapv(|z| z.conj()).dot(u);
    let mut worst = 0.0f64;
    for ((i, j), z) in product.indexed_iter() {
        let expected = if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        worst = worst.max((z - expected).norm());
    }
    worst
}

/// `max |a - b|` over all entries; infinite when the shapes differ.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.dim() != b.dim() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Result of aligning two matrices (or vectors) up to one overall phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseAlignment {
    /// `max |a - e^{i phase} b|` after alignment.
    pub error: f64,
    /// The aligning phase in radians.
    pub phase: f64,
}

/// Compares `a` against `e^{i gamma} b`, with `gamma` chosen to align the
/// entries where `b` is largest.
pub fn global_phase_distance(a: &CMatrix, b: &CMatrix) -> PhaseAlignment {
    if a.dim() != b.dim() {
        return PhaseAlignment {
            error: f64::INFINITY,
            phase: 0.0,
        };
    }
    let phase = aligning_phase(a.iter().copied().zip(b.iter().copied()));
    let rot = Complex64::from_polar(1.0, phase);
    let error = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - rot * y).norm())
        .fold(0.0, f64::max);
    PhaseAlignment { error, phase }
}

/// Phase `gamma` such that `a_k = e^{i gamma} b_k` at the index `k` where
/// `|b_k|` is largest (first such index on ties).
pub(crate) fn aligning_phase(pairs: impl Iterator<Item = (Complex64, Complex64)>) -> f64 {
    let mut best: Option<(f64, Complex64, Complex64)> = None;
    for (x, y) in pairs {
        let m = y.norm();
        if best.is_none_or(|(bm, _, _)| m > bm) {
            best = Some((m, x, y));
        }
    }
    match best {
        Some((m, x, y)) if m > 0.0 && x.norm() > 0.0 => (x / y).arg(),
        _ => 0.0,
    }
}

/// One column of a generalized permutation: input index `column` is sent to
/// output index `row` with the unit-modulus factor `phase`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PermutationEntry {
    pub row: usize,
    pub phase: Complex64,
}

/// Returns the witness (indexed by input column) iff `m` is square and has
/// exactly one entry of modulus within `1e-9` of one in each row and column,
/// with every other entry below `1e-9`. Non-square input is rejected.
pub fn is_generalized_permutation(m: &CMatrix) -> Option<Vec<PermutationEntry>> {
    const TOL: f64 = 1e-9;
    let (rows, cols) = m.dim();
    if rows != cols {
        return None;
    }
    let mut row_taken = vec![false; rows];
    let mut witness = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut hit = None;
        for i in 0..rows {
            let z = m[[i, j]];
            let r = z.norm();
            if (r - 1.0).abs() <= TOL {
                if hit.is_some() {
                    return None;
                }
                hit = Some(PermutationEntry { row: i, phase: z });
            } else if r >= TOL {
                return None;
            }
        }
        let entry = hit?;
        if row_taken[entry.row] {
            return None;
        }
        row_taken[entry.row] = true;
        witness.push(entry);
    }
    Some(witness)
}

/// Embeds a 2x2 block acting on indices `(a, b)` into a `d x d` identity.
pub fn embed_two_level(d: usize, a: usize, b: usize, block: [[Complex64; 2]; 2]) -> CMatrix {
    let mut m = CMatrix::eye(d);
    m[[a, a]] = block[0][0];
    m[[a, b]] = block[0][1];
    m[[b, a]] = block[1][0];
    m[[b, b]] = block[1][1];
    m
}

/// Haar-distributed unitary: the Q factor (positive-diagonal R convention) of
/// a complex Gaussian matrix, computed by modified Gram-Schmidt.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let mut q = CMatrix::from_shape_fn((d, d), |_| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    // two passes: the second removes the residual non-orthogonality of the first
    orthonormalize_columns(&mut q);
    orthonormalize_columns(&mut q);
    q
}

fn orthonormalize_columns(q: &mut CMatrix) {
    let d = q.nrows();
    for j in 0..q.ncols() {
        for k in 0..j {
            let proj: Complex64 = (0..d).map(|i| q[[i, k]].conj() * q[[i, j]]).sum();
            for i in 0..d {
                let qk = q[[i, k]];
                q[[i, j]] -= proj * qk;
            }
        }
        let norm = (0..d).map(|i| q[[i, j]].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..d {
            q[[i, j]] /= norm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 1..=10 {
            let u = random_unitary(d, &mut rng);
            assert!(unitarity_error(&u) < 1e-12, "d={d}");
        }
    }

    #[test]
    fn global_phase_recovers_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_unitary(4, &mut rng);
        let rotated = u.mapv(|z| z * Complex64::from_polar(1.0, 0.7));
        let a = global_phase_distance(&rotated, &u);
        assert!(a.error < 1e-14);
        assert!((a.phase - 0.7).abs() < 1e-12);
    }

    #[test]
    fn permutation_detection() {
        assert!(is_generalized_permutation(&CMatrix::eye(3)).is_some());

        let mut p = CMatrix::zeros((3, 3));
        p[[1, 0]] = c(0.0, 1.0);
        p[[2, 1]] = c(-1.0, 0.0);
        p[[0, 2]] = Complex64::from_polar(1.0, 0.3);
        let w = is_generalized_permutation(&p).unwrap();
        assert_eq!(w.iter().map(|e| e.row).collect::<Vec<_>>(), vec![1, 2, 0]);
        assert_eq!(w[0].phase, c(0.0, 1.0));

        let h = 1.0 / 2f64.sqrt();
        let bs = CMatrix::from_shape_vec((2, 2), vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)])
            .unwrap();
        assert!(is_generalized_permutation(&bs).is_none());

        // two columns hitting the same row
        let mut dup = CMatrix::zeros((2, 2));
        dup[[0, 0]] = c(1.0, 0.0);
        dup[[0, 1]] = c(1.0, 0.0);
        assert!(is_generalized_permutation(&dup).is_none());

        assert!(is_generalized_permutation(&CMatrix::zeros((2, 3))).is_none());
    }
}
