//! Seeded generators for random operators, projections, contexts and context
//! families. Everything is driven by an explicit seed so batch checks and
//! reports are reproducible bit for bit.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::context::AbelianContext;
use crate::linalg::{eigh_raw, ComplexMatrix, HermitianOperator, Subspace, ToleranceConfig};
use crate::plattice::Projection;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; u is kept away from zero.
    let u: f64 = rng.gen_range(1e-12..1.0);
    let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (-2.0 * u.ln()).sqrt() * v.cos()
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng))
}

pub fn random_unit_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Random Hermitian operator with entries of order one.
pub fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> HermitianOperator {
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        m.set(i, i, Complex64::new(gaussian(rng), 0.0));
        for j in i + 1..dim {
            let z = complex_gaussian(rng) * 0.5;
            m.set(i, j, z);
            m.set(j, i, z.conj());
        }
    }
    HermitianOperator::new(m, &ToleranceConfig::default()).expect("hermitian by construction")
}

/// Random unitary, taken as the eigenvector matrix of a random Hermitian.
pub fn random_unitary(dim: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let h = random_hermitian(dim, rng);
    let (_, vecs) = eigh_raw(h.matrix()).expect("eigendecomposition of a random Hermitian");
    vecs
}

pub fn random_projection_of_rank(
    dim: usize,
    rank: usize,
    rng: &mut ChaCha8Rng,
    cfg: &ToleranceConfig,
) -> Projection {
    assert!(rank <= dim);
    let u = random_unitary(dim, rng);
    let columns: Vec<Vec<Complex64>> =
        (0..rank).map(|col| (0..dim).map(|row| u.get(row, col)).collect()).collect();
    Projection::from_subspace(Subspace::from_orthonormal(dim, columns, cfg).unwrap())
}

/// Random projection of uniformly drawn rank in `0..=dim`.
pub fn random_projection(dim: usize, rng: &mut ChaCha8Rng, cfg: &ToleranceConfig) -> Projection {
    let rank = rng.gen_range(0..=dim);
    random_projection_of_rank(dim, rank, rng, cfg)
}

/// Nonzero random projection (rank in `1..=dim`).
pub fn random_nonzero_projection(
    dim: usize,
    rng: &mut ChaCha8Rng,
    cfg: &ToleranceConfig,
) -> Projection {
    let rank = rng.gen_range(1..=dim);
    random_projection_of_rank(dim, rank, rng, cfg)
}

/// Random partition of `0..n` into nonempty blocks.
pub fn random_partition(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let blocks = rng.gen_range(1..=n);
    loop {
        let mut partition: Vec<Vec<usize>> = vec![Vec::new(); blocks];
        for i in 0..n {
            partition[rng.gen_range(0..blocks)].push(i);
        }
        partition.retain(|b| !b.is_empty());
        if !partition.is_empty() {
            return partition;
        }
    }
}

/// All set partitions of `{0, .., n-1}`; blocks and partitions in a canonical
/// order. Intended for exhaustive small-dimension checks.
pub fn all_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut result = Vec::new();
    for mut smaller in all_partitions(n - 1) {
        // Put n-1 into each existing block, or into a new singleton.
        for i in 0..smaller.len() {
            let mut copy = smaller.clone();
            copy[i].push(n - 1);
            result.push(copy);
        }
        smaller.push(vec![n - 1]);
        result.push(smaller);
    }
    result
}

/// Context with atoms spanned by standard basis vectors, one per block.
pub fn coordinate_context(dim: usize, partition: &[Vec<usize>]) -> AbelianContext {
    let atoms = partition.iter().map(|block| Projection::onto_coordinates(dim, block)).collect();
    AbelianContext::new(dim, atoms, &ToleranceConfig::default()).expect("coordinate partition")
}

/// Context obtained by conjugating a coordinate partition with a unitary.
pub fn context_from_unitary(
    dim: usize,
    unitary: &ComplexMatrix,
    partition: &[Vec<usize>],
    cfg: &ToleranceConfig,
) -> AbelianContext {
    let atoms = partition
        .iter()
        .map(|block| {
            let columns: Vec<Vec<Complex64>> = block
                .iter()
                .map(|&col| (0..dim).map(|row| unitary.get(row, col)).collect())
                .collect();
            Projection::from_subspace(Subspace::from_orthonormal(dim, columns, cfg).unwrap())
        })
        .collect();
    AbelianContext::new(dim, atoms, cfg).expect("conjugated partition of unity")
}

/// Random context: random unitary basis plus a random partition of it.
pub fn random_context(dim: usize, rng: &mut ChaCha8Rng, cfg: &ToleranceConfig) -> AbelianContext {
    let u = random_unitary(dim, rng);
    let partition = random_partition(dim, rng);
    context_from_unitary(dim, &u, &partition, cfg)
}

/// Random maximal context (all atoms rank one).
pub fn random_maximal_context(
    dim: usize,
    rng: &mut ChaCha8Rng,
    cfg: &ToleranceConfig,
) -> AbelianContext {
    let u = random_unitary(dim, rng);
    let partition: Vec<Vec<usize>> = (0..dim).map(|i| vec![i]).collect();
    context_from_unitary(dim, &u, &partition, cfg)
}

/// Random maximal context whose atom list contains the given rank-one
/// projection (completed by a random basis of its orthocomplement).
pub fn random_maximal_context_containing(
    line: &Projection,
    rng: &mut ChaCha8Rng,
    cfg: &ToleranceConfig,
) -> AbelianContext {
    assert_eq!(line.rank(), 1);
    let dim = line.dim();
    let comp = line.range().complement(cfg).unwrap();
    // Random rotation inside the complement.
    let k = comp.rank();
    let u = random_unitary(k, rng);
    let mut atoms = vec![line.clone()];
    for col in 0..k {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        for (row_idx, basis_vec) in comp.basis().iter().enumerate() {
            let coeff = u.get(row_idx, col);
            for (vi, bi) in v.iter_mut().zip(basis_vec) {
                *vi += coeff * bi;
            }
        }
        atoms.push(Projection::onto_line(v).unwrap());
    }
    AbelianContext::new(dim, atoms, cfg).expect("completed maximal context")
}
