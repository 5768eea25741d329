//! Spectral projections of Hermitian witnesses, the nondegeneracy
//! criterion, block partitioning, tensor-consistent basis extraction, and
//! assembly of the steady-state-manifold structure.

use num_complex::Complex64;

use crate::algebra::{self, AlgebraKind, OperatorAlgebraBasis};
use crate::config::Tolerances;
use crate::error::{Result, SsmError};
use crate::model::{self, ChannelSpec, DensityMatrix, GeneratorSet, SupportSubspace};
use crate::num::{self, identity, kron, CMatrix, CVector};

/// Eigenvalue-clustered orthogonal projections of a Hermitian witness.
#[derive(Debug, Clone)]
pub struct SpectralProjectionSet {
    pub source: AlgebraKind,
    pub witness: CMatrix,
    /// One representative eigenvalue per cluster.
    pub eigenvalues: Vec<f64>,
    pub projections: Vec<CMatrix>,
}

/// Eigendecompose the witness and merge eigenvalues whose consecutive gaps
/// are at most cluster_tol·max(1, ‖witness‖_F).
pub fn spectral_projections(
    witness: &CMatrix,
    source: AlgebraKind,
    cluster_tol: f64,
    tol: &Tolerances,
) -> Result<SpectralProjectionSet> {
    let eig = num::hermitian_eig(witness, tol)?;
    let gap = cluster_tol * witness.norm().max(1.0);
    let n = eig.eigenvalues.len();

    let mut eigenvalues = Vec::new();
    let mut projections = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || eig.eigenvalues[i] - eig.eigenvalues[i - 1] > gap {
            let mut proj = CMatrix::zeros(n, n);
            let mut sum = 0.0;
            for k in start..i {
                let v: CVector = eig.eigenvectors.column(k).into();
                proj += &v * v.adjoint();
                sum += eig.eigenvalues[k];
            }
            eigenvalues.push(sum / (i - start) as f64);
            projections.push(proj);
            start = i;
        }
    }
    Ok(SpectralProjectionSet {
        source,
        witness: witness.clone(),
        eigenvalues,
        projections,
    })
}

/// Proportionality test P_j·G·P_j ∝ P_j for every projection and every
/// generator (daggers included). Returns the pass flag and the worst
/// residual.
pub fn is_spectrum_nondegenerate(
    projs: &SpectralProjectionSet,
    gens: &[CMatrix],
    tol: &Tolerances,
) -> (bool, f64) {
    let mut worst = 0.0f64;
    for p in &projs.projections {
        let rank = p.trace().re;
        for g in gens {
            for op in [g.clone(), g.adjoint()] {
                let pinched = p * &op * p;
                let lambda = (p * &op).trace() / Complex64::new(rank, 0.0);
                let residual = (pinched - p * lambda).norm() / op.norm().max(1.0);
                worst = worst.max(residual);
            }
        }
    }
    (worst <= tol.prop, worst)
}

fn mix_seed(seed: u64, stream: u64, counter: u64) -> u64 {
    let mut z = seed
        ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ counter.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draw random Hermitian witnesses from both algebras until each passes its
/// nondegeneracy test. P is tested against the generating set, Q against
/// the commutant basis. Deterministic per seed; retries are independent per
/// witness.
pub fn pick_nondegenerate_pair(
    alg: &OperatorAlgebraBasis,
    comm: &OperatorAlgebraBasis,
    gens: &GeneratorSet,
    seed: u64,
    max_tries: usize,
    tol: &Tolerances,
) -> Result<(SpectralProjectionSet, SpectralProjectionSet)> {
    let mut p_found = None;
    let mut q_found = None;
    let mut best_p = f64::INFINITY;
    let mut best_q = f64::INFINITY;
    for t in 0..max_tries as u64 {
        if p_found.is_none() {
            let witness = algebra::random_hermitian_element(alg, mix_seed(seed, 0, t));
            let projs = spectral_projections(&witness, AlgebraKind::NoiseAlgebra, tol.cluster, tol)?;
            let (ok, residual) = is_spectrum_nondegenerate(&projs, &gens.generators, tol);
            best_p = best_p.min(residual);
            if ok {
                p_found = Some(projs);
            }
        }
        if q_found.is_none() {
            let witness = algebra::random_hermitian_element(comm, mix_seed(seed, 1, t));
            let projs = spectral_projections(&witness, AlgebraKind::Commutant, tol.cluster, tol)?;
            let (ok, residual) = is_spectrum_nondegenerate(&projs, &comm.basis, tol);
            best_q = best_q.min(residual);
            if ok {
                q_found = Some(projs);
            }
        }
        if let (Some(p), Some(q)) = (&p_found, &q_found) {
            return Ok((p.clone(), q.clone()));
        }
    }
    Err(SsmError::WitnessSearch {
        tries: max_tries,
        best_p,
        best_q,
    })
}

/// Indices of the P and Q projections making up one irreducible block.
#[derive(Debug, Clone)]
pub struct BlockPartition {
    pub p_indices: Vec<usize>,
    pub q_indices: Vec<usize>,
}

/// Group the spectral projections into blocks: P_j and Q_i share a block
/// iff ‖Q_i·P_j‖_F exceeds the nonzero threshold. Each block must be
/// complete bipartite and the block dimensions must tile the support.
pub fn partition_blocks(
    p_projs: &SpectralProjectionSet,
    q_projs: &SpectralProjectionSet,
    tol: &Tolerances,
) -> Result<Vec<BlockPartition>> {
    let np = p_projs.projections.len();
    let nq = q_projs.projections.len();
    let overlap = |i: usize, j: usize| {
        (&q_projs.projections[i] * &p_projs.projections[j]).norm() > tol.nonzero
    };

    // Connected components of the bipartite overlap graph.
    let mut p_block = vec![usize::MAX; np];
    let mut q_block = vec![usize::MAX; nq];
    let mut blocks: Vec<BlockPartition> = Vec::new();
    for j0 in 0..np {
        if p_block[j0] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut stack_p = vec![j0];
        let mut block = BlockPartition {
            p_indices: vec![],
            q_indices: vec![],
        };
        p_block[j0] = id;
        while let Some(j) = stack_p.pop() {
            block.p_indices.push(j);
            for i in 0..nq {
                if q_block[i] == usize::MAX && overlap(i, j) {
                    q_block[i] = id;
                    block.q_indices.push(i);
                    for j2 in 0..np {
                        if p_block[j2] == usize::MAX && overlap(i, j2) {
                            p_block[j2] = id;
                            stack_p.push(j2);
                        }
                    }
                }
            }
        }
        blocks.push(block);
    }

    let r = p_projs.witness.nrows();
    let mut total = 0;
    for block in &blocks {
        if block.q_indices.is_empty() {
            return Err(SsmError::Numerical(
                "projection block has no commutant-side members".into(),
            ));
        }
        for &i in &block.q_indices {
            for &j in &block.p_indices {
                if !overlap(i, j) {
                    return Err(SsmError::Numerical(
                        "projection block is not complete bipartite".into(),
                    ));
                }
            }
        }
        total += block.p_indices.len() * block.q_indices.len();
    }
    if total != r {
        return Err(SsmError::Numerical(format!(
            "block dimensions sum to {total}, expected support rank {r}"
        )));
    }
    Ok(blocks)
}

fn top_eigenvector_of_rank_one(product: &CMatrix, tol: &Tolerances) -> Result<CVector> {
    let herm = (product + product.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = num::hermitian_eig(&herm, tol)?;
    let n = eig.eigenvalues.len();
    let top = eig.eigenvalues[n - 1];
    let second = if n > 1 { eig.eigenvalues[n - 2] } else { 0.0 };
    if (top - 1.0).abs() > 1e-6 || second.abs() > 1e-6 {
        return Err(SsmError::Numerical(format!(
            "Q·P product is not a rank-1 projector (top eigenvalues {top:.3e}, {second:.3e})"
        )));
    }
    Ok(eig.eigenvectors.column(n - 1).into())
}

fn fix_phase(v: &mut CVector) {
    for k in 0..v.len() {
        if v[k].norm() > 1e-8 {
            let phase = v[k].conj() / Complex64::new(v[k].norm(), 0.0);
            *v *= phase;
            return;
        }
    }
}

/// Basis isometry of one block, columns ordered (i, j) with j fastest.
///
/// Raw unit-eigenvectors of Q_i·P_j carry arbitrary phases that would break
/// the Kronecker form, so only the (1,1) cell comes from an eigenvector.
/// The rest of the first column is generated as Q_i·B·v₁₁ with one random
/// Hermitian commutant element B, and the remaining cells as P_j·A·v_{i1}
/// with one random Hermitian algebra element A shared across i. A acts as
/// I⊗M on the block, so the alignment scalar ⟨j|M|1⟩ is independent of i
/// and the leftover phases factor into the basis of each tensor leg.
pub fn block_basis(
    block: &BlockPartition,
    p_projs: &SpectralProjectionSet,
    q_projs: &SpectralProjectionSet,
    alg: &OperatorAlgebraBasis,
    comm: &OperatorAlgebraBasis,
    seed: u64,
    tol: &Tolerances,
) -> Result<CMatrix> {
    let d = block.p_indices.len();
    let n = block.q_indices.len();
    let r = p_projs.witness.nrows();
    let max_tries = 16u64;

    let p = |j: usize| &p_projs.projections[block.p_indices[j]];
    let q = |i: usize| &q_projs.projections[block.q_indices[i]];

    let mut v11 = top_eigenvector_of_rank_one(&(q(0) * p(0)), tol)?;
    fix_phase(&mut v11);

    // First tensor leg: |i,1⟩ for i > 1.
    let mut first_column: Vec<CVector> = vec![v11.clone()];
    if n > 1 {
        let mut done = false;
        'b_draw: for t in 0..max_tries {
            let b = algebra::random_hermitian_element(comm, mix_seed(seed, 2, t));
            let bv = &b * &v11;
            let mut column = vec![v11.clone()];
            for i in 1..n {
                let w = q(i) * &bv;
                let norm = w.norm();
                if norm < 1e-8 {
                    continue 'b_draw;
                }
                column.push(w / Complex64::new(norm, 0.0));
            }
            first_column = column;
            done = true;
            break;
        }
        if !done {
            return Err(SsmError::Numerical(
                "alignment scalar vanished for every commutant draw".into(),
            ));
        }
    }

    // Second tensor leg: |i,j⟩ for j > 1, same algebra element for all i.
    let mut columns: Vec<Vec<CVector>> = first_column.iter().map(|v| vec![v.clone()]).collect();
    if d > 1 {
        let mut done = false;
        'a_draw: for t in 0..max_tries {
            let a = algebra::random_hermitian_element(alg, mix_seed(seed, 3, t));
            let mut grid: Vec<Vec<CVector>> =
                first_column.iter().map(|v| vec![v.clone()]).collect();
            for (i, vi1) in first_column.iter().enumerate() {
                let av = &a * vi1;
                for j in 1..d {
                    let w = p(j) * &av;
                    let norm = w.norm();
                    if norm < 1e-8 {
                        continue 'a_draw;
                    }
                    grid[i].push(w / Complex64::new(norm, 0.0));
                }
            }
            columns = grid;
            done = true;
            break;
        }
        if !done {
            return Err(SsmError::Numerical(
                "alignment scalar vanished for every algebra draw".into(),
            ));
        }
    }

    let mut basis = CMatrix::zeros(r, n * d);
    for i in 0..n {
        for j in 0..d {
            basis.set_column(i * d + j, &columns[i][j]);
        }
    }
    Ok(basis)
}

/// One irreducible block of the steady-state manifold.
#[derive(Debug, Clone)]
pub struct SsmBlock {
    /// Multiplicity (dimension of the free factor H_{α,1}).
    pub n: usize,
    /// Irrep dimension (dimension of the fixed factor H_{α,2}).
    pub d: usize,
    /// r×(n·d) isometry, column (i,j) with j fastest.
    pub basis: CMatrix,
    /// Fixed density factor on the d-dimensional leg.
    pub rho2: DensityMatrix,
    /// Trace weight of ρ̃₀ on this block divided by n.
    pub weight: f64,
}

/// The block decomposition of the steady-state manifold on the support.
#[derive(Debug, Clone)]
pub struct SsmStructure {
    pub support: SupportSubspace,
    pub blocks: Vec<SsmBlock>,
    /// Σ_α n_α², the linear dimension of the manifold.
    pub ssm_dimension: usize,
}

/// Extract the fixed factors ρ_{α,2} and multiplicity factors from ρ̃₀ in
/// the computed block bases, and verify the Kronecker split.
pub fn assemble_structure(
    blocks: &[BlockPartition],
    bases: &[CMatrix],
    rho0_restricted: &CMatrix,
    support: &SupportSubspace,
    tol: &Tolerances,
) -> Result<SsmStructure> {
    let mut out = Vec::with_capacity(blocks.len());
    for (block, basis) in blocks.iter().zip(bases) {
        let d = block.p_indices.len();
        let n = block.q_indices.len();
        let g = basis.adjoint() * rho0_restricted * basis;

        // Partial trace over the multiplicity index: sum of diagonal cells.
        let mut rho2 = CMatrix::zeros(d, d);
        for i in 0..n {
            rho2 += g.view((i * d, i * d), (d, d)).clone_owned();
        }
        let trace = rho2.trace().re;
        if trace <= 0.0 {
            return Err(SsmError::Numerical("block carries no weight of ρ̃₀".into()));
        }
        rho2 /= Complex64::new(trace, 0.0);

        // Multiplicity factor recovered cell-by-cell against ρ_{α,2}.
        let rho2_sq = num::hs_inner(&rho2, &rho2);
        let mut x = CMatrix::zeros(n, n);
        for i in 0..n {
            for i2 in 0..n {
                let cell = g.view((i * d, i2 * d), (d, d)).clone_owned();
                x[(i, i2)] = num::hs_inner(&rho2, &cell) / rho2_sq;
            }
        }
        let split_residual = (&g - kron(&x, &rho2)).norm();
        if split_residual > 1e-8 * g.norm().max(1.0) {
            return Err(SsmError::Numerical(format!(
                "ρ̃₀ does not split as X⊗ρ₂ on a block (residual {split_residual:.3e}); \
                 the supplied state may not be steady"
            )));
        }
        let weight = g.trace().re / n as f64;
        out.push(SsmBlock {
            n,
            d,
            basis: basis.clone(),
            rho2: DensityMatrix::new(rho2, tol)?,
            weight,
        });
    }
    out.sort_by(|a, b| {
        (b.d, b.n)
            .cmp(&(a.d, a.n))
            .then(b.weight.total_cmp(&a.weight))
    });
    let ssm_dimension = out.iter().map(|b| b.n * b.n).sum();
    Ok(SsmStructure {
        support: support.clone(),
        blocks: out,
        ssm_dimension,
    })
}

/// Trivial structure for a one-dimensional support.
pub fn trivial_structure(support: &SupportSubspace, tol: &Tolerances) -> Result<SsmStructure> {
    let one = CMatrix::from_element(1, 1, num::ONE);
    Ok(SsmStructure {
        support: support.clone(),
        blocks: vec![SsmBlock {
            n: 1,
            d: 1,
            basis: one.clone(),
            rho2: DensityMatrix::new(one, tol)?,
            weight: 1.0,
        }],
        ssm_dimension: 1,
    })
}

/// Embed the manifold element ⊕_α X_α⊗ρ_{α,2} into the full space.
pub fn ssm_element(structure: &SsmStructure, factors: &[CMatrix]) -> Result<CMatrix> {
    if factors.len() != structure.blocks.len() {
        return Err(SsmError::Dimension(format!(
            "expected {} block factors, got {}",
            structure.blocks.len(),
            factors.len()
        )));
    }
    let r = structure.support.rank;
    let mut on_support = CMatrix::zeros(r, r);
    for (block, x) in structure.blocks.iter().zip(factors) {
        if x.nrows() != block.n || x.ncols() != block.n {
            return Err(SsmError::Dimension(format!(
                "block factor is {}x{}, expected {0}x{0} with n = {}",
                x.nrows(),
                x.ncols(),
                block.n
            )));
        }
        on_support += &block.basis * kron(x, block.rho2.matrix()) * block.basis.adjoint();
    }
    Ok(structure.support.embed(&on_support))
}

/// A linear basis of the manifold as an operator space: one operator per
/// multiplicity matrix unit e_i e_{i'}† per block.
pub fn ssm_operator_basis(structure: &SsmStructure) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(structure.ssm_dimension);
    for block in &structure.blocks {
        for i in 0..block.n {
            for i2 in 0..block.n {
                let mut unit = CMatrix::zeros(block.n, block.n);
                unit[(i, i2)] = num::ONE;
                let op =
                    &block.basis * kron(&unit, block.rho2.matrix()) * block.basis.adjoint();
                out.push(structure.support.embed(&op));
            }
        }
    }
    out
}

/// The full algebraic pipeline from a channel and one steady state to the
/// manifold structure on the steady state's support.
#[derive(Debug, Clone)]
pub struct SteadyStateAnalysis {
    pub support: SupportSubspace,
    pub generators: GeneratorSet,
    pub commutant: OperatorAlgebraBasis,
    pub algebra: OperatorAlgebraBasis,
    pub structure: SsmStructure,
}

pub fn analyze_steady_structure(
    spec: &ChannelSpec,
    rho0: &DensityMatrix,
    seed: u64,
    tol: &Tolerances,
) -> Result<SteadyStateAnalysis> {
    let support =
        model::support_of(rho0, tol.support, tol).map_err(|e| e.at_stage("support"))?;

    // The support must be invariant under the dynamics; it is, whenever the
    // supplied state is actually steady.
    let raw = model::raw_generators(spec, tol);
    let complement = identity(support.full_dim) - &support.projector;
    for op in invariance_witnesses(spec, &raw) {
        let leak = (&complement * &op * &support.projector).norm();
        if leak > tol.steady * op.norm().max(1.0) {
            return Err(SsmError::Numerical(format!(
                "support is not invariant under the dynamics (leak {leak:.3e})"
            ))
            .at_stage("support_invariance"));
        }
    }

    let generators = model::modified_generators(&raw, &support);
    if generators.generators.is_empty() {
        return Err(
            SsmError::Numerical("no nonzero modified generators".into()).at_stage("generators")
        );
    }
    let commutant =
        algebra::commutant_basis(&generators, tol).map_err(|e| e.at_stage("commutant"))?;
    let alg = algebra::algebra_basis(&generators, tol).map_err(|e| e.at_stage("algebra"))?;

    let structure = if support.rank == 1 {
        trivial_structure(&support, tol)?
    } else {
        let (p_projs, q_projs) =
            pick_nondegenerate_pair(&alg, &commutant, &generators, seed, 32, tol)
                .map_err(|e| e.at_stage("witness_pair"))?;
        let blocks =
            partition_blocks(&p_projs, &q_projs, tol).map_err(|e| e.at_stage("partition"))?;
        let mut bases = Vec::with_capacity(blocks.len());
        for (b, block) in blocks.iter().enumerate() {
            bases.push(
                block_basis(block, &p_projs, &q_projs, &alg, &commutant, mix_seed(seed, 4, b as u64), tol)
                    .map_err(|e| e.at_stage("block_basis"))?,
            );
        }
        assemble_structure(&blocks, &bases, &support.rho0_restricted, &support, tol)
            .map_err(|e| e.at_stage("assemble"))?
    };

    Ok(SteadyStateAnalysis {
        support,
        generators,
        commutant,
        algebra: alg,
        structure,
    })
}

/// Operators whose support leakage certifies invariance of the support
/// subspace: the Kraus operators themselves, or for a Lindblad generator,
/// each jump operator plus the no-jump combination iH + ½ΣA†A.
fn invariance_witnesses(spec: &ChannelSpec, raw: &[CMatrix]) -> Vec<CMatrix> {
    match &spec.body {
        crate::model::ChannelBody::Lindblad {
            hamiltonian,
            lindblad_ops,
        } => {
            let mut k = hamiltonian * Complex64::i();
            for a in lindblad_ops {
                k += a.adjoint() * a * Complex64::new(0.5, 0.0);
            }
            let mut out = lindblad_ops.clone();
            out.push(k);
            out
        }
        _ => raw.to_vec(),
    }
}
