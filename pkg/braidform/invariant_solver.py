"""
The pure-braid-invariant subspace A_N^pi, its projector and the induced
symmetric-group representation.

A_N^pi is computed as the joint fixed space of pi(x_{i,j}) over the
generators x_{i,j}, 1 <= i <= j <= N-1, of the pure braid group. Two
solvers are provided:

- dense: eigen-decomposition of G = sum (M - I)^* (M - I) over the
  materialized generators; the spectral gap around the threshold is kept
  as a maximality certificate.
- phased: a weighted union-find over basis indices, available when C is a
  generalized permutation matrix. Each generator contributes constraints
  v_{target[k]} = phase[k] v_k; classes with an inconsistent cycle or a
  self-constraint different from 1 vanish.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import norm as sparse_norm

from .braid_core import pure_generators
from .config import get_settings
from .errors import (
    CompressionError,
    IndexRangeError,
    NotGeneralizedPermutationError,
    ResidualCheckError,
    UsageError,
)
from .rep_engine import apply_local, apply_word_array, as_phased_permutation, check_sites_guard, materialize
from .rmatrix import RMatrix, braid_residual, is_generalized_permutation, unitarity_residual

logger = logging.getLogger(__name__)

METHODS = ('dense', 'phased', 'auto')


@dataclass(frozen=True, eq=False)
class InvariantSubspace:
    sites: int
    dimension: int
    basis: sparse.csc_matrix
    method: str
    tolerance: float
    retained_max_eigenvalue: Optional[float] = None
    rejected_min_eigenvalue: Optional[float] = None

    def dense_basis(self, max_sites: Optional[int] = None) -> np.ndarray:
        limit = get_settings().materialize_max_sites if max_sites is None else max_sites
        check_sites_guard(self.sites, limit, 'dense basis')
        return self.basis.toarray()

    def support(self) -> List[int]:
        """One-based indices of basis rows with a nonzero entry"""
        coo = self.basis.tocoo()
        rows = np.unique(coo.row[np.abs(coo.data) > self.tolerance])
        return [int(r) + 1 for r in rows]

    def to_dict(self) -> dict:
        summary = {
            "n": self.sites,
            "dimension": self.dimension,
            "method": self.method,
            "tolerance": self.tolerance,
        }
        if self.retained_max_eigenvalue is not None or self.rejected_min_eigenvalue is not None:
            summary["retained_max_eigenvalue"] = self.retained_max_eigenvalue
            summary["rejected_min_eigenvalue"] = self.rejected_min_eigenvalue
        return summary


@dataclass(frozen=True, eq=False)
class InducedSymRep:
    sites: int
    dimension: int
    generator_matrices: List[np.ndarray]
    compression_residual: float
    involution_residual: float
    unitarity_residual: float
    braid_relation_residual: float = 0.0

    def element(self, factorization: List[int]) -> np.ndarray:
        """Product of generator matrices along s_{k_1} o ... o s_{k_m}"""
        result = np.eye(self.dimension, dtype=complex)
        for k in factorization:
            result = result @ self.generator_matrices[k - 1]
        return result


def _check_matrix(c: RMatrix, tolerance: Optional[float]):
    for name, report in (('braid equation', braid_residual(c, tolerance)),
                         ('unitarity', unitarity_residual(c, tolerance))):
        if not report.passes:
            raise ResidualCheckError(
                f"{c.label()} fails the {name} check: residual {report.frobenius_residual:.3e} "
                f"> {report.tolerance:.1e}")


def _generators(n: int):
    return pure_generators(n) if n >= 2 else []


def invariant_subspace_dense(c: RMatrix, n: int, threshold: Optional[float] = None,
                             max_sites: Optional[int] = None,
                             tolerance: Optional[float] = None) -> InvariantSubspace:
    settings = get_settings()
    limit = settings.dense_max_sites if max_sites is None else max_sites
    check_sites_guard(n, limit, 'the dense invariant solver')
    if n < 1:
        raise IndexRangeError(f"N must be >= 1, got {n}")
    _check_matrix(c, tolerance)
    cut = settings.null_threshold if threshold is None else threshold

    dim = 2 ** n
    identity = np.eye(dim, dtype=complex)
    gram = np.zeros((dim, dim), dtype=complex)
    for word in _generators(n):
        defect = materialize(word, c, max_sites=n) - identity
        gram += defect.conj().T @ defect
    eigenvalues, eigenvectors = scipy.linalg.eigh(gram)

    keep = eigenvalues <= cut
    retained = float(eigenvalues[keep].max()) if keep.any() else None
    rejected = float(eigenvalues[~keep].min()) if (~keep).any() else None
    basis = eigenvectors[:, keep]
    logger.info(f"[Invariant Solver] dense N={n}: dimension {basis.shape[1]} "
                f"(retained <= {retained}, rejected >= {rejected})")
    return InvariantSubspace(
        sites=n,
        dimension=int(basis.shape[1]),
        basis=sparse.csc_matrix(basis),
        method='dense',
        tolerance=cut,
        retained_max_eigenvalue=retained,
        rejected_min_eigenvalue=rejected,
    )


class PhaseUnionFind:
    """
    Union-find over basis indices carrying relative phases.

    Invariant: v_k = weight[k] * v_{parent[k]}. Representatives are the
    smallest index of each class.
    """

    def __init__(self, size: int, tolerance: float):
        self.parent = np.arange(size, dtype=np.int64)
        self.weight = np.ones(size, dtype=complex)
        self.killed = np.zeros(size, dtype=bool)
        self.tolerance = tolerance

    def find(self, k: int) -> Tuple[int, complex]:
        path = []
        while self.parent[k] != k:
            path.append(k)
            k = int(self.parent[k])
        root = k
        # compress, accumulating weights from the root outwards
        acc = 1 + 0j
        for node in reversed(path):
            acc = acc * self.weight[node]
            self.weight[node] = acc
            self.parent[node] = root
        return root, (self.weight[path[0]] if path else 1 + 0j)

    def constrain_fixed(self, mask: np.ndarray, phase: np.ndarray):
        """v_k = phase[k] v_k on fixed points; any phase != 1 kills the class"""
        self.killed |= mask & (np.abs(phase - 1) > self.tolerance)

    def union(self, k: int, t: int, phase: complex):
        """Impose v_t = phase * v_k"""
        rk, wk = self.find(k)
        rt, wt = self.find(t)
        if rk == rt:
            if abs(wt - phase * wk) > self.tolerance:
                self.killed[k] = True
            return
        if rk < rt:
            self.parent[rt] = rk
            self.weight[rt] = phase * wk / wt
        else:
            self.parent[rk] = rt
            self.weight[rk] = wt / (phase * wk)

    def flatten(self) -> Tuple[np.ndarray, np.ndarray]:
        """(root, w) for every index with v_k = w[k] v_{root[k]}"""
        root = self.parent.copy()
        w = self.weight.copy()
        while True:
            nxt = root[root]
            if np.array_equal(nxt, root):
                return root, w
            w = w * w[root]
            root = nxt


def invariant_subspace_phased(c: RMatrix, n: int, phase_tolerance: Optional[float] = None,
                              max_sites: Optional[int] = None,
                              tolerance: Optional[float] = None) -> InvariantSubspace:
    settings = get_settings()
    if not is_generalized_permutation(c, tolerance):
        raise NotGeneralizedPermutationError(
            f"{c.label()} is not a generalized permutation matrix; use the dense solver")
    limit = settings.phased_max_sites if max_sites is None else max_sites
    check_sites_guard(n, limit, 'the phased invariant solver')
    if n < 1:
        raise IndexRangeError(f"N must be >= 1, got {n}")
    _check_matrix(c, tolerance)
    tol = settings.phase_tolerance if phase_tolerance is None else phase_tolerance

    size = 2 ** n
    classes = PhaseUnionFind(size, tol)
    for word in _generators(n):
        perm = as_phased_permutation(word, c, tolerance)
        fixed = perm.fixed_points()
        classes.constrain_fixed(fixed, perm.phase)
        for k in np.flatnonzero(~fixed):
            classes.union(int(k), int(perm.target[k]), complex(perm.phase[k]))

    root, w = classes.flatten()
    dead = np.zeros(size, dtype=bool)
    dead[root[classes.killed]] = True
    alive = ~dead[root]
    rows = np.flatnonzero(alive)
    representatives = np.unique(root[rows])
    cols = np.searchsorted(representatives, root[rows])
    counts = np.bincount(cols, minlength=len(representatives))
    values = w[rows] / np.sqrt(counts[cols])
    basis = sparse.csc_matrix((values, (rows, cols)), shape=(size, len(representatives)))
    logger.info(f"[Invariant Solver] phased N={n}: dimension {len(representatives)}")
    return InvariantSubspace(
        sites=n,
        dimension=int(len(representatives)),
        basis=basis,
        method='phased',
        tolerance=tol,
    )


def invariant_subspace(c: RMatrix, n: int, method: str = 'auto', **kwargs) -> InvariantSubspace:
    if method not in METHODS:
        raise UsageError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")
    if method == 'auto':
        method = 'phased' if is_generalized_permutation(c, kwargs.get('tolerance')) else 'dense'
    if method == 'phased':
        return invariant_subspace_phased(c, n, **kwargs)
    return invariant_subspace_dense(c, n, **kwargs)


def example2_support_indices(n: int) -> Tuple[int, int]:
    """(a_{N-1}, a_N) with a_1 = 2 and a_N = 2^N - a_{N-1} + 1; one-based"""
    if n < 2:
        raise IndexRangeError(f"the support indices need N >= 2, got {n}")
    a = [0, 2]
    for m in range(2, n + 1):
        a.append(2 ** m - a[m - 1] + 1)
    return a[n - 1], a[n]


def _generator_operator(word, c: RMatrix, n: int) -> sparse.csr_matrix:
    perm = as_phased_permutation(word, c)
    size = 2 ** n
    return sparse.csr_matrix((perm.phase, (perm.target, np.arange(size))), shape=(size, size))


def fixed_space_certificate(s: InvariantSubspace, c: RMatrix) -> float:
    """max over basis vectors v and generators x_{i,j} of |pi(x_{i,j}) v - v|"""
    if s.dimension == 0 or s.sites < 2:
        return 0.0
    worst = 0.0
    if is_generalized_permutation(c):
        for word in pure_generators(s.sites):
            moved = _generator_operator(word, c, s.sites) @ s.basis - s.basis
            worst = max(worst, float(np.max(sparse_norm(moved, axis=0))))
        return worst
    basis = s.dense_basis()
    for word in pure_generators(s.sites):
        moved = apply_word_array(basis, s.sites, word, c) - basis
        worst = max(worst, float(np.max(np.linalg.norm(moved, axis=0))))
    return worst


def principal_angles(first: InvariantSubspace, second: InvariantSubspace) -> np.ndarray:
    if first.dimension != second.dimension:
        raise UsageError(f"subspaces differ in dimension: {first.dimension} vs {second.dimension}")
    if first.dimension == 0:
        return np.zeros(0)
    return scipy.linalg.subspace_angles(first.dense_basis(), second.dense_basis())


def projector_p_pi(s: InvariantSubspace) -> np.ndarray:
    basis = s.dense_basis()
    return basis @ basis.conj().T


def induced_sym_rep(c: RMatrix, s: InvariantSubspace, tolerance: float = 1e-8) -> InducedSymRep:
    """
    Compress pi(b_i) to the basis of S. The compression error
    |(I - p) pi(b_i) p| doubles as the check that S is pi-invariant.
    """
    n = s.sites
    basis = s.dense_basis()
    d = s.dimension
    matrices = []
    compression = involution = unitarity = 0.0
    for i in range(1, n):
        moved = apply_local(basis, n, i, c.entries)
        block = basis.conj().T @ moved
        compression = max(compression, float(np.linalg.norm(moved - basis @ block)))
        involution = max(involution, float(np.linalg.norm(block @ block - np.eye(d))))
        unitarity = max(unitarity, float(np.linalg.norm(block.conj().T @ block - np.eye(d))))
        matrices.append(block)
    if compression > tolerance:
        raise CompressionError(
            f"pi(b_i) leaves the computed invariant subspace (error {compression:.3e}); solver failure")

    relation = 0.0
    for k in range(len(matrices) - 1):
        a, b = matrices[k], matrices[k + 1]
        relation = max(relation, float(np.linalg.norm(a @ b @ a - b @ a @ b)))
    for k in range(len(matrices)):
        for m in range(k + 2, len(matrices)):
            a, b = matrices[k], matrices[m]
            relation = max(relation, float(np.linalg.norm(a @ b - b @ a)))
    logger.info(f"[Induced Rep] N={n}, dim={d}: compression {compression:.2e}, "
                f"involution {involution:.2e}")
    return InducedSymRep(n, d, matrices, compression, involution, unitarity, relation)


def lift_induced(s: InvariantSubspace, matrix: np.ndarray) -> np.ndarray:
    """Embed an operator on the coordinates of S back into A_N: B M B^*"""
    basis = s.dense_basis()
    return basis @ matrix @ basis.conj().T


def induced_block_sizes(rep: InducedSymRep, tolerance: float = 1e-8) -> List[int]:
    """Sizes of the blocks shared by all generator matrices, ascending"""
    d = rep.dimension
    if d == 0:
        return []
    if not rep.generator_matrices:
        return [1] * d
    coupling = sum(np.abs(m) > tolerance for m in rep.generator_matrices)
    count, labels = connected_components(sparse.csr_matrix(coupling), directed=False)
    return sorted(int(x) for x in np.bincount(labels, minlength=count))


def subalgebra_check(s: InvariantSubspace, tolerance: float = 1e-8) -> bool:
    """Is span(S) closed under the coordinatewise product of A_N?"""
    if s.dimension == 0:
        return True
    basis = s.dense_basis()
    for a in range(s.dimension):
        products = basis[:, [a]] * basis
        outside = products - basis @ (basis.conj().T @ products)
        if np.max(np.linalg.norm(outside, axis=0)) > tolerance:
            return False
    return True
