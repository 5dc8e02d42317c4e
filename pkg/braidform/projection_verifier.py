"""
Finite-dimensional check of the braid-invariant projection formula.

H_0 is a stand-in of dimension h0_dim for the one-particle space; the
representation U(b_i) = S(phi(b_i)) (x) pi(b_i) acts on H_0^{(x)N} (x) A_N.
The projector onto the U-invariant subspace is built twice: from the
symmetric-group average (1 (x) p_pi)/N! sum_sigma S(sigma) (x) pi~(sigma),
and by brute force as the null space of sum_i (U(b_i) - I)^* (U(b_i) - I).
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

from .braid_core import BraidWord, Permutation, adjacent_factorization
from .config import get_settings
from .errors import IndexRangeError, SizeGuardError
from .invariant_solver import InvariantSubspace, induced_sym_rep, invariant_subspace, lift_induced, projector_p_pi
from .rep_engine import materialize
from .rmatrix import RMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ProductSpaceSpec:
    h0_dim: int
    sites: int
    local_matrix: RMatrix

    def __post_init__(self):
        if self.h0_dim < 1:
            raise IndexRangeError(f"h0_dim must be >= 1, got {self.h0_dim}")
        if self.sites < 1:
            raise IndexRangeError(f"N must be >= 1, got {self.sites}")

    @property
    def h_dim(self) -> int:
        return self.h0_dim ** self.sites

    @property
    def total_dim(self) -> int:
        return self.h_dim * 2 ** self.sites

    def check_guard(self, limit: Optional[int] = None):
        cap = get_settings().product_max_dim if limit is None else limit
        if self.total_dim > cap:
            raise SizeGuardError(
                f"h0_dim^N * 2^N = {self.total_dim} exceeds the product-space guard {cap}")


@dataclass(frozen=True)
class ProjectionComparison:
    formula_rank: int
    bruteforce_rank: int
    frobenius_distance: float
    idempotency_residual: float
    hermiticity_residual: float
    factorization_residual: float = 0.0
    commutation_residual: float = 0.0
    containment_residual: float = 0.0

    def agrees(self, tolerance: float = 1e-8) -> bool:
        return self.formula_rank == self.bruteforce_rank and self.frobenius_distance <= tolerance

    def to_dict(self) -> dict:
        return {
            "formula_rank": self.formula_rank,
            "bruteforce_rank": self.bruteforce_rank,
            "frobenius_distance": self.frobenius_distance,
            "idempotency_residual": self.idempotency_residual,
            "hermiticity_residual": self.hermiticity_residual,
            "factorization_residual": self.factorization_residual,
            "commutation_residual": self.commutation_residual,
            "containment_residual": self.containment_residual,
        }


def factor_swap(h0_dim: int, n: int, i: int) -> np.ndarray:
    """Permutation matrix exchanging tensor factors i and i+1 of H_0^{(x)n}"""
    if not 1 <= i <= n - 1:
        raise IndexRangeError(f"generator index {i} outside 1..{n - 1}")
    dim = h0_dim ** n
    grid = np.eye(dim).reshape((h0_dim,) * n + (dim,))
    return np.swapaxes(grid, i - 1, i).reshape(dim, dim)


def build_U_generator(spec: ProductSpaceSpec, i: int) -> np.ndarray:
    spec.check_guard()
    pi_b = materialize(BraidWord(spec.sites, ((i, 1),)), spec.local_matrix)
    return np.kron(factor_swap(spec.h0_dim, spec.sites, i), pi_b)


def symmetric_group_element(generators: List[np.ndarray], factorization: List[int], dim: int) -> np.ndarray:
    result = np.eye(dim, dtype=complex)
    for k in factorization:
        result = result @ generators[k - 1]
    return result


def _formula_with_certificate(spec: ProductSpaceSpec,
                              subspace: Optional[InvariantSubspace] = None) -> Tuple[np.ndarray, float]:
    spec.check_guard()
    n = spec.sites
    cap = get_settings().formula_max_sites
    if n > cap:
        raise SizeGuardError(f"the N! average is limited to N <= {cap} (got N = {n})")

    c = spec.local_matrix
    s = subspace if subspace is not None else invariant_subspace(c, n)
    rep = induced_sym_rep(c, s)
    p_pi = projector_p_pi(s)
    swaps = [factor_swap(spec.h0_dim, n, i) for i in range(1, n)]

    total = np.zeros((spec.total_dim, spec.total_dim), dtype=complex)
    worst = 0.0
    for images in itertools.permutations(range(1, n + 1)):
        sigma = Permutation(images)
        word = adjacent_factorization(sigma, 'left')
        other = adjacent_factorization(sigma, 'right')
        pi_tilde = rep.element(word)
        worst = max(worst, float(np.linalg.norm(pi_tilde - rep.element(other))) if s.dimension else 0.0)
        s_sigma = symmetric_group_element(swaps, word, spec.h_dim)
        total += np.kron(s_sigma, lift_induced(s, pi_tilde))
    projector = np.kron(np.eye(spec.h_dim), p_pi) @ total / math.factorial(n)
    logger.info(f"[Projection] formula built for h0={spec.h0_dim}, N={n} "
                f"(factorization residual {worst:.2e})")
    return projector, worst


def p_u_formula(spec: ProductSpaceSpec, subspace: Optional[InvariantSubspace] = None) -> np.ndarray:
    return _formula_with_certificate(spec, subspace)[0]


def p_u_bruteforce(spec: ProductSpaceSpec, threshold: Optional[float] = None) -> np.ndarray:
    spec.check_guard()
    cut = get_settings().null_threshold if threshold is None else threshold
    identity = np.eye(spec.total_dim, dtype=complex)
    gram = np.zeros_like(identity)
    for i in range(1, spec.sites):
        defect = build_U_generator(spec, i) - identity
        gram += defect.conj().T @ defect
    eigenvalues, eigenvectors = scipy.linalg.eigh(gram)
    kernel = eigenvectors[:, eigenvalues <= cut]
    return kernel @ kernel.conj().T


def projector_rank(p: np.ndarray) -> int:
    return int(round(float(np.trace(p).real)))


def symmetric_rank(h0_dim: int, n: int) -> int:
    """dim Sym^n(C^h0)"""
    return math.comb(h0_dim + n - 1, n)


def compare_projections(spec: ProductSpaceSpec) -> ProjectionComparison:
    c = spec.local_matrix
    n = spec.sites
    s = invariant_subspace(c, n)
    formula, factorization = _formula_with_certificate(spec, s)
    brute = p_u_bruteforce(spec)

    commutation = 0.0
    for i in range(1, n):
        u = build_U_generator(spec, i)
        commutation = max(commutation, float(np.linalg.norm(formula @ u - u @ formula)))
    lift = np.kron(np.eye(spec.h_dim), projector_p_pi(s))

    report = ProjectionComparison(
        formula_rank=projector_rank(formula),
        bruteforce_rank=projector_rank(brute),
        frobenius_distance=float(np.linalg.norm(formula - brute)),
        idempotency_residual=float(np.linalg.norm(formula @ formula - formula)),
        hermiticity_residual=float(np.linalg.norm(formula - formula.conj().T)),
        factorization_residual=factorization,
        commutation_residual=commutation,
        containment_residual=float(np.linalg.norm(lift @ brute - brute)),
    )
    if report.agrees():
        logger.info(f"[Projection] ✓ {c.label()} h0={spec.h0_dim} N={n}: rank {report.formula_rank}")
    else:
        logger.warning(f"[Projection] {c.label()} h0={spec.h0_dim} N={n}: distance "
                       f"{report.frobenius_distance:.3e}, ranks {report.formula_rank}/{report.bruteforce_rank}")
    return report
