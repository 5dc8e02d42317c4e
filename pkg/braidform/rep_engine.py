"""
Matrix-free application of pi(b_i) = 1 (x) .. (x) C (x) .. (x) 1 on (C^2)^{(x)N}.

Site 1 is the most significant bit of a basis index, so index order is the
lexicographic order of e_{i_1 .. i_N}. A word acts as
pi(l_1) pi(l_2) .. pi(l_k): the rightmost letter is applied first.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .braid_core import BraidWord
from .config import get_settings, resolve_tolerance
from .errors import (
    IndexRangeError,
    NotGeneralizedPermutationError,
    SizeGuardError,
    StrandMismatchError,
)
from .rmatrix import RMatrix, local_generalized_permutation

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class StateVector:
    sites: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if amplitudes.ndim != 1 or amplitudes.shape[0] != 2 ** self.sites:
            raise StrandMismatchError(
                f"a state on {self.sites} sites needs {2 ** self.sites} amplitudes, got shape {amplitudes.shape}")
        object.__setattr__(self, 'amplitudes', amplitudes)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def basis_index(bits: str) -> int:
    """'0110' -> zero-based index (site 1 is the leading character)"""
    return int(bits, 2)


def basis_bits(index: int, n: int) -> str:
    return format(index, f'0{n}b')


def basis_state(n: int, bits: str) -> StateVector:
    if len(bits) != n:
        raise StrandMismatchError(f"bit string {bits!r} does not have {n} sites")
    amplitudes = np.zeros(2 ** n, dtype=complex)
    amplitudes[basis_index(bits)] = 1
    return StateVector(n, amplitudes)


def _check_site(i: int, n: int):
    if not 1 <= i <= n - 1:
        raise IndexRangeError(f"generator index {i} outside 1..{n - 1} for {n} sites")


def apply_local(amplitudes: np.ndarray, n: int, i: int, local: np.ndarray) -> np.ndarray:
    """
    Apply a 4x4 operator on sites (i, i+1) to every column of `amplitudes`.

    amplitudes has shape (2^n,) or (2^n, k); the leading axis is reshaped to
    (2^(i-1), 4, 2^(n-i-1)) so no 2^n x 2^n operator is ever formed.
    """
    _check_site(i, n)
    batch = amplitudes.reshape(2 ** (i - 1), 4, 2 ** (n - i - 1), -1)
    out = np.einsum('ab,lbrk->lark', local, batch)
    return out.reshape(amplitudes.shape)


def apply_word_array(amplitudes: np.ndarray, n: int, w: BraidWord, c: RMatrix) -> np.ndarray:
    if w.strands != n:
        raise StrandMismatchError(f"word on {w.strands} strands applied to {n} sites")
    forward, backward = c.entries, c.inverse()
    out = np.array(amplitudes, dtype=complex)
    for index, sign in reversed(w.letters):
        out = apply_local(out, n, index, forward if sign == 1 else backward)
    return out


def apply_generator(v: StateVector, i: int, c: RMatrix, inverse: bool = False) -> StateVector:
    local = c.inverse() if inverse else c.entries
    return StateVector(v.sites, apply_local(v.amplitudes, v.sites, i, local))


def apply_word(v: StateVector, w: BraidWord, c: RMatrix) -> StateVector:
    return StateVector(v.sites, apply_word_array(v.amplitudes, v.sites, w, c))


def check_sites_guard(n: int, limit: int, what: str):
    if n > limit:
        raise SizeGuardError(f"{what} is limited to N <= {limit} (got N = {n}); raise the guard in braidform.properties")


def materialize(w: BraidWord, c: RMatrix, max_sites: Optional[int] = None) -> np.ndarray:
    """Dense 2^N x 2^N matrix of pi(w); columns are pi(w) e_k"""
    limit = get_settings().materialize_max_sites if max_sites is None else max_sites
    check_sites_guard(w.strands, limit, 'materialize')
    dim = 2 ** w.strands
    return apply_word_array(np.eye(dim, dtype=complex), w.strands, w, c)


@dataclass(frozen=True, eq=False)
class PhasedPermutation:
    """T e_k = phase[k] e_{target[k]}"""
    target: np.ndarray
    phase: np.ndarray

    def __post_init__(self):
        if self.target.shape != self.phase.shape or self.target.ndim != 1:
            raise StrandMismatchError("target and phase arrays must be one-dimensional and equally long")

    @property
    def size(self) -> int:
        return int(self.target.shape[0])

    @classmethod
    def identity(cls, size: int) -> 'PhasedPermutation':
        return cls(np.arange(size, dtype=np.int64), np.ones(size, dtype=complex))

    def is_valid(self, tolerance: Optional[float] = None) -> bool:
        tol = resolve_tolerance(tolerance)
        bijective = np.array_equal(np.sort(self.target), np.arange(self.size))
        return bool(bijective and np.all(np.abs(np.abs(self.phase) - 1) <= tol))

    def compose(self, other: 'PhasedPermutation') -> 'PhasedPermutation':
        """self o other"""
        return PhasedPermutation(self.target[other.target], other.phase * self.phase[other.target])

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        out = np.zeros_like(amplitudes, dtype=complex)
        out[self.target] = self.phase * amplitudes
        return out

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.size, self.size), dtype=complex)
        dense[self.target, np.arange(self.size)] = self.phase
        return dense

    def fixed_points(self) -> np.ndarray:
        return self.target == np.arange(self.size)


def _inverse_local(target: np.ndarray, phase: np.ndarray):
    inv_target = np.empty_like(target)
    inv_phase = np.empty_like(phase)
    inv_target[target] = np.arange(4)
    inv_phase[target] = 1 / phase
    return inv_target, inv_phase


def as_phased_permutation(w: BraidWord, c: RMatrix, tolerance: Optional[float] = None,
                          renormalize_every: int = 32) -> PhasedPermutation:
    """
    Exact index map and accumulated phases of pi(w) for a generalized
    permutation C; phases are renormalized to unit modulus periodically.
    """
    forward = local_generalized_permutation(c, tolerance)
    if np.any(np.abs(np.abs(forward[1]) - 1) > resolve_tolerance(tolerance)):
        raise NotGeneralizedPermutationError("phased tracking needs unit-modulus nonzero entries")
    backward = _inverse_local(*forward)
    n = w.strands
    target = np.arange(2 ** n, dtype=np.int64)
    phase = np.ones(2 ** n, dtype=complex)
    for step, (index, sign) in enumerate(reversed(w.letters), start=1):
        local_target, local_phase = forward if sign == 1 else backward
        shift = n - index - 1
        pair = (target >> shift) & 3
        phase = phase * local_phase[pair]
        target = (target & ~(3 << shift)) | (local_target[pair] << shift)
        if step % renormalize_every == 0:
            phase = phase / np.abs(phase)
    phase = phase / np.abs(phase)
    return PhasedPermutation(target, phase)
