"""
Braided L2-Betti numbers of X^N and the supertrace series.

b_m(X^N) = C_N^pi * (N-fold Kuenneth convolution of beta)_m with
C_N^pi = dim A_N^pi / (N! * 2^N). The supertrace is resummed as
c_0 + sum_{N >= 1} s^N C_N^pi chi^N, where s = -1 for the alternating
convention and c_0 is either 1 or the coefficient formula read at N = 0.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Union

import numpy as np

from .errors import (
    ClosedFormUnavailable,
    CoefficientBoundError,
    DimensionMismatchError,
    IndexRangeError,
    MatrixSpecError,
    UsageError,
)
from .invariant_solver import invariant_subspace
from .rmatrix import (
    CATALOG_TAGS,
    RMatrix,
    extrapolated_invariant_dimension,
    known_invariant_dimension,
)

logger = logging.getLogger(__name__)

SIGN_CONVENTIONS = ('plain', 'alternating')
CONSTANT_TERMS = ('one', 'extrapolated')


def _to_float(x: Fraction) -> float:
    """float(x), saturating to +-inf past the float range"""
    try:
        return float(x)
    except OverflowError:
        return math.inf if x > 0 else -math.inf


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


@dataclass(frozen=True, eq=False)
class BettiVector:
    values: np.ndarray
    source: str = ''

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise UsageError("a Betti vector needs at least beta_0")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise UsageError(f"Betti numbers must be finite and nonnegative, got {values.tolist()}")
        object.__setattr__(self, 'values', values)

    @property
    def dimension(self) -> int:
        return self.values.size - 1

    @classmethod
    def parse(cls, text: str, source: str = 'cli') -> 'BettiVector':
        try:
            values = [float(x) for x in text.replace(' ', '').split(',') if x]
        except ValueError:
            raise UsageError(f"cannot parse Betti vector {text!r}; expected e.g. 0,2,0") from None
        return cls(np.array(values), source)


@dataclass(frozen=True, eq=False)
class BraidedBettiResult:
    n: int
    c_n_pi: Fraction
    values: np.ndarray

    @property
    def c_float(self) -> float:
        return float(self.c_n_pi)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "c_n_pi": f"{self.c_n_pi.numerator}/{self.c_n_pi.denominator}",
            "c_n_pi_float": self.c_float,
            "values": [float(x) for x in self.values],
        }


@dataclass(frozen=True)
class ClosedForm:
    tag: str
    chi: float
    published_expression: str
    published_value: float
    derived_expression: str
    derived_value: float

    @property
    def deviates(self) -> bool:
        return not math.isclose(self.published_value, self.derived_value, rel_tol=1e-12, abs_tol=1e-12)

    def to_dict(self) -> dict:
        return {
            "tag": self.tag,
            "published_expression": self.published_expression,
            "published_value": self.published_value,
            "derived_expression": self.derived_expression,
            "derived_value": self.derived_value,
            "deviates": self.deviates,
        }


@dataclass(frozen=True)
class SupertraceReport:
    chi: float
    n_max: int
    sign_convention: str
    constant_term: str
    constant_value: float
    partial_sums: List[float]
    limit_estimate: float
    tail_bound: float
    closed_form_reference: Optional[ClosedForm] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "chi": self.chi,
            "n_max": self.n_max,
            "sign_convention": self.sign_convention,
            "constant_term": self.constant_term,
            "constant_value": self.constant_value,
            "partial_sums": self.partial_sums,
            "limit_estimate": self.limit_estimate,
            "tail_bound": self.tail_bound,
            "closed_form_reference": (self.closed_form_reference.to_dict()
                                      if self.closed_form_reference else None),
            "notes": self.notes,
        }


def c_n_pi(inv_dim: int, n: int, alg_dim: Optional[int] = None) -> Fraction:
    """C_N^pi = dim A_N^pi / (N! dim A_N), exact"""
    if n < 1:
        raise IndexRangeError(f"N must be >= 1, got {n}")
    total = 2 ** n if alg_dim is None else alg_dim
    if inv_dim < 0:
        raise UsageError(f"invariant dimension must be nonnegative, got {inv_dim}")
    value = Fraction(inv_dim, math.factorial(n) * total)
    if value > Fraction(1, math.factorial(n)):
        raise CoefficientBoundError(f"C_{n}^pi = {value} exceeds 1/{n}!: "
                                    f"dim A_N^pi = {inv_dim} > dim A_N = {total}")
    return value


def kunneth_convolve(beta: BettiVector, n: int) -> np.ndarray:
    """Coefficients of (sum_k beta_k t^k)^N, length N*d + 1"""
    if n < 1:
        raise IndexRangeError(f"N must be >= 1, got {n}")
    out = np.ones(1)
    for _ in range(n):
        out = np.convolve(out, beta.values)
    return out


def braided_betti(beta: BettiVector, n: int, inv_dim: int) -> BraidedBettiResult:
    c = c_n_pi(inv_dim, n)
    return BraidedBettiResult(n, c, float(c) * kunneth_convolve(beta, n))


def euler_characteristic(beta: BettiVector) -> float:
    signs = (-1.0) ** np.arange(beta.values.size)
    return float(np.dot(signs, beta.values))


def index_identity_residual(result: BraidedBettiResult, beta: BettiVector) -> float:
    """| sum_m (-1)^m b_m(X^N) - C_N^pi chi^N |"""
    signs = (-1.0) ** np.arange(result.values.size)
    lhs = float(np.dot(signs, result.values))
    return abs(lhs - result.c_float * euler_characteristic(beta) ** result.n)


def coefficient_sequence(source: Union[str, RMatrix], n_max: int,
                         verify_upto: int = 0) -> List[Optional[Fraction]]:
    """
    C_N^pi for N = 0..n_max. Entry 0 is the extrapolated constant term, or
    None when the matrix has no closed coefficient formula.

    Catalog matrices use the proven dimensions; verify_upto re-derives
    dim A_N^pi with the solver for N <= verify_upto. Other matrices are
    solved for every N.
    """
    if n_max < 1:
        raise IndexRangeError(f"n_max must be >= 1, got {n_max}")
    tag = source if isinstance(source, str) else source.tag
    if isinstance(source, str) and tag not in CATALOG_TAGS:
        raise MatrixSpecError(f"unknown catalog tag {tag!r}")

    if tag in CATALOG_TAGS:
        c0 = extrapolated_invariant_dimension(tag)
        sequence = [None if c0 is None else Fraction(c0)]
        for n in range(1, n_max + 1):
            known = known_invariant_dimension(tag, n)
            if n <= verify_upto and isinstance(source, RMatrix):
                solved = invariant_subspace(source, n).dimension
                if solved != known:
                    raise DimensionMismatchError(f"{tag} at N={n}: solver gives {solved}, formula gives {known}")
            sequence.append(c_n_pi(known, n))
        return sequence

    sequence = [None]
    for n in range(1, n_max + 1):
        sequence.append(c_n_pi(invariant_subspace(source, n).dimension, n))
    return sequence


def closed_form_reference(tag: str, chi: float) -> ClosedForm:
    """Published closed form of the alternating series next to the resummed one"""
    half = _exp(-chi / 2)
    if tag == 'ex1':
        value = _exp(-chi)
        return ClosedForm(tag, chi, 'exp(-chi)', value, 'exp(-chi)', value)
    if tag == 'ex2':
        value = 2 * half
        return ClosedForm(tag, chi, '2*exp(-chi/2)', value, '2*exp(-chi/2)', value)
    if tag == 'ex3':
        return ClosedForm(
            tag, chi,
            '1 - (chi/2)*exp(-chi/2) + exp(-chi/2)', 1 - (chi / 2) * half + half,
            '(1 - chi/2)*exp(-chi/2)', (1 - chi / 2) * half,
        )
    raise ClosedFormUnavailable(f"no closed form is known for {tag!r}")


def supertrace_partial(chi: float, c_sequence: Sequence[Optional[Fraction]], n_max: int,
                       sign: str = 'alternating', c0: str = 'extrapolated',
                       tag: Optional[str] = None) -> SupertraceReport:
    """
    Partial sums s_n = c_0 + sum_{N=1}^{n} s^N C_N chi^N for n = 1..n_max.

    c_sequence is indexed by N and must cover 1..n_max; entry 0 is the
    extrapolated constant term (None falls back to c0 = one).
    """
    if n_max < 1:
        raise IndexRangeError(f"n_max must be >= 1, got {n_max}")
    if sign not in SIGN_CONVENTIONS:
        raise UsageError(f"sign must be one of {', '.join(SIGN_CONVENTIONS)}, got {sign!r}")
    if c0 not in CONSTANT_TERMS:
        raise UsageError(f"c0 must be one of {', '.join(CONSTANT_TERMS)}, got {c0!r}")
    if len(c_sequence) < n_max + 1:
        raise UsageError(f"coefficient sequence covers N <= {len(c_sequence) - 1}, need {n_max}")
    if not math.isfinite(chi):
        raise UsageError(f"chi must be finite, got {chi}")

    notes = []
    used = c0
    if c0 == 'extrapolated' and c_sequence[0] is None:
        logger.warning("[Supertrace] no extrapolated constant term; falling back to c0 = one")
        notes.append("c0=extrapolated unavailable; used c0=one")
        used = 'one'
    constant = Fraction(1) if used == 'one' else Fraction(c_sequence[0])

    # exact partial sums, converted to float one by one
    step = Fraction(chi) * (-1 if sign == 'alternating' else 1)
    total = constant
    power = Fraction(1)
    partial_sums = []
    for n in range(1, n_max + 1):
        power *= step
        total += Fraction(c_sequence[n]) * power
        partial_sums.append(_to_float(total))

    # N! C_N <= 1, so |chi|^n / n! * max N! C_N bounds the last step
    scale = max(Fraction(c_sequence[n]) * math.factorial(n) for n in range(1, n_max + 1))
    tail = _to_float(abs(Fraction(chi)) ** n_max / math.factorial(n_max) * scale)
    limit = partial_sums[-1]

    reference = None
    if tag in ('ex1', 'ex2', 'ex3') and sign == 'alternating' and used == 'extrapolated':
        reference = closed_form_reference(tag, chi)
        if reference.deviates:
            notes.append(f"published closed form {reference.published_expression} differs from "
                         f"the resummed series {reference.derived_expression}")
    logger.info(f"[Supertrace] chi={chi}, n_max={n_max}, {sign}, c0={used}: {limit:.12g}")
    return SupertraceReport(
        chi=float(chi),
        n_max=n_max,
        sign_convention=sign,
        constant_term=used,
        constant_value=float(constant),
        partial_sums=partial_sums,
        limit_estimate=limit,
        tail_bound=tail,
        closed_form_reference=reference,
        notes=notes,
    )


@dataclass(frozen=True)
class BettiMass:
    partial_sums: List[float]
    bound: float


def betti_mass_series(beta: BettiVector, coefficients: Sequence[Optional[Fraction]],
                      n_max: int) -> BettiMass:
    """Partial sums of sum_N sum_m b_m(X^N) = sum_N C_N (sum_k beta_k)^N, bounded by exp(sum beta)"""
    mass = Fraction(float(beta.values.sum()))
    total = Fraction(0)
    sums = []
    for n in range(1, n_max + 1):
        total += Fraction(coefficients[n]) * mass ** n
        sums.append(_to_float(total))
    return BettiMass(sums, _exp(float(mass)))


def surface_case(beta1: float, coefficients: Sequence[Optional[Fraction]], n_max: int) -> List[float]:
    """dim X = 2 with only beta_1 nonzero: b_N(X^N) = C_N beta_1^N, N = 1..n_max"""
    if beta1 < 0:
        raise UsageError(f"beta_1 must be nonnegative, got {beta1}")
    return [float(coefficients[n]) * beta1 ** n for n in range(1, n_max + 1)]
