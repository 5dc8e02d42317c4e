"""
4x4 braid-equation matrices on C^2 (x) C^2.

Basis order of the two-site space is (00, 01, 10, 11), first factor as
the high bit. The catalog holds the four generalized-permutation
solutions used throughout the package; q = exp(i*theta) is always given
as a phase angle so that |q| = 1 holds by construction.
"""
import json
import logging
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import numpy as np

from .config import get_settings, resolve_tolerance
from .errors import (
    DegenerateParameterError,
    MatrixSpecError,
    NotGeneralizedPermutationError,
)

logger = logging.getLogger(__name__)

CATALOG_TAGS = ('ex1', 'ex2', 'ex3', 'ex4')
DEGENERACY_MARGIN = 100

_I2 = np.eye(2, dtype=complex)
_THETA = re.compile(r'^(-)?(\d+)?\s*\*?\s*pi(?:\s*/\s*(\d+))?$')

CATALOG_DESCRIPTIONS = {
    'ex1': "C^2 = 1 (e00 <-> e11 with phases q, conj(q); eps on e01, e10); reduces to S_N",
    'ex2': "e00 <-> e11 with phase q, e01 and e10 fixed; invariant dimension 2",
    'ex3': "phased swap: e00 -> q e00, e01 <-> e10, e11 fixed; invariant dimension N+1",
    'ex4': "e00 <-> e11, phase q on e01 and e10; invariant dimension 0 for N >= 3",
}

DIMENSION_FORMULAS = {
    'ex1': '2^N',
    'ex2': '2',
    'ex3': 'N+1',
    'ex4': '0 (N >= 3)',
}


@dataclass(frozen=True, eq=False)
class RMatrix:
    entries: np.ndarray
    tag: Optional[str] = None
    theta: Optional[float] = None
    epsilon: Optional[int] = None

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        if entries.shape != (4, 4):
            raise MatrixSpecError(f"an R-matrix must be 4x4, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise MatrixSpecError("matrix entries must be finite")
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @property
    def q(self) -> Optional[complex]:
        return None if self.theta is None else complex(np.exp(1j * self.theta))

    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.entries)

    def label(self) -> str:
        if self.tag is None:
            return 'custom'
        params = []
        if self.theta is not None:
            params.append(f"theta={self.theta:.12g}")
        if self.epsilon is not None:
            params.append(f"eps={self.epsilon}")
        return f"{self.tag}:{','.join(params)}" if params else self.tag

    def to_json(self) -> dict:
        return {
            "entries": [[[float(z.real), float(z.imag)] for z in row] for row in self.entries],
            "tag": self.tag,
            "theta": self.theta,
            "epsilon": self.epsilon,
        }

    @classmethod
    def from_json(cls, obj) -> 'RMatrix':
        if not isinstance(obj, dict) or 'entries' not in obj:
            raise MatrixSpecError('matrix JSON needs an "entries" field')
        try:
            entries = [[complex(float(re_), float(im)) for re_, im in row] for row in obj['entries']]
        except (TypeError, ValueError):
            raise MatrixSpecError('"entries" must be 4 rows of 4 [re, im] pairs') from None
        if len(entries) != 4 or any(len(row) != 4 for row in entries):
            raise MatrixSpecError('"entries" must be 4 rows of 4 [re, im] pairs')
        theta = obj.get('theta')
        epsilon = obj.get('epsilon')
        return cls(
            np.array(entries),
            tag=obj.get('tag'),
            theta=None if theta is None else float(theta),
            epsilon=None if epsilon is None else int(epsilon),
        )


@dataclass(frozen=True)
class ResidualReport:
    frobenius_residual: float
    tolerance: float
    passes: bool

    @classmethod
    def of(cls, residual: float, tolerance: float) -> 'ResidualReport':
        return cls(float(residual), float(tolerance), bool(residual <= tolerance))

    def to_dict(self) -> dict:
        return {
            "frobenius_residual": self.frobenius_residual,
            "tolerance": self.tolerance,
            "passes": self.passes,
        }


def _as_array(c) -> np.ndarray:
    return c.entries if isinstance(c, RMatrix) else np.asarray(c, dtype=complex)


def braid_lifts(c) -> Tuple[np.ndarray, np.ndarray]:
    """(C (x) 1, 1 (x) C) on the 8-dimensional three-site space"""
    m = _as_array(c)
    return np.kron(m, _I2), np.kron(_I2, m)


def braid_residual(c, tolerance: Optional[float] = None) -> ResidualReport:
    left, right = braid_lifts(c)
    diff = left @ right @ left - right @ left @ right
    return ResidualReport.of(np.linalg.norm(diff, 'fro'), resolve_tolerance(tolerance))


def unitarity_residual(c, tolerance: Optional[float] = None) -> ResidualReport:
    m = _as_array(c)
    diff = m.conj().T @ m - np.eye(m.shape[0])
    return ResidualReport.of(np.linalg.norm(diff, 'fro'), resolve_tolerance(tolerance))


def swap_sigma() -> RMatrix:
    sigma = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            sigma[2 * j + i, 2 * i + j] = 1
    return RMatrix(sigma, tag='sigma')


def identity_matrix() -> RMatrix:
    return RMatrix(np.eye(4, dtype=complex), tag='identity')


def ybe_residual(r, tolerance: Optional[float] = None) -> ResidualReport:
    """Residual of R12 R13 R23 = R23 R13 R12 on the three-site space"""
    m = _as_array(r)
    swap23 = np.kron(_I2, swap_sigma().entries)
    r12 = np.kron(m, _I2)
    r23 = np.kron(_I2, m)
    r13 = swap23 @ r12 @ swap23
    diff = r12 @ r13 @ r23 - r23 @ r13 @ r12
    return ResidualReport.of(np.linalg.norm(diff, 'fro'), resolve_tolerance(tolerance))


def braid_to_ybe(c) -> RMatrix:
    """R = C Sigma"""
    return RMatrix(_as_array(c) @ swap_sigma().entries, tag='ybe')


def ybe_to_braid(r) -> RMatrix:
    """C = R Sigma (Sigma is an involution, so this inverts braid_to_ybe)"""
    return RMatrix(_as_array(r) @ swap_sigma().entries, tag='braid')


def _check_admissible(name: str, theta: float, theta_over_pi: Optional[Fraction]):
    if theta_over_pi is not None and theta_over_pi.denominator == 1:
        raise DegenerateParameterError(
            f"{name} needs q^2 != 1, but theta = {theta_over_pi}*pi gives q = +-1")
    # q^2 must clear the phased solver's merge tolerance with room to spare
    gap = abs(np.exp(2j * theta) - 1)
    floor = DEGENERACY_MARGIN * get_settings().phase_tolerance
    if gap <= floor:
        raise DegenerateParameterError(
            f"{name} needs q^2 != 1, theta = {theta} gives |q^2 - 1| = {gap:.3g} <= {floor:.3g}")


def catalog(name: str, theta: float = 0.0, epsilon: int = 1,
            theta_over_pi: Optional[Fraction] = None) -> RMatrix:
    """
    The four example matrices with q = exp(i*theta).

    epsilon is only used by ex1. ex2..ex4 reject q^2 = 1 exactly when
    theta_over_pi is given, and reject |q^2 - 1| <= DEGENERACY_MARGIN *
    phase_tolerance in every case.
    """
    if name not in CATALOG_TAGS:
        raise MatrixSpecError(f"unknown catalog entry {name!r}; expected one of {', '.join(CATALOG_TAGS)}")
    if theta_over_pi is not None:
        theta = float(theta_over_pi) * math.pi
    theta = float(theta)
    q = complex(np.exp(1j * theta))
    c = np.zeros((4, 4), dtype=complex)
    if name == 'ex1':
        if epsilon not in (1, -1):
            raise MatrixSpecError(f"epsilon must be +1 or -1, got {epsilon}")
        c[0, 3] = q
        c[3, 0] = q.conjugate()
        c[1, 1] = c[2, 2] = epsilon
        return RMatrix(c, tag=name, theta=theta, epsilon=int(epsilon))

    _check_admissible(name, theta, theta_over_pi)
    if name == 'ex2':
        c[0, 3] = c[3, 0] = q
        c[1, 1] = c[2, 2] = 1
    elif name == 'ex3':
        c[0, 0] = q
        c[1, 2] = c[2, 1] = 1
        c[3, 3] = 1
    else:
        c[0, 3] = c[3, 0] = 1
        c[1, 1] = c[2, 2] = q
    return RMatrix(c, tag=name, theta=theta)


def is_involutive(c, tolerance: Optional[float] = None) -> bool:
    m = _as_array(c)
    return bool(np.linalg.norm(m @ m - np.eye(4), 'fro') <= resolve_tolerance(tolerance))


def is_generalized_permutation(c, tolerance: Optional[float] = None) -> bool:
    mask = np.abs(_as_array(c)) > resolve_tolerance(tolerance)
    return bool(np.all(mask.sum(axis=0) == 1) and np.all(mask.sum(axis=1) == 1))


def local_generalized_permutation(c, tolerance: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """(target, phase) with C e_k = phase[k] e_{target[k]}"""
    m = _as_array(c)
    if not is_generalized_permutation(m, tolerance):
        raise NotGeneralizedPermutationError("matrix has more than one nonzero entry in some row or column")
    target = np.argmax(np.abs(m), axis=0)
    phase = m[target, np.arange(4)]
    return target.astype(np.int64), phase.astype(complex)


def known_invariant_dimension(tag: str, n: int) -> int:
    """Proven dim A_N^pi for the catalog at N >= 1"""
    if tag not in CATALOG_TAGS:
        raise MatrixSpecError(f"no known invariant dimension formula for {tag!r}")
    if n < 1:
        raise MatrixSpecError(f"known dimensions start at N = 1, got {n}")
    if tag == 'ex1':
        return 2 ** n
    if tag == 'ex2':
        return 2
    if tag == 'ex3':
        return n + 1
    # ex4: only b_1^2 = diag(1, q^2, q^2, 1) constrains N = 2
    return 2 if n <= 2 else 0


def extrapolated_invariant_dimension(tag: str) -> Optional[int]:
    """The closed formula read at N = 0, used as the C_0 term; ex4 has none"""
    return {'ex1': 1, 'ex2': 2, 'ex3': 1}.get(tag)


def catalog_entries() -> List[Dict[str, str]]:
    return [
        {
            "tag": tag,
            "description": CATALOG_DESCRIPTIONS[tag],
            "invariant_dimension": DIMENSION_FORMULAS[tag],
            "involutive": "yes" if tag == 'ex1' else "no",
        }
        for tag in CATALOG_TAGS
    ]


def parse_theta(text: str) -> Tuple[float, Optional[Fraction]]:
    """Parse radians: a decimal, or an exact 'pi', 'pi/k', 'p*pi/k', '-pi/k'"""
    raw = text.strip().replace(' ', '')
    match = _THETA.match(raw)
    if match:
        sign = -1 if match.group(1) else 1
        numerator = int(match.group(2)) if match.group(2) else 1
        denominator = int(match.group(3)) if match.group(3) else 1
        if denominator == 0:
            raise MatrixSpecError(f"zero denominator in theta {text!r}")
        ratio = Fraction(sign * numerator, denominator)
        return float(ratio) * math.pi, ratio
    try:
        value = float(raw)
    except ValueError:
        raise MatrixSpecError(f"cannot parse theta {text!r}") from None
    if not math.isfinite(value):
        raise MatrixSpecError(f"theta must be finite, got {text!r}")
    return value, None


def parse_matrix_spec(text: str) -> RMatrix:
    """
    Accepts 'ex3:theta=pi/3', 'ex1:theta=0,eps=-1', 'sigma', 'identity',
    an inline JSON object, or '@path/to/matrix.json'.
    """
    spec = text.strip()
    if spec.startswith('@'):
        try:
            with open(spec[1:], 'r') as f:
                obj = json.load(f)
        except FileNotFoundError:
            raise MatrixSpecError(f"matrix file not found: {spec[1:]}") from None
        except json.JSONDecodeError as e:
            raise MatrixSpecError(f"malformed matrix JSON in {spec[1:]}: {e}") from None
        return RMatrix.from_json(obj)
    if spec.startswith('{'):
        try:
            return RMatrix.from_json(json.loads(spec))
        except json.JSONDecodeError as e:
            raise MatrixSpecError(f"malformed matrix JSON: {e}") from None
    if spec in ('sigma', 'swap'):
        return swap_sigma()
    if spec == 'identity':
        return identity_matrix()

    name, _, params = spec.partition(':')
    if name not in CATALOG_TAGS:
        raise MatrixSpecError(f"unknown matrix spec {text!r}")
    values = {}
    for item in filter(None, params.split(',')):
        key, sep, value = item.partition('=')
        if not sep:
            raise MatrixSpecError(f"expected key=value in matrix spec, got {item!r}")
        values[key.strip()] = value.strip()
    unknown = set(values) - {'theta', 'eps', 'epsilon'}
    if unknown:
        raise MatrixSpecError(f"unknown matrix parameters: {', '.join(sorted(unknown))}")

    if 'theta' in values:
        theta, ratio = parse_theta(values['theta'])
    elif name == 'ex1':
        theta, ratio = 0.0, Fraction(0)
    else:
        raise MatrixSpecError(f"{name} needs a phase angle, e.g. {name}:theta=pi/3")
    eps_text = values.get('eps', values.get('epsilon', '1'))
    try:
        epsilon = int(eps_text)
    except ValueError:
        raise MatrixSpecError(f"epsilon must be +1 or -1, got {eps_text!r}") from None
    return catalog(name, theta, epsilon, theta_over_pi=ratio)
