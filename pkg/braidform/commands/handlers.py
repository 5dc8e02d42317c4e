"""
Subcommand implementations; each wraps one or more library operations
and turns the result into flat records.
"""
import argparse
import logging
from fractions import Fraction
from typing import Dict, List, Optional, Tuple, Type

import numpy as np
import yaml

from ..betti_calculator import (
    CONSTANT_TERMS,
    SIGN_CONVENTIONS,
    BettiVector,
    betti_mass_series,
    braided_betti,
    coefficient_sequence,
    euler_characteristic,
    index_identity_residual,
    supertrace_partial,
)
from ..braid_core import compose, parse_word, random_word, to_permutation
from ..config import Settings
from ..errors import UsageError
from ..invariant_solver import METHODS, fixed_space_certificate, invariant_subspace
from ..projection_verifier import ProductSpaceSpec, compare_projections
from ..rep_engine import StateVector, apply_word, basis_bits, basis_state, materialize
from ..rmatrix import (
    CATALOG_TAGS,
    RMatrix,
    braid_residual,
    braid_to_ybe,
    catalog_entries,
    known_invariant_dimension,
    parse_matrix_spec,
    unitarity_residual,
    ybe_residual,
    ybe_to_braid,
)
from .base_command import Command, CommandResult, parse_n_range

logger = logging.getLogger(__name__)

DEFAULT_SWEEP_THETA = 'pi/3'


def _fraction_text(value: Optional[Fraction]) -> Optional[str]:
    return None if value is None else f"{value.numerator}/{value.denominator}"


def _known_dimension(c: RMatrix, n: int) -> Optional[int]:
    return known_invariant_dimension(c.tag, n) if c.tag in CATALOG_TAGS else None


def _add_matrix(parser: argparse.ArgumentParser):
    parser.add_argument('--matrix', required=True,
                        help="ex1..ex4 with parameters (ex3:theta=pi/3), sigma, identity, JSON or @file.json")


def _add_method(parser: argparse.ArgumentParser):
    parser.add_argument('--method', choices=METHODS, default='auto', help="invariant solver (default: auto)")


class CatalogCommand(Command):
    def __init__(self, settings: Settings):
        super().__init__("catalog", "List the catalog of braid-equation solutions", settings)

    def add_arguments(self, parser):
        pass

    def handle(self, args):
        records = [self.record('catalog', **entry) for entry in catalog_entries()]
        return CommandResult(records, True, 'Catalog')


class CheckBraidEqCommand(Command):
    def __init__(self, settings: Settings):
        super().__init__("check-braid-eq", "Residual of the braid equation and of unitarity", settings)

    def add_arguments(self, parser):
        _add_matrix(parser)

    def handle(self, args):
        c = parse_matrix_spec(args.matrix)
        braid = braid_residual(c, self.settings.tolerance)
        unitary = unitarity_residual(c, self.settings.tolerance)
        logger.info(f"[Residuals] {c.label()}: braid {braid.frobenius_residual:.3e}, "
                    f"unitarity {unitary.frobenius_residual:.3e}")
        record = self.record(
            'frobenius',
            matrix=c.label(),
            braid_residual=braid.frobenius_residual,
            unitarity_residual=unitary.frobenius_residual,
            passes=braid.passes,
            unitary=unitary.passes,
        )
        return CommandResult([record], braid.passes, 'Braid equation')


class CheckYbeCommand(Command):
    def __init__(self, settings: Settings):
        super().__init__("check-ybe", "Residual of the constant Yang-Baxter equation for R = C Sigma", settings)

    def add_arguments(self, parser):
        _add_matrix(parser)
        parser.add_argument('--input', choices=('braid', 'ybe'), default='braid',
                            help="treat --matrix as C (braid, default) or as R (ybe)")

    def handle(self, args):
        given = parse_matrix_spec(args.matrix)
        if args.input == 'braid':
            c, r = given, braid_to_ybe(given)
        else:
            c, r = ybe_to_braid(given), given
        ybe = ybe_residual(r, self.settings.tolerance)
        braid = braid_residual(c, self.settings.tolerance)
        record = self.record(
            'frobenius',
            matrix=given.label(),
            input=args.input,
            ybe_residual=ybe.frobenius_residual,
            braid_residual=braid.frobenius_residual,
            passes=ybe.passes,
        )
        return CommandResult([record], ybe.passes, 'Yang-Baxter equation')


class ApplyWordCommand(Command):
    def __init__(self, settings: Settings):
        super().__init__("apply-word", "Apply pi(w) to a basis state", settings)

    def add_arguments(self, parser):
        _add_matrix(parser)
        parser.add_argument('--n', required=True, type=int, help="number of strands")
        parser.add_argument('--word', required=True, help="letters such as 'b1 b2^-1' or '1 -2'")
        parser.add_argument('--bits', help="input basis state, site 1 first (default: all zeros)")

    def handle(self, args):
        c = parse_matrix_spec(args.matrix)
        w = parse_word(args.word, args.n)
        bits = '0' * args.n if args.bits is None else args.bits
        if set(bits) - {'0', '1'}:
            raise UsageError(f"--bits must be a 0/1 string, got {bits!r}")
        out = apply_word(basis_state(args.n, bits), w, c)
        image = [[int(k) + 1, basis_bits(int(k), args.n), float(out.amplitudes[k].real), float(out.amplitudes[k].imag)]
                 for k in np.flatnonzero(np.abs(out.amplitudes) > self.settings.tolerance)]
        record = self.record(
            'matrix-free',
            matrix=c.label(),
            n=args.n,
            word=str(w),
            permutation=str(to_permutation(w)),
            input=bits,
            output=image,
            norm=out.norm(),
        )
        return CommandResult([record], True, 'Word action')


class CheckRepCommand(Command):
    def __init__(self, settings: Settings):
        super().__init__("check-rep", "Randomized check that pi is a unitary homomorphism on words", settings)

    def add_arguments(self, parser):
        _add_matrix(parser)
        parser.add_argument('--n', type=int, default=4, help="number of strands (default: 4)")
        parser.add_argument('--samples', type=int, default=20)
        parser.add_argument('--length', type=int, default=12, help="letters per random word")

    def handle(self, args):
        c = parse_matrix_spec(args.matrix)
        if args.n < 2 or args.samples < 1 or args.length < 1:
            raise UsageError("check-rep needs --n >= 2, --samples >= 1 and --length >= 1")
        seed = getattr(args, 'seed', 0)
        rng = np.random.default_rng(seed)
        homomorphism = norm_drift = 0.0
        for _ in range(args.samples):
            a, b = random_word(args.n, args.length, rng), random_word(args.n, args.length, rng)
            product = materialize(a, c) @ materialize(b, c)
            homomorphism = max(homomorphism, float(np.linalg.norm(materialize(compose(a, b), c) - product)))
            v = rng.normal(size=2 ** args.n) + 1j * rng.normal(size=2 ** args.n)
            state = StateVector(args.n, v / np.linalg.norm(v))
            norm_drift = max(norm_drift, abs(apply_word(state, a, c).norm() - 1.0))
        passes = homomorphism <= self.settings.tolerance and norm_drift <= self.settings.tolerance
        logger.info(f"[Representation] {c.label()} N={args.n}: homomorphism {homomorphism:.2e}, "
                    f"norm drift {norm_drift:.2e}")
        record = self.record(
            'random-words',
            matrix=c.label(),
            n=args.n,
            samples=args.samples,
            length=args.length,
            rng_seed=seed,
            homomorphism_residual=homomorphism,
            norm_residual=norm_drift,
            passes=passes,
        )
        return CommandResult([record], passes, 'Representation property')


class InvariantDimCommand(Command):
    def __init__(self, settings: Settings):
        super().__init__("invariant-dim", "Dimension of the pure-braid-invariant subspace per N", settings)

    def add_arguments(self, parser):
        _add_matrix(parser)
        parser.add_argument('--n', required=True, help="K or A..B")
        _add_method(parser)

    def handle(self, args):
        c = parse_matrix_spec(args.matrix)
        records = []
        passed = True
        for n in parse_n_range(args.n):
            s = invariant_subspace(c, n, method=args.method)
            known = _known_dimension(c, n)
            if known is not None and known != s.dimension:
                logger.error(f"[Invariant Solver] {c.label()} N={n}: dimension {s.dimension}, expected {known}")
                passed = False
            fields = s.to_dict()
            fields.pop('tolerance')
            method = fields.pop('method')
            records.append(self.record(
                method,
                matrix=c.label(),
                known_dimension=known,
                residual_max=fixed_space_certificate(s, c),
                solver_tolerance=s.tolerance,
                **fields,
            ))
        return CommandResult(records, passed, 'Invariant dimension')


class InvariantBasisCommand(Command):
    def __init__(self, settings: Settings):
        super().__init__("invariant-basis", "Orthonormal basis of the invariant subspace", settings)

    def add_arguments(self, parser):
        _add_matrix(parser)
        parser.add_argument('--n', required=True, type=int)
        _add_method(parser)

    def handle(self, args):
        c = parse_matrix_spec(args.matrix)
        s = invariant_subspace(c, args.n, method=args.method)
        basis = s.basis.tocsc()
        columns = []
        for k in range(s.dimension):
            column = basis[:, [k]].tocoo()
            order = column.row.argsort()
            columns.append([[int(column.row[i]) + 1, float(column.data[i].real), float(column.data[i].imag)]
                            for i in order if abs(column.data[i]) > s.tolerance])
        record = self.record(
            s.method,
            matrix=c.label(),
            n=s.sites,
            dimension=s.dimension,
            support=s.support(),
            basis=columns,
        )
        return CommandResult([record], True, 'Invariant basis')


class VerifyProjectionCommand(Command):
    def __init__(self, settings: Settings):
        super().__init__("verify-projection",
                         "Compare the symmetric-group projection formula with the brute-force projector",
                         settings)

    def add_arguments(self, parser):
        _add_matrix(parser)
        parser.add_argument('--h0', type=int, default=2, help="dimension of the one-particle stand-in")
        parser.add_argument('--n', required=True, help="K or A..B")

    def handle(self, args):
        c = parse_matrix_spec(args.matrix)
        records = []
        passed = True
        for n in parse_n_range(args.n):
            report = compare_projections(ProductSpaceSpec(args.h0, n, c))
            agrees = report.agrees(1e-8)
            passed = passed and agrees
            records.append(self.record('formula-vs-nullspace', matrix=c.label(), h0=args.h0, n=n,
                                       agrees=agrees, **report.to_dict()))
        return CommandResult(records, passed, 'Projection formula')


def _coefficients_for(c: RMatrix, n_values: List[int]) -> Dict[int, int]:
    dims = {}
    for n in n_values:
        known = _known_dimension(c, n)
        dims[n] = known if known is not None else invariant_subspace(c, n).dimension
    return dims


class BettiCommand(Command):
    def __init__(self, settings: Settings):
        super().__init__("betti", "Braided L2-Betti numbers of X^N", settings)

    def add_arguments(self, parser):
        parser.add_argument('--beta', required=True, help="comma-separated beta_0..beta_d, e.g. 0,2,0")
        parser.add_argument('--n', required=True, help="K or A..B")
        _add_matrix(parser)

    def handle(self, args):
        beta = BettiVector.parse(args.beta)
        c = parse_matrix_spec(args.matrix)
        n_values = parse_n_range(args.n)
        dims = _coefficients_for(c, n_values)
        chi = euler_characteristic(beta)
        records = []
        passed = True
        for n in n_values:
            result = braided_betti(beta, n, dims[n])
            residual = index_identity_residual(result, beta)
            passed = passed and residual <= 1e-9 * max(1.0, abs(chi) ** n)
            records.append(self.record(
                'known-dimension' if c.tag in CATALOG_TAGS else 'solver',
                matrix=c.label(),
                beta=[float(x) for x in beta.values],
                chi=chi,
                invariant_dimension=dims[n],
                index_residual=residual,
                **result.to_dict(),
            ))
        return CommandResult(records, passed, 'Braided Betti numbers')


class SupertraceCommand(Command):
    def __init__(self, settings: Settings):
        super().__init__("supertrace", "Partial sums of the supertrace series in chi", settings)

    def add_arguments(self, parser):
        parser.add_argument('--chi', type=float, required=True, help="Euler characteristic")
        _add_matrix(parser)
        parser.add_argument('--nmax', type=int, default=30)
        parser.add_argument('--sign', choices=SIGN_CONVENTIONS, default='alternating')
        parser.add_argument('--c0', choices=CONSTANT_TERMS, default='extrapolated')
        parser.add_argument('--verify-upto', type=int, default=0,
                            help="recompute catalog dimensions with the solver for N <= K")
        parser.add_argument('--beta', help="optional beta vector for the Betti mass bound")

    def handle(self, args):
        c = parse_matrix_spec(args.matrix)
        sequence = coefficient_sequence(c, args.nmax, verify_upto=args.verify_upto)
        tag = c.tag if c.tag in CATALOG_TAGS else None
        report = supertrace_partial(args.chi, sequence, args.nmax, sign=args.sign, c0=args.c0, tag=tag)
        fields = report.to_dict()
        if args.beta:
            mass = betti_mass_series(BettiVector.parse(args.beta), sequence, args.nmax)
            fields['betti_mass'] = mass.partial_sums[-1]
            fields['betti_mass_bound'] = mass.bound
        record = self.record(
            'known-dimension' if tag else 'solver',
            matrix=c.label(),
            coefficients=[_fraction_text(x) for x in sequence],
            **fields,
        )
        return CommandResult([record], True, 'Supertrace')


class SweepCommand(Command):
    def __init__(self, settings: Settings):
        super().__init__("sweep", "Invariant dimensions over matrices, angles and N", settings)

    def add_arguments(self, parser):
        parser.add_argument('--matrices', help="comma-separated tags or full matrix specs")
        parser.add_argument('--n', help="K or A..B")
        parser.add_argument('--thetas', help="comma-separated angles (decimals or pi/k forms)")
        parser.add_argument('--theta-grid', type=int, help="K evenly spaced angles k*pi/(K+1)")
        parser.add_argument('--plan', help="YAML file with keys matrices, n, thetas, theta_grid")
        _add_method(parser)

    def _plan(self, args) -> Tuple[List[str], List[int], List[str]]:
        plan = {}
        if args.plan:
            try:
                with open(args.plan, 'r') as f:
                    plan = yaml.safe_load(f) or {}
            except FileNotFoundError:
                raise UsageError(f"plan file not found: {args.plan}") from None
            except yaml.YAMLError as e:
                raise UsageError(f"malformed plan file {args.plan}: {e}") from None
            if not isinstance(plan, dict):
                raise UsageError(f"plan file {args.plan} must hold a mapping")

        matrices = args.matrices if args.matrices is not None else plan.get('matrices')
        if isinstance(matrices, str):
            matrices = [m.strip() for m in matrices.split(',') if m.strip()]
        if not matrices:
            raise UsageError("sweep needs --matrices (or matrices in the plan)")

        n_spec = args.n if args.n is not None else plan.get('n')
        if n_spec is None:
            raise UsageError("sweep needs --n (or n in the plan)")
        n_values = parse_n_range(n_spec)

        grid = args.theta_grid if args.theta_grid is not None else plan.get('theta_grid')
        thetas = args.thetas if args.thetas is not None else plan.get('thetas')
        if isinstance(thetas, str):
            thetas = [t.strip() for t in thetas.split(',') if t.strip()]
        if grid is not None:
            if int(grid) < 1:
                raise UsageError(f"theta grid needs at least one angle, got {grid}")
            thetas = [f"{k}*pi/{int(grid) + 1}" for k in range(1, int(grid) + 1)]
        if not thetas:
            thetas = [DEFAULT_SWEEP_THETA]
        return [str(m) for m in matrices], n_values, [str(t) for t in thetas]

    def handle(self, args):
        matrices, n_values, thetas = self._plan(args)
        cells: List[RMatrix] = []
        for item in matrices:
            if item in CATALOG_TAGS:
                cells.extend(parse_matrix_spec(f"{item}:theta={theta}") for theta in thetas)
            else:
                cells.append(parse_matrix_spec(item))
        logger.info(f"[Sweep] {len(cells)} matrices x {len(n_values)} values of N")

        records = []
        passed = True
        for c in cells:
            for n in n_values:
                s = invariant_subspace(c, n, method=args.method)
                known = _known_dimension(c, n)
                if known is not None and known != s.dimension:
                    passed = False
                records.append(self.record(s.method, matrix=c.label(), theta=c.theta, n=n,
                                           dimension=s.dimension, known_dimension=known))
        return CommandResult(records, passed, 'Sweep')


COMMANDS: Dict[str, Type[Command]] = {
    'catalog': CatalogCommand,
    'check-braid-eq': CheckBraidEqCommand,
    'check-ybe': CheckYbeCommand,
    'apply-word': ApplyWordCommand,
    'check-rep': CheckRepCommand,
    'invariant-dim': InvariantDimCommand,
    'invariant-basis': InvariantBasisCommand,
    'verify-projection': VerifyProjectionCommand,
    'betti': BettiCommand,
    'supertrace': SupertraceCommand,
    'sweep': SweepCommand,
}


def build_commands(settings: Settings) -> Dict[str, Command]:
    return {name: cls(settings) for name, cls in COMMANDS.items()}
