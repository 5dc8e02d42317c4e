import numpy as np
import pytest

from braidform.braid_core import BraidWord, compose, invert, pure_braid_generator, random_word
from braidform.errors import (
    IndexRangeError,
    NotGeneralizedPermutationError,
    SizeGuardError,
    StrandMismatchError,
)
from braidform.rep_engine import (
    PhasedPermutation,
    StateVector,
    apply_generator,
    apply_word,
    as_phased_permutation,
    basis_bits,
    basis_index,
    basis_state,
    materialize,
)
from braidform.rmatrix import RMatrix, identity_matrix, swap_sigma


def b(n, *letters):
    return BraidWord(n, tuple(letters))


def random_state(n, rng):
    v = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return StateVector(n, v / np.linalg.norm(v))


class TestBasis:
    def test_site_one_is_most_significant(self):
        assert basis_index('10') == 2
        assert basis_bits(5, 4) == '0101'

    def test_basis_state(self):
        v = basis_state(3, '011')
        assert v.amplitudes[3] == 1
        assert v.norm() == 1

    def test_wrong_length(self):
        with pytest.raises(StrandMismatchError):
            StateVector(2, np.zeros(3))


class TestApplyGenerator:
    def test_ex3_phase_on_00(self, ex3):
        out = apply_generator(basis_state(2, '00'), 1, ex3)
        np.testing.assert_allclose(out.amplitudes, ex3.q * basis_state(2, '00').amplitudes)

    def test_ex3_swaps_01(self, ex3):
        out = apply_generator(basis_state(2, '01'), 1, ex3)
        np.testing.assert_allclose(out.amplitudes, basis_state(2, '10').amplitudes)

    def test_identity(self, rng):
        v = random_state(4, rng)
        np.testing.assert_allclose(apply_generator(v, 2, identity_matrix()).amplitudes, v.amplitudes)

    def test_acts_on_requested_sites(self):
        out = apply_generator(basis_state(3, '001'), 2, swap_sigma())
        np.testing.assert_allclose(out.amplitudes, basis_state(3, '010').amplitudes)

    def test_inverse(self, ex4, rng):
        v = random_state(3, rng)
        there = apply_generator(v, 1, ex4)
        back = apply_generator(there, 1, ex4, inverse=True)
        np.testing.assert_allclose(back.amplitudes, v.amplitudes, atol=1e-12)

    def test_index_range(self, ex2):
        with pytest.raises(IndexRangeError):
            apply_generator(basis_state(3, '000'), 3, ex2)


class TestApplyWord:
    def test_empty(self, ex2, rng):
        v = random_state(3, rng)
        np.testing.assert_allclose(apply_word(v, BraidWord(3), ex2).amplitudes, v.amplitudes)

    def test_pure_generator_ex3(self, ex3):
        out = apply_word(basis_state(2, '00'), pure_braid_generator(1, 1, 2), ex3)
        np.testing.assert_allclose(out.amplitudes, ex3.q ** 2 * basis_state(2, '00').amplitudes)

    def test_cancelling_pair(self, catalog_matrices, rng):
        v = random_state(2, rng)
        w = BraidWord(2, ((1, 1),)) * BraidWord(2, ((1, -1),))
        for c in catalog_matrices.values():
            np.testing.assert_allclose(apply_word(v, w, c).amplitudes, v.amplitudes, atol=1e-12)

    def test_rightmost_letter_acts_first(self, ex3):
        # b1 b2 on e_001: b2 moves the 1 to site 2, then b1 moves it to site 1
        out = apply_word(basis_state(3, '001'), b(3, (1, 1), (2, 1)), ex3)
        np.testing.assert_allclose(out.amplitudes, basis_state(3, '100').amplitudes)

    def test_strand_mismatch(self, ex2):
        with pytest.raises(StrandMismatchError):
            apply_word(basis_state(3, '000'), BraidWord(4), ex2)

    def test_norm_preserved(self, catalog_matrices, rng):
        for c in catalog_matrices.values():
            for _ in range(10):
                v = random_state(5, rng)
                w = random_word(5, 15, rng)
                assert apply_word(v, w, c).norm() == pytest.approx(1.0, abs=1e-10)


class TestMaterialize:
    def test_single_letter_is_c(self, catalog_matrices):
        for c in catalog_matrices.values():
            np.testing.assert_allclose(materialize(b(2, (1, 1)), c), c.entries)

    def test_braid_relation(self, catalog_matrices):
        for c in catalog_matrices.values():
            lhs = materialize(b(3, (1, 1), (2, 1), (1, 1)), c)
            rhs = materialize(b(3, (2, 1), (1, 1), (2, 1)), c)
            np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_far_generators_commute(self, ex3):
        lhs = materialize(b(5, (1, 1), (3, 1)), ex3)
        rhs = materialize(b(5, (3, 1), (1, 1)), ex3)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_pure_generator_times_inverse(self, ex2):
        x = pure_braid_generator(1, 2, 3)
        np.testing.assert_allclose(materialize(x, ex2) @ materialize(invert(x), ex2), np.eye(8), atol=1e-12)

    def test_homomorphism(self, catalog_matrices, rng):
        for c in catalog_matrices.values():
            for _ in range(5):
                u, w = random_word(4, 6, rng), random_word(4, 6, rng)
                np.testing.assert_allclose(materialize(compose(u, w), c),
                                           materialize(u, c) @ materialize(w, c), atol=1e-10)

    def test_guard(self, ex2):
        with pytest.raises(SizeGuardError):
            materialize(BraidWord(5), ex2, max_sites=4)


class TestPhasedPermutation:
    def test_ex2_single_letter(self, ex2):
        t = as_phased_permutation(b(2, (1, 1)), ex2)
        assert t.target[0] == 3
        assert t.phase[0] == pytest.approx(ex2.q)

    def test_empty(self, ex3):
        t = as_phased_permutation(BraidWord(3), ex3)
        np.testing.assert_array_equal(t.target, np.arange(8))
        np.testing.assert_allclose(t.phase, np.ones(8))

    def test_agrees_with_materialize(self, catalog_matrices, rng):
        for c in catalog_matrices.values():
            for n in (3, 4, 6):
                w = random_word(n, 10, rng)
                np.testing.assert_allclose(as_phased_permutation(w, c).to_dense(), materialize(w, c), atol=1e-12)

    def test_pure_generator_ex3(self, ex3):
        x = pure_braid_generator(1, 2, 3)
        np.testing.assert_allclose(as_phased_permutation(x, ex3).to_dense(), materialize(x, ex3), atol=1e-12)

    def test_compose_matches_word_product(self, ex4, rng):
        u, w = random_word(4, 8, rng), random_word(4, 8, rng)
        product = as_phased_permutation(u, ex4).compose(as_phased_permutation(w, ex4))
        np.testing.assert_allclose(product.to_dense(), materialize(compose(u, w), ex4), atol=1e-12)

    def test_apply(self, ex2, rng):
        w = random_word(3, 7, rng)
        v = random_state(3, rng)
        np.testing.assert_allclose(as_phased_permutation(w, ex2).apply(v.amplitudes),
                                   apply_word(v, w, ex2).amplitudes, atol=1e-12)

    def test_long_word_stays_unit_modulus(self, ex3, rng):
        t = as_phased_permutation(random_word(6, 500, rng), ex3)
        assert t.is_valid(1e-12)

    def test_identity(self):
        assert PhasedPermutation.identity(4).fixed_points().all()

    def test_rejects_dense_matrix(self):
        mix = RMatrix((swap_sigma().entries + 1j * np.eye(4)) / np.sqrt(2))
        with pytest.raises(NotGeneralizedPermutationError):
            as_phased_permutation(b(2, (1, 1)), mix)

    def test_rejects_non_unit_phase(self):
        with pytest.raises(NotGeneralizedPermutationError):
            as_phased_permutation(b(2, (1, 1)), RMatrix(np.diag([1, 2, 1, 1])))
