import json
from fractions import Fraction

import numpy as np
import pytest

from braidform.config import Settings, set_settings
from braidform.errors import DegenerateParameterError, MatrixSpecError, NotGeneralizedPermutationError
from braidform.rmatrix import (
    CATALOG_TAGS,
    RMatrix,
    braid_residual,
    braid_to_ybe,
    catalog,
    catalog_entries,
    extrapolated_invariant_dimension,
    identity_matrix,
    is_generalized_permutation,
    is_involutive,
    known_invariant_dimension,
    local_generalized_permutation,
    parse_matrix_spec,
    parse_theta,
    swap_sigma,
    unitarity_residual,
    ybe_residual,
    ybe_to_braid,
)

ADMISSIBLE = [Fraction(k, 21) for k in range(1, 21)]
STRICT = 1e-12


def admissible_catalog():
    for tag in CATALOG_TAGS:
        for ratio in ADMISSIBLE:
            if tag == 'ex1':
                yield catalog(tag, epsilon=1, theta_over_pi=ratio)
                yield catalog(tag, epsilon=-1, theta_over_pi=ratio)
            else:
                yield catalog(tag, theta_over_pi=ratio)


class TestResiduals:
    def test_catalog_is_sound(self):
        for c in admissible_catalog():
            assert braid_residual(c, STRICT).passes, c.label()
            assert unitarity_residual(c, STRICT).passes, c.label()

    def test_ex2_quarter_turn(self):
        assert braid_residual(catalog('ex2', theta=np.pi / 2)).frobenius_residual < STRICT

    def test_identity(self):
        assert braid_residual(identity_matrix()).frobenius_residual == 0
        assert unitarity_residual(identity_matrix()).frobenius_residual == 0

    def test_diagonal_non_solution(self):
        report = braid_residual(RMatrix(np.diag([1, 2, 3, 4])))
        assert report.frobenius_residual == pytest.approx(np.sqrt(512))
        assert not report.passes

    def test_flip_of_first_site_is_not_a_solution(self):
        c = RMatrix(np.kron(np.array([[0, 1], [1, 0]]), np.eye(2)))
        assert braid_residual(c).frobenius_residual == pytest.approx(4.0)

    def test_scaled_identity_unitarity(self):
        assert unitarity_residual(2 * np.eye(4)).frobenius_residual == pytest.approx(6.0)

    def test_ex3_unitary(self):
        assert unitarity_residual(catalog('ex3', theta=0.7)).frobenius_residual < STRICT

    def test_report_tolerance(self):
        report = braid_residual(identity_matrix(), tolerance=1e-3)
        assert report.tolerance == 1e-3
        assert report.to_dict()["passes"] is True


class TestSigma:
    def test_flip(self):
        e01 = np.array([0, 1, 0, 0])
        np.testing.assert_array_equal(swap_sigma().entries @ e01, [0, 0, 1, 0])

    def test_involution(self):
        np.testing.assert_array_equal(swap_sigma().entries @ swap_sigma().entries, np.eye(4))

    def test_braid_solution(self):
        assert braid_residual(swap_sigma()).frobenius_residual == 0


class TestYbe:
    def test_identity(self):
        assert ybe_residual(identity_matrix()).frobenius_residual == 0

    def test_sigma(self):
        assert ybe_residual(swap_sigma()).frobenius_residual == 0

    def test_catalog_correspondence(self):
        for c in admissible_catalog():
            r = braid_to_ybe(c)
            assert ybe_residual(r, STRICT).passes, c.label()
            assert braid_residual(ybe_to_braid(r), STRICT).passes
            np.testing.assert_allclose(ybe_to_braid(r).entries, c.entries, atol=1e-15)


class TestCatalog:
    def test_ex1_involutive(self):
        c = catalog('ex1', theta=0, epsilon=1)
        assert is_involutive(c)
        np.testing.assert_allclose(c.entries @ c.entries, np.eye(4), atol=1e-15)

    def test_ex3_first_row(self, ex3):
        np.testing.assert_allclose(ex3.entries[0], [ex3.q, 0, 0, 0])

    def test_ex2_not_involutive(self):
        c = catalog('ex2', theta=np.pi / 2)
        assert np.linalg.norm(c.entries @ c.entries - np.eye(4)) > 1
        assert not is_involutive(c)

    def test_ex4_not_involutive(self):
        assert not is_involutive(catalog('ex4', theta=np.pi / 2))

    def test_involution_pattern(self):
        for c in admissible_catalog():
            assert is_involutive(c) == (c.tag == 'ex1')

    @pytest.mark.parametrize("tag", ['ex2', 'ex3', 'ex4'])
    def test_degenerate_exact(self, tag):
        with pytest.raises(DegenerateParameterError):
            catalog(tag, theta_over_pi=Fraction(1))
        with pytest.raises(DegenerateParameterError):
            catalog(tag, theta_over_pi=Fraction(0))

    def test_degenerate_float(self):
        with pytest.raises(DegenerateParameterError):
            catalog('ex3', theta=0.0)

    @pytest.mark.parametrize("tag,theta", [('ex3', 3.1415926535), ('ex2', 1e-8), ('ex4', np.pi + 2e-8)])
    def test_near_degenerate_float(self, tag, theta):
        with pytest.raises(DegenerateParameterError):
            catalog(tag, theta=theta)

    def test_degeneracy_band_follows_phase_tolerance(self):
        assert catalog('ex4', theta=1e-6).theta == 1e-6
        set_settings(Settings(phase_tolerance=1e-12))
        assert catalog('ex2', theta=1e-8).theta == 1e-8
        set_settings(Settings(phase_tolerance=1e-6))
        with pytest.raises(DegenerateParameterError):
            catalog('ex4', theta=1e-6)

    def test_unknown(self):
        with pytest.raises(MatrixSpecError):
            catalog('ex5', theta=1.0)

    def test_bad_epsilon(self):
        with pytest.raises(MatrixSpecError):
            catalog('ex1', epsilon=2)

    def test_entries_read_only(self, ex2):
        with pytest.raises(ValueError):
            ex2.entries[0, 0] = 1

    def test_catalog_entries(self):
        entries = catalog_entries()
        assert [e["tag"] for e in entries] == list(CATALOG_TAGS)
        assert entries[2]["invariant_dimension"] == 'N+1'


class TestGeneralizedPermutation:
    def test_catalog(self, catalog_matrices):
        assert all(is_generalized_permutation(c) for c in catalog_matrices.values())

    def test_sigma(self):
        assert is_generalized_permutation(swap_sigma())

    def test_hadamard_like_mix(self):
        mix = (swap_sigma().entries + 1j * np.eye(4)) / np.sqrt(2)
        assert not is_generalized_permutation(mix)
        with pytest.raises(NotGeneralizedPermutationError):
            local_generalized_permutation(mix)

    def test_local_form_ex2(self, ex2):
        target, phase = local_generalized_permutation(ex2)
        np.testing.assert_array_equal(target, [3, 1, 2, 0])
        np.testing.assert_allclose(phase, [ex2.q, 1, 1, ex2.q])


class TestKnownDimensions:
    @pytest.mark.parametrize("tag,n,expected", [
        ('ex1', 4, 16), ('ex2', 4, 2), ('ex3', 4, 5), ('ex4', 4, 0),
        ('ex4', 3, 0), ('ex4', 2, 2), ('ex4', 1, 2), ('ex3', 1, 2),
    ])
    def test_values(self, tag, n, expected):
        assert known_invariant_dimension(tag, n) == expected

    def test_extrapolated(self):
        assert [extrapolated_invariant_dimension(t) for t in CATALOG_TAGS] == [1, 2, 1, None]

    def test_unknown_tag(self):
        with pytest.raises(MatrixSpecError):
            known_invariant_dimension('sigma', 3)


class TestParsing:
    @pytest.mark.parametrize("text,ratio", [
        ("pi", Fraction(1)), ("pi/3", Fraction(1, 3)), ("2*pi/5", Fraction(2, 5)), ("-pi/4", Fraction(-1, 4)),
    ])
    def test_exact_theta(self, text, ratio):
        theta, parsed = parse_theta(text)
        assert parsed == ratio
        assert theta == pytest.approx(float(ratio) * np.pi)

    def test_decimal_theta(self):
        assert parse_theta("1.0472") == (1.0472, None)

    def test_bad_theta(self):
        with pytest.raises(MatrixSpecError):
            parse_theta("half")

    def test_catalog_spec(self):
        c = parse_matrix_spec("ex3:theta=pi/3")
        assert c.tag == 'ex3'
        assert c.theta == pytest.approx(np.pi / 3)

    def test_ex1_defaults(self):
        c = parse_matrix_spec("ex1:theta=0,eps=-1")
        assert c.epsilon == -1
        assert parse_matrix_spec("ex1").theta == 0.0

    def test_degenerate_spec(self):
        with pytest.raises(DegenerateParameterError):
            parse_matrix_spec("ex2:theta=pi")

    def test_missing_theta(self):
        with pytest.raises(MatrixSpecError):
            parse_matrix_spec("ex2")

    def test_unknown_parameter(self):
        with pytest.raises(MatrixSpecError):
            parse_matrix_spec("ex2:theta=1,phase=2")

    def test_named(self):
        assert parse_matrix_spec("sigma").tag == 'sigma'
        assert parse_matrix_spec("identity").tag == 'identity'

    def test_inline_json(self):
        obj = {"entries": [[[1, 0] if i == j else [0, 0] for j in range(4)] for i in range(4)]}
        c = parse_matrix_spec(json.dumps(obj))
        np.testing.assert_array_equal(c.entries, np.eye(4))
        assert c.label() == 'custom'

    def test_file(self, tmp_path, ex4):
        path = tmp_path / "c.json"
        path.write_text(json.dumps(ex4.to_json()))
        c = parse_matrix_spec(f"@{path}")
        np.testing.assert_allclose(c.entries, ex4.entries)
        assert c.tag == 'ex4'

    def test_missing_file(self, tmp_path):
        with pytest.raises(MatrixSpecError):
            parse_matrix_spec(f"@{tmp_path / 'nope.json'}")

    def test_malformed_json(self):
        with pytest.raises(MatrixSpecError):
            parse_matrix_spec('{"entries": [[1, 2]]}')

    def test_wrong_shape(self):
        with pytest.raises(MatrixSpecError):
            RMatrix(np.eye(3))
