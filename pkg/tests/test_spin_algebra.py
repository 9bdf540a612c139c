import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinamp.spin_algebra import (
    Direction,
    Spin,
    SpinError,
    casimir,
    commutator,
    projection_operator,
    spin_components,
)

from conftest import SPINS

R = math.sqrt(6) / 2

# Spin-2 matrices typed in entry by entry from the published tables.
PAPER_SX = np.array([
    [0, 1, 0, 0, 0],
    [1, 0, R, 0, 0],
    [0, R, 0, R, 0],
    [0, 0, R, 0, 1],
    [0, 0, 0, 1, 0],
], dtype=complex)
PAPER_SY = np.array([
    [0, -1j, 0, 0, 0],
    [1j, 0, -1j * R, 0, 0],
    [0, 1j * R, 0, -1j * R, 0],
    [0, 0, 1j * R, 0, -1j],
    [0, 0, 0, 1j, 0],
], dtype=complex)
PAPER_SZ = np.diag([2, 1, 0, -1, -2]).astype(complex)


def paper_projection(theta, phi):
    """The published n.S matrix for spin 2."""
    s, c = math.sin(theta), math.cos(theta)
    em, ep = s * np.exp(-1j * phi), s * np.exp(1j * phi)
    return np.array([
        [2 * c, em, 0, 0, 0],
        [ep, c, R * em, 0, 0],
        [0, R * ep, 0, R * em, 0],
        [0, 0, R * ep, -c, em],
        [0, 0, 0, ep, -2 * c],
    ])


class TestSpin:
    @pytest.mark.parametrize("value, dim", [(2, 5), ("1/2", 2), (0.5, 2), ("3/2", 4), (Fraction(5, 2), 6), ("3", 7)])
    def test_dim(self, value, dim):
        assert Spin(value).dim == dim

    @pytest.mark.parametrize("bad", [0, -1, 0.3, "1/3", "abc", float("nan"), 1.25])
    def test_rejects(self, bad):
        with pytest.raises(SpinError):
            Spin(bad)

    def test_projections_and_index(self):
        spin = Spin("3/2")
        assert spin.projections() == [Fraction(3, 2), Fraction(1, 2), Fraction(-1, 2), Fraction(-3, 2)]
        assert spin.index(-0.5) == 2
        assert spin.index("3/2") == 0
        with pytest.raises(ValueError):
            spin.index(1)
        with pytest.raises(ValueError):
            spin.index(Fraction(5, 2))


class TestDirection:
    def test_in_range_untouched(self):
        d = Direction(1.0, 2.0)
        assert (d.theta, d.phi) == (1.0, 2.0)

    def test_normalization(self):
        d = Direction(-0.3, 0.0)
        assert d.theta == pytest.approx(0.3)
        assert d.phi == pytest.approx(math.pi)
        d = Direction(0.5, -math.pi / 2)
        assert d.phi == pytest.approx(1.5 * math.pi)
        assert Direction(0.0, 2 * math.pi).phi == 0.0

    @given(st.floats(-20, 20), st.floats(-20, 20))
    def test_normalized_angles_name_the_same_axis(self, theta, phi):
        d = Direction(theta, phi)
        assert 0.0 <= d.theta <= math.pi
        assert 0.0 <= d.phi < 2 * math.pi
        raw = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
        assert np.allclose(d.unit_vector(), raw, atol=1e-12)
        assert abs(np.linalg.norm(d.unit_vector()) - 1.0) <= 1e-15

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            Direction(float("inf"), 0.0)


class TestSpinComponents:
    def test_spin2_matches_published_matrices_exactly(self):
        sx, sy, sz = spin_components(2)
        assert np.array_equal(sx, PAPER_SX)
        assert np.array_equal(sy, PAPER_SY)
        assert np.array_equal(sz, PAPER_SZ)

    def test_spin2_spot_entries(self):
        sx, _, sz = spin_components(2)
        assert np.array_equal(np.diag(sz).real, [2, 1, 0, -1, -2])
        assert sx[0, 1] == sx[1, 0] == 1
        assert sx[1, 2] == math.sqrt(6) / 2

    def test_spin_half_is_half_pauli(self):
        sx, sy, sz = spin_components("1/2")
        assert np.array_equal(sx, [[0, 0.5], [0.5, 0]])
        assert np.array_equal(sy, [[0, -0.5j], [0.5j, 0]])
        assert np.array_equal(sz, [[0.5, 0], [0, -0.5]])

    @pytest.mark.parametrize("j", SPINS)
    def test_hermitian_exactly(self, j):
        for mat in spin_components(j):
            assert np.array_equal(mat, mat.conj().T)

    def test_returned_matrices_are_read_only(self):
        sx, _, _ = spin_components(2)
        with pytest.raises(ValueError):
            sx[0, 0] = 1


class TestProjectionOperator:
    @pytest.mark.parametrize("theta, phi, which", [(0, 0, 2), (math.pi / 2, 0, 0), (math.pi / 2, math.pi / 2, 1)])
    def test_axes(self, theta, phi, which):
        expected = spin_components(2)[which]
        assert np.allclose(projection_operator(2, Direction(theta, phi)), expected, atol=1e-15)

    @pytest.mark.parametrize("theta", np.linspace(0, math.pi, 5))
    @pytest.mark.parametrize("phi", np.linspace(0, 2 * math.pi, 5, endpoint=False))
    def test_matches_published_form(self, theta, phi):
        got = projection_operator(2, Direction(theta, phi))
        assert np.max(np.abs(got - paper_projection(theta, phi))) < 1e-15
        assert got[0, 1] == pytest.approx(math.sin(theta) * np.exp(-1j * phi), abs=1e-15)

    @pytest.mark.parametrize("j", SPINS)
    def test_spectrum_isotropic(self, j, rng):
        spin = Spin(j)
        expected = np.array([float(m) for m in spin.projections()])
        for theta, phi in rng.uniform(0, [math.pi, 2 * math.pi], (20, 2)):
            op = projection_operator(j, Direction(theta, phi))
            assert np.array_equal(op, op.conj().T)
            values = np.sort(np.linalg.eigvalsh(op))[::-1]
            assert np.max(np.abs(values - expected)) < 1e-12


class TestCommutatorCasimir:
    def test_examples(self):
        sx, sy, sz = spin_components(2)
        assert np.max(np.abs(commutator(sx, sy) - 1j * sz)) < 1e-12
        assert not np.any(commutator(sz, sz))
        hx, hy, hz = spin_components("1/2")
        assert np.max(np.abs(commutator(hy, hz) - 1j * hx)) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            commutator(np.eye(2), np.eye(3))
        with pytest.raises(ValueError):
            commutator(np.ones((2, 3)), np.ones((2, 3)))

    @pytest.mark.parametrize("j", SPINS)
    def test_su2_closure(self, j):
        sx, sy, sz = spin_components(j)
        for a, b, c in ((sx, sy, sz), (sy, sz, sx), (sz, sx, sy)):
            assert np.max(np.abs(commutator(a, b) - 1j * c)) < 1e-12

    @pytest.mark.parametrize("j, value", [(2, 6.0), ("1/2", 0.75), (3, 12.0), (1, 2.0), ("3/2", 3.75), ("5/2", 8.75)])
    def test_casimir(self, j, value):
        spin = Spin(j)
        assert np.max(np.abs(casimir(j) - value * np.eye(spin.dim))) < 1e-12
