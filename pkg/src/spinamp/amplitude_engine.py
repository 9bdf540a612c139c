"""Amplitude tables between spin quantization directions.

An amplitude table U(a -> c) holds psi(m_i along a; m_f along c) =
<m_f, c | m_i, a> at ``entries[row(m_f), col(m_i)]``, both indices running
m = j .. -j.  The eigenbasis of each direction is fixed by the rotation that
carries z onto it, exp(-i phi S_z) exp(-i theta S_y) ("canonical").  For
spin 2 a second, "paper" convention flips the sign of the m = +1 and m = -1
eigenvectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spin_algebra import Direction, Spin, SpinLike, projection_operator

CANONICAL = "canonical"
PAPER = "paper"
CONVENTIONS = (CANONICAL, PAPER)

# Per-column signs (m = 2, 1, 0, -1, -2) taking canonical spin-2 eigenvectors
# to the published closed forms; re-derived from the closed forms in tests.
PAPER_COLUMN_SIGNS = np.array([1.0, -1.0, 1.0, -1.0, 1.0])


class ConventionError(ValueError):
    pass


def _check_convention(spin: Spin, convention: str) -> None:
    if convention not in CONVENTIONS:
        raise ConventionError(f"unknown phase convention {convention!r}; choose from {CONVENTIONS}")
    if convention == PAPER and spin.j != 2:
        raise ConventionError(f"the 'paper' phase convention is only defined for j=2, got j={spin.j}")


def wigner_small_d(spin: SpinLike, beta: float) -> np.ndarray:
    """Matrix d^j(beta) = exp(-i beta S_y), real, rows/cols ordered m = j..-j.

    Uses the explicit factorial sum; adequate in double precision for the
    small j this package targets (cancellation grows with j).
    """
    spin = Spin.coerce(spin)
    tj = spin.twice_j
    dim = spin.dim
    c = math.cos(beta / 2.0)
    s = math.sin(beta / 2.0)
    d = np.zeros((dim, dim))
    fact = math.factorial
    for row in range(dim):
        # j + m' and j - m' as integers
        jpr, jmr = tj - row, row
        for col in range(dim):
            jpc, jmc = tj - col, col
            norm = math.sqrt(fact(jpr) * fact(jmr) * fact(jpc) * fact(jmc))
            # m - m' = row - col
            k_lo = max(0, row - col)
            k_hi = min(jpc, jmr)
            total = 0.0
            for k in range(k_lo, k_hi + 1):
                denom = fact(jpc - k) * fact(k) * fact(jmr - k) * fact(k - row + col)
                sign = -1.0 if (k - row + col) % 2 else 1.0
                total += sign * c ** (tj - 2 * k + row - col) * s ** (2 * k - row + col) / denom
            d[row, col] = norm * total
    return d


def _z_phases(spin: Spin, phi: float) -> np.ndarray:
    return np.exp(-1j * phi * np.array([float(m) for m in spin.projections()]))


def eigenbasis(spin: SpinLike, direction: Direction, convention: str = CANONICAL) -> np.ndarray:
    """Columns are eigenvectors of the spin component along ``direction``.

    Column k carries eigenvalue m = j - k and equals column k of
    exp(-i phi S_z) exp(-i theta S_y), with per-column signs applied for the
    paper convention.
    """
    spin = Spin.coerce(spin)
    _check_convention(spin, convention)
    basis = _z_phases(spin, direction.phi)[:, None] * wigner_small_d(spin, direction.theta)
    if convention == PAPER:
        basis = basis * PAPER_COLUMN_SIGNS[None, :]
    return basis


def numeric_eigenbasis(spin: SpinLike, direction: Direction) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and eigenvectors from a Hermitian eigensolver.

    Column phases are whatever LAPACK returns; see :func:`align_phases`.
    """
    op = projection_operator(spin, direction)
    try:
        values, vectors = np.linalg.eigh(op)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigensolver failed for {direction}") from exc
    order = np.argsort(values)[::-1]
    return values[order], vectors[:, order]


def align_phases(reference: np.ndarray, candidate: np.ndarray) -> np.ndarray:
    """Rephase each column of ``candidate`` to agree with ``reference``.

    Each column is multiplied by the unit scalar that makes the phase of its
    largest-modulus entry equal the phase of the reference at that entry.
    """
    reference = np.asarray(reference)
    out = np.array(candidate, dtype=complex, copy=True)
    for k in range(out.shape[1]):
        idx = int(np.argmax(np.abs(out[:, k])))
        ref = reference[idx, k]
        if abs(ref) == 0.0:
            continue
        ratio = ref / out[idx, k]
        out[:, k] *= ratio / abs(ratio)
    return out


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class AmplitudeTable:
    spin: Spin
    source: Direction
    target: Direction
    entries: np.ndarray
    convention: str = CANONICAL

    def __post_init__(self):
        object.__setattr__(self, "entries", _readonly(np.asarray(self.entries, dtype=complex)))
        if self.entries.shape != (self.spin.dim, self.spin.dim):
            raise ValueError(f"entries shape {self.entries.shape} does not match dim {self.spin.dim}")

    def amplitude(self, m_i, m_f) -> complex:
        """psi(m_i along source; m_f along target)."""
        return complex(self.entries[self.spin.index(m_f), self.spin.index(m_i)])

    def column(self, m_i) -> np.ndarray:
        return self.entries[:, self.spin.index(m_i)]

    def unitarity_error(self) -> float:
        u = self.entries
        return float(np.max(np.abs(u.conj().T @ u - np.eye(self.spin.dim))))

    def dagger(self) -> AmplitudeTable:
        """Table for the reversed measurement, c -> a."""
        return AmplitudeTable(self.spin, self.target, self.source, self.entries.conj().T, self.convention)


@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    spin: Spin
    source: Direction
    target: Direction
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "entries", _readonly(np.asarray(self.entries, dtype=float)))

    def probability(self, m_i, m_f) -> float:
        return float(self.entries[self.spin.index(m_f), self.spin.index(m_i)])

    def column(self, m_i) -> np.ndarray:
        return self.entries[:, self.spin.index(m_i)]


def standard_table(spin: SpinLike, source: Direction, convention: str = CANONICAL) -> AmplitudeTable:
    """Amplitudes from ``source`` to the z axis: the eigenvector components themselves."""
    spin = Spin.coerce(spin)
    return AmplitudeTable(spin, source, Direction.z(), eigenbasis(spin, source, convention), convention)


def _axis_basis(spin: Spin, direction: Direction, convention: str) -> np.ndarray:
    # The exact z axis is read as the plain |m> basis.  Canonically that is
    # already eigenbasis(z); in the "paper" convention eigenbasis(z) carries the
    # -1 signs on m = +-1, while the published standard amplitudes are
    # components along plain |m>.
    if direction == Direction.z():
        return np.eye(spin.dim)
    return eigenbasis(spin, direction, convention)


def general_table(
    spin: SpinLike, source: Direction, target: Direction, convention: str = CANONICAL
) -> AmplitudeTable:
    """Amplitudes from ``source`` to ``target`` as eigenvector inner products.

    ``general_table(a, z)`` equals ``standard_table(a)`` and
    ``general_table(z, c)`` its conjugate transpose, in both conventions.
    """
    spin = Spin.coerce(spin)
    _check_convention(spin, convention)
    if source == target:
        return AmplitudeTable(spin, source, target, np.eye(spin.dim), convention)
    entries = _axis_basis(spin, target, convention).conj().T @ _axis_basis(spin, source, convention)
    return AmplitudeTable(spin, source, target, entries, convention)


def chain_compose(first: AmplitudeTable, second: AmplitudeTable) -> AmplitudeTable:
    """Sum over the intermediate direction: U(a -> c) = U(b -> c) U(a -> b)."""
    if first.spin != second.spin:
        raise ValueError(f"spin mismatch: {first.spin} vs {second.spin}")
    if first.convention != second.convention:
        raise ValueError(f"phase convention mismatch: {first.convention} vs {second.convention}")
    if first.target != second.source:
        raise ValueError(
            f"intermediate direction mismatch: first ends at {first.target}, second starts at {second.source}"
        )
    return AmplitudeTable(
        first.spin, first.source, second.target, second.entries @ first.entries, first.convention
    )


def probabilities(table: AmplitudeTable) -> ProbabilityTable:
    return ProbabilityTable(table.spin, table.source, table.target, np.abs(table.entries) ** 2)
