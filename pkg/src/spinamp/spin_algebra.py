"""Spin component operators for arbitrary j and projections along a direction.

Matrices use hbar = 1 and index rows/columns by m = j, j-1, ..., -j.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

SpinLike = Union["Spin", int, float, str, Fraction]

TWO_PI = 2.0 * math.pi


class SpinError(ValueError):
    """Raised for a spin quantum number that is not a positive half-integer."""


@dataclass(frozen=True)
class Spin:
    """Spin quantum number j, restricted to positive half-integers."""

    j: Fraction

    def __post_init__(self):
        value = self.j
        try:
            if isinstance(value, str):
                frac = Fraction(value.strip())
            elif isinstance(value, float):
                if not math.isfinite(value):
                    raise SpinError(f"spin j must be finite, got {value!r}")
                frac = Fraction(value)
            else:
                frac = Fraction(value)
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise SpinError(f"cannot interpret {value!r} as a spin quantum number") from exc
        if (2 * frac).denominator != 1 or frac <= 0:
            raise SpinError(f"spin j must be a positive integer or half-integer, got {value!r}")
        object.__setattr__(self, "j", frac)

    @classmethod
    def coerce(cls, value: SpinLike) -> Spin:
        return value if isinstance(value, Spin) else cls(value)

    @property
    def twice_j(self) -> int:
        return int(2 * self.j)

    @property
    def dim(self) -> int:
        return self.twice_j + 1

    def projections(self) -> list[Fraction]:
        """Projection values m in matrix order, j down to -j."""
        return [self.j - k for k in range(self.dim)]

    def index(self, m) -> int:
        """Row/column index of projection ``m``; raises ValueError if m is not allowed."""
        try:
            frac = Fraction(m) if not isinstance(m, str) else Fraction(m.strip())
        except (ValueError, TypeError) as exc:
            raise ValueError(f"invalid projection value {m!r}") from exc
        k = self.j - frac
        if k.denominator != 1 or not 0 <= k <= 2 * self.j:
            raise ValueError(f"projection m={m} not in {{-j..j}} for j={self.j}")
        return int(k)

    def __str__(self) -> str:
        return str(self.j)


@dataclass(frozen=True)
class Direction:
    """Quantization axis given by polar angles in radians.

    Out-of-range angles are folded back: theta is reflected into [0, pi]
    (shifting phi by pi), and phi is reduced mod 2*pi.
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta = float(self.theta)
        phi = float(self.phi)
        if not (math.isfinite(theta) and math.isfinite(phi)):
            raise ValueError(f"direction angles must be finite, got ({theta}, {phi})")
        if not 0.0 <= theta <= math.pi:
            theta = math.fmod(theta, TWO_PI)
            if theta < 0.0:
                theta += TWO_PI
            if theta > math.pi:
                theta = TWO_PI - theta
                phi += math.pi
        if not 0.0 <= phi < TWO_PI:
            phi = math.fmod(phi, TWO_PI)
            if phi < 0.0:
                phi += TWO_PI
            if phi >= TWO_PI:
                phi = 0.0
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @classmethod
    def z(cls) -> Direction:
        return cls(0.0, 0.0)

    @classmethod
    def from_degrees(cls, theta: float, phi: float = 0.0) -> Direction:
        return cls(math.radians(theta), math.radians(phi))

    def unit_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])


@lru_cache(maxsize=64)
def _components(spin: Spin) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    j = spin.j
    ms = spin.projections()
    dim = spin.dim
    sz = np.diag([complex(float(m)) for m in ms])
    # Raising operator: <m+1|S+|m> = sqrt(j(j+1) - m(m+1)), row of m+1 sits one above m.
    s_plus = np.zeros((dim, dim), dtype=complex)
    for col in range(1, dim):
        m = ms[col]
        s_plus[col - 1, col] = math.sqrt(j * (j + 1) - m * (m + 1))
    s_minus = s_plus.conj().T
    sx = 0.5 * (s_plus + s_minus)
    sy = -0.5j * (s_plus - s_minus)
    for mat in (sx, sy, sz):
        mat.setflags(write=False)
    return sx, sy, sz


def spin_components(spin: SpinLike) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(S_x, S_y, S_z)`` for the given spin, in units of hbar.

    The returned arrays are read-only and shared between calls; copy before
    mutating.
    """
    return _components(Spin.coerce(spin))


def projection_operator(spin: SpinLike, direction: Direction) -> np.ndarray:
    """Spin component along ``direction``: n_x S_x + n_y S_y + n_z S_z."""
    sx, sy, sz = spin_components(spin)
    nx, ny, nz = direction.unit_vector()
    return nx * sx + ny * sy + nz * sz


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise ValueError(f"commutator needs square matrices of equal shape, got {a.shape} and {b.shape}")
    return a @ b - b @ a


def casimir(spin: SpinLike) -> np.ndarray:
    """S_x^2 + S_y^2 + S_z^2, which should equal j(j+1) times the identity."""
    sx, sy, sz = spin_components(spin)
    return sx @ sx + sy @ sy + sz @ sz
