"""Weights, points and the weighted circle action ``lam . z``.

Points of C^n are stored interleaved as ``(x1, y1, ..., xn, yn)`` so that every
scalar function downstream is a plain real function of 2n real variables.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyWeights, InvalidPoint, NonPositiveWeight, NotCoprime


@dataclass(frozen=True)
class Weights:
    """Relatively prime positive exponents of the action."""

    p: tuple[int, ...]

    def __post_init__(self):
        if len(self.p) == 0:
            raise EmptyWeights("weights must be nonempty")
        for j, pj in enumerate(self.p):
            if int(pj) != pj or isinstance(pj, bool):
                raise NonPositiveWeight(f"weight p{j + 1}={pj!r} is not an integer")
            if pj <= 0:
                raise NonPositiveWeight(f"weight p{j + 1}={pj} must be >= 1")
        g = reduce(math.gcd, self.p)
        if g != 1:
            raise NotCoprime(f"gcd{self.p} = {g}")

    @property
    def n(self) -> int:
        return len(self.p)

    @property
    def balanced(self) -> bool:
        return all(pj == 1 for pj in self.p)

    def __iter__(self):
        return iter(self.p)

    def __len__(self):
        return len(self.p)


def validate_weights(raw: Sequence[int]) -> Weights:
    return Weights(tuple(int(v) if isinstance(v, (int, np.integer)) else v for v in raw))


def as_point(coords, n: int | None = None) -> np.ndarray:
    """Validate interleaved real coordinates and return a read-only float array."""
    z = np.array(coords, dtype=float).reshape(-1)
    if z.size == 0 or z.size % 2:
        raise InvalidPoint(f"expected 2n real coordinates, got {z.size}")
    if n is not None and z.size != 2 * n:
        raise DimensionMismatch(f"point has dimension {z.size // 2}, expected {n}")
    if not np.all(np.isfinite(z)):
        raise InvalidPoint("point has non-finite coordinates")
    z.flags.writeable = False
    return z


def to_complex(z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return z[0::2] + 1j * z[1::2]


def from_complex(w) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    out = np.empty(2 * w.size)
    out[0::2] = w.real
    out[1::2] = w.imag
    return out


def ipow(base: complex, k: int) -> complex:
    """``base**k`` for integer k >= 0 by binary exponentiation (no exp/log branch cut)."""
    result = 1.0 + 0.0j
    b = complex(base)
    while k:
        if k & 1:
            result *= b
        b *= b
        k >>= 1
    return result


def quasi_action(lam: complex, z, p: Weights) -> np.ndarray:
    """Return ``lam . z = (lam^p1 z1, ..., lam^pn zn)`` in interleaved coordinates."""
    z = np.asarray(z, dtype=float)
    if z.size != 2 * len(p):
        raise DimensionMismatch(f"point dimension {z.size // 2} != {len(p)} weights")
    lam = complex(lam)
    out = np.empty_like(z)
    for j, pj in enumerate(p):
        w = ipow(lam, pj) * complex(z[2 * j], z[2 * j + 1])
        out[2 * j] = w.real
        out[2 * j + 1] = w.imag
    return out


def weighted_degree(alpha: Sequence[int], p: Weights) -> int:
    """Weighted degree of the monomial z^alpha: it picks up lam^deg under the circle action.

    Zero exactly when alpha = 0, so the only invariant monomials are constants.
    """
    if len(alpha) != len(p):
        raise DimensionMismatch(f"multi-index length {len(alpha)} != {len(p)} weights")
    if any(a < 0 for a in alpha):
        raise ValueError("multi-index entries must be nonnegative")
    return sum(pj * a for pj, a in zip(p, alpha))


@dataclass(frozen=True)
class Thresholds:
    """Every numerical tolerance the checks use, in one overridable record."""

    quasi_balanced: float = 1e-13
    pseudoconvex: float = 1e-8
    homogeneity: float = 1e-9
    transversality: float = 1e-8
    psh: float = 1e-6
    defining_r_factor: float = 10.0
    defining_grad_floor: float = 1e-8
    degenerate_radial: float = 1e-12
    jacobi: float = 1e-13
    hermitian: float = 1e-12

    def replace(self, **overrides) -> "Thresholds":
        unknown = set(overrides) - set(self.__dataclass_fields__)
        if unknown:
            raise KeyError(", ".join(sorted(unknown)))
        values = {k: getattr(self, k) for k in self.__dataclass_fields__}
        values.update({k: float(v) for k, v in overrides.items()})
        return Thresholds(**values)


DEFAULT_THRESHOLDS = Thresholds()
