"""Builtin catalog of quasi-balanced test domains.

Each family has a hand-coded defining function (usable on floats and jets), the
equivalent expression text where the grammar can express it, and a closed-form
gauge where one exists. Some entries are deliberately broken so the failure
paths of the checks have fixed, documented witnesses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .calculus import kink_max
from .core import Weights, validate_weights
from .errors import BadParameters, NoOracle, QGaugeError, UnknownFamily
from .gauge import DomainDefinition

FAMILIES = ("unit_ball", "weighted_egg", "product_egg", "polydisc_max", "offcenter_ball", "indefinite_egg")


@dataclass(frozen=True)
class Flags:
    quasi_balanced: bool = True
    pseudoconvex: bool = True
    smooth_boundary: bool = True

    def as_dict(self) -> dict:
        return {
            "quasi_balanced": self.quasi_balanced,
            "pseudoconvex": self.pseudoconvex,
            "smooth_boundary": self.smooth_boundary,
        }


@dataclass(frozen=True)
class Builtin:
    """A resolved family instance: everything needed to build a DomainDefinition."""

    family: str
    params: dict
    weights: Weights
    psi: Callable
    expression: Optional[str]
    bounding_radius: float
    expected: Flags
    oracle: Optional[Callable] = None

    def domain(self, name: str | None = None, **solver) -> DomainDefinition:
        return DomainDefinition(
            name=name or self.family,
            weights=self.weights,
            psi=self.psi,
            bounding_radius=self.bounding_radius,
            oracle=self.oracle,
            smooth=self.expected.smooth_boundary,
            source=self.expression,
            **solver,
        )


def _abs2(x, j):
    return x[2 * j] * x[2 * j] + x[2 * j + 1] * x[2 * j + 1]


def _moduli(z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return np.hypot(z[0::2], z[1::2])


def _num(v: float) -> str:
    return str(int(v)) if float(v) == int(v) else repr(float(v))


def _weights(raw, n) -> Weights:
    if raw is None:
        raw = [1] * n
    try:
        w = validate_weights(list(raw))
    except QGaugeError as exc:
        raise BadParameters(f"p: {exc}") from exc
    if len(w) != n:
        raise BadParameters(f"p has length {len(w)}, expected {n}")
    return w


def _int_list(raw, name) -> list[int]:
    try:
        vals = [int(v) for v in raw]
    except (TypeError, ValueError) as exc:
        raise BadParameters(f"{name} must be a list of integers") from exc
    if any(v != r for v, r in zip(vals, raw)):
        raise BadParameters(f"{name} must be a list of integers")
    return vals


def unit_ball(n: int = 2, p=None) -> Builtin:
    n = int(n)
    if n < 1:
        raise BadParameters("n must be >= 1")
    w = _weights(p, n)

    def psi(x):
        s = _abs2(x, 0)
        for j in range(1, n):
            s = s + _abs2(x, j)
        return s - 1.0

    oracle = (lambda z: float(np.linalg.norm(z))) if w.balanced else None
    expr = " + ".join(f"abs2(z{j + 1})" for j in range(n)) + " - 1"
    return Builtin("unit_ball", {"n": n, "p": list(w.p)}, w, psi, expr, 1.0, Flags(), oracle)


def weighted_egg(p=(1, 2), m=(2, 1), c=None) -> Builtin:
    m = _int_list(m, "m")
    n = len(m)
    w = _weights(p, n)
    c = [1.0] * n if c is None else [float(v) for v in c]
    if len(c) != n:
        raise BadParameters(f"c has length {len(c)}, expected {n}")
    if any(mj < 1 for mj in m):
        raise BadParameters("m entries must be >= 1")
    if any(not cj > 0 for cj in c):
        raise BadParameters("c entries must be > 0")

    def psi(x):
        s = c[0] * _abs2(x, 0) ** m[0]
        for j in range(1, n):
            s = s + c[j] * _abs2(x, j) ** m[j]
        return s - 1.0

    oracle = None
    degrees = {pj * mj for pj, mj in zip(w.p, m)}
    if len(degrees) == 1:
        k = degrees.pop()

        def oracle(z):
            r = _moduli(z)
            return float(sum(cj * rj ** (2 * mj) for cj, rj, mj in zip(c, r, m)) ** (1.0 / (2 * k)))

    terms = []
    for j in range(n):
        t = f"abs2(z{j + 1})" + (f"^{m[j]}" if m[j] != 1 else "")
        terms.append(t if c[j] == 1 else f"{_num(c[j])}*{t}")
    expr = " + ".join(terms) + " - 1"
    radius = math.sqrt(sum(cj ** (-1.0 / mj) for cj, mj in zip(c, m)))
    params = {"p": list(w.p), "m": m, "c": c}
    return Builtin("weighted_egg", params, w, psi, expr, radius, Flags(), oracle)


def product_egg(p=(1, 2), m=(2, 1), eps: float = 0.5) -> Builtin:
    m = _int_list(m, "m")
    if len(m) != 2 or any(mj < 1 for mj in m):
        raise BadParameters("product_egg needs two exponents m >= 1")
    w = _weights(p, 2)
    eps = float(eps)
    if not eps >= 0:
        raise BadParameters("eps must be >= 0")
    m1, m2 = m

    def psi(x):
        a = _abs2(x, 0)
        b = _abs2(x, 1)
        return a**m1 + b**m2 + eps * (a * b) - 1.0

    expr = f"abs2(z1)^{m1} + abs2(z2)^{m2} + {_num(eps)}*abs2(z1)*abs2(z2) - 1"
    return Builtin("product_egg", {"p": list(w.p), "m": m, "eps": eps}, w, psi, expr, math.sqrt(2.0), Flags())


def polydisc_max(n: int = 2) -> Builtin:
    n = int(n)
    if n < 1:
        raise BadParameters("n must be >= 1")
    w = _weights(None, n)

    def psi(x):
        return kink_max([_abs2(x, j) for j in range(n)]) - 1.0

    def oracle(z):
        return float(_moduli(z).max())

    flags = Flags(smooth_boundary=False)
    return Builtin("polydisc_max", {"n": n}, w, psi, None, math.sqrt(n), flags, oracle)


def offcenter_ball(n: int = 2, shift: float = 0.5) -> Builtin:
    n = int(n)
    shift = float(shift)
    if n < 1:
        raise BadParameters("n must be >= 1")
    if not abs(shift) < 1:
        raise BadParameters("|shift| must be < 1 so that the origin stays inside")
    w = _weights(None, n)

    def psi(x):
        d = x[0] - shift
        s = d * d + x[1] * x[1]
        for j in range(1, n):
            s = s + _abs2(x, j)
        return s - 1.0

    rest = "".join(f" + abs2(z{j + 1})" for j in range(1, n))
    expr = f"(re(z1) - {_num(shift)})^2 + im(z1)^2{rest} - 1"
    flags = Flags(quasi_balanced=False)
    return Builtin("offcenter_ball", {"n": n, "shift": shift}, w, psi, expr, 1.0 + abs(shift), flags)


def indefinite_egg(cross: float = 1.0) -> Builtin:
    """``|z1|^4 - cross |z1|^2 |z2|^2 + |z2|^4 < 1``: balanced, bounded, never pseudoconvex.

    Near ``z2 = 0`` the boundary looks like ``|z1|^2 < 1 + (cross/2)|z2|^2``, whose
    Levi form in the z2 direction is negative for every ``cross > 0``.
    """
    cross = float(cross)
    if not 0 < cross < 2:
        raise BadParameters("cross must lie in (0, 2): positive to break pseudoconvexity, < 2 for boundedness")

    def psi(x):
        a = _abs2(x, 0)
        b = _abs2(x, 1)
        return a * a - cross * (a * b) + b * b - 1.0

    def oracle(z):
        a, b = _moduli(z) ** 2
        return float((a * a - cross * a * b + b * b) ** 0.25)

    expr = f"abs2(z1)^2 - {_num(cross)}*abs2(z1)*abs2(z2) + abs2(z2)^2 - 1"
    radius = 1.01 * (4.0 / (2.0 - cross)) ** 0.25
    flags = Flags(pseudoconvex=False)
    return Builtin("indefinite_egg", {"cross": cross}, _weights(None, 2), psi, expr, radius, flags, oracle)


_FACTORIES = {
    "unit_ball": unit_ball,
    "weighted_egg": weighted_egg,
    "product_egg": product_egg,
    "polydisc_max": polydisc_max,
    "offcenter_ball": offcenter_ball,
    "indefinite_egg": indefinite_egg,
}


def resolve(family: str, params: dict | None = None) -> Builtin:
    try:
        factory = _FACTORIES[family]
    except KeyError:
        raise UnknownFamily(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}") from None
    try:
        return factory(**(params or {}))
    except TypeError as exc:
        raise BadParameters(f"{family}: {exc}") from exc


def builtin(family: str, params: dict | None = None, **solver) -> DomainDefinition:
    return resolve(family, params).domain(**solver)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    family: str
    params: dict = field(default_factory=dict)
    note: str = ""

    @property
    def resolved(self) -> Builtin:
        return resolve(self.family, self.params)

    @property
    def expected(self) -> Flags:
        return self.resolved.expected

    @property
    def has_oracle(self) -> bool:
        return self.resolved.oracle is not None

    def domain(self, **solver) -> DomainDefinition:
        return self.resolved.domain(self.name, **solver)


CATALOG: dict[str, CatalogEntry] = {
    e.name: e
    for e in [
        CatalogEntry("ball2", "unit_ball", {"n": 2}, "unit ball in C^2, gauge |z|"),
        CatalogEntry("ball3", "unit_ball", {"n": 3}, "unit ball in C^3, gauge |z|"),
        CatalogEntry("ball2_w12", "unit_ball", {"n": 2, "p": [1, 2]}, "unit ball under weights (1,2)"),
        CatalogEntry("egg12", "weighted_egg", {"p": [1, 2], "m": [2, 1]}, "|z1|^4 + |z2|^2 < 1, closed-form gauge"),
        CatalogEntry("egg23", "weighted_egg", {"p": [2, 3], "m": [3, 2]}, "|z1|^6 + |z2|^4 < 1, closed-form gauge"),
        CatalogEntry("egg12_m11", "weighted_egg", {"p": [1, 2], "m": [1, 1], "c": [1, 3]}, "ellipsoid, weights (1,2)"),
        CatalogEntry("product_egg", "product_egg", {"p": [1, 2], "m": [2, 1], "eps": 0.5}, "egg plus |z1 z2|^2 term"),
        CatalogEntry("polydisc2", "polydisc_max", {"n": 2}, "bidisc, non-smooth boundary"),
        CatalogEntry("offcenter2", "offcenter_ball", {"n": 2, "shift": 0.5}, "shifted ball, not balanced"),
        CatalogEntry("indefinite_egg", "indefinite_egg", {"cross": 1.0}, "balanced, not pseudoconvex"),
    ]
}


def catalog_entry(name: str) -> CatalogEntry:
    try:
        return CATALOG[name]
    except KeyError:
        raise UnknownFamily(f"no catalog entry {name!r}") from None


def oracle_gauge(entry, z) -> float:
    """Closed-form gauge of a catalog entry (or resolved builtin)."""
    b = entry.resolved if isinstance(entry, CatalogEntry) else entry
    if b.oracle is None:
        raise NoOracle(f"{b.family} {b.params} has no closed-form gauge")
    return b.oracle(np.asarray(z, dtype=float))
