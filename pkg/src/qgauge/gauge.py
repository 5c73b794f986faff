"""Minkowski function of a quasi-balanced domain and the quantities derived from it.

For ``z != 0`` the gauge ``h(z)`` is the unique positive root in ``t`` of the radial
equation ``g(z, t) = psi((1/t) . z) = 0``. Membership of ``(1/t) . z`` in the domain is
monotone in ``t``, so bisection on a sign bracket always works; Newton steps using
``dg/dt`` only accelerate it.
"""
from __future__ import annotations

import math
from dataclasses import InitVar, dataclass
from typing import Callable, Optional

import numpy as np

from .calculus import Dual, eval_jet, levi_from_hessian
from .core import Weights, as_point, quasi_action
from .errors import (
    BracketFailure,
    DegenerateRadialDerivative,
    DimensionMismatch,
    EvaluationError,
    InvalidDomain,
    MaxIterations,
    ZeroPoint,
)

MAX_DOUBLINGS = 60
EXCLUDED_RADIUS = 1e-8  # no differentiation-based claims this close to the origin
MIN_FD_STEP = 1e-5
FD_REL_STEP = 1e-4


def fd_base_step(z) -> float:
    return max(FD_REL_STEP * float(np.linalg.norm(z)), MIN_FD_STEP)


@dataclass(frozen=True, eq=False)
class DomainDefinition:
    """A domain ``{psi < 0}`` together with its circle-action weights.

    ``psi`` takes the 2n interleaved real coordinates. ``smooth=False`` marks a
    defining function without usable derivatives; the solver then bisects only.
    """

    name: str
    weights: Weights
    psi: Callable
    bounding_radius: float
    oracle: Optional[Callable] = None
    solver_tol: float = 1e-12
    max_iter: int = 200
    smooth: bool = True
    source: Optional[str] = None
    validate: InitVar[bool] = True

    def __post_init__(self, validate):
        if not self.bounding_radius > 0:
            raise InvalidDomain("bounding_radius must be positive")
        if not self.solver_tol > 0 or self.max_iter < 1:
            raise InvalidDomain("solver_tol and max_iter must be positive")
        # Hessians of h are differenced from gradients with steps >= MIN_FD_STEP;
        # solver noise amplified by 1/step has to stay below the 1e-6 Levi floor.
        if self.solver_tol > 1e-6 * MIN_FD_STEP:
            raise InvalidDomain(f"solver_tol {self.solver_tol} too coarse for Levi differencing (max 1e-11)")
        if validate:
            self.check()
        try:
            psi0 = float(self.psi([0.0] * (2 * self.n)))
        except EvaluationError:
            psi0 = math.nan
        object.__setattr__(self, "psi_origin", psi0)
        # weight of each interleaved real coordinate, reused by every radial solve
        object.__setattr__(self, "coord_weights", tuple(pj for pj in self.weights for _ in (0, 1)))

    @property
    def n(self) -> int:
        return len(self.weights)

    def check(self) -> None:
        n = self.n
        v0 = self.psi([0.0] * (2 * n))
        if not v0 < 0:
            raise InvalidDomain(f"psi(0) = {v0} is not negative; the origin must lie in the domain")
        rng = np.random.default_rng(0x5EED)
        dirs = rng.standard_normal((64, 2 * n))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        for d in dirs * (2.0 * self.bounding_radius):
            try:
                v = self.psi(d.tolist())
            except EvaluationError:
                continue
            if not v > 0:
                raise InvalidDomain(f"psi = {v} <= 0 at radius 2R; bounding_radius {self.bounding_radius} too small")


@dataclass(frozen=True)
class RadialProfile:
    z: np.ndarray
    t: float
    g_value: float
    dg_dt: float


@dataclass(frozen=True)
class GaugeResult:
    h: float
    iterations: int
    method: str  # "bisection" | "newton" | "hybrid"
    residual: float
    evaluations: int = 0


class _Radial:
    """``g(z, .)`` for a fixed point, counting psi evaluations."""

    def __init__(self, dom: DomainDefinition, z):
        self.psi = dom.psi
        self.xs = z.tolist()
        self.pp = dom.coord_weights
        self.evals = 0

    def xi(self, t: float) -> list[float]:
        inv = 1.0 / t
        return [x * inv**p for x, p in zip(self.xs, self.pp)]

    def value(self, t: float) -> float:
        self.evals += 1
        try:
            v = float(self.psi(self.xi(t)))
        except EvaluationError:
            return math.inf  # undefined points count as outside
        return v if v == v else math.inf

    def value_and_slope(self, t: float) -> tuple[float, float]:
        self.evals += 1
        inv = 1.0 / t
        seeds = []
        for x, p in zip(self.xs, self.pp):
            v = x * inv**p
            seeds.append(Dual(v, -p * v * inv))
        out = self.psi(seeds)
        if isinstance(out, Dual):
            return float(out.val), float(out.der)
        return float(out), 0.0


def _check_dim(dom: DomainDefinition, z) -> np.ndarray:
    z = np.asarray(z, dtype=float).reshape(-1)
    if z.size != 2 * dom.n:
        raise DimensionMismatch(f"point dimension {z.size // 2} != domain dimension {dom.n}")
    return z


def contains(dom: DomainDefinition, z) -> bool:
    z = _check_dim(dom, z)
    return bool(dom.psi(z.tolist()) < 0)


def radial_value(dom: DomainDefinition, z, t: float) -> RadialProfile:
    """``g(z,t)`` and ``dg/dt = -(1/t) sum_j p_j (x_j psi_xj + y_j psi_yj)`` at ``(1/t) . z``."""
    z = _check_dim(dom, z)
    if not t > 0:
        raise ValueError("t must be positive")
    if not np.any(z):
        raise ZeroPoint("radial profile is undefined at z = 0")
    g, dg = _Radial(dom, z).value_and_slope(float(t))
    return RadialProfile(z, float(t), g, dg)


def _bracket(rad: _Radial, start: float = 1.0) -> tuple[float, float, float, float]:
    t = start
    gv = rad.value(t)
    if gv >= 0:
        lo, glo = t, gv
        for _ in range(MAX_DOUBLINGS):
            t *= 2.0
            gv = rad.value(t)
            if gv <= 0:
                return lo, t, glo, gv
            lo, glo = t, gv
    else:
        hi, ghi = t, gv
        for _ in range(MAX_DOUBLINGS):
            t *= 0.5
            gv = rad.value(t)
            if gv >= 0:
                return t, hi, gv, ghi
            hi, ghi = t, gv
    raise BracketFailure("no sign change of g(z, t) in [2^-60, 2^60]; unbounded domain or invalid psi")


def _bracket_near(rad: _Radial, hint: float) -> tuple[float, float, float, float]:
    gh = rad.value(hint)
    if gh == 0:
        return hint, hint, gh, gh
    eta = 1e-7
    for _ in range(12):
        t = hint * (1 + eta) if gh > 0 else hint / (1 + eta)
        gv = rad.value(t)
        if gh > 0 and gv <= 0:
            return hint, t, gh, gv
        if gh < 0 and gv >= 0:
            return t, hint, gv, gh
        eta *= 16
    return _bracket(rad)


def bracket_root(dom: DomainDefinition, z) -> tuple[float, float]:
    """``(t_lo, t_hi)`` with ``g(z,t_lo) >= 0 >= g(z,t_hi)``, by doubling/halving from t = 1."""
    z = _check_dim(dom, z)
    if not np.any(z):
        raise ZeroPoint("z = 0 has no radial bracket")
    lo, hi, _, _ = _bracket(_Radial(dom, z))
    return lo, hi


def gauge(dom: DomainDefinition, z, method: str = "hybrid", hint: float | None = None) -> GaugeResult:
    """Minkowski function ``h(z) = inf{t > 0 : (1/t) . z in D}``.

    ``method="bisection"`` runs the pure bisection oracle. ``hint`` (a nearby gauge
    value) tightens the initial bracket. Converged when the sign bracket is narrower
    than ``solver_tol * max(1, t)``.
    """
    z = _check_dim(dom, z)
    rad = _Radial(dom, z)
    if not any(rad.xs):
        return GaugeResult(0.0, 0, "bisection" if method == "bisection" else "newton", 0.0, 0)
    hinted = hint is not None and hint > 0 and math.isfinite(hint)
    if hinted and method == "hybrid" and dom.smooth:
        fast = _polish(dom, rad, hint)
        if fast is not None:
            return fast
    if hinted:
        lo, hi, glo, ghi = _bracket_near(rad, hint)
    else:
        lo, hi, glo, ghi = _bracket(rad)
    tol = dom.solver_tol
    if method == "bisection" or not dom.smooth:
        return _bisect(dom, rad, lo, hi, glo, ghi)
    if method != "hybrid":
        raise ValueError(f"unknown method {method!r}")

    newton_steps = bisect_steps = 0
    t = _newton_start(dom, lo, hi, glo, ghi)
    best_t, best_g = (lo, glo) if abs(glo) <= abs(ghi) else (hi, ghi)
    for it in range(1, dom.max_iter + 1):
        if hi - lo < tol * max(1.0, best_t):
            return _result(best_t, best_g, it - 1, newton_steps, bisect_steps, rad)
        try:
            gv, dg = rad.value_and_slope(t)
        except EvaluationError:
            gv, dg = math.inf, 0.0
        if gv >= 0:
            lo = t
        else:
            hi = t
        if abs(gv) <= abs(best_g):
            best_t, best_g = t, gv
        if gv == 0:
            return _result(t, gv, it, newton_steps, bisect_steps, rad)
        width = tol * max(1.0, t)
        if hi - lo < width:
            return _result(best_t, best_g, it, newton_steps, bisect_steps, rad)
        step = -gv / dg if math.isfinite(gv) and abs(dg) >= 1e-300 else math.nan
        tn = t + step
        if step == step and lo < tn < hi:
            newton_steps += 1
            if abs(step) < 0.25 * width:
                # close the bracket on the far side of the Newton estimate
                tp = t + math.copysign(0.5 * width, step)
                gp = rad.value(tp)
                if (gp <= 0) == (gv > 0):
                    return _result(t, gv, it, newton_steps, bisect_steps, rad)
                if gp >= 0:
                    lo = tp
                else:
                    hi = tp
                tn = tp if lo < tp < hi else 0.5 * (lo + hi)
            t = tn
        else:
            bisect_steps += 1
            t = 0.5 * (lo + hi)
    raise MaxIterations(f"gauge did not converge in {dom.max_iter} iterations")


def _polish(dom, rad, t: float, max_steps: int = 4) -> GaugeResult | None:
    """Plain Newton from a good guess, accepted only once a sign change of width
    below tolerance has been observed around the iterate; ``None`` means "use the
    bracketed solver".
    """
    for it in range(1, max_steps + 1):
        try:
            gv, dg = rad.value_and_slope(t)
        except EvaluationError:
            return None
        if gv == 0:
            return _result(t, gv, it, it, 0, rad)
        if not (math.isfinite(gv) and dg < 0):
            return None
        step = -gv / dg
        width = dom.solver_tol * max(1.0, t)
        if abs(step) < 0.25 * width:
            tp = t + math.copysign(0.5 * width, step)
            gp = rad.value(tp)
            if (gp <= 0) == (gv > 0):
                return _result(t, gv, it, it, 0, rad)
            return None
        if not abs(step) < 0.5 * t:
            return None
        t += step
    return None


def _newton_start(dom, lo, hi, glo, ghi) -> float:
    """Starting point from interpolating ``log(g - psi(0))`` linearly in ``log t``.

    Exact when ``psi + 1`` is quasi-homogeneous; otherwise just a point inside the bracket.
    """
    a = -dom.psi_origin
    if lo < hi and a > 0 and math.isfinite(glo) and ghi + a > 0:
        llo, lhi, la = math.log(glo + a), math.log(ghi + a), math.log(a)
        if llo > lhi:
            s = (llo - la) / (llo - lhi)
            t = math.exp(math.log(lo) + s * (math.log(hi) - math.log(lo)))
            if lo <= t <= hi:
                return t
    return lo if abs(glo) <= abs(ghi) else hi


def _result(t, gv, iterations, newton_steps, bisect_steps, rad) -> GaugeResult:
    method = "newton" if bisect_steps == 0 else "hybrid"
    return GaugeResult(float(t), iterations, method, abs(float(gv)), rad.evals)


def _bisect(dom, rad, lo, hi, glo, ghi) -> GaugeResult:
    tol = dom.solver_tol
    it = 0
    while hi - lo >= tol * max(1.0, 0.5 * (lo + hi)):
        it += 1
        if it > dom.max_iter:
            raise MaxIterations(f"bisection did not converge in {dom.max_iter} iterations")
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        gm = rad.value(mid)
        if gm >= 0:
            lo, glo = mid, gm
        else:
            hi, ghi = mid, gm
    t, gv = (lo, glo) if abs(glo) <= abs(ghi) else (hi, ghi)
    return GaugeResult(float(t), it, "bisection", abs(float(gv)), rad.evals)


def _scale_to_boundary(dom: DomainDefinition, z: np.ndarray, h: float) -> np.ndarray:
    return quasi_action(1.0 / h, z, dom.weights)


def boundary_project(dom: DomainDefinition, z, hint: float | None = None) -> np.ndarray:
    """``xi = (1/h(z)) . z``, a point of the boundary."""
    z = _check_dim(dom, z)
    if not np.any(z):
        raise ZeroPoint("cannot project z = 0 to the boundary")
    return _scale_to_boundary(dom, z, gauge(dom, z, hint=hint).h)


def defining_r(dom: DomainDefinition, z) -> float:
    return gauge(dom, z).h - 1.0


def _radial_derivative_at_root(dom: DomainDefinition, z: np.ndarray, h: float, degenerate: float):
    xi = _scale_to_boundary(dom, z, h)
    jet = eval_jet(dom.psi, xi, 1)
    pp = np.repeat(np.asarray(dom.weights.p, dtype=float), 2)
    dg_dt = -float(np.dot(pp * xi, jet.grad)) / h
    scale = float(np.linalg.norm(jet.grad) * np.linalg.norm(pp * xi)) / h
    if not abs(dg_dt) > degenerate * scale:
        raise DegenerateRadialDerivative(
            f"dg/dt = {dg_dt:.3e} vanishes at the root (scale {scale:.3e}); IFT hypotheses fail"
        )
    return xi, jet, pp, dg_dt


def gauge_gradient(dom: DomainDefinition, z, hint: float | None = None, degenerate: float = 1e-12) -> np.ndarray:
    """Real gradient of h by the implicit function theorem: ``dh/du = -(dg/du) / (dg/dt)``."""
    z = _check_dim(dom, z)
    if not np.any(z):
        raise ZeroPoint("the gauge is not differentiable at z = 0")
    h = gauge(dom, z, hint=hint).h
    _, jet, pp, dg_dt = _radial_derivative_at_root(dom, z, h, degenerate)
    dg_du = jet.grad * h ** (-pp)
    return -dg_du / dg_dt


def gauge_hessian(dom: DomainDefinition, z, step: float | None = None) -> np.ndarray:
    """Real Hessian of h: Richardson-extrapolated central differences of the IFT gradient."""
    z = np.array(_check_dim(dom, z), dtype=float)
    if np.linalg.norm(z) < EXCLUDED_RADIUS:
        raise ZeroPoint("no second derivatives this close to the origin")
    h0 = gauge(dom, z).h
    base = fd_base_step(z) if step is None else step
    m = z.size
    hess = np.empty((m, m))
    for k in range(m):

        def central(s):
            zp = z.copy()
            zm = z.copy()
            zp[k] += s
            zm[k] -= s
            return (gauge_gradient(dom, zp, hint=h0) - gauge_gradient(dom, zm, hint=h0)) / (2 * s)

        d1 = central(base)
        d2 = central(0.5 * base)
        hess[k] = (4.0 * d2 - d1) / 3.0
    return 0.5 * (hess + hess.T)


def gauge_levi(dom: DomainDefinition, z, step: float | None = None) -> np.ndarray:
    return levi_from_hessian(gauge_hessian(dom, z, step))


def point(coords, dom: DomainDefinition | None = None) -> np.ndarray:
    return as_point(coords, None if dom is None else dom.n)
