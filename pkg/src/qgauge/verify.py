"""Sampled numerical checks of the hypotheses and conclusions about h.

Every check draws its samples from per-sample generators seeded by
``(seed, check, index)``, so serial and threaded runs give bit-identical reports.
"""
from __future__ import annotations

import math
import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .calculus import complex_tangent_basis, eval_jet, levi_from_hessian, min_eig_hermitian, wirtinger_gradient
from .core import DEFAULT_THRESHOLDS, Thresholds, quasi_action, to_complex
from .errors import DegenerateRadialDerivative, EvaluationError, QGaugeError, SamplingFailure, ZeroGradient
from .gauge import DomainDefinition, boundary_project, gauge, gauge_gradient, gauge_levi

CHECKS = ("quasi_balanced", "pseudoconvex", "homogeneity", "transversality", "psh", "defining", "hopf")
PROBE_EVERY = 25  # every 25th boundary sample uses equal-modulus coordinates
MAX_REJECTIONS = 10_000
ANNULUS_MIN = 0.1


@dataclass
class CheckReport:
    check_name: str
    samples: int
    worst_violation: float
    threshold: float
    passed: bool
    seed: int
    witness: Optional[dict] = None
    failure: Optional[str] = None
    statistics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "samples": self.samples,
            "worst_violation": self.worst_violation,
            "threshold": self.threshold,
            "pass": self.passed,
            "seed": self.seed,
            "witness": self.witness,
            "failure": self.failure,
            "statistics": self.statistics,
        }


@dataclass
class HopfEstimate:
    c_hat: float
    samples: int
    boundary_mesh_size: int
    passed: bool
    seed: int
    witness: Optional[dict] = None
    failure: Optional[str] = None

    def as_dict(self) -> dict:
        return {
            "c_hat": self.c_hat,
            "samples": self.samples,
            "boundary_mesh_size": self.boundary_mesh_size,
            "pass": self.passed,
            "seed": self.seed,
            "witness": self.witness,
            "failure": self.failure,
        }


def worker_count() -> int:
    raw = os.environ.get("QGAUGE_THREADS", "0").strip() or "0"
    try:
        k = int(raw)
    except ValueError:
        k = 0
    if k <= 0:
        k = os.cpu_count() or 1
    return k


def _map(fn: Callable[[int], object], count: int) -> list:
    threads = min(worker_count(), count)
    if threads <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(count)))


def sample_rng(seed: int, check: str, index: int) -> np.random.Generator:
    tag = zlib.crc32(check.encode())
    return np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, tag, index]))


def _direction(rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        d = rng.standard_normal(2 * n)
        norm = np.linalg.norm(d)
        if norm > 1e-12:
            return d / norm


def _equal_modulus_direction(rng: np.random.Generator, n: int) -> np.ndarray:
    theta = rng.uniform(0.0, 2 * np.pi, n)
    d = np.empty(2 * n)
    d[0::2] = np.cos(theta)
    d[1::2] = np.sin(theta)
    return d / math.sqrt(n)


def boundary_sample(dom: DomainDefinition, rng: np.random.Generator, index: int) -> np.ndarray:
    """A boundary point along a random direction.

    Every ``PROBE_EVERY``-th sample uses a direction whose coordinates all have the
    same modulus; that is where max-type (polydisc) boundaries have their edges.
    """
    if index % PROBE_EVERY == 0:
        d = _equal_modulus_direction(rng, dom.n)
    else:
        d = _direction(rng, dom.n)
    return boundary_project(dom, d)


def interior_sample(dom: DomainDefinition, rng: np.random.Generator) -> np.ndarray:
    """Uniform point of the bounding ball, rejected until it lies in the domain."""
    if not dom.psi_origin < 0:
        raise SamplingFailure("psi(0) >= 0: the origin is not inside, cannot sample interior points")
    m = 2 * dom.n
    for _ in range(MAX_REJECTIONS):
        z = _direction(rng, dom.n) * dom.bounding_radius * rng.uniform() ** (1.0 / m)
        try:
            if dom.psi(z.tolist()) < 0:
                return z
        except EvaluationError:
            continue
    raise SamplingFailure(f"no interior point found in {MAX_REJECTIONS} draws")


def annulus_sample(dom: DomainDefinition, rng: np.random.Generator) -> np.ndarray:
    return _direction(rng, dom.n) * rng.uniform(ANNULUS_MIN, 2.0 * dom.bounding_radius)


def _run(
    name: str,
    dom: DomainDefinition,
    n_samples: int,
    seed: int,
    threshold: float,
    per_sample: Callable[[np.random.Generator, int], tuple[float, dict]],
    summarize: Callable[[list], dict] | None = None,
) -> CheckReport:
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")

    def one(i):
        rng = sample_rng(seed, name, i)
        try:
            v, info = per_sample(rng, i)
            return float(v), info, None
        except SamplingFailure:
            raise
        except (QGaugeError, ArithmeticError) as exc:
            return math.inf, {"index": i}, f"{type(exc).__name__}: {exc}"

    results = _map(one, n_samples)
    worst = -math.inf
    witness = None
    failure = None
    for i, (v, info, err) in enumerate(results):
        if err is not None and failure is None:
            failure = err
            worst, witness = math.inf, dict(info, index=i, error=err)
        if failure is None and v > worst:
            worst, witness = v, dict(info, index=i)
    stats = summarize([r[1] for r in results if r[2] is None]) if summarize else {}
    passed = failure is None and worst <= threshold
    return CheckReport(
        check_name=name,
        samples=n_samples,
        worst_violation=worst,
        threshold=threshold,
        passed=passed,
        seed=seed,
        witness=witness,
        failure=failure,
        statistics=stats,
    )


def _pts(z) -> list[float]:
    return [float(v) for v in np.asarray(z).reshape(-1)]


def check_quasi_balanced(dom, n_samples=1000, seed=42, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> CheckReport:
    """``lam . z`` stays in the domain for ``z`` inside and ``|lam| <= 1``."""

    def sample(rng, i):
        z = interior_sample(dom, rng)
        lam = rng.uniform(0.0, 1.0) * np.exp(1j * rng.uniform(0.0, 2 * np.pi))
        w = quasi_action(lam, z, dom.weights)
        v = float(dom.psi(w.tolist()))
        return max(0.0, v), {"z": _pts(z), "lambda": [lam.real, lam.imag], "psi": v}

    return _run("quasi_balanced", dom, n_samples, seed, thresholds.quasi_balanced, sample)


def _levi_restricted_min(dom: DomainDefinition, xi: np.ndarray, herm_tol: float):
    jet = eval_jet(dom.psi, xi, 2)
    dz = wirtinger_gradient(jet)
    basis = complex_tangent_basis(dz)
    levi = levi_from_hessian(jet.hess)
    if basis.shape[1] == 0:
        return 0.0, float(np.linalg.norm(levi))
    restricted = basis.conj().T @ levi @ basis
    restricted = 0.5 * (restricted + restricted.conj().T)
    return min_eig_hermitian(restricted, herm_tol=herm_tol), float(np.linalg.norm(levi))


def check_pseudoconvex(dom, n_samples=1000, seed=42, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> CheckReport:
    """Levi form of psi on the complex tangent space is positive semidefinite."""

    def sample(rng, i):
        xi = boundary_sample(dom, rng, i)
        lam, norm = _levi_restricted_min(dom, xi, thresholds.hermitian)
        v = 0.0 if lam >= 0 else (-lam / norm if norm > 0 else math.inf)
        return v, {"xi": _pts(xi), "min_eig": lam, "levi_norm": norm}

    def summarize(infos):
        return {"min_restricted_eigenvalue": min((d["min_eig"] for d in infos), default=None)}

    return _run("pseudoconvex", dom, n_samples, seed, thresholds.pseudoconvex, sample, summarize)


def check_homogeneity(dom, n_samples=1000, seed=42, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> CheckReport:
    """``h(lam . z) = |lam| h(z)`` for complex ``lam`` with ``0.1 <= |lam| <= 10``."""

    def sample(rng, i):
        z = annulus_sample(dom, rng)
        lam = math.exp(rng.uniform(math.log(0.1), math.log(10.0))) * np.exp(1j * rng.uniform(0.0, 2 * np.pi))
        h = gauge(dom, z).h
        hl = gauge(dom, quasi_action(lam, z, dom.weights)).h
        expected = abs(lam) * h
        v = abs(hl - expected) / max(1.0, expected)
        return v, {"z": _pts(z), "lambda": [lam.real, lam.imag], "h": h, "h_scaled": hl}

    return _run("homogeneity", dom, n_samples, seed, thresholds.homogeneity, sample)


def transversality_margin(dom: DomainDefinition, xi) -> tuple[float, float]:
    """Normalized ``|sum_j dpsi/dz_j p_j xi_j|`` and the radial derivative ``dg/dt`` at t = 1."""
    jet = eval_jet(dom.psi, xi, 1)
    dz = wirtinger_gradient(jet)
    pxi = np.asarray(dom.weights.p) * to_complex(xi)
    pairing = complex(np.sum(dz * pxi))
    denom = float(np.linalg.norm(dz) * np.linalg.norm(pxi))
    tau = abs(pairing) / denom if denom > 0 else 0.0
    return tau, -2.0 * pairing.real


def check_transversality(dom, n_samples=1000, seed=42, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> CheckReport:
    """The circle-orbit tangent ``(i p_j xi_j)`` is not a complex tangent vector."""
    floor = thresholds.transversality

    def sample(rng, i):
        xi = boundary_sample(dom, rng, i)
        tau, dg_dt = transversality_margin(dom, xi)
        degenerate = False
        try:
            gauge_gradient(dom, xi, hint=1.0, degenerate=thresholds.degenerate_radial)
        except DegenerateRadialDerivative:
            degenerate = True
        info = {"xi": _pts(xi), "margin": tau, "dg_dt": dg_dt, "degenerate_radial": degenerate}
        return max(0.0, floor - tau), info

    def summarize(infos):
        return {
            "margin_floor": floor,
            "min_margin": min((d["margin"] for d in infos), default=None),
            "max_dg_dt": max((d["dg_dt"] for d in infos), default=None),
            "degenerate_radial_count": sum(d["degenerate_radial"] for d in infos),
        }

    return _run("transversality", dom, n_samples, seed, 0.0, sample, summarize)


def check_plurisubharmonic_gauge(dom, n_samples=500, seed=42, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> CheckReport:
    """Finite-difference Levi form of h is positive semidefinite away from 0."""

    def sample(rng, i):
        z = annulus_sample(dom, rng)
        levi = gauge_levi(dom, z)
        lam = min_eig_hermitian(levi, herm_tol=thresholds.hermitian)
        norm = float(np.linalg.norm(levi))
        return max(0.0, -lam) / max(1.0, norm), {"z": _pts(z), "min_eig": lam, "levi_norm": norm}

    def summarize(infos):
        return {"min_eigenvalue": min((d["min_eig"] for d in infos), default=None)}

    return _run("psh", dom, n_samples, seed, thresholds.psh, sample, summarize)


def check_defining_function(dom, n_samples=1000, seed=42, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> CheckReport:
    """``r = h - 1`` vanishes on the boundary with nonzero gradient there.

    The violation is normalized so that 1.0 sits exactly on either bound.
    """
    r_tol = thresholds.defining_r_factor * dom.solver_tol
    floor = thresholds.defining_grad_floor

    def sample(rng, i):
        xi = boundary_sample(dom, rng, i)
        r = gauge(dom, xi, hint=1.0).h - 1.0
        gnorm = float(np.linalg.norm(gauge_gradient(dom, xi, hint=1.0, degenerate=thresholds.degenerate_radial)))
        v = max(abs(r) / r_tol, floor / gnorm if gnorm > 0 else math.inf)
        return v, {"xi": _pts(xi), "r": r, "grad_norm": gnorm}

    def summarize(infos):
        return {
            "max_abs_r": max((abs(d["r"]) for d in infos), default=None),
            "min_grad_norm": min((d["grad_norm"] for d in infos), default=None),
            "r_tolerance": r_tol,
            "grad_floor": floor,
        }

    return _run("defining", dom, n_samples, seed, 1.0, sample, summarize)


def _refine_distance(dom: DomainDefinition, z: np.ndarray, xi: np.ndarray, d: float, max_iter: int = 60):
    """Slide a boundary point towards the foot of ``z`` by tangential steps.

    Every candidate is itself a boundary point, so the result never drops below
    the true distance.
    """
    for _ in range(max_iter):
        grad = eval_jet(dom.psi, xi, 1).grad
        gn = np.linalg.norm(grad)
        if gn == 0:
            break
        nrm = grad / gn
        v = z - xi
        vt = v - np.dot(v, nrm) * nrm
        if np.linalg.norm(vt) <= 1e-15 * max(1.0, np.linalg.norm(xi)):
            break
        best_xi, best_d = xi, d
        alpha = 1.0
        while alpha <= 1024.0:
            cand_dir = xi + alpha * vt
            if not np.any(cand_dir):
                break
            cand = boundary_project(dom, cand_dir, hint=1.0)
            dc = float(np.linalg.norm(z - cand))
            if dc < best_d:
                best_xi, best_d = cand, dc
                alpha *= 2.0
            else:
                break
        if best_d >= d * (1.0 - 1e-13):
            break
        xi, d = best_xi, best_d
    return d


def estimate_hopf_constant(
    dom,
    n_interior: int = 200,
    n_boundary_mesh: int = 2000,
    seed: int = 42,
    refine: bool = True,
) -> HopfEstimate:
    """Empirical ``inf |r(z)| / dist(z, boundary)`` over interior samples.

    Distances come from a random boundary mesh (optionally refined locally); both
    over-estimate the true distance, so the reported constant errs low.
    """
    if n_interior < 1 or n_boundary_mesh < 100:
        raise ValueError("need n_interior >= 1 and n_boundary_mesh >= 100")

    def mesh_point(i):
        return boundary_project(dom, _direction(sample_rng(seed, "hopf-mesh", i), dom.n))

    try:
        mesh = np.array(_map(mesh_point, n_boundary_mesh))
    except (QGaugeError, ArithmeticError) as exc:
        return HopfEstimate(0.0, 0, n_boundary_mesh, False, seed, None, f"{type(exc).__name__}: {exc}")

    def one(i):
        rng = sample_rng(seed, "hopf", i)
        try:
            z = interior_sample(dom, rng)
            r = gauge(dom, z).h - 1.0
            dists = np.linalg.norm(mesh - z, axis=1)
            k = int(np.argmin(dists))
            d = float(dists[k])
            if refine:
                d = _refine_distance(dom, z, mesh[k], d)
            return abs(r) / d, {"z": _pts(z), "r": r, "dist": d}, None
        except SamplingFailure:
            raise
        except (QGaugeError, ArithmeticError) as exc:
            return 0.0, {"index": i}, f"{type(exc).__name__}: {exc}"

    results = _map(one, n_interior)
    c_hat, witness, failure = math.inf, None, None
    for i, (c, info, err) in enumerate(results):
        if err is not None:
            failure = failure or err
            c_hat, witness = 0.0, dict(info, index=i, error=err)
            break
        if c < c_hat:
            c_hat, witness = c, dict(info, index=i)
    passed = failure is None and c_hat > 0
    return HopfEstimate(float(c_hat), n_interior, n_boundary_mesh, passed, seed, witness, failure)


CHECK_FUNCTIONS = {
    "quasi_balanced": check_quasi_balanced,
    "pseudoconvex": check_pseudoconvex,
    "homogeneity": check_homogeneity,
    "transversality": check_transversality,
    "psh": check_plurisubharmonic_gauge,
    "defining": check_defining_function,
}

# hypotheses each check relies on; a check is expected to pass only if all hold
CHECK_REQUIRES = {
    "quasi_balanced": ("quasi_balanced",),
    "pseudoconvex": ("pseudoconvex", "smooth_boundary"),
    "homogeneity": ("quasi_balanced",),
    "transversality": ("quasi_balanced", "pseudoconvex", "smooth_boundary"),
    "psh": ("quasi_balanced", "pseudoconvex", "smooth_boundary"),
    "defining": ("quasi_balanced", "pseudoconvex", "smooth_boundary"),
    "hopf": ("quasi_balanced", "pseudoconvex", "smooth_boundary"),
}


def expected_to_pass(check: str, flags: dict) -> bool:
    return all(flags.get(k, True) for k in CHECK_REQUIRES[check])


def run_suite(
    dom: DomainDefinition,
    suite=CHECKS,
    n_samples: int = 1000,
    seed: int = 42,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
    psh_samples: int | None = None,
    hopf_interior: int = 200,
    hopf_mesh: int = 2000,
) -> tuple[list[CheckReport], Optional[HopfEstimate]]:
    reports = []
    hopf = None
    for name in suite:
        if name == "hopf":
            hopf = estimate_hopf_constant(dom, hopf_interior, hopf_mesh, seed)
            continue
        k = n_samples
        if name == "psh" and psh_samples is not None:
            k = psh_samples
        reports.append(CHECK_FUNCTIONS[name](dom, k, seed, thresholds))
    return reports, hopf
