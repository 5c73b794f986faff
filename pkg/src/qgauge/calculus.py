"""Forward-mode derivatives, Wirtinger quantities, Levi forms and small eigenproblems.

Functions handed to this module take a sequence of 2n real scalars (interleaved
``x1, y1, ..., xn, yn``) and combine them with ``+ - * /``, integer ``**`` and the
:func:`exp`, :func:`log`, :func:`sqrt` helpers below. The same code then runs on
plain floats, on :class:`Dual` (one directional derivative) and on :class:`Jet`
(full gradient and Hessian).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import EvaluationError, NonSmoothPoint, NotHermitian, OrderTooLow, ZeroGradient


class Dual:
    """First-order dual number ``val + der*eps`` (a single directional derivative)."""

    __slots__ = ("val", "der")

    def __init__(self, val: float, der: float = 0.0):
        self.val = val
        self.der = der

    def __repr__(self):
        return f"Dual({self.val!r}, {self.der!r})"

    def __add__(self, o):
        if type(o) is Dual:
            return Dual(self.val + o.val, self.der + o.der)
        return Dual(self.val + o, self.der)

    __radd__ = __add__

    def __sub__(self, o):
        if type(o) is Dual:
            return Dual(self.val - o.val, self.der - o.der)
        return Dual(self.val - o, self.der)

    def __rsub__(self, o):
        return Dual(o - self.val, -self.der)

    def __neg__(self):
        return Dual(-self.val, -self.der)

    def __pos__(self):
        return self

    def __mul__(self, o):
        if type(o) is Dual:
            return Dual(self.val * o.val, self.val * o.der + self.der * o.val)
        return Dual(self.val * o, self.der * o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if type(o) is Dual:
            if o.val == 0.0:
                raise EvaluationError("division by zero")
            q = self.val / o.val
            return Dual(q, (self.der - q * o.der) / o.val)
        if o == 0:
            raise EvaluationError("division by zero")
        return Dual(self.val / o, self.der / o)

    def __rtruediv__(self, o):
        if self.val == 0.0:
            raise EvaluationError("division by zero")
        q = o / self.val
        return Dual(q, -q * self.der / self.val)

    def __pow__(self, k: int):
        if self.val == 0.0 and k < 0:
            raise EvaluationError("negative power of zero")
        if k == 0:
            return Dual(1.0, 0.0)
        return Dual(self.val**k, k * self.val ** (k - 1) * self.der)

    def _chain(self, f, df):
        return Dual(f, df * self.der)


class Jet:
    """Second-order (or first-order when ``hess is None``) forward-mode scalar."""

    __slots__ = ("val", "grad", "hess")

    def __init__(self, val: float, grad: np.ndarray, hess: np.ndarray | None):
        self.val = val
        self.grad = grad
        self.hess = hess

    def __repr__(self):
        return f"Jet({self.val!r}, grad={self.grad!r})"

    def __add__(self, o):
        if isinstance(o, Jet):
            h = None if self.hess is None else self.hess + o.hess
            return Jet(self.val + o.val, self.grad + o.grad, h)
        return Jet(self.val + o, self.grad, self.hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.val, -self.grad, None if self.hess is None else -self.hess)

    def __pos__(self):
        return self

    def __sub__(self, o):
        if isinstance(o, Jet):
            h = None if self.hess is None else self.hess - o.hess
            return Jet(self.val - o.val, self.grad - o.grad, h)
        return Jet(self.val - o, self.grad, self.hess)

    def __rsub__(self, o):
        return Jet(o - self.val, -self.grad, None if self.hess is None else -self.hess)

    def __mul__(self, o):
        if isinstance(o, Jet):
            a, b = self.val, o.val
            g = a * o.grad + b * self.grad
            h = None
            if self.hess is not None:
                cross = np.outer(self.grad, o.grad)
                h = a * o.hess + b * self.hess + (cross + cross.T)
            return Jet(a * b, g, h)
        return Jet(self.val * o, self.grad * o, None if self.hess is None else self.hess * o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if isinstance(o, Jet):
            return self * o._reciprocal()
        if o == 0:
            raise EvaluationError("division by zero")
        return self * (1.0 / o)

    def __rtruediv__(self, o):
        return self._reciprocal() * o

    def _reciprocal(self):
        v = self.val
        if v == 0.0:
            raise EvaluationError("division by zero")
        return self._chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))

    def __pow__(self, k: int):
        v = self.val
        if v == 0.0 and k < 0:
            raise EvaluationError("negative power of zero")
        if k == 0:
            return Jet(1.0, np.zeros_like(self.grad), None if self.hess is None else np.zeros_like(self.hess))
        d1 = k * v ** (k - 1)
        d2 = k * (k - 1) * v ** (k - 2) if k not in (0, 1) else 0.0
        return self._chain(v**k, d1, d2)

    def _chain(self, f, df, d2f=0.0):
        h = None
        if self.hess is not None:
            h = df * self.hess + d2f * np.outer(self.grad, self.grad)
        return Jet(f, df * self.grad, h)


def _value(x) -> float:
    return x.val if isinstance(x, (Dual, Jet)) else x


def exp(x):
    try:
        f = math.exp(_value(x))
    except OverflowError as exc:
        raise EvaluationError("exp overflow") from exc
    if isinstance(x, Jet):
        return x._chain(f, f, f)
    if isinstance(x, Dual):
        return x._chain(f, f)
    return f


def log(x):
    v = _value(x)
    if not v > 0.0:
        raise EvaluationError(f"log of nonpositive argument {v!r}")
    f = math.log(v)
    if isinstance(x, Jet):
        return x._chain(f, 1.0 / v, -1.0 / (v * v))
    if isinstance(x, Dual):
        return x._chain(f, 1.0 / v)
    return f


def sqrt(x):
    v = _value(x)
    if v < 0.0 or v != v:
        raise EvaluationError(f"sqrt of negative argument {v!r}")
    f = math.sqrt(v)
    if isinstance(x, (Dual, Jet)):
        if v == 0.0:
            raise EvaluationError("sqrt is not differentiable at 0")
        if isinstance(x, Jet):
            return x._chain(f, 0.5 / f, -0.25 / (f * v))
        return x._chain(f, 0.5 / f)
    return f


def kink_max(values: Sequence, rel_tol: float = 1e-9):
    """Maximum of several scalars; jets are refused where the maximum is attained twice."""
    best = max(range(len(values)), key=lambda i: _value(values[i]))
    if isinstance(values[best], (Dual, Jet)):
        top = _value(values[best])
        for i, v in enumerate(values):
            if i != best and abs(top - _value(v)) <= rel_tol * max(abs(top), 1e-300):
                raise NonSmoothPoint(f"max is attained by several terms ({best + 1} and {i + 1})")
    return values[best]


@dataclass(frozen=True)
class Jet2:
    value: float
    grad: np.ndarray
    hess: np.ndarray
    order: int


def eval_jet(f: Callable, x, order: int = 2) -> Jet2:
    """Value, gradient and Hessian of ``f`` at ``x`` by forward-mode dual arithmetic.

    Orders not requested come back as zero arrays; ``Jet2.order`` records which
    parts are meaningful.
    """
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order}")
    xs = [float(v) for v in np.asarray(x, dtype=float).reshape(-1)]
    m = len(xs)
    if order == 0:
        try:
            value = float(f(xs))
        except (ZeroDivisionError, OverflowError, ValueError) as exc:
            raise EvaluationError(str(exc)) from exc
        return Jet2(value, np.zeros(m), np.zeros((m, m)), 0)
    eye = np.eye(m)
    seeds = [Jet(v, eye[i].copy(), np.zeros((m, m)) if order == 2 else None) for i, v in enumerate(xs)]
    try:
        out = f(seeds)
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise EvaluationError(str(exc)) from exc
    if not isinstance(out, Jet):
        return Jet2(float(out), np.zeros(m), np.zeros((m, m)), order)
    hess = out.hess if order == 2 else np.zeros((m, m))
    return Jet2(float(out.val), np.array(out.grad, dtype=float), np.array(hess, dtype=float), order)


def wirtinger_gradient(j: Jet2) -> np.ndarray:
    """``d/dz_j = (d/dx_j - i d/dy_j) / 2`` from a real gradient."""
    if j.order < 1:
        raise OrderTooLow("Wirtinger gradient needs a jet of order >= 1")
    g = np.asarray(j.grad, dtype=float)
    return 0.5 * (g[0::2] - 1j * g[1::2])


def levi_from_hessian(hess) -> np.ndarray:
    """Complex Hessian ``d^2 f / dz_j dzbar_k`` from the real 2n x 2n Hessian."""
    h = np.asarray(hess, dtype=float)
    hxx = h[0::2, 0::2]
    hyy = h[1::2, 1::2]
    hxy = h[0::2, 1::2]
    hyx = h[1::2, 0::2]
    levi = 0.25 * ((hxx + hyy) + 1j * (hxy - hyx))
    return 0.5 * (levi + levi.conj().T)


def levi_form(f: Callable, z) -> np.ndarray:
    return levi_from_hessian(eval_jet(f, z, 2).hess)


def _jacobi_eigenvalues(a: np.ndarray, tol: float, max_sweeps: int = 100) -> np.ndarray:
    """Cyclic Jacobi rotations on a real symmetric matrix; returns its eigenvalues."""
    a = np.array(a, dtype=float)
    m = a.shape[0]
    scale = np.linalg.norm(a)
    if scale == 0.0 or m == 1:
        return np.diag(a).copy()
    limit = tol * scale
    for _ in range(max_sweeps):
        off = np.abs(a - np.diag(np.diag(a))).max()
        if off < limit:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[p, q]
                if abs(apq) < limit * 1e-3:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
    else:
        raise ArithmeticError("Jacobi iteration did not converge")
    return np.diag(a).copy()


def eig_hermitian(h, tol: float = 1e-13, herm_tol: float = 1e-12) -> np.ndarray:
    """Sorted eigenvalues of a Hermitian matrix via its real symmetric embedding."""
    h = np.atleast_2d(np.asarray(h, dtype=complex))
    norm = np.linalg.norm(h)
    if np.linalg.norm(h - h.conj().T) > herm_tol * max(1.0, norm):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    a, b = h.real, h.imag
    emb = np.block([[a, -b], [b, a]])
    emb = 0.5 * (emb + emb.T)
    ev = np.sort(_jacobi_eigenvalues(emb, tol))
    # each eigenvalue of h appears twice in the embedding
    return ev[0::2]


def min_eig_hermitian(h, tol: float = 1e-13, herm_tol: float = 1e-12) -> float:
    return float(eig_hermitian(h, tol, herm_tol)[0])


def complex_tangent_basis(dz) -> np.ndarray:
    """Orthonormal basis (as columns, n x (n-1)) of ``{v : sum_j dz_j v_j = 0}``.

    Built from the complex Householder reflector that maps e1 onto the direction of
    ``conj(dz)``; its remaining columns span the orthogonal complement.
    """
    dz = np.asarray(dz, dtype=complex).reshape(-1)
    norm = np.linalg.norm(dz)
    if norm == 0.0 or not np.isfinite(norm):
        raise ZeroGradient("complex gradient vanishes; the point is not a regular boundary point")
    u = dz.conj() / norm
    n = u.size
    phase = u[0] / abs(u[0]) if abs(u[0]) > 0 else 1.0
    alpha = -phase
    v = u.copy()
    v[0] -= alpha
    vv = np.vdot(v, v).real
    q = np.eye(n, dtype=complex)
    if vv > 0:
        q -= 2.0 * np.outer(v, v.conj()) / vv
    return q[:, 1:]
