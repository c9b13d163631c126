"""Affine parameter paths and analytic entropy derivatives along them.

The central objects are the mixture sequences g (built from leave-one-out
pmfs) and h (from leave-two-out pmfs): the first two t-derivatives of the
mass function along an affine path are shifted differences of g and h, and
the entropy curvature follows from them in closed form. Natural logarithms
throughout; entropies are in nats.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryError
from .pmf import ParamVector, Pmf, leave_structures

__all__ = [
    "AffinePath",
    "HessianReport",
    "PathDerivatives",
    "compute_g",
    "compute_h",
    "entropy_curvature",
    "entropy_hessian",
    "entropy_second_derivative_analytic",
    "jacobi_eigenvalues",
    "path_at",
    "path_derivatives",
    "pmf_second_time_derivative",
    "pmf_time_derivative",
    "shannon_entropy",
]


def _check_slopes(params: ParamVector, slopes) -> np.ndarray:
    arr = np.asarray(slopes, dtype=np.float64)
    if arr.shape != (params.n,):
        raise ValueError(f"expected {params.n} slopes, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("slopes must be finite")
    return arr


def _max_feasible_domain(p: np.ndarray, slopes: np.ndarray) -> tuple[float, float]:
    lo, hi = -math.inf, math.inf
    for pi, si in zip(p, slopes):
        if si > 0.0:
            lo = max(lo, -pi / si)
            hi = min(hi, (1.0 - pi) / si)
        elif si < 0.0:
            lo = max(lo, (1.0 - pi) / si)
            hi = min(hi, -pi / si)
    # Division rounding can push a finite endpoint a few ulps outside the cube.
    if math.isfinite(hi):
        for _ in range(8):
            if np.all((p + hi * slopes >= 0.0) & (p + hi * slopes <= 1.0)):
                break
            hi = math.nextafter(hi, lo)
    if math.isfinite(lo):
        for _ in range(8):
            if np.all((p + lo * slopes >= 0.0) & (p + lo * slopes <= 1.0)):
                break
            lo = math.nextafter(lo, hi)
    return lo, hi


@dataclass(frozen=True, eq=False)
class AffinePath:
    """Path p(t) = p0 + t * slopes inside the parameter cube.

    With t_domain=None the maximal feasible closed interval is used.
    """

    p0: ParamVector
    slopes: np.ndarray
    t_domain: tuple[float, float] | None = None

    def __post_init__(self):
        slopes = _check_slopes(self.p0, self.slopes).copy()
        slopes.setflags(write=False)
        object.__setattr__(self, "slopes", slopes)
        dom = self.t_domain
        if dom is None:
            dom = _max_feasible_domain(self.p0.p, slopes)
        lo, hi = float(dom[0]), float(dom[1])
        if not lo <= hi:
            raise ValueError("t_domain is empty")
        for t in (lo, hi):
            if math.isinf(t):
                continue
            q = self.p0.p + t * slopes
            if np.any(q < 0.0) or np.any(q > 1.0):
                raise ValueError("t_domain leaves the parameter cube")
        object.__setattr__(self, "t_domain", (lo, hi))


def path_at(path: AffinePath, t: float) -> ParamVector:
    """Parameters at path position t."""
    lo, hi = path.t_domain
    if not lo <= t <= hi:
        raise ValueError(f"t={t!r} outside the path domain [{lo!r}, {hi!r}]")
    q = path.p0.p + t * path.slopes
    # Repair last-ulp rounding spill; anything larger is a genuine domain bug.
    tiny = 8.0 * np.finfo(np.float64).eps
    q = np.where((q > 1.0) & (q <= 1.0 + tiny), 1.0, q)
    q = np.where((q < 0.0) & (q >= -tiny), 0.0, q)
    return ParamVector(q)


@dataclass(frozen=True, eq=False)
class PathDerivatives:
    """Mixture sequences g (length n) and h (length n-1) attached to a (p, p') pair."""

    g: np.ndarray
    h: np.ndarray


def _fgh(params: ParamVector, slopes: np.ndarray):
    """Full pmf plus the g and h sequences, from one leave-structures pass."""
    ls = leave_structures(params)
    n = params.n
    g = np.zeros(n)
    for i in range(n):
        si = slopes[i]
        if si != 0.0:
            g += si * ls.singles[i]
    h = np.zeros(max(n - 1, 0))
    for (i, j), fij in ls.pairs.items():
        c = slopes[i] * slopes[j]
        if c != 0.0:
            h += (2.0 * c) * fij  # ordered pairs: (i,j) and (j,i) both contribute
    return ls.f, g, h


def path_derivatives(params: ParamVector, slopes) -> PathDerivatives:
    """g_k = sum_i p_i' f^(i)_k and h_k = sum_{i != j} p_i' p_j' f^(i,j)_k."""
    slopes = _check_slopes(params, slopes)
    _, g, h = _fgh(params, slopes)
    return PathDerivatives(g=g, h=h)


def compute_g(params: ParamVector, slopes) -> np.ndarray:
    """First-order mixture sequence, length n; linear in the slopes."""
    return path_derivatives(params, slopes).g


def compute_h(params: ParamVector, slopes) -> np.ndarray:
    """Second-order mixture sequence, length n-1 (empty for n=1); quadratic in the slopes."""
    return path_derivatives(params, slopes).h


def _shift_diff1(g: np.ndarray, n: int) -> np.ndarray:
    """Length n+1 sequence g_{k-1} - g_k with zero padding outside {0..n-1}."""
    pad = np.zeros(n + 2)
    pad[1 : n + 1] = g
    return pad[0 : n + 1] - pad[1 : n + 2]


def _shift_diff2(h: np.ndarray, n: int) -> np.ndarray:
    """Length n+1 sequence h_k - 2 h_{k-1} + h_{k-2} with zero padding outside {0..n-2}."""
    pad = np.zeros(n + 3)
    if n >= 1:
        pad[2 : n + 1] = h
    return pad[2 : n + 3] - 2.0 * pad[1 : n + 2] + pad[0 : n + 1]


def pmf_time_derivative(path: AffinePath, t: float) -> np.ndarray:
    """d f_k / dt along the path, length n+1; telescopes to zero."""
    params = path_at(path, t)
    _, g, _ = _fgh(params, path.slopes)
    return _shift_diff1(g, params.n)


def pmf_second_time_derivative(path: AffinePath, t: float) -> np.ndarray:
    """d^2 f_k / dt^2 along the path, length n+1; telescopes to zero."""
    params = path_at(path, t)
    _, _, h = _fgh(params, path.slopes)
    return _shift_diff2(h, params.n)


def shannon_entropy(f) -> float:
    """Entropy in nats; zero masses contribute zero."""
    v = f.values if isinstance(f, Pmf) else np.asarray(f, dtype=np.float64)
    pos = v[v > 0.0]
    return float(-(pos * np.log(pos)).sum())


def _require_interior(params: ParamVector, margin: float) -> None:
    if margin < 0.0 or margin >= 0.5:
        raise ValueError("interior margin must lie in [0, 0.5)")
    if margin > 0.0 and (np.any(params.p < margin) or np.any(params.p > 1.0 - margin)):
        raise BoundaryError(f"parameters must lie in [{margin}, {1.0 - margin}]")


def entropy_curvature(params: ParamVector, slopes, interior_margin: float = 0.0) -> float:
    """Second t-derivative of the entropy at the point (p, p').

    Where a mass is exactly zero its terms must vanish too; otherwise the
    curvature is not defined there and a BoundaryError is raised.
    """
    slopes = _check_slopes(params, slopes)
    _require_interior(params, interior_margin)
    f, g, h = _fgh(params, slopes)
    n = params.n
    df = _shift_diff1(g, n)
    d2f = _shift_diff2(h, n)
    pos = f > 0.0
    if not pos.all():
        dead = ~pos
        if np.any(df[dead] != 0.0) or np.any(d2f[dead] != 0.0):
            raise BoundaryError(
                "zero mass with active derivative terms; evaluate at an interior point"
            )
    fk = f[pos]
    return float(-(df[pos] ** 2 / fk).sum() - ((np.log(fk) + 1.0) * d2f[pos]).sum())


def entropy_second_derivative_analytic(
    path: AffinePath, t: float, interior_margin: float = 0.0
) -> float:
    """Analytic H''(t) along the path; agrees with centered finite differences."""
    return entropy_curvature(path_at(path, t), path.slopes, interior_margin)


def _jacobi_rotate(a: np.ndarray, p: int, q: int, c: float, s: float, t: float) -> None:
    app, aqq, apq = a[p, p], a[q, q], a[p, q]
    new_p = c * a[:, p] - s * a[:, q]
    new_q = s * a[:, p] + c * a[:, q]
    a[:, p] = new_p
    a[p, :] = new_p
    a[:, q] = new_q
    a[q, :] = new_q
    a[p, p] = app - t * apq
    a[q, q] = aqq + t * apq
    a[p, q] = 0.0
    a[q, p] = 0.0


def jacobi_eigenvalues(matrix, off_tol: float = 1e-12, max_sweeps: int = 30) -> np.ndarray:
    """Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations, ascending.

    Sweeps until the off-diagonal norm falls below off_tol, with a relative
    floor because an absolute target below float64 resolution of the matrix
    norm would never be reached.
    """
    a = np.array(matrix, dtype=np.float64, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    n = a.shape[0]
    if n == 1:
        return a[0, :1].copy()
    stop = max(off_tol, 1e-15 * float(np.sqrt((a * a).sum())))
    for _ in range(max_sweeps):
        off = math.sqrt(2.0 * float((np.triu(a, 1) ** 2).sum()))
        if off <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = 0.5 * (a[q, q] - a[p, p]) / apq
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                _jacobi_rotate(a, p, q, c, t * c, t)
    return np.sort(np.diagonal(a).copy())


@dataclass(frozen=True, eq=False)
class HessianReport:
    """Second-derivative matrix of the entropy over the parameter cube."""

    matrix: np.ndarray
    max_eigenvalue: float
    psd_margin: float

    def to_dict(self) -> dict:
        return {
            "matrix": [[float(v) for v in row] for row in self.matrix],
            "max_eigenvalue": self.max_eigenvalue,
            "psd_margin": self.psd_margin,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def entropy_hessian(params: ParamVector) -> HessianReport:
    """Full Hessian of the entropy in the parameters, at a strictly interior point.

    Mixed second partials come from leave-two-out pmfs; pure ones vanish
    because each mass is affine in any single parameter. The top eigenvalue
    is found with the cyclic Jacobi sweep above.
    """
    p = params.p
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise BoundaryError("Hessian requires parameters strictly inside (0, 1)")
    n = params.n
    ls = leave_structures(params)
    f = ls.f
    u2 = 1.0 / f
    u1 = np.log(f) + 1.0
    d = np.empty((n, n + 1))
    for i in range(n):
        d[i] = _shift_diff1(ls.singles[i], n)
    m = -(d * u2) @ d.T
    for (i, j), fij in ls.pairs.items():
        cross = -float((u1 * _shift_diff2(fij, n)).sum())
        m[i, j] += cross
        m[j, i] += cross
    m = 0.5 * (m + m.T)
    m.setflags(write=False)
    top = float(jacobi_eigenvalues(m)[-1])
    return HessianReport(matrix=m, max_eigenvalue=top, psd_margin=-top)
