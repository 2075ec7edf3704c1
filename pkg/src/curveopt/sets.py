"""Convex feasible sets: constraint values, gradients and Euclidean projection.

Four shipped configurations, addressable by short name:

  sph  -- hyper-sphere          ||x||^2 - 100 <= 0
  ell  -- hyper-ellipsoid       (x-c)^T P^-1 (x-c) - 25 <= 0, c = ones,
                                P a seeded positive definite diagonal matrix
  com  -- sphere + halfspace + box intersection
  box  -- coordinate bounds     lo <= x_i <= hi (default [-1, 1])

Projection onto sph/box is closed form; ell uses 1-D root finding on the
KKT multiplier; com uses Dykstra's alternating projections.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ProjectionError

Vector = np.ndarray

#: slack for every floating-point "g_i <= 0" feasibility check
FEAS_TOL = 1e-8

_ELL_ROOT_TOL = 1e-10
_ELL_MAX_ITERS = 200
_DYKSTRA_TOL = 1e-10
_DYKSTRA_MAX_SWEEPS = 100000


@dataclass(frozen=True)
class ConvexFeasibleSet:
    """Constraint oracle plus Euclidean projection for a convex set."""

    name: str
    dim: int
    num_constraints: int
    eval_g: Callable[[Vector], Vector] = field(repr=False)
    eval_g_grad: Callable[[Vector, int], Vector] = field(repr=False)
    project: Callable[[Vector], Vector] = field(repr=False)

    def g(self, x: Vector) -> Vector:
        return np.asarray(self.eval_g(np.asarray(x, dtype=float)), dtype=float)

    def g_grad(self, x: Vector, i: int) -> Vector:
        return np.asarray(self.eval_g_grad(np.asarray(x, dtype=float), i), dtype=float)

    def max_violation(self, x: Vector) -> float:
        return float(np.max(self.g(x)))

    def contains(self, x: Vector, tol: float = FEAS_TOL) -> bool:
        return self.max_violation(x) <= tol


@dataclass(frozen=True)
class ActiveSetQuery:
    """Indices of constraints within eps of being tight at a point."""

    point: Vector
    tolerance: float
    result: frozenset[int]


def active_set(fset: ConvexFeasibleSet, x: Vector, eps: float) -> ActiveSetQuery:
    """Constraints with g_i(x) >= -eps."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    g = fset.g(x)
    idx = frozenset(int(i) for i in np.flatnonzero(g >= -eps))
    return ActiveSetQuery(point=np.array(x, dtype=float), tolerance=eps, result=idx)


# ---------------------------------------------------------------------------
# sphere


def make_sphere(n: int, center: Vector | None = None, radius: float = 10.0) -> ConvexFeasibleSet:
    c = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    r2 = radius * radius

    def g(x):
        return np.array([float(np.dot(x - c, x - c)) - r2])

    def g_grad(x, i):
        return 2.0 * (x - c)

    def project(x):
        d = x - c
        nrm = float(np.linalg.norm(d))
        if nrm <= radius:
            return np.array(x, dtype=float)
        return c + (radius / nrm) * d

    return ConvexFeasibleSet("sph", n, 1, g, g_grad, project)


# ---------------------------------------------------------------------------
# box


def make_box(n: int, lo: float = -1.0, hi: float = 1.0) -> ConvexFeasibleSet:
    """Bounds as 2n affine constraints: x_i - hi <= 0, then lo - x_i <= 0."""
    if lo >= hi:
        raise ValueError("lo must be < hi")

    def g(x):
        return np.concatenate([x - hi, lo - x])

    def g_grad(x, i):
        e = np.zeros(n)
        if i < n:
            e[i] = 1.0
        else:
            e[i - n] = -1.0
        return e

    def project(x):
        return np.clip(x, lo, hi)

    return ConvexFeasibleSet("box", n, 2 * n, g, g_grad, project)


# ---------------------------------------------------------------------------
# ellipsoid


def make_ellipsoid(
    n: int,
    center: Vector | None = None,
    p_diag: Vector | None = None,
    seed: int = 0,
    rhs: float = 25.0,
) -> ConvexFeasibleSet:
    """{x : sum_i (x_i - c_i)^2 / p_i <= rhs}, with c = ones by default.

    When p_diag is omitted, the diagonal entries are drawn uniformly from
    [0.5, 2.0] using the given seed, so the same (n, seed) pair always
    yields the same set.
    """
    c = np.ones(n) if center is None else np.asarray(center, dtype=float)
    if p_diag is None:
        rng = np.random.default_rng(seed)
        p = rng.uniform(0.5, 2.0, size=n)
    else:
        p = np.asarray(p_diag, dtype=float)
    if np.any(p <= 0):
        raise ValueError("p_diag entries must be positive")

    def g(x):
        d = x - c
        return np.array([float(np.sum(d * d / p)) - rhs])

    def g_grad(x, i):
        return 2.0 * (x - c) / p

    def project(z):
        z = np.asarray(z, dtype=float)
        if g(z)[0] <= 0.0:
            return np.array(z)
        d = z - c
        # KKT of min ||x - z||^2 s.t. g(x) <= 0:  x(lam) = c + p d / (p + 2 lam)
        def phi(lam):
            w = p * d / (p + 2.0 * lam)
            return float(np.sum(w * w / p)) - rhs

        lo, hi = 0.0, 1.0
        it = 0
        while phi(hi) > 0.0:
            lo, hi = hi, 2.0 * hi
            it += 1
            if it > _ELL_MAX_ITERS:
                raise ProjectionError("ellipsoid projection: bracketing failed")
        lam = 0.5 * (lo + hi)
        for it in range(_ELL_MAX_ITERS):
            val = phi(lam)
            if abs(val) <= _ELL_ROOT_TOL:
                break
            if val > 0.0:
                lo = lam
            else:
                hi = lam
            # Newton step on phi, safeguarded by the bracket
            w = p + 2.0 * lam
            dphi = float(np.sum(-4.0 * p * d * d / w**3))
            lam_newton = lam - val / dphi if dphi != 0.0 else lam
            if lo < lam_newton < hi:
                lam = lam_newton
            else:
                lam = 0.5 * (lo + hi)
        else:
            raise ProjectionError("ellipsoid projection: root finder did not converge")
        return c + p * d / (p + 2.0 * lam)

    return ConvexFeasibleSet("ell", n, 1, g, g_grad, project)


# ---------------------------------------------------------------------------
# composite: sphere + halfspace + box, projected via Dykstra


def make_composite(n: int) -> ConvexFeasibleSet:
    """||x - c||^2 <= 100 (c = 4*ones), w^T x <= 5 (w = ones/n), -5 <= x_i <= 10."""
    c = np.full(n, 4.0)
    w = np.full(n, 1.0 / n)
    wn2 = float(np.dot(w, w))
    lo, hi = -5.0, 10.0
    radius = 10.0

    def g(x):
        head = np.array(
            [float(np.dot(x - c, x - c)) - 100.0, float(np.dot(w, x)) - 5.0]
        )
        return np.concatenate([head, x - hi, lo - x])

    def g_grad(x, i):
        if i == 0:
            return 2.0 * (x - c)
        if i == 1:
            return np.array(w)
        e = np.zeros(n)
        if i < 2 + n:
            e[i - 2] = 1.0
        else:
            e[i - 2 - n] = -1.0
        return e

    def proj_sphere(x):
        d = x - c
        nrm = float(np.linalg.norm(d))
        if nrm <= radius:
            return x
        return c + (radius / nrm) * d

    def proj_halfspace(x):
        viol = float(np.dot(w, x)) - 5.0
        if viol <= 0.0:
            return x
        return x - (viol / wn2) * w

    def proj_box(x):
        return np.clip(x, lo, hi)

    pieces = (proj_sphere, proj_halfspace, proj_box)

    def project(z):
        x = np.array(z, dtype=float)
        incs = [np.zeros(n) for _ in pieces]
        for _ in range(_DYKSTRA_MAX_SWEEPS):
            x_old = x
            for j, proj in enumerate(pieces):
                y = x + incs[j]
                x = proj(y)
                incs[j] = y - x
            if float(np.linalg.norm(x - x_old)) <= _DYKSTRA_TOL:
                return x
        raise ProjectionError("composite projection: Dykstra sweep cap reached")

    return ConvexFeasibleSet("com", n, 2 * n + 2, g, g_grad, project)


# ---------------------------------------------------------------------------
# registry

SET_NAMES = ("sph", "ell", "com", "box")


def make_set(name: str, n: int, ell_seed: int = 0) -> ConvexFeasibleSet:
    """Build one of the four shipped sets for ambient dimension n."""
    if name == "sph":
        return make_sphere(n)
    if name == "ell":
        return make_ellipsoid(n, seed=ell_seed)
    if name == "com":
        return make_composite(n)
    if name == "box":
        return make_box(n)
    raise KeyError(f"unknown set {name!r}; known: {SET_NAMES}")
