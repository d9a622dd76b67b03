"""Convex barycenter minimization by multi-start projected subgradient descent.

The objective  f(z) = E d(X, z)^p + E d(Y, z)^p  is convex for p >= 1 on the
linear space kinds, so the subgradient method with a diminishing step
schedule converges to the global minimum.  Starts are all support atoms, the
mixture mean, and the origin; every start is evaluated before any iteration,
so the reported value never exceeds the objective at any start.

The step schedule is s_k = s0 / sqrt(k) with s0 the diameter of the support,
applied to the normalized subgradient direction.  The schedule is run in
three warm-restarted sub-schedules with geometrically shrinking s0 (1, 1/30,
1/900 of the diameter) inside the per-start iteration budget; late-stage
oscillation of the plain schedule otherwise stalls around 1e-4 relative,
short of the 1e-6 solver target.  Runs are deterministic and the multi-start
reduction is an index-tie-broken min, independent of execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .distributions import Config, cross_moment, mean, mixture, self_moment
from .spaces import (
    INF,
    CMatrix,
    CVector,
    Point,
    RealLine,
    Schatten,
    Space,
    WeightedLq,
    atom_to_json,
    is_linear,
    pairwise_powered,
    validate_point,
    zero_point,
)

__all__ = ["BarycenterCert", "barycenter_objective", "minimize_barycenter",
           "mixture_draw_bound"]

_STAGES = ((0.4, 1.0), (0.3, 1.0 / 30.0), (0.3, 1.0 / 900.0))
_STALL_WINDOW = 400


@dataclass(frozen=True)
class BarycenterCert:
    """Certificate for one barycenter minimization."""

    z_star: Point
    value: float
    iterations: int
    starts: int
    best_start: str

    def to_json(self, space: Optional[Space] = None) -> dict:
        out = {
            "value": self.value,
            "iterations": self.iterations,
            "starts": self.starts,
            "best_start": self.best_start,
        }
        if space is not None:
            out["z_star"] = atom_to_json(space, self.z_star)
        return out


def barycenter_objective(config: Config, z: Point) -> float:
    """E d(X, z)^p + E d(Y, z)^p as an exact finite sum."""
    validate_point(config.space, z)
    cx = pairwise_powered(config.space, config.X.atoms, [z], config.p)[:, 0]
    cy = pairwise_powered(config.space, config.Y.atoms, [z], config.p)[:, 0]
    return float(config.X.probs @ cx + config.Y.probs @ cy)


def mixture_draw_bound(config: Config) -> float:
    """Value of the barycenter objective in expectation over z drawn from the
    mixture of the two laws:  (E d(X,X')^p + E d(Y,Y')^p) / 2 + E d(X,Y)^p.

    This is the admissible-z bound used in the non-convex range p < 1, where
    subgradient optimization has no convergence guarantee.
    """
    return 0.5 * (self_moment(config.X, config.p) + self_moment(config.Y, config.p)) \
        + cross_moment(config.X, config.Y, config.p)


# --------------------------------------------------------------------------
# Problem adapters: batched objective / subgradient over starts
# --------------------------------------------------------------------------

class _LqProblem:
    """Weighted l_q objective with analytic subgradients, batched over starts.

    Subgradient selections at nonsmooth points: tied coordinates contribute a
    zero component (q = 1 and coinciding coordinates, q < 2 at zeros); for
    q = inf the first maximizing coordinate wins, ties broken by index.
    """

    def __init__(self, config: Config):
        space = config.space
        if isinstance(space, RealLine):
            atoms = [np.array([complex(a)]) for a in
                     list(config.X.atoms) + list(config.Y.atoms)]
            self.weights = np.ones(1)
            self.q = 2.0
            self._real_line = True
        else:
            pts = list(config.X.atoms) + list(config.Y.atoms)
            atoms = [a.entries for a in pts]
            self.weights = pts[0].weights
            self.q = space.q
            self._real_line = False
        self.atoms = np.stack(atoms)                       # (A, d)
        self.coeffs = np.concatenate([config.X.probs, config.Y.probs])
        self.p = config.p
        self.space = space
        self.zero_sum = config.zero_sum

    def flatten(self, pt: Point) -> np.ndarray:
        if self._real_line:
            return np.array([complex(pt)])
        return np.asarray(pt.entries, dtype=complex)

    def unflatten(self, z: np.ndarray) -> Point:
        if self._real_line:
            return float(z[0].real)
        return CVector(z.copy(), self.weights)

    def project(self, z: np.ndarray) -> np.ndarray:
        if self.zero_sum:
            return z - z.mean(axis=-1, keepdims=True)
        return z

    def value_and_subgrad(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        q, p, w = self.q, self.p, self.weights
        u = z[:, None, :] - self.atoms[None, :, :]         # (S, A, d)
        absu = np.abs(u)
        if q == INF:
            mask = w > 0
            masked = np.where(mask, absu, -1.0)
            d = masked.max(axis=-1)                        # (S, A)
            f = (d ** p) @ self.coeffs
            k = masked.argmax(axis=-1)                     # first max index
            u_at = np.take_along_axis(u, k[:, :, None], axis=-1)[:, :, 0]
            au = np.abs(u_at)
            phase = np.where(au > 0, u_at / np.where(au > 0, au, 1.0), 0.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                coef = np.where(d > 0, p * d ** (p - 1.0), 0.0) * self.coeffs
            g = np.zeros_like(z)
            s_idx = np.repeat(np.arange(z.shape[0]), k.shape[1])
            np.add.at(g, (s_idx, k.ravel()), (coef * phase).ravel())
            return f, g
        with np.errstate(divide="ignore", invalid="ignore"):
            sq = (absu ** q * w).sum(axis=-1)              # (S, A)
            f = (sq ** (p / q)) @ self.coeffs
            d = sq ** (1.0 / q)
            coef = np.where(d > 0, p * d ** (p - q), 0.0) * self.coeffs
            if q == 1.0:
                core = np.where(absu > 0, u / np.where(absu > 0, absu, 1.0), 0.0) * w
            else:
                core = np.where(absu > 0, absu ** (q - 2.0), 0.0) * u * w
        g = (coef[:, :, None] * core).sum(axis=1)
        return f, g


class _NumericProblem:
    """Finite-difference fallback for Schatten and parallelogram objectives.

    Iterates live on flattened real coordinates; central differences supply
    an approximate subgradient (the objectives are differentiable off a
    measure-zero set).
    """

    _H = 1e-6

    def __init__(self, config: Config):
        if config.zero_sum:
            raise ValueError("zero_sum constraint is only supported on "
                             "WeightedLq configurations")
        self.config = config
        self.space = config.space
        self._matrix = isinstance(config.space, Schatten)
        pts = list(config.X.atoms) + list(config.Y.atoms)
        self._template = pts[0]
        self.atoms = pts
        self.coeffs = np.concatenate([config.X.probs, config.Y.probs])

    def flatten(self, pt: Point) -> np.ndarray:
        e = pt.entries.ravel()
        return np.concatenate([e.real, e.imag])

    def unflatten(self, z: np.ndarray) -> Point:
        half = z.size // 2
        e = z[:half] + 1j * z[half:]
        if self._matrix:
            m = self._template.dim
            return CMatrix(e.reshape(m, m))
        return CVector(e, self._template.weights)

    def project(self, z: np.ndarray) -> np.ndarray:
        return z

    def _values(self, zbatch: np.ndarray) -> np.ndarray:
        pts = [self.unflatten(row) for row in zbatch]
        m = pairwise_powered(self.space, self.atoms, pts, self.config.p)
        return self.coeffs @ m

    def value_and_subgrad(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        f = self._values(z)
        s, dim = z.shape
        g = np.empty_like(z)
        for c in range(dim):
            zp = z.copy()
            zm = z.copy()
            zp[:, c] += self._H
            zm[:, c] -= self._H
            g[:, c] = (self._values(zp) - self._values(zm)) / (2.0 * self._H)
        return f, g


def _grad_norms(g: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(g):
        return np.sqrt((np.abs(g) ** 2).sum(axis=-1))
    return np.sqrt((g ** 2).sum(axis=-1))


# --------------------------------------------------------------------------
# Driver
# --------------------------------------------------------------------------

def _support_diameter(config: Config) -> float:
    pts = list(config.X.atoms) + list(config.Y.atoms)
    d = pairwise_powered(config.space, pts, pts, 1.0)
    return float(d.max())


def minimize_barycenter(config: Config,
                        max_iters_per_start: int = 50_000) -> BarycenterCert:
    """Minimize E d(X, z)^p + E d(Y, z)^p over z (p >= 1, linear spaces).

    Multi-start projected subgradient descent; starts are all atoms of X and
    Y, the mixture mean, and the origin.  The reported value is the exact
    objective at the best point visited, hence never above the objective at
    any start, and by convexity the iteration converges to the global
    minimum.  ``config.zero_sum`` restricts iterates to the zero-coordinate-
    sum hyperplane (Euclidean projection).
    """
    if config.p < 1.0:
        raise ValueError("minimize_barycenter requires p >= 1; use "
                         "mixture_draw_bound for the non-convex range")
    if not is_linear(config.space):
        raise TypeError("minimize_barycenter needs a linear space kind")

    if isinstance(config.space, (WeightedLq, RealLine)):
        problem = _LqProblem(config)
    else:
        problem = _NumericProblem(config)

    mix_mean = mean(mixture(config.X, config.Y))
    labels: List[str] = []
    start_pts: List[Point] = []
    for i, a in enumerate(list(config.X.atoms) + list(config.Y.atoms)):
        labels.append(f"atom:{i}")
        start_pts.append(a)
    labels.append("mixture_mean")
    start_pts.append(mix_mean)
    labels.append("zero")
    start_pts.append(zero_point(config.space, start_pts[0]))

    z = np.stack([problem.flatten(pt) for pt in start_pts])
    z = problem.project(z)
    n_starts = z.shape[0]

    f0, _ = problem.value_and_subgrad(z)
    f_best = f0.copy()
    z_best = z.copy()

    diam = _support_diameter(config)
    iterations = 0
    if diam > 0.0:
        g_best = float(f_best.min())
        z_cur = z.copy()
        for frac, fac in _STAGES:
            k_max = max(1, int(frac * max_iters_per_start))
            s0 = diam * fac
            last_progress = 0
            for k in range(1, k_max + 1):
                f, g = problem.value_and_subgrad(z_cur)
                improved = f < f_best
                if improved.any():
                    f_best = np.where(improved, f, f_best)
                    z_best[improved] = z_cur[improved]
                new_best = float(f_best.min())
                if new_best < g_best - max(1e-15, 1e-12 * abs(g_best)):
                    g_best = new_best
                    last_progress = k
                elif new_best < g_best:
                    g_best = new_best
                iterations += 1
                if k - last_progress > _STALL_WINDOW:
                    break
                gn = _grad_norms(g)
                step = s0 / math.sqrt(k)
                safe = np.where(gn > 0, gn, 1.0)
                z_cur = problem.project(z_cur - step * (g / safe[:, None]))
            z_cur = z_best.copy()

    best_idx = int(np.argmin(f_best))
    z_star = problem.unflatten(z_best[best_idx])
    value = barycenter_objective(config, z_star)
    return BarycenterCert(
        z_star=z_star,
        value=value,
        iterations=iterations,
        starts=n_starts,
        best_start=labels[best_idx],
    )
