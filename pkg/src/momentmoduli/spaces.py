"""Normed and metric spaces over concrete finite-dimensional point types.

Every distance used anywhere in this package is computed here.  Supported
space kinds:

* ``WeightedLq(q)``   -- complex vectors with nonnegative coordinate weights
  under the weighted l_q norm (``q = inf`` means the weighted sup norm, i.e.
  the max over coordinates of positive weight).  Weights are the atom masses
  of an underlying finite measure space, so this realizes L_q of any finite
  measure space exactly.
* ``Schatten(q)``     -- square complex matrices under the Schatten-q norm
  (l_q norm of the singular values).
* ``ParallelogramS1(n)`` -- points of C^{2n} under the closed-form trace-norm
  distance ``(sqrt(|c|^2 + 2*Lambda(c)) + sqrt(|c|^2 - 2*Lambda(c))) / 2``
  where ``Lambda(c)`` is the area of the parallelogram spanned by the real
  and imaginary parts of ``c``.
* ``Snowflake(base, alpha)`` -- the metric transform d -> d**alpha.
* ``BipartiteGraph(n)``  -- the complete bipartite graph K_{n,n} with its
  shortest-path metric (0 / 1 / 2).
* ``RealLine``        -- scalars under the absolute value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

__all__ = [
    "SpaceMismatchError",
    "CVector",
    "CMatrix",
    "GraphVertex",
    "WeightedLq",
    "Schatten",
    "ParallelogramS1",
    "Snowflake",
    "BipartiteGraph",
    "RealLine",
    "Space",
    "lq_norm",
    "schatten_norm",
    "hermitian_eigenvalues",
    "lambda_area",
    "parallelogram_s1_distance",
    "distance",
    "pairwise_powered",
    "is_linear",
    "validate_point",
    "mean_point",
    "scale_point",
    "shift_point",
    "space_to_json",
    "space_from_json",
    "atom_to_json",
    "atom_from_json",
]

INF = float("inf")


class SpaceMismatchError(TypeError):
    """A point does not belong to the space it was used with."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


# --------------------------------------------------------------------------
# Point types
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CVector:
    """Complex vector with nonnegative per-coordinate weights.

    Equality and hashing are exact (bit-level on the underlying arrays):
    atom deduplication elsewhere must not be fuzzy.
    """

    entries: np.ndarray
    weights: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        # copy on construction: freezing a caller-owned array in place would
        # leak the read-only flag back to the caller
        e = np.array(self.entries, dtype=complex)
        if e.ndim != 1 or e.size == 0:
            raise ValueError("CVector needs at least one entry in a 1-d array")
        if not np.all(np.isfinite(e.real)) or not np.all(np.isfinite(e.imag)):
            raise ValueError("CVector entries must be finite")
        if self.weights is None:
            w = np.ones(e.size)
        else:
            w = np.array(self.weights, dtype=float)
        if w.shape != e.shape:
            raise ValueError("weights must match entries in length")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be finite and nonnegative")
        object.__setattr__(self, "entries", _readonly(e))
        object.__setattr__(self, "weights", _readonly(w))

    @property
    def dim(self) -> int:
        return self.entries.size

    @classmethod
    def basis(cls, k: int, dim: int, scale: complex = 1.0,
              weights: Optional[np.ndarray] = None) -> "CVector":
        e = np.zeros(dim, dtype=complex)
        e[k] = scale
        return cls(e, weights)

    @classmethod
    def zeros(cls, dim: int, weights: Optional[np.ndarray] = None) -> "CVector":
        return cls(np.zeros(dim, dtype=complex), weights)

    def __sub__(self, other: "CVector") -> "CVector":
        if not isinstance(other, CVector):
            return NotImplemented
        if not np.array_equal(self.weights, other.weights):
            raise ValueError("CVector subtraction requires identical weights")
        return CVector(self.entries - other.entries, self.weights)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, CVector)
            and np.array_equal(self.entries, other.entries)
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self) -> int:
        return hash((self.entries.tobytes(), self.weights.tobytes()))


@dataclass(frozen=True, eq=False)
class CMatrix:
    """Square complex matrix (a Schatten-class element at desk scale)."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValueError("CMatrix must be square and nonempty")
        if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
            raise ValueError("CMatrix entries must be finite")
        object.__setattr__(self, "entries", _readonly(a))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __sub__(self, other: "CMatrix") -> "CMatrix":
        if not isinstance(other, CMatrix):
            return NotImplemented
        return CMatrix(self.entries - other.entries)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CMatrix) and np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash(self.entries.tobytes())


@dataclass(frozen=True)
class GraphVertex:
    """Vertex of a complete bipartite graph: side 'L' or 'R' plus an index."""

    side: str
    index: int

    def __post_init__(self) -> None:
        if self.side not in ("L", "R"):
            raise ValueError("side must be 'L' or 'R'")
        if self.index < 0:
            raise ValueError("index must be nonnegative")


Point = Union[CVector, CMatrix, GraphVertex, float]


# --------------------------------------------------------------------------
# Space kinds
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightedLq:
    q: float

    def __post_init__(self) -> None:
        if not (self.q >= 1.0):
            raise ValueError("WeightedLq requires q >= 1 (q = inf allowed)")


@dataclass(frozen=True)
class Schatten:
    q: float

    def __post_init__(self) -> None:
        if not (1.0 <= self.q < INF):
            raise ValueError("Schatten requires 1 <= q < inf")


@dataclass(frozen=True)
class ParallelogramS1:
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("ParallelogramS1 requires n >= 1")


@dataclass(frozen=True)
class Snowflake:
    base: "Space"
    alpha: float

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError("Snowflake requires alpha in (0, 1]")


@dataclass(frozen=True)
class BipartiteGraph:
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("BipartiteGraph requires n >= 1")


@dataclass(frozen=True)
class RealLine:
    pass


Space = Union[WeightedLq, Schatten, ParallelogramS1, Snowflake, BipartiteGraph, RealLine]

_LINEAR_KINDS = (WeightedLq, Schatten, ParallelogramS1, RealLine)


def is_linear(space: Space) -> bool:
    """True for kinds supporting vector operations (means, barycenters)."""
    return isinstance(space, _LINEAR_KINDS)


# --------------------------------------------------------------------------
# Norms
# --------------------------------------------------------------------------

def lq_norm(x: CVector, q: float) -> float:
    """Weighted l_q norm (sum_k w_k |x_k|^q)^(1/q); q = inf gives the max of
    |x_k| over coordinates with positive weight."""
    if not (q >= 1.0):
        raise ValueError("lq_norm requires q >= 1")
    if q == INF:
        mask = x.weights > 0
        if not mask.any():
            raise ValueError("sup norm needs at least one positive weight")
        return float(np.abs(x.entries[mask]).max())
    s = float((np.abs(x.entries) ** q * x.weights).sum())
    return s ** (1.0 / q)


def hermitian_eigenvalues(h: np.ndarray, tol: float = 1e-12,
                          max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a complex Hermitian matrix by cyclic Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius mass drops below
    ``tol * max(1, ||h||_F)``.  Quadratic convergence makes ~6 sweeps typical
    at desk scale (m <= 64).
    """
    a = np.array(h, dtype=complex)
    m = a.shape[0]
    if m == 1:
        return np.array([a[0, 0].real])
    scale = max(1.0, math.sqrt(float((np.abs(a) ** 2).sum())))
    skip = 1e-300 * scale
    for _ in range(max_sweeps):
        m2 = np.abs(a) ** 2
        np.fill_diagonal(m2, 0.0)  # sum only off-diagonal mass: no cancellation
        if math.sqrt(float(m2.sum())) <= tol * scale:
            break
        for i in range(m - 1):
            for j in range(i + 1, m):
                b = a[i, j]
                ab = abs(b)
                if ab <= skip:
                    continue
                phase = b / ab
                tau = (a[j, j].real - a[i, i].real) / (2.0 * ab)
                if abs(tau) > 1e150:
                    t = 1.0 / (2.0 * tau)
                elif tau >= 0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_i = a[:, i].copy()
                col_j = a[:, j].copy()
                a[:, i] = c * col_i - s * np.conj(phase) * col_j
                a[:, j] = s * phase * col_i + c * col_j
                row_i = a[i, :].copy()
                row_j = a[j, :].copy()
                a[i, :] = c * row_i - s * phase * row_j
                a[j, :] = s * np.conj(phase) * row_i + c * row_j
    else:
        raise RuntimeError("Jacobi eigensolver failed to converge")
    return np.real(np.diag(a)).copy()


def schatten_norm(a: CMatrix, q: float) -> float:
    """Schatten-q norm: l_q norm of the singular values of ``a``.

    Singular values come from the Hermitian eigendecomposition of a*a
    computed by cyclic Jacobi; tiny negative eigenvalues from roundoff are
    clamped to zero.
    """
    if not (1.0 <= q < INF):
        raise ValueError("schatten_norm requires 1 <= q < inf")
    if a.dim > 64:
        raise ValueError("schatten_norm supports m <= 64")
    m = a.entries
    gram = m.conj().T @ m
    eig = hermitian_eigenvalues(gram)
    sigma = np.sqrt(np.clip(eig, 0.0, None))
    return float((sigma ** q).sum() ** (1.0 / q))


def lambda_area(c: np.ndarray, squared_inner: bool = True) -> float:
    """Area of the parallelogram spanned by Re(c) and Im(c).

    ``squared_inner=False`` uses an unsquared <Re, Im> term under the root
    instead of <Re, Im>^2; the squared form is the parallelogram area and is
    the default.
    """
    r = np.real(c)
    im = np.imag(c)
    rr = float((r * r).sum())
    ii = float((im * im).sum())
    ri = float((r * im).sum())
    rad = rr * ii - (ri * ri if squared_inner else ri)
    return math.sqrt(max(rad, 0.0))


def parallelogram_s1_distance(a: CVector, b: CVector, n: Optional[int] = None,
                              squared_inner: bool = True) -> float:
    """Closed-form trace-norm distance on C^{2n} parallelogram configurations.

    d(a, b) = (sqrt(|c|^2 + 2 L) + sqrt(|c|^2 - 2 L)) / 2 with c = a - b and
    L = lambda_area(c).  The second radicand is clamped at zero when roundoff
    drives it slightly negative (mathematically it is >= 0).
    """
    if a.dim != b.dim:
        raise ValueError("mismatched lengths")
    if n is not None and a.dim != 2 * n:
        raise ValueError("points must have length 2n")
    c = a.entries - b.entries
    s = float((np.abs(c) ** 2).sum())
    lam = lambda_area(c, squared_inner=squared_inner)
    r2 = s - 2.0 * lam
    if r2 < 0.0:
        if r2 < -1e-12 * max(s, 1.0):
            raise ArithmeticError("radicand fell below the clamping tolerance")
        r2 = 0.0
    return 0.5 * (math.sqrt(s + 2.0 * lam) + math.sqrt(r2))


# --------------------------------------------------------------------------
# Point validation and dispatch
# --------------------------------------------------------------------------

def validate_point(space: Space, x: Point) -> None:
    if isinstance(space, Snowflake):
        validate_point(space.base, x)
        return
    if isinstance(space, WeightedLq):
        if not isinstance(x, CVector):
            raise SpaceMismatchError("WeightedLq points are CVectors")
    elif isinstance(space, Schatten):
        if not isinstance(x, CMatrix):
            raise SpaceMismatchError("Schatten points are CMatrix values")
    elif isinstance(space, ParallelogramS1):
        if not isinstance(x, CVector):
            raise SpaceMismatchError("ParallelogramS1 points are CVectors")
        if x.dim != 2 * space.n:
            raise SpaceMismatchError("ParallelogramS1 points have length 2n")
        if not np.all(x.weights == 1.0):
            raise SpaceMismatchError("ParallelogramS1 points carry unit weights")
    elif isinstance(space, BipartiteGraph):
        if not isinstance(x, GraphVertex):
            raise SpaceMismatchError("BipartiteGraph points are GraphVertex values")
        if x.index >= space.n:
            raise SpaceMismatchError("vertex index out of range")
    elif isinstance(space, RealLine):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise SpaceMismatchError("RealLine points are real scalars")
        if not math.isfinite(x):
            raise SpaceMismatchError("RealLine points must be finite")
    else:
        raise SpaceMismatchError(f"unknown space kind {space!r}")


def _shared_weights(atoms: Sequence[CVector]) -> np.ndarray:
    w = atoms[0].weights
    for a in atoms[1:]:
        if a.weights is not w and not np.array_equal(a.weights, w):
            raise ValueError("all atoms of one distribution must share weights")
    return w


def pairwise_powered(space: Space, xs: Sequence[Point], ys: Sequence[Point],
                     p: float) -> np.ndarray:
    """Matrix of d(x, y)^p over xs x ys.

    The exponent is fused into a single power call per pair, so a Snowflake
    of exponent alpha delegates to the base space with exponent alpha * p.
    """
    if not (p > 0):
        raise ValueError("exponent p must be positive")
    if isinstance(space, Snowflake):
        return pairwise_powered(space.base, xs, ys, space.alpha * p)
    for x in xs:
        validate_point(space, x)
    for y in ys:
        validate_point(space, y)

    if isinstance(space, RealLine):
        xv = np.asarray(xs, dtype=float)
        yv = np.asarray(ys, dtype=float)
        return np.abs(xv[:, None] - yv[None, :]) ** p

    if isinstance(space, WeightedLq):
        w = _shared_weights(list(xs) + list(ys))
        e = np.stack([a.entries for a in xs])
        f = np.stack([a.entries for a in ys])
        absd = np.abs(e[:, None, :] - f[None, :, :])
        if space.q == INF:
            mask = w > 0
            if not mask.any():
                raise ValueError("sup norm needs at least one positive weight")
            return absd[:, :, mask].max(axis=-1) ** p
        s = (absd ** space.q * w).sum(axis=-1)
        return s ** (p / space.q)

    if isinstance(space, ParallelogramS1):
        e = np.stack([a.entries for a in xs])
        f = np.stack([a.entries for a in ys])
        c = e[:, None, :] - f[None, :, :]
        r = np.real(c)
        im = np.imag(c)
        s = (r * r).sum(axis=-1) + (im * im).sum(axis=-1)
        rad = (r * r).sum(axis=-1) * (im * im).sum(axis=-1) - (r * im).sum(axis=-1) ** 2
        lam = np.sqrt(np.clip(rad, 0.0, None))
        r2 = np.clip(s - 2.0 * lam, 0.0, None)
        d = 0.5 * (np.sqrt(s + 2.0 * lam) + np.sqrt(r2))
        return d ** p

    if isinstance(space, Schatten):
        out = np.empty((len(xs), len(ys)))
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                if x == y:
                    out[i, j] = 0.0
                else:
                    out[i, j] = schatten_norm(x - y, space.q) ** p
        return out

    if isinstance(space, BipartiteGraph):
        sides = np.array([v.side == "L" for v in xs])[:, None]
        sides_y = np.array([v.side == "L" for v in ys])[None, :]
        idx = np.array([v.index for v in xs])[:, None]
        idx_y = np.array([v.index for v in ys])[None, :]
        same_side = sides == sides_y
        same_vertex = same_side & (idx == idx_y)
        d = np.where(same_vertex, 0.0, np.where(same_side, 2.0, 1.0))
        return d ** p

    raise SpaceMismatchError(f"unknown space kind {space!r}")


def distance(space: Space, x: Point, y: Point) -> float:
    """Distance between two points of ``space``."""
    return float(pairwise_powered(space, [x], [y], 1.0)[0, 0])


# --------------------------------------------------------------------------
# Vector-space helpers (linear kinds only)
# --------------------------------------------------------------------------

def _require_linear(space: Space) -> None:
    if not is_linear(space):
        raise SpaceMismatchError(f"{type(space).__name__} is not a linear space")


def mean_point(space: Space, atoms: Sequence[Point], probs: np.ndarray) -> Point:
    """Entrywise expectation sum_i p_i x_i."""
    _require_linear(space)
    if isinstance(space, RealLine):
        return float(np.dot(probs, np.asarray(atoms, dtype=float)))
    if isinstance(space, Schatten):
        acc = np.tensordot(probs, np.stack([a.entries for a in atoms]), axes=1)
        return CMatrix(acc)
    w = _shared_weights(atoms)  # type: ignore[arg-type]
    acc = np.tensordot(probs, np.stack([a.entries for a in atoms]), axes=1)
    return CVector(acc, w)


def zero_point(space: Space, like: Point) -> Point:
    _require_linear(space)
    if isinstance(space, RealLine):
        return 0.0
    if isinstance(space, Schatten):
        return CMatrix(np.zeros_like(like.entries))
    return CVector(np.zeros_like(like.entries), like.weights)


def scale_point(space: Space, x: Point, lam: float) -> Point:
    _require_linear(space)
    if isinstance(space, RealLine):
        return float(lam * x)
    if isinstance(space, Schatten):
        return CMatrix(lam * x.entries)
    return CVector(lam * x.entries, x.weights)


def shift_point(space: Space, x: Point, delta: Point) -> Point:
    _require_linear(space)
    if isinstance(space, RealLine):
        return float(x + delta)
    if isinstance(space, Schatten):
        return CMatrix(x.entries + delta.entries)
    return CVector(x.entries + delta.entries, x.weights)


# --------------------------------------------------------------------------
# JSON forms
# --------------------------------------------------------------------------

def _q_to_json(q: float):
    return "inf" if q == INF else q


def _q_from_json(v) -> float:
    if isinstance(v, str):
        if v.lower() in ("inf", "infinity"):
            return INF
        return float(v)
    return float(v)


def space_to_json(space: Space) -> dict:
    if isinstance(space, WeightedLq):
        return {"kind": "weighted_lq", "q": _q_to_json(space.q)}
    if isinstance(space, Schatten):
        return {"kind": "schatten", "q": space.q}
    if isinstance(space, ParallelogramS1):
        return {"kind": "parallelogram_s1", "n": space.n}
    if isinstance(space, Snowflake):
        return {"kind": "snowflake", "base": space_to_json(space.base), "alpha": space.alpha}
    if isinstance(space, BipartiteGraph):
        return {"kind": "bipartite_graph", "n": space.n}
    if isinstance(space, RealLine):
        return {"kind": "real_line"}
    raise SpaceMismatchError(f"unknown space kind {space!r}")


def space_from_json(obj: dict) -> Space:
    try:
        kind = obj["kind"]
    except (TypeError, KeyError):
        raise ValueError("space object needs a 'kind' field") from None
    if kind == "weighted_lq":
        return WeightedLq(_q_from_json(obj["q"]))
    if kind == "schatten":
        return Schatten(float(obj["q"]))
    if kind == "parallelogram_s1":
        return ParallelogramS1(int(obj["n"]))
    if kind == "snowflake":
        return Snowflake(space_from_json(obj["base"]), float(obj["alpha"]))
    if kind == "bipartite_graph":
        return BipartiteGraph(int(obj["n"]))
    if kind == "real_line":
        return RealLine()
    raise ValueError(f"unknown space kind {kind!r}")


def atom_to_json(space: Space, x: Point):
    if isinstance(space, Snowflake):
        return atom_to_json(space.base, x)
    if isinstance(space, RealLine):
        return float(x)
    if isinstance(space, BipartiteGraph):
        return [x.side, x.index]
    if isinstance(space, Schatten):
        return [[[float(v.real), float(v.imag)] for v in row] for row in x.entries]
    return [[float(v.real), float(v.imag)] for v in x.entries]


def atom_from_json(space: Space, obj, weights: Optional[np.ndarray] = None) -> Point:
    if isinstance(space, Snowflake):
        return atom_from_json(space.base, obj, weights)
    if isinstance(space, RealLine):
        return float(obj)
    if isinstance(space, BipartiteGraph):
        side, index = obj
        return GraphVertex(str(side), int(index))
    if isinstance(space, Schatten):
        rows = [[complex(v[0], v[1]) for v in row] for row in obj]
        return CMatrix(np.array(rows, dtype=complex))
    entries = np.array([complex(v[0], v[1]) for v in obj], dtype=complex)
    return CVector(entries, weights)
