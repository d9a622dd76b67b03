"""Finitely supported probability distributions and exact moment functionals.

Every expectation in the package reduces to a finite (double) sum over atom
pairs, so all moments below are exact up to floating-point rounding -- no
sampling, no quadrature.
"""

from __future__ import annotations

import decimal
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .spaces import (
    Space,
    Point,
    atom_from_json,
    atom_to_json,
    is_linear,
    mean_point,
    pairwise_powered,
    space_from_json,
    space_to_json,
    validate_point,
)

__all__ = [
    "FiniteDist",
    "Config",
    "mixture",
    "cross_moment",
    "self_moment",
    "mean",
    "centered_moment",
    "log_cross_moment",
]

_PROB_SUM_TOL = 1e-12


def _parse_probs(raw) -> np.ndarray:
    vals = []
    for v in raw:
        if isinstance(v, str):
            vals.append(float(decimal.Decimal(v)))
        else:
            vals.append(float(v))
    return np.asarray(vals, dtype=float)


@dataclass(frozen=True, eq=False)
class FiniteDist:
    """Probability distribution with finitely many atoms in one space."""

    space: Space
    atoms: tuple
    probs: np.ndarray

    def __post_init__(self) -> None:
        atoms = tuple(self.atoms)
        probs = _parse_probs(self.probs)
        if len(atoms) == 0:
            raise ValueError("a distribution needs at least one atom")
        if probs.shape != (len(atoms),):
            raise ValueError("probs must match atoms in length")
        if np.any(probs < 0):
            raise ValueError("probabilities must be nonnegative")
        if abs(float(probs.sum()) - 1.0) > _PROB_SUM_TOL:
            raise ValueError("probabilities must sum to 1 within 1e-12")
        for a in atoms:
            validate_point(self.space, a)
        probs.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, space: Space, atoms: Sequence[Point]) -> "FiniteDist":
        n = len(atoms)
        return cls(space, tuple(atoms), np.full(n, 1.0 / n))

    @classmethod
    def delta(cls, space: Space, atom: Point) -> "FiniteDist":
        return cls(space, (atom,), np.array([1.0]))

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        out = {
            "space": space_to_json(self.space),
            "atoms": [atom_to_json(self.space, a) for a in self.atoms],
            "probs": [float(p) for p in self.probs],
        }
        w = _common_weights(self)
        if w is not None and not np.all(w == 1.0):
            out["weights"] = [float(x) for x in w]
        return out

    @classmethod
    def from_json(cls, obj: dict, space: Optional[Space] = None) -> "FiniteDist":
        if space is None:
            if "space" not in obj:
                raise ValueError("distribution object needs a 'space' field")
            space = space_from_json(obj["space"])
        try:
            raw_atoms = obj["atoms"]
            raw_probs = obj["probs"]
        except KeyError as e:
            raise ValueError(f"distribution object needs field {e.args[0]!r}") from None
        weights = None
        if obj.get("weights") is not None:
            weights = np.asarray(obj["weights"], dtype=float)
        atoms = tuple(atom_from_json(space, a, weights) for a in raw_atoms)
        return cls(space, atoms, _parse_probs(raw_probs))


def _common_weights(dist: FiniteDist):
    a = dist.atoms[0]
    return getattr(a, "weights", None)


@dataclass(frozen=True)
class Config:
    """A pair of independent distributions on a shared space plus exponent p.

    ``zero_sum`` restricts barycenter minimization to the hyperplane of
    vectors with zero coordinate sum (the subspace in which the sup-norm
    sharpness configuration lives); it has no effect on distances or moments.
    """

    space: Space
    X: FiniteDist
    Y: FiniteDist
    p: float
    zero_sum: bool = False

    def __post_init__(self) -> None:
        if self.X.space != self.space or self.Y.space != self.space:
            raise ValueError("X and Y must live on the configured space")
        if not (self.p > 0):
            raise ValueError("exponent p must be positive")

    def to_json(self) -> dict:
        out = {
            "space": space_to_json(self.space),
            "X": self.X.to_json(),
            "Y": self.Y.to_json(),
            "p": self.p,
        }
        if self.zero_sum:
            out["zero_sum"] = True
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Config":
        for key in ("space", "X", "Y", "p"):
            if key not in obj:
                raise ValueError(f"config object needs field {key!r}")
        space = space_from_json(obj["space"])
        x = FiniteDist.from_json(obj["X"], space=space)
        y = FiniteDist.from_json(obj["Y"], space=space)
        return cls(space, x, y, float(obj["p"]), bool(obj.get("zero_sum", False)))


# --------------------------------------------------------------------------
# Moment functionals
# --------------------------------------------------------------------------

def mixture(x: FiniteDist, y: FiniteDist) -> FiniteDist:
    """Half-and-half mixture of two laws; coinciding atoms are merged by
    exact equality only."""
    if x.space != y.space:
        raise ValueError("mixture requires a shared space")
    atoms = list(x.atoms)
    probs = [0.5 * p for p in x.probs]
    for atom, p in zip(y.atoms, y.probs):
        for i, existing in enumerate(atoms):
            if existing == atom:
                probs[i] += 0.5 * p
                break
        else:
            atoms.append(atom)
            probs.append(0.5 * p)
    return FiniteDist(x.space, tuple(atoms), np.asarray(probs))


def cross_moment(x: FiniteDist, y: FiniteDist, p: float) -> float:
    """E d(X, Y)^p for independent X, Y as an exact double sum."""
    if x.space != y.space:
        raise ValueError("cross_moment requires a shared space")
    m = pairwise_powered(x.space, x.atoms, y.atoms, p)
    return float(x.probs @ m @ y.probs)


def self_moment(x: FiniteDist, p: float) -> float:
    """E d(X, X')^p over an independent copy X'."""
    return cross_moment(x, x, p)


def mean(x: FiniteDist) -> Point:
    """Entrywise expectation; rejects nonlinear space kinds."""
    if not is_linear(x.space):
        raise TypeError(f"mean undefined on {type(x.space).__name__}")
    return mean_point(x.space, x.atoms, x.probs)


def centered_moment(x: FiniteDist, p: float) -> float:
    """E d(X, E[X])^p."""
    m = mean(x)
    col = pairwise_powered(x.space, x.atoms, [m], p)[:, 0]
    return float(x.probs @ col)


def log_cross_moment(x: FiniteDist, y: FiniteDist) -> float:
    """E log d(X, Y); -inf when a coinciding atom pair carries positive mass."""
    if x.space != y.space:
        raise ValueError("log_cross_moment requires a shared space")
    d = pairwise_powered(x.space, x.atoms, y.atoms, 1.0)
    joint = np.outer(x.probs, y.probs)
    live = joint > 0
    if np.any(live & (d == 0.0)):
        return float("-inf")
    logs = np.where(live, np.log(np.where(live, d, 1.0)), 0.0)
    return float((joint * logs).sum())
