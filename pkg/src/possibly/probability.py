"""Probability distributions, product fusion and categorical sampling.

The probabilistic baseline represents an agent's belief as a probability
distribution over the n states. Two beliefs are combined by multiplying
pointwise and renormalising. The uniform distribution is the identity of
that operation and one-hot distributions are its only stable fixed points,
which is what drives the fast, sometimes premature, consensus of the
probabilistic model.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "ProbabilityDistribution",
    "DegenerateFusionWarning",
    "uniform",
    "product_fuse",
    "sample_state",
]

# Below this the product of two beliefs carries no usable mass.
DEGENERATE_MASS = 1e-300


class DegenerateFusionWarning(RuntimeWarning):
    """Raised when product fusion meets two beliefs with disjoint support."""


@dataclass(frozen=True)
class ProbabilityDistribution:
    """Probabilities over states 1..n, renormalised to sum exactly 1.

    A sum within 1e-9 of 1 is renormalised away (float drift accumulates over
    thousands of fusions); anything farther off indicates a bug and is
    rejected.
    """

    values: tuple[float, ...]

    def __init__(self, values: Sequence[float]) -> None:
        vals = np.asarray([float(v) for v in values], dtype=float)
        if vals.size < 1:
            raise ValueError("need at least 1 state")
        if (vals < 0.0).any() or (vals > 1.0 + 1e-9).any():
            raise ValueError("probabilities must lie in [0, 1]")
        total = float(vals.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        vals = np.minimum(vals / total, 1.0)
        object.__setattr__(self, "values", tuple(vals.tolist()))

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> float:
        return self.values[i]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def uniform(n: int) -> ProbabilityDistribution:
    """The uniform distribution on n states: the ignorant initial belief."""
    return ProbabilityDistribution((1.0 / n,) * n)


def product_fuse(p1: ProbabilityDistribution,
                 p2: ProbabilityDistribution) -> ProbabilityDistribution:
    """Pointwise product of two beliefs, renormalised.

    If the two supports are disjoint the product has no mass to renormalise;
    that case returns the uniform distribution and emits a
    DegenerateFusionWarning so callers can count occurrences instead of
    aborting a long stochastic run on a measure-zero event.
    """
    if p1.n != p2.n:
        raise ValueError(f"length mismatch: {p1.n} vs {p2.n}")
    w = p1.as_array() * p2.as_array()
    s = float(w.sum())
    if s < DEGENERATE_MASS:
        warnings.warn("product fusion of disjoint supports; returning uniform",
                      DegenerateFusionWarning, stacklevel=2)
        return uniform(p1.n)
    return ProbabilityDistribution((w / s).tolist())


def sample_state(p: ProbabilityDistribution, rng: np.random.Generator) -> int:
    """Draw a 1-based state index with probability p(s_i).

    Inverse-CDF draw consuming exactly one uniform variate from rng.
    """
    u = rng.random()
    c = np.cumsum(p.as_array())
    i = int((u > c).sum())
    return min(i, p.n - 1) + 1
