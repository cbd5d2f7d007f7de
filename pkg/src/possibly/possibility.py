"""Possibility distributions, Frank t-norms, normalised fusion and the pignistic transform.

A possibility distribution assigns each of n world states a degree in [0, 1]
with maximum exactly 1. The derived possibility measure of a set of states is
the max of their degrees (an upper probability); the necessity measure is one
minus the possibility of the complement (a lower probability). Beliefs are
combined by applying a Frank t-norm pointwise and then adding a constant so
the maximum returns to 1, which converts inconsistency between the two inputs
into extra ignorance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .probability import ProbabilityDistribution

__all__ = [
    "FrankParameter",
    "PossibilityDistribution",
    "StateSubset",
    "vacuous",
    "frank_tnorm",
    "possibility_measure",
    "necessity_measure",
    "fuse",
    "consistency",
    "pignistic",
]

# |theta| above this overflows e^theta in double precision (limit ~709).
THETA_MAX = 700.0
# Below this the closed form loses too much precision; use the product limit.
THETA_PRODUCT_CUTOFF = 1e-4

_LN2 = 0.6931471805599453


@dataclass(frozen=True)
class FrankParameter:
    """Selects a member of Frank's t-norm family.

    Either a finite nonzero ``theta`` with |theta| <= 700, or one of the three
    symbolic limits: ``product`` (theta -> 0), ``min`` (theta -> +inf),
    ``lukasiewicz`` (theta -> -inf).
    """

    theta: float | None = None
    limit: str | None = None

    def __post_init__(self) -> None:
        if (self.theta is None) == (self.limit is None):
            raise ValueError("FrankParameter takes exactly one of theta or limit")
        if self.limit is not None:
            if self.limit not in ("product", "min", "lukasiewicz"):
                raise ValueError(f"unknown Frank limit variant: {self.limit!r}")
            return
        theta = float(self.theta)
        if not math.isfinite(theta):
            raise ValueError("theta must be finite")
        if theta == 0.0:
            raise ValueError("theta = 0 is not a member of the Frank family; "
                             "use the product limit variant")
        if abs(theta) > THETA_MAX:
            raise ValueError(f"|theta| > {THETA_MAX:g} overflows; use a limit variant")
        object.__setattr__(self, "theta", theta)

    @classmethod
    def product_limit(cls) -> "FrankParameter":
        return cls(limit="product")

    @classmethod
    def min_limit(cls) -> "FrankParameter":
        return cls(limit="min")

    @classmethod
    def lukasiewicz_limit(cls) -> "FrankParameter":
        return cls(limit="lukasiewicz")


@dataclass(frozen=True)
class PossibilityDistribution:
    """Degrees in [0, 1] over states 1..n with max exactly 1.

    A maximum within 1e-12 of 1 is snapped to exactly 1; anything farther off
    is rejected rather than silently renormalised, so that drift from a buggy
    caller cannot hide.
    """

    values: tuple[float, ...]

    def __init__(self, values: Sequence[float]) -> None:
        vals = tuple(float(v) for v in values)
        if len(vals) < 2:
            raise ValueError("need at least 2 states")
        for v in vals:
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"degree {v!r} outside [0, 1]")
        top = max(vals)
        if top != 1.0:
            if abs(top - 1.0) > 1e-12:
                raise ValueError(f"max degree {top!r} is not 1")
            vals = tuple(1.0 if v == top else v for v in vals)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> float:
        return self.values[i]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def vacuous(n: int) -> PossibilityDistribution:
    """The all-ones distribution on n states: total ignorance."""
    return PossibilityDistribution((1.0,) * n)


@dataclass(frozen=True)
class StateSubset:
    """A set of 1-based state indices."""

    members: frozenset[int]

    def __init__(self, members: Iterable[int]) -> None:
        ms = frozenset(int(i) for i in members)
        for i in ms:
            if i < 1:
                raise ValueError(f"state index {i} is not 1-based")
        object.__setattr__(self, "members", ms)

    def complement(self, n: int) -> "StateSubset":
        return StateSubset(frozenset(range(1, n + 1)) - self.members)


def _check_ambient(a: StateSubset, n: int) -> None:
    for i in a.members:
        if i > n:
            raise ValueError(f"state index {i} exceeds n = {n}")


# ---------------------------------------------------------------------------
# Frank t-norm kernel
# ---------------------------------------------------------------------------

def _log1mexp(z: np.ndarray) -> np.ndarray:
    # log(1 - e^{-z}) for z > 0, switching forms at ln 2 to keep precision
    with np.errstate(divide="ignore"):
        return np.where(z > _LN2, np.log1p(-np.exp(-z)), np.log(-np.expm1(-z)))


def _log_expm1(z: np.ndarray) -> np.ndarray:
    # log(e^z - 1) for z >= 0 without overflow; -inf at z = 0
    with np.errstate(divide="ignore"):
        small = np.log(np.expm1(np.where(z > 1.0, 1.0, z)))
        return np.where(z > 1.0, z + np.log1p(-np.exp(-z)), small)


def _frank_values(param: FrankParameter, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Elementwise Frank t-norm on arrays of degrees in [0, 1].

    T_theta(x, y) = -(1/theta) ln(1 + (e^{-theta x} - 1)(e^{-theta y} - 1)
    / (e^{-theta} - 1)), evaluated through expm1/log1p so that no
    intermediate overflows or cancels for 1e-4 <= |theta| <= 700. The result
    is clamped into the exact t-norm envelope [max(0, x+y-1), min(x, y)] and
    T(x, 1) = x holds exactly.
    """
    lo = np.minimum(x, y)
    hi = np.maximum(x, y)
    if param.limit == "min":
        return lo
    if param.limit == "lukasiewicz":
        return np.maximum(0.0, lo + hi - 1.0)
    if param.limit == "product" or abs(param.theta) < THETA_PRODUCT_CUTOFF:
        return lo * hi
    theta = param.theta
    if theta > 0:
        # 1 + (e^{-tx}-1)(e^{-ty}-1)/(e^{-t}-1) rewritten as a sum of two
        # nonnegative products, so the log sees full relative precision
        s = np.exp(-theta * lo) * (-np.expm1(-theta * (1.0 - lo))) \
            + np.exp(-theta * hi) * (-np.expm1(-theta * lo))
        with np.errstate(divide="ignore"):
            t = (_log1mexp(np.asarray(theta, dtype=float)) - np.log(s)) / theta
    else:
        # negative theta in log space: e^{phi} terms overflow past phi ~ 709
        phi = -theta
        logr = _log_expm1(phi * lo) + _log_expm1(phi * hi) \
            - _log_expm1(np.asarray(phi, dtype=float))
        t = np.logaddexp(0.0, logr) / phi
    t = np.clip(t, np.maximum(0.0, lo + hi - 1.0), lo)
    return np.where(hi == 1.0, lo, t)


def frank_tnorm(param: FrankParameter, x: float, y: float) -> float:
    """Frank t-norm of two degrees."""
    if not (0.0 <= x <= 1.0) or not (0.0 <= y <= 1.0):
        raise ValueError("t-norm arguments must lie in [0, 1]")
    return float(_frank_values(param, np.asarray(x, dtype=float), np.asarray(y, dtype=float)))


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------

def possibility_measure(pi: PossibilityDistribution, a: StateSubset) -> float:
    """Pi(A): max degree over A, the upper probability of A. Pi(empty) = 0."""
    _check_ambient(a, pi.n)
    if not a.members:
        return 0.0
    return max(pi.values[i - 1] for i in a.members)


def necessity_measure(pi: PossibilityDistribution, a: StateSubset) -> float:
    """N(A) = 1 - Pi(complement of A), the lower probability of A.

    The complement of the full state set is empty and Pi(empty) = 0, so
    N(full set) = 1; dually N(empty) = 0.
    """
    _check_ambient(a, pi.n)
    return 1.0 - possibility_measure(pi, a.complement(pi.n))


# ---------------------------------------------------------------------------
# Fusion
# ---------------------------------------------------------------------------

def _fuse_rows(param: FrankParameter, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Rowwise normalised t-norm fusion of (m, n) blocks of degree rows.

    Returns rows with max exactly 1: the pointwise t-norm plus (1 - row max).
    The argmax entry is snapped to 1.0 because a + (1 - a) can round one ulp
    off 1 in floating point.
    """
    t = _frank_values(param, a, b)
    tm = t.max(axis=1)
    out = t + (1.0 - tm)[:, None]
    np.minimum(out, 1.0, out=out)
    out[np.arange(out.shape[0]), t.argmax(axis=1)] = 1.0
    return out


def fuse(param: FrankParameter, pi1: PossibilityDistribution,
         pi2: PossibilityDistribution) -> PossibilityDistribution:
    """Normalised t-norm fusion of two possibility distributions.

    Fusing with the vacuous distribution returns the other argument
    unchanged: T(x, 1) = x and the normalising constant is then zero.
    """
    if pi1.n != pi2.n:
        raise ValueError(f"length mismatch: {pi1.n} vs {pi2.n}")
    row = _fuse_rows(param, pi1.as_array()[None, :], pi2.as_array()[None, :])[0]
    return PossibilityDistribution(row.tolist())


def consistency(param: FrankParameter, pi1: PossibilityDistribution,
                pi2: PossibilityDistribution) -> float:
    """max_s T(pi1(s), pi2(s)): 1 for fully consistent beliefs, 0 for disjoint.

    Equals 1 minus the normalising constant added by `fuse`.
    """
    if pi1.n != pi2.n:
        raise ValueError(f"length mismatch: {pi1.n} vs {pi2.n}")
    return float(_frank_values(param, pi1.as_array(), pi2.as_array()).max())


# ---------------------------------------------------------------------------
# Pignistic transform
# ---------------------------------------------------------------------------

def _pignistic_rows(b: np.ndarray) -> np.ndarray:
    """Rowwise pignistic probabilities of (m, n) possibility rows.

    With the row sorted descending (v_1 >= ... >= v_n, v_{n+1} = 0) the state
    in sorted position i gets sum_{j >= i} (v_j - v_{j+1}) / j. Sorting uses
    an ascending-index tie-break; ties contribute zero increments, so the
    result does not depend on their order.
    """
    m, n = b.shape
    order = np.argsort(-b, axis=1, kind="stable")
    v = np.take_along_axis(b, order, axis=1)
    diffs = np.empty_like(v)
    diffs[:, :-1] = v[:, :-1] - v[:, 1:]
    diffs[:, -1] = v[:, -1]
    diffs /= np.arange(1, n + 1)
    p_sorted = np.cumsum(diffs[:, ::-1], axis=1)[:, ::-1]
    p = np.empty_like(b)
    np.put_along_axis(p, order, p_sorted, axis=1)
    return p


def pignistic(pi: PossibilityDistribution) -> ProbabilityDistribution:
    """The least-biased probability distribution bracketed by N and Pi.

    Order preserving: a state with higher possibility never gets lower
    probability. The vacuous distribution maps to the uniform one.
    """
    row = _pignistic_rows(pi.as_array()[None, :])[0]
    return ProbabilityDistribution(row.tolist())
