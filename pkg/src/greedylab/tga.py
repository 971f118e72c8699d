"""Thresholding greedy algorithm over the canonical basis of a model space,
Chebyshev greedy sums, and brute-force oracles for best m-term errors."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, NamedTuple

import numpy as np

from . import kernels
from .errors import CapacityError, InvalidInput
from .spaces import SpaceSpec, _row_norms, as_index_set, as_vector, pow2_scale

__all__ = [
    "GreedyOrdering", "greedy_ordering", "greedy_sum", "greedy_sets", "is_greedy_set",
    "ChebyshevResult", "chebyshev_sum", "chebyshev_rows",
    "OracleResult", "sigma_m_oracle", "best_projection_error", "oversampled_greedy_error",
    "OversampleResult", "SubsetTable", "SIGMA_MAX_N", "SIGMA_MAX_M", "BPE_MAX_N",
    "CHEB_ROUNDS", "CHEB_ITERS",
]

SIGMA_MAX_N = 16
SIGMA_MAX_M = 5
BPE_MAX_N = 20
GREEDY_SET_CAP = 10_000

# Subgradient schedule for the non-separable Chebyshev problem: 5 restarts of
# 2000 steps (10^4 total), step c/sqrt(k) with c shrinking 5x per restart.
CHEB_ROUNDS = 5
CHEB_ITERS = 2000
CHEB_STEP0 = 0.5
CHEB_SHRINK = 0.2


class GreedyOrdering(NamedTuple):
    pi: tuple
    tie_events: tuple


def greedy_ordering(x) -> GreedyOrdering:
    """Indices sorted by non-increasing modulus, lower index first on ties.

    ``tie_events`` lists consecutive pairs of the ordering whose (nonzero)
    moduli are equal; it is empty exactly when the support is in X_d.
    """
    v = np.abs(as_vector(x))
    pi = np.argsort(-v, kind="stable")
    mod = v[pi]
    ties = tuple((int(pi[j]), int(pi[j + 1])) for j in range(len(pi) - 1)
                 if mod[j] == mod[j + 1] and mod[j] != 0)
    return GreedyOrdering(tuple(int(i) for i in pi), ties)


def greedy_sum(x, m: int) -> tuple[np.ndarray, tuple]:
    v = as_vector(x)
    if int(m) != m or not 0 <= m <= v.size:
        raise InvalidInput(f"m must be in 0..{v.size}, got {m!r}")
    G = tuple(sorted(greedy_ordering(v).pi[: int(m)]))
    out = np.zeros_like(v)
    out[list(G)] = v[list(G)]
    return out, G


def is_greedy_set(x, A) -> bool:
    v = np.abs(as_vector(x))
    A = as_index_set(A, v.size)
    if not A or len(A) == v.size:
        return True
    inside = np.zeros(v.size, bool)
    inside[list(A)] = True
    return bool(v[inside].min() >= v[~inside].max())


def greedy_sets(x, m: int, cap: int = GREEDY_SET_CAP) -> Iterator[tuple]:
    """Every greedy set of size ``m`` (sorted tuples, lexicographic order).

    Entries strictly above the threshold modulus are forced; the rest are
    chosen among the entries at the threshold.  When the threshold is 0 all
    choices give the same projection, so only the canonical set is yielded.
    At most ``cap`` sets are produced.
    """
    v = np.abs(as_vector(x))
    n = v.size
    if int(m) != m or not 0 <= m <= n:
        raise InvalidInput(f"m must be in 0..{n}, got {m!r}")
    m = int(m)
    if m == 0:
        yield ()
        return
    pi = greedy_ordering(v).pi
    t = v[pi[m - 1]]
    if t == 0:
        yield tuple(sorted(pi[:m]))
        return
    forced = [i for i in range(n) if v[i] > t]
    tied = [i for i in range(n) if v[i] == t]
    need = m - len(forced)
    for k, extra in enumerate(combinations(tied, need)):
        if k >= cap:
            return
        yield tuple(sorted(forced + list(extra)))


@dataclass
class ChebyshevResult:
    coefficients: np.ndarray
    residual: float
    iterations: int


def _masks(n: int, sets) -> np.ndarray:
    M = np.zeros((len(sets), n), dtype=bool)
    for r, B in enumerate(sets):
        M[r, list(B)] = True
    return M


def _cheb_rows(space: SpaceSpec, x: np.ndarray, M: np.ndarray, Y0: np.ndarray,
               rounds: int, iters: int):
    """(values, residual vectors, iterations) for every mask row."""
    if space.is_lattice:
        Y = np.where(M, 0.0, x[None, :])
        return _row_norms(space, Y), Y, 0
    if space.kind == "kt":
        s = float(pow2_scale(np.abs(x).max()))
        vals, Y, it = kernels.kt_chebyshev_rows(x / s, M.astype(np.uint8), Y0 / s, rounds, iters,
                                                CHEB_STEP0, CHEB_SHRINK)
        return vals * s, Y * s, int(it)
    if space.kind == "dsum":
        # The max-norm splits into independent problems on the two blocks.
        vl, Yl, il = _cheb_rows(space.left, x[0::2], M[:, 0::2], Y0[:, 0::2], rounds, iters)
        vr, Yr, ir = _cheb_rows(space.right, x[1::2], M[:, 1::2], Y0[:, 1::2], rounds, iters)
        Y = np.empty((M.shape[0], x.size))
        Y[:, 0::2], Y[:, 1::2] = Yl, Yr
        return np.maximum(vl, vr), Y, il + ir
    raise CapacityError(f"no Chebyshev solver for space {space}")


def chebyshev_rows(space: SpaceSpec, x, sets, rounds: int = CHEB_ROUNDS,
                   iters: int = CHEB_ITERS):
    """Chebyshev residual for many index sets at once.

    Returns ``(values, proj_values, Y, iterations)`` where ``Y[r]`` is the
    optimal residual vector for ``sets[r]``.  ``values`` never exceeds
    ``proj_values`` (the plain projection residual, computed by the same
    routine) since the solver starts at the projection and keeps its best
    point.
    """
    x = as_vector(x)
    if not space.is_lattice and space.convexity_exponent < 1:
        raise CapacityError(
            f"Chebyshev sums over the non-convex, non-separable space {space} "
            "are not supported")
    M = _masks(x.size, sets)
    Yp = np.where(M, 0.0, x[None, :])
    proj = _row_norms(space, Yp)
    vals, Y, it = _cheb_rows(space, x, M, Yp, rounds, iters)
    worse = ~(vals <= proj)
    vals = np.where(worse, proj, vals)
    Y[worse] = Yp[worse]
    return vals, proj, Y, it


def chebyshev_sum(space: SpaceSpec, x, A, tol: float = 1e-9,
                  max_passes: int = 10) -> ChebyshevResult:
    """Best coefficients on ``A`` for ``||x - sum_{i in A} a_i e_i||``.

    Lattice spaces (lp, c0 and direct sums of them) are solved exactly by
    ``a_i = x_i``.  Otherwise the subgradient schedule is rerun from the best
    point until a pass improves the value by less than ``tol`` (relative).
    """
    if not tol > 0:
        raise InvalidInput("tol must be positive")
    x = as_vector(x)
    A = as_index_set(A, x.size)
    vals, _, Y, it = chebyshev_rows(space, x, [A])
    val = float(vals[0])
    if not space.is_lattice and val > 0 and A:
        M = _masks(x.size, [A])
        for _ in range(max_passes):
            v2, Y2, it2 = _cheb_rows(space, x, M, Y, CHEB_ROUNDS, CHEB_ITERS)
            it += it2
            improved = val - float(v2[0])
            if float(v2[0]) < val:
                val, Y = float(v2[0]), Y2
            if improved <= tol * val:
                break
    coeffs = x[list(A)] - Y[0, list(A)]
    return ChebyshevResult(coeffs, val, it)


def _subsets(universe, max_size: int) -> Iterator[tuple]:
    for k in range(max_size + 1):
        yield from combinations(universe, k)


@dataclass
class OracleResult:
    m: int
    value: float
    witness_set: tuple
    coefficients: list
    solver_iters: int

    def to_dict(self) -> dict:
        return {"m": self.m, "value": self.value, "witness_set": list(self.witness_set),
                "coefficients": list(self.coefficients), "solver_iters": self.solver_iters}


_CHUNK = 4096


def _check_m(m, n):
    if int(m) != m or m < 0:
        raise InvalidInput(f"m must be a non-negative integer, got {m!r}")
    return min(int(m), n)


def sigma_m_oracle(space: SpaceSpec, x, m: int) -> OracleResult:
    """Best m-term error by enumerating every index set ``|B| <= m`` of the
    whole coordinate range, each with its Chebyshev coefficients.

    Ties keep the first set in (size, lexicographic) order.
    """
    x = as_vector(x)
    n = x.size
    if n > SIGMA_MAX_N or m > SIGMA_MAX_M:
        raise CapacityError(
            f"sigma_m enumeration is limited to n <= {SIGMA_MAX_N}, m <= {SIGMA_MAX_M} "
            f"(got n={n}, m={m}); use best_projection_error for larger cases")
    m = _check_m(m, n)
    best, best_set, best_y, iters = np.inf, (), None, 0
    sets = list(_subsets(range(n), m))
    for start in range(0, len(sets), _CHUNK):
        chunk = sets[start:start + _CHUNK]
        vals, _, Y, it = chebyshev_rows(space, x, chunk)
        iters += it
        k = int(np.argmin(vals))
        if vals[k] < best:
            best, best_set, best_y = float(vals[k]), chunk[k], Y[k]
    coeffs = [float(x[i] - best_y[i]) for i in best_set]
    return OracleResult(m, best, tuple(best_set), coeffs, iters)


def best_projection_error(space: SpaceSpec, x, m: int) -> tuple[float, tuple]:
    """``min_{|B| <= m} ||x - P_B x||`` with a minimizing set.

    Projections onto zero coordinates change nothing, so only subsets of the
    support are enumerated; the value equals the full enumeration.
    """
    x = as_vector(x)
    n = x.size
    if n > BPE_MAX_N:
        raise CapacityError(f"best projection enumeration is limited to n <= {BPE_MAX_N}")
    m = _check_m(m, n)
    supp = [int(i) for i in np.flatnonzero(x)]
    best, best_set = np.inf, ()
    for k in range(min(m, len(supp)) + 1):
        it = combinations(supp, k)
        while True:
            chunk = [c for _, c in zip(range(_CHUNK), it)]
            if not chunk:
                break
            Y = np.where(_masks(n, chunk), 0.0, x[None, :])
            vals = _row_norms(space, Y)
            j = int(np.argmin(vals))
            if vals[j] < best:
                best, best_set = float(vals[j]), chunk[j]
    return best, tuple(best_set)


class OversampleResult(NamedTuple):
    ratio: float
    numerator: float
    sigma: float
    greedy_set: tuple
    infinite: bool


def oversampled_size(m: int, lam: float) -> int:
    # ceil(lam*m) without float spill-over such as 1.1*10 = 11.000000000000002
    return int(math.ceil(round(lam * m, 9)))


def oversampled_greedy_error(space: SpaceSpec, x, m: int, lam: float) -> OversampleResult:
    """``||x - P_A x|| / sigma_m(x)`` for the greedy set A of size ceil(lam*m)."""
    x = as_vector(x)
    if not lam > 1:
        raise InvalidInput("lambda must be > 1")
    size = oversampled_size(m, lam)
    if size > x.size:
        raise InvalidInput(f"ceil(lambda*m) = {size} exceeds the dimension {x.size}")
    _, A = greedy_sum(x, size)
    num = float(_row_norms(space, np.where(_masks(x.size, [A]), 0.0, x[None, :]))[0])
    sig = sigma_m_oracle(space, x, m).value
    if sig == 0:
        if num == 0:
            return OversampleResult(0.0, num, sig, A, False)
        return OversampleResult(math.inf, num, sig, A, True)
    return OversampleResult(num / sig, num, sig, A, False)


class SubsetTable:
    """Projection and Chebyshev residuals of one vector for every index set
    of size <= ``max_size``, enumerated in (size, lexicographic) order.

    All greedy-type ratios of a sample are read from one table, so the
    numerators and denominators of the different constants are the very same
    floating-point numbers and the chain quasi <= almost <= greedy holds
    exactly.
    """

    def __init__(self, space: SpaceSpec, x, max_size: int | None = None,
                 chebyshev: bool = True):
        self.space = space
        self.x = as_vector(x)
        n = self.x.size
        self.max_size = n if max_size is None else min(int(max_size), n)
        self.sets = list(_subsets(range(n), self.max_size))
        self.index = {B: r for r, B in enumerate(self.sets)}
        self.sizes = np.array([len(B) for B in self.sets])
        proj = np.empty(len(self.sets))
        cheb = np.empty(len(self.sets)) if chebyshev else None
        self.iterations = 0
        for start in range(0, len(self.sets), _CHUNK):
            chunk = self.sets[start:start + _CHUNK]
            if chebyshev:
                v, p, _, it = chebyshev_rows(space, self.x, chunk)
                cheb[start:start + len(chunk)] = v
                self.iterations += it
            else:
                p = _row_norms(space, np.where(_masks(n, chunk), 0.0, self.x[None, :]))
            proj[start:start + len(chunk)] = p
        self.proj = proj
        self.cheb = cheb
        self.norm = float(proj[0])
        # prefix minima by size: sizes are non-decreasing along self.sets
        self._bpe = self._prefix_min(proj)
        self._sigma = self._prefix_min(cheb) if chebyshev else None

    def _prefix_min(self, vals):
        out = []
        for k in range(self.max_size + 1):
            sel = np.flatnonzero(self.sizes <= k)
            j = sel[int(np.argmin(vals[sel]))]
            out.append((float(vals[j]), self.sets[j]))
        return out

    def proj_residual(self, A) -> float:
        return float(self.proj[self.index[tuple(sorted(A))]])

    def cheb_residual(self, A) -> float:
        return float(self.cheb[self.index[tuple(sorted(A))]])

    def best_projection(self, m: int) -> tuple[float, tuple]:
        return self._bpe[min(m, self.max_size)]

    def sigma(self, m: int) -> tuple[float, tuple]:
        return self._sigma[min(m, self.max_size)]
