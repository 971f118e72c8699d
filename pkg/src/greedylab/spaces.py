"""Finite-dimensional sequence-space models.

Vectors are plain 1-D float arrays indexed from 0.  Position ``i`` plays the
role of the basis vector ``x_{i+1}``; every weight that depends on the basis
index (the ``1/sqrt(j)`` of the summing norm, the ``eps**(n/p)`` of the X_d
perturbation) uses the 1-based number ``i + 1``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import InvalidInput

__all__ = [
    "SpaceSpec", "lp", "kt", "c0", "dsum", "parse_space",
    "as_vector", "as_index_set", "eval_norm", "eval_norm_rows", "project",
    "complement", "indicator", "support", "basis_constants",
    "AxiomReport", "verify_space_axioms",
]


@dataclass(frozen=True)
class SpaceSpec:
    """Descriptor of the (quasi-)norm that governs a model space.

    ``kind`` is one of ``"lp"``, ``"kt"``, ``"dsum"`` or ``"c0"``.  ``"kt"``
    is the summing norm ``max(||a||_2, sup_m |sum_{j<=m} a_j/sqrt(j)|)``;
    ``"dsum"`` is the max-norm on the interleaved direct sum, with even
    positions (0, 2, ...) routed to ``left`` and odd positions to ``right``.
    """

    kind: str
    p: float | None = None
    left: "SpaceSpec | None" = None
    right: "SpaceSpec | None" = None

    def __post_init__(self):
        if self.kind == "lp":
            if self.p is None or not np.isfinite(self.p) or self.p <= 0:
                raise InvalidInput(f"lp space needs 0 < p < inf, got {self.p!r}")
        elif self.kind == "dsum":
            if not isinstance(self.left, SpaceSpec) or not isinstance(self.right, SpaceSpec):
                raise InvalidInput("dsum needs two SpaceSpec children")
        elif self.kind not in ("kt", "c0"):
            raise InvalidInput(f"unknown space kind {self.kind!r}")

    @property
    def convexity_exponent(self) -> float:
        """Largest q in (0, 1] for which the norm is q-subadditive."""
        if self.kind == "lp":
            return min(float(self.p), 1.0)
        if self.kind == "dsum":
            return min(self.left.convexity_exponent, self.right.convexity_exponent)
        return 1.0

    @property
    def is_lattice(self) -> bool:
        # Norm is monotone in every |coordinate| separately: zeroing a
        # coordinate never increases it.
        if self.kind in ("lp", "c0"):
            return True
        if self.kind == "dsum":
            return self.left.is_lattice and self.right.is_lattice
        return False

    def to_dict(self) -> dict:
        if self.kind == "lp":
            return {"kind": "lp", "p": float(self.p)}
        if self.kind == "dsum":
            return {"kind": "dsum", "left": self.left.to_dict(), "right": self.right.to_dict()}
        return {"kind": self.kind}

    @classmethod
    def from_dict(cls, d: dict) -> "SpaceSpec":
        try:
            kind = d["kind"]
        except (KeyError, TypeError):
            raise InvalidInput(f"space object needs a 'kind' field: {d!r}") from None
        if kind == "lp":
            return lp(d.get("p"))
        if kind == "dsum":
            return dsum(cls.from_dict(d.get("left")), cls.from_dict(d.get("right")))
        return cls(kind)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SpaceSpec":
        return cls.from_dict(json.loads(text))

    def __str__(self):
        if self.kind == "lp":
            return f"lp:{self.p:g}"
        if self.kind == "dsum":
            return f"dsum({self.left},{self.right})"
        return self.kind


def lp(p: float) -> SpaceSpec:
    return SpaceSpec("lp", None if p is None else float(p))


def kt() -> SpaceSpec:
    return SpaceSpec("kt")


def c0() -> SpaceSpec:
    return SpaceSpec("c0")


def dsum(left: SpaceSpec, right: SpaceSpec) -> SpaceSpec:
    return SpaceSpec("dsum", left=left, right=right)


def parse_space(text: str) -> SpaceSpec:
    """Parse the CLI shorthand: ``lp:0.5``, ``kt``, ``c0``,
    ``dsum(lp:2,c0)`` or a JSON object."""
    text = text.strip()
    if text.startswith("{"):
        return SpaceSpec.from_json(text)
    if text.startswith("dsum(") and text.endswith(")"):
        inner = text[5:-1]
        depth = 0
        for i, ch in enumerate(inner):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                return dsum(parse_space(inner[:i]), parse_space(inner[i + 1:]))
        raise InvalidInput(f"cannot split dsum arguments in {text!r}")
    if text.startswith("lp:"):
        try:
            return lp(float(text[3:]))
        except ValueError:
            raise InvalidInput(f"bad exponent in {text!r}") from None
    if text in ("kt", "c0"):
        return SpaceSpec(text)
    raise InvalidInput(f"unknown space {text!r}")


def as_vector(x) -> np.ndarray:
    v = np.array(x, dtype=float).reshape(-1)
    if v.size == 0:
        raise InvalidInput("vector must have dimension >= 1")
    if not np.all(np.isfinite(v)):
        raise InvalidInput("vector has non-finite entries")
    return v


def as_index_set(A: Iterable[int], n: int) -> tuple[int, ...]:
    idx = tuple(sorted({int(i) for i in A}))
    if idx and (idx[0] < 0 or idx[-1] >= n):
        raise InvalidInput(f"index set {idx} out of range for dimension {n}")
    return idx


def pow2_scale(a):
    """Power of two near ``a`` (1 where ``a`` is 0); dividing by it is exact
    and brings the values into [0.5, 1) before squaring."""
    a = np.asarray(a, dtype=float)
    return np.where(a > 0, np.ldexp(1.0, np.frexp(a)[1]), 1.0)


def _row_norms(space: SpaceSpec, Y: np.ndarray) -> np.ndarray:
    if Y.shape[1] == 0:
        return np.zeros(Y.shape[0])
    kind = space.kind
    if kind == "lp":
        p = space.p
        a = np.abs(Y)
        if p == 2.0:
            s = pow2_scale(a.max(axis=1))
            b = a / s[:, None]
            return s * np.sqrt(np.einsum("ij,ij->i", b, b))
        if p == 1.0:
            return a.sum(axis=1)
        # Scale by the row max to keep |y|**p away from overflow/underflow.
        s = a.max(axis=1)
        out = np.zeros(Y.shape[0])
        nz = s > 0
        out[nz] = s[nz] * ((a[nz] / s[nz, None]) ** p).sum(axis=1) ** (1.0 / p)
        return out
    if kind == "c0":
        return np.abs(Y).max(axis=1)
    if kind == "kt":
        s = pow2_scale(np.abs(Y).max(axis=1))
        return s * kernels.kt_norm_rows(np.ascontiguousarray(Y / s[:, None]))
    return np.maximum(_row_norms(space.left, Y[:, 0::2]), _row_norms(space.right, Y[:, 1::2]))


def eval_norm_rows(space: SpaceSpec, Y) -> np.ndarray:
    """Norm of every row of a 2-D array."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2:
        raise InvalidInput("expected a 2-D array of row vectors")
    if not np.all(np.isfinite(Y)):
        raise InvalidInput("vector has non-finite entries")
    return _row_norms(space, Y)


def eval_norm(space: SpaceSpec, x) -> float:
    """Model (quasi-)norm of ``x``; zero exactly for the zero vector."""
    v = as_vector(x)
    return float(_row_norms(space, v[None, :])[0])


def support(x) -> tuple[int, ...]:
    return tuple(int(i) for i in np.flatnonzero(as_vector(x)))


def project(x, A: Iterable[int]) -> np.ndarray:
    v = as_vector(x)
    idx = list(as_index_set(A, v.size))
    out = np.zeros_like(v)
    out[idx] = v[idx]
    return out


def complement(A: Iterable[int], n: int) -> tuple[int, ...]:
    s = set(as_index_set(A, n))
    return tuple(i for i in range(n) if i not in s)


def indicator(A: Sequence[int], eps: Sequence[int] | None, n: int) -> np.ndarray:
    """``1_{eps A}``: signs ``eps`` placed on ``A`` (all +1 when eps is None).

    ``eps`` is aligned with ``sorted(A)``.
    """
    idx = as_index_set(A, n)
    if len(idx) != len(A):
        raise InvalidInput("index set has duplicates")
    out = np.zeros(n)
    if eps is None:
        out[list(idx)] = 1.0
        return out
    signs = np.asarray(eps, dtype=float).reshape(-1)
    if signs.size != len(idx):
        raise InvalidInput(f"{signs.size} signs for an index set of size {len(idx)}")
    if not np.all(np.abs(signs) == 1.0):
        raise InvalidInput("signs must be +1 or -1")
    out[list(idx)] = signs
    return out


def basis_constants(space: SpaceSpec, n: int) -> tuple[float, float]:
    """(c1, c2): min and max norm of the n coordinate vectors.

    The coordinate functionals have norm 1 in every model here, so the
    semi-normalization constants only depend on the vectors themselves.
    """
    norms = _row_norms(space, np.eye(n))
    return float(min(norms.min(), 1.0)), float(max(norms.max(), 1.0))


@dataclass
class AxiomReport:
    q: float
    passed: bool
    homogeneity_ok: bool
    subadditive_ok: bool
    reverse_ok: bool
    worst_slack: float
    failures: list

    def __bool__(self):
        return self.passed


def verify_space_axioms(space: SpaceSpec, samples, q: float | None = None,
                        rtol: float = 1e-9,
                        scalars: Sequence[float] = (-3.0, -0.5, 0.25, 2.0)) -> AxiomReport:
    """Check homogeneity, q-subadditivity and the reverse triangle law.

    ``samples`` is a non-empty iterable of ``(f, g)`` pairs.  ``worst_slack``
    is the smallest ``(rhs - lhs) / max(rhs, tiny)`` seen; negative means a
    violation beyond rounding.
    """
    samples = list(samples)
    if not samples:
        raise InvalidInput("samples must be non-empty")
    q = space.convexity_exponent if q is None else float(q)
    worst = np.inf
    hom = sub = rev = True
    failures = []
    for k, (f, g) in enumerate(samples):
        f, g = as_vector(f), as_vector(g)
        nf, ng = eval_norm(space, f), eval_norm(space, g)
        for t in scalars:
            lhs, rhs = eval_norm(space, t * f), abs(t) * nf
            gap = abs(lhs - rhs)
            if gap > rtol * max(rhs, 1e-300):
                hom = False
                failures.append(("homogeneity", k, t, lhs, rhs))
            worst = min(worst, -gap / max(rhs, 1e-300))
        lhs = eval_norm(space, f + g) ** q
        rhs = nf ** q + ng ** q
        slack = (rhs - lhs) / max(rhs, 1e-300)
        worst = min(worst, slack)
        if slack < -rtol:
            sub = False
            failures.append(("subadditivity", k, lhs, rhs))
        lhs = abs(nf ** q - ng ** q)
        rhs = eval_norm(space, f - g) ** q
        slack = (rhs - lhs) / max(rhs, lhs, 1e-300)
        worst = min(worst, slack)
        if slack < -rtol:
            rev = False
            failures.append(("reverse", k, lhs, rhs))
    return AxiomReport(q, hom and sub and rev, hom, sub, rev, float(worst), failures)
