"""Pure, Relaxed and Power-Relaxed Greedy Algorithms over finite dictionaries
in the Euclidean space R^d."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InvalidInput

__all__ = [
    "Dictionary", "orthonormal_dictionary", "random_dictionary", "union_dictionary",
    "parse_dictionary", "best_atom", "AtomChoice", "PursuitStep", "PursuitTrace",
    "run_pga", "run_rga", "run_power_rga", "sample_a1", "verify_rate", "RateCheck",
    "relaxation_inequality", "STOP_TOL",
]

STOP_TOL = 1e-13
UNIT_TOL = 1e-12


class Dictionary:
    """Finite dictionary of unit vectors in R^d, one representative per
    +/- pair (the negatives are implied)."""

    def __init__(self, atoms, check_span: bool = True):
        a = np.array(atoms, dtype=float)
        if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
            raise InvalidInput("dictionary needs a non-empty (K, d) array of atoms")
        if not np.all(np.isfinite(a)):
            raise InvalidInput("dictionary atoms have non-finite entries")
        norms = np.linalg.norm(a, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_TOL)
        if bad.size:
            raise InvalidInput(f"atom {int(bad[0])} has norm {norms[bad[0]]!r}, expected 1")
        if check_span and np.linalg.matrix_rank(a) < a.shape[1]:
            raise InvalidInput("atoms do not span R^d")
        a.setflags(write=False)
        self.atoms = a

    @property
    def d(self) -> int:
        return self.atoms.shape[1]

    def __len__(self):
        return self.atoms.shape[0]

    def to_dict(self) -> dict:
        return {"d": self.d, "atoms": self.atoms.tolist()}

    @classmethod
    def from_dict(cls, obj: dict) -> "Dictionary":
        try:
            d, atoms = int(obj["d"]), obj["atoms"]
        except (KeyError, TypeError, ValueError):
            raise InvalidInput("dictionary JSON needs 'd' and 'atoms'") from None
        out = cls(atoms)
        if out.d != d:
            raise InvalidInput(f"declared d={d} but atoms have length {out.d}")
        return out

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path) -> "Dictionary":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def orthonormal_dictionary(d: int) -> Dictionary:
    return Dictionary(np.eye(d))


def random_dictionary(K: int, d: int, seed: int = 0) -> Dictionary:
    """K Gaussian directions normalized to the unit sphere."""
    if K < d:
        raise InvalidInput("need K >= d atoms to span R^d")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((K, d))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    return Dictionary(a)


def union_dictionary(d: int, seed: int = 0) -> Dictionary:
    """Canonical basis together with a random orthonormal basis."""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    q = q * np.sign(np.diag(r))
    q /= np.linalg.norm(q.T, axis=1)[None, :]
    return Dictionary(np.vstack([np.eye(d), q.T]))


def parse_dictionary(text: str, seed: int = 0) -> Dictionary:
    """``orthonormal:D``, ``random:KxD``, ``union:D`` or ``file:PATH``."""
    kind, _, arg = text.partition(":")
    try:
        if kind == "orthonormal":
            return orthonormal_dictionary(int(arg))
        if kind == "random":
            K, D = arg.lower().split("x")
            return random_dictionary(int(K), int(D), seed)
        if kind == "union":
            return union_dictionary(int(arg), seed)
    except ValueError:
        raise InvalidInput(f"bad dictionary spec {text!r}") from None
    if kind == "file":
        return Dictionary.load(arg)
    raise InvalidInput(f"unknown dictionary spec {text!r}")


class AtomChoice(NamedTuple):
    index: int
    sign: int
    value: float
    degenerate: bool


def best_atom(dic: Dictionary, f) -> AtomChoice:
    """Signed atom maximizing ``<f, s*g>``.

    Ties go to the lowest atom index, then to sign +1.  ``degenerate`` is set
    when the maximum is zero (every atom is orthogonal to ``f``).
    """
    if len(dic) == 0:
        raise InvalidInput("empty dictionary")
    ips = dic.atoms @ f
    i = int(np.argmax(np.abs(ips)))
    v = float(ips[i])
    s = -1 if v < 0 else 1
    return AtomChoice(i, s, abs(v), v == 0.0)


@dataclass
class PursuitStep:
    m: int
    atom: int
    sign: int
    weight: float
    residual: float


@dataclass
class PursuitTrace:
    algorithm: str
    alpha: float | None
    f: np.ndarray
    steps: list = field(default_factory=list)
    approximant: np.ndarray | None = None
    residual: np.ndarray | None = None
    stop_reason: str = "m_max"
    # approximant after every step, kept only on request
    history: list | None = None

    @property
    def residuals(self) -> np.ndarray:
        return np.array([s.residual for s in self.steps])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "atom", "sign", "weight", "residual"])
        for s in self.steps:
            w.writerow([s.m, s.atom, s.sign, f"{s.weight:.12g}", f"{s.residual:.12g}"])
        return buf.getvalue()

    def same_steps(self, other: "PursuitTrace") -> bool:
        return (self.steps == other.steps
                and np.array_equal(self.approximant, other.approximant)
                and self.stop_reason == other.stop_reason)


def _check_input(f, dic: Dictionary, m_max: int, m_min: int) -> np.ndarray:
    v = np.array(f, dtype=float).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise InvalidInput("f has non-finite entries")
    if v.size != dic.d:
        raise InvalidInput(f"f has dimension {v.size}, dictionary has d={dic.d}")
    if int(m_max) != m_max or m_max < m_min:
        raise InvalidInput(f"m_max must be an integer >= {m_min}")
    return v


def run_pga(f, dic: Dictionary, m_max: int, keep_history: bool = False) -> PursuitTrace:
    """Pure Greedy Algorithm: ``G_m = G_{m-1} + <R_{m-1}, g> g``."""
    f = _check_input(f, dic, m_max, 0)
    G = np.zeros_like(f)
    R = f.copy()
    tr = PursuitTrace("pga", None, f, history=[] if keep_history else None)
    for m in range(1, int(m_max) + 1):
        if np.linalg.norm(R) <= STOP_TOL:
            tr.stop_reason = "residual_zero"
            break
        i, s, v, _ = best_atom(dic, R)
        g = s * dic.atoms[i]
        G = G + v * g
        R = R - v * g
        tr.steps.append(PursuitStep(m, i, s, v, float(np.linalg.norm(R))))
        if keep_history:
            tr.history.append(G.copy())
    tr.approximant, tr.residual = G, R
    return tr


def run_power_rga(f, dic: Dictionary, m_max: int, alpha: float,
                  keep_history: bool = False, _tag: str = "power_rga") -> PursuitTrace:
    """Power-Relaxed Greedy Algorithm.

    Step 1 is the pure greedy step; for ``m >= 2`` the approximant becomes
    ``(1 - m**-alpha) G + m**-alpha * g`` with ``g`` the signed atom best
    correlated with the current residual.  The recorded weight is the
    inner product at step 1 and ``m**-alpha`` afterwards.
    """
    f = _check_input(f, dic, m_max, 1)
    alpha = float(alpha)
    if not (alpha >= 0 and math.isfinite(alpha)):
        raise InvalidInput("alpha must be a finite number >= 0")
    G = np.zeros_like(f)
    R = f.copy()
    tr = PursuitTrace(_tag, alpha, f, history=[] if keep_history else None)
    for m in range(1, int(m_max) + 1):
        if np.linalg.norm(R) <= STOP_TOL:
            tr.stop_reason = "residual_zero"
            break
        i, s, v, _ = best_atom(dic, R)
        g = s * dic.atoms[i]
        if m == 1:
            w = v
            G = v * g
        else:
            w = 1.0 / m ** alpha
            G = (1.0 - w) * G + w * g
        R = f - G
        tr.steps.append(PursuitStep(m, i, s, w, float(np.linalg.norm(R))))
        if keep_history:
            tr.history.append(G.copy())
    tr.approximant, tr.residual = G, R
    return tr


def run_rga(f, dic: Dictionary, m_max: int, keep_history: bool = False) -> PursuitTrace:
    """Relaxed Greedy Algorithm (mixing weight 1/m)."""
    return run_power_rga(f, dic, m_max, 1.0, keep_history, _tag="rga")


def sample_a1(dic: Dictionary, k: int, rng_seed) -> tuple[np.ndarray, list]:
    """Random element of A_1(D) built from ``k`` distinct atoms.

    The absolute weights are a uniform point of the simplex (sorted uniform
    gaps), so they sum to 1 and the sample lies on the boundary of the class.
    """
    K = len(dic)
    if int(k) != k or not 1 <= k <= K:
        raise InvalidInput(f"k must be in 1..{K}, got {k!r}")
    rng = np.random.default_rng(rng_seed)
    idx = np.sort(rng.choice(K, size=int(k), replace=False))
    cuts = np.sort(rng.uniform(size=int(k) - 1))
    w = np.diff(np.concatenate(([0.0], cuts, [1.0])))
    signs = rng.choice([-1.0, 1.0], size=int(k))
    a = signs * w
    f = a @ dic.atoms[idx]
    return f, [(int(i), float(c)) for i, c in zip(idx, a)]


class RateCheck(NamedTuple):
    holds: bool
    worst_margin: float
    first_violation: int | None


def verify_rate(trace, c: float, alpha: float) -> RateCheck:
    """Check ``residual[m] <= c / m**alpha`` for every recorded step.

    ``trace`` is a PursuitTrace or a plain sequence of residuals for
    m = 1, 2, ...  ``worst_margin`` is ``max residual * m**alpha / c``.
    """
    r = trace.residuals if isinstance(trace, PursuitTrace) else np.asarray(trace, dtype=float)
    if r.size == 0:
        raise InvalidInput("empty trace")
    m = np.arange(1, r.size + 1, dtype=float)
    ratio = r * m ** alpha / c
    bad = np.flatnonzero(r > c / m ** alpha)
    first = int(bad[0]) + 1 if bad.size else None
    return RateCheck(first is None, float(ratio.max()), first)


def relaxation_inequality(trace: PursuitTrace, dic: Dictionary) -> float:
    """Largest value of ``<R_{m-1}, G_{m-1} - g_m> + ||R_{m-1}||^2`` over
    steps m >= 2 of a relaxed trace kept with history.

    For f in A_1(D) this is <= 0 up to rounding, since the selected atom
    correlates with R_{m-1} at least as well as f does.
    """
    if trace.history is None:
        raise InvalidInput("trace was run without keep_history")
    worst = -math.inf
    for k in range(1, len(trace.steps)):
        G = trace.history[k - 1]
        R = trace.f - G
        st = trace.steps[k]
        g = st.sign * dic.atoms[st.atom]
        worst = max(worst, float(R @ (G - g) + R @ R))
    return worst
