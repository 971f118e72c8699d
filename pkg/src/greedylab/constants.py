"""Lower-bound estimators, with replayable witnesses, for the constants of
greedy-type bases, and the X_d perturbation used to restrict them to
elements with pairwise distinct coefficient moduli."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, NamedTuple

import numpy as np

from .errors import CapacityError, InvalidInput
from .spaces import SpaceSpec, _row_norms, as_vector, basis_constants, eval_norm
from .tga import (GREEDY_SET_CAP, SubsetTable, _masks, greedy_ordering, greedy_sets,
                  oversampled_size, sigma_m_oracle)

__all__ = [
    "SampleConfig", "ConstantEstimate", "sample_family", "alternating_sqrt_vector",
    "unconditionality_estimate", "DemocracyProfile", "democracy_profile",
    "super_democracy_estimate", "quasi_greedy_estimate", "greedy_estimate",
    "almost_greedy_estimate", "semi_greedy_estimate", "greedy_type_ratios",
    "oversampling_estimate", "xd_perturb", "tie_orders", "is_xd", "XdReport", "xd_comparison",
    "replay", "REPLAY_TOL",
]

REPLAY_TOL = 1e-9
EXHAUSTIVE_MAX_N = 12
GREEDY_MAX_N = 12
ALMOST_MAX_N = 16
LAWS = ("uniform", "geometric", "tied", "structured", "mixed")


@dataclass
class SampleConfig:
    n: int
    samples: int = 50
    seed: int = 0
    law: str = "mixed"
    mode: str = "auto"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidInput("n must be a positive integer")
        if int(self.samples) != self.samples or self.samples < 1:
            raise InvalidInput("samples must be a positive integer")
        if self.law not in LAWS:
            raise InvalidInput(f"law must be one of {LAWS}")
        if self.mode not in ("auto", "exhaustive", "sampled"):
            raise InvalidInput("mode must be auto, exhaustive or sampled")

    def exhaustive(self, limit: int = EXHAUSTIVE_MAX_N) -> bool:
        if self.mode == "exhaustive":
            if self.n > limit:
                raise CapacityError(f"exhaustive mode needs n <= {limit}")
            return True
        return self.mode == "auto" and self.n <= limit


@dataclass
class ConstantEstimate:
    name: str
    value: float
    witness: dict
    method: str
    sample_count: int
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "witness": self.witness,
                "method": self.method, "sample_count": self.sample_count,
                "extras": self.extras}

    @classmethod
    def from_dict(cls, d: dict) -> "ConstantEstimate":
        return cls(d["name"], float(d["value"]), d["witness"], d["method"],
                   int(d["sample_count"]), d.get("extras", {}))


class _Max:
    """Running max with first-seen tie-break (deterministic in sample order)."""

    def __init__(self):
        self.value = -math.inf
        self.witness = None

    def offer(self, value, make_witness):
        if value > self.value:
            self.value = float(value)
            self.witness = make_witness()


# --- sample families ---------------------------------------------------------

def alternating_sqrt_vector(n: int) -> np.ndarray:
    """``sum_j (-1)**j / sqrt(j) e_j`` for j = 1..n."""
    j = np.arange(1, n + 1, dtype=float)
    return (-1.0) ** j / np.sqrt(j)


def _structured(n: int) -> list:
    j = np.arange(1, n + 1, dtype=float)
    out = [alternating_sqrt_vector(n), np.ones(n), 2.0 ** -(j - 1)]
    half = np.zeros(n)
    half[: (n + 1) // 2] = 1.0
    out.append(half)
    odd = np.zeros(n)
    odd[0::2] = 1.0
    out.append(odd)
    if n >= 2:
        even = np.zeros(n)
        even[1::2] = 1.0
        out.append(even)
        # f_k / g_k pairs of the discontinuity example, k = 2
        A, B = np.zeros(n), np.zeros(n)
        A[: n // 2] = 1.0
        B[n // 2: 2 * (n // 2)] = 1.0
        out.append(1.25 * A + B)
        out.append(A + 1.25 * B)
        out.append(np.where(np.arange(n) % 2 == 0, 1.0, -1.0))
        # interleaved pairs with k = 16; they separate the two summands of a
        # direct sum without enumerating the ties of a flat vector
        t = 257.0 / 256.0
        out.append(t * odd + even)
        out.append(odd + t * even)
    return out


def _random_vector(law: str, n: int, rng: np.random.Generator) -> np.ndarray:
    if law == "uniform":
        return rng.uniform(-1.0, 1.0, n)
    if law == "geometric":
        r = rng.uniform(0.3, 0.9)
        v = r ** np.arange(n) * rng.choice([-1.0, 1.0], n)
        return v[rng.permutation(n)]
    if law == "tied":
        return rng.choice([-1.0, -0.5, 0.0, 0.5, 1.0], n)
    raise InvalidInput(law)


def sample_family(cfg: SampleConfig) -> list:
    """Deterministic sample list for ``cfg``; sample ``i`` draws from its own
    generator seeded by ``(seed, i)`` so the list does not depend on how it
    is consumed."""
    n = cfg.n
    out = []
    if cfg.law in ("structured", "mixed"):
        out.extend(_structured(n))
    laws = ("uniform", "geometric", "tied") if cfg.law in ("mixed", "structured") else (cfg.law,)
    i = 0
    while len(out) < cfg.samples:
        rng = np.random.default_rng([cfg.seed, i])
        v = _random_vector(laws[i % len(laws)], n, rng)
        if not np.any(v):
            v[int(rng.integers(n))] = 1.0
        out.append(v)
        i += 1
    return [v for v in out[: cfg.samples] if np.any(v)]


def _family(cfg, samples):
    return [as_vector(v) for v in samples] if samples is not None else sample_family(cfg)


def _tolist(v):
    return [float(t) for t in v]


# --- unconditionality ----------------------------------------------------------

def _unconditional_candidates(x, rng, n_random=32):
    supp = [int(i) for i in np.flatnonzero(x)]
    s = set(supp)
    cands = [tuple(i for i in range(1, x.size, 2) if i in s),
             tuple(i for i in range(0, x.size, 2) if i in s)]
    pi = greedy_ordering(x).pi
    step = max(1, len(supp) // 16)
    cands += [tuple(sorted(pi[:k])) for k in range(0, len(supp) + 1, step)]
    for _ in range(n_random):
        keep = rng.random(len(supp)) < 0.5
        cands.append(tuple(i for i, k in zip(supp, keep) if k))
    comp = []
    for B in cands:
        b = set(B)
        comp.append(tuple(i for i in supp if i not in b))
    return list(dict.fromkeys(cands + comp))


def unconditionality_estimate(space: SpaceSpec, cfg: SampleConfig, samples=None) -> ConstantEstimate:
    """``sup ||P_B x|| / ||x||`` over samples and sets B inside the support.

    B and supp(x) minus B are both candidates, so the same number bounds
    ``||x - P_B x|| / ||x||``.  Exhaustive over all B when the support has at
    most 12 points (and the mode allows it).
    """
    xs = _family(cfg, samples)
    exhaustive = cfg.exhaustive()
    best = _Max()
    for k, x in enumerate(xs):
        supp = [int(i) for i in np.flatnonzero(x)]
        if exhaustive and len(supp) <= EXHAUSTIVE_MAX_N:
            cands = [B for r in range(len(supp) + 1) for B in combinations(supp, r)]
        else:
            cands = _unconditional_candidates(x, np.random.default_rng([cfg.seed, k, 1]))
        nx = eval_norm(space, x)
        for start in range(0, len(cands), 1024):
            chunk = cands[start:start + 1024]
            Y = np.where(_masks(x.size, chunk), x[None, :], 0.0)
            vals = _row_norms(space, Y) / nx
            j = int(np.argmax(vals))
            best.offer(vals[j], lambda: {"x": _tolist(x), "B": list(chunk[j])})
    return ConstantEstimate("K", best.value, best.witness,
                            "exhaustive" if exhaustive else "sampled", len(xs))


# --- democracy ------------------------------------------------------------------

class DemocracyProfile(NamedTuple):
    phi_upper: np.ndarray
    phi_lower: np.ndarray
    upper_sets: list
    lower_sets: list
    delta_d: ConstantEstimate


def _set_family(n, n_random, seed, exhaustive):
    """Index sets by size: all of them, or intervals, parity classes and
    random sets."""
    if exhaustive:
        for r in range(1, n + 1):
            yield from combinations(range(n), r)
        return
    starts = sorted(set(np.linspace(0, n - 1, 9).astype(int)))
    for m in range(1, n + 1):
        for s in starts:
            if s + m <= n:
                yield tuple(range(s, s + m))
        yield tuple(range(n - m, n))
    for par in (0, 1):
        idx = list(range(par, n, 2))
        for m in range(1, len(idx) + 1):
            yield tuple(idx[:m])
    rng = np.random.default_rng([seed, 2])
    for _ in range(n_random):
        m = int(rng.integers(1, n + 1))
        yield tuple(sorted(int(i) for i in rng.choice(n, m, replace=False)))


def _size_extremes(space, n, sets_iter, signs_for=None, chunk=65536):
    """Per size m: (max norm, argmax (set, signs)), (min norm, argmin)."""
    up = np.full(n + 1, -np.inf)
    lo = np.full(n + 1, np.inf)
    up_w = [None] * (n + 1)
    lo_w = [None] * (n + 1)
    rows, keys = [], []

    def flush():
        if not rows:
            return
        Y = np.array(rows)
        vals = _row_norms(space, Y)
        for r, key in enumerate(keys):
            m = len(key[0])
            v = vals[r]
            if v > up[m]:
                up[m], up_w[m] = v, key
            if v < lo[m]:
                lo[m], lo_w[m] = v, key
        rows.clear()
        keys.clear()

    for A in sets_iter:
        patterns = signs_for(A) if signs_for else [None]
        for eps in patterns:
            v = np.zeros(n)
            v[list(A)] = 1.0 if eps is None else eps
            rows.append(v)
            keys.append((tuple(A), None if eps is None else tuple(int(e) for e in eps)))
        if len(rows) >= chunk:
            flush()
    flush()
    return up, lo, up_w, lo_w


def _delta(up, lo, up_w, lo_w):
    """max over m <= m' of up[m] / lo[m'] with witnesses."""
    best, wit = -np.inf, None
    run_max, run_arg = -np.inf, None
    for m in range(1, len(up)):
        if up[m] > run_max:
            run_max, run_arg = up[m], m
        if np.isfinite(lo[m]) and lo[m] > 0 and np.isfinite(run_max):
            r = run_max / lo[m]
            if r > best:
                best, wit = r, (up_w[run_arg], lo_w[m])
    return float(best), wit


def democracy_profile(space: SpaceSpec, n: int, n_random: int = 200, seed: int = 0,
                      exhaustive: bool | None = None) -> DemocracyProfile:
    """Extremal norms of indicator vectors by size and the ratio Delta_d.

    Exhaustive over all subsets for ``n <= 20`` unless ``exhaustive=False``.
    ``phi_upper[m]``/``phi_lower[m]`` are indexed by the set size m (entry 0
    is unused and NaN).
    """
    if exhaustive is None:
        exhaustive = n <= 20
    sets = _set_family(n, n_random, seed, exhaustive)
    up, lo, up_w, lo_w = _size_extremes(space, n, sets)
    value, wit = _delta(up, lo, up_w, lo_w)
    up[~np.isfinite(up)] = np.nan
    lo[~np.isfinite(lo)] = np.nan
    up[0] = lo[0] = np.nan
    est = ConstantEstimate("Delta_d", value, {"n": n, "A": list(wit[0][0]), "B": list(wit[1][0])},
                           "exhaustive" if exhaustive else "sampled", 1)
    return DemocracyProfile(up, lo, [w and list(w[0]) for w in up_w],
                            [w and list(w[0]) for w in lo_w], est)


def super_democracy_estimate(space: SpaceSpec, cfg: SampleConfig, n_random: int = 200,
                             sign_samples: int = 16) -> ConstantEstimate:
    """``sup ||1_{eps A}|| / ||1_{eta B}||`` over |A| <= |B| and signs.

    Sets are all subsets of 1..n in exhaustive mode, otherwise the democracy
    families; sign patterns are exhaustive for sets of size <= 12 and sampled
    (always including eps = 1) beyond.  ``extras['delta_d']`` is the
    democracy ratio over the same sets with eps = eta = 1.
    """
    n = cfg.n
    exhaustive = cfg.exhaustive()
    rng = np.random.default_rng([cfg.seed, 3])

    def signs_for(A):
        k = len(A)
        if k <= EXHAUSTIVE_MAX_N:
            return [np.array(s, dtype=float) for s in product((1.0, -1.0), repeat=k)]
        pats = [np.ones(k), (-1.0) ** np.arange(k)]
        pats += [rng.choice([-1.0, 1.0], k) for _ in range(sign_samples)]
        return pats

    sets = list(_set_family(n, n_random, cfg.seed, exhaustive))
    up, lo, up_w, lo_w = _size_extremes(space, n, sets, signs_for)
    value, wit = _delta(up, lo, up_w, lo_w)
    dup, dlo, dupw, dlow = _size_extremes(space, n, sets)
    dval, _ = _delta(dup, dlo, dupw, dlow)
    (A, eps), (B, eta) = wit
    return ConstantEstimate("Delta_s", value,
                            {"n": n, "A": list(A), "eps": list(eps), "B": list(B), "eta": list(eta)},
                            "exhaustive" if exhaustive else "sampled", len(sets),
                            {"delta_d": dval})


# --- greedy-type ratios --------------------------------------------------------

def _all_greedy_sets(x, cap=GREEDY_SET_CAP):
    out = []
    for m in range(x.size + 1):
        for A in greedy_sets(x, m, cap=cap - len(out)):
            out.append(A)
        if len(out) >= cap:
            break
    return out


def _greedy_masks(x, cap):
    """Rows of a boolean mask per greedy set, in the order of
    ``_all_greedy_sets``, with the sorted set alongside.  Sizes whose
    threshold is untied have a unique greedy set, read off the ranks."""
    v = np.abs(x)
    n = v.size
    pi = np.array(greedy_ordering(x).pi, dtype=int)
    rank = np.empty(n, dtype=int)
    rank[pi] = np.arange(n)
    mods = v[pi]
    count = 0
    for m in range(n + 1):
        if count >= cap:
            return
        if 0 < m < n and mods[m - 1] != 0 and mods[m - 1] == mods[m]:
            for A in greedy_sets(x, m, cap=cap - count):
                mask = np.zeros(n, dtype=bool)
                mask[list(A)] = True
                count += 1
                yield mask, A
        else:
            count += 1
            yield rank < m, None


def quasi_greedy_estimate(space: SpaceSpec, cfg: SampleConfig, samples=None,
                          cap: int = GREEDY_SET_CAP) -> ConstantEstimate:
    """``sup ||x - P_A x|| / ||x||`` over samples and all their greedy sets
    (every size, every choice among tied coefficients, at most ``cap`` per
    sample)."""
    xs = _family(cfg, samples)
    best = _Max()
    for x in xs:
        nx = eval_norm(space, x)
        gen = _greedy_masks(x, cap)
        while True:
            chunk = [item for _, item in zip(range(256), gen)]
            if not chunk:
                break
            M = np.array([mk for mk, _ in chunk])
            vals = _row_norms(space, np.where(M, 0.0, x[None, :])) / nx
            j = int(np.argmax(vals))
            A = chunk[j][1]
            if A is None:
                A = tuple(int(i) for i in np.flatnonzero(M[j]))
            best.offer(vals[j], lambda A=A: {"x": _tolist(x), "A": list(A)})
    return ConstantEstimate("C_qg", best.value, best.witness, "greedy-sets", len(xs))


class GreedyRatios(NamedTuple):
    A: tuple
    quasi: float
    almost: float
    greedy: float
    semi: float


def greedy_type_ratios(space: SpaceSpec, x, chebyshev: bool = True,
                       table: SubsetTable | None = None) -> list:
    """Quasi-greedy, almost-greedy, greedy and semi-greedy ratios of ``x``
    for each of its greedy sets, all read from one SubsetTable.

    0/0 ratios are reported as NaN.  With ``chebyshev=False`` the greedy and
    semi-greedy entries are NaN.
    """
    x = as_vector(x)
    T = table or SubsetTable(space, x, chebyshev=chebyshev)
    out = []
    for A in _all_greedy_sets(x):
        m = len(A)
        num = T.proj_residual(A)
        bpe = T.best_projection(m)[0]
        q = _div(num, T.norm)
        al = _div(num, bpe)
        if chebyshev:
            sig = T.sigma(m)[0]
            g = _div(num, sig)
            s = _div(T.cheb_residual(A), sig)
        else:
            g = s = math.nan
        out.append(GreedyRatios(A, q, al, g, s))
    return out


def _div(a, b):
    if b == 0:
        return math.nan if a == 0 else math.inf
    return a / b


def _cheb_coeffs(space, x, B):
    from .tga import chebyshev_rows
    _, _, Y, _ = chebyshev_rows(space, x, [tuple(B)])
    return [float(x[i] - Y[0, i]) for i in B]


def _ratio_estimate(kind, space, cfg, samples, max_n):
    if cfg.n > max_n:
        raise CapacityError(f"{kind} estimate needs n <= {max_n} for its exhaustive oracles")
    xs = _family(cfg, samples)
    cheb = kind in ("C_g", "C_sg")
    best = _Max()
    count = 0
    for x in xs:
        T = SubsetTable(space, x, chebyshev=cheb)
        for r in greedy_type_ratios(space, x, chebyshev=cheb, table=T):
            v = {"C_al": r.almost, "C_g": r.greedy, "C_sg": r.semi}[kind]
            if math.isnan(v):
                continue
            count += 1

            def wit(x=x, r=r, T=T):
                m = len(r.A)
                w = {"x": _tolist(x), "A": list(r.A)}
                if kind == "C_al":
                    w["B"] = list(T.best_projection(m)[1])
                else:
                    B = T.sigma(m)[1]
                    w["B"] = list(B)
                    w["coefficients"] = _cheb_coeffs(space, x, B)
                    if kind == "C_sg":
                        w["A_coefficients"] = _cheb_coeffs(space, x, r.A)
                return w
            best.offer(v, wit)
    return ConstantEstimate(kind, best.value, best.witness, "exhaustive-oracle", len(xs),
                            {"ratio_count": count})


def almost_greedy_estimate(space, cfg, samples=None) -> ConstantEstimate:
    """``sup ||x - P_A x|| / min_{|B|<=|A|} ||x - P_B x||`` over greedy sets."""
    return _ratio_estimate("C_al", space, cfg, samples, ALMOST_MAX_N)


def greedy_estimate(space, cfg, samples=None) -> ConstantEstimate:
    """``sup ||x - P_A x|| / sigma_{|A|}(x)`` over greedy sets."""
    return _ratio_estimate("C_g", space, cfg, samples, GREEDY_MAX_N)


def semi_greedy_estimate(space, cfg, samples=None) -> ConstantEstimate:
    """Chebyshev residual on the greedy set over ``sigma_{|A|}(x)``."""
    return _ratio_estimate("C_sg", space, cfg, samples, GREEDY_MAX_N)


def oversampling_estimate(space: SpaceSpec, cfg: SampleConfig, m: int, lambdas: Iterable[float],
                          samples=None) -> dict:
    """Max over samples of ``||x - P_A x|| / sigma_m(x)`` with A the greedy set
    of size ceil(lambda*m), one ConstantEstimate per lambda.  ``sigma_m`` is
    computed once per sample and shared by all lambdas."""
    lambdas = [float(l) for l in lambdas]
    xs = _family(cfg, samples)
    for lam in lambdas:
        if not lam > 1:
            raise InvalidInput("every lambda must be > 1")
        if oversampled_size(m, lam) > cfg.n:
            raise InvalidInput(f"ceil({lam}*{m}) exceeds n={cfg.n}")
    best = {lam: _Max() for lam in lambdas}
    for x in xs:
        sig = sigma_m_oracle(space, x, m)
        pi = greedy_ordering(x).pi
        for lam in lambdas:
            A = tuple(sorted(pi[:oversampled_size(m, lam)]))
            num = float(_row_norms(space, np.where(_masks(x.size, [A]), 0.0, x[None, :]))[0])
            r = _div(num, sig.value)
            if math.isnan(r):
                continue
            best[lam].offer(r, lambda: {"x": _tolist(x), "A": list(A), "m": m, "lambda": lam,
                                        "B": list(sig.witness_set),
                                        "coefficients": sig.coefficients})
    return {lam: ConstantEstimate(f"C_lambda({lam:g})", b.value, b.witness, "exhaustive-oracle",
                                  len(xs)) for lam, b in best.items()}


# --- X_d perturbation ----------------------------------------------------------

def is_xd(x) -> bool:
    """Nonzero coefficient moduli pairwise distinct (exact comparison)."""
    a = np.abs(as_vector(x))
    a = a[a != 0]
    return np.unique(a).size == a.size


def xd_perturb(x, eps: float, p: float = 1.0, order=None) -> np.ndarray:
    """``x_n + sign(x_n) * eps**(k_n/p)`` on the support of ``x``.

    ``k_n`` is the 1-based index n itself by default; passing ``order`` (a
    permutation of ``range(len(x))``) gives exponent k to ``order[k-1]``
    instead, which selects how ties of ``x`` are resolved.

    Perturbations below the floating-point resolution of a coefficient are
    lost in rounding; any tie that survives is then split by one-ulp steps
    away from zero, giving the smaller exponent the larger modulus just as
    the exact perturbation would.  The greedy ordering of the result is that
    of ``x`` with ties resolved by exponent, as long as ``eps**(1/p)`` is
    below every gap between distinct moduli of ``x``.
    """
    x = as_vector(x)
    if not 0 < eps < 1:
        raise InvalidInput("eps must lie in (0, 1)")
    if not p > 0:
        raise InvalidInput("p must be positive")
    n = x.size
    if order is None:
        rank = np.arange(1, n + 1)
    else:
        order = [int(i) for i in order]
        if sorted(order) != list(range(n)):
            raise InvalidInput("order must be a permutation of range(len(x))")
        rank = np.empty(n, dtype=int)
        rank[order] = np.arange(1, n + 1)
    supp = np.flatnonzero(x)
    out = x.copy()
    out[supp] += np.sign(x[supp]) * eps ** (rank[supp] / p)
    mod = np.abs(out)
    seq = sorted(supp.tolist(), key=lambda i: (-mod[i], rank[i]))
    for k in range(len(seq) - 2, -1, -1):
        i, j = seq[k], seq[k + 1]
        if mod[i] <= mod[j]:
            mod[i] = np.nextafter(mod[j], np.inf)
    out[supp] = np.sign(x[supp]) * mod[supp]
    return out


def tie_orders(x, cap: int = GREEDY_SET_CAP) -> list:
    """Exponent orders for ``xd_perturb`` realizing every greedy set of ``x``.

    For each greedy set A the order lists coordinates by decreasing modulus
    with A first among ties, so the perturbed vector has A as its unique
    greedy set of size |A|.  Duplicates are dropped; an untied ``x`` gives a
    single order.
    """
    x = as_vector(x)
    a = np.abs(x)
    orders = []
    for A in _all_greedy_sets(x, cap):
        s = set(A)
        orders.append(tuple(sorted(range(x.size), key=lambda i: (-a[i], i not in s, i))))
    return list(dict.fromkeys(orders))


class XdReport(NamedTuple):
    unrestricted: ConstantEstimate
    restricted: dict
    ratio: dict
    quasi_greedy_xd: ConstantEstimate
    democracy_xd: float
    perturbation_bound_ok: bool
    perturbation_worst: float
    all_in_xd: bool

    def to_dict(self) -> dict:
        return {"unrestricted": self.unrestricted.to_dict(),
                "restricted": {f"{k:g}": v.to_dict() for k, v in self.restricted.items()},
                "ratio": {f"{k:g}": v for k, v in self.ratio.items()},
                "quasi_greedy_xd": self.quasi_greedy_xd.to_dict(),
                "democracy_xd": self.democracy_xd,
                "perturbation_bound_ok": self.perturbation_bound_ok,
                "perturbation_worst": self.perturbation_worst,
                "all_in_xd": self.all_in_xd}


def _disjoint_pairs(n, rng, limit=4000):
    if 3 ** n <= limit:
        for lab in product((0, 1, 2), repeat=n):
            A = tuple(i for i, t in enumerate(lab) if t == 1)
            B = tuple(i for i, t in enumerate(lab) if t == 2)
            if A and len(A) <= len(B):
                yield A, B
        return
    for _ in range(limit):
        lab = rng.integers(0, 3, n)
        A = tuple(int(i) for i in np.flatnonzero(lab == 1))
        B = tuple(int(i) for i in np.flatnonzero(lab == 2))
        if A and len(A) <= len(B):
            yield A, B


def xd_comparison(space: SpaceSpec, cfg: SampleConfig,
                  eps_schedule=(1e-2, 1e-3, 1e-4), samples=None) -> XdReport:
    """Almost-greedy estimates on the sample family and on X_d images of it.

    The X_d family holds, per sample, the default ``xd_perturb`` image and
    one image per tie resolution (``tie_orders``); every member has pairwise
    distinct moduli.  Also returned: the quasi-greedy estimate of the default
    images at the smallest eps, the democracy ratio recovered from X_d
    elements ``sum_A (1 - d_n) e_n + sum_B (1 + d_n) e_n`` (greedy set of
    size |B| is B, competitor is the projection onto A), and whether every
    image satisfies ``||x' - x||^p <= eps |supp x| c2^p``.
    """
    xs = _family(cfg, samples)
    p = space.convexity_exponent
    _, c2 = basis_constants(space, cfg.n)
    unres = almost_greedy_estimate(space, cfg, xs)
    orders = []
    for x in xs:
        t = tie_orders(x)
        orders.append([None] + (t if len(t) > 1 else []))
    restricted, ratio = {}, {}
    ok, worst, all_xd = True, 0.0, True
    defaults = None
    for eps in eps_schedule:
        imgs, defaults = [], []
        for x, ords in zip(xs, orders):
            for o in ords:
                y = xd_perturb(x, eps, p, o)
                lhs = eval_norm(space, y - x) ** p
                rhs = eps * np.count_nonzero(x) * c2 ** p
                worst = max(worst, lhs / rhs)
                ok = ok and lhs <= rhs
                all_xd = all_xd and is_xd(y)
                imgs.append(y)
                if o is None:
                    defaults.append(y)
        restricted[eps] = almost_greedy_estimate(space, cfg, imgs)
        ratio[eps] = unres.value / restricted[eps].value
    qg = quasi_greedy_estimate(space, cfg, defaults)
    eps = min(eps_schedule)
    dem = 0.0
    for A, B in _disjoint_pairs(cfg.n, np.random.default_rng([cfg.seed, 4])):
        a = np.zeros(cfg.n)
        a[list(A)] = 1.0 - eps ** ((np.array(A) + 1) / p)
        b = np.zeros(cfg.n)
        b[list(B)] = 1.0 + eps ** ((np.array(B) + 1) / p)
        dem = max(dem, eval_norm(space, a) / eval_norm(space, b))
    return XdReport(unres, restricted, ratio, qg, dem, ok, worst, all_xd)


# --- witness replay -------------------------------------------------------------

def _norm_minus(space, x, B, coeffs):
    y = x.copy()
    for i, c in zip(B, coeffs):
        y[i] -= c
    return eval_norm(space, y)


def _proj_res(space, x, A):
    y = x.copy()
    y[list(A)] = 0.0
    return eval_norm(space, y)


def replay(space: SpaceSpec, est: ConstantEstimate | dict) -> float:
    """Recompute the ratio certified by an estimate's witness."""
    if isinstance(est, dict):
        est = ConstantEstimate.from_dict(est)
    w = est.witness
    name = est.name
    if name in ("Delta_d", "Delta_s"):
        n = w["n"]
        a, b = np.zeros(n), np.zeros(n)
        a[w["A"]] = w.get("eps", 1.0) if w["A"] else 0.0
        b[w["B"]] = w.get("eta", 1.0) if w["B"] else 0.0
        return eval_norm(space, a) / eval_norm(space, b)
    x = np.array(w["x"], dtype=float)
    if name == "K":
        y = np.zeros_like(x)
        y[w["B"]] = x[w["B"]]
        return eval_norm(space, y) / eval_norm(space, x)
    if name == "C_qg":
        return _proj_res(space, x, w["A"]) / eval_norm(space, x)
    if name == "C_al":
        return _div(_proj_res(space, x, w["A"]), _proj_res(space, x, w["B"]))
    den = _norm_minus(space, x, w["B"], w["coefficients"])
    if name == "C_sg":
        return _div(_norm_minus(space, x, w["A"], w["A_coefficients"]), den)
    if name == "C_g" or name.startswith("C_lambda"):
        return _div(_proj_res(space, x, w["A"]), den)
    raise InvalidInput(f"no replay rule for {name!r}")
