"""Nested swap-and-pump protocol with two qubits per node.

Distances are counted in repeater stations: ``n`` stations span ``n - 1``
elementary links. Over ``n`` stations the protocol

* builds a B pair by connecting two purified half-distance A pairs through a
  fresh elementary pair,
* builds a C pair from three fresh elementary pairs and two shorter A pairs,
* pumps B with successive C pairs ``M`` times, giving the A pair for ``n``.

The mean time follows the expected-value recursion in which a failed pumping
step throws the stored pair away and starts over.

Base cases
----------
``n = 2``: B and C are fresh elementary pairs. For ``n = 3, 4, 5`` the generic
formulas reference ``A(1)``, a pair between a station and itself. With
``base_scheme="zero_length"`` (default) that entry is dropped from the chain
and costs no time, so every chain spans exactly ``n - 1`` links (and ``C(3)``
is two elementary pairs). ``base_scheme="fresh_pair"`` instead substitutes a
fresh elementary pair of time ``T0`` for ``A(1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bell import (
    MIXED,
    PERFECT,
    SINGLET,
    BellVector,
    ErrorModel,
    connect_chain,
    purify_step,
    shape_state,
)
from .errors import (
    AsymptoteOscillationError,
    DomainError,
    NoFixedPointError,
    PathologicalParametersError,
    RepeaterError,
)
from .photonics import GenerationOutcome

MIN_SUCCESS = 1e-9
BASE_SCHEMES = ("zero_length", "fresh_pair")


@dataclass(frozen=True)
class PairState:
    state: BellVector
    avg_time: float

    def __post_init__(self):
        if not self.avg_time >= 0.0:
            raise DomainError(f"avg_time={self.avg_time} must be >= 0")

    @property
    def fidelity(self) -> float:
        return self.state.a


@dataclass(frozen=True)
class NestingConfig:
    F0: BellVector
    T0: float
    t_c: float
    err: ErrorModel = PERFECT
    M: int | tuple[int, ...] = 1
    n_total: int = 2
    base_scheme: str = "fresh_pair"

    def __post_init__(self):
        if isinstance(self.M, list):
            object.__setattr__(self, "M", tuple(self.M))
        steps = self.M if isinstance(self.M, tuple) else (self.M,)
        if not steps or any(int(m) != m or m < 0 for m in steps):
            raise DomainError(f"M={self.M!r} must be non-negative integers")
        if self.n_total < 2:
            raise DomainError(f"n_total={self.n_total} must be >= 2")
        if not self.T0 > 0.0 or not self.t_c >= 0.0:
            raise DomainError("T0 must be > 0 and t_c >= 0")
        if self.base_scheme not in BASE_SCHEMES:
            raise DomainError(f"base_scheme must be one of {BASE_SCHEMES}")

    @classmethod
    def from_generation(cls, gen: GenerationOutcome, upsilon=0.0, **kwargs) -> "NestingConfig":
        return cls(F0=shape_state(gen.F0, upsilon), T0=gen.T0, t_c=gen.t_c, **kwargs)

    def steps_at(self, n: int) -> int:
        """Pumping steps used at distance ``n`` (a per-level list is indexed by nesting level)."""
        if isinstance(self.M, tuple):
            lvl = nesting_level(n)
            return self.M[min(lvl, len(self.M) - 1)]
        return self.M


def nesting_level(n: int) -> int:
    """0 for two stations, then one more per halving."""
    lvl = 0
    while n > 2:
        n = (n + 1) // 2
        lvl += 1
    return lvl


def halves(n: int) -> tuple[int, int]:
    """(n/2, n'/2): floor and ceiling halves."""
    return n // 2, (n + 1) // 2


@dataclass(frozen=True)
class PumpStep:
    state: PairState
    success_prob: float


@dataclass(frozen=True)
class LevelRecord:
    n: int
    B: PairState
    C: PairState
    steps: tuple[PumpStep, ...]

    @property
    def A(self) -> PairState:
        return self.steps[-1].state if self.steps else self.B


@dataclass
class ProtocolTrace:
    config: NestingConfig
    levels: dict[int, LevelRecord] = field(default_factory=dict)

    @property
    def final(self) -> PairState:
        return self.levels[self.config.n_total].A

    def A(self, n: int) -> PairState:
        return self.levels[n].A


def pump_trace(B: PairState, C: PairState, M: int, err: ErrorModel, n: int, t_c: float) -> tuple[PumpStep, ...]:
    """All intermediate A_m pairs of ``M`` pumping steps of B with C pairs."""
    if M < 0:
        raise DomainError("M must be >= 0")
    steps = []
    cur = B
    overhead = C.avg_time + (n - 1) * t_c
    for _ in range(M):
        out = purify_step(cur.state, C.state, err)
        if out.success_prob < MIN_SUCCESS:
            raise PathologicalParametersError(
                f"purification success probability {out.success_prob:.3g} below {MIN_SUCCESS}"
            )
        cur = PairState(out.state, (cur.avg_time + overhead) / out.success_prob)
        steps.append(PumpStep(cur, out.success_prob))
    return tuple(steps)


def pump(B: PairState, C: PairState, M: int, err: ErrorModel, n: int, t_c: float) -> PairState:
    steps = pump_trace(B, C, M, err, n, t_c)
    return steps[-1].state if steps else B


def _sub_pair(k: int, memo: dict[int, LevelRecord], cfg: NestingConfig) -> PairState | None:
    """A(k) from the memo; ``None`` stands for a zero-length (absent) pair."""
    if k <= 0:
        return None
    if k == 1:
        if cfg.base_scheme == "fresh_pair":
            return PairState(cfg.F0, cfg.T0)
        return None
    try:
        return memo[k].A
    except KeyError:
        raise RepeaterError(f"internal error: A({k}) requested before it was computed") from None


def _chain(parts: Sequence[PairState | None], err: ErrorModel) -> BellVector:
    return connect_chain([x.state for x in parts if x is not None], err)


def _time(x: PairState | None) -> float:
    return 0.0 if x is None else x.avg_time


def build_B(n: int, memo: dict[int, LevelRecord], cfg: NestingConfig) -> PairState:
    if n == 2:
        return PairState(cfg.F0, cfg.T0)
    h, h2 = halves(n)
    left, right = _sub_pair(h, memo, cfg), _sub_pair(h2, memo, cfg)
    elem = PairState(cfg.F0, cfg.T0)
    state = _chain([left, elem, right], cfg.err)
    return PairState(state, _time(right) + cfg.T0 + h2 * cfg.t_c)


def build_C(n: int, memo: dict[int, LevelRecord], cfg: NestingConfig) -> PairState:
    if n == 2:
        return PairState(cfg.F0, cfg.T0)
    h, h2 = halves(n)
    elem = PairState(cfg.F0, cfg.T0)
    if n == 3 and cfg.base_scheme == "zero_length":
        parts = [elem, elem]
        inner_time = 0.0
    else:
        left, right = _sub_pair(h - 1, memo, cfg), _sub_pair(h2 - 1, memo, cfg)
        parts = [elem, left, elem, right, elem]
        inner_time = _time(right)
    state = _chain(parts, cfg.err)
    return PairState(state, inner_time + cfg.T0 + (n - 2) * cfg.t_c)


def required_distances(n: int) -> list[int]:
    """Every distance (>= 2) whose A pair is needed to build distance ``n``, ascending."""
    need = set()
    stack = [n]
    while stack:
        k = stack.pop()
        if k < 2 or k in need:
            continue
        need.add(k)
        if k > 2:
            h, h2 = halves(k)
            stack.extend((h, h2, h - 1, h2 - 1))
    return sorted(need)


def compute_level(n: int, memo: dict[int, LevelRecord], cfg: NestingConfig) -> LevelRecord:
    B = build_B(n, memo, cfg)
    C = build_C(n, memo, cfg)
    steps = pump_trace(B, C, cfg.steps_at(n), cfg.err, n, cfg.t_c)
    return LevelRecord(n, B, C, steps)


def recurse(cfg: NestingConfig, distances: Sequence[int] | None = None) -> ProtocolTrace:
    """Bottom-up memoised recursion up to ``cfg.n_total`` (plus any extra ``distances``)."""
    targets = {cfg.n_total, *(distances or ())}
    needed = sorted(set().union(*(required_distances(n) for n in targets)))
    trace = ProtocolTrace(cfg)
    for n in needed:
        trace.levels[n] = compute_level(n, trace.levels, cfg)
    return trace


def _fixed_point_from(seed: BellVector, C: BellVector, err: ErrorModel, tol: float, max_iter: int):
    cur = seed
    damping = 1.0
    history: list[float] = []
    for it in range(1, max_iter + 1):
        nxt = purify_step(cur, C, err).state
        if damping != 1.0:
            nxt = BellVector.from_weights([damping * y + (1 - damping) * x for x, y in zip(cur, nxt)])
        res = nxt.max_abs_diff(cur)
        cur = nxt
        if res < tol:
            return cur, it
        history.append(res)
        if damping == 1.0 and len(history) > 40 and res > history[-21]:
            damping = 0.5
    raise NoFixedPointError(f"no fixed point after {max_iter} iterations (residual {res:.3g})")


EXTREMAL_SEEDS = (
    BellVector(1.0, 0.0, 0.0, 0.0),
    BellVector(0.0, 1.0, 0.0, 0.0),
    BellVector(0.0, 0.0, 1.0, 0.0),
    BellVector(0.0, 0.0, 0.0, 1.0),
)


def fixed_point(C: BellVector, err: ErrorModel = PERFECT, tol: float = 1e-12, max_iter: int = 100_000,
                check_seeds: bool = True) -> BellVector:
    """Stored-pair state left unchanged by pumping with ``C`` under ``err``.

    Iterates from ``C`` itself. When gates are noisy (p < 1) the four pure Bell
    states are also used as seeds and must reach the same point; with p = 1
    whole lines of fixed points exist (e.g. for a perfect C) so the check is
    skipped.
    """
    fp, _ = _fixed_point_from(C, C, err, tol, max_iter)
    if check_seeds and err.p < 1.0:
        for seed in EXTREMAL_SEEDS:
            other, _ = _fixed_point_from(seed, C, err, tol, max_iter)
            if other.max_abs_diff(fp) > 1e-9:
                raise NoFixedPointError(
                    f"fixed point depends on the seed: {fp.as_tuple()} vs {other.as_tuple()}"
                )
    return fp


def aux_next_level(A: BellVector, F0: BellVector, err: ErrorModel) -> BellVector:
    """Auxiliary pair one nesting level up, built from two purified pairs and three fresh ones."""
    return connect_chain([A, A, F0, F0, F0], err)


@dataclass(frozen=True)
class StaircaseStep:
    level: int
    C: BellVector
    A: BellVector


@dataclass(frozen=True)
class Asymptote:
    fidelity: float
    state: BellVector
    staircase: tuple[StaircaseStep, ...]
    residual: float


def asymptote(F0: BellVector, err: ErrorModel = PERFECT, tol: float = 1e-10, max_levels: int = 500) -> Asymptote:
    """Iterate (build next-level aux pair -> purify to its fixed point) until stationary."""
    C = F0
    A = fixed_point(C, err)
    steps = [StaircaseStep(0, C, A)]
    for level in range(1, max_levels + 1):
        C = aux_next_level(A, F0, err)
        A_next = fixed_point(C, err)
        res = A_next.max_abs_diff(A)
        steps.append(StaircaseStep(level, C, A_next))
        A = A_next
        if res < tol:
            return Asymptote(A.a, A, tuple(steps), res)
    even, odd = steps[-2].A, steps[-1].A
    raise AsymptoteOscillationError(
        f"asymptote iteration did not settle in {max_levels} levels",
        points=(even, odd),
    )


def curve_intersections(F0: BellVector, err: ErrorModel = PERFECT, seeds: Sequence[BellVector] | None = None,
                        tol: float = 1e-10) -> list[BellVector]:
    """States where the purification curve meets the aux-construction curve.

    Solves A = FP(aux(A)) with a quasi-Newton method from several seeds. This
    is independent of the staircase iteration. The fully mixed state is
    always a (trivial) intersection and is included. Sorted by fidelity,
    highest first.
    """
    from scipy.optimize import root

    def to_vec(x):
        a, b, c = (float(v) for v in x)
        return BellVector.from_weights([max(a, 0.0), max(b, 0.0), max(c, 0.0), max(1.0 - a - b - c, 0.0)])

    def g(A):
        return fixed_point(aux_next_level(A, F0, err), err, check_seeds=False)

    def resid(x):
        A = to_vec(x)
        return np.array(g(A).as_tuple()[:3]) - np.array(A.as_tuple()[:3])

    if seeds is None:
        seeds = [SINGLET] + [shape_state(f, 0.0) for f in (0.99, 0.95, 0.9, 0.8, 0.7)]
    found = [MIXED]
    for seed in seeds:
        sol = root(resid, np.array(seed.as_tuple()[:3]), method="hybr", options={"xtol": 1e-14})
        A = to_vec(sol.x)
        if A.max_abs_diff(g(A)) > tol:
            continue
        if all(A.max_abs_diff(B) > 1e-7 for B in found):
            found.append(A)
    return sorted(found, key=lambda v: v.a, reverse=True)


def upper_intercept(F0: BellVector, err: ErrorModel = PERFECT) -> BellVector:
    """Highest-fidelity intersection of the two level-to-level curves."""
    return curve_intersections(F0, err)[0]


def fixed_point_profile(trace: ProtocolTrace) -> dict[int, BellVector]:
    """Fixed point of pumping with each distance's C pair."""
    err = trace.config.err
    return {n: fixed_point(rec.C.state, err) for n, rec in trace.levels.items()}


def loglog_slope(ns: Sequence[int], times: Sequence[float]) -> float:
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(times, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def direct_transmission_time(gen_P: float, t0: float, t_c: float) -> float:
    """Mean time of a single heralded link: (t0 + t_c) / P."""
    if not gen_P > 0.0:
        raise DomainError("P must be > 0")
    return (t0 + t_c) / gen_P

