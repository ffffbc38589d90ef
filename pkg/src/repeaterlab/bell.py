"""Bell-diagonal pair states: construction, noisy swapping and noisy pumping.

A pair is described by its four diagonal weights in the Bell basis, ordered
``(Psi-, Phi+, Phi-, Psi+)``. The singlet ``Psi-`` is the target state, so the
first weight is the fidelity.

Relative to the singlet every Bell state is a single-sided Pauli error, which
gives a Klein four-group labelling (bit flip, phase flip)::

    Psi- -> I (0, 0)    Phi+ -> Y (1, 1)    Phi- -> X (1, 0)    Psi+ -> Z (0, 1)

Swapping composes these labels by XOR. The pumping map below was read off the
noiseless circuit in :mod:`repeaterlab.oracle` and is checked against the
full density-matrix simulation in the test-suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

from .errors import DomainError, RepeaterError

NORM_TOL = 1e-12

# component index -> (bit flip, phase flip)
FLIPS = ((0, 0), (1, 1), (1, 0), (0, 1))
_INDEX = {f: k for k, f in enumerate(FLIPS)}


def compose(k1: int, k2: int) -> int:
    """Group product of two Bell labels (component indices)."""
    x1, z1 = FLIPS[k1]
    x2, z2 = FLIPS[k2]
    return _INDEX[(x1 ^ x2, z1 ^ z2)]


@dataclass(frozen=True)
class BellVector:
    """Diagonal of a two-qubit state in the (Psi-, Phi+, Phi-, Psi+) basis."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        comps = self.as_tuple()
        for x in comps:
            if not (-NORM_TOL <= x <= 1.0 + NORM_TOL) or math.isnan(x):
                raise DomainError(f"Bell weight {x!r} outside [0, 1]: {comps}")
        total = math.fsum(comps)
        if abs(total - 1.0) > NORM_TOL:
            raise DomainError(f"Bell weights sum to {total!r}, not 1")

    @property
    def fidelity(self) -> float:
        return self.a

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def __iter__(self):
        return iter(self.as_tuple())

    def __getitem__(self, k):
        return self.as_tuple()[k]

    def max_abs_diff(self, other: "BellVector") -> float:
        return max(abs(x - y) for x, y in zip(self, other))

    @classmethod
    def from_weights(cls, weights: Sequence[float]) -> "BellVector":
        """Normalise non-negative weights into a BellVector."""
        total = math.fsum(weights)
        if total <= 0.0:
            raise DomainError("weights must have positive sum")
        return cls(*(w / total for w in weights))


SINGLET = BellVector(1.0, 0.0, 0.0, 0.0)
MIXED = BellVector(0.25, 0.25, 0.25, 0.25)


@dataclass(frozen=True)
class ErrorModel:
    """Local error model: two-qubit gate reliability ``p`` and readout reliability ``eta``."""

    p: float = 1.0
    eta: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise DomainError(f"gate reliability p={self.p} outside (0, 1]")
        if not 0.0 < self.eta <= 1.0:
            raise DomainError(f"measurement reliability eta={self.eta} outside (0, 1]")


PERFECT = ErrorModel(1.0, 1.0)


@dataclass(frozen=True)
class PurifyOutcome:
    state: BellVector
    success_prob: float


def shape_state(F0: float, upsilon: float = 0.0) -> BellVector:
    """Elementary pair with fidelity ``F0`` and error shape ``upsilon``.

    ``upsilon = 0`` gives pure phase errors, ``upsilon = 1/3`` a Werner state.
    """
    if not 0.0 < F0 <= 1.0:
        raise DomainError(f"F0={F0} outside (0, 1]")
    if not 0.0 <= upsilon <= 1.0 / 3.0 + 1e-15:
        raise DomainError(f"upsilon={upsilon} outside [0, 1/3]")
    e = 1.0 - F0
    return BellVector(F0, e * upsilon, e * upsilon, max(e * (1.0 - 2.0 * upsilon), 0.0))


# (stored label, aux label) -> (output label, heralded as success by the
# noiseless circuit). Indices follow the component order a, b, c, d.
PUMP_TABLE = {
    (0, 0): (0, True), (0, 1): (3, True), (0, 2): (0, False), (0, 3): (3, False),
    (1, 0): (3, True), (1, 1): (0, True), (1, 2): (3, False), (1, 3): (0, False),
    (2, 0): (2, False), (2, 1): (1, False), (2, 2): (2, True), (2, 3): (1, True),
    (3, 0): (1, False), (3, 1): (2, False), (3, 2): (1, True), (3, 3): (2, True),
}


def readout_flips(eta: float) -> tuple[float, float, float, float]:
    """Distribution of the Pauli error left by two eta-noisy readouts in a swap."""
    q = 1.0 - eta
    # both right, both wrong, one wrong (either bit)
    return (eta * eta, q * q, eta * q, eta * q)


def convolve(x: BellVector, y: BellVector) -> tuple[float, ...]:
    out = [0.0, 0.0, 0.0, 0.0]
    for i, xi in enumerate(x):
        if xi == 0.0:
            continue
        for j, yj in enumerate(y):
            out[compose(i, j)] += xi * yj
    return tuple(out)


def connect_pair(left: BellVector, right: BellVector, err: ErrorModel = PERFECT) -> BellVector:
    """Entanglement swap of two pairs through a noisy Bell measurement.

    The outer pair ends up in the group convolution of the two inputs, smeared
    by the readout errors and mixed with the fully depolarised state with
    weight ``1 - p``.
    """
    joined = convolve(left, right)
    noisy = convolve(BellVector(*joined), BellVector(*readout_flips(err.eta)))
    p = err.p
    return BellVector(*(p * w + (1.0 - p) / 4.0 for w in noisy))


def connect_chain(pairs: Sequence[BellVector], err: ErrorModel = PERFECT) -> BellVector:
    """Connect consecutive pairs left to right; a single pair is returned as is."""
    if len(pairs) == 0:
        raise DomainError("connect_chain needs at least one pair")
    return reduce(lambda acc, nxt: connect_pair(acc, nxt, err), pairs[1:], pairs[0])


def purify_step(stored: BellVector, aux: BellVector, err: ErrorModel = PERFECT) -> PurifyOutcome:
    """One pumping step of ``stored`` with the auxiliary pair ``aux``.

    Both local two-qubit gates carry reliability ``p`` and both electron
    readouts reliability ``eta``; success means opposite readouts.
    """
    p2 = err.p * err.p
    eta = err.eta
    keep = eta * eta + (1.0 - eta) ** 2
    leak = 2.0 * eta * (1.0 - eta)
    w = [0.0, 0.0, 0.0, 0.0]
    for (k1, k2), (out, ok) in PUMP_TABLE.items():
        prob = stored[k1] * aux[k2]
        if prob:
            w[out] += prob * (keep if ok else leak)
    floor = (1.0 - p2) / 8.0
    w = [p2 * x + floor for x in w]
    p_s = math.fsum(w)
    if p_s <= 0.0:
        raise RepeaterError("purification success probability is zero")
    return PurifyOutcome(BellVector(*(x / p_s for x in w)), p_s)
