"""Brute-force density-matrix reference for the purification and swap circuits.

Everything here works on explicit 4x4 / 16x16 complex matrices. It is slow
and only meant to pin down (and regression-test) the closed-form maps in
:mod:`repeaterlab.bell`.

Qubit conventions
-----------------
A two-qubit pair is ordered ``(i, j)`` with ``|0> = |down>`` for nuclear spins.
The Bell basis is ordered ``(Psi-, Phi+, Phi-, Psi+)``.

For the purification circuit the 16-dim register is ``(n_i, n_j, e_i, e_j)``:
the stored pair sits on the nuclear spins and the auxiliary pair on the
electron spins. For the swap circuit it is ``(L1, L2, R1, R2)`` and the middle
node holds ``L2`` and ``R1``.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .bell import BellVector, ErrorModel
from .errors import DomainError, RepeaterError

SQ2 = np.sqrt(2.0)

KET0 = np.array([1.0, 0.0], dtype=complex)
KET1 = np.array([0.0, 1.0], dtype=complex)

# columns are |Psi->, |Phi+>, |Phi->, |Psi+> in the |00>,|01>,|10>,|11> basis
BELL_BASIS = np.array(
    [
        [0, 1, 1, 0],
        [1, 0, 0, 1],
        [-1, 0, 0, 1],
        [0, 1, -1, 0],
    ],
    dtype=complex,
) / SQ2

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / SQ2

# |0> -> (|0> + i|1>)/sqrt2, |1> -> (|1> + i|0>)/sqrt2
PURIFY_ROTATION = np.array([[1, 1j], [1j, 1]], dtype=complex) / SQ2

# two-qubit gates on (nuclear, electron) at each end of the pair
GATE_I = np.zeros((4, 4), dtype=complex)
GATE_I[0, 0] = 1  # |down 0> -> |down 0>
GATE_I[1, 1] = 1  # |down 1> -> |down 1>
GATE_I[3, 2] = -1  # |up 0> -> -|up 1>
GATE_I[2, 3] = -1  # |up 1> -> -|up 0>

GATE_J = np.zeros((4, 4), dtype=complex)
GATE_J[1, 0] = 1  # |down 0> -> |down 1>
GATE_J[0, 1] = 1  # |down 1> -> |down 0>
GATE_J[2, 2] = 1
GATE_J[3, 3] = 1

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def _nqubits(rho):
    n = int(round(np.log2(rho.shape[0])))
    if rho.shape != (2**n, 2**n):
        raise DomainError(f"not a qubit density matrix: shape {rho.shape}")
    return n


def _embed(op, qubits, n):
    """Return the full 2**n operator acting as ``op`` on ``qubits``."""
    k = len(qubits)
    op = np.asarray(op, dtype=complex).reshape([2] * (2 * k))
    rest = [q for q in range(n) if q not in qubits]
    # build via tensordot on an identity, then permute axes into place
    full = np.tensordot(op, np.eye(2 ** len(rest), dtype=complex).reshape([2] * (2 * len(rest))), axes=0)
    order_out = list(qubits) + rest
    order_in = [n + q for q in qubits] + [n + q for q in rest]
    # axes of `full`: out(qubits), in(qubits), out(rest), in(rest)
    src = order_out[:k] + order_in[:k] + order_out[k:] + order_in[k:]
    perm = np.argsort(src)
    return full.transpose(perm).reshape(2**n, 2**n)


def apply_unitary(rho, U, qubits):
    full = _embed(U, list(qubits), _nqubits(rho))
    return full @ rho @ full.conj().T


def partial_trace(rho, keep):
    """Trace out every qubit not in ``keep`` (kept qubits retain their order)."""
    n = _nqubits(rho)
    keep = list(keep)
    drop = [q for q in range(n) if q not in keep]
    t = rho.reshape([2] * (2 * n))
    # move kept/dropped axes so that einsum can contract the dropped ones
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for q in drop:
        col[q] = row[q]
    out = "".join(row[q] for q in keep) + "".join(col[q] for q in keep)
    res = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    d = 2 ** len(keep)
    return res.reshape(d, d)


def _insert_identity(reduced, qubits, n):
    """Tensor ``reduced`` (on the complement of ``qubits``) with identity on ``qubits``."""
    rest = [q for q in range(n) if q not in qubits]
    k = len(qubits)
    full = np.kron(np.eye(2**k, dtype=complex), reduced)
    # `full` is ordered (qubits, rest); permute into natural order
    order = list(qubits) + rest
    t = full.reshape([2] * (2 * n))
    perm = [order.index(q) for q in range(n)]
    t = t.transpose(perm + [n + x for x in perm])
    return t.reshape(2**n, 2**n)


def check_density_matrix(rho, tol=1e-12):
    rho = np.asarray(rho, dtype=complex)
    _nqubits(rho)
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise DomainError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise DomainError(f"density matrix trace {np.trace(rho).real} != 1")
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise DomainError("density matrix is not positive semidefinite")
    return rho


def from_bell_vector(v: BellVector) -> np.ndarray:
    """Two-qubit density matrix that is diagonal in the Bell basis with weights ``v``."""
    return BELL_BASIS @ np.diag(np.asarray(v.as_tuple(), dtype=complex)) @ BELL_BASIS.conj().T


def bell_coefficients(rho):
    """Full matrix of ``rho`` in the Bell basis (same ordering as BELL_BASIS)."""
    return BELL_BASIS.conj().T @ rho @ BELL_BASIS


def diag_in_bell_basis(rho) -> BellVector:
    d = np.real(np.diag(bell_coefficients(rho)))
    # clip roundoff only; genuine negative weights mean a broken state
    d = np.where(np.abs(d) < 1e-15, 0.0, d)
    return BellVector(*(float(x) for x in d))


def off_diagonal_norm(rho):
    """Largest off-diagonal magnitude of ``rho`` in the Bell basis."""
    m = bell_coefficients(rho)
    return float(np.max(np.abs(m - np.diag(np.diag(m)))))


def noisy_gate(rho, U, which, p):
    """Imperfect two-qubit gate: ``p U rho U^+ + (1-p)/4 Tr_which(rho) (x) I_which``."""
    U = np.asarray(U, dtype=complex)
    if U.shape != (4, 4) or not np.allclose(U.conj().T @ U, np.eye(4), atol=1e-12):
        raise DomainError("U must be a 4x4 unitary")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"gate reliability p={p} outside [0, 1]")
    n = _nqubits(rho)
    which = list(which)
    ideal = apply_unitary(rho, U, which)
    if p == 1.0:
        return ideal
    rest = [q for q in range(n) if q not in which]
    reduced = partial_trace(rho, rest)
    return p * ideal + (1 - p) / 4 * _insert_identity(reduced, which, n)


def noisy_measure(rho, qubit, outcome, eta):
    """Apply the noisy projector for ``outcome`` on ``qubit``.

    Returns the unnormalised post-measurement state and the outcome probability.
    The state is ``eta P_k rho P_k + (1-eta) P_~k rho P_~k`` so that its trace
    is the probability of reading ``outcome``.
    """
    if not 0.0 < eta <= 1.0:
        raise DomainError(f"measurement reliability eta={eta} outside (0, 1]")
    if outcome not in (0, 1):
        raise DomainError("outcome must be 0 or 1")
    n = _nqubits(rho)
    right = np.outer(KET0, KET0) if outcome == 0 else np.outer(KET1, KET1)
    wrong = np.eye(2) - right
    Pr = _embed(right, [qubit], n)
    Pw = _embed(wrong, [qubit], n)
    post = eta * (Pr @ rho @ Pr) + (1 - eta) * (Pw @ rho @ Pw)
    return post, float(np.trace(post).real)


def purify_circuit(stored, aux, err: ErrorModel, gate_on_i=GATE_I, gate_on_j=GATE_J):
    """Run one pumping step: stored pair on nuclear spins, aux pair on electrons.

    Returns ``(post, P_S)`` where ``post`` is the normalised 4x4 state of the
    nuclear pair conditioned on opposite electron outcomes.
    """
    rho = np.kron(stored, aux)  # (n_i, n_j, e_i, e_j)
    for q in range(4):
        rho = apply_unitary(rho, PURIFY_ROTATION, [q])
    rho = noisy_gate(rho, gate_on_i, [0, 2], err.p)
    rho = noisy_gate(rho, gate_on_j, [1, 3], err.p)
    acc = np.zeros((16, 16), dtype=complex)
    for mi, mj in ((0, 1), (1, 0)):
        branch, _ = noisy_measure(rho, 2, mi, err.eta)
        branch, _ = noisy_measure(branch, 3, mj, err.eta)
        acc += branch
    p_s = float(np.trace(acc).real)
    if p_s <= 0.0:
        raise RepeaterError("purification circuit succeeded with probability 0")
    return partial_trace(acc, [0, 1]) / p_s, p_s


def _swap_corrections():
    """Pauli on R2 that returns each ideal Bell-measurement branch to the singlet."""
    singlet = from_bell_vector(BellVector(1.0, 0.0, 0.0, 0.0))
    rho = np.kron(singlet, singlet)
    rho = apply_unitary(rho, CNOT, [1, 2])
    rho = apply_unitary(rho, HADAMARD, [1])
    target = BELL_BASIS[:, 0]
    table = {}
    for m1, m2 in product((0, 1), repeat=2):
        branch, prob = noisy_measure(rho, 1, m1, 1.0)
        branch, prob = noisy_measure(branch, 2, m2, 1.0)
        out = partial_trace(branch, [0, 3]) / prob
        for name, P in PAULI.items():
            fixed = apply_unitary(out, P, [1])
            if abs(np.real(target.conj() @ fixed @ target) - 1.0) < 1e-12:
                table[(m1, m2)] = name
                break
        else:  # pragma: no cover - the Pauli group always suffices
            raise RepeaterError(f"no Pauli correction for outcome {(m1, m2)}")
    return table


SWAP_CORRECTIONS = _swap_corrections()


def swap_circuit(left, right, err: ErrorModel):
    """Noisy Bell measurement on (L2, R1) followed by a noiseless Pauli fix on R2.

    The Bell measurement is a noisy CNOT (one factor of p), a noiseless
    Hadamard and two eta-noisy single-qubit readouts.
    """
    rho = np.kron(left, right)
    rho = noisy_gate(rho, CNOT, [1, 2], err.p)
    rho = apply_unitary(rho, HADAMARD, [1])
    acc = np.zeros((4, 4), dtype=complex)
    for (m1, m2), fix in SWAP_CORRECTIONS.items():
        branch, _ = noisy_measure(rho, 1, m1, err.eta)
        branch, _ = noisy_measure(branch, 2, m2, err.eta)
        out = partial_trace(branch, [0, 3])
        acc += apply_unitary(out, PAULI[fix], [1])
    return acc


def ideal_purify_table(gate_on_i=GATE_I, gate_on_j=GATE_J):
    """Map (stored label, aux label) -> (output label, success flag) for pure Bell inputs.

    Derived by running the noiseless circuit on each of the 16 basis pairs.
    """
    table = {}
    perfect = ErrorModel(1.0, 1.0)
    for k1, k2 in product(range(4), repeat=2):
        e1 = [0.0] * 4
        e2 = [0.0] * 4
        e1[k1] = 1.0
        e2[k2] = 1.0
        s = from_bell_vector(BellVector(*e1))
        a = from_bell_vector(BellVector(*e2))
        rho = np.kron(s, a)
        for q in range(4):
            rho = apply_unitary(rho, PURIFY_ROTATION, [q])
        rho = noisy_gate(rho, gate_on_i, [0, 2], perfect.p)
        rho = noisy_gate(rho, gate_on_j, [1, 3], perfect.p)
        acc = np.zeros((16, 16), dtype=complex)
        for mi, mj in ((0, 1), (1, 0)):
            branch, _ = noisy_measure(rho, 2, mi, 1.0)
            branch, _ = noisy_measure(branch, 3, mj, 1.0)
            acc += branch
        p_s = float(np.trace(acc).real)
        if p_s < 1e-12:
            rest = partial_trace(rho, [0, 1])
            table[(k1, k2)] = (int(np.argmax(np.real(np.diag(bell_coefficients(rest))))), False)
        else:
            out = partial_trace(acc, [0, 1]) / p_s
            w = np.real(np.diag(bell_coefficients(out)))
            table[(k1, k2)] = (int(np.argmax(w)), True)
    return table
