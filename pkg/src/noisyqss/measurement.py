"""Projective measurements and two-state minimum-error discrimination."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ContractError, DegenerateStateError, DomainError, ShapeError
from .linalg import PSD_TOL, as_cmatrix, dagger, embed, num_qubits, partial_trace, trace_norm
from .sampling import NEG_CLAMP, PROB_FLOOR, choose
from .states import BELL_LABELS, bell_states, density, ket

COMPLETENESS_TOL = 1e-12
# Gamma eigenvalues at or below this go to outcome "b"
HELSTROM_ZERO = 1e-14


@dataclass(frozen=True)
class MeasurementBasis:
    """Charlie's basis ``|+> = a|0> + b|1>``, ``|-> = b|0> - a|1>`` with ``b = sqrt(1 - a^2)``."""

    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")

    @property
    def beta(self) -> float:
        return float(np.sqrt(1.0 - self.alpha**2))

    @property
    def plus(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=np.complex128)

    @property
    def minus(self) -> np.ndarray:
        return np.array([self.beta, -self.alpha], dtype=np.complex128)

    @property
    def vectors(self) -> tuple[np.ndarray, np.ndarray]:
        return self.plus, self.minus


HADAMARD = MeasurementBasis(1 / np.sqrt(2))


def charlie_basis(alpha: float) -> MeasurementBasis:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie strictly between 0 and 1, got {alpha}")
    return MeasurementBasis(alpha)


@dataclass
class MeasurementOutcome:
    outcome_index: int
    probability: float
    post_state: Optional[np.ndarray]


def discard_ops(basis: MeasurementBasis, q: int, n: int) -> np.ndarray:
    """Operators ``<v|`` on qubit ``q`` (identity elsewhere), shape (2, 2**(n-1), 2**n)."""
    return np.stack([embed(v.conj()[None, :], q, n) for v in basis.vectors])


def measure_qubit(rho, basis: MeasurementBasis, q: int) -> list[MeasurementOutcome]:
    """Measure qubit ``q`` in ``basis`` and discard it.

    Outcome 0 is ``|+>``, outcome 1 is ``|->``. Each post-state is the
    normalised reduced state of the remaining qubits; it is ``None`` when the
    outcome has (numerically) zero probability.
    """
    rho = as_cmatrix(rho)
    n = num_qubits(rho)
    if not 0 <= q < n:
        raise ShapeError(f"qubit {q} out of range for {n}-qubit state")
    keep = [k for k in range(n) if k != q]
    outcomes = []
    for i, v in enumerate(basis.vectors):
        proj = embed(density(v), q, n)
        projected = proj @ rho @ proj
        prob = float(np.clip(np.trace(projected).real, 0.0, 1.0))
        post = None
        if prob >= PROB_FLOOR:
            post = partial_trace(projected, [2] * n, keep) / prob
        outcomes.append(MeasurementOutcome(i, prob, post))
    return outcomes


def collapse_qubit(rho, basis: MeasurementBasis, q: int, outcome: int) -> np.ndarray:
    result = measure_qubit(rho, basis, q)[outcome]
    if result.post_state is None:
        raise DegenerateStateError(f"outcome {outcome} has probability {result.probability:.3e}")
    return result.post_state


def bell_measure(rho2) -> list[MeasurementOutcome]:
    """Bell-basis measurement in the order Phi+, Phi-, Psi+, Psi-."""
    rho2 = as_cmatrix(rho2)
    if rho2.shape != (4, 4):
        raise ShapeError("bell_measure expects a two-qubit state")
    outcomes = []
    for i, s in enumerate(bell_states()):
        prob = float(np.clip((s.conj() @ rho2 @ s).real, 0.0, 1.0))
        outcomes.append(MeasurementOutcome(i, prob, density(s) if prob >= PROB_FLOOR else None))
    return outcomes


@dataclass(frozen=True, eq=False)
class Povm:
    """Positive operators that sum to ``support`` (the identity unless restricted to a subspace)."""

    elements: tuple[np.ndarray, ...]
    support: Optional[np.ndarray] = None
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        elems = tuple(as_cmatrix(e) for e in self.elements)
        object.__setattr__(self, "elements", elems)
        dim = elems[0].shape[0]
        support = np.eye(dim, dtype=np.complex128) if self.support is None else as_cmatrix(self.support)
        object.__setattr__(self, "support", support)
        for e in elems:
            if e.shape != (dim, dim):
                raise ShapeError("POVM elements must share one shape")
            if np.abs(e - dagger(e)).max() > PSD_TOL or np.linalg.eigvalsh(e).min() < -PSD_TOL:
                raise ContractError("POVM element is not positive semidefinite")
        if np.abs(sum(elems) - support).max() > COMPLETENESS_TOL:
            raise ContractError("POVM elements do not sum to the identity on their support")

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def stacked(self) -> np.ndarray:
        return np.stack(self.elements)


def parity_projectors() -> Povm:
    """``P1`` onto span{|00>, |11>} and ``P2`` onto span{|01>, |10>}."""
    p1 = density(ket("00")) + density(ket("11"))
    p2 = density(ket("01")) + density(ket("10"))
    return Povm((p1, p2), labels=("P1", "P2"))


SUBSPACES = {
    "even": ("00", "11"),
    "odd": ("01", "10"),
}


def _subspace_key(subspace) -> str:
    if subspace in (0, "even", "C1"):
        return "even"
    if subspace in (1, "odd", "C2"):
        return "odd"
    raise DomainError(f"unknown subspace {subspace!r}; use 'even' or 'odd'")


def block_povm(subspace) -> Povm:
    """The fixed two-outcome discrimination POVM on one parity block.

    In the block basis ``(|u>, |w>)`` the elements are ``[[1, 1], [1, 1]] / 2``
    and ``[[1, -1], [-1, 1]] / 2``, i.e. projectors onto ``(|u> +/- |w>)/sqrt 2``.
    They act as zero outside the block, so completeness holds on the block only.
    """
    u_bits, w_bits = SUBSPACES[_subspace_key(subspace)]
    u, w = ket(u_bits), ket(w_bits)
    block = np.stack([u, w], axis=1)
    pi1 = block @ (np.array([[1, 1], [1, 1]]) / 2) @ block.T
    pi2 = block @ (np.array([[1, -1], [-1, 1]]) / 2) @ block.T
    return Povm((pi1, pi2), support=block @ block.T, labels=("Pi1", "Pi2"))


def helstrom(rho_a, rho_b, prior_a: float = 0.5) -> tuple[Povm, float]:
    """Minimum-error measurement for telling ``rho_a`` from ``rho_b``.

    Returns the POVM ``(Pi_a, Pi_b)`` and the error probability
    ``(1 - ||prior_a rho_a - prior_b rho_b||_1) / 2``.
    """
    rho_a = as_cmatrix(rho_a)
    rho_b = as_cmatrix(rho_b)
    if rho_a.shape != rho_b.shape:
        raise ShapeError("states must have equal dimension")
    if not 0.0 <= prior_a <= 1.0:
        raise DomainError(f"prior must lie in [0, 1], got {prior_a}")
    gamma = prior_a * rho_a - (1 - prior_a) * rho_b
    gamma = (gamma + dagger(gamma)) / 2
    evals, evecs = np.linalg.eigh(gamma)
    pos = evecs[:, evals > HELSTROM_ZERO]
    pi_a = pos @ dagger(pos)
    pi_b = np.eye(len(gamma)) - pi_a
    err = 0.5 * (1 - trace_norm(gamma))
    err = float(np.clip(err, 0.0, 0.5))
    return Povm((pi_a, pi_b), labels=("a", "b")), err


def apply_povm(rho, povm: Povm, rng: Optional[np.random.Generator] = None):
    """Outcome probabilities ``Tr(Pi_i rho)``, or one sampled index when ``rng`` is given."""
    rho = as_cmatrix(rho)
    if rho.shape[0] != povm.dim:
        raise ShapeError("state and POVM dimensions differ")
    inside = np.trace(povm.support @ rho).real
    if abs(inside - np.trace(rho).real) > 1e-10:
        raise ContractError("state has weight outside the POVM's support")
    probs = np.array([np.trace(e @ rho).real for e in povm.elements])
    if np.any(probs < -NEG_CLAMP):
        raise ContractError(f"negative probability {probs.min():.3e}")
    probs = np.clip(probs, 0.0, 1.0)
    if rng is None:
        return probs
    return int(choose(probs[None], rng.random(1))[0])
