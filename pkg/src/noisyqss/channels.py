"""Single-qubit noise channels in Kraus form.

The catalogue holds phase damping plus the textbook phase-flip, bit-flip,
bit-phase-flip, depolarizing and amplitude-damping channels. Channels act on
one factor of a multi-qubit density matrix, either exactly (Kraus sum) or
stochastically (one sampled Kraus branch per call).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import CatalogueError, ContractError, DomainError
from .linalg import as_cmatrix, dagger, embed, num_qubits
from .sampling import sample_instrument
from .states import SIGMA_X, SIGMA_Y, SIGMA_Z, density, ghz3

CPTP_TOL = 1e-12
STRUCTURE_TOL = 1e-10

I2 = np.eye(2, dtype=np.complex128)
P0 = np.array([[1, 0], [0, 0]], dtype=np.complex128)
P1 = np.array([[0, 0], [0, 1]], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class KrausChannel:
    name: str
    parameter: float
    operators: tuple[np.ndarray, ...]

    def completeness_error(self) -> float:
        """Max-entry deviation of ``sum_i E_i^+ E_i`` from the identity."""
        s = sum(dagger(e) @ e for e in self.operators)
        return float(np.abs(s - I2).max())

    def is_cptp(self, tol: float = CPTP_TOL) -> bool:
        return self.completeness_error() <= tol

    def embedded(self, q: int, n: int) -> np.ndarray:
        """Kraus operators lifted to factor ``q`` of an ``n``-qubit register, shape (K, 2**n, 2**n)."""
        return np.stack([embed(e, q, n) for e in self.operators])

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "parameter": self.parameter,
            "operators": [
                [[[float(z.real), float(z.imag)] for z in row] for row in e]
                for e in self.operators
            ],
        }


def _check_parameter(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"channel parameter must lie in [0, 1], got {p}")
    return p


def phase_damping(p: float) -> KrausChannel:
    p = _check_parameter(p)
    ops = (np.sqrt(1 - p) * I2, np.sqrt(p) * P0, np.sqrt(p) * P1)
    return KrausChannel("phase_damping", p, ops)


def phase_flip(p: float) -> KrausChannel:
    p = _check_parameter(p)
    return KrausChannel("phase_flip", p, (np.sqrt(1 - p) * I2, np.sqrt(p) * SIGMA_Z))


def bit_flip(p: float) -> KrausChannel:
    p = _check_parameter(p)
    return KrausChannel("bit_flip", p, (np.sqrt(1 - p) * I2, np.sqrt(p) * SIGMA_X))


def bit_phase_flip(p: float) -> KrausChannel:
    p = _check_parameter(p)
    return KrausChannel("bit_phase_flip", p, (np.sqrt(1 - p) * I2, np.sqrt(p) * SIGMA_Y))


def depolarizing(p: float) -> KrausChannel:
    p = _check_parameter(p)
    a = np.sqrt(p / 4)
    ops = (np.sqrt(1 - 3 * p / 4) * I2, a * SIGMA_X, a * SIGMA_Y, a * SIGMA_Z)
    return KrausChannel("depolarizing", p, ops)


def amplitude_damping(gamma: float) -> KrausChannel:
    gamma = _check_parameter(gamma)
    e0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=np.complex128)
    e1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=np.complex128)
    return KrausChannel("amplitude_damping", gamma, (e0, e1))


CATALOGUE: dict[str, Callable[[float], KrausChannel]] = {
    "phase_damping": phase_damping,
    "phase_flip": phase_flip,
    "bit_flip": bit_flip,
    "bit_phase_flip": bit_phase_flip,
    "depolarizing": depolarizing,
    "amplitude_damping": amplitude_damping,
}


def standard_channel(name: str, parameter: float) -> KrausChannel:
    try:
        factory = CATALOGUE[name]
    except KeyError:
        raise CatalogueError(f"unknown channel {name!r}; choose from {', '.join(CATALOGUE)}") from None
    return factory(parameter)


def _require_cptp(ch: KrausChannel) -> None:
    if not ch.is_cptp():
        raise ContractError(
            f"channel {ch.name} is not trace preserving (error {ch.completeness_error():.3e})"
        )


def apply_channel(rho, ch: KrausChannel, q: int) -> np.ndarray:
    """Exact channel action ``sum_i E_i rho E_i^+`` with ``E_i`` on qubit ``q``."""
    rho = as_cmatrix(rho)
    _require_cptp(ch)
    ks = ch.embedded(q, num_qubits(rho))
    return np.einsum("kab,bc,kdc->ad", ks, rho, ks.conj())


def sample_kraus_branches(rhos: np.ndarray, ch: KrausChannel, q: int, rng: np.random.Generator):
    """Batched unravelling: one Kraus branch per state in ``rhos`` (N, d, d).

    Returns ``(branch_indices, post_states)``.
    """
    _require_cptp(ch)
    rhos = np.asarray(rhos, dtype=np.complex128)
    idx, post, _ = sample_instrument(rhos, ch.embedded(q, num_qubits(rhos[0])), rng)
    return idx, post


def sample_kraus_branch(rho, ch: KrausChannel, q: int, rng: np.random.Generator) -> tuple[int, np.ndarray]:
    """Pick branch ``i`` with probability ``Tr(E_i rho E_i^+)`` and return the normalised result."""
    rho = as_cmatrix(rho)
    idx, post = sample_kraus_branches(rho[None], ch, q, rng)
    return int(idx[0]), post[0]


@dataclass(frozen=True)
class ChannelStructureReport:
    name: str
    all_kraus_diagonal: bool
    ghz_form_preserved: bool
    coherence_factor: float

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "all_kraus_diagonal": self.all_kraus_diagonal,
            "ghz_form_preserved": self.ghz_form_preserved,
            "coherence_factor": self.coherence_factor,
        }


# Channel uses in the noisy protocol: Alice's qubit twice (distribution, then
# the hop to Bob), Bob's once, Charlie's never.
PROTOCOL_LEGS = (0, 1, 0)


def classify_channel_structure(ch: KrausChannel) -> ChannelStructureReport:
    diagonal = all(np.abs(e - np.diag(np.diag(e))).max() <= STRUCTURE_TOL for e in ch.operators)

    rho = density(ghz3())
    for q in PROTOCOL_LEGS:
        rho = apply_channel(rho, ch, q)

    support = [0, 7]
    outside = rho.copy()
    outside[np.ix_(support, support)] = 0
    off_support = float(np.abs(outside).max())
    coherence = rho[0, 7]
    preserved = off_support < STRUCTURE_TOL and abs(coherence.imag) < STRUCTURE_TOL
    factor = float(min(1.0, abs(coherence) / 0.5))
    return ChannelStructureReport(ch.name, bool(diagonal), bool(preserved), factor)


def catalogue_json(parameter: float, names=None) -> str:
    names = list(CATALOGUE) if names is None else list(names)
    entries = []
    for name in names:
        ch = standard_channel(name, parameter)
        entry = ch.to_dict()
        entry["cptp"] = ch.is_cptp()
        entry["structure"] = classify_channel_structure(ch).to_dict()
        entries.append(entry)
    return json.dumps(entries, indent=2)
