"""Three-party secret sharing over a shared GHZ state.

Qubit layout is ``(A, B, C)`` = indices ``(0, 1, 2)``. Once Alice forwards her
qubit, Bob holds factors 0 and 1 and the 8 x 8 layout is unchanged.

Noisy round, as simulated here:

1. Charlie prepares a GHZ state, keeps qubit 2 and sends qubits 0 and 1
   through the channel.
2. Alice applies one of ``I, X, iY, Z`` to qubit 0.
3. Qubit 0 crosses the channel again on its way to Bob.
4. Charlie measures qubit 2 in ``{|+>, |->}`` and announces one bit.
5. Bob projects onto the even/odd parity block, then runs the fixed
   two-outcome POVM inside it and decodes through the Bell table.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .channels import CATALOGUE, apply_channel, standard_channel
from .errors import DomainError, QssError
from .linalg import dagger, embed
from .measurement import (
    HADAMARD,
    bell_measure,
    charlie_basis,
    discard_ops,
    measure_qubit,
    block_povm,
    parity_projectors,
)
from .sampling import choose, sample_instrument
from .states import BELL_LABELS, ENCODINGS, Encoding, apply_unitary_on_qubit, density, ghz3, pauli

ALICE, BOB, CHARLIE = 0, 1, 2
DISTRIBUTION_LEGS = (ALICE, BOB)
PLUS, MINUS = 0, 1
CHARLIE_LABELS = ("+", "-")

DEFAULT_TRIALS = 100_000
# Part of the reproducibility contract: changing it changes every campaign.
CHUNK_SIZE = 2048


@dataclass(frozen=True)
class DecodeTableEntry:
    bell_outcome: str
    charlie_outcome: str
    decoded: Encoding


DECODE_TABLE = (
    DecodeTableEntry("Phi+", "+", Encoding.I),
    DecodeTableEntry("Phi+", "-", Encoding.Z),
    DecodeTableEntry("Phi-", "+", Encoding.Z),
    DecodeTableEntry("Phi-", "-", Encoding.I),
    DecodeTableEntry("Psi+", "+", Encoding.X),
    DecodeTableEntry("Psi+", "-", Encoding.Y),
    DecodeTableEntry("Psi-", "+", Encoding.Y),
    DecodeTableEntry("Psi-", "-", Encoding.X),
)

# _DECODE[bell_index, charlie_index] -> index into ENCODINGS
_DECODE = np.zeros((4, 2), dtype=np.int64)
for _e in DECODE_TABLE:
    _DECODE[BELL_LABELS.index(_e.bell_outcome), CHARLIE_LABELS.index(_e.charlie_outcome)] = (
        ENCODINGS.index(_e.decoded)
    )


def decode(bell_index: int, charlie_outcome: int) -> Encoding:
    return ENCODINGS[_DECODE[bell_index, charlie_outcome]]


# ---------------------------------------------------------------------------
# Noise-free protocol


@dataclass(frozen=True)
class PureBranch:
    charlie_outcome: str
    bell_outcome: str
    probability: float
    decoded: Encoding


def pure_protocol_branches(secret: Encoding) -> list[PureBranch]:
    """Every (Charlie, Bell) branch with non-zero probability, noiseless channels."""
    rho = apply_unitary_on_qubit(density(ghz3()), pauli(secret), ALICE)
    branches = []
    for c in measure_qubit(rho, HADAMARD, CHARLIE):
        if c.post_state is None:
            continue
        for b in bell_measure(c.post_state):
            if b.probability < 1e-12:
                continue
            branches.append(
                PureBranch(
                    CHARLIE_LABELS[c.outcome_index],
                    BELL_LABELS[b.outcome_index],
                    c.probability * b.probability,
                    decode(b.outcome_index, c.outcome_index),
                )
            )
    return branches


def run_pure_protocol(secret: Encoding, rng: Optional[np.random.Generator] = None) -> Encoding:
    """Decode ``secret`` through the noiseless protocol.

    With ``rng`` one branch is sampled; without it every branch is enumerated
    and must agree.
    """
    branches = pure_protocol_branches(secret)
    if rng is not None:
        probs = np.array([b.probability for b in branches])
        return branches[int(choose(probs[None], rng.random(1))[0])].decoded
    decoded = {b.decoded for b in branches}
    if len(decoded) != 1:
        raise QssError(f"branches disagree for {secret}: {sorted(d.name for d in decoded)}")
    return decoded.pop()


# ---------------------------------------------------------------------------
# Noisy protocol, exact density-matrix path


def evolve_noisy_ghz(p: float, channel_name: str = "phase_damping") -> np.ndarray:
    ch = standard_channel(channel_name, p)
    rho = density(ghz3())
    for q in DISTRIBUTION_LEGS:
        rho = apply_channel(rho, ch, q)
    return rho


def encode_secret(rho, secret: Encoding) -> np.ndarray:
    return apply_unitary_on_qubit(rho, pauli(secret), ALICE)


def alice_sends_to_bob(rho, p: float, channel_name: str = "phase_damping") -> np.ndarray:
    return apply_channel(rho, standard_channel(channel_name, p), ALICE)


def shared_state(p: float, secret: Encoding, channel_name: str = "phase_damping") -> np.ndarray:
    """Three-qubit state held by Bob (qubits 0, 1) and Charlie (qubit 2) after step 3."""
    return alice_sends_to_bob(encode_secret(evolve_noisy_ghz(p, channel_name), secret), p, channel_name)


def bob_state(
    p: float,
    alpha: float,
    secret: Encoding,
    charlie_outcome: int,
    channel_name: str = "phase_damping",
) -> np.ndarray:
    """Bob's two-qubit state conditioned on Charlie's announced outcome."""
    outcome = measure_qubit(shared_state(p, secret, channel_name), charlie_basis(alpha), CHARLIE)[charlie_outcome]
    return outcome.post_state


# ---------------------------------------------------------------------------
# Closed forms


def _check_domain(p: float, alpha: float) -> tuple[float, float]:
    p, alpha = float(p), float(alpha)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    return p, alpha


def analytic_success(p: float, alpha: float) -> float:
    """``2 alpha beta (1 - p)^3``."""
    p, alpha = _check_domain(p, alpha)
    beta = math.sqrt(1.0 - alpha * alpha)
    return 2.0 * alpha * beta * (1.0 - p) ** 3


def analytic_error_rate(p: float, alpha: float) -> float:
    return 0.5 * (1.0 - analytic_success(p, alpha))


def analytic_bits(p: float, alpha: float) -> float:
    return 1.0 + analytic_success(p, alpha)


def exact_figures(p: float, alpha: float, channel_name: str = "phase_damping") -> tuple[float, float, float]:
    """Error rate, success and bits by exhaustive enumeration of the density-matrix pipeline.

    The error rate is the probability that Bob's within-class decision is
    wrong, conditioned on the parity class being identified correctly. For
    phase damping it coincides with :func:`analytic_error_rate`; for other
    channels it need not stay below 1/2.
    """
    basis = charlie_basis(alpha)
    parity = parity_projectors()
    povms = (block_povm("even"), block_povm("odd"))
    class_ok = 0.0
    correct = 0.0
    for secret in ENCODINGS:
        rho = shared_state(p, secret, channel_name)
        for c in measure_qubit(rho, basis, CHARLIE):
            if c.post_state is None:
                continue
            for k, proj in enumerate(parity.elements):
                pk = float(np.trace(proj @ c.post_state).real)
                if pk < 1e-15 or k != secret.parity_class:
                    continue
                w = 0.25 * c.probability * pk
                class_ok += w
                post = proj @ c.post_state @ proj / pk
                for j, elem in enumerate(povms[k].elements):
                    pj = float(np.trace(elem @ post).real)
                    if decode(2 * k + j, c.outcome_index) is secret:
                        correct += w * pj
    error = 1.0 - correct / class_ok
    success = 1.0 - 2.0 * error
    return error, success, 1.0 + success


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class ProtocolConfig:
    p: float
    alpha: float
    channel_name: str = "phase_damping"
    trials: int = DEFAULT_TRIALS
    seed: Optional[int] = None

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p must lie in [0, 1], got {self.p}")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"alpha must lie strictly between 0 and 1, got {self.alpha}")
        if self.channel_name not in CATALOGUE:
            raise DomainError(f"unknown channel {self.channel_name!r}")
        if self.trials < 0:
            raise DomainError("trials must be non-negative")
        if self.trials > 0:
            if self.seed is None:
                raise DomainError("a seed is required when trials > 0")
            if not 0 <= self.seed < 2**64:
                raise DomainError("seed must be a 64-bit unsigned integer")


@dataclass
class ProtocolReport:
    config: ProtocolConfig
    analytic_error_rate: float
    analytic_success: float
    analytic_bits: float
    empirical_success: Optional[float]
    stderr: Optional[float]
    confusion_matrix: list[list[int]]
    charlie_outcome_frequencies: Optional[list[float]]
    class_accuracy: Optional[float]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["config"] = asdict(self.config)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


class _Pipeline:
    """Precomputed operators for the batched trial simulator."""

    def __init__(self, config: ProtocolConfig):
        ch = standard_channel(config.channel_name, config.p)
        self.kraus_a = ch.embedded(ALICE, 3)
        self.kraus_b = ch.embedded(BOB, 3)
        self.unitaries = np.stack([embed(pauli(s), ALICE, 3) for s in ENCODINGS])
        self.charlie_ops = discard_ops(charlie_basis(config.alpha), CHARLIE, 3)
        self.parity_ops = parity_projectors().stacked()
        # povm_ops[k] holds (Pi1, Pi2) on parity block k
        self.povm_ops = np.stack([block_povm(k).stacked() for k in ("even", "odd")])
        self.ghz = density(ghz3())

    def run(self, secrets: np.ndarray, rng: np.random.Generator):
        """Simulate one trial per entry of ``secrets`` (indices into ENCODINGS).

        Returns decoded indices, Charlie outcomes and Bob's parity classes.
        """
        n = len(secrets)
        rhos = np.broadcast_to(self.ghz, (n, 8, 8))
        _, rhos, _ = sample_instrument(rhos, self.kraus_a, rng)
        _, rhos, _ = sample_instrument(rhos, self.kraus_b, rng)
        u = self.unitaries[secrets]
        rhos = u @ rhos @ dagger(u)
        _, rhos, _ = sample_instrument(rhos, self.kraus_a, rng)
        charlie, rhos, _ = sample_instrument(rhos, self.charlie_ops, rng)
        klass, rhos, _ = sample_instrument(rhos, self.parity_ops, rng)
        effects = self.povm_ops[klass]
        probs = np.clip(np.einsum("nkab,nba->nk", effects, rhos).real, 0.0, 1.0)
        povm_outcome = choose(probs, rng.random(n))
        decoded = _DECODE[2 * klass + povm_outcome, charlie]
        return decoded, charlie, klass


def run_noisy_protocol_trial(
    config: ProtocolConfig, secret: Encoding, rng: np.random.Generator
) -> tuple[Encoding, int]:
    """One stochastic round; returns Bob's decoded secret and Charlie's outcome (0 = '+')."""
    decoded, charlie, _ = _Pipeline(config).run(np.array([ENCODINGS.index(secret)]), rng)
    return ENCODINGS[int(decoded[0])], int(charlie[0])


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))


def _run_chunk(pipeline: _Pipeline, config: ProtocolConfig, chunk: int):
    start = chunk * CHUNK_SIZE
    stop = min(start + CHUNK_SIZE, config.trials)
    secrets = np.arange(start, stop) % 4
    decoded, charlie, klass = pipeline.run(secrets, _chunk_rng(config.seed, chunk))
    confusion = np.zeros((4, 4), dtype=np.int64)
    np.add.at(confusion, (secrets, decoded), 1)
    charlie_counts = np.bincount(charlie, minlength=2)
    true_class = np.array([e.parity_class for e in ENCODINGS])[secrets]
    return confusion, charlie_counts, int((klass == true_class).sum())


def run_campaign(config: ProtocolConfig, workers: int = 1) -> ProtocolReport:
    """Run ``config.trials`` rounds cycling through the four secrets and summarise.

    Trials are split into fixed chunks of ``CHUNK_SIZE``, each with its own
    stream spawned from ``(seed, chunk index)``, so the report does not depend
    on ``workers``.
    """
    if config.channel_name == "phase_damping":
        er = analytic_error_rate(config.p, config.alpha)
        ps = analytic_success(config.p, config.alpha)
        bits = analytic_bits(config.p, config.alpha)
    else:
        er, ps, bits = exact_figures(config.p, config.alpha, config.channel_name)

    confusion = np.zeros((4, 4), dtype=np.int64)
    charlie_counts = np.zeros(2, dtype=np.int64)
    class_ok = 0
    if config.trials > 0:
        pipeline = _Pipeline(config)
        n_chunks = -(-config.trials // CHUNK_SIZE)
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            parts = list(pool.map(lambda c: _run_chunk(pipeline, config, c), range(n_chunks)))
        for conf, cc, ok in parts:
            confusion += conf
            charlie_counts += cc
            class_ok += ok

    empirical = stderr = freqs = class_acc = None
    if config.trials > 0:
        class_acc = class_ok / config.trials
        freqs = (charlie_counts / config.trials).tolist()
        if class_ok:
            acc = float(np.trace(confusion)) / class_ok
            empirical = 2.0 * acc - 1.0
            stderr = 2.0 * math.sqrt(acc * (1.0 - acc) / class_ok)

    return ProtocolReport(
        config=config,
        analytic_error_rate=er,
        analytic_success=ps,
        analytic_bits=bits,
        empirical_success=empirical,
        stderr=stderr,
        confusion_matrix=confusion.tolist(),
        charlie_outcome_frequencies=freqs,
        class_accuracy=class_acc,
    )
