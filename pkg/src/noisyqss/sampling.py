"""Batched quantum-instrument sampling.

A quantum instrument is a list of operators ``K_i`` (all of one shape, not
necessarily square). Outcome ``i`` occurs with probability
``Tr(K_i rho K_i^+)`` and leaves the normalised state ``K_i rho K_i^+ / prob``.
Kraus unravelling, projective measurement and measure-and-discard are all
instruments, so the Monte Carlo engine funnels every stochastic step through
:func:`sample_instrument`.

Each call consumes exactly one uniform draw per state, which keeps the random
stream layout independent of the outcomes.
"""
from __future__ import annotations

import numpy as np

from .errors import DegenerateStateError
from .linalg import dagger

PROB_FLOOR = 1e-15
NEG_CLAMP = 1e-12


def choose(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF selection: row ``n`` of ``probs`` picks an index with uniform ``u[n]``.

    Zero-weight outcomes are never selected.
    """
    probs = np.asarray(probs, dtype=float)
    cdf = np.cumsum(probs, axis=1)
    total = cdf[:, -1]
    target = u * total
    idx = (cdf <= target[:, None]).sum(axis=1)
    # u * total can round up to total; fall back to the last outcome that has weight
    positive = probs > 0
    last_pos = probs.shape[1] - 1 - np.argmax(positive[:, ::-1], axis=1)
    return np.minimum(idx, last_pos)


def outcome_probabilities(rhos: np.ndarray, effects: np.ndarray) -> np.ndarray:
    """``Tr(E_i rho_n)`` for a batch of states ``(N, d, d)`` and effects ``(K, d, d)``.

    Small negative values from rounding are clamped to zero.
    """
    p = np.einsum("kab,nba->nk", effects, rhos).real
    if np.any(p < -NEG_CLAMP):
        raise DegenerateStateError(f"negative outcome probability {p.min():.3e}")
    return np.clip(p, 0.0, 1.0)


def sample_instrument(rhos: np.ndarray, ops: np.ndarray, rng: np.random.Generator):
    """Sample one outcome per state.

    Parameters
    ----------
    rhos : (N, d, d) complex array of unit-trace states.
    ops : (K, m, d) complex array of instrument operators.

    Returns
    -------
    idx : (N,) int array of chosen outcomes.
    post : (N, m, m) normalised post-outcome states.
    probs : (N, K) outcome probabilities.
    """
    rhos = np.asarray(rhos, dtype=np.complex128)
    ops = np.asarray(ops, dtype=np.complex128)
    effects = dagger(ops) @ ops
    # Tr(K rho K^+) = sum_ab (K^+ K)_ab rho_ba
    probs = np.clip(np.einsum("kab,nba->nk", effects, rhos).real, 0.0, None)
    if np.any(probs.max(axis=1) < PROB_FLOOR):
        raise DegenerateStateError("all branch probabilities below 1e-15")
    u = rng.random(len(rhos))
    idx = choose(probs, u)
    rows = np.arange(len(rhos))
    k = ops[idx]
    post = k @ rhos @ dagger(k)
    post /= probs[rows, idx][:, None, None]
    return idx, post, probs
