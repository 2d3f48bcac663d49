"""Dense complex-matrix kernel for small qubit registers.

Every state and operator in the package is a plain ``numpy`` complex array.
Qubit 0 is the leftmost ket label, so the basis state ``|abc>`` sits at index
``4a + 2b + c``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ShapeError, SizeError

MAX_DIM = 16
PSD_TOL = 1e-10


def as_cmatrix(a) -> np.ndarray:
    """Coerce ``a`` into a finite square complex128 array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ShapeError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ShapeError("matrix has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def tensor(a, b, *, max_dim: int = MAX_DIM) -> np.ndarray:
    """Kronecker product ``a (x) b`` of two square matrices."""
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    dim = a.shape[0] * b.shape[0]
    if dim > max_dim:
        raise SizeError(f"tensor product dimension {dim} exceeds maximum {max_dim}")
    return np.kron(a, b)


def tensor_all(factors: Iterable, *, max_dim: int = MAX_DIM) -> np.ndarray:
    out = None
    for f in factors:
        out = as_cmatrix(f) if out is None else tensor(out, f, max_dim=max_dim)
    if out is None:
        raise ShapeError("tensor_all needs at least one factor")
    return out


def num_qubits(rho: np.ndarray) -> int:
    dim = rho.shape[-1]
    n = dim.bit_length() - 1
    if dim < 2 or (1 << n) != dim:
        raise ShapeError(f"dimension {dim} is not a power of two")
    return n


def embed(op, q: int, n: int) -> np.ndarray:
    """Place a single-qubit (or 2 x 2) operator on factor ``q`` of an ``n``-qubit register.

    Non-square ``op`` (e.g. a bra ``<v|`` of shape 1 x 2) is allowed; the
    output then has shape ``(rows * 2**(n-1), 2**n)``.
    """
    op = np.asarray(op, dtype=np.complex128)
    if not 0 <= q < n:
        raise ShapeError(f"qubit index {q} out of range for {n}-qubit register")
    left = np.eye(1 << q, dtype=np.complex128)
    right = np.eye(1 << (n - q - 1), dtype=np.complex128)
    return np.kron(np.kron(left, op), right)


def partial_trace(rho, register_dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Reduce ``rho`` to the factors listed in ``keep`` (in register order)."""
    rho = as_cmatrix(rho)
    dims = [int(d) for d in register_dims]
    if int(np.prod(dims)) != rho.shape[0]:
        raise ShapeError(f"register dims {dims} do not match matrix dimension {rho.shape[0]}")
    keep = sorted(set(keep))
    if not keep:
        raise ShapeError("keep must name at least one factor")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise ShapeError(f"keep {keep} out of range for {len(dims)} factors")

    n = len(dims)
    t = rho.reshape(dims + dims)
    row = list(range(n))
    col = [i + n if i in keep else i for i in range(n)]
    out_idx = keep + [k + n for k in keep]
    reduced = np.einsum(t, row + col, out_idx)
    d_keep = int(np.prod([dims[k] for k in keep]))
    return reduced.reshape(d_keep, d_keep)


def trace_norm(a) -> float:
    """Sum of singular values."""
    a = as_cmatrix(a)
    if np.allclose(a, dagger(a), atol=1e-14, rtol=0):
        return float(np.abs(np.linalg.eigvalsh(a)).sum())
    return float(np.linalg.svd(a, compute_uv=False).sum())


@dataclass
class DensityCheck:
    """Outcome of :func:`assert_density_matrix`; truthy iff every property holds."""

    ok: bool
    failures: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def assert_density_matrix(rho, tol: float = PSD_TOL) -> DensityCheck:
    """Check Hermiticity, unit trace and positivity, each to within ``tol``.

    Never raises on a bad matrix; the returned check lists what failed.
    """
    m = np.asarray(rho, dtype=np.complex128)
    failures = []
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return DensityCheck(False, [f"not square: shape {m.shape}"])
    if not np.all(np.isfinite(m)):
        return DensityCheck(False, ["non-finite entries"])
    herm_err = float(np.abs(m - dagger(m)).max())
    if herm_err > tol:
        failures.append(f"not Hermitian (max deviation {herm_err:.3e})")
    tr = np.trace(m)
    if abs(tr - 1) > tol:
        failures.append(f"trace {tr.real:.12g}{tr.imag:+.3e}j != 1")
    min_eig = float(np.linalg.eigvalsh((m + dagger(m)) / 2).min())
    if min_eig < -tol:
        failures.append(f"negative eigenvalue {min_eig:.3e}")
    return DensityCheck(not failures, failures)


def is_unitary(u, tol: float = 1e-12) -> bool:
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.abs(u @ dagger(u) - np.eye(u.shape[0])).max() <= tol)


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Ginibre-ensemble density matrix; used by the property tests."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real
