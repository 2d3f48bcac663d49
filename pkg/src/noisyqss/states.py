"""States and gates used by the protocol: GHZ, Bell basis, encoding unitaries."""
from __future__ import annotations

import enum

import numpy as np

from .errors import ContractError, DomainError
from .linalg import as_cmatrix, dagger, embed, is_unitary, num_qubits

SQRT_HALF = 1 / np.sqrt(2)


class Encoding(enum.Enum):
    """Alice's four local operations, valued by the two secret bits they carry."""

    I = "00"
    X = "01"
    Y = "10"
    Z = "11"

    @property
    def bits(self) -> str:
        return self.value

    @property
    def parity_class(self) -> int:
        """0 for {I, Z} (even-parity Bell pair at Bob), 1 for {X, Y}."""
        return 0 if self in (Encoding.I, Encoding.Z) else 1

    @classmethod
    def from_bits(cls, bits: str) -> "Encoding":
        try:
            return cls(bits)
        except ValueError:
            raise DomainError(f"secret must be one of 00, 01, 10, 11; got {bits!r}") from None


ENCODINGS = (Encoding.I, Encoding.X, Encoding.Y, Encoding.Z)

_PAULI = {
    Encoding.I: np.eye(2),
    Encoding.X: np.array([[0, 1], [1, 0]]),
    # i * sigma_y, which is real
    Encoding.Y: np.array([[0, 1], [-1, 0]]),
    Encoding.Z: np.array([[1, 0], [0, -1]]),
}

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def pauli(label: Encoding | str) -> np.ndarray:
    """Encoding unitary for ``label``; ``Y`` gives ``i*sigma_y = [[0, 1], [-1, 0]]``."""
    if not isinstance(label, Encoding):
        try:
            label = Encoding[label]
        except KeyError:
            label = Encoding.from_bits(label)
    return _PAULI[label].astype(np.complex128)


def ket(bits: str) -> np.ndarray:
    """Computational basis vector, e.g. ``ket("101")``."""
    v = np.zeros(1 << len(bits), dtype=np.complex128)
    v[int(bits, 2)] = 1
    return v


def density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    return np.outer(psi, psi.conj())


def ghz3() -> np.ndarray:
    return (ket("000") + ket("111")) * SQRT_HALF


def bell_states() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return (Phi+, Phi-, Psi+, Psi-) as length-4 amplitude vectors."""
    phi_p = (ket("00") + ket("11")) * SQRT_HALF
    phi_m = (ket("00") - ket("11")) * SQRT_HALF
    psi_p = (ket("01") + ket("10")) * SQRT_HALF
    psi_m = (ket("01") - ket("10")) * SQRT_HALF
    return phi_p, phi_m, psi_p, psi_m


BELL_LABELS = ("Phi+", "Phi-", "Psi+", "Psi-")


def apply_unitary_on_qubit(rho, u, q: int) -> np.ndarray:
    rho = as_cmatrix(rho)
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (2, 2) or not is_unitary(u, 1e-12):
        raise ContractError("u must be a 2x2 unitary")
    n = num_qubits(rho)
    if not 0 <= q < n:
        raise DomainError(f"qubit {q} out of range for {n}-qubit state")
    full = embed(u, q, n)
    return full @ rho @ dagger(full)
