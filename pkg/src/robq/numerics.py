"""Dense complex-matrix kernel.

Qubit ordering convention used everywhere in robq: qubit 0 is the leftmost
tensor factor, i.e. the most significant bit of a basis-state index.
"""
from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NoConvergence, NotHermitian, NotUnitary

HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-10
MAX_QUBITS = 12


class EigenSystem(NamedTuple):
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # unitary, columns


def as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {A.shape}")
    return A


def is_hermitian(A, tol: float = HERMITIAN_TOL) -> bool:
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(A))) if A.size else 0.0)
    return float(np.max(np.abs(A - A.conj().T), initial=0.0)) <= tol * scale


def check_hermitian(A, tol: float = HERMITIAN_TOL) -> np.ndarray:
    A = as_matrix(A)
    if not is_hermitian(A, tol):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    return A


def is_unitary(U, tol: float = UNITARY_TOL) -> bool:
    U = as_matrix(U)
    if U.shape[0] != U.shape[1]:
        return False
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])), initial=0.0)) <= tol


def herm_eigen(A) -> EigenSystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    A = check_hermitian(A)
    try:
        w, v = np.linalg.eigh((A + A.conj().T) / 2)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return EigenSystem(w, v)


def spectral_norm(A) -> float:
    """Largest singular value."""
    A = np.asarray(A, dtype=complex)
    if A.size == 0:
        return 0.0
    if A.ndim == 2 and A.shape[0] == A.shape[1] and is_hermitian(A):
        return float(np.max(np.abs(np.linalg.eigvalsh((A + A.conj().T) / 2))))
    return float(np.linalg.norm(A, 2))


def expm_herm(H, t: float = 1.0) -> np.ndarray:
    """exp(-i t H) for Hermitian H."""
    w, v = herm_eigen(H)
    return (v * np.exp(-1j * t * w)) @ v.conj().T


def principal_log_generator(U) -> np.ndarray:
    """Hermitian H with exp(-iH) = U and eigenphases of H in (-pi, pi]."""
    U = as_matrix(U)
    if not is_unitary(U):
        raise NotUnitary("matrix is not unitary within tolerance")
    # complex Schur form of a normal matrix is diagonal with a unitary basis
    T, Z = scipy.linalg.schur(U, output="complex")
    lam = -np.angle(np.diag(T))
    lam = np.where(lam <= -np.pi + 1e-9, lam + 2 * np.pi, lam)
    H = (Z * lam) @ Z.conj().T
    return (H + H.conj().T) / 2


def _check_support(support: Sequence[int], n: int, k: int | None = None) -> tuple[int, ...]:
    support = tuple(int(q) for q in support)
    if len(set(support)) != len(support):
        raise DimensionMismatch(f"repeated qubit in support {support}")
    if any(q < 0 or q >= n for q in support):
        raise DimensionMismatch(f"support {support} outside 0..{n - 1}")
    if k is not None and len(support) != k:
        raise DimensionMismatch(f"operator acts on {k} qubits, support has {len(support)}")
    return support


def _n_local(local: np.ndarray) -> int:
    d = local.shape[0]
    k = d.bit_length() - 1
    if local.shape != (d, d) or (1 << k) != d:
        raise DimensionMismatch(f"local operator shape {local.shape} is not 2^k x 2^k")
    return k


def embed(local, support: Sequence[int], n: int) -> np.ndarray:
    """Full 2^n operator acting as ``local`` on ``support`` and identity elsewhere."""
    local = as_matrix(local)
    k = _n_local(local)
    support = _check_support(support, n, k)
    rest = [q for q in range(n) if q not in support]
    full = np.kron(local, np.eye(1 << len(rest)))
    # axes of `full` are ordered (support..., rest...) for rows and for columns
    order = list(support) + rest
    perm = np.argsort(order)
    t = full.reshape([2] * (2 * n))
    t = t.transpose(list(perm) + [n + p for p in perm])
    return t.reshape(1 << n, 1 << n)


def apply_local(states: np.ndarray, op: np.ndarray, support: Sequence[int], n: int) -> np.ndarray:
    """Apply ``op`` on ``support`` to a batch of state vectors of shape (..., 2^n).

    ``op`` may itself be batched with shape (..., 2^k, 2^k) broadcasting against
    the leading dimensions of ``states``.
    """
    k = len(support)
    batch = states.shape[:-1]
    t = states.reshape(batch + (2,) * n)
    nb = len(batch)
    axes = [nb + q for q in support]
    t = np.moveaxis(t, axes, list(range(nb + n - k, nb + n)))
    moved_shape = t.shape
    t = t.reshape(batch + (-1, 1 << k))
    t = np.matmul(t, np.swapaxes(op, -1, -2))
    t = t.reshape(moved_shape)
    t = np.moveaxis(t, list(range(nb + n - k, nb + n)), axes)
    return t.reshape(batch + (1 << n,))
