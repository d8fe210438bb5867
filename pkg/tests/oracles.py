"""Independent reference implementations used by the tests.

Nothing here imports the code under test except for data classes needed to
read circuits; every numerical path is recomputed from scratch (explicit
index loops, scipy.linalg.expm on full matrices, brute-force grids).
"""
from __future__ import annotations

import itertools
import math

import numpy as np
import scipy.linalg as sla

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.diag([1.0, -1.0]).astype(complex)


def random_hermitian(d, gen, scale=1.0):
    A = gen.normal(size=(d, d)) + 1j * gen.normal(size=(d, d))
    return scale * (A + A.conj().T) / 2


def embed_loop(local, support, n):
    """Full operator by explicit matrix elements (qubit 0 = most significant bit)."""
    local = np.asarray(local)
    dim = 2 ** n
    out = np.zeros((dim, dim), dtype=complex)
    rest = [q for q in range(n) if q not in support]

    def bit(i, q):
        return (i >> (n - 1 - q)) & 1

    for r in range(dim):
        for c in range(dim):
            if any(bit(r, q) != bit(c, q) for q in rest):
                continue
            lr = lc = 0
            for q in support:
                lr = (lr << 1) | bit(r, q)
                lc = (lc << 1) | bit(c, q)
            out[r, c] = local[lr, lc]
    return out


def noisy_unitary_full(circuit, eps):
    """prod_i expm(-i(1+eps_i) H_i) built from full-space generators."""
    n = circuit.n_qubits
    U = np.eye(2 ** n, dtype=complex)
    k = 0
    for g in circuit.gates:  # list order = operator product order
        e = 0.0
        if g.noisy:
            e = eps[k]
            k += 1
        H = embed_loop(g.generator, g.support, n)
        U = U @ sla.expm(-1j * (1 + e) * H)
    return U


def phase_opt_grid(H, lo=-2 * math.pi, hi=2 * math.pi, step=1e-4):
    w = np.linalg.eigvalsh(H)
    phis = np.arange(lo, hi + step, step)
    vals = np.maximum(np.abs(w[-1] + phis), np.abs(w[0] + phis))
    k = int(np.argmin(vals))
    return float(vals[k]), float(phis[k])


def worst_case_grid(H, eps_bar, n_weights=401, n_eps=41):
    """min over states and |eps| <= eps_bar of |<psi| exp(-i(1+eps)H) |psi>| relative to exp(-iH).

    Fidelity only depends on the eigenbasis weights p_k: |sum p_k exp(-i eps lam_k)|.
    The minimum over the simplex sits on an edge, so all eigenvalue pairs are scanned.
    """
    lam = np.linalg.eigvalsh(H)
    ps = np.linspace(0, 1, n_weights)
    best = 1.0
    for e in np.linspace(-eps_bar, eps_bar, n_eps):
        for a, b in itertools.combinations(range(len(lam)), 2):
            v = np.abs(ps * np.exp(-1j * e * lam[a]) + (1 - ps) * np.exp(-1j * e * lam[b]))
            best = min(best, float(v.min()))
    return best


def dft(d):
    return np.array([[np.exp(2j * np.pi * j * k / d) for k in range(d)] for j in range(d)]) / np.sqrt(d)


def vqa_closed_form(theta, x):
    """<Z> of Rx(x) Rz(t1) Ry(t2) Rz(t3)|0> from Bloch-vector rotations."""
    t1, t2, _ = theta
    bx, by, bz = math.sin(t2), 0.0, math.cos(t2)           # after Ry(t2)
    bx, by = bx * math.cos(t1) - by * math.sin(t1), bx * math.sin(t1) + by * math.cos(t1)  # Rz(t1)
    return by * math.sin(x) + bz * math.cos(x)              # z after Rx(x)


def finite_difference(f, theta, h=1e-5):
    theta = np.asarray(theta, dtype=float)
    g = np.zeros_like(theta)
    for i in range(len(theta)):
        e = np.zeros_like(theta)
        e[i] = h
        g[i] = (f(theta + e) - f(theta - e)) / (2 * h)
    return g


def spearman(a, b):
    """Spearman rank correlation without ties handling beyond average ranks."""
    def ranks(v):
        v = np.asarray(v, dtype=float)
        order = np.argsort(v, kind="mergesort")
        r = np.empty(len(v))
        r[order] = np.arange(len(v))
        for val in np.unique(v):
            idx = np.where(v == val)[0]
            r[idx] = r[idx].mean()
        return r
    ra, rb = ranks(a), ranks(b)
    ra -= ra.mean()
    rb -= rb.mean()
    return float(ra @ rb / math.sqrt((ra @ ra) * (rb @ rb)))
