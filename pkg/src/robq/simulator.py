"""Dense state-vector simulation under coherent control errors.

A noisy gate applies exp(-i(1+eps)H) = V diag(exp(-i(1+eps)lambda)) V^dag.  The
eigendecomposition of each generator is computed once per run; each noise
sample only re-exponentiates the eigenvalues.  All routines are vectorised
over a leading batch (sample) axis.

Monte Carlo convention: with ``initial="haar"`` every sample draws its own
Haar-random initial state together with its noise vector.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .circuit import Circuit
from .errors import DimensionMismatch, LengthMismatch, TooLarge
from .numerics import MAX_QUBITS, apply_local, herm_eigen
from .rng import SeededRng, as_rng

CHUNK = 2048
HAAR_PROTOCOL = "one Haar-random initial state per noise realization"


class _Prepared:
    """Per-run cache: gates in time order with their generator eigenbases."""

    def __init__(self, c: Circuit):
        if c.n_qubits > MAX_QUBITS:
            raise TooLarge(f"{c.n_qubits} qubits exceeds the dense limit of {MAX_QUBITS}")
        self.n = c.n_qubits
        self.n_noisy = c.n_noisy
        # column of the eps vector for each noisy gate (eps is in list order)
        col = {i: k for k, i in enumerate(c.noisy_indices)}
        self.steps = []
        for i in reversed(range(len(c.gates))):
            g = c.gates[i]
            if g.noisy:
                w, v = herm_eigen(g.generator)
                self.steps.append((g.support, col[i], w, v, v.conj().T, g.unitary))
            else:
                self.steps.append((g.support, None, None, None, None, g.unitary))

    def run(self, states: np.ndarray, eps: np.ndarray | None) -> np.ndarray:
        """states: (S, 2^n); eps: (S, n_noisy) or None for the ideal circuit."""
        for support, k, w, v, vh, U in self.steps:
            if k is None or eps is None:
                op = U
            else:
                phases = np.exp(-1j * np.outer(1.0 + eps[:, k], w))
                op = (v[None, :, :] * phases[:, None, :]) @ vh
            states = apply_local(states, op, support, self.n)
        return states


def basis_state(n_qubits: int, index: int = 0) -> np.ndarray:
    psi = np.zeros(1 << n_qubits, dtype=complex)
    psi[index] = 1.0
    return psi


def haar_state(n_qubits: int, gen: np.random.Generator) -> np.ndarray:
    """Haar-random pure state: a normalised complex Gaussian vector."""
    if n_qubits > MAX_QUBITS:
        raise TooLarge(f"{n_qubits} qubits exceeds the dense limit of {MAX_QUBITS}")
    d = 1 << n_qubits
    z = gen.standard_normal(d) + 1j * gen.standard_normal(d)
    return z / np.linalg.norm(z)


def fidelity(a: np.ndarray, b: np.ndarray) -> float | np.ndarray:
    """|<a|b>|, clipped to [0, 1]; batched over leading axes."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[-1] != b.shape[-1]:
        raise DimensionMismatch(f"state dimensions {a.shape[-1]} and {b.shape[-1]} differ")
    f = np.minimum(np.abs(np.sum(a.conj() * b, axis=-1)), 1.0)
    return float(f) if f.ndim == 0 else f


def apply_noisy(c: Circuit, eps, psi0) -> np.ndarray:
    """Final state U_1(eps_1) ... U_N(eps_N) psi0.

    ``eps`` holds one entry per noisy gate in list order.  Batched use: ``eps``
    of shape (S, n_noisy) and ``psi0`` of shape (d,) or (S, d).
    """
    eps = np.asarray(eps, dtype=float)
    if eps.shape[-1:] != (c.n_noisy,) and not (c.n_noisy == 0 and eps.size == 0):
        raise LengthMismatch(f"expected {c.n_noisy} noise values, got shape {eps.shape}")
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape[-1] != 1 << c.n_qubits:
        raise DimensionMismatch(f"state has dimension {psi0.shape[-1]}, circuit needs {1 << c.n_qubits}")
    batched = eps.ndim == 2
    E = eps if batched else eps.reshape(1, c.n_noisy)
    S = E.shape[0]
    states = np.broadcast_to(psi0, (S, psi0.shape[-1])).copy()
    out = _Prepared(c).run(states, E)
    return out if batched else out[0]


def ideal_state(c: Circuit, psi0) -> np.ndarray:
    psi0 = np.asarray(psi0, dtype=complex)
    states = psi0.reshape(-1, psi0.shape[-1]).copy()
    out = _Prepared(c).run(states, None)
    return out if psi0.ndim == 2 else out[0]


# -------------------------------------------------------------- Monte Carlo

@dataclass
class SimStats:
    samples: int
    eps_bar: float
    mean_fidelity: float
    std_fidelity: float  # population standard deviation
    min_fidelity: float
    argmin_eps: list[float]
    eps: np.ndarray | None = field(default=None, repr=False)
    fidelities: np.ndarray | None = field(default=None, repr=False)
    protocol: str = ""

    @property
    def per_sample(self):
        if self.eps is None:
            return None
        return list(zip(self.eps.tolist(), self.fidelities.tolist()))

    def summary(self) -> dict:
        return {
            "samples": self.samples,
            "eps_bar": self.eps_bar,
            "mean_fidelity": self.mean_fidelity,
            "std_fidelity": self.std_fidelity,
            "min_fidelity": self.min_fidelity,
            "argmin_eps": self.argmin_eps,
            "protocol": self.protocol,
        }


def _draw_sample(rng: SeededRng, ids, eps_bounds, n_qubits, haar):
    gen = rng.stream(*ids)
    eps = gen.uniform(-1.0, 1.0, size=len(eps_bounds)) * eps_bounds
    psi = haar_state(n_qubits, gen) if haar else None
    return eps, psi


def _initial_state(initial, n_qubits):
    if isinstance(initial, str):
        if initial != "haar":
            raise ValueError(f"unknown initial state {initial!r}")
        return None
    if isinstance(initial, (int, np.integer)):
        return basis_state(n_qubits, int(initial))
    psi = np.asarray(initial, dtype=complex)
    if psi.shape != (1 << n_qubits,):
        raise DimensionMismatch(f"initial state shape {psi.shape} does not match {n_qubits} qubits")
    return psi / np.linalg.norm(psi)


def sample_fidelities(c: Circuit, eps_bar: float | None, n_samples: int, initial="haar", rng=None,
                      stream_prefix: Sequence = ("mc",), threads: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Noise vectors (S, n_noisy) and fidelities (S,) for ``n_samples`` draws.

    Sample ``s`` uses stream ``(*stream_prefix, s)``.  Work is split into fixed
    chunks, so the result is bit-identical for any thread count.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    rng = as_rng(rng)
    prep = _Prepared(c)
    bounds = c.noise_bounds(eps_bar)
    fixed = _initial_state(initial, c.n_qubits)
    haar = fixed is None
    if not haar:
        ideal_fixed = prep.run(fixed[None, :].copy(), None)[0]
    prefix = tuple(stream_prefix)

    def chunk(start):
        stop = min(start + CHUNK, n_samples)
        draws = [_draw_sample(rng, prefix + (s,), bounds, c.n_qubits, haar) for s in range(start, stop)]
        E = np.array([d[0] for d in draws]).reshape(stop - start, len(bounds))
        if haar:
            psi0 = np.array([d[1] for d in draws])
            ideal = prep.run(psi0.copy(), None)
        else:
            psi0 = np.broadcast_to(fixed, (stop - start, fixed.size)).copy()
            ideal = ideal_fixed[None, :]
        out = prep.run(psi0, E)
        return E, fidelity(out, ideal).reshape(-1)

    starts = range(0, n_samples, CHUNK)
    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(chunk, starts))
    else:
        parts = [chunk(s) for s in starts]
    E = np.concatenate([p[0] for p in parts])
    F = np.concatenate([p[1] for p in parts])
    return E, F


def summarize(E: np.ndarray, F: np.ndarray, eps_bar: float, keep_samples: bool = True, protocol: str = "") -> SimStats:
    k = int(np.argmin(F))
    return SimStats(
        samples=len(F),
        eps_bar=float(eps_bar),
        mean_fidelity=float(np.mean(F)),
        std_fidelity=float(np.std(F)),
        min_fidelity=float(F[k]),
        argmin_eps=E[k].tolist(),
        eps=E if keep_samples else None,
        fidelities=F if keep_samples else None,
        protocol=protocol,
    )


def monte_carlo(c: Circuit, eps_bar: float | None = None, n_samples: int = 1000, initial="haar", rng=None,
                experiment_id="mc", threads: int = 1, keep_samples: bool = True) -> SimStats:
    """Fidelity statistics of |<psi(eps)|psi_hat>| over uniform noise draws.

    ``initial`` is ``"haar"``, a basis-state index or an explicit state vector.
    """
    eps = c.noise.eps_bar if eps_bar is None else float(eps_bar)
    E, F = sample_fidelities(c, eps, n_samples, initial, rng, (experiment_id,), threads)
    protocol = HAAR_PROTOCOL if isinstance(initial, str) else "fixed initial state"
    return summarize(E, F, eps, keep_samples, protocol)


def noise_sweep(c: Circuit, levels: Iterable[float], samples_per_level: int, initial="haar", rng=None,
                experiment_id="sweep", threads: int = 1, keep_samples: bool = True) -> list[SimStats]:
    out = []
    for li, level in enumerate(levels):
        E, F = sample_fidelities(c, float(level), samples_per_level, initial, rng, (experiment_id, li), threads)
        protocol = HAAR_PROTOCOL if isinstance(initial, str) else "fixed initial state"
        out.append(summarize(E, F, float(level), keep_samples, protocol))
    return out


def empirical_lipschitz(c: Circuit, eps_bar: float, n_probes: int = 200, rng=None, experiment_id="lip",
                        delta: float = 1e-5) -> float:
    """Largest observed ||psi(eps) - psi(eps')||_2 / ||eps - eps'||_inf.

    Half of the probes pair two independent points of the noise box, the other
    half a point with a neighbour at infinity-distance ``delta`` (local slope).
    The result is a lower estimate of the true Lipschitz constant.
    """
    if n_probes < 1:
        raise ValueError("n_probes must be at least 1")
    k = c.n_noisy
    if k == 0:
        return 0.0
    rng = as_rng(rng)
    prep = _Prepared(c)
    d = 1 << c.n_qubits
    A = np.empty((n_probes, k))
    B = np.empty((n_probes, k))
    psi = np.empty((n_probes, d), dtype=complex)
    for p in range(n_probes):
        gen = rng.stream(experiment_id, p)
        A[p] = gen.uniform(-eps_bar, eps_bar, size=k)
        if p % 2 == 0:
            B[p] = A[p] + delta * gen.choice([-1.0, 1.0], size=k)
        else:
            B[p] = gen.uniform(-eps_bar, eps_bar, size=k)
        psi[p] = haar_state(c.n_qubits, gen)
    out_a = prep.run(psi.copy(), A)
    out_b = prep.run(psi.copy(), B)
    num = np.linalg.norm(out_a - out_b, axis=1)
    den = np.max(np.abs(A - B), axis=1)
    ok = den > 0
    return float(np.max(num[ok] / den[ok])) if ok.any() else 0.0


# ---------------------------------------------------------------------- I/O

def _fmt(x: float) -> str:
    return repr(float(x))


def stats_to_csv(results: Sequence[tuple[str, int, SimStats]], fh=None) -> str:
    """CSV rows ``circuit, level, sample, eps_0.., fidelity`` for stats with samples kept.

    ``results`` holds ``(circuit_id, level_index, stats)`` triples.
    """
    width = max((r[2].eps.shape[1] for r in results if r[2].eps is not None), default=0)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["circuit", "level", "eps_bar", "sample"] + [f"eps_{j}" for j in range(width)] + ["fidelity"])
    for cid, li, st in results:
        if st.eps is None:
            raise ValueError("stats were computed without keep_samples")
        for s in range(st.samples):
            row = [_fmt(e) for e in st.eps[s]] + [""] * (width - st.eps.shape[1])
            w.writerow([cid, li, _fmt(st.eps_bar), s] + row + [_fmt(st.fidelities[s])])
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text


def stats_to_json(results: Sequence[tuple[str, int, SimStats]]) -> str:
    return json.dumps(
        [{"circuit": cid, "level": li, **st.summary()} for cid, li, st in results], indent=2
    )
