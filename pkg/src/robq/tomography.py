"""Single-qubit state tomography from simulated Pauli measurements.

Each basis is measured ``shots`` times; the Bloch component is the mean
eigenvalue, r_a = (n_plus - n_minus) / shots.  Estimates outside the unit
ball are pulled back radially so the reconstructed rho is a density matrix.
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit
from .errors import NotSingleQubit
from .gates import X, Y, Z
from .rng import SeededRng, as_rng
from .simulator import apply_noisy, basis_state, fidelity, ideal_state

BASES = ("x", "y", "z")
PAULI = {"x": X, "y": Y, "z": Z}


@dataclass(frozen=True)
class BlochEstimate:
    r_x: float
    r_y: float
    r_z: float
    shots_per_basis: int
    raw_r: tuple[float, float, float]

    @property
    def r(self) -> np.ndarray:
        return np.array([self.r_x, self.r_y, self.r_z])

    @property
    def projected(self) -> bool:
        return tuple(self.r) != tuple(self.raw_r)


@dataclass(frozen=True)
class Tomogram:
    bloch: BlochEstimate
    rho: np.ndarray
    fidelity_vs: tuple[np.ndarray, float] | None = None


def _basis_key(basis) -> str:
    b = str(basis).lower()
    if b not in PAULI:
        raise ValueError(f"basis must be one of X, Y, Z, got {basis!r}")
    return b


def _check_qubit(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (2,):
        raise NotSingleQubit(f"expected a single-qubit state, got shape {psi.shape}")
    return psi


def exact_probabilities(psi, basis) -> tuple[float, float]:
    """(p_plus, p_minus) for a projective measurement of the given Pauli."""
    psi = _check_qubit(psi)
    psi = psi / np.linalg.norm(psi)
    expval = float(np.real(np.vdot(psi, PAULI[_basis_key(basis)] @ psi)))
    p = min(max(0.5 * (1.0 + expval), 0.0), 1.0)
    return p, 1.0 - p


def measure_basis(psi, basis, shots: int, rng: np.random.Generator) -> tuple[int, int]:
    if shots < 1:
        raise ValueError("shots must be at least 1")
    p, _ = exact_probabilities(psi, basis)
    n_plus = int(rng.binomial(shots, p))
    return n_plus, shots - n_plus


def estimate_bloch(counts_x, counts_y, counts_z) -> BlochEstimate:
    """Bloch vector from (n_plus, n_minus) pairs.

    Counts may be floats, so exact probabilities give the infinite-shot limit.
    """
    raw = []
    totals = []
    for n_plus, n_minus in (counts_x, counts_y, counts_z):
        total = n_plus + n_minus
        if total <= 0:
            raise ValueError("each basis needs a positive number of shots")
        raw.append((n_plus - n_minus) / total)
        totals.append(total)
    if len(set(totals)) != 1:
        raise ValueError(f"inconsistent shot counts {totals}")
    raw_r = tuple(float(v) for v in raw)
    r = np.array(raw_r)
    norm = np.linalg.norm(r)
    if norm > 1.0:
        r = r / norm
    shots = totals[0]
    return BlochEstimate(float(r[0]), float(r[1]), float(r[2]),
                         int(shots) if float(shots).is_integer() else 0, raw_r)


def reconstruct_rho(b: BlochEstimate) -> np.ndarray:
    return 0.5 * (np.eye(2) + b.r_x * X + b.r_y * Y + b.r_z * Z)


def fidelity_pure_mixed(psi, rho) -> float:
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    overlap = abs(np.vdot(psi, np.asarray(rho) @ psi))
    return float(min(np.sqrt(overlap), 1.0))


def tomograph(psi, shots: int | None, rng: np.random.Generator | SeededRng | None = None,
              stream_ids=(), reference=None) -> Tomogram:
    """Measure X, Y and Z and reconstruct rho.  ``shots=None`` uses exact probabilities.

    With a ``SeededRng``, basis ``b`` draws from stream ``(*stream_ids, b)``.
    """
    psi = _check_qubit(psi)
    counts = []
    for b in BASES:
        if shots is None:
            counts.append(exact_probabilities(psi, b))
        else:
            gen = rng if isinstance(rng, np.random.Generator) else as_rng(rng).stream(*stream_ids, b)
            counts.append(measure_basis(psi, b, shots, gen))
    bloch = estimate_bloch(*counts)
    rho = reconstruct_rho(bloch)
    fid = None
    if reference is not None:
        ref = _check_qubit(reference)
        fid = (ref, fidelity_pure_mixed(ref, rho))
    return Tomogram(bloch, rho, fid)


# -------------------------------------------------------------- validation

@dataclass
class SweepResult:
    levels: np.ndarray
    n_eps: dict[str, int]
    rows: list[tuple] = field(default_factory=list)  # (circuit_id, level_idx, sample, eps tuple, f_qst, f_exact)

    def curve(self, circuit_id: str, column: str = "f_qst", stat: str = "min") -> np.ndarray:
        col = 4 if column == "f_qst" else 5
        fn = {"min": np.min, "mean": np.mean, "std": np.std}[stat]
        out = []
        for li in range(len(self.levels)):
            vals = [r[col] for r in self.rows if r[0] == circuit_id and r[1] == li]
            out.append(fn(vals))
        return np.array(out)

    def summary(self) -> list[dict]:
        out = []
        for cid in self.n_eps:
            mins, means, stds = (self.curve(cid, stat=s) for s in ("min", "mean", "std"))
            exact_min = self.curve(cid, "f_exact", "min")
            for li, level in enumerate(self.levels):
                out.append({
                    "circuit_id": cid, "eps_level": float(level),
                    "mean_f_qst": float(means[li]), "std_f_qst": float(stds[li]),
                    "min_f_qst": float(mins[li]), "min_f_exact": float(exact_min[li]),
                })
        return out

    def to_csv(self, fh=None) -> str:
        width = max(self.n_eps.values(), default=0)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["circuit_id", "eps_level", "sample_idx"] + [f"eps_{j}" for j in range(width)] + ["f_qst", "f_exact"])
        for cid, li, s, eps, f_qst, f_exact in self.rows:
            pad = [""] * (width - len(eps))
            w.writerow([cid, repr(float(self.levels[li])), s] + [repr(float(e)) for e in eps] + pad
                       + [repr(float(f_qst)), repr(float(f_exact))])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.summary(), indent=indent)


def validation_sweep(circuits: dict[str, Circuit], levels=16, samples: int = 80, shots: int = 20000,
                     rng=None, experiment_id="qst", threads: int = 1) -> SweepResult:
    """Noisy preparation of |0> through each circuit followed by simulated tomography.

    ``levels`` is a count (equidistant on [0, 1]) or an explicit sequence.
    Noise draws use stream ``(experiment_id, circuit_id, level, sample)``;
    basis ``b`` of that cell uses the same address extended by ``b``.  Cells
    are independent, so ``threads`` only changes wall time.
    """
    if isinstance(levels, (int, np.integer)):
        levels = np.linspace(0.0, 1.0, int(levels))
    levels = np.asarray(levels, dtype=float)
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = as_rng(rng)
    for cid, c in circuits.items():
        if c.n_qubits != 1:
            raise NotSingleQubit(f"circuit {cid!r} acts on {c.n_qubits} qubits")
    psi0 = basis_state(1, 0)
    targets = {cid: ideal_state(c, psi0) for cid, c in circuits.items()}

    def cell(key):
        cid, li = key
        c, target = circuits[cid], targets[cid]
        bounds = c.noise_bounds(levels[li])
        E = np.array([
            rng.stream(experiment_id, cid, li, s).uniform(-1.0, 1.0, size=len(bounds)) * bounds
            for s in range(samples)
        ]).reshape(samples, len(bounds))
        states = apply_noisy(c, E, psi0)
        f_exact = fidelity(states, target[None, :]).reshape(-1)
        rows = []
        for s in range(samples):
            tomo = tomograph(states[s], shots, rng, (experiment_id, cid, li, s), reference=target)
            rows.append((cid, li, s, tuple(E[s]), tomo.fidelity_vs[1], float(f_exact[s])))
        return rows

    keys = [(cid, li) for cid in circuits for li in range(len(levels))]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(cell, keys))
    else:
        parts = [cell(k) for k in keys]
    result = SweepResult(levels, {cid: c.n_noisy for cid, c in circuits.items()})
    for rows in parts:
        result.rows.extend(rows)
    return result
