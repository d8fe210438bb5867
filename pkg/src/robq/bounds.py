"""Analytic robustness bounds for circuits under coherent control errors.

All bounds only look at noisy gates; a noiseless gate has eps identically zero
and contributes nothing.  Norms are evaluated on each gate's local support (a
2x2 or 4x4 matrix for the usual gate sets), so cost is linear in gate count and
independent of the qubit count.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .circuit import Circuit, GateInstance
from .errors import BadPartition, DimensionMismatch, OutOfRegime
from .gates import gate_norm, normalize_mode, phase_optimize, shifted_generator
from .numerics import embed, herm_eigen

SQRT2 = math.sqrt(2.0)


# ------------------------------------------------------------ scalar bounds

def fidelity_lower_bound(L: float, eps_bar: float) -> float:
    """Worst-case fidelity guaranteed by a Lipschitz bound: 1 - L^2 eps^2 / 2.

    May be negative, in which case the bound is vacuous; the value is returned
    unchanged so callers can report it.
    """
    if L < 0 or eps_bar < 0:
        raise ValueError("L and eps_bar must be nonnegative")
    return 1.0 - (L * eps_bar) ** 2 / 2.0


def eps_max_for_fidelity(L: float, target_fidelity: float) -> float:
    """Largest noise level for which the worst-case fidelity stays >= target.

    Returns ``math.inf`` when ``L == 0`` (no noisy generator, any noise is fine).
    """
    if not 0.0 <= target_fidelity <= 1.0:
        raise ValueError("target fidelity must lie in [0, 1]")
    if L < 0:
        raise ValueError("L must be nonnegative")
    if L == 0:
        return math.inf
    return SQRT2 / L * math.sqrt(1.0 - target_fidelity)


def fidelity_lower_bound_sin(norms: Sequence[float], eps_bar) -> float | None:
    """sqrt(1 - (sum_i |sin(||H_i|| eps_i)|)^2), or None when the radicand is not positive.

    ``eps_bar`` is a scalar or one bound per gate.  Terms with ||H_i|| eps_i past
    pi/2 are capped at 1 since the single-gate formula stops being monotone there.
    """
    norms = np.asarray(norms, dtype=float)
    eps = np.broadcast_to(np.asarray(eps_bar, dtype=float), norms.shape)
    x = np.minimum(norms * eps, math.pi / 2)
    s = float(np.sum(np.abs(np.sin(x))))
    radicand = 1.0 - s * s
    if radicand <= 0.0:
        return None
    return math.sqrt(radicand)


def exact_worst_case_single_gate(H, eps_bar: float) -> float:
    """Exact worst-case fidelity of one noisy gate exp(-i(1+eps)H), |eps| <= eps_bar.

    Worst case over all initial states and noise values: cos(eps_bar * spread / 2)
    with spread = lambda_max - lambda_min.  For a generator whose spectrum is
    symmetric about zero (the phase-optimised one) this equals cos(||H||_2 eps_bar).
    """
    w = herm_eigen(H).eigenvalues
    half_spread = (float(w[-1]) - float(w[0])) / 2
    x = eps_bar * half_spread
    if x > math.pi / 2 + 1e-15:
        raise OutOfRegime(f"eps_bar * spread / 2 = {x:.6g} exceeds pi/2")
    return math.cos(x)


def worst_case_state(H) -> np.ndarray:
    """Initial state attaining :func:`exact_worst_case_single_gate`."""
    _, v = herm_eigen(H)
    return (v[:, 0] + v[:, -1]) / SQRT2


def diamond_distance_bound(L: float, d: int, eps_bar: float) -> float:
    """sqrt(d) * L * eps_bar."""
    if d < 2:
        raise DimensionMismatch("dimension must be at least 2")
    if L < 0 or eps_bar < 0:
        raise ValueError("L and eps_bar must be nonnegative")
    return math.sqrt(d) * L * eps_bar


# ---------------------------------------------------------- circuit bounds

def lipschitz_norm(c: Circuit, mode: str = "raw") -> float:
    """Sum of generator norms of all noisy gates."""
    return float(sum(gate_norm(g, mode) for g in c.gates if g.noisy))


def per_gate_norms(c: Circuit, mode: str = "raw") -> list[float]:
    return [gate_norm(g, mode) for g in c.gates if g.noisy]


def _as_pair_operand(g, mode):
    if isinstance(g, GateInstance):
        return shifted_generator(g.generator, mode), g.support
    H = np.asarray(g, dtype=complex)
    k = H.shape[0].bit_length() - 1
    return shifted_generator(H, mode), tuple(range(k))


def pair_block_norm(gi, gj, mode: str = "raw") -> float:
    """||[H_i H_j]||_2 = sqrt(lambda_max(H_i^2 + H_j^2)) on the union of supports.

    Arguments are gate instances, or bare Hermitian matrices sharing one support.
    """
    Hi, si = _as_pair_operand(gi, mode)
    Hj, sj = _as_pair_operand(gj, mode)
    union = list(si) + [q for q in sj if q not in si]
    pos = {q: k for k, q in enumerate(union)}
    m = len(union)
    A = embed(Hi, [pos[q] for q in si], m)
    B = embed(Hj, [pos[q] for q in sj], m)
    G = A.conj().T @ A + B.conj().T @ B
    lam = float(np.linalg.eigvalsh((G + G.conj().T) / 2)[-1])
    return math.sqrt(max(lam, 0.0))


def pair_admissible(c: Circuit, i: int, j: int) -> bool:
    """Whether noisy gates i < j may form a 2-block.

    The block bound needs the noiseless gates strictly between them to commute
    with one of the two generators; disjoint supports guarantee that.
    """
    between = [c.gates[k] for k in range(i + 1, j)]
    if any(g.noisy for g in between):
        return False
    si, sj = set(c.gates[i].support), set(c.gates[j].support)
    return all(not si & set(g.support) for g in between) or all(not sj & set(g.support) for g in between)


def _block_value(c: Circuit, block: Sequence[int], mode: str, norms: dict[int, float]) -> float:
    if len(block) == 1:
        return norms[block[0]]
    i, j = block
    return SQRT2 * pair_block_norm(c.gates[i], c.gates[j], mode)


def _check_partition(c: Circuit, blocks) -> list[tuple[int, ...]]:
    noisy = c.noisy_indices
    flat = [k for b in blocks for k in b]
    if flat != noisy:
        raise BadPartition("blocks must cover the noisy gates exactly once, in circuit order")
    out = []
    for b in blocks:
        b = tuple(int(k) for k in b)
        if len(b) not in (1, 2):
            raise BadPartition(f"block {b} has size {len(b)}; only 1- and 2-blocks are allowed")
        if len(b) == 2 and not pair_admissible(c, *b):
            raise BadPartition(f"gates {b} are not consecutive or are separated by a non-commuting gate")
        out.append(b)
    return out


def lipschitz_pairwise(c: Circuit, partition="dp", mode: str = "raw") -> tuple[float, list[tuple[int, ...]]]:
    """Lipschitz bound from a partition of the noisy gates into 1- and 2-blocks.

    ``partition`` is ``"greedy"`` (pair consecutive noisy gates front to back),
    ``"dp"`` (the optimal partition) or an explicit list of blocks of gate
    indices.  Singles contribute ||H_i||, pairs sqrt(2) * ||[H_i H_j]||.
    Returns the bound and the blocks used.
    """
    mode = normalize_mode(mode)
    noisy = c.noisy_indices
    norms = {i: gate_norm(c.gates[i], mode) for i in noisy}
    if isinstance(partition, str):
        if partition == "greedy":
            blocks: list[tuple[int, ...]] = []
            k = 0
            while k < len(noisy):
                if k + 1 < len(noisy) and pair_admissible(c, noisy[k], noisy[k + 1]):
                    blocks.append((noisy[k], noisy[k + 1]))
                    k += 2
                else:
                    blocks.append((noisy[k],))
                    k += 1
        elif partition == "dp":
            blocks = _dp_partition(c, noisy, norms, mode)
        else:
            raise BadPartition(f"unknown partition strategy {partition!r}")
    else:
        blocks = _check_partition(c, partition)
    total = 0.0
    for b in blocks:
        total += _block_value(c, b, mode, norms)
    return total, blocks


def _dp_partition(c, noisy, norms, mode):
    n = len(noisy)
    best = [0.0] * (n + 1)
    choice = [0] * (n + 1)
    for k in range(1, n + 1):
        best[k] = best[k - 1] + norms[noisy[k - 1]]
        choice[k] = 1
        if k >= 2 and pair_admissible(c, noisy[k - 2], noisy[k - 1]):
            cand = best[k - 2] + SQRT2 * pair_block_norm(c.gates[noisy[k - 2]], c.gates[noisy[k - 1]], mode)
            if cand < best[k]:  # ties go to singles
                best[k] = cand
                choice[k] = 2
    blocks = []
    k = n
    while k > 0:
        blocks.append(tuple(noisy[k - choice[k]:k]))
        k -= choice[k]
    return blocks[::-1]


# ------------------------------------------------------------------ report

@dataclass
class BoundReport:
    mode: str
    eps_bar: float
    n_qubits: int
    n_gates: int
    n_noisy: int
    per_gate_norms: list[float]
    L_norm: float
    L_pair_greedy: float
    L_pair_dp: float
    dp_partition: list[list[int]]
    fidelity_bound: float
    fidelity_bound_vacuous: bool
    fidelity_bound_pair: float
    fidelity_bound_sin: float | None
    target_fidelity: float
    eps_max: float
    diamond_bound: float
    dimension: int
    phase_shifts: list[float] = field(default_factory=list)
    pairwise: str = "dp"

    def to_dict(self) -> dict:
        d = asdict(self)
        if math.isinf(d["eps_max"]):
            d["eps_max"] = "inf"
        return d

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def to_table(self) -> str:
        def fmt(v):
            if v is None:
                return "vacuous"
            if isinstance(v, float):
                return "inf" if math.isinf(v) else f"{v:.6f}"
            return str(v)

        rows = [
            ("mode", self.mode),
            ("qubits", self.n_qubits),
            ("gates (noisy)", f"{self.n_gates} ({self.n_noisy})"),
            ("eps_bar", self.eps_bar),
            ("L (norm sum)", self.L_norm),
            ("L (pairs, greedy)", self.L_pair_greedy),
            ("L (pairs, optimal)", self.L_pair_dp),
            ("fidelity bound", self.fidelity_bound),
            ("  vacuous", "yes" if self.fidelity_bound_vacuous else "no"),
            (f"fidelity bound (pairs, {self.pairwise})", self.fidelity_bound_pair),
            ("fidelity bound (sin)", self.fidelity_bound_sin),
            (f"eps_max @ F={self.target_fidelity:g}", self.eps_max),
            (f"diamond bound (d={self.dimension})", self.diamond_bound),
        ]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {fmt(v)}" for k, v in rows)


def full_report(c: Circuit, eps_bar: float | None = None, target_fidelity: float = 0.99,
                mode: str = "raw", pairwise: str = "dp") -> BoundReport:
    """Every bound for one circuit.

    ``eps_bar`` defaults to the circuit's noise model.  Per-gate overrides in the
    noise model enter the fidelity bounds through sum_i ||H_i|| eps_i.
    ``pairwise`` ("dp" or "greedy") picks the partition behind the pair bound.
    """
    if pairwise not in ("dp", "greedy"):
        raise BadPartition(f"pairwise must be 'dp' or 'greedy', got {pairwise!r}")
    mode = normalize_mode(mode)
    eps = c.noise.eps_bar if eps_bar is None else float(eps_bar)
    noisy = c.noisy_indices
    norms = per_gate_norms(c, mode)
    eps_i = c.noise_bounds(eps)
    L = float(sum(norms))
    L_greedy, _ = lipschitz_pairwise(c, "greedy", mode)
    L_dp, blocks = lipschitz_pairwise(c, "dp", mode)
    deviation = float(np.dot(norms, eps_i)) if noisy else 0.0
    eps_worst = float(eps_i.max()) if noisy else eps
    fb = 1.0 - deviation ** 2 / 2.0
    shifts = [phase_optimize(c.gates[i].generator).phi_star if mode == "phase_optimized" else 0.0 for i in noisy]
    return BoundReport(
        mode=mode,
        eps_bar=eps,
        n_qubits=c.n_qubits,
        n_gates=len(c.gates),
        n_noisy=len(noisy),
        per_gate_norms=norms,
        L_norm=L,
        L_pair_greedy=L_greedy,
        L_pair_dp=L_dp,
        dp_partition=[list(b) for b in blocks],
        fidelity_bound=fb,
        fidelity_bound_vacuous=fb < 0,
        fidelity_bound_pair=fidelity_lower_bound(L_dp if pairwise == "dp" else L_greedy, eps_worst),
        fidelity_bound_sin=fidelity_lower_bound_sin(norms, eps_i) if noisy else 1.0,
        target_fidelity=target_fidelity,
        eps_max=eps_max_for_fidelity(L, target_fidelity),
        diamond_bound=math.sqrt(2 ** c.n_qubits) * deviation,
        dimension=2 ** c.n_qubits,
        phase_shifts=shifts,
        pairwise=pairwise,
    )
