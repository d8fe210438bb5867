"""Single-qubit regression with a Lipschitz-regularised variational circuit.

Model: f(theta, x) = <psi|Z|psi> with |psi> = Rx(x) Rz(t1) Ry(t2) Rz(t3) |0>
(operator-product order, so Rz(t3) acts first and only contributes a global
phase).  In Bloch form f = sin(t2) sin(t1) sin(x) + cos(t2) cos(x), so
t1 = t2 = pi/2 reproduces sin(x).

Every trainable rotation has generator P/2 with P a Pauli, hence a Lipschitz
bound of sum |t_i| / 2.  Training minimises MSE + lam * ||theta||^2 with ADAM
and parameter-shift gradients; coherent noise t_i -> t_i (1 + eps_i) is drawn
fresh for every circuit evaluation.
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit import Circuit, gate
from .gates import X, Y, Z
from .rng import as_rng

N_POINTS = 20
SHIFT = np.pi / 2
DEFAULT_LAMBDAS = (0.0, 0.01, 0.05, 0.1, 0.5)

# ADAM constants (frozen; no published values to follow)
BETA1 = 0.9
BETA2 = 0.999
ADAM_EPS = 1e-8
LEARNING_RATE = 0.1


@dataclass(frozen=True)
class Dataset:
    xs: np.ndarray
    ys: np.ndarray
    weight: float = 1.0  # scales the data term; 0 leaves only the regulariser


def sine_dataset(n: int = N_POINTS) -> Dataset:
    xs = np.linspace(0.0, 2 * np.pi, n)
    return Dataset(xs, np.sin(xs))


@dataclass
class Backend:
    """How predictions are evaluated.

    ``shots=None`` gives exact expectations.  ``eps_bar > 0`` perturbs the
    trainable angles with a fresh uniform draw per circuit evaluation.
    """
    shots: int | None = None
    eps_bar: float = 0.0
    gen: np.random.Generator | None = None

    def _need_gen(self):
        if self.gen is None:
            raise ValueError("a random generator is needed for shots or noise")
        return self.gen


def _rot(P, angle):
    # exp(-i angle P / 2), batched over angle
    a = np.asarray(angle, dtype=float)[..., None, None] / 2
    return np.cos(a) * np.eye(2) - 1j * np.sin(a) * P


def _trainable_state(theta) -> np.ndarray:
    """Rz(t1) Ry(t2) Rz(t3)|0>, batched over a leading axis of theta."""
    theta = np.asarray(theta, dtype=float)
    psi = np.zeros(theta.shape[:-1] + (2,), dtype=complex)
    psi[..., 0] = 1.0
    for k, P in ((2, Z), (1, Y), (0, Z)):
        psi = np.einsum("...ij,...j->...i", _rot(P, theta[..., k]), psi)
    return psi


def expectation_z(theta, xs) -> np.ndarray:
    """Exact <Z> for each x; ``theta`` is (3,) or (len(xs), 3)."""
    xs = np.asarray(xs, dtype=float)
    theta = np.broadcast_to(np.asarray(theta, dtype=float), xs.shape + (3,))
    psi = _trainable_state(theta)
    psi = np.einsum("...ij,...j->...i", _rot(X, xs), psi)
    return np.abs(psi[..., 0]) ** 2 - np.abs(psi[..., 1]) ** 2


def predict(theta, x, backend: Backend | None = None):
    backend = backend or Backend()
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    th = np.broadcast_to(np.asarray(theta, dtype=float), x_arr.shape + (3,))
    if backend.eps_bar > 0:
        gen = backend._need_gen()
        eps = gen.uniform(-backend.eps_bar, backend.eps_bar, size=th.shape)
        th = th * (1.0 + eps)
    f = expectation_z(th, x_arr)
    if backend.shots is not None:
        gen = backend._need_gen()
        p = np.clip((1.0 + f) / 2, 0.0, 1.0)
        n_plus = gen.binomial(backend.shots, p)
        f = (2 * n_plus - backend.shots) / backend.shots
    return float(f[0]) if np.ndim(x) == 0 else f


def mse(predictions, ys) -> float:
    return float(np.mean((np.asarray(ys) - np.asarray(predictions)) ** 2))


def mse_cost(theta, data: Dataset, backend: Backend | None = None) -> float:
    return data.weight * mse(predict(theta, data.xs, backend), data.ys)


def objective(theta, data: Dataset, lam: float, backend: Backend | None = None) -> float:
    theta = np.asarray(theta, dtype=float)
    return mse_cost(theta, data, backend) + lam * float(theta @ theta)


def parameter_shift_grad(theta, data: Dataset, lam: float = 0.0, backend: Backend | None = None) -> np.ndarray:
    """Gradient of MSE + lam ||theta||^2 via +-pi/2 shifts of each angle."""
    theta = np.asarray(theta, dtype=float)
    grad = 2 * lam * theta
    if data.weight == 0:
        return grad
    f = predict(theta, data.xs, backend)
    resid = f - data.ys
    for i in range(3):
        e = np.zeros(3)
        e[i] = SHIFT
        df = (predict(theta + e, data.xs, backend) - predict(theta - e, data.xs, backend)) / 2
        grad[i] += data.weight * 2 * np.mean(resid * df)
    return grad


def lipschitz_of(theta) -> float:
    return float(np.sum(np.abs(theta)) / 2)


def vqa_circuit(theta, x: float) -> Circuit:
    """The ansatz as a Circuit; only the trainable rotations are noisy."""
    t1, t2, t3 = (float(t) for t in theta)
    return Circuit(1, (gate("rx", 0, [x], noisy=False), gate("rz", 0, [t1]), gate("ry", 0, [t2]), gate("rz", 0, [t3])))


# ------------------------------------------------------------------ training

@dataclass
class TrainRecord:
    lam: float
    seed: int
    theta_trajectory: np.ndarray  # (iters + 1, 3) of the selected restart
    cost_trajectory: np.ndarray   # objective seen by the optimiser at each iterate
    final_theta: np.ndarray
    final_mse: float              # exact, noise-free
    final_lipschitz: float
    restart: int
    restart_costs: list[float] = field(default_factory=list)

    def summary(self) -> dict:
        return {
            "lambda": self.lam, "seed": self.seed, "restart": self.restart,
            "final_theta": self.final_theta.tolist(), "final_mse": self.final_mse,
            "final_L": self.final_lipschitz,
        }


def adam(theta0, grad_fn, iters: int, lr: float = LEARNING_RATE, cost_fn=None):
    """Plain ADAM; returns (trajectory, costs) with ``iters + 1`` entries."""
    theta = np.array(theta0, dtype=float)
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    traj = [theta.copy()]
    costs = [cost_fn(theta)] if cost_fn else []
    for t in range(1, iters + 1):
        g = grad_fn(theta)
        m = BETA1 * m + (1 - BETA1) * g
        v = BETA2 * v + (1 - BETA2) * g * g
        m_hat = m / (1 - BETA1**t)
        v_hat = v / (1 - BETA2**t)
        theta = theta - lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)
        traj.append(theta.copy())
        if cost_fn:
            costs.append(cost_fn(theta))
    return np.array(traj), np.array(costs)


def adam_train(lam: float, seed: int, iters: int = 50, restarts: int = 8, lr: float = LEARNING_RATE,
               eps_bar: float = 0.05, shots: int | None = None, data: Dataset | None = None,
               rng=None, experiment_id="vqa") -> TrainRecord:
    """Train ``restarts`` models from U[-2pi, 2pi]^3 and keep the one with the
    lowest final objective (evaluated exactly, without noise).

    Random streams depend on (seed, restart) but not on ``lam``, so different
    regularisation weights see the same initialisations and noise draws.
    """
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    data = data or sine_dataset()
    rng = as_rng(rng)
    best = None
    costs_final = []
    for r in range(restarts):
        theta0 = rng.stream(experiment_id, "init", seed, r).uniform(-2 * np.pi, 2 * np.pi, size=3)
        backend = Backend(shots, eps_bar, rng.stream(experiment_id, "noise", seed, r))
        traj, costs = adam(
            theta0,
            lambda th: parameter_shift_grad(th, data, lam, backend),
            iters, lr,
            cost_fn=lambda th: objective(th, data, lam),
        )
        final = float(costs[-1])
        costs_final.append(final)
        if best is None or final < best[0]:
            best = (final, r, traj, costs)
    _, r, traj, costs = best
    theta = traj[-1]
    return TrainRecord(
        lam=float(lam), seed=int(seed), theta_trajectory=traj, cost_trajectory=costs,
        final_theta=theta.copy(), final_mse=mse_cost(theta, data), final_lipschitz=lipschitz_of(theta),
        restart=r, restart_costs=costs_final,
    )


@dataclass
class StudyResult:
    records: list[TrainRecord]

    def table(self) -> list[dict]:
        rows = []
        for lam in sorted({r.lam for r in self.records}):
            sel = [r for r in self.records if r.lam == lam]
            L = np.array([r.final_lipschitz for r in sel])
            M = np.array([r.final_mse for r in sel])
            rows.append({"lambda": lam, "runs": len(sel), "mean_L": float(L.mean()), "std_L": float(L.std()),
                         "mean_mse": float(M.mean())})
        return rows

    def to_csv(self, fh=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda", "seed", "final_mse", "final_L", "theta_1", "theta_2", "theta_3"])
        for r in self.records:
            w.writerow([repr(r.lam), r.seed, repr(r.final_mse), repr(r.final_lipschitz)]
                       + [repr(float(t)) for t in r.final_theta])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps({"table": self.table(), "runs": [r.summary() for r in self.records]}, indent=indent)


def regularization_study(lambdas: Sequence[float] = DEFAULT_LAMBDAS, seeds: int | Sequence[int] = 8,
                         threads: int = 1, **train_kw) -> StudyResult:
    seed_list = list(range(seeds)) if isinstance(seeds, int) else list(seeds)
    cells = [(float(lam), s) for lam in lambdas for s in seed_list]

    def run(cell):
        return adam_train(cell[0], cell[1], **train_kw)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(run, cells))
    else:
        records = [run(c) for c in cells]
    return StudyResult(records)
