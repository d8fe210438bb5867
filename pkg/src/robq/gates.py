"""Named gates with explicit Hermitian generators (U = exp(-iH)).

Rotation-type gates (rx, ry, rz, rxy, rzz, u1, cp) keep their natural generator,
which grows linearly with the rotation angle: ``rz(4*pi)`` has generator
``2*pi*Z`` and norm ``2*pi``, even though the unitary is the identity.  The
multiplicative control error scales the physically actuated angle, so the
generator must not be wrapped.

Every other gate uses the principal-branch generator of its unitary
(eigenphases in (-pi, pi]).  Because ``H + phi*I`` generates the same gate up to
a global phase, :func:`phase_optimize` gives the shift that minimises the norm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import BadParamCount, UnknownGate
from .numerics import check_hermitian, expm_herm, herm_eigen, principal_log_generator, spectral_norm

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)

MODES = ("raw", "phase_optimized")


def normalize_mode(mode: str) -> str:
    m = mode.replace("-", "_").lower()
    if m in ("phase_opt", "phaseopt", "optimized"):
        m = "phase_optimized"
    if m not in MODES:
        raise ValueError(f"unknown norm mode {mode!r}; expected one of {MODES}")
    return m


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------- unitaries

def _rot(P: np.ndarray, theta: float) -> np.ndarray:
    return math.cos(theta / 2) * np.eye(P.shape[0]) - 1j * math.sin(theta / 2) * P


def _u3(theta, phi, lam):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [[c, -np.exp(1j * lam) * s], [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]],
        dtype=complex,
    )


def _zpow(t):
    return np.diag([1, np.exp(1j * math.pi * t)])


def _xpow(t):
    # X**t with eigenvalues 1 and exp(i*pi*t)
    g = np.exp(1j * math.pi * t / 2)
    c, s = math.cos(math.pi * t / 2), math.sin(math.pi * t / 2)
    return g * np.array([[c, -1j * s], [-1j * s, c]])


def _phasedxz(x, z, a):
    return _zpow(z) @ _zpow(a) @ _xpow(x) @ _zpow(-a)


def _fsim(theta, phi):
    c, s = math.cos(theta), math.sin(theta)
    return np.array(
        [[1, 0, 0, 0], [0, c, -1j * s, 0], [0, -1j * s, c, 0], [0, 0, 0, np.exp(-1j * phi)]],
        dtype=complex,
    )


_r = 1 / math.sqrt(2)
_FIXED = {
    "x": X,
    "y": Y,
    "z": Z,
    "h": np.array([[1, 1], [1, -1]], dtype=complex) * _r,
    "s": np.diag([1, 1j]),
    "t": np.diag([1, np.exp(1j * math.pi / 4)]),
    "sx": np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex) / 2,
    "cx": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
    "swap": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
    "sqrt_iswap": np.array(
        [[1, 0, 0, 0], [0, _r, 1j * _r, 0], [0, 1j * _r, _r, 0], [0, 0, 0, 1]], dtype=complex
    ),
}


# --------------------------------------------------------------- registry

@dataclass(frozen=True)
class GateDef:
    name: str
    arity: int
    param_count: int
    generator: Callable[..., np.ndarray]
    unitary: Callable[..., np.ndarray]
    natural: bool  # generator is the unwrapped rotation generator


def _natural(name, arity, nparams, gen):
    return GateDef(name, arity, nparams, gen, lambda *p: expm_herm(gen(*p)), True)


def _principal(name, arity, nparams, unitary):
    return GateDef(name, arity, nparams, lambda *p: principal_log_generator(unitary(*p)), unitary, False)


_ZZ = np.kron(Z, Z)
_P11 = np.diag([0, 0, 0, 1]).astype(complex)

GATE_DEFS: dict[str, GateDef] = {}
for _name, _U in _FIXED.items():
    GATE_DEFS[_name] = _principal(_name, _U.shape[0].bit_length() - 1, 0, lambda _U=_U: _U)
GATE_DEFS.update(
    {
        "rx": _natural("rx", 1, 1, lambda t: t / 2 * X),
        "ry": _natural("ry", 1, 1, lambda t: t / 2 * Y),
        "rz": _natural("rz", 1, 1, lambda t: t / 2 * Z),
        "rxy": _natural("rxy", 1, 2, lambda t, p: t / 2 * (math.cos(p) * X + math.sin(p) * Y)),
        "u1": _natural("u1", 1, 1, lambda lam: np.diag([0, -lam]).astype(complex)),
        "cp": _natural("cp", 2, 1, lambda lam: -lam * _P11),
        "rzz": _natural("rzz", 2, 1, lambda t: t / 2 * _ZZ),
        "u2": _principal("u2", 1, 2, lambda phi, lam: _u3(math.pi / 2, phi, lam)),
        "u3": _principal("u3", 1, 3, _u3),
        "phasedxz": _principal("phasedxz", 1, 3, _phasedxz),
        "fsim": _principal("fsim", 2, 2, _fsim),
    }
)
ALIASES = {"uzz": "rzz", "cnot": "cx", "p": "u1", "sqrtx": "sx"}


def resolve_name(name: str) -> str:
    key = name.lower()
    key = ALIASES.get(key, key)
    if key not in GATE_DEFS:
        raise UnknownGate(name)
    return key


@dataclass(frozen=True, eq=False)
class Gate:
    """A gate with concrete parameters: its generator and unitary (local support)."""

    name: str
    params: tuple[float, ...]
    generator: np.ndarray = field(repr=False)
    unitary: np.ndarray = field(repr=False)

    @property
    def arity(self) -> int:
        return self.generator.shape[0].bit_length() - 1


def builtin_gate(name: str, params: Sequence[float] = ()) -> Gate:
    key = resolve_name(name)
    d = GATE_DEFS[key]
    params = tuple(float(p) for p in params)
    if len(params) != d.param_count:
        raise BadParamCount(f"{key} takes {d.param_count} parameter(s), got {len(params)}")
    H = d.generator(*params)
    U = expm_herm(H) if d.natural else d.unitary(*params)
    return Gate(key, params, _readonly(H), _readonly(U))


def custom_gate(generator, name: str = "custom") -> Gate:
    H = check_hermitian(generator)
    H = (H + H.conj().T) / 2
    if H.shape[0] < 2 or H.shape[0] & (H.shape[0] - 1):
        raise BadParamCount(f"custom generator dimension {H.shape[0]} is not a power of two >= 2")
    return Gate(name, (), _readonly(H), _readonly(expm_herm(H)))


# ------------------------------------------------------- norms and phases

class PhaseOptimizedNorm(NamedTuple):
    raw_norm: float
    optimized_norm: float
    phi_star: float


def phase_optimize(H) -> PhaseOptimizedNorm:
    """Minimise ||H + phi*I||_2 over real phi (closed form: half the spectral spread)."""
    w = herm_eigen(H).eigenvalues
    lo, hi = float(w[0]), float(w[-1])
    raw = max(abs(lo), abs(hi))
    return PhaseOptimizedNorm(raw, (hi - lo) / 2, -(hi + lo) / 2)


def shifted_generator(H, mode: str = "raw") -> np.ndarray:
    """Generator as used by the bounds: H itself, or H + phi* I."""
    if normalize_mode(mode) == "raw":
        return np.asarray(H)
    return np.asarray(H) + phase_optimize(H).phi_star * np.eye(np.asarray(H).shape[0])


def gate_norm(gate: Gate, mode: str = "raw") -> float:
    """Spectral norm of the gate's generator on its local support."""
    if normalize_mode(mode) == "raw":
        return spectral_norm(gate.generator)
    return phase_optimize(gate.generator).optimized_norm


# ------------------------------------------------------ Euler angle helpers

def zyz_angles(U) -> tuple[float, float, float, float]:
    """(alpha, phi, theta, lam) with U = exp(i*alpha) Rz(phi) Ry(theta) Rz(lam)."""
    U = np.asarray(U, dtype=complex)
    det = np.linalg.det(U)
    alpha = float(np.angle(det)) / 2
    V = U * np.exp(-1j * alpha)
    theta = 2 * math.atan2(abs(V[1, 0]), abs(V[0, 0]))
    if abs(V[0, 0]) > 1e-12 and abs(V[1, 0]) > 1e-12:
        plus = -2 * float(np.angle(V[0, 0]))
        minus = 2 * float(np.angle(V[1, 0]))
    elif abs(V[1, 0]) <= 1e-12:
        plus, minus = -2 * float(np.angle(V[0, 0])), 0.0
    else:
        plus, minus = 0.0, 2 * float(np.angle(V[1, 0]))
    phi, lam = (plus + minus) / 2, (plus - minus) / 2
    # V was only fixed up to a sign; absorb it into the global phase
    W = _rot(Z, phi) @ _rot(Y, theta) @ _rot(Z, lam)
    if np.allclose(W, -V, atol=1e-9):
        alpha += math.pi
    return alpha, phi, theta, lam


def u3_params(U) -> tuple[float, float, float]:
    """(theta, phi, lam) with U equal to u3(theta, phi, lam) up to global phase."""
    _, phi, theta, lam = zyz_angles(U)
    return theta, phi, lam


def phasedxz_params(U) -> tuple[float, float, float]:
    """(x_exponent, z_exponent, axis_phase_exponent) reproducing U up to global phase."""
    _, phi, theta, lam = zyz_angles(U)
    # Rz(phi) Ry(theta) Rz(lam) = Rz(phi + pi/2) Rx(theta) Rz(lam - pi/2)
    beta, gamma, delta = phi + math.pi / 2, theta, lam - math.pi / 2
    a = -delta / math.pi
    return gamma / math.pi, beta / math.pi - a, a
