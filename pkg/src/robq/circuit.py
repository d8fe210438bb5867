"""Circuit data model, JSON (de)serialisation and ideal-unitary construction.

Gate order follows the operator product: for ``gates = [g1, ..., gN]`` the
circuit implements ``U_1 ... U_N |psi0>``, so the *last* list element acts
first.  Use :meth:`Circuit.from_time_order` to build a circuit from a list in
the order the gates are applied.
"""
from __future__ import annotations

import ast
import json
import math
import operator
import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import jsonschema
import numpy as np

from .errors import BadParamCount, DimensionMismatch, QubitOutOfRange, SchemaError, TooLarge, UnknownGate
from .gates import Gate, builtin_gate, custom_gate
from .numerics import MAX_QUBITS, apply_local

CIRCUIT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["qubits", "gates"],
    "properties": {
        "qubits": {"type": "integer", "minimum": 1, "maximum": MAX_QUBITS},
        "gates": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["name", "qubits"],
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "qubits": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
                    "params": {"type": "array", "items": {"type": ["number", "string"]}},
                    "noisy": {"type": "boolean"},
                    "generator": {
                        "type": "array",
                        "items": {
                            "type": "array",
                            "items": {
                                "type": "array",
                                "items": {"type": "number"},
                                "minItems": 2,
                                "maxItems": 2,
                            },
                        },
                    },
                },
            },
        },
        "noise": {
            "type": "object",
            "additionalProperties": False,
            "required": ["eps_bar"],
            "properties": {
                "eps_bar": {"type": "number", "minimum": 0},
                "per_gate": {
                    "type": "object",
                    "patternProperties": {"^[0-9]+$": {"type": "number", "minimum": 0}},
                    "additionalProperties": False,
                },
            },
        },
    },
}


@dataclass(frozen=True)
class NoiseModel:
    """Uniform multiplicative noise on [-eps_bar, eps_bar], optionally per gate index."""

    eps_bar: float = 0.0
    per_gate: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.eps_bar < 0 or any(v < 0 for v in self.per_gate.values()):
            raise ValueError("noise bounds must be nonnegative")
        object.__setattr__(self, "per_gate", {int(k): float(v) for k, v in self.per_gate.items()})

    def bound(self, index: int, default: float | None = None) -> float:
        base = self.eps_bar if default is None else default
        return self.per_gate.get(index, base)


@dataclass(frozen=True, eq=False)
class GateInstance:
    gate: Gate
    support: tuple[int, ...]
    noisy: bool = True
    custom: bool = False

    def __post_init__(self):
        support = tuple(int(q) for q in self.support)
        if len(set(support)) != len(support):
            raise DimensionMismatch(f"repeated qubit in support {support}")
        if len(support) != self.gate.arity:
            raise DimensionMismatch(f"{self.gate.name} acts on {self.gate.arity} qubit(s), got {support}")
        if not all(math.isfinite(p) for p in self.gate.params):
            raise ValueError("gate parameters must be finite")
        object.__setattr__(self, "support", support)

    @property
    def name(self) -> str:
        return self.gate.name

    @property
    def params(self) -> tuple[float, ...]:
        return self.gate.params

    @property
    def generator(self) -> np.ndarray:
        return self.gate.generator

    @property
    def unitary(self) -> np.ndarray:
        return self.gate.unitary

    def __eq__(self, other):
        if not isinstance(other, GateInstance):
            return NotImplemented
        return (
            self.name == other.name
            and self.params == other.params
            and self.support == other.support
            and self.noisy == other.noisy
            and self.custom == other.custom
            and np.array_equal(self.generator, other.generator)
        )

    __hash__ = None


def gate(name: str, qubits: Sequence[int] | int, params: Sequence[float] = (), noisy: bool = True) -> GateInstance:
    """Shorthand for a built-in gate instance."""
    if isinstance(qubits, int):
        qubits = (qubits,)
    return GateInstance(builtin_gate(name, params), tuple(qubits), noisy)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[GateInstance, ...] = ()
    noise: NoiseModel = field(default_factory=NoiseModel)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.n_qubits < 1:
            raise ValueError("a circuit needs at least one qubit")
        for i, g in enumerate(self.gates):
            if any(q >= self.n_qubits or q < 0 for q in g.support):
                raise QubitOutOfRange(
                    f"gate {g.name} uses qubits {list(g.support)} in a {self.n_qubits}-qubit circuit",
                    f"$.gates[{i}].qubits",
                )

    @classmethod
    def from_time_order(cls, n_qubits: int, gates: Iterable[GateInstance], noise: NoiseModel | None = None):
        """Build a circuit from gates listed in the order they are applied."""
        return cls(n_qubits, tuple(reversed(list(gates))), noise or NoiseModel())

    def time_order(self) -> list[GateInstance]:
        return list(reversed(self.gates))

    @property
    def noisy_indices(self) -> list[int]:
        return [i for i, g in enumerate(self.gates) if g.noisy]

    @property
    def n_noisy(self) -> int:
        return sum(g.noisy for g in self.gates)

    def noise_bounds(self, eps_bar: float | None = None) -> np.ndarray:
        """Per-noisy-gate noise bound, in list order; per-gate overrides win."""
        return np.array([self.noise.bound(i, eps_bar) for i in self.noisy_indices], dtype=float)

    def with_noise(self, eps_bar: float, per_gate: Mapping[int, float] | None = None) -> Circuit:
        return Circuit(self.n_qubits, self.gates, NoiseModel(eps_bar, per_gate or {}))

    def __matmul__(self, other: Circuit) -> Circuit:
        """Circuit implementing U_self @ U_other (``other`` acts first)."""
        if self.n_qubits != other.n_qubits:
            raise DimensionMismatch("cannot compose circuits on different qubit counts")
        shift = len(self.gates)
        per_gate = dict(self.noise.per_gate)
        per_gate.update({k + shift: v for k, v in other.noise.per_gate.items()})
        return Circuit(self.n_qubits, self.gates + other.gates, NoiseModel(self.noise.eps_bar, per_gate))

    def __eq__(self, other):
        if not isinstance(other, Circuit):
            return NotImplemented
        return (
            self.n_qubits == other.n_qubits
            and self.gates == other.gates
            and self.noise.eps_bar == other.noise.eps_bar
            and dict(self.noise.per_gate) == dict(other.noise.per_gate)
        )

    __hash__ = None


# ------------------------------------------------------------------ parsing

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_UNOPS = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def parse_angle(value: float | int | str) -> float:
    """Number or arithmetic expression in ``pi`` such as ``"-3*pi/4"`` or ``"3pi/8"``."""
    if isinstance(value, bool):
        raise ValueError("boolean is not an angle")
    if isinstance(value, (int, float)):
        return float(value)
    text = value.strip().replace("π", "pi")
    # allow implicit multiplication like "3pi"
    text = re.sub(r"(\d)\s*pi", r"\1*pi", text)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            return _UNOPS[type(node.op)](ev(node.operand))
        raise ValueError(f"unsupported angle expression {value!r}")

    try:
        result = ev(ast.parse(text, mode="eval"))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise ValueError(f"bad angle expression {value!r}") from exc
    if not math.isfinite(result):
        raise ValueError(f"angle {value!r} is not finite")
    return result


def _json_path(parts) -> str:
    path = "$"
    for p in parts:
        path += f"[{p}]" if isinstance(p, int) else f".{p}"
    return path


def circuit_from_dict(doc: Any) -> Circuit:
    validator = jsonschema.Draft202012Validator(CIRCUIT_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise SchemaError(err.message, _json_path(err.absolute_path))
    n = doc["qubits"]
    instances = []
    for i, spec in enumerate(doc["gates"]):
        path = f"$.gates[{i}]"
        support = tuple(spec["qubits"])
        bad = [q for q in support if q < 0 or q >= n]
        if bad:
            raise QubitOutOfRange(f"qubit(s) {bad} out of range for {n} qubits", path + ".qubits")
        try:
            params = [parse_angle(p) for p in spec.get("params", [])]
        except ValueError as exc:
            raise SchemaError(str(exc), path + ".params") from exc
        try:
            if "generator" in spec:
                if params:
                    raise BadParamCount("a gate with an explicit generator takes no params")
                H = np.array([[complex(re, im) for re, im in row] for row in spec["generator"]])
                g = custom_gate(H, spec["name"])
                custom = True
            else:
                g = builtin_gate(spec["name"], params)
                custom = False
            instances.append(GateInstance(g, support, spec.get("noisy", True), custom))
        except UnknownGate as exc:
            raise UnknownGate(f"{path}.name: unknown gate {spec['name']!r}") from exc
        except (BadParamCount, DimensionMismatch, ValueError) as exc:
            raise SchemaError(str(exc), path) from exc
    noise_doc = doc.get("noise", {"eps_bar": 0.0})
    per_gate = {int(k): float(v) for k, v in noise_doc.get("per_gate", {}).items()}
    for k in per_gate:
        if k >= len(instances):
            raise SchemaError(f"per_gate index {k} has no gate", f"$.noise.per_gate.{k}")
    return Circuit(n, tuple(instances), NoiseModel(float(noise_doc["eps_bar"]), per_gate))


def parse_circuit(text: str | bytes) -> Circuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from exc
    return circuit_from_dict(doc)


def load_circuit(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse_circuit(fh.read())


def circuit_to_dict(c: Circuit) -> dict:
    gates = []
    for g in c.gates:
        entry: dict[str, Any] = {"name": g.name, "qubits": list(g.support)}
        if g.custom:
            entry["generator"] = [[[float(z.real), float(z.imag)] for z in row] for row in g.generator]
        else:
            entry["params"] = list(g.params)
        entry["noisy"] = g.noisy
        gates.append(entry)
    noise: dict[str, Any] = {"eps_bar": c.noise.eps_bar}
    if c.noise.per_gate:
        noise["per_gate"] = {str(k): v for k, v in sorted(c.noise.per_gate.items())}
    return {"qubits": c.n_qubits, "gates": gates, "noise": noise}


def serialize_circuit(c: Circuit, indent: int | None = 2) -> str:
    return json.dumps(circuit_to_dict(c), indent=indent)


# ------------------------------------------------------------------ unitaries

def ideal_unitary(c: Circuit) -> np.ndarray:
    """Dense 2^n x 2^n operator U_1 ... U_N."""
    if c.n_qubits > MAX_QUBITS:
        raise TooLarge(f"{c.n_qubits} qubits exceeds the dense limit of {MAX_QUBITS}")
    d = 1 << c.n_qubits
    # rows are the images of the basis vectors
    rows = np.eye(d, dtype=complex)
    for g in c.time_order():
        rows = apply_local(rows, g.unitary, g.support, c.n_qubits)
    return rows.T.copy()


def equivalent_up_to_phase(U, V, tol: float = 1e-8) -> tuple[bool, float]:
    """Phase-insensitive comparison: deviation = 1 - |tr(U^dag V)| / d."""
    U = np.asarray(U, dtype=complex)
    V = np.asarray(V, dtype=complex)
    if U.shape != V.shape or U.ndim != 2:
        raise DimensionMismatch(f"shapes {U.shape} and {V.shape} differ")
    d = U.shape[0]
    deviation = max(0.0, 1.0 - abs(np.vdot(U, V)) / d)
    return deviation <= tol, deviation
