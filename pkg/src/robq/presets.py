"""Ready-made circuits used by the experiments and the CLI.

intro / intro_prime
    Rz(pi/4) Ry(pi/2) and Rz(-3pi/4) Ry(-pi/2): same output on |0> up to a
    global phase, Lipschitz bounds 3pi/8 and 5pi/8.
validation_a / validation_b
    Sequences over {Rz, sqrt(X), X} preparing the same state from |0>, with
    only the Rz gates noisy.  Bounds pi/8 (3 gates) and 5pi/8 (4 gates).
qft_textbook
    3-qubit QFT from 3 H, 3 controlled-phase and one SWAP, equal to the DFT
    matrix on 8 points with qubit 0 as the most significant bit.
"""
from __future__ import annotations

import math

import numpy as np

from .circuit import Circuit, NoiseModel, gate

PI = math.pi


def intro(eps_bar: float = 0.2) -> Circuit:
    return Circuit(1, (gate("rz", 0, [PI / 4]), gate("ry", 0, [PI / 2])), NoiseModel(eps_bar))


def intro_prime(eps_bar: float = 0.2) -> Circuit:
    return Circuit(1, (gate("rz", 0, [-3 * PI / 4]), gate("ry", 0, [-PI / 2])), NoiseModel(eps_bar))


def validation_a(eps_bar: float = 0.0) -> Circuit:
    # sqrt(X)|0> -> X -> Rz(-pi/4)
    return Circuit.from_time_order(
        1,
        [gate("sx", 0, noisy=False), gate("x", 0, noisy=False), gate("rz", 0, [-PI / 4])],
        NoiseModel(eps_bar),
    )


def validation_b(eps_bar: float = 0.0) -> Circuit:
    # sqrt(X)|0> -> Rz(3pi/4) -> X -> Rz(pi/2)
    return Circuit.from_time_order(
        1,
        [gate("sx", 0, noisy=False), gate("rz", 0, [3 * PI / 4]), gate("x", 0, noisy=False), gate("rz", 0, [PI / 2])],
        NoiseModel(eps_bar),
    )


def qft_textbook(eps_bar: float = 0.05) -> Circuit:
    ops = [
        gate("h", 0),
        gate("cp", (1, 0), [PI / 2]),
        gate("cp", (2, 0), [PI / 4]),
        gate("h", 1),
        gate("cp", (2, 1), [PI / 2]),
        gate("h", 2),
        gate("swap", (0, 2)),
    ]
    return Circuit.from_time_order(3, ops, NoiseModel(eps_bar))


def dft_matrix(d: int = 8) -> np.ndarray:
    j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    return np.exp(2j * np.pi * j * k / d) / np.sqrt(d)


PRESETS = {
    "intro": intro,
    "intro-prime": intro_prime,
    "validation-a": validation_a,
    "validation-b": validation_b,
    "qft": qft_textbook,
}
