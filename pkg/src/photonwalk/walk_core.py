"""Operator algebra and state evolution for 1D coin-based discrete-time quantum walks.

The walker lives on coin (2-level) x position space over a finite graph:
either an open line or a closed cycle of vertices.  Amplitudes use the flat
coin-major index ``c * size + l`` throughout; every module in this package
shares that convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

UNITARITY_TOL = 1e-12
NORM_TOL = 1e-10

OPEN_LINE = "open_line"
CLOSED_CYCLE = "closed_cycle"


class WalkError(Exception):
    """Base class for walk construction and evolution errors."""


class BoundaryViolation(WalkError):
    """A shift on an open line tried to move amplitude off the graph."""


class DimensionMismatch(WalkError):
    """Operands act on spaces of different dimension."""


@dataclass(frozen=True)
class CoinParams:
    """The four real angles (radians) parametrizing a 2x2 unitary coin."""

    p: float
    q: float
    r: float
    theta: float


def build_coin(params: CoinParams) -> np.ndarray:
    """Build the 2x2 coin unitary for the given angle tuple.

    Returns e^{ip} [[e^{iq} cos t, e^{ir} sin t], [-e^{-ir} sin t, e^{-iq} cos t]].
    """
    c = np.cos(params.theta)
    s = np.sin(params.theta)
    m = np.exp(1j * params.p) * np.array(
        [
            [np.exp(1j * params.q) * c, np.exp(1j * params.r) * s],
            [-np.exp(-1j * params.r) * s, np.exp(-1j * params.q) * c],
        ],
        dtype=complex,
    )
    _check_unitary(m)
    return m


@dataclass(frozen=True)
class Topology:
    """Finite 1D position graph: an open line or a closed cycle of vertices."""

    kind: str
    size: int

    def __post_init__(self) -> None:
        if self.kind not in (OPEN_LINE, CLOSED_CYCLE):
            raise ValueError(f"unknown topology kind: {self.kind!r}")
        if self.size < 1:
            raise ValueError("topology size must be positive")

    @property
    def dim(self) -> int:
        return 2 * self.size


@dataclass(frozen=True)
class Shift:
    """Coin-conditioned position move: direction +1 (right) or -1 (left)."""

    coin: int
    direction: int

    def __post_init__(self) -> None:
        if self.coin not in (0, 1):
            raise ValueError("shift coin label must be 0 or 1")
        if self.direction not in (-1, 1):
            raise ValueError("shift direction must be +1 or -1")


def s_plus(b: int) -> Shift:
    """Shift moving position l -> l+1 when the coin is |b>."""
    return Shift(coin=b, direction=+1)


def s_minus(a: int) -> Shift:
    """Shift moving position l -> l-1 when the coin is |a>."""
    return Shift(coin=a, direction=-1)


def _forbidden_positions(shift: Shift, topology: Topology) -> list[int]:
    # On a closed cycle every move follows an edge.  On an open line the
    # modular wrap is only legal when the wrap target is actually adjacent,
    # which happens exactly for size 2 (a single edge traversed either way).
    if topology.kind == CLOSED_CYCLE or topology.size <= 2:
        return []
    return [topology.size - 1 if shift.direction > 0 else 0]


def build_shift(shift: Shift, topology: Topology) -> np.ndarray:
    """Build the full-space shift operator (a 2*size x 2*size permutation)."""
    if topology.size < 2:
        raise ValueError("shift requires at least two positions")
    n = topology.size
    m = np.zeros((2 * n, 2 * n), dtype=complex)
    other = 1 - shift.coin
    for l in range(n):
        m[shift.coin * n + (l + shift.direction) % n, shift.coin * n + l] = 1.0
        m[other * n + l, other * n + l] = 1.0
    _check_unitary(m)
    return m


@dataclass(frozen=True)
class WalkStep:
    """One evolution step: position-dependent coin, optional shift, phase.

    ``coin_map`` assigns a 2x2 unitary to position indices; missing positions
    default to identity.  ``tag`` is a structural label consumed by the
    photonic compiler (e.g. marking a position-Hadamard block).
    """

    coin_map: Mapping[int, np.ndarray] = field(default_factory=dict)
    shift: Optional[Shift] = None
    global_phase: float = 0.0
    tag: Optional[str] = None


@dataclass(frozen=True)
class WalkState:
    """Normalized amplitude vector over coin x position, coin-major flat index."""

    topology: Topology
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.topology.dim,):
            raise DimensionMismatch(
                f"expected {self.topology.dim} amplitudes, got {amps.shape}"
            )
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, topology: Topology, coin: int, position: int) -> "WalkState":
        amps = np.zeros(topology.dim, dtype=complex)
        amps[coin * topology.size + position] = 1.0
        return cls(topology, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def _check_unitary(m: np.ndarray) -> None:
    dev = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
    if dev > UNITARITY_TOL:
        raise WalkError(f"operator is not unitary (max deviation {dev:.3e})")


def coin_layer_operator(
    coin_map: Mapping[int, np.ndarray], topology: Topology
) -> np.ndarray:
    """Full-space operator applying coin_map[l] to the coin at each position l."""
    n = topology.size
    m = np.zeros((2 * n, 2 * n), dtype=complex)
    eye2 = np.eye(2)
    for l in range(n):
        c = np.asarray(coin_map.get(l, eye2), dtype=complex)
        for row in range(2):
            for col in range(2):
                m[row * n + l, col * n + l] = c[row, col]
    return m


def step_operator(step: WalkStep, topology: Topology) -> np.ndarray:
    """Induced full-space operator of a step: shift . coin-layer . e^{i phase}."""
    m = coin_layer_operator(step.coin_map, topology)
    if step.shift is not None:
        m = build_shift(step.shift, topology) @ m
    if step.global_phase != 0.0:
        m = np.exp(1j * step.global_phase) * m
    _check_unitary(m)
    return m


def program_operator(steps: Sequence[WalkStep], topology: Topology) -> np.ndarray:
    """Operator of a whole program (left fold of step operators)."""
    m = np.eye(topology.dim, dtype=complex)
    for step in steps:
        m = step_operator(step, topology) @ m
    return m


def apply_step(state: WalkState, step: WalkStep) -> WalkState:
    """Apply one step to a state, raising BoundaryViolation on off-line moves."""
    topo = state.topology
    n = topo.size
    amps = state.amplitudes.copy()
    eye2 = np.eye(2)
    for l in range(n):
        c = step.coin_map.get(l)
        if c is None:
            continue
        c = np.asarray(c, dtype=complex)
        v = np.array([amps[l], amps[n + l]])
        amps[l], amps[n + l] = c @ v
    if step.shift is not None:
        for l in _forbidden_positions(step.shift, topo):
            idx = step.shift.coin * n + l
            if abs(amps[idx]) > UNITARITY_TOL:
                raise BoundaryViolation(
                    f"shift would move amplitude off the open line at position {l}"
                )
        block = slice(step.shift.coin * n, (step.shift.coin + 1) * n)
        amps[block] = np.roll(amps[block], step.shift.direction)
    if step.global_phase != 0.0:
        amps = amps * np.exp(1j * step.global_phase)
    out = WalkState(topo, amps)
    if abs(out.norm() - state.norm()) > NORM_TOL:
        raise WalkError("step did not preserve the state norm")
    return out


def run_program(state: WalkState, steps: Sequence[WalkStep]) -> WalkState:
    """Left-fold apply_step over a program, tagging errors with the step index."""
    for i, step in enumerate(steps):
        try:
            state = apply_step(state, step)
        except WalkError as exc:
            raise type(exc)(f"step {i}: {exc}") from exc
    return state


def measure_position(state: WalkState) -> np.ndarray:
    """P(l) = sum over coins of |amplitude(c, l)|^2."""
    n = state.topology.size
    probs = np.abs(state.amplitudes) ** 2
    return probs[:n] + probs[n:]


def measure_joint(state: WalkState) -> np.ndarray:
    """Per-(coin, position) probabilities as a (2, size) array."""
    n = state.topology.size
    return (np.abs(state.amplitudes) ** 2).reshape(2, n)


def unitary_to_json(m: np.ndarray) -> list:
    """Matrix as nested lists of [re, im] pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def state_to_json(state: WalkState) -> dict:
    return {
        "kind": state.topology.kind,
        "size": state.topology.size,
        "amplitudes": [
            [float(z.real), float(z.imag)] for z in state.amplitudes
        ],
    }
