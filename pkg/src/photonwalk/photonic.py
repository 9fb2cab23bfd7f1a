"""Linear-optics model and compiler for the walk programs.

A photon occupies (polarization, mode) with the same coin-major flat index
the walk uses, so compiled circuits and walk programs produce directly
comparable operators: polarization <-> coin, mode <-> position.

Components: half-wave plates (HWP), 50:50 beam splitters (BS), phase
shifters, polarizing beam splitters (PBS), and mode permuters.  Mode
permuters are path relabelings and never count as physical components.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import algorithms as alg
from .walk_core import NORM_TOL, program_operator

MATCH_TOL = 1e-12
FIDELITY_TOL = 1e-9


class CompileError(Exception):
    """A walk program has no valid lowering to the optical component set."""


class UnsupportedCoin(CompileError):
    """A coin operator outside the supported lowering alphabet."""


class ModeCollision(Exception):
    """A two-mode component was given identical modes."""


@dataclass(frozen=True)
class HWP:
    angle: float
    mode: int
    kind: str = field(default="hwp", init=False)


@dataclass(frozen=True)
class BeamSplitter:
    mode_a: int
    mode_b: int
    kind: str = field(default="bs", init=False)


@dataclass(frozen=True)
class PhaseShifter:
    phase: float
    mode: int
    kind: str = field(default="phase_shifter", init=False)


@dataclass(frozen=True)
class PBS:
    mode_a: int
    mode_b: int
    kind: str = field(default="pbs", init=False)


@dataclass(frozen=True)
class ModePermuter:
    permutation: tuple
    kind: str = field(default="mode_permuter", init=False)


Component = Union[HWP, BeamSplitter, PhaseShifter, PBS, ModePermuter]


def pbs(mode_a: int, mode_b: int) -> PBS:
    """Polarizing beam splitter: transmits H in place, routes V between modes."""
    if mode_a == mode_b:
        raise ModeCollision("PBS needs two distinct modes")
    return PBS(mode_a, mode_b)


def hwp_jones(alpha: float) -> np.ndarray:
    """Jones matrix of a half-wave plate at angle alpha: orthogonal, det -1."""
    c, s = np.cos(2 * alpha), np.sin(2 * alpha)
    return np.array([[c, s], [s, -c]])


def bs_matrix() -> np.ndarray:
    """50:50 beam-splitter matrix, applied identically to both polarizations."""
    return np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


def _component_modes(comp: Component) -> set:
    if isinstance(comp, (HWP, PhaseShifter)):
        return {comp.mode}
    if isinstance(comp, (BeamSplitter, PBS)):
        return {comp.mode_a, comp.mode_b}
    return set(comp.permutation)


@dataclass(frozen=True)
class PhotonicCircuit:
    """Staged optical circuit; components within a stage act on disjoint modes.

    ``readout`` is descriptive measurement metadata (detectors / PBS usage);
    measurement optics are not part of ``stages`` and are never counted.
    """

    n_modes: int
    stages: tuple
    readout: Optional[dict] = None

    def __post_init__(self) -> None:
        stages = tuple(tuple(stage) for stage in self.stages)
        for stage in stages:
            seen: set = set()
            for comp in stage:
                modes = _component_modes(comp)
                if any(m < 0 or m >= self.n_modes for m in modes):
                    raise ValueError(f"component references mode >= {self.n_modes}")
                if not isinstance(comp, ModePermuter) and seen & modes:
                    raise ValueError("stage components must act on disjoint modes")
                seen |= modes
        object.__setattr__(self, "stages", stages)


@dataclass(frozen=True)
class PhotonState:
    """Amplitudes over (polarization, mode); index pol * n_modes + mode."""

    n_modes: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2 * self.n_modes,):
            raise ValueError(f"expected {2 * self.n_modes} amplitudes")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, n_modes: int, polarization: int, mode: int) -> "PhotonState":
        amps = np.zeros(2 * n_modes, dtype=complex)
        amps[polarization * n_modes + mode] = 1.0
        return cls(n_modes, amps)


def component_matrix(comp: Component, n_modes: int) -> np.ndarray:
    """Full-space matrix of one component on polarization x modes."""
    dim = 2 * n_modes
    m = np.eye(dim, dtype=complex)
    if isinstance(comp, HWP):
        j = hwp_jones(comp.angle)
        a = comp.mode
        for r in range(2):
            for c in range(2):
                m[r * n_modes + a, c * n_modes + a] = j[r, c]
    elif isinstance(comp, BeamSplitter):
        b = bs_matrix()
        for pol in range(2):
            ia, ib = pol * n_modes + comp.mode_a, pol * n_modes + comp.mode_b
            m[ia, ia], m[ia, ib] = b[0, 0], b[0, 1]
            m[ib, ia], m[ib, ib] = b[1, 0], b[1, 1]
    elif isinstance(comp, PhaseShifter):
        for pol in range(2):
            i = pol * n_modes + comp.mode
            m[i, i] = np.exp(1j * comp.phase)
    elif isinstance(comp, PBS):
        ia, ib = n_modes + comp.mode_a, n_modes + comp.mode_b
        m[ia, ia] = m[ib, ib] = 0.0
        m[ia, ib] = m[ib, ia] = 1.0
    elif isinstance(comp, ModePermuter):
        m = np.zeros((dim, dim), dtype=complex)
        for pol in range(2):
            for src, dst in enumerate(comp.permutation):
                m[pol * n_modes + dst, pol * n_modes + src] = 1.0
    else:
        raise TypeError(f"unknown component: {comp!r}")
    return m


def stage_matrix(stage: Sequence[Component], n_modes: int) -> np.ndarray:
    m = np.eye(2 * n_modes, dtype=complex)
    for comp in stage:
        m = component_matrix(comp, n_modes) @ m
    return m


def circuit_operator(circuit: PhotonicCircuit) -> np.ndarray:
    """Induced unitary of the whole circuit (measurement stage excluded)."""
    m = np.eye(2 * circuit.n_modes, dtype=complex)
    for stage in circuit.stages:
        m = stage_matrix(stage, circuit.n_modes) @ m
    return m


def simulate_photonic(circuit: PhotonicCircuit, state: PhotonState) -> PhotonState:
    """Apply the circuit stages in order; the norm is preserved per stage."""
    if state.n_modes != circuit.n_modes:
        raise ValueError("state and circuit mode counts differ")
    amps = state.amplitudes
    for stage in circuit.stages:
        amps = stage_matrix(stage, circuit.n_modes) @ amps
        if abs(np.linalg.norm(amps) - 1.0) > NORM_TOL:
            raise ValueError("stage did not preserve the state norm")
    return PhotonState(circuit.n_modes, amps)


# Coin lowering alphabet: matrix pattern -> component factory (None = no optics).
_LOWERINGS = (
    (np.eye(2), None),
    (alg.COIN_X, lambda mode: HWP(np.pi / 4, mode)),
    (alg.COIN_PHASE_FLIP_1, lambda mode: HWP(0.0, mode)),
    (alg.COIN_PHASE_FLIP_0, lambda mode: HWP(np.pi / 2, mode)),
    (alg.COIN_HADAMARD, lambda mode: HWP(np.pi / 8, mode)),
    (alg.COIN_NEG_IDENTITY, lambda mode: PhaseShifter(np.pi, mode)),
)


def _lower_coin(coin: np.ndarray, mode: int) -> Optional[Component]:
    coin = np.asarray(coin, dtype=complex)
    for pattern, factory in _LOWERINGS:
        if np.max(np.abs(coin - pattern)) <= MATCH_TOL:
            return None if factory is None else factory(mode)
    raise UnsupportedCoin(
        f"coin at mode {mode} has no exact lowering in the component set"
    )


def _position_hadamard_stages(n_modes: int) -> list:
    # Beam splitters realize H on the path qubits; on four modes a butterfly
    # of two BS stages with interleaved relabelings gives H on both working
    # qubits of the Gray-labeled cycle.
    if n_modes == 2:
        return [[BeamSplitter(0, 1)]]
    return [
        [BeamSplitter(0, 1), BeamSplitter(3, 2)],
        [ModePermuter((0, 2, 3, 1))],
        [BeamSplitter(0, 1), BeamSplitter(2, 3)],
        [ModePermuter((0, 3, 1, 2))],
    ]


def _readout_metadata(scheme: str, algorithm: str) -> dict:
    if scheme == alg.WITH_AUX and algorithm == "dj":
        return {
            "scheme": scheme,
            "algorithm": algorithm,
            "polarization_resolving": False,
            "elements": [],
            "detectors": "single-photon detector on mode 0",
        }
    if scheme == alg.WITH_AUX:
        return {
            "scheme": scheme,
            "algorithm": algorithm,
            "polarization_resolving": False,
            "elements": [],
            "detectors": "single-photon detectors on all modes",
        }
    return {
        "scheme": scheme,
        "algorithm": algorithm,
        "polarization_resolving": True,
        "elements": ["PBS"],
        "detectors": "single-photon detectors on all modes",
    }


def compile(program: Sequence, scheme: str, algorithm: str = "dj") -> PhotonicCircuit:
    """Lower a walk program to a staged photonic circuit.

    Position-dependent coins become per-mode HWPs or phase shifters;
    position-Hadamard blocks become BS stages.  The compiled operator is
    checked against the walk operator block by block.
    """
    if scheme not in alg.SCHEMES:
        raise ValueError(f"unknown scheme: {scheme!r}")
    n_modes = 4 if scheme == alg.WITH_AUX else 2
    topo = alg.scheme_topology(scheme)
    stages: list = []
    steps = list(program)
    i = 0
    while i < len(steps):
        step = steps[i]
        if step.tag == alg.TAG_POSITION_HADAMARD:
            j = i
            while j < len(steps) and steps[j].tag == alg.TAG_POSITION_HADAMARD:
                j += 1
            block = _position_hadamard_stages(n_modes)
            walk_op = program_operator(steps[i:j], topo)
            optic_op = np.eye(2 * n_modes, dtype=complex)
            for stage in block:
                optic_op = stage_matrix(stage, n_modes) @ optic_op
            if not alg.oracles_equivalent(optic_op, walk_op, tol=FIDELITY_TOL):
                raise CompileError(
                    "position-Hadamard block does not match its walk segment"
                )
            stages.extend(block)
            i = j
            continue
        if step.shift is not None:
            raise UnsupportedCoin(
                "shift outside a position-Hadamard block has no lowering"
            )
        stage = []
        for mode in sorted(step.coin_map):
            comp = _lower_coin(step.coin_map[mode], mode)
            if comp is not None:
                stage.append(comp)
        if stage:
            stages.append(stage)
        i += 1
    return PhotonicCircuit(n_modes, tuple(stages), _readout_metadata(scheme, algorithm))


@dataclass(frozen=True)
class ComponentCount:
    hwp: int = 0
    bs: int = 0
    phase_shifter: int = 0
    pbs: int = 0

    @property
    def total(self) -> int:
        return self.hwp + self.bs + self.phase_shifter + self.pbs


def count_components(circuit: PhotonicCircuit) -> ComponentCount:
    """Tally physical components; mode permuters and measurement optics excluded."""
    counts = {"hwp": 0, "bs": 0, "phase_shifter": 0, "pbs": 0}
    for stage in circuit.stages:
        for comp in stage:
            if comp.kind in counts:
                counts[comp.kind] += 1
    return ComponentCount(**counts)


def resource_report(
    functions: Sequence,
    schemes: Sequence[str] = (alg.WITH_AUX, alg.NO_AUX),
    algorithm: str = "dj",
) -> list:
    """Per-(function, scheme) component counts for compiled full circuits.

    ``functions`` is a sequence of (name, BooleanFn) pairs; row order is
    function order x scheme order.
    """
    rows = []
    for name, f in functions:
        for scheme in schemes:
            circuit = compile(alg.build_dj_program(f, scheme), scheme, algorithm)
            c = count_components(circuit)
            rows.append(
                {
                    "function_name": name,
                    "scheme": scheme,
                    "hwp": c.hwp,
                    "bs": c.bs,
                    "phase_shifter": c.phase_shifter,
                    "pbs": c.pbs,
                    "total": c.total,
                    "readout": circuit.readout,
                }
            )
    return rows


CSV_COLUMNS = ("function_name", "scheme", "hwp", "bs", "phase_shifter", "pbs", "total")


def report_to_csv(rows: Sequence[dict]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(str(row[col]) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def _component_to_json(comp: Component) -> dict:
    d = {"kind": comp.kind}
    if isinstance(comp, HWP):
        d.update(angle=comp.angle, mode=comp.mode)
    elif isinstance(comp, PhaseShifter):
        d.update(phase=comp.phase, mode=comp.mode)
    elif isinstance(comp, (BeamSplitter, PBS)):
        d.update(mode_a=comp.mode_a, mode_b=comp.mode_b)
    else:
        d.update(permutation=list(comp.permutation))
    return d


def circuit_to_json(circuit: PhotonicCircuit) -> dict:
    return {
        "n_modes": circuit.n_modes,
        "stages": [
            [_component_to_json(c) for c in stage] for stage in circuit.stages
        ],
        "readout": circuit.readout,
    }
