"""Deutsch-Jozsa and Bernstein-Vazirani drivers on the quantum walk substrate.

Two execution schemes are supported:

* with-aux   -- walk on a closed 4-cycle; the coin is the auxiliary qubit and
                the four vertices, Gray-labeled 00, 01, 11, 10, are the two
                working qubits.
* no-aux     -- walk on a 2-vertex open line; the coin encodes the first input
                bit and the position the second.

Each driver is cross-checked against a brute-force dense reference that never
touches walk operators.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .walk_core import (
    CLOSED_CYCLE,
    OPEN_LINE,
    CoinParams,
    DimensionMismatch,
    Topology,
    WalkState,
    WalkStep,
    build_coin,
    measure_joint,
    measure_position,
    program_operator,
    run_program,
    s_minus,
    s_plus,
)

WITH_AUX = "with-aux"
NO_AUX = "no-aux"
SCHEMES = (WITH_AUX, NO_AUX)

CYCLE4 = Topology(CLOSED_CYCLE, 4)
LINE2 = Topology(OPEN_LINE, 2)

# Vertex -> working-qubit label around the 4-cycle (Gray code, so a single
# shift flips a single label bit).
CYCLE_LABELS = ("00", "01", "11", "10")
LABEL_TO_VERTEX = {lab: v for v, lab in enumerate(CYCLE_LABELS)}

# Step tags consumed by the photonic compiler.
TAG_PREP = "prep"
TAG_COIN_HADAMARD = "coin_hadamard"
TAG_POSITION_HADAMARD = "position_hadamard"
TAG_ORACLE = "oracle"

# Coin alphabet.  Exact integer matrices; the angle tuples below reproduce
# them through the general coin construction (verified in tests).
COIN_IDENTITY = np.eye(2)
COIN_X = np.array([[0.0, 1.0], [1.0, 0.0]])
COIN_PHASE_FLIP_1 = np.diag([1.0, -1.0])   # phase on coin |1>
COIN_PHASE_FLIP_0 = np.diag([-1.0, 1.0])   # phase on coin |0>
COIN_NEG_IDENTITY = -np.eye(2)             # overall pi phase at one position
COIN_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)

X_COIN_PARAMS = CoinParams(-np.pi / 2, 0.0, np.pi / 2, np.pi / 2)
# The q = +pi/2 sign is deliberate: it is the unique tuple in this family
# whose coin equals the Hadamard matrix exactly.
HADAMARD_COIN_PARAMS = CoinParams(-np.pi / 2, np.pi / 2, np.pi / 2, np.pi / 4)
PHASE_FLIP_1_PARAMS = CoinParams(np.pi / 2, np.pi / 2, 0.0, np.pi)
PHASE_FLIP_0_PARAMS = CoinParams(np.pi / 2, np.pi / 2, 0.0, 0.0)


class PromiseViolation(Exception):
    """The input function is neither constant nor balanced."""


class FnClass(enum.Enum):
    CONSTANT = "constant"
    BALANCED = "balanced"
    NEITHER = "neither"


@dataclass(frozen=True)
class BooleanFn:
    """Truth table of f: {0,1}^n -> {0,1}; x1 is the most significant bit."""

    n: int
    table: tuple

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("need at least one input bit")
        table = tuple(int(b) for b in self.table)
        if len(table) != 2**self.n:
            raise ValueError(
                f"truth table must have {2 ** self.n} entries, got {len(table)}"
            )
        if any(b not in (0, 1) for b in table):
            raise ValueError("truth table entries must be 0 or 1")
        object.__setattr__(self, "table", table)

    def value(self, x: int) -> int:
        return self.table[x]


def classify_fn(f: BooleanFn) -> FnClass:
    ones = sum(f.table)
    if ones in (0, len(f.table)):
        return FnClass.CONSTANT
    if 2 * ones == len(f.table):
        return FnClass.BALANCED
    return FnClass.NEITHER


def _fn_from_rule(rule: Callable[[int, int], int]) -> BooleanFn:
    return BooleanFn(2, tuple(rule(x1, x2) for x1 in (0, 1) for x2 in (0, 1)))


def two_bit_catalogue() -> list:
    """The eight constant-or-balanced two-bit functions, in roman-numeral order."""
    return [
        ("i", _fn_from_rule(lambda x1, x2: 0)),
        ("ii", _fn_from_rule(lambda x1, x2: 1)),
        ("iii", _fn_from_rule(lambda x1, x2: x1)),
        ("iv", _fn_from_rule(lambda x1, x2: x2)),
        ("v", _fn_from_rule(lambda x1, x2: 1 - x1)),
        ("vi", _fn_from_rule(lambda x1, x2: 1 - x2)),
        ("vii", _fn_from_rule(lambda x1, x2: x1 ^ x2)),
        ("viii", _fn_from_rule(lambda x1, x2: 1 - (x1 ^ x2))),
    ]


def hidden_string_fn(s: str) -> BooleanFn:
    """The dot-product function f(x) = x . s for a hidden bit string."""
    if not s or any(ch not in "01" for ch in s):
        raise ValueError(f"hidden string must be nonempty bits, got {s!r}")
    bits = [int(ch) for ch in s]
    n = len(bits)
    table = []
    for x in range(2**n):
        xbits = [(x >> (n - 1 - i)) & 1 for i in range(n)]
        table.append(sum(a * b for a, b in zip(xbits, bits)) % 2)
    return BooleanFn(n, tuple(table))


# Hidden string -> catalogue name of the matching dot-product function.
BV_STRINGS = (("00", "i"), ("01", "iv"), ("10", "iii"), ("11", "vii"))


@dataclass(frozen=True)
class Oracle:
    scheme: str
    steps: tuple


def build_oracle_with_aux(f: BooleanFn) -> Oracle:
    """Oracle as a single position-dependent coin step on the 4-cycle.

    Applies a coin X (flipping the auxiliary qubit) at every vertex whose
    working-qubit label satisfies f.
    """
    if f.n != 2:
        raise ValueError("with-aux walk oracle is defined for 2-bit functions")
    coin_map = {
        v: COIN_X
        for v, lab in enumerate(CYCLE_LABELS)
        if f.value(int(lab, 2)) == 1
    }
    return Oracle(WITH_AUX, (WalkStep(coin_map, tag=TAG_ORACLE),))


def build_oracle_no_aux(f: BooleanFn) -> Oracle:
    """Phase oracle as a single diagonal coin step on the 2-vertex line.

    At position x2 the coin picks up diag((-1)^f(0,x2), (-1)^f(1,x2)); the
    induced operator multiplies |x1 x2> by (-1)^f(x1,x2).
    """
    if f.n != 2:
        raise ValueError("no-aux walk oracle is defined for 2-bit functions")
    coin_map = {}
    for x2 in (0, 1):
        d = np.diag(
            [(-1.0) ** f.value(0 * 2 + x2), (-1.0) ** f.value(1 * 2 + x2)]
        )
        coin_map[x2] = d
    return Oracle(NO_AUX, (WalkStep(coin_map, tag=TAG_ORACLE),))


def build_oracle(f: BooleanFn, scheme: str) -> Oracle:
    if scheme == WITH_AUX:
        return build_oracle_with_aux(f)
    if scheme == NO_AUX:
        return build_oracle_no_aux(f)
    raise ValueError(f"unknown scheme: {scheme!r}")


def reference_circuit_oracle(f: BooleanFn) -> np.ndarray:
    """Ground-truth standard oracle |x>|y> -> |x>|y xor f(x)> as a permutation."""
    dim = 2 ** (f.n + 1)
    m = np.zeros((dim, dim), dtype=complex)
    for x in range(2**f.n):
        for y in (0, 1):
            m[x * 2 + (y ^ f.value(x)), x * 2 + y] = 1.0
    return m


def equal_up_to_global_phase(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> bool:
    """True iff a = e^{i phi} b, normalizing on the first nonzero entry."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch: {a.shape} vs {b.shape}")
    nz = np.flatnonzero(np.abs(a) > 1e-12)
    if nz.size == 0:
        return bool(np.max(np.abs(b)) <= tol)
    i = nz[0]
    if abs(b[i]) <= 1e-12:
        return False
    phase = a[i] / b[i]
    phase /= abs(phase)
    return bool(np.max(np.abs(a - phase * b)) <= tol)


def oracles_equivalent(a: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> bool:
    """Operator equality modulo a global phase."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise DimensionMismatch(f"dimension mismatch: {a.shape} vs {b.shape}")
    return equal_up_to_global_phase(a, b, tol)


def with_aux_index_map() -> np.ndarray:
    """Permutation p with circuit_index = p[walk_index].

    Walk index is coin-major (c, vertex); circuit basis is |x1 x2>|aux> with
    aux = coin and |x1 x2> the vertex label.
    """
    p = np.zeros(8, dtype=int)
    for c in (0, 1):
        for v in range(4):
            p[c * 4 + v] = int(CYCLE_LABELS[v], 2) * 2 + c
    return p


def walk_to_circuit_vector(amps: np.ndarray) -> np.ndarray:
    """Reindex a with-aux walk state vector into the circuit basis."""
    p = with_aux_index_map()
    out = np.zeros_like(np.asarray(amps, dtype=complex))
    out[p] = amps
    return out


def walk_to_circuit_operator(m: np.ndarray) -> np.ndarray:
    """Conjugate a with-aux walk-space operator into the circuit basis."""
    p = with_aux_index_map()
    perm = np.zeros((8, 8))
    perm[p, np.arange(8)] = 1.0
    return perm @ np.asarray(m, dtype=complex) @ perm.T


def _uniform(coin: np.ndarray, size: int) -> dict:
    return {l: coin for l in range(size)}


def _cx_coin_to_cycle_bit(first_shift, second_shift) -> list:
    # Flip one Gray-label bit of the cycle position iff the coin is |1>:
    # a coin-conditioned shift conjugated by coin flips at even vertices
    # turns the cyclic move into the required pairwise exchange.
    x02 = {0: COIN_X, 2: COIN_X}
    return [
        WalkStep(x02, first_shift, tag=TAG_POSITION_HADAMARD),
        WalkStep(x02, second_shift, tag=TAG_POSITION_HADAMARD),
        WalkStep(x02, tag=TAG_POSITION_HADAMARD),
    ]


def _h_on_cycle_bit(cx_coin_to_bit: list, cx_bit_to_coin: WalkStep) -> list:
    swap = cx_coin_to_bit + [cx_bit_to_coin] + cx_coin_to_bit
    h_coin = WalkStep(_uniform(COIN_HADAMARD, 4), tag=TAG_POSITION_HADAMARD)
    return swap + [h_coin] + swap


def _position_hadamard_with_aux() -> list:
    # H on each working qubit, realized by swapping it with the coin,
    # applying the Hadamard coin, and swapping back.
    cx_c_to_q2 = _cx_coin_to_cycle_bit(s_minus(1), s_plus(1))
    cx_c_to_q1 = _cx_coin_to_cycle_bit(s_plus(1), s_minus(1))
    cx_q2_to_c = WalkStep(
        {1: COIN_X, 2: COIN_X}, tag=TAG_POSITION_HADAMARD
    )  # vertices with label bit q2 = 1
    cx_q1_to_c = WalkStep(
        {2: COIN_X, 3: COIN_X}, tag=TAG_POSITION_HADAMARD
    )  # vertices with label bit q1 = 1
    return _h_on_cycle_bit(cx_c_to_q2, cx_q2_to_c) + _h_on_cycle_bit(
        cx_c_to_q1, cx_q1_to_c
    )


def _position_hadamard_no_aux() -> list:
    # Swap coin and path qubit (three alternating CNOTs), Hadamard the coin,
    # swap back.  On the two-vertex line the conditioned shift traverses the
    # single edge, i.e. acts as CNOT(coin -> path).
    cx_c_to_p = WalkStep(shift=s_plus(1), tag=TAG_POSITION_HADAMARD)
    cx_p_to_c = WalkStep({1: COIN_X}, tag=TAG_POSITION_HADAMARD)
    h_coin = WalkStep(_uniform(COIN_HADAMARD, 2), tag=TAG_POSITION_HADAMARD)
    return [cx_c_to_p, cx_p_to_c, cx_c_to_p, h_coin, cx_c_to_p, cx_p_to_c, cx_c_to_p]


def hadamard_layer(scheme: str, include_coin: bool = True) -> list:
    """Walk program applying H to the position qubits and, optionally, the coin."""
    if scheme == WITH_AUX:
        size, pos = 4, _position_hadamard_with_aux()
    elif scheme == NO_AUX:
        size, pos = 2, _position_hadamard_no_aux()
    else:
        raise ValueError(f"unknown scheme: {scheme!r}")
    steps = []
    if include_coin:
        steps.append(WalkStep(_uniform(COIN_HADAMARD, size), tag=TAG_COIN_HADAMARD))
    return steps + pos


@dataclass(frozen=True)
class DJOutcome:
    scheme: str
    p_all_zero: float

    @property
    def classification(self) -> FnClass:
        return FnClass.CONSTANT if self.p_all_zero > 0.5 else FnClass.BALANCED


def build_dj_program(f: BooleanFn, scheme: str) -> list:
    """Full walk program for one Deutsch-Jozsa run (prep through final layer)."""
    if scheme == WITH_AUX:
        prep = [WalkStep({0: COIN_X}, tag=TAG_PREP)]
        return (
            prep
            + hadamard_layer(WITH_AUX)
            + list(build_oracle_with_aux(f).steps)
            + hadamard_layer(WITH_AUX, include_coin=False)
        )
    if scheme == NO_AUX:
        return (
            hadamard_layer(NO_AUX)
            + list(build_oracle_no_aux(f).steps)
            + hadamard_layer(NO_AUX)
        )
    raise ValueError(f"unknown scheme: {scheme!r}")


def scheme_topology(scheme: str) -> Topology:
    return CYCLE4 if scheme == WITH_AUX else LINE2


def dj_pipeline_states(f: BooleanFn, scheme: str) -> list:
    """(stage name, WalkState) snapshots through the full pipeline."""
    topo = scheme_topology(scheme)
    state = WalkState.basis(topo, 0, 0)
    snapshots = [("initial", state)]
    steps = build_dj_program(f, scheme)
    boundaries = []
    for i, step in enumerate(steps):
        if i + 1 == len(steps) or steps[i + 1].tag != step.tag:
            boundaries.append((i, step.tag or "step"))
    i = 0
    for end, tag in boundaries:
        state = run_program(state, steps[i : end + 1])
        snapshots.append((tag, state))
        i = end + 1
    return snapshots


def _run_dj(f: BooleanFn, scheme: str) -> DJOutcome:
    if classify_fn(f) is FnClass.NEITHER:
        raise PromiseViolation(
            "function is neither constant nor balanced; the Deutsch-Jozsa "
            "promise does not hold"
        )
    topo = scheme_topology(scheme)
    final = run_program(WalkState.basis(topo, 0, 0), build_dj_program(f, scheme))
    if scheme == WITH_AUX:
        p = float(measure_position(final)[0])
    else:
        p = float(measure_joint(final)[0, 0])
    return DJOutcome(scheme, p)


def run_dj_with_aux(f: BooleanFn) -> DJOutcome:
    return _run_dj(f, WITH_AUX)


def run_dj_no_aux(f: BooleanFn) -> DJOutcome:
    return _run_dj(f, NO_AUX)


@dataclass(frozen=True)
class BVOutcome:
    scheme: str
    hidden: str
    recovered: str
    probability: float
    distribution: dict


def run_bv(s: str, scheme: str) -> BVOutcome:
    """Recover a hidden string from one oracle query.

    Length-2 strings run through the walk pipeline; longer strings fall back
    to the brute-force reference (no walk circuits exist beyond two bits).
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme: {scheme!r}")
    f = hidden_string_fn(s)
    n = f.n
    if n == 2:
        topo = scheme_topology(scheme)
        final = run_program(
            WalkState.basis(topo, 0, 0), build_dj_program(f, scheme)
        )
        if scheme == WITH_AUX:
            probs = measure_position(final)
            dist = {CYCLE_LABELS[v]: float(probs[v]) for v in range(4)}
        else:
            joint = measure_joint(final)
            dist = {
                f"{c}{l}": float(joint[c, l]) for c in (0, 1) for l in (0, 1)
            }
    else:
        vec = brute_force_reference(scheme, f)
        dist = {}
        for x in range(2**n):
            label = format(x, f"0{n}b")
            if scheme == WITH_AUX:
                dist[label] = float(
                    abs(vec[x * 2]) ** 2 + abs(vec[x * 2 + 1]) ** 2
                )
            else:
                dist[label] = float(abs(vec[x]) ** 2)
    recovered = max(sorted(dist), key=lambda k: dist[k])
    return BVOutcome(scheme, s, recovered, dist[recovered], dist)


_H2 = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


def _apply_h(vec: np.ndarray, n_qubits: int, qubit: int) -> np.ndarray:
    # qubit 0 is the most significant factor of the flat index
    t = vec.reshape(2**qubit, 2, -1)
    return np.einsum("ab,ibj->iaj", _H2, t).reshape(-1)


def brute_force_reference(scheme: str, f: BooleanFn) -> np.ndarray:
    """Textbook dense-state execution, independent of all walk machinery.

    Returns the final state vector in the computational basis: |x1..xn>|aux>
    for the with-aux scheme, |x1..xn> otherwise.
    """
    n = f.n
    if n > 10:
        raise ValueError("brute-force reference supports n <= 10")
    if scheme == NO_AUX:
        vec = np.zeros(2**n, dtype=complex)
        vec[0] = 1.0
        for q in range(n):
            vec = _apply_h(vec, n, q)
        vec = vec * np.array([(-1.0) ** f.value(x) for x in range(2**n)])
        for q in range(n):
            vec = _apply_h(vec, n, q)
        return vec
    if scheme == WITH_AUX:
        nq = n + 1
        vec = np.zeros(2**nq, dtype=complex)
        vec[1] = 1.0  # |0...0>|1>
        for q in range(nq):
            vec = _apply_h(vec, nq, q)
        out = np.zeros_like(vec)
        for x in range(2**n):
            for y in (0, 1):
                out[x * 2 + (y ^ f.value(x))] = vec[x * 2 + y]
        vec = out
        for q in range(n):
            vec = _apply_h(vec, nq, q)
        return vec
    raise ValueError(f"unknown scheme: {scheme!r}")


def brute_force_p_all_zero(scheme: str, f: BooleanFn) -> float:
    vec = brute_force_reference(scheme, f)
    if scheme == WITH_AUX:
        return float(abs(vec[0]) ** 2 + abs(vec[1]) ** 2)
    return float(abs(vec[0]) ** 2)


def oracle_operator(oracle: Oracle) -> np.ndarray:
    """Induced full-space operator of an oracle's walk steps."""
    return program_operator(list(oracle.steps), scheme_topology(oracle.scheme))
