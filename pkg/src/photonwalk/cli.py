"""Command-line front end: run the algorithms, verify invariants, emit reports.

Exit codes: 0 success, 1 input error, 2 promise violation, 3 verification
failure.  Text output rounds probabilities to 6 decimals; JSON carries full
doubles.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from typing import Optional, Sequence

import numpy as np

from . import algorithms as alg
from . import photonic as ph
from . import walk_core as wc

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_PROMISE = 2
EXIT_VERIFY = 3


class CLIError(Exception):
    """Malformed command-line input."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep the exit-code contract: input errors are 1
        raise CLIError(message)


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_function(args) -> alg.BooleanFn:
    if args.function:
        for name, f in alg.two_bit_catalogue():
            if name == args.function:
                return f
        raise CLIError(f"unknown catalogue function {args.function!r} (use i..viii)")
    if args.table:
        try:
            with open(args.table) as fh:
                blob = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CLIError(f"table: {exc}") from exc
        try:
            return alg.BooleanFn(int(blob["n"]), tuple(blob["table"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise CLIError(f"table: {exc}") from exc
    raise CLIError("dj needs --function or --table")


def _schemes(arg: str) -> list:
    if arg == "both":
        return list(alg.SCHEMES)
    if arg in alg.SCHEMES:
        return [arg]
    raise CLIError(f"scheme: expected with-aux, no-aux or both, got {arg!r}")


def _dump_states(f: alg.BooleanFn, scheme: str) -> list:
    return [
        {"stage": stage, "state": wc.state_to_json(state)}
        for stage, state in alg.dj_pipeline_states(f, scheme)
    ]


def cmd_dj(args) -> int:
    f = _load_function(args)
    if alg.classify_fn(f) is alg.FnClass.NEITHER:
        sys.stderr.write("promise violated: function is neither constant nor balanced\n")
        return EXIT_PROMISE
    schemes = _schemes(args.scheme)
    results = []
    for scheme in schemes:
        out = alg._run_dj(f, scheme)
        entry = {
            "scheme": scheme,
            "p_all_zero": out.p_all_zero,
            "classification": out.classification.value,
        }
        if args.dump_state:
            entry["states"] = _dump_states(f, scheme)
        results.append(entry)
    agree = len({r["classification"] for r in results}) == 1
    if args.format == "json":
        blob = {"command": "dj", "results": results, "schemes_agree": agree}
        _emit(json.dumps(blob, indent=2) + "\n", args.output)
    else:
        lines = []
        for r in results:
            lines.append(
                f"{r['scheme']}: p_all_zero={r['p_all_zero']:.6f} "
                f"classification={r['classification']}"
            )
        if len(results) > 1:
            lines.append(f"schemes agree: {'yes' if agree else 'no'}")
        if args.dump_state:
            for r in results:
                for snap in r.get("states", []):
                    lines.append(json.dumps(snap))
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_bv(args) -> int:
    s = args.string
    if not s or any(ch not in "01" for ch in s):
        raise CLIError(f"hidden string must be bits, got {s!r}")
    if len(s) != 2:
        raise CLIError("walk schemes support hidden strings of length 2")
    schemes = _schemes(args.scheme)
    results = []
    for scheme in schemes:
        out = alg.run_bv(s, scheme)
        entry = {
            "scheme": scheme,
            "hidden": out.hidden,
            "recovered": out.recovered,
            "probability": out.probability,
            "distribution": out.distribution,
        }
        if args.dump_state:
            entry["states"] = _dump_states(alg.hidden_string_fn(s), scheme)
        results.append(entry)
    if args.format == "json":
        _emit(
            json.dumps({"command": "bv", "results": results}, indent=2) + "\n",
            args.output,
        )
    else:
        lines = [
            f"{r['scheme']}: recovered={r['recovered']} p={r['probability']:.6f}"
            for r in results
        ]
        if args.dump_state:
            for r in results:
                for snap in r.get("states", []):
                    lines.append(json.dumps(snap))
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


# --- verification suites ------------------------------------------------

def _suite_coin_unitarity(perturb):
    rng = np.random.default_rng(20240917)
    for _ in range(1000):
        p, q, r, t = rng.uniform(-2 * np.pi, 2 * np.pi, size=4)
        m = wc.build_coin(wc.CoinParams(p, q, r, t))
        dev = np.max(np.abs(m.conj().T @ m - np.eye(2)))
        assert dev <= 1e-12, f"coin unitarity deviation {dev:.3e}"
        det = np.linalg.det(m)
        assert abs(det - np.exp(2j * p)) <= 1e-12, "coin determinant != e^{2ip}"


def _suite_shift_structure(perturb):
    topos = [alg.CYCLE4, alg.LINE2, wc.Topology(wc.OPEN_LINE, 5)]
    shifts = [wc.s_plus(0), wc.s_plus(1), wc.s_minus(0), wc.s_minus(1)]
    for topo in topos:
        for shift in shifts:
            m = wc.build_shift(shift, topo)
            mags = np.abs(m)
            assert np.all(np.isclose(mags.sum(axis=0), 1.0)), "not a permutation"
            assert np.all(np.isclose(mags.sum(axis=1), 1.0)), "not a permutation"
            assert np.all((mags < 1e-15) | (np.abs(mags - 1) < 1e-15))


def _suite_norm_preservation(perturb):
    rng = np.random.default_rng(7)
    for _ in range(50):
        amps = rng.normal(size=8) + 1j * rng.normal(size=8)
        amps /= np.linalg.norm(amps)
        state = wc.WalkState(alg.CYCLE4, amps)
        coin_map = {}
        for l in range(4):
            a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            qmat, _ = np.linalg.qr(a)
            coin_map[l] = qmat
        shift = [None, wc.s_plus(0), wc.s_minus(1)][int(rng.integers(3))]
        out = wc.apply_step(state, wc.WalkStep(coin_map, shift, rng.uniform(0, np.pi)))
        assert abs(out.norm() - 1.0) <= 1e-10, "norm drifted"
        pos = wc.measure_position(out)
        joint = wc.measure_joint(out)
        assert abs(pos.sum() - 1.0) <= 1e-10
        assert abs(joint.sum() - 1.0) <= 1e-10


def _suite_hadamard_involution(perturb):
    for scheme in alg.SCHEMES:
        topo = alg.scheme_topology(scheme)
        for include_coin in (True, False):
            layer = alg.hadamard_layer(scheme, include_coin=include_coin)
            op = wc.program_operator(layer, topo)
            assert alg.oracles_equivalent(
                op @ op, np.eye(topo.dim), tol=1e-10
            ), f"{scheme} layer squared is not identity"


def _suite_oracle_equiv(perturb):
    for name, f in alg.two_bit_catalogue():
        walk_op = alg.walk_to_circuit_operator(
            alg.oracle_operator(alg.build_oracle_with_aux(f))
        )
        ref = alg.reference_circuit_oracle(f)
        assert alg.oracles_equivalent(walk_op, ref, tol=1e-10), (
            f"with-aux oracle mismatch for {name}"
        )
        diag_op = alg.oracle_operator(alg.build_oracle_no_aux(f))
        off = diag_op - np.diag(np.diag(diag_op))
        assert np.max(np.abs(off)) <= 1e-12, f"no-aux oracle not diagonal for {name}"
        want = np.array([(-1.0) ** f.value(x) for x in range(4)])
        assert alg.equal_up_to_global_phase(np.diag(diag_op), want, tol=1e-10), (
            f"no-aux oracle diagonal mismatch for {name}"
        )


def _suite_dj_determinism(perturb):
    for name, f in alg.two_bit_catalogue():
        expect = 1.0 if alg.classify_fn(f) is alg.FnClass.CONSTANT else 0.0
        for scheme in alg.SCHEMES:
            p = alg._run_dj(f, scheme).p_all_zero
            assert abs(p - expect) <= 1e-10, f"{name}/{scheme}: p={p}"
            assert abs(p - alg.brute_force_p_all_zero(scheme, f)) <= 1e-10
    rng = np.random.default_rng(99)
    for n in range(3, 7):
        for _ in range(10):
            table = [0] * (2 ** (n - 1)) + [1] * (2 ** (n - 1))
            rng.shuffle(table)
            f = alg.BooleanFn(n, tuple(table))
            for scheme in alg.SCHEMES:
                assert alg.brute_force_p_all_zero(scheme, f) <= 1e-12


def _suite_bv_exactness(perturb):
    for s, dj_name in alg.BV_STRINGS:
        f = alg.hidden_string_fn(s)
        dj_f = dict(alg.two_bit_catalogue())[dj_name]
        assert f.table == dj_f.table, f"string {s} maps to wrong function"
        for scheme in alg.SCHEMES:
            out = alg.run_bv(s, scheme)
            assert out.recovered == s, f"recovered {out.recovered} for {s}"
            assert abs(out.probability - 1.0) <= 1e-10


def _perturbed(circuit: ph.PhotonicCircuit, perturb) -> ph.PhotonicCircuit:
    delta = perturb.get("hwp", 0.0)
    if not delta:
        return circuit
    stages = tuple(
        tuple(
            replace(c, angle=c.angle + delta) if isinstance(c, ph.HWP) else c
            for c in stage
        )
        for stage in circuit.stages
    )
    return ph.PhotonicCircuit(circuit.n_modes, stages, circuit.readout)


def _suite_photonic_fidelity(perturb):
    for angle, target in [
        (np.pi / 8, alg.COIN_HADAMARD),
        (np.pi / 4, alg.COIN_X),
        (0.0, alg.COIN_PHASE_FLIP_1),
        (np.pi / 2, alg.COIN_PHASE_FLIP_0),
    ]:
        assert np.max(np.abs(ph.hwp_jones(angle) - target)) <= 1e-12
    cases = [(name, f) for name, f in alg.two_bit_catalogue()]
    cases += [(f"bv {s}", alg.hidden_string_fn(s)) for s, _ in alg.BV_STRINGS]
    for name, f in cases:
        for scheme in alg.SCHEMES:
            prog = alg.build_dj_program(f, scheme)
            circ = _perturbed(ph.compile(prog, scheme), perturb)
            walk_op = wc.program_operator(prog, alg.scheme_topology(scheme))
            assert alg.oracles_equivalent(
                ph.circuit_operator(circ), walk_op, tol=1e-9
            ), f"photonic/walk mismatch for {name}/{scheme}"
            n_modes = circ.n_modes
            final = ph.simulate_photonic(circ, ph.PhotonState.basis(n_modes, 0, 0))
            probs = np.abs(final.amplitudes) ** 2
            walk_final = wc.run_program(
                wc.WalkState.basis(alg.scheme_topology(scheme), 0, 0), prog
            )
            walk_probs = np.abs(walk_final.amplitudes) ** 2
            assert np.max(np.abs(probs - walk_probs)) <= 1e-9, (
                f"photonic probabilities drifted for {name}/{scheme}"
            )


ALL_SUITES = (
    ("coin-unitarity", _suite_coin_unitarity),
    ("shift-structure", _suite_shift_structure),
    ("norm-preservation", _suite_norm_preservation),
    ("hadamard-involution", _suite_hadamard_involution),
    ("oracle-equiv", _suite_oracle_equiv),
    ("dj-determinism", _suite_dj_determinism),
    ("bv-exactness", _suite_bv_exactness),
    ("photonic-fidelity", _suite_photonic_fidelity),
)

SUITE_COUNT = len(ALL_SUITES)


def _parse_perturb(spec: Optional[str]) -> dict:
    if not spec:
        return {}
    try:
        key, value = spec.split("=", 1)
        return {key: float(value)}
    except ValueError as exc:
        raise CLIError(f"perturb: expected key=value, got {spec!r}") from exc


def run_suites(names: Optional[Sequence[str]] = None, perturb: Optional[dict] = None):
    """Run verification suites; returns (name, passed, message) triples."""
    perturb = perturb or {}
    selected = [
        (name, fn)
        for name, fn in ALL_SUITES
        if names is None or name in names
    ]
    results = []
    for name, fn in selected:
        try:
            fn(perturb)
            results.append((name, True, ""))
        except AssertionError as exc:
            results.append((name, False, str(exc) or "assertion failed"))
    return results


def cmd_verify(args) -> int:
    names = [args.suite] if args.suite else None
    if names and names[0] not in dict(ALL_SUITES):
        raise CLIError(f"unknown suite {args.suite!r}")
    results = run_suites(names, _parse_perturb(args.perturb))
    lines = [
        f"{name}: {'pass' if ok else 'FAIL'}{(' -- ' + msg) if msg else ''}"
        for name, ok, msg in results
    ]
    _emit("\n".join(lines) + "\n", args.output)
    failures = [(name, msg) for name, ok, msg in results if not ok]
    if failures:
        sys.stderr.write(f"first failure: {failures[0][0]}: {failures[0][1]}\n")
        return EXIT_VERIFY
    return EXIT_OK


def cmd_report(args) -> int:
    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    for a in algorithms:
        if a not in ("dj", "bv"):
            raise CLIError(f"unknown algorithm {a!r} (use dj, bv)")
    rows = []
    if "dj" in algorithms:
        rows += ph.resource_report(alg.two_bit_catalogue(), algorithm="dj")
    if "bv" in algorithms:
        bv_fns = [(s, alg.hidden_string_fn(s)) for s, _ in alg.BV_STRINGS]
        rows += ph.resource_report(bv_fns, algorithm="bv")
    if args.format == "json":
        _emit(json.dumps({"rows": rows}, indent=2) + "\n", args.output)
    else:
        _emit(ph.report_to_csv(rows), args.output)
        if args.output:
            with open(args.output + ".json", "w") as fh:
                json.dump({"rows": rows}, fh, indent=2)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="photonwalk", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    dj = sub.add_parser("dj", help="run the constant-vs-balanced test")
    dj.add_argument("--function", help="catalogue function name (i..viii)")
    dj.add_argument("--table", help="path to a truth-table JSON file")
    dj.add_argument("--scheme", default="both")
    dj.set_defaults(func=cmd_dj)

    bv = sub.add_parser("bv", help="recover a hidden string")
    bv.add_argument("--string", required=True, help="hidden bit string")
    bv.add_argument("--scheme", default="both")
    bv.set_defaults(func=cmd_bv)

    verify = sub.add_parser("verify", help="run the invariant suites")
    verify.add_argument("--suite", help="run only the named suite")
    verify.add_argument("--perturb", help="fault-injection hook, e.g. hwp=0.01")
    verify.set_defaults(func=cmd_verify)

    report = sub.add_parser("report", help="emit the component-count comparison")
    report.add_argument("--algorithms", default="dj,bv")
    report.set_defaults(func=cmd_report)

    for p in (dj, bv, verify):
        p.add_argument("--format", default="text", choices=("text", "json"))
        p.add_argument("--output", help="write output to this path")
    report.add_argument("--format", default="csv", choices=("csv", "json"))
    report.add_argument("--output", help="write output to this path")
    for p in (dj, bv):
        p.add_argument("--dump-state", action="store_true", dest="dump_state")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except CLIError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except alg.PromiseViolation as exc:
        sys.stderr.write(f"promise violated: {exc}\n")
        return EXIT_PROMISE
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
