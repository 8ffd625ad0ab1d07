"""Command line front end.

Modes:
  estimate       truncated path-sum estimate with certificates
  choose-m       truncation order for a target MSE or (epsilon, delta)
  mse-benchmark  empirical truncation MSE vs the dense oracle
  oracle-check   estimate and dense oracle side by side
  path-dump      CSV of surviving paths (weight, factors, contribution)
  scaling-sweep  enumeration cost of the chain family vs depth

Reports are JSON with floats printed to 17 significant digits; exit codes:
0 success, 1 failed oracle-check comparison, 2 validation error,
3 enumeration resource limit, 4 dense-oracle qubit cap.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .benchmarks import scaling_sweep
from .circuit import Circuit, CircuitFormatError, circuit_from_dict
from .engine import PathEnumeration, ResourceLimitError
from .estimator import (
    choose_m,
    damping,
    describe_factors,
    estimate,
    mse_benchmark,
    path_value,
)
from .observables import (
    Hamiltonian,
    ObservableFormatError,
    SparseDensity,
    hamiltonian_from_dict,
    norm_bound,
    state_from_dict,
)
from .oracle import OracleCapError, noisy_mean_value

ORACLE_CHECK_TOL = 1e-9

MODES = (
    "estimate",
    "choose-m",
    "mse-benchmark",
    "oracle-check",
    "path-dump",
    "scaling-sweep",
)


def _format_json(obj, indent: int = 0) -> str:
    """JSON text with every float at 17 significant digits."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [
            f"{inner}{json.dumps(str(key))}: {_format_json(value, indent + 1)}"
            for key, value in obj.items()
        ]
        return "{\n" + ",\n".join(rows) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        rows = [f"{inner}{_format_json(value, indent + 1)}" for value in obj]
        return "[\n" + ",\n".join(rows) + f"\n{pad}]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"cannot serialize non-finite float {obj!r}")
        return format(obj, ".17g")
    if isinstance(obj, int):
        return str(obj)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w") as handle:
            handle.write(text)
            if not text.endswith("\n"):
                handle.write("\n")


def _load_json(path: str, what: str) -> dict:
    try:
        with open(path) as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise ValueError(f"{what} file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"{what} file {path} is not valid JSON: {exc}") from None


def _load_circuit(args) -> Circuit:
    if args.circuit is None:
        raise ValueError("this mode needs --circuit")
    return circuit_from_dict(_load_json(args.circuit, "circuit"))


def _load_hamiltonian(args) -> Hamiltonian:
    if args.hamiltonian is None:
        raise ValueError("this mode needs --hamiltonian")
    return hamiltonian_from_dict(_load_json(args.hamiltonian, "Hamiltonian"))


def _load_state(args, n: int) -> SparseDensity:
    if args.state is None:
        return SparseDensity.computational_basis(n)
    rho = state_from_dict(_load_json(args.state, "state"))
    if rho.n != n:
        raise ValueError(f"state is on {rho.n} qubits, circuit has {n}")
    return rho


def _resolve_theta(circuit: Circuit, args) -> tuple[dict[str, float], bool]:
    """Angles from --params, or drawn uniformly when --seed is given."""
    params = circuit.parameters()
    if args.params is not None:
        raw = _load_json(args.params, "params")
        if not isinstance(raw, dict):
            raise ValueError("params file must map symbols to radians")
        theta = {}
        for key, value in raw.items():
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValueError(f"params entry {key!r} is not a number")
            theta[str(key)] = float(value)
        missing = [p for p in params if p not in theta]
        if missing:
            raise ValueError(f"params file misses: {', '.join(missing)}")
        return theta, False
    if not params:
        return {}, False
    if args.seed is None:
        raise ValueError(
            "circuit has free parameters: give --params, or --seed to draw them"
        )
    rng = np.random.default_rng(args.seed)
    theta = {p: float(v) for p, v in zip(params, rng.uniform(0, 2 * math.pi, len(params)))}
    return theta, True


def _resolve_m(args, circuit: Circuit, h: Hamiltonian) -> tuple[int | None, dict]:
    """Truncation order from exactly one accuracy specifier."""
    given = [
        spec
        for spec, present in (
            ("--trunc-m", args.trunc_m is not None),
            ("--target-mse", args.target_mse is not None),
            ("--epsilon/--delta", args.epsilon is not None or args.delta is not None),
        )
        if present
    ]
    if len(given) != 1:
        raise ValueError(
            "need exactly one accuracy specifier: --trunc-m, --target-mse,"
            f" or --epsilon with --delta (got {', '.join(given) or 'none'})"
        )
    if args.trunc_m is not None:
        return args.trunc_m, {"kind": "explicit", "m": args.trunc_m}
    norm = norm_bound(h)
    selection = choose_m(
        args.lam,
        norm.value,
        target_mse=args.target_mse,
        epsilon=args.epsilon,
        delta=args.delta,
        floor=circuit.depth + 1,
        term_count=h.term_count,
    )
    detail = {
        "kind": "target-mse" if args.target_mse is not None else "epsilon-delta",
        "selection": selection.to_dict(),
        "norm_bound": {"value": norm.value, "kind": norm.kind},
    }
    return selection.m, detail


def _config_echo(args) -> dict:
    return {
        "mode": args.mode,
        "circuit": args.circuit,
        "hamiltonian": args.hamiltonian,
        "state": args.state,
        "params": args.params,
        "lambda": args.lam,
        "trunc_m": args.trunc_m,
        "target_mse": args.target_mse,
        "epsilon": args.epsilon,
        "delta": args.delta,
        "samples": args.samples,
        "seed": args.seed,
        "workers": args.workers,
        "deterministic_sum": args.deterministic_sum,
    }


def _mode_estimate(args) -> int:
    circuit = _load_circuit(args)
    h = _load_hamiltonian(args)
    rho = _load_state(args, circuit.n)
    theta, drawn = _resolve_theta(circuit, args)
    m, m_detail = _resolve_m(args, circuit, h)
    eps_delta = (
        (args.epsilon, args.delta)
        if args.epsilon is not None and args.delta is not None
        else None
    )
    report = estimate(
        circuit,
        h,
        rho,
        theta,
        args.lam,
        m,
        workers=args.workers,
        deterministic_sum=args.deterministic_sum,
        eps_delta=eps_delta,
    )
    document = {
        "config": _config_echo(args),
        "theta": theta,
        "theta_drawn": drawn,
        "m_selection": m_detail,
        "report": report.to_dict(),
    }
    _write_text(_format_json(document), args.out)
    return 0


def _mode_choose_m(args) -> int:
    h = _load_hamiltonian(args)
    floor = None
    circuit = None
    if args.circuit is not None:
        circuit = _load_circuit(args)
        floor = circuit.depth + 1
    norm = norm_bound(h)
    selection = choose_m(
        args.lam,
        norm.value,
        target_mse=args.target_mse,
        epsilon=args.epsilon,
        delta=args.delta,
        floor=floor,
        term_count=h.term_count,
    )
    document = {
        "config": _config_echo(args),
        "norm_bound": {"value": norm.value, "kind": norm.kind},
        "selection": selection.to_dict(),
    }
    _write_text(_format_json(document), args.out)
    return 0


def _mode_mse_benchmark(args) -> int:
    circuit = _load_circuit(args)
    h = _load_hamiltonian(args)
    rho = _load_state(args, circuit.n)
    if args.seed is None:
        raise ValueError("mse-benchmark needs --seed")
    m, m_detail = _resolve_m(args, circuit, h)
    if m is None:
        raise ValueError(
            "mse-benchmark needs a finite truncation order; with --lambda 0"
            " none is certified"
        )
    report = mse_benchmark(
        circuit, h, rho, args.lam, m, args.samples, args.seed
    )
    document = {
        "config": _config_echo(args),
        "m_selection": m_detail,
        "report": report.to_dict(),
    }
    _write_text(_format_json(document), args.out)
    return 0


def _mode_oracle_check(args) -> int:
    """Untruncated estimate against the dense oracle; exit 1 on mismatch."""
    circuit = _load_circuit(args)
    h = _load_hamiltonian(args)
    rho = _load_state(args, circuit.n)
    theta, drawn = _resolve_theta(circuit, args)
    report = estimate(
        circuit,
        h,
        rho,
        theta,
        args.lam,
        None,
        workers=args.workers,
        deterministic_sum=args.deterministic_sum,
    )
    reference = noisy_mean_value(circuit, h, rho, theta, args.lam)
    difference = abs(report.value - reference)
    agrees = bool(difference <= ORACLE_CHECK_TOL)
    document = {
        "config": _config_echo(args),
        "theta": theta,
        "theta_drawn": drawn,
        "estimate": report.to_dict(),
        "oracle_value": reference,
        "abs_difference": difference,
        "tolerance": ORACLE_CHECK_TOL,
        "agrees": agrees,
    }
    _write_text(_format_json(document), args.out)
    return 0 if agrees else 1


def _mode_path_dump(args) -> int:
    circuit = _load_circuit(args)
    h = _load_hamiltonian(args)
    rho = _load_state(args, circuit.n)
    theta, _ = _resolve_theta(circuit, args)
    m, _ = _resolve_m(args, circuit, h)
    run = PathEnumeration(circuit, h, rho, m)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["weight", "factor_description", "contribution"])
    for path in run:
        contribution = damping(path, args.lam) * path_value(path, theta, h, rho)
        writer.writerow(
            [path.total_weight, describe_factors(path), format(contribution, ".17g")]
        )
    _write_text(buffer.getvalue(), args.out)
    return 0


def _mode_scaling_sweep(args) -> int:
    if args.depths is None:
        raise ValueError("scaling-sweep needs --depths, e.g. --depths 4,6,8,10")
    try:
        depths = [int(d) for d in args.depths.split(",") if d.strip()]
    except ValueError:
        raise ValueError(f"cannot parse --depths {args.depths!r}") from None
    if args.target_mse is None:
        raise ValueError("scaling-sweep needs --target-mse")
    result = scaling_sweep(args.sweep_qubits, depths, args.target_mse)
    document = {"config": _config_echo(args), **result}
    _write_text(_format_json(document), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paulipath",
        description="Truncated Pauli-path estimation of noisy circuit mean values",
    )
    parser.add_argument("--mode", required=True, choices=MODES)
    parser.add_argument("--circuit", help="circuit JSON file")
    parser.add_argument("--hamiltonian", help="observable JSON file")
    parser.add_argument("--state", help="sparse density JSON file; default |0...0>")
    parser.add_argument("--params", help="JSON file mapping symbols to radians")
    parser.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        default=0.0,
        help="depolarizing rate per qubit (default 0)",
    )
    parser.add_argument("--trunc-m", type=int, help="explicit truncation order")
    parser.add_argument("--target-mse", type=float, help="target mean squared error")
    parser.add_argument("--epsilon", type=float, help="additive error target")
    parser.add_argument("--delta", type=float, help="failure probability target")
    parser.add_argument("--samples", type=int, default=1000)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--deterministic-sum", action="store_true")
    parser.add_argument("--out", help="output file (default stdout)")
    parser.add_argument(
        "--depths", help="comma-separated depths for scaling-sweep"
    )
    parser.add_argument(
        "--sweep-qubits", type=int, default=2, help="qubit count for scaling-sweep"
    )
    return parser


_MODE_RUNNERS = {
    "estimate": _mode_estimate,
    "choose-m": _mode_choose_m,
    "mse-benchmark": _mode_mse_benchmark,
    "oracle-check": _mode_oracle_check,
    "path-dump": _mode_path_dump,
    "scaling-sweep": _mode_scaling_sweep,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _MODE_RUNNERS[args.mode](args)
    except (CircuitFormatError, ObservableFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3
    except OracleCapError as exc:
        print(f"oracle cap: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
