"""``qplex`` command line: solve, convert, emit, devices.

Exit codes: 0 success, 1 usage or parameter error, 2 invalid model,
3 backend/credential/provider error, 4 infeasible result.
"""
from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from typing import Sequence

from . import __version__
from .backends import SolveOptions, get_solver, registered_backends, select_device
from .backends.remote import RemoteClient, read_token
from .circuits import AnsatzSpec, build_qaoa, build_vqe, emit_qasm3, param_count, split_qaoa_params
from .errors import BackendError, CircuitError, ConversionError, ModelError
from .model import Solution, load_model
from .optimize import OPTIMIZERS, OptimizerConfig, initial_params
from .qubo import to_ising, to_qubo

EXIT_OK, EXIT_USAGE, EXIT_MODEL, EXIT_BACKEND, EXIT_INFEASIBLE = 0, 1, 2, 3, 4

log = logging.getLogger("qplex")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _seed(text: str) -> int:
    if text == "random":
        return random.SystemRandom().randrange(2**32)
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("seed must be a nonnegative integer or 'random'") from None
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be nonnegative")
    return value


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("text", "json"), default="text")
    common.add_argument("-o", dest="path", metavar="PATH", help="write the result to PATH")
    common.add_argument("--seed", type=_seed, default=0, help="integer seed or 'random' (default 0)")
    common.add_argument("--provider-url", help="base URL of a remote provider (default: in-process mock)")
    common.add_argument("-v", "--verbose", action="store_true")

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--backend", default="exact")
    solver.add_argument("--algorithm", choices=("exact", "annealing", "qaoa", "vqe"))
    solver.add_argument("--p", type=int, default=1, help="QAOA layers")
    solver.add_argument("--depth", type=int, default=1, help="VQE entangling layers")
    solver.add_argument("--shots", type=int, default=1024, help="0 = exact expectation (simulator only)")
    solver.add_argument("--optimizer", choices=OPTIMIZERS, default="nelder-mead")
    solver.add_argument("--max-iter", type=int, default=200)
    solver.add_argument("--tol", type=float, default=1e-6)
    solver.add_argument("--patience", type=int, default=10)
    solver.add_argument("--penalty", type=float)
    solver.add_argument("--num-reads", type=int, default=100)
    solver.add_argument("--sweeps", type=int, default=1000)
    solver.add_argument("--beta-hot", type=float, default=0.1)
    solver.add_argument("--beta-cold", type=float, default=10.0)

    parser = _Parser(prog="qplex", description="Solve optimization models on classical and quantum backends.")
    parser.add_argument("--version", action="version", version=f"qplex {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common, solver], help="solve a model file")
    p.add_argument("model")

    p = sub.add_parser("convert", parents=[common], help="write the QUBO for a model file")
    p.add_argument("model")
    p.add_argument("--penalty", type=float)

    p = sub.add_parser("emit", parents=[common], help="write the OpenQASM 3 ansatz for a model file")
    p.add_argument("model")
    p.add_argument("--algorithm", choices=("qaoa", "vqe"), default="qaoa")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--penalty", type=float)
    p.add_argument("--params", type=_floats, help="comma-separated angles (default: seeded random)")

    p = sub.add_parser("devices", parents=[common], help="list a provider's devices")
    p.add_argument("--provider", default="mock-remote")
    p.add_argument("--require", type=int, metavar="N", help="mark the device chosen for N qubits")
    return parser


def _write(args, text: str) -> None:
    if args.path:
        with open(args.path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _fmt_num(x: float | None) -> str:
    return "n/a" if x is None else format(x, "g")


def _solution_json(sol: Solution) -> dict:
    out = sol.to_dict()
    out["metadata"] = {k: v for k, v in out["metadata"].items() if k != "wall_time_ms"}
    return out


def _render_solution(sol: Solution) -> str:
    lines = [
        f"status:    {sol.status}",
        f"objective: {_fmt_num(sol.objective_value)}",
        f"backend:   {sol.backend_name}",
    ]
    if sol.assignment:
        lines.append("assignment:")
        lines.extend(f"  {name} = {_fmt_num(v)}" for name, v in sol.assignment.items())
    meta = sol.metadata
    for key in ("device", "algorithm", "iterations", "evaluations", "best_loss", "termination_reason",
                "shots", "best_bitstring", "best_energy", "num_reads", "error", "wall_time_ms"):
        if key in meta:
            value = meta[key]
            lines.append(f"{key}: {_fmt_num(value) if isinstance(value, float) else value}")
    return "\n".join(lines) + "\n"


def cmd_solve(args) -> int:
    model = load_model(args.model)
    try:
        options = SolveOptions(
            backend=args.backend, algorithm=args.algorithm, p=args.p, depth=args.depth, shots=args.shots,
            optimizer=OptimizerConfig(args.optimizer, args.max_iter, args.tol, args.patience, args.seed),
            penalty=args.penalty, seed=args.seed, num_reads=args.num_reads, sweeps=args.sweeps,
            beta_hot=args.beta_hot, beta_cold=args.beta_cold, provider_url=args.provider_url,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sol = get_solver(args.backend, options).solve(model)
    if args.output == "json":
        text = json.dumps(_solution_json(sol), sort_keys=True) + "\n"
    else:
        text = _render_solution(sol)
    _write(args, text)
    if sol.status == "error":
        print(f"error: {sol.metadata.get('error', 'backend failure')}", file=sys.stderr)
        return EXIT_BACKEND
    return EXIT_OK if sol.ok else EXIT_INFEASIBLE


def cmd_convert(args) -> int:
    result = to_qubo(load_model(args.model), args.penalty)
    doc = result.to_dict()
    summary = f"n={result.qubo.n} bits, penalty={_fmt_num(result.penalty)}"
    if args.path:
        with open(args.path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
        if args.output == "json":
            _emit_json({"n": result.qubo.n, "penalty": result.penalty, "path": args.path})
        else:
            print(summary)
    else:
        _emit_json(doc)
        print(summary, file=sys.stderr)
    return EXIT_OK


def cmd_emit(args) -> int:
    result = to_qubo(load_model(args.model), args.penalty)
    n = result.qubo.n
    layers = args.p if args.algorithm == "qaoa" else args.depth
    try:
        spec = AnsatzSpec(args.algorithm, layers, n)
    except CircuitError as exc:
        raise UsageError(str(exc)) from None
    params = args.params if args.params is not None else list(initial_params(spec, args.seed))
    if len(params) != param_count(spec):
        raise UsageError(f"{args.algorithm} with {layers} layer(s) on {n} qubits takes "
                         f"{param_count(spec)} parameters, got {len(params)}")
    if args.algorithm == "qaoa":
        circuit = build_qaoa(to_ising(result.qubo), args.p, *split_qaoa_params(params, args.p))
    else:
        circuit = build_vqe(n, args.depth, params)
    text = emit_qasm3(circuit)
    if args.output == "json" and not args.path:
        _emit_json({"qasm": text, "num_qubits": n, "params": [float(v) for v in params]})
    else:
        _write(args, text)
    return EXIT_OK


def cmd_devices(args) -> int:
    with RemoteClient(read_token(args.provider), args.provider_url) as client:
        devices = sorted(client.devices(), key=lambda d: d.name)
    if not devices:
        raise BackendError(f"no devices offered by provider {args.provider!r}")
    chosen = select_device(devices, args.require).name if args.require is not None else None
    if args.output == "json":
        _emit_json({"provider": args.provider, "devices": [d.to_dict() for d in devices], "selected": chosen})
        return EXIT_OK
    rows = [(" ", "name", "qubits", "queue", "kind")]
    rows += [("*" if d.name == chosen else " ", d.name, str(d.num_qubits), str(d.queue_length), d.kind)
             for d in devices]
    widths = [max(len(r[i]) for r in rows) for i in range(5)]
    text = "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows) + "\n"
    if chosen:
        text += f"* selected for {args.require} qubits\n"
    _write(args, text)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "convert": cmd_convert, "emit": cmd_emit, "devices": cmd_devices}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: cannot read model: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except (ModelError, ConversionError) as exc:
        print(f"error: invalid model: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except BackendError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except CircuitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
