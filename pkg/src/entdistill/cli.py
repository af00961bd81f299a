"""Command-line front end.

Exit codes: 0 success (all criteria satisfied / target reached / all checks
pass), 1 informative negative result, 2 invalid input, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io as sio
from .criteria import entropic_check, ppt_check, reduction_check
from .distillation import Outcome, distill_run, twirl_exact, twirl_monte_carlo
from .errors import EntDistillError
from .maps import verify_decomposition
from .states import (
    Side,
    embed_diag,
    fidelity,
    isotropic,
    random_density,
    random_separable,
    sigma_example,
    werner,
)

DEFAULT_SEED = 0


class UsageError(Exception):
    pass


def _emit(args, payload: str, summary: str) -> None:
    """JSON goes to --out (summary to stdout) or to stdout with --format json."""
    try:
        if args.out:
            sio.write_text(payload, args.out)
            print(summary)
        elif args.format == "text":
            print(summary)
        else:
            sio.write_text(payload, None)
    except OSError as exc:
        raise IOFailure(str(exc)) from exc


class IOFailure(Exception):
    pass


def _load_state(path):
    try:
        return sio.load_state(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise UsageError(f"malformed state file {path}: {exc}") from exc


def _build_state(args):
    kind = args.kind
    if kind == "isotropic":
        return isotropic(args.dim, args.fidelity)
    if kind == "werner":
        return werner(args.dim, args.phi)
    if kind == "sigma":
        return sigma_example(args.p)
    if kind == "embed":
        if not args.matrix:
            raise UsageError("embed needs --matrix FILE")
        try:
            m = sio.matrix_from_dict(sio.read_json(args.matrix))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"bad matrix file: {exc}") from exc
        return embed_diag(m)
    if kind == "random":
        return random_density(args.dim, args.seed, rank=args.rank)
    if kind == "separable":
        return random_separable(args.dim, args.terms, args.seed)
    if kind == "file":
        if not args.input:
            raise UsageError("file needs --in FILE")
        return _load_state(args.input)
    raise UsageError(f"unknown state kind {kind!r}")


def cmd_state(args) -> int:
    s = _build_state(args)
    summary = f"{args.kind} state {s.dim_a}x{s.dim_b}, trace 1, fidelity {fidelity(s):.12g}" if s.dim_a == s.dim_b else f"{args.kind} state {s.dim_a}x{s.dim_b}"
    _emit(args, sio.dumps(sio.state_to_dict(s)), summary)
    return 0


ALL_CRITERIA = ("reduction", "ppt", "entropic")


def _parse_criteria(text: str) -> list[str]:
    out = []
    for tok in (t.strip().lower() for t in text.split(",") if t.strip()):
        if tok == "reduction":
            out += ["reduction_a", "reduction_b"]
        elif tok == "entropic":
            out += ["entropic1", "entropic2", "entropicinf"]
        elif tok in ("reduction_a", "reduction_b", "ppt", "entropic1", "entropic2", "entropicinf"):
            out.append(tok)
        else:
            raise UsageError(f"unknown criterion {tok!r}")
    return list(dict.fromkeys(out))


def cmd_check(args) -> int:
    crits = _parse_criteria(args.criteria)
    s = _load_state(args.state)
    reports = []
    for c in crits:
        if c == "reduction_a":
            reports.append(reduction_check(s, Side.A))
        elif c == "reduction_b":
            reports.append(reduction_check(s, Side.B))
        elif c == "ppt":
            reports.append(ppt_check(s))
        else:
            alpha = {"entropic1": 1, "entropic2": 2, "entropicinf": np.inf}[c]
            reports.extend(entropic_check(s, alpha))
    lines = [
        f"{r.name:<22} {'satisfied' if r.satisfied else 'VIOLATED':<10} min={r.min_eigenvalue:.12g}"
        for r in reports
    ]
    _emit(args, sio.dumps([r.to_dict() for r in reports]), "\n".join(lines))
    return 0 if all(r.satisfied for r in reports) else 1


def cmd_distill(args) -> int:
    s = _load_state(args.state)
    if s.dim_a != s.dim_b:
        raise UsageError("distillation needs an N x N state")
    handoff = None if args.no_handoff else args.handoff_fidelity
    trace = distill_run(s, args.target_fidelity, args.max_rounds, handoff_fidelity=handoff)
    if args.format == "csv":
        payload = trace.to_csv()
    else:
        payload = sio.dumps(trace.to_dict())
    lines = [f"outcome: {trace.outcome.value}", f"initial fidelity: {trace.initial_fidelity:.12g}"]
    if trace.filter is not None:
        lines.append(f"filter side {trace.filter.side.value}, success probability {trace.filter_probability:.12g}, "
                     f"fidelity after filter {trace.filtered_fidelity:.12g}")
    for r in trace.rounds:
        lines.append(f"round {r.round:>3} [{r.step}, N={r.dim}] F={r.fidelity_out:.12g} p={r.p_success:.6g} "
                     f"pairs={r.expected_pairs:.6g}")
    if args.format == "csv" and not args.out:
        sio.write_text(payload, None)
    else:
        _emit(args, payload, "\n".join(lines))
    return 0 if trace.outcome is Outcome.REACHED_TARGET else 1


def cmd_twirl(args) -> int:
    s = _load_state(args.state)
    if s.dim_a != s.dim_b:
        raise UsageError("twirling needs an N x N state")
    if args.samples == 0:
        out = twirl_exact(s)
        summary = f"exact twirl: isotropic N={out.dim_a}, F={fidelity(out):.12g}"
        payload = sio.state_to_dict(out)
    else:
        est = twirl_monte_carlo(s, args.samples, args.seed)
        out = est.state
        summary = (f"Monte-Carlo twirl, {est.samples} samples (seed {args.seed}): "
                   f"F={fidelity(out):.12g}, distance to exact {est.distance_to_exact:.6g}")
        payload = {**sio.state_to_dict(out), "samples": est.samples, "distance_to_exact": est.distance_to_exact}
    _emit(args, sio.dumps(payload), summary)
    return 0


def cmd_choi(args) -> int:
    if args.dim < 2:
        raise UsageError("--dim must be >= 2")
    rep = verify_decomposition(args.dim, seed=args.seed)
    lines = [f"reduction map, n={rep.n}: choi min eigenvalue {rep.choi_min_eigenvalue:.12g}, trace {rep.choi_trace:.12g}"]
    lines += [f"  {name:<28} {'pass' if ok else 'FAIL'}" for name, ok in rep.checks.items()]
    _emit(args, sio.dumps(rep.to_dict()), "\n".join(lines))
    return 0 if rep.passed else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write machine output here (default: stdout)")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = argparse.ArgumentParser(prog="entdistill", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    st = sub.add_parser("state", parents=[common], help="build a state file")
    st.add_argument("kind", choices=("isotropic", "werner", "embed", "sigma", "random", "separable", "file"))
    st.add_argument("--dim", type=int, default=3)
    st.add_argument("--fidelity", type=float)
    st.add_argument("--phi", type=float)
    st.add_argument("--p", type=float)
    st.add_argument("--matrix", help="matrix JSON for embed")
    st.add_argument("--rank", type=int)
    st.add_argument("--terms", type=int, default=4)
    st.add_argument("--in", dest="input")
    st.set_defaults(func=cmd_state)

    ck = sub.add_parser("check", parents=[common], help="run separability criteria")
    ck.add_argument("state")
    ck.add_argument("--criteria", default=",".join(ALL_CRITERIA))
    ck.set_defaults(func=cmd_check)

    ds = sub.add_parser("distill", parents=[common], help="run the distillation protocol")
    ds.add_argument("state")
    ds.add_argument("--target-fidelity", type=float, default=0.9)
    ds.add_argument("--max-rounds", type=int, default=50)
    ds.add_argument("--handoff-fidelity", type=float, default=0.95)
    ds.add_argument("--no-handoff", action="store_true")
    ds.set_defaults(func=cmd_distill)

    tw = sub.add_parser("twirl", parents=[common], help="U(x)U* twirl a state")
    tw.add_argument("state")
    tw.add_argument("--samples", type=int, default=0, help="0 for the exact twirl")
    tw.set_defaults(func=cmd_twirl)

    ch = sub.add_parser("choi", parents=[common], help="verify the reduction-map decomposition")
    ch.add_argument("--dim", type=int, required=True)
    ch.set_defaults(func=cmd_choi)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if args.command == "state":
        required = {"isotropic": "fidelity", "werner": "phi", "sigma": "p"}.get(args.kind)
        if required and getattr(args, required) is None:
            print(f"error: {args.kind} needs --{required}", file=sys.stderr)
            return 2
    try:
        return args.func(args)
    except IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (UsageError, EntDistillError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
