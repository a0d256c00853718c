"""Command-line entry point.

    tdcube graph GRAPH
    tdcube spectral GRAPH [--ordering K]
    tdcube verify GRAPH [--probe-threshold T]
    tdcube lambda GRAPH [--basis-out FILE]
    tdcube conjectures GRAPH
    tdcube hamming (--profiles D [N] | --tables D N | --k1 N)

GRAPH is a family name (``hamming:D,N``, ``complete:N``, ``hypercube:D``,
``petersen``, ``cycle:n``) or a JSON file ``{"n": ..., "edges": [...]}``.

Exit status: 0 ok, 1 an asserted check failed, 2 bad arguments, 3 graph
rejected (not distance-regular or not Q-polynomial), 4 internal fault.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from math import comb

from . import __version__, scalar
from .graphs import NotDistanceRegular, resolve_graph

SCHEMA_VERSION = "1.0"

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_REJECTED = 3
EXIT_FAULT = 4


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    graph_spec: str | None
    scalar_mode: str = "auto"
    tolerance: float = scalar.DEFAULT_TOL
    ordering_index: int = 0
    output_format: str = "text"
    probe_threshold: int = 32768


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text", dest="output_format")
    common.add_argument("--mode", choices=("auto", "exact", "float"), default="auto", dest="scalar_mode")
    common.add_argument("--tol", type=_positive_float, default=None, help="float-mode zero tolerance (env TDCUBE_TOL)")
    common.add_argument("--ordering", type=_nonneg_int, default=0, dest="ordering_index")
    common.add_argument("--probe-threshold", type=_nonneg_int, default=32768)

    p = _Parser(prog="tdcube", description="S3-symmetric tridiagonal algebra toolkit for Q-polynomial DRGs")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (
        ("graph", "validate a graph and print its intersection numbers"),
        ("spectral", "eigenvalues, Krein parameters, Q-polynomial orderings, scalars"),
        ("verify", "check every relation instance on V⊗3"),
        ("lambda", "generate the fundamental module and test P/Q membership"),
        ("conjectures", "run the two conjecture checkers"),
    ):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("graph")
        if name == "lambda":
            sp.add_argument("--basis-out", default=None, help="write the basis to this JSON sidecar")
            sp.add_argument("--cap", type=_nonneg_int, default=10_000)
        if name == "conjectures":
            sp.add_argument("--cap", type=_nonneg_int, default=10_000)
    hp = sub.add_parser("hamming", parents=[common], help="profile calculus for H(D, N)")
    g = hp.add_mutually_exclusive_group(required=True)
    g.add_argument("--profiles", nargs="+", type=int, metavar=("D", "N"), help="list profiles (N defaults to 3)")
    g.add_argument("--tables", nargs=2, type=int, metavar=("D", "N"))
    g.add_argument("--k1", type=int, metavar="N")
    return p


# helpers


def _r(x):
    return scalar.render(x)


def _spectral(cfg, g):
    from .spectral import spectral_data

    return spectral_data(g, cfg.ordering_index, cfg.scalar_mode, cfg.tolerance)


# commands


def cmd_graph(cfg, args):
    g = resolve_graph(cfg.graph_spec)
    return g.summary(), EXIT_OK


def cmd_spectral(cfg, args):
    sd = _spectral(cfg, resolve_graph(cfg.graph_spec))
    return sd.report(), EXIT_OK


def cmd_verify(cfg, args):
    from .relations import run_all

    sd = _spectral(cfg, resolve_graph(cfg.graph_spec))
    reports = run_all(sd, cfg.probe_threshold)
    failed = [r for r in reports if r.asserted and not r.passed]
    payload = {
        "graph": sd.graph.name,
        "exact": sd.exact,
        "instances": len(reports),
        "failed": len(failed),
        "records": [r.as_dict() for r in reports],
    }
    return payload, EXIT_CHECK_FAILED if failed else EXIT_OK


def _lambda_payload(cfg, sd, cap):
    from .fundamental import all_vectors, generate_lambda

    lam = generate_lambda(sd, cap)
    membership = []
    ok = True
    for kind in ("P", "Q"):
        for (h, i, j), lv in all_vectors(sd, kind).items():
            m = lam.membership(lv.vector)
            ok &= m.member
            membership.append(
                {"vector": lv.name, "norm_sq": _r(lv.norm_sq), "member": m.member, "residual": m.residual}
            )
    payload = {"graph": sd.graph.name, "exact": sd.exact, "dim": lam.dim, "membership": membership}
    if sd.graph.hamming is not None:
        D = sd.graph.hamming[0]
        expected = comb(D + 4, 4)
        payload["expected_dim"] = expected
        ok &= lam.dim == expected
    return lam, payload, ok


def cmd_lambda(cfg, args):
    from .fundamental import check_conjecture_bases, check_conjecture_EEE

    sd = _spectral(cfg, resolve_graph(cfg.graph_spec))
    lam, payload, ok = _lambda_payload(cfg, sd, args.cap)
    payload["conjecture_EEE"] = check_conjecture_EEE(sd, lam).as_dict()
    payload["conjecture_bases"] = [c.as_dict() for c in check_conjecture_bases(sd, lam)]
    if args.basis_out:
        doc = {"graph": sd.graph.name, "dim": lam.dim, "basis": [b.to_json("sparse") for b in lam.basis]}
        with open(args.basis_out, "w") as fh:
            json.dump(doc, fh, sort_keys=True)
        payload["basis_file"] = args.basis_out
    return payload, EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_conjectures(cfg, args):
    from .fundamental import check_conjecture_bases, check_conjecture_EEE, generate_lambda

    sd = _spectral(cfg, resolve_graph(cfg.graph_spec))
    lam = generate_lambda(sd, args.cap)
    payload = {
        "graph": sd.graph.name,
        "exact": sd.exact,
        "dim": lam.dim,
        "conjecture_EEE": check_conjecture_EEE(sd, lam).as_dict(),
        "conjecture_bases": [c.as_dict() for c in check_conjecture_bases(sd, lam)],
    }
    return payload, EXIT_OK


def cmd_hamming(cfg, args):
    from . import hamming as hm

    if args.profiles is not None:
        if len(args.profiles) > 2:
            raise UsageError("--profiles takes D and an optional N")
        D = args.profiles[0]
        N = args.profiles[1] if len(args.profiles) == 2 else 3
        if D < 1 or N < 3:
            raise UsageError("--profiles needs D >= 1 and N >= 3")
        profs = hm.enumerate_profiles(D)
        rows = [
            {"profile": list(p), "orbit_size": hm.orbit_size(p, N), "distances": list(hm.distances_of_profile(p))}
            for p in profs
        ]
        total = sum(r["orbit_size"] for r in rows)
        payload = {"D": D, "N": N, "count": len(profs), "profiles": rows, "total": total}
        return payload, EXIT_OK if total == N ** (3 * D) else EXIT_CHECK_FAILED
    if args.tables is not None:
        D, N = args.tables
        if D < 1 or N < 3:
            raise UsageError("--tables needs D >= 1 and N >= 3")
        payload = {
            "D": D,
            "N": N,
            "profiles": [list(p) for p in hm.enumerate_profiles(D)],
            "A": {str(r): hm.transition_matrix(r, D, N).tolist() for r in (1, 2, 3)},
            "Astar": {str(r): [hm.astar_eigenvalue(r, p, N) for p in hm.enumerate_profiles(D)] for r in (1, 2, 3)},
        }
        return payload, EXIT_OK
    N = args.k1
    if N < 3:
        raise UsageError("--k1 needs N >= 3")
    try:
        res = hm.kN_closed_forms(N)
        ok = all(res["checks"].values())
    except ValueError as exc:
        return {"N": N, "error": str(exc)}, EXIT_CHECK_FAILED
    S, den = res["S"]
    payload = {
        "N": N,
        "basis": ["P(0,0,0)", "P(0,1,1)", "P(1,0,1)", "P(1,1,0)", "P(1,1,1)"],
        "matrices": {k: v.tolist() for k, v in res["matrices"].items()},
        "S": {"numerator": S.tolist(), "denominator": den},
        "closed_forms_match": True,
        "checks": res["checks"],
    }
    return payload, EXIT_OK if ok else EXIT_CHECK_FAILED


COMMANDS = {
    "graph": cmd_graph,
    "spectral": cmd_spectral,
    "verify": cmd_verify,
    "lambda": cmd_lambda,
    "conjectures": cmd_conjectures,
    "hamming": cmd_hamming,
}


# output


def _text_lines(obj, indent=0):
    pad = "  " * indent
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in _values(v)):
                yield f"{pad}{k}:"
                yield from _text_lines(v, indent + 1)
            else:
                yield f"{pad}{k}: {_compact(v)}"
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, dict):
                yield pad + "  ".join(f"{k}={_compact(x)}" for k, x in v.items())
            else:
                yield pad + _compact(v)
    else:
        yield pad + _compact(obj)


def _values(v):
    return v.values() if isinstance(v, dict) else v


def _compact(v):
    if isinstance(v, str):
        return v
    return json.dumps(v, separators=(",", ":"))


def render(doc: dict, fmt: str) -> str:
    if fmt == "structured":
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    lines = [f"tdcube {doc['command']}: {doc['status']['message']}"]
    lines += _text_lines(doc["payload"])
    return "\n".join(lines) + "\n"


def _document(command, cfg, payload, code, message):
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": asdict(cfg),
        "payload": payload,
        "status": {"exit_code": code, "ok": code == EXIT_OK, "message": message},
    }


_MESSAGES = {
    EXIT_OK: "ok",
    EXIT_CHECK_FAILED: "an asserted check failed",
    EXIT_REJECTED: "graph rejected",
    EXIT_FAULT: "internal fault",
}


def run(argv=None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, run one subcommand, write one report; return the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        tol = args.tol if args.tol is not None else scalar.default_tolerance()
    except UsageError as exc:
        print(f"tdcube: error: {exc}", file=stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"tdcube: error: {exc}", file=stderr)
        return EXIT_USAGE
    cfg = RunConfig(
        getattr(args, "graph", None),
        args.scalar_mode,
        tol,
        args.ordering_index,
        args.output_format,
        args.probe_threshold,
    )
    from .fundamental import DimensionRunaway
    from .spectral import ExactModeUnavailable, NotQPolynomial

    try:
        payload, code = COMMANDS[args.command](cfg, args)
        message = _MESSAGES[code]
    except UsageError as exc:
        print(f"tdcube: error: {exc}", file=stderr)
        return EXIT_USAGE
    except NotDistanceRegular as exc:
        payload = {"error": str(exc), "witness": list(exc.witness) if exc.witness else None}
        code, message = EXIT_REJECTED, "graph rejected: not distance-regular"
    except NotQPolynomial as exc:
        payload = {"error": str(exc), "vanishing_only_orderings": [list(o) for o in exc.vanishing_only]}
        code, message = EXIT_REJECTED, "graph rejected: not Q-polynomial"
    except ExactModeUnavailable as exc:
        print(f"tdcube: error: {exc}", file=stderr)
        return EXIT_USAGE
    except (FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"tdcube: error: {exc}", file=stderr)
        return EXIT_USAGE
    except DimensionRunaway as exc:
        payload = {"error": str(exc), "dim": exc.dim, "queued": exc.queued}
        code, message = EXIT_FAULT, "internal fault: dimension cap exceeded"
    except (ValueError, IndexError) as exc:
        # malformed graph identifiers and files, bad ordering index
        print(f"tdcube: error: {exc}", file=stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        payload = {"error": f"{type(exc).__name__}: {exc}"}
        code, message = EXIT_FAULT, "internal fault"
    if code in (EXIT_REJECTED, EXIT_FAULT):
        print(f"tdcube: {message}: {payload['error']}", file=stderr)
    stdout.write(render(_document(args.command, cfg, payload, code, message), cfg.output_format))
    return code


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
