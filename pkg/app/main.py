# app/main.py
import argparse
import logging
import sys
from dataclasses import replace
from typing import Any, Dict, List, Optional, Tuple

from app import config
from app.models.antichain import extract_descending_chain, multi_factor_descending
from app.models.core import (
    GuardTripped,
    InputError,
    InvariantViolation,
    IrrationalCenterError,
    PreconditionError,
    format_rat,
)
from app.models.graphs import find_chain_in_graph
from app.models.jets import run_jet_query
from app.models.surface import log_resolve, mld_surface
from app.models.toric import SearchConfig, SearchMode, delta_threshold, lct_monomial, mld_monomial
from app.services import codec
from app.services.experiments import ExperimentKind, ExperimentSpec, run_experiment

logger = logging.getLogger("app.main")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_UNCERTIFIED = 3
EXIT_GUARD = 4

_INPUT_ERRORS = (InputError, PreconditionError, IrrationalCenterError)
_GUARD_ERRORS = (GuardTripped, InvariantViolation)


# ==============================
# ARGUMENTOS
# ==============================

def _global_flags() -> argparse.ArgumentParser:
    # SUPPRESS permite as flags antes ou depois do subcomando
    flags = argparse.ArgumentParser(add_help=False)
    flags.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for every random draw")
    flags.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="compact one-line JSON")
    flags.add_argument("--bound", type=int, default=argparse.SUPPRESS, help="search bound B on Σv")
    flags.add_argument("--depth-cap", type=int, default=argparse.SUPPRESS, help="maximum number of blow-ups")
    return flags


def build_parser() -> argparse.ArgumentParser:
    flags = _global_flags()
    parser = argparse.ArgumentParser(prog="mldlab", parents=[flags],
                                     description="Minimal log discrepancies and log canonical thresholds, exactly.")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[flags], help=text)
        p.add_argument("--input", required=True, help="JSON input file, '-' for stdin")
        return p

    p = command("mld", "mld at the origin of a monomial R-ideal")
    p.add_argument("--oracle", action="store_true", help="exhaustive search up to the bound")
    command("lct", "log canonical threshold of a monomial R-ideal")
    command("delta", "largest δ with mld(a·m^δ) = 0")
    command("jets", "jet scheme dimensions and the jet test of log canonicity")
    p = command("chain", "descending chain inside a sequence of monomial ideals")
    p.add_argument("--len", type=int, required=True, dest="length")
    p = command("resolve2d", "log resolution of an R-ideal on the surface germ")
    p.add_argument("--out", help="write the chain here instead of stdout")
    command("mld2d", "mld at the origin of an R-ideal on A^2")
    p = command("graphchain", "induced path from a vertex of a subcubic graph")
    p.add_argument("--v", required=True, dest="vertex")
    p.add_argument("--len", type=int, required=True, dest="length")

    probe = sub.add_parser("probe", parents=[flags], help="conjecture-probing experiments")
    kinds = probe.add_subparsers(dest="kind", required=True)
    p = kinds.add_parser("boundedness", parents=[flags])
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--family", help="JSON family of toric problems")
    source.add_argument("--spec", help="JSON experiment spec")
    p.add_argument("--out")
    for name in ("acc", "ideal-adic"):
        p = kinds.add_parser(name, parents=[flags])
        p.add_argument("--spec", required=True, help="JSON experiment spec")
        p.add_argument("--out")
    return parser


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}")


def _search(args) -> SearchConfig:
    mode = SearchMode.ORACLE if getattr(args, "oracle", False) else SearchMode.EXACT_LP
    return SearchConfig(oracle_bound=getattr(args, "bound", None), mode=mode)


# ==============================
# COMANDOS
# ==============================
# Cada handler devolve (payload, não certificado).

Outcome = Tuple[Any, bool]


def _result(r) -> Outcome:
    return codec.emit_result(r), not r.certified


def cmd_mld(args) -> Outcome:
    p = codec.toric_problem_from(codec.parse_model(_read(args.input), codec.ToricProblemModel))
    return _result(mld_monomial(p, _search(args)))


def cmd_lct(args) -> Outcome:
    p = codec.toric_problem_from(codec.parse_model(_read(args.input), codec.ToricProblemModel))
    return _result(lct_monomial(p, _search(args)))


def cmd_delta(args) -> Outcome:
    p = codec.toric_problem_from(codec.parse_model(_read(args.input), codec.ToricProblemModel))
    return {"delta": format_rat(delta_threshold(p, _search(args)))}, False


def cmd_jets(args) -> Outcome:
    query = codec.jet_query_from(codec.parse_model(_read(args.input), codec.JetQueryModel))
    return run_jet_query(query), False


def cmd_chain(args) -> Outcome:
    seqs = codec.parse_sequences(_read(args.input))
    if len(seqs) == 1:
        indices = extract_descending_chain(seqs[0], args.length)
    else:
        indices = multi_factor_descending(seqs, args.length)
    return {"indices": indices}, False


def cmd_resolve2d(args) -> Outcome:
    a = codec.parse_surface_pair(_read(args.input))
    chain = log_resolve(a, getattr(args, "depth_cap", None))
    payload = codec.emit_chain(chain)
    if args.out:
        _write(args.out, payload, getattr(args, "json", False))
        return {"out": args.out, "nodes": len(chain.nodes)}, False
    return payload, False


def cmd_mld2d(args) -> Outcome:
    a = codec.parse_surface_pair(_read(args.input))
    return _result(mld_surface(a, getattr(args, "depth_cap", None)))


def _vertex(G, raw: str):
    if raw in G:
        return raw
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"vertex {raw!r} is not in the graph")


def cmd_graphchain(args) -> Outcome:
    G = codec.graph_from(codec.parse_model(_read(args.input), codec.GraphModel))
    return {"path": find_chain_in_graph(G, _vertex(G, args.vertex), args.length)}, False


def _experiment(args) -> ExperimentSpec:
    if getattr(args, "family", None):
        family = codec.parse_model(_read(args.family), codec.FamilyModel).family
        spec = ExperimentSpec(kind=ExperimentKind.BOUNDEDNESS,
                              n=family[0].n,
                              family=tuple(codec.toric_problem_from(p) for p in family))
    else:
        spec = codec.experiment_spec_from(codec.parse_model(_read(args.spec), codec.ExperimentSpecModel))
        wanted = ExperimentKind(args.kind.upper().replace("-", "_"))
        if spec.kind != wanted:
            raise InputError(f"spec is a {spec.kind.value} experiment, not {wanted.value}")
    overrides: Dict[str, Any] = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "bound", None) is not None:
        overrides["bound"] = args.bound
    return replace(spec, **overrides)


def cmd_probe(args) -> Outcome:
    report = run_experiment(_experiment(args), config.WORKERS)
    if args.out:
        _write(args.out, report, getattr(args, "json", False))
        return {"out": args.out, "uncertified": report["uncertified"]}, report["uncertified"]
    return report, report["uncertified"]


COMMANDS = {
    "mld": cmd_mld,
    "lct": cmd_lct,
    "delta": cmd_delta,
    "jets": cmd_jets,
    "chain": cmd_chain,
    "resolve2d": cmd_resolve2d,
    "mld2d": cmd_mld2d,
    "graphchain": cmd_graphchain,
    "probe": cmd_probe,
}


# ==============================
# PONTO DE ENTRADA
# ==============================

def _write(path: str, payload: Any, compact: bool) -> None:
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(codec.dumps(payload, compact) + "\n")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}")


def _fail(exc: Exception, code: int, compact: bool) -> int:
    logger.error(f"❌ {type(exc).__name__}: {exc}")
    print(codec.dumps({"error": str(exc), "kind": type(exc).__name__}, compact))
    return code


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=config.LOG_LEVEL, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    compact = getattr(args, "json", False)
    if getattr(args, "depth_cap", None) is not None and args.depth_cap < 1:
        return _fail(InputError("--depth-cap must be positive"), EXIT_INPUT, compact)

    try:
        payload, uncertified = COMMANDS[args.command](args)
    except _INPUT_ERRORS as exc:
        return _fail(exc, EXIT_INPUT, compact)
    except _GUARD_ERRORS as exc:
        return _fail(exc, EXIT_GUARD, compact)

    print(codec.dumps(payload, compact))
    if uncertified:
        logger.warning("⚠️ resultado não certificado além do limite de busca")
        return EXIT_UNCERTIFIED
    return EXIT_OK
