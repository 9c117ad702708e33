"""``netgood`` command line: gen, solve, check, prove, replay.

Every command only parses inputs, calls the library and formats the result.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from .equilibrium import br_dynamics, enumerate_pne, is_pne
from .errors import NetgoodError
from .game import GameSpec, BENEFITS, format_rational, make_profile, profile_to_json
from .graph import (TreeFamilyParams, Topology, bfs_levels, dump_edge_list, from_preset,
                    gen_layered_tree, loads_topology, to_dot, to_json_obj)
from .pneplus import is_pne_plus
from .prover import (DEFAULT_BUDGET_NODES, DEFAULT_BUDGET_SECS, certificate_from_json,
                     certificate_to_json, decide_pne_plus)
from .replay import replay_certificate

EXIT_ERROR = 2
# check
EXIT_MEMBER, EXIT_NOT_PLUS, EXIT_NOT_PNE = 0, 1, 3
# prove
EXIT_WITNESS, EXIT_EMPTY, EXIT_UNDECIDED = 0, 10, 20

log = logging.getLogger("netgood")


def _dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def load_graph(arg: str) -> Topology:
    """A path to an edge-list or JSON file, else a preset name."""
    if os.path.exists(arg):
        return loads_topology(Path(arg).read_text())
    return from_preset(arg)


def load_game(args) -> GameSpec:
    base = {}
    if getattr(args, "game", None):
        try:
            base = json.loads(Path(args.game).read_text())
        except json.JSONDecodeError as exc:
            raise NetgoodError(f"bad game file: {exc}") from exc
    for key, flag in (("delta", "delta"), ("cost", "cost"), ("s_max", "smax"), ("benefit", "benefit")):
        val = getattr(args, flag, None)
        if val is not None:
            base[key] = val
    return GameSpec.from_json_obj(base)


def load_profile(arg: str):
    """Comma/space separated rationals, a JSON list, or a file holding either."""
    text = Path(arg).read_text() if os.path.exists(arg) else arg
    text = text.strip()
    if text.startswith("["):
        try:
            values = json.loads(text)
        except json.JSONDecodeError as exc:
            raise NetgoodError(f"bad profile JSON: {exc}") from exc
    else:
        values = text.replace(",", " ").split()
    return make_profile(str(v) for v in values)


# -- commands ----------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.levels:
        degs = tuple(int(x) for x in args.levels.split(","))
        g = gen_layered_tree(TreeFamilyParams(degs, args.depth))
        name = "tree:" + args.levels
    elif args.preset:
        g = from_preset(args.preset)
        name = args.preset
    else:
        raise NetgoodError("give a preset or --levels")
    prefix = args.out or name.replace(":", "-").replace(",", "_")
    Path(prefix + ".edges").write_text(dump_edge_list(g) + "\n")
    Path(prefix + ".dot").write_text(to_dot(g))
    Path(prefix + ".json").write_text(_dumps(to_json_obj(g)))
    print(f"{name}: {g.n} nodes, {len(g.edges)} edges")
    if g.n and g.is_connected():
        for k, level in enumerate(bfs_levels(g)):
            degs = sorted({g.degree(v) for v in level})
            print(f"  level {k}: {len(level)} nodes, degrees {degs}")
    print(f"wrote {prefix}.edges {prefix}.dot {prefix}.json")
    return 0


def cmd_solve(args) -> int:
    g = load_graph(args.graph)
    spec = load_game(args)
    if args.dynamics:
        res = br_dynamics(g, spec, [Fraction(0)] * g.n, schedule=args.schedule,
                          max_iters=args.max_iters)
        report = {"mode": "dynamics", "converged": res.converged, "sweeps": len(res.trace),
                  "profile": profile_to_json(res.profile)}
        _emit(_dumps(report), args.out)
        return 0 if res.converged else 1
    sols = enumerate_pne(g, spec)
    report = {"mode": "enumerate", "count": len(sols),
              "isolated": sum(not s.degenerate for s in sols),
              "families": sum(s.degenerate for s in sols),
              "equilibria": [s.to_json_obj() for s in sols]}
    _emit(_dumps(report), args.out)
    return 0 if sols else 1


def cmd_check(args) -> int:
    g = load_graph(args.graph)
    spec = load_game(args)
    s = make_profile(load_profile(args.profile), g, spec)
    pne = is_pne(g, spec, s)
    if not pne:
        print("PNE: no")
        for v in pne.violations:
            print(f"  {v}")
        print("PNE+: not applicable")
        return EXIT_NOT_PNE
    print("PNE: yes")
    verdict = is_pne_plus(g, spec, s)
    if verdict:
        print("PNE+: yes")
        return EXIT_MEMBER
    print("PNE+: no")
    deg = g.degrees
    for i, j in verdict.violations:
        print(f"  degree({i})={deg[i]} > degree({j})={deg[j]} but payoff({i}) < payoff({j})")
    return EXIT_NOT_PLUS


def cmd_prove(args) -> int:
    g = load_graph(args.graph)
    spec = load_game(args)
    cert = decide_pne_plus(g, spec, budget_nodes=args.budget_nodes, budget_secs=args.budget_secs)
    text = _dumps(certificate_to_json(cert))
    if args.out:
        Path(args.out).write_text(text)
    stats = cert.stats
    print(f"verdict: {cert.verdict} ({stats.get('nodes')} search nodes, {stats.get('lp_calls')} LPs)")
    if cert.witness is not None:
        print("witness: (" + ", ".join(format_rational(v) for v in cert.witness) + ")")
    if not args.out:
        sys.stdout.write(text)
    return {"witness": EXIT_WITNESS, "empty": EXIT_EMPTY}.get(cert.verdict, EXIT_UNDECIDED)


def cmd_replay(args) -> int:
    g = load_graph(args.graph)
    spec = load_game(args)
    try:
        obj = json.loads(Path(args.certificate).read_text())
    except json.JSONDecodeError as exc:
        raise NetgoodError(f"malformed certificate: {exc}") from exc
    cert = certificate_from_json(obj)
    ok = replay_certificate(g, spec, cert)
    print("replay: ok" if ok else "replay: FAILED")
    return 0 if ok else 1


# -- parser ------------------------------------------------------------------

def _game_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--game", help="JSON file with delta, cost, s_max, benefit")
    p.add_argument("--delta", help="threshold effort (rational, default 1)")
    p.add_argument("--cost", help="marginal cost (rational, default 1)")
    p.add_argument("--smax", help="effort cap (rational, default 2*delta)")
    p.add_argument("--benefit", choices=sorted(BENEFITS))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netgood", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a topology as edge list, DOT and JSON")
    p.add_argument("preset", nargs="?", help="goyal-canonical (alias canonical), star:k, path:n, complete:n, tree:1,3,4")
    p.add_argument("--levels", help="comma-separated level degrees of a layered tree")
    p.add_argument("--depth", type=int)
    p.add_argument("--out", help="output path prefix")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="enumerate equilibria or run best-response dynamics")
    p.add_argument("graph")
    _game_flags(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--enumerate", action="store_true", help="exact enumeration (default)")
    mode.add_argument("--dynamics", action="store_true")
    p.add_argument("--schedule", default="round-robin", choices=["round-robin", "synchronous"])
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="is a profile an equilibrium, and degree-monotone?")
    p.add_argument("graph")
    p.add_argument("profile", help="file or inline list such as '0,1,0' or '1/2 1/2 0'")
    _game_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("prove", help="find a degree-monotone equilibrium or prove none exists")
    p.add_argument("graph")
    _game_flags(p)
    p.add_argument("--budget-nodes", type=int, default=DEFAULT_BUDGET_NODES)
    p.add_argument("--budget-secs", type=float, default=DEFAULT_BUDGET_SECS)
    p.add_argument("--out", help="certificate path (default: stdout)")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("replay", help="independently re-check a certificate")
    p.add_argument("graph")
    p.add_argument("certificate")
    _game_flags(p)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (NetgoodError, OSError) as exc:
        print(f"netgood: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
