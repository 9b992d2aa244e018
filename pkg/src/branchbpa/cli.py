"""Command-line interface.

Exit codes: 0 positive verdict, 1 negative, 2 undecided (cap hit),
64 usage error, 65 malformed input, 66 unreadable file.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .core import ParseError, compute_norms, format_process, parse_document, parse_process, silent_erasable, system_size
from .equivalence import CapExceeded, Mode, decide, interactive_game, lts_to_dot
from .oracles import Winner, eval_qsat, solve_hor
from .reductions import parse_hor, parse_qsat, reduce_hor, reduce_qsat
from .redundancy import branching_norm, build_rd_tree, format_set, norm_path, redundant_set
from .regularity import NotNormed, build_rd_graph, decide_regular, format_node, growing_nodes, rd_graph_to_dot

EXIT_OK, EXIT_NEG, EXIT_UNDECIDED = 0, 1, 2
EXIT_USAGE, EXIT_DATA, EXIT_NOINPUT = 64, 65, 66


class _Exit(Exception):
    def __init__(self, code: int, reason: str):
        self.code = code
        self.reason = reason


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"reason: usage: {message}")
        raise SystemExit(EXIT_USAGE)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _Exit(EXIT_NOINPUT, f"cannot read {path}: {exc.strerror}")


def _load(path: str):
    return parse_document(_read(path))


def _proc(system, text: str):
    return system.check_process(parse_process(text))


def _write_dot(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)
        print(f"dot written to {path}")


def _parse_set(text: str) -> frozenset[str]:
    return frozenset(t for t in text.replace("{", " ").replace("}", " ").replace(",", " ").split())


# ---------------------------------------------------------------------------
# verbs


def cmd_check(args) -> int:
    doc = _load(args.file)
    s = doc.system
    norms = compute_norms(s)
    nv, na, nr, total = system_size(s)
    print(f"variables: {nv}  labels: {na}  rule size: {nr}  size: {total}")
    print("silent-erasable: " + format_set(silent_erasable(s)))
    for x in s.variables:
        v = norms[x]
        print(f"norm {x} = {'inf' if v is None else v}")
    for key, value in doc.metadata.items():
        print(f"meta {key}: {value}")
    if not norms.all_normed:
        print("unnormed: " + " ".join(norms.unnormed))
        print("reason: system is not normed")
        return EXIT_NEG
    print("normed")
    return EXIT_OK


def cmd_bisim(args) -> int:
    s = _load(args.file).system
    p, q = _proc(s, args.left), _proc(s, args.right)
    v = decide(s, p, q, args.mode, args.cap)
    print(v.outcome.value)
    if v.undecided:
        print(f"reason: {v.cap_report}")
        return EXIT_UNDECIDED
    print(f"closure states: {len(v.partition.lts)}  blocks: {v.partition.num_blocks}")
    _write_dot(args.dot, lts_to_dot(v.partition.lts, v.partition) if args.dot else "")
    if v.equivalent:
        return EXIT_OK
    if args.strategy:
        print("attacker strategy:")
        for line in v.strategy.lines(1, args.depth):
            print(line)
    print(f"reason: {format_process(p)} and {format_process(q)} are not {args.mode} bisimilar")
    return EXIT_NEG


def cmd_rd(args) -> int:
    s = _load(args.file).system
    if args.tree:
        tree = build_rd_tree(s, args.suffix_cap)
        sys.stdout.write(tree.dump())
        print(f"realizable sets: {len(tree.realizable_sets)}")
        return EXIT_OK
    if args.process is None:
        raise _Exit(EXIT_USAGE, "usage: rd needs a process or --tree")
    p = _proc(s, args.process)
    print(format_set(redundant_set(s, p, args.suffix_cap)))
    return EXIT_OK


def cmd_bnorm(args) -> int:
    s = _load(args.file).system
    p = _proc(s, args.process)
    suffix = None
    if args.suffix is not None:
        suffix = _proc(s, args.suffix)
    elif args.suffix_set is not None:
        suffix = _parse_set(args.suffix_set)
    value = branching_norm(s, p, suffix, args.suffix_cap)
    if value is None:
        print("inf")
        print("reason: the suffix class is unreachable")
        return EXIT_NEG
    print(value)
    if args.path:
        for label, state, cost in norm_path(s, p, suffix, args.suffix_cap):
            print(f"  -{label}-> {format_process(state)}  cost {cost}")
    return EXIT_OK


def cmd_regular(args) -> int:
    s = _load(args.file).system
    p = _proc(s, args.process)
    v = decide_regular(s, p, args.suffix_cap)
    print(v.outcome)
    if v.outcome == "Undecided":
        print(f"reason: {v.reason}")
        return EXIT_UNDECIDED
    if v.outcome == "NotRegular":
        print(f"witness from position {v.witness.position}:")
        for line in v.witness.lines():
            print("  " + line)
        print("reason: a suffix reaches a cycle of positive weight")
        return EXIT_NEG
    return EXIT_OK


def cmd_rdgraph(args) -> int:
    s = _load(args.file).system
    g = build_rd_graph(s, args.suffix_cap)
    grow = growing_nodes(g)
    print(f"nodes: {len(g.nodes)}  edges: {len(g.edges)}  growing: {len(grow)}")
    if args.edges:
        for (u, v), (w, _, _) in sorted(g.edges.items(), key=lambda e: (g.order[e[0][0]], g.order[e[0][1]])):
            print(f"{format_node(u)} -{w}-> {format_node(v)}")
    for node in g.nodes:
        if node in grow:
            print(f"growing {format_node(node)}")
    _write_dot(args.dot, rd_graph_to_dot(g, grow) if args.dot else "")
    return EXIT_OK


def _reduce(kind: str, text: str):
    if kind == "hor":
        return reduce_hor(parse_hor(text))
    return reduce_qsat(parse_qsat(text))


def cmd_reduce(args) -> int:
    out = _reduce(args.kind, _read(args.file))
    text = out.to_text()
    if args.output:
        Path(args.output).write_text(text)
        print(f"written {args.output}: left {format_process(out.left)}, right {format_process(out.right)}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_solve(args) -> int:
    text = _read(args.file)
    if args.kind == "hor":
        w = solve_hor(parse_hor(text))
        print(w.value)
        if w is Winner.PLAYER0:
            return EXIT_OK
        print("reason: Player1 forces a wrong hit")
        return EXIT_NEG
    truth = eval_qsat(parse_qsat(text))
    print("true" if truth else "false")
    if truth:
        return EXIT_OK
    print("reason: formula is false")
    return EXIT_NEG


def _verify_one(kind: str, path: str, cap) -> tuple[int, list[str]]:
    text = _read(path)
    lines = []
    if kind == "hor":
        game = parse_hor(text)
        winner = solve_hor(game)
        out = reduce_hor(game)
        lines.append(f"oracle={winner.value}")
    else:
        f = parse_qsat(text)
        truth = eval_qsat(f)
        out = reduce_qsat(f)
        lines.append(f"oracle={'true' if truth else 'false'}")
    verdicts = {}
    for mode in (Mode.BRANCHING, Mode.WEAK):
        v = decide(out.system, out.left, out.right, mode, cap)
        verdicts[mode] = v
        lines.append(f"{mode.value}={v.outcome.value}")
    if any(v.undecided for v in verdicts.values()):
        return EXIT_UNDECIDED, lines + ["reason: closure cap reached"]
    b, w = verdicts[Mode.BRANCHING].equivalent, verdicts[Mode.WEAK].equivalent
    if kind == "hor":
        ok = (winner is Winner.PLAYER0) == b == w
        why = "oracle, branching and weak verdicts disagree"
    else:
        regs = [decide_regular(out.system, p).outcome for p in (out.left, out.right)]
        lines.append(f"regular={'/'.join(regs)}")
        ok = (b if truth else not w) and regs == ["Regular", "Regular"]
        why = "verdicts contradict the formula's truth value or regularity"
    if ok:
        return EXIT_OK, lines + ["verified"]
    return EXIT_NEG, lines + [f"reason: {why}"]


def cmd_verify(args) -> int:
    worst = EXIT_OK
    for path in args.files:
        code, lines = _verify_one(args.kind, path, args.cap)
        prefix = f"{path}: " if len(args.files) > 1 else ""
        for line in lines:
            print(prefix + line)
        if code == EXIT_NEG or (code == EXIT_UNDECIDED and worst == EXIT_OK):
            worst = code
    return worst


def cmd_game(args) -> int:
    s = _load(args.file).system
    p, q = _proc(s, args.left), _proc(s, args.right)
    read = input
    if args.script:
        answers = iter(_read(args.script).split())

        def read(prompt):
            try:
                ans = next(answers)
            except StopIteration:
                ans = "quit"
            print(prompt + ans)
            return ans

    transcript = interactive_game(s, p, q, args.mode, args.role, cap=args.cap, max_rounds=args.rounds, read=read)
    last = transcript[-1]
    if "defender wins" in last or ("quit" in last and args.role == "attacker"):
        return EXIT_OK
    if "attacker wins" in last:
        print("reason: defender is stuck")
        return EXIT_NEG
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="branchbpa", description="Branching bisimilarity and regularity for normed BPA.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def common(p, cap=True, suffix=False):
        if cap:
            p.add_argument("--cap", type=int, default=None,
                           help="closure state cap (default 200000 or $BPA_DEFAULT_CAP)")
        if suffix:
            p.add_argument("--suffix-cap", type=int, default=None,
                           help="state cap for redundant-set membership tests")

    p = sub.add_parser("check", help="parse a .bpa file and report norms")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bisim", help="decide branching or weak bisimilarity")
    p.add_argument("file")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="branching")
    p.add_argument("--strategy", action="store_true", help="print Attacker's winning strategy")
    p.add_argument("--depth", type=int, default=20, help="strategy print depth")
    p.add_argument("--dot", metavar="FILE", help="write the closure as DOT")
    common(p)
    p.set_defaults(func=cmd_bisim)

    p = sub.add_parser("rd", help="redundant set of a process, or the representative tree")
    p.add_argument("file")
    p.add_argument("process", nargs="?")
    p.add_argument("--tree", action="store_true")
    common(p, cap=False, suffix=True)
    p.set_defaults(func=cmd_rd)

    p = sub.add_parser("bnorm", help="(relative) branching norm")
    p.add_argument("file")
    p.add_argument("process")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--suffix", help="suffix process")
    g.add_argument("--suffix-set", help="realizable redundant set, e.g. '{Z1_1, Z2_0}'")
    p.add_argument("--path", action="store_true", help="print an optimal run")
    common(p, cap=False, suffix=True)
    p.set_defaults(func=cmd_bnorm)

    p = sub.add_parser("regular", help="decide branching regularity")
    p.add_argument("file")
    p.add_argument("process")
    common(p, cap=False, suffix=True)
    p.set_defaults(func=cmd_regular)

    p = sub.add_parser("rdgraph", help="build the weighted redundant-set graph")
    p.add_argument("file")
    p.add_argument("--edges", action="store_true", help="list every edge")
    p.add_argument("--dot", metavar="FILE")
    common(p, cap=False, suffix=True)
    p.set_defaults(func=cmd_rdgraph)

    p = sub.add_parser("reduce", help="encode a game or formula as a BPA pair")
    p.add_argument("kind", choices=["hor", "qsat"])
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("solve", help="brute-force oracle")
    p.add_argument("kind", choices=["hor", "qsat"])
    p.add_argument("file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check oracle and reduction verdicts agree")
    p.add_argument("kind", choices=["hor", "qsat"])
    p.add_argument("files", nargs="+")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("game", help="play the bisimulation game in the terminal")
    p.add_argument("file")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="branching")
    p.add_argument("--role", choices=["attacker", "defender"], default="attacker")
    p.add_argument("--script", metavar="FILE", help="read answers from FILE instead of stdin")
    p.add_argument("--rounds", type=int, default=100)
    common(p)
    p.set_defaults(func=cmd_game)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as exc:
        print(f"reason: {exc.reason}")
        return exc.code
    except ParseError as exc:
        print(f"reason: parse error: {exc}")
        return EXIT_DATA
    except NotNormed as exc:
        print(f"reason: {exc}")
        return EXIT_DATA
    except CapExceeded as exc:
        print("Undecided")
        print(f"reason: {exc}")
        return EXIT_UNDECIDED
    except ValueError as exc:
        print(f"reason: invalid input: {exc}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
