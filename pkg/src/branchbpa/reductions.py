"""Hit-or-Run games and QSAT formulas, and their encodings as BPA pairs.

``.hor`` format::

    states0: s t        # Player 0 (Defender side)
    states1: u          # Player 1 (Attacker side)
    init: s
    final-value: 5
    s -1-> t            # labels are 0 or powers of two; `final` is the goal state

``.qsat`` format (prefix forall x1 exists y1 ... forall xm exists ym)::

    m: 2
    clauses:
    x1 -y1 y2           # one clause per line, `-` negates
    ()                  # the empty clause
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .core import BpaSystem, ParseError, Process, Rule, format_process, print_system
from .counter import (AddTuple, BitWord, add_names, b_var, gen_add, gen_counter, z_var)

FINAL = "final"
_STATE_RE = re.compile(r"[A-Za-z][A-Za-z0-9]*")


class InputSyntaxError(ParseError):
    pass


class NotPowerOfTwo(ParseError):
    pass


class MissingOutgoingRule(ParseError):
    pass


class UnknownState(ParseError):
    pass


class IndexOutOfRange(ParseError):
    pass


class EmptyClauseList(ParseError):
    pass


@dataclass
class ReductionOutput:
    system: BpaSystem
    left: Process
    right: Process
    metadata: dict[str, str] = field(default_factory=dict)

    def to_text(self) -> str:
        return print_system(self.system, self.metadata)


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


# ---------------------------------------------------------------------------
# Hit-or-Run


@dataclass(frozen=True)
class HorGame:
    states0: tuple[str, ...]
    states1: tuple[str, ...]
    transitions: tuple[tuple[str, int, str], ...]
    init: str
    final_value: int

    @property
    def states(self) -> tuple[str, ...]:
        return self.states0 + self.states1

    @property
    def n(self) -> int:
        return max(self.final_value, 1).bit_length()

    def op(self, s: str) -> list[tuple[int, str]]:
        return list(dict.fromkeys((l, t) for src, l, t in self.transitions if src == s))

    @property
    def all_ops(self) -> list[tuple[int, str]]:
        return list(dict.fromkeys((l, t) for _, l, t in self.transitions))

    def owner(self, s: str) -> int:
        return 0 if s in self.states0 else 1


def _is_label(value: int) -> bool:
    return value == 0 or value & (value - 1) == 0


def parse_hor(text: str) -> HorGame:
    headers: dict[str, tuple[list[str], int]] = {}
    trans: list[tuple[str, int, str, int]] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        m = re.fullmatch(r"(states0|states1|init|final-value):(.*)", line)
        if m:
            if m.group(1) in headers:
                raise InputSyntaxError(f"duplicate {m.group(1)!r} header", ln, 1)
            headers[m.group(1)] = (m.group(2).split(), ln)
            continue
        m = re.fullmatch(r"(\S+)\s+-(\S+?)->\s*(\S+)", line)
        if not m:
            raise InputSyntaxError("expected a header or a transition 's -l-> t'", ln, 1)
        src, lab, dst = m.groups()
        if not lab.isdigit():
            raise InputSyntaxError(f"label {lab!r} is not a nonnegative integer", ln, 1)
        if not _is_label(int(lab)):
            raise NotPowerOfTwo(f"label {lab} is neither 0 nor a power of two", ln, 1)
        trans.append((src, int(lab), dst, ln))
    for key in ("init", "final-value"):
        if key not in headers or len(headers[key][0]) != 1:
            raise InputSyntaxError(f"missing or malformed {key!r} header")
    s0 = headers.get("states0", ([], 0))[0]
    s1 = headers.get("states1", ([], 0))[0]
    seen: set[str] = set()
    for s in s0 + s1:
        if not _STATE_RE.fullmatch(s) or s == FINAL:
            raise InputSyntaxError(f"bad state name {s!r} (letters and digits, not 'final')")
        if s in seen:
            raise InputSyntaxError(f"state {s!r} declared twice")
        seen.add(s)
    init, ln = headers["init"][0][0], headers["init"][1]
    if init not in seen:
        raise UnknownState(f"initial state {init!r} is not declared", ln, 1)
    kf = headers["final-value"][0][0]
    if not kf.isdigit():
        raise InputSyntaxError("final-value must be a nonnegative integer", headers["final-value"][1], 1)
    for src, _, dst, ln in trans:
        if src not in seen:
            raise UnknownState(f"state {src!r} is not declared", ln, 1)
        if dst != FINAL and dst not in seen:
            raise UnknownState(f"state {dst!r} is not declared", ln, 1)
    sources = {t[0] for t in trans}
    for s in s0 + s1:
        if s not in sources:
            raise MissingOutgoingRule(f"state {s!r} has no outgoing transition")
    return HorGame(tuple(s0), tuple(s1), tuple((a, l, b) for a, l, b, _ in trans), init, int(kf))


def format_hor(game: HorGame) -> str:
    lines = [
        "states0: " + " ".join(game.states0),
        "states1: " + " ".join(game.states1),
        f"init: {game.init}",
        f"final-value: {game.final_value}",
    ]
    lines += [f"{s} -{l}-> {t}" for s, l, t in game.transitions]
    return "\n".join(lines) + "\n"


def _op_name(l: int, t: str) -> str:
    return f"{l}_{t}"


class _Builder:
    def __init__(self):
        self.variables: dict[str, None] = {}
        self.labels: dict[str, None] = {}
        self.rules: list[Rule] = []

    def var(self, *names: str) -> None:
        for x in names:
            self.variables.setdefault(x)

    def rule(self, head: str, label: str, body) -> None:
        self.labels.setdefault(label)
        self.rules.append(Rule(head, label, tuple(body)))

    def include(self, system: BpaSystem) -> None:
        self.var(*system.variables)
        for l in system.visible_labels:
            self.labels.setdefault(l)
        self.rules.extend(system.rules)

    def build(self) -> BpaSystem:
        return BpaSystem(self.variables, self.labels, self.rules)


def reduce_hor(game: HorGame) -> ReductionOutput:
    n = game.n
    bld = _Builder()
    bld.include(gen_counter(n))
    X = {s: f"X_{s}" for s in game.states + (FINAL,)}
    Xp = {s: f"Xp_{s}" for s in X}
    Y = {s: f"Y_{s}" for s in X}
    Yp = {s: f"Yp_{s}" for s in X}
    for s in X:
        bld.var(X[s], Xp[s], Y[s], Yp[s])

    def act(l, t):
        return f"a__{_op_name(l, t)}"

    A = {op: f"A_{_op_name(*op)}" for op in game.all_ops}
    Ap = {op: f"Ap_{_op_name(*op)}" for op in game.all_ops}

    # Add gadgets, one per distinct (2^k, t) with k < n
    adds: dict[tuple[int, str], dict[str, str]] = {}
    for l, t in game.all_ops:
        if 0 < l < 2**n:
            k = l.bit_length() - 1
            tag = f"{k}_{t}"
            frag = gen_add(AddTuple(k, (X[t],), (Xp[t],), (Y[t],), (Yp[t],), tag), n)
            bld.var(*frag.variables)
            for r in frag.rules:
                bld.rule(r.head, r.label, r.body)
            adds[(l, t)] = add_names(tag, n, k)

    for op in game.all_ops:
        l, t = op
        bld.var(A[op], Ap[op])
        if l == 0:
            bld.rule(A[op], "g", (X[t],))
            bld.rule(Ap[op], "g", (Xp[t],))
        elif l >= 2**n:
            bld.rule(A[op], "g", (Y[t],))
            bld.rule(Ap[op], "g", (Yp[t],))
        else:
            bld.rule(A[op], "g", (adds[op]["A"],))
            bld.rule(Ap[op], "g", (adds[op]["Ap"],))

    for s in game.states:
        ops = game.op(s)
        if game.owner(s) == 0:
            E, F = f"E_{s}", f"F_{s}"
            Es = {op: f"E_{s}__{_op_name(*op)}" for op in ops}
            Fs = {op: f"F_{s}__{_op_name(*op)}" for op in ops}
            bld.var(E, F, *Es.values(), *Fs.values())
            # (a1)
            bld.rule(X[s], "c", (E,))
            for op in ops:
                bld.rule(X[s], "c", (Es[op],))
            for op in ops:
                bld.rule(Xp[s], "c", (Es[op],))
            # (a2)
            for op in ops:
                bld.rule(E, act(*op), (A[op],))
            for op in ops:
                bld.rule(Es[op], act(*op), (Ap[op],))
                for other in ops:
                    if other != op:
                        bld.rule(Es[op], act(*other), (A[other],))
            # (a3)
            bld.rule(Y[s], "c", (F,))
            for op in ops:
                bld.rule(Y[s], "c", (Fs[op],))
            for op in ops:
                bld.rule(Yp[s], "c", (Fs[op],))
            # (a4)
            for op in ops:
                bld.rule(F, act(*op), (Y[op[1]],))
            for op in ops:
                bld.rule(Fs[op], act(*op), (Yp[op[1]],))
                for other in ops:
                    if other != op:
                        bld.rule(Fs[op], act(*other), (Y[other[1]],))
        else:
            # (b1), (b2)
            for op in ops:
                bld.rule(X[s], act(*op), (A[op],))
                bld.rule(Xp[s], act(*op), (Ap[op],))
            for op in ops:
                bld.rule(Y[s], act(*op), (Y[op[1]],))
                bld.rule(Yp[s], act(*op), (Yp[op[1]],))

    w = BitWord.from_value(game.final_value, n)
    # (c), (d)
    bld.rule(X[FINAL], "f", tuple(z_var(i, w.bit(i)) for i in range(n, 0, -1)))
    bld.rule(Xp[FINAL], "f", ())
    bld.rule(Y[FINAL], "f", ())
    bld.rule(Yp[FINAL], "fp", ())

    system = bld.build()
    zero = tuple(b_var(i, 0) for i in range(n, 0, -1))
    left = (X[game.init],) + zero
    right = (Xp[game.init],) + zero
    meta = {
        "reduction": "hit-or-run",
        "n": str(n),
        "left": format_process(left),
        "right": format_process(right),
        "names": "X_s/Xp_s/Y_s/Yp_s control of state s; A_l_t/Ap_l_t move (l,t); "
                 "E_s, F_s forcing gadgets; ADDk_t_* increment by 2^k into t; B/Z counter bits",
    }
    return ReductionOutput(system, left, right, meta)


# ---------------------------------------------------------------------------
# QSAT

Literal = tuple[str, int, bool]  # (kind 'x'|'y', index, positive)


@dataclass(frozen=True)
class QsatFormula:
    m: int
    clauses: tuple[frozenset, ...]

    @property
    def n(self) -> int:
        return len(self.clauses)


def _format_literal(lit: Literal) -> str:
    kind, i, pos = lit
    return ("" if pos else "-") + f"{kind}{i}"


def format_qsat(f: QsatFormula) -> str:
    lines = [f"m: {f.m}", "clauses:"]
    for c in f.clauses:
        lits = sorted(c, key=lambda l: (l[1], l[0], not l[2]))
        lines.append(" ".join(map(_format_literal, lits)) if lits else "()")
    return "\n".join(lines) + "\n"


def parse_qsat(text: str) -> QsatFormula:
    m = None
    clauses: list[frozenset] = []
    in_clauses = False
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if not in_clauses:
            hm = re.fullmatch(r"m:\s*(\d+)", line)
            if hm and m is None:
                m = int(hm.group(1))
                if m < 1:
                    raise InputSyntaxError("m must be positive", ln, 1)
                continue
            if line == "clauses:" and m is not None:
                in_clauses = True
                continue
            raise InputSyntaxError("expected 'm: <int>' then 'clauses:'", ln, 1)
        if line == "()":
            clauses.append(frozenset())
            continue
        lits = set()
        for tok in line.split():
            lm = re.fullmatch(r"(-?)([xy])(\d+)", tok)
            if not lm:
                raise InputSyntaxError(f"bad literal {tok!r}", ln, raw.index(tok) + 1)
            i = int(lm.group(3))
            if not 1 <= i <= m:
                raise IndexOutOfRange(f"literal {tok!r} outside 1..{m}", ln, raw.index(tok) + 1)
            lits.add((lm.group(2), i, lm.group(1) == ""))
        clauses.append(frozenset(lits))
    if m is None or not in_clauses:
        raise InputSyntaxError("missing 'm:' or 'clauses:' header")
    if not clauses:
        raise EmptyClauseList("formula has no clauses")
    return QsatFormula(m, tuple(clauses))


def clause_vector(f: QsatFormula, i: int, b: int, kind: str) -> Process:
    """``B<c>_1`` for every clause ``c`` (ascending) containing the literal."""
    if not 1 <= i <= f.m:
        raise ValueError(f"index {i} outside 1..{f.m}")
    if kind not in ("x", "y"):
        raise ValueError("kind must be 'x' or 'y'")
    lit = (kind, i, b == 1)
    return tuple(b_var(c, 1) for c, clause in enumerate(f.clauses, start=1) if lit in clause)


def assignment_process(f: QsatFormula, assignment: dict[str, int]) -> Process:
    out: Process = ()
    for i in range(f.m, 0, -1):
        out += clause_vector(f, i, assignment[f"y{i}"], "y") + clause_vector(f, i, assignment[f"x{i}"], "x")
    return out


def reduce_qsat(f: QsatFormula) -> ReductionOutput:
    n, m = f.n, f.m
    bld = _Builder()
    bld.include(gen_counter(n))
    for i in range(1, m + 2):
        bld.var(f"X{i}", f"Xp{i}")
    for i in range(1, m + 1):
        bld.var(f"Y{i}", f"Yp{i}", f"Y{i}_1", f"Y{i}_2", f"Y{i}_3")
    for i in range(1, m + 1):
        a0, a1 = clause_vector(f, i, 0, "x"), clause_vector(f, i, 1, "x")
        b0, b1 = clause_vector(f, i, 0, "y"), clause_vector(f, i, 1, "y")
        Xi, Xpi, Yi, Ypi = f"X{i}", f"Xp{i}", f"Y{i}", f"Yp{i}"
        Xn, Xpn = f"X{i + 1}", f"Xp{i + 1}"
        bld.rule(Xi, "c0", (Yi,) + a0)
        bld.rule(Xi, "c1", (Yi,) + a1)
        bld.rule(Xpi, "c0", (Ypi,) + a0)
        bld.rule(Xpi, "c1", (Ypi,) + a1)
        for j in (1, 2, 3):
            bld.rule(Yi, "e", (f"Y{i}_{j}",))
        for j in (2, 3):
            bld.rule(Ypi, "e", (f"Y{i}_{j}",))
        bld.rule(f"Y{i}_1", "c0", (Xn,) + b0)
        bld.rule(f"Y{i}_1", "c1", (Xn,) + b1)
        bld.rule(f"Y{i}_2", "c0", (Xpn,) + b0)
        bld.rule(f"Y{i}_2", "c1", (Xn,) + b1)
        bld.rule(f"Y{i}_3", "c0", (Xn,) + b0)
        bld.rule(f"Y{i}_3", "c1", (Xpn,) + b1)
    bld.rule(f"X{m + 1}", "e", tuple(z_var(j, 1) for j in range(1, n + 1)))
    bld.rule(f"Xp{m + 1}", "e", ())
    system = bld.build()
    meta = {
        "reduction": "qsat",
        "n": str(n),
        "left": "X1",
        "right": "Xp1",
        "names": "Xi/Xpi round i; Yi/Ypi/Yi_j choice gadget for yi; B<c>_1 clause c satisfied",
    }
    return ReductionOutput(system, ("X1",), ("Xp1",), meta)
