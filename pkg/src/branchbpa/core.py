"""BPA systems: syntax, the ``.bpa`` text format, transitions and norms.

A process is a plain tuple of variable names, leftmost variable first; the
empty tuple is the nil process.  Only the leftmost variable is active.
"""
from __future__ import annotations

import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field

TAU = "tau"

Process = tuple[str, ...]
EPSILON: Process = ()

_IDENT = r"[A-Za-z_][A-Za-z0-9_']*"
_IDENT_RE = re.compile(_IDENT)
_RULE_RE = re.compile(rf"^({_IDENT})\s+-(\S+?)->(.*)$")


class ParseError(ValueError):
    """Malformed input.  ``line`` and ``column`` are 1-based (0 if unknown)."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        self.message = message
        where = f"{line}:{column}: " if line else ""
        super().__init__(where + message)


class BpaSyntaxError(ParseError):
    pass


class UndeclaredVariable(ParseError):
    pass


class UndeclaredLabel(ParseError):
    pass


class DuplicateDeclaration(ParseError):
    pass


@dataclass(frozen=True, order=True)
class Label:
    name: str
    silent: bool = False


@dataclass(frozen=True)
class Rule:
    head: str
    label: str
    body: Process

    @property
    def silent(self) -> bool:
        return self.label == TAU

    def __str__(self) -> str:
        rhs = " ".join(self.body)
        return f"{self.head} -{self.label}->" + (f" {rhs}" if rhs else "")


class BpaSystem:
    """A BPA system (V, A, R).

    Variables and labels are kept sorted so every derived computation has a
    fixed iteration order.  ``tau`` is always present as the silent label.
    Rules keep their input order.
    """

    def __init__(self, variables: Iterable[str], labels: Iterable[str], rules: Iterable[Rule]):
        variables = list(variables)
        if len(set(variables)) != len(variables):
            raise DuplicateDeclaration("duplicate variable")
        if TAU in variables:
            raise DuplicateDeclaration("'tau' is reserved and cannot name a variable")
        names = set(labels) | {TAU}
        self.variables: tuple[str, ...] = tuple(sorted(variables))
        self.labels: tuple[Label, ...] = tuple(
            sorted(Label(n, n == TAU) for n in names)
        )
        self.rules: tuple[Rule, ...] = tuple(rules)
        declared = set(self.variables)
        for r in self.rules:
            if r.head not in declared:
                raise UndeclaredVariable(f"rule head {r.head!r} is not declared")
            for y in r.body:
                if y not in declared:
                    raise UndeclaredVariable(f"variable {y!r} in rule {r} is not declared")
            if r.label not in names:
                raise UndeclaredLabel(f"label {r.label!r} in rule {r} is not declared")
        by_head: dict[str, list[Rule]] = {x: [] for x in self.variables}
        for r in self.rules:
            by_head[r.head].append(r)
        self.rules_by_head: dict[str, tuple[Rule, ...]] = {x: tuple(v) for x, v in by_head.items()}
        # per-system memo tables (redundancy module); not part of equality
        self._memo: dict = {}

    @property
    def label_names(self) -> tuple[str, ...]:
        return tuple(l.name for l in self.labels)

    @property
    def visible_labels(self) -> tuple[str, ...]:
        return tuple(l.name for l in self.labels if not l.silent)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BpaSystem):
            return NotImplemented
        return (self.variables, self.labels, self.rules) == (other.variables, other.labels, other.rules)

    def __hash__(self) -> int:
        return hash((self.variables, self.labels, self.rules))

    def __repr__(self) -> str:
        return f"BpaSystem({len(self.variables)} vars, {len(self.labels)} labels, {len(self.rules)} rules)"

    def check_process(self, p: Iterable[str]) -> Process:
        p = tuple(p)
        for x in p:
            if x not in self.rules_by_head:
                raise UndeclaredVariable(f"variable {x!r} is not declared")
        return p


# ---------------------------------------------------------------------------
# text format


@dataclass
class Document:
    system: BpaSystem
    metadata: dict[str, str] = field(default_factory=dict)


def parse_process(text: str | Iterable[str]) -> Process:
    """``"X Y Z"`` -> ``("X", "Y", "Z")``; ``""`` or ``"eps"`` is the nil process."""
    if not isinstance(text, str):
        return tuple(text)
    words = text.split()
    if words in (["eps"], ["ε"]):
        return EPSILON
    for w in words:
        if not _IDENT_RE.fullmatch(w):
            raise BpaSyntaxError(f"bad variable name {w!r}")
    return tuple(words)


def format_process(p: Iterable[str]) -> str:
    p = tuple(p)
    return " ".join(p) if p else "eps"


def parse_document(text: str) -> Document:
    vars_: list[tuple[str, int, int]] = []
    acts: list[tuple[str, int, int]] = []
    raw_rules: list[tuple[str, str, list[str], int, int, int]] = []
    metadata: dict[str, str] = {}
    seen_headers: set[str] = set()

    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.lstrip().startswith("#@"):
            key, _, value = line.lstrip()[2:].partition(":")
            metadata[key.strip()] = value.strip()
            continue
        code = line.split("#", 1)[0]
        stripped = code.strip()
        if not stripped:
            continue
        col0 = len(code) - len(code.lstrip()) + 1
        for header, target in (("vars:", vars_), ("acts:", acts)):
            if stripped.startswith(header):
                if header in seen_headers:
                    raise DuplicateDeclaration(f"second {header!r} header", lineno, col0)
                seen_headers.add(header)
                offset = code.index(header) + len(header)
                for m in re.finditer(r"\S+", code[offset:]):
                    tok = m.group(0)
                    col = offset + m.start() + 1
                    if not _IDENT_RE.fullmatch(tok):
                        raise BpaSyntaxError(f"bad identifier {tok!r}", lineno, col)
                    target.append((tok, lineno, col))
                break
        else:
            m = _RULE_RE.match(stripped)
            if not m:
                raise BpaSyntaxError("expected 'vars:', 'acts:' or a rule 'X -a-> Y Z'", lineno, col0)
            head, label, rhs = m.group(1), m.group(2), m.group(3).split()
            if not _IDENT_RE.fullmatch(label):
                raise BpaSyntaxError(f"bad label {label!r}", lineno, col0 + len(head) + 2)
            for tok in rhs:
                if not _IDENT_RE.fullmatch(tok):
                    raise BpaSyntaxError(f"bad variable {tok!r}", lineno, col0 + stripped.index(tok))
            raw_rules.append((head, label, rhs, lineno, col0, len(head)))

    declared_vars: dict[str, tuple[int, int]] = {}
    for name, ln, col in vars_:
        if name in declared_vars or name == TAU:
            raise DuplicateDeclaration(f"variable {name!r} declared twice or reserved", ln, col)
        declared_vars[name] = (ln, col)
    declared_acts: dict[str, tuple[int, int]] = {}
    for name, ln, col in acts:
        if name in declared_acts:
            raise DuplicateDeclaration(f"action {name!r} declared twice", ln, col)
        declared_acts[name] = (ln, col)

    rules = []
    for head, label, rhs, ln, col, hlen in raw_rules:
        if head not in declared_vars:
            raise UndeclaredVariable(f"variable {head!r} is not declared", ln, col)
        if label != TAU and label not in declared_acts:
            raise UndeclaredLabel(f"action {label!r} is not declared", ln, col + hlen + 2)
        for y in rhs:
            if y not in declared_vars:
                line = text.splitlines()[ln - 1]
                pos = line.index("->") + 2
                pos = line.index(y, pos) + 1
                raise UndeclaredVariable(f"variable {y!r} is not declared", ln, pos)
        rules.append(Rule(head, label, tuple(rhs)))

    return Document(BpaSystem(declared_vars, declared_acts, rules), metadata)


def parse_system(text: str) -> BpaSystem:
    return parse_document(text).system


def print_system(system: BpaSystem, metadata: Mapping[str, str] | None = None) -> str:
    lines = []
    for key, value in (metadata or {}).items():
        lines.append(f"#@ {key}: {value}")
    lines.append("vars: " + " ".join(system.variables))
    lines.append("acts: " + " ".join(system.visible_labels))
    lines.extend(str(r) for r in system.rules)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# semantics


def successors(system: BpaSystem, p: Process) -> list[tuple[str, Process]]:
    """One-step transitions of ``p`` in rule order."""
    if not p:
        return []
    rest = p[1:]
    return [(r.label, r.body + rest) for r in system.rules_by_head[p[0]]]


class NormTable(Mapping):
    """Variable -> norm; ``None`` marks an unnormed variable."""

    def __init__(self, norms: dict[str, int | None]):
        self._norms = norms

    def __getitem__(self, x: str) -> int | None:
        return self._norms[x]

    def __iter__(self) -> Iterator[str]:
        return iter(self._norms)

    def __len__(self) -> int:
        return len(self._norms)

    def is_normed(self, x: str) -> bool:
        return self._norms[x] is not None

    @property
    def all_normed(self) -> bool:
        return all(v is not None for v in self._norms.values())

    @property
    def unnormed(self) -> list[str]:
        return [x for x, v in self._norms.items() if v is None]

    def of(self, p: Iterable[str]) -> int | None:
        total = 0
        for x in p:
            v = self._norms[x]
            if v is None:
                return None
            total += v
        return total


def compute_norms(system: BpaSystem) -> NormTable:
    cached = system._memo.get("norms")
    if cached is not None:
        return cached
    norms: dict[str, int | None] = {x: None for x in system.variables}
    changed = True
    while changed:
        changed = False
        for r in system.rules:
            total = 1
            for y in r.body:
                v = norms[y]
                if v is None:
                    break
                total += v
            else:
                cur = norms[r.head]
                if cur is None or total < cur:
                    norms[r.head] = total
                    changed = True
    table = NormTable(norms)
    system._memo["norms"] = table
    return table


def erasing_trace(system: BpaSystem, p: Process) -> list[tuple[str, Process]]:
    """A shortest transition sequence from ``p`` down to the nil process."""
    norms = compute_norms(system)
    if norms.of(p) is None:
        raise ValueError(f"process {format_process(p)} is not normed")
    trace = []
    while p:
        head = p[0]
        want = norms[head] - 1
        for r in system.rules_by_head[head]:
            if norms.of(r.body) == want:
                p = r.body + p[1:]
                trace.append((r.label, p))
                break
    return trace


def silent_erasable(system: BpaSystem) -> frozenset[str]:
    """Variables that can reach the nil process by silent steps alone."""
    cached = system._memo.get("v0")
    if cached is not None:
        return cached
    v0: set[str] = set()
    changed = True
    while changed:
        changed = False
        for r in system.rules:
            if r.silent and r.head not in v0 and all(y in v0 for y in r.body):
                v0.add(r.head)
                changed = True
    result = frozenset(v0)
    system._memo["v0"] = result
    return result


def system_size(system: BpaSystem) -> tuple[int, int, int, int]:
    """``(|V|, |A|, sum of rule sizes, total)``; a rule ``X -l-> w`` has size ``|w| + 2``."""
    nv = len(system.variables)
    na = len(system.labels)
    nr = sum(len(r.body) + 2 for r in system.rules)
    return nv, na, nr, nv + na + nr
