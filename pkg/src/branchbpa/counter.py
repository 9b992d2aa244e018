"""The binary-counter system, bit-word encodings and the Add gadget.

Bit ``i`` (1-based, least significant first) with value ``b`` is carried by
``B<i>_<b>``; ``Z<i>_<b>`` is its silent tester.  Flat names:

    B<i>_<b>            Z<i>_<b>            B<i>_<b>__<j>_<b'>
    a<i>_<b>  d         (actions)
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import TAU, BpaSystem, Process, Rule


class IndexOutOfRange(ValueError):
    pass


class NotAnEncoding(ValueError):
    def __init__(self, missing: list[int]):
        self.missing = missing
        super().__init__("not an encoding; missing bit indices " + ", ".join(map(str, missing)))


def b_var(i: int, b: int) -> str:
    return f"B{i}_{b}"


def z_var(i: int, b: int) -> str:
    return f"Z{i}_{b}"


def bj_var(i: int, b: int, j: int, b2: int) -> str:
    return f"B{i}_{b}__{j}_{b2}"


def bit_action(i: int, b: int) -> str:
    return f"a{i}_{b}"


def parse_b_var(name: str) -> tuple[int, int] | None:
    """``"B3_1"`` -> ``(3, 1)``; ``None`` for anything else."""
    if not name.startswith("B") or "__" in name:
        return None
    idx, _, bit = name[1:].partition("_")
    if idx.isdigit() and bit in ("0", "1"):
        return int(idx), int(bit)
    return None


@dataclass(frozen=True)
class BitWord:
    """Bits ``b_n ... b_1`` stored in that (printing) order."""

    bits: tuple[int, ...]

    @classmethod
    def parse(cls, text: str) -> "BitWord":
        if not text or any(c not in "01" for c in text):
            raise ValueError(f"bad bit word {text!r}")
        return cls(tuple(int(c) for c in text))

    @classmethod
    def from_value(cls, value: int, n: int) -> "BitWord":
        if not 0 <= value < 2**n:
            raise IndexOutOfRange(f"value {value} does not fit in {n} bits")
        return cls(tuple((value >> (i - 1)) & 1 for i in range(n, 0, -1)))

    @property
    def n(self) -> int:
        return len(self.bits)

    def bit(self, i: int) -> int:
        """``b_i`` for ``1 <= i <= n``."""
        return self.bits[self.n - i]

    @property
    def value(self) -> int:
        return sum(self.bit(i) << (i - 1) for i in range(1, self.n + 1))

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


def gen_counter(n: int) -> BpaSystem:
    if n < 1:
        raise ValueError("bit width must be positive")
    idx = range(1, n + 1)
    bits = (0, 1)
    variables = [b_var(i, b) for i in idx for b in bits] + [z_var(i, b) for i in idx for b in bits]
    variables += [bj_var(i, b, j, b2) for i in idx for b in bits for j in idx if j != i for b2 in bits]
    labels = ["d"] + [bit_action(i, b) for i in idx for b in bits]
    rules = []
    for i in idx:
        for b in bits:
            rules.append(Rule(z_var(i, b), bit_action(i, b), ()))
            rules.append(Rule(z_var(i, b), TAU, ()))
    for i in idx:
        for b in bits:
            x = b_var(i, b)
            rules.append(Rule(x, bit_action(i, b), (x,)))
            rules.append(Rule(x, "d", ()))
            for j in idx:
                if j != i:
                    for b2 in bits:
                        rules.append(Rule(x, bit_action(j, b2), (bj_var(i, b, j, b2),)))
    for i in idx:
        for b in bits:
            for j in idx:
                if j == i:
                    continue
                for b2 in bits:
                    x = bj_var(i, b, j, b2)
                    rules.append(Rule(x, bit_action(i, b), (x,)))
                    rules.append(Rule(x, "d", (z_var(j, b2),)))
                    for j2 in idx:
                        if j2 != i:
                            for b3 in bits:
                                rules.append(Rule(x, bit_action(j2, b3), (bj_var(i, b, j2, b3),)))
    return BpaSystem(variables, labels, rules)


def _first_bits(alpha: Process) -> dict[int, int] | None:
    first: dict[int, int] = {}
    for x in alpha:
        parsed = parse_b_var(x)
        if parsed is None:
            return None
        first.setdefault(*parsed)
    return first


def validate_encoding(alpha: Process, w: BitWord) -> bool:
    first = _first_bits(tuple(alpha))
    if first is None:
        return False
    return all(first.get(i) == w.bit(i) for i in range(1, w.n + 1))


def encoding_value(alpha: Process, n: int) -> tuple[BitWord, int]:
    first = _first_bits(tuple(alpha))
    if first is None:
        raise ValueError("process mentions variables outside the bit carriers")
    missing = [i for i in range(1, n + 1) if i not in first]
    if missing:
        raise NotAnEncoding(missing)
    w = BitWord(tuple(first[i] for i in range(n, 0, -1)))
    return w, w.value


def canonical_encoding(w: BitWord) -> Process:
    return tuple(b_var(i, w.bit(i)) for i in range(w.n, 0, -1))


def _check_ki(k: int, i: int, n: int) -> None:
    if not 0 <= k < n:
        raise IndexOutOfRange(f"k={k} not in 0..{n - 1}")
    if not 0 <= i <= n - k:
        raise IndexOutOfRange(f"i={i} not in 0..{n - k}")


def gamma_word(k: int, i: int, n: int) -> Process:
    _check_ki(k, i, n)
    if i == n - k:
        return tuple(z_var(j, 1) for j in range(n, k, -1))
    return (z_var(k + i + 1, 0),) + tuple(z_var(j, 1) for j in range(k + i, k, -1))


def delta_word(k: int, i: int, n: int) -> Process:
    _check_ki(k, i, n)
    if i == n - k:
        return tuple(b_var(j, 0) for j in range(n, k, -1))
    return (b_var(k + i + 1, 1),) + tuple(b_var(j, 0) for j in range(k + i, k, -1))


def i_star(k: int, w: BitWord) -> int:
    if not 0 <= k < w.n:
        raise IndexOutOfRange(f"k={k} not in 0..{w.n - 1}")
    run = 0
    for j in range(k + 1, w.n + 1):
        if w.bit(j) != 1:
            break
        run += 1
    return run


@dataclass(frozen=True)
class AddTuple:
    """Increment-by-``2**k`` gadget parameters; ``tag`` keeps instances apart."""

    k: int
    N: Process
    Np: Process
    O: Process
    Op: Process
    tag: str = ""


@dataclass
class Fragment:
    variables: list[str]
    labels: list[str]
    rules: list[Rule]


def add_names(tag: str, n: int, k: int) -> dict[str, str]:
    p = f"ADD{tag}_"
    names = {"A": p + "A", "Ap": p + "Ap", "D": p + "D"}
    for i in range(n - k + 1):
        names[f"D{i}"] = f"{p}D{i}"
        names[f"C{i}"] = f"{p}C{i}"
        names[f"Cp{i}"] = f"{p}Cp{i}"
    return names


def gen_add(p: AddTuple, n: int) -> Fragment:
    k = p.k
    if not 0 <= k < n:
        raise IndexOutOfRange(f"k={k} not in 0..{n - 1}")
    nm = add_names(p.tag, n, k)
    top = n - k
    idx = range(top + 1)
    A, Ap, D = nm["A"], nm["Ap"], nm["D"]
    rules = [Rule(A, "c", (D,))]
    rules += [Rule(A, "c", (nm[f"D{i}"],)) for i in idx]
    rules += [Rule(Ap, "c", (nm[f"D{i}"],)) for i in idx]
    rules += [Rule(D, "c", (nm[f"C{i}"],)) for i in idx]
    for i in idx:
        rules.append(Rule(nm[f"D{i}"], "c", (nm[f"Cp{i}"],)))
        rules += [Rule(nm[f"D{i}"], "c", (nm[f"C{j}"],)) for j in idx if j != i]
    for i in idx:
        rules.append(Rule(nm[f"C{i}"], "c", gamma_word(k, i, n)))
        rules.append(Rule(nm[f"Cp{i}"], "c", ()))
    for i in range(top):
        rules.append(Rule(nm[f"C{i}"], "e", tuple(p.N) + delta_word(k, i, n)))
        rules.append(Rule(nm[f"Cp{i}"], "e", tuple(p.Np) + delta_word(k, i, n)))
    rules.append(Rule(nm[f"C{top}"], "e", tuple(p.O)))
    rules.append(Rule(nm[f"Cp{top}"], "e", tuple(p.Op)))
    return Fragment(list(nm.values()), ["c", "e"], rules)
