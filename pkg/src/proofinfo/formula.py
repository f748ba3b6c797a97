"""DeMorgan formulas: construction, text grammar, canonical bit encoding, semantics.

Text grammar (infix, ASCII)::

    formula := imp
    imp     := disj [ "->" imp ]            (right associative, sugar for ~a | b)
    disj    := conj { "|" conj }
    conj    := unary { "&" unary }
    unary   := "~" unary | atom
    atom    := "x" DIGITS | "T" | "F" | "(" formula ")"

``render`` always parenthesises conjunctions and disjunctions, so
``parse(render(f)) == f`` and ``render(parse(render(f))) == render(f)``.

Canonical bit encoding (a prefix code; ``|f|`` is its length in bits)::

    variable k   0 1^(k-1) 0
    negation     10  <child>
    disjunction  110  1^(len-2) 0  <children>
    conjunction  1110 1^(len-2) 0  <children>
    false        11110
    true         11111

Conjunctions and disjunctions always have at least two children.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

from .bits import DecodeError


class FormulaError(ValueError):
    pass


class ParseError(FormulaError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class Var:
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise FormulaError(f"variable index must be positive, got {self.index}")


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise FormulaError("conjunction needs at least two children")


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise FormulaError("disjunction needs at least two children")


@dataclass(frozen=True)
class Const:
    value: bool


Formula = Union[Var, Not, And, Or, Const]
Assignment = tuple[int, ...]

TRUE = Const(True)
FALSE = Const(False)


def conj(children: Sequence[Formula]) -> Formula:
    """And over ``children`` that tolerates 0 or 1 children."""
    children = tuple(children)
    if not children:
        return TRUE
    if len(children) == 1:
        return children[0]
    return And(children)


def disj(children: Sequence[Formula]) -> Formula:
    children = tuple(children)
    if not children:
        return FALSE
    if len(children) == 1:
        return children[0]
    return Or(children)


def lit(literal: int) -> Formula:
    """Formula for a signed integer literal."""
    return Var(literal) if literal > 0 else Not(Var(-literal))


def variables(f: Formula) -> set[int]:
    out: set[int] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Var):
            out.add(g.index)
        elif isinstance(g, Not):
            stack.append(g.child)
        elif isinstance(g, (And, Or)):
            stack.extend(g.children)
    return out


def var_count(f: Formula) -> int:
    vs = variables(f)
    return max(vs) if vs else 0


def check_contiguous(f: Formula) -> None:
    vs = variables(f)
    if vs and vs != set(range(1, max(vs) + 1)):
        missing = sorted(set(range(1, max(vs) + 1)) - vs)
        raise FormulaError(f"variable indices are not contiguous; missing {missing}")


def size(f: Formula) -> int:
    """|f| in bits: the length of the canonical encoding."""
    return len(encode(f))


# -- text -------------------------------------------------------------------

def render(f: Formula) -> str:
    if isinstance(f, Var):
        return f"x{f.index}"
    if isinstance(f, Const):
        return "T" if f.value else "F"
    if isinstance(f, Not):
        return "~" + render(f.child)
    sep = " & " if isinstance(f, And) else " | "
    return "(" + sep.join(render(c) for c in f.children) + ")"


_TOKEN = re.compile(r"\s*(?:(x\d+)|(->)|([~&|()TF]))")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        tok = m.group(1) or m.group(2) or m.group(3)
        tokens.append((tok, m.start(m.lastindex)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.end = len(text)

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def pos(self):
        return self.tokens[self.i][1] if self.i < len(self.tokens) else self.end

    def take(self, expected=None):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.pos())
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", self.pos())
        self.i += 1
        return tok

    def formula(self) -> Formula:
        left = self.disj()
        if self.peek() == "->":
            self.take()
            right = self.formula()
            return Or((Not(left), right))
        return left

    def disj(self) -> Formula:
        parts = [self.conj()]
        while self.peek() == "|":
            self.take()
            parts.append(self.conj())
        return disj(parts)

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self.peek() == "&":
            self.take()
            parts.append(self.unary())
        return conj(parts)

    def unary(self) -> Formula:
        if self.peek() == "~":
            self.take()
            return Not(self.unary())
        return self.atom()

    def atom(self) -> Formula:
        pos = self.pos()
        tok = self.take()
        if tok == "(":
            inner = self.formula()
            self.take(")")
            return inner
        if tok == "T":
            return TRUE
        if tok == "F":
            return FALSE
        if tok.startswith("x"):
            index = int(tok[1:])
            if index < 1:
                raise ParseError("variable index must be positive", pos)
            return Var(index)
        raise ParseError(f"unexpected token {tok!r}", pos)


def parse(text: str, contiguous: bool = True) -> Formula:
    """Parse the infix grammar. Variable indices must be contiguous unless disabled."""
    p = _Parser(text)
    if p.peek() is None:
        raise ParseError("empty formula", 0)
    f = p.formula()
    if p.peek() is not None:
        raise ParseError(f"trailing input {p.peek()!r}", p.pos())
    if contiguous:
        check_contiguous(f)
    return f


# -- canonical bits ---------------------------------------------------------

def encode(f: Formula) -> str:
    out: list[str] = []
    stack: list[Formula] = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Var):
            out.append("0" + "1" * (g.index - 1) + "0")
        elif isinstance(g, Not):
            out.append("10")
            stack.append(g.child)
        elif isinstance(g, Or):
            out.append("110" + "1" * (len(g.children) - 2) + "0")
            stack.extend(reversed(g.children))
        elif isinstance(g, And):
            out.append("1110" + "1" * (len(g.children) - 2) + "0")
            stack.extend(reversed(g.children))
        else:
            out.append("11111" if g.value else "11110")
    return "".join(out)


def decode_prefix(bits: str, pos: int = 0, max_vars: int | None = None) -> tuple[Formula, int]:
    """Decode one formula starting at ``pos``; returns (formula, end position)."""
    n = len(bits)

    def ones(p):
        k = 0
        while p < n and bits[p] == "1":
            k += 1
            p += 1
        if p >= n:
            raise DecodeError("truncated formula code")
        return k, p + 1

    def node(p, depth):
        if depth > 10_000:
            raise DecodeError("formula nesting too deep")
        if p >= n:
            raise DecodeError("truncated formula code")
        if bits[p] == "0":
            k, p = ones(p + 1)
            if max_vars is not None and k + 1 > max_vars:
                raise DecodeError("variable index out of range")
            return Var(k + 1), p
        lead, q = 0, p
        while q < n and bits[q] == "1" and lead < 4:
            lead += 1
            q += 1
        if lead == 1:
            child, p = node(p + 2, depth + 1)
            return Not(child), p
        if lead == 4:
            if q >= n:
                raise DecodeError("truncated formula code")
            return Const(bits[q] == "1"), q + 1
        # lead 2 -> disjunction, lead 3 -> conjunction; bits[q] is the terminating 0
        if q >= n:
            raise DecodeError("truncated formula code")
        extra, p = ones(q + 1)
        children = []
        for _ in range(extra + 2):
            child, p = node(p, depth + 1)
            children.append(child)
        return (Or if lead == 2 else And)(tuple(children)), p

    f, end = node(pos, 0)
    try:
        check_contiguous(f)
    except FormulaError as exc:
        raise DecodeError(str(exc)) from None
    return f, end


def decode(bits: str) -> Formula:
    f, end = decode_prefix(bits)
    if end != len(bits):
        raise DecodeError("trailing bits after formula")
    return f


# -- semantics ----------------------------------------------------------------

def evaluate(f: Formula, a: Sequence[int]) -> int:
    n = var_count(f)
    if len(a) < n:
        raise FormulaError(f"assignment covers {len(a)} variables, formula needs {n}")
    return _eval(f, a)


def _eval(f: Formula, a: Sequence[int]) -> int:
    if isinstance(f, Var):
        return 1 if a[f.index - 1] else 0
    if isinstance(f, Not):
        return 1 - _eval(f.child, a)
    if isinstance(f, And):
        return int(all(_eval(c, a) for c in f.children))
    if isinstance(f, Or):
        return int(any(_eval(c, a) for c in f.children))
    return int(f.value)


def truth_mask(f: Formula, n: int) -> int:
    """Bit-parallel truth table: bit k is f evaluated at assignment k.

    Assignment k gives variable i (1-based) the value of bit i-1 of k.
    """
    full = (1 << (1 << n)) - 1
    cache: dict[int, int] = {}

    def var_mask(i: int) -> int:
        if i not in cache:
            block = 1 << (i - 1)
            pattern = ((1 << block) - 1) << block
            width = 2 * block
            m = pattern
            while width < (1 << n):
                m |= m << width
                width *= 2
            cache[i] = m
        return cache[i]

    def go(g: Formula) -> int:
        if isinstance(g, Var):
            return var_mask(g.index)
        if isinstance(g, Not):
            return full ^ go(g.child)
        if isinstance(g, And):
            m = full
            for c in g.children:
                m &= go(c)
            return m
        if isinstance(g, Or):
            m = 0
            for c in g.children:
                m |= go(c)
            return m
        return full if g.value else 0

    return go(f)


def assignment_from_index(k: int, n: int) -> Assignment:
    return tuple((k >> i) & 1 for i in range(n))


DEFAULT_VAR_CAP = 24


def is_tautology_bruteforce(f: Formula, cap: int = DEFAULT_VAR_CAP) -> tuple[int, Assignment | None]:
    """Exhaustive check over all assignments; returns (1, None) or (0, falsifying assignment)."""
    n = var_count(f)
    if n > cap:
        raise FormulaError(f"{n} variables exceeds the brute-force cap {cap}")
    mask = truth_mask(f, n)
    full = (1 << (1 << n)) - 1
    if mask == full:
        return 1, None
    missing = full ^ mask
    k = (missing & -missing).bit_length() - 1
    return 0, assignment_from_index(k, n)


def is_tautology(f: Formula, cap: int = DEFAULT_VAR_CAP) -> bool:
    return is_tautology_bruteforce(f, cap)[0] == 1


# -- substitution -------------------------------------------------------------

def simplify_constants(f: Formula) -> Formula:
    """Constant absorption only: 0&x->0, 1&x->x, 0|x->x, 1|x->1, ~0->1, ~1->0."""
    if isinstance(f, (Var, Const)):
        return f
    if isinstance(f, Not):
        c = simplify_constants(f.child)
        if isinstance(c, Const):
            return Const(not c.value)
        return f if c is f.child else Not(c)
    absorbing = isinstance(f, Or)
    kept = []
    for child in f.children:
        c = simplify_constants(child)
        if isinstance(c, Const):
            if c.value == absorbing:
                return Const(absorbing)
            continue
        kept.append(c)
    if not kept:
        return Const(not absorbing)
    if len(kept) == 1:
        return kept[0]
    return type(f)(tuple(kept))


def rename(f: Formula, mapping: Mapping[int, int]) -> Formula:
    if isinstance(f, Var):
        return Var(mapping[f.index])
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return Not(rename(f.child, mapping))
    return type(f)(tuple(rename(c, mapping) for c in f.children))


def _plug(f: Formula, partial: Mapping[int, int]) -> Formula:
    if isinstance(f, Var):
        if f.index in partial:
            return Const(bool(partial[f.index]))
        return f
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return Not(_plug(f.child, partial))
    return type(f)(tuple(_plug(c, partial) for c in f.children))


def substitute_constants(f: Formula, partial: Mapping[int, int]) -> tuple[Formula, dict[int, int]]:
    """Plug constants, absorb, and renumber surviving variables to 1..k.

    Returns the new formula and the renaming map (old index -> new index).
    """
    if not partial:
        return f, {v: v for v in sorted(variables(f))}
    g = simplify_constants(_plug(f, partial))
    remaining = sorted(variables(g))
    mapping = {old: new for new, old in enumerate(remaining, start=1)}
    return rename(g, mapping), mapping


def negation_normal_form(f: Formula, negate: bool = False) -> Formula:
    """Push negations to the atoms, flattening nested same-type connectives."""
    if isinstance(f, Var):
        return Not(f) if negate else f
    if isinstance(f, Const):
        return Const(f.value != negate)
    if isinstance(f, Not):
        return negation_normal_form(f.child, not negate)
    flip = isinstance(f, And) == negate
    kind = Or if flip else And
    parts: list[Formula] = []
    for c in f.children:
        g = negation_normal_form(c, negate)
        if isinstance(g, kind):
            parts.extend(g.children)
        else:
            parts.append(g)
    return kind(tuple(parts))
