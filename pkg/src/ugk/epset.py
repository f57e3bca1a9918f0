"""Exact arithmetic over eventually periodic subsets of the naturals.

An eventually periodic set is described by a finite prefix of membership
bits plus a repeating cycle of bits.  All Boolean operations, affine images
and preimages stay inside the class, so every vertex-set computation in the
rest of the package is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Callable, Iterator


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


class EPSyntaxError(ValueError):
    """Raised when an EP-set literal fails to parse; carries a position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at column {pos + 1})")
        self.pos = pos


@dataclass(frozen=True, order=True)
class EPSet:
    """An eventually periodic subset of the naturals, in canonical form.

    Membership of ``n < threshold`` is bit ``n`` of ``base``; membership of
    ``n >= threshold`` is bit ``n % period`` of ``cycle``.  The canonical
    form has the minimal eventual period and, for that period, the minimal
    threshold, so two values denote the same set iff they are equal records.
    The derived ordering is only used as a deterministic sort key.
    """

    threshold: int
    period: int
    base: int
    cycle: int

    # -- construction -----------------------------------------------------

    @staticmethod
    def make(threshold: int, period: int, base: int, cycle: int) -> "EPSet":
        """Canonicalize an arbitrary representation."""
        if period <= 0:
            raise ValueError("period must be positive")
        if threshold < 0:
            raise ValueError("threshold must be a natural")
        base &= (1 << threshold) - 1
        cycle &= (1 << period) - 1
        # minimal eventual period divides any eventual period
        for d in range(1, period + 1):
            if period % d:
                continue
            if all((cycle >> r) & 1 == (cycle >> ((r + d) % period)) & 1
                   for r in range(period)):
                period, cycle = d, cycle & ((1 << d) - 1)
                break
        while threshold > 0:
            want = (cycle >> ((threshold - 1) % period)) & 1
            if (base >> (threshold - 1)) & 1 != want:
                break
            threshold -= 1
        base &= (1 << threshold) - 1
        return EPSet(threshold, period, base, cycle)

    @staticmethod
    def from_predicate(threshold: int, period: int,
                       pred: Callable[[int], bool]) -> "EPSet":
        """Build from a membership predicate known to be ``period``-periodic
        at and beyond ``threshold``."""
        base = 0
        for n in range(threshold):
            if pred(n):
                base |= 1 << n
        cycle = 0
        for r in range(period):
            n = threshold + ((r - threshold) % period)
            if pred(n):
                cycle |= 1 << r
        return EPSet.make(threshold, period, base, cycle)

    @staticmethod
    def empty() -> "EPSet":
        return EPSet(0, 1, 0, 0)

    @staticmethod
    def naturals() -> "EPSet":
        return EPSet(0, 1, 0, 1)

    @staticmethod
    def finite(members) -> "EPSet":
        ms = set(members)
        if not ms:
            return EPSet.empty()
        t = max(ms) + 1
        base = 0
        for n in ms:
            if n < 0:
                raise ValueError("members must be naturals")
            base |= 1 << n
        return EPSet.make(t, 1, base, 0)

    @staticmethod
    def cofinite(excluded) -> "EPSet":
        return EPSet.naturals() - EPSet.finite(excluded)

    @staticmethod
    def arithmetic(start: int, step: int) -> "EPSet":
        """{start, start+step, start+2*step, ...}; step must be >= 1."""
        if step < 1:
            raise ValueError("step must be >= 1")
        if start < 0:
            raise ValueError("start must be a natural")
        return EPSet.make(start, step, 0, 1 << (start % step))

    # -- membership and queries -------------------------------------------

    def __contains__(self, n: int) -> bool:
        if n < 0:
            return False
        if n < self.threshold:
            return bool((self.base >> n) & 1)
        return bool((self.cycle >> (n % self.period)) & 1)

    def is_empty(self) -> bool:
        return self.base == 0 and self.cycle == 0

    def is_finite(self) -> bool:
        return self.cycle == 0

    def is_infinite(self) -> bool:
        return self.cycle != 0

    def cardinality_if_finite(self) -> int | None:
        """Number of members, or None for an infinite set."""
        if self.cycle != 0:
            return None
        return self.base.bit_count()

    def min_element(self) -> int | None:
        if self.base:
            return (self.base & -self.base).bit_length() - 1
        if self.cycle:
            for n in range(self.threshold, self.threshold + self.period):
                if n in self:
                    return n
        return None

    def up_to(self, bound: int) -> list[int]:
        """Members below ``bound``, ascending."""
        return [n for n in range(bound) if n in self]

    def __iter__(self) -> Iterator[int]:
        """All members, ascending; infinite for infinite sets."""
        n = 0
        while True:
            if n in self:
                yield n
            n += 1
            if n >= self.threshold and self.cycle == 0:
                return

    def __bool__(self) -> bool:
        return not self.is_empty()

    # -- Boolean algebra ---------------------------------------------------

    def _combine(self, other: "EPSet", op: Callable[[bool, bool], bool]) -> "EPSet":
        t = max(self.threshold, other.threshold)
        p = _lcm(self.period, other.period)
        return EPSet.from_predicate(t, p, lambda n: op(n in self, n in other))

    def __or__(self, other: "EPSet") -> "EPSet":
        return self._combine(other, lambda a, b: a or b)

    def __and__(self, other: "EPSet") -> "EPSet":
        return self._combine(other, lambda a, b: a and b)

    def __sub__(self, other: "EPSet") -> "EPSet":
        return self._combine(other, lambda a, b: a and not b)

    def complement(self) -> "EPSet":
        """Complement within the naturals."""
        mask_b = (1 << self.threshold) - 1
        mask_c = (1 << self.period) - 1
        return EPSet.make(self.threshold, self.period,
                          self.base ^ mask_b, self.cycle ^ mask_c)

    def is_subset(self, other: "EPSet") -> bool:
        return (self - other).is_empty()

    def is_disjoint(self, other: "EPSet") -> bool:
        return (self & other).is_empty()

    # -- affine maps ---------------------------------------------------------

    def affine_image(self, coef: int, off: int) -> "EPSet":
        """{coef*n + off : n in self}."""
        if coef < 0 or off < 0:
            raise ValueError("affine image needs natural coefficients")
        if self.is_empty():
            return EPSet.empty()
        if coef == 0:
            return EPSet.finite([off])
        t = coef * self.threshold + off
        p = coef * self.period

        def member(m: int) -> bool:
            if m < off or (m - off) % coef:
                return False
            return (m - off) // coef in self

        return EPSet.from_predicate(t, p, member)

    def affine_preimage(self, coef: int, off: int) -> "EPSet":
        """{n : coef*n + off in self}."""
        if coef < 0 or off < 0:
            raise ValueError("affine preimage needs natural coefficients")
        if coef == 0:
            return EPSet.naturals() if off in self else EPSet.empty()
        t = max(0, -(-(self.threshold - off) // coef))  # ceil division
        p = self.period // gcd(coef, self.period)
        return EPSet.from_predicate(t, p, lambda n: coef * n + off in self)

    # -- presentation --------------------------------------------------------

    def sort_key(self) -> tuple:
        return (self.threshold, self.period, self.base, self.cycle)

    def pretty(self) -> str:
        """Render as a literal that parses back to the same set."""
        if self.is_empty():
            return "{}"
        if self == EPSet.naturals():
            return "all"
        parts = []
        # every emitted ap() starts at or beyond the threshold, so each base
        # member needs listing explicitly
        extra = [n for n in range(self.threshold) if n in self]
        if self.cycle:
            for r in range(self.period):
                if (self.cycle >> r) & 1:
                    start = self.threshold + ((r - self.threshold) % self.period)
                    parts.append(f"ap({start},{self.period})"
                                 if self.period > 1 else f"ap({start},1)")
        if extra:
            parts.append("{" + ",".join(str(n) for n in sorted(extra)) + "}")
        return " | ".join(parts)

    def __str__(self) -> str:
        return self.pretty()

    def to_json(self) -> dict:
        return {
            "threshold": self.threshold,
            "period": self.period,
            "base": [(self.base >> n) & 1 for n in range(self.threshold)],
            "cycle": [(self.cycle >> r) & 1 for r in range(self.period)],
        }

    @staticmethod
    def from_json(data: dict) -> "EPSet":
        base = sum(b << i for i, b in enumerate(data["base"]))
        cycle = sum(b << i for i, b in enumerate(data["cycle"]))
        return EPSet.make(data["threshold"], data["period"], base, cycle)


def intersect_all(sets) -> EPSet:
    out = None
    for s in sets:
        out = s if out is None else out & s
    if out is None:
        raise ValueError("empty intersection has no EPSet value")
    return out


def union_all(sets) -> EPSet:
    out = EPSet.empty()
    for s in sets:
        out = out | s
    return out


# -- literal grammar ----------------------------------------------------------
#
#   expr   ::= term (('|' | '&' | '\') term)*     left associative
#   term   ::= '{' [INT (',' INT)*] '}' | 'all' | 'ap(' INT ',' INT ')'
#            | '(' expr ')'


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        self.skip_ws()
        if not self.text.startswith(ch, self.pos):
            raise EPSyntaxError(f"expected {ch!r}", self.pos)
        self.pos += len(ch)

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise EPSyntaxError("expected a number", start)
        return int(self.text[start:self.pos])

    def word(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum()
                                             or self.text[self.pos] == "_"):
            self.pos += 1
        return self.text[start:self.pos]


def _parse_term(lx: _Lexer) -> EPSet:
    ch = lx.peek()
    if ch == "{":
        lx.expect("{")
        members = []
        if lx.peek() != "}":
            members.append(lx.integer())
            while lx.peek() == ",":
                lx.expect(",")
                members.append(lx.integer())
        lx.expect("}")
        return EPSet.finite(members)
    if ch == "(":
        lx.expect("(")
        inner = _parse_expr(lx)
        lx.expect(")")
        return inner
    word = lx.word()
    if word == "all":
        return EPSet.naturals()
    if word == "ap":
        lx.expect("(")
        start = lx.integer()
        lx.expect(",")
        step = lx.integer()
        lx.expect(")")
        return EPSet.arithmetic(start, step)
    if word == "fin":
        # alias: fin{1,2} reads the same as {1,2}
        if lx.peek() == "{":
            return _parse_term(lx)
    raise EPSyntaxError(f"unknown set term {word!r}" if word
                        else "expected a set term", lx.pos)


def _parse_expr(lx: _Lexer) -> EPSet:
    out = _parse_term(lx)
    while True:
        ch = lx.peek()
        if ch == "|":
            lx.expect("|")
            out = out | _parse_term(lx)
        elif ch == "&":
            lx.expect("&")
            out = out & _parse_term(lx)
        elif ch == "\\":
            lx.expect("\\")
            out = out - _parse_term(lx)
        else:
            return out


def parse_epset(text: str) -> EPSet:
    """Parse an EP-set literal such as ``{1,2}``, ``all \\ {0,2}``, ``ap(3,2)``."""
    lx = _Lexer(text)
    out = _parse_expr(lx)
    lx.skip_ws()
    if lx.pos != len(lx.text):
        raise EPSyntaxError("trailing input after set expression", lx.pos)
    return out
