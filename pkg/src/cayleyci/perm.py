"""Permutations of {0, ..., n-1} stored as image tables.

Products are read right to left: ``p * q`` (equivalently ``compose(p, q)``)
applies ``q`` first and then ``p``.  Cycle notation used for text I/O is
1-indexed, so the transposition swapping points 0 and 1 prints as ``(1,2)``.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Sequence
from math import lcm
from operator import itemgetter

from .exceptions import DegreeMismatch, FormatError

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


class Permutation:
    """A bijection of {0, ..., degree-1}; ``images[i]`` is the image of ``i``."""

    __slots__ = ("images",)

    def __init__(self, images: Iterable[int], *, check: bool = True):
        images = tuple(images)
        if check:
            n = len(images)
            if n == 0:
                raise ValueError("a permutation needs positive degree")
            seen = [False] * n
            for x in images:
                if not (isinstance(x, int) and 0 <= x < n) or seen[x]:
                    raise ValueError(f"not a permutation of range({n}): {images!r}")
                seen[x] = True
        self.images: tuple[int, ...] = images

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(range(n))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], n: int) -> Permutation:
        """Build from 0-indexed cycles read as a product, rightmost cycle first."""
        images = list(range(n))
        for cycle in cycles:
            if len(set(cycle)) != len(cycle):
                raise ValueError(f"repeated point in cycle {tuple(cycle)}")
            step = list(range(n))
            for a, b in zip(cycle, list(cycle[1:]) + list(cycle[:1])):
                if not 0 <= a < n:
                    raise ValueError(f"point {a} outside range({n})")
                step[a] = b
            images = [images[x] for x in step]
        return cls(images)

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> Permutation:
        """Parse 1-indexed cycle notation such as ``"(1,2)(3,4)"`` or ``"()"``.

        Without ``n`` the degree is the largest point mentioned.
        """
        stripped = text.strip()
        leftover = _CYCLE_RE.sub("", stripped).strip()
        if leftover:
            raise ValueError(f"cannot parse permutation {text!r}")
        cycles = []
        for body in _CYCLE_RE.findall(stripped):
            body = body.strip()
            if not body:
                continue
            try:
                cycle = [int(tok) - 1 for tok in re.split(r"[,\s]+", body) if tok]
            except ValueError:
                raise ValueError(f"cannot parse permutation {text!r}") from None
            if any(x < 0 for x in cycle):
                raise ValueError(f"cycle points are 1-indexed: {text!r}")
            cycles.append(cycle)
        largest = max((max(c) + 1 for c in cycles), default=1)
        if n is None:
            n = largest
        elif largest > n:
            raise ValueError(f"point {largest} exceeds degree {n}")
        return cls.from_cycles(cycles, n)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: Permutation) -> Permutation:
        return compose(self, other)

    def __pow__(self, e: int) -> Permutation:
        if e < 0:
            return self.inverse() ** (-e)
        result = Permutation.identity(self.degree)
        base = self
        while e:
            if e & 1:
                result = compose(result, base)
            base = compose(base, base)
            e >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __lt__(self, other: Permutation) -> bool:
        return self.images < other.images

    def __repr__(self) -> str:
        return f"Permutation({self.cycle_string()!r}, n={self.degree})"

    def __str__(self) -> str:
        return self.cycle_string()

    def inverse(self) -> Permutation:
        return Permutation(invert(self.images), check=False)

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        """Non-trivial cycles, each starting at its smallest point, sorted."""
        seen = set()
        out = []
        for start in range(self.degree):
            if start in seen or self.images[start] == start:
                continue
            cycle = [start]
            seen.add(start)
            x = self.images[start]
            while x != start:
                cycle.append(x)
                seen.add(x)
                x = self.images[x]
            out.append(tuple(cycle))
        return out

    def cycle_string(self) -> str:
        cycles = self.cycles()
        if not cycles:
            return "()"
        return "".join("(" + ",".join(str(x + 1) for x in c) + ")" for c in cycles)

    def order(self) -> int:
        return lcm(1, *(len(c) for c in self.cycles()))

    def sign(self) -> int:
        transpositions = sum(len(c) - 1 for c in self.cycles())
        return -1 if transpositions % 2 else 1

    def support(self) -> list[int]:
        return [i for i, x in enumerate(self.images) if x != i]

    def fixed_points(self) -> list[int]:
        return [i for i, x in enumerate(self.images) if x == i]

    def apply_tuple(self, t: Sequence[int]) -> tuple[int, ...]:
        img = self.images
        return tuple(img[x] for x in t)


def invert(images: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(images)
    for i, x in enumerate(images):
        inv[x] = i
    return tuple(inv)


def mul(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """Raw image-table product p∘q (q first)."""
    if len(q) == 1:
        return (p[q[0]],)
    return itemgetter(*q)(p)


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Return p∘q: apply ``q`` first, then ``p``."""
    if p.degree != q.degree:
        raise DegreeMismatch(f"cannot compose degree {p.degree} with degree {q.degree}")
    return Permutation(mul(p.images, q.images), check=False)


def commutator(g: Permutation, h: Permutation) -> Permutation:
    """Return [g, h] = g⁻¹h⁻¹gh."""
    if g.degree != h.degree:
        raise DegreeMismatch(f"cannot combine degree {g.degree} with degree {h.degree}")
    return g.inverse() * h.inverse() * g * h


def conjugate(g: Permutation, by: Permutation) -> Permutation:
    """Return by⁻¹·g·by."""
    return by.inverse() * g * by


def parse_cycles_line(line: str, n: int, lineno: int | None = None) -> Permutation:
    try:
        return Permutation.parse(line, n)
    except ValueError as exc:
        raise FormatError(str(exc), lineno) from None
