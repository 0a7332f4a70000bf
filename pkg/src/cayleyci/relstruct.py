"""Colored k-ary relational structures and Cayley structures on Z_p x Z_2^d."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from types import MappingProxyType

from .config import current_budget
from .exceptions import BudgetExceeded, DegreeMismatch, FormatError
from .group import GroupSpec, PermGroup, left_regular_representation
from .perm import Permutation

Edge = tuple[int, ...]


@dataclass(frozen=True)
class ConnectionSet:
    """Colored (k-1)-tuples of group elements: the edges starting at 0."""

    spec: GroupSpec
    tuples: Mapping[Edge, int]

    def __post_init__(self):
        object.__setattr__(self, "tuples", MappingProxyType(dict(self.tuples)))
        n = self.spec.order
        for t in self.tuples:
            if any(not 0 <= x < n for x in t):
                raise ValueError(f"connection tuple {t} has entries outside range({n})")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConnectionSet):
            return NotImplemented
        return self.spec == other.spec and dict(self.tuples) == dict(other.tuples)

    def __hash__(self) -> int:
        return hash((self.spec, frozenset(self.tuples.items())))


class ColorRelStruct:
    """Vertices range(n) and a map from k-tuples to non-negative color labels.

    A map gives pairwise disjoint color classes for free.  Structures built by
    :func:`cayley_structure` remember their connection set in ``cayley``.
    """

    __slots__ = ("n", "k", "_edges", "cayley")

    def __init__(self, n: int, k: int, edges: Mapping[Edge, int] | Iterable[Edge] = (),
                 cayley: ConnectionSet | None = None):
        if n <= 0:
            raise ValueError("a structure needs at least one vertex")
        if k < 1:
            raise ValueError("arity must be positive")
        if not isinstance(edges, Mapping):
            edges = {tuple(e): 0 for e in edges}
        table = {}
        for t, c in edges.items():
            t = tuple(t)
            if len(t) != k:
                raise ValueError(f"tuple {t} does not have arity {k}")
            if any(not 0 <= x < n for x in t):
                raise ValueError(f"tuple {t} has entries outside range({n})")
            if not isinstance(c, int) or c < 0:
                raise ValueError(f"color of {t} must be a non-negative integer")
            table[t] = c
        self.n = n
        self.k = k
        self._edges = table
        self.cayley = cayley

    @property
    def edges(self) -> Mapping[Edge, int]:
        return MappingProxyType(self._edges)

    def __len__(self) -> int:
        return len(self._edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ColorRelStruct):
            return NotImplemented
        return self.n == other.n and self.k == other.k and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self.n, self.k, frozenset(self._edges.items())))

    def __repr__(self) -> str:
        return f"ColorRelStruct(n={self.n}, k={self.k}, edges={len(self._edges)}, colors={len(self.colors())})"

    def color(self, t: Edge) -> int | None:
        return self._edges.get(tuple(t))

    def colors(self) -> set[int]:
        return set(self._edges.values())

    def color_histogram(self) -> dict[int, int]:
        hist: dict[int, int] = {}
        for c in self._edges.values():
            hist[c] = hist.get(c, 0) + 1
        return dict(sorted(hist.items()))

    def fresh_color(self) -> int:
        return max(self._edges.values(), default=-1) + 1

    def with_cayley(self, conn: ConnectionSet | None) -> ColorRelStruct:
        return ColorRelStruct(self.n, self.k, self._edges, cayley=conn)


def apply_perm(X: ColorRelStruct, sigma: Permutation) -> ColorRelStruct:
    """The image structure: (t1..tk) -> c becomes (σ(t1)..σ(tk)) -> c."""
    if sigma.degree != X.n:
        raise DegreeMismatch(f"permutation degree {sigma.degree} != {X.n} vertices")
    img = sigma.images
    return ColorRelStruct(X.n, X.k, {tuple(img[x] for x in t): c for t, c in X.edges.items()})


def is_automorphism(X: ColorRelStruct, sigma: Permutation) -> bool:
    if sigma.degree != X.n:
        raise DegreeMismatch(f"permutation degree {sigma.degree} != {X.n} vertices")
    img = sigma.images
    table = X._edges
    for t, c in table.items():
        if table.get(tuple(img[x] for x in t)) != c:
            return False
    return True


def cayley_structure(conn: ConnectionSet, k: int) -> ColorRelStruct:
    """All left translates of (0, s1, ..., s_{k-1}) for colored s in ``conn``."""
    spec = conn.spec
    for t in conn.tuples:
        if len(t) != k - 1:
            raise ValueError(f"connection tuple {t} should have length {k - 1}")
    n = spec.order
    add = [[spec.add(x, y) for y in range(n)] for x in range(n)]
    edges = {}
    for x in range(n):
        row = add[x]
        for s, c in conn.tuples.items():
            edges[(x,) + tuple(row[y] for y in s)] = c
    return ColorRelStruct(n, k, edges, cayley=conn)


def connection_set_of(X: ColorRelStruct, spec: GroupSpec) -> ConnectionSet | None:
    """Recover the connection set if X is a Cayley structure of ``spec``."""
    if X.n != spec.order:
        raise DegreeMismatch(f"structure on {X.n} vertices is not on {spec.label()}")
    if X.cayley is not None and X.cayley.spec == spec:
        return X.cayley
    if not all(is_automorphism(X, g) for g in left_regular_representation(spec).generators):
        return None
    return ConnectionSet(spec, {t[1:]: c for t, c in X.edges.items() if t[0] == 0})


def edge_lookup(X: ColorRelStruct, t: Edge) -> int | None:
    """Color of ``t`` via the connection set, translating t[0] to the identity."""
    conn = X.cayley
    if conn is None:
        raise ValueError("edge_lookup needs a structure built by cayley_structure")
    spec = conn.spec
    t = tuple(t)
    if len(t) != X.k or any(not 0 <= x < X.n for x in t):
        return None
    shift = spec.neg(t[0])
    return conn.tuples.get(tuple(spec.add(shift, x) for x in t[1:]))


def digraph_wreath(G1: ColorRelStruct, G2: ColorRelStruct) -> ColorRelStruct:
    """Γ1 ≀ Γ2 on V1×V2, vertex (x, y) encoded as x*|V2| + y."""
    if G1.k != 2 or G2.k != 2:
        raise ValueError("the wreath product is defined for color digraphs (arity 2)")
    n2 = G2.n
    edges = {}
    for x in range(G1.n):
        for (y1, y2), c in G2.edges.items():
            edges[(x * n2 + y1, x * n2 + y2)] = c
    for (x1, x2), c in G1.edges.items():
        for y1 in range(n2):
            for y2 in range(n2):
                e = (x1 * n2 + y1, x2 * n2 + y2)
                if edges.setdefault(e, c) != c:
                    # only a loop of G1 can overlap a fiber edge
                    raise ValueError(f"loop ({x1}, {x1}) of the first digraph recolors fiber arcs")
    return ColorRelStruct(G1.n * n2, 2, edges)


def orbit_coloring(G: PermGroup, k: int, budget: int | None = None) -> ColorRelStruct:
    """Color every k-tuple by its G-orbit.

    Colors are numbered in order of each orbit's lexicographically first tuple.
    """
    n = G.degree
    if budget is None:
        budget = current_budget().tuple_budget
    total = n**k
    if total > budget:
        raise BudgetExceeded(f"orbit coloring of {k}-tuples", total, budget)
    weights = [n ** (k - 1 - j) for j in range(k)]
    gens = [g.images for g in G.generators]
    color = [-1] * total
    next_color = 0
    for code in range(total):
        if color[code] != -1:
            continue
        color[code] = next_color
        stack = [code]
        while stack:
            c = stack.pop()
            t = [(c // w) % n for w in weights]
            for g in gens:
                img = 0
                for x, w in zip(t, weights):
                    img += g[x] * w
                if color[img] == -1:
                    color[img] = next_color
                    stack.append(img)
        next_color += 1
    edges = {}
    for code, c in enumerate(color):
        edges[tuple((code // w) % n for w in weights)] = c
    return ColorRelStruct(n, k, edges)


def translate_structure(X: ColorRelStruct, relabel: Mapping[int, int], n: int) -> ColorRelStruct:
    """Relabel vertices through ``relabel`` into a structure on range(n)."""
    return ColorRelStruct(n, X.k, {tuple(relabel[x] for x in t): c for t, c in X.edges.items()})


# ---------------------------------------------------------------------------
# text format


def format_structure(X: ColorRelStruct) -> str:
    lines = [f"relstruct n={X.n} k={X.k}"]
    for t, c in sorted(X.edges.items(), key=lambda item: (item[1], item[0])):
        lines.append(f"{c}: " + " ".join(map(str, t)))
    return "\n".join(lines) + "\n"


def parse_structure(text: str) -> ColorRelStruct:
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise FormatError("empty structure file", 1)
    lineno, header = lines[0]
    parts = header.split()
    try:
        if parts[0] != "relstruct" or len(parts) != 3:
            raise ValueError
        fields = dict(p.split("=", 1) for p in parts[1:])
        n, k = int(fields["n"]), int(fields["k"])
    except (ValueError, KeyError, IndexError):
        raise FormatError(f"expected 'relstruct n=<n> k=<k>', got {header!r}", lineno) from None
    edges: dict[Edge, int] = {}
    for lineno, ln in lines[1:]:
        head, sep, rest = ln.partition(":")
        try:
            if not sep:
                raise ValueError("missing ':'")
            c = int(head)
            t = tuple(int(x) for x in rest.split())
        except ValueError:
            raise FormatError(f"bad edge line {ln!r}", lineno) from None
        if len(t) != k:
            raise FormatError(f"edge {t} does not have arity {k}", lineno)
        if any(not 0 <= x < n for x in t):
            raise FormatError(f"edge {t} has vertices outside range({n})", lineno)
        if c < 0:
            raise FormatError("colors must be non-negative", lineno)
        if t in edges and edges[t] != c:
            raise FormatError(f"tuple {t} listed with two colors", lineno)
        edges[t] = c
    return ColorRelStruct(n, k, edges)


def read_structure(path) -> ColorRelStruct:
    with open(path, encoding="utf-8") as fh:
        return parse_structure(fh.read())


def write_structure(path, X: ColorRelStruct) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_structure(X))
