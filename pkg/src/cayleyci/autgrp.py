"""Automorphism groups of colored k-ary relational structures.

``aut_group`` runs an individualization-refinement search.  Vertex cells are
refined until equitable: two vertices stay together only if, for every color
and tuple position, they sit in the same number of edges whose entries fall in
the same cells.  The first path individualizes the smallest vertex of the
first smallest non-singleton cell at every level.  Levels are then revisited
deepest first, and each candidate image of a base point that is not already in
the orbit of the automorphisms found so far is tested by a depth-first search
for a leaf whose labeling is an automorphism.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

from .config import current_budget
from .exceptions import BudgetExceeded, DegreeMismatch
from .group import GroupSpec, PermGroup, schreier_sims
from .perm import Permutation
from .relstruct import ColorRelStruct, apply_perm, connection_set_of, is_automorphism, orbit_coloring

log = logging.getLogger(__name__)

Cells = list[list[int]]


class _Searcher:
    def __init__(self, X: ColorRelStruct):
        self.n = X.n
        self.k = X.k
        self.table = dict(X.edges)
        self.edge_list = [(t, c) for t, c in X.edges.items()]
        self.leaves_tested = 0
        self.nodes = 0

    # -- refinement ----------------------------------------------------------

    def refine(self, cells: Cells) -> tuple[Cells, int]:
        """Refine to an equitable ordered partition; returns cells and a trace hash.

        Every step depends only on colors, positions and cell indices, so the
        result commutes with relabeling the structure.
        """
        n = self.n
        trace = []
        while True:
            cell_of = [0] * n
            for ci, cell in enumerate(cells):
                for v in cell:
                    cell_of[v] = ci
            active = [len(cell) > 1 for cell in cells]
            if not any(active):
                break
            sig: list[list] = [[] for _ in range(n)]
            for t, c in self.edge_list:
                key = (c,) + tuple(cell_of[x] for x in t)
                for j, x in enumerate(t):
                    if active[cell_of[x]]:
                        sig[x].append((j, key))
            new_cells: Cells = []
            changed = False
            for ci, cell in enumerate(cells):
                if not active[ci]:
                    new_cells.append(cell)
                    continue
                groups: dict[tuple, list[int]] = {}
                for v in cell:
                    sig[v].sort()
                    groups.setdefault(tuple(sig[v]), []).append(v)
                if len(groups) == 1:
                    new_cells.append(cell)
                    continue
                changed = True
                keys = sorted(groups)
                trace.append((ci, tuple((hash(key), len(groups[key])) for key in keys)))
                new_cells.extend(groups[key] for key in keys)
            if not changed:
                break
            cells = new_cells
        return cells, hash(tuple(trace))

    @staticmethod
    def individualize(cells: Cells, ci: int, v: int) -> Cells:
        cell = cells[ci]
        rest = [x for x in cell if x != v]
        return cells[:ci] + [[v], rest] + cells[ci + 1 :]

    @staticmethod
    def target_cell(cells: Cells) -> int | None:
        best = None
        for ci, cell in enumerate(cells):
            if len(cell) > 1 and (best is None or len(cell) < len(cells[best])):
                best = ci
        return best

    # -- search --------------------------------------------------------------

    def is_aut(self, img: Sequence[int]) -> bool:
        table = self.table
        for t, c in self.edge_list:
            if table.get(tuple(img[x] for x in t)) != c:
                return False
        return True

    def run(self) -> tuple[list[Permutation], list[int]]:
        n = self.n
        cells, trace = self.refine([list(range(n))])
        # first path
        path = [(cells, trace)]
        targets: list[int] = []
        base: list[int] = []
        while True:
            ci = self.target_cell(cells)
            if ci is None:
                break
            v = min(cells[ci])
            targets.append(ci)
            base.append(v)
            cells, trace = self.refine(self.individualize(cells, ci, v))
            path.append((cells, trace))
        self.leaf0 = [cell[0] for cell in path[-1][0]]
        self.path = path
        self.targets = targets

        gens: list[Permutation] = []
        for level in reversed(range(len(base))):
            cells, _ = path[level]
            b = base[level]
            prefix = base[:level]
            for w in sorted(cells[targets[level]]):
                if w == b:
                    continue
                stab = [g.images for g in gens if all(g.images[x] == x for x in prefix)]
                if w in _orbit(b, stab):
                    continue
                found = self._search(level, self.individualize(cells, targets[level], w), gens)
                if found is not None:
                    gens.append(Permutation(found, check=False))
                    log.debug("level %d: base point %d -> %d", level, b, w)
        return gens, base

    def _search(self, level: int, cells: Cells, gens: list[Permutation]) -> tuple[int, ...] | None:
        """Depth-first search below ``level`` for a leaf matching the first leaf."""
        self.nodes += 1
        cells, trace = self.refine(cells)
        ref_cells, ref_trace = self.path[level + 1]
        if trace != ref_trace or len(cells) != len(ref_cells):
            return None
        if any(len(a) != len(b) for a, b in zip(cells, ref_cells)):
            return None
        if level + 1 == len(self.targets):
            self.leaves_tested += 1
            img = [0] * self.n
            for src, cell in zip(self.leaf0, cells):
                img[src] = cell[0]
            return tuple(img) if self.is_aut(img) else None
        ci = self.targets[level + 1]
        tried: list[int] = []
        for u in sorted(cells[ci]):
            # candidates equivalent under known automorphisms fixing the
            # individualized vertices give equivalent subtrees
            if tried and gens:
                fixed = [cell[0] for cell in cells if len(cell) == 1]
                stab = [g.images for g in gens if all(g.images[x] == x for x in fixed)]
                if stab and any(u in _orbit(t, stab) for t in tried):
                    continue
            found = self._search(level + 1, self.individualize(cells, ci, u), gens)
            if found is not None:
                return found
            tried.append(u)
        return None


def _orbit(x: int, gens: Sequence[Sequence[int]]) -> set[int]:
    seen = {x}
    stack = [x]
    while stack:
        y = stack.pop()
        for g in gens:
            z = g[y]
            if z not in seen:
                seen.add(z)
                stack.append(z)
    return seen


@dataclass
class AutSearchStats:
    base: list[int]
    nodes: int
    leaves_tested: int


def aut_group(X: ColorRelStruct, max_n: int | None = None, stats: list | None = None) -> PermGroup:
    """Full automorphism group of X (colors respected)."""
    if max_n is None:
        max_n = current_budget().aut_max_n
    if X.n > max_n:
        raise BudgetExceeded("automorphism search vertices", X.n, max_n)
    searcher = _Searcher(X)
    gens, base = searcher.run()
    if stats is not None:
        stats.append(AutSearchStats(base, searcher.nodes, searcher.leaves_tested))
    return schreier_sims(gens, degree=X.n)


def brute_force_automorphisms(X: ColorRelStruct, max_n: int | None = None) -> list[Permutation]:
    """Every automorphism of X, found by testing all n! permutations."""
    if max_n is None:
        max_n = current_budget().brute_force_max_n
    if X.n > max_n:
        raise BudgetExceeded("brute-force automorphism vertices", X.n, max_n)
    return [
        Permutation(p, check=False)
        for p in itertools.permutations(range(X.n))
        if is_automorphism(X, Permutation(p, check=False))
    ]


def brute_force_aut(X: ColorRelStruct, max_n: int | None = None) -> PermGroup:
    autos = brute_force_automorphisms(X, max_n)
    G = schreier_sims([], degree=X.n)
    gens: list[Permutation] = []
    for g in autos:
        if not G.contains(g):
            gens.append(g)
            G = schreier_sims(gens, degree=X.n)
    return G


def k_closure(G: PermGroup, k: int, budget: int | None = None) -> PermGroup:
    """G^(k): automorphisms of the coloring of k-tuples by G-orbits."""
    return aut_group(orbit_coloring(G, k, budget))


# ---------------------------------------------------------------------------
# automorphisms of Z_p x Z_2^d


def _gl2_matrices(d: int) -> Iterator[tuple[int, ...]]:
    """Invertible d×d matrices over GF(2) as column tuples, identity first.

    Column j is the image of the basis vector 1 << j, as an integer.
    """
    identity = tuple(1 << j for j in range(d))
    yield identity
    size = 1 << d
    for cols in itertools.product(range(1, size), repeat=d):
        if cols == identity:
            continue
        span = {0}
        ok = True
        for c in cols:
            if c in span:
                ok = False
                break
            span |= {s ^ c for s in span}
        if ok:
            yield cols


def gl2_order(d: int) -> int:
    out = 1
    for i in range(d):
        out *= (1 << d) - (1 << i)
    return out


def _linear_table(cols: Sequence[int], d: int) -> list[int]:
    table = [0] * (1 << d)
    for v in range(1, 1 << d):
        low = v & -v
        table[v] = table[v ^ low] ^ cols[low.bit_length() - 1]
    return table


def _automorphism_tables(spec: GroupSpec) -> Iterator[tuple[int, list[int]]]:
    units = [u for u in range(1, spec.p)] if spec.p > 1 else [1]
    cap = current_budget().enum_cap
    count = len(units) * gl2_order(spec.d)
    if count > cap:
        raise BudgetExceeded("group automorphism enumeration", count, cap)
    for cols in _gl2_matrices(spec.d):
        table = _linear_table(cols, spec.d)
        for u in units:
            yield u, table


def _as_permutation(spec: GroupSpec, u: int, table: Sequence[int]) -> Permutation:
    f = spec.fiber
    return Permutation([((i * u) % spec.p) * f + table[v] for i in range(spec.p) for v in range(f)], check=False)


def enumerate_group_automorphisms(spec: GroupSpec) -> Iterator[Permutation]:
    """Every automorphism of Z_p x Z_2^d as a permutation of the point labels.

    Automorphisms are pairs (multiplication by a unit mod p, element of
    GL(d, 2)); the identity comes first.
    """
    for u, table in _automorphism_tables(spec):
        yield _as_permutation(spec, u, table)


@dataclass
class IsoSearchResult:
    beta: Permutation | None
    examined: int
    total: int
    method: str


def search_group_automorphism_iso(X: ColorRelStruct, Y: ColorRelStruct, spec: GroupSpec) -> IsoSearchResult:
    """Scan all group automorphisms for one carrying X onto Y (colors included)."""
    if X.n != spec.order or Y.n != spec.order:
        raise DegreeMismatch(f"structures must live on the {spec.order} points of {spec.label()}")
    total = max(spec.p - 1, 1) * gl2_order(spec.d)
    if X.k != Y.k or len(X) != len(Y) or X.color_histogram() != Y.color_histogram():
        return IsoSearchResult(None, 0, total, "invariants")
    cx, cy = connection_set_of(X, spec), connection_set_of(Y, spec)
    examined = 0
    if cx is not None and cy is not None:
        # group automorphisms fix 0 and normalize the translations, so
        # β(X) = Y exactly when β carries one connection set onto the other
        f, p = spec.fiber, spec.p
        src = [(tuple(divmod(x, f) for x in s), c) for s, c in cx.tuples.items()]
        target = cy.tuples
        for u, table in _automorphism_tables(spec):
            examined += 1
            for s, c in src:
                if target.get(tuple(((i * u) % p) * f + table[v] for i, v in s)) != c:
                    break
            else:
                return IsoSearchResult(_as_permutation(spec, u, table), examined, total, "connection-set")
        return IsoSearchResult(None, examined, total, "connection-set")
    for beta in enumerate_group_automorphisms(spec):
        examined += 1
        if apply_perm(X, beta) == Y:
            return IsoSearchResult(beta, examined, total, "full-structure")
    return IsoSearchResult(None, examined, total, "full-structure")


def iso_by_group_automorphism(X: ColorRelStruct, Y: ColorRelStruct, spec: GroupSpec) -> Permutation | None:
    return search_group_automorphism_iso(X, Y, spec).beta
