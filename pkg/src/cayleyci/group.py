"""Permutation groups given by generators, backed by a base and strong
generating set (BSGS).

The Schreier–Sims construction here is deterministic: new base points are the
smallest points moved by the generator that needs them, so orders, transversals
and element enumeration order are reproducible.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from functools import lru_cache
from math import prod

from .config import current_budget
from .exceptions import BudgetExceeded, DegreeMismatch, FormatError, NotTransitive, PreconditionError
from .perm import Permutation, invert, mul

Images = tuple[int, ...]


# ---------------------------------------------------------------------------
# group specs Z_p x Z_2^d


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, int(p**0.5) + 1))


@dataclass(frozen=True)
class GroupSpec:
    """The abelian group Z_p x Z_2^d with points encoded as i*2^d + v.

    ``v`` is the integer whose binary digits are the Z_2^d coordinates, so
    addition in the second factor is bitwise xor.
    """

    p: int
    d: int

    def __post_init__(self):
        if self.d < 0:
            raise ValueError(f"dimension must be non-negative, got {self.d}")
        if self.p != 1 and not _is_prime(self.p):
            raise ValueError(f"p must be 1 or a prime, got {self.p}")

    @property
    def fiber(self) -> int:
        return 1 << self.d

    @property
    def order(self) -> int:
        return self.p * self.fiber

    def encode(self, i: int, v: int) -> int:
        return (i % self.p) * self.fiber + v

    def decode(self, x: int) -> tuple[int, int]:
        return divmod(x, self.fiber)

    def add(self, x: int, y: int) -> int:
        i, v = self.decode(x)
        j, w = self.decode(y)
        return self.encode(i + j, v ^ w)

    def neg(self, x: int) -> int:
        i, v = self.decode(x)
        return self.encode(-i, v)

    def translation(self, x: int) -> Permutation:
        """Left translation by the element with point label ``x``."""
        return Permutation([self.add(x, y) for y in range(self.order)], check=False)

    def label(self) -> str:
        parts = []
        if self.p > 1:
            parts.append(f"Z{self.p}")
        if self.d == 1:
            parts.append("Z2")
        elif self.d > 1:
            parts.append(f"Z2^{self.d}")
        return "x".join(parts) or "1"

    @classmethod
    def parse(cls, text: str) -> GroupSpec:
        """Accept ``Z3xZ2^2``, ``Z2^5``, ``Z5`` or ``p=3,d=2``."""
        s = text.replace(" ", "").replace("×", "x")
        if "=" in s:
            fields = dict(item.split("=", 1) for item in s.split(","))
            return cls(int(fields.get("p", 1)), int(fields.get("d", 0)))
        p, d = 1, 0
        for factor in filter(None, s.split("x")):
            if not factor.startswith("Z"):
                raise ValueError(f"cannot parse group spec {text!r}")
            body = factor[1:]
            base, _, exp = body.partition("^")
            base_n, exp_n = int(base), int(exp or 1)
            if base_n == 2:
                d += exp_n
            elif exp_n == 1 and p == 1:
                p = base_n
            else:
                raise ValueError(f"unsupported group spec {text!r}")
        return cls(p, d)


# ---------------------------------------------------------------------------
# Schreier–Sims


def _moved_points(g: Images) -> Iterator[int]:
    return (i for i, x in enumerate(g) if x != i)


@lru_cache(maxsize=64)
def _identity(n: int) -> Images:
    return tuple(range(n))


def _is_id(g: Images) -> bool:
    return tuple(g) == _identity(len(g))


class _Chain:
    """Mutable stabilizer chain used while building a BSGS."""

    def __init__(self, n: int, base: list[int]):
        self.n = n
        self.identity = tuple(range(n))
        self.base = list(base)
        self.strong: list[Images] = []
        # per level: transversal dict point -> rep (rep(base[i]) = point) and inverse reps
        self.trans: list[dict[int, Images]] = []
        self.trans_inv: list[dict[int, Images]] = []
        self.level_gens: list[list[Images]] = []
        for b in self.base:
            self._push_level(b)

    def _push_level(self, b: int):
        self.trans.append({b: self.identity})
        self.trans_inv.append({b: self.identity})
        self.level_gens.append([])

    def add_base_point(self, b: int):
        self.base.append(b)
        self._push_level(b)

    def fixes_prefix(self, g: Images, i: int) -> bool:
        return all(g[b] == b for b in self.base[:i])

    def extend_orbit(self, i: int):
        """Close the level-i orbit under the level-i generators."""
        trans, trans_inv, gens = self.trans[i], self.trans_inv[i], self.level_gens[i]
        queue = list(trans)
        pos = 0
        while pos < len(queue):
            x = queue[pos]
            pos += 1
            ux = trans[x]
            for g in gens:
                y = g[x]
                if y not in trans:
                    uy = mul(g, ux)
                    trans[y] = uy
                    trans_inv[y] = invert(uy)
                    queue.append(y)

    def add_strong(self, g: Images, level: int):
        self.strong.append(g)
        for i in range(level + 1):
            self.level_gens[i].append(g)

    def sift(self, g: Images, start: int = 0) -> tuple[Images, int]:
        for i in range(start, len(self.base)):
            x = g[self.base[i]]
            inv = self.trans_inv[i].get(x)
            if inv is None:
                return g, i
            g = mul(inv, g)
        return g, len(self.base)


def _build_chain(n: int, gens: Sequence[Images], base_prefix: Sequence[int] = ()) -> _Chain:
    chain = _Chain(n, list(base_prefix))
    for g in gens:
        if _is_id(g):
            continue
        if all(g[b] == b for b in chain.base):
            chain.add_base_point(min(p for p in _moved_points(g) if p not in chain.base))
        chain.add_strong(g, 0)
    for i in range(len(chain.base)):
        chain.extend_orbit(i)

    checked: list[set[tuple[int, int]]] = [set() for _ in chain.base]
    i = len(chain.base) - 1
    while i >= 0:
        restart = False
        trans = chain.trans[i]
        for x in list(trans):
            ux = trans[x]
            for gi, s in enumerate(chain.level_gens[i]):
                key = (x, gi)
                if key in checked[i]:
                    continue
                checked[i].add(key)
                y = s[x]
                h = mul(chain.trans_inv[i][y], mul(s, ux))
                residue, j = chain.sift(h, i + 1)
                if _is_id(residue):
                    continue
                if j == len(chain.base):
                    chain.add_base_point(min(p for p in _moved_points(residue) if p not in chain.base))
                    checked.append(set())
                chain.add_strong(residue, j)
                for lvl in range(i + 1, j + 1):
                    chain.extend_orbit(lvl)
                i = j
                restart = True
                break
            if restart:
                break
        if restart:
            continue
        i -= 1
        if i >= 0:
            chain.extend_orbit(i)
    return chain


class PermGroup:
    """A permutation group of a fixed degree with a deterministic BSGS."""

    def __init__(self, degree: int, generators: Sequence[Permutation], chain: _Chain):
        self.degree = degree
        self.generators: tuple[Permutation, ...] = tuple(generators)
        self._chain = chain
        self.base: tuple[int, ...] = tuple(chain.base)
        self.strong_gens: tuple[Permutation, ...] = tuple(Permutation(g, check=False) for g in chain.strong)
        self.order: int = prod(len(t) for t in chain.trans)

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, order={self.order}, ngens={len(self.generators)})"

    def __len__(self) -> int:
        return self.order

    def __contains__(self, g: Permutation) -> bool:
        return self.contains(g)

    def contains(self, g: Permutation) -> bool:
        if g.degree != self.degree:
            return False
        residue, j = self._chain.sift(g.images)
        return j == len(self._chain.base) and _is_id(residue)

    def transversals(self) -> list[list[Permutation]]:
        """Level-by-level coset representatives, base point's identity first."""
        return [[Permutation(u, check=False) for u in t.values()] for t in self._chain.trans]

    def is_subgroup_of(self, other: PermGroup) -> bool:
        return self.degree == other.degree and all(other.contains(g) for g in self.generators)

    def same_group(self, other: PermGroup) -> bool:
        return self.order == other.order and self.is_subgroup_of(other)

    def fixes_points(self, points: Iterable[int]) -> bool:
        pts = list(points)
        return all(g.images[x] == x for g in self.generators for x in pts)

    def stabilizer_chain_gens(self, points: Sequence[int]) -> list[Permutation]:
        """Generators of the pointwise stabilizer of ``points`` (in order)."""
        chain = _build_chain(self.degree, [g.images for g in self.generators], points)
        k = len(points)
        return [Permutation(g, check=False) for g in chain.strong if all(g[b] == b for b in chain.base[:k])]


def schreier_sims(
    gens: Iterable[Permutation],
    degree: int | None = None,
    base_prefix: Sequence[int] = (),
) -> PermGroup:
    """Build a PermGroup from generators via deterministic Schreier–Sims."""
    gens = list(gens)
    if degree is None:
        if not gens:
            raise ValueError("degree is required when no generators are given")
        degree = gens[0].degree
    for g in gens:
        if g.degree != degree:
            raise DegreeMismatch(f"generator of degree {g.degree} in a group of degree {degree}")
    chain = _build_chain(degree, [g.images for g in gens], base_prefix)
    return PermGroup(degree, gens, chain)


def trivial_group(n: int) -> PermGroup:
    return schreier_sims([], degree=n)


def symmetric_group(n: int) -> PermGroup:
    if n == 1:
        return trivial_group(1)
    gens = [Permutation.from_cycles([(0, 1)], n)]
    if n > 2:
        gens.append(Permutation.from_cycles([tuple(range(n))], n))
    return schreier_sims(gens, degree=n)


def cyclic_group(n: int) -> PermGroup:
    if n == 1:
        return trivial_group(1)
    return schreier_sims([Permutation.from_cycles([tuple(range(n))], n)], degree=n)


# ---------------------------------------------------------------------------
# elements, orbits, stabilizers


def elements(G: PermGroup, cap: int | None = None) -> Iterator[Permutation]:
    """Yield every element of G exactly once, identity first.

    Each element is the unique product u_0 u_1 ... u_m of transversal
    representatives, enumerated in lexicographic order of the choices.
    """
    if cap is None:
        cap = current_budget().enum_cap
    if G.order > cap:
        raise BudgetExceeded("element enumeration", G.order, cap)
    levels = [list(t.values()) for t in G._chain.trans]
    identity = tuple(range(G.degree))

    def walk(i: int, acc: Images) -> Iterator[Images]:
        if i == len(levels):
            yield acc
            return
        for u in levels[i]:
            yield from walk(i + 1, mul(acc, u))

    for g in walk(0, identity):
        yield Permutation(g, check=False)


def orbit(G: PermGroup, x: int) -> set[int]:
    if not 0 <= x < G.degree:
        raise ValueError(f"point {x} outside range({G.degree})")
    seen = {x}
    queue = [x]
    gens = [g.images for g in G.generators]
    while queue:
        y = queue.pop()
        for g in gens:
            z = g[y]
            if z not in seen:
                seen.add(z)
                queue.append(z)
    return seen


def orbits(G: PermGroup) -> list[set[int]]:
    """Orbits ordered by their smallest point."""
    out = []
    covered: set[int] = set()
    for x in range(G.degree):
        if x not in covered:
            o = orbit(G, x)
            covered |= o
            out.append(o)
    return out


def is_transitive(G: PermGroup) -> bool:
    return len(orbit(G, 0)) == G.degree


def point_stabilizer(G: PermGroup, x: int) -> PermGroup:
    if not 0 <= x < G.degree:
        raise ValueError(f"point {x} outside range({G.degree})")
    return schreier_sims(G.stabilizer_chain_gens([x]), degree=G.degree)


def pointwise_stabilizer(G: PermGroup, points: Sequence[int]) -> PermGroup:
    return schreier_sims(G.stabilizer_chain_gens(list(points)), degree=G.degree)


def is_regular(G: PermGroup) -> bool:
    return is_transitive(G) and G.order == G.degree


def is_semiregular(G: PermGroup) -> bool:
    return all(len(o) == G.order for o in orbits(G))


def is_abelian(G: PermGroup) -> bool:
    gens = [g.images for g in G.generators]
    return all(mul(a, b) == mul(b, a) for a, b in itertools.combinations(gens, 2))


def is_elementary_abelian(G: PermGroup) -> bool:
    """Abelian with every non-identity element of one prime order.

    The trivial group has no such prime and is reported as False.
    """
    if G.order == 1 or not is_abelian(G):
        return False
    orders = {g.order() for g in G.generators if not g.is_identity()}
    if len(orders) != 1:
        return False
    (p,) = orders
    return _is_prime(p)


# ---------------------------------------------------------------------------
# block systems


@dataclass(frozen=True)
class BlockSystem:
    """A partition of range(degree) into equal blocks, sorted by smallest point."""

    degree: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        sizes = {len(b) for b in self.blocks}
        points = sorted(x for b in self.blocks for x in b)
        if points != list(range(self.degree)) or len(sizes) != 1:
            raise ValueError("blocks must be equal-sized and partition the points")

    @classmethod
    def from_classes(cls, degree: int, classes: Iterable[Iterable[int]]) -> BlockSystem:
        blocks = sorted(tuple(sorted(c)) for c in classes)
        return cls(degree, tuple(blocks))

    @property
    def block_size(self) -> int:
        return len(self.blocks[0])

    @property
    def block_of(self) -> tuple[int, ...]:
        out = [0] * self.degree
        for i, b in enumerate(self.blocks):
            for x in b:
                out[x] = i
        return tuple(out)

    def is_trivial(self) -> bool:
        return len(self.blocks) in (1, self.degree)

    def preserved_by(self, g: Permutation) -> bool:
        bo = self.block_of
        for b in self.blocks:
            if len({bo[g.images[x]] for x in b}) != 1:
                return False
        return True

    def block_image(self, g: Permutation) -> tuple[int, ...]:
        """Induced permutation of block indices; assumes g preserves the system."""
        bo = self.block_of
        return tuple(bo[g.images[b[0]]] for b in self.blocks)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra > rb:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True

    def classes(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for x in range(len(self.parent)):
            groups.setdefault(self.find(x), []).append(x)
        return list(groups.values())


def _block_closure(G: PermGroup, pairs: Iterable[tuple[int, int]]) -> BlockSystem:
    uf = _UnionFind(G.degree)
    gens = [g.images for g in G.generators]
    queue = []
    for a, b in pairs:
        if uf.union(a, b):
            queue.append((a, b))
    while queue:
        a, b = queue.pop()
        for g in gens:
            if uf.union(g[a], g[b]):
                queue.append((g[a], g[b]))
    return BlockSystem.from_classes(G.degree, uf.classes())


def minimal_block_system(G: PermGroup, a: int, b: int) -> BlockSystem:
    """Finest block system of transitive G with a and b in one block."""
    if a == b:
        raise ValueError("a and b must differ")
    if not is_transitive(G):
        raise NotTransitive("block systems are computed for transitive groups only")
    return _block_closure(G, [(a, b)])


def all_block_systems(G: PermGroup) -> list[BlockSystem]:
    """All nontrivial block systems, by block size then lexicographically."""
    if not is_transitive(G):
        raise NotTransitive("block systems are computed for transitive groups only")
    n = G.degree
    found: dict[tuple[int, ...], BlockSystem] = {}
    for b in range(1, n):
        sys_ = minimal_block_system(G, 0, b)
        found.setdefault(sys_.blocks[0], sys_)
    # joins of minimal systems give every system; iterate to closure
    frontier = list(found.values())
    while frontier:
        new = []
        current = list(found.values())
        for s1 in frontier:
            for s2 in current:
                pairs = [(blk[0], x) for blk in s1.blocks + s2.blocks for x in blk[1:]]
                joined = _block_closure(G, pairs)
                if joined.blocks[0] not in found:
                    found[joined.blocks[0]] = joined
                    new.append(joined)
        frontier = new
    systems = [s for s in found.values() if not s.is_trivial()]
    return sorted(systems, key=lambda s: (s.block_size, s.blocks))


def _check_system(G: PermGroup, B: BlockSystem):
    if B.degree != G.degree:
        raise DegreeMismatch("block system and group have different degrees")
    for g in G.generators:
        if not B.preserved_by(g):
            raise PreconditionError(f"generator {g} does not preserve the block system")


def _block_diagonal(G: PermGroup, B: BlockSystem) -> list[Permutation]:
    """Generators acting on points followed by blocks (degree n + m)."""
    n = G.degree
    out = []
    for g in G.generators:
        out.append(Permutation(g.images + tuple(n + i for i in B.block_image(g)), check=False))
    return out


def quotient_action(G: PermGroup, B: BlockSystem) -> PermGroup:
    """The action of G on the blocks of B (blocks indexed as in ``B.blocks``)."""
    _check_system(G, B)
    gens = [Permutation(B.block_image(g), check=False) for g in G.generators]
    return schreier_sims(gens, degree=len(B.blocks))


def block_kernel(G: PermGroup, B: BlockSystem) -> PermGroup:
    """fix_G(B): the elements of G fixing every block setwise."""
    _check_system(G, B)
    n, m = G.degree, len(B.blocks)
    big = schreier_sims(_block_diagonal(G, B), degree=n + m)
    gens = big.stabilizer_chain_gens([n + i for i in range(m)])
    return schreier_sims([Permutation(g.images[:n], check=False) for g in gens], degree=n)


def block_stabilizer(G: PermGroup, B: BlockSystem, index: int) -> PermGroup:
    """Stab_G(B_i): the setwise stabilizer of one block."""
    _check_system(G, B)
    n, m = G.degree, len(B.blocks)
    big = schreier_sims(_block_diagonal(G, B), degree=n + m)
    gens = big.stabilizer_chain_gens([n + index])
    return schreier_sims([Permutation(g.images[:n], check=False) for g in gens], degree=n)


def restrict(g: Permutation, block: Iterable[int]) -> Permutation:
    """g|_B re-indexed so the block's points in increasing order become 0..|B|-1."""
    pts = sorted(block)
    index = {x: i for i, x in enumerate(pts)}
    try:
        return Permutation([index[g.images[x]] for x in pts])
    except KeyError:
        raise PreconditionError("the permutation moves the block") from None


# ---------------------------------------------------------------------------
# conjugacy, wreath products, regular representations


def subgroup_conjugacy(
    G: PermGroup, A: PermGroup, B: PermGroup, cap: int | None = None
) -> Permutation | None:
    """Some g in G with g⁻¹Ag = B, or None after exhausting G."""
    for name, H in (("A", A), ("B", B)):
        if not H.is_subgroup_of(G):
            raise PreconditionError(f"{name} is not contained in G")
    if A.order != B.order:
        return None
    a_gens = [a.images for a in A.generators]
    for g in elements(G, cap):
        gi = invert(g.images)
        if all(B.contains(Permutation(mul(gi, mul(a, g.images)), check=False)) for a in a_gens):
            return g
    return None


def group_wreath(G: PermGroup, H: PermGroup) -> PermGroup:
    """G ≀ H on X×Y, point (x, y) encoded as x*|Y| + y.

    Top group G permutes fibers; a copy of H acts on each fiber.
    """
    nx, ny = G.degree, H.degree
    n = nx * ny
    gens = []
    for g in G.generators:
        gens.append(Permutation([g.images[x] * ny + y for x in range(nx) for y in range(ny)], check=False))
    reps = [min(o) for o in orbits(G)]
    for h in H.generators:
        for r in reps:
            gens.append(
                Permutation(
                    [x * ny + (h.images[y] if x == r else y) for x in range(nx) for y in range(ny)],
                    check=False,
                )
            )
    return schreier_sims(gens, degree=n)


def left_regular_representation(spec: GroupSpec) -> PermGroup:
    """(Z_p x Z_2^d)_L: a p-cycle translation (if p > 1) and d bit flips."""
    gens = []
    if spec.p > 1:
        gens.append(spec.translation(spec.encode(1, 0)))
    for k in range(spec.d):
        gens.append(spec.translation(spec.encode(0, 1 << k)))
    return schreier_sims(gens, degree=spec.order)


# ---------------------------------------------------------------------------
# group file I/O


def format_group(G: PermGroup | Sequence[Permutation], degree: int | None = None) -> str:
    if isinstance(G, PermGroup):
        degree, gens = G.degree, G.generators
    else:
        gens = list(G)
        if degree is None:
            degree = gens[0].degree
    lines = [f"degree {degree}"] + [g.cycle_string() for g in gens]
    return "\n".join(lines) + "\n"


def parse_group_text(text: str) -> tuple[int, list[Permutation]]:
    """Parse the ``degree n`` + one-generator-per-line format."""
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise FormatError("empty group file", 1)
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 2 or parts[0] != "degree":
        raise FormatError(f"expected 'degree n', got {header!r}", lineno)
    try:
        n = int(parts[1])
    except ValueError:
        raise FormatError(f"bad degree {parts[1]!r}", lineno) from None
    if n <= 0:
        raise FormatError("degree must be positive", lineno)
    gens = []
    for lineno, ln in lines[1:]:
        try:
            gens.append(Permutation.parse(ln, n))
        except ValueError as exc:
            raise FormatError(str(exc), lineno) from None
    return n, gens


def read_group(path) -> PermGroup:
    with open(path, encoding="utf-8") as fh:
        n, gens = parse_group_text(fh.read())
    return schreier_sims(gens, degree=n)


def write_group(path, G: PermGroup | Sequence[Permutation], degree: int | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_group(G, degree))
