"""Witness pairs showing Z_p x Z_2^d is not a CI-group for ternary structures.

Points of Z_p x Z_2^d are labelled i*2^d + v (see :class:`GroupSpec`).  Given a
group automorphism α of Z_2^d of odd prime order p fixing only 0, the
construction builds a Cayley ternary structure X together with γ(i, j) =
(i, α^i(j)) such that X and Y = γ(X) are isomorphic but no automorphism of
Z_p x Z_2^d maps one onto the other.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .autgrp import aut_group, search_group_automorphism_iso
from .exceptions import DegreeMismatch, FormatError, PreconditionError
from .group import (
    GroupSpec,
    PermGroup,
    _is_prime,
    is_transitive,
    left_regular_representation,
    parse_group_text,
    point_stabilizer,
    schreier_sims,
    subgroup_conjugacy,
    write_group,
)
from .perm import Permutation, commutator, compose
from .relstruct import (
    ColorRelStruct,
    ConnectionSet,
    apply_perm,
    cayley_structure,
    is_automorphism,
    orbit_coloring,
    read_structure,
    write_structure,
)

log = logging.getLogger(__name__)

# primitive polynomials over GF(2), bit i is the coefficient of x^i
PRIMITIVE_POLYNOMIALS = {1: 0b11, 2: 0b111, 3: 0b1011, 4: 0b10011}

SUPPORTED = {(3, 2), (7, 3), (5, 4)}


# ---------------------------------------------------------------------------
# fixed-point-free automorphisms of Z_2^d


def _gf2_mulmod(a: int, b: int, poly: int, d: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> d & 1:
            a ^= poly
    return out


def _is_primitive(poly: int, d: int) -> bool:
    order = (1 << d) - 1
    x, val = 2 if d > 1 else 1, 1
    for step in range(1, order + 1):
        val = _gf2_mulmod(val, x, poly, d)
        if val == 1:
            return step == order
    return False


def primitive_polynomial(d: int) -> int:
    if d in PRIMITIVE_POLYNOMIALS:
        return PRIMITIVE_POLYNOMIALS[d]
    for poly in range((1 << d) | 1, 1 << (d + 1), 2):
        if _is_primitive(poly, d):
            return poly
    raise ValueError(f"no primitive polynomial of degree {d}")


def fixed_point_free_automorphism(d: int, p: int) -> Permutation:
    """Multiplication by x^((2^d-1)/p) in GF(2)[x]/(f) for primitive f.

    This is the power C^((2^d-1)/p) of the companion matrix of f acting on
    the 2^d vectors of Z_2^d; it has order p and fixes only 0.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if p < 3 or not _is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    if ((1 << d) - 1) % p:
        raise ValueError(f"{p} does not divide 2^{d}-1 = {(1 << d) - 1}")
    poly = primitive_polynomial(d)
    exponent = ((1 << d) - 1) // p
    mult = 1
    for _ in range(exponent):
        mult = _gf2_mulmod(mult, 2, poly, d)
    return Permutation([_gf2_mulmod(v, mult, poly, d) for v in range(1 << d)])


def is_linear(alpha: Permutation, d: int) -> bool:
    img = alpha.images
    return img[0] == 0 and all(
        img[u ^ v] == img[u] ^ img[v] for u in range(1 << d) for v in (1 << j for j in range(d))
    )


# ---------------------------------------------------------------------------
# digraph with a prescribed semiregular automorphism group


def semiregular_digraph(m: int, s: int) -> ColorRelStruct:
    """Digraph on ms vertices whose automorphism group is generated by the
    simultaneous rotation of the blocks {im, ..., im+m-1}.

    Block 0 carries the directed m-cycle.  Block j >= 1 gets its own directed
    cycle, and vertex jm points to (j-1)m and to every out-neighbour of (j-1)m
    outside block j-1; those arcs are then closed under the rotation of
    blocks 0..j.
    """
    if m < 2 or s < 1:
        raise ValueError("need m >= 2 and s >= 1")

    def rot(x: int, r: int) -> int:
        blk, off = divmod(x, m)
        return blk * m + (off + r) % m

    arcs: set[tuple[int, int]] = {(t, (t + 1) % m) for t in range(m)}
    for j in range(1, s):
        lo = j * m
        arcs |= {(lo + t, lo + (t + 1) % m) for t in range(m)}
        prev = (j - 1) * m
        heads = [prev] + sorted(h for (a, h) in arcs if a == prev and not prev <= h < prev + m)
        for r in range(m):
            for h in heads:
                arcs.add((rot(lo, r), rot(h, r)))
    return ColorRelStruct(m * s, 2, {a: 0 for a in sorted(arcs)})


def semiregular_rotation(m: int, s: int) -> Permutation:
    return Permutation([(x // m) * m + (x % m + 1) % m for x in range(m * s)])


def orbit_relabeling(alpha: Permutation) -> dict[int, int]:
    """Map digraph vertex i*m + t to α^t(o_i), o_i the smallest point of the
    i-th non-trivial α-orbit (orbits sorted by smallest point)."""
    cycles = sorted(alpha.cycles())
    m = len(cycles[0]) if cycles else 1
    out = {}
    for i, c in enumerate(cycles):
        if len(c) != m:
            raise PreconditionError("α is not semiregular off its fixed points")
        x = c[0]
        for t in range(m):
            out[i * m + t] = x
            x = alpha.images[x]
    return out


# ---------------------------------------------------------------------------
# lifting a point stabilizer structure


def _pinned(Y: ColorRelStruct, x: int) -> ColorRelStruct:
    edges = dict(Y.edges)
    edges[(x,) * Y.k] = Y.fresh_color()
    return ColorRelStruct(Y.n, Y.k, edges)


def lift_stab_structure(G: PermGroup, x: int, Y: ColorRelStruct, verify: bool = True) -> ColorRelStruct:
    """A (k+1)-ary structure with automorphism group G, built from a k-ary
    structure Y on the other points whose automorphisms are Stab_G(x).

    Y is given on all G.degree points and must not use ``x``.  Its edges are
    prefixed by ``x`` and the result is the union of their G-orbits.
    """
    if Y.n != G.degree:
        raise DegreeMismatch(f"Y has {Y.n} vertices but G has degree {G.degree}")
    if not is_transitive(G):
        raise PreconditionError("G must be transitive")
    if any(x in t for t in Y.edges):
        raise PreconditionError(f"Y must not use the lifted point {x}")
    stab = point_stabilizer(G, x)
    aut_y = aut_group(_pinned(Y, x))
    if not aut_y.same_group(stab):
        raise PreconditionError(
            f"Aut(Y) off {x} has order {aut_y.order}, Stab_G({x}) has order {stab.order}"
        )
    gens = [g.images for g in G.generators]
    edges: dict[tuple[int, ...], int] = {}
    for t, c in sorted(Y.edges.items()):
        w = (x,) + t
        if w in edges:
            continue
        edges[w] = c
        stack = [w]
        while stack:
            e = stack.pop()
            for g in gens:
                img = tuple(g[v] for v in e)
                prev = edges.get(img)
                if prev is None:
                    edges[img] = c
                    stack.append(img)
                elif prev != c:
                    raise PreconditionError("G-orbits of differently colored edges collide")
    X = ColorRelStruct(G.degree, Y.k + 1, edges)
    if verify:
        aut_x = aut_group(X)
        if not aut_x.same_group(G):
            raise PreconditionError(f"lifted structure has automorphism group of order {aut_x.order}, not {G.order}")
    return X


# ---------------------------------------------------------------------------
# partitions into equal blocks


def even_partition_mapper(P1, P2) -> Permutation:
    """An even permutation carrying each block of P1 onto a block of P2."""
    b1 = sorted(sorted(b) for b in P1)
    b2 = sorted(sorted(b) for b in P2)
    n = sum(len(b) for b in b1)
    for P in (b1, b2):
        if sorted(x for b in P for x in b) != list(range(n)):
            raise ValueError("blocks must partition range(n)")
    sizes = {len(b) for b in b1} | {len(b) for b in b2}
    if len(sizes) != 1 or len(b1) != len(b2):
        raise ValueError("partitions must have the same number of equal-sized blocks")
    (size,) = sizes
    if size < 2:
        raise ValueError("blocks must have at least two points")
    img = [0] * n
    for src, dst in zip(b1, b2):
        for a, b in zip(src, dst):
            img[a] = b
    phi = Permutation(img)
    if phi.sign() < 0:
        last = b2[-1]
        swap = Permutation.from_cycles([(last[0], last[1])], n)
        phi = swap * phi
    return phi


# ---------------------------------------------------------------------------
# the witness construction


@dataclass(frozen=True)
class WitnessSpec:
    p: int
    d: int
    alpha: Permutation
    mode: str = "color"

    def __post_init__(self):
        if self.mode not in ("color", "plain"):
            raise ValueError(f"mode must be 'color' or 'plain', got {self.mode!r}")
        if self.p < 3 or not _is_prime(self.p):
            raise ValueError(f"p must be an odd prime, got {self.p}")
        a = self.alpha
        if a.degree != 1 << self.d:
            raise ValueError(f"α must act on the {1 << self.d} vectors of Z_2^{self.d}")
        if a.order() != self.p:
            raise ValueError(f"α has order {a.order()}, expected {self.p}")
        if a.fixed_points() != [0]:
            raise ValueError("α must fix only the zero vector")
        if not is_linear(a, self.d):
            raise ValueError("α is not a group automorphism of Z_2^d")

    @classmethod
    def standard(cls, p: int, d: int, mode: str = "color") -> WitnessSpec:
        return cls(p, d, fixed_point_free_automorphism(d, p), mode)

    @property
    def group(self) -> GroupSpec:
        return GroupSpec(self.p, self.d)


def hat(spec: WitnessSpec, g: int) -> Permutation:
    """ĝ(i, j) = (i, j + g)."""
    f = 1 << spec.d
    return Permutation([i * f + (v ^ g) for i in range(spec.p) for v in range(f)], check=False)


def tau(spec: WitnessSpec) -> Permutation:
    """τ(i, j) = (i + 1, j)."""
    f = 1 << spec.d
    return Permutation([((i + 1) % spec.p) * f + v for i in range(spec.p) for v in range(f)], check=False)


def gamma(spec: WitnessSpec) -> Permutation:
    """γ(i, j) = (i, α^i(j))."""
    f = 1 << spec.d
    images = []
    for i in range(spec.p):
        a = (spec.alpha**i).images
        images.extend(i * f + a[v] for v in range(f))
    return Permutation(images, check=False)


def alpha_bar(spec: WitnessSpec) -> Permutation:
    """ᾱ(i, j) = (i, α(j))."""
    f = 1 << spec.d
    a = spec.alpha.images
    return Permutation([i * f + a[v] for i in range(spec.p) for v in range(f)], check=False)


def base_group(spec: WitnessSpec) -> PermGroup:
    """⟨(Z_2^d)_L, α⟩ on the 2^d vectors."""
    GL = left_regular_representation(GroupSpec(1, spec.d))
    return schreier_sims(list(GL.generators) + [spec.alpha], degree=1 << spec.d)


def plain_seed_digraph(spec: WitnessSpec) -> tuple[ColorRelStruct, dict[int, int]]:
    """The semiregular digraph for ⟨α⟩ moved onto the non-zero vectors."""
    m = spec.p
    s = ((1 << spec.d) - 1) // m
    D = semiregular_digraph(m, s)
    relabel = orbit_relabeling(spec.alpha)
    edges = {tuple(relabel[x] for x in t): c for t, c in D.edges.items()}
    return ColorRelStruct(1 << spec.d, 2, edges), relabel


def build_Z(spec: WitnessSpec, verify: bool = True) -> ColorRelStruct:
    """A ternary structure on Z_2^d with automorphism group ⟨(Z_2^d)_L, α⟩."""
    G = base_group(spec)
    if spec.mode == "color":
        Z = orbit_coloring(G, 3)
    else:
        seed, _ = plain_seed_digraph(spec)
        Z = lift_stab_structure(G, 0, seed, verify=False)
    if verify:
        A = aut_group(Z)
        if not A.same_group(G):
            raise PreconditionError(f"Aut(Z) has order {A.order}, expected {G.order}")
    return Z


def closed_form_s_minus_u(spec: WitnessSpec) -> list[tuple[int, int]]:
    """((1, α⁻¹(g)+g), (2, α⁻²(g)+g)) for every g in Z_2^d, indexed by g."""
    f = 1 << spec.d
    inv1 = spec.alpha.inverse().images
    inv2 = (spec.alpha**-2).images
    return [(1 * f + (inv1[g] ^ g), 2 * f + (inv2[g] ^ g)) for g in range(f)]


def commutator_s_minus_u(spec: WitnessSpec) -> list[tuple[int, int]]:
    """([ĝ,γ](1,0), [ĝ,γ](2,0)) by direct evaluation of the commutators."""
    f = 1 << spec.d
    gm = gamma(spec)
    out = []
    for g in range(f):
        c = commutator(hat(spec, g), gm)
        out.append((c(1 * f), c(2 * f)))
    return out


@dataclass
class WitnessBundle:
    spec: WitnessSpec
    Z: ColorRelStruct
    U: dict[tuple[int, int], int]
    S: dict[tuple[int, int], int]
    fresh_color: int
    gamma: Permutation
    tau: Permutation
    alpha_bar: Permutation
    X: ColorRelStruct
    Y: ColorRelStruct
    relabeling: dict[int, int] | None = None
    report: WitnessReport | None = None

    @property
    def s_minus_u(self) -> set[tuple[int, int]]:
        return set(self.S) - set(self.U)


def theorem_main_construct(spec: WitnessSpec, Z: ColorRelStruct | None = None) -> WitnessBundle:
    """Build U, S, X and Y = γ(X) from a structure Z on Z_2^d."""
    if Z is None:
        Z = build_Z(spec)
    f = 1 << spec.d
    if Z.n != f or Z.k != 3:
        raise PreconditionError("Z must be a ternary structure on Z_2^d")
    U = {(g, h): c for (o, g, h), c in Z.edges.items() if o == 0}
    closed = closed_form_s_minus_u(spec)
    if closed != commutator_s_minus_u(spec):
        raise PreconditionError("closed form disagrees with the commutator evaluation")
    # a plain Z gives a plain X: all edges share Z's single color
    if spec.mode == "color":
        fresh = Z.fresh_color()
    else:
        fresh = min(Z.colors(), default=0)
    S = dict(U)
    for pair in closed:
        S[pair] = fresh
    X = cayley_structure(ConnectionSet(spec.group, S), 3)
    gm = gamma(spec)
    Y = apply_perm(X, gm)
    relabel = plain_seed_digraph(spec)[1] if spec.mode == "plain" else None
    return WitnessBundle(spec, Z, U, S, fresh, gm, tau(spec), alpha_bar(spec), X, Y, relabel)


# ---------------------------------------------------------------------------
# verification


@dataclass
class Verdict:
    name: str
    passed: bool
    detail: str = ""
    ms: float = 0.0
    skipped: bool = False

    @property
    def status(self) -> str:
        if self.skipped:
            return "SKIP"
        return "PASS" if self.passed else "FAIL"

    def as_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "detail": self.detail, "ms": round(self.ms, 3)}


@dataclass
class WitnessReport:
    p: int
    d: int
    mode: str
    verdicts: list[Verdict]
    stats: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return all(v.passed for v in self.verdicts)

    @property
    def overall(self) -> str:
        return "NOT-CI-WITNESS-VALID" if self.valid else "NOT-CI-WITNESS-INVALID"

    def as_dict(self) -> dict:
        return {"p": self.p, "d": self.d, "mode": self.mode, "overall": self.overall,
                "verdicts": [v.as_dict() for v in self.verdicts], "stats": self.stats}


def _timed(name, fn) -> Verdict:
    t0 = time.perf_counter()
    passed, detail = fn()
    return Verdict(name, passed, detail, (time.perf_counter() - t0) * 1000)


def verify_witness(b: WitnessBundle, threads: int = 1) -> WitnessReport:
    spec, X, Y = b.spec, b.X, b.Y
    HL = left_regular_representation(spec.group)
    stats: dict = {}

    def translations():
        bad = [g for g in HL.generators if not is_automorphism(X, g)]
        return not bad, f"{len(HL.generators) - len(bad)}/{len(HL.generators)} generators"

    def alpha_bar_aut():
        return is_automorphism(X, b.alpha_bar), str(b.alpha_bar)

    def conjugated_regular():
        gi = b.gamma.inverse()
        conj = [compose(gi, compose(g, b.gamma)) for g in HL.generators]
        bad = [g for g in conj if not is_automorphism(X, g)]
        return not bad, f"{len(conj) - len(bad)}/{len(conj)} generators of γ⁻¹(Z_p×Z_2^d)_Lγ"

    def distinct():
        moved = {(b.gamma(s1), b.gamma(s2)) for s1, s2 in b.s_minus_u}
        common = len(moved & b.s_minus_u)
        stats["s_minus_u"] = len(b.s_minus_u)
        stats["gamma_s_minus_u_overlap"] = common
        return X != Y, f"{len(set(X.edges.items()) ^ set(Y.edges.items()))} edges differ; |γ(S−U) ∩ (S−U)| = {common}"

    def no_group_iso():
        res = search_group_automorphism_iso(X, Y, spec.group)
        stats["beta_examined"] = res.examined
        stats["beta_total"] = res.total
        if res.beta is not None:
            return False, f"β = {res.beta} maps X onto Y"
        return True, f"none among {res.examined} of {res.total} automorphisms ({res.method})"

    checks = [
        ("translations_in_aut_X", translations),
        ("alpha_bar_in_aut_X", alpha_bar_aut),
        ("conjugated_regular_in_aut_X", conjugated_regular),
        ("X_differs_from_Y", distinct),
        ("no_group_automorphism_iso", no_group_iso),
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            verdicts = list(pool.map(lambda item: _timed(*item), checks))
    else:
        verdicts = [_timed(*item) for item in checks]
    report = WitnessReport(spec.p, spec.d, spec.mode, verdicts, stats)
    b.report = report
    return report


@dataclass
class CICheckResult:
    conjugator: Permutation | None
    aut_order: int

    @property
    def conjugate(self) -> bool:
        return self.conjugator is not None


def ci_check(X: ColorRelStruct, H_spec: GroupSpec, phi: Permutation) -> CICheckResult:
    """Decide whether H_L and φ⁻¹H_Lφ are conjugate inside Aut(X).

    A ``None`` conjugator certifies that this Cayley structure witnesses
    failure of the CI property for H.
    """
    if X.n != H_spec.order or phi.degree != X.n:
        raise DegreeMismatch("X, H and φ must share one point set")
    HL = left_regular_representation(H_spec)
    if not all(is_automorphism(X, g) for g in HL.generators):
        raise PreconditionError("X is not a Cayley structure of H")
    pinv = phi.inverse()
    conj_gens = [compose(pinv, compose(g, phi)) for g in HL.generators]
    if not all(is_automorphism(X, g) for g in conj_gens):
        raise PreconditionError("φ⁻¹H_Lφ is not contained in Aut(X)")
    A = aut_group(X)
    K = schreier_sims(conj_gens, degree=X.n)
    return CICheckResult(subgroup_conjugacy(A, HL, K), A.order)


def regular_conjugator(H_spec: GroupSpec, W: PermGroup) -> Permutation:
    """φ with φ⁻¹H_Lφ = W for a regular W isomorphic to Z_2^d (p = 1 only)."""
    if H_spec.p != 1 or len(W.generators) != H_spec.d:
        raise PreconditionError("expected d generators of a regular elementary abelian 2-group")
    n = H_spec.order
    # ψ(v) = w(v)(0) where w(v) is the product of W-generators selected by the bits of v
    psi = [0] * n
    for v in range(n):
        x = 0
        for j, g in enumerate(W.generators):
            if v >> j & 1:
                x = g.images[x]
        psi[v] = x
    return Permutation(psi).inverse()


# ---------------------------------------------------------------------------
# bundle directory


def write_bundle(b: WitnessBundle, out_dir, extra: dict | None = None) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spec = b.spec
    lines = [f"p {spec.p}", f"d {spec.d}", f"alpha {spec.alpha.cycle_string()}", f"mode {spec.mode}"]
    (out / "spec.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    write_structure(out / "Z.rs", b.Z)
    write_structure(out / "X.rs", b.X)
    write_structure(out / "Y.rs", b.Y)
    write_group(out / "gamma.perm", [b.gamma])
    payload = dict(extra or {})
    if b.report is not None:
        payload.update(b.report.as_dict())
    if b.relabeling is not None:
        payload["relabeling"] = {str(k): v for k, v in sorted(b.relabeling.items())}
    (out / "report.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return out


def read_spec_file(path) -> WitnessSpec:
    fields = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            key, _, value = line.strip().partition(" ")
            fields[key] = value.strip()
    p, d = int(fields["p"]), int(fields["d"])
    alpha = Permutation.parse(fields["alpha"], 1 << d)
    return WitnessSpec(p, d, alpha, fields.get("mode", "color"))


def load_bundle(out_dir) -> WitnessBundle:
    """Reload a bundle written by :func:`write_bundle`; U and S come from the files."""
    out = Path(out_dir)
    spec = read_spec_file(out / "spec.txt")
    Z = read_structure(out / "Z.rs")
    X = read_structure(out / "X.rs")
    Y = read_structure(out / "Y.rs")
    n, gm_list = parse_group_text((out / "gamma.perm").read_text(encoding="utf-8"))
    if n != spec.group.order or len(gm_list) != 1:
        raise FormatError(f"gamma.perm must hold one permutation of degree {spec.group.order}")
    gm = gm_list[0]
    U = {(g, h): c for (o, g, h), c in Z.edges.items() if o == 0}
    S = {(a, c2): c for (o, a, c2), c in X.edges.items() if o == 0}
    fresh = max(set(S.values()) - set(U.values()), default=min(S.values(), default=0))
    return WitnessBundle(spec, Z, U, S, fresh, gm, tau(spec), alpha_bar(spec), X, Y)


def witness_for(p: int, d: int, mode: str = "color") -> tuple[WitnessBundle, WitnessReport]:
    spec = WitnessSpec.standard(p, d, mode)
    bundle = theorem_main_construct(spec)
    return bundle, verify_witness(bundle)
