"""A ternary Cayley structure of Z_2^5 whose automorphism group (order 2048)
contains two non-conjugate regular copies of Z_2^5.

Generators are stored exactly as listed, in 1-indexed cycle notation.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

from .autgrp import aut_group
from .exceptions import BudgetExceeded, PreconditionError
from .group import (
    GroupSpec,
    PermGroup,
    is_elementary_abelian,
    is_regular,
    schreier_sims,
    subgroup_conjugacy,
)
from .perm import Permutation
from .relstruct import ColorRelStruct, is_automorphism
from .witness import Verdict, regular_conjugator

DEGREE = 32

V_GENERATORS = (
    "(1,2)(3,4)(5,6)(7,8)(9,10)(11,12)(13,14)(15,16)(17,18)(19,20)(21,22)(23,24)(25,26)(27,28)(29,30)(31,32)",
    "(1,3)(2,4)(5,7)(6,8)(9,11)(10,12)(13,15)(14,16)(17,19)(18,20)(21,23)(22,24)(25,27)(26,28)(29,31)(30,32)",
    "(1,5)(2,6)(3,7)(4,8)(9,13)(10,14)(11,15)(12,16)(17,21)(18,22)(19,23)(20,24)(25,29)(26,30)(27,31)(28,32)",
    "(1,9)(2,10)(3,11)(4,12)(5,13)(6,14)(7,15)(8,16)(17,25)(18,26)(19,27)(20,28)(21,29)(22,30)(23,31)(24,32)",
    "(1,17)(2,18)(3,19)(4,20)(5,21)(6,22)(7,23)(8,24)(9,25)(10,26)(11,27)(12,28)(13,29)(14,30)(15,31)(16,32)",
)

W_GENERATORS = (
    "(1,2)(3,4)(5,6)(7,8)(9,10)(11,12)(13,14)(15,16)(17,18)(19,20)(21,22)(23,24)(25,26)(27,28)(29,30)(31,32)",
    "(1,3)(2,4)(5,7)(6,8)(9,11)(10,12)(13,15)(14,16)(17,20)(18,19)(21,24)(22,23)(25,28)(26,27)(29,32)(30,31)",
    "(1,5)(2,6)(3,7)(4,8)(9,14)(10,13)(11,16)(12,15)(17,22)(18,21)(19,24)(20,23)(25,29)(26,30)(27,31)(28,32)",
    "(1,9)(2,10)(3,11)(4,12)(5,14)(6,13)(7,16)(8,15)(17,27)(18,28)(19,25)(20,26)(21,32)(22,31)(23,30)(24,29)",
    "(1,17)(2,18)(3,20)(4,19)(5,22)(6,21)(7,23)(8,24)(9,27)(10,28)(11,26)(12,25)(13,32)(14,31)(15,29)(16,30)",
)

EXTRA_GENERATORS = (
    "(25,26)(27,28)(29,30)(31,32)",
    "(1,11)(2,12)(3,9)(4,10)(5,13)(6,14)(7,15)(8,16)(17,19)(18,20)(25,27)(26,28)",
)

# 1-indexed seed triples whose G-orbits form the edge set
SEEDS = ((1, 3, 9), (1, 5, 25))

# |E(X)|, computed once by orbit expansion under the order-2048 group
EDGE_COUNT = 384


@dataclass(frozen=True)
class CounterexampleData:
    v_gens: tuple[str, ...] = V_GENERATORS
    w_gens: tuple[str, ...] = W_GENERATORS
    extra_gens: tuple[str, ...] = EXTRA_GENERATORS
    seeds: tuple[tuple[int, ...], ...] = SEEDS

    def all_cycle_strings(self) -> list[tuple[str, int, str]]:
        out = []
        for name, gens in (("V", self.v_gens), ("W", self.w_gens), ("extra", self.extra_gens)):
            out.extend((name, i, s) for i, s in enumerate(gens))
        return out

    def drop_transposition(self, family: str, index: int, which: int) -> CounterexampleData:
        """Copy of the data with one transposition removed from one generator."""
        attr = {"V": "v_gens", "W": "w_gens", "extra": "extra_gens"}[family]
        gens = list(getattr(self, attr))
        cycles = [c + ")" for c in gens[index].split(")") if c]
        del cycles[which]
        gens[index] = "".join(cycles) or "()"
        return replace(self, **{attr: tuple(gens)})


@dataclass
class Counterexample:
    V: PermGroup
    W: PermGroup
    G: PermGroup
    X: ColorRelStruct
    seed_orbit_sizes: tuple[int, ...]


def _parse(gens) -> list[Permutation]:
    return [Permutation.parse(s, DEGREE) for s in gens]


def orbit_edges(G: PermGroup, seeds) -> tuple[dict[tuple[int, ...], int], list[int]]:
    """Union of the G-orbits of 0-indexed seed tuples, one color."""
    gens = [g.images for g in G.generators]
    edges: dict[tuple[int, ...], int] = {}
    sizes = []
    for seed in seeds:
        orbit = {seed}
        stack = [seed]
        while stack:
            e = stack.pop()
            for g in gens:
                img = tuple(g[x] for x in e)
                if img not in orbit:
                    orbit.add(img)
                    stack.append(img)
        sizes.append(len(orbit))
        for e in orbit:
            edges[e] = 0
    return edges, sizes


def load_counterexample(data: CounterexampleData | None = None) -> Counterexample:
    data = data or CounterexampleData()
    v_gens, w_gens = _parse(data.v_gens), _parse(data.w_gens)
    V = schreier_sims(v_gens, degree=DEGREE)
    W = schreier_sims(w_gens, degree=DEGREE)
    G = schreier_sims(v_gens + w_gens + _parse(data.extra_gens), degree=DEGREE)
    seeds = [tuple(x - 1 for x in s) for s in data.seeds]
    edges, sizes = orbit_edges(G, seeds)
    return Counterexample(V, W, G, ColorRelStruct(DEGREE, 3, edges), tuple(sizes))


@dataclass
class CounterexampleReport:
    verdicts: list[Verdict]
    orders: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def as_dict(self) -> dict:
        return {
            "overall": "PASS" if self.valid else "FAIL",
            "verdicts": [v.as_dict() for v in self.verdicts],
            "orders": self.orders,
            **self.info,
        }


CONCLUSION = (
    "V and W are regular copies of Z_2^5 inside Aut(X) that are not conjugate there; "
    "with φ chosen so that φ⁻¹V φ = W, the Cayley structure X shows Z_2^5 is not a CI-group "
    "for ternary relational structures."
)


def verify_counterexample(data: CounterexampleData | None = None, skip_full_aut: bool = False) -> CounterexampleReport:
    t0 = time.perf_counter()
    ce = load_counterexample(data)
    load_ms = (time.perf_counter() - t0) * 1000
    V, W, G, X = ce.V, ce.W, ce.G, ce.X
    verdicts = []

    def timed(name, fn):
        t = time.perf_counter()
        try:
            passed, detail = fn()
        except (BudgetExceeded, PreconditionError) as exc:
            # a broken listing can blow up G; that is a failed check, not a crash
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        verdicts.append(Verdict(name, passed, detail, (time.perf_counter() - t) * 1000))

    timed("a_order_G_2048", lambda: (G.order == 2048, f"|G| = {G.order}"))

    def regular_ea():
        ok = all(H.order == 32 and is_regular(H) and is_elementary_abelian(H) for H in (V, W))
        return ok, f"|V| = {V.order}, |W| = {W.order}"

    timed("b_V_W_regular_elementary_abelian_32", regular_ea)

    def in_aut():
        bad = [g for g in V.generators + W.generators if not is_automorphism(X, g)]
        return not bad, f"{10 - len(bad)}/10 generators preserve E(X)"

    timed("c_V_W_in_aut_X", in_aut)

    if skip_full_aut:
        verdicts.append(Verdict("d_aut_X_equals_G", True, "skipped (--skip-full-aut)", skipped=True))
    else:
        def full_aut():
            A = aut_group(X)
            same = A.same_group(G)
            return same and A.order == 2048, f"|Aut(X)| = {A.order}, equal to G: {same}"

        timed("d_aut_X_equals_G", full_aut)

    def nonconjugate():
        if not (V.is_subgroup_of(G) and W.is_subgroup_of(G)):
            return False, "V or W not contained in G"
        g = subgroup_conjugacy(G, V, W)
        if g is not None:
            return False, f"conjugator {g}"
        return True, f"no conjugator among all {G.order} elements of G"

    timed("e_V_W_not_conjugate_in_G", nonconjugate)

    phi = None
    try:
        phi = regular_conjugator(GroupSpec(1, 5), W)
    except (PreconditionError, ValueError):  # mutated data may leave W irregular
        pass
    info = {
        "edge_count": len(X),
        "seed_orbit_sizes": list(ce.seed_orbit_sizes),
        "seeds_1_indexed": [list(s) for s in (data or CounterexampleData()).seeds],
        "seeds_0_indexed": [[x - 1 for x in s] for s in (data or CounterexampleData()).seeds],
        "phi": phi.cycle_string() if phi is not None else None,
        "full_aut_skipped": skip_full_aut,
        "load_ms": round(load_ms, 3),
        "conclusion": CONCLUSION,
    }
    return CounterexampleReport(verdicts, {"G": G.order, "V": V.order, "W": W.order}, info)
