"""Command line front end: ``cayleyci <command> ...``.

Every command prints a plain-text report and, with ``--json PATH``, writes
the same report as JSON.  Exit status is 0 when every verdict passes, 1 when
some verdict fails and 2 for usage, parse, precondition or budget errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .autgrp import aut_group, k_closure
from .exceptions import BudgetExceeded
from .group import (
    GroupSpec,
    all_block_systems,
    block_kernel,
    is_transitive,
    orbits,
    parse_group_text,
    quotient_action,
    read_group,
    write_group,
)
from .relstruct import read_structure, write_structure
from .witness import (
    SUPPORTED,
    Verdict,
    WitnessSpec,
    ci_check,
    fixed_point_free_automorphism,
    load_bundle,
    theorem_main_construct,
    verify_witness,
    write_bundle,
)
from .z2five import CounterexampleData, load_counterexample, verify_counterexample

log = logging.getLogger("cayleyci")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunReport:
    """What a command did: inputs, verdicts, results and timings."""

    command: list[str]
    inputs: dict[str, str] = field(default_factory=dict)
    verdicts: list[Verdict] = field(default_factory=list)
    results: dict = field(default_factory=dict)
    timings_ms: dict[str, float] = field(default_factory=dict)
    version: str = __version__

    def add_input(self, path) -> Path:
        path = Path(path)
        self.inputs[str(path)] = hashlib.sha256(path.read_bytes()).hexdigest()
        return path

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "verdicts": [v.as_dict() for v in self.verdicts],
            "results": self.results,
            "timings_ms": {k: round(v, 3) for k, v in self.timings_ms.items()},
            "version": self.version,
            "overall": "PASS" if self.passed else "FAIL",
        }

    def text(self) -> str:
        lines = [f"cayleyci {self.version}: {' '.join(self.command)}"]
        for path, digest in self.inputs.items():
            lines.append(f"  input {path} sha256={digest[:16]}")
        for key, value in self.results.items():
            if isinstance(value, (list, dict)):
                value = json.dumps(value)
            lines.append(f"  {key}: {value}")
        for v in self.verdicts:
            lines.append(f"  [{v.status}] {v.name}: {v.detail}")
        total = sum(self.timings_ms.values())
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} ({total:.1f} ms)")
        return "\n".join(lines)


class _Timer:
    def __init__(self, report: RunReport, name: str):
        self.report, self.name = report, name

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.report.timings_ms[self.name] = (time.perf_counter() - self.t0) * 1000
        return False


# ---------------------------------------------------------------------------
# commands


def _witness_spec(args) -> WitnessSpec:
    if args.p is None or args.d is None:
        raise ValueError("--p and --d are required")
    # raises ValueError when p does not divide 2^d - 1
    alpha = fixed_point_free_automorphism(args.d, args.p)
    if (args.p, args.d) not in SUPPORTED:
        log.warning("(p, d) = (%d, %d) is outside the verified set %s", args.p, args.d, sorted(SUPPORTED))
    return WitnessSpec(args.p, args.d, alpha, args.mode)


def cmd_witness(args, report: RunReport) -> None:
    if args.action == "verify" and args.in_dir:
        src = Path(args.in_dir)
        for name in ("spec.txt", "Z.rs", "X.rs", "Y.rs", "gamma.perm"):
            report.add_input(src / name)
        with _Timer(report, "load"):
            bundle = load_bundle(src)
    else:
        spec = _witness_spec(args)
        with _Timer(report, "construct"):
            bundle = theorem_main_construct(spec)
    with _Timer(report, "verify"):
        wr = verify_witness(bundle, threads=args.threads)
    spec = bundle.spec
    report.verdicts.extend(wr.verdicts)
    report.results.update(
        group=spec.group.label(),
        mode=spec.mode,
        alpha=spec.alpha.cycle_string(),
        Z_edges=len(bundle.Z),
        X_edges=len(bundle.X),
        overall=wr.overall,
        **wr.stats,
    )
    if args.out:
        with _Timer(report, "write"):
            write_bundle(bundle, args.out, extra={"version": __version__})
        report.results["bundle"] = str(args.out)


def cmd_aut(args, report: RunReport) -> None:
    X = read_structure(report.add_input(args.in_file))
    with _Timer(report, "aut_group"):
        A = aut_group(X)
    report.results.update(n=X.n, k=X.k, edges=len(X), order=A.order, base=list(A.base),
                          generators=[g.cycle_string() for g in A.generators])
    if args.out:
        write_group(args.out, A)


def cmd_closure(args, report: RunReport) -> None:
    G = read_group(report.add_input(args.in_file))
    with _Timer(report, "closure"):
        C = k_closure(G, args.k)
    report.results.update(degree=G.degree, k=args.k, order=G.order, closure_order=C.order,
                          k_closed=C.order == G.order,
                          generators=[g.cycle_string() for g in C.generators])
    report.verdicts.append(Verdict("G_in_closure", G.is_subgroup_of(C), f"|G| = {G.order}, |G^({args.k})| = {C.order}"))
    if args.out:
        write_group(args.out, C)


def cmd_blocks(args, report: RunReport) -> None:
    G = read_group(report.add_input(args.in_file))
    if not is_transitive(G):
        raise ValueError(f"group is not transitive (orbits {[sorted(o) for o in orbits(G)]})")
    with _Timer(report, "blocks"):
        systems = all_block_systems(G)
        rows = []
        for B in systems:
            rows.append({
                "block_size": B.block_size,
                "blocks": [list(b) for b in B.blocks],
                "quotient_order": quotient_action(G, B).order,
                "kernel_order": block_kernel(G, B).order,
            })
    report.results.update(degree=G.degree, order=G.order, primitive=not systems, systems=rows)


def cmd_cicheck(args, report: RunReport) -> None:
    X = read_structure(report.add_input(args.structure))
    H = GroupSpec.parse(args.group)
    n, perms = parse_group_text(report.add_input(args.phi).read_text(encoding="utf-8"))
    if len(perms) != 1:
        raise ValueError(f"{args.phi}: expected exactly one permutation, found {len(perms)}")
    with _Timer(report, "ci_check"):
        res = ci_check(X, H, perms[0])
    report.results.update(
        group=H.label(),
        aut_order=res.aut_order,
        conjugate=res.conjugate,
        conjugator=res.conjugator.cycle_string() if res.conjugator is not None else None,
        conclusion=("H_L and φ⁻¹H_Lφ are conjugate in Aut(X)" if res.conjugate
                    else "H_L and φ⁻¹H_Lφ are not conjugate in Aut(X): X refutes the CI property for H"),
    )


def cmd_z2_5(args, report: RunReport) -> None:
    if args.action == "export":
        out = Path(args.out or "z2-5")
        out.mkdir(parents=True, exist_ok=True)
        ce = load_counterexample()
        write_structure(out / "X.rs", ce.X)
        write_group(out / "V.perm", ce.V)
        write_group(out / "W.perm", ce.W)
        write_group(out / "G.perm", ce.G)
        report.results.update(directory=str(out), edges=len(ce.X), order=ce.G.order)
        return
    with _Timer(report, "verify"):
        cr = verify_counterexample(CounterexampleData(), skip_full_aut=args.skip_full_aut)
    report.verdicts.extend(cr.verdicts)
    report.results.update(orders=cr.orders, **cr.info)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized tooling (default 0)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for independent verdicts")
    common.add_argument("--json", dest="json_out", metavar="PATH", help="also write the report as JSON")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="cayleyci", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    w = sub.add_parser("witness", parents=[common], help="build or verify a witness pair on Z_p x Z_2^d")
    w.add_argument("action", choices=["build", "verify"])
    w.add_argument("--p", type=int)
    w.add_argument("--d", type=int)
    w.add_argument("--mode", choices=["color", "plain"], default="color")
    w.add_argument("--out", metavar="DIR", help="write the bundle directory here")
    w.add_argument("--in", dest="in_dir", metavar="DIR", help="verify a bundle written earlier")
    w.set_defaults(func=cmd_witness)

    a = sub.add_parser("aut", parents=[common], help="automorphism group of a structure file")
    a.add_argument("--in", dest="in_file", required=True, metavar="FILE")
    a.add_argument("--out", metavar="FILE", help="write the group here")
    a.set_defaults(func=cmd_aut)

    c = sub.add_parser("closure", parents=[common], help="k-closure of a group file")
    c.add_argument("--in", dest="in_file", required=True, metavar="GROUPFILE")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--out", metavar="FILE", help="write the closure here")
    c.set_defaults(func=cmd_closure)

    b = sub.add_parser("blocks", parents=[common], help="all nontrivial block systems of a transitive group")
    b.add_argument("--in", dest="in_file", required=True, metavar="GROUPFILE")
    b.set_defaults(func=cmd_blocks)

    ci = sub.add_parser("cicheck", parents=[common], help="are H_L and φ⁻¹H_Lφ conjugate in Aut(X)?")
    ci.add_argument("--structure", required=True, metavar="FILE")
    ci.add_argument("--group", required=True, metavar="SPEC", help="e.g. Z2^5, Z5, Z3xZ2^2")
    ci.add_argument("--phi", required=True, metavar="FILE", help="group-format file holding one permutation")
    ci.set_defaults(func=cmd_cicheck)

    z = sub.add_parser("z2-5", parents=[common], help="the Z_2^5 counterexample")
    z.add_argument("action", choices=["verify", "export"])
    z.add_argument("--skip-full-aut", action="store_true", help="skip the full automorphism search")
    z.add_argument("--out", metavar="DIR", help="directory for export")
    z.set_defaults(func=cmd_z2_5)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    report = RunReport(command=argv)
    try:
        args.func(args, report)
    except BudgetExceeded as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(report.text())
    if args.json_out:
        Path(args.json_out).write_text(json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n",
                                       encoding="utf-8")
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
