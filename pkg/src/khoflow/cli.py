"""Command-line front end.

    khoflow homology trefoil.pd --reduced
    khoflow jones --knot 4_1
    khoflow verify --pd "X 1 4 2 5; X 3 6 4 1; X 5 2 6 3" --json
    khoflow skein trefoil.pd --crossing 2
    khoflow moore - < hopf.pd

Exit status is 0 on success, 1 when a requested check fails and 2 on bad
input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from importlib import resources
from typing import Optional

from .cube import random_gauge, standard_sign, verify_sign
from .homology import (
    NotThin,
    format_wedge,
    moore_decomposition,
    parse_ring,
    table_to_json,
)
from .khcomplex import (
    build_complex,
    divide_by_q_plus_inverse,
    euler_characteristic,
    format_laurent,
    homology_table,
    reduced_complex,
    reduced_les_report,
    skein_report,
)
from .moduli import RIGHT, LEFT, sweep_diagram
from .pd import LinkDiagram, PdError, load_diagram

COMMANDS = ("homology", "jones", "verify", "skein", "moore")


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    source: str
    text: str
    ring: str = "Z"
    p: int = 0
    reduced: bool = False
    basepoint: Optional[int] = None
    gauge: Optional[int] = None
    json: bool = False
    crossing: Optional[int] = None
    allow_empty: bool = False


def load_corpus() -> dict:
    data = resources.files("khoflow").joinpath("data/corpus.json").read_text()
    return json.loads(data)


def _read_input(args) -> tuple[str, str]:
    given = [x for x in (args.input, args.pd, args.knot) if x is not None]
    if len(given) != 1:
        raise InputError("give exactly one of: an input file (or -), --pd TEXT, --knot NAME")
    if args.pd is not None:
        return "<--pd>", args.pd
    if args.knot is not None:
        corpus = load_corpus()
        if args.knot not in corpus:
            raise InputError(f"unknown knot {args.knot!r}; bundled names: {', '.join(sorted(corpus))}")
        return args.knot, corpus[args.knot]["pd"]
    if args.input == "-":
        return "<stdin>", sys.stdin.read()
    try:
        with open(args.input, encoding="utf-8") as fh:
            return args.input, fh.read()
    except OSError as e:
        raise InputError(f"cannot read {args.input}: {e.strerror}") from e


def make_config(args) -> RunConfig:
    source, text = _read_input(args)
    try:
        ring, p = parse_ring(args.ring)
    except ValueError as e:
        raise InputError(str(e)) from e
    return RunConfig(
        command=args.command,
        source=source,
        text=text,
        ring=ring,
        p=p,
        reduced=args.reduced,
        basepoint=args.basepoint,
        gauge=args.gauge,
        json=args.json,
        crossing=getattr(args, "crossing", None),
        allow_empty=args.allow_empty,
    )


def load(cfg: RunConfig) -> LinkDiagram:
    try:
        d = load_diagram(cfg.text)
    except PdError as e:
        raise InputError(f"{cfg.source}: {e}") from e
    if d.n == 0 and d.loops == 0 and not cfg.allow_empty and cfg.command != "verify":
        raise InputError(f"{cfg.source}: empty diagram (pass --allow-empty to compute the empty link)")
    return d


def _complex(cfg: RunConfig, d: LinkDiagram):
    s = standard_sign(d.n)
    if cfg.gauge is not None:
        s = random_gauge(s, cfg.gauge)
    cx = build_complex(d, s, cfg.basepoint)
    if cfg.reduced:
        if d.n == 0 and d.loops == 0:
            raise InputError("the empty link has no basepoint for the reduced theory")
        try:
            cx = reduced_complex(cx, cfg.basepoint)
        except ValueError as e:
            raise InputError(str(e)) from e
    return cx


def _table(cfg: RunConfig, d: LinkDiagram):
    return homology_table(_complex(cfg, d), cfg.ring, cfg.p)


def ring_name(cfg: RunConfig) -> str:
    return f"F_{cfg.p}" if cfg.ring == "F" else cfg.ring


def format_group(g, field: str = "Z") -> str:
    """Group text; over a field only the dimension is meaningful."""
    if field == "Z":
        return str(g)
    return field if g.free_rank == 1 else f"{field}^{g.free_rank}"


def format_table(table, field: str = "Z") -> str:
    if not table:
        return "  (all groups vanish)"
    lines = ["     i     j  group"]
    for (i, j), g in sorted(table.items()):
        lines.append(f"  {i:4d}  {j:4d}  {format_group(g, field)}")
    return "\n".join(lines)


# -- commands --------------------------------------------------------------


def cmd_homology(cfg: RunConfig, d: LinkDiagram) -> tuple[int, dict, str]:
    table = _table(cfg, d)
    title = ("reduced " if cfg.reduced else "") + f"Khovanov homology over {ring_name(cfg)}"
    data = {
        "command": "homology",
        "source": cfg.source,
        "ring": ring_name(cfg),
        "reduced": cfg.reduced,
        "crossings": d.n,
        "n_plus": d.n_plus,
        "n_minus": d.n_minus,
        "table": table_to_json(table),
    }
    text = f"{cfg.source}: {d.n} crossings (n+={d.n_plus}, n-={d.n_minus}), {title}\n{format_table(table, ring_name(cfg))}"
    return 0, data, text


def cmd_jones(cfg: RunConfig, d: LinkDiagram) -> tuple[int, dict, str]:
    chi = euler_characteristic(_complex(cfg, d))
    if cfg.reduced:
        jones = dict(chi)
    else:
        jones = divide_by_q_plus_inverse(chi)
    data = {
        "command": "jones",
        "source": cfg.source,
        "reduced": cfg.reduced,
        "euler_characteristic": {str(k): v for k, v in chi.items()},
        "jones": None if jones is None else {str(k): v for k, v in jones.items()},
    }
    lines = [f"chi = {format_laurent(chi)}"]
    lines.append(f"V   = {format_laurent(jones)}" if jones is not None else "V   = (chi not divisible by q + q^-1)")
    return (0 if jones is not None else 1), data, "\n".join(lines)


def cmd_moore(cfg: RunConfig, d: LinkDiagram) -> tuple[int, dict, str]:
    if cfg.ring != "Z":
        raise InputError("moore needs integral homology (--ring Z)")
    table = _table(cfg, d)
    try:
        wedge = moore_decomposition(table)
    except NotThin as e:
        data = {"command": "moore", "source": cfg.source, "thin": False, "error": str(e)}
        return 1, data, f"not thin: {e}"
    data = {
        "command": "moore",
        "source": cfg.source,
        "thin": True,
        "reduced": cfg.reduced,
        "summands": [w.to_json() for w in wedge],
        "wedge": format_wedge(wedge),
    }
    return 0, data, format_wedge(wedge)


def cmd_verify(cfg: RunConfig, d: LinkDiagram) -> tuple[int, dict, str]:
    t0 = time.perf_counter()
    s = standard_sign(d.n)
    if cfg.gauge is not None:
        s = random_gauge(s, cfg.gauge)
    sign_ok = verify_sign(s)
    cx = build_complex(d, s)
    dd_ok = cx.d_squared_zero()
    results = sweep_diagram(d)
    faces_ok = all(r.ok for r in results)
    summary = {}
    for idx in (2, 3):
        rows = [r for r in results if r.index == idx and r.side == RIGHT]
        summary[idx] = {
            "decorated_faces": len(rows),
            "ladybug": sum(r.ladybug for r in rows),
            "chain_counts": sorted({r.chain_count for r in rows}),
            "failures": sum(not r.ok for r in rows),
        }
    cycles = {}
    for side in (RIGHT, LEFT):
        rows = [r for r in results if r.index == 3 and r.side == side]
        cycles[side] = sum(len(r.components) for r in rows)
    les_ok = True
    if d.n > 0 or d.loops > 0:
        les_ok = reduced_les_report(cx).exact
    ok = sign_ok and dd_ok and faces_ok and les_ok and cycles[RIGHT] == cycles[LEFT]
    elapsed = time.perf_counter() - t0
    data = {
        "command": "verify",
        "source": cfg.source,
        "pass": ok,
        "checks": {
            "sign_assignment": sign_ok,
            "d_squared_zero": dd_ok,
            "faces": faces_ok,
            "reduced_les": les_ok,
            "equal_cycle_counts": cycles[RIGHT] == cycles[LEFT],
        },
        "report": [r.to_json() for r in results],
        "seconds": round(elapsed, 3),
    }
    lines = [f"{cfg.source}: {d.n} crossings"]
    lines.append(f"  sign assignment satisfies delta s = 1: {_pf(sign_ok)}")
    lines.append(f"  d^2 = 0: {_pf(dd_ok)}")
    s2, s3 = summary[2], summary[3]
    lines.append(
        f"  index 2: {s2['decorated_faces']} decorated faces, {s2['ladybug']} ladybug, "
        f"chain counts {s2['chain_counts']}, failures {s2['failures']}"
    )
    lines.append(
        f"  index 3: {s3['decorated_faces']} decorated faces, 6-cycles right {cycles[RIGHT]} / left {cycles[LEFT]}, "
        f"failures {s3['failures']}"
    )
    lines.append(f"  reduced/unreduced exact sequence: {_pf(les_ok)}")
    lines.append(f"  {'PASS' if ok else 'FAIL'} ({elapsed:.2f} s)")
    return (0 if ok else 1), data, "\n".join(lines)


def cmd_skein(cfg: RunConfig, d: LinkDiagram) -> tuple[int, dict, str]:
    if cfg.crossing is None:
        raise InputError("skein needs --crossing N (1-based)")
    if not 1 <= cfg.crossing <= d.n:
        raise InputError(f"crossing {cfg.crossing} out of range 1..{d.n}")
    c = cfg.crossing - 1
    p = cfg.p if cfg.ring == "F" else 2
    cx = build_complex(d)
    split, rep, match = skein_report(cx, c, p)
    kh = homology_table(cx, cfg.ring, cfg.p)
    kh0 = homology_table(build_complex(split.L0), cfg.ring, cfg.p)
    kh1 = homology_table(build_complex(split.L1), cfg.ring, cfg.p)
    ok = rep.exact and match
    data = {
        "command": "skein",
        "source": cfg.source,
        "crossing": cfg.crossing,
        "ring": ring_name(cfg),
        "L": table_to_json(kh),
        "L0": table_to_json(kh0),
        "L1": table_to_json(kh1),
        "shifts": split.shifts(),
        "exact": rep.exact,
        "pieces_match": match,
        "failures": rep.failures,
    }
    lines = [
        f"{cfg.source}: skein split at crossing {cfg.crossing}",
        f"Kh(L):\n{format_table(kh, ring_name(cfg))}",
        f"Kh(L_0) ({split.L0.n} crossings, {split.L0.num_components} components):\n{format_table(kh0, ring_name(cfg))}",
        f"Kh(L_1) ({split.L1.n} crossings, {split.L1.num_components} components):\n{format_table(kh1, ring_name(cfg))}",
        "shifts: " + ", ".join(f"{k}={v}" for k, v in split.shifts().items()),
        f"exact sequence over F_{p}: {_pf(rep.exact)}; pieces match shifted Kh(L_0), Kh(L_1): {_pf(match)}",
    ]
    return (0 if ok else 1), data, "\n".join(lines)


def _pf(flag: bool) -> str:
    return "ok" if flag else "FAILED"


HANDLERS = {
    "homology": cmd_homology,
    "jones": cmd_jones,
    "verify": cmd_verify,
    "skein": cmd_skein,
    "moore": cmd_moore,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", nargs="?", help="PD file, or - for stdin")
    common.add_argument("--pd", help="inline PD code")
    common.add_argument("--knot", help="name of a diagram in the bundled corpus (e.g. 3_1, L2a1)")
    common.add_argument("--ring", default="Z", help="Z, Q or F_p (default Z)")
    common.add_argument("--reduced", action="store_true", help="reduced theory")
    common.add_argument("--basepoint", type=int, help="edge label carrying the basepoint")
    common.add_argument("--gauge", type=int, metavar="SEED", help="apply a random gauge to the sign assignment")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--allow-empty", action="store_true", help="accept the empty diagram")

    parser = argparse.ArgumentParser(prog="khoflow", description="Khovanov homology and flow-category checks")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("homology", parents=[common], help="bigraded Khovanov homology table")
    sub.add_parser("jones", parents=[common], help="graded Euler characteristic and Jones polynomial")
    sub.add_parser("verify", parents=[common], help="ladybug and 6-cycle checks over the cube")
    sk = sub.add_parser("skein", parents=[common], help="skein exact sequence at one crossing")
    sk.add_argument("--crossing", type=int, help="1-based crossing index")
    sub.add_parser("moore", parents=[common], help="wedge of Moore spaces for thin homology")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = make_config(args)
        d = load(cfg)
        code, data, text = HANDLERS[cfg.command](cfg, d)
    except InputError as e:
        print(f"khoflow: error: {e}", file=sys.stderr)
        return 2
    if cfg.json:
        print(json.dumps(data, ensure_ascii=False, indent=1))
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
