"""Command-line front end: derive rules, verify them, print the rule tables."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import catalog
from .compiler import NamingUnavailable, derive_rule, emit
from .ir import EXTENDED, KELDYSH, ContourEquation, ContourError
from .oracle import verify
from .parser import parse_file, parse_superindex


@dataclass
class RunConfig:
    command: str
    input: str | None = None
    targets: list[str] = field(default_factory=lambda: ["all"])
    contour: str = EXTENDED
    format: str = "text"
    grid: int = 24
    seeds: int = 3
    tol: float = 1e-8
    json_out: bool = False
    only: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if self.grid < 4:
            raise ValueError("grid size must be at least 4")


def _load_equations(cfg: RunConfig) -> list[ContourEquation]:
    if cfg.input is None:
        raise ContourError("no input given")
    if cfg.input in catalog.CORPUS:
        eq = catalog.CORPUS[cfg.input]()
        return [ContourEquation(eq.lhs_name, eq.external, eq.internal, eq.product, cfg.contour)]
    text = Path(cfg.input).read_text(encoding="utf-8")
    return parse_file(text, cfg.contour)


def _targets_for(eq: ContourEquation, cfg: RunConfig) -> list[str]:
    if cfg.targets == ["all"]:
        return catalog.all_targets(eq)
    return cfg.targets


def _render(eq: ContourEquation, name: str, fmt: str) -> str:
    rule = derive_rule(eq, parse_superindex(name, eq))
    try:
        body = emit(rule, fmt, "langreth")
    except NamingUnavailable:
        body = emit(rule, fmt, "hacek")
    lhs = f"{eq.lhs_name}^{{{name}}}"
    return f"{lhs} = {body}"


def cmd_derive(cfg: RunConfig) -> int:
    try:
        for eq in _load_equations(cfg):
            # argument-list note: factor superscripts refer to these slots
            print(("% " if cfg.format == "latex" else "# ") + str(eq))
            for name in _targets_for(eq, cfg):
                print(_render(eq, name, cfg.format))
    except ContourError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


def _verify_one(job):
    eq, name, seeds, grid, tol = job
    return verify(
        eq,
        parse_superindex(name, eq),
        target_name=name,
        seeds=range(seeds),
        grid_size=grid,
        tol=tol,
    )


def cmd_verify(cfg: RunConfig) -> int:
    failed = False
    try:
        equations = _load_equations(cfg)
        jobs = [
            (eq, name, cfg.seeds, cfg.grid, cfg.tol)
            for eq in equations
            for name in _targets_for(eq, cfg)
        ]
    except ContourError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    if cfg.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            all_records = list(pool.map(_verify_one, jobs))
    else:
        all_records = [_verify_one(job) for job in jobs]
    for (eq, name, *_), records in zip(jobs, all_records):
        for rec in records:
            failed |= not rec.passed
            if cfg.json_out:
                print(json.dumps(rec.as_dict()))
            else:
                status = "PASS" if rec.passed else "FAIL"
                seed = "-" if rec.seed is None else rec.seed
                print(
                    f"{status} {eq.lhs_name}^{{{name}}} mode={rec.mode} "
                    f"seed={seed} max_error={rec.max_error:.3e} {rec.detail}"
                )
    return 2 if failed else 0


_TABLES = {
    "table1": ("convolution", "product"),
    "table2": ("double_triangle", "triangle"),
    "table3": ("vertex",),
}


def render_tables(cfg: RunConfig) -> str:
    lines: list[str] = []
    latex = cfg.format == "latex"
    for table, structures in _TABLES.items():
        wanted = [s for s in structures if cfg.only in (None, s)]
        if not wanted:
            continue
        lines.append(f"# {table}" if not latex else f"% {table}")
        for sname in wanted:
            eq = catalog.CORPUS[sname]()
            eq = ContourEquation(eq.lhs_name, eq.external, eq.internal, eq.product, cfg.contour)
            if latex:
                lines.append(r"\begin{tabular}{@{}l@{}}")
                lines.append(str(eq) + r" \\")
            else:
                lines.append(f"## {sname}: {eq}")
            for name in catalog.all_targets(eq):
                row = _render(eq, name, cfg.format)
                lines.append(row + r" \\" if latex else row)
            if latex:
                lines.append(r"\end{tabular}")
            lines.append("")
    return "\n".join(lines)


def cmd_tables(cfg: RunConfig) -> int:
    print(render_tables(cfg), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="contourcalc",
        description="derive and verify real-time rules for contour equations",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, needs_input: bool):
        if needs_input:
            p.add_argument(
                "--input",
                required=True,
                help="DSL file, or a built-in structure name "
                f"({', '.join(sorted(catalog.CORPUS))})",
            )
            p.add_argument(
                "--target",
                action="append",
                default=None,
                help="component/composition name (repeatable), default 'all'",
            )
        p.add_argument("--contour", choices=[KELDYSH, EXTENDED], default=EXTENDED)
        p.add_argument("--format", choices=["text", "latex"], default="text")

    p_derive = sub.add_parser("derive", help="print compiled real-time rules")
    common(p_derive, True)

    p_verify = sub.add_parser("verify", help="check rules against both oracles")
    common(p_verify, True)
    p_verify.add_argument("--grid", type=int, default=24)
    p_verify.add_argument("--seeds", type=int, default=3)
    p_verify.add_argument("--tol", type=float, default=1e-8)
    p_verify.add_argument("--json", action="store_true", dest="json_out")
    p_verify.add_argument("--jobs", type=int, default=1, help="parallel verification workers")

    p_tables = sub.add_parser("tables", help="print the reference rule tables")
    common(p_tables, False)
    p_tables.add_argument("--only", choices=sorted(catalog.CORPUS), default=None)

    return ap


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(
        command=ns.command,
        input=getattr(ns, "input", None),
        targets=(getattr(ns, "target", None) or ["all"]),
        contour=ns.contour,
        format=ns.format,
        grid=getattr(ns, "grid", 24),
        seeds=getattr(ns, "seeds", 3),
        tol=getattr(ns, "tol", 1e-8),
        json_out=getattr(ns, "json_out", False),
        only=getattr(ns, "only", None),
        jobs=getattr(ns, "jobs", 1),
    )
    handler = {"derive": cmd_derive, "verify": cmd_verify, "tables": cmd_tables}[cfg.command]
    return handler(cfg)


if __name__ == "__main__":
    sys.exit(main())
