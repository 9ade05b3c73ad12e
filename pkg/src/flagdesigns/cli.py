"""Command-line front end: ``flagdesigns construct|verify|sieve|reproduce``.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import json
import re
import sys
import time
from pathlib import Path
from typing import Any, Callable

import click

from . import atlas, families, geom, sieve
from .geom import Design, DesignError
from .perm import GroupBSGS, is_flag_transitive
from .verify import params, verification_report

SCHEMA = 1
FAMILIES = ("pg", "pg-lines", "hermitian", "wbs", "suzuki", "ree-unital", "ree", "table1")
SLOW_FAMILIES = ("ree-unital", "ree")


def _dump(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _pretty(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


# -- design files -----------------------------------------------------------------------------


def design_to_json(d: Design, meta: dict[str, Any]) -> dict[str, Any]:
    return {"schema": SCHEMA, "v": d.v, "blocks": [list(b) for b in d.blocks], "meta": meta}


class MalformedFile(ValueError):
    pass


def design_from_json(obj: Any) -> tuple[Design, dict[str, Any]]:
    if not isinstance(obj, dict):
        raise MalformedFile("top level must be an object")
    if obj.get("schema") != SCHEMA:
        raise MalformedFile(f"unsupported schema {obj.get('schema')!r}")
    v, blocks, meta = obj.get("v"), obj.get("blocks"), obj.get("meta", {})
    if not isinstance(v, int) or not isinstance(blocks, list) or not isinstance(meta, dict):
        raise MalformedFile("need integer 'v', list 'blocks' and object 'meta'")
    for b in blocks:
        if not isinstance(b, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in b):
            raise MalformedFile("every block must be a list of integers")
    try:
        return Design.from_blocks(v, blocks), meta
    except DesignError as exc:
        raise MalformedFile(str(exc)) from None


def read_design(path: str | Path) -> tuple[Design, dict[str, Any]]:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedFile(str(exc)) from None
    return design_from_json(obj)


# -- group names --------------------------------------------------------------------------------

_GROUP_PATTERNS: list[tuple[str, Callable[..., GroupBSGS]]] = [
    (r"sz(\d+)", lambda q: atlas.suzuki_group(int(q))),
    (r"psl(\d+)[-(](\d+)\)?", lambda n, q: atlas.psl_group(int(n), int(q))),
    (r"psu3[-(](\d+)\)?", lambda q: atlas.psu3_group(int(q))),
    (r"wbs(\d+)", lambda q: families.wbs_design(int(q))[1]),
]


def resolve_group(name: str) -> GroupBSGS:
    """``sz8``, ``psl3-2``, ``psu3-3``, ``wbs8`` or a listed group such as ``M22@22``."""
    for pat, make in _GROUP_PATTERNS:
        m = re.fullmatch(pat, name.strip(), flags=re.IGNORECASE)
        if m:
            return make(*m.groups())
    try:
        return families.table1_group(name)
    except (KeyError, ValueError) as exc:
        raise click.BadParameter(f"unknown group {name!r}: {exc}", param_hint="--group") from None


# -- construction -------------------------------------------------------------------------------


def build(family: str, n: int | None, q: int | None, line: int | None, i: int | None):
    """Return ``(design, group or None, meta)``; raises ValueError on bad parameters."""

    def need(val, flag):
        if val is None:
            raise click.UsageError(f"family {family!r} needs {flag}")
        return val

    if family == "pg":
        n, q = need(n, "--n"), need(q, "--q")
        return geom.pg_design(n, q), atlas.psl_group(n, q), {"n": n, "q": q, "group": f"psl{n}-{q}"}
    if family == "pg-lines":
        n, q = need(n, "--n"), need(q, "--q")
        return geom.pg_line_design(n, q), atlas.psl_group(n, q), {"n": n, "q": q, "group": f"psl{n}-{q}"}
    if family == "hermitian":
        q = need(q, "--q")
        return geom.hermitian_unital(q), atlas.psu3_group(q), {"q": q, "group": f"psu3-{q}"}
    if family == "wbs":
        q = need(q, "--q")
        d, g = families.wbs_design(q)
        return d, g, {"q": q, "group": f"wbs{q}"}
    if family == "suzuki":
        q = need(q, "--q")
        d, g = families.suzuki_design(q)
        return d, g, {"q": q, "group": f"sz{q}"}
    if family == "table1":
        line = need(line, "--line")
        d, g, _ = families.table1_design(line)
        rec = families.TABLE1[line - 1]
        return d, g, {"line": line, "q": None, "group": rec.group}
    if family == "ree-unital":
        d, g = families.ree_unital(need(q, "--q"))
        return d, g, {"q": q, "group": f"ree{q}"}
    if family == "ree":
        d, g = families.ree_design(need(q, "--q"), need(i, "--i"))
        return d, g, {"q": q, "i": i, "group": f"ree{q}"}
    raise click.UsageError(f"unknown family {family!r}")


@click.group()
def main() -> None:
    """Construct, verify and sieve flag-transitive 2-designs."""


@main.command()
@click.argument("family", type=click.Choice(FAMILIES))
@click.option("--n", type=int, help="Projective dimension plus one (pg, pg-lines).")
@click.option("--q", type=int, help="Field order.")
@click.option("--line", type=int, help="Line of the small-design catalog (table1).")
@click.option("--i", "i_", type=int, help="Design index (ree).")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the design file here (default: stdout).")
@click.option("--allow-slow", is_flag=True, help="Permit the slow optional tier.")
def construct(family, n, q, line, i_, out, allow_slow):
    """Build a design, verify it, and write it as JSON."""
    if family in SLOW_FAMILIES and not allow_slow:
        raise click.UsageError(f"{family} is in the optional slow tier; pass --allow-slow")
    try:
        d, g, meta = build(family, n, q, line, i_)
    except NotImplementedError as exc:
        click.echo(f"not available: {exc}", err=True)
        sys.exit(1)
    except (ValueError, families.BaseBlockNotFound) as exc:
        raise click.UsageError(str(exc)) from None
    report = verification_report(d, g)
    meta = {"family": family, **meta}
    if not report["ok"]:
        click.echo(_pretty(report), err=True)
        sys.exit(1)
    meta["params"] = report["params"]
    text = _dump(design_to_json(d, meta)) + "\n"
    if out:
        Path(out).write_text(text)
        p = report["params"]
        click.echo(f"wrote {out}: v={p['v']} b={p['b']} r={p['r']} k={p['k']} lambda={p['lambda']}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--group", "group_name", help="Also check flag-transitivity (e.g. sz8, psl3-2, or 'meta').")
def verify(path, group_name):
    """Check the 2-design axioms of a design file and print its parameters."""
    try:
        d, meta = read_design(path)
    except MalformedFile as exc:
        raise click.UsageError(f"malformed design file: {exc}") from None
    group = None
    if group_name:
        if group_name == "meta":
            group_name = meta.get("group")
            if not group_name:
                raise click.UsageError("file has no meta.group")
        group = resolve_group(group_name)
        if group.degree != d.v:
            raise click.UsageError(f"group {group_name} has degree {group.degree}, design has {d.v} points")
    report = verification_report(d, group)
    if group_name:
        report["group"] = group_name
    click.echo(_pretty(report))
    sys.exit(0 if report["ok"] else 1)


@main.command("sieve")
@click.argument("case_file", required=False)
@click.option("--v", "v", type=int, help="Number of points.")
@click.option("--divisors", help="Comma-separated integers that r must divide.")
@click.option("--lambda-max", type=int, help="Upper limit for lambda.")
@click.option("--lambda-min", type=int, default=1, show_default=True)
def sieve_cmd(case_file, v, divisors, lambda_max, lambda_min):
    """Eliminate parameter cases from a case file, or enumerate tuples for one v."""
    if case_file and v is not None:
        raise click.UsageError("give either a case file or --v, not both")
    if case_file:
        try:
            cases = sieve.load_cases(case_file)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise click.UsageError(f"malformed case file: {exc}") from None
        reports = [sieve.eliminate(c).to_dict() for c in cases]
        eliminated = sum(r["verdict"] == "eliminated" for r in reports)
        click.echo(_pretty({"cases": len(reports), "eliminated": eliminated, "reports": reports}))
        return
    if v is None:
        raise click.UsageError("give a case file or --v")
    try:
        targets = [int(x) for x in divisors.split(",")] if divisors else []
        every = sieve.feasible_params(v, targets, lambda_max, require_coprime=False, lam_min=lambda_min)
        coprime = sieve.feasible_params(v, targets, lambda_max, require_coprime=True, lam_min=lambda_min)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    out = {
        "v": v,
        "divisors": targets,
        "lambda_max": lambda_max,
        "lambda_min": lambda_min,
        "candidates": [list(t) for t in every],
        "survivors": [list(t) for t in coprime],
        "verdict": "survivors" if coprime else "eliminated",
    }
    click.echo(_pretty(out))


# -- reproduction ---------------------------------------------------------------------------------


def _row(name: str, ok: bool | None, detail: str, seconds: float) -> tuple[str, str]:
    status = {True: "PASS", False: "FAIL", None: "SKIP"}[ok]
    return status, f"{status}  {name:<34} {detail}  [{seconds:.2f}s]"


def _timed(fn: Callable[[], tuple[bool | None, str]]) -> tuple[bool | None, str, float]:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except NotImplementedError as exc:
        ok, detail = None, f"not available: {exc}"
    except Exception as exc:  # a crash is a failed check, reported not raised
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return ok, detail, time.perf_counter() - t0


def _check_params(d: Design, g: GroupBSGS | None, expect: tuple[int, ...]) -> tuple[bool, str]:
    p = params(d).as_tuple()
    ok = p == expect
    if g is not None:
        ok = ok and is_flag_transitive(d, g)
    return ok, f"{p}" + ("" if ok else f" expected {expect}")


def table1_checks():
    for rec in families.TABLE1:

        def run(rec=rec):
            d, g, p = families.table1_design(rec.line, check_extension=rec.line == 4)
            return p.as_tuple() == rec.params and p.coprime_r_lambda, f"{p.as_tuple()} {rec.group}"

        yield f"line {rec.line}", run


def example_checks(allow_slow: bool):
    for n, q in ((3, 2), (3, 3), (3, 4), (4, 2), (4, 3), (5, 2)):
        v = (q**n - 1) // (q - 1)
        k = (q ** (n - 1) - 1) // (q - 1)
        lam = (q ** (n - 2) - 1) // (q - 1)
        yield f"pg n={n} q={q}", lambda n=n, q=q, v=v, k=k, lam=lam: _check_params(
            geom.pg_design(n, q), atlas.psl_group(n, q), (v, v, k, k, lam)
        )
    for n, q in ((3, 4), (3, 8), (4, 3)):
        v = (q**n - 1) // (q - 1)
        r = (q**n - q) // (q - 1)
        yield f"pg-lines n={n} q={q}", lambda n=n, q=q, v=v, r=r: _check_params(
            geom.pg_line_design(n, q), atlas.psl_group(n, q), (v, v * r // q, r, q, q - 1)
        )
    for q in (8, 16, 32):
        v, k = q * (q - 1) // 2, q // 2
        r = (v - 1) // (k - 1)
        yield f"wbs q={q}", lambda q=q, v=v, k=k, r=r: _check_params(
            *families.wbs_design(q), (v, v * r // k, r, k, 1)
        )
    for q in (3, 4):
        v, k = q**3 + 1, q + 1
        yield f"hermitian q={q}", lambda q=q, v=v, k=k: _check_params(
            geom.hermitian_unital(q), atlas.psu3_group(q), (v, v * q * q // k, q * q, k, 1)
        )
    for q in (8, 32):
        v = q * q + 1
        yield f"suzuki q={q}", lambda q=q, v=v: _check_params(
            *families.suzuki_design(q), (v, v * (v - 1) // q, v - 1, q, q - 1)
        )
    if allow_slow:
        yield "ree-unital q=27", lambda: _check_params(*families.ree_unital(27), (19684, 19684 * 729 // 28, 729, 28, 1))
        yield "ree i=1 q=27", lambda: _check_params(*families.ree_design(27, 1), (19684, 14349636, 19683, 27, 26))


def table_checks():
    for name in sieve.CASE_FILES:

        def run(name=name):
            reports = [sieve.eliminate(c) for c in sieve.load_cases(name)]
            bad = [r.case.description for r in reports if r.verdict != "eliminated"]
            detail = f"{len(reports) - len(bad)}/{len(reports)} eliminated"
            return not bad, detail + (f"; open: {bad[:3]}" if bad else "")

        yield f"cases {name}", run


@main.command()
@click.option("--table1", "do_table1", is_flag=True, help="The thirteen small designs.")
@click.option("--examples", "do_examples", is_flag=True, help="The infinite families at small q.")
@click.option("--tables", "do_tables", is_flag=True, help="The elimination case files.")
@click.option("--allow-slow", is_flag=True, help="Also attempt the optional slow tier.")
def reproduce(do_table1, do_examples, do_tables, allow_slow):
    """Run reproduction checks and print a pass/fail matrix (all groups if none chosen)."""
    if not (do_table1 or do_examples or do_tables):
        do_table1 = do_examples = do_tables = True
    checks: list[tuple[str, Callable]] = []
    if do_table1:
        checks += list(table1_checks())
    if do_examples:
        checks += list(example_checks(allow_slow))
    if do_tables:
        checks += list(table_checks())
    failed = 0
    for name, fn in checks:
        ok, detail, secs = _timed(fn)
        status, line = _row(name, ok, detail, secs)
        failed += status == "FAIL"
        click.echo(line)
    if do_tables:
        rep = sieve.wreath_replay()
        click.echo(
            f"INFO  PSp4(q) wreath replay: {len(rep['all'])} tuples, "
            f"{len(rep['coprime'])} with gcd(r, lambda) = 1: {rep['coprime']}"
        )
    click.echo(f"{len(checks) - failed}/{len(checks)} checks without failure")
    sys.exit(1 if failed else 0)


if __name__ == "__main__":  # pragma: no cover
    main()
