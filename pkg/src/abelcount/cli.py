"""Command line interface: ``abelcount``."""

from __future__ import annotations

import json
import sys
from fractions import Fraction

import click

from . import lattice, surface, threefold
from .series import PLaurent, format_rational
from .verify import (
    DEFAULT_QMAX,
    DEFAULT_WINDOW,
    REGISTRY,
    env_default_qmax,
    run_checks,
)


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else format_rational(x)
    return str(x)


def _json_value(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else format_rational(x)
    return x


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _default_qmax() -> int:
    try:
        return env_default_qmax() or DEFAULT_QMAX
    except ValueError as exc:
        raise click.UsageError(str(exc))


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Exact curve counts on abelian surfaces and threefolds."""


# ---------------------------------------------------------------------------
# nu
# ---------------------------------------------------------------------------


@main.command("nu")
@click.argument("d", nargs=-1, type=click.IntRange(min=1), required=True)
@click.option("--oracle", type=click.Choice(["formula", "isotropic", "closed", "all"]),
              default="formula", show_default=True)
def nu_cmd(d, oracle):
    """Count polarized isogenies of type D1 D2 [D3]."""
    if not 1 <= len(d) <= 3:
        raise click.UsageError("give one to three type entries")
    nontrivial = [x for x in lattice.normalize_type(d) if x > 1]
    closed_ok = len(nontrivial) <= 2
    if oracle == "closed" and not closed_ok:
        raise click.UsageError("the closed form covers at most two nontrivial factors")
    names = ["formula", "isotropic"] + (["closed"] if closed_ok else []) \
        if oracle == "all" else [oracle]
    try:
        values = {name: lattice.nu(d, name) for name in names}
    except lattice.EnumerationBoundError as exc:
        raise click.UsageError(str(exc))
    if oracle != "all":
        click.echo(values[oracle])
        return
    for name, value in values.items():
        click.echo(f"{name}: {value}")
    if len(set(values.values())) != 1:
        click.echo("oracles disagree", err=True)
        sys.exit(1)


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------


def _nu_rows(max_product: int):
    return [(d1, d2, lattice.nu_subgroup_formula((d1, d2)))
            for d1, d2 in lattice.divisor_chains(max_product)]


def _genus3_table(d_max: int) -> surface.InvariantTable:
    idx = list(range(1, d_max + 1))
    cells = {(a, b): threefold.n_g_imprimitive(3, (1, a, b)) for a in idx for b in idx}
    return surface.InvariantTable("d", "d'", idx, idx, cells,
                                  {k: "n_g_imprimitive" for k in cells},
                                  "genus 3 counts N_3,(1,d,d') in classes of type (1,d,d')")


def _render_table(table: surface.InvariantTable, fmt: str) -> str:
    if fmt == "json":
        payload = {
            "title": table.title,
            "row_label": table.row_label,
            "col_label": table.col_label,
            "rows": table.rows,
            "cols": table.cols,
            "cells": [[_json_value(v) for v in table.row(r)] for r in table.rows],
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        lines = [f"# {table.title}", ",".join([table.row_label] + [str(c) for c in table.cols])]
        lines += [",".join([str(r)] + [_fmt(v) for v in table.row(r)]) for r in table.rows]
        return "\n".join(lines) + "\n"
    cells = [[table.row_label + "\\" + table.col_label] + [str(c) for c in table.cols]]
    cells += [[str(r)] + [_fmt(v) for v in table.row(r)] for r in table.rows]
    width = max(len(x) for row in cells for x in row)
    lines = [table.title] + [" ".join(x.rjust(width) for x in row) for row in cells]
    return "\n".join(lines) + "\n"


def _render_nu(rows, fmt: str) -> str:
    title = "nu(d1,d2) for d1 | d2 from the subgroup sum"
    if fmt == "json":
        payload = {"title": title,
                   "rows": [{"d1": a, "d2": b, "nu": v} for a, b, v in rows]}
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        return "\n".join([f"# {title}", "d1,d2,nu"]
                         + [f"{a},{b},{v}" for a, b, v in rows]) + "\n"
    return "\n".join([title] + [f"nu({a},{b}) = {v}" for a, b, v in rows]) + "\n"


@main.command("table")
@click.argument("kind", type=click.Choice(["hyperelliptic", "genus2-quotient", "genus3", "nu"]))
@click.option("--gmax", type=click.IntRange(min=2), default=8, show_default=True,
              help="Largest genus (hyperelliptic table).")
@click.option("--dmax", type=click.IntRange(min=1), default=None,
              help="Largest degree; for the nu table the largest product d1*d2. "
                   "Defaults: hyperelliptic 10, genus2-quotient 6, genus3 4, nu 24.")
@click.option("--format", "fmt", type=click.Choice(["csv", "json", "plain"]),
              default="csv", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None)
def table_cmd(kind, gmax, dmax, fmt, out):
    """Emit a table of invariants."""
    if kind == "hyperelliptic":
        text = _render_table(surface.hyp_h_table(gmax, dmax or 10), fmt)
    elif kind == "genus2-quotient":
        text = _render_table(surface.quotient_table(2, dmax or 6), fmt)
    elif kind == "genus3":
        text = _render_table(_genus3_table(dmax or 4), fmt)
    else:
        text = _render_nu(_nu_rows(dmax or 24), fmt)
    _emit(text, out)


# ---------------------------------------------------------------------------
# series
# ---------------------------------------------------------------------------


def _laurent_text(c: PLaurent) -> str:
    if c.is_zero() and c.is_finite:
        return "0"
    terms = []
    for e, v in sorted(c.items(), reverse=True):
        power = Fraction(e, 2)
        mono = "" if e == 0 else ("p" if power == 1 else f"p^{_fmt(power)}")
        coef = _fmt(v)
        if mono and v in (1, -1):
            coef = "-" if v == -1 else ""
        elif mono:
            coef += "*"
        terms.append(coef + mono)
    text = " + ".join(terms).replace("+ -", "- ")
    if not c.is_finite:
        text += f"  (exact for |p-exponent| <= {_fmt(Fraction(c.validity, 2))})"
    return text


SERIES_KINDS = {
    "dt1": lambda q, w, form: threefold.dt_1(q, w),
    "dt2": lambda q, w, form: threefold.dt_2(q, w, form),
    "dthat1": lambda q, w, form: threefold.dt_hat_1(q, w),
    "dthat2": lambda q, w, form: threefold.dt_hat_2_closed(q, w),
    "gw11d": lambda q, w, form: threefold.gw_11d_series(q, w),
}


@main.command("series")
@click.argument("kind", type=click.Choice(sorted(SERIES_KINDS)))
@click.option("--qmax", type=click.IntRange(min=0), default=None,
              help=f"q-order (default {DEFAULT_QMAX} or $ABELCOUNT_DEFAULT_QMAX).")
@click.option("--window", type=click.IntRange(min=0), default=DEFAULT_WINDOW,
              show_default=True, help="Window bound in doubled p-exponents.")
@click.option("--form", type=click.Choice(threefold.DT2_FORMS), default="closed",
              show_default=True, help="Which expression to expand for dt2.")
@click.option("--json", "as_json", is_flag=True, help="Emit canonical JSON.")
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None)
def series_cmd(kind, qmax, window, form, as_json, out):
    """Expand a DT or GW partition function."""
    qmax = _default_qmax() if qmax is None else qmax
    try:
        dt = SERIES_KINDS[kind](qmax, window, form)
    except threefold.WindowError as exc:
        raise click.UsageError(f"window too small: {exc}")
    if as_json:
        text = json.dumps(dt.to_json(), sort_keys=True) + "\n"
    else:
        tag = "sum X_n p^n" if dt.convention is threefold.Convention.PLAIN_P else "sum X_n (-p)^n"
        lines = [f"# {kind}: coefficients of {tag}"]
        lines += [f"q^{d}: {_laurent_text(c)}" for d, c in enumerate(dt.series.coeffs)]
        text = "\n".join(lines) + "\n"
    _emit(text, out)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


@main.command("verify")
@click.argument("names", nargs=-1)
@click.option("--qmax", type=click.IntRange(min=1), default=None)
@click.option("--umax", type=click.IntRange(min=1), default=None)
@click.option("--window", type=click.IntRange(min=0), default=None)
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None)
@click.option("--list", "list_only", is_flag=True, help="List registered checks and exit.")
def verify_cmd(names, qmax, umax, window, jobs, out, list_only):
    """Run named identity checks (default: all). Exit 0 iff every check passes."""
    if list_only:
        for name in sorted(REGISTRY):
            click.echo(f"{name}: {REGISTRY[name].anchor}")
        return
    if not names or "all" in names:
        names = sorted(REGISTRY)
    unknown = sorted(set(names) - set(REGISTRY))
    if unknown:
        raise click.UsageError(f"unknown check(s): {', '.join(unknown)}")
    if qmax is None:
        try:
            qmax = env_default_qmax()
        except ValueError as exc:
            raise click.UsageError(str(exc))
    overrides = {"qmax": qmax, "umax": umax, "window": window}
    reports = run_checks(names, overrides, jobs)
    text = json.dumps([r.to_json() for r in reports], sort_keys=True, indent=2) + "\n"
    _emit(text, out)
    if not all(r.passed for r in reports):
        sys.exit(1)


# ---------------------------------------------------------------------------
# single values
# ---------------------------------------------------------------------------


@main.group("value")
def value_cmd():
    """Evaluate a single closed formula."""


def _echo(x) -> None:
    click.echo(_fmt(x))


@value_cmd.command("fls")
@click.argument("g", type=click.IntRange(min=2))
@click.argument("d1", type=click.IntRange(min=1))
@click.argument("d2", type=click.IntRange(min=1))
def value_fls(g, d1, d2):
    """Fixed-linear-system count N^FLS_{g,(d1,d2)}."""
    _echo(surface.n_fls(g, (d1, d2)))


@value_cmd.command("quotient")
@click.argument("g", type=click.IntRange(min=2))
@click.argument("d1", type=click.IntRange(min=1))
@click.argument("d2", type=click.IntRange(min=1))
def value_quotient(g, d1, d2):
    """Count up to translation N^Q_{g,(d1,d2)}."""
    _echo(surface.n_quotient(g, (d1, d2)))


@value_cmd.command("hyperelliptic")
@click.argument("g", type=click.IntRange(min=2))
@click.argument("d", type=click.IntRange(min=1))
def value_hyp(g, d):
    """Hyperelliptic count h_{g,(1,d)}."""
    _echo(surface.hyp_h_table(g, d)[(g, d)])


@value_cmd.command("genus1")
@click.argument("d", type=click.IntRange(min=1))
def value_genus1(d):
    """Genus 1 count sigma(d)/d."""
    _echo(surface.genus1_degenerate(d))


@value_cmd.command("gw")
@click.argument("g", type=click.IntRange(min=1))
@click.argument("d1", type=click.IntRange(min=1))
@click.argument("d2", type=click.IntRange(min=1))
@click.argument("d3", type=click.IntRange(min=0))
def value_gw(g, d1, d2, d3):
    """Threefold GW count N_{g,(d1,d2,d3)} via the multiple-cover rule."""
    _echo(threefold.n_g_imprimitive(g, (d1, d2, d3)))


@value_cmd.command("dt")
@click.argument("n", type=int)
@click.argument("d1", type=click.IntRange(min=0))
@click.argument("d2", type=click.IntRange(min=0))
@click.argument("d3", type=click.IntRange(min=0))
def value_dt(n, d1, d2, d3):
    """Threefold DT invariant DT_{n,(d1,d2,d3)} via the multiple-cover rule."""
    try:
        _echo(threefold.dt_mc(n, (d1, d2, d3)))
    except ValueError as exc:
        raise click.UsageError(str(exc))


@value_cmd.command("diagonal")
@click.argument("d", type=click.IntRange(min=0))
def value_diagonal(d):
    """Number of isolated diagonal curves."""
    _echo(threefold.diagonal_count(d))


if __name__ == "__main__":
    main()
