"""Command-line front end: CSV ingestion, tests, null tables, power grids,
and dependence screening, with JSON or CSV report documents.

Reports embed the full provenance needed to reproduce every number with a
single re-invocation; execution details that cannot change any number
(worker count, cache location) are deliberately not part of the document.
Exit codes: 0 the command ran (reject/accept is data, not an exit code),
2 usage or configuration error, 3 data error.
"""

from __future__ import annotations

import csv
import functools
import io
import json
import os
import re
import sys

import click
import numpy as np

from . import __version__
from .errors import (
    ConfigError,
    DataError,
    DivisibilityError,
    DomainError,
    NotACopulaError,
    TiesPresentError,
)
from .montecarlo import build_null, estimate_power, test_independence
from .samplers import parse_sampler_spec
from .screen import PartitionHypothesis, screen_partition

STAT_CHOICES = ("tv", "hellinger", "sup", "kl")
DEFAULT_LEVELS = (0.10, 0.05, 0.01)
# a null table with fewer distinct values than this fraction of N gets a
# discretization warning (always triggered by the sup statistic at small n)
DISCRETIZATION_FRACTION = 0.2


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except DivisibilityError as exc:
            click.echo(f"data error: {exc} "
                       "(pass --truncate to drop rows down to a multiple of 6)",
                       err=True)
            sys.exit(3)
        except (DataError, TiesPresentError) as exc:
            click.echo(f"data error: {exc}", err=True)
            sys.exit(3)
        except (ConfigError, DomainError, NotACopulaError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
    return wrapper


# ---------------------------------------------------------------------------
# ingestion

def load_csv(path: str, columns: str | None = None,
             no_header: bool = False) -> tuple[np.ndarray, list[str]]:
    """Read a numeric matrix from CSV with row/column diagnostics.

    A header row is required when selecting columns by name; selectors that
    are all integers are treated as 1-based column indices.  Rows with
    missing or unparseable fields are rejected, naming the file line.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [(lineno, row)
                    for lineno, row in enumerate(csv.reader(fh), start=1)
                    if row]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}")
    except UnicodeDecodeError as exc:
        raise DataError(f"{path} is not valid UTF-8: {exc}")
    if not rows:
        raise DataError(f"{path}: no rows")
    if no_header:
        width = len(rows[0][1])
        header = [f"col{i + 1}" for i in range(width)]
        data_rows = rows
    else:
        header = [h.strip() for h in rows[0][1]]
        data_rows = rows[1:]
        if not data_rows:
            raise DataError(f"{path}: header only, no data rows")
    idx = _resolve_columns(header, columns, no_header)
    if len(idx) < 2:
        raise ConfigError("need at least 2 selected columns")
    names = [header[i] for i in idx]
    width = len(header)
    out = np.empty((len(data_rows), len(idx)))
    for r, (line, row) in enumerate(data_rows):
        if len(row) != width:
            raise DataError(
                f"{path}, line {line}: expected {width} fields, found {len(row)}"
            )
        for c, i in enumerate(idx):
            cell = row[i].strip()
            if not cell:
                raise DataError(f"{path}, line {line}, column {names[c]!r}: "
                                "missing value")
            try:
                value = float(cell)
            except ValueError:
                raise DataError(f"{path}, line {line}, column {names[c]!r}: "
                                f"could not parse {cell!r}")
            if not np.isfinite(value):
                raise DataError(f"{path}, line {line}, column {names[c]!r}: "
                                f"non-finite value {cell!r}")
            out[r, c] = value
    return out, names


def _resolve_columns(header: list[str], columns: str | None,
                     no_header: bool) -> list[int]:
    if columns is None:
        return list(range(len(header)))
    tokens = [t.strip() for t in columns.split(",") if t.strip()]
    if len(tokens) < 2:
        raise ConfigError("need at least 2 selected columns")
    if all(re.fullmatch(r"\d+", t) for t in tokens):
        idx = []
        for t in tokens:
            i = int(t)
            if not 1 <= i <= len(header):
                raise DataError(f"column index {i} outside 1..{len(header)}")
            idx.append(i - 1)
        return idx
    if no_header:
        raise ConfigError("column names need a header row; "
                          "use 1-based indices with --no-header")
    idx = []
    for t in tokens:
        if t not in header:
            raise DataError(
                f"no column named {t!r}; available: {', '.join(header)}"
            )
        idx.append(header.index(t))
    return idx


def apply_preprocess(x: np.ndarray, mode: str) -> np.ndarray:
    """Turn price columns into (log-)returns; ``none`` passes through."""
    if mode == "none":
        return x
    if x.shape[0] < 2:
        raise DataError("returns preprocessing requires at least 2 rows")
    prev, cur = x[:-1], x[1:]
    if mode == "returns":
        bad = np.argwhere(prev == 0.0)
        if bad.size:
            raise DataError(f"zero price at data row {bad[0][0] + 1}, "
                            "cannot form returns")
        return (cur - prev) / prev
    bad = np.argwhere((prev <= 0.0) | (cur <= 0.0))
    if bad.size:
        raise DataError(f"non-positive price at data row {bad[0][0] + 1}, "
                        "cannot form log-returns")
    return np.log(cur / prev)


# ---------------------------------------------------------------------------
# output

def _document_text(doc: dict, fmt: str, table_header: list[str],
                   table_rows: list[list]) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    provenance = {k: v for k, v in doc.items() if k != "results"}
    buf.write("# " + json.dumps(provenance, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table_header)
    for row in table_rows:
        writer.writerow(row)
    return buf.getvalue()


def _emit(text: str, output: str | None) -> None:
    if output is None:
        click.echo(text, nl=False)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _float_cell(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# shared options

def _common_options(fn):
    fn = click.option("--seed", type=int, default=0, show_default=True,
                      help="Master seed; fully determines all randomness.")(fn)
    fn = click.option("--threads", type=int, default=None,
                      help="Worker processes [default: machine parallelism]. "
                           "Never changes any reported number.")(fn)
    fn = click.option("--cache-dir", type=click.Path(file_okay=False),
                      default=None, help="Directory for null-table caching.")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
                      default="json", show_default=True)(fn)
    fn = click.option("--output", "-o", type=click.Path(dir_okay=False),
                      default=None, help="Write the report here instead of stdout.")(fn)
    return fn


def _data_options(fn):
    fn = click.option("--columns", default=None,
                      help="Comma-separated column names or 1-based indices "
                           "[default: all columns].")(fn)
    fn = click.option("--no-header", is_flag=True,
                      help="File has no header row; select columns by index.")(fn)
    fn = click.option("--preprocess", type=click.Choice(["none", "returns",
                                                         "log-returns"]),
                      default="none", show_default=True)(fn)
    fn = click.option("--tie-policy", type=click.Choice(["error", "random"]),
                      default="error", show_default=True,
                      help="random: break ties with a seeded shuffle.")(fn)
    fn = click.option("--truncate", is_flag=True,
                      help="Drop a seeded choice of rows so 6 divides n.")(fn)
    return fn


def _threads_value(threads: int | None) -> int:
    return threads if threads else (os.cpu_count() or 1)


@click.group()
@click.version_option(version=__version__, prog_name="checkerdep")
def main():
    """Checkerboard-copula tests of multivariate independence."""


# ---------------------------------------------------------------------------
# test

@main.command("test")
@click.argument("data", type=click.Path(exists=True, dir_okay=False))
@_data_options
@click.option("--stat", "kind", type=click.Choice(STAT_CHOICES), default="tv",
              show_default=True)
@click.option("--alpha", "alphas", type=float, multiple=True,
              help="Significance level; repeatable [default: 0.10 0.05 0.01].")
@click.option("--null-sims", type=int, default=10_000, show_default=True)
@_common_options
@_guarded
def cmd_test(data, columns, no_header, preprocess, tie_policy, truncate,
             kind, alphas, null_sims, seed, threads, cache_dir, fmt, output):
    """Test the selected columns of DATA for mutual independence."""
    levels = tuple(alphas) if alphas else DEFAULT_LEVELS
    matrix, names = load_csv(data, columns, no_header)
    matrix = apply_preprocess(matrix, preprocess)
    try:
        report = test_independence(matrix, kind, levels=levels, N=null_sims,
                                   seed=seed, tie_policy=tie_policy,
                                   truncate=truncate,
                                   threads=_threads_value(threads),
                                   cache_dir=cache_dir)
    except TiesPresentError as exc:
        raise TiesPresentError(names[exc.column]) from None
    res = report.as_dict()
    doc = {
        "report": "independence-test",
        "tool": {"name": "checkerdep", "version": __version__},
        "data": {"path": data, "columns": names, "preprocess": preprocess,
                 "tie_policy": tie_policy, "truncate": truncate,
                 "n": res["n"], "d": res["d"]},
        "params": {"stat": kind, "levels": list(levels),
                   "null_sims": null_sims, "seed": seed},
        "results": res,
    }
    rows = [[kind, res["n"], res["d"], _float_cell(res["observed"]),
             _float_cell(res["p_value"]), _float_cell(lv["alpha"]),
             _float_cell(lv["critical"]), lv["reject"]]
            for lv in res["by_level"]]
    _emit(_document_text(doc, fmt, ["stat", "n", "d", "observed", "p_value",
                                    "alpha", "critical", "reject"], rows),
          output)
    verdicts = ", ".join(f"alpha={lv['alpha']:g}: "
                         f"{'reject' if lv['reject'] else 'accept'}"
                         for lv in res["by_level"])
    click.echo(f"eta_{kind} = {res['observed']:.6g} on n={res['n']}, "
               f"d={res['d']}; p = {res['p_value']:.4g}; {verdicts}", err=True)


# ---------------------------------------------------------------------------
# null-table

@main.command("null-table")
@click.option("--stat", "kind", type=click.Choice(STAT_CHOICES), required=True)
@click.option("-d", "--dim", type=int, required=True, help="Dimension d >= 2.")
@click.option("-n", "--sample-size", "n", type=int, required=True,
              help="Sample size; must be divisible by 6.")
@click.option("--alpha", "alphas", type=float, multiple=True,
              help="Level for reported critical values; repeatable.")
@click.option("--null-sims", type=int, default=10_000, show_default=True)
@_common_options
@_guarded
def cmd_null_table(kind, dim, n, alphas, null_sims, seed, threads, cache_dir,
                   fmt, output):
    """Build (or load from cache) a Monte Carlo null table."""
    from .montecarlo import critical_value

    if n % 6 != 0:
        raise ConfigError(f"sample size n={n} must be divisible by 6")
    levels = tuple(alphas) if alphas else DEFAULT_LEVELS
    nd = build_null(kind, dim, n, null_sims, seed,
                    threads=_threads_value(threads), cache_dir=cache_dir)
    crits = {a: critical_value(nd, a) for a in levels}
    distinct = int(np.unique(nd.values).size)
    notes = []
    if distinct < DISCRETIZATION_FRACTION * nd.N:
        notes.append(
            f"statistic is heavily discretized: only {distinct} distinct "
            f"values in {nd.N} null draws; critical values are coarse at "
            f"this sample size"
        )
    doc = {
        "report": "null-table",
        "tool": {"name": "checkerdep", "version": __version__},
        "params": {"stat": kind, "d": dim, "n": n, "null_sims": null_sims,
                   "seed": seed},
        "results": {
            "critical_values": [{"alpha": a, "critical": c}
                                for a, c in crits.items()],
            "distinct_values": distinct,
            "notes": notes,
        },
    }
    rows = [[kind, dim, n, null_sims, seed, _float_cell(a), _float_cell(c)]
            for a, c in crits.items()]
    _emit(_document_text(doc, fmt, ["stat", "d", "n", "null_sims", "seed",
                                    "alpha", "critical"], rows), output)
    for a, c in crits.items():
        click.echo(f"critical value at alpha={a:g}: {c:.6g}", err=True)
    for note in notes:
        click.echo(f"note: {note}", err=True)


# ---------------------------------------------------------------------------
# power

@main.command("power")
@click.option("--spec", "specs", multiple=True, required=True,
              help="Sampler spec, e.g. clayton:theta=2 or gaussian:d=3,rho=0.5; "
                   "repeatable.")
@click.option("--stat", "kinds", type=click.Choice(STAT_CHOICES),
              multiple=True, default=("tv",), show_default=True)
@click.option("-n", "--sample-size", "sizes", type=int, multiple=True,
              required=True, help="Sample size; repeatable for a grid.")
@click.option("--alpha", "alphas", type=float, multiple=True,
              default=(0.05,), show_default=True)
@click.option("--null-sims", type=int, default=10_000, show_default=True)
@click.option("--alt-sims", type=int, default=1_000, show_default=True)
@_common_options
@_guarded
def cmd_power(specs, kinds, sizes, alphas, null_sims, alt_sims, seed, threads,
              cache_dir, fmt, output):
    """Estimate rejection rates over a grid of alternatives."""
    parsed = [parse_sampler_spec(s) for s in specs]
    results = []
    for spec in parsed:
        for n in sizes:
            if n % 6 != 0:
                raise ConfigError(f"sample size n={n} must be divisible by 6")
            for kind in kinds:
                for alpha in alphas:
                    est = estimate_power(spec, kind, n, alpha,
                                         N_null=null_sims, R_alt=alt_sims,
                                         seed=seed,
                                         threads=_threads_value(threads),
                                         cache_dir=cache_dir)
                    results.append(est.as_dict())
    doc = {
        "report": "power-study",
        "tool": {"name": "checkerdep", "version": __version__},
        "params": {"specs": [s.text for s in parsed], "stats": list(kinds),
                   "sizes": list(sizes), "alphas": list(alphas),
                   "null_sims": null_sims, "alt_sims": alt_sims, "seed": seed},
        "results": results,
    }
    rows = [[r["family"], r["params"], r["kind"], r["n"],
             _float_cell(r["alpha"]), _float_cell(r["power"]),
             _float_cell(r["se"])] for r in results]
    _emit(_document_text(doc, fmt, ["family", "params", "kind", "n", "alpha",
                                    "power", "se"], rows), output)
    for r in results:
        click.echo(f"{r['family']}:{r['params']} stat={r['kind']} n={r['n']} "
                   f"alpha={r['alpha']:g}: power {r['power']:.3f} "
                   f"(se {r['se']:.3f})", err=True)


# ---------------------------------------------------------------------------
# screen

def _parse_hypothesis(path: str, header: list[str]) -> tuple[list[int], dict]:
    """Read the hypothesis document; returns selected column indices (into
    the CSV) and the group/chain positions within that selection."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}")
    if not isinstance(doc, dict) or "group1" not in doc or "group2" not in doc:
        raise ConfigError(f"{path}: hypothesis needs 'group1' and 'group2' lists")

    def resolve(entry) -> int:
        if isinstance(entry, int):
            if not 1 <= entry <= len(header):
                raise ConfigError(f"{path}: column index {entry} outside "
                                  f"1..{len(header)}")
            return entry - 1
        if entry in header:
            return header.index(entry)
        raise ConfigError(f"{path}: no column named {entry!r}; "
                          f"available: {', '.join(header)}")

    groups = {}
    for key in ("group1", "group2", "chain1", "chain2"):
        value = doc.get(key, [])
        if not isinstance(value, list):
            raise ConfigError(f"{path}: {key} must be a list")
        groups[key] = [resolve(v) for v in value]
    if set(groups["group1"]) & set(groups["group2"]):
        raise ConfigError(f"{path}: groups overlap")
    selected = groups["group1"] + groups["group2"]
    pos = {col: i for i, col in enumerate(selected)}
    layout = {key: [pos[c] for c in cols] for key, cols in groups.items()}
    return selected, layout


@main.command("screen")
@click.argument("data", type=click.Path(exists=True, dir_okay=False))
@click.option("--hypothesis", type=click.Path(exists=True, dir_okay=False),
              required=True, help="JSON document naming groups and chains.")
@_data_options
@click.option("--stat", "kind", type=click.Choice(STAT_CHOICES), default="tv",
              show_default=True)
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--null-sims", type=int, default=10_000, show_default=True)
@_common_options
@_guarded
def cmd_screen(data, hypothesis, columns, no_header, preprocess, tie_policy,
               truncate, kind, alpha, null_sims, seed, threads, cache_dir,
               fmt, output):
    """Screen DATA against a hypothesized split into two independent,
    internally dependent groups."""
    if columns is not None:
        raise ConfigError("screen selects columns via the hypothesis file; "
                          "drop --columns")
    matrix, names = load_csv(data, None, no_header)
    selected, layout = _parse_hypothesis(hypothesis, names)
    matrix = apply_preprocess(matrix[:, selected], preprocess)
    sel_names = [names[i] for i in selected]
    if truncate:
        from .estimator import truncate_to_multiple
        matrix = truncate_to_multiple(matrix, 6, seed)
    hyp = PartitionHypothesis(d=len(selected),
                              group1=tuple(layout["group1"]),
                              group2=tuple(layout["group2"]),
                              chain1=tuple(layout["chain1"]),
                              chain2=tuple(layout["chain2"]))
    try:
        report = screen_partition(matrix, hyp, kind, alpha=alpha, N=null_sims,
                                  seed=seed, tie_policy=tie_policy,
                                  threads=_threads_value(threads),
                                  cache_dir=cache_dir)
    except TiesPresentError as exc:
        raise TiesPresentError(sel_names[exc.column]
                               if isinstance(exc.column, int) else exc.column
                               ) from None
    pair_dicts = []
    for dec in report.pairs:
        a, b = dec.pair
        pair_dicts.append({
            "role": dec.role,
            "columns": [sel_names[a], sel_names[b]],
            "observed": dec.report.observed.value,
            "p_value": dec.report.p,
            "critical": dec.report.critical_values[0],
            "reject": dec.reject,
        })
    doc = {
        "report": "screen",
        "tool": {"name": "checkerdep", "version": __version__},
        "data": {"path": data, "preprocess": preprocess,
                 "tie_policy": tie_policy, "truncate": truncate,
                 "n": int(matrix.shape[0])},
        "hypothesis": {
            "group1": [sel_names[i] for i in layout["group1"]],
            "group2": [sel_names[i] for i in layout["group2"]],
            "chain1": [sel_names[i] for i in layout["chain1"]],
            "chain2": [sel_names[i] for i in layout["chain2"]],
        },
        "params": {"stat": kind, "alpha": alpha, "null_sims": null_sims,
                   "seed": seed},
        "results": {
            "pairs": pair_dicts,
            "pair_count": len(pair_dicts),
            "verdict": report.verdict,
            "reasons": [_reason_names(r, sel_names) for r in report.reasons],
            "note": "per-test level, no multiplicity correction applied",
        },
    }
    rows = [[p["role"], p["columns"][0], p["columns"][1],
             _float_cell(p["observed"]), _float_cell(p["p_value"]),
             _float_cell(p["critical"]), p["reject"]] for p in pair_dicts]
    _emit(_document_text(doc, fmt, ["role", "col_a", "col_b", "observed",
                                    "p_value", "critical", "reject"], rows),
          output)
    click.echo(f"verdict: {report.verdict} "
               f"({len(pair_dicts)} pairwise tests at alpha={alpha:g})",
               err=True)
    for r in doc["results"]["reasons"]:
        click.echo(f"  {r}", err=True)


def _reason_names(reason: str, names: list[str]) -> str:
    def swap(match):
        a, b = int(match.group(1)), int(match.group(2))
        return f"({names[a]}, {names[b]})"
    return re.sub(r"\((\d+), (\d+)\)", swap, reason)


if __name__ == "__main__":
    main()
