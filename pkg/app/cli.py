"""Command-line front end.

Data goes to stdout (or --out) and is byte-identical for a fixed
configuration and seed; status lines go to stderr. Numerical failures exit
with 3, input and validation failures with 4, usage errors with 2.

CSV columns:
    tube, validate:  t, formula, oracle, abs_err, rel_err, tail_bound
                     (validate prefixes an entry column)
    dims:            re_omega, im_omega, order, res_re, res_im
    zeta:            re_s, im_s, re_zeta, im_zeta[, stderr_re, stderr_im]
    invert:          t, c, T, value, residual, oracle, abs_err
"""
import io
import csv
import sys
import json
import math
import functools

import click
import numpy as np

from . import create_app
from .catalog import (default_t_grid, entry_expansion, entry_handle, entry_oracle, entry_region,
                      expansion_handle, get_entry, validate_entry)
from .errors import FractalError, ParameterRangeError, ValidationFailure
from .excel_export import generate_validation_excel
from .geometry import planar_recipe
from .models import RunConfig, Window, ZetaKind
from .tubeformula import complex_dimensions, evaluate_expansion, minkowski_report, tube_expansion
from .zetanum import mc_distance_zeta, mellin_invert_tube, numeric_tube_zeta

FLOAT_FORMAT = "%.17g"
FORMATS = ("text", "csv", "json")
LIST_COLUMNS = ("name", "N", "kind", "delta", "D", "kappa", "strong", "lambda")
TUBE_COLUMNS = ("t", "formula", "oracle", "abs_err", "rel_err", "tail_bound")
DIMS_COLUMNS = ("re_omega", "im_omega", "order", "res_re", "res_im")
TERM_COLUMNS = ("re_omega", "im_omega", "log_power", "coef_re", "coef_im", "level")
ZETA_COLUMNS = ("re_s", "im_s", "re_zeta", "im_zeta")
INVERT_COLUMNS = ("t", "c", "T", "value", "residual", "oracle", "abs_err")
ZETA_KINDS = [k.value for k in ZetaKind]


# Formatting

def format_cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    return str(value)


def render_table(columns, rows, fmt, extra=None):
    """Text, CSV or JSON rendering of rows given as tuples in column order"""
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])
        return buffer.getvalue()
    if fmt == "json":
        payload = {"columns": list(columns), "rows": [[_json_value(v) for v in row] for row in rows]}
        if extra:
            payload.update(extra)
        return json.dumps(payload, indent=2) + "\n"
    lines = ["\t".join(columns)]
    lines += ["\t".join(format_cell(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _json_value(value):
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def read_csv(source):
    """Parse CSV emitted by this module: (columns, rows as dicts).

    Numeric cells come back as float (exact for '%.17g'), empty cells as None.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="utf-8", newline="") as file:
            text = file.read()
    reader = csv.reader(io.StringIO(text))
    columns = next(reader)
    rows = []
    for raw in reader:
        row = {}
        for key, cell in zip(columns, raw):
            if cell == "":
                row[key] = None
                continue
            try:
                row[key] = float(cell)
            except ValueError:
                row[key] = cell
        rows.append(row)
    return columns, rows


def emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as file:
            file.write(text)
        click.echo(f"📊 wrote {out}", err=True)
    else:
        click.echo(text, nl=False)


# Option parsing

def parse_params(values):
    params = {}
    for item in values:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise click.BadParameter(f"expected k=v, got {item!r}", param_hint="--param")
        params[key.strip()] = value.strip()
    return params


def parse_complex(text):
    parts = [p.strip() for p in text.split(",")]
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise click.BadParameter(f"expected re or re,im, got {text!r}", param_hint="--s")


def t_values(entry, oracle, t, t_min, t_max, t_count):
    if t:
        return np.array(sorted(t), dtype=float)
    if t_min is not None or t_max is not None:
        grid = default_t_grid(entry, oracle, t_count)
        lo = t_min if t_min is not None else grid[0]
        hi = t_max if t_max is not None else grid[-1]
        if not 0 < lo <= hi:
            raise ParameterRangeError(f"need 0 < t-min <= t-max, got {lo}, {hi}")
        return np.logspace(math.log10(lo), math.log10(hi), t_count)
    return default_t_grid(entry, oracle, t_count)


def entry_window(entry, screen_sigma):
    if screen_sigma is not None:
        return Window(screen_sigma)
    if not entry.languidity.strong:
        return Window(entry.params["screen"])
    return None


def reports_errors(func):
    """Turn toolkit errors into '❌ Class: message' on stderr and the class exit code"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except FractalError as e:
            click.echo(f"❌ {type(e).__name__}: {e}", err=True)
            sys.exit(e.exit_code)
    return wrapper


def _run(app, command, entry, params, out, fmt, **overrides):
    return RunConfig.from_settings(app.config, command, entry, parse_params(params), out, fmt, **overrides)


def _load(app, cfg):
    return get_entry(cfg.entry, cfg.params, catalog=app.catalog)


def _common(func):
    func = click.option("--format", "fmt", type=click.Choice(FORMATS), default="text", show_default=True)(func)
    func = click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write data here")(func)
    return func


def _entry_options(func):
    func = click.option("--param", "params", multiple=True, help="Parameter override k=v (repeatable)")(func)
    func = click.option("--entry", required=True, help="Catalog entry name")(func)
    return func


@click.group()
@click.option("--log-level", default=None, help="Override FRACTAL_LOG_LEVEL")
@click.pass_context
def cli(ctx, log_level):
    """Fractal zeta functions, complex dimensions and tube formulas."""
    if ctx.obj is None:
        ctx.obj = create_app({"LOG_LEVEL": log_level} if log_level else None)
    elif log_level:
        ctx.obj.logger.setLevel(log_level.upper())


@cli.command("list")
@_common
@click.pass_obj
@reports_errors
def list_entries(app, fmt, out):
    """Catalog entries with N, delta, D and languidity"""
    rows = []
    for name in sorted(app.catalog):
        summary = get_entry(name, catalog=app.catalog).summary()
        rows.append(tuple(summary[c] for c in LIST_COLUMNS))
    emit(render_table(LIST_COLUMNS, rows, fmt), out)


@cli.command()
@_entry_options
@click.option("--s", "s_text", required=True, help="Point re,im")
@click.option("--kind", type=click.Choice(ZETA_KINDS), default="distance", show_default=True)
@click.option("--numeric", is_flag=True, help="Independent numeric value (quadrature or Monte Carlo)")
@click.option("--seed", type=int, default=None)
@click.option("--samples", type=int, default=None)
@_common
@click.pass_obj
@reports_errors
def zeta(app, entry, params, s_text, kind, numeric, seed, samples, fmt, out):
    """Evaluate a zeta function of an entry at s"""
    cfg = _run(app, "zeta", entry, params, out, fmt, seed=seed, mc_samples=samples)
    rfd = _load(app, cfg)
    s = parse_complex(s_text)
    kind = ZetaKind(kind)
    columns, stderr = ZETA_COLUMNS, ()
    if not numeric:
        value = entry_handle(rfd, kind)(s)
    elif kind is ZetaKind.TUBE:
        oracle = entry_oracle(rfd, resolution=cfg.pixel_resolution)
        value = numeric_tube_zeta(oracle, s, rfd.delta, dimension=rfd.dimension)
    elif kind is ZetaKind.DISTANCE:
        recipe = planar_recipe(rfd)
        result = mc_distance_zeta(recipe, entry_region(rfd, recipe), s, cfg.mc_config(), dimension=rfd.dimension)
        value, stderr = result.value, (result.stderr_re, result.stderr_im)
        columns = ZETA_COLUMNS + ("stderr_re", "stderr_im")
    else:
        raise ParameterRangeError(f"no numeric route for the {kind.value} zeta function")
    emit(render_table(columns, [(s.real, s.imag, value.real, value.imag) + stderr], fmt), out)


@cli.command()
@_entry_options
@click.option("--im-max", type=float, default=None, help="Largest |Im omega|")
@click.option("--screen-sigma", type=float, default=None)
@_common
@click.pass_obj
@reports_errors
def dims(app, entry, params, im_max, screen_sigma, fmt, out):
    """Complex dimensions with orders and residues"""
    cfg = _run(app, "dims", entry, params, out, fmt)
    rfd = _load(app, cfg)
    found = complex_dimensions(expansion_handle(rfd), entry_window(rfd, screen_sigma), im_max=im_max,
                               contour_tol=cfg.contour_tol)
    rows = [(d.location.real, d.location.imag, d.order, d.residue.real, d.residue.imag) for d in found]
    click.echo(f"✅ {len(rows)} complex dimensions for {rfd.name}", err=True)
    emit(render_table(DIMS_COLUMNS, rows, fmt), out)


@cli.command()
@_entry_options
@click.option("--t", "t", type=float, multiple=True, help="Sample point (repeatable)")
@click.option("--t-min", type=float, default=None)
@click.option("--t-max", type=float, default=None)
@click.option("--t-count", type=int, default=20, show_default=True)
@click.option("--k-level", "level", type=int, default=None, help="Primitive level k")
@click.option("--K-trunc", "K", type=int, default=None, help="Rows |k| <= K kept")
@click.option("--screen-sigma", type=float, default=None)
@click.option("--terms", "show_terms", is_flag=True, help="Emit the expansion terms instead of the curve")
@_common
@click.pass_obj
@reports_errors
def tube(app, entry, params, t, t_min, t_max, t_count, level, K, screen_sigma, show_terms, fmt, out):
    """Tube expansion sampled against the oracle"""
    cfg = _run(app, "tube", entry, params, out, fmt, k_trunc=K)
    rfd = _load(app, cfg)
    K = cfg.k_trunc
    if screen_sigma is not None:
        level = 0 if level is None else level
        exp = tube_expansion(expansion_handle(rfd), Window(screen_sigma), level=level, K=K)
    else:
        exp = entry_expansion(rfd, level=level, K=K)
    if show_terms:
        rows = [(term.omega.real, term.omega.imag, term.log_power, term.coefficient.real,
                 term.coefficient.imag, term.level) for term in exp.sorted_terms()]
        emit(render_table(TERM_COLUMNS, rows, fmt), out)
        return
    oracle = entry_oracle(rfd, resolution=cfg.pixel_resolution)
    rows = []
    for x in t_values(rfd, oracle, t, t_min, t_max, t_count):
        value, tail = evaluate_expansion(exp, float(x), K)
        reference = float(oracle.primitive(exp.level, float(x)))
        err = abs(value - reference)
        rows.append((float(x), value, reference, err, err / abs(reference) if reference else err, tail))
    extra = {"entry": rfd.name, "level": exp.level, "exact": exp.exact, "pointwise": exp.pointwise}
    emit(render_table(TUBE_COLUMNS, rows, fmt, extra), out)


@cli.command()
@click.option("--entry", "entries", multiple=True, help="Entry to validate (repeatable; default all)")
@click.option("--param", "params", multiple=True, help="Override k=v, only with a single --entry")
@click.option("--t-min", type=float, default=None)
@click.option("--t-max", type=float, default=None)
@click.option("--t-count", type=int, default=40, show_default=True)
@click.option("--K-trunc", "K", type=int, default=None)
@click.option("--xlsx", type=click.Path(dir_okay=False), default=None, help="Also write a workbook")
@_common
@click.pass_obj
@reports_errors
def validate(app, entries, params, t_min, t_max, t_count, K, xlsx, fmt, out):
    """Compare expansions with oracles; exits 4 if any entry fails"""
    names = list(entries) or sorted(app.catalog)
    cfg = _run(app, "validate", None, params, out, fmt, k_trunc=K)
    if cfg.params and len(names) != 1:
        raise ParameterRangeError("--param needs exactly one --entry")
    K, resolution = cfg.k_trunc, cfg.pixel_resolution
    reports, descriptors, rows = [], {}, []
    for name in names:
        rfd = get_entry(name, cfg.params, catalog=app.catalog)
        grid = None
        if t_min is not None or t_max is not None:
            grid = t_values(rfd, entry_oracle(rfd, resolution), (), t_min, t_max, t_count)
        report = validate_entry(rfd, t_grid=grid, K=K, resolution=resolution)
        reports.append(report)
        descriptors[name] = rfd
        rows += [(name, t_, f, o, a, r, tail) for t_, f, o, a, r, tail in
                 zip(report.t, report.formula, report.oracle, report.abs_err, report.rel_err, report.tail_bound)]
        status = "✅" if report.passed else "❌"
        click.echo(f"{status} {name}: sup abs {report.sup_abs:.3g}, sup rel {report.sup_rel:.3g}", err=True)
        for message in report.errors[:5]:
            click.echo(f"   {message}", err=True)
    extra = {"notes": {r.entry: r.notes for r in reports if r.notes}}
    emit(render_table(("entry",) + TUBE_COLUMNS, rows, fmt, extra), out)
    if xlsx:
        with open(xlsx, "wb") as file:
            file.write(generate_validation_excel(reports, descriptors).getvalue())
        click.echo(f"📊 wrote {xlsx}", err=True)
    failed = [r.entry for r in reports if not r.passed]
    if failed:
        raise ValidationFailure(f"{len(failed)} of {len(reports)} entries failed: {', '.join(failed)}")


@cli.command()
@_entry_options
@click.option("--im-max", type=float, default=None)
@click.option("--screen-sigma", type=float, default=None)
@_common
@click.pass_obj
@reports_errors
def report(app, entry, params, im_max, screen_sigma, fmt, out):
    """Minkowski dimension, content and fractality class"""
    cfg = _run(app, "report", entry, params, out, fmt)
    rfd = _load(app, cfg)
    handle = expansion_handle(rfd)
    found = complex_dimensions(handle, entry_window(rfd, screen_sigma), im_max=im_max,
                               contour_tol=cfg.contour_tol)
    result = minkowski_report(handle, found)
    data = result.to_dict()
    if fmt == "json":
        emit(json.dumps({"entry": rfd.name, **data, "notes": result.notes}, indent=2) + "\n", out)
        return
    emit(render_table(("key", "value"), [("entry", rfd.name)] + list(data.items()), fmt), out)


@cli.command()
@_entry_options
@click.option("--t", "t", type=float, required=True)
@click.option("--c", "c", type=float, default=None, help="Abscissa of the vertical line")
@click.option("--T", "T_cut", type=float, default=1e4, show_default=True, help="Truncation |Im s| <= T")
@click.option("--kind", type=click.Choice(["tube", "mellin"]), default="tube", show_default=True)
@_common
@click.pass_obj
@reports_errors
def invert(app, entry, params, t, c, T_cut, kind, fmt, out):
    """Recover V(t) by Mellin inversion along Re s = c"""
    cfg = _run(app, "invert", entry, params, out, fmt)
    rfd = _load(app, cfg)
    z = entry_handle(rfd, ZetaKind(kind))
    N = rfd.ambient_dim
    if c is None:
        upper = N + 1 if kind == "tube" else N
        c = (rfd.dimension + upper) / 2
    value, residual = mellin_invert_tube(z, t, c, T_cut)
    reference = float(entry_oracle(rfd, resolution=cfg.pixel_resolution)(t))
    row = (t, c, T_cut, value, residual, reference, abs(value - reference))
    emit(render_table(INVERT_COLUMNS, [row], fmt), out)
