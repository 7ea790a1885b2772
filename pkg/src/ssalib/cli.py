"""Command-line front end: ``ssa <command> ...``.

Commands share files rather than state: ``decompose`` writes a session
snapshot that ``reconstruct``, ``plot``, ``forecast`` and ``parestimate``
read back. Exit codes: 2 bad parameters, 3 invalid input data, 4 numerical
failure, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import io
import sys

import numpy as np

from . import __version__
from .config import DEFAULT_CONFIG, load_config
from .decomposition import load_session, new_session, save_session
from .errors import (
    IoError,
    NumericalError,
    ParameterError,
    SsaError,
    StateError,
    ValidationError,
)
from .forecasting import bforecast, forecast_check, lrr, rforecast, vforecast
from .parest import esprit, pairs_estimate, roots
from .reconstruction import Grouping, parse_groups, reconstruct
from .series import load_series, write_series

EXIT_PARAMETER = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4
EXIT_IO = 5

# mirrors plotting.KINDS; matplotlib is imported only when plotting
PLOT_KINDS = ("values", "vectors", "paired", "wcor", "series", "reconstruction", "roots", "forecast")


def _fmt(x):
    return format(float(x), ".17g")


def _write_text(path, text):
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path!r}: {exc}") from exc


def _cell(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(v)
    return "" if np.isnan(v) else _fmt(v)


def _csv(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_cell(v) for v in row) + "\n")
    return buf.getvalue()


def _index_range(text):
    """``"1-12"`` or ``"1,3,5-7"`` to a flat index list."""
    g = parse_groups(text)
    if len(g) != 1:
        raise ParameterError(f"expected a single index list, got {text!r}")
    return list(g.groups[0])


def _sweep(text):
    """``"from:to:by"`` (inclusive) to a list of ints."""
    try:
        parts = [int(p) for p in text.split(":")]
    except ValueError:
        raise ParameterError(f"malformed sweep {text!r}, expected from:to[:by]") from None
    if len(parts) == 2:
        parts.append(1)
    if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
        raise ParameterError(f"malformed sweep {text!r}, expected from:to[:by]")
    return list(range(parts[0], parts[1] + 1, parts[2]))


def _config(args):
    return load_config(args.config) if args.config else DEFAULT_CONFIG


def _load_input(args):
    return load_series(args.input, format=args.format, value_column=args.value_column)


def cmd_decompose(args):
    series = _load_input(args)
    session = new_session(
        series, args.length, kind=args.kind, method=args.method,
        neig=args.neig, config=_config(args),
    )
    save_session(session, args.out)
    print(session.summary())


def cmd_reconstruct(args):
    session = load_session(args.snapshot)
    grouping = parse_groups(args.groups)
    if args.labels:
        grouping = Grouping(grouping.groups, args.labels.split(","))
    rec = reconstruct(session, grouping)
    written = []
    for label, comp in zip(grouping.labels, rec.components):
        path = f"{args.out}_{label}.csv"
        write_series({label: comp}, path)
        written.append(path)
    if rec.residual is not None:
        path = f"{args.out}_residuals.csv"
        write_series({"Residuals": rec.residual}, path)
        written.append(path)
    for path in written:
        print(path)


def cmd_plot(args):
    from . import plotting

    kind = args.type
    if kind == "forecast":
        art = _forecast_plot(args)
    else:
        try:
            session = load_session(args.input)
        except ValidationError as exc:
            raise ParameterError(f"plot type {kind!r} needs a session snapshot: {exc}") from exc
        idx = _index_range(args.idx) if args.idx else None
        if kind == "values":
            art = plotting.plot_values(session, idx)
        elif kind == "vectors":
            art = plotting.plot_vectors(session, idx)
        elif kind == "paired":
            art = plotting.plot_paired(session, idx)
        elif kind == "series":
            art = plotting.plot_series(session, idx)
        elif kind == "wcor":
            groups = None
            if args.groups:
                g = parse_groups(args.groups)
                # a single range means one group per index, as in as.list(1:30)
                groups = [[i] for i in g.groups[0]] if len(g) == 1 else g
            art = plotting.plot_wcor(session, groups)
        elif kind == "reconstruction":
            if not args.groups:
                raise ParameterError("reconstruction plot needs --groups")
            art = plotting.plot_reconstruction(
                session, parse_groups(args.groups),
                add_original=not args.no_original, add_residuals=not args.no_residuals,
            )
        else:  # roots
            if not args.groups:
                raise ParameterError("roots plot needs --groups")
            group = _index_range(args.groups)
            rs = esprit(session, group) if args.roots_method == "esprit-ls" else roots(lrr(session, group))
            art = plotting.plot_roots(rs)
    for path in art.save(args.out):
        print(path)


def _read_table(path):
    """Numeric CSV with a header row, as ``{column: array}``."""
    try:
        with open(path) as fh:
            lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    except OSError as exc:
        raise IoError(f"cannot read {path!r}: {exc}") from exc
    except UnicodeDecodeError:
        raise ValidationError(f"{path!r} is not a text table") from None
    if len(lines) < 2:
        raise ValidationError(f"{path!r}: expected a header and data rows")
    header = [h.strip() for h in lines[0].split(",")]
    try:
        data = np.array([[float(t) if t.strip() else np.nan for t in ln.split(",")]
                         for ln in lines[1:]])
    except ValueError:
        raise ValidationError(f"{path!r}: non-numeric data") from None
    if data.shape[1] != len(header):
        raise ValidationError(f"{path!r}: ragged table")
    return {h: data[:, k] for k, h in enumerate(header)}


def _forecast_plot(args):
    from . import plotting

    try:
        tab = _read_table(args.input)
    except ValidationError as exc:
        raise ParameterError(f"forecast plot needs a forecast csv: {exc}") from exc
    if "point" not in tab:
        raise ParameterError("forecast plot needs a forecast csv with a 'point' column")
    t = tab.get("time", tab["step"])
    new = tab["step"] > 0
    base = base_t = None
    if args.base:
        b = load_series(args.base)
        base, base_t = b.values, b.times if b.index is not None else None
    elif not np.all(new):
        base, base_t = tab["point"][~new], t[~new]
    lower = tab["lower"][new] if "lower" in tab else None
    upper = tab["upper"][new] if "upper" in tab else None
    return plotting.plot_forecast(tab["point"][new], t[new], base, base_t, lower, upper)


def cmd_forecast(args):
    session = load_session(args.snapshot)
    grouping = parse_groups(args.groups)
    M = args.len
    N = session.N
    index = session.series.index
    method = args.method
    if method.startswith("bootstrap-"):
        if len(grouping) != 1:
            raise ParameterError("bootstrap forecasts take a single group")
        bf = bforecast(
            session, grouping.groups[0], M, level=args.level, replicates=args.replicates,
            method=method.split("-", 1)[1], seed=args.seed,
        )
        steps = np.arange(1, M + 1)
        cols = {"point": bf.mean, "lower": bf.lower, "upper": bf.upper}
        if not args.only_new:
            base = reconstruct(session, grouping).components[0].values
            pad = np.full(N, np.nan)
            steps = np.arange(1 - N, M + 1)
            cols = {
                "point": np.concatenate([base, bf.mean]),
                "lower": np.concatenate([pad, bf.lower]),
                "upper": np.concatenate([pad, bf.upper]),
            }
        if bf.dropped:
            print(f"dropped {bf.dropped} of {bf.replicates} replicates", file=sys.stderr)
    else:
        if not 0 < args.level < 1:
            raise ParameterError(f"confidence level must lie in (0, 1), got {args.level}")
        if method == "recurrent":
            res = rforecast(session, grouping, M, only_new=args.only_new)
        else:
            res = vforecast(session, grouping, M, only_new=args.only_new, fast=args.fast)
        steps = np.arange(1, M + 1) if args.only_new else np.arange(1 - N, M + 1)
        if len(res) == 1:
            cols = {"point": res[0].values}
        else:
            cols = {f"point_{r.label}": r.values for r in res}
    header = ["step"]
    parts = []
    if index is not None:
        header.append("time")
        parts.append(index.times(steps.size, offset=N + int(steps[0]) - 1))
    header += list(cols)
    parts += list(cols.values())
    rows = [[int(s), *vals] for s, vals in zip(steps, np.column_stack(parts))]
    _write_text(args.out, _csv(header, rows))


def cmd_parestimate(args):
    session = load_session(args.snapshot)
    group = _index_range(args.groups)
    if args.method == "pairs":
        if len(group) != 2:
            raise ParameterError(f"pairs method needs exactly two indices, got {len(group)}")
        est = pairs_estimate(session, group)
        print(f"period = {est.period:.6f}, frequency = {est.frequency:.6f}, mad = {est.mad:.6g}")
        text = _csv(["period", "frequency", "mad"], [(est.period, est.frequency, est.mad)])
    else:
        rs = esprit(session, group)
        print(rs)
        text = rs.to_csv()
    if args.out:
        _write_text(args.out, text)


def cmd_forecast_check(args):
    x = _load_input(args).values
    grouping = parse_groups(args.groups)
    cfg = _config(args)
    common = dict(
        forecast_len=args.forecast_len, sliding_len=args.sliding_len, method=args.method,
        svd_method=args.svd_method, neig=args.neig, config=cfg,
    )
    if args.length_sweep and args.start_sweep:
        raise ParameterError("use either --length-sweep or --start-sweep")
    if args.start_sweep:
        key, sweep = "start", _sweep(args.start_sweep)
        if sweep[0] < 1 or sweep[-1] > x.size:
            raise ParameterError(f"start offsets must lie in [1, {x.size}]")
        results = [forecast_check(x[s - 1 :], grouping, L=args.length, **common) for s in sweep]
    else:
        key = "L"
        sweep = _sweep(args.length_sweep) if args.length_sweep else [args.length]
        results = [forecast_check(x, grouping, L=L, **common) for L in sweep]
    header = [key] + list(grouping.labels)
    rows = []
    for s, res in zip(sweep, results):
        rows.append([s if s is not None else "", *res.mse])
        if res.failed.any():
            print(f"{key}={s}: failed windows per group {res.failed.tolist()}", file=sys.stderr)
    _write_text(args.out, _csv(header, rows))


def _add_input_opts(p):
    p.add_argument("input", help="series file")
    p.add_argument("--format", choices=("csv", "plain"), default="csv")
    p.add_argument("--value-column", default=None,
                   help="value column name for multi-column csv (default: last)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ssa", description="Singular spectrum analysis of time series."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="key=value file overriding numerical defaults")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("decompose", help="decompose a series and save a snapshot")
    _add_input_opts(p)
    p.add_argument("--length", "-L", type=int, default=None, help="window length (default N//2)")
    p.add_argument("--kind", choices=("basic", "toeplitz"), default="basic")
    p.add_argument("--method", choices=("auto", "eigen", "svd", "lanczos"), default="auto")
    p.add_argument("--neig", type=int, default=None, help="triples for the truncated backend")
    p.add_argument("--out", "-o", required=True, help="snapshot path")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("reconstruct", help="reconstruct grouped components")
    p.add_argument("snapshot")
    p.add_argument("--groups", "-g", required=True, help='e.g. "1,4|2,3|5-6"')
    p.add_argument("--labels", help="comma-separated component names (default F1, F2, ...)")
    p.add_argument("--out", "-o", required=True, help="output prefix")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("plot", help="write an SVG figure and its data csv")
    p.add_argument("input", help="snapshot, or forecast csv for --type forecast")
    p.add_argument("--type", "-t", choices=PLOT_KINDS, required=True)
    p.add_argument("--idx", help='eigentriple indices, e.g. "1-12"')
    p.add_argument("--groups", "-g", help="grouping (reconstruction, wcor, roots)")
    p.add_argument("--roots-method", choices=("lrr", "esprit-ls"), default="lrr")
    p.add_argument("--base", help="series csv drawn before the forecast")
    p.add_argument("--no-original", action="store_true")
    p.add_argument("--no-residuals", action="store_true")
    p.add_argument("--out", "-o", required=True, help="output stem (adds .svg and .csv)")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("forecast", help="forecast grouped components")
    p.add_argument("snapshot")
    p.add_argument("--groups", "-g", required=True)
    p.add_argument("--len", "-M", type=int, required=True, help="number of new points")
    p.add_argument(
        "--method", default="recurrent",
        choices=("recurrent", "vector", "bootstrap-recurrent", "bootstrap-vector"),
    )
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--only-new", dest="only_new", action=argparse.BooleanOptionalAction,
                   default=True, help="omit the reconstructed base")
    p.add_argument("--fast", action="store_true", help="reduced vector forecast")
    p.add_argument("--out", "-o", default="-")
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("parestimate", help="estimate periods and damping rates")
    p.add_argument("snapshot")
    p.add_argument("--groups", "-g", required=True)
    p.add_argument("--method", choices=("esprit-ls", "pairs"), default="esprit-ls")
    p.add_argument("--out", "-o", help="also write a csv")
    p.set_defaults(func=cmd_parestimate)

    p = sub.add_parser("forecast-check", help="sliding-window forecast accuracy")
    _add_input_opts(p)
    p.add_argument("--groups", "-g", required=True, help="groupings to compare, split by '|'")
    p.add_argument("--forecast-len", type=int, default=1)
    p.add_argument("--sliding-len", type=int, default=None)
    p.add_argument("--length", "-L", type=int, default=None)
    p.add_argument("--length-sweep", help="window lengths from:to:by")
    p.add_argument("--start-sweep", help="1-based first points from:to:by")
    p.add_argument("--method", choices=("recurrent", "vector"), default="recurrent")
    p.add_argument("--svd-method", choices=("auto", "eigen", "svd", "lanczos"), default="auto")
    p.add_argument("--neig", type=int, default=None)
    p.add_argument("--out", "-o", default="-")
    p.set_defaults(func=cmd_forecast_check)
    return parser


def exit_code(exc):
    if isinstance(exc, (ParameterError, StateError)):
        return EXIT_PARAMETER
    if isinstance(exc, ValidationError):
        return EXIT_VALIDATION
    if isinstance(exc, NumericalError):
        return EXIT_NUMERICAL
    if isinstance(exc, IoError):
        return EXIT_IO
    return 1


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except SsaError as exc:
        print(f"ssa {args.command}: {exc}", file=sys.stderr)
        return exit_code(exc)
    return 0


if __name__ == "__main__":
    sys.exit(main())
