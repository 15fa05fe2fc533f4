"""Command-line front end: ``psi-lab <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings

import numpy as np

from . import bounds
from .classify import COEFF_LAMBDAS, FUNCTION_LAMBDAS, classify_coeffs, classify_function, \
    coherence_check
from .config import ConfigError, RunConfig, check_interval
from .corpus import input_ids, resolve_input
from .designer import DesignConfig, design
from .functions import InsufficientSmoothness, from_samples
from .quadrature import NonConvergentWarning, QuadSpec
from .transform import CoeffArray, analyze, gram, reconstruction_error, synthesize

EXIT_OK = 0
EXIT_NUMERIC = 2
EXIT_USAGE = 3

EPILOG = """\
exit codes:
  0  success
  2  numeric warning (non-converged quadrature, inconclusive verdict,
     violated or refused bound, stalled design); output is still written
  3  usage error (invalid config, unknown input id, insufficient smoothness)

threads: --threads N or the PSI_LAB_THREADS environment variable.
"""


class UsageError(Exception):
    pass


# io helpers ------------------------------------------------------------------------


def _dump_json(obj):
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


def _clean(obj):
    """Replace non-finite floats by strings so output stays strict JSON."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)) and not math.isfinite(obj):
        return str(float(obj))
    return obj


def _kv_table(config, rows):
    """Two-column text table under a config header."""
    rows = {k: v for k, v in rows.items() if k != "config"}
    width = max(len(k) for k in rows)
    lines = [f"{k:<{width}}  {json.dumps(_clean(v), default=_json_default)}"
             for k, v in sorted(rows.items())]
    return "# config: " + json.dumps(config, sort_keys=True) + "\n" + "\n".join(lines) + "\n"


def _csv_with_header(config, body):
    return "# config: " + json.dumps(config, sort_keys=True) + "\n" + body


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _load_input(name):
    if os.path.exists(name) and not name.isidentifier():
        try:
            data = np.loadtxt(name, delimiter=",", comments="#", ndmin=2)
        except ValueError as exc:
            raise UsageError(f"input: cannot read samples file {name!r}: {exc}") from None
        if data.shape[1] < 2:
            raise UsageError("input: samples file needs two columns x, y")
        return from_samples(data[:, 0], data[:, 1])
    try:
        return resolve_input(name)
    except KeyError:
        raise UsageError(f"input: unknown id {name!r}; known ids: {', '.join(input_ids())}") \
            from None


# config resolution ------------------------------------------------------------------


def resolve_config(args):
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"config: cannot read {args.config!r}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config: top level must be an object")
    cfg = RunConfig.from_dict(data)
    if args.bell is not None:
        cfg.bell = args.bell
    for key in ("jmin", "jmax", "kmax"):
        if getattr(args, key) is not None:
            cfg.window[key] = getattr(args, key)
    if args.tol is not None:
        cfg.tol = args.tol
    if args.lambdas is not None:
        cfg.grids["lambda"] = args.lambdas
    if args.ns is not None:
        cfg.grids["n"] = args.ns
    if args.T is not None:
        cfg.grids["T"] = args.T
    if args.format is not None:
        cfg.format = args.format
    if args.output is not None:
        cfg.output = args.output
    if args.threads is not None:
        cfg.threads = args.threads
    if cfg.threads is None and os.environ.get("PSI_LAB_THREADS"):
        try:
            cfg.threads = int(os.environ["PSI_LAB_THREADS"])
        except ValueError:
            raise ConfigError("PSI_LAB_THREADS: expected an integer") from None
    return cfg.validate()


def _resolved(cfg, args, **extra):
    # what the output embeds; output path excluded so reruns to new files stay identical
    out = cfg.to_dict()
    out.pop("output", None)
    out["command"] = args.command
    out.update(extra)
    return out


# commands ----------------------------------------------------------------------------


def cmd_transform(cfg, args):
    f = _load_input(args.input)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonConvergentWarning)
        c = analyze(f, cfg.profile, cfg.index_window, QuadSpec(tol=cfg.tol), cfg.threads)
    resolved = _resolved(cfg, args, input=args.input)
    c.meta = {"config": resolved}
    if cfg.format in ("csv", "table"):
        text = _csv_with_header(resolved, c.to_csv())
    else:
        text = _dump_json(c.to_dict())
    return text, EXIT_OK if c.converged else EXIT_NUMERIC


def cmd_classify(cfg, args):
    f = _load_input(args.input)
    ns = tuple(cfg.grids["n"])
    T = cfg.grids["T"]
    lams = cfg.grids["lambda"]
    b, w = cfg.profile, cfg.index_window
    resolved = _resolved(cfg, args, input=args.input, side=args.side)
    if args.side == "function":
        v = classify_function(f, lams or FUNCTION_LAMBDAS, ns, T=T, threads=cfg.threads)
        payload, ok = v.to_dict(), v.status == "ok"
    elif args.side == "coefficients":
        c = analyze(f, b, w, QuadSpec(tol=cfg.tol), cfg.threads)
        v = classify_coeffs(c, lams or COEFF_LAMBDAS, ns)
        payload, ok = v.to_dict(), v.status == "ok" and c.converged
    else:
        rep = coherence_check(f, b, w, QuadSpec(tol=cfg.tol),
                              {"lams": lams or FUNCTION_LAMBDAS, "ns": ns, "T": T},
                              {"lams": lams or COEFF_LAMBDAS, "ns": ns}, threads=cfg.threads)
        payload, ok = rep.to_dict(), rep.consistent
    payload["config"] = resolved
    if cfg.format == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["flag", "set"])
        flags = payload["flags"] if "flags" in payload else payload["function"]["flags"]
        for k, val in flags.items():
            wr.writerow([k, int(val)])
        return _csv_with_header(resolved, buf.getvalue()), EXIT_OK if ok else EXIT_NUMERIC
    if cfg.format == "table":
        brief = {k: v for k, v in payload.items() if k not in ("evidence", "limits")}
        for side in ("function", "coefficients"):
            if side in brief:
                brief[side] = {k: v for k, v in brief[side].items() if k in ("flags", "status")}
        return _kv_table(resolved, brief), EXIT_OK if ok else EXIT_NUMERIC
    return _dump_json(_clean(payload)), EXIT_OK if ok else EXIT_NUMERIC


def _row(name, k_max):
    ks = np.arange(-k_max, k_max + 1)
    if name == "e0":
        return (ks == 0).astype(float)
    if name.startswith("poly"):
        return (1.0 + np.abs(ks)) ** -float(name[4:] or 4)
    raise UsageError(f"row: expected e0 or polyP, got {name!r}")


def cmd_verify(cfg, args):
    b, w = cfg.profile, cfg.index_window
    spec = QuadSpec(tol=cfg.tol)
    n = args.n
    resolved = _resolved(cfg, args, lemma=args.lemma, n=n, input=args.input,
                         pair=args.pair, row=args.row, lam=args.lam)
    reports = []
    if args.lemma == "1":
        reports.append(bounds.verify_lemma1(_load_input(args.input or "bump12"), b, w, n, spec,
                                            threads=cfg.threads))
    elif args.lemma == "2":
        js = range(w.j_min, w.j_max + 1)
        reports.append(bounds.verify_lemma2(_row(args.row, w.k_max), b, js, n))
    elif args.lemma == "isoXY":
        f = _load_input(args.input or "bump12")
        lam = 1.0 if args.lam is None else args.lam
        c = analyze(f, b, w, spec, cfg.threads)
        reports.append(bounds.verify_isoXY_a(f, b, lam, n, w, spec, coeffs=c,
                                             T=cfg.grids["T"]))
        reports.append(bounds.verify_isoXY_b(c, b, lam, n, T=cfg.grids["T"]))
    else:
        f = _load_input(args.input or "delta0_1.5")
        phi = _load_input(args.pair or "indicator12")
        rep = bounds.verify_duality(f, phi, b, w, spec)
        payload = {"config": resolved, "duality": rep.to_dict()}
        code = EXIT_OK if rep.status == "ok" else EXIT_NUMERIC
        if cfg.format == "table":
            return _kv_table(resolved, rep.to_dict()), code
        return _dump_json(_clean(payload)), code
    code = EXIT_OK if all(r.passed for r in reports) else EXIT_NUMERIC
    if cfg.format == "table":
        return "# config: " + json.dumps(resolved, sort_keys=True) + "\n" + \
            bounds.format_table(reports) + "\n", code
    if cfg.format == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["check", "n", "lambda", "C_explicit", "ratio", "margin", "status"])
        for r in reports:
            wr.writerow([r.check, r.n, "" if r.lam is None else repr(r.lam), repr(r.C_explicit),
                         repr(r.ratio), repr(r.margin), r.status])
        return _csv_with_header(resolved, buf.getvalue()), code
    return _dump_json(_clean({"config": resolved,
                              "reports": [r.to_dict() for r in reports]})), code


def cmd_gram(cfg, args):
    b, w = cfg.profile, cfg.index_window
    G, info = gram(b, w, QuadSpec(tol=cfg.tol), full_output=True)
    dev = G - np.eye(len(G))
    off = G.copy()
    np.fill_diagonal(off, 0)
    resolved = _resolved(cfg, args)
    summary = {"max_offdiag": float(np.max(np.abs(off))),
               "max_deviation": float(np.max(np.abs(dev))),
               "err_est": info["err_est"], "converged": info["converged"], "size": len(G)}
    code = EXIT_OK if info["converged"] else EXIT_NUMERIC
    if cfg.format == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["row", "col", "re", "im"])
        for i, j in zip(*np.nonzero(np.abs(G) > 0)):
            wr.writerow([int(i), int(j), repr(float(G[i, j].real)), repr(float(G[i, j].imag))])
        return _csv_with_header({**resolved, **summary}, buf.getvalue()), code
    if cfg.format == "table":
        return _kv_table(resolved, summary), code
    payload = {"config": resolved, **summary}
    if not args.summary_only:
        payload["matrix"] = np.stack([G.real, G.imag], axis=-1).tolist()
    return _dump_json(payload), code


def cmd_design(cfg, args):
    dc = DesignConfig(support=tuple(args.support), n_basis=args.n_basis, degree=args.degree,
                      weights=tuple(args.weights), mu=args.mu, max_iters=args.max_iters,
                      samples_per_unit=args.samples_per_unit)
    res = design(None, dc)
    resolved = _resolved(cfg, args, designer=dc.to_dict())
    if args.trace_csv:
        _write(_csv_with_header(resolved, res.trace_csv()), args.trace_csv)
    code = EXIT_NUMERIC if res.status in ("stalled", "infeasible-support") else EXIT_OK
    if cfg.format == "csv":
        return _csv_with_header(resolved, res.trace_csv()), code
    payload = res.to_dict()
    if cfg.format == "table":
        return _kv_table(resolved, {"status": res.status, "iterations": len(res.trace),
                                    "objective": res.trace[-1][1] if res.trace else None,
                                    "residual_norms": payload["residual_norms"]}), code
    payload["config"] = resolved
    return _dump_json(payload), code


def cmd_reconstruct(cfg, args):
    f = _load_input(args.input)
    K = check_interval("K", args.K)
    b, w = cfg.profile, cfg.index_window
    spec = QuadSpec(tol=cfg.tol)
    c = analyze(f, b, w, spec, cfg.threads)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NonConvergentWarning)
        err = reconstruction_error(f, b, w, K, spec, coeffs=c)
    x = np.linspace(K[0], K[1], args.samples)
    fx = np.asarray(f.eval(x))
    sx = synthesize(c, b, x)
    resolved = _resolved(cfg, args, input=args.input, K=list(K), samples=args.samples)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["x", "f_re", "f_im", "synth_re", "synth_im"])
    for xi, fi, si in zip(x, fx, sx):
        fi = complex(fi)
        wr.writerow([repr(float(xi)), repr(fi.real), repr(fi.imag), repr(float(si.real)),
                     repr(float(si.imag))])
    curves = _csv_with_header(resolved, buf.getvalue())
    if args.curves:
        _write(curves, args.curves)
    code = EXIT_OK if c.converged and not caught else EXIT_NUMERIC
    if cfg.format == "csv":
        return curves, code
    summary = {"error": err, "converged": c.converged and not caught}
    if cfg.format == "table":
        return _kv_table(resolved, summary), code
    return _dump_json({"config": resolved, **summary}), code


COMMANDS = {"transform": cmd_transform, "classify": cmd_classify, "verify": cmd_verify,
            "gram": cmd_gram, "design": cmd_design, "reconstruct": cmd_reconstruct}


# parser ---------------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run configuration")
    g.add_argument("--config", help="JSON config file; explicit flags override it")
    g.add_argument("--bell", help="shannon, meyer, meyerN or a profile JSON file")
    g.add_argument("--jmin", type=int)
    g.add_argument("--jmax", type=int)
    g.add_argument("--kmax", type=int)
    g.add_argument("--tol", type=float, help="quadrature tolerance")
    g.add_argument("--lambdas", type=float, nargs="+", help="lambda grid")
    g.add_argument("--ns", type=int, nargs="+", help="derivative-order grid")
    g.add_argument("--T", type=int, help="octaves on each side of 1 for sup-norms")
    g.add_argument("--format", choices=("json", "csv", "table"))
    g.add_argument("--output", "-o", help="output path (default stdout)")
    g.add_argument("--threads", type=int)

    parser = _Parser(prog="psi-lab", description="Half-line wavelet laboratory.",
                     epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("transform", parents=[common], help="coefficient array of an input")
    p.add_argument("--input", required=True, help="corpus id or two-column samples file")

    p = sub.add_parser("classify", parents=[common], help="table verdict of an input")
    p.add_argument("--input", required=True)
    p.add_argument("--side", choices=("function", "coefficients", "coherence"),
                   default="function")

    p = sub.add_parser("verify", parents=[common], help="explicit-constant bound checks")
    p.add_argument("--lemma", required=True, choices=("1", "2", "isoXY", "duality"))
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--lam", type=float, help="lambda for isoXY (default 1)")
    p.add_argument("--input", help="function (lemma 1, isoXY) or f (duality)")
    p.add_argument("--pair", help="phi for duality (default indicator12)")
    p.add_argument("--row", default="e0", help="lemma 2 row: e0 or polyP")

    p = sub.add_parser("gram", parents=[common], help="Gram matrix of the window")
    p.add_argument("--summary-only", action="store_true", help="omit the matrix")

    p = sub.add_parser("design", parents=[common], help="spline bell design")
    p.add_argument("--support", type=float, nargs=2, default=[0.25, 3.0])
    p.add_argument("--n-basis", type=int, default=20)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--weights", type=float, nargs=3, default=[1.0, 1.0, 1.0])
    p.add_argument("--mu", type=float, default=1e-4)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--samples-per-unit", type=int, default=64)
    p.add_argument("--trace-csv", help="also write the trace CSV here")

    p = sub.add_parser("reconstruct", parents=[common], help="L2 reconstruction error on K")
    p.add_argument("--input", required=True)
    p.add_argument("--K", type=float, nargs=2, required=True)
    p.add_argument("--samples", type=int, default=257)
    p.add_argument("--curves", help="write sampled curves CSV here")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        text, code = COMMANDS[args.command](cfg, args)
    except (ConfigError, UsageError, InsufficientSmoothness, ValueError) as exc:
        print(f"psi-lab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write(text, cfg.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
