"""Command-line entry point: ``pairspin COMMAND CONFIG [options]``.

Commands: pulse, point, scan, compare, phase.  Every CSV starts with ``#``
lines holding the effective configuration; floats are written with full
round-trip precision so identical inputs give byte-identical files.
Failures print one JSON error record on stderr and exit nonzero.
"""

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import __version__
from .config import apply_overrides, parse_config, serialize
from .errors import ConfigError, PairspinError
from .pulse import eval_field, eval_potential, integration_window
from .scan import METHODS, compare_methods, reflection_check, scan_grid
from .smatrix import pair_distributions
from .vortex import classify_singularities, phase_map, phase_map_rows, singularity_rows, winding_numbers

COMMANDS = ("pulse", "point", "scan", "compare", "phase")
_SPIN = ("p", "m")


def effective_window(config):
    if config.window is not None:
        return tuple(config.window)
    return integration_window(config.pulse, config.eps_A)


def _header(config, command, window, extra=()):
    lines = [f"pairspin {__version__}", f"command = {command}",
             f"window = {window[0]!r},{window[1]!r}", *extra]
    lines += serialize(config, include_parallelism=False).splitlines()
    return "".join(f"# {line}\n" if line else "#\n" for line in lines)


def _csv(header, columns, rows):
    buf = io.StringIO()
    buf.write(header)
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _amp_columns():
    pairs = [a + b for a in _SPIN for b in _SPIN]
    return ([f"f_{k}" for k in pairs] + [f"ReA_{k}" for k in pairs]
            + [f"ImA_{k}" for k in pairs] + ["N_p", "N_m"])


def _amp_values(f, A, N):
    A = np.asarray(A).ravel()
    return [*np.asarray(f).ravel(), *A.real, *A.imag, *np.asarray(N).ravel()]


def cmd_pulse(config, args):
    window = effective_window(config)
    ts = np.linspace(window[0], window[1], config.samples)
    E = eval_field(config.pulse, ts)
    A = eval_potential(config.pulse, ts)
    rows = ([t, *e, *a] for t, e, a in zip(ts, E, A))
    return {"": _csv(_header(config, "pulse", window),
                     ["t", "E_x", "E_y", "E_z", "A_x", "A_y", "A_z"], rows)}


def cmd_point(config, args):
    window = effective_window(config)
    amp = pair_distributions(np.array(config.point), config.variant, config.pulse,
                             config.basis, config.spec, window)
    row = [*amp.p, *amp.q, amp.f_total, *_amp_values(amp.f, amp.A, amp.N_tilde), amp.norm_drift]
    columns = ["px", "py", "pz", "qx", "qy", "qz", "f_total", *_amp_columns(), "norm_drift"]
    return {"": _csv(_header(config, "point", window), columns, [row])}


def cmd_scan(config, args):
    window = effective_window(config)
    res = scan_grid(config.grid, config.method, config.variant, config.pulse, config.basis,
                    config.spec, config.parallelism, window)
    pts = config.grid.points()
    columns = ["px", "py", "pz", "f_total"]
    if config.method == "smatrix":
        columns += _amp_columns()

    def rows():
        for j in range(pts.shape[0]):
            for i in range(pts.shape[1]):
                row = [*pts[j, i], res.f_total[j, i]]
                if config.method == "smatrix":
                    row += _amp_values(res.f[j, i], res.A[j, i], res.N_tilde[j, i])
                yield row

    return {"": _csv(_header(config, "scan", window), columns, rows())}


def cmd_compare(config, args):
    window = effective_window(config)
    methods = args.methods or [config.method]
    for m in methods:
        if m not in METHODS:
            raise ConfigError("methods", f"expected one of {', '.join(METHODS)}, got {m!r}")
    if args.reflection:
        if len(methods) != 1:
            raise ConfigError("methods", "reflection check takes exactly one method")
        report = reflection_check(config.grid, methods[0], config.pulse, config.spec,
                                  config.basis, config.parallelism, window)
    else:
        if len(methods) != 2:
            raise ConfigError("methods", "compare needs two methods (or one with --reflection)")
        report = compare_methods(config.grid, methods[0], methods[1], config.variant, config.pulse,
                                 config.spec, config.basis, config.parallelism, window)
    status = "PASS" if report.passes(config.compare_tol) else "FAIL"
    columns = ["method_a", "method_b", "max_abs", "max_rel",
               "argmax_abs_px", "argmax_abs_py", "argmax_abs_pz",
               "argmax_rel_px", "argmax_rel_py", "argmax_rel_pz", "tolerance", "status"]
    row = [report.method_a, report.method_b, report.max_abs, report.max_rel,
           *report.argmax_abs, *report.argmax_rel, config.compare_tol, status]
    return {"": _csv(_header(config, "compare", window), columns, [row])}


def cmd_phase(config, args):
    window = effective_window(config)
    res = scan_grid(config.grid, "smatrix", config.variant, config.pulse, config.basis,
                    config.spec, config.parallelism, window)
    c = 0 if config.cond > 0 else 1
    o = 0 if config.out > 0 else 1
    pmap = phase_map(config.grid, res.A[..., c, o], config.eta, window[0], window[1],
                     helicity=config.basis.kind == "helicity")
    records = classify_singularities(pmap, winding_numbers(pmap))
    header = _header(config, "phase", window)
    return {
        "": _csv(header, ["px", "py", "ReA", "ImA", "phase"], phase_map_rows(pmap)),
        "singularities": _csv(header, ["cell_j", "cell_i", "px", "py", "winding", "class"],
                              singularity_rows(records)),
    }


_HANDLERS = {"pulse": cmd_pulse, "point": cmd_point, "scan": cmd_scan,
             "compare": cmd_compare, "phase": cmd_phase}


def build_parser():
    parser = argparse.ArgumentParser(prog="pairspin", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"pairspin {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("config", help="path to the run configuration file")
        if name == "compare":
            p.add_argument("methods", nargs="*", help=f"one or two of {', '.join(METHODS)}")
            p.add_argument("--reflection", action="store_true",
                           help="compare AntiFeynman(p) with Feynman(-p) for one method")
        p.add_argument("--override", action="append", default=[], metavar="SECTION.KEY=VALUE")
    return parser


def load_config(path, overrides=()):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if overrides:
        text = apply_overrides(text, overrides)
    return parse_config(text)


def _write(outputs, config):
    for suffix, text in outputs.items():
        if not config.output:
            sys.stdout.write(text)
            continue
        path = config.output
        if suffix:
            root, ext = os.path.splitext(path)
            path = f"{root}.{suffix}{ext or '.csv'}"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def error_record(exc):
    record = {"error": getattr(exc, "kind", type(exc).__name__), "message": str(exc)}
    if isinstance(exc, ConfigError):
        record["key"] = exc.key
    return json.dumps(record, sort_keys=True)


def run_command(command, config, args=None):
    """Execute one command and return {suffix: csv text}."""
    args = args or argparse.Namespace(methods=[], reflection=False)
    return _HANDLERS[command](config, args)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, args.override)
        _write(run_command(args.command, config, args), config)
    except (PairspinError, OSError, ValueError) as exc:
        sys.stderr.write(error_record(exc) + "\n")
        return 2 if isinstance(exc, ConfigError) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
