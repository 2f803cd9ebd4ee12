"""Run configuration: an INI-style ``key = value`` file with fixed sections.

    [pulse]   kind, E0, tau0, t0, sigma, omega, chi, delta, eps1, eps2
    [grid]    px_min, px_max, px_count, py_min, py_max, py_count, pz
    [solver]  rel_tol, abs_tol, max_step, min_step, t_i, t_f, eps_A, eta
    [run]     method, variant, basis, output, parallelism, samples, compare_tol
    [phase]   cond, out           (optional)
    [point]   p                   (optional)

Vectors are written as comma-separated components.  Unknown sections and
keys are rejected with the offending name in the message.
"""

import configparser
from dataclasses import dataclass, replace

import numpy as np

from .bispinor import BispinorBasis
from .errors import ConfigError
from .odeint import IntegratorSpec
from .pulse import DEFAULT_EPS_A, PulseConfig, PulseKind
from .scan import METHODS, Axis, MomentumGrid, available_cores
from .smatrix import Variant
from .spinorial import check_linear

DEFAULT_GRID_COUNT = 32
DEFAULT_ETA = 1.8

_KEYS = {
    "pulse": ("kind", "E0", "tau0", "t0", "sigma", "omega", "chi", "delta", "eps1", "eps2"),
    "grid": ("px_min", "px_max", "px_count", "py_min", "py_max", "py_count", "pz"),
    "solver": ("rel_tol", "abs_tol", "max_step", "min_step", "t_i", "t_f", "eps_A", "eta"),
    "run": ("method", "variant", "basis", "output", "parallelism", "samples", "compare_tol"),
    "phase": ("cond", "out"),
    "point": ("p",),
}
_REQUIRED = {"pulse": ("kind", "E0"), "grid": ("px_min", "px_max", "py_min", "py_max")}


@dataclass(frozen=True)
class RunConfig:
    pulse: PulseConfig
    grid: MomentumGrid
    spec: IntegratorSpec = IntegratorSpec()
    window: tuple = None
    eps_A: float = DEFAULT_EPS_A
    eta: float = DEFAULT_ETA
    method: str = "smatrix"
    variant: Variant = Variant.FEYNMAN
    basis: BispinorBasis = BispinorBasis()
    output: str = ""
    parallelism: int = 1
    samples: int = 2001
    compare_tol: float = 1e-6
    cond: int = 1
    out: int = -1
    point: tuple = (0.0, 0.0, 0.0)

    def with_(self, **changes):
        return replace(self, **changes)


def _float(section, key, text):
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{section}.{key}", f"expected a number, got {text!r}") from None
    if not np.isfinite(value):
        raise ConfigError(f"{section}.{key}", f"must be finite, got {text!r}")
    return value


def _int(section, key, text):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{section}.{key}", f"expected an integer, got {text!r}") from None


def _vector(section, key, text):
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 3:
        raise ConfigError(f"{section}.{key}", f"expected three comma-separated numbers, got {text!r}")
    return tuple(_float(section, key, p) for p in parts)


def _sign(section, key, text):
    table = {"+": 1, "+1": 1, "1": 1, "-": -1, "-1": -1}
    if text.strip() not in table:
        raise ConfigError(f"{section}.{key}", f"expected '+' or '-', got {text!r}")
    return table[text.strip()]


def _prefixed(section, build):
    """Run a constructor and prefix any ConfigError key with the section."""
    try:
        return build()
    except ConfigError as exc:
        raise ConfigError(f"{section}.{exc.key}", str(exc).split(": ", 1)[1]) from None


def _read(text):
    parser = configparser.ConfigParser(interpolation=None, default_section="__none__",
                                       inline_comment_prefixes=(";",))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("config", str(exc).splitlines()[0]) from None
    sections = {}
    for name in parser.sections():
        if name not in _KEYS:
            raise ConfigError(name, f"unknown section [{name}]")
        items = dict(parser.items(name))
        for key in items:
            if key not in _KEYS[name]:
                raise ConfigError(f"{name}.{key}", "unknown key")
        sections[name] = items
    for name, keys in _REQUIRED.items():
        if name not in sections:
            raise ConfigError(name, f"missing section [{name}]")
        for key in keys:
            if key not in sections[name]:
                raise ConfigError(f"{name}.{key}", "missing required key")
    return sections


def _pulse(items):
    kwargs = {}
    kind = items["kind"].strip()
    try:
        kwargs["kind"] = PulseKind(kind)
    except ValueError:
        names = ", ".join(k.value for k in PulseKind)
        raise ConfigError("pulse.kind", f"expected one of {names}, got {kind!r}") from None
    for key in ("E0", "tau0", "t0", "sigma", "omega", "chi", "delta"):
        if key in items:
            kwargs[key] = _float("pulse", key, items[key])
    for key in ("eps1", "eps2"):
        if key in items:
            kwargs[key] = _vector("pulse", key, items[key])
    return _prefixed("pulse", lambda: PulseConfig(**kwargs))


def _grid(items):
    axes = []
    for name in ("px", "py"):
        lo = _float("grid", f"{name}_min", items[f"{name}_min"])
        hi = _float("grid", f"{name}_max", items[f"{name}_max"])
        count = _int("grid", f"{name}_count", items.get(f"{name}_count", str(DEFAULT_GRID_COUNT)))
        if count < 2:
            raise ConfigError(f"grid.{name}_count", f"must satisfy count >= 2, got {count}")
        if not lo < hi:
            raise ConfigError(f"grid.{name}_min", f"must satisfy {name}_min < {name}_max, got ({lo}, {hi})")
        axes.append(Axis(lo, hi, count))
    pz = _float("grid", "pz", items.get("pz", "0"))
    return MomentumGrid(axes[0], axes[1], pz)


def _solver(items):
    defaults = IntegratorSpec()
    values = {key: _float("solver", key, items[key]) if key in items else getattr(defaults, key)
              for key in ("rel_tol", "abs_tol", "max_step", "min_step")}
    spec = _prefixed("solver", lambda: IntegratorSpec(**values))
    has = ("t_i" in items, "t_f" in items)
    window = None
    if any(has):
        if not all(has):
            missing = "t_f" if has[0] else "t_i"
            raise ConfigError(f"solver.{missing}", "t_i and t_f must be given together")
        window = (_float("solver", "t_i", items["t_i"]), _float("solver", "t_f", items["t_f"]))
        if not window[0] < window[1]:
            raise ConfigError("solver.t_f", f"must satisfy t_i < t_f, got {window}")
    eps_A = _float("solver", "eps_A", items["eps_A"]) if "eps_A" in items else DEFAULT_EPS_A
    if not 0.0 < eps_A < 1.0:
        raise ConfigError("solver.eps_A", f"must lie in (0, 1), got {eps_A}")
    eta = _float("solver", "eta", items["eta"]) if "eta" in items else DEFAULT_ETA
    return spec, window, eps_A, eta


def _run(items):
    out = {}
    method = items.get("method", "smatrix").strip()
    if method not in METHODS:
        raise ConfigError("run.method", f"expected one of {', '.join(METHODS)}, got {method!r}")
    out["method"] = method
    try:
        out["variant"] = Variant.parse(items.get("variant", "Feynman"))
    except ValueError:
        raise ConfigError("run.variant", f"expected Feynman or AntiFeynman, got {items['variant']!r}") from None
    out["basis"] = _prefixed("run", lambda: BispinorBasis.parse(items.get("basis", "z")))
    out["output"] = items.get("output", "").strip()
    out["parallelism"] = _int("run", "parallelism", items.get("parallelism", str(available_cores())))
    if out["parallelism"] < 1:
        raise ConfigError("run.parallelism", f"must be a positive integer, got {out['parallelism']}")
    out["samples"] = _int("run", "samples", items.get("samples", "2001"))
    if out["samples"] < 2:
        raise ConfigError("run.samples", f"must satisfy samples >= 2, got {out['samples']}")
    out["compare_tol"] = _float("run", "compare_tol", items.get("compare_tol", "1e-6"))
    if out["compare_tol"] <= 0:
        raise ConfigError("run.compare_tol", "must be positive")
    return out


def validate(config):
    """Cross-section checks that must fail before any integration starts."""
    if config.method == "spinorial":
        check_linear(config.pulse)
    return config


def parse_config(text):
    sections = _read(text)
    pulse = _pulse(sections["pulse"])
    grid = _grid(sections["grid"])
    spec, window, eps_A, eta = _solver(sections.get("solver", {}))
    run = _run(sections.get("run", {}))
    phase = sections.get("phase", {})
    cond = _sign("phase", "cond", phase["cond"]) if "cond" in phase else 1
    out = _sign("phase", "out", phase["out"]) if "out" in phase else -1
    point = _vector("point", "p", sections["point"]["p"]) if "point" in sections else (0.0, 0.0, 0.0)
    config = RunConfig(pulse=pulse, grid=grid, spec=spec, window=window, eps_A=eps_A, eta=eta,
                       cond=cond, out=out, point=point, **run)
    return validate(config)


def apply_overrides(text, overrides):
    """Return config text with ``section.key=value`` assignments applied."""
    parser = configparser.ConfigParser(interpolation=None, default_section="__none__",
                                       inline_comment_prefixes=(";",))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("config", str(exc).splitlines()[0]) from None
    for item in overrides:
        target, sep, value = item.partition("=")
        section, dot, key = target.strip().partition(".")
        if not sep or not dot or not key:
            raise ConfigError("override", f"expected section.key=value, got {item!r}")
        if section not in _KEYS:
            raise ConfigError(section, f"unknown section [{section}]")
        if key not in _KEYS[section]:
            raise ConfigError(f"{section}.{key}", "unknown key")
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, value.strip())
    return "".join(_emit(parser.items(s), s) for s in parser.sections())


def _emit(items, section):
    lines = [f"[{section}]"] + [f"{k} = {v}" for k, v in items] + [""]
    return "\n".join(lines) + "\n"


def _vec(v):
    return ",".join(repr(float(x)) for x in v)


def _signstr(s):
    return "+" if s > 0 else "-"


def serialize(config, include_parallelism=True):
    """Full effective configuration as text that parses back to an equal value."""
    p, g, s = config.pulse, config.grid, config.spec
    sections = [
        ("pulse", [("kind", p.kind.value), ("E0", repr(p.E0)), ("tau0", repr(p.tau0)),
                   ("t0", repr(p.t0)), ("sigma", repr(p.sigma)), ("omega", repr(p.omega)),
                   ("chi", repr(p.chi)), ("delta", repr(p.delta)),
                   ("eps1", _vec(p.eps1)), ("eps2", _vec(p.eps2))]),
        ("grid", [("px_min", repr(g.px.min)), ("px_max", repr(g.px.max)),
                  ("px_count", str(g.px.count)), ("py_min", repr(g.py.min)),
                  ("py_max", repr(g.py.max)), ("py_count", str(g.py.count)),
                  ("pz", repr(g.pz))]),
    ]
    solver = [("rel_tol", repr(s.rel_tol)), ("abs_tol", repr(s.abs_tol)),
              ("max_step", repr(s.max_step)), ("min_step", repr(s.min_step))]
    if config.window is not None:
        solver += [("t_i", repr(float(config.window[0]))), ("t_f", repr(float(config.window[1])))]
    solver += [("eps_A", repr(config.eps_A)), ("eta", repr(config.eta))]
    sections.append(("solver", solver))
    run = [("method", config.method), ("variant", config.variant.value),
           ("basis", str(config.basis)), ("output", config.output)]
    if include_parallelism:
        run.append(("parallelism", str(config.parallelism)))
    run += [("samples", str(config.samples)), ("compare_tol", repr(config.compare_tol))]
    sections.append(("run", run))
    sections.append(("phase", [("cond", _signstr(config.cond)), ("out", _signstr(config.out))]))
    sections.append(("point", [("p", _vec(config.point))]))
    return "".join(_emit(items, name) for name, items in sections)

