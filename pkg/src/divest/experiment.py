"""Monte Carlo convergence experiments: config files, runs, results CSV, slopes."""
import configparser
import csv
import io
import math
import re
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .densities import HALF_PI, TrigDensity, cosine_density, sample, smooth_density, true_divergence, true_T, uniform
from .estimators import ESTIMATORS, EstimatorConfig, estimate
from .quadrature import GridSpec, default_grid

CSV_HEADER = ("n", "trial", "estimator", "alpha", "beta", "estimate", "truth", "abs_error", "wall_ms")
DIVERGENCES = ("T", "renyi", "tsallis", "l2")


class ConfigError(ValueError):
    """Malformed experiment configuration; names the offending field and line."""

    def __init__(self, field_name, message, line=None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{field_name}{where}: {message}")
        self.field = field_name
        self.line = line


class FieldError(ValueError):
    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


# ---------------------------------------------------------------- densities

FAMILY_KEYS = {
    "uniform": {"d"},
    "cosine": {"d", "a", "freq", "axis"},
    "smooth": {"d", "s", "max_freq", "scale", "phases"},
    "trig": {"d", "terms"},
}


def _parse_terms(text, d):
    terms = []
    for chunk in filter(None, (c.strip() for c in text.split(";"))):
        parts = chunk.split()
        if len(parts) != 3:
            raise ValueError(f"term {chunk!r} needs 'amplitude freqs phases'")
        freq = tuple(int(f) for f in parts[1].split(","))
        phase = tuple(HALF_PI if p.strip() == "pi/2" else float(p) for p in parts[2].split(","))
        if len(freq) != d or len(phase) != d:
            raise ValueError(f"term {chunk!r} does not have {d} frequencies and phases")
        terms.append((float(parts[0]), freq, phase))
    return tuple(terms)


@dataclass(frozen=True)
class DensitySpec:
    """A density family name and its parameters, as written in a config file."""

    family: str
    params: tuple = ()

    def build(self):
        kw = dict(self.params)
        if self.family not in FAMILY_KEYS:
            raise ValueError(f"unknown density family {self.family!r}; choose from {sorted(FAMILY_KEYS)}")
        extra = set(kw) - FAMILY_KEYS[self.family]
        if extra:
            raise ValueError(f"family {self.family!r} does not take {sorted(extra)}")
        d = int(kw.get("d", 1))
        if self.family == "uniform":
            return uniform(d)
        if self.family == "cosine":
            return cosine_density(float(kw["a"]), d, int(kw.get("freq", 1)), int(kw.get("axis", 0)))
        if self.family == "smooth":
            phases = [int(v) for v in kw["phases"].split(",")] if "phases" in kw else None
            return smooth_density(float(kw["s"]), d, int(kw.get("max_freq", 4)), float(kw.get("scale", 0.3)), phases)
        return TrigDensity(d, _parse_terms(kw["terms"], d))


# ---------------------------------------------------------------- config

@dataclass(frozen=True)
class ExperimentConfig:
    p: DensitySpec
    q: DensitySpec
    divergence: str = "T"
    estimators: tuple = ("linear",)
    alpha: float = 0.5
    beta: float = None
    n_grid: tuple = (500, 1000, 2000, 4000)
    trials: int = 20
    seed: int = 0
    s: float = 2.0
    s_prime: float = None
    kappa_l: float = None
    kappa_u: float = None
    eps: float = None
    c_h: float = 1.0
    c_m: float = 1.0
    lattice_mode: str = "plain"
    grid_points: int = None
    output: str = "results.csv"
    timing: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.beta is None:
            object.__setattr__(self, "beta", 1.0 - self.alpha)
        if self.divergence not in DIVERGENCES:
            raise FieldError("divergence", f"must be one of {DIVERGENCES}")
        if self.divergence in ("renyi", "tsallis") and self.beta != 1.0 - self.alpha:
            raise FieldError("beta", f"{self.divergence} needs beta = 1 - alpha")
        for e in self.estimators:
            if e not in ESTIMATORS:
                raise FieldError("estimators", f"unknown estimator {e!r}")
        if list(self.n_grid) != sorted(set(self.n_grid)) or not self.n_grid:
            raise FieldError("n_grid", "must be nonempty and strictly increasing")
        if self.trials < 1:
            raise FieldError("trials", "must be at least 1")
        if self.workers < 1:
            raise FieldError("workers", "must be at least 1")

    def densities(self):
        p, q = self.p.build(), self.q.build()
        if p.d != q.d:
            raise ValueError(f"p and q live in different dimensions ({p.d} vs {q.d})")
        return p, q

    def estimator_config(self, estimator, p, q):
        kl = self.kappa_l if self.kappa_l is not None else min(p.lower, q.lower)
        ku = self.kappa_u if self.kappa_u is not None else max(p.upper, q.upper)
        grid = GridSpec(p.d, self.grid_points) if self.grid_points else default_grid(p.d)
        return EstimatorConfig(
            alpha=self.alpha, beta=self.beta, s=self.s, d=p.d, kappa_l=kl, kappa_u=ku, eps=self.eps,
            c_h=self.c_h, c_m=self.c_m, s_prime=self.s_prime, grid=grid, estimator=estimator,
            lattice_mode=self.lattice_mode,
        )

    def labels(self):
        if self.divergence == "l2":
            return ("l2",)
        if self.divergence == "T":
            return tuple(self.estimators)
        return tuple(f"{self.divergence}:{e}" for e in self.estimators)


def _floats(text):
    return tuple(float(v) for v in re.split(r"[,\s]+", text.strip()) if v)


def _ints(text):
    return tuple(int(v) for v in re.split(r"[,\s]+", text.strip()) if v)


def _words(text):
    return tuple(v for v in re.split(r"[,\s]+", text.strip()) if v)


def _bool(text):
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# section -> key -> parser
SCHEMA = {
    "experiment": {
        "divergence": str, "estimators": _words, "alpha": float, "beta": float, "n_grid": _ints,
        "trials": int, "seed": int, "output": str, "timing": _bool, "workers": int,
    },
    "estimator": {
        "s": float, "s_prime": float, "kappa_l": float, "kappa_u": float, "eps": float,
        "c_h": float, "c_m": float, "lattice_mode": str, "grid_points": int,
    },
    "p": {"family": str, **{k: str for keys in FAMILY_KEYS.values() for k in keys}},
    "q": {"family": str, **{k: str for keys in FAMILY_KEYS.values() for k in keys}},
}


def _line_index(text):
    """(section, key) -> 1-based line number, for error messages."""
    out, section = {}, None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"\[(.+)\]$", s)
        if m:
            section = m.group(1).strip()
            out[(section, None)] = i
        elif section and "=" in s and not s.startswith(("#", ";")):
            out[(section, s.split("=", 1)[0].strip())] = i
    return out


def parse_config(text, overrides=None):
    """Build an ExperimentConfig from key=value text with section headers.

    ``overrides`` maps ``(section, key)`` to raw string values that replace
    (or add to) the file's entries.
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("config", str(exc).splitlines()[0], getattr(exc, "lineno", None)) from None
    lines = _line_index(text)
    raw = {sec: dict(parser[sec]) for sec in parser.sections()}
    for (sec, key), val in (overrides or {}).items():
        raw.setdefault(sec, {})[key] = val
    for sec in raw:
        if sec not in SCHEMA:
            raise ConfigError(f"[{sec}]", f"unknown section; expected one of {sorted(SCHEMA)}", lines.get((sec, None)))
    values, densities = {}, {}
    for sec, entries in raw.items():
        for key, val in entries.items():
            where = lines.get((sec, key))
            if key not in SCHEMA[sec]:
                raise ConfigError(f"{sec}.{key}", "unknown key", where)
            if sec in ("p", "q"):
                densities.setdefault(sec, {})[key] = val.strip()
                continue
            try:
                values[key] = SCHEMA[sec][key](val)
            except ValueError as exc:
                raise ConfigError(f"{sec}.{key}", f"bad value {val!r} ({exc})", where) from None
    specs = {}
    for sec in ("p", "q"):
        entries = densities.get(sec)
        if not entries or "family" not in entries:
            raise ConfigError(f"{sec}.family", "missing density family", lines.get((sec, None)))
        family = entries.pop("family")
        spec = DensitySpec(family, tuple(sorted(entries.items())))
        try:
            spec.build()
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"{sec}.family", f"invalid density: {exc}", lines.get((sec, "family"))) from None
        specs[sec] = spec
    try:
        return ExperimentConfig(p=specs["p"], q=specs["q"], **values)
    except FieldError as exc:
        sec = next((s for s in SCHEMA if exc.field in SCHEMA[s]), "experiment")
        msg = str(exc).split(": ", 1)[1]
        raise ConfigError(f"{sec}.{exc.field}", msg, lines.get((sec, exc.field))) from None


def load_config(path, overrides=None):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), overrides)


# ---------------------------------------------------------------- runs

@dataclass
class ResultRow:
    n: int
    trial: int
    estimator: str
    alpha: float
    beta: float
    estimate: float
    truth: float
    abs_error: float
    wall_ms: float = 0.0
    error: str = field(default=None, compare=False)

    @property
    def failed(self):
        return not math.isfinite(self.estimate)


def trial_seeds(seed, n, trial):
    """Independent streams for X and Y, derived from (seed, n, trial)."""
    return np.random.SeedSequence([seed, n, trial]).spawn(2)


def _truth(cfg, p, q):
    if cfg.divergence == "T":
        return true_T(p, q, cfg.alpha, cfg.beta)
    if cfg.divergence == "l2":
        return true_divergence(p, q, "l2")
    return true_divergence(p, q, cfg.divergence, cfg.alpha)


def _run_item(args):
    cfg, n, trial, truth = args
    p, q = cfg.densities()
    sx, sy = trial_seeds(cfg.seed, n, trial)
    X, Y = sample(p, n, sx), sample(q, n, sy)
    rows = []
    names = ("linear",) if cfg.divergence == "l2" else cfg.estimators
    for name, label in zip(names, cfg.labels()):
        ecfg = cfg.estimator_config(name, p, q)
        t0 = time.perf_counter()
        try:
            val, err = estimate(X, Y, ecfg, cfg.divergence).value, None
        except (ValueError, ArithmeticError) as exc:
            val, err = math.nan, str(exc)
        ms = (time.perf_counter() - t0) * 1e3 if cfg.timing else 0.0
        rows.append(ResultRow(n, trial, label, cfg.alpha, cfg.beta, val, truth, abs(val - truth), ms, err))
    return rows


def run_experiment(cfg, progress=None):
    """All (n, trial) rows, sorted by (n, trial, estimator order).

    A failing estimate is recorded as a NaN row instead of aborting the run.
    """
    p, q = cfg.densities()
    truth = _truth(cfg, p, q)
    items = [(cfg, n, t, truth) for n in cfg.n_grid for t in range(cfg.trials)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            chunks = list(pool.map(_run_item, items))
    else:
        chunks = []
        for item in items:
            chunks.append(_run_item(item))
            if progress:
                progress(item[1], item[2])
    order = {name: i for i, name in enumerate(cfg.labels())}
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=lambda r: (r.n, r.trial, order[r.estimator]))
    return rows


# ---------------------------------------------------------------- CSV

def _fmt(x):
    return repr(float(x))


def write_results(rows, path_or_file):
    own = isinstance(path_or_file, str)
    fh = open(path_or_file, "w", encoding="utf-8", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([r.n, r.trial, r.estimator, _fmt(r.alpha), _fmt(r.beta), _fmt(r.estimate),
                        _fmt(r.truth), _fmt(r.abs_error), f"{r.wall_ms:.3f}"])
    finally:
        if own:
            fh.close()


def results_to_string(rows):
    buf = io.StringIO()
    write_results(rows, buf)
    return buf.getvalue()


def read_results(path):
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != CSV_HEADER:
            raise ConfigError(path, f"expected header {','.join(CSV_HEADER)}", 1)
        for lineno, rec in enumerate(reader, 2):
            if len(rec) != len(CSV_HEADER):
                raise ConfigError(path, f"expected {len(CSV_HEADER)} fields, got {len(rec)}", lineno)
            try:
                rows.append(ResultRow(int(rec[0]), int(rec[1]), rec[2], *map(float, rec[3:])))
            except ValueError as exc:
                raise ConfigError(path, str(exc), lineno) from None
    return rows


# ---------------------------------------------------------------- slopes

def aggregate_errors(rows, aggregator="median"):
    """n -> aggregate abs_error over the non-failed rows."""
    agg = {"median": np.median, "mean": np.mean}[aggregator]
    by_n = {}
    for r in rows:
        if math.isfinite(r.abs_error):
            by_n.setdefault(r.n, []).append(r.abs_error)
    return {n: float(agg(v)) for n, v in sorted(by_n.items())}


def fit_loglog_slope(rows, aggregator="median"):
    """Least-squares line through (log n, log aggregate error).

    Sample sizes whose aggregate error is zero are dropped with a warning.
    """
    errs = aggregate_errors(rows, aggregator)
    zero = [n for n, e in errs.items() if e <= 0]
    if zero:
        warnings.warn(f"dropping sample sizes with zero aggregate error: {zero}")
    pts = [(n, e) for n, e in errs.items() if e > 0]
    if len(pts) < 2:
        raise ValueError("slope fit needs at least two sample sizes with nonzero error")
    x = np.log([n for n, _ in pts])
    y = np.log([e for _, e in pts])
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


def slopes_by_estimator(rows, aggregator="median"):
    groups = {}
    for r in rows:
        groups.setdefault(r.estimator, []).append(r)
    return {name: fit_loglog_slope(g, aggregator) for name, g in groups.items()}
