"""Experiment configuration files.

INI-style text with sections; every key is optional and unknown keys are
rejected. Lists are comma separated. Example::

    [experiment]
    name = channel2d
    output_dir = runs/channel      ; default: $FIBERHEAT_OUTPUT_ROOT/<name>
    workers = 2

    [field]
    kind = Channel2D
    delta = 0.15

    [grid]
    n_psi = 256
    n_theta = 256

    [run]
    eps_list = 1e-1, 5e-2, 2e-2, 1e-2, 5e-3

    [solver]
    tol = 1e-10
    preconditioner = jacobi

Sections and keys:

``[experiment]`` name, output_dir, workers
``[field]`` kind plus the model parameters of :func:`fiberheat.field.make_field`
    (``iota`` as polynomial coefficients, ``harmonics`` as ``p q weight`` triples
    separated by commas)
``[grid]`` n_psi, n_theta, n_phi
``[run]`` eps_list, T_minus, T_plus, amplitudes, a_list, refinements
``[solver]`` tol, preconditioner, maxiter
``[ergodic]`` gamma, c, K, M_list, iota, psi_min, psi_max, psi, samples
"""
from __future__ import annotations

import configparser
import hashlib
import json
import os
import re
from dataclasses import asdict, dataclass, field as dc_field
from pathlib import Path

from .errors import ConfigError, FieldError
from .field import make_field
from .solver import PRECONDITIONERS

OUTPUT_ROOT_ENV = "FIBERHEAT_OUTPUT_ROOT"
DEFAULT_OUTPUT_ROOT = "fiberheat-output"


def _floats(text):
    return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in text.replace(";", ",").split(",") if v.strip()]


def _harmonics(text):
    out = []
    for chunk in text.split(","):
        if chunk.strip():
            p, q, w = chunk.split()
            out.append((int(p), int(q), float(w)))
    return out


FIELD_KEYS = {
    "kind": str, "r_inner": float, "r_outer": float, "label": str, "delta": float,
    "major_radius": float, "psi_min": float, "psi_max": float, "iota": _floats,
    "amplitude": float, "a_exponent": float, "harmonics": _harmonics, "envelope": str,
}

SCHEMA = {
    "experiment": {"name": str, "output_dir": str, "workers": int},
    "field": FIELD_KEYS,
    "grid": {"n_psi": int, "n_theta": int, "n_phi": int},
    "run": {"eps_list": _floats, "T_minus": float, "T_plus": float, "amplitudes": _floats,
            "a_list": _floats, "refinements": _ints},
    "solver": {"tol": float, "preconditioner": str, "maxiter": int},
    "ergodic": {"gamma": float, "c": float, "K": int, "M_list": _floats, "iota": _floats,
                "psi_min": float, "psi_max": float, "psi": float, "samples": int},
}


@dataclass
class ExperimentConfig:
    name: str
    field: dict = dc_field(default_factory=dict)
    n_psi: int = 64
    n_theta: int = 64
    n_phi: int = 1
    eps_list: list = dc_field(default_factory=list)
    T_minus: float = 0.0
    T_plus: float = 1.0
    amplitudes: list = dc_field(default_factory=list)
    a_list: list = dc_field(default_factory=list)
    refinements: list = dc_field(default_factory=list)
    tol: float = 1e-10
    preconditioner: str = "jacobi"
    maxiter: int | None = None
    gamma: float = 3.0
    c: float = 0.5
    K: int = 100
    M_list: list = dc_field(default_factory=list)
    iota: list = dc_field(default_factory=lambda: [0.0, 1.0])
    psi_min: float = 0.0
    psi_max: float = 1.0
    psi: float = 1.0
    samples: int = 20
    output_dir: str | None = None
    workers: int = 1

    @property
    def grid_dims(self):
        return (self.n_psi, self.n_theta, self.n_phi)

    def content_hash(self):
        """sha256 of everything that affects results (output location and pool size excluded)."""
        data = asdict(self)
        data.pop("output_dir")
        data.pop("workers")
        text = json.dumps(data, sort_keys=True, default=list)
        return hashlib.sha256(text.encode()).hexdigest()

    def resolved_output_dir(self):
        if self.output_dir:
            return Path(self.output_dir)
        return Path(os.environ.get(OUTPUT_ROOT_ENV, DEFAULT_OUTPUT_ROOT)) / self.name


def _line_index(text):
    """(section, key) -> 1-based line number, by a plain scan of the file."""
    where = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip()
            where[(section, None)] = lineno
            continue
        m = re.match(r"\s*([^=:#;\s][^=:]*?)\s*[=:]", line)
        if m and section is not None:
            where.setdefault((section, m.group(1).strip()), lineno)
    return where


def parse_config(text, defaults=None) -> ExperimentConfig:
    """Parse configuration text. ``defaults(name)`` supplies per-experiment defaults."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    parser.optionxform = str  # keys are case sensitive (T_minus, K, M_list)
    lines = _line_index(text)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse configuration: {exc}", line=getattr(exc, "lineno", None)) from None

    values = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]", field=section, line=lines.get((section, None)))
        for key, raw in parser.items(section):
            line = lines.get((section, key))
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key in [{section}]", field=key, line=line)
            try:
                values[(section, key)] = (SCHEMA[section][key](raw), line)
            except (ValueError, TypeError):
                raise ConfigError(f"cannot read value {raw!r}", field=key, line=line) from None

    if ("experiment", "name") not in values:
        raise ConfigError("missing experiment name", field="name", line=lines.get(("experiment", None)))
    name = values[("experiment", "name")][0]
    cfg = defaults(name) if defaults else ExperimentConfig(name)
    if cfg is None:
        raise ConfigError(f"unknown experiment {name!r}", field="name", line=values[("experiment", "name")][1])

    field_spec = dict(cfg.field)
    if ("field", "kind") in values and values[("field", "kind")][0] != field_spec.get("kind"):
        field_spec = {}  # a different model: start from make_field defaults
    for (section, key), (val, _) in values.items():
        if section == "field":
            field_spec[key] = val
        elif section != "experiment" or key != "name":
            setattr(cfg, key, val)
    cfg.field = field_spec
    validate(cfg, {key: line for (_, key), (_, line) in values.items()})
    return cfg


def validate(cfg: ExperimentConfig, lines=None):
    lines = lines or {}

    def fail(key, msg):
        raise ConfigError(msg, field=key, line=lines.get(key))

    if cfg.eps_list:
        if any(e <= 0 or e > 1 for e in cfg.eps_list):
            fail("eps_list", "eps values must lie in (0, 1]")
        if any(b >= a for a, b in zip(cfg.eps_list, cfg.eps_list[1:])):
            fail("eps_list", "eps_list must be sorted in strictly descending order")
    if cfg.M_list and any(b <= a for a, b in zip(cfg.M_list, cfg.M_list[1:])):
        fail("M_list", "M_list must be strictly increasing")
    if any(a <= 0 for a in cfg.M_list):
        fail("M_list", "M values must be positive")
    if not 0 < cfg.tol < 1:
        fail("tol", "tol must lie in (0, 1)")
    if cfg.preconditioner not in PRECONDITIONERS:
        fail("preconditioner", f"expected one of {', '.join(PRECONDITIONERS)}")
    if cfg.workers < 1:
        fail("workers", "need at least one worker")
    for key in ("n_psi", "n_theta"):
        if getattr(cfg, key) < 3:
            fail(key, "need at least 3 nodes")
    if cfg.gamma <= 2:
        fail("gamma", "gamma must exceed 2")
    if cfg.K < 1:
        fail("K", "K must be at least 1")
    if any(a < 0.5 for a in cfg.a_list):
        fail("a_list", "perturbation exponents must be >= 1/2")
    if any(a <= 0 for a in cfg.amplitudes):
        fail("amplitudes", "amplitudes must be positive")
    if cfg.field:
        try:
            model = make_field(cfg.field)
        except FieldError as exc:
            fail(next(iter(k for k in cfg.field if k in lines), "kind"), f"invalid field: {exc}")
        if model.dim == 2 and cfg.n_phi != 1:
            fail("n_phi", "planar models use n_phi = 1")
        if model.dim == 3 and cfg.n_phi < 3:
            fail("n_phi", "toroidal models need n_phi >= 3")
    out = cfg.resolved_output_dir()
    probe = out if out.exists() else next((p for p in out.parents if p.exists()), Path("."))
    if not os.access(probe, os.W_OK):
        fail("output_dir", f"{out} is not writable")
    return cfg


def load_config(path, defaults=None) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, defaults)
