"""Command-line entry point and configuration handling.

Configs are JSON (schema_version 1).  Example::

    {
      "schema_version": 1,
      "group": "su2",
      "coupling": 1.0,
      "volume": 1.0,
      "mode": "curvature",
      "field_spec": {"ansatz": "SU2_DIAG", "params": [0.0, 1.0, 1.0]},
      "lattice": {"L": 3, "spacing": 1.0, "seed": 0, "background": "random"},
      "tolerances": {"membership": 1e-8}
    }

``field_spec`` takes either a named ansatz with parameters or an explicit
3 x dim coefficient matrix under the key "matrix".  The ``lattice`` section
is required by the constraint subcommands; its seed makes random backgrounds
and tangents reproducible.

Exit codes: 0 success, 2 configuration or validation error, 3 numerical or
resource error.  A divergent exponent is a flagged success, not an error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import constraints, groundstate, strata
from .groundstate import (
    AnsatzCase,
    DivergenceError,
    NumericalError,
    QuadratureConfig,
    ansatz_group,
    ansatz_params,
    build_ansatz,
)
from .liealg import GroupId, get_spec
from .strata import ConstantField, HolonomyMode

__all__ = ["ConfigError", "FieldSpec", "LatticeConfig", "RunConfig", "load_config", "run", "main"]

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class FieldSpec:
    """Either a named ansatz with parameters or an explicit coefficient matrix."""

    ansatz: Optional[str] = None
    params: Optional[tuple] = None
    matrix: Optional[tuple] = None

    def to_dict(self) -> dict:
        if self.ansatz is not None:
            return {"ansatz": self.ansatz, "params": list(self.params)}
        return {"matrix": [list(row) for row in self.matrix]}


@dataclass(frozen=True)
class LatticeConfig:
    """Lattice section; ``background`` is "random", "zero", or "explicit".

    Explicit backgrounds (and, optionally, an explicit qc-check tangent)
    are carried as nested tuples shaped (L, L, L, 3, dim).
    """

    L: int
    spacing: float = 1.0
    seed: int = 0
    background: str = "random"
    amplitude: float = 1.0
    background_fields: Optional[tuple] = None
    tangent_fields: Optional[tuple] = None

    def to_dict(self) -> dict:
        out = {
            "L": self.L,
            "spacing": self.spacing,
            "seed": self.seed,
            "background": self.background,
            "amplitude": self.amplitude,
        }
        if self.background_fields is not None:
            a, e = self.background_fields
            out["background"] = {"A": _untuple(a), "E": _untuple(e)}
        if self.tangent_fields is not None:
            a, e = self.tangent_fields
            out["tangent"] = {"a": _untuple(a), "e": _untuple(e)}
        return out


def _astuple(arr) -> tuple:
    return tuple(_astuple(x) for x in arr) if isinstance(arr, (list, tuple, np.ndarray)) else float(arr)


def _untuple(t):
    return [_untuple(x) for x in t] if isinstance(t, tuple) else t


@dataclass(frozen=True)
class RunConfig:
    group: GroupId
    field_spec: FieldSpec
    coupling: float = 1.0
    volume: float = 1.0
    mode: HolonomyMode = HolonomyMode.CURVATURE_SPAN
    lattice: Optional[LatticeConfig] = None
    tolerances: tuple = ()
    schema_version: int = SCHEMA_VERSION

    def tolerance(self, name: str, default: float) -> float:
        return dict(self.tolerances).get(name, default)

    def to_dict(self) -> dict:
        out = {
            "schema_version": self.schema_version,
            "group": self.group.value.lower(),
            "coupling": self.coupling,
            "volume": self.volume,
            "mode": self.mode.value,
            "field_spec": self.field_spec.to_dict(),
        }
        if self.lattice is not None:
            out["lattice"] = self.lattice.to_dict()
        if self.tolerances:
            out["tolerances"] = dict(self.tolerances)
        return out


def _require_positive(value, name: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(name, f"expected a number, got {value!r}")
    if not value > 0:
        raise ConfigError(name, f"must be strictly positive, got {value}")
    return value


def config_from_dict(data: dict) -> RunConfig:
    """Validate a parsed mapping into a RunConfig with defaults applied."""
    if not isinstance(data, dict):
        raise ConfigError("config", "top level must be a mapping")
    known = {
        "schema_version", "group", "coupling", "volume", "mode",
        "field_spec", "lattice", "tolerances",
    }
    for key in data:
        if key not in known:
            raise ConfigError(key, "unknown configuration key")

    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"unsupported version {version}")

    group_raw = data.get("group")
    if not isinstance(group_raw, str) or group_raw.upper() not in ("SU2", "SU3"):
        raise ConfigError("group", f"expected 'su2' or 'su3', got {group_raw!r}")
    group = GroupId(group_raw.upper())

    coupling = _require_positive(data.get("coupling", 1.0), "coupling")
    volume = _require_positive(data.get("volume", 1.0), "volume")

    mode_raw = data.get("mode", HolonomyMode.CURVATURE_SPAN.value)
    try:
        mode = HolonomyMode(mode_raw)
    except ValueError:
        raise ConfigError("mode", f"expected 'curvature' or 'ambrose-singer', got {mode_raw!r}")

    fs_raw = data.get("field_spec")
    if not isinstance(fs_raw, dict):
        raise ConfigError("field_spec", "required mapping with 'ansatz' or 'matrix'")
    field_spec = _field_spec_from_dict(fs_raw, group)

    lattice = None
    if "lattice" in data:
        lattice = _lattice_from_dict(data["lattice"])

    tol_raw = data.get("tolerances", {})
    if not isinstance(tol_raw, dict):
        raise ConfigError("tolerances", "must be a mapping of name to value")
    tolerances = tuple(sorted((str(k), float(v)) for k, v in tol_raw.items()))

    return RunConfig(
        group=group,
        field_spec=field_spec,
        coupling=coupling,
        volume=volume,
        mode=mode,
        lattice=lattice,
        tolerances=tolerances,
        schema_version=version,
    )


def _field_spec_from_dict(raw: dict, group: GroupId) -> FieldSpec:
    has_ansatz = "ansatz" in raw
    has_matrix = "matrix" in raw
    if has_ansatz == has_matrix:
        raise ConfigError("field_spec", "provide exactly one of 'ansatz' or 'matrix'")
    if has_ansatz:
        name = raw["ansatz"]
        try:
            case = AnsatzCase(name)
        except ValueError:
            raise ConfigError(
                "field_spec.ansatz",
                f"unknown ansatz {name!r}; expected one of {[c.value for c in AnsatzCase]}",
            )
        if ansatz_group(case) is not group:
            raise ConfigError(
                "field_spec.ansatz", f"{case.value} belongs to {ansatz_group(case).value}, not {group.value}"
            )
        params = raw.get("params")
        names = ansatz_params(case)
        if not isinstance(params, (list, tuple)) or len(params) != len(names):
            raise ConfigError(
                "field_spec.params",
                f"{case.value} takes {len(names)} parameters {names}",
            )
        return FieldSpec(ansatz=case.value, params=tuple(float(p) for p in params))
    matrix = raw["matrix"]
    dim = get_spec(group).dim
    try:
        arr = np.asarray(matrix, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError("field_spec.matrix", "must be a nested list of numbers")
    if arr.shape != (3, dim):
        raise ConfigError("field_spec.matrix", f"must be 3 x {dim} for {group.value}, got {arr.shape}")
    return FieldSpec(matrix=tuple(tuple(float(x) for x in row) for row in arr))


def _field_pair_from_dict(raw, keys, name: str) -> tuple:
    pair = []
    for key in keys:
        if key not in raw:
            raise ConfigError(name, f"missing array {key!r}")
        try:
            pair.append(_astuple(np.asarray(raw[key], dtype=float)))
        except (TypeError, ValueError):
            raise ConfigError(f"{name}.{key}", "must be a nested list of numbers")
    return tuple(pair)


def _lattice_from_dict(raw) -> LatticeConfig:
    if not isinstance(raw, dict):
        raise ConfigError("lattice", "must be a mapping")
    if "L" not in raw:
        raise ConfigError("lattice.L", "required")
    try:
        L = int(raw["L"])
    except (TypeError, ValueError):
        raise ConfigError("lattice.L", f"expected an integer, got {raw['L']!r}")
    if L < 2:
        raise ConfigError("lattice.L", f"must be >= 2, got {L}")
    spacing = _require_positive(raw.get("spacing", 1.0), "lattice.spacing")
    seed = int(raw.get("seed", 0))
    background = raw.get("background", "random")
    background_fields = None
    if isinstance(background, dict):
        background_fields = _field_pair_from_dict(background, ("A", "E"), "lattice.background")
        background = "explicit"
    elif background not in ("random", "zero"):
        raise ConfigError(
            "lattice.background",
            f"expected 'random', 'zero', or explicit arrays, got {background!r}",
        )
    tangent_fields = None
    if "tangent" in raw:
        if not isinstance(raw["tangent"], dict):
            raise ConfigError("lattice.tangent", "must be a mapping with arrays 'a' and 'e'")
        tangent_fields = _field_pair_from_dict(raw["tangent"], ("a", "e"), "lattice.tangent")
    amplitude = _require_positive(raw.get("amplitude", 1.0), "lattice.amplitude")
    return LatticeConfig(
        L=L, spacing=spacing, seed=seed, background=background, amplitude=amplitude,
        background_fields=background_fields, tangent_fields=tangent_fields,
    )


def load_config(path) -> RunConfig:
    """Read and validate a JSON config file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError("config", f"no such file: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    return config_from_dict(data)


def build_field(config: RunConfig) -> ConstantField:
    """Constant field described by the config's field_spec."""
    fs = config.field_spec
    if fs.ansatz is not None:
        return build_ansatz(fs.ansatz, fs.params, g=config.coupling, volume=config.volume)
    return ConstantField.from_coeffs(
        get_spec(config.group), np.asarray(fs.matrix, dtype=float),
        g=config.coupling, volume=config.volume,
    )


def build_background(config: RunConfig) -> tuple[constraints.LatticeBackground, np.random.Generator]:
    """Lattice background plus the seeded generator used to draw it."""
    if config.lattice is None:
        raise ConfigError("lattice", "this command needs a lattice section")
    lat = config.lattice
    spec = get_spec(config.group)
    rng = np.random.default_rng(lat.seed)
    shape = (lat.L, lat.L, lat.L, 3, spec.dim)
    if lat.background == "explicit":
        a, e = (np.asarray(_untuple(x), dtype=float) for x in lat.background_fields)
        if a.shape != shape or e.shape != shape:
            raise ConfigError("lattice.background", f"arrays must have shape {shape}")
        bg = constraints.LatticeBackground(spec, lat.L, a, e, lat.spacing, config.coupling)
    elif lat.background == "zero":
        bg = constraints.zero_background(spec, lat.L, lat.spacing, config.coupling)
    else:
        bg = constraints.random_background(
            spec, lat.L, rng, amplitude=lat.amplitude, spacing=lat.spacing, g=config.coupling
        )
    return bg, rng


def build_tangent(config: RunConfig, bg, rng) -> constraints.TangentPair:
    """Explicit tangent from the config when present, seeded random otherwise."""
    lat = config.lattice
    if lat is not None and lat.tangent_fields is not None:
        a, e = (np.asarray(_untuple(x), dtype=float) for x in lat.tangent_fields)
        if a.shape != bg.field_shape or e.shape != bg.field_shape:
            raise ConfigError("lattice.tangent", f"arrays must have shape {bg.field_shape}")
        return constraints.TangentPair(a, e)
    return constraints.random_tangent(bg, rng)


# ---------------------------------------------------------------------------
# Subcommand implementations; each returns report text
# ---------------------------------------------------------------------------


def _format_value(v) -> str:
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return "%.12g" % v
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _report(pairs) -> str:
    return "".join(f"{k}: {_format_value(v)}\n" for k, v in pairs)


def _cmd_classify(config: RunConfig, args) -> str:
    field_ = build_field(config)
    report = strata.classify(field_, config.mode)
    return _report([
        ("command", "classify"),
        ("check_id", "stratum-table-classification"),
        ("group", config.group.value),
        ("mode", report.mode.value),
        ("stratum_index", report.stratum_index),
        ("isotropy_label", report.isotropy_label),
        ("isotropy_dim", report.isotropy_dim),
        ("subbundle_label", report.subbundle_label),
        ("holonomy_dim", report.holonomy_dim),
    ])


def _cmd_sigma(config: RunConfig, args) -> str:
    field_ = build_field(config)
    if args.method == "quadrature":
        result = groundstate.sigma_quadrature(field_, QuadratureConfig())
    else:
        result = groundstate.sigma_spectral(field_)
    return _report([
        ("command", "sigma"),
        ("check_id", "ground-state-exponent"),
        ("group", config.group.value),
        ("method", result.method.value),
        ("sigma", result.sigma),
        ("divergent", result.divergent),
        ("coupling", config.coupling),
        ("volume", config.volume),
    ])


def _cmd_resolvent(config: RunConfig, args) -> str:
    field_ = build_field(config)
    value = groundstate.resolvent_form(field_, args.lam)
    return _report([
        ("command", "resolvent"),
        ("check_id", "resolvent-quadratic-form"),
        ("group", config.group.value),
        ("lam", args.lam),
        ("value", value),
    ])


def _parse_axis(text: str):
    try:
        name, spec_part = text.split("=", 1)
        lo, hi, steps = spec_part.split(":")
        return name.strip(), (float(lo), float(hi), int(steps))
    except ValueError:
        raise ConfigError("axis", f"expected NAME=MIN:MAX:STEPS, got {text!r}")


def _cmd_scan(config: RunConfig, args, out_stream) -> str:
    fs = config.field_spec
    if fs.ansatz is None:
        raise ConfigError("field_spec", "scan needs a named ansatz, not an explicit matrix")
    if not args.axis:
        raise ConfigError("axis", "scan needs at least one --axis NAME=MIN:MAX:STEPS")
    ranges = {}
    for text in args.axis:
        name, rng_spec = _parse_axis(text)
        ranges[name] = rng_spec
    names = ansatz_params(fs.ansatz)
    fixed = {
        n: v for n, v in zip(names, fs.params) if n not in ranges
    }
    result = groundstate.scan_grid(
        fs.ansatz, ranges, fixed,
        g=config.coupling, volume=config.volume, cap=args.cap,
    )
    result.write(out_stream)
    return ""  # the table itself is the output


def _cmd_qc_check(config: RunConfig, args) -> str:
    bg, rng = build_background(config)
    tangent = build_tangent(config, bg, rng)
    tol = args.tol if args.tol is not None else config.tolerance("membership", constraints.MEMBERSHIP_TOL)
    report = constraints.qc_check(bg, tangent, tol)
    return _report([
        ("command", "qc-check"),
        ("check_id", "slice-linear-quadratic-constraints"),
        ("group", config.group.value),
        ("L", bg.L),
        ("seed", config.lattice.seed),
        ("background", config.lattice.background),
        ("slice_residual", report.slice_residual),
        ("linear_residual", report.linear_residual),
        ("quadratic_residual", report.quadratic_residual),
        ("tolerance", report.tolerance),
        ("member", report.member),
    ])


def _cmd_splittings(config: RunConfig, args) -> str:
    bg, _ = build_background(config)
    report = constraints.verify_splittings(bg)
    return _report([
        ("command", "splittings"),
        ("check_id", "tangent-and-dual-space-splittings"),
        ("group", config.group.value),
        ("L", bg.L),
        ("seed", config.lattice.seed),
        ("background", config.lattice.background),
        ("dim_total", report.dim_total),
        ("dim_ker_jprime", report.dim_ker_jprime),
        ("dim_im_jprime_adj", report.dim_im_jprime_adj),
        ("dim_ker_jprime_adj", report.dim_ker_jprime_adj),
        ("dim_im_jprime", report.dim_im_jprime),
        ("orth_residual", report.orth_residual),
        ("rank_nullity_exact",
         report.dim_ker_jprime + report.dim_im_jprime_adj == report.dim_total),
    ])


def _cmd_symmetries(config: RunConfig, args) -> str:
    bg, _ = build_background(config)
    basis = constraints.symmetry_space(bg)
    return _report([
        ("command", "symmetries"),
        ("check_id", "infinitesimal-symmetry-space"),
        ("group", config.group.value),
        ("L", bg.L),
        ("seed", config.lattice.seed),
        ("background", config.lattice.background),
        ("dimension", len(basis)),
    ])


def run(command: str, config: RunConfig, args, out_stream) -> str:
    """Dispatch a subcommand; returns the report text (may be empty for scan)."""
    if command == "classify":
        return _cmd_classify(config, args)
    if command == "sigma":
        return _cmd_sigma(config, args)
    if command == "resolvent":
        return _cmd_resolvent(config, args)
    if command == "scan":
        return _cmd_scan(config, args, out_stream)
    if command == "qc-check":
        return _cmd_qc_check(config, args)
    if command == "splittings":
        return _cmd_splittings(config, args)
    if command == "symmetries":
        return _cmd_symmetries(config, args)
    raise ConfigError("command", f"unknown command {command!r}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbitstrata",
        description="Classify constant gauge fields into orbit strata, evaluate the "
        "leading-order vacuum exponent, and check lattice constraint identities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("config", help="path to a JSON run configuration")
        p.add_argument("--out", help="write output to this file instead of stdout")
        p.add_argument(
            "--mode", choices=[m.value for m in HolonomyMode],
            help="override the holonomy mode from the config",
        )

    p = sub.add_parser("classify", help="stratum of the configured field")
    add_common(p)

    p = sub.add_parser("sigma", help="ground-state exponent of the configured field")
    add_common(p)
    p.add_argument("--method", choices=["spectral", "quadrature"], default="spectral")

    p = sub.add_parser("resolvent", help="resolvent quadratic form at a spectral shift")
    add_common(p)
    p.add_argument("--lam", type=float, required=True, help="spectral shift, >= 0")

    p = sub.add_parser("scan", help="tabulate the exponent over a parameter grid")
    add_common(p)
    p.add_argument(
        "--axis", action="append", default=[],
        metavar="NAME=MIN:MAX:STEPS", help="scanned parameter axis (repeatable)",
    )
    p.add_argument("--cap", type=int, default=10**6, help="maximum number of grid points")

    p = sub.add_parser("qc-check", help="slice/linear/quadratic residuals of a random tangent")
    add_common(p)
    p.add_argument("--tol", type=float, help="membership tolerance override")

    p = sub.add_parser("splittings", help="rank/nullity and orthogonality of the splittings")
    add_common(p)

    p = sub.add_parser("symmetries", help="dimension of the infinitesimal symmetry space")
    add_common(p)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        if args.mode:
            config = replace(config, mode=HolonomyMode(args.mode))
        if args.out:
            with open(args.out, "w") as out_stream:
                text = run(args.command, config, args, out_stream)
                if text:
                    out_stream.write(text)
        else:
            text = run(args.command, config, args, sys.stdout)
            if text:
                sys.stdout.write(text)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, DivergenceError, constraints.ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
