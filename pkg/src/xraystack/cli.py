"""Command line front end: one task per run, artifacts written to a directory.

Each subcommand builds the configured multilayer, runs one analysis, and
writes fixed-name CSV or JSON artifacts (plus a rendered PNG) into the
output directory.  Inputs come from an optional JSON config file whose
keys carry explicit unit suffixes, with a handful of command line
overrides applied on top.  Identical inputs produce byte identical data
files; the only line allowed to vary between tool versions is the
leading comment of each CSV.

Exit codes: 0 success, 2 configuration problem, 3 numerical failure,
4 I/O failure.  On failure a machine readable JSON object describing
the error is printed to stderr.  On success each task prints a JSON
summary naming its artifacts; ``winding`` and ``validate`` print their
full report.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .errors import ConfigError, NumericsError
from .greens import LayeredGreens, ScatterContext
from .hamiltonian import build_hamiltonian
from .materials import MaterialsDB, load_materials
from .reflectivity import (
    DEFAULT_POINTS,
    DEFAULT_SPAN_GAMMA0,
    compute_reflectivity,
    detuning_grid,
    feature_extract,
)
from .spectral import edge_report, eigensystem
from .stack import StackConfig, build_stack
from .topology import (
    DEFAULT_GAP_TOL,
    DEFAULT_N_K,
    PHASE_DIAGRAM_GAP_TOL,
    extract_bulk,
    winding_number,
)

#: Grazing angle used when the configuration does not set one (mrad).
DEFAULT_ANGLE_MRAD = 2.4067

#: Spacer thickness below which the layered coupling model leaves its
#: validated range; ``validate`` warns but does not fail.
THIN_SPACER_WARNING_NM = 2.0


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved inputs for one task invocation."""

    stack: StackConfig
    angle_mrad: float = DEFAULT_ANGLE_MRAD
    polarization: str = "s"
    materials_path: str | None = None
    out_dir: Path = Path(".")
    fmt: str = "csv"
    threads: int = 1
    figures: bool = True
    detuning_gamma0: float = 0.0
    span_gamma0: float = DEFAULT_SPAN_GAMMA0
    points: int = DEFAULT_POINTS
    n_k: int = DEFAULT_N_K
    reach: int | None = None
    gap_tol: float | None = None
    profile_step_nm: float = 0.05
    profile_margin_nm: float = 10.0
    d_v_min_nm: float = 2.0
    d_v_max_nm: float = 7.0
    d_v_points: int = 20
    d_w_min_nm: float = 2.0
    d_w_max_nm: float = 7.0
    d_w_points: int = 20
    sweep_d_v_min_nm: float = 1.75
    sweep_d_v_max_nm: float = 7.0
    sweep_points: int = 100

    def __post_init__(self) -> None:
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"format must be 'csv' or 'json', got {self.fmt!r}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if not self.profile_step_nm > 0.0:
            raise ConfigError(
                f"profile_step_nm must be > 0, got {self.profile_step_nm}"
            )
        if self.gap_tol is not None and not self.gap_tol > 0.0:
            raise ConfigError(f"gap_tol must be > 0, got {self.gap_tol}")
        if self.profile_margin_nm < 0.0:
            raise ConfigError(
                f"profile_margin_nm must be >= 0, got {self.profile_margin_nm}"
            )
        for name in ("d_v_points", "d_w_points", "sweep_points"):
            if getattr(self, name) < 2:
                raise ConfigError(f"{name} must be >= 2, got {getattr(self, name)}")
        for lo, hi in (
            ("d_v_min_nm", "d_v_max_nm"),
            ("d_w_min_nm", "d_w_max_nm"),
            ("sweep_d_v_min_nm", "sweep_d_v_max_nm"),
        ):
            if not getattr(self, lo) < getattr(self, hi):
                raise ConfigError(
                    f"{lo} must be below {hi}, got "
                    f"{getattr(self, lo)} and {getattr(self, hi)}"
                )

    def context(self) -> ScatterContext:
        return ScatterContext(
            angle_mrad=self.angle_mrad,
            energy_kev=self.stack.energy_kev,
            polarization=self.polarization,
        )

    def database(self) -> MaterialsDB:
        return load_materials(self.materials_path)


# ---------------------------------------------------------------------------
# config ingestion


def _as_float(value: Any, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"config key {key!r} must be a number, got {value!r}")
    return float(value)


def _as_int(value: Any, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"config key {key!r} must be an integer, got {value!r}")
    return value


def _as_str(value: Any, key: str) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"config key {key!r} must be a string, got {value!r}")
    return value


def _as_bool(value: Any, key: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"config key {key!r} must be true or false, got {value!r}")
    return value


def _as_path(value: Any, key: str) -> Path:
    return Path(_as_str(value, key))


def _as_optional_int(value: Any, key: str) -> int | None:
    if value is None:
        return None
    return _as_int(value, key)


_RUN_KEYS: dict[str, tuple[str, Callable[[Any, str], Any]]] = {
    "materials": ("materials_path", _as_str),
    "out": ("out_dir", _as_path),
    "format": ("fmt", _as_str),
    "polarization": ("polarization", _as_str),
    "threads": ("threads", _as_int),
    "figures": ("figures", _as_bool),
    "angle_mrad": ("angle_mrad", _as_float),
    "detuning_gamma0": ("detuning_gamma0", _as_float),
    "span_gamma0": ("span_gamma0", _as_float),
    "points": ("points", _as_int),
    "n_k": ("n_k", _as_int),
    "reach": ("reach", _as_optional_int),
    "gap_tol": ("gap_tol", _as_float),
    "profile_step_nm": ("profile_step_nm", _as_float),
    "profile_margin_nm": ("profile_margin_nm", _as_float),
    "d_v_min_nm": ("d_v_min_nm", _as_float),
    "d_v_max_nm": ("d_v_max_nm", _as_float),
    "d_v_points": ("d_v_points", _as_int),
    "d_w_min_nm": ("d_w_min_nm", _as_float),
    "d_w_max_nm": ("d_w_max_nm", _as_float),
    "d_w_points": ("d_w_points", _as_int),
    "sweep_d_v_min_nm": ("sweep_d_v_min_nm", _as_float),
    "sweep_d_v_max_nm": ("sweep_d_v_max_nm", _as_float),
    "sweep_points": ("sweep_points", _as_int),
}

_STACK_KEYS = frozenset(StackConfig.__dataclass_fields__)


def _cast_stack_value(key: str, value: Any) -> Any:
    if key.endswith("_material"):
        return _as_str(value, key)
    if key == "n_cavities":
        return _as_int(value, key)
    return _as_float(value, key)


def _load_config_file(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object at the top level")
    return data


def assemble_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, the optional config file, and command line flags."""
    data = {} if args.config is None else _load_config_file(args.config)
    stack_data: dict[str, Any] = {}
    run_data: dict[str, Any] = {}
    for key, value in data.items():
        if key in _STACK_KEYS:
            stack_data[key] = _cast_stack_value(key, value)
        elif key in _RUN_KEYS:
            attr, cast = _RUN_KEYS[key]
            run_data[attr] = cast(value, key)
        else:
            raise ConfigError(f"unknown config key {key!r}")

    if args.dv is not None:
        stack_data["d_v_nm"] = args.dv
    if args.dw is not None:
        stack_data["d_w_nm"] = args.dw
    if args.n_cavities is not None:
        stack_data["n_cavities"] = args.n_cavities
    if args.angle_mrad is not None:
        run_data["angle_mrad"] = args.angle_mrad
    if args.materials is not None:
        run_data["materials_path"] = args.materials
    if args.out is not None:
        run_data["out_dir"] = Path(args.out)
    if args.format is not None:
        run_data["fmt"] = args.format
    if args.threads is not None:
        run_data["threads"] = args.threads
    if args.no_figures:
        run_data["figures"] = False

    return RunConfig(stack=StackConfig.from_dict(stack_data), **run_data)


# ---------------------------------------------------------------------------
# artifact writers


def _atomic_write(path: Path, text: str) -> None:
    """Write-then-rename so readers never observe a partial file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    handle = tempfile.NamedTemporaryFile(
        "w", dir=path.parent, prefix=path.name + ".", suffix=".tmp", delete=False
    )
    try:
        with handle:
            handle.write(text)
        os.replace(handle.name, path)
    except BaseException:
        try:
            os.unlink(handle.name)
        except OSError:
            pass
        raise


def _cell(value: Any) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _json_cell(value: Any) -> Any:
    if isinstance(value, (int, np.integer)):
        return int(value)
    value = float(value)
    return None if math.isnan(value) else value


def _write_table(
    cfg: RunConfig, name: str, columns: Sequence[str], rows: Sequence[Sequence]
) -> Path:
    if cfg.fmt == "csv":
        path = cfg.out_dir / f"{name}.csv"
        buf = io.StringIO()
        buf.write(f"# xraystack {__version__}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
        _atomic_write(path, buf.getvalue())
    else:
        path = cfg.out_dir / f"{name}.json"
        payload = {
            "version": __version__,
            "columns": list(columns),
            "rows": [[_json_cell(v) for v in row] for row in rows],
        }
        _atomic_write(path, json.dumps(payload, indent=2) + "\n")
    return path


def _write_report(out_dir: Path, name: str, payload: dict) -> Path:
    path = out_dir / f"{name}.json"
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


# ---------------------------------------------------------------------------
# tasks


def _build_all(cfg: RunConfig):
    db = cfg.database()
    return build_stack(cfg.stack, db), cfg.context()


def _task_greens_dump(cfg: RunConfig) -> dict:
    stack, ctx = _build_all(cfg)
    solution = LayeredGreens(stack, ctx)
    centers = stack.resonant_centers_nm
    matrix = np.empty((len(centers), len(centers)), dtype=complex)
    rows = []
    for i, zi in enumerate(centers):
        for j, zj in enumerate(centers):
            matrix[i, j] = solution.evaluate(zi, zj)
            rows.append((i, j, matrix[i, j].real, matrix[i, j].imag))
    artifacts = {
        "greens_matrix": _write_table(
            cfg, "greens_matrix", ("row", "col", "re", "im"), rows
        )
    }

    span = stack.total_thickness_nm + 2.0 * cfg.profile_margin_nm
    n_z = int(round(span / cfg.profile_step_nm)) + 1
    z_grid = np.linspace(
        -cfg.profile_margin_nm, stack.total_thickness_nm + cfg.profile_margin_nm, n_z
    )
    field = np.asarray(solution.field_profile(z_grid))
    artifacts["field_profile"] = _write_table(
        cfg,
        "field_profile",
        ("z_nm", "re", "im"),
        [(z, f.real, f.imag) for z, f in zip(z_grid, field)],
    )
    if cfg.figures:
        from . import plotting

        artifacts["figure"] = plotting.greens_dump_figure(
            matrix, z_grid, field, stack.interfaces_nm, cfg.out_dir / "greens_dump.png"
        )
    return {"artifacts": {k: str(v) for k, v in artifacts.items()}}


def _task_hamiltonian(cfg: RunConfig) -> dict:
    stack, ctx = _build_all(cfg)
    ham = build_hamiltonian(stack, ctx, detuning_gamma0=cfg.detuning_gamma0)
    rows = [
        (i, j, ham.matrix[i, j].real, ham.matrix[i, j].imag)
        for i in range(ham.size)
        for j in range(ham.size)
    ]
    artifacts = {
        "hamiltonian": _write_table(cfg, "hamiltonian", ("row", "col", "re", "im"), rows)
    }
    if cfg.figures:
        from . import plotting

        artifacts["figure"] = plotting.matrix_figure(
            ham.matrix,
            cfg.out_dir / "hamiltonian.png",
            "|coupling| between resonant layers (linewidths)",
        )
    return {"artifacts": {k: str(v) for k, v in artifacts.items()}}


def _task_eigen(cfg: RunConfig) -> dict:
    stack, ctx = _build_all(cfg)
    ham = build_hamiltonian(stack, ctx, detuning_gamma0=cfg.detuning_gamma0)
    system = eigensystem(ham)
    try:
        report = edge_report(system)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    artifacts = {
        "eigenvalues": _write_table(
            cfg,
            "eigenvalues",
            ("index", "re", "im"),
            [
                (i, v.real, v.imag)
                for i, v in enumerate(system.eigenvalues)
            ],
        )
    }
    weights = system.spatial_weights()
    artifacts["weights"] = _write_table(
        cfg,
        "weights",
        ("state", "layer", "weight"),
        [
            (s, l, weights[s, l])
            for s in range(system.size)
            for l in range(system.size)
        ],
    )
    artifacts["eigen_report"] = _write_report(
        cfg.out_dir,
        "eigen_report",
        {
            "version": __version__,
            "bulk_reference": report.bulk_reference,
            "midgap_indices": list(report.midgap_indices),
            "edge_weights": [float(w) for w in report.edge_weights],
            "any_exceptional": system.any_exceptional,
        },
    )
    if cfg.figures:
        from . import plotting

        artifacts["figure"] = plotting.eigen_figure(
            system.eigenvalues, report.edge_weights, cfg.out_dir / "eigen.png"
        )
    return {"artifacts": {k: str(v) for k, v in artifacts.items()}}


def _bulk_model(matrix: np.ndarray, reach: int | None):
    # a chain too short or too odd for bulk extraction is a configuration
    # problem when it comes from the command line
    try:
        return extract_bulk(matrix, reach=reach)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _task_winding(cfg: RunConfig) -> dict:
    stack, ctx = _build_all(cfg)
    ham = build_hamiltonian(stack, ctx)
    model = _bulk_model(ham.matrix, cfg.reach)
    try:
        result = winding_number(
            model,
            n_k=cfg.n_k,
            gap_tol=DEFAULT_GAP_TOL if cfg.gap_tol is None else cfg.gap_tol,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    payload = {
        "version": __version__,
        "d_v_nm": cfg.stack.d_v_nm,
        "d_w_nm": cfg.stack.d_w_nm,
        "angle_mrad": cfg.angle_mrad,
        "winding": result.value,
        "per_band": list(result.per_band),
        "raw_re": result.raw.real,
        "raw_im": result.raw.imag,
        "min_gap": result.min_gap,
        "n_k": result.n_k,
        "quantization_error": result.quantization_error,
        "extraction_reach": model.reach,
        "extraction_spread": model.spread,
    }
    path = _write_report(cfg.out_dir, "winding", payload)
    return dict(payload, artifacts={"winding": str(path)})


def _task_phase_diagram(cfg: RunConfig) -> dict:
    db = cfg.database()
    ctx = cfg.context()
    d_v_values = np.linspace(cfg.d_v_min_nm, cfg.d_v_max_nm, cfg.d_v_points)
    d_w_values = np.linspace(cfg.d_w_min_nm, cfg.d_w_max_nm, cfg.d_w_points)

    gap_tol = PHASE_DIAGRAM_GAP_TOL if cfg.gap_tol is None else cfg.gap_tol

    def point(spacers: tuple[float, float]) -> tuple[float, float, int, int]:
        d_v, d_w = spacers
        stack = build_stack(cfg.stack.with_spacers(d_v, d_w), db)
        ham = build_hamiltonian(stack, ctx)
        model = _bulk_model(ham.matrix, cfg.reach)
        try:
            result = winding_number(model, n_k=cfg.n_k, gap_tol=gap_tol)
        except NumericsError:
            return (float("nan"), float("nan"), -1, 1)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return (result.raw.real, result.raw.imag, result.value, 0)

    pairs = [(float(dv), float(dw)) for dv in d_v_values for dw in d_w_values]
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(point, pairs))
    else:
        results = [point(p) for p in pairs]

    rows = [(dv, dw, *res) for (dv, dw), res in zip(pairs, results)]
    artifacts = {
        "phase_diagram": _write_table(
            cfg,
            "phase_diagram",
            ("d_v", "d_w", "W_raw_re", "W_raw_im", "W_int", "flag"),
            rows,
        )
    }
    if cfg.figures:
        from . import plotting

        winding = np.array([res[2] for res in results]).reshape(
            cfg.d_v_points, cfg.d_w_points
        )
        defined = np.array([res[3] == 0 for res in results]).reshape(winding.shape)
        artifacts["figure"] = plotting.phase_figure(
            d_v_values, d_w_values, winding, defined, cfg.out_dir / "phase_diagram.png"
        )
    n_flagged = sum(res[3] for res in results)
    return {
        "artifacts": {k: str(v) for k, v in artifacts.items()},
        "points": len(rows),
        "flagged": n_flagged,
    }


def _task_reflectivity(cfg: RunConfig) -> dict:
    stack, ctx = _build_all(cfg)
    grid = detuning_grid(cfg.span_gamma0, cfg.points)
    rs = compute_reflectivity(stack, ctx, detuning_gamma0=grid)
    reflectivity = rs.reflectivity
    artifacts = {
        "reflectivity": _write_table(
            cfg,
            "reflectivity",
            ("delta_gamma0", "R", "re_amp", "im_amp"),
            [
                (d, r, a.real, a.imag)
                for d, r, a in zip(rs.detuning_gamma0, reflectivity, rs.amplitude)
            ],
        )
    }
    features = feature_extract(rs)
    artifacts["features"] = _write_report(
        cfg.out_dir,
        "features",
        {
            "version": __version__,
            "method": rs.method,
            "baseline_reflectivity": rs.baseline,
            "n_maxima": features.n_maxima,
            "maxima_detuning": [float(x) for x in features.maxima_detuning],
            "maxima_reflectivity": [float(x) for x in features.maxima_reflectivity],
            "minima_detuning": [float(x) for x in features.minima_detuning],
            "minima_reflectivity": [float(x) for x in features.minima_reflectivity],
            "fit_baseline": features.fit_baseline,
            "fit_height": features.fit_height,
            "fit_center": features.fit_center,
            "fit_width": features.fit_width,
            "r_squared": features.r_squared,
        },
    )
    if cfg.figures:
        from . import plotting

        artifacts["figure"] = plotting.reflectivity_figure(
            rs.detuning_gamma0,
            reflectivity,
            rs.baseline,
            cfg.out_dir / "reflectivity.png",
        )
    return {"artifacts": {k: str(v) for k, v in artifacts.items()}}


def _task_dv_sweep(cfg: RunConfig) -> dict:
    db = cfg.database()
    ctx = cfg.context()
    d_w = cfg.stack.d_w_nm
    d_v_values = np.linspace(
        cfg.sweep_d_v_min_nm, cfg.sweep_d_v_max_nm, cfg.sweep_points
    )

    def point(d_v: float):
        stack = build_stack(cfg.stack.with_spacers(d_v, d_w), db)
        ham = build_hamiltonian(stack, ctx)
        system = eigensystem(ham)
        try:
            report = edge_report(system)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return system.eigenvalues, report.edge_weights

    values = [float(v) for v in d_v_values]
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(point, values))
    else:
        results = [point(v) for v in values]

    rows = []
    for d_v, (eigenvalues, edge_weights) in zip(values, results):
        for index, (value, weight) in enumerate(zip(eigenvalues, edge_weights)):
            rows.append((d_v, d_v / d_w, index, value.real, value.imag, weight))
    artifacts = {
        "dv_sweep": _write_table(
            cfg,
            "dv_sweep",
            ("d_v_nm", "d_v_over_d_w", "index", "re", "im", "edge_weight"),
            rows,
        )
    }
    if cfg.figures:
        from . import plotting

        artifacts["figure"] = plotting.sweep_figure(
            np.array([row[1] for row in rows]),
            np.array([row[3] for row in rows]),
            np.array([row[5] for row in rows]),
            cfg.out_dir / "dv_sweep.png",
        )
    return {"artifacts": {k: str(v) for k, v in artifacts.items()}}


_TASKS: dict[str, Callable[[RunConfig], dict]] = {
    "greens-dump": _task_greens_dump,
    "hamiltonian": _task_hamiltonian,
    "eigen": _task_eigen,
    "winding": _task_winding,
    "phase-diagram": _task_phase_diagram,
    "reflectivity": _task_reflectivity,
    "dv-sweep": _task_dv_sweep,
}


def _run_validate(args: argparse.Namespace) -> int:
    """Dry-run diagnostics; always exits 0, problems go into the report."""
    errors: list[str] = []
    warnings: list[str] = []
    checked: dict[str, Any] = {}

    cfg = None
    try:
        cfg = assemble_config(args)
    except ConfigError as exc:
        errors.append(str(exc))

    if cfg is not None:
        checked["stack"] = cfg.stack.to_dict()
        checked["angle_mrad"] = cfg.angle_mrad
        checked["polarization"] = cfg.polarization
        try:
            cfg.context()
        except ConfigError as exc:
            errors.append(str(exc))
        db = None
        try:
            db = cfg.database()
            checked["materials"] = db.names()
        except ConfigError as exc:
            errors.append(str(exc))
        if db is not None:
            try:
                stack = build_stack(cfg.stack, db)
                checked["n_layers"] = len(stack.layers)
                checked["resonant_layers"] = stack.n_resonant
                checked["total_thickness_nm"] = stack.total_thickness_nm
            except ConfigError as exc:
                errors.append(str(exc))
        for name in ("d_v_nm", "d_w_nm"):
            value = getattr(cfg.stack, name)
            if value < THIN_SPACER_WARNING_NM:
                warnings.append(
                    f"{name} = {value} nm: spacers thinner than "
                    f"{THIN_SPACER_WARNING_NM} nm sit outside the validated "
                    "range of the layered coupling model"
                )

    payload = {
        "version": __version__,
        "ok": not errors,
        "errors": errors,
        "warnings": warnings,
        "checked": checked,
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.out is not None:
        _write_report(Path(args.out), "validation", payload)
    return 0


# ---------------------------------------------------------------------------
# argument parsing and entry point


class _Parser(argparse.ArgumentParser):
    """Raises instead of exiting so every failure funnels to error JSON."""

    def error(self, message: str):
        raise ConfigError(message)


_TASK_HELP = {
    "greens-dump": "tabulate the layer-to-layer propagator and the driven field",
    "hamiltonian": "assemble the collective coupling matrix of the resonant layers",
    "eigen": "decay modes: eigenvalues, weight map, and edge localization",
    "winding": "topological invariant of the configured chain",
    "phase-diagram": "winding number over a grid of both spacer thicknesses",
    "reflectivity": "resonant reflectivity spectrum and its line-shape features",
    "dv-sweep": "eigenvalue flow while the first spacer thickness varies",
    "validate": "check the configuration and report diagnostics without running",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config file")
    common.add_argument(
        "--materials", metavar="PATH", help="optical constants database override"
    )
    common.add_argument(
        "--out", metavar="DIR", help="output directory (default: current)"
    )
    common.add_argument("--format", choices=("csv", "json"), help="table format")
    common.add_argument("--threads", type=int, metavar="N", help="sweep worker count")
    common.add_argument(
        "--dv", type=float, metavar="NM", help="override first spacer thickness"
    )
    common.add_argument(
        "--dw", type=float, metavar="NM", help="override second spacer thickness"
    )
    common.add_argument(
        "--angle-mrad", type=float, dest="angle_mrad", help="override grazing angle"
    )
    common.add_argument(
        "--n-cavities", type=int, dest="n_cavities", help="override cavity count"
    )
    common.add_argument(
        "--no-figures",
        action="store_true",
        help="skip PNG rendering, write data files only",
    )

    parser = _Parser(
        prog="xraystack",
        description="Grazing-incidence simulator for stacked thin-film "
        "x-ray cavities with resonant nuclear layers.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    subparsers = parser.add_subparsers(dest="task", metavar="TASK", required=True)
    for name, text in _TASK_HELP.items():
        subparsers.add_parser(name, parents=[common], help=text, description=text)
    return parser


def _fail(code: int, kind: str, exc: Exception) -> int:
    print(
        json.dumps({"error": kind, "message": str(exc), "exit_code": code}),
        file=sys.stderr,
    )
    return code


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.task == "validate":
            return _run_validate(args)
        cfg = assemble_config(args)
        summary = _TASKS[args.task](cfg)
        summary.setdefault("version", __version__)
        summary["task"] = args.task
        print(json.dumps(summary, indent=2, sort_keys=True))
        return 0
    except ConfigError as exc:
        return _fail(2, "config", exc)
    except NumericsError as exc:
        return _fail(3, "numerics", exc)
    except OSError as exc:
        return _fail(4, "io", exc)


if __name__ == "__main__":
    sys.exit(main())
