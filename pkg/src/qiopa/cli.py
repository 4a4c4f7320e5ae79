"""Command-line front end.

Subcommands: amplify, rates, wigner-slice, scan-x, scan-z, validate. Every
setting is a dotted key (``opa.g``, ``neif.delta1``), available both as a
``--key value`` flag and as a line ``key = value`` in a config file given
with ``--config``; flags override file values. Numeric values accept plain
arithmetic with ``pi`` (``--phi pi/2``). Emitted artifacts start with a
header block that parses as a config file, so any output reproduces its
run. The QIOPA_OUTPUT_DIR environment variable sets the default output
directory. Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""

from __future__ import annotations

import math
import os
import re
import sys
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import report
from .envelope import (
    SPEED_OF_LIGHT_NM_PER_FS,
    TemporalParams,
    coherence_time_from_filter,
    x_scan_envelope,
    z_fringe,
    z_peak_envelope,
)
from .fock import (
    JSON_AMP_CUTOFF,
    ResourceError,
    TruncationError,
    fidelity,
    make_basis,
    pair_state,
    swap_parity,
    vacuum_state,
)
from .neif import (
    NeifConfig,
    complementary_coincidence,
    double_coincidence,
    noise_rate_closed_form,
    rate_closed_form,
    same_beam_coincidence,
    xor_suppressed_rate,
)
from .opa import (
    OpaParams,
    bogoliubov_check,
    cat_output_closed_form,
    evolve,
    mean_total_photons,
    squeezed_vacuum_closed_form,
    stimulated_pairs,
)
from .wigner import (
    CLOSED_FORM_OVER_NUMERIC,
    PhasePoint,
    wigner_closed_form,
    wigner_numeric,
)

OUTPUT_DIR_ENV = "QIOPA_OUTPUT_DIR"

COMMANDS = ("amplify", "rates", "wigner-slice", "scan-x", "scan-z", "validate")


class UsageError(ValueError):
    """Bad command line or config file; maps to exit code 1."""


class HelpRequested(Exception):
    """Carries usage text for -h/--help; maps to exit code 0."""


_NUMBER_CHARS = re.compile(r"^[0-9a-zA-Z_+\-*/(). ]+$")


def _number(text: str) -> float:
    """Parse a float, allowing arithmetic on the constants pi and e."""
    t = text.strip()
    try:
        value = float(t)
    except ValueError:
        if not _NUMBER_CHARS.match(t):
            raise ValueError(f"not a number: {text!r}")
        try:
            value = float(eval(t, {"__builtins__": {}}, {"pi": math.pi, "e": math.e}))
        except Exception:
            raise ValueError(f"not a number: {text!r}") from None
    if math.isnan(value):
        raise ValueError("NaN is not a valid setting")
    return value


def _integer(text: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise ValueError(f"not an integer: {text!r}") from None


def _complex_value(text: str) -> complex:
    try:
        return complex(text.strip().replace(" ", ""))
    except ValueError:
        raise ValueError(f"not a complex number: {text!r}") from None


def _boolean(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "1", "yes", "on"):
        return True
    if t in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _bounded(
    lo: float | None = None, hi: float | None = None, lo_strict: bool = False
) -> Callable[[str], float]:
    def parse(text: str) -> float:
        v = _number(text)
        if lo is not None and (v < lo or (lo_strict and v == lo)):
            cmp = "greater than" if lo_strict else "at least"
            raise ValueError(f"must be {cmp} {lo}")
        if hi is not None and v > hi:
            raise ValueError(f"must be at most {hi}")
        return v

    return parse


def _int_bounded(lo: int, hi: int | None = None) -> Callable[[str], int]:
    def parse(text: str) -> int:
        v = _integer(text)
        if v < lo or (hi is not None and v > hi):
            span = f"{lo}..{hi}" if hi is not None else f">= {lo}"
            raise ValueError(f"must be in {span}")
        return v

    return parse


def _choice(*options: str) -> Callable[[str], str]:
    def parse(text: str) -> str:
        t = text.strip()
        if t not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return t

    return parse


def _text(text: str) -> str:
    return text.strip()


@dataclass(frozen=True)
class Key:
    """One dotted configuration key: parser, default, flag help."""

    parse: Callable[[str], object]
    default: object
    help: str


_SHARED_KEYS: dict[str, Key] = {
    "opa.g": Key(_bounded(lo=0.0), 0.22, "amplifier gain"),
    "opa.psi": Key(_number, 0.0, "relative pump phase between the mode pairs"),
    "opa.eta": Key(_bounded(lo=0.0, lo_strict=True), 3.0, "gain-to-single-pass ratio"),
    "opa.cutoff": Key(_int_bounded(1, 12), 8, "per-mode occupancy cutoff"),
    "neif.delta1": Key(_number, 0.0, "beam-1 plate phase (rad)"),
    "neif.delta2": Key(_number, 0.0, "beam-2 plate phase (rad)"),
    "neif.theta1": Key(_number, math.pi / 4, "beam-1 rotator angle (rad)"),
    "neif.theta2": Key(_number, math.pi / 4, "beam-2 rotator angle (rad)"),
    "neif.bs_transmittance": Key(
        _bounded(lo=0.0, hi=1.0), 0.5, "beam-splitter intensity transmittance"
    ),
    "temporal.wavelength": Key(
        _bounded(lo=0.0, lo_strict=True), 795.0, "signal wavelength (nm)"
    ),
    "temporal.pump_wavelength": Key(
        _bounded(lo=0.0, lo_strict=True), 397.5, "pump wavelength (nm)"
    ),
    "temporal.filter_fwhm": Key(
        _bounded(lo=0.0, lo_strict=True), 2.0, "filter passband FWHM (nm)"
    ),
    "temporal.pump_coherence": Key(
        _bounded(lo=0.0, lo_strict=True), 180.0, "pump coherence time (fs)"
    ),
    "temporal.visibility": Key(_bounded(lo=0.0, hi=1.0), 0.4, "fringe visibility"),
    "temporal.filter_calibration": Key(
        _bounded(lo=0.0, lo_strict=True),
        TemporalParams().filter_calibration,
        "filter-to-coherence-time calibration constant",
    ),
    "phi": Key(_number, math.pi, "relative phase of the injected pair (rad)"),
    "seed": Key(_integer, 20260813, "seed for sampled check points"),
    "rates.norm_tol": Key(
        _bounded(lo=0.0, lo_strict=True),
        1e-5,
        "tolerated norm loss in the interferometer transform",
    ),
    "output.path": Key(_text, "", "output file (default <command>.<format>)"),
    "output.format": Key(_choice("csv", "json"), "csv", "output format"),
}

_COMMAND_KEYS: dict[str, dict[str, Key]] = {
    "amplify": {
        "amplify.input": Key(
            _choice("pair", "vacuum"), "pair", "injected state at the amplifier"
        ),
    },
    "rates": {
        "sweep.param": Key(_text, "", "dotted key to sweep (empty: single point)"),
        "sweep.start": Key(_number, 0.0, "sweep start value"),
        "sweep.stop": Key(_number, 0.0, "sweep stop value"),
        "sweep.steps": Key(_integer, 0, "sweep point count (>= 2)"),
    },
    "wigner-slice": {
        "wigner.coord": Key(
            _choice("alpha1", "alpha2", "beta1", "beta2"),
            "alpha1",
            "phase-space coordinate spanned by the slice",
        ),
        "wigner.min": Key(_number, -2.0, "slice range minimum (re and im)"),
        "wigner.max": Key(_number, 2.0, "slice range maximum (re and im)"),
        "wigner.points": Key(_int_bounded(2), 41, "grid points per axis"),
        "wigner.alpha1": Key(_complex_value, 0j, "fixed alpha1 coordinate"),
        "wigner.alpha2": Key(_complex_value, 0j, "fixed alpha2 coordinate"),
        "wigner.beta1": Key(_complex_value, 0j, "fixed beta1 coordinate"),
        "wigner.beta2": Key(_complex_value, 0j, "fixed beta2 coordinate"),
        "wigner.variant": Key(
            _choice("literal", "fitted"), "fitted", "closed-form bracket variant"
        ),
        "wigner.oracle": Key(
            _boolean, False, "add a displaced-parity oracle column (slower)"
        ),
    },
    "scan-x": {
        "scan.min": Key(_number, -150000.0, "scan start, optical path (nm)"),
        "scan.max": Key(_number, 150000.0, "scan stop, optical path (nm)"),
        "scan.points": Key(_int_bounded(2), 301, "scan point count"),
    },
    "scan-z": {
        "scan.min": Key(_number, -2000.0, "scan start, optical path (nm)"),
        "scan.max": Key(_number, 2000.0, "scan stop, optical path (nm)"),
        "scan.points": Key(_int_bounded(2), 801, "scan point count"),
    },
    "validate": {},
}


def keys_for(command: str) -> dict[str, Key]:
    keys = dict(_SHARED_KEYS)
    keys.update(_COMMAND_KEYS[command])
    return keys


@dataclass(frozen=True)
class SweepSpec:
    param: str
    start: float
    stop: float
    steps: int

    def values(self) -> list[float]:
        return [float(v) for v in np.linspace(self.start, self.stop, self.steps)]


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved settings of one CLI invocation."""

    command: str
    opa: OpaParams
    neif: NeifConfig
    temporal: TemporalParams
    phi: float
    seed: int
    norm_tol: float
    output_name: str
    output_format: str
    sweep: SweepSpec | None
    extras: dict[str, object]

    def effective(self) -> dict[str, object]:
        """Full dotted-key map, the content of emitted file headers."""
        values: dict[str, object] = {
            "opa.g": self.opa.g,
            "opa.psi": self.opa.psi,
            "opa.eta": self.opa.eta,
            "opa.cutoff": self.opa.cutoff,
            "neif.delta1": self.neif.delta1,
            "neif.delta2": self.neif.delta2,
            "neif.theta1": self.neif.theta1,
            "neif.theta2": self.neif.theta2,
            "neif.bs_transmittance": self.neif.bs_transmittance,
            "temporal.wavelength": self.temporal.wavelength,
            "temporal.pump_wavelength": self.temporal.pump_wavelength,
            "temporal.filter_fwhm": self.temporal.filter_fwhm,
            "temporal.pump_coherence": self.temporal.pump_coherence,
            "temporal.visibility": self.temporal.visibility,
            "temporal.filter_calibration": self.temporal.filter_calibration,
            "phi": self.phi,
            "seed": self.seed,
            "rates.norm_tol": self.norm_tol,
            "output.path": self.output_name,
            "output.format": self.output_format,
        }
        if self.sweep is not None:
            values["sweep.param"] = self.sweep.param
            values["sweep.start"] = self.sweep.start
            values["sweep.stop"] = self.sweep.stop
            values["sweep.steps"] = self.sweep.steps
        values.update(self.extras)
        return values

    def output_file(self) -> Path:
        name = Path(self.output_name)
        if name.is_absolute() or name.parent != Path("."):
            return name
        base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
        return base / name


def _read_config_file(path: Path) -> dict[str, str]:
    """Key-value pairs from a plain config file or an emitted artifact."""
    if not path.exists():
        raise UsageError(f"config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return report.read_header_config(path)
    pairs: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.strip()
        if body.startswith(report.HEADER_PREFIX.strip()):
            body = body[len(report.HEADER_PREFIX.strip()) :].strip()
        if not body or body.startswith("#"):
            continue
        if "=" not in body:
            if "," in body or not body[0].isalpha():
                continue  # data row of an emitted table
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = body.partition("=")
        pairs[key.strip()] = value.strip()
    return pairs


def parse_config(argv: Sequence[str]) -> RunConfig:
    """Resolve command line plus optional config file into a RunConfig."""
    args = list(argv)
    if not args:
        raise UsageError("missing command\n" + _usage())
    if args[0] in ("-h", "--help"):
        raise HelpRequested(_usage())
    command = args[0]
    if command not in COMMANDS:
        raise UsageError(f"unknown command '{command}'")
    keys = keys_for(command)

    flag_values: dict[str, str] = {}
    config_path: Path | None = None
    i = 1
    while i < len(args):
        arg = args[i]
        if arg in ("-h", "--help"):
            raise HelpRequested(_usage(command))
        if not arg.startswith("--"):
            raise UsageError(f"unexpected argument '{arg}'")
        name = arg[2:]
        if i + 1 >= len(args):
            raise UsageError(f"flag '--{name}' needs a value")
        value = args[i + 1]
        i += 2
        if name == "config":
            config_path = Path(value)
            continue
        if name not in keys:
            raise UsageError(f"unknown key '{name}'")
        flag_values[name] = value

    raw: dict[str, str] = {}
    if config_path is not None:
        for key, value in _read_config_file(config_path).items():
            if key not in keys:
                raise UsageError(f"unknown key '{key}' in {config_path}")
            raw[key] = value
    raw.update(flag_values)

    values: dict[str, object] = {name: key.default for name, key in keys.items()}
    for name, text in raw.items():
        try:
            values[name] = keys[name].parse(text)
        except ValueError as exc:
            raise UsageError(f"invalid value for '{name}': {exc}") from None

    return _build_config(command, values)


def _build_config(command: str, values: dict[str, object]) -> RunConfig:
    def section(cls, prefix: str, fields: Sequence[str]):
        kwargs = {f: values[f"{prefix}.{f}"] for f in fields}
        try:
            return cls(**kwargs)
        except ValueError as exc:
            raise UsageError(f"invalid {prefix} settings: {exc}") from None

    opa = section(OpaParams, "opa", ("g", "psi", "eta", "cutoff"))
    neif = section(
        NeifConfig,
        "neif",
        ("delta1", "delta2", "theta1", "theta2", "bs_transmittance"),
    )
    temporal = section(
        TemporalParams,
        "temporal",
        (
            "wavelength",
            "pump_wavelength",
            "filter_fwhm",
            "pump_coherence",
            "visibility",
            "filter_calibration",
        ),
    )

    sweep: SweepSpec | None = None
    if values.get("sweep.param"):
        param = str(values["sweep.param"])
        sweepable = {
            name
            for name in _SHARED_KEYS
            if name.split(".")[0] in ("opa", "neif", "temporal") or name == "phi"
        } - {"opa.cutoff"}
        if param not in sweepable:
            raise UsageError(f"invalid value for 'sweep.param': '{param}' is not sweepable")
        steps = int(values["sweep.steps"])  # type: ignore[arg-type]
        if steps < 2:
            raise UsageError("invalid value for 'sweep.steps': must be >= 2")
        sweep = SweepSpec(
            param, float(values["sweep.start"]), float(values["sweep.stop"]), steps  # type: ignore[arg-type]
        )

    fmt = str(values["output.format"])
    name = str(values["output.path"]) or f"{command}.{fmt}"
    extras = {
        key: values[key]
        for key in _COMMAND_KEYS[command]
        if not key.startswith("sweep.")
    }
    return RunConfig(
        command=command,
        opa=opa,
        neif=neif,
        temporal=temporal,
        phi=float(values["phi"]),  # type: ignore[arg-type]
        seed=int(values["seed"]),  # type: ignore[arg-type]
        norm_tol=float(values["rates.norm_tol"]),  # type: ignore[arg-type]
        output_name=name,
        output_format=fmt,
        sweep=sweep,
        extras=extras,
    )


def _usage(command: str | None = None) -> str:
    lines = ["usage: qiopa <command> [--key value ...] [--config FILE]"]
    if command is None:
        lines.append(f"commands: {', '.join(COMMANDS)}")
        lines.append("run 'qiopa <command> --help' for the command's keys")
    else:
        lines[0] = f"usage: qiopa {command} [--key value ...] [--config FILE]"
        lines.append("  --config FILE: read key = value lines (or an emitted artifact)")
        lines.append("keys:")
        for name, key in keys_for(command).items():
            default = report.format_value(key.default)
            lines.append(f"  --{name:<28} {key.help} (default {default})")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# command execution


def _emit(
    cfg: RunConfig,
    columns: Sequence[str],
    rows: Sequence[Sequence[object]],
    json_payload: dict[str, object] | None = None,
) -> Path:
    out = cfg.output_file()
    if out.parent != Path("."):
        out.parent.mkdir(parents=True, exist_ok=True)
    header = cfg.effective()
    if cfg.output_format == "csv":
        report.write_csv(out, header, columns, rows)
    else:
        payload: dict[str, object] = {
            "columns": list(columns),
            "rows": [list(row) for row in rows],
        }
        if json_payload:
            payload.update(json_payload)
        report.write_json(out, header, payload)
    return out


def _figure_path(out: Path) -> Path:
    return out.with_suffix(".png")


def _injection(cfg: RunConfig, kind: str):
    basis = make_basis(cfg.opa.cutoff)
    if kind == "vacuum":
        return vacuum_state(basis)
    return pair_state(cfg.phi, basis)


def _run_amplify(cfg: RunConfig) -> int:
    kind = str(cfg.extras["amplify.input"])
    state = evolve(_injection(cfg, kind), cfg.opa)
    rows = []
    totals: dict[int, float] = {}
    for index, occ in enumerate(state.basis.states()):
        amp = state.amps[index]
        prob = float(abs(amp) ** 2)
        if abs(amp) <= JSON_AMP_CUTOFF:
            continue
        rows.append((*occ, float(amp.real), float(amp.imag), prob))
        totals[sum(occ)] = totals.get(sum(occ), 0.0) + prob
    columns = ("n_1h", "n_2v", "n_1v", "n_2h", "re_amp", "im_amp", "probability")
    summary = {
        "norm": state.norm(),
        "mean_total_photons": mean_total_photons(state),
        "swap_parity": swap_parity(state.normalized()),
    }
    if kind == "pair":
        summary["stimulated_pair_number"] = stimulated_pairs(cfg.phi, cfg.opa)
    out = _emit(cfg, columns, rows, {"summary": summary})
    labels = sorted(totals)
    report.render_bars(
        _figure_path(out),
        labels,
        [totals[n] for n in labels],
        "total photon number",
        "probability",
    )
    print(f"wrote {out} and {_figure_path(out)}")
    return 0


def _with_override(cfg: RunConfig, param: str, value: float) -> RunConfig:
    opa = cfg.opa
    neif = cfg.neif
    temporal = cfg.temporal
    phi = cfg.phi
    section, _, field = param.partition(".")
    if param == "phi":
        phi = value
    elif section == "opa":
        opa = replace(opa, **{field: value})
    elif section == "neif":
        neif = replace(neif, **{field: value})
    elif section == "temporal":
        temporal = replace(temporal, **{field: value})
    else:
        raise UsageError(f"cannot sweep '{param}'")
    return RunConfig(
        command=cfg.command,
        opa=opa,
        neif=neif,
        temporal=temporal,
        phi=phi,
        seed=cfg.seed,
        norm_tol=cfg.norm_tol,
        output_name=cfg.output_name,
        output_format=cfg.output_format,
        sweep=cfg.sweep,
        extras=cfg.extras,
    )


def _rate_row(cfg: RunConfig) -> tuple[float, ...]:
    """One rate-table row: configuration echo, headline rates, diagnostics.

    rate_closed_form carries the second-order formula with its default
    squared-sum bracket; residual is simulated minus that. The
    corrected-bracket column is the variant that stays within the quartic
    error budget off the theta = pi/4 axis.
    """
    state = evolve(pair_state(cfg.phi, make_basis(cfg.opa.cutoff)), cfg.opa)
    tol = cfg.norm_tol
    sinh_g = cfg.opa.sinh_g
    simulated = double_coincidence(state, cfg.neif, norm_tol=tol)
    closed = rate_closed_form(cfg.phi, cfg.neif, sinh_g, bracket="squared_sum")
    return (
        cfg.phi,
        cfg.neif.delta,
        cfg.neif.theta1,
        cfg.neif.theta2,
        cfg.opa.g,
        simulated,
        closed,
        simulated - closed,
        rate_closed_form(cfg.phi, cfg.neif, sinh_g, bracket="sum_of_squares"),
        complementary_coincidence(state, cfg.neif, norm_tol=tol),
        same_beam_coincidence(state, cfg.neif, norm_tol=tol),
        xor_suppressed_rate(state, cfg.neif, norm_tol=tol),
        noise_rate_closed_form(cfg.neif, sinh_g),
    )


_RATE_COLUMNS = (
    "phi",
    "delta",
    "theta1",
    "theta2",
    "g",
    "rate_simulated",
    "rate_closed_form",
    "residual",
    "rate_closed_form_corrected",
    "complementary_1h_1v",
    "same_beam_2v_2h",
    "xor_vetoed_triple",
    "noise_closed_form",
)

_RATE_SERIES = (
    "rate_simulated",
    "complementary_1h_1v",
    "same_beam_2v_2h",
    "xor_vetoed_triple",
)


def _run_rates(cfg: RunConfig) -> int:
    if cfg.sweep is None:
        param = "phi"
        points = [cfg]
    else:
        param = cfg.sweep.param
        points = [_with_override(cfg, param, v) for v in cfg.sweep.values()]

    with ThreadPoolExecutor(max_workers=4) as pool:
        computed = list(pool.map(_rate_row, points))
    if cfg.sweep is None or param == "phi":
        columns: tuple[str, ...] = _RATE_COLUMNS
        rows = computed
    else:
        columns = (param, *_RATE_COLUMNS)
        rows = [(v, *row) for v, row in zip(cfg.sweep.values(), computed)]
    out = _emit(cfg, columns, rows)
    if len(rows) > 1:
        xs = [row[0] for row in rows]
        series = {
            name: [row[columns.index(name)] for row in rows] for name in _RATE_SERIES
        }
        report.render_series(
            _figure_path(out), xs, series, param, "coincidence rate"
        )
        print(f"wrote {out} and {_figure_path(out)}")
    else:
        print(f"wrote {out}")
        for name, value in zip(columns, computed[0]):
            print(f"  {name} = {value:.9f}")
    return 0


def _run_wigner_slice(cfg: RunConfig) -> int:
    coord = str(cfg.extras["wigner.coord"])
    lo = float(cfg.extras["wigner.min"])  # type: ignore[arg-type]
    hi = float(cfg.extras["wigner.max"])  # type: ignore[arg-type]
    if hi <= lo:
        raise UsageError("invalid value for 'wigner.max': must exceed wigner.min")
    n = int(cfg.extras["wigner.points"])  # type: ignore[arg-type]
    variant = str(cfg.extras["wigner.variant"])
    axis = [float(v) for v in np.linspace(lo, hi, n)]
    fixed = {
        name: complex(cfg.extras[f"wigner.{name}"])  # type: ignore[arg-type]
        for name in ("alpha1", "alpha2", "beta1", "beta2")
    }
    use_oracle = bool(cfg.extras["wigner.oracle"])
    state = None
    if use_oracle:
        state = evolve(pair_state(cfg.phi, make_basis(cfg.opa.cutoff)), cfg.opa)

    coord_names = ("alpha1", "alpha2", "beta1", "beta2")
    columns = [f"{part}_{name}" for name in coord_names for part in ("re", "im")]
    columns.append("w")
    if use_oracle:
        columns.append("w_oracle")
    rows: list[tuple[float, ...]] = []
    grid = np.empty((n, n))
    for iy, im in enumerate(axis):
        for ix, re_part in enumerate(axis):
            coords = dict(fixed)
            coords[coord] = complex(re_part, im)
            point = PhasePoint(**coords)
            w = wigner_closed_form(point, cfg.opa.g, cfg.phi, variant)
            grid[iy, ix] = w
            row: tuple[float, ...] = tuple(
                part
                for name in coord_names
                for part in (coords[name].real, coords[name].imag)
            ) + (w,)
            if use_oracle:
                row = (
                    *row,
                    CLOSED_FORM_OVER_NUMERIC * wigner_numeric(state, point),
                )
            rows.append(row)
    out = _emit(cfg, columns, rows)
    report.render_heatmap(
        _figure_path(out),
        axis,
        axis,
        grid,
        f"Re {coord}",
        f"Im {coord}",
        "W",
    )
    print(f"wrote {out} and {_figure_path(out)}")
    return 0


def _phase_averaged_rates(cfg: RunConfig) -> tuple[float, float, float, float]:
    """(double, complementary) at phi and averaged over the phase fringe."""
    basis = make_basis(cfg.opa.cutoff)
    here = evolve(pair_state(cfg.phi, basis), cfg.opa)
    flipped = evolve(pair_state(cfg.phi + math.pi, basis), cfg.opa)
    tol = cfg.norm_tol
    d_here = double_coincidence(here, cfg.neif, norm_tol=tol)
    d_flip = double_coincidence(flipped, cfg.neif, norm_tol=tol)
    c_here = complementary_coincidence(here, cfg.neif, norm_tol=tol)
    c_flip = complementary_coincidence(flipped, cfg.neif, norm_tol=tol)
    return d_here, 0.5 * (d_here + d_flip), c_here, 0.5 * (c_here + c_flip)


def _run_scan_x(cfg: RunConfig) -> int:
    lo = float(cfg.extras["scan.min"])  # type: ignore[arg-type]
    hi = float(cfg.extras["scan.max"])  # type: ignore[arg-type]
    n = int(cfg.extras["scan.points"])  # type: ignore[arg-type]
    xs = [float(v) for v in np.linspace(lo, hi, n)]
    d0, d_base, c0, c_base = _phase_averaged_rates(cfg)
    rows = []
    for x in xs:
        rows.append(
            (
                x,
                x / SPEED_OF_LIGHT_NM_PER_FS,
                x_scan_envelope(x, cfg.temporal, d_base, d0),
                x_scan_envelope(x, cfg.temporal, c_base, c0),
            )
        )
    out = _emit(cfg, ("x_nm", "delay_fs", "double_1h_2v", "complementary_1h_1v"), rows)
    report.render_series(
        _figure_path(out),
        xs,
        {
            "double_1h_2v": [r[2] for r in rows],
            "complementary_1h_1v": [r[3] for r in rows],
        },
        "path offset x (nm)",
        "coincidence rate",
    )
    print(f"wrote {out} and {_figure_path(out)}")
    return 0


def _run_scan_z(cfg: RunConfig) -> int:
    lo = float(cfg.extras["scan.min"])  # type: ignore[arg-type]
    hi = float(cfg.extras["scan.max"])  # type: ignore[arg-type]
    n = int(cfg.extras["scan.points"])  # type: ignore[arg-type]
    zs = [float(v) for v in np.linspace(lo, hi, n)]
    basis = make_basis(cfg.opa.cutoff)
    tol = cfg.norm_tol
    # the vetoed-triple signal is identically zero at delta1 = delta2;
    # detune the plates to expose the amplification peak
    peak = xor_suppressed_rate(
        evolve(pair_state(cfg.phi, basis), cfg.opa), cfg.neif, norm_tol=tol
    )
    floor = xor_suppressed_rate(
        evolve(vacuum_state(basis), cfg.opa), cfg.neif, norm_tol=tol
    )
    rows = []
    for z in zs:
        rows.append(
            (
                z,
                z_fringe(z, cfg.temporal),
                z_peak_envelope(z, cfg.temporal, floor, peak),
            )
        )
    out = _emit(cfg, ("z_nm", "fringe", "xor_signal"), rows)
    report.render_series(
        _figure_path(out),
        zs,
        {"fringe": [r[1] for r in rows], "xor_signal": [r[2] for r in rows]},
        "path offset z (nm)",
        "normalized signal",
    )
    print(f"wrote {out} and {_figure_path(out)}")
    return 0


def _validate_checks(cfg: RunConfig) -> list[tuple[str, float, float, bool]]:
    checks: list[tuple[str, float, float, bool]] = []

    def add(name: str, value: float, bound: float) -> None:
        checks.append((name, value, bound, value <= bound))

    basis = make_basis(cfg.opa.cutoff)
    params = cfg.opa

    add("bogoliubov_identity_dev", bogoliubov_check(params), 1e-6)

    vac_out = evolve(vacuum_state(basis), params)
    add(
        "squeezed_vacuum_infidelity",
        1.0 - fidelity(vac_out, squeezed_vacuum_closed_form(params, basis)),
        1e-8,
    )

    singlet_out = evolve(pair_state(math.pi, basis), params)
    add(
        "cat_closed_form_infidelity",
        1.0 - fidelity(singlet_out, cat_output_closed_form(math.pi, params, basis)),
        1e-3,
    )

    small = make_basis(4)
    worst = 0.0
    for phi in np.linspace(0.0, 2.0 * math.pi, 6):
        state = pair_state(float(phi), small)
        for delta in np.linspace(0.0, math.pi, 3):
            for ts in np.linspace(0.1, math.pi / 2, 3):
                ncfg = NeifConfig(
                    delta1=float(delta), theta1=float(ts) - math.pi / 4,
                    theta2=math.pi / 4,
                )
                sim = double_coincidence(state, ncfg)
                closed = rate_closed_form(float(phi), ncfg, 0.0)
                worst = max(worst, abs(sim - closed))
    add("leading_order_rate_dev", worst, 1e-8)

    s4 = math.sinh(params.g) ** 4
    ncfg = NeifConfig(delta1=0.7, theta1=0.5, theta2=math.pi / 4)
    amp = evolve(pair_state(cfg.phi, basis), params)
    sim = double_coincidence(amp, ncfg, norm_tol=cfg.norm_tol)
    closed = rate_closed_form(cfg.phi, ncfg, params.sinh_g, bracket="sum_of_squares")
    add("gain_rate_remainder", abs(sim - closed), 20.0 * s4)

    noise_cfg = NeifConfig(delta1=math.pi / 3, theta1=math.pi / 3, theta2=math.pi / 5)
    vac_amp = evolve(vacuum_state(basis), params)
    noise_sim = same_beam_coincidence(vac_amp, noise_cfg, norm_tol=cfg.norm_tol)
    add(
        "noise_identity_residual",
        abs(noise_sim - noise_rate_closed_form(noise_cfg, params.sinh_g)),
        3.0 * s4,
    )

    add(
        "vacuum_xor_rate",
        xor_suppressed_rate(vac_amp, cfg.neif, norm_tol=cfg.norm_tol),
        1e-8,
    )

    rng = np.random.default_rng(cfg.seed)
    worst_w = 0.0
    scale = 0.0
    for phi in (0.0, math.pi):
        s_out = evolve(pair_state(phi, basis), params)
        for _ in range(5):
            c = rng.uniform(-1.0, 1.0, size=8) * 1.5 / math.sqrt(2.0)
            point = PhasePoint(
                *(complex(c[2 * i], c[2 * i + 1]) for i in range(4))
            )
            oracle = CLOSED_FORM_OVER_NUMERIC * wigner_numeric(s_out, point)
            closed = wigner_closed_form(point, params.g, phi, "fitted")
            worst_w = max(worst_w, abs(closed - oracle))
            scale = max(scale, abs(oracle))
    add("wigner_closed_form_rel_dev", worst_w / scale, 1e-4)

    return checks


def _run_validate(cfg: RunConfig) -> int:
    checks = _validate_checks(cfg)
    width = max(len(name) for name, *_ in checks)
    for name, value, bound, ok in checks:
        status = "PASS" if ok else "FAIL"
        print(f"{status}  {name:<{width}}  {value:.3e} <= {bound:.1e}")
    rows = [
        (name, value, bound, "pass" if ok else "fail")
        for name, value, bound, ok in checks
    ]
    out = _emit(cfg, ("check", "value", "bound", "status"), rows)
    print(f"wrote {out}")
    return 0 if all(ok for *_, ok in checks) else 2


_RUNNERS = {
    "amplify": _run_amplify,
    "rates": _run_rates,
    "wigner-slice": _run_wigner_slice,
    "scan-x": _run_scan_x,
    "scan-z": _run_scan_z,
    "validate": _run_validate,
}


def run(cfg: RunConfig) -> int:
    """Execute a resolved configuration; returns the process exit code."""
    return _RUNNERS[cfg.command](cfg)


def main(argv: Sequence[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(args)
    except HelpRequested as exc:
        print(str(exc))
        return 0
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        if "usage:" not in str(exc):
            print(_usage(), file=sys.stderr)
        return 1
    try:
        return run(cfg)
    except (TruncationError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("hint: raise opa.cutoff or loosen rates.norm_tol", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
