"""Command-line front end: scenario evaluation, sweeps, and figure data.

Subcommands: qfi, figure2, fidelity, coeffs, sweep.  Configuration comes from
a single JSON document (--config); physical quantities carry unit suffixes in
their field names.  Numeric-policy overrides may come from the
CAVQFI_NUMERIC_POLICY environment variable (JSON object) and from the
config's "numeric_policy" section, in that order of increasing precedence.

Exit codes: 0 success, 1 numeric failure (no information / no plateau /
conditioning), 2 configuration error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import math
import sys

import numpy as np

from .bogoliubov import transform_reduced
from .cavity import (
    CavityScenario,
    acceleration_from_h,
    build_scenario_series,
    h_from_acceleration,
    static_matrices,
)
from .errors import CavqfiError, ConfigError, NoInformationError, NumericError
from .gaussian import initial_product_squeezed
from .metrology import (
    calibrate_phases,
    cramer_rao,
    fidelity_two_mode,
    mode_sums,
    qfi_analytic_h0,
    qfi_numeric,
)
from .policy import DEFAULT_POLICY, policy_from_env, policy_from_mapping

CSV_COLUMNS = (
    "tau_s",
    "r",
    "qfi",
    "delta_h",
    "delta_a_m_per_s2",
    "validity_margin",
    "tail_estimate",
)

# reference parameter set: L = 1 um, c_s = 1e-3 m/s (mode spectrum
# 2 pi 500 n Hz), modes 1 and 2 driven at their sum resonance, N = 1e11
DEFAULT_SCENARIO = {
    "length_m": 1e-6,
    "sound_speed_m_per_s": 1e-3,
    "light_speed_m_per_s": 2.99792458e8,
    "mode_k": 1,
    "mode_kprime": 2,
    "squeezing_r": 10.0,
    "drive_omega_rad_per_s": None,
    "duration_s": 30.0,
    "n_max": 50,
    "n_measurements": 1e11,
    "probe_acceleration_m_per_s2": None,
}

_SCENARIO_KEYS = {
    "length_m": "length",
    "sound_speed_m_per_s": "sound_speed",
    "light_speed_m_per_s": "light_speed",
    "mode_k": "k",
    "mode_kprime": "kprime",
    "squeezing_r": "squeezing",
    "drive_omega_rad_per_s": "omega",
    "duration_s": "tau",
    "n_max": "n_max",
    "n_measurements": "n_measurements",
    "probe_acceleration_m_per_s2": "a_probe",
}


def _fmt(x) -> str:
    """Full round-trip precision (17 significant digits) scientific notation."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    return f"{float(x):.16e}"


_CONFIG_SECTIONS = {"scenario", "sweep", "fidelity", "coeffs", "output", "numeric_policy"}


def load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(cfg) - _CONFIG_SECTIONS
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    return cfg


def resolve_output(cfg, args):
    """Output destination: CLI flags win over the config's output section."""
    section = cfg.get("output", {})
    if not isinstance(section, dict):
        raise ConfigError("output section must be an object")
    unknown = set(section) - {"path", "format"}
    if unknown:
        raise ConfigError(f"unknown output fields: {sorted(unknown)}")
    out = args.out if args.out is not None else section.get("path")
    fmt = args.format if args.format is not None else section.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("output format must be csv or json")
    return out, fmt


def scenario_from_config(cfg, nmax_override=None):
    raw = dict(DEFAULT_SCENARIO)
    user = cfg.get("scenario", {})
    if not isinstance(user, dict):
        raise ConfigError("scenario section must be an object")
    unknown = set(user) - set(DEFAULT_SCENARIO)
    if unknown:
        raise ConfigError(f"unknown scenario fields: {sorted(unknown)}")
    raw.update(user)
    if nmax_override is not None:
        raw["n_max"] = nmax_override
    kwargs = {}
    for field, attr in _SCENARIO_KEYS.items():
        value = raw[field]
        if field in ("mode_k", "mode_kprime", "n_max"):
            value = int(value)
        elif value is not None:
            value = float(value)
        kwargs[attr] = value
    try:
        return CavityScenario(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"invalid scenario: {exc}") from exc


def policy_from_config(cfg):
    policy = policy_from_env(DEFAULT_POLICY)
    section = cfg.get("numeric_policy", {})
    if section:
        policy = policy_from_mapping(section, policy)
    return policy


@dataclasses.dataclass(frozen=True)
class SweepRecord:
    tau_s: float
    r: float
    qfi: float
    delta_h: float
    delta_a_m_per_s2: float
    validity_margin: float
    tail_estimate: float
    extra: tuple = ()

    def row(self):
        vals = [
            self.tau_s,
            self.r,
            self.qfi,
            self.delta_h,
            self.delta_a_m_per_s2,
            self.validity_margin,
            self.tail_estimate,
        ]
        vals.extend(v for _, v in self.extra)
        return vals


def evaluate_scenario(scenario: CavityScenario, policy=DEFAULT_POLICY, want_numeric=False):
    """Full single-point evaluation: series, calibration, QFI, bounds.

    The closed-form phase inputs are calibrated against the numeric QFI on a
    moderate-squeezing grid (they cannot be read off the published
    expressions), then the analytic QFI is evaluated at the scenario
    squeezing.  Returns a plain dict of floats.
    """
    series = build_scenario_series(scenario)

    def state_at(r, h):
        return transform_reduced(
            initial_product_squeezed(r, r), series, h, scenario.k, scenario.kprime
        )

    phi_k, phi_kp, resid = calibrate_phases(
        series, scenario.k, scenario.kprime, state_at, policy=policy
    )
    qfi = qfi_analytic_h0(
        series, scenario.squeezing, phi_k, phi_kp, scenario.k, scenario.kprime
    )
    out = {
        "tau_s": scenario.tau,
        "r": scenario.squeezing,
        "qfi": qfi,
        "phi_k": phi_k,
        "phi_kprime": phi_kp,
        "calibration_residual": resid,
    }
    sums = mode_sums(series, scenario.k, scenario.kprime)
    out["tail_estimate"] = sums.tail_estimate
    if want_numeric:
        out["qfi_numeric"] = qfi_numeric(
            lambda h: state_at(scenario.squeezing, h), 0.0, policy
        )
    h_probe = None
    if scenario.a_probe is not None:
        h_probe = h_from_acceleration(scenario.a_probe, scenario)
    if qfi > 0.0:
        est = cramer_rao(
            qfi,
            scenario.n_measurements,
            scenario.length,
            scenario.sound_speed,
            h=h_probe,
            policy=policy,
        )
        out["delta_h"] = est.delta_h
        out["delta_a_m_per_s2"] = est.delta_a
        out["qfi_valid"] = est.qfi_valid
        out["validity_margin"] = est.validity_margin
        out["max_valid_acceleration_m_per_s2"] = acceleration_from_h(
            math.sqrt(policy.validity_threshold / qfi), scenario
        )
    else:
        out["delta_h"] = math.inf
        out["delta_a_m_per_s2"] = math.inf
        out["qfi_valid"] = True
        out["validity_margin"] = 0.0 if h_probe is not None else None
        out["max_valid_acceleration_m_per_s2"] = math.inf
    if out["validity_margin"] is None:
        out["validity_margin"] = math.nan
    return out


def _record_from_point(point, extra=()):
    return SweepRecord(
        tau_s=point["tau_s"],
        r=point["r"],
        qfi=point["qfi"],
        delta_h=point["delta_h"],
        delta_a_m_per_s2=point["delta_a_m_per_s2"],
        validity_margin=point["validity_margin"],
        tail_estimate=point["tail_estimate"],
        extra=tuple(extra),
    )


# ---------------------------------------------------------------------------
# sweep machinery
# ---------------------------------------------------------------------------

_SWEEP_PARAMETERS = ("tau", "r", "a", "omega")


def _sweep_axis(section):
    if not isinstance(section, dict):
        raise ConfigError("sweep section must be an object")
    unknown = set(section) - {"parameter", "start", "stop", "count", "spacing"}
    if unknown:
        raise ConfigError(f"unknown sweep fields: {sorted(unknown)}")
    try:
        name = section["parameter"]
        start = float(section["start"])
        stop = float(section["stop"])
        count = int(section["count"])
    except KeyError as exc:
        raise ConfigError(f"sweep section missing {exc}") from exc
    spacing = section.get("spacing", "linear")
    if name not in _SWEEP_PARAMETERS:
        raise ConfigError(f"sweep parameter must be one of {_SWEEP_PARAMETERS}")
    if count < 2:
        raise ConfigError("sweep count must be >= 2")
    if not start < stop:
        raise ConfigError("sweep start must be < stop")
    if spacing == "linear":
        values = np.linspace(start, stop, count)
    elif spacing == "log":
        if start <= 0:
            raise ConfigError("log spacing requires start > 0")
        values = np.geomspace(start, stop, count)
    else:
        raise ConfigError("sweep spacing must be linear or log")
    return name, [float(v) for v in values]


def _apply_axis(scenario, name, value):
    if name == "tau":
        return dataclasses.replace(scenario, tau=value)
    if name == "r":
        return dataclasses.replace(scenario, squeezing=value)
    if name == "a":
        return dataclasses.replace(scenario, a_probe=value)
    if name == "omega":
        return dataclasses.replace(scenario, omega=value)
    raise ConfigError(f"unknown sweep parameter {name}")


def _sweep_worker(args):
    scenario, policy, name, value = args
    point = evaluate_scenario(_apply_axis(scenario, name, value), policy)
    extra = ()
    if name == "a":
        extra = (("a_probe_m_per_s2", value),)
    elif name == "omega":
        extra = (("omega_rad_per_s", value),)
    return _record_from_point(point, extra)


def run_sweep(scenario, policy, name, values, workers=1):
    tasks = [(scenario, policy, name, v) for v in values]
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_sweep_worker, tasks))
    else:
        records = [_sweep_worker(t) for t in tasks]
    return records


def snapped_tau_grid(scenario, start, stop, count):
    """Log-spaced grid snapped to multiples of the round-trip period 2L/c_s.

    All mode phases and the resonant drive return to their initial values at
    those instants, so the emitted curve tracks the floor of the co-resonant
    modulation band (the conservative side): on it the QFI grows as tau^2 and
    the error bound falls as 1/tau.  Off-lattice durations modulate the QFI
    by an O(1) factor at kilohertz scales; cmd_sweep exposes that regime.
    """
    period = 2.0 * scenario.length / scenario.sound_speed
    values = np.geomspace(start, stop, count)
    snapped = np.maximum(np.round(values / period), 1.0) * period
    # deduplicate while preserving order
    out = []
    for v in snapped:
        if not out or v > out[-1]:
            out.append(float(v))
    return out


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _write_json(path, payload):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _emit_records(records, out, fmt):
    header = list(CSV_COLUMNS)
    if records and records[0].extra:
        header.extend(name for name, _ in records[0].extra)
    if fmt == "csv":
        _write_csv(out, header, [r.row() for r in records])
    else:
        payload = {"records": [dict(zip(header, r.row())) for r in records]}
        _write_json(out, payload)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_qfi(args):
    cfg = load_config(args.config)
    policy = policy_from_config(cfg)
    scenario = scenario_from_config(cfg, args.nmax)
    point = evaluate_scenario(scenario, policy, want_numeric=True)
    if point["qfi"] <= 0.0:
        raise NoInformationError("QFI is zero: no information about the drive amplitude")
    print(f"QFI (analytic H0)   : {_fmt(point['qfi'])}")
    print(f"QFI (numeric ladder): {_fmt(point['qfi_numeric'])}")
    print(f"phase inputs        : phi_k = {point['phi_k']:.12f}, phi_kprime = {point['phi_kprime']:.12f}")
    print(f"calibration residual: {point['calibration_residual']:.3e}")
    print(f"delta_h bound       : {_fmt(point['delta_h'])}")
    print(f"delta_a bound (m/s2): {_fmt(point['delta_a_m_per_s2'])}")
    print(f"truncation tail est : {_fmt(point['tail_estimate'])}")
    print(
        "max valid accel     : "
        f"{_fmt(point['max_valid_acceleration_m_per_s2'])} m/s^2 "
        f"(perturbative validity H0*h^2 < {policy.validity_threshold:g})"
    )
    if scenario.a_probe is not None:
        flag = "OK" if point["qfi_valid"] else "OUT OF VALIDITY RANGE"
        print(
            f"probe a = {_fmt(scenario.a_probe)} m/s^2 -> margin "
            f"H0*h^2 = {_fmt(point['validity_margin'])} [{flag}]"
        )
    out, fmt = resolve_output(cfg, args)
    if out is not None:
        record = _record_from_point(point)
        if fmt == "csv":
            _write_csv(out, CSV_COLUMNS, [record.row()])
        else:
            _write_json(out, dict(point))
    return 0


def cmd_sweep(args):
    cfg = load_config(args.config)
    policy = policy_from_config(cfg)
    scenario = scenario_from_config(cfg, args.nmax)
    if "sweep" not in cfg:
        raise ConfigError("sweep requires a sweep section in the config")
    name, values = _sweep_axis(cfg["sweep"])
    records = run_sweep(scenario, policy, name, values, workers=args.workers)
    out, fmt = resolve_output(cfg, args)
    _emit_records(records, out, fmt)
    return 0


FIGURE2_SQUEEZINGS = (8.0, 9.0, 10.0)
FIGURE2_TAU = (2.0, 200.0, 25)


def cmd_figure2(args):
    """Error-bound curves delta_a(tau) for r = 8, 9, 10 at the sum resonance.

    The default duration grid is snapped to multiples of the round-trip
    period 2 L / c_s (see snapped_tau_grid); an explicit "sweep" section over
    tau in the config replaces the grid verbatim.
    """
    cfg = load_config(args.config)
    policy = policy_from_config(cfg)
    scenario = scenario_from_config(cfg, args.nmax)
    if "sweep" in cfg:
        name, taus = _sweep_axis(cfg["sweep"])
        if name != "tau":
            raise ConfigError("figure2 sweeps over tau only")
    else:
        start, stop, count = FIGURE2_TAU
        taus = snapped_tau_grid(scenario, start, stop, count)
    records = []
    for r in FIGURE2_SQUEEZINGS:
        base = dataclasses.replace(scenario, squeezing=r)
        records.extend(run_sweep(base, policy, "tau", taus, workers=args.workers))
    out, fmt = resolve_output(cfg, args)
    _emit_records(records, out, fmt)
    return 0


def _fidelity_state(section, scenario, series, what):
    if not isinstance(section, dict):
        raise ConfigError(f"fidelity.{what} must be an object")
    unknown = set(section) - {"squeezing_r_k", "squeezing_r_kprime", "amplitude_h"}
    if unknown:
        raise ConfigError(f"unknown fidelity state fields: {sorted(unknown)}")
    r_k = float(section.get("squeezing_r_k", scenario.squeezing))
    r_kp = float(section.get("squeezing_r_kprime", scenario.squeezing))
    h = float(section.get("amplitude_h", 0.0))
    return transform_reduced(
        initial_product_squeezed(r_k, r_kp), series, h, scenario.k, scenario.kprime
    )


def cmd_fidelity(args):
    cfg = load_config(args.config)
    policy = policy_from_config(cfg)
    scenario = scenario_from_config(cfg, args.nmax)
    section = cfg.get("fidelity", {})
    series = build_scenario_series(scenario)
    state_a = _fidelity_state(section.get("state_a", {}), scenario, series, "state_a")
    state_b = _fidelity_state(section.get("state_b", {}), scenario, series, "state_b")
    fb = fidelity_two_mode(state_a, state_b, policy)
    payload = {
        "gamma": fb.gamma,
        "lambda1": fb.lambda1,
        "lambda2": fb.lambda2,
        "delta": fb.delta,
        "pi": fb.pi,
        "fidelity": fb.fidelity,
    }
    print(f"fidelity            : {_fmt(fb.fidelity)}")
    out, fmt = resolve_output(cfg, args)
    if out is not None:
        if fmt == "csv":
            header = list(payload.keys())
            _write_csv(out, header, [list(payload.values())])
        else:
            _write_json(out, payload)
    return 0


def cmd_coeffs(args):
    cfg = load_config(args.config)
    scenario = scenario_from_config(cfg, args.nmax)
    static = bool(cfg.get("coeffs", {}).get("static", False)) or args.static
    if static:
        alpha, beta = static_matrices(scenario.n_max)
        alpha = alpha.astype(complex)
        beta = beta.astype(complex)
        g = np.ones(scenario.n_max, dtype=complex)
    else:
        series = build_scenario_series(scenario)
        alpha, beta, g = series.alpha1, series.beta1, series.G
    header = ["m", "n", "alpha1_re", "alpha1_im", "beta1_re", "beta1_im", "g_m_re", "g_m_im"]
    rows = []
    n = scenario.n_max
    for m in range(n):
        for j in range(n):
            rows.append(
                [
                    m + 1,
                    j + 1,
                    alpha[m, j].real,
                    alpha[m, j].imag,
                    beta[m, j].real,
                    beta[m, j].imag,
                    g[m].real,
                    g[m].imag,
                ]
            )
    out, fmt = resolve_output(cfg, args)
    if fmt == "json":
        payload = {
            "records": [dict(zip(header, row)) for row in rows],
        }
        _write_json(out, payload)
    else:
        lines = [",".join(header)]
        for row in rows:
            lines.append(
                ",".join([str(int(row[0])), str(int(row[1]))] + [_fmt(v) for v in row[2:]])
            )
        text = "\n".join(lines) + "\n"
        if out is None:
            sys.stdout.write(text)
        else:
            with open(out, "w") as fh:
                fh.write(text)
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cavqfi",
        description="Gaussian-state QFI bounds for a sinusoidally driven cavity accelerometer",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="path to JSON run configuration")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--workers", type=int, default=1, help="parallel sweep workers")
    common.add_argument("--nmax", type=int, default=None, help="override mode truncation")

    sub.add_parser("qfi", parents=[common], help="single-point QFI and bounds")
    sub.add_parser("figure2", parents=[common], help="delta_a(tau) curves for r = 8, 9, 10")
    sub.add_parser("fidelity", parents=[common], help="fidelity between two configured states")
    coeffs = sub.add_parser("coeffs", parents=[common], help="dump the Bogoliubov series")
    coeffs.add_argument("--static", action="store_true", help="dump static coefficients")
    sub.add_parser("sweep", parents=[common], help="sweep one parameter axis")
    return parser


_COMMANDS = {
    "qfi": cmd_qfi,
    "figure2": cmd_figure2,
    "fidelity": cmd_fidelity,
    "coeffs": cmd_coeffs,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers is not None and args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 1
    except CavqfiError as exc:  # pragma: no cover - catch-all inside the contract
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
