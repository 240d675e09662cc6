"""Scenario runner: one preset per figure, deterministic CSV output.

Usage::

    ms-gpa list
    ms-gpa <preset> [--config FILE] [--out FILE] [key=value ...]
    ms-gpa run --config FILE [--out FILE] [key=value ...]

Config files hold one ``key = value`` per line with ``#`` comments;
command-line overrides win over the file, which wins over preset defaults.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
import argparse
import logging
import os
import re
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .analysis import (
    calibrate_gamma,
    delta_gp,
    entanglement_loss,
    is_x_state,
    negativity,
    qubit_state,
    sign_changes,
    slope_series,
    wf_gate_window_max,
)
from .dynamics import (
    ChannelKind,
    NoiseChannel,
    TimeGrid,
    populations,
    propagate_lindblad,
    propagate_schrodinger,
)
from .errors import ConfigError, NumericalError
from .gp import gp_of
from .model import MSParams, bell_target, effective_rabi, hamiltonian_norm, initial_state
from .ops import projector

log = logging.getLogger(__name__)

TWO_PI = 2 * np.pi
# dt*||H|| aimed for when steps = auto
AUTO_PHASE_PER_STEP = 0.04
EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

BUILTIN_KINDS = tuple(k.value for k in ChannelKind if k is not ChannelKind.CUSTOM)
GP_TARGET = re.compile(r"^(full|qubits|subsystem:[012])$")
T_END = re.compile(r"^\s*([0-9.]+(?:[eE][-+]?[0-9]+)?)\s*(T|P|s|us)\s*$")
CHANNEL_KEY = re.compile(r"^channel\.(\d+)\.(kind|gamma|target_delta_e)$")

SCALAR_KEYS = {
    "preset", "regime", "eta", "omega_rad_s", "omega_hz", "nu_rad_s", "nu_hz",
    "delta_rad_s", "delta_hz", "phi_s", "phi_m", "n_fock", "fock", "t_end",
    "steps", "gp_target", "out", "channel", "gamma", "delta_e",
}

_SF = {"regime": "sf", "t_end": "3T", "steps": "4096"}
# 4098 = 3 * 1366 puts t = T on a sample, so the reported loss is read at T exactly
_SF_NOISE = {**_SF, "steps": "4098"}
_WF = {"regime": "wf", "eta": "0.1", "t_end": "1P", "steps": "auto"}

PRESETS = {
    "wf-populations": ("Fig 2: qubit populations over one weak-field Rabi period", _WF),
    "sf-populations": ("Fig 3: qubit populations for the strong-field gate over 3T", _SF),
    "negativity": ("Fig 4: normalized negativity of the qubit state over 3T", _SF),
    "slope": ("Fig 5: Im d<00,0|psi>/dt and its running integral over 3T", _SF),
    "wf-gp-sweep": (
        "Fig 6: weak-field geometric phase for several eta (one CSV per eta)",
        {**_WF, "eta": "0.05,0.1,0.15,0.2", "gp_target": "qubits"},
    ),
    "gp-sf-unitary": ("Fig 7: geometric phase of the noiseless strong-field run", {**_SF, "gp_target": "full"}),
    "gp-noise": (
        "Fig 8: GP deviation under calibrated noise at several entanglement losses",
        {**_SF_NOISE, "gp_target": "qubits", "channel": "qubit_dephasing", "delta_e": "0.05,0.1,0.2"},
    ),
    "gp-subsystem": (
        "Fig 9: single-qubit GP and x-state check for every noise channel",
        {**_SF_NOISE, "gp_target": "subsystem:1", "channel": ",".join(BUILTIN_KINDS), "delta_e": "0.1"},
    ),
}


@dataclass(frozen=True)
class ChannelSpec:
    kind: ChannelKind
    gamma: float = None
    target_delta_e: float = None

    @property
    def label(self):
        if self.target_delta_e is not None:
            return f"{self.kind.value}_de{self.target_delta_e:g}"
        return f"{self.kind.value}_g{self.gamma:g}"


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully validated scenario; ``params`` holds one entry per swept eta."""

    preset: str
    regime: str
    params: tuple
    fock: int
    t_end: tuple  # (value, unit)
    steps: object  # int or "auto"
    channels: tuple
    gp_target: str
    out: str

    @property
    def p(self):
        return self.params[0]

    def span(self, p):
        value, unit = self.t_end
        if unit == "T":
            return value * p.gate_time
        if unit == "P":
            return value * TWO_PI / abs(effective_rabi(p))
        return value * (1e-6 if unit == "us" else 1.0)

    def grid(self, p):
        span = self.span(p)
        if self.steps == "auto":
            base = int(PRESET_MIN_STEPS.get(self.preset, 4096))
            need = int(np.ceil(span * hamiltonian_norm(p) / AUTO_PHASE_PER_STEP))
            return TimeGrid(0.0, span, max(base, need))
        return TimeGrid(0.0, span, self.steps)


PRESET_MIN_STEPS = {"wf-populations": 8192, "wf-gp-sweep": 8192}


# -- config parsing -----------------------------------------------------------

def parse_config_text(text, source="<config>"):
    """``[(key, value, where)]`` from ``key = value`` lines."""
    entries = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{n}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{n}: missing key")
        entries.append((key, value, f"{source}:{n}"))
    return entries


def parse_overrides(items):
    entries = []
    for i, item in enumerate(items, 1):
        if "=" not in item:
            raise ConfigError(f"argument {i}: expected key=value, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        entries.append((key, value, f"argument {i} ({key})"))
    return entries


def _number(value, where, key, kind=float):
    try:
        x = kind(value)
    except ValueError:
        raise ConfigError(f"{where}: {key} must be a {kind.__name__}, got {value!r}") from None
    if kind is float and not np.isfinite(x):
        raise ConfigError(f"{where}: {key} must be finite, got {value!r}")
    return x


def _list(value, where, key):
    return [_number(v.strip(), where, key) for v in value.split(",") if v.strip()]


def _frequency(cfg, name):
    """Angular frequency from ``<name>_rad_s`` or ``<name>_hz`` (times 2 pi)."""
    rad, hz = cfg.get(f"{name}_rad_s"), cfg.get(f"{name}_hz")
    if rad and hz:
        raise ConfigError(f"{hz[1]}: give only one of {name}_rad_s and {name}_hz")
    if rad:
        return _number(rad[0], rad[1], f"{name}_rad_s")
    if hz:
        return TWO_PI * _number(hz[0], hz[1], f"{name}_hz")
    return None


def _channels(cfg, groups):
    shorthand = [k for k in ("channel", "gamma", "delta_e") if k in cfg]
    if groups and shorthand:
        raise ConfigError(f"{cfg[shorthand[0]][1]}: do not mix '{shorthand[0]}' with channel.N.* groups")
    out = []
    if shorthand:
        if "channel" not in cfg:
            raise ConfigError(f"{cfg[shorthand[0]][1]}: '{shorthand[0]}' needs a 'channel' key")
        value, where = cfg["channel"]
        kinds = [k.strip() for k in value.split(",") if k.strip()]
        has_g, has_e = "gamma" in cfg, "delta_e" in cfg
        if has_g == has_e:
            raise ConfigError(f"{where}: give exactly one of gamma / delta_e for the channel")
        key = "gamma" if has_g else "delta_e"
        levels = _list(cfg[key][0], cfg[key][1], key)
        for kind in kinds:
            for x in levels:
                out.append(_channel(kind, x if has_g else None, None if has_g else x, where))
        return tuple(out)
    for idx in sorted(groups):
        g = groups[idx]
        if "kind" not in g:
            where = next(iter(g.values()))[1]
            raise ConfigError(f"{where}: channel.{idx} has no kind")
        kind, where = g["kind"]
        has_g, has_e = "gamma" in g, "target_delta_e" in g
        if has_g == has_e:
            raise ConfigError(f"{where}: channel.{idx} needs exactly one of gamma / target_delta_e")
        if has_g:
            out.append(_channel(kind, _number(*g["gamma"], f"channel.{idx}.gamma"), None, where))
        else:
            tgt = g["target_delta_e"]
            out.append(_channel(kind, None, _number(*tgt, f"channel.{idx}.target_delta_e"), where))
    return tuple(out)


def _channel(kind, gamma, target, where):
    if kind not in BUILTIN_KINDS:
        raise ConfigError(f"{where}: unknown channel kind {kind!r} (choose from {', '.join(BUILTIN_KINDS)})")
    if gamma is not None and gamma < 0:
        raise ConfigError(f"{where}: gamma must be non-negative")
    if target is not None and not 0 <= target < 0.9:
        raise ConfigError(f"{where}: target entanglement loss must lie in [0, 0.9)")
    return ChannelSpec(ChannelKind(kind), gamma, target)


def build_config(preset, entries):
    """Merge preset defaults with ``entries`` and validate everything."""
    cfg = {}
    groups = {}
    for key, value, where in entries:
        m = CHANNEL_KEY.match(key)
        if m:
            groups.setdefault(int(m.group(1)), {})[m.group(2)] = (value, where)
        elif key in SCALAR_KEYS:
            cfg[key] = (value, where)
        else:
            raise ConfigError(f"{where}: unknown key {key!r}")
    if preset is None:
        if "preset" not in cfg:
            raise ConfigError("no preset given (use 'ms-gpa <preset>' or a 'preset = ...' line)")
        preset = cfg["preset"][0]
    if preset not in PRESETS:
        where = cfg["preset"][1] + ": " if "preset" in cfg else ""
        raise ConfigError(f"{where}unknown preset {preset!r}; run 'ms-gpa list'")
    defaults = PRESETS[preset][1]
    user_channels = bool(groups) or "channel" in cfg
    for key, value in defaults.items():
        if key in ("channel", "gamma", "delta_e") and user_channels:
            continue
        if key == "delta_e" and "gamma" in cfg:
            continue
        cfg.setdefault(key, (value, f"preset {preset}"))

    regime, where = cfg["regime"]
    if regime not in ("wf", "sf", "custom"):
        raise ConfigError(f"{where}: regime must be wf, sf or custom, got {regime!r}")
    etas = _list(*cfg.get("eta", ("0.028" if regime == "sf" else "0.1", "default")), "eta")
    if not etas:
        raise ConfigError(f"{cfg['eta'][1]}: eta is empty")
    if len(etas) > 1 and preset != "wf-gp-sweep":
        raise ConfigError(f"{cfg['eta'][1]}: only wf-gp-sweep accepts a list of eta values")
    omega, nu, delta = _frequency(cfg, "omega"), _frequency(cfg, "nu"), _frequency(cfg, "delta")
    nu = nu if nu is not None else TWO_PI * 2.03e6
    extra = {}
    for key in ("phi_s", "phi_m"):
        if key in cfg:
            extra[key] = _number(*cfg[key], key)
    extra["n_fock"] = _number(*cfg.get("n_fock", ("16", "default")), "n_fock", int)

    params = []
    try:
        for eta in etas:
            if regime == "sf":
                if delta is not None:
                    raise ConfigError(f"{cfg['delta_rad_s' if 'delta_rad_s' in cfg else 'delta_hz'][1]}: "
                                      "delta is fixed by the strong-field condition")
                kw = {} if omega is None else {"omega": omega}
                p = MSParams.strong_field(eta=eta, nu=nu, **kw, **extra)
            elif regime == "wf":
                p = MSParams.weak_field_reference(eta=eta, nu=nu, **extra)
                if omega is not None:
                    p = p.with_(omega=omega)
                if delta is not None:
                    p = p.with_(delta=delta)
            else:
                if omega is None or delta is None:
                    raise ConfigError(f"{where}: custom regime needs omega and delta")
                p = MSParams(eta, omega, nu, delta, **extra)
            if p.epsilon == 0:
                raise ConfigError(f"{where}: delta equals nu (zero sideband detuning)")
            params.append(p)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"parameter check failed: {exc}") from None

    fock = _number(*cfg.get("fock", ("0", "default")), "fock", int)
    if not 0 <= fock < params[0].n_fock:
        raise ConfigError(f"{cfg['fock'][1]}: fock must lie in [0, n_fock)")

    value, where = cfg["t_end"]
    m = T_END.match(value)
    if not m or float(m.group(1)) <= 0:
        raise ConfigError(f"{where}: t_end must be a positive number with unit T, P, s or us, got {value!r}")
    t_end = (float(m.group(1)), m.group(2))

    value, where = cfg["steps"]
    steps = "auto" if value == "auto" else _number(value, where, "steps", int)
    if steps != "auto" and steps < 1:
        raise ConfigError(f"{where}: steps must be positive")

    target, where = cfg.get("gp_target", ("full", "default"))
    if not GP_TARGET.match(target):
        raise ConfigError(f"{where}: gp_target must be full, qubits or subsystem:<0|1|2>, got {target!r}")

    channels = _channels(cfg, groups)
    if preset in ("gp-noise", "gp-subsystem") and not channels:
        raise ConfigError(f"preset {preset} needs at least one channel")
    out = cfg.get("out", (f"{preset}.csv", "default"))[0]
    return ScenarioConfig(preset, regime, tuple(params), fock, t_end, steps, channels, target, out)


# -- output -------------------------------------------------------------------

def format_float(x):
    return format(float(x), ".17g")


def write_csv(path, columns):
    """Write ``{name: series}`` atomically (temp file in the same directory, then rename)."""
    names = list(columns)
    data = np.column_stack([np.asarray(columns[k], dtype=float) for k in names])
    lines = [",".join(names)]
    lines.extend(",".join(format_float(x) for x in row) for row in data)
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".ms-gpa-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def threads():
    raw = os.environ.get("MS_GPA_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise ConfigError(f"MS_GPA_THREADS must be a positive integer, got {raw!r}")
    return n


def fan_out(fn, items):
    """Map ``fn`` over ``items`` with at most MS_GPA_THREADS workers, keeping order."""
    n = min(threads(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# -- runners ------------------------------------------------------------------

def _pure(cfg, p):
    psi0 = initial_state(p, 0, cfg.fock)
    return propagate_schrodinger(p, psi0, cfg.grid(p))


def _gate_marks(p, traj):
    T = p.gate_time
    k_max = int(np.floor(traj.grid.t1 / T + 1e-9))
    return [(k, traj.grid.index_of(k * T)) for k in range(1, k_max + 1)]


def _in_t(times, T):
    return " ".join(f"{x / T:.4f}T" for x in times) or "none"


def run_populations(cfg):
    p = cfg.p
    traj = _pure(cfg, p)
    pops = populations(traj)
    cols = {"t_s": traj.times, "p00": pops[:, 0], "p01": pops[:, 1], "p10": pops[:, 2], "p11": pops[:, 3]}
    summary = []
    if cfg.preset == "wf-populations":
        w = effective_rabi(p)
        dev = np.max(np.abs(pops[:, 0] - np.cos(0.5 * w * traj.times) ** 2))
        summary.append(f"rabi_period_s={format_float(TWO_PI / abs(w))} max|p00-cos^2|={dev:.3e}")
    else:
        target = bell_target(p.phi_s)
        rhos = traj.density_matrices()
        for k, i in _gate_marks(p, traj):
            fid = np.real(target.conj() @ qubit_state(rhos[i], traj.spec) @ target)
            summary.append(f"t={k}T bell_fidelity={fid:.9f} p01+p10={pops[i, 1] + pops[i, 2]:.3e}")
    return [(cfg.out, cols)], summary


def run_negativity(cfg):
    p = cfg.p
    traj = _pure(cfg, p)
    readings = [negativity(qubit_state(r, traj.spec)) for r in traj.density_matrices()]
    cols = {
        "t_s": traj.times,
        "E": [r.normalized for r in readings],
        "raw_sum": [r.raw_sum for r in readings],
    }
    summary = [f"t={k}T E={readings[i].normalized:.6f}" for k, i in _gate_marks(p, traj)]
    return [(cfg.out, cols)], summary


def run_slope(cfg):
    p = cfg.p
    traj = _pure(cfg, p)
    s = slope_series(traj)
    area = cumulative_trapezoid(s, traj.times, initial=0.0)
    T = p.gate_time
    summary = [
        f"slope sign changes at {_in_t(sign_changes(traj.times, s), T)}",
        f"running integral sign changes at {_in_t(sign_changes(traj.times[1:], area[1:]), T)}",
    ]
    return [(cfg.out, {"t_s": traj.times, "slope": s, "integral": area})], summary


def run_gp_unitary(cfg):
    p = cfg.p
    traj = _pure(cfg, p)
    tr = gp_of(traj, cfg.gp_target)
    rate = np.gradient(tr.phi_g, tr.times)
    T = p.gate_time
    # the rate only feeds the summary: near the orthogonal point at 2T a 1/dt
    # factor turns sub-1e-7 phase differences into large absolute rate changes
    cols = {"t_s": tr.times, "phi_g": tr.phi_g, "phi_global": tr.phi_global, "phi_dyn": tr.phi_dyn}
    ok = ~tr.flagged
    off_real = np.abs(np.sin(tr.phi_global[ok]))
    summary = [
        f"target={cfg.gp_target} max|phi_g|={tr.max_abs():.6f} flagged={int(tr.flagged.sum())}",
        f"dphi_g/dt sign changes at {_in_t(sign_changes(tr.times, rate), T)}",
        f"max|sin(phi_global)|={off_real.max():.3e}",
    ]
    return [(cfg.out, cols)], summary


def _sweep_path(out, eta):
    stem, ext = os.path.splitext(out)
    return f"{stem}_eta{eta:g}{ext or '.csv'}"


def run_wf_sweep(cfg):
    def one(p):
        traj = _pure(cfg, p)
        tr = gp_of(traj, cfg.gp_target)
        period = TWO_PI / abs(effective_rabi(p))
        return p, period, traj.grid.steps, tr

    outputs, summary = [], []
    rows = {k: [] for k in ("eta", "rabi_period_s", "steps", "max_abs_phi_g_gate", "max_abs_phi_g")}
    for p, period, steps, tr in fan_out(one, list(cfg.params)):
        m_gate = wf_gate_window_max(tr, period)
        m_all = tr.max_abs()
        outputs.append((_sweep_path(cfg.out, p.eta), {"t_s": tr.times, "t_over_period": tr.times / period,
                                                       "phi_g": tr.phi_g}))
        for k, v in zip(rows, (p.eta, period, steps, m_gate, m_all)):
            rows[k].append(v)
        summary.append(f"eta={p.eta:g} steps={steps} max|phi_g| up to P/4={m_gate:.6f} "
                       f"whole run={m_all:.6f}")
    outputs.append((cfg.out, rows))
    return outputs, summary


def _noisy(cfg, p, spec):
    rho0 = projector(initial_state(p, 0, cfg.fock))
    grid = cfg.grid(p)
    if spec.target_delta_e is not None:
        gamma = calibrate_gamma(p, spec.kind.value, spec.target_delta_e, rho0=rho0)
    else:
        gamma = spec.gamma
    ch = NoiseChannel.builtin(spec.kind, gamma, p.n_fock)
    traj = propagate_lindblad(p, rho0, [ch], grid)
    return gamma, traj


def run_gp_noise(cfg):
    p = cfg.p
    T = p.gate_time
    ref = gp_of(_pure(cfg, p), cfg.gp_target)
    cols = {"t_s": ref.times, "phi_g_unitary": ref.phi_g}
    summary = []

    def one(spec):
        gamma, traj = _noisy(cfg, p, spec)
        return spec, gamma, entanglement_loss(traj, p), gp_of(traj, cfg.gp_target)

    for spec, gamma, loss, tr in fan_out(one, list(cfg.channels)):
        d = delta_gp(ref, tr)
        i = int(np.nanargmax(np.abs(d)))
        cols[f"phi_g_{spec.label}"] = tr.phi_g
        cols[f"dphi_g_{spec.label}"] = d
        summary.append(
            f"channel={spec.kind.value} delta_e={loss:.6f} gamma={format_float(gamma)} "
            f"max|dphi_g|={abs(d[i]):.6e} at t={format_float(ref.times[i])}s ({ref.times[i] / T:.4f}T)"
        )
    return [(cfg.out, cols)], summary


def run_gp_subsystem(cfg):
    p = cfg.p
    summary = []
    cols = {"t_s": cfg.grid(p).times}

    def one(spec):
        gamma, traj = _noisy(cfg, p, spec)
        viol = [is_x_state(qubit_state(r, traj.spec)).max_violation for r in traj.states]
        return spec, gamma, entanglement_loss(traj, p), gp_of(traj, cfg.gp_target), np.array(viol)

    for spec, gamma, loss, tr, viol in fan_out(one, list(cfg.channels)):
        cols[f"phi_g_{spec.label}"] = tr.phi_g
        cols[f"x_violation_{spec.label}"] = viol
        summary.append(
            f"channel={spec.kind.value} delta_e={loss:.6f} gamma={format_float(gamma)} "
            f"max|phi_g|={tr.max_abs():.6e} x_state={'yes' if viol.max() <= 1e-6 else 'no'} "
            f"(max violation {viol.max():.3e})"
        )
    return [(cfg.out, cols)], summary


RUNNERS = {
    "wf-populations": run_populations,
    "sf-populations": run_populations,
    "negativity": run_negativity,
    "slope": run_slope,
    "wf-gp-sweep": run_wf_sweep,
    "gp-sf-unitary": run_gp_unitary,
    "gp-noise": run_gp_noise,
    "gp-subsystem": run_gp_subsystem,
}


def run_scenario(cfg, stream=None):
    """Run ``cfg``, write its CSV file(s) and print the summary; returns the written paths."""
    stream = stream or sys.stdout
    outputs, summary = RUNNERS[cfg.preset](cfg)
    for path, cols in outputs:
        write_csv(path, cols)
    p = cfg.p
    print(f"{cfg.preset}: regime={p.regime.value} eta={','.join(f'{q.eta:g}' for q in cfg.params)} "
          f"n_fock={p.n_fock} fock={cfg.fock}", file=stream)
    for line in summary:
        print(f"  {line}", file=stream)
    for path, cols in outputs:
        print(f"  wrote {path} ({len(next(iter(cols.values())))} rows)", file=stream)
    return [path for path, _ in outputs]


def list_presets(stream=None):
    stream = stream or sys.stdout
    width = max(map(len, PRESETS))
    for name, (desc, _) in PRESETS.items():
        print(f"{name:<{width}}  {desc}", file=stream)


def _parser():
    epilog = "presets:\n" + "\n".join(f"  {k:<15} {v[0]}" for k, v in PRESETS.items())
    ap = argparse.ArgumentParser(
        prog="ms-gpa", description="Molmer-Sorensen gate geometric-phase scenarios.",
        epilog=epilog, formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    ap.add_argument("command", help="'list', 'run' or a preset name")
    ap.add_argument("overrides", nargs="*", metavar="key=value")
    ap.add_argument("--config", help="flat key = value file")
    ap.add_argument("--out", help="output CSV path (overrides 'out')")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None, stream=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "list":
        list_presets(stream)
        return EXIT_OK
    try:
        entries = []
        if args.config:
            try:
                with open(args.config) as fh:
                    text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}") from None
            entries += parse_config_text(text, args.config)
        entries += parse_overrides(args.overrides)
        if args.out:
            entries.append(("out", args.out, "--out"))
        preset = None if args.command == "run" else args.command
        cfg = build_config(preset, entries)
        threads()
    except ConfigError as exc:
        print(f"ms-gpa: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        run_scenario(cfg, stream)
    except NumericalError as exc:
        hint = f" (hint: {exc.hint})" if exc.hint else ""
        print(f"ms-gpa: numerical error: {exc}{hint}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
