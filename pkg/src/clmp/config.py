"""Experiment configuration: validation, flat config-file parsing, presets."""

from __future__ import annotations

from dataclasses import dataclass, replace

from .model import BernoulliActivation, FixedK, LogDistance, UniformDb

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "parse_config_file",
    "build_preset",
    "PRESET_NAMES",
]

KNOWN_DETECTORS = ("clmp", "cwo", "somp", "msbl")
SWEEP_AXES = ("n_antennas", "pilot_len", "n_devices", "snr_db", "k")


class ConfigError(ValueError):
    """Invalid experiment configuration (bad key, bad value, bad combination)."""


@dataclass(frozen=True)
class ExperimentConfig:
    n_devices: int
    pilot_len: int
    n_antennas: int
    activation: FixedK | BernoulliActivation
    pilot_kind: str
    lsfc_model: UniformDb | LogDistance
    noise_var_w: float
    p_max_w: float
    snr_db: float | None
    detectors: tuple[str, ...]
    trials: int
    master_seed: int
    sweep_axis: str
    sweep_values: tuple[float, ...]
    label_suffix: str = ""  # appended to detector names in result rows

    def validate(self) -> None:
        if self.n_devices < 1 or self.pilot_len < 1 or self.n_antennas < 1:
            raise ConfigError("dimensions must be positive")
        if self.noise_var_w <= 0.0 or self.p_max_w <= 0.0:
            raise ConfigError("noise_var_w and p_max_w must be positive")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.pilot_kind not in ("bernoulli", "gaussian"):
            raise ConfigError(f"unknown pilot kind {self.pilot_kind!r}")
        if not self.detectors:
            raise ConfigError("at least one detector required")
        for det in self.detectors:
            if det not in KNOWN_DETECTORS:
                raise ConfigError(f"unknown detector {det!r}")
        if self.sweep_axis not in SWEEP_AXES:
            raise ConfigError(f"unknown sweep axis {self.sweep_axis!r}")
        if not self.sweep_values:
            raise ConfigError("sweep_values must be non-empty")
        if isinstance(self.activation, FixedK) and self.activation.k < 1:
            raise ConfigError("fixed-k activation requires k >= 1")
        if self.sweep_axis == "k" and not isinstance(self.activation, FixedK):
            raise ConfigError("sweeping k requires fixed_k activation")
        if self.snr_db is not None and not isinstance(self.lsfc_model, LogDistance):
            raise ConfigError("snr_db is defined relative to the cell edge; requires log_distance fading")
        if self.sweep_axis == "snr_db" and not isinstance(self.lsfc_model, LogDistance):
            raise ConfigError("sweeping snr_db requires log_distance fading")
        if self.sweep_axis in ("n_antennas", "pilot_len", "n_devices", "k"):
            for v in self.sweep_values:
                if v != int(v) or int(v) < 1:
                    raise ConfigError(f"sweep values for {self.sweep_axis} must be positive integers")


# ---------------------------------------------------------------------------
# flat key=value config files

_REQUIRED_KEYS = {
    "n_devices",
    "pilot_len",
    "n_antennas",
    "activation",
    "pilot_kind",
    "lsfc",
    "noise_var_w",
    "detectors",
    "trials",
    "sweep_axis",
    "sweep_values",
}
_OPTIONAL_KEYS = {
    "k",
    "activation_prob",
    "lsfc_min_db",
    "lsfc_max_db",
    "cell_radius_m",
    "min_radius_m",
    "p_max_w",
    "snr_db",
    "master_seed",
}


def _parse_kv_lines(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _num(kv: dict[str, str], key: str) -> float:
    try:
        return float(kv[key])
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: not a number: {kv[key]!r}") from exc


def _int(kv: dict[str, str], key: str) -> int:
    value = _num(kv, key)
    if value != int(value):
        raise ConfigError(f"key {key!r}: expected an integer, got {kv[key]!r}")
    return int(value)


def parse_config_file(path: str) -> ExperimentConfig:
    """Parse a flat 'key = value' config file.  Unknown keys are hard errors."""
    with open(path, encoding="utf-8") as fh:
        kv = _parse_kv_lines(fh.read())

    unknown = set(kv) - _REQUIRED_KEYS - _OPTIONAL_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    missing = _REQUIRED_KEYS - set(kv)
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(sorted(missing))}")

    sweep_axis = kv["sweep_axis"]

    act_kind = kv["activation"]
    if act_kind == "fixed_k":
        if sweep_axis == "k":
            activation = FixedK(k=1)  # placeholder; the sweep overrides k per point
        else:
            if "k" not in kv:
                raise ConfigError("activation = fixed_k requires key 'k'")
            activation = FixedK(k=_int(kv, "k"))
    elif act_kind == "bernoulli":
        if "activation_prob" not in kv:
            raise ConfigError("activation = bernoulli requires key 'activation_prob'")
        activation = BernoulliActivation(eps=_num(kv, "activation_prob"))
    else:
        raise ConfigError(f"unknown activation {act_kind!r}")

    lsfc_kind = kv["lsfc"]
    if lsfc_kind == "uniform_db":
        if "lsfc_min_db" not in kv or "lsfc_max_db" not in kv:
            raise ConfigError("lsfc = uniform_db requires lsfc_min_db and lsfc_max_db")
        lsfc_model: UniformDb | LogDistance = UniformDb(
            min_db=_num(kv, "lsfc_min_db"), max_db=_num(kv, "lsfc_max_db")
        )
    elif lsfc_kind == "log_distance":
        lsfc_model = LogDistance(
            cell_radius_m=_num(kv, "cell_radius_m") if "cell_radius_m" in kv else 250.0,
            min_radius_m=_num(kv, "min_radius_m") if "min_radius_m" in kv else 25.0,
        )
    else:
        raise ConfigError(f"unknown lsfc model {lsfc_kind!r}")

    detectors = tuple(d.strip() for d in kv["detectors"].split(",") if d.strip())
    try:
        sweep_values = tuple(float(v) for v in kv["sweep_values"].split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"sweep_values: not numeric: {kv['sweep_values']!r}") from exc

    cfg = ExperimentConfig(
        n_devices=_int(kv, "n_devices"),
        pilot_len=_int(kv, "pilot_len"),
        n_antennas=_int(kv, "n_antennas"),
        activation=activation,
        pilot_kind=kv["pilot_kind"],
        lsfc_model=lsfc_model,
        noise_var_w=_num(kv, "noise_var_w"),
        p_max_w=_num(kv, "p_max_w") if "p_max_w" in kv else 1.0,
        snr_db=_num(kv, "snr_db") if "snr_db" in kv else None,
        detectors=detectors,
        trials=_int(kv, "trials"),
        master_seed=_int(kv, "master_seed") if "master_seed" in kv else 12345,
        sweep_axis=sweep_axis,
        sweep_values=sweep_values,
    )
    try:
        cfg.validate()
    except ValueError as exc:  # dataclass __post_init__ errors included
        raise ConfigError(str(exc)) from exc
    return cfg


# ---------------------------------------------------------------------------
# bundled presets
#
# fig2/fig3 family: N = 1000, Bernoulli pilots, LSFC uniform on [-15, 0] dB,
# unit noise power, no power control, exactly K active devices; PMD/ERR vs the
# antenna count (fig2) or the pilot length (fig3), one series per K.
#
# fig5..fig9 family: cellular network with log-distance path loss on a
# 25..250 m ring, channel-inversion power control toward the cell edge,
# Bernoulli(0.01) activation, noise power 2e-13 W, cell-edge SNR 10 dB unless
# swept; N = 1000, L = 64, M = 32 unless swept.

PRESET_NAMES = ("fig2", "fig3", "fig5", "fig6", "fig7", "fig8", "fig9")

_K_FAMILY = (10, 20, 30, 40, 50)


def _iva_base(**overrides) -> ExperimentConfig:
    base = ExperimentConfig(
        n_devices=1000,
        pilot_len=64,
        n_antennas=32,
        activation=FixedK(k=10),
        pilot_kind="bernoulli",
        lsfc_model=UniformDb(min_db=-15.0, max_db=0.0),
        noise_var_w=1.0,
        p_max_w=1.0,
        snr_db=None,
        detectors=("clmp", "cwo"),
        trials=2000,
        master_seed=12345,
        sweep_axis="n_antennas",
        sweep_values=(10.0, 20.0, 30.0, 40.0, 50.0, 60.0),
    )
    return replace(base, **overrides)


def _network_base(**overrides) -> ExperimentConfig:
    base = ExperimentConfig(
        n_devices=1000,
        pilot_len=64,
        n_antennas=32,
        activation=BernoulliActivation(eps=0.01),
        pilot_kind="bernoulli",
        lsfc_model=LogDistance(cell_radius_m=250.0, min_radius_m=25.0),
        noise_var_w=2e-13,
        p_max_w=0.1,
        snr_db=10.0,
        detectors=("clmp", "somp", "msbl"),
        trials=2000,
        master_seed=12345,
        sweep_axis="snr_db",
        sweep_values=tuple(float(v) for v in range(-20, 6, 2)),
    )
    return replace(base, **overrides)


def build_preset(name: str) -> list[ExperimentConfig]:
    """Expand a preset into one or more configs (one per curve family)."""
    if name == "fig2":
        return [
            _iva_base(activation=FixedK(k=k), label_suffix=f"(K={k})") for k in _K_FAMILY
        ]
    if name == "fig3":
        return [
            _iva_base(
                activation=FixedK(k=k),
                n_antennas=40,
                sweep_axis="pilot_len",
                sweep_values=(32.0, 48.0, 64.0, 80.0),
                label_suffix=f"(K={k})",
            )
            for k in _K_FAMILY
        ]
    if name == "fig5":
        return [_network_base()]
    if name == "fig6":
        return [
            _network_base(
                pilot_kind=kind,
                detectors=("clmp",),
                sweep_values=tuple(float(v) for v in range(-20, 24, 4)),
                label_suffix=f"(pilots={kind})",
            )
            for kind in ("bernoulli", "gaussian")
        ]
    if name == "fig7":
        return [
            _network_base(
                sweep_axis="n_antennas",
                sweep_values=(1.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0),
            )
        ]
    if name == "fig8":
        return [
            _network_base(
                pilot_len=pilot_len,
                detectors=("clmp",),
                trials=50,
                sweep_axis="n_devices",
                sweep_values=tuple(float(v) for v in range(1000, 11000, 1000)),
                label_suffix=f"(L={pilot_len})",
            )
            for pilot_len in (16, 72)
        ]
    if name == "fig9":
        return [
            _network_base(
                pilot_len=pilot_len,
                detectors=("clmp",),
                trials=200,
                sweep_axis="n_devices",
                sweep_values=tuple(float(v) for v in range(1000, 11000, 1000)),
                label_suffix=f"(L={pilot_len})",
            )
            for pilot_len in (16, 32, 48, 64)
        ]
    raise ConfigError(f"unknown preset {name!r} (known: {', '.join(PRESET_NAMES)})")
