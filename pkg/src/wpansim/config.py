"""Scenario configuration: a sectioned key-value file.

Sections are ``[network]``, ``[phy]``, ``[mac]``, ``[traffic]`` and ``[run]``.
Every key is optional and anything unknown is rejected. Missing keys take
the scenario defaults (standard 802.15.4 values where no scenario value exists).
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .core import US_PER_S, MacParams, PhyParams


class ConfigError(Exception):
    """Base class for configuration problems; always names the key."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    pass


INTERARRIVAL_MODELS = ("constant", "exponential")


@dataclass(frozen=True)
class TrafficSpec:
    payload_bytes: int = 114
    interarrival_model: str = "constant"
    interarrival_s: float = 0.045

    def __post_init__(self):
        if self.payload_bytes < 1:
            raise ValueError("payload_bytes must be >= 1")
        if self.interarrival_model not in INTERARRIVAL_MODELS:
            raise ValueError(f"interarrival_model must be one of {INTERARRIVAL_MODELS}")
        if not self.interarrival_s > 0 or round(self.interarrival_s * US_PER_S) < 1:
            raise ValueError("interarrival_s must be > 0")

    @property
    def interarrival_us(self) -> int:
        return round(self.interarrival_s * US_PER_S)


@dataclass(frozen=True)
class NetworkInfo:
    """Network and radio settings. Echoed in reports; inert in the simulation."""

    n_end_devices: int = 10
    beacon_enabled: bool = False
    beacon_order: int = 6
    superframe_order: int = 0
    max_routers: int = 5
    max_depth: int = 5
    route_discovery_s: float = 10.0
    tx_power_w: float = 0.05
    rx_power_dbm: float = -85.0

    def __post_init__(self):
        if self.n_end_devices < 1:
            raise ValueError("n_end_devices must be >= 1")
        if self.beacon_enabled:
            raise ValueError("beacon_enabled: only non-beacon mode is modeled")


@dataclass(frozen=True)
class RunSpec:
    duration_s: float = 3600.0
    sample_interval_s: float = 300.0
    base_seed: int = 1
    trace_enabled: bool = False
    accounting: str = "payload"

    def __post_init__(self):
        if not self.sample_interval_s > 0:
            raise ValueError("sample_interval_s must be > 0")
        if self.duration_s < self.sample_interval_s:
            raise ValueError("duration_s must be >= sample_interval_s")
        if not 0 <= self.base_seed < 1 << 64:
            raise ValueError("base_seed must be an unsigned 64-bit integer")
        if self.accounting not in ("payload", "ppdu"):
            raise ValueError("accounting must be 'payload' or 'ppdu'")


@dataclass(frozen=True)
class ScenarioConfig:
    network: NetworkInfo = field(default_factory=NetworkInfo)
    phy: PhyParams = field(default_factory=PhyParams)
    mac: MacParams = field(default_factory=MacParams)
    traffic: TrafficSpec = field(default_factory=TrafficSpec)
    run: RunSpec = field(default_factory=RunSpec)

    @property
    def n_end_devices(self) -> int:
        return self.network.n_end_devices

    @property
    def duration_us(self) -> int:
        return round(self.run.duration_s * US_PER_S)

    @property
    def sample_interval_us(self) -> int:
        return round(self.run.sample_interval_s * US_PER_S)

    def replace(self, **sections) -> "ScenarioConfig":
        """Override individual keys: ``cfg.replace(phy={"data_rate_bps": 20000})``."""
        changes = {}
        for name, values in sections.items():
            current = getattr(self, name)
            try:
                changes[name] = dataclasses.replace(current, **values)
            except ValueError as exc:
                raise ValidationError(str(exc), _guess_key(str(exc), values)) from exc
            except TypeError as exc:
                raise ValidationError(str(exc)) from exc
        return dataclasses.replace(self, **changes)

    def as_sections(self) -> dict[str, dict[str, object]]:
        return {name: dataclasses.asdict(getattr(self, name)) for name in SECTIONS}


SECTIONS = {f.name: f.type for f in dataclasses.fields(ScenarioConfig)}
_SECTION_TYPES = {
    "network": NetworkInfo,
    "phy": PhyParams,
    "mac": MacParams,
    "traffic": TrafficSpec,
    "run": RunSpec,
}

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def _guess_key(message: str, keys) -> str | None:
    for key in keys:
        if message.startswith(key) or f" {key} " in message:
            return key
    return None


def _coerce(raw: str, typ: type, key: str):
    text = raw.strip()
    try:
        if typ is bool:
            low = text.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(text)
        if typ is int:
            return int(text.replace("_", ""), 0)
        if typ is float:
            return float(text)
        return text.strip('"')
    except ValueError:
        raise ParseError(f"{key}: cannot read {raw!r} as {typ.__name__}", key) from None


def parse_config(text: str, source: str = "<string>") -> ScenarioConfig:
    parser = configparser.ConfigParser(interpolation=None, default_section="__none__")
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ParseError(f"{source}: {exc}".strip()) from exc

    sections = {}
    for name in parser.sections():
        typ = _SECTION_TYPES.get(name)
        if typ is None:
            raise ValidationError(f"unknown section [{name}]", name)
        hints = {f.name: f.type for f in dataclasses.fields(typ)}
        values = {}
        for key, raw in parser.items(name):
            if key not in hints:
                raise ValidationError(f"unknown key {name}.{key}", key)
            values[key] = _coerce(raw, _type_of(hints[key]), key)
        try:
            sections[name] = typ(**values)
        except ValueError as exc:
            key = _guess_key(str(exc), values) or name
            raise ValidationError(f"{name}.{exc}", key) from exc
    return ScenarioConfig(**sections)


def _type_of(annotation) -> type:
    names = {"int": int, "float": float, "bool": bool, "str": str}
    if isinstance(annotation, str):
        return names[annotation]
    return annotation


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    return parse_config(text, str(path))


def write_config(cfg: ScenarioConfig) -> str:
    lines = []
    for name, values in cfg.as_sections().items():
        lines.append(f"[{name}]")
        for key, value in values.items():
            if isinstance(value, bool):
                value = "true" if value else "false"
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{key} = {value}")
        lines.append("")
    return "\n".join(lines)


def bundled_scenario(name: str) -> ScenarioConfig:
    """Load one of the shipped scenarios, e.g. ``"paper-match"`` or ``"table3"``."""
    fname = name if name.endswith(".cfg") else f"{name}.cfg"
    ref = resources.files("wpansim") / "scenarios" / fname
    if not ref.is_file():
        raise ParseError(f"no bundled scenario {name!r}")
    return parse_config(ref.read_text(), fname)


def resolve_config(spec: str | None) -> ScenarioConfig:
    """A path, a bundled scenario name, or ``None`` for all defaults."""
    if spec is None:
        return ScenarioConfig()
    if Path(spec).is_file():
        return load_config(spec)
    return bundled_scenario(spec)
