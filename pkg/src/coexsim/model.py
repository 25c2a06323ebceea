"""Domain types, default parameters, and configuration handling.

Every quantity used by the throughput and SINR equations lives on exactly one
type in this module: transmit power and noise figure on RadioParams, the LBT
timing constants on LbtParams, duty-cycle slot parameters on DutyCycleParams,
carrier-sense thresholds on CsThresholds, and the per-AP equation terms on
ThroughputTerms / CsNeighborhood / FramesPerSlot.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from pathlib import Path
from typing import Any

import yaml


class TechVariant(Enum):
    """The six AP technology variants (incumbents are always WIFI)."""

    WIFI = "wifi"
    LAA = "laa"
    LTEU_FIXED50 = "lteu-fixed50"
    LTEU_ADAPTIVE = "lteu-adaptive"
    LTEU_IDEAL = "lteu-ideal"
    LTE_PLAIN = "lte"

    @property
    def is_lbt(self) -> bool:
        """True for variants that contend with listen-before-talk."""
        return self in (TechVariant.WIFI, TechVariant.LAA)

    @property
    def is_duty_cycled(self) -> bool:
        """True for ON/OFF slotted variants (ideal TDMA included)."""
        return self in (
            TechVariant.LTEU_FIXED50,
            TechVariant.LTEU_ADAPTIVE,
            TechVariant.LTEU_IDEAL,
        )

    @property
    def uses_lte_phy(self) -> bool:
        return self is not TechVariant.WIFI


class Scenario(Enum):
    INDOOR_INDOOR = "indoor-indoor"
    INDOOR_OUTDOOR = "indoor-outdoor"
    OUTDOOR_OUTDOOR = "outdoor-outdoor"


class ChannelMode(Enum):
    RANDOM = "random"
    SENSE = "sense"
    FORCED_CO_CHANNEL = "forced-co-channel"


THERMAL_NOISE_DBM_PER_HZ = -174.0
BANDWIDTH_HZ = 2.0e7
WIFI_NOISE_FIGURE_DB = 15.0
LTE_NOISE_FIGURE_DB = 9.0


@dataclass(frozen=True)
class RadioParams:
    """PHY-level radio parameters of one device."""

    tx_power_dbm: float = 23.0          # 23 or 30
    noise_figure_db: float = WIFI_NOISE_FIGURE_DB
    bandwidth_hz: float = BANDWIDTH_HZ
    thermal_noise_dbm_per_hz: float = THERMAL_NOISE_DBM_PER_HZ

    def noise_dbm(self) -> float:
        """Receiver noise power over the channel bandwidth."""
        return (
            self.thermal_noise_dbm_per_hz
            + 10.0 * math.log10(self.bandwidth_hz)
            + self.noise_figure_db
        )

    def noise_mw(self) -> float:
        return dbm_to_mw(self.noise_dbm())


@dataclass(frozen=True)
class LbtParams:
    """CSMA/CA (listen-before-talk) MAC constants."""

    cw_min: int = 15
    cw_max: int = 1023
    slot_us: float = 9.0
    sifs_us: float = 16.0
    difs_us: float = 34.0              # SIFS + 2 slots
    msdu_bytes: int = 1500
    phy_header_us: float = 40.0
    mac_header_bits: int = 320
    laa_frame_ms: float = 1.0          # one LTE subframe

    @property
    def laa_frame_us(self) -> float:
        return self.laa_frame_ms * 1000.0

    @property
    def backoff_stages(self) -> int:
        return int(round(math.log2((self.cw_max + 1) / (self.cw_min + 1))))


@dataclass(frozen=True)
class DutyCycleParams:
    """Slotted ON/OFF parameters shared by the LTE-U variants."""

    on_slot_ms: float = 100.0
    fixed_period_slots: int = 2        # fixed 50% duty cycle

    @property
    def on_slot_us(self) -> float:
        return self.on_slot_ms * 1000.0


@dataclass(frozen=True)
class CsThresholds:
    """Carrier-sense detection thresholds by listener/transmitter class."""

    wifi_to_wifi_dbm: float = -82.0
    wifi_to_other_dbm: float = -62.0
    laa_dbm: float = -62.0
    lteu_adaptive_dbm: float = -62.0

    def threshold_dbm(self, listener: TechVariant, transmitter: TechVariant) -> float:
        """Detection threshold of `listener` for a `transmitter` signal.

        Returns +inf for variants that do not sense (fixed duty cycle and
        continuous LTE); LTE-U ideal senses at the adaptive threshold to form
        its TDMA groups.
        """
        if listener is TechVariant.WIFI:
            if transmitter is TechVariant.WIFI:
                return self.wifi_to_wifi_dbm
            return self.wifi_to_other_dbm
        if listener is TechVariant.LAA:
            return self.laa_dbm
        if listener in (TechVariant.LTEU_ADAPTIVE, TechVariant.LTEU_IDEAL):
            return self.lteu_adaptive_dbm
        return math.inf


@dataclass(frozen=True)
class PropagationParams:
    """Coefficient set for the path-loss and shadowing models."""

    frequency_hz: float = 5.25e9
    los_variant: str = "upper"         # lower | median | upper
    ap_height_m: float = 5.0           # outdoor AP antenna height
    user_height_m: float = 1.5
    min_distance_m: float = 1.0
    # over-rooftop urban geometry
    street_width_m: float = 20.0
    building_separation_m: float = 40.0
    rooftop_height_m: float = 12.0
    street_orientation_deg: float = 90.0
    # multi-wall-and-floor indoor model
    mwf_exponent: float = 2.0
    wall_loss_db: float = 9.5          # first interior wall
    wall_decay: float = 0.7            # per-wall diminishing factor
    floor_loss_db: float = 18.3        # first floor
    floor_decay: float = 0.5
    entry_loss_db: float = 19.1        # per external-wall crossing
    shadowing_indoor_db: float = 4.0   # both endpoints indoors
    shadowing_other_db: float = 7.0


@dataclass(frozen=True)
class ThroughputTerms:
    """Per-AP decomposition of the downlink throughput product."""

    rho_bps_per_hz: float
    airtime: float                     # A in [0, 1]
    mac_efficiency: float              # S in (0, 1]
    collision_degradation: float       # r_deg in [0, 1]
    sinr_db: float
    i_inc_mw: float
    i_ent_mw: float
    noise_mw: float


@dataclass(frozen=True)
class CsNeighborhood:
    """Co-channel APs detected within carrier-sense range (self excluded)."""

    n_inc: int
    n_ent: int
    member_ids: tuple[int, ...]


@dataclass(frozen=True)
class FramesPerSlot:
    """Incumbent frames transmitted per duty-cycle ON-time slot duration."""

    m: int


@dataclass(frozen=True)
class ScenarioConfig:
    """One campaign's scenario definition with Table-style defaults."""

    scenario: Scenario = Scenario.INDOOR_INDOOR
    n_incumbent: int = 1
    n_entrant: int = 1
    entrant_variant: TechVariant = TechVariant.WIFI
    channel_mode: ChannelMode = ChannelMode.SENSE
    n_channels_incumbent: int = 19
    n_channels_entrant: int = 19
    incumbent_tx_power_dbm: float = 23.0
    entrant_tx_power_dbm: float = 23.0
    incumbent_density_per_km2: float | None = None  # indoor-outdoor only
    n_realizations: int = 3000
    base_seed: int = 1
    workers: int = 1
    lbt: LbtParams = field(default_factory=LbtParams)
    duty: DutyCycleParams = field(default_factory=DutyCycleParams)
    cs_thresholds: CsThresholds = field(default_factory=CsThresholds)
    propagation: PropagationParams = field(default_factory=PropagationParams)
    cs_graph: str = "symmetric"        # symmetric | directed
    sense_scope: str = "global"        # global | cs-range
    interference: str = "full"         # full | airtime-weighted
    pico_sites_file: str | None = None
    wifi_table_file: str | None = None
    lte_table_file: str | None = None


class ConfigError(ValueError):
    """Raised when a ScenarioConfig violates a structural constraint."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


MAX_CHANNELS_INDOOR = 19
MAX_CHANNELS_OUTDOOR = 11
APARTMENTS_PER_BUILDING = 20
N_PICO_SITES = 20


def config_violations(cfg: ScenarioConfig) -> list[str]:
    """Collect all constraint violations; empty list means the config is valid."""
    v: list[str] = []
    sc = cfg.scenario

    if cfg.n_realizations <= 0:
        v.append("n_realizations must be positive")
    if cfg.n_entrant < 0:
        v.append("n_entrant must be >= 0")
    if cfg.workers < 1:
        v.append("workers must be >= 1")

    if cfg.n_channels_incumbent < 1 or cfg.n_channels_entrant < 1:
        v.append("channel pools must hold at least one channel")
    if cfg.n_channels_incumbent > MAX_CHANNELS_INDOOR:
        v.append("incumbent channels exceed 19")

    if sc is Scenario.INDOOR_INDOOR:
        if cfg.n_incumbent not in (1, 10):
            v.append("indoor-indoor n_incumbent must be 1 or 10")
        if cfg.n_entrant > 10:
            v.append("indoor-indoor n_entrant must be <= 10")
        if cfg.n_incumbent + cfg.n_entrant > APARTMENTS_PER_BUILDING:
            v.append("indoor-indoor holds at most 20 APs (one per apartment)")
        if cfg.n_channels_entrant > MAX_CHANNELS_INDOOR:
            v.append("entrant channels exceed 19 indoor")
        if cfg.entrant_tx_power_dbm != 23.0:
            v.append("indoor-indoor entrant power must be 23 dBm")
        if cfg.incumbent_tx_power_dbm != 23.0:
            v.append("indoor incumbent power must be 23 dBm")
    elif sc is Scenario.INDOOR_OUTDOOR:
        if cfg.incumbent_density_per_km2 is None:
            if cfg.n_incumbent < 1:
                v.append("indoor-outdoor needs n_incumbent >= 1 or a density")
        elif cfg.incumbent_density_per_km2 <= 0:
            v.append("incumbent density must be positive")
        if not 0 <= cfg.n_entrant <= N_PICO_SITES:
            v.append("indoor-outdoor n_entrant must be in 0..20")
        if cfg.n_channels_entrant > MAX_CHANNELS_OUTDOOR:
            v.append("entrant channels exceed 11 outdoor")
        if cfg.entrant_tx_power_dbm not in (23.0, 30.0):
            v.append("entrant power must be 23 or 30 dBm")
        if cfg.incumbent_tx_power_dbm != 23.0:
            v.append("indoor incumbent power must be 23 dBm")
    elif sc is Scenario.OUTDOOR_OUTDOOR:
        if not 1 <= cfg.n_incumbent <= 10:
            v.append("outdoor-outdoor n_incumbent must be in 1..10")
        if cfg.n_entrant > 10:
            v.append("outdoor-outdoor n_entrant must be <= 10")
        if cfg.n_incumbent + cfg.n_entrant > N_PICO_SITES:
            v.append("outdoor-outdoor holds at most 20 APs (one per site)")
        if cfg.n_channels_incumbent > MAX_CHANNELS_OUTDOOR:
            v.append("incumbent channels exceed 11 outdoor")
        if cfg.n_channels_entrant > MAX_CHANNELS_OUTDOOR:
            v.append("entrant channels exceed 11 outdoor")
        if cfg.entrant_tx_power_dbm not in (23.0, 30.0):
            v.append("entrant power must be 23 or 30 dBm")
        if cfg.incumbent_tx_power_dbm not in (23.0, 30.0):
            v.append("incumbent power must be 23 or 30 dBm")

    if abs(cfg.lbt.difs_us - (cfg.lbt.sifs_us + 2 * cfg.lbt.slot_us)) > 1e-9:
        v.append("difs_us must equal sifs_us + 2*slot_us")
    stages = (cfg.lbt.cw_max + 1) / (cfg.lbt.cw_min + 1)
    if 2 ** round(math.log2(stages)) != stages:
        v.append("cw_max must be 2^k*(cw_min+1)-1")
    if cfg.cs_thresholds.wifi_to_wifi_dbm >= cfg.cs_thresholds.wifi_to_other_dbm:
        v.append("wifi_to_wifi threshold must be below wifi_to_other")
    if cfg.cs_graph not in ("symmetric", "directed"):
        v.append("cs_graph must be symmetric or directed")
    if cfg.sense_scope not in ("global", "cs-range"):
        v.append("sense_scope must be global or cs-range")
    if cfg.interference not in ("full", "airtime-weighted"):
        v.append("interference must be full or airtime-weighted")
    if cfg.propagation.los_variant not in ("lower", "median", "upper"):
        v.append("los_variant must be lower, median, or upper")
    return v


def validate_config(cfg: ScenarioConfig) -> ScenarioConfig:
    """Return cfg unchanged if valid, else raise ConfigError with all violations."""
    v = config_violations(cfg)
    if v:
        raise ConfigError(v)
    return cfg


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw: float) -> float:
    if mw <= 0.0:
        raise ValueError("power must be positive")
    return 10.0 * math.log10(mw)


def radio_for(variant: TechVariant, tx_power_dbm: float) -> RadioParams:
    """Radio parameters for one AP/user pair of the given technology."""
    nf = WIFI_NOISE_FIGURE_DB if variant is TechVariant.WIFI else LTE_NOISE_FIGURE_DB
    return RadioParams(tx_power_dbm=tx_power_dbm, noise_figure_db=nf)


def default_config(scenario: Scenario | str, **overrides: Any) -> ScenarioConfig:
    """Config with all defaults for `scenario`; keyword overrides applied on top."""
    sc = Scenario(scenario) if isinstance(scenario, str) else scenario
    cfg = ScenarioConfig(scenario=sc)
    if sc is Scenario.INDOOR_OUTDOOR:
        cfg = replace(cfg, n_channels_entrant=MAX_CHANNELS_OUTDOOR,
                      incumbent_density_per_km2=500.0, n_realizations=1500)
    elif sc is Scenario.OUTDOOR_OUTDOOR:
        cfg = replace(cfg, n_channels_incumbent=MAX_CHANNELS_OUTDOOR,
                      n_channels_entrant=MAX_CHANNELS_OUTDOOR, n_realizations=1500)
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg


_TOP_LEVEL_KEYS = {
    "scenario": ("scenario", lambda s: Scenario(s)),
    "incumbents": ("n_incumbent", int),
    "entrants": ("n_entrant", int),
    "entrant_variant": ("entrant_variant", lambda s: TechVariant(s)),
    "channel_mode": ("channel_mode", lambda s: ChannelMode(s)),
    "incumbent_density_per_km2": ("incumbent_density_per_km2",
                                  lambda x: None if x is None else float(x)),
    "realizations": ("n_realizations", int),
    "seed": ("base_seed", int),
    "workers": ("workers", int),
    "cs_graph": ("cs_graph", str),
    "sense_scope": ("sense_scope", str),
    "interference": ("interference", str),
    "pico_sites_file": ("pico_sites_file", lambda x: None if x is None else str(x)),
}

_NESTED_SECTIONS = {
    "lbt": ("lbt", LbtParams),
    "duty": ("duty", DutyCycleParams),
    "cs_thresholds": ("cs_thresholds", CsThresholds),
    "propagation": ("propagation", PropagationParams),
}


def _update_dataclass(obj, data: dict):
    known = {f.name for f in fields(obj)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError([f"unknown key(s) {sorted(unknown)} in {type(obj).__name__}"])
    return replace(obj, **data)


def config_from_dict(data: dict, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Build a ScenarioConfig from a nested dict (parsed YAML)."""
    data = dict(data)
    scenario = data.pop("scenario", None)
    if base is None:
        if scenario is None:
            raise ConfigError(["config must name a scenario"])
        cfg = default_config(scenario)
    else:
        cfg = base if scenario is None else default_config(scenario)

    updates: dict[str, Any] = {}
    channels = data.pop("channels", None)
    if channels is not None:
        if not isinstance(channels, dict):
            raise ConfigError(["channels must be a mapping"])
        if "incumbent" in channels:
            updates["n_channels_incumbent"] = int(channels["incumbent"])
        if "entrant" in channels:
            updates["n_channels_entrant"] = int(channels["entrant"])
    power = data.pop("tx_power_dbm", None)
    if power is not None:
        if not isinstance(power, dict):
            raise ConfigError(["tx_power_dbm must be a mapping"])
        if "incumbent" in power:
            updates["incumbent_tx_power_dbm"] = float(power["incumbent"])
        if "entrant" in power:
            updates["entrant_tx_power_dbm"] = float(power["entrant"])
    tables = data.pop("tables", None)
    if tables is not None:
        if not isinstance(tables, dict):
            raise ConfigError(["tables must be a mapping"])
        if tables.get("wifi") is not None:
            updates["wifi_table_file"] = str(tables["wifi"])
        if tables.get("lte") is not None:
            updates["lte_table_file"] = str(tables["lte"])

    for key, value in data.items():
        if key in _TOP_LEVEL_KEYS:
            attr, conv = _TOP_LEVEL_KEYS[key]
            try:
                updates[attr] = conv(value)
            except (TypeError, ValueError) as err:
                raise ConfigError([f"bad value for {key}: {err}"]) from None
        elif key in _NESTED_SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError([f"{key} must be a mapping"])
            attr, _ = _NESTED_SECTIONS[key]
            updates[attr] = _update_dataclass(getattr(cfg, attr), dict(value))
        else:
            raise ConfigError([f"unknown config key: {key}"])
    return replace(cfg, **updates)


def load_config(path: str | Path, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Load a YAML config file; all omitted keys keep their defaults."""
    with open(path) as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ConfigError(["config file must hold a mapping"])
    return config_from_dict(data, base=base)
