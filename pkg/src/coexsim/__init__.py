"""Monte Carlo system-level simulator for LTE/Wi-Fi coexistence at 5 GHz."""

from .model import (ChannelMode, ConfigError, CsThresholds, DutyCycleParams,
                    LbtParams, PropagationParams, RadioParams, Scenario,
                    ScenarioConfig, TechVariant, ThroughputTerms,
                    default_config, load_config, validate_config)
from .campaign import CampaignResult, run_campaign, run_realization, sweep

__all__ = [
    "ChannelMode", "ConfigError", "CsThresholds", "DutyCycleParams",
    "LbtParams", "PropagationParams", "RadioParams", "Scenario",
    "ScenarioConfig", "TechVariant", "ThroughputTerms", "default_config",
    "load_config", "validate_config", "CampaignResult", "run_campaign",
    "run_realization", "sweep",
]

__version__ = "0.1.0"
