"""Monte-Carlo system simulator for a single-satellite LEO network."""

from .channel import AntennaPattern, calibrate_ka, free_space_path_loss_db
from .config import ConfigError, ScenarioConfig, load_config, paper_matrix
from .geometry import BeamLayout, build_beam_layout
from .kpi import DEFAULT_REQUIREMENTS, evaluate, percentile_5
from .mac_sched import DropResult, McsLadder, run_drop
from .phy_link import FrequencyPlan, LinkState, RxConfig, assign_colors

__version__ = "0.1.0"

__all__ = [
    "AntennaPattern",
    "BeamLayout",
    "ConfigError",
    "DEFAULT_REQUIREMENTS",
    "DropResult",
    "FrequencyPlan",
    "LinkState",
    "McsLadder",
    "RxConfig",
    "ScenarioConfig",
    "assign_colors",
    "build_beam_layout",
    "calibrate_ka",
    "evaluate",
    "free_space_path_loss_db",
    "load_config",
    "paper_matrix",
    "percentile_5",
    "run_drop",
    "__version__",
]
