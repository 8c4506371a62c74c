"""Scenario configuration: defaults, file parsing and validation.

Config files are flat ``key = value`` text. Blank lines and ``#`` comments are
ignored; ``[section]`` headers are allowed for readability but carry no
namespace. Keys are globally unique and unknown keys are rejected with the
offending line, so silent typos cannot skew a campaign.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(ValueError):
    """Raised for unparsable or out-of-range configuration input."""


@dataclass
class ScenarioConfig:
    # traffic direction under study and output naming
    name: str = "scenario"
    direction: str = "dl"                   # "dl" | "ul"

    # constellation and carrier
    altitude_km: float = 600.0
    freq_ghz: float = 2.0
    channel_bw_mhz: float = 30.0

    # satellite payload
    eirp_density_dbw_mhz: float = 34.0
    sat_gain_dbi: float = 30.0
    sat_gt_db_k: float = 1.1
    hpbw_deg: float = 4.41
    sidelobe_floor_db: float = -30.0

    # terminal
    ue_tx_power_dbm: float = 23.0
    ue_gain_dbi: float = 0.0
    ue_ant_temp_k: float = 290.0
    noise_figure_db: float = 7.0
    rx_config: str = "1x2x2"                # m x n x p

    # layout
    icd_km: float = 43.3
    frf: int = 1
    ues_per_beam: int = 10
    trxp_density_per_km2: float = 1.0 / 1415.0
    drop_mode: str = "uniform"              # "uniform" | "center" (diagnostic)

    # channel
    fading: str = "rician"                  # "rician" | "none"
    rician_k_db: float = 10.0
    shadowing_sigma_db: float = 1.79
    scintillation: str = "significant"      # "significant" | "negligible"
    scintillation_loss_db: float = 2.2

    # uplink polarization configuration
    ul_pol_config: str = "A"                # "A" | "B"

    # scheduling and link adaptation
    subbands: int = 12
    ul_alloc_subbands: int = 2              # grant granularity on the uplink
    pf_smoothing: float = 0.01
    warmup_slots: int = 100
    slots: int = 2000
    slot_ms: float = 1.0
    target_bler: float = 0.1
    harq_max_attempts: int = 4
    ladder_path: str = ""                   # empty: bundled default ladder
    ladder_efficiency: float = 0.55
    mute_interference: bool = False         # diagnostic switch

    # campaign
    seeds: tuple[int, ...] = (1, 2, 3, 4, 5)

    def validate(self) -> "ScenarioConfig":
        checks = [
            (self.direction in ("dl", "ul"), "direction must be dl or ul"),
            (self.altitude_km > 0, "altitude_km must be positive"),
            (self.freq_ghz > 0, "freq_ghz must be positive"),
            (self.channel_bw_mhz > 0, "channel_bw_mhz must be positive"),
            (self.frf in (1, 3), "frf must be 1 or 3"),
            (0 < self.hpbw_deg < 90, "hpbw_deg out of range"),
            (self.sidelobe_floor_db < 0, "sidelobe_floor_db must be negative"),
            (self.icd_km > 0, "icd_km must be positive"),
            (self.ues_per_beam >= 1, "ues_per_beam must be >= 1"),
            (self.trxp_density_per_km2 > 0, "trxp_density_per_km2 must be positive"),
            (self.drop_mode in ("uniform", "center"), "drop_mode must be uniform or center"),
            (self.fading in ("rician", "none"), "fading must be rician or none"),
            (self.shadowing_sigma_db >= 0, "shadowing_sigma_db must be >= 0"),
            (self.scintillation in ("significant", "negligible"),
             "scintillation must be significant or negligible"),
            (self.scintillation_loss_db >= 0, "scintillation_loss_db must be >= 0"),
            (self.ul_pol_config in ("A", "B"), "ul_pol_config must be A or B"),
            (self.subbands >= 1, "subbands must be >= 1"),
            (1 <= self.ul_alloc_subbands <= self.subbands,
             "ul_alloc_subbands must lie in [1, subbands]"),
            (self.subbands % self.ul_alloc_subbands == 0,
             "ul_alloc_subbands must divide subbands"),
            (0 < self.pf_smoothing <= 1, "pf_smoothing must lie in (0, 1]"),
            (self.slots >= 0, "slots must be >= 0"),
            (0 <= self.warmup_slots <= max(self.slots, 0),
             "warmup_slots must lie in [0, slots]"),
            (self.slot_ms > 0, "slot_ms must be positive"),
            (0 <= self.target_bler < 1, "target_bler must lie in [0, 1)"),
            (self.harq_max_attempts >= 1, "harq_max_attempts must be >= 1"),
            (0 < self.ladder_efficiency <= 0.75,
             "ladder_efficiency must lie in (0, 0.75]"),
            (len(self.seeds) >= 1, "need at least one seed"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        # parse-validate composite fields
        from .phy_link import RxConfig, UlPolConfig
        try:
            RxConfig.parse(self.rx_config)
        except ValueError as e:
            raise ConfigError(str(e)) from None
        return self


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ScenarioConfig)}


def _parse_value(key: str, raw: str, lineno: int):
    target = _FIELD_TYPES[key]
    raw = raw.strip()
    try:
        if key == "seeds":
            return tuple(int(s) for s in raw.replace(",", " ").split())
        if target == "bool":
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        if target == "int":
            return int(raw)
        if target == "float":
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"line {lineno}: invalid value {raw!r} for key {key!r}") from None


def parse_config(text: str, name: str | None = None) -> ScenarioConfig:
    """Parse config text into a validated ScenarioConfig."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped or (stripped.startswith("[") and stripped.endswith("]")):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key = value, got {line.rstrip()!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, raw, lineno)
    if name is not None:
        values.setdefault("name", name)
    return ScenarioConfig(**values).validate()


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    return parse_config(path.read_text(), name=path.stem)


# ---------------------------------------------------------------------------
# evaluation campaign presets
# ---------------------------------------------------------------------------

def _row(name: str, **over) -> ScenarioConfig:
    return dataclasses.replace(ScenarioConfig(name=name), **over).validate()


# Calibrated link-adaptation efficiencies for the evaluation matrix. The two
# directions carry different control overhead (PDCCH, SSB and CSI-RS on the
# downlink versus DMRS and PUCCH on the uplink), so the realized fraction of
# the attenuated-Shannon envelope differs per direction.
DL_LADDER_EFFICIENCY = 0.44
UL_LADDER_EFFICIENCY = 0.55


def paper_matrix() -> list[ScenarioConfig]:
    """The ten evaluation rows: six downlink and four uplink scenarios."""
    dl = {"direction": "dl", "ladder_efficiency": DL_LADDER_EFFICIENCY}
    ul = {"direction": "ul", "ladder_efficiency": UL_LADDER_EFFICIENCY}
    rows = [
        _row("dl_1rx_frf1", rx_config="1x1x2", frf=1, **dl),
        _row("dl_1rx_frf3", rx_config="1x1x2", frf=3, **dl),
        _row("dl_2rx_frf1", rx_config="1x2x2", frf=1, **dl),
        _row("dl_2rx_frf3", rx_config="1x2x2", frf=3, **dl),
        _row("dl_1rx_frf1_scneg", rx_config="1x1x2", frf=1,
             scintillation="negligible", **dl),
        _row("dl_1rx_frf3_scneg", rx_config="1x1x2", frf=3,
             scintillation="negligible", **dl),
        _row("ul_cfga_frf1", ul_pol_config="A", frf=1, **ul),
        _row("ul_cfga_frf3", ul_pol_config="A", frf=3, **ul),
        _row("ul_cfgb_frf1", ul_pol_config="B", frf=1, **ul),
        _row("ul_cfgb_frf3", ul_pol_config="B", frf=3, **ul),
    ]
    return rows


PRESETS = {"paper": paper_matrix}
