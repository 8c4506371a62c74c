"""Frequency plan, beam coloring, UE attachment and link-level SINR.

Downlink: each beam radiates its full per-beam band at a fixed EIRP density;
a UE sees the serving beam at its off-boresight pattern gain and every other
co-frequency beam as noise-like interference. The UE combines its receive
elements by maximum-ratio combining, modelled as n times the mean per-element
SINR. Two receive polarizations capture the full circularly polarized signal,
so no depolarization loss applies on the downlink.

Uplink: a UE spreads its fixed transmit power over whatever bandwidth it is
granted, which is what makes narrow grants attractive at these link budgets.
The satellite receives through the same aperture pattern; its noise floor
follows from the G/T figure. With polarization configuration A each beam is
assigned one circular polarization and a single-polarization UE loses 3 dB,
but only co-polarized co-frequency beams interfere; with configuration B there
is no polarization reuse, no 3 dB loss, and every co-frequency beam interferes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import (
    AntennaPattern,
    free_space_path_loss_db,
    receiver_noise_from_gt_dbw,
    rician_fading_db,
    shadowing_db,
    thermal_noise_dbw,
)
from .geometry import BeamLayout, off_boresight_deg, slant_range_km

RHCP, LHCP = "RHCP", "LHCP"


@dataclass(frozen=True)
class FrequencyPlan:
    """Split of the channel into per-beam colors and scheduling subbands."""

    channel_bw_hz: float
    colors: int
    subbands: int

    def __post_init__(self):
        if self.colors not in (1, 3):
            raise ValueError("reuse factor must be 1 or 3")
        if self.subbands < 1:
            raise ValueError("need at least one subband")

    @property
    def beam_bw_hz(self) -> float:
        return self.channel_bw_hz / self.colors

    @property
    def subband_hz(self) -> float:
        return self.beam_bw_hz / self.subbands


@dataclass(frozen=True)
class RxConfig:
    """UE antenna configuration (m, n, p): panels, elements, polarizations."""

    m: int
    n: int
    p: int

    _ALLOWED = ((1, 1, 2), (1, 2, 2))

    def __post_init__(self):
        if (self.m, self.n, self.p) not in self._ALLOWED:
            raise ValueError(f"unsupported rx configuration {(self.m, self.n, self.p)}")

    @classmethod
    def parse(cls, text: str) -> "RxConfig":
        parts = text.lower().replace(" ", "").split("x")
        if len(parts) != 3:
            raise ValueError(f"rx configuration must look like 1x2x2, got {text!r}")
        return cls(*(int(p) for p in parts))

    @property
    def elements(self) -> int:
        """Number of MRC-combined elements."""
        return self.n

    @property
    def depolarization_loss_db(self) -> float:
        """Dual-polarization reception recovers the circularly polarized signal."""
        return 0.0 if self.p == 2 else 3.0


@dataclass(frozen=True)
class UlPolConfig:
    """Uplink polarization configuration A or B."""

    variant: str

    def __post_init__(self):
        if self.variant not in ("A", "B"):
            raise ValueError(f"uplink polarization configuration must be A or B")

    @property
    def pol_loss_db(self) -> float:
        return 3.0 if self.variant == "A" else 0.0

    @property
    def uses_pol_reuse(self) -> bool:
        return self.variant == "A"


@dataclass(frozen=True)
class LinkSample:
    """One SINR evaluation with its budget terms, all in dB(W)."""

    ue_id: int
    direction: str              # "dl" or "ul"
    subband: int
    signal_dbw: float
    interference_dbw: float     # -inf when no interferer is active
    noise_dbw: float
    sinr_db: float


def combine_sinr_db(signal_dbw: float, interference_dbw: float,
                    noise_dbw: float) -> float:
    """SINR from budget terms; interference may be -inf (muted)."""
    i_lin = 0.0 if interference_dbw == -math.inf else 10.0 ** (interference_dbw / 10.0)
    n_lin = 10.0 ** (noise_dbw / 10.0)
    return signal_dbw - 10.0 * math.log10(i_lin + n_lin)


def mrc_combine_db(per_element_sinr_lin: np.ndarray) -> float:
    """MRC output SINR: n times the mean per-element SINR."""
    arr = np.asarray(per_element_sinr_lin, dtype=float)
    if arr.size == 0:
        raise ValueError("need at least one element")
    return 10.0 * math.log10(arr.size * float(arr.mean()))


# ---------------------------------------------------------------------------
# coloring and attachment
# ---------------------------------------------------------------------------

def assign_colors(layout: BeamLayout) -> BeamLayout:
    """Assign frequency colors and polarization colors to all beams in place.

    Reuse 3 colors the lattice by (q - r) mod 3, which is a proper hex
    3-coloring (no two adjacent beams share a color). Polarization alternates
    by lattice row, the closest a 6-neighbour lattice gets to a checkerboard.
    """
    for beam in layout.beams:
        beam.freq_color = (beam.q - beam.r) % 3 if layout.frf == 3 else 0
        beam.pol_color = RHCP if beam.r % 2 == 0 else LHCP
    return layout


def attachment_gains_db(positions: np.ndarray, layout: BeamLayout,
                        pattern: AntennaPattern) -> np.ndarray:
    """(n_ue, n_beams) satellite pattern gain minus path loss toward each UE.

    Path loss per UE is beam-independent (single satellite) but is included so
    the attachment metric is the actual average received power.
    """
    theta = off_boresight_deg(positions, layout.centers(), layout.sat_altitude_km)
    gain = pattern.gain_dbi(theta)
    fspl = free_space_path_loss_db(slant_range_km(positions, layout.sat_altitude_km),
                                   freq_ghz=2.0)  # any carrier: common per UE
    return gain - fspl[:, None]


def attach(gain_db: np.ndarray) -> np.ndarray:
    """Serving beam per UE: strongest average RX power, ties to lowest beam id."""
    return np.argmax(gain_db, axis=1)


# ---------------------------------------------------------------------------
# per-drop large-scale state and the vectorized SINR engines
# ---------------------------------------------------------------------------

class LinkState:
    """Large-scale quantities of one drop, shared by the DL and UL engines.

    Everything that does not change slot to slot is precomputed here:
    pattern gains between every UE and every beam, path losses, frozen
    shadowing, serving beams, color masks and interference beam lists.
    """

    def __init__(self, cfg, layout: BeamLayout, positions: np.ndarray,
                 home_beam: np.ndarray, rng: np.random.Generator):
        self.cfg = cfg
        self.layout = layout
        self.positions = positions
        self.home_beam = home_beam
        self.n_ue = len(positions)
        self.n_beams = layout.n_beams

        self.pattern = AntennaPattern.from_hpbw(
            cfg.sat_gain_dbi, cfg.hpbw_deg, cfg.sidelobe_floor_db)
        self.plan = FrequencyPlan(cfg.channel_bw_mhz * 1e6, cfg.frf, cfg.subbands)
        self.rx = RxConfig.parse(cfg.rx_config)
        self.ul_pol = UlPolConfig(cfg.ul_pol_config)

        centers = layout.centers()
        theta = off_boresight_deg(positions, centers, layout.sat_altitude_km)
        self.gain_db = self.pattern.gain_dbi(theta)          # (n_ue, n_beams)
        self.fspl_db = free_space_path_loss_db(
            slant_range_km(positions, layout.sat_altitude_km), cfg.freq_ghz)
        if cfg.shadowing_sigma_db > 0:
            self.shadow_db = shadowing_db(cfg.shadowing_sigma_db, self.n_ue, rng)
        else:
            self.shadow_db = np.zeros(self.n_ue)
        self.scint_db = (cfg.scintillation_loss_db
                         if cfg.scintillation == "significant" else 0.0)

        self.serving = attach(self.gain_db - self.fspl_db[:, None])
        self.freq_color = layout.freq_colors()
        self.pol_color = layout.pol_colors()
        self.stat_beams = layout.statistics_ids()

        self.ues_of_beam = [np.flatnonzero(self.serving == b)
                            for b in range(self.n_beams)]
        self.active_beam = np.array([len(u) > 0 for u in self.ues_of_beam])

        # beams interfering with beam b: co-frequency, active, not b itself;
        # uplink additionally restricted to the same polarization under reuse
        self.dl_interferers = []
        self.ul_interferers = []
        for b in range(self.n_beams):
            co = (self.freq_color == self.freq_color[b]) & self.active_beam
            co[b] = False
            self.dl_interferers.append(np.flatnonzero(co))
            if self.ul_pol.uses_pol_reuse:
                co = co & (self.pol_color == self.pol_color[b])
            self.ul_interferers.append(np.flatnonzero(co))

        if cfg.mute_interference:
            self.dl_interferers = [np.empty(0, dtype=int) for _ in range(self.n_beams)]
            self.ul_interferers = [np.empty(0, dtype=int) for _ in range(self.n_beams)]

        # --- downlink large-scale coefficients -------------------------------
        # received per-subband power = EIRP density * subband width, reduced by
        # the pattern rolloff toward the UE, path loss and per-UE losses
        eirp_sub_dbw = (cfg.eirp_density_dbw_mhz
                        + 10.0 * math.log10(self.plan.subband_hz / 1e6))
        rx_loss = (self.fspl_db + self.shadow_db + self.scint_db
                   + self.rx.depolarization_loss_db - cfg.ue_gain_dbi)
        rolloff = self.gain_db - cfg.sat_gain_dbi
        self.dl_rx_dbw = eirp_sub_dbw + rolloff - rx_loss[:, None]  # (n_ue, n_beams)
        self.dl_noise_sub_dbw = thermal_noise_dbw(
            self.plan.subband_hz, cfg.noise_figure_db, cfg.ue_ant_temp_k)

        # --- uplink large-scale coefficients ---------------------------------
        # per-subband received power at beam b for a UE holding m subbands:
        # (P_tx - 10log10(m)) + gain(u, b) - fspl - losses
        ptx_dbw = cfg.ue_tx_power_dbm - 30.0
        ul_loss = (self.fspl_db + self.shadow_db + self.scint_db
                   + self.ul_pol.pol_loss_db - cfg.ue_gain_dbi)
        self.ul_rx_dbw = ptx_dbw + self.gain_db - ul_loss[:, None]  # (n_ue, n_beams)
        self.ul_noise_sub_dbw = receiver_noise_from_gt_dbw(
            self.plan.subband_hz, cfg.sat_gt_db_k, cfg.sat_gain_dbi)

    # -- single-link evaluations (used by tests and small diagnostics) -------

    def dl_link_sample(self, ue: int, subband: int = 0,
                       fading_db: np.ndarray | None = None) -> LinkSample:
        """Downlink budget for one UE on one subband, MRC over elements.

        fading_db has shape (n_interferers + 1, elements); row 0 is the
        serving link. None means no fast fading (0 dB everywhere).
        """
        b = self.serving[ue]
        inter = self.dl_interferers[b]
        n_el = self.rx.elements
        if fading_db is None:
            fading_db = np.zeros((len(inter) + 1, n_el))
        sig_lin = 10.0 ** ((self.dl_rx_dbw[ue, b] + fading_db[0]) / 10.0)
        if len(inter):
            int_lin = (10.0 ** ((self.dl_rx_dbw[ue, inter, None]
                                 + fading_db[1:]) / 10.0)).sum(axis=0)
            int_dbw = 10.0 * math.log10(float(int_lin.mean()))
        else:
            int_lin = np.zeros(n_el)
            int_dbw = -math.inf
        noise_lin = 10.0 ** (self.dl_noise_sub_dbw / 10.0)
        per_el = sig_lin / (int_lin + noise_lin)
        sinr = mrc_combine_db(per_el)
        return LinkSample(ue, "dl", subband,
                          float(10.0 * np.log10(sig_lin.mean())), int_dbw,
                          self.dl_noise_sub_dbw, sinr)

    def ul_link_sample(self, ue: int, allocated_subbands: int,
                       subband: int = 0,
                       interferer_rx_dbw: np.ndarray | None = None) -> LinkSample:
        """Uplink budget for one UE spreading its power over a grant."""
        if allocated_subbands < 1 or allocated_subbands > self.plan.subbands:
            raise ValueError("allocation outside the beam band")
        b = self.serving[ue]
        sig = self.ul_rx_dbw[ue, b] - 10.0 * math.log10(allocated_subbands)
        if interferer_rx_dbw is None or len(interferer_rx_dbw) == 0:
            int_dbw = -math.inf
        else:
            int_dbw = 10.0 * math.log10(
                float(np.sum(10.0 ** (np.asarray(interferer_rx_dbw) / 10.0))))
        sinr = combine_sinr_db(sig, int_dbw, self.ul_noise_sub_dbw)
        return LinkSample(ue, "ul", subband, sig, int_dbw,
                          self.ul_noise_sub_dbw, sinr)

    # -- vectorized downlink SINR for the statistics UEs ----------------------

    def dl_stat_arrays(self):
        """Precompute padded signal/interference coefficient arrays.

        Returns (stat_ues, sig_lin, int_lin) where int_lin is zero-padded
        (n_stat, max_interferers) and rows follow stat_ues order.
        """
        stat_ues = np.flatnonzero(np.isin(self.serving, self.stat_beams))
        sig_lin = 10.0 ** (self.dl_rx_dbw[stat_ues, self.serving[stat_ues]] / 10.0)
        lists = [self.dl_interferers[self.serving[u]] for u in stat_ues]
        width = max((len(l) for l in lists), default=0)
        int_lin = np.zeros((len(stat_ues), width))
        for i, (u, l) in enumerate(zip(stat_ues, lists)):
            if len(l):
                int_lin[i, : len(l)] = 10.0 ** (self.dl_rx_dbw[u, l] / 10.0)
        return stat_ues, sig_lin, int_lin

    def dl_slot_sinr_db(self, sig_lin, int_lin, rng: np.random.Generator | None):
        """Combined MRC SINR (dB) per statistics UE for one slot.

        rng None means fading disabled. Fading is drawn i.i.d. per element for
        the serving link and for every interfering beam (independent
        realizations per element, so MRC also averages interference).
        """
        n_el = self.rx.elements
        noise = 10.0 ** (self.dl_noise_sub_dbw / 10.0)
        if rng is None:
            per_el = sig_lin / (int_lin.sum(axis=1) + noise)
            return 10.0 * np.log10(n_el * per_el)
        k_db = self.cfg.rician_k_db
        f_sig = 10.0 ** (rician_fading_db(k_db, (len(sig_lin), n_el), rng) / 10.0)
        f_int = 10.0 ** (rician_fading_db(k_db, int_lin.shape + (n_el,), rng) / 10.0)
        s = sig_lin[:, None] * f_sig
        i = np.einsum("uj,uje->ue", int_lin, f_int)
        per_el = s / (i + noise)
        return 10.0 * np.log10(n_el * per_el.mean(axis=1))
