"""Satellite antenna pattern and per-link channel terms.

The satellite antenna is a circular-aperture (Airy) pattern

    g(theta) = g_max + 10*log10( [2*J1(ka*sin(theta)) / (ka*sin(theta))]^2 )

with the theta -> 0 limit equal to g_max and a sidelobe floor applied relative
to the peak so nulls do not produce -inf. The aperture constant ka is
calibrated so the pattern is exactly -3 dB at half the half-power beamwidth.

Large-scale and small-scale terms per link:
  * free-space path loss from slant range and carrier frequency,
  * log-normal shadow fading, frozen per UE (one satellite, so one draw per UE),
  * Rician fast fading, i.i.d. per receive element and per slot, frequency flat,
  * ionospheric scintillation as a constant loss applied to every space link.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import j1

SPEED_OF_LIGHT = 299_792_458.0          # m/s
BOLTZMANN_DBW = -228.59918449033304     # 10*log10(1.380649e-23) dBW/K/Hz
FIRST_NULL_U = 3.8317059702075125       # first zero of J1

_HALF_POWER_LIN = 10.0 ** (-0.3)        # exactly -3 dB


def _normalized_pattern(u: np.ndarray) -> np.ndarray:
    """[2*J1(u)/u]^2 with the u -> 0 limit handled exactly."""
    u = np.asarray(u, dtype=float)
    out = np.ones_like(u)
    nz = np.abs(u) > 1e-9
    uu = u[nz]
    out[nz] = (2.0 * j1(uu) / uu) ** 2
    return out


def calibrate_ka(hpbw_deg: float) -> float:
    """Aperture constant ka such that the pattern is -3 dB at hpbw/2.

    Solves [2*J1(x)/x]^2 = 10^-0.3 by bracketed root finding inside the main
    lobe, then scales by sin(hpbw/2). Converges well below 1e-6 absolute.
    """
    if not 0.0 < hpbw_deg < 90.0:
        raise ValueError(f"half-power beamwidth out of range: {hpbw_deg}")
    x = brentq(lambda v: _normalized_pattern(v) - _HALF_POWER_LIN,
               1e-9, FIRST_NULL_U, xtol=1e-12)
    return x / math.sin(math.radians(hpbw_deg / 2.0))


@dataclass(frozen=True)
class AntennaPattern:
    """Circular-aperture pattern with peak gain and sidelobe floor."""

    g_max_dbi: float
    ka: float
    hpbw_deg: float
    floor_db: float = -30.0            # relative to peak

    @classmethod
    def from_hpbw(cls, g_max_dbi: float, hpbw_deg: float,
                  floor_db: float = -30.0) -> "AntennaPattern":
        return cls(g_max_dbi, calibrate_ka(hpbw_deg), hpbw_deg, floor_db)

    def rolloff_db(self, theta_deg):
        """Pattern value relative to peak (<= 0), floored at floor_db."""
        u = self.ka * np.sin(np.radians(np.asarray(theta_deg, dtype=float)))
        val = _normalized_pattern(u)
        with np.errstate(divide="ignore"):
            db = 10.0 * np.log10(val)
        return np.maximum(db, self.floor_db)

    def gain_dbi(self, theta_deg):
        return self.g_max_dbi + self.rolloff_db(theta_deg)


def free_space_path_loss_db(slant_range_km, freq_ghz: float):
    """20*log10(4*pi*d*f/c) for d in km and f in GHz."""
    d_m = np.asarray(slant_range_km, dtype=float) * 1e3
    f_hz = freq_ghz * 1e9
    return 20.0 * np.log10(4.0 * math.pi * d_m * f_hz / SPEED_OF_LIGHT)


def thermal_noise_dbw(bandwidth_hz: float, noise_figure_db: float = 0.0,
                      temperature_k: float = 290.0) -> float:
    """Noise power over a bandwidth for an antenna-temperature-plus-NF front end."""
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    return (BOLTZMANN_DBW + 10.0 * math.log10(temperature_k * bandwidth_hz)
            + noise_figure_db)


def receiver_noise_from_gt_dbw(bandwidth_hz: float, g_over_t_db_k: float,
                               g_max_dbi: float) -> float:
    """Noise power at a receiver specified through its G/T figure.

    The system noise temperature follows from T = g_max - G/T (in dB), which
    keeps the G/T budget exact at boresight while the pattern handles the
    off-boresight gain variation.
    """
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth must be positive")
    t_sys_dbk = g_max_dbi - g_over_t_db_k
    return BOLTZMANN_DBW + t_sys_dbk + 10.0 * math.log10(bandwidth_hz)


# ---------------------------------------------------------------------------
# stochastic terms
# ---------------------------------------------------------------------------

def rician_fading_db(k_db: float, size, rng: np.random.Generator) -> np.ndarray:
    """Power (dB) of unit-mean Rician fading draws.

    h = sqrt(K/(K+1)) + CN(0, 1/(K+1)), so E|h|^2 = 1 and K -> inf gives 0 dB.
    """
    k = 10.0 ** (k_db / 10.0)
    los = math.sqrt(k / (k + 1.0))
    sigma = math.sqrt(1.0 / (2.0 * (k + 1.0)))
    re = los + sigma * rng.standard_normal(size)
    im = sigma * rng.standard_normal(size)
    return 10.0 * np.log10(re * re + im * im)


def shadowing_db(sigma_db: float, size, rng: np.random.Generator) -> np.ndarray:
    """Zero-mean log-normal shadow fading in dB."""
    if sigma_db < 0:
        raise ValueError("shadowing sigma must be >= 0")
    return sigma_db * rng.standard_normal(size)


def link_rng(seed: int, ue_id: int, beam_id: int, slot: int) -> np.random.Generator:
    """Deterministic per-link, per-slot random stream."""
    return np.random.default_rng(np.random.SeedSequence((seed, ue_id, beam_id, slot)))


@dataclass(frozen=True)
class ChannelRealization:
    """All channel terms of one link in one slot, ready to sum in dB."""

    path_loss_db: float
    shadowing_db: float
    fast_fading_db: np.ndarray          # one entry per receive element
    scintillation_db: float

    def total_loss_db(self, element: int = 0) -> float:
        return (self.path_loss_db + self.shadowing_db
                - float(self.fast_fading_db[element]) + self.scintillation_db)


def draw_channel(slant_range_km: float, freq_ghz: float, *,
                 elements: int = 1,
                 fading: str = "rician",
                 rician_k_db: float = 10.0,
                 shadow_sigma_db: float = 1.79,
                 scintillation_loss_db: float = 0.0,
                 rng: np.random.Generator) -> ChannelRealization:
    """Draw one link realization.

    fading "none" gives 0 dB fast fading on every element; shadowing sigma 0
    gives 0 dB shadowing, so the degenerate configuration reduces the total
    loss to path loss exactly.
    """
    if fading not in ("rician", "none"):
        raise ValueError(f"unknown fading mode {fading!r}")
    pl = float(free_space_path_loss_db(slant_range_km, freq_ghz))
    sh = float(shadowing_db(shadow_sigma_db, (), rng)) if shadow_sigma_db > 0 else 0.0
    if fading == "rician":
        ff = rician_fading_db(rician_k_db, elements, rng)
    else:
        ff = np.zeros(elements)
    return ChannelRealization(pl, sh, ff, scintillation_loss_db)
