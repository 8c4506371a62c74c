"""End-to-end requirement checks for the evaluation matrix.

The session-scoped fixture runs the complete ten-scenario preset through the
real CLI (five seeds, 2000 slots each, single process) and the tests assert
requirement verdicts, cross-scenario orderings and a +-30% regression band
against the tabulated reference results. The band acknowledges the simplified
fading and scintillation models; entries the pinned antenna and interference
models cannot reach are asserted at face value anyway, so a red entry here
documents a model limit instead of hiding it behind a loosened tolerance.

Tests that need the full campaign are marked ``campaign``; everything else
runs in seconds (``pytest -m "not campaign"``).
"""

import dataclasses
import json
import math
import time
from types import SimpleNamespace

import numpy as np
import pytest

from ntnsim.channel import FIRST_NULL_U, AntennaPattern
from ntnsim.cli import main as cli_main
from ntnsim.config import ScenarioConfig, paper_matrix
from ntnsim.kpi import evaluate
from ntnsim.mac_sched import DropResult, build_state, run_drop
from ntnsim.geometry import build_beam_layout
from ntnsim.phy_link import assign_colors, mrc_combine_db

W = 30e6

# Tabulated reference evaluation (5th-pct user rate Mb/s, 5th-pct user SE,
# average cell SE, area capacity kb/s/km2) used as a +-30% regression band.
REFERENCE_RESULTS = {
    "dl_1rx_frf1":       (0.62, 0.021, 0.36, 7.6),
    "dl_1rx_frf3":       (0.77, 0.026, 0.39, 8.3),
    "dl_2rx_frf1":       (1.20, 0.040, 0.64, 13.6),
    "dl_2rx_frf3":       (1.15, 0.038, 0.56, 11.8),
    "dl_1rx_frf1_scneg": (0.64, 0.021, 0.36, 7.7),
    "dl_1rx_frf3_scneg": (0.81, 0.027, 0.41, 8.6),
    "ul_cfga_frf1":      (0.16, 0.0052, 0.16, 3.4),
    "ul_cfga_frf3":      (0.19, 0.0064, 0.18, 3.8),
    "ul_cfgb_frf1":      (0.23, 0.0077, 0.23, 4.8),
    "ul_cfgb_frf3":      (0.32, 0.011, 0.26, 5.4),
}

KPI_KEYS = {
    "user_rate": "user_rate_5th_mbps",
    "user_se": "user_se_5th_bps_hz",
    "cell_se": "avg_cell_se_bps_hz",
    "area_capacity": "area_capacity_kbps_km2",
}

ROWS = {c.name: c for c in paper_matrix()}


@pytest.fixture(scope="session")
def campaign(tmp_path_factory):
    """One full run of the evaluation preset through the CLI."""
    out = tmp_path_factory.mktemp("campaign")
    t0 = time.perf_counter()
    rc = cli_main(["campaign", "--preset", "paper", "--out", str(out)])
    wall_s = time.perf_counter() - t0
    assert rc in (0, 1)
    summaries = {
        name: json.loads((out / name / "summary.json").read_text())
        for name in REFERENCE_RESULTS
    }
    return SimpleNamespace(out=out, wall_s=wall_s, summaries=summaries)


@pytest.fixture(scope="module")
def full_horizon_drops():
    """One downlink and one uplink drop at the full 2000-slot horizon."""
    dl = run_drop(ROWS["dl_1rx_frf1"], 1)
    ul = run_drop(ROWS["ul_cfga_frf1"], 1)
    return dl, ul


def quiet_cfg(**kw):
    base = dict(drop_mode="center", ues_per_beam=1, mute_interference=True,
                fading="none", shadowing_sigma_db=0.0,
                scintillation="negligible", rx_config="1x1x2")
    base.update(kw)
    return ScenarioConfig(**base)


# ---------------------------------------------------------------------------
# KPI identities
# ---------------------------------------------------------------------------

@pytest.mark.campaign
def test_reported_rate_is_bandwidth_times_tail_se(campaign):
    for name, s in campaign.summaries.items():
        expect = s["user_se_5th_bps_hz"] * 30.0
        assert s["user_rate_5th_mbps"] == pytest.approx(expect, rel=1e-9), name


@pytest.mark.campaign
def test_reported_area_capacity_identity(campaign):
    rho = 1.0 / 1415.0
    for name, s in campaign.summaries.items():
        expect = rho * W * s["avg_cell_se_bps_hz"] / 1e3
        assert s["area_capacity_kbps_km2"] == pytest.approx(expect, rel=1e-9), name


def test_kpi_consistency_anchor_values():
    # cell SE 0.36 over a 1/1415 km^2 TRxP grid and 30 MHz -> ~7.6 kb/s/km2,
    # and a 0.040 b/s/Hz user tail -> 1.20 Mb/s
    n = 40
    res = DropResult(seed=1, duration_s=1.0,
                     ue_bits=np.full(n, 0.040 * W),
                     cell_bits=np.array([0.36 * W, 0.36 * W]),
                     stat_ues=np.arange(n), stat_beams=np.arange(2),
                     serving=np.repeat(np.arange(2), n // 2))
    kpis = evaluate(ScenarioConfig(), [res])
    assert kpis.user_rate_5th_mbps == pytest.approx(1.20, abs=0.005)
    assert kpis.area_capacity_kbps_km2 == pytest.approx(7.6, abs=0.05)


# ---------------------------------------------------------------------------
# link budgets, antenna, geometry, combining
# ---------------------------------------------------------------------------

def test_link_budget_oracles_clean_channel():
    t0 = time.perf_counter()
    dl_state = build_state(quiet_cfg(), 1)
    dl = dl_state.dl_link_sample(0)
    ul_state = build_state(quiet_cfg(direction="ul", ul_pol_config="A"), 1)
    ul = ul_state.ul_link_sample(0, allocated_subbands=12)
    wall = time.perf_counter() - t0
    assert dl.interference_dbw == -math.inf
    assert dl.sinr_db == pytest.approx(16.9, abs=0.2)
    assert ul.sinr_db == pytest.approx(-9.1, abs=0.2)
    assert wall < 1.0


def test_antenna_pattern_requirements():
    pattern = AntennaPattern.from_hpbw(30.0, 4.41)
    assert pattern.gain_dbi(0.0) == 30.0
    assert pattern.gain_dbi(4.41 / 2.0) == pytest.approx(27.0, abs=0.01)
    first_null_deg = math.degrees(math.asin(FIRST_NULL_U / pattern.ka))
    angles = np.linspace(0.0, first_null_deg, 1000)
    gains = pattern.gain_dbi(angles)
    assert np.all(np.diff(gains) <= 1e-12)


def test_beam_counts_and_reuse3_coloring():
    assert build_beam_layout(1).n_beams == 61
    layout = assign_colors(build_beam_layout(3))
    assert layout.n_beams == 127
    assert len(layout.statistics_ids()) == 19
    assert len(build_beam_layout(1).statistics_ids()) == 19

    centers = layout.centers()
    colors = layout.freq_colors()
    diff = centers[:, None, :] - centers[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    adjacent = (dist > 0.0) & (dist < 1.05 * 43.3)
    same_color = colors[:, None] == colors[None, :]
    assert np.count_nonzero(adjacent & same_color) == 0


def test_mrc_and_polarization_gains():
    one = mrc_combine_db(np.array([1.0]))
    two = mrc_combine_db(np.array([1.0, 1.0]))
    assert two - one == pytest.approx(10.0 * math.log10(2.0), abs=1e-12)

    cfg_a = ScenarioConfig(direction="ul", ul_pol_config="A")
    cfg_b = dataclasses.replace(cfg_a, ul_pol_config="B")
    state_a = build_state(cfg_a, 11)
    state_b = build_state(cfg_b, 11)
    gain = state_b.ul_rx_dbw - state_a.ul_rx_dbw
    assert np.max(np.abs(gain - 3.0)) <= 1e-9


# ---------------------------------------------------------------------------
# scintillation mechanism
# ---------------------------------------------------------------------------

def _scintillation_removal_gain_db(frf: int) -> float:
    base = quiet_cfg(frf=frf, mute_interference=False,
                     scintillation="significant")
    on = build_state(base, 7)
    off = build_state(dataclasses.replace(base, scintillation="negligible"), 7)
    ue = int(np.flatnonzero(on.serving == 0)[0])
    return off.dl_link_sample(ue).sinr_db - on.dl_link_sample(ue).sinr_db


def test_scintillation_immaterial_when_interference_dominated():
    assert abs(_scintillation_removal_gain_db(1)) < 0.3


def test_scintillation_gain_when_noise_dominated():
    # with reuse-3 the co-color beams sit far enough out that the link is
    # claimed noise-dominated, making the common scintillation term matter
    assert 1.5 <= _scintillation_removal_gain_db(3) <= 2.2


@pytest.mark.campaign
def test_scintillation_pooled_ordering(campaign):
    def gain(row):
        base = campaign.summaries[row]["avg_cell_se_bps_hz"]
        neg = campaign.summaries[row + "_scneg"]["avg_cell_se_bps_hz"]
        return (neg - base) / base

    reuse1, reuse3 = gain("dl_1rx_frf1"), gain("dl_1rx_frf3")
    assert reuse3 > 0.0
    assert reuse3 > reuse1
    assert abs(reuse1) < 0.02       # reuse-1 essentially unchanged


# ---------------------------------------------------------------------------
# requirement verdicts and orderings on the full matrix
# ---------------------------------------------------------------------------

@pytest.mark.campaign
def test_single_antenna_downlink_misses_requirements(campaign):
    for row in ("dl_1rx_frf1", "dl_1rx_frf3"):
        verdicts = campaign.summaries[row]["verdicts"]
        assert verdicts["user_rate_mbps"] == "FAIL", row
        assert verdicts["user_se"] == "FAIL", row
        assert verdicts["avg_cell_se"] == "FAIL", row
    frf3 = campaign.summaries["dl_1rx_frf3"]["verdicts"]
    assert frf3["area_capacity_kbps_km2"] == "PASS"


@pytest.mark.campaign
def test_dual_antenna_downlink_meets_all_requirements(campaign):
    for row in ("dl_2rx_frf1", "dl_2rx_frf3"):
        assert campaign.summaries[row]["passed"] is True, row


@pytest.mark.campaign
def test_reuse1_beats_reuse3_on_cell_se_with_two_antennas(campaign):
    frf1 = campaign.summaries["dl_2rx_frf1"]["avg_cell_se_bps_hz"]
    frf3 = campaign.summaries["dl_2rx_frf3"]["avg_cell_se_bps_hz"]
    assert frf1 > frf3


@pytest.mark.campaign
def test_uplink_meets_all_requirements(campaign):
    for row in ("ul_cfga_frf1", "ul_cfga_frf3", "ul_cfgb_frf1", "ul_cfgb_frf3"):
        assert campaign.summaries[row]["passed"] is True, row


@pytest.mark.campaign
def test_dual_polarization_uplink_beats_single_on_every_kpi(campaign):
    for frf in (1, 3):
        a = campaign.summaries[f"ul_cfga_frf{frf}"]
        b = campaign.summaries[f"ul_cfgb_frf{frf}"]
        for key in KPI_KEYS.values():
            assert b[key] > a[key], (frf, key)


@pytest.mark.campaign
def test_single_antenna_reuse3_beats_reuse1_on_user_rate(campaign):
    frf1 = campaign.summaries["dl_1rx_frf1"]["user_rate_5th_mbps"]
    frf3 = campaign.summaries["dl_1rx_frf3"]["user_rate_5th_mbps"]
    assert frf3 > frf1


@pytest.mark.campaign
def test_full_matrix_completes_within_ten_minutes(campaign):
    assert campaign.wall_s < 600.0


@pytest.mark.campaign
@pytest.mark.parametrize("row", sorted(REFERENCE_RESULTS))
@pytest.mark.parametrize("kpi", sorted(KPI_KEYS))
def test_reference_band(campaign, row, kpi):
    by_name = dict(zip(("user_rate", "user_se", "cell_se", "area_capacity"),
                       REFERENCE_RESULTS[row]))
    got = campaign.summaries[row][KPI_KEYS[kpi]]
    ratio = got / by_name[kpi]
    assert 0.70 <= ratio <= 1.30, f"{row} {kpi}: {got:.4g} vs {by_name[kpi]:.4g}"


# ---------------------------------------------------------------------------
# scheduler properties and determinism
# ---------------------------------------------------------------------------

def test_bits_are_conserved_exactly(full_horizon_drops):
    for res in full_horizon_drops:
        for beam in res.stat_beams:
            ues = np.flatnonzero(res.serving == beam)
            assert res.cell_bits[beam] == res.ue_bits[ues].sum()
        outside = np.setdiff1d(np.arange(len(res.cell_bits)), res.stat_beams)
        assert np.all(res.cell_bits[outside] == 0.0)


def test_no_ue_is_starved_over_full_horizon(full_horizon_drops):
    for res in full_horizon_drops:
        assert np.all(res.ue_bits[res.stat_ues] > 0.0)


def test_symmetric_ues_get_equal_shares():
    cfg = ScenarioConfig(drop_mode="center", ues_per_beam=10,
                         mute_interference=True, rx_config="1x1x2",
                         shadowing_sigma_db=0.0,
                         slots=2000, warmup_slots=100)
    res = run_drop(cfg, 5)
    beam = int(res.stat_beams[0])
    ues = np.flatnonzero(res.serving == beam)
    shares = res.ue_bits[ues] / res.ue_bits[ues].sum()
    assert np.all(np.abs(shares - 0.1) / 0.1 <= 0.10)


def test_same_config_and_seed_reproduce_summary_bytes(tmp_path):
    args = ["campaign", "--only", "dl_2rx_frf1", "--slots", "300",
            "--seeds", "1"]
    cli_main(args + ["--out", str(tmp_path / "a")])
    cli_main(args + ["--out", str(tmp_path / "b")])
    a = (tmp_path / "a" / "dl_2rx_frf1" / "summary.json").read_bytes()
    b = (tmp_path / "b" / "dl_2rx_frf1" / "summary.json").read_bytes()
    assert a == b
