"""KPI reduction and verdicts.

All spectral efficiencies are normalized by the full channel bandwidth (not
the per-beam color bandwidth), so reuse-3 scenarios pay their 1/3 bandwidth
cost in the reported numbers. Per-UE rate is channel bandwidth times user SE,
and area traffic capacity is TRxP density times channel bandwidth times the
average cell SE. Multiple seeds pool by concatenating user and cell samples.

The 5th percentile uses linear interpolation between order statistics (the
numpy default), and at least 20 samples are required before the tail statistic
is considered meaningful.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import ScenarioConfig
from .mac_sched import DropResult

MIN_TAIL_SAMPLES = 20


@dataclass(frozen=True)
class RequirementSet:
    """Minimum KPI levels; a scenario passes when every metric is >= these."""

    user_rate_mbps: float
    user_se: float
    avg_cell_se: float
    area_capacity_kbps_km2: float


DEFAULT_REQUIREMENTS = {
    "dl": RequirementSet(1.0, 0.03, 0.5, 8.0),
    "ul": RequirementSet(0.1, 0.003, 0.1, 1.5),
}


def user_se_samples(result: DropResult, ref_bw_hz: float) -> np.ndarray:
    """Per-UE spectral efficiency over the statistics window."""
    if result.duration_s <= 0.0:
        raise ValueError("drop has an empty statistics window")
    return result.ue_bits[result.stat_ues] / (result.duration_s * ref_bw_hz)


def cell_se_samples(result: DropResult, ref_bw_hz: float) -> np.ndarray:
    """Per-cell spectral efficiency over the statistics window."""
    if result.duration_s <= 0.0:
        raise ValueError("drop has an empty statistics window")
    return result.cell_bits[result.stat_beams] / (result.duration_s * ref_bw_hz)


def percentile_5(samples: np.ndarray) -> float:
    """Linear-interpolation 5th percentile; needs MIN_TAIL_SAMPLES samples."""
    arr = np.asarray(samples, dtype=float)
    if arr.size < MIN_TAIL_SAMPLES:
        raise ValueError(
            f"need at least {MIN_TAIL_SAMPLES} samples for a 5th percentile, "
            f"got {arr.size}")
    return float(np.percentile(arr, 5.0, method="linear"))


@dataclass
class ScenarioKpis:
    """Pooled KPIs and verdicts for one scenario across its seeds."""

    name: str
    direction: str
    seeds: tuple[int, ...]
    n_user_samples: int
    n_cell_samples: int
    user_se_5th: float
    user_rate_5th_mbps: float
    avg_cell_se: float
    area_capacity_kbps_km2: float
    user_se: np.ndarray          # pooled per-UE samples
    requirements: RequirementSet
    verdicts: dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())


def evaluate(cfg: ScenarioConfig, results: list[DropResult],
             requirements: RequirementSet | None = None) -> ScenarioKpis:
    """Pool drop results for one scenario and judge them."""
    if not results:
        raise ValueError("no drop results to evaluate")
    ref_bw_hz = cfg.channel_bw_mhz * 1e6
    user_se = np.concatenate([user_se_samples(r, ref_bw_hz) for r in results])
    cell_se = np.concatenate([cell_se_samples(r, ref_bw_hz) for r in results])
    se5 = percentile_5(user_se)
    rate5 = se5 * ref_bw_hz / 1e6
    avg_cell = float(cell_se.mean())
    area = cfg.trxp_density_per_km2 * ref_bw_hz * avg_cell / 1e3
    req = requirements or DEFAULT_REQUIREMENTS[cfg.direction]
    verdicts = {
        "user_rate_mbps": rate5 >= req.user_rate_mbps,
        "user_se": se5 >= req.user_se,
        "avg_cell_se": avg_cell >= req.avg_cell_se,
        "area_capacity_kbps_km2": area >= req.area_capacity_kbps_km2,
    }
    return ScenarioKpis(
        name=cfg.name, direction=cfg.direction,
        seeds=tuple(r.seed for r in results),
        n_user_samples=int(user_se.size), n_cell_samples=int(cell_se.size),
        user_se_5th=se5, user_rate_5th_mbps=rate5, avg_cell_se=avg_cell,
        area_capacity_kbps_km2=area, user_se=user_se,
        requirements=req, verdicts=verdicts)


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def _fmt(value: float) -> str:
    """Shortest exact decimal form, so reruns are byte-identical."""
    return repr(float(value))


def summary_dict(kpis: ScenarioKpis) -> dict:
    req = kpis.requirements
    return {
        "scenario": kpis.name,
        "direction": kpis.direction,
        "seeds": list(kpis.seeds),
        "n_user_samples": kpis.n_user_samples,
        "n_cell_samples": kpis.n_cell_samples,
        "user_se_5th_bps_hz": kpis.user_se_5th,
        "user_rate_5th_mbps": kpis.user_rate_5th_mbps,
        "avg_cell_se_bps_hz": kpis.avg_cell_se,
        "area_capacity_kbps_km2": kpis.area_capacity_kbps_km2,
        "requirements": {
            "user_rate_mbps": req.user_rate_mbps,
            "user_se": req.user_se,
            "avg_cell_se": req.avg_cell_se,
            "area_capacity_kbps_km2": req.area_capacity_kbps_km2,
        },
        "verdicts": {k: ("PASS" if v else "FAIL")
                     for k, v in sorted(kpis.verdicts.items())},
        "passed": kpis.passed,
    }


def write_scenario_outputs(kpis: ScenarioKpis, outdir: Path,
                           ref_bw_hz: float) -> None:
    """summary.json, the two CDF csv files and a verdict listing."""
    outdir.mkdir(parents=True, exist_ok=True)
    text = json.dumps(summary_dict(kpis), indent=2, sort_keys=True) + "\n"
    (outdir / "summary.json").write_text(text)

    se = np.sort(kpis.user_se)
    cdf = np.arange(1, se.size + 1) / se.size
    lines = ["user_se_bps_hz,cdf"]
    lines += [f"{_fmt(v)},{_fmt(c)}" for v, c in zip(se, cdf)]
    (outdir / "cdf_user_se.csv").write_text("\n".join(lines) + "\n")

    rate = se * ref_bw_hz / 1e6
    lines = ["user_rate_mbps,cdf"]
    lines += [f"{_fmt(v)},{_fmt(c)}" for v, c in zip(rate, cdf)]
    (outdir / "cdf_user_rate.csv").write_text("\n".join(lines) + "\n")

    rows = []
    req = kpis.requirements
    for key, required in (("user_rate_mbps", req.user_rate_mbps),
                          ("user_se", req.user_se),
                          ("avg_cell_se", req.avg_cell_se),
                          ("area_capacity_kbps_km2", req.area_capacity_kbps_km2)):
        value = {
            "user_rate_mbps": kpis.user_rate_5th_mbps,
            "user_se": kpis.user_se_5th,
            "avg_cell_se": kpis.avg_cell_se,
            "area_capacity_kbps_km2": kpis.area_capacity_kbps_km2,
        }[key]
        word = "PASS" if kpis.verdicts[key] else "FAIL"
        rows.append(f"{word} {key}: value={value:.6g} required>={required:.6g}")
    (outdir / "verdicts.txt").write_text("\n".join(rows) + "\n")


def results_table(all_kpis: list[ScenarioKpis]) -> str:
    """Fixed-width campaign table, one scenario per row."""
    header = (f"{'scenario':<22} {'dir':<3} {'5th SE':>8} {'5th Mb/s':>9} "
              f"{'cell SE':>8} {'kb/s/km2':>9} {'result':>6}")
    rows = [header, "-" * len(header)]
    for k in all_kpis:
        rows.append(
            f"{k.name:<22} {k.direction:<3} {k.user_se_5th:>8.4f} "
            f"{k.user_rate_5th_mbps:>9.3f} {k.avg_cell_se:>8.4f} "
            f"{k.area_capacity_kbps_km2:>9.3f} "
            f"{'PASS' if k.passed else 'FAIL':>6}")
    return "\n".join(rows) + "\n"
