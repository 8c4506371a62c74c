"""Reader for simulator result directories.

A result directory is the simulator's documented output contract: a
``summary.json`` with the pooled KPIs and verdicts, plus ``cdf_user_se.csv``
and ``cdf_user_rate.csv`` holding the per-UE empirical distributions as
``value,cdf`` rows sorted by value. plotkit consumes only these files and
never imports the simulator itself.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class PlotkitError(Exception):
    """Base class for all input problems reported through the CLI."""


class MissingInputError(PlotkitError):
    """A result directory or one of its required files does not exist."""


class MalformedInputError(PlotkitError):
    """A required file exists but does not follow the output contract."""


REQUIRED_FILES = ("summary.json", "cdf_user_se.csv", "cdf_user_rate.csv")

_SUMMARY_KEYS = (
    "scenario",
    "direction",
    "user_se_5th_bps_hz",
    "user_rate_5th_mbps",
    "avg_cell_se_bps_hz",
    "area_capacity_kbps_km2",
    "requirements",
)


@dataclass
class ResultBundle:
    """One scenario's parsed outputs."""

    name: str
    directory: Path
    summary: dict
    user_se: np.ndarray
    user_rate_mbps: np.ndarray
    cdf: np.ndarray


def _read_cdf_csv(path: Path, expected_header: str):
    lines = path.read_text().splitlines()
    if not lines or lines[0] != expected_header:
        raise MalformedInputError(
            f"{path}: expected header {expected_header!r}")
    if len(lines) < 2:
        raise MalformedInputError(f"{path}: no samples")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 2:
            raise MalformedInputError(f"{path}: line {lineno}: expected 2 columns")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise MalformedInputError(
                f"{path}: line {lineno}: non-numeric value") from None
    data = np.array(rows)
    values, cdf = data[:, 0], data[:, 1]
    if np.any(np.diff(values) < 0):
        raise MalformedInputError(f"{path}: values are not sorted")
    if np.any(cdf <= 0) or np.any(cdf > 1) or np.any(np.diff(cdf) <= 0):
        raise MalformedInputError(f"{path}: cdf column is not a CDF")
    return values, cdf


def load_results(directory: Path | str) -> ResultBundle:
    """Parse and validate one result directory."""
    d = Path(directory)
    if not d.is_dir():
        raise MissingInputError(f"result directory not found: {d}")
    for base in REQUIRED_FILES:
        if not (d / base).is_file():
            raise MissingInputError(f"{d / base}: file not found")

    try:
        summary = json.loads((d / "summary.json").read_text())
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{d / 'summary.json'}: {exc}") from None
    missing = [k for k in _SUMMARY_KEYS if k not in summary]
    if missing:
        raise MalformedInputError(
            f"{d / 'summary.json'}: missing keys {', '.join(missing)}")

    se, cdf_se = _read_cdf_csv(d / "cdf_user_se.csv", "user_se_bps_hz,cdf")
    rate, cdf_rate = _read_cdf_csv(d / "cdf_user_rate.csv",
                                   "user_rate_mbps,cdf")
    if se.size != rate.size or not np.array_equal(cdf_se, cdf_rate):
        raise MalformedInputError(
            f"{d}: the two CDF files do not describe the same sample set")

    return ResultBundle(name=str(summary["scenario"]), directory=d,
                        summary=summary, user_se=se, user_rate_mbps=rate,
                        cdf=cdf_se)
