"""Link adaptation, proportional-fair scheduling, HARQ and the drop engine.

One "drop" is a full Monte-Carlo realization for one seed: drop UEs, freeze
large-scale state, then run the slot loop for the configured direction. Full
buffer traffic, so every beam transmits on all of its band in every downlink
slot, and every beam grants its whole band on the uplink.

Scheduling uses the classic proportional-fair metric rate/average_rate with an
exponentially smoothed average. Fading is frequency flat within a slot, so on
the downlink one UE per beam wins the whole band each slot and fairness comes
from the average-rate feedback. On the uplink a grant also dilutes the UE's
fixed transmit power, so the scheduler works with marginal rates: every grant
block goes to the UE with the best additional-rate-per-average, which spreads
the band over several UEs and keeps the per-UE power density up.

HARQ is stop-and-wait per UE with Chase combining: each retransmission adds
3 dB of effective SINR, and the error probability follows a waterfall that
equals the target BLER exactly at the selected MCS threshold and drops one
decade per 3 dB of margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .config import ScenarioConfig
from .geometry import build_beam_layout, drop_ues
from .phy_link import LinkState, assign_colors, rician_fading_db

_DB3 = 3.0  # Chase combining gain per retransmission, and the BLER decade slope


@dataclass(frozen=True)
class McsEntry:
    index: int
    mod_order: int
    code_rate: float            # fraction of 1024
    se: float                   # information bits per symbol
    threshold_db: float


class McsLadder:
    """Ordered MCS list with SINR thresholds derived from an efficiency factor.

    The threshold of an entry is the SINR where efficiency * log2(1 + sinr)
    equals the entry's spectral efficiency, so realized SE never exceeds the
    attenuated-Shannon envelope.
    """

    def __init__(self, entries: list[McsEntry]):
        if not entries:
            raise ValueError("empty MCS ladder")
        ses = [e.se for e in entries]
        if any(b <= a for a, b in zip(ses, ses[1:])):
            raise ValueError("MCS spectral efficiencies must be strictly increasing")
        self.entries = entries
        self._thr = np.array([e.threshold_db for e in entries])
        self._se = np.array(ses)

    @classmethod
    def from_file(cls, path: str | Path | None, efficiency: float) -> "McsLadder":
        """Load a ladder file; None or empty path means the bundled default."""
        if not 0 < efficiency <= 0.75:
            raise ValueError("ladder efficiency must lie in (0, 0.75]")
        if path:
            text = Path(path).read_text()
        else:
            text = (resources.files("ntnsim") / "data" / "mcs_qam64_low_se.txt").read_text()
        entries = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            parts = stripped.split()
            if len(parts) != 4:
                raise ValueError(f"ladder line {lineno}: expected 4 columns")
            idx, qm, rate1024, se = (int(parts[0]), int(parts[1]),
                                     int(parts[2]), float(parts[3]))
            thr = 10.0 * math.log10(2.0 ** (se / efficiency) - 1.0)
            entries.append(McsEntry(idx, qm, rate1024 / 1024.0, se, thr))
        return cls(entries)

    def select(self, sinr_db: float) -> McsEntry | None:
        """Highest entry whose threshold is met, None below the ladder."""
        i = int(np.searchsorted(self._thr, sinr_db, side="right")) - 1
        return self.entries[i] if i >= 0 else None

    def se_at(self, sinr_db: np.ndarray) -> np.ndarray:
        """Vectorized spectral efficiency (0 below the ladder)."""
        idx = np.searchsorted(self._thr, sinr_db, side="right") - 1
        se = np.where(idx >= 0, self._se[np.maximum(idx, 0)], 0.0)
        return se

    def thresholds_db(self) -> np.ndarray:
        return self._thr.copy()

    @property
    def max_se(self) -> float:
        return float(self._se[-1])


# ---------------------------------------------------------------------------
# proportional fairness and HARQ primitives
# ---------------------------------------------------------------------------

class PfState:
    """Smoothed average rates for one beam's candidate set."""

    def __init__(self, n_ue: int, smoothing: float, init_rate: float = 1.0):
        self.beta = smoothing
        self.avg = np.full(n_ue, init_rate)

    def metric(self, inst_rate: np.ndarray) -> np.ndarray:
        return inst_rate / np.maximum(self.avg, 1e-12)

    def update(self, realized_rate: np.ndarray) -> None:
        self.avg += self.beta * (realized_rate - self.avg)


def pf_pick(metric: np.ndarray) -> int:
    """Winner index: argmax with ties resolved to the lowest index."""
    return int(np.argmax(metric))


@dataclass
class HarqProcess:
    """One in-flight transport block."""

    bits: float
    threshold_db: float
    attempts: int = 0           # transmissions already made


def harq_fail_probability(eff_sinr_db: float, threshold_db: float,
                          target_bler: float) -> float:
    """Waterfall BLER: target at threshold, one decade per 3 dB of margin."""
    if target_bler <= 0.0:
        return 0.0
    return min(1.0, target_bler * 10.0 ** (-(eff_sinr_db - threshold_db) / _DB3))


def harq_step(proc: HarqProcess, sinr_db: float, target_bler: float,
              max_attempts: int, rng: np.random.Generator) -> str:
    """Run one transmission attempt; returns delivered, retransmit or failed."""
    eff = sinr_db + _DB3 * proc.attempts          # Chase combining gain
    proc.attempts += 1
    if rng.random() >= harq_fail_probability(eff, proc.threshold_db, target_bler):
        return "delivered"
    return "retransmit" if proc.attempts < max_attempts else "failed"


# ---------------------------------------------------------------------------
# drop engine
# ---------------------------------------------------------------------------

@dataclass
class DropResult:
    """Delivered-bit accounting for one (config, seed) run."""

    seed: int
    duration_s: float
    ue_bits: np.ndarray          # per UE, statistics window only
    cell_bits: np.ndarray        # per beam
    stat_ues: np.ndarray         # UEs attached to statistics beams
    stat_beams: np.ndarray
    serving: np.ndarray


def build_state(cfg: ScenarioConfig, seed: int) -> LinkState:
    """Deterministic large-scale state for one seed."""
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2)]
    layout = assign_colors(build_beam_layout(cfg.frf, cfg.icd_km, cfg.altitude_km))
    if cfg.drop_mode == "center":
        centers = layout.centers()
        positions = np.repeat(centers, cfg.ues_per_beam, axis=0)
        home = np.repeat(np.arange(layout.n_beams), cfg.ues_per_beam)
    else:
        positions, home = drop_ues(layout, cfg.ues_per_beam, streams[0])
    return LinkState(cfg, layout, positions, home, streams[1])


def run_drop(cfg: ScenarioConfig, seed: int) -> DropResult:
    """Simulate one seed of one scenario and account delivered bits."""
    cfg.validate()
    state = build_state(cfg, seed)
    fade_rng, harq_rng = (np.random.default_rng(s)
                          for s in np.random.SeedSequence((seed, 797)).spawn(2))
    ladder = McsLadder.from_file(cfg.ladder_path or None, cfg.ladder_efficiency)
    if cfg.direction == "dl":
        ue_bits, cell_bits = _run_dl(cfg, state, ladder, fade_rng, harq_rng)
    else:
        ue_bits, cell_bits = _run_ul(cfg, state, ladder, fade_rng, harq_rng)
    stat_ues = np.flatnonzero(np.isin(state.serving, state.stat_beams))
    duration_s = max(cfg.slots - cfg.warmup_slots, 0) * cfg.slot_ms * 1e-3
    return DropResult(seed, duration_s, ue_bits, cell_bits, stat_ues,
                      state.stat_beams.copy(), state.serving.copy())


class _HarqBank:
    """Stop-and-wait HARQ per UE plus delivered-bit accounting."""

    def __init__(self, n_ue: int, cfg: ScenarioConfig, rng: np.random.Generator):
        self.procs: dict[int, HarqProcess] = {}
        self.cfg = cfg
        self.rng = rng
        self.ue_bits = np.zeros(n_ue)

    def transmit(self, ue: int, sinr_db: float, new_bits: float,
                 new_threshold_db: float | None, count_stats: bool) -> float:
        """One grant for one UE; returns bits delivered this slot.

        A pending retransmission takes priority over new data. new_threshold_db
        None means the SINR is below the ladder, so no new block is started.
        """
        proc = self.procs.get(ue)
        if proc is None:
            if new_threshold_db is None or new_bits <= 0.0:
                return 0.0
            proc = HarqProcess(new_bits, new_threshold_db)
            self.procs[ue] = proc
        outcome = harq_step(proc, sinr_db, self.cfg.target_bler,
                            self.cfg.harq_max_attempts, self.rng)
        if outcome == "retransmit":
            return 0.0
        delivered = proc.bits if outcome == "delivered" else 0.0
        del self.procs[ue]
        if delivered and count_stats:
            self.ue_bits[ue] += delivered
        return delivered


def _run_dl(cfg, state, ladder, fade_rng, harq_rng):
    slot_s = cfg.slot_ms * 1e-3
    beam_bw = state.plan.beam_bw_hz
    stat_ues, sig_lin, int_lin = state.dl_stat_arrays()
    row_of = {int(u): i for i, u in enumerate(stat_ues)}
    harq = _HarqBank(state.n_ue, cfg, harq_rng)
    cell_bits = np.zeros(state.n_beams)

    beams = [(int(b), state.ues_of_beam[b]) for b in state.stat_beams
             if len(state.ues_of_beam[b])]
    pf = {b: PfState(len(ues), cfg.pf_smoothing) for b, ues in beams}
    rows = {b: np.array([row_of[int(u)] for u in ues]) for b, ues in beams}

    for slot in range(cfg.slots):
        rng = fade_rng if cfg.fading == "rician" else None
        sinr_db = state.dl_slot_sinr_db(sig_lin, int_lin, rng)
        in_window = slot >= cfg.warmup_slots
        for b, ues in beams:
            sinr_b = sinr_db[rows[b]]
            inst = ladder.se_at(sinr_b) * beam_bw
            w = pf_pick(pf[b].metric(inst))
            ue, s = int(ues[w]), float(sinr_b[w])
            entry = ladder.select(s)
            bits = entry.se * beam_bw * slot_s if entry else 0.0
            delivered = harq.transmit(ue, s, bits,
                                      entry.threshold_db if entry else None,
                                      in_window)
            if delivered and in_window:
                cell_bits[b] += delivered
            realized = np.zeros(len(ues))
            realized[w] = delivered / slot_s
            pf[b].update(realized)
    return harq.ue_bits, cell_bits


def _run_ul(cfg, state, ladder, fade_rng, harq_rng):
    slot_s = cfg.slot_ms * 1e-3
    plan = state.plan
    unit = cfg.ul_alloc_subbands
    n_blocks = plan.subbands // unit
    block_hz = unit * plan.subband_hz
    noise_lin = 10.0 ** (state.ul_noise_sub_dbw / 10.0)
    harq = _HarqBank(state.n_ue, cfg, harq_rng)
    cell_bits = np.zeros(state.n_beams)
    is_stat = np.zeros(state.n_beams, dtype=bool)
    is_stat[state.stat_beams] = True

    beams = [(b, state.ues_of_beam[b]) for b in range(state.n_beams)
             if len(state.ues_of_beam[b])]
    pf = {b: PfState(len(ues), cfg.pf_smoothing) for b, ues in beams}

    # per-candidate rate tables rate(m blocks), fixed large-scale terms
    # sinr_sub(m) = rx_total - 10log10(m*unit subbands) - noise
    split_db = 10.0 * np.log10(np.arange(1, n_blocks + 1) * unit)
    rate_tab = {}
    for b, ues in beams:
        snr_db = (state.ul_rx_dbw[ues, b][:, None] - split_db[None, :]
                  - state.ul_noise_sub_dbw)
        m = np.arange(1, n_blocks + 1)
        rate_tab[b] = ladder.se_at(snr_db) * m * block_hz
    marg_tab = {b: np.diff(r, prepend=0.0, axis=1) for b, r in rate_tab.items()}

    block_winner = np.full((state.n_beams, n_blocks), -1, dtype=int)
    block_alloc = np.zeros((state.n_beams, n_blocks), dtype=int)   # blocks held

    for slot in range(cfg.slots):
        in_window = slot >= cfg.warmup_slots
        block_winner.fill(-1)
        block_alloc.fill(0)
        proxy_rate = {}
        for b, ues in beams:
            marg = marg_tab[b]
            metric = marg / np.maximum(pf[b].avg, 1e-12)[:, None]
            # grant blocks by decreasing marginal metric; a block whose best
            # marginal rate is negative (power dilution past the ladder floor)
            # stays idle rather than hurting its would-be holder
            flat = np.argsort(-metric.ravel(), kind="stable")
            flat = flat[marg.ravel()[flat] > 0.0][:n_blocks]
            counts = np.bincount(flat // n_blocks, minlength=len(ues))
            order = np.flatnonzero(counts)
            used = int(counts.sum())
            block_winner[b, :used] = np.repeat(ues[order], counts[order])
            block_alloc[b, :used] = np.repeat(counts[order], counts[order])
            proxy_rate[b] = (counts, order)

        for b, ues in beams:
            if not is_stat[b]:
                # wraparound beams exist to generate interference; their PF
                # state advances on the scheduled-rate estimate
                counts, order = proxy_rate[b]
                realized = np.zeros(len(ues))
                got = counts > 0
                realized[got] = rate_tab[b][got, counts[got] - 1]
                pf[b].update(realized)
                continue

            inter = state.ul_interferers[b]
            # interference per block: co-channel winners, aligned blocks;
            # idle blocks (winner -1) contribute nothing
            if len(inter):
                src = block_winner[inter]                 # (n_int, K)
                occupied = src >= 0
                coef = np.where(
                    occupied,
                    state.ul_rx_dbw[np.maximum(src, 0), b]
                    - 10.0 * np.log10(np.maximum(block_alloc[inter], 1) * unit),
                    -np.inf)
                if cfg.fading == "rician":
                    coef = coef + rician_fading_db(cfg.rician_k_db, coef.shape,
                                                   fade_rng)
                i_lin = (10.0 ** (coef / 10.0)).sum(axis=0)
            else:
                i_lin = np.zeros(n_blocks)

            counts, order = proxy_rate[b]
            realized = np.zeros(len(ues))
            start = 0
            fad = (rician_fading_db(cfg.rician_k_db, len(order), fade_rng)
                   if cfg.fading == "rician" else np.zeros(len(order)))
            for j, oi in enumerate(order):
                c = counts[oi]
                ue = int(ues[oi])
                m_sub = c * unit
                sig_db = state.ul_rx_dbw[ue, b] - 10.0 * math.log10(m_sub) + fad[j]
                sinr_lin = (10.0 ** (sig_db / 10.0)
                            / (i_lin[start:start + c] + noise_lin))
                sinr_db = 10.0 * math.log10(float(sinr_lin.mean()))
                entry = ladder.select(sinr_db)
                bits = entry.se * m_sub * plan.subband_hz * slot_s if entry else 0.0
                delivered = harq.transmit(ue, sinr_db, bits,
                                          entry.threshold_db if entry else None,
                                          in_window)
                if delivered and in_window:
                    cell_bits[b] += delivered
                realized[oi] = delivered / slot_s
                start += c
            pf[b].update(realized)
    return harq.ue_bits, cell_bits
