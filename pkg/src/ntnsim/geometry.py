"""Beam lattice and UE geometry for a single nadir-pointing LEO satellite.

The satellite hovers at a fixed altitude above the origin of a local tangent
plane (flat-Earth approximation; at a few beam diameters from nadir the
curvature error in angles and ranges is far below the link-budget tolerances).
Beam centers form a hexagonal lattice with a fixed inter-cell distance. Each
beam serves the Voronoi cell around its center, which for a triangular lattice
is a regular hexagon with apothem icd/2 and circumradius icd/sqrt(3).

Rings 0..2 of the lattice (19 beams) are the statistics area; outer rings are
wraparound beams that only contribute interference. The wraparound depth
depends on the frequency reuse factor: with reuse 3 the co-channel beams are
sqrt(3) times farther apart, so two extra tiers are needed to surround every
statistics beam with a full complement of co-channel neighbours.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SQRT3 = math.sqrt(3.0)

STATISTICS_RINGS = 2
# extra interference tiers beyond the statistics area, keyed by reuse factor
WRAPAROUND_TIERS = {1: 2, 3: 4}

# axial-coordinate walk that traces ring k counter-clockwise from (k, 0)
_RING_WALK = ((-1, 1), (-1, 0), (0, -1), (1, -1), (1, 0), (0, 1))

# unit normals of the three hexagon edge-pair axes (lattice neighbour axes)
_HEX_AXES = np.array([[1.0, 0.0], [0.5, SQRT3 / 2.0], [-0.5, SQRT3 / 2.0]])


@dataclass(frozen=True)
class GroundPoint:
    """A point on the ground plane, km east/north of the sub-satellite point."""

    x_km: float
    y_km: float


@dataclass
class Beam:
    beam_id: int
    q: int                      # axial lattice coordinates
    r: int
    center_x_km: float
    center_y_km: float
    ring: int
    role: str                   # "statistics" or "wraparound"
    freq_color: int = 0
    pol_color: str = "RHCP"


@dataclass
class BeamLayout:
    """All beams of one scenario plus the constants needed to reason about them."""

    beams: list[Beam]
    sat_altitude_km: float
    icd_km: float
    frf: int

    def centers(self) -> np.ndarray:
        """(n_beams, 2) array of beam center coordinates in km."""
        return np.array([[b.center_x_km, b.center_y_km] for b in self.beams])

    def statistics_ids(self) -> np.ndarray:
        return np.array([b.beam_id for b in self.beams if b.role == "statistics"])

    def freq_colors(self) -> np.ndarray:
        return np.array([b.freq_color for b in self.beams])

    def pol_colors(self) -> np.ndarray:
        return np.array([0 if b.pol_color == "RHCP" else 1 for b in self.beams])

    @property
    def n_beams(self) -> int:
        return len(self.beams)


@dataclass(frozen=True)
class LinkGeometry:
    """Geometry of one UE-to-satellite link relative to one beam boresight."""

    slant_range_km: float
    elevation_deg: float
    off_boresight_deg: float


def hex_ring_coords(k: int) -> list[tuple[int, int]]:
    """Axial coordinates of lattice ring k (6k cells; ring 0 is the center)."""
    if k == 0:
        return [(0, 0)]
    coords = []
    q, r = k, 0
    for dq, dr in _RING_WALK:
        for _ in range(k):
            coords.append((q, r))
            q, r = q + dq, r + dr
    return coords


def axial_to_xy(q: int, r: int, icd_km: float) -> tuple[float, float]:
    return icd_km * (q + 0.5 * r), icd_km * (SQRT3 / 2.0) * r


def build_beam_layout(frf: int, icd_km: float = 43.3,
                      altitude_km: float = 600.0) -> BeamLayout:
    """Build the beam lattice for one reuse factor.

    Beams are numbered ring by ring, counter-clockwise within a ring, so ids
    are stable across runs. Rings 0..2 are statistics beams, the rest are
    wraparound. Raises ValueError for an unsupported reuse factor.
    """
    if frf not in WRAPAROUND_TIERS:
        raise ValueError(f"unsupported frequency reuse factor {frf}")
    n_rings = STATISTICS_RINGS + WRAPAROUND_TIERS[frf]
    beams = []
    for ring in range(n_rings + 1):
        role = "statistics" if ring <= STATISTICS_RINGS else "wraparound"
        for q, r in hex_ring_coords(ring):
            x, y = axial_to_xy(q, r, icd_km)
            beams.append(Beam(len(beams), q, r, x, y, ring, role))
    return BeamLayout(beams, altitude_km, icd_km, frf)


def sample_hex_cell(n: int, icd_km: float, rng: np.random.Generator) -> np.ndarray:
    """Draw n points uniformly inside the hexagonal Voronoi cell at the origin.

    Rejection sampling from the bounding square of the hexagon. A point lies
    inside the cell iff its projection on each of the three lattice neighbour
    axes is at most icd/2 (the nearest-lattice-point condition).
    """
    radius = icd_km / SQRT3
    half = icd_km / 2.0
    out = np.empty((n, 2))
    got = 0
    while got < n:
        m = max(16, int(1.8 * (n - got)))
        cand = rng.uniform(-radius, radius, size=(m, 2))
        keep = np.all(np.abs(cand @ _HEX_AXES.T) <= half, axis=1)
        sel = cand[keep][: n - got]
        out[got:got + len(sel)] = sel
        got += len(sel)
    return out


def drop_ues(layout: BeamLayout, per_beam: int,
             rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Place per_beam UEs uniformly in every beam's hexagonal cell.

    Returns (positions, home_beam): an (n_beams*per_beam, 2) array of ground
    coordinates in km and the id of the beam whose cell each UE was dropped
    in. UEs are ordered beam by beam, so indices are reproducible for a given
    seed. The home beam is where the UE was placed, not necessarily the beam
    it ends up attached to.
    """
    if per_beam < 1:
        raise ValueError("per_beam must be >= 1")
    blocks = []
    for beam in layout.beams:
        pts = sample_hex_cell(per_beam, layout.icd_km, rng)
        pts[:, 0] += beam.center_x_km
        pts[:, 1] += beam.center_y_km
        blocks.append(pts)
    positions = np.vstack(blocks)
    home = np.repeat([b.beam_id for b in layout.beams], per_beam)
    return positions, home


# ---------------------------------------------------------------------------
# link geometry
# ---------------------------------------------------------------------------

def slant_range_km(pos_xy: np.ndarray, altitude_km: float) -> np.ndarray:
    """Distance from ground position(s) to the satellite."""
    pos_xy = np.asarray(pos_xy, dtype=float)
    ground = np.hypot(pos_xy[..., 0], pos_xy[..., 1])
    return np.hypot(ground, altitude_km)


def elevation_deg(pos_xy: np.ndarray, altitude_km: float) -> np.ndarray:
    """Elevation of the satellite seen from the ground position(s); 90 at nadir."""
    pos_xy = np.asarray(pos_xy, dtype=float)
    ground = np.hypot(pos_xy[..., 0], pos_xy[..., 1])
    return np.degrees(np.arctan2(altitude_km, ground))


def off_boresight_deg(pos_xy: np.ndarray, centers_xy: np.ndarray,
                      altitude_km: float) -> np.ndarray:
    """Angle at the satellite between beam boresight(s) and UE direction(s).

    pos_xy may be (2,) or (n, 2); centers_xy may be (2,) or (m, 2). The result
    broadcasts to (n, m) (singleton axes squeezed for 1-D inputs). Boresight of
    a beam is the direction from the satellite to the beam center.
    """
    p = np.atleast_2d(np.asarray(pos_xy, dtype=float))
    c = np.atleast_2d(np.asarray(centers_xy, dtype=float))
    h2 = altitude_km * altitude_km
    # cos(angle) between (p, -h) and (c, -h) seen from the satellite
    dot = p @ c.T + h2
    norm_p = np.sqrt(np.einsum("ij,ij->i", p, p) + h2)
    norm_c = np.sqrt(np.einsum("ij,ij->i", c, c) + h2)
    cosang = dot / np.outer(norm_p, norm_c)
    ang = np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0)))
    if np.asarray(pos_xy).ndim == 1 and np.asarray(centers_xy).ndim == 1:
        return float(ang[0, 0])
    if np.asarray(pos_xy).ndim == 1:
        return ang[0]
    if np.asarray(centers_xy).ndim == 1:
        return ang[:, 0]
    return ang


def link_geometry(pos: GroundPoint, beam: Beam, layout: BeamLayout) -> LinkGeometry:
    """Slant range, elevation and off-boresight angle for one UE and one beam."""
    xy = np.array([pos.x_km, pos.y_km])
    center = np.array([beam.center_x_km, beam.center_y_km])
    return LinkGeometry(
        slant_range_km=float(slant_range_km(xy, layout.sat_altitude_km)),
        elevation_deg=float(elevation_deg(xy, layout.sat_altitude_km)),
        off_boresight_deg=float(off_boresight_deg(xy, center, layout.sat_altitude_km)),
    )
