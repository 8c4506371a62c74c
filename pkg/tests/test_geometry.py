import numpy as np
import pytest

from ntnsim.geometry import (
    GroundPoint,
    axial_to_xy,
    build_beam_layout,
    drop_ues,
    elevation_deg,
    hex_ring_coords,
    link_geometry,
    off_boresight_deg,
    sample_hex_cell,
    slant_range_km,
)

ICD = 43.3
ALT = 600.0


def test_ring_sizes():
    assert len(hex_ring_coords(0)) == 1
    for k in range(1, 7):
        assert len(hex_ring_coords(k)) == 6 * k


def test_ring_coords_unique_and_at_right_radius():
    seen = set()
    for k in range(5):
        for q, r in hex_ring_coords(k):
            assert (q, r) not in seen
            seen.add((q, r))
            # axial hex distance from origin equals the ring index
            assert max(abs(q), abs(r), abs(q + r)) == k


def test_axial_to_xy_neighbour_spacing():
    # all six immediate neighbours sit exactly one inter-cell distance away
    for q, r in hex_ring_coords(1):
        x, y = axial_to_xy(q, r, ICD)
        assert np.hypot(x, y) == pytest.approx(ICD)


@pytest.mark.parametrize("frf,total", [(1, 61), (3, 127)])
def test_layout_beam_counts(frf, total):
    layout = build_beam_layout(frf, ICD, ALT)
    assert layout.n_beams == total
    assert len(layout.statistics_ids()) == 19
    roles = [b.role for b in layout.beams]
    assert roles.count("statistics") == 19
    assert roles.count("wraparound") == total - 19


def test_layout_ids_are_ring_ordered():
    layout = build_beam_layout(1, ICD, ALT)
    rings = [b.ring for b in layout.beams]
    assert rings == sorted(rings)
    assert [b.beam_id for b in layout.beams] == list(range(61))


def test_bad_frf_rejected():
    with pytest.raises(ValueError):
        build_beam_layout(2, ICD, ALT)


def test_sample_hex_cell_inside_cell():
    rng = np.random.default_rng(0)
    pts = sample_hex_cell(4000, ICD, rng)
    assert pts.shape == (4000, 2)
    # inside the hexagon: within apothem of every edge family
    axes = np.array([[1.0, 0.0],
                     [0.5, np.sqrt(3) / 2],
                     [-0.5, np.sqrt(3) / 2]])
    proj = np.abs(pts @ axes.T)
    assert np.all(proj <= ICD / 2 + 1e-12)
    # and the corners are actually reachable (beyond the inscribed circle)
    radii = np.hypot(pts[:, 0], pts[:, 1])
    assert radii.max() > ICD / 2 * 1.02


def test_drop_ues_counts_and_homes():
    layout = build_beam_layout(1, ICD, ALT)
    rng = np.random.default_rng(7)
    pos, home = drop_ues(layout, 10, rng)
    assert pos.shape == (610, 2)
    assert home.shape == (610,)
    assert np.all(np.bincount(home, minlength=61) == 10)
    # every UE within circumradius of its home beam center
    centers = layout.centers()[home]
    d = np.hypot(*(pos - centers).T)
    assert np.all(d <= ICD / np.sqrt(3) + 1e-9)


def test_slant_range_nadir_and_offset():
    assert slant_range_km(np.array([0.0, 0.0]), ALT) == pytest.approx(600.0)
    # 600 km ground offset: hypotenuse of an isosceles right triangle
    r = slant_range_km(np.array([600.0, 0.0]), ALT)
    assert r == pytest.approx(600.0 * np.sqrt(2.0))


def test_elevation_angles():
    assert elevation_deg(np.array([0.0, 0.0]), ALT) == pytest.approx(90.0)
    assert elevation_deg(np.array([600.0, 0.0]), ALT) == pytest.approx(45.0)
    assert elevation_deg(np.array([0.0, 1e9]), ALT) == pytest.approx(0.0, abs=1e-3)


def test_off_boresight_geometry():
    nadir_beam = np.array([0.0, 0.0])
    ue = np.array([600.0, 0.0])
    theta = off_boresight_deg(ue, nadir_beam, ALT)
    assert theta == pytest.approx(45.0)
    # UE on the boresight axis of its own beam
    assert off_boresight_deg(ue, ue, ALT) == pytest.approx(0.0, abs=1e-9)


def test_off_boresight_broadcasting():
    ues = np.array([[0.0, 0.0], [600.0, 0.0], [0.0, 600.0]])
    centers = np.array([[0.0, 0.0], [600.0, 0.0]])
    theta = off_boresight_deg(ues, centers, ALT)
    assert theta.shape == (3, 2)
    assert theta[0, 0] == pytest.approx(0.0, abs=1e-9)
    assert theta[1, 1] == pytest.approx(0.0, abs=1e-9)
    assert theta[1, 0] == pytest.approx(45.0)


def test_link_geometry_struct():
    layout = build_beam_layout(1, ICD, ALT)
    g = link_geometry(GroundPoint(0.0, 0.0), layout.beams[0], layout)
    assert g.slant_range_km == pytest.approx(600.0)
    assert g.elevation_deg == pytest.approx(90.0)
    assert g.off_boresight_deg == pytest.approx(0.0, abs=1e-9)
