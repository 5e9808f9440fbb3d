import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trusstube.discrete import (DiscreteTube, TubeSpec, cylindrical_seed, extract_gamma_profile,
                                propagate_ring, seed_ring, solve_tube, trilaterate)
from trusstube.errors import DomainError, GeometryError, LockError


def spec(N=71, theta_deg=90.0, omega_deg=90.0, r=1.0):
    return TubeSpec(N=N, r=r, theta0=math.radians(theta_deg), omega0=math.radians(omega_deg))


def test_trilaterate_known_points():
    p1, p2, p3 = np.zeros(3), np.array([2.0, 0, 0]), np.array([0, 2.0, 0])
    a, b = trilaterate(p1, p2, p3, math.sqrt(3), math.sqrt(3), math.sqrt(3))
    assert np.allclose(sorted([a[2], b[2]]), [-1.0, 1.0])
    for x in (a, b):
        assert np.allclose(x[:2], [1.0, 1.0])
        for p in (p1, p2, p3):
            assert np.linalg.norm(x - p) == pytest.approx(math.sqrt(3))
    assert trilaterate(p1, p2, p3, 0.5, 0.5, 0.5) is None
    assert trilaterate(p1, p1, p3, 1, 1, 1) is None


def test_spec_validation_and_scales():
    s = spec(N=71, r=0.5)
    assert s.W == pytest.approx(71 * 0.5 * math.sqrt(2))
    assert s.pitch == pytest.approx(0.5 / math.sqrt(2))
    for bad in (dict(N=5), dict(N=7.5), dict(r=-1.0)):
        with pytest.raises(DomainError):
            TubeSpec(**{**dict(N=71, r=1.0, theta0=1.5, omega0=0.0), **bad})
    with pytest.raises(DomainError):
        spec(theta_deg=121.0)


def test_seed_ring_geometry():
    t = seed_ring(spec(N=40, theta_deg=85.0, omega_deg=30.0))
    assert t.n_rings == 3 and len(t.apex_rings) == 1
    assert t.audit() < 1e-12
    az = [math.atan2(v[0, 1], v[0, 0]) for v in t.rings]
    # A and C share an azimuth, the diagonal ring is staggered by pi/N
    assert az[0] == pytest.approx(az[2], abs=1e-12)
    assert abs(abs(az[1] - az[0]) - math.pi / 40) < 1e-12
    assert t.thetas()[1] == pytest.approx(math.radians(85.0))


def test_seed_crossing_axis():
    with pytest.raises(GeometryError):
        seed_ring(spec(N=6, theta_deg=60.0, omega_deg=180.0))


@pytest.mark.parametrize("orientation,sign", [("outward", 1.0), ("inward", -1.0)])
def test_exact_cylinder_at_pi_over_2N(orientation, sign):
    N = 71
    gamma, tube = cylindrical_seed(N, 1.0, orientation, n_rings=30)
    assert gamma == pytest.approx(sign * math.pi / (2 * N), abs=1e-12)
    # the inward branch amplifies round-off, so its drift is larger but still tiny
    assert np.ptp(tube.radii()) < (1e-11 if sign > 0 else 1e-7)
    assert np.allclose(np.diff(tube.heights()), np.diff(tube.heights())[0])
    assert tube.audit() < 1e-12


def test_flat_seed_propagation_is_inextensible():
    tube = solve_tube(spec(N=71, theta_deg=90.0, omega_deg=90.0), 120)
    assert tube.lock is None and tube.n_rings == 120
    assert tube.audit() < 1e-9
    mesh = tube.to_mesh()
    assert len(mesh.facets) == 4 * 71 * 118
    assert len(mesh.apex_nodes) == 71 * 118


@settings(max_examples=15, deadline=None)
@given(st.integers(20, 90), st.floats(80.0, 100.0), st.floats(0.0, 180.0))
def test_random_tubes_keep_bar_lengths(N, theta, omega):
    tube = solve_tube(spec(N=N, theta_deg=theta, omega_deg=omega), 60)
    assert tube.audit() < 1e-9
    if tube.lock is not None:
        assert tube.lock.ring_index == tube.n_rings - 1


def test_lock_leaves_partial_tube():
    tube = solve_tube(spec(N=71, theta_deg=118.0, omega_deg=90.0), 50)
    assert isinstance(tube.lock, LockError)
    assert tube.lock.ring_index == 2
    assert tube.n_rings == 3
    assert tube.audit() < 1e-12


def test_mirrored_tube_propagates_back():
    s = spec(N=71, theta_deg=88.0, omega_deg=70.0)
    t = solve_tube(s, 40)
    n = t.n_rings

    def mirror(R):
        return R * np.array([1.0, 1.0, -1.0])

    back = DiscreteTube(s, [mirror(t.rings[n - 1 - i]) for i in range(3)],
                        [mirror(t.apex_rings[n - 3])], [t.cell_index[n - 3]])
    while back.n_rings < n:
        propagate_ring(back)
    for a, b in zip(back.rings[::-1], t.rings):
        assert np.max(np.abs(mirror(a) - b)) < 1e-10


def test_two_ring_request_and_guards():
    t = solve_tube(spec(), 2)
    assert t.n_rings == 2 and t.apex_rings == []
    with pytest.raises(DomainError):
        solve_tube(spec(), 1)
    with pytest.raises(DomainError):
        propagate_ring(t)


def test_gamma_profile_coordinates():
    s = spec(N=100, theta_deg=88.0, omega_deg=90.0)
    tube = solve_tube(s, 10)
    prof = extract_gamma_profile(tube)
    geom = s.geometry()
    assert prof.xi2[1] == 0.0
    assert np.allclose(np.diff(prof.xi2), s.pitch)
    assert prof.gamma[1] == pytest.approx(math.radians(2.0))
    assert np.allclose(prof.gamma_hat * geom.gamma_scale(), prof.gamma)
    assert np.allclose(prof.s * geom.Lscale, prof.xi2)
