import numpy as np
import pytest

from densemerge.core import check_collision, make_vehicle, rectangle_corners, sat_margin


def vehicle_at(x, y, theta=0.0, length=4.0, width=2.0):
    return make_vehicle(x, y, theta=theta, length=length, width=width)


def grid_overlap_oracle(a, b, n=200):
    """Dense point sampling: any grid point of one body inside the other.

    Independent of the axis-projection implementation under test.
    """
    def points_inside(src, dst):
        lin_l = np.linspace(-src.length / 2, src.length / 2, n)
        lin_w = np.linspace(-src.width / 2, src.width / 2, n)
        gx, gy = np.meshgrid(lin_l, lin_w, indexing="ij")
        c, s = np.cos(src.theta), np.sin(src.theta)
        px = src.x + gx * c - gy * s
        py = src.y + gx * s + gy * c
        dx, dy = px - dst.x, py - dst.y
        cc, ss = np.cos(dst.theta), np.sin(dst.theta)
        lx = dx * cc + dy * ss
        ly = -dx * ss + dy * cc
        return np.any((np.abs(lx) <= dst.length / 2) & (np.abs(ly) <= dst.width / 2))

    return points_inside(a, b) or points_inside(b, a)


def test_identical_pose_collides():
    a = vehicle_at(3.0, 1.0, theta=0.4)
    assert check_collision(a, a)


def test_far_apart_does_not_collide():
    assert not check_collision(vehicle_at(0.0, 0.0), vehicle_at(100.0, 0.0))


def test_axis_aligned_touching_band():
    a = vehicle_at(0.0, 0.0)
    near = vehicle_at(3.9, 0.0)
    apart = vehicle_at(4.1, 0.0)
    assert check_collision(a, near)       # half-length sum 4.0 > 3.9
    assert not check_collision(a, apart)
    assert grid_overlap_oracle(a, near)
    assert not grid_overlap_oracle(a, apart)


def test_rotated_corner_case():
    a = vehicle_at(0.0, 0.0)
    b = vehicle_at(3.2, 1.6, theta=np.pi / 4)
    assert check_collision(a, b) == grid_overlap_oracle(a, b)


def test_symmetry_on_random_pairs():
    rng = np.random.default_rng(7)
    for _ in range(200):
        a = vehicle_at(*rng.uniform(-5, 5, size=2), theta=rng.uniform(-np.pi, np.pi))
        b = vehicle_at(*rng.uniform(-5, 5, size=2), theta=rng.uniform(-np.pi, np.pi))
        assert check_collision(a, b) == check_collision(b, a)


def test_sat_agrees_with_sampling_oracle_outside_boundary_band():
    rng = np.random.default_rng(42)
    checked = 0
    for _ in range(300):
        a = vehicle_at(*rng.uniform(-3, 3, size=2), theta=rng.uniform(-np.pi, np.pi),
                       length=rng.uniform(2, 6), width=rng.uniform(1, 3))
        b = vehicle_at(*rng.uniform(-3, 3, size=2), theta=rng.uniform(-np.pi, np.pi),
                       length=rng.uniform(2, 6), width=rng.uniform(1, 3))
        if abs(sat_margin(a, b)) < 0.01:
            continue
        checked += 1
        assert check_collision(a, b) == grid_overlap_oracle(a, b)
    assert checked > 250


def test_corners_layout():
    c = rectangle_corners(1.0, 2.0, 0.0, 4.0, 2.0)
    assert c == pytest.approx(np.array([[3, 3], [3, 1], [-1, 1], [-1, 3]], dtype=float))
