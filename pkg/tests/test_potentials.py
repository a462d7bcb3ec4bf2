import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weyldyn import (
    PotentialError,
    compute_norms,
    load_sampled_potential,
    make_catalog_potential,
    read_potential_file,
)


def brute_l1(p, upper, n=400_001):
    """Independent trapezoid quadrature of |q| on [0, upper]."""
    x = np.linspace(0.0, upper, n)
    y = np.abs(p(x))
    return float(np.trapezoid(y, x))


def brute_windowed(p, upper, positions=20_001, pts_per_window=4001):
    """Independent sliding-window sup by brute-force trapezoid sweep."""
    best = 0.0
    for x0 in np.linspace(0.0, upper, positions):
        grid = np.linspace(x0, x0 + 1.0, pts_per_window)
        best = max(best, float(np.trapezoid(np.abs(p(grid)), grid)))
    return best


class TestCatalog:
    def test_zero(self, zero_pot):
        assert zero_pot(0.3) == 0.0
        n = compute_norms(zero_pot)
        assert n.l1 == 0.0 and n.windowed == 0.0 and n.windowed_scaled == 0.0

    def test_box_values(self, box):
        assert box(0.5) == 1.0
        assert box(1.5) == 0.0
        assert box(0.0) == 1.0

    def test_box_norms_exact(self, box):
        n = compute_norms(box)
        assert n.l1 == pytest.approx(1.0, abs=1e-10)
        assert n.windowed == pytest.approx(1.0, abs=1e-10)
        # q(g/2) is the indicator of [0,2]; any unit window inside holds mass 1
        assert n.windowed_scaled == pytest.approx(1.0, abs=1e-10)

    def test_exponential_norms_vs_quadrature(self, expo):
        n = compute_norms(expo)
        assert n.l1 == pytest.approx(1.0, abs=1e-8)
        assert n.windowed == pytest.approx(brute_windowed(expo, 2.0), abs=1e-8)

    def test_sech2_norms_vs_quadrature(self, soliton):
        n = compute_norms(soliton)
        l1_closed = 2.0 * (1.0 + math.tanh(3.0))
        assert n.l1 == pytest.approx(l1_closed, abs=1e-8)
        assert n.windowed == pytest.approx(brute_windowed(soliton, 6.0), abs=1e-7)

    def test_bump_train_class_separation(self, bump):
        n = compute_norms(bump)
        assert math.isinf(n.l1)
        assert n.windowed == pytest.approx(0.5, abs=1e-10)
        assert n.windowed_scaled == pytest.approx(1.0, abs=1e-10)

    def test_bump_windowed_vs_brute(self, bump):
        # the brute trapezoid sweep has O(step) error across the jumps
        assert compute_norms(bump).windowed == pytest.approx(
            brute_windowed(bump, 4.0, positions=2001), abs=1e-4
        )

    @pytest.mark.parametrize(
        "kind,params",
        [
            ("constant_box", [1.0, 0.0]),
            ("constant_box", [1.0]),
            ("exponential", [1.0, -2.0]),
            ("sech2", [0.0, 1.0]),
            ("bump_train", [1.0, 0.0]),
            ("bump_train", [1.0, 1.5]),
            ("zero", [3.0]),
            ("nosuch", []),
        ],
    )
    def test_invalid_parameters(self, kind, params):
        with pytest.raises(PotentialError):
            make_catalog_potential(kind, params)

    def test_tail_mass_below_budget(self, expo, soliton):
        assert expo.abs_tail() < 1e-12
        assert soliton.abs_tail() < 1e-12


class TestSampled:
    def test_zero_rows(self):
        p = load_sampled_potential([(0.0, 0.0), (1.0, 0.0)])
        assert p(0.5) == 0.0
        assert compute_norms(p).l1 == 0.0

    def test_constant_rows(self):
        p = load_sampled_potential([(0.0, 1.0), (1.0, 1.0)])
        assert compute_norms(p).l1 == pytest.approx(1.0, abs=1e-12)

    def test_triangle_area(self):
        p = load_sampled_potential([(0.0, 0.0), (1.0, 2.0), (2.0, 0.0)])
        # trapezoid oracle: piecewise-linear hat of height 2 over [0,2]
        x = np.linspace(0, 2, 100_001)
        assert compute_norms(p).l1 == pytest.approx(np.trapezoid(p(x), x), abs=1e-8)
        assert compute_norms(p).l1 == pytest.approx(2.0, abs=1e-12)

    def test_sign_change_abs_integral(self):
        p = load_sampled_potential([(0.0, 1.0), (1.0, -1.0)])
        # |q| makes two half-triangles of area 1/4 each
        assert p.integral_abs(0.0, 1.0) == pytest.approx(0.5, abs=1e-12)
        assert p.integral(0.0, 1.0) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize(
        "rows",
        [
            [],
            [(0.0, 1.0)],
            [(0.5, 1.0), (1.0, 1.0)],
            [(0.0, 1.0), (0.0, 2.0)],
            [(0.0, 1.0), (1.0, 1.0), (0.5, 1.0)],
        ],
    )
    def test_bad_rows(self, rows):
        with pytest.raises(PotentialError):
            load_sampled_potential(rows)

    def test_file_roundtrip(self, tmp_path):
        path = tmp_path / "pot.txt"
        path.write_text("# sampled potential\n0.0 0.0\n1.0 2.0\n2.0 0.0\n")
        p = read_potential_file(path)
        assert p.x_max == 2.0
        assert p(1.0) == pytest.approx(2.0)

    def test_missing_file(self, tmp_path):
        with pytest.raises(PotentialError):
            read_potential_file(tmp_path / "nope.txt")


@st.composite
def sampled_potentials(draw):
    n = draw(st.integers(min_value=2, max_value=12))
    gaps = draw(
        st.lists(st.floats(0.05, 2.0, allow_nan=False), min_size=n - 1, max_size=n - 1)
    )
    xs = np.concatenate([[0.0], np.cumsum(gaps)])
    qs = np.array(
        draw(st.lists(st.floats(-3.0, 3.0, allow_nan=False), min_size=n, max_size=n))
    )
    return load_sampled_potential(np.column_stack([xs, qs]))


class TestNormProperties:
    @settings(max_examples=40, deadline=None)
    @given(sampled_potentials())
    def test_windowed_le_l1(self, p):
        n = compute_norms(p)
        assert n.windowed <= n.l1 * (1 + 1e-9) + 1e-12

    @settings(max_examples=40, deadline=None)
    @given(sampled_potentials())
    def test_windowed_scaled_le_twice_windowed(self, p):
        n = compute_norms(p)
        assert n.windowed_scaled <= 2.0 * n.windowed * (1 + 1e-6) + 1e-12

    @settings(max_examples=25, deadline=None)
    @given(sampled_potentials(), st.floats(0.1, 0.9))
    def test_truncation_never_increases_windowed(self, p, frac):
        cut = frac * p.x_max
        xs = p._data.xs
        keep = xs < cut
        rows = np.column_stack(
            [np.concatenate([xs[keep], [cut]]), np.concatenate([p._data.qs[keep], [p(cut)]])]
        )
        truncated = load_sampled_potential(rows)
        assert compute_norms(truncated).windowed <= compute_norms(p).windowed * (1 + 1e-9) + 1e-12

    def test_catalog_windowed_le_l1(self, catalog):
        for name, p in catalog.items():
            n = compute_norms(p)
            if not math.isinf(n.l1):
                assert n.windowed <= n.l1 * (1 + 1e-9), name
            assert n.windowed_scaled <= 2.0 * n.windowed * (1 + 1e-6) + 1e-12, name
