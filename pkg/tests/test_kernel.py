import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weyldyn import (
    ConvergenceError,
    DomainError,
    GridError,
    TriangleGrid,
    apply_K,
    build_Q,
    eval_w,
    make_catalog_potential,
    neumann_solve,
    term_bound,
)
from weyldyn.kernel import dump_kernel_csv, load_kernel_csv


def wide_constant(c, width=64.0):
    """q identically c on the region any desk-scale triangle can see."""
    return make_catalog_potential("constant_box", [c, width])


class TestGrid:
    def test_divisibility(self):
        g = TriangleGrid(8.0, 0.01)
        assert g.n == 800
        with pytest.raises(GridError):
            TriangleGrid(1.0, 0.3)
        with pytest.raises(GridError):
            TriangleGrid(-1.0, 0.1)


class TestBuildQ:
    def test_zero(self, zero_pot):
        fld = build_Q(zero_pot, TriangleGrid(4.0, 0.05))
        assert np.all(fld.v == 0.0)

    def test_constant(self):
        p = wide_constant(2.0)
        grid = TriangleGrid(4.0, 0.05)
        fld = build_Q(p, grid)
        xi = grid.nodes()[:, None]
        eta = grid.nodes()[None, :]
        expect = np.triu(-2.0 * (eta - xi) / 4.0)
        assert np.allclose(fld.v, expect, atol=1e-14)

    def test_box_spot_value(self, box):
        grid = TriangleGrid(2.0, 0.05)
        fld = build_Q(box, grid)
        # Q(0, 1) = -1/2 * int_0^{1/2} 1 = -1/4
        assert fld.v[0, 20] == pytest.approx(-0.25, abs=1e-14)

    def test_against_cumulative_sum_oracle(self, box):
        grid = TriangleGrid(2.0, 0.01)
        fld = build_Q(box, grid)
        # independent oracle: cumulative trapezoid of q over a 10x finer grid
        fine = 10
        y = np.arange(grid.n * fine + 1) * (grid.h / 2.0 / fine)
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (box(y)[1:] + box(y)[:-1]) * np.diff(y))])
        cum_nodes = cum[::fine]
        oracle = np.triu(-0.5 * (cum_nodes[None, :] - cum_nodes[:, None]))
        # the oracle itself has O(fine step) error at the node on the jump
        assert np.max(np.abs(fld.v - oracle)) < 1e-4


class TestApplyK:
    def test_empty_rectangle_column(self, box):
        grid = TriangleGrid(2.0, 0.05)
        fld = build_Q(box, grid)
        out = apply_K(box, fld)
        assert np.all(out.v[0, :] == 0.0)
        assert np.all(np.diagonal(out.v) == 0.0)

    def test_constant_closed_form(self):
        c = 1.5
        p = wide_constant(c)
        grid = TriangleGrid(4.0, 0.05)
        ones = build_Q(make_catalog_potential("zero", []), grid)
        ones = type(ones)(grid, np.triu(np.ones((grid.n + 1, grid.n + 1))))
        out = apply_K(p, ones)
        xi = grid.nodes()[:, None]
        eta = grid.nodes()[None, :]
        expect = np.triu((c / 4.0) * xi * (eta - xi))
        assert np.max(np.abs(out.v - expect)) < 1e-12

    def test_spot_node_vs_simpson_oracle(self, box):
        grid = TriangleGrid(2.0, 0.01)
        fld = build_Q(box, grid)
        out = apply_K(box, fld)
        # independent high-resolution 2D Simpson quadrature at (xi, eta) = (0.5, 1)
        xi0, eta0 = 0.5, 1.0
        nn = 800  # even
        x1 = np.linspace(0.0, xi0, nn + 1)
        e1 = np.linspace(xi0, eta0, nn + 1)
        X, E = np.meshgrid(x1, e1, indexing="ij")
        q_closed = np.clip((E - X) / 2.0, 0.0, None)
        q_closed = np.where((E - X) / 2.0 < 1.0, 1.0, 0.0)
        Qc = -0.5 * (np.clip(E / 2.0, 0.0, 1.0) - np.clip(X / 2.0, 0.0, 1.0))
        integrand = q_closed * Qc
        wts = np.ones(nn + 1)
        wts[1:-1:2], wts[2:-1:2] = 4.0, 2.0
        w2 = np.outer(wts, wts) * (xi0 / nn / 3.0) * ((eta0 - xi0) / nn / 3.0)
        oracle = 0.25 * np.sum(integrand * w2)
        i, j = int(round(xi0 / grid.h)), int(round(eta0 / grid.h))
        assert out.v[i, j] == pytest.approx(oracle, abs=1e-6)


class TestNeumann:
    def test_zero_potential(self, zero_pot):
        fld = neumann_solve(zero_pot, TriangleGrid(8.0, 0.02))
        assert fld.terms_used == 0
        assert np.all(fld.v == 0.0)

    def test_box_converges_quickly(self, box):
        fld = neumann_solve(box, TriangleGrid(4.0, 0.02), tol=1e-12)
        assert fld.terms_used <= 25
        assert fld.last_term_max <= 1e-12

    def test_doubled_resolution_self_oracle(self, box):
        coarse = neumann_solve(box, TriangleGrid(4.0, 0.04))
        fine = neumann_solve(box, TriangleGrid(4.0, 0.02))
        diff = np.abs(coarse.v - fine.v[::2, ::2]).max()
        assert diff < 5e-4  # O(h^2) at h=0.04

    def test_no_convergence_error(self, box):
        with pytest.raises(ConvergenceError):
            neumann_solve(box, TriangleGrid(8.0, 0.05), tol=1e-12, max_terms=2)

    def test_terms_against_induction_bound(self, catalog):
        """Node-wise |K^n Q| <= factorial envelope, every catalog potential."""
        from weyldyn import compute_norms

        grid = TriangleGrid(6.0, 0.02)
        xi = grid.nodes()[:, None]
        eta = grid.nodes()[None, :]
        iu = np.triu_indices(grid.n + 1)
        for name, p in catalog.items():
            qn = compute_norms(p).windowed_scaled
            fld = neumann_solve(p, grid, keep_terms=True)
            for n, term in enumerate(fld.terms):
                bound = term_bound(n, xi[iu[0], 0], eta[0, iu[1]], qn)
                assert np.all(np.abs(term[iu]) <= bound * (1 + 1e-6)), (name, n)

    def test_grid_convergence_order(self, box):
        flds = {h: neumann_solve(box, TriangleGrid(4.0, h)) for h in (0.04, 0.02, 0.01)}
        d1 = np.abs(flds[0.04].v - flds[0.02].v[::2, ::2]).max()
        d2 = np.abs(flds[0.02].v - flds[0.01].v[::2, ::2]).max()
        order = math.log2(d1 / d2)
        assert order >= 1.8


class TestEvalW:
    def test_boundary_conditions(self, box_field_8, box):
        fld = box_field_8
        t = np.linspace(0.0, 8.0, 321)
        assert np.max(np.abs(eval_w(fld, 0.0, t))) < 1e-12
        x = np.linspace(0.0, 4.0, 161)
        diag = eval_w(fld, x, x)
        exact = -0.5 * np.asarray(box.integral(0.0, x))
        assert np.max(np.abs(diag - exact)) < 10 * fld.grid.h**2 + 1e-12

    def test_causality(self, box_field_8):
        assert eval_w(box_field_8, 1.0, 0.5) == 0.0

    def test_out_of_domain(self, box_field_8):
        with pytest.raises(DomainError):
            eval_w(box_field_8, 4.5, 4.5)

    def test_node_exactness_and_interp(self, box_field_8):
        fld = box_field_8
        h = fld.grid.h
        assert eval_w(fld, 1.0, 3.0) == fld.v[int(2.0 / h), int(4.0 / h)]
        # off-node point sits between node values
        a = eval_w(fld, 1.0 + h / 3, 3.0 + h / 3)
        lo = fld.v[int(2.0 / h) : int(2.0 / h) + 2, int(4.0 / h) : int(4.0 / h) + 3]
        assert lo.min() - 1e-12 <= a <= lo.max() + 1e-12

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.0, 4.0), st.floats(0.0, 4.0))
    def test_causal_zero_property(self, box_field_8, a, b):
        x, t = max(a, b), min(a, b)
        if x > t + 1e-9:
            assert eval_w(box_field_8, x, t) == 0.0


class TestTermBound:
    def test_n0_matches_first_estimate(self):
        assert term_bound(0, 0.0, 3.0, 2.0) == pytest.approx(2.0 / 4.0 * 4.0)

    def test_hand_value(self):
        assert term_bound(1, 1.0, 2.0, 1.0) == pytest.approx(0.5, rel=1e-12)

    def test_zero_norm(self):
        assert term_bound(7, 1.0, 2.0, 0.0) == 0.0

    def test_no_overflow_large_n(self):
        val = term_bound(60, 30.0, 40.0, 2.0)
        assert math.isfinite(val)

    def test_invalid(self):
        with pytest.raises(ValueError):
            term_bound(1, 2.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            term_bound(-1, 0.0, 1.0, 1.0)

    @settings(max_examples=50, deadline=None)
    @given(
        st.integers(0, 20),
        st.floats(0.0, 10.0),
        st.floats(0.0, 10.0),
        st.floats(0.0, 4.0),
    )
    def test_monotone_in_norm(self, n, xi, extra, qn):
        eta = xi + extra
        assert term_bound(n, xi, eta, 2.0 * qn) >= term_bound(n, xi, eta, qn)


class TestResidual:
    def test_pde_residual_order(self, expo):
        """Characteristic-coordinate PDE residual v_xi_eta + q((eta-xi)/2) v / 4.

        This is the sign consistent with the wave equation and with the
        integral equation being solved (differentiating v = Q - Kv gives
        v_xi_eta = -q v / 4); centered cross differences must then leave an
        O(h^2) residual at interior nodes for a smooth potential.
        """
        res = {}
        for h in (0.04, 0.02):
            fld = neumann_solve(expo, TriangleGrid(4.0, h))
            v = fld.v
            n = fld.grid.n
            i = np.arange(1, n)[:, None]
            j = np.arange(1, n)[None, :]
            cross = (v[2:, 2:] - v[2:, :-2] - v[:-2, 2:] + v[:-2, :-2]) / (4 * h * h)
            qv = expo((j - i) * h / 2.0) * v[1:-1, 1:-1] / 4.0
            interior = (j - i) >= 2
            res[h] = np.abs(np.where(interior, cross + qv, 0.0)).max()
        assert res[0.04] / res[0.02] > 3.0  # second-order residual decay


class TestDump:
    def test_csv_roundtrip(self, tmp_path, box):
        fld = neumann_solve(box, TriangleGrid(1.0, 0.25))
        path = tmp_path / "kernel.csv"
        dump_kernel_csv(fld, path)
        arr = load_kernel_csv(path)
        n = fld.grid.n
        assert arr.shape == ((n + 1) * (n + 2) // 2, 3)
        i = np.round(arr[:, 0] / fld.grid.h).astype(int)
        j = np.round(arr[:, 1] / fld.grid.h).astype(int)
        assert np.array_equal(arr[:, 2], fld.v[i, j])
