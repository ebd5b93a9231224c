"""Layer recursion, convolution CDF, tail sandwich."""

import numpy as np
import pytest

from quarterwalk import coupling
from quarterwalk.errors import IdenticalReflectionsRequired, MarginExhausted
from quarterwalk.kernel import axis_fixed_points
from quarterwalk.model import atom


@pytest.fixture(scope="module")
def fgs_f0(fgs_solver, fgs_ref):
    law = fgs_ref.model.origin
    shape = coupling.required_f0_shape(8, 8, law, 20)
    return fgs_solver.f0_table(*shape)


class TestF0Table:
    def test_closed_form_provenance(self, fgs_f0):
        assert fgs_f0.provenance == "ClosedForm"

    def test_vanishes_on_axes(self, fgs_f0):
        assert np.all(fgs_f0.values[0, :] == 0.0)
        assert np.all(fgs_f0.values[:, 0] == 0.0)

    def test_monotone(self, fgs_f0):
        v = fgs_f0.values
        assert np.all(np.diff(v, axis=0) >= -1e-15)
        assert np.all(np.diff(v, axis=1) >= -1e-15)

    def test_out_of_margin(self, fgs_f0):
        with pytest.raises(MarginExhausted):
            fgs_f0.at(fgs_f0.imax + 1, 0)

    def test_compensation_sourced_f0(self, mixed_solver, mixed_ref):
        # mixed model has no registry closed form: f0 comes from the series
        tbl = mixed_solver.f0_table(4, 4)
        assert tbl.provenance == "Compensation"
        got = tbl.at(2, 3)
        want = mixed_solver.pmf_rows(2, 3, 0).probabilities[0]
        assert got == pytest.approx(want, abs=1e-14)


class TestRecursionStep:
    def test_first_step_identity(self, fgs_ref):
        # eta = atom(1,1): f_1(i,j) = f_0(i+1,j+1) - f_0(i,j)
        #                = (2/3)/3^i + (2/3)/3^j - (8/9)/3^(i+j)
        f0 = np.array([[fgs_ref.known_f0(i, j) for j in range(8)]
                       for i in range(8)])
        f1 = coupling.recursion_step(f0, atom(1, 1), first_step=True)
        for i in range(7):
            for j in range(7):
                want = (2 / 3) * 3.0 ** -i + (2 / 3) * 3.0 ** -j \
                    - (8 / 9) * 3.0 ** -(i + j)
                assert f1[i, j] == pytest.approx(want, abs=1e-14)

    def test_constant_table_fixed_point(self):
        ones = np.ones((6, 6))
        out = coupling.recursion_step(ones, atom(1, 1), first_step=False)
        assert np.all(out == 1.0)

    def test_margin_exhausted(self):
        with pytest.raises(MarginExhausted):
            coupling.recursion_step(np.ones((1, 1)), atom(1, 1))

    def test_cross_checks_compensation(self, fib_solver, fib_ref):
        # two independent pipelines: layer recursion from the closed-form
        # f_0 versus the series extraction
        law = fib_ref.model.origin
        n_max = 8
        shape = coupling.required_f0_shape(5, 5, law, n_max)
        f0 = fib_solver.f0_table(*shape)
        layers = coupling.pmf_layers(f0, law, n_max)
        for i in range(1, 6):
            for j in range(1, 6):
                rows = fib_solver.pmf_rows(i, j, n_max)
                for n in range(n_max + 1):
                    assert layers[n][i, j] == pytest.approx(
                        rows.probabilities[n], abs=1e-10)

    def test_general_singular_rejected(self, mixed_ref):
        with pytest.raises(IdenticalReflectionsRequired):
            coupling.check_identical(mixed_ref.model)


class TestCdfViaConvolution:
    def test_n_zero_is_f0(self, fgs_f0, fgs_ref):
        got = coupling.cdf_via_convolution(fgs_f0, fgs_ref.model.origin, (2, 3), 0)
        assert got == pytest.approx(fgs_ref.known_f0(2, 3), abs=1e-14)

    def test_shifted_point(self, fgs_f0, fgs_ref):
        got = coupling.cdf_via_convolution(fgs_f0, fgs_ref.model.origin, (1, 1), 1)
        assert got == pytest.approx(64 / 81, abs=1e-14)

    def test_telescopes_against_closed_form(self, fgs_f0, fgs_ref):
        law = fgs_ref.model.origin
        prev = coupling.cdf_via_convolution(fgs_f0, law, (1, 1), 0)
        for n in range(1, 21):
            cur = coupling.cdf_via_convolution(fgs_f0, law, (1, 1), n)
            assert cur - prev == pytest.approx(fgs_ref.known_fn(1, 1, n), abs=1e-12)
            assert cur >= prev - 1e-15 and cur <= 1.0 + 1e-12
            prev = cur

    def test_matches_layer_sums(self, fgs_f0, fgs_ref):
        law = fgs_ref.model.origin
        layers = coupling.pmf_layers(fgs_f0, law, 12)
        for n in (0, 3, 12):
            s = sum(layers[k][2, 2] for k in range(n + 1))
            c = coupling.cdf_via_convolution(fgs_f0, law, (2, 2), n)
            assert s == pytest.approx(c, abs=1e-12)

    def test_margin_exhausted(self, fgs_ref):
        f0 = coupling.F0Table(np.zeros((3, 3)), "ClosedForm")
        with pytest.raises(MarginExhausted):
            coupling.cdf_via_convolution(f0, fgs_ref.model.origin, (1, 1), 5)


class TestTailBounds:
    def test_projection_rates_fibonacci(self, fib_ref):
        fp = axis_fixed_points(fib_ref.model.interior)
        r1, r2 = coupling.projection_rates(fp, fib_ref.model.origin)
        assert r1 == pytest.approx(0.5, abs=1e-12)
        assert r2 == pytest.approx(0.5, abs=1e-12)

    def test_rates_in_unit_interval(self, fgs_ref, fib_ref):
        for ref in (fgs_ref, fib_ref):
            fp = axis_fixed_points(ref.model.interior)
            r1, r2 = coupling.projection_rates(fp, ref.model.origin)
            assert 0.0 < r1 < 1.0 and 0.0 < r2 < 1.0

    def test_n_zero_upper_bound(self, fib_ref):
        fp = axis_fixed_points(fib_ref.model.interior)
        lo, up = coupling.tail_bounds(fp, fib_ref.model.origin, (2, 3), 0)
        assert up == pytest.approx(fp.alpha_1 ** 2 + fp.beta_minus1 ** 3, abs=1e-14)
        assert lo == pytest.approx(up / 2, abs=1e-15)

    def test_sandwich_against_closed_form(self, fgs_ref, fib_ref):
        for ref in (fgs_ref, fib_ref):
            fp = axis_fixed_points(ref.model.interior)
            law = ref.model.origin
            for i in range(1, 7):
                for j in range(1, 7):
                    tail = 1.0
                    for n in range(16):
                        tail -= ref.known_fn(i, j, n)
                        lo, up = coupling.tail_bounds(fp, law, (i, j), n)
                        assert lo - 1e-12 <= tail <= up + 1e-12
