import math

import pytest

from gpmeasures import analysis as A
from gpmeasures import measures as m

from oracles import gp_exact, gp_unbiased_exact

PS = [1, 2, 3, 10, 20, math.inf]


def test_sweep_x_row():
    table = A.p_sweep((1, 2, 3, 4), PS)
    assert table.ps == [1, 2, 3, 10, 20, math.inf]
    assert [round(v, 4) for v in table.values] == [0.25, 0.1667, 0.115, 0.0138, 0.0008, 0]


def test_sweep_y_row_def3():
    table = A.p_sweep((0, 1, 2, 3), PS)
    expected = [float(gp_exact((0, 1, 2, 3), p)) for p in PS[:-1]] + [0.25]
    assert table.values == pytest.approx(expected, rel=1e-13)
    assert [round(v, 4) for v in table.values] == [0.4167, 0.3571, 0.3194, 0.2543, 0.2501, 0.25]


def test_sweep_y_row_unbiased_matches_printed_values():
    table = A.p_sweep((0, 1, 2, 3), [1, 2, 3], "unbiased")
    assert [round(v, 3) for v in table.values] == [0.556, 0.476, 0.426]
    assert table.values == pytest.approx([float(gp_unbiased_exact((0, 1, 2, 3), p)) for p in (1, 2, 3)], rel=1e-13)


def test_sweep_unbiased_ratio():
    d = m.new_distribution([0.5, 3, 0, 7, 2])
    ps = [1, 1.5, 2, 3, 8]
    a, b = A.p_sweep(d, ps), A.p_sweep(d, ps, "unbiased")
    for x, y in zip(a.values, b.values):
        assert y == pytest.approx(x * 5 / 4, rel=1e-15)


def test_sweep_single_row():
    table = A.p_sweep((5, 5), [1])
    assert table.rows == ((1.0, 0.0),)


def test_sweep_sorts_rows_infinity_last():
    table = A.p_sweep((1, 2, 3), ["inf", 3, 1])
    assert table.ps == [1, 3, math.inf]


def test_sweep_matches_g_p_exactly():
    d = m.new_distribution([0.3, 1.2, 0, 4, 4])
    table = A.p_sweep(d, PS)
    for p, v in table.rows:
        assert v == m.g_p(d, p).value


def test_sweep_errors():
    with pytest.raises(m.InvalidExponent):
        A.p_sweep((1, 2), [0.5])
    with pytest.raises(ValueError):
        A.p_sweep((1, 2), [1], "biased")


@pytest.mark.parametrize("p, expected", [(1, 1 / 6), (2, 1 / 10), (math.inf, 0.0)])
def test_two_point_closed_form(p, expected):
    assert A.two_point_closed_form(p) == pytest.approx(expected, abs=1e-16)


def test_two_point_closed_form_matches_naive():
    for p in (1, 2, 2.5, 7, 30):
        assert abs(A.two_point_closed_form(p) - m.g_p_naive((1, 2), p).value) <= 1e-12
    assert A.two_point_closed_form(60) < 1e-18
    with pytest.raises(m.InvalidExponent):
        A.two_point_closed_form(0)


def test_two_point_deviation_ratio():
    for p in range(5, 26):
        ratio = m.g_p((1, 2), p + 1).value / m.g_p((1, 2), p).value
        assert 0.49 <= ratio <= 0.51


def test_fit_two_point():
    table = A.p_sweep((1, 2), list(range(1, 26)) + ["inf"])
    fit = A.fit_convergence(table)
    assert fit.limit == 0
    # closed form ratio between consecutive integers tends to 1/2 from above
    assert fit.rate == pytest.approx(0.5, abs=0.01)


def test_fit_constant_vector_degenerate():
    with pytest.raises(A.DegenerateTable):
        A.fit_convergence(A.p_sweep((3, 3, 3), PS))


def test_fit_needs_rows():
    with pytest.raises(A.DegenerateTable):
        A.fit_convergence(A.p_sweep((1, 2), [1, 2, math.inf]))
    with pytest.raises(A.DegenerateTable):
        A.fit_convergence(A.p_sweep((1, 2), [1, 2, 3]))


def test_fit_paper_vector():
    fit = A.fit_convergence(A.p_sweep((1, 2, 3, 4), PS))
    assert fit.limit == 0
    assert 0 <= fit.rate < 1


def test_def3_sweeps_within_bound():
    table = A.p_sweep((0, 0, 1, 9, 2), [1, 1.2, 2, 5, 50, math.inf])
    assert all(0 <= v <= 4 / 5 for v in table.values)
