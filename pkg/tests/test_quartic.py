import numpy as np
import pytest

from ofalab.errors import ParameterError
from ofalab.game import BuilderParams
from ofalab.quartic import (
    QuarticCoefficients,
    build_quartic,
    largest_root_closed_form,
    minimize_positivity_margin,
    positivity_margin,
    quartic_real_roots,
    resolvent,
)

WORKED = (BuilderParams(100, 40), BuilderParams(200, 80))


def test_coefficients():
    c = build_quartic(WORKED)
    assert (c.a4, c.a3, c.a2, c.a1, c.a0) == (100, 380, 200 - 400 + 160 - 320, -760, -200)


def test_real_roots_of_known_quartic():
    # (x - 1)(x + 1)(x + 2)(x + 3) = x^4 + 5x^3 + 5x^2 - 5x - 6
    roots = quartic_real_roots(QuarticCoefficients(1, 5, 5, -5, -6))
    assert roots == pytest.approx([-3, -2, -1, 1], abs=1e-12)


def test_real_roots_skip_complex_pair():
    # (x^2 + 1)(x - 2)(x + 4) = x^4 + 2x^3 - 7x^2 + 2x - 8
    assert quartic_real_roots(QuarticCoefficients(1, 2, -7, 2, -8)) == pytest.approx([-4, 2])


def test_real_roots_reject_degenerate_leading_term():
    with pytest.raises(ParameterError):
        quartic_real_roots(QuarticCoefficients(0, 1, 0, 0, 1))


def test_worked_example_root():
    lam = largest_root_closed_form(WORKED)
    assert lam == pytest.approx(82.16648102 / 49.94324674, rel=1e-8)
    c = build_quartic(WORKED)
    assert abs(c(lam)) < 1e-10 * c.norm
    assert max(quartic_real_roots(c)) == pytest.approx(lam, rel=1e-12)


def test_symmetric_root_is_one():
    assert largest_root_closed_form(((10, 3), (10, 3))) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_sign_pattern_and_single_positive_root(seed):
    rng = np.random.default_rng(seed)
    for _ in range(200):
        f = 10 ** rng.uniform(0, 3, 2)
        v = f * (1 - 0.99 * rng.random(2))
        c = build_quartic(((f[0], v[0]), (f[1], v[1])))
        assert c(0.0) < 0 and c(-0.5) > 0 and c(-2.0) < 0
        roots = quartic_real_roots(c)
        assert sum(r > 0 for r in roots) == 1
        assert max(roots) == pytest.approx(largest_root_closed_form(((f[0], v[0]), (f[1], v[1]))), rel=1e-9)


def test_margin_is_scale_invariant():
    pair = ((3.0, 1.0), (7.0, 2.0))
    scaled = ((30.0, 10.0), (70.0, 20.0))
    r, s = resolvent(pair), resolvent(scaled)
    assert 8 * r.S**3 - r.q == pytest.approx(8 * s.S**3 - s.q, rel=1e-10)
    assert positivity_margin(pair) > 0


def test_positivity_search():
    res = minimize_positivity_margin(2000, seed=1)
    assert res.all_positive
    assert 2.9 < res.minimum < 4.0
    assert res.argmin[1] == 1.0
