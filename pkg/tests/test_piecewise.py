import numpy as np
import pytest

from eulerstab.piecewise import Piece, PiecewiseFn, piecewise_from_samples


def plateau_fn():
    # s for s<0; 0 on [0,1]; s-1 for s>1
    return PiecewiseFn([
        Piece(-np.inf, 0.0, (0.0, 1.0)),
        Piece(0.0, 1.0, (0.0,)),
        Piece(1.0, np.inf, (-1.0, 1.0)),
    ])


def test_eval_and_break_conventions():
    fn = plateau_fn()
    assert fn(-2.0) == -2.0
    assert fn(0.5) == 0.0
    assert fn(2.0) == 1.0
    # left-closed: a break belongs to the piece starting there
    assert fn(1.0) == 0.0
    right = PiecewiseFn(fn.pieces, closed="right")
    assert right(1.0) == 0.0  # value-continuous here either way
    arr = fn(np.array([-1.0, 0.25, 3.0]))
    assert np.allclose(arr, [-1.0, 0.0, 2.0])


def test_differentiate_and_antidifferentiate():
    quad = PiecewiseFn([Piece(-np.inf, np.inf, (1.0, 2.0, 3.0))])  # 1 + 2s + 3s^2
    d = quad.differentiate()
    assert d(2.0) == pytest.approx(2.0 + 12.0)
    P = quad.antidifferentiate(0.0)
    assert P(0.0) == 0.0
    assert P(2.0) == pytest.approx(2.0 + 4.0 + 8.0)

    fn = plateau_fn()
    P2 = fn.antidifferentiate(0.0)
    # continuity across breaks and exact values
    assert P2(0.0) == 0.0
    assert P2(1.0) == pytest.approx(0.0)
    assert P2(2.0) == pytest.approx(0.5)
    assert P2(-2.0) == pytest.approx(2.0)
    eps = 1e-9
    assert P2(1.0 + eps) == pytest.approx(P2(1.0 - eps), abs=1e-8)


def test_power_piece_calculus():
    # g(s) = s^2.5 on [0, 2]
    fn = PiecewiseFn([Piece(0.0, 2.0, (0.0,), (1.0, 1.0, 0.0, 2.5))])
    assert fn(1.5) == pytest.approx(1.5**2.5)
    d = fn.differentiate()
    assert d(1.5) == pytest.approx(2.5 * 1.5**1.5)
    P = fn.antidifferentiate(0.0)
    assert P(2.0) == pytest.approx(2.0**3.5 / 3.5)
    inv = fn.invert(increasing=True)
    y = 1.7
    assert inv(y) == pytest.approx(y ** (1 / 2.5), rel=1e-14)


def test_invert_linear_quadratic_and_plateau():
    fn = plateau_fn()
    inv = fn.invert(increasing=True)
    assert inv is not None
    # left-continuity at the plateau value: inf of the level set
    assert inv(0.0) == pytest.approx(0.0, abs=1e-15)
    assert inv(0.5) == pytest.approx(1.5)
    assert inv(-0.5) == pytest.approx(-0.5)
    # quadratic increasing piece with negative curvature
    fn2 = PiecewiseFn([Piece(-2.0, -0.5, (0.0, 0.0, -1.0))])  # -s^2, increasing on s<0
    inv2 = fn2.invert(increasing=True)
    assert inv2(-1.44) == pytest.approx(-1.2)
    # decreasing branch
    fn3 = PiecewiseFn([Piece(0.5, 2.0, (0.0, 0.0, -1.0))])  # -s^2 decreasing on s>0
    inv3 = fn3.invert(increasing=False)
    assert inv3(-2.25) == pytest.approx(1.5)


def test_invert_composes_to_identity():
    fn = plateau_fn()
    inv = fn.invert(increasing=True)
    s = np.linspace(-3.0, 3.0, 301)
    assert np.max(np.abs(fn(inv(s)) - s)) < 1e-12


def test_clipped_and_scale_shift():
    fn = plateau_fn()
    c = fn.clipped(-1.0, 2.0)
    assert c.domain == (-1.0, 2.0)
    assert c(0.5) == 0.0
    neg = fn.scale_values(-2.0)
    assert neg(-1.0) == 2.0
    sh = fn.shift_values(3.0)
    assert sh(0.5) == 3.0


def test_serialization_roundtrip_exact():
    fn = PiecewiseFn([
        Piece(-np.inf, 0.1, (0.123456789012345, 1.0 / 3.0)),
        Piece(0.1, np.inf, (0.0,), (np.pi, 1.0, 0.1, 2.0)),
    ])
    data = fn.to_jsonable()
    back = PiecewiseFn.from_jsonable(data)
    s = np.linspace(-5, 5, 101)
    assert np.array_equal(fn(s), back(s))
    assert back.to_jsonable() == data


def test_from_samples_exact_interpolant():
    xs = np.linspace(0.0, 2.0, 11)
    ys = xs**2
    fn = piecewise_from_samples(xs, ys)
    assert fn(1.0) == pytest.approx(1.0)
    # between knots it is the chord
    assert fn(0.1) == pytest.approx(0.5 * (0.0 + 0.04), rel=1e-12)


def test_bad_constructions():
    with pytest.raises(ValueError):
        PiecewiseFn([])
    with pytest.raises(ValueError):
        PiecewiseFn([Piece(0.0, 1.0, (0.0,)), Piece(2.0, 3.0, (0.0,))])
    with pytest.raises(ValueError):
        piecewise_from_samples([0.0, 0.0, 1.0], [1.0, 2.0, 3.0])
