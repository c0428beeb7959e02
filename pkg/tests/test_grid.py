import numpy as np
import pytest

from eulerstab import (
    build_grid,
    energy_inner,
    field_reduce,
    green_apply,
    inner,
    integral,
    lp_norm,
    perp_gradient,
)
from eulerstab.elliptic import conjugate_gradient
from eulerstab.errors import GridMismatch, InvalidSpec
from eulerstab.grid import dirichlet_energy, divergence, laplacian_apply

from helpers import discrete_eigenfield, discrete_lambda, torsion_series


def test_build_rectangle(grid64):
    assert (grid64.ny, grid64.nx) == (63, 63)
    assert grid64.h == pytest.approx(1.0 / 64.0)
    assert grid64.n_interior == 63 * 63


def test_build_disk():
    g = build_grid("disk", n=64, radius=0.5)
    assert abs(g.domain_area - np.pi * 0.25) < 0.02 * np.pi * 0.25


def test_build_invalid():
    with pytest.raises(InvalidSpec):
        build_grid("rectangle", n=4)
    with pytest.raises(InvalidSpec):
        build_grid("rectangle", n=64, lx=-1.0)
    with pytest.raises(InvalidSpec):
        build_grid("disk", n=64, radius=0.0)
    with pytest.raises(InvalidSpec):
        build_grid("hexagon", n=64)


def test_field_validation(grid32):
    with pytest.raises(GridMismatch):
        grid32.field(np.zeros(5))
    with pytest.raises(InvalidSpec):
        grid32.field(np.full(grid32.n_interior, np.nan))
    f = grid32.field(np.ones(grid32.n_interior))
    with pytest.raises(ValueError):
        f.values[0] = 2.0  # immutable


def test_reductions(grid64):
    ones = grid64.field(np.ones(grid64.n_interior))
    assert integral(ones) == pytest.approx(grid64.n_interior * grid64.cell_area)
    # the interior cell sum misses only the one-cell boundary band
    assert abs(integral(ones) - 1.0) < 4.0 * grid64.h
    phi = discrete_eigenfield(grid64)
    assert lp_norm(phi, 2.0) == pytest.approx(1.0, abs=1e-12)
    lam = discrete_lambda(64)
    assert energy_inner(phi, phi) == pytest.approx(1.0 / lam, abs=1e-8)
    assert field_reduce(phi, "lp_norm", p=2.0) == pytest.approx(1.0, abs=1e-12)
    assert field_reduce(ones, "integral") == integral(ones)
    assert field_reduce(phi, "inner", other=phi) == pytest.approx(1.0, abs=1e-12)


def test_green_eigen_identity(grid64):
    lam = discrete_lambda(64)
    phi = discrete_eigenfield(grid64)
    u = green_apply(lam * phi)
    assert lp_norm(u - phi, 2.0) < 1e-8


def test_green_torsion_center():
    g = build_grid("rectangle", n=128)
    u = green_apply(g.field(np.ones(g.n_interior)))
    x, y = g.coords()
    ic = int(np.argmin((x - 0.5) ** 2 + (y - 0.5) ** 2))
    exact = torsion_series(0.5, 0.5)
    assert abs(u.values[ic] - exact) < 0.01 * exact


def test_green_zero_and_backends(grid32):
    zero = grid32.zeros()
    assert np.all(green_apply(zero).values == 0.0)
    rng = np.random.default_rng(0)
    f = grid32.field(rng.standard_normal(grid32.n_interior))
    direct = green_apply(f, method="direct")
    cg = green_apply(f, method="cg")
    assert lp_norm(direct - cg, 2.0) < 1e-9


def test_cg_matches_direct_solution(grid32):
    rng = np.random.default_rng(3)
    b = rng.standard_normal(grid32.n_interior)
    x = conjugate_gradient(grid32.laplacian, b)
    assert np.linalg.norm(grid32.laplacian @ x - b) <= 1e-11 * np.linalg.norm(b)


def test_green_symmetry_positivity_poincare(grid32):
    rng = np.random.default_rng(1)
    lam = discrete_lambda(32)
    for _ in range(5):
        f = grid32.field(rng.standard_normal(grid32.n_interior))
        gf = grid32.field(rng.standard_normal(grid32.n_interior))
        sym = abs(energy_inner(f, gf) - energy_inner(gf, f))
        assert sym < 1e-10 * lp_norm(f, 2.0) * lp_norm(gf, 2.0)
        quad = energy_inner(f, f)
        assert quad > 0.0
        assert quad <= inner(f, f) / lam + 1e-10


def test_solve_then_apply_roundtrip(grid32):
    rng = np.random.default_rng(2)
    f = grid32.field(rng.standard_normal(grid32.n_interior))
    back = laplacian_apply(green_apply(f))
    assert lp_norm(back - f, 2.0) < 1e-9 * lp_norm(f, 2.0)


def test_perp_gradient_linear_field(grid32):
    # psi = y has unit d_y; exact at nodes whose stencil avoids the boundary
    x, y = grid32.coords()
    psi = grid32.field(y)
    vel = perp_gradient(psi)
    core = (
        (x > 2 * grid32.h) & (x < 1 - 2 * grid32.h)
        & (y > 2 * grid32.h) & (y < 1 - 2 * grid32.h)
    )
    assert np.max(np.abs(vel.u[core] - 1.0)) < 1e-12
    assert np.max(np.abs(vel.v[core])) < 1e-12


def test_perp_gradient_divergence_free(grid64):
    psi = green_apply(grid64.field_from_fn(lambda x, y: np.sin(3 * x + 1) * np.cos(2 * y)))
    vel = perp_gradient(psi)
    div = divergence(vel)
    assert lp_norm(div, 2.0) < 1e-11 * max(1.0, vel.max_speed)


def test_perp_gradient_constant_field(grid32):
    psi = grid32.field(np.full(grid32.n_interior, 0.0))
    vel = perp_gradient(psi)
    assert vel.max_speed == 0.0


def test_dirichlet_energy_matches_eigenvalue(grid64):
    phi = discrete_eigenfield(grid64)
    assert dirichlet_energy(phi) == pytest.approx(discrete_lambda(64), rel=1e-12)


def test_grid_mismatch_between_grids(grid32, grid64):
    f32 = grid32.zeros()
    f64 = grid64.zeros()
    with pytest.raises(GridMismatch):
        inner(f32, f64)
