import numpy as np
import numpy.testing as npt
import pytest

from vacuumflow.errors import BallExitsGrid, CFLViolation, InsufficientHistory
from vacuumflow.maxwell import (
    AnalyticFarField,
    Ball,
    GridField,
    ScalarSeries,
    SeparableSources,
    advected_integral,
    evolve_wave,
    maxwell_residuals,
    sample_scalar_series,
    solution_error,
)
from vacuumflow.presets import advected_setup, dipole_grid, plane_wave_grid


def _empty_grid(n=16, h=0.2, dt=0.08):
    grid = GridField(n, h, dt, SeparableSources(), AnalyticFarField())
    grid.seed_zero()
    return grid


def test_zero_data_stays_zero():
    grid = _empty_grid()
    evolve_wave(grid, 6)
    rep = maxwell_residuals(grid)
    for key in ("gauss", "faraday", "ampere", "nomono", "gauge", "continuity"):
        assert getattr(rep, key) == 0.0
    assert np.all(grid.levels[-1].phi == 0.0)


def test_cfl_violation():
    grid = GridField(16, 0.2, 0.2, SeparableSources(), AnalyticFarField())
    grid.seed_zero()
    with pytest.raises(CFLViolation):
        evolve_wave(grid, 1)


def test_insufficient_history():
    grid = _empty_grid()
    with pytest.raises(InsufficientHistory):
        maxwell_residuals(grid)
    evolve_wave(grid, 5)
    with pytest.raises(InsufficientHistory):
        maxwell_residuals(grid, t_index=0)  # rolled out of the retained window


def test_plane_wave_advances_as_analytic():
    grid, steps, report = plane_wave_grid(48)
    evolve_wave(grid, steps)
    err = solution_error(grid, report)
    assert err <= 0.05, f"plane-wave L2 error {err}"
    rep = maxwell_residuals(grid, report)
    assert 0.0 < rep.gauss < 0.1
    assert rep.continuity == 0.0  # no sources


def test_dipole_gauge_residual_small():
    grid, steps, report = dipole_grid(48)
    evolve_wave(grid, steps)
    rep = maxwell_residuals(grid, report)
    assert 0.0 < rep.gauge < 0.05
    assert 0.0 < rep.continuity < 0.1


def test_gauge_violation_shows_in_gauge_residual():
    clean, steps, report = dipole_grid(48)
    evolve_wave(clean, steps)
    broken, _, _ = dipole_grid(48, gauge_violation=0.08)
    evolve_wave(broken, steps)
    rc = maxwell_residuals(clean, report)
    rb = maxwell_residuals(broken, report)
    assert rb.gauge > 20.0 * rc.gauge
    assert rb.gauss > 20.0 * rc.gauss


def test_grid_dump_binary(tmp_path):
    grid = _empty_grid(n=8)
    paths = grid.dump_binary(str(tmp_path / "dump"))
    assert len(paths) == 4
    raw = np.fromfile(paths[0], dtype=np.int64, count=3)
    npt.assert_array_equal(raw, [8, 8, 8])
    data = np.fromfile(paths[0], dtype=np.float64, offset=24)
    assert data.size == 8**3


def test_advected_static_constant():
    frames = [np.full((12, 12, 12), 2.5) for _ in range(5)]
    series = ScalarSeries(frames=frames, times=np.linspace(0, 1, 5),
                          origin=np.array([-1.1, -1.1, -1.1]), h=0.2)
    vals = advected_integral(series, np.zeros(3), Ball(center0=np.zeros(3), radius=0.5))
    npt.assert_allclose(vals, vals[0], rtol=1e-14)


def test_advected_ball_exits_grid():
    frames = [np.zeros((12, 12, 12)) for _ in range(3)]
    series = ScalarSeries(frames=frames, times=np.array([0.0, 1.0, 2.0]),
                          origin=np.array([-1.1, -1.1, -1.1]), h=0.2)
    with pytest.raises(BallExitsGrid):
        advected_integral(series, np.array([0.9, 0, 0]), Ball(center0=np.zeros(3), radius=0.5))
    with pytest.raises(ValueError):
        advected_integral(series, np.array([1.1, 0, 0]), Ball(center0=np.zeros(3), radius=0.3))


def test_comoving_ball_constant_fixed_ball_varies():
    fld, times, ball, uf = advected_setup()
    series = sample_scalar_series(lambda pts, t: fld.coulomb(pts, t), 48, 0.1, times)
    co = advected_integral(series, uf, ball)
    fixed = advected_integral(series, np.zeros(3), ball)
    co_var = (co.max() - co.min()) / abs(co.mean())
    fx_var = (fixed.max() - fixed.min()) / abs(fixed.mean())
    assert co_var <= 1e-4, f"co-moving variation {co_var}"
    assert fx_var > 1e-2, f"fixed-ball variation {fx_var}"


def test_hard_indicator_is_noisier_than_smooth():
    """shell_width=0 recovers the hard ball, whose staircase noise is why the
    smoothed window is the default."""
    fld, times, ball, uf = advected_setup()
    series = sample_scalar_series(lambda pts, t: fld.coulomb(pts, t), 48, 0.1, times)
    smooth = advected_integral(series, uf, ball)
    hard = advected_integral(series, uf, ball, shell_width=0.0)
    smooth_var = (smooth.max() - smooth.min()) / abs(smooth.mean())
    hard_var = (hard.max() - hard.min()) / abs(hard.mean())
    assert hard_var > 10.0 * smooth_var
