import numpy as np
import pytest

from curvedual import _kernels
from curvedual.spectral import HarmonicCoeffs, build_grid, chart_second_partials, \
    surface_gradient, synthesize


def _fields(L_max=12, nb=3, seed=2):
    grid = build_grid(L_max)
    rng = np.random.default_rng(seed)
    R = np.empty((grid.n_nodes, nb))
    RT = np.empty_like(R)
    RP = np.empty_like(R)
    RTT = np.empty_like(R)
    RTP = np.empty_like(R)
    RPP = np.empty_like(R)
    for j in range(nb):
        c = HarmonicCoeffs.zeros(L_max)
        c[0, 0] = (np.pi / 4) * np.sqrt(4 * np.pi)
        for l in range(1, 5):
            for m in range(-l, l + 1):
                c[l, m] = 0.01 * rng.standard_normal()
        R[:, j] = synthesize(grid, c)
        gr = surface_gradient(grid, c)
        raw = chart_second_partials(grid, c)
        RT[:, j], RP[:, j] = gr[:, 0], gr[:, 1]
        RTT[:, j], RTP[:, j], RPP[:, j] = raw[:, 0], raw[:, 1], raw[:, 2]
    return grid, (R, RT, RP, RTT, RTP, RPP)


def test_backend_name_reported():
    assert _kernels.backend_name() in ("numba", "numpy")


def test_numpy_path_matches_full_pipeline():
    grid, fields = _fields()
    k1, k2 = _kernels._kappa_batch_numpy(grid.theta, grid.phi, *fields)
    out = _kernels.fundamental_forms(grid.theta[:, None], grid.phi[:, None], *fields)
    assert np.max(np.abs(k1 - out["kappa"][..., 0])) == 0.0
    assert np.max(np.abs(k2 - out["kappa"][..., 1])) == 0.0


@pytest.mark.skipif(not _kernels._HAVE_NUMBA, reason="numba unavailable")
def test_numba_and_numpy_paths_agree():
    grid, fields = _fields()
    k1_jit = np.empty_like(fields[0])
    k2_jit = np.empty_like(fields[0])
    _kernels._kappa_batch_jit(grid.theta, grid.phi, *fields, k1_jit, k2_jit)
    k1_np, k2_np = _kernels._kappa_batch_numpy(grid.theta, grid.phi, *fields)
    assert np.max(np.abs(k1_jit - k1_np)) <= 1e-12
    assert np.max(np.abs(k2_jit - k2_np)) <= 1e-12


def test_selected_backend_sphere_curvature():
    grid, _ = _fields(nb=1)
    r0 = np.pi / 3
    N = grid.n_nodes
    const = np.full((N, 1), r0)
    zero = np.zeros((N, 1))
    k1, k2 = _kernels.kappa_batch(grid.theta, grid.phi, const, zero, zero,
                                  zero, zero, zero)
    assert np.max(np.abs(k1 - 1 / np.tan(r0))) <= 1e-12
    assert np.max(np.abs(k2 - 1 / np.tan(r0))) <= 1e-12


def test_cross4_orthogonality():
    rng = np.random.default_rng(0)
    u, v, w = rng.standard_normal((3, 10, 4))
    c = _kernels.cross4(u, v, w)
    for other in (u, v, w):
        assert np.max(np.abs(np.einsum("ni,ni->n", c, other))) <= 1e-12
