"""Backend equivalence: the compiled and numpy kernel paths must agree."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from driftlab import _kernels
from driftlab.backend import HAVE_NUMBA

pytestmark = pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")


def _rand(shape, seed):
    return np.random.Generator(np.random.PCG64(seed)).standard_normal(shape)


@given(st.integers(0, 1000), st.sampled_from([0.1, 0.25, 0.5]))
def test_bmo_backends_agree_1d(seed, radius):
    v = _rand(64, seed)
    a = _kernels.bmo_oscillation(v, radius, stride=1, backend="numba")
    b = _kernels.bmo_oscillation(v, radius, stride=1, backend="numpy")
    assert a == pytest.approx(b, rel=1e-12)


@given(st.integers(0, 1000))
def test_bmo_backends_agree_2d(seed):
    v = _rand((16, 16), seed)
    a = _kernels.bmo_oscillation(v, 0.25, stride=2, backend="numba")
    b = _kernels.bmo_oscillation(v, 0.25, stride=2, backend="numpy")
    assert a == pytest.approx(b, rel=1e-12)


@given(st.integers(0, 1000))
def test_singular_backends_agree(seed):
    v = _rand(64, seed)
    K = np.abs(_rand(64, seed + 1))
    K[0] = 0.0
    a = _kernels.singular_kernel_apply(v, K, 1.0 / 64, backend="numba")
    b = _kernels.singular_kernel_apply(v, K, 1.0 / 64, backend="numpy")
    assert np.max(np.abs(a - b)) < 1e-12 * max(np.max(np.abs(a)), 1.0)


@given(st.integers(0, 1000), st.sampled_from([0.1, 0.3, 0.45]))
def test_holder_backends_agree(seed, beta):
    v = _rand(48, seed)
    a = _kernels.holder_pair_max(v, beta, backend="numba")
    b = _kernels.holder_pair_max(v, beta, backend="numpy")
    assert a == pytest.approx(b, rel=1e-12)


def test_holder_backends_agree_2d():
    v = _rand((12, 12), 7)
    a = _kernels.holder_pair_max(v, 0.3, backend="numba")
    b = _kernels.holder_pair_max(v, 0.3, backend="numpy")
    assert a == pytest.approx(b, rel=1e-12)


def test_unknown_backend_rejected():
    with pytest.raises(ValueError, match="backend"):
        _kernels.bmo_oscillation(_rand(16, 0), 0.25, backend="fortran")


def test_ball_offsets_counts():
    (offs,) = _kernels.ball_offsets(1, 16, 0.25)
    # nodes within distance 1/4 of a node: offsets 0..4 and 12..15
    assert len(offs) == 9
    ii, jj = _kernels.ball_offsets(2, 16, 0.125)
    assert len(ii) == len(jj) == 13
