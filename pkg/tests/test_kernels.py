"""Both kernel backends against literal-definition oracles and each other."""

import numpy as np
import pytest

from audiobench import kernels
from audiobench.kernels import fallback

from oracles import naive_upfirdn

try:
    from audiobench.kernels import _fir as ext
except ImportError:
    ext = None

BACKENDS = [fallback] if ext is None else [fallback, ext]


def _ids(mods):
    return [m.BACKEND for m in mods]


@pytest.mark.parametrize("impl", BACKENDS, ids=_ids(BACKENDS))
def test_convolve_valid_matches_numpy(impl):
    rng = np.random.default_rng(3)
    for n, m in [(10, 1), (50, 7), (400, 255), (64, 64)]:
        x = np.ascontiguousarray(rng.standard_normal(n))
        h = np.ascontiguousarray(rng.standard_normal(m))
        got = impl.convolve_valid(x, h)
        want = np.convolve(x, h, mode="valid")
        assert got.shape == want.shape
        np.testing.assert_allclose(got, want, rtol=0, atol=1e-12)


@pytest.mark.parametrize("impl", BACKENDS, ids=_ids(BACKENDS))
def test_convolve_valid_rejects_short_input(impl):
    with pytest.raises(ValueError):
        impl.convolve_valid(np.zeros(3), np.zeros(4))


@pytest.mark.parametrize("impl", BACKENDS, ids=_ids(BACKENDS))
@pytest.mark.parametrize("up,down,offset", [(1, 1, 0), (1, 3, 0), (3, 1, 0), (2, 3, 5), (320, 441, 160), (7, 5, 64)])
def test_upfirdn_matches_zero_stuffed_convolution(impl, up, down, offset):
    rng = np.random.default_rng(up * 1000 + down)
    x = np.ascontiguousarray(rng.standard_normal(300))
    h = np.ascontiguousarray(rng.standard_normal(4 * up + 1))
    got = impl.upfirdn(h, x, up, down, offset)
    want = naive_upfirdn(h, x, up, down, offset)
    assert got.shape == want.shape
    np.testing.assert_allclose(got, want, rtol=0, atol=1e-10)


@pytest.mark.parametrize("impl", BACKENDS, ids=_ids(BACKENDS))
def test_upfirdn_explicit_n_out(impl):
    x = np.ascontiguousarray(np.random.default_rng(0).standard_normal(100))
    h = np.ascontiguousarray(np.ones(5))
    got = impl.upfirdn(h, x, 2, 3, offset=2, n_out=17)
    assert got.shape == (17,)
    np.testing.assert_allclose(got, naive_upfirdn(h, x, 2, 3, 2, 17), atol=1e-12)


@pytest.mark.skipif(ext is None, reason="compiled extension not built")
def test_backends_agree():
    rng = np.random.default_rng(11)
    x = np.ascontiguousarray(rng.standard_normal(2000))
    h = np.ascontiguousarray(rng.standard_normal(129))
    np.testing.assert_allclose(
        ext.convolve_valid(x, h), fallback.convolve_valid(x, h), atol=1e-11
    )
    np.testing.assert_allclose(
        ext.upfirdn(h, x, 4, 7, 64), fallback.upfirdn(h, x, 4, 7, 64), atol=1e-11
    )


def test_dispatch_layer_usable():
    x = np.arange(32, dtype=float)
    h = np.ones(3) / 3
    assert kernels.convolve_valid(x, h).shape == (30,)
    assert kernels.BACKEND in ("cython", "python")
