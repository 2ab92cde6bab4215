import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _synth import flat_lab
from bleedmeter.errors import DimensionMismatch, EmptyRegion
from bleedmeter.imaging import LabImage, rgb_to_lab, sobel_magnitude
from bleedmeter.metrics import (
    FULL,
    IDENTICAL,
    KernelSpec,
    consistency_score,
    edge_fidelity,
    local_region,
    mse,
    psnr,
    s_diff,
)
from bleedmeter.scribble import RegionMask


def random_rgb(rng, shape=(16, 16)):
    return rng.integers(0, 256, (*shape, 3), dtype=np.uint8)


def random_lab(rng, shape=(16, 16)):
    return rgb_to_lab(random_rgb(rng, shape))


def mse_loops(x, y, region):
    total, count = 0.0, 0
    for i in range(x.shape[0]):
        for j in range(x.shape[1]):
            if region[i, j]:
                for c in range(x.shape[2]):
                    total += (float(x[i, j, c]) - float(y[i, j, c])) ** 2
                    count += 1
    return total / count


def masked_sobel_oracle(x, y, where):
    # Mean over both chroma planes of the squared Sobel difference, written out pixel by pixel.
    vals = []
    for px, py in ((x.a, y.a), (x.b, y.b)):
        sx, sy = sobel_magnitude(px), sobel_magnitude(py)
        for i, j in zip(*np.nonzero(where)):
            vals.append((sx[i, j] - sy[i, j]) ** 2)
    return sum(vals) / len(vals)


class TestMse:
    def test_equal_inputs(self):
        x = random_rgb(np.random.default_rng(0))
        assert mse(x, x) == 0.0

    def test_constant_offset(self):
        x = np.full((5, 5, 3), 10, dtype=np.uint8)
        assert mse(x, x + 7) == 49.0

    def test_region_matches_loops(self):
        rng = np.random.default_rng(1)
        x, y = random_rgb(rng, (8, 8)), random_rgb(rng, (8, 8))
        region = np.zeros((8, 8), bool)
        region[:, :4] = True
        assert mse(x, y, region) == pytest.approx(mse_loops(x, y, region), rel=1e-12)

    def test_empty_region(self):
        x = np.zeros((4, 4, 3), dtype=np.uint8)
        with pytest.raises(EmptyRegion):
            mse(x, x, np.zeros((4, 4), bool))

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            mse(np.zeros((4, 4)), np.zeros((4, 5)))


class TestPsnr:
    def test_offset_16(self):
        gt = np.full((10, 10, 3), 100, dtype=np.uint8)
        value = psnr(gt + 16, gt)
        assert value == pytest.approx(10 * math.log10(255**2 / 256), abs=1e-12)
        assert value == pytest.approx(24.05, abs=0.01)

    def test_identical(self):
        x = random_rgb(np.random.default_rng(2))
        assert psnr(x, x) is IDENTICAL
        assert str(IDENTICAL) == "identical"

    def test_full_region_equals_global(self):
        rng = np.random.default_rng(3)
        x, y = random_rgb(rng), random_rgb(rng)
        edges = rng.random((16, 16)) < 0.1
        full = local_region(edges, FULL)
        assert abs(psnr(x, y, full) - psnr(x, y)) < 1e-9

    def test_local_identical_but_global_not(self):
        x = np.zeros((20, 20, 3), dtype=np.uint8)
        y = x.copy()
        y[0, 0] = 50
        edges = np.zeros((20, 20), bool)
        edges[15, 15] = True
        assert psnr(x, y, local_region(edges, KernelSpec(7))) is IDENTICAL
        assert psnr(x, y) is not IDENTICAL

    def test_rejects_float_input(self):
        with pytest.raises(ValueError):
            psnr(np.zeros((4, 4, 3)), np.zeros((4, 4, 3)))


class TestKernelSpec:
    def test_parse(self):
        assert KernelSpec.parse("7") == KernelSpec(7)
        assert KernelSpec.parse("Full").is_full
        assert str(KernelSpec(9)) == "9" and str(FULL) == "full"

    @pytest.mark.parametrize("size", [0, 4, -3])
    def test_invalid(self, size):
        with pytest.raises(ValueError):
            KernelSpec(size)


class TestLocalRegion:
    def test_single_pixel_window(self):
        e = np.zeros((15, 15), bool)
        e[7, 7] = True
        r = local_region(e, KernelSpec(7))
        assert r.sum() == 49 and r[4:11, 4:11].all()

    def test_full(self):
        assert local_region(np.zeros((5, 6), bool), FULL).all()

    def test_diagonal_union(self):
        e = np.zeros((16, 16), bool)
        for k in range(5):
            e[4 + k, 4 + k] = True
        oracle = np.zeros_like(e)
        for i, j in zip(*np.nonzero(e)):
            oracle[i - 1 : i + 2, j - 1 : j + 2] = True
        r = local_region(e, KernelSpec(3))
        assert np.array_equal(r, oracle)
        # 5 windows of 9 pixels, consecutive ones share 4.
        assert r.sum() == 5 * 9 - 4 * 4


class TestSDiff:
    def test_zero_for_same_image(self):
        x = random_lab(np.random.default_rng(4))
        da, db = s_diff(x, x)
        assert not da.any() and not db.any()

    def test_sign(self):
        a = np.zeros((12, 12))
        a[:, 6:] = 40.0
        sharp = flat_lab(a, np.zeros_like(a))
        flat = flat_lab(np.full_like(a, 20.0), np.zeros_like(a))
        da, db = s_diff(sharp, flat)
        assert da.max() > 0 and da.min() == 0 and not db.any()
        assert np.array_equal(s_diff(flat, sharp)[0], -da)

    def test_matches_direct_sobel(self):
        rng = np.random.default_rng(5)
        x, y = random_lab(rng), random_lab(rng)
        da, db = s_diff(x, y)
        assert np.array_equal(da, sobel_magnitude(x.a) - sobel_magnitude(y.a))
        assert np.array_equal(db, sobel_magnitude(x.b) - sobel_magnitude(y.b))


class TestSobelMetrics:
    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_identities(self, seed):
        rng = np.random.default_rng(seed)
        x = random_lab(rng)
        m = rng.random((16, 16)) < 0.4
        m[0, 0], m[-1, -1] = True, False
        assert edge_fidelity(x, x, m) == 0.0
        assert consistency_score(x, x, m) == 0.0

    def test_edge_fidelity_oracle(self):
        rng = np.random.default_rng(6)
        x, y = random_lab(rng), random_lab(rng)
        m = np.zeros((16, 16), bool)
        m[3:9, 5:12] = True
        assert edge_fidelity(x, y, m) == pytest.approx(masked_sobel_oracle(x, y, m), rel=1e-12)
        assert edge_fidelity(x, y, RegionMask(m, 3)) == edge_fidelity(x, y, m)

    def test_consistency_uses_complement(self):
        rng = np.random.default_rng(7)
        x, y = random_lab(rng), random_lab(rng)
        m = np.zeros((16, 16), bool)
        m[3:9, 5:12] = True
        assert consistency_score(x, y, m) == pytest.approx(masked_sobel_oracle(x, y, ~m), rel=1e-12)
        assert consistency_score(x, y, m) == pytest.approx(edge_fidelity(x, y, ~m), rel=1e-15)

    def test_changes_outside_region_ignored_by_fidelity(self):
        rng = np.random.default_rng(8)
        x = random_lab(rng, (24, 24))
        m = np.zeros((24, 24), bool)
        m[2:6, 2:6] = True
        y = LabImage(x.L, x.a.copy(), x.b.copy())
        y.a[15:, 15:] += 30.0
        assert edge_fidelity(y, x, m) == 0.0
        assert consistency_score(y, x, m) > 0.0

    def test_empty_regions(self):
        x = random_lab(np.random.default_rng(9))
        with pytest.raises(EmptyRegion):
            edge_fidelity(x, x, np.zeros((16, 16), bool))
        with pytest.raises(EmptyRegion):
            consistency_score(x, x, np.ones((16, 16), bool))
