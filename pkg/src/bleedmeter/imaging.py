"""Color conversion and low-level filtering.

Images are plain numpy arrays: an RGB image is ``uint8`` with shape
``(H, W, 3)``, a plane is a 2D ``float64`` array and a binary mask is a 2D
``bool`` array.  Lab images are wrapped in :class:`LabImage` so the chroma
planes can be addressed by name.

Every convolution pads by replicating the border pixels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DegenerateInput, check_same_shape

# IEC 61966-2-1 linear sRGB -> XYZ, D65.
_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
_XYZ_TO_RGB = np.linalg.inv(_RGB_TO_XYZ)
# White point taken from the matrix itself so that RGB white maps to a = b = 0.
D65_WHITE = _RGB_TO_XYZ.sum(axis=1)

_DELTA = 6.0 / 29.0

# Sobel kernels written for correlation: x grows to the right, y grows down.
SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
SOBEL_Y = SOBEL_X.T.copy()


@dataclass(frozen=True)
class LabImage:
    """CIE Lab planes of one image, each a ``(H, W)`` float array."""

    L: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        check_same_shape(self.L, self.a, self.b, names=("L", "a", "b"))
        for plane in (self.L, self.a, self.b):
            if plane.ndim != 2:
                raise ValueError("Lab planes must be 2D")

    @classmethod
    def from_array(cls, lab: np.ndarray) -> "LabImage":
        lab = np.asarray(lab, dtype=np.float64)
        return cls(lab[..., 0].copy(), lab[..., 1].copy(), lab[..., 2].copy())

    @property
    def shape(self) -> tuple[int, int]:
        return self.L.shape

    @property
    def chroma(self) -> tuple[np.ndarray, np.ndarray]:
        return self.a, self.b

    def to_array(self) -> np.ndarray:
        return np.stack([self.L, self.a, self.b], axis=-1)


@dataclass(frozen=True)
class CannyParams:
    """Canny hyper-parameters; thresholds are fractions of the max gradient."""

    sigma: float
    th_high: float
    th_low: float
    th_gap: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not 0 < self.th_low < self.th_high <= 1:
            raise ValueError(
                f"need 0 < th_low < th_high <= 1, got {self.th_low}, {self.th_high}"
            )
        if not 0 <= self.th_gap < self.th_high:
            raise ValueError(f"need 0 <= th_gap < th_high, got {self.th_gap}")

    def relaxed(self) -> "CannyParams":
        """Parameters for the initial colorization: high threshold lowered by the gap."""
        return CannyParams(self.sigma, self.th_high - self.th_gap, self.th_low, 0.0)

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "th_high": self.th_high,
            "th_low": self.th_low,
            "th_gap": self.th_gap,
        }


def as_rgb(img) -> np.ndarray:
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) RGB array, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        raise ValueError(f"expected uint8 RGB data, got {arr.dtype}")
    return arr


def _srgb_to_linear(c):
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def _linear_to_srgb(c):
    c = np.clip(c, 0.0, 1.0)
    return np.where(c <= 0.0031308, 12.92 * c, 1.055 * c ** (1 / 2.4) - 0.055)


def _lab_f(t):
    return np.where(t > _DELTA**3, np.cbrt(t), t / (3 * _DELTA**2) + 4.0 / 29.0)


def _lab_f_inv(t):
    return np.where(t > _DELTA, t**3, 3 * _DELTA**2 * (t - 4.0 / 29.0))


def rgb_to_lab(img) -> LabImage:
    """Convert 8-bit sRGB to CIE Lab under the D65 white point."""
    rgb = as_rgb(img).astype(np.float64) / 255.0
    xyz = _srgb_to_linear(rgb) @ _RGB_TO_XYZ.T
    f = _lab_f(xyz / D65_WHITE)
    L = 116.0 * f[..., 1] - 16.0
    a = 500.0 * (f[..., 0] - f[..., 1])
    b = 200.0 * (f[..., 1] - f[..., 2])
    # Black has f = 4/29 in exact arithmetic; kill the rounding residue.
    return LabImage(np.clip(L, 0.0, 100.0), a, b)


def lab_to_rgb(lab: LabImage) -> np.ndarray:
    """Inverse of :func:`rgb_to_lab`; out-of-gamut colors are clamped."""
    fy = (lab.L + 16.0) / 116.0
    fx = fy + lab.a / 500.0
    fz = fy - lab.b / 200.0
    xyz = np.stack([_lab_f_inv(fx), _lab_f_inv(fy), _lab_f_inv(fz)], axis=-1) * D65_WHITE
    rgb = _linear_to_srgb(xyz @ _XYZ_TO_RGB.T)
    return np.clip(np.rint(rgb * 255.0), 0, 255).astype(np.uint8)


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Normalized 1D Gaussian taps over the radius ``ceil(3 * sigma)``."""
    radius = math.ceil(3 * sigma)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(x**2) / (2 * sigma**2))
    return k / k.sum()


def _blur_axis(p: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    radius = len(kernel) // 2
    pad = [(0, 0), (0, 0)]
    pad[axis] = (radius, radius)
    padded = np.pad(p, pad, mode="edge")
    n = p.shape[axis]
    # Accumulate weighted deviations from the center pixel: a constant input
    # then yields exactly zero and the output equals the input bit for bit.
    acc = np.zeros_like(p)
    for offset, w in enumerate(kernel):
        if offset == radius:
            continue
        shifted = padded[offset : offset + n] if axis == 0 else padded[:, offset : offset + n]
        acc += w * (shifted - p)
    return np.clip(p + acc, p.min(), p.max())


def gaussian_blur(p, sigma: float) -> np.ndarray:
    """Separable Gaussian smoothing with replicate padding."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    p = np.asarray(p, dtype=np.float64)
    kernel = gaussian_kernel(sigma)
    return _blur_axis(_blur_axis(p, kernel, 0), kernel, 1)


def sobel_gradients(p) -> tuple[np.ndarray, np.ndarray]:
    """Horizontal and vertical Sobel responses (x right, y down)."""
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 2 or min(p.shape) < 3:
        raise ValueError(f"Sobel needs a 2D plane of at least 3x3, got {p.shape}")
    gx = ndimage.correlate(p, SOBEL_X, mode="nearest")
    gy = ndimage.correlate(p, SOBEL_Y, mode="nearest")
    return gx, gy


def sobel_magnitude(p) -> np.ndarray:
    gx, gy = sobel_gradients(p)
    return np.hypot(gx, gy)


# Neighbor offsets (drow, dcol) along the gradient for the four direction bins.
_NMS_OFFSETS = {0: (0, 1), 1: (1, 1), 2: (1, 0), 3: (1, -1)}


def _non_max_suppression(mag: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    bins = (np.floor((angle + 22.5) / 45.0).astype(np.int64)) % 4
    padded = np.pad(mag, 1, mode="edge")
    h, w = mag.shape
    keep = np.zeros(mag.shape, dtype=bool)
    for b, (dr, dc) in _NMS_OFFSETS.items():
        ahead = padded[1 + dr : 1 + dr + h, 1 + dc : 1 + dc + w]
        behind = padded[1 - dr : 1 - dr + h, 1 - dc : 1 - dc + w]
        # Strict on one side so a two-pixel plateau keeps a single pixel.
        keep |= (bins == b) & (mag >= behind) & (mag > ahead)
    return keep & (mag > 0)


def canny(p, params: CannyParams, *, strict: bool = False) -> np.ndarray:
    """Five-step Canny edge extractor returning a boolean edge mask.

    Blur, Sobel gradient, non-maximum suppression over four direction bins,
    double threshold relative to the plane's maximum gradient magnitude, and
    hysteresis tracking of weak pixels 8-connected to strong ones.

    A plane with no gradient after blurring yields an empty mask, or raises
    :class:`DegenerateInput` when ``strict`` is set.
    """
    p = np.asarray(p, dtype=np.float64)
    if not np.all(np.isfinite(p)):
        raise ValueError("plane contains non-finite values")
    smoothed = gaussian_blur(p, params.sigma)
    gx, gy = sobel_gradients(smoothed)
    mag = np.hypot(gx, gy)
    peak = mag.max()
    if peak == 0:
        if strict:
            raise DegenerateInput("plane is constant after smoothing")
        return np.zeros(p.shape, dtype=bool)

    thin = _non_max_suppression(mag, gx, gy)
    weak = thin & (mag >= params.th_low * peak)
    strong = thin & (mag >= params.th_high * peak)
    labels, n = ndimage.label(weak, structure=np.ones((3, 3), dtype=bool))
    if n == 0:
        return weak
    seeded = np.zeros(n + 1, dtype=bool)
    seeded[labels[strong]] = True
    seeded[0] = False
    return seeded[labels]
