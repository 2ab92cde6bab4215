"""PNG decode/encode for RGB images and binary masks."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

PROTOCOL_SIZE = 256


def read_rgb(path, resize_256: bool = False) -> np.ndarray:
    """Decode an image as 8-bit RGB; alpha is dropped."""
    with Image.open(path) as im:
        im = im.convert("RGB")
        if resize_256 and im.size != (PROTOCOL_SIZE, PROTOCOL_SIZE):
            im = im.resize((PROTOCOL_SIZE, PROTOCOL_SIZE), Image.BILINEAR)
        return np.asarray(im, dtype=np.uint8).copy()


def write_rgb(path, img: np.ndarray) -> None:
    Image.fromarray(np.asarray(img, dtype=np.uint8), mode="RGB").save(Path(path), format="PNG")


def read_mask(path, resize_256: bool = False) -> np.ndarray:
    """Decode a mask PNG: any non-zero gray level counts as on."""
    with Image.open(path) as im:
        im = im.convert("L")
        if resize_256 and im.size != (PROTOCOL_SIZE, PROTOCOL_SIZE):
            im = im.resize((PROTOCOL_SIZE, PROTOCOL_SIZE), Image.NEAREST)
        return np.asarray(im) > 0


def write_mask(path, mask: np.ndarray) -> None:
    data = np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8)
    Image.fromarray(data, mode="L").save(Path(path), format="PNG")
