"""Per-dataset Canny settings for chroma edge extraction."""

import os

from .imaging import CannyParams

PROFILES = {
    "imagenet": CannyParams(sigma=1.2, th_high=0.7, th_low=0.2, th_gap=0.4),
    "coco": CannyParams(sigma=1.2, th_high=0.7, th_low=0.2, th_gap=0.4),
    "places": CannyParams(sigma=1.2, th_high=0.7, th_low=0.2, th_gap=0.4),
    "yumi": CannyParams(sigma=1.3, th_high=0.7, th_low=0.2, th_gap=0.4),
    "danbooru": CannyParams(sigma=0.7, th_high=0.8, th_low=0.2, th_gap=0.5),
}

DEFAULT_PROFILE = "imagenet"
PROFILE_ENV = "BLEEDMETER_PROFILE"


def default_profile_name() -> str:
    name = os.environ.get(PROFILE_ENV, DEFAULT_PROFILE)
    if name not in PROFILES:
        raise ValueError(f"{PROFILE_ENV}={name!r} is not one of {sorted(PROFILES)}")
    return name


def get_profile(name: str) -> CannyParams:
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}") from None
