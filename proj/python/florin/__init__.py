"""Learning-free volumetric iris segmentation (NDNT + morphology)."""

import json
from os import PathLike
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import _florin
from ._florin import (
    FlorinError,
    NoPupilFound,
    build_svt,
    fill_holes,
    label_components,
    load_frames,
    make_eye_phantom,
    ndnt_sweep,
    ndnt_threshold,
    threshold_grid,
    write_masks,
)

__all__ = [
    "FlorinError",
    "NoPupilFound",
    "build_svt",
    "default_config",
    "fill_holes",
    "label_components",
    "load_config",
    "load_frames",
    "make_eye_phantom",
    "ndnt_sweep",
    "ndnt_threshold",
    "save_config",
    "segment_video",
    "sweep",
    "threshold_grid",
    "write_masks",
]

Config = Dict[str, Any]


def default_config() -> Config:
    """Pipeline defaults as a dict (t_iris, t_pupil, window_iris, ...)."""
    return json.loads(_florin.default_config_json())


def _config_json(config: Optional[Config], overrides: Dict[str, Any]) -> str:
    merged = dict(config or {})
    merged.update(overrides)
    for key in ("window_iris", "window_pupil"):
        if key in merged:
            merged[key] = [int(v) for v in merged[key]]
    return json.dumps(merged)


def segment_video(
    video: np.ndarray, config: Optional[Config] = None, **overrides: Any
) -> Tuple[np.ndarray, List[Dict[str, Any]]]:
    """Segments a (frames, height, width) uint8 video.

    Returns the 0/1 mask and one report per block. Missing config keys take
    their defaults.
    """
    mask, reports = _florin.segment_video(video, _config_json(config, overrides))
    return mask, json.loads(reports)


def save_config(config: Config, path: Union[str, PathLike]) -> None:
    _florin.save_config(_config_json(config, {}), path)


def load_config(path: Union[str, PathLike]) -> Config:
    return json.loads(_florin.load_config(path))


def sweep(
    video: np.ndarray, thresholds: Optional[Sequence[float]] = None, window=(1, 128, 128)
) -> Dict[float, np.ndarray]:
    """Masks for every threshold (default: the 0.01 grid), keyed by t."""
    ts = list(thresholds) if thresholds is not None else threshold_grid(0.01)
    return dict(zip(ts, ndnt_sweep(video, ts, tuple(window))))
