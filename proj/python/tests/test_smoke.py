import numpy as np
import pytest

import florin


def naive_ndnt(volume, t, window):
    d, h, w = volume.shape
    hz, hy, hx = window
    factor = round((1.0 - t) * 1e6)
    out = np.zeros(volume.shape, dtype=np.uint8)
    v = volume.astype(np.int64)
    for z in range(d):
        for y in range(h):
            for x in range(w):
                box = v[max(0, z - hz) : z + hz + 1, max(0, y - hy) : y + hy + 1, max(0, x - hx) : x + hx + 1]
                out[z, y, x] = v[z, y, x] * box.size * 1_000_000 <= int(box.sum()) * factor
    return out


def test_svt_matches_cumsum():
    rng = np.random.default_rng(0)
    v = rng.integers(0, 256, size=(4, 9, 7), dtype=np.uint8)
    expected = v.astype(np.uint64).cumsum(0).cumsum(1).cumsum(2)
    np.testing.assert_array_equal(florin.build_svt(v), expected)


def test_threshold_matches_naive_loop():
    rng = np.random.default_rng(1)
    v = rng.integers(0, 256, size=(3, 11, 13), dtype=np.uint8)
    for t, window in [(0.35, (1, 3, 4)), (0.0, (0, 0, 0)), (0.9, (2, 20, 20))]:
        np.testing.assert_array_equal(florin.ndnt_threshold(v, t, window), naive_ndnt(v, t, window))


def test_sweep_is_nested_and_matches_direct_calls():
    rng = np.random.default_rng(2)
    v = rng.integers(0, 256, size=(5, 16, 16), dtype=np.uint8)
    grid = florin.threshold_grid(0.01)
    assert len(grid) == 101
    masks = florin.ndnt_sweep(v, grid, (1, 4, 4))
    for lo, hi in zip(masks, masks[1:]):
        assert not np.any(hi & ~lo)
    np.testing.assert_array_equal(masks[42], florin.ndnt_threshold(v, grid[42], (1, 4, 4)))


def test_fill_holes_and_labeling():
    ring = np.zeros((1, 8, 8), dtype=bool)
    ring[0, 2:5, 2:5] = True
    ring[0, 3, 3] = False
    assert florin.fill_holes(ring)[0, 3, 3] == 1

    m = np.zeros((2, 6, 6), dtype=np.uint8)
    m[0, 0, 0] = m[1, 1, 1] = 1
    m[0, 4:6, 4:6] = 1
    labels, stats = florin.label_components(m, "volumetric26")
    assert labels.dtype == np.uint32
    assert [s["voxels"] for s in stats] == [4, 2]
    _, planar = florin.label_components(m, "planar8")
    assert len(planar) == 3


def test_phantom_segmentation_and_config_round_trip(tmp_path):
    video = florin.make_eye_phantom(frames=10, noise=6)
    assert video.shape == (10, 240, 320)
    mask, reports = florin.segment_video(video, t_iris=0.3, t_pupil=0.8)
    assert mask.shape == video.shape
    assert len(reports) == 2 and all(r["pupil_found"] for r in reports)
    cy, cx = reports[0]["pupil"]["centroid"][1:]
    assert abs(cy - 119.5) < 1 and abs(cx - 159.5) < 1

    cfg = florin.default_config()
    cfg.update(t_iris=0.3, t_pupil=0.8, combine="and_not")
    florin.save_config(cfg, tmp_path / "cfg.yaml")
    loaded = florin.load_config(tmp_path / "cfg.yaml")
    assert loaded == cfg
    again, _ = florin.segment_video(video, loaded)
    np.testing.assert_array_equal(again, florin.segment_video(video, cfg)[0])


def test_frame_io_round_trip(tmp_path):
    video = florin.make_eye_phantom(frames=3, height=24, width=32, pupil_radius=4, iris_radius=9)
    mask = florin.ndnt_threshold(video, 0.3, (1, 8, 8))
    files = florin.write_masks(mask, tmp_path / "masks", "png", first_index=7)
    assert files[0].endswith("mask_000007.png")

    frames = tmp_path / "frames"
    frames.mkdir()
    from PIL import Image

    for z in range(video.shape[0]):
        Image.fromarray(video[z]).save(frames / f"frame_{z:06d}.png")
    np.testing.assert_array_equal(florin.load_frames(frames), video)
    assert florin.load_frames(frames, frame_limit=2, downsample=(12, 16)).shape == (2, 12, 16)


def test_errors_surface_as_python_exceptions():
    v = np.zeros((2, 4, 4), dtype=np.uint8)
    with pytest.raises(florin.FlorinError):
        florin.ndnt_threshold(v, 1.5)
    with pytest.raises(ValueError):
        florin.segment_video(v, t_iris=-0.1)
    with pytest.raises(ValueError):
        florin.label_components(v, "diagonal")
