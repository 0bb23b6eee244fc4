import numpy as np
import pytest

from reference import ref_cut, ref_mean, ref_mean_image, ref_mix, ref_select
from synth import random_natural, scene_rgb

import sgmask as sg
from sgmask.augment import augment_one, grid_cut, grid_mean, grid_mix
from sgmask.core import compose, masked_ratio, pixel_mask, select_superpixels


def make_grid(labels):
    labels = np.asarray(labels, dtype=np.int32)
    return sg.SuperpixelGrid(labels, int(labels.max()) + 1)


def selection(*flags):
    return sg.SelectionMask(np.array(flags, dtype=bool))


TWO_BANDS = [[0, 0], [1, 1]]


def test_cut_examples():
    img = sg.Image.from_array(np.full((2, 2), 255, np.uint8))
    grid = make_grid(TWO_BANDS)
    out = grid_cut(img, grid, selection(True, False))
    assert out.data[:, :, 0].tolist() == [[0, 0], [255, 255]]
    untouched = grid_cut(img, grid, selection(False, False))
    assert np.array_equal(untouched.data, img.data)


def test_mean_examples():
    img = sg.Image.from_array(np.array([[0, 2], [4, 6]], np.uint8))
    grid = make_grid([[0, 0], [0, 0]])
    out = grid_mean(img, grid, selection(True))
    assert (out.data == 3).all()
    # mean of a constant superpixel is the constant
    img2 = sg.Image.from_array(np.full((2, 2), 9, np.uint8))
    assert np.array_equal(grid_mean(img2, grid, selection(True)).data, img2.data)
    # exact half rounds up
    img3 = sg.Image.from_array(np.array([[1, 2]], np.uint8))
    assert (grid_mean(img3, make_grid([[0, 0]]), selection(True)).data == 2).all()


def test_mix_examples():
    i = sg.Image.from_array(np.full((2, 2), 10, np.uint8))
    j = sg.Image.from_array(np.full((2, 2), 200, np.uint8))
    grid = make_grid(TWO_BANDS)
    out = grid_mix(i, j, grid, selection(False, True))
    assert out.data[:, :, 0].tolist() == [[10, 10], [200, 200]]
    assert np.array_equal(grid_mix(i, j, grid, selection(False, False)).data, i.data)
    assert np.array_equal(grid_mix(i, j, grid, selection(True, True)).data, j.data)


def test_mix_constraints():
    i = sg.Image.from_array(np.zeros((4, 4), np.uint8))
    small = sg.Image.from_array(np.zeros((3, 4), np.uint8))
    grid = make_grid(np.zeros((4, 4), np.int32))
    with pytest.raises(sg.SizeConstraintError):
        grid_mix(i, small, grid, selection(True))
    rgb = sg.Image.from_array(np.zeros((4, 4, 3), np.uint8))
    with pytest.raises(sg.DimensionMismatchError):
        grid_mix(i, rgb, grid, selection(True))


def test_mix_larger_partner_anchored_top_left():
    i = sg.Image.from_array(np.zeros((2, 2), np.uint8))
    big = np.arange(20, dtype=np.uint8).reshape(4, 5)
    j = sg.Image.from_array(big)
    grid = make_grid([[0, 0], [1, 1]])
    out = grid_mix(i, j, grid, selection(True, True))
    assert np.array_equal(out.data[:, :, 0], big[:2, :2])


def test_dimension_guards():
    img = sg.Image.from_array(np.zeros((4, 4), np.uint8))
    grid = make_grid(np.zeros((3, 4), np.int32))
    for op in (grid_cut, grid_mean):
        with pytest.raises(sg.DimensionMismatchError):
            op(img, grid, selection(True))


@pytest.mark.parametrize("channels", [1, 3])
@pytest.mark.parametrize("case", range(4))
def test_operators_match_naive_reference(case, channels):
    arr = random_natural(100 + case, 40, 48, channels)
    img = sg.Image.from_array(arr)
    grid = sg.slic_segment(img, sg.SlicParams(superpixels=10 + 7 * case))
    k = grid.superpixel_count
    seed = 1000 + case
    sel = select_superpixels(grid, 0.45, seed)
    flags = ref_select(k, 0.45, seed)
    assert sel.flags.tolist() == flags
    parr = random_natural(200 + case, 44, 50, channels)
    partner = sg.Image.from_array(parr)
    assert np.array_equal(grid_cut(img, grid, sel).data, ref_cut(arr, grid.labels, flags))
    assert np.array_equal(grid_mean(img, grid, sel).data, ref_mean(arr, grid.labels, flags))
    assert np.array_equal(
        grid_mix(img, partner, grid, sel).data, ref_mix(arr, parr, grid.labels, flags)
    )


def test_unification_with_compose():
    arr = random_natural(42, 32, 36, 3)
    img = sg.Image.from_array(arr)
    grid = sg.slic_segment(img, sg.SlicParams(superpixels=14))
    sel = select_superpixels(grid, 0.5, 5)
    mask = pixel_mask(grid, sel)

    zero = sg.Image.from_array(np.zeros_like(arr))
    assert np.array_equal(grid_cut(img, grid, sel).data, compose(img, zero, mask).data)

    mean_j = sg.Image.from_array(ref_mean_image(arr, grid.labels, grid.superpixel_count))
    assert np.array_equal(grid_mean(img, grid, sel).data, compose(img, mean_j, mask).data)

    parr = random_natural(43, 32, 36, 3)
    partner = sg.Image.from_array(parr)
    assert np.array_equal(
        grid_mix(img, partner, grid, sel).data, compose(img, partner, mask).data
    )


def test_untouched_pixels_are_byte_identical():
    for case in range(3):
        arr = random_natural(300 + case, 36, 40, 3)
        img = sg.Image.from_array(arr)
        grid = sg.slic_segment(img, sg.SlicParams(superpixels=20))
        sel = select_superpixels(grid, 0.6, case)
        mask = pixel_mask(grid, sel)
        partner = sg.Image.from_array(random_natural(400 + case, 36, 40, 3))
        for out in (
            grid_cut(img, grid, sel),
            grid_mean(img, grid, sel),
            grid_mix(img, partner, grid, sel),
        ):
            assert np.array_equal(out.data[~mask], arr[~mask])


def test_cut_and_mean_idempotent():
    arr = random_natural(77, 30, 30, 3)
    img = sg.Image.from_array(arr)
    grid = sg.slic_segment(img, sg.SlicParams(superpixels=9))
    sel = select_superpixels(grid, 0.5, 2)
    once = grid_cut(img, grid, sel)
    assert np.array_equal(grid_cut(once, grid, sel).data, once.data)
    once = grid_mean(img, grid, sel)
    assert np.array_equal(grid_mean(once, grid, sel).data, once.data)


def test_mix_complement_partitions_pixels():
    arr = random_natural(88, 28, 32, 1)
    parr = random_natural(89, 28, 32, 1)
    img, partner = sg.Image.from_array(arr), sg.Image.from_array(parr)
    grid = sg.slic_segment(img, sg.SlicParams(superpixels=8))
    sel = select_superpixels(grid, 0.5, 3)
    comp = sg.SelectionMask(~sel.flags)
    a = grid_mix(img, partner, grid, sel).data
    b = grid_mix(img, partner, grid, comp).data
    mask = pixel_mask(grid, sel)
    assert np.array_equal(a[mask], parr[mask]) and np.array_equal(a[~mask], arr[~mask])
    assert np.array_equal(b[~mask], parr[~mask]) and np.array_equal(b[mask], arr[mask])


def test_gray_color_consistency():
    gray = random_natural(55, 40, 44, 1)
    img_gray = sg.Image.from_array(gray)
    img_rgb = sg.Image.from_array(np.repeat(gray, 3, axis=2))
    cfg = sg.AugmentConfig(seed=9, superpixels=12, ratio=0.5)
    for op in ("cut", "mean"):
        out_gray = augment_one(img_gray, op, cfg).image.data
        out_rgb = augment_one(img_rgb, op, cfg).image.data
        for ch in range(3):
            assert np.array_equal(out_rgb[:, :, ch], out_gray[:, :, 0])


def test_augment_one_plumbing():
    img = sg.Image.from_array(scene_rgb(21, 60, 80))
    cfg = sg.AugmentConfig(seed=4, superpixels=30, ratio=0.0)
    outcome = augment_one(img, "cut", cfg)
    assert np.array_equal(outcome.image.data, img.data)
    assert outcome.operator == "cut"
    assert outcome.partner_id is None

    cfg_full = sg.AugmentConfig(seed=4, superpixels=1, ratio=1.0)
    out = augment_one(img, "mean", cfg_full)
    assert out.grid.superpixel_count == 1
    expected = [
        (2 * int(img.data[:, :, c].sum()) + img.width * img.height)
        // (2 * img.width * img.height)
        for c in range(3)
    ]
    assert np.array_equal(out.image.data[0, 0], expected)
    assert (out.image.data == out.image.data[0, 0]).all()

    with pytest.raises(sg.ParameterError):
        augment_one(img, "mix", cfg)  # partner missing
    with pytest.raises(sg.ParameterError):
        augment_one(img, "cut", cfg, partner=img)  # partner not allowed
    with pytest.raises(sg.ParameterError):
        augment_one(img, "posterize", cfg)

    mix = augment_one(img, "mix", cfg, partner=img, partner_id="twin")
    assert mix.partner_id == "twin"


def test_masked_fraction_tracks_ratio_on_constant_image():
    img = sg.Image.from_array(np.full((100, 100, 1), 77, np.uint8))
    grid = sg.slic_segment(img, sg.SlicParams(superpixels=100))
    ratios = []
    for seed in range(40):
        sel = select_superpixels(grid, 0.4, seed)
        ratios.append(masked_ratio(pixel_mask(grid, sel)))
    assert abs(np.mean(ratios) - 0.4) <= 0.03
