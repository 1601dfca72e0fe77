import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from PIL import Image

from vhface.errors import CorruptFile, EmptyHistogram, UnsupportedFormat
from vhface.imaging import (
    GrayImage,
    Histogram,
    binarize,
    encode_pgm,
    histogram,
    load_image,
    otsu_threshold,
    save_pgm,
    save_png,
)

from oracles import brute_force_otsu, random_histogram


def write(tmp_path, name, data: bytes):
    p = tmp_path / name
    p.write_bytes(data)
    return p


# --- load_image -------------------------------------------------------------

def test_load_p5(tmp_path):
    img = load_image(write(tmp_path, "a.pgm", b"P5\n2 2\n255\n" + bytes([0, 128, 255, 7])))
    assert (img.width, img.height) == (2, 2)
    assert img.data == [0, 128, 255, 7]


def test_load_p2_single_line(tmp_path):
    img = load_image(write(tmp_path, "a.pgm", b"P2 1 1 255 42"))
    assert (img.width, img.height, img.data) == (1, 1, [42])


def test_load_p2_with_comments(tmp_path):
    raw = b"P2\n# made by hand\n3 1\n# max\n15\n1 2\n3\n"
    assert load_image(write(tmp_path, "a.pgm", raw)).data == [1, 2, 3]


def test_low_maxval_values_kept_as_stored(tmp_path):
    img = load_image(write(tmp_path, "a.pgm", b"P5 2 1 15\n" + bytes([3, 15])))
    assert img.data == [3, 15]


def test_16bit_pgm_rejected(tmp_path):
    with pytest.raises(UnsupportedFormat):
        load_image(write(tmp_path, "a.pgm", b"P5 1 1 65535\n\x00\x01"))


def test_truncated_pgm(tmp_path):
    with pytest.raises(CorruptFile):
        load_image(write(tmp_path, "a.pgm", b"P5 4 4 255\n" + bytes(10)))
    with pytest.raises(CorruptFile):
        load_image(write(tmp_path, "b.pgm", b"P2 2 2 255 1 2 3"))
    with pytest.raises(CorruptFile):
        load_image(write(tmp_path, "c.pgm", b"P5 4"))


def test_color_pgm_rejected(tmp_path):
    with pytest.raises(UnsupportedFormat):
        load_image(write(tmp_path, "a.ppm", b"P6 1 1 255\n\x00\x00\x00"))


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_image(tmp_path / "nope.pgm")


def test_png_gray8_roundtrip(tmp_path):
    px = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
    save_png(GrayImage(px), tmp_path / "a.png")
    assert np.array_equal(load_image(tmp_path / "a.png").pixels, px)


def test_png_16bit_rejected(tmp_path):
    Image.fromarray(np.full((2, 2), 1000, dtype=np.uint16)).save(tmp_path / "a.png")
    with pytest.raises(UnsupportedFormat):
        load_image(tmp_path / "a.png")


def test_png_rgb_rejected(tmp_path):
    Image.new("RGB", (2, 2)).save(tmp_path / "a.png")
    with pytest.raises(UnsupportedFormat):
        load_image(tmp_path / "a.png")


def test_png_truncated(tmp_path):
    save_png(GrayImage(np.random.default_rng(0).integers(0, 256, (32, 32))), tmp_path / "a.png")
    raw = (tmp_path / "a.png").read_bytes()
    with pytest.raises(CorruptFile):
        load_image(write(tmp_path, "b.png", raw[: len(raw) // 2]))


def test_written_pgm_header():
    assert encode_pgm(GrayImage([[1, 2, 3]])) == b"P5 3 1 255\n\x01\x02\x03"


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 20), st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_pgm_roundtrip(tmp_path_factory, w, h, seed):
    px = np.random.default_rng(seed).integers(0, 256, (h, w), dtype=np.uint8)
    path = tmp_path_factory.mktemp("rt") / "a.pgm"
    save_pgm(GrayImage(px), path)
    first = load_image(path)
    save_pgm(first, path)
    assert load_image(path).pixels.tobytes() == px.tobytes()


def test_gray_image_invariants():
    with pytest.raises(ValueError):
        GrayImage(np.zeros((0, 3)))
    with pytest.raises(ValueError):
        GrayImage([[300]])
    img = GrayImage.from_data(2, 1, [4, 5])
    with pytest.raises(ValueError):
        img.pixels[0, 0] = 1


# --- histogram -------------------------------------------------------------

def test_histogram_counts():
    bins = histogram(GrayImage([[5, 5, 9]])).bins
    assert bins[5] == 2 and bins[9] == 1 and bins.sum() == 3


def test_histogram_zero_image():
    bins = histogram(GrayImage(np.zeros((4, 4)))).bins
    assert bins[0] == 16 and bins[1:].sum() == 0


def test_histogram_conservation():
    img = GrayImage(np.random.default_rng(7).integers(0, 256, (64, 64)))
    h = histogram(img)
    assert len(h.bins) == 256 and h.total == 4096


# --- otsu ------------------------------------------------------------------

def test_otsu_single_level_tie_breaks_to_zero():
    bins = np.zeros(256, int)
    bins[7] = 30
    assert otsu_threshold(Histogram(bins)) == 0


def test_otsu_two_levels_smallest_argmax():
    bins = np.zeros(256, int)
    bins[50] = bins[200] = 100
    assert otsu_threshold(Histogram(bins)) == 51


def test_otsu_random_histogram_seed_42():
    bins = np.random.default_rng(42).integers(0, 1000, 256)
    assert otsu_threshold(Histogram(bins)) == brute_force_otsu(bins)


def test_otsu_empty():
    with pytest.raises(EmptyHistogram):
        otsu_threshold(Histogram(np.zeros(256, int)))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 50))
def test_otsu_scale_invariance(seed, k):
    bins = random_histogram(np.random.default_rng(seed))
    assert otsu_threshold(Histogram(bins * k)) == otsu_threshold(Histogram(bins))


# --- binarize --------------------------------------------------------------

def test_binarize_rule():
    assert binarize(GrayImage([[10, 200]]), 100).data == [0, 1]
    assert binarize(GrayImage([[100]]), 100).data == [1]
    assert binarize(GrayImage(np.random.default_rng(1).integers(0, 256, (5, 5))), 0).count() == 25


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 256))
def test_binarize_count_matches_histogram_tail(seed, t):
    img = GrayImage(np.random.default_rng(seed).integers(0, 256, (9, 13)))
    assert binarize(img, t).count() == int(histogram(img).bins[t:].sum())
