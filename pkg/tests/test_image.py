import numpy as np
import pytest

from curvefilt import Image, ImageIOError, load_image, normalize, save_image
from curvefilt.image import _write_nrrd


def test_rank_enforced():
    with pytest.raises(ValueError):
        Image(np.zeros(10))
    with pytest.raises(ValueError):
        Image(np.zeros((2, 2, 2, 2)))


def test_pgm_constant_identity(tmp_path):
    path = tmp_path / "c.pgm"
    with open(path, "wb") as f:
        f.write(b"P5\n64 64\n255\n" + bytes([128]) * 64 * 64)
    img = load_image(path)
    assert img.dims == (64, 64)
    assert np.all(img.data == 128.0)


def test_pgm_16bit_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    codes = rng.integers(0, 65536, size=(31, 17)).astype(np.float64)
    path = tmp_path / "r.pgm"
    save_image(Image(codes), path)
    back = load_image(path)
    assert np.array_equal(back.data, codes)
    # save again: load∘save identity on the representable lattice
    path2 = tmp_path / "r2.pgm"
    save_image(back, path2)
    assert np.array_equal(load_image(path2).data, codes)


def test_png_round_trip_quantization(tmp_path):
    rng = np.random.default_rng(1)
    data = rng.random((20, 20))
    path = tmp_path / "r.png"
    save_image(Image(data), path)
    back = load_image(path).data / 65535.0
    assert np.max(np.abs(back - data)) <= 0.5 / 65535 + 1e-12


def test_png_color_rejected(tmp_path):
    from PIL import Image as PILImage

    path = tmp_path / "rgb.png"
    PILImage.new("RGB", (8, 8), (10, 20, 30)).save(path)
    with pytest.raises(ImageIOError):
        load_image(path)


def test_all_zero_and_all_one(tmp_path):
    for value, code in [(0.0, 0), (1.0, 65535)]:
        path = tmp_path / f"v{code}.png"
        save_image(Image(np.full((8, 8), value)), path)
        assert np.all(load_image(path).data == code)


def test_nrrd_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    vol = rng.random((9, 8, 7))
    path = tmp_path / "v.nrrd"
    save_image(Image(vol, spacing=(1.0, 2.0, 3.0)), path)
    back = load_image(path)
    assert back.dims == (9, 8, 7)
    assert back.spacing == (1.0, 2.0, 3.0)
    assert np.max(np.abs(back.data - vol)) < 1e-6  # float32 storage


def test_nrrd_gzip(tmp_path):
    vol = np.arange(60, dtype=np.float64).reshape(3, 4, 5)
    path = tmp_path / "v.nrrd"
    _write_nrrd(path, vol, (1.0, 1.0, 1.0), gzip_encode=True)
    assert np.max(np.abs(load_image(path).data - vol)) < 1e-4


def test_nrrd_dimension_mismatch(tmp_path):
    path = tmp_path / "bad.nrrd"
    payload = np.zeros(16**3, dtype="<f4").tobytes()
    header = "NRRD0004\ntype: float32\ndimension: 3\nsizes: 32 32 32\nencoding: raw\nendian: little\n\n"
    with open(path, "wb") as f:
        f.write(header.encode() + payload)
    with pytest.raises(ImageIOError):
        load_image(path)


def test_raw_round_trip_bit_identical(tmp_path):
    rng = np.random.default_rng(3)
    vol = rng.standard_normal((6, 7, 8))
    path = tmp_path / "v.raw"
    save_image(Image(vol, spacing=(0.5, 0.5, 2.0)), path)
    back = load_image(path)
    assert np.array_equal(back.data, vol)
    assert back.spacing == (0.5, 0.5, 2.0)


def test_missing_file():
    with pytest.raises(ImageIOError):
        load_image("/nonexistent/file.png")


def test_normalize_affine():
    img = Image(np.array([[10.0, 20.0], [30.0, 30.0]]))
    out = normalize(img).data
    assert np.allclose(out, [[0.0, 0.5], [1.0, 1.0]])


def test_normalize_constant_to_zeros():
    out = normalize(Image(np.full((4, 4), 7.0))).data
    assert np.all(out == 0.0)


def test_normalize_identity_on_unit_range():
    rng = np.random.default_rng(4)
    data = rng.random((16, 16))
    data[0, 0], data[-1, -1] = 0.0, 1.0
    out = normalize(Image(data)).data
    assert np.max(np.abs(out - data)) < 1e-12


def test_normalize_idempotent_and_order_preserving():
    rng = np.random.default_rng(5)
    data = rng.standard_normal((32, 32)) * 100
    once = normalize(Image(data)).data
    twice = normalize(Image(once)).data
    assert np.array_equal(once, twice)
    flat = data.ravel()
    order = np.argsort(flat, kind="stable")
    assert np.all(np.diff(once.ravel()[order]) >= 0)
