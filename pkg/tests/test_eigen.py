import numpy as np
import pytest

from curvefilt import (
    BRIGHT_ON_DARK,
    DARK_ON_BRIGHT,
    Image,
    eig_sym2,
    eig_sym3,
    eigen_field,
    hessian_at_scale,
    tube_2d,
)
from curvefilt.scalespace import HessianField


def jacobi_eigenvalues(mat, tol=1e-14, max_sweeps=60):
    """Oracle: cyclic Jacobi rotations on a symmetric 3x3 matrix."""
    a = np.array(mat, dtype=np.float64)
    for _ in range(max_sweeps):
        off = np.sqrt(a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2)
        if off < tol * max(1.0, np.abs(np.diag(a)).max()):
            break
        for p in range(2):
            for q in range(p + 1, 3):
                if a[p, q] == 0.0:
                    continue
                theta = 0.5 * np.arctan2(2.0 * a[p, q], a[q, q] - a[p, p])
                c, s = np.cos(theta), np.sin(theta)
                rot = np.eye(3)
                rot[p, p] = rot[q, q] = c
                rot[p, q], rot[q, p] = s, -s
                a = rot.T @ a @ rot
    return np.sort(np.diag(a))


def test_eig_sym2_examples():
    assert np.allclose(eig_sym2(3.0, 0.0, -1.0), [-1.0, 3.0])
    # characteristic polynomial l^2 - 4l + 3 = 0
    assert np.allclose(eig_sym2(2.0, 1.0, 2.0), [1.0, 3.0])
    assert np.allclose(eig_sym2(0.0, 0.0, 0.0), [0.0, 0.0])


def test_eig_sym2_abs_ordering_and_tiebreak():
    la, lb = eig_sym2(1.0, 0.0, -1.0)  # equal magnitudes: signed ascending
    assert (la, lb) == (-1.0, 1.0)
    la, lb = eig_sym2(-5.0, 0.0, 2.0)
    assert (la, lb) == (2.0, -5.0)


def test_eig_sym3_examples():
    assert np.allclose(eig_sym3(1.0, 0, 0, -2.0, 0, 3.0), [1.0, -2.0, 3.0])
    assert np.allclose(eig_sym3(1.0, 0, 0, 1.0, 0, 1.0), [1.0, 1.0, 1.0])
    assert np.allclose(eig_sym3(0, 0, 0, 0, 0, 0), [0.0, 0.0, 0.0])


def test_eig_sym3_vs_jacobi_oracle():
    rng = np.random.default_rng(11)
    mats = rng.standard_normal((10_000, 3, 3))
    mats = (mats + mats.transpose(0, 2, 1)) / 2
    got = eig_sym3(mats[:, 0, 0], mats[:, 0, 1], mats[:, 0, 2],
                   mats[:, 1, 1], mats[:, 1, 2], mats[:, 2, 2])
    got_sorted = np.sort(got, axis=-1)
    for i in range(0, 10_000, 7):  # spot-check against the slow oracle
        want = jacobi_eigenvalues(mats[i])
        assert np.max(np.abs(got_sorted[i] - want)) < 1e-9


def test_trace_determinant_invariants():
    rng = np.random.default_rng(12)
    mats = rng.standard_normal((5000, 3, 3))
    mats = (mats + mats.transpose(0, 2, 1)) / 2
    lams = eig_sym3(mats[:, 0, 0], mats[:, 0, 1], mats[:, 0, 2],
                    mats[:, 1, 1], mats[:, 1, 2], mats[:, 2, 2])
    trace = np.trace(mats, axis1=1, axis2=2)
    det = np.linalg.det(mats)
    scale = np.abs(lams).max(axis=-1) + 1e-300
    assert np.max(np.abs(lams.sum(-1) - trace) / scale) < 1e-9
    assert np.max(np.abs(lams.prod(-1) - det) / scale**3) < 1e-7


def test_negation_symmetry():
    rng = np.random.default_rng(13)
    m = rng.standard_normal((3, 3))
    m = (m + m.T) / 2
    plus = np.sort(eig_sym3(m[0, 0], m[0, 1], m[0, 2], m[1, 1], m[1, 2], m[2, 2]))
    minus = np.sort(eig_sym3(-m[0, 0], -m[0, 1], -m[0, 2], -m[1, 1], -m[1, 2], -m[2, 2]))
    assert np.allclose(np.sort(-minus), plus, atol=1e-9)


def test_axis_permutation_invariance():
    rng = np.random.default_rng(14)
    m = rng.standard_normal((3, 3))
    m = (m + m.T) / 2
    base = np.sort(eig_sym3(m[0, 0], m[0, 1], m[0, 2], m[1, 1], m[1, 2], m[2, 2]))
    perm = np.array([2, 0, 1])
    mp = m[np.ix_(perm, perm)]
    other = np.sort(eig_sym3(mp[0, 0], mp[0, 1], mp[0, 2], mp[1, 1], mp[1, 2], mp[2, 2]))
    assert np.allclose(base, other, atol=1e-9)


def test_near_isotropic_collapses_to_mean():
    lams = eig_sym3(2.0, 1e-17, 0.0, 2.0, 0.0, 2.0)
    assert np.allclose(lams, [2.0, 2.0, 2.0])


def test_eigen_field_zero():
    h = HessianField(components=np.zeros((8, 8, 3)), sigma=1.0, normalized=True)
    e = eigen_field(h)
    assert np.all(e.lambdas == 0.0)
    assert e.polarity_applied == BRIGHT_ON_DARK


def test_eigen_field_polarity_on_tube():
    p = tube_2d((64, 64), 4, 0.0)
    h = hessian_at_scale(p.image, 2.0)
    cl = p.centerline.data > 0
    bright = eigen_field(h, BRIGHT_ON_DARK)
    dark = eigen_field(h, DARK_ON_BRIGHT)
    assert np.all(bright.lambdas[..., -1][cl] > 0)
    assert np.all(dark.lambdas[..., -1][cl] < 0)


def test_eigen_field_bad_polarity():
    h = HessianField(components=np.zeros((4, 4, 3)), sigma=1.0, normalized=True)
    with pytest.raises(ValueError):
        eigen_field(h, "sideways")
