"""Closed-form eigenvalues of symmetric 2x2 and 3x3 tensors, per voxel.

Eigenvalues are ordered by ascending absolute value, so the last entry is the
dominant (largest-magnitude) one; ties are broken by signed ascending value.
Polarity handling: for bright-on-dark structures all eigenvalues are negated
before ordering, so that structure interiors present positive dominant
eigenvalues.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scalespace import HessianField

BRIGHT_ON_DARK = "bright-on-dark"
DARK_ON_BRIGHT = "dark-on-bright"


@dataclass(frozen=True)
class EigenField:
    """Per-voxel eigenvalue tuples, |lam_1| <= |lam_2| (<= |lam_3|)."""

    lambdas: np.ndarray  # (..., 2) in 2D, (..., 3) in 3D
    sigma: float
    polarity_applied: str

    @property
    def dims(self):
        return self.lambdas.shape[:-1]

    @property
    def rank(self):
        return self.lambdas.shape[-1]


def _abs_sort(lams):
    # primary key |value|, secondary key signed value (determinism on ties)
    order = np.lexsort((lams, np.abs(lams)), axis=-1)
    return np.take_along_axis(lams, order, axis=-1)


def eig_sym2(hxx, hxy, hyy):
    """Eigenvalues of [[hxx, hxy], [hxy, hyy]], ordered by ascending |.|.

    Inputs may be scalars or arrays of matching shape.
    """
    hxx, hxy, hyy = np.broadcast_arrays(
        np.asarray(hxx, dtype=np.float64),
        np.asarray(hxy, dtype=np.float64),
        np.asarray(hyy, dtype=np.float64),
    )
    half_trace = 0.5 * (hxx + hyy)
    root = np.sqrt((0.5 * (hxx - hyy)) ** 2 + hxy**2)
    lams = np.stack([half_trace - root, half_trace + root], axis=-1)
    return _abs_sort(lams)


def eig_sym3(hxx, hxy, hxz, hyy, hyz, hzz):
    """Eigenvalues of a symmetric 3x3 tensor via the trigonometric closed form.

    Ordered by ascending |.|; near-isotropic tensors collapse to the triple
    (mean, mean, mean).
    """
    comps = np.broadcast_arrays(*[np.asarray(c, dtype=np.float64) for c in (hxx, hxy, hxz, hyy, hyz, hzz)])
    hxx, hxy, hxz, hyy, hyz, hzz = comps
    q = (hxx + hyy + hzz) / 3.0
    # deviatoric part B = A - q*I; p = sqrt(tr(B^2)/6)
    bxx, byy, bzz = hxx - q, hyy - q, hzz - q
    p2 = (bxx**2 + byy**2 + bzz**2 + 2.0 * (hxy**2 + hxz**2 + hyz**2)) / 6.0
    p = np.sqrt(p2)
    scale = np.maximum(np.abs(q), np.sqrt(p2))
    isotropic = p <= 1e-12 * np.maximum(scale, 1e-300)
    p_safe = np.where(isotropic, 1.0, p)
    # r = det(B) / (2 p^3), clamped against roundoff
    detb = (
        bxx * (byy * bzz - hyz**2)
        - hxy * (hxy * bzz - hyz * hxz)
        + hxz * (hxy * hyz - byy * hxz)
    )
    r = np.clip(detb / (2.0 * p_safe**3), -1.0, 1.0)
    phi = np.arccos(r) / 3.0
    l0 = q + 2.0 * p * np.cos(phi)
    l2 = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    l1 = 3.0 * q - l0 - l2
    lams = np.stack([l0, l1, l2], axis=-1)
    lams = np.where(isotropic[..., None], np.stack([q, q, q], axis=-1), lams)
    return _abs_sort(lams)


def eigen_field(h: HessianField, polarity=BRIGHT_ON_DARK) -> EigenField:
    """Per-voxel decomposition of a Hessian field with polarity adjustment.

    For bright-on-dark structures the eigenvalues are negated before ordering
    (structure interiors then carry positive dominant eigenvalues); for
    dark-on-bright they are kept as-is.
    """
    if polarity not in (BRIGHT_ON_DARK, DARK_ON_BRIGHT):
        raise ValueError(f"unknown polarity {polarity!r}")
    sign = -1.0 if polarity == BRIGHT_ON_DARK else 1.0
    c = h.components
    if h.rank == 2:
        lams = eig_sym2(sign * c[..., 0], sign * c[..., 1], sign * c[..., 2])
    else:
        lams = eig_sym3(*(sign * c[..., k] for k in range(6)))
    return EigenField(lambdas=lams, sigma=h.sigma, polarity_applied=polarity)
