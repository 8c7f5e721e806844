"""Multiscale Hessian vesselness baseline (Frangi-style)."""

from __future__ import annotations

import numpy as np

from .eigen import BRIGHT_ON_DARK, eigen_field
from .image import Image, normalize
from .mfat import ResponseMap
from .scalespace import ScaleList, hessian_at_scale


def frangi(img: Image, scales: ScaleList, alpha=0.5, beta=0.5, c=None,
           polarity=BRIGHT_ON_DARK, normalize_input=True) -> ResponseMap:
    """Classic vesselness: per-scale eigenvalue-ratio response, max over scales.

    2D: exp(-Rb^2/2beta^2) * (1 - exp(-S^2/2c^2)) with Rb = |l1|/|l2| and S
    the Frobenius norm, zeroed where the dominant polarity-adjusted
    eigenvalue is <= 0. 3D adds the plate/tube ratio term weighted by alpha.
    When c is None it defaults to half the maximum S at each scale.
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    work = normalize(img) if normalize_input else img
    best = None
    tiny = np.finfo(np.float64).tiny
    for sigma in scales:
        h = hessian_at_scale(work, sigma, normalize_scale=True)
        eig = eigen_field(h, polarity)
        lams = eig.lambdas
        s2 = np.sum(lams**2, axis=-1)
        c_sigma = c if c is not None else 0.5 * np.sqrt(s2.max())
        c2 = max(c_sigma**2, tiny)
        if img.rank == 2:
            l1, l2 = lams[..., 0], lams[..., 1]
            rb2 = l1**2 / np.maximum(l2**2, tiny)
            v = np.exp(-rb2 / (2.0 * beta**2)) * (1.0 - np.exp(-s2 / (2.0 * c2)))
            v = np.where(l2 > 0.0, v, 0.0)
        else:
            l1, l2, l3 = lams[..., 0], lams[..., 1], lams[..., 2]
            ra2 = l2**2 / np.maximum(l3**2, tiny)
            rb2 = l1**2 / np.maximum(np.abs(l2 * l3), tiny)
            v = (
                (1.0 - np.exp(-ra2 / (2.0 * alpha**2)))
                * np.exp(-rb2 / (2.0 * beta**2))
                * (1.0 - np.exp(-s2 / (2.0 * c2)))
            )
            v = np.where((l2 > 0.0) & (l3 > 0.0), v, 0.0)
        best = v if best is None else np.maximum(best, v)
    prov = {"filter": "frangi", "scales": list(scales), "alpha": alpha, "beta": beta,
            "c": c, "polarity": polarity}
    return ResponseMap(values=np.clip(best, 0.0, 1.0), provenance=prov)
