"""Gaussian scale-space second derivatives and per-voxel Hessian assembly.

Kernels are sampled from the analytic Gaussian derivative formulas with a
truncation radius of ceil(4*sigma); the zeroth-order kernel is sum-normalized
to 1, derivative kernels are used as sampled. Boundaries are handled with
mirror (reflect-without-repeat) padding.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np
from scipy.ndimage import correlate1d

from .image import Image


@dataclass(frozen=True)
class ScaleList:
    """Strictly increasing list of positive scales, in pixel units."""

    sigmas: tuple

    def __post_init__(self):
        sigmas = tuple(float(s) for s in self.sigmas)
        if not sigmas:
            raise ValueError("scale list must be non-empty")
        if any(s <= 0 for s in sigmas):
            raise ValueError("all scales must be positive")
        if any(b <= a for a, b in zip(sigmas, sigmas[1:])):
            raise ValueError("scales must be strictly increasing")
        object.__setattr__(self, "sigmas", sigmas)

    def __iter__(self):
        return iter(self.sigmas)

    def __len__(self):
        return len(self.sigmas)


@dataclass(frozen=True)
class HessianField:
    """Upper triangle of the symmetric Hessian at one scale.

    components holds, per voxel, (Hxx, Hxy, Hyy) in 2D or
    (Hxx, Hxy, Hxz, Hyy, Hyz, Hzz) in 3D, stacked on the last axis.
    """

    components: np.ndarray
    sigma: float
    normalized: bool

    @property
    def dims(self):
        return self.components.shape[:-1]

    @property
    def rank(self):
        return self.components.ndim - 1


def gaussian_kernel(sigma, order=0):
    """Sampled 1D Gaussian (order 0) or its first/second derivative.

    Truncated at radius ceil(4*sigma). Order 0 is normalized to unit sum.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    radius = int(np.ceil(4.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    g = np.exp(-0.5 * (x / sigma) ** 2) / (np.sqrt(2.0 * np.pi) * sigma)
    if order == 0:
        return g / g.sum()
    if order == 1:
        return -x / sigma**2 * g
    if order == 2:
        k = (x**2 / sigma**4 - 1.0 / sigma**2) * g
        # remove the discretization bias so constants and ramps map to
        # exactly zero (the sampled kernel's sum is ~1e-4, not 0)
        return k - k.mean()
    raise ValueError(f"unsupported derivative order {order}")


def _separable(data, orders, sigma):
    out = data
    for axis, order in enumerate(orders):
        out = correlate1d(out, gaussian_kernel(sigma, order), axis=axis, mode="mirror")
    return out


def hessian_at_scale(img: Image, sigma, normalize_scale=True) -> HessianField:
    """Second-order Gaussian derivative components at one scale.

    Each component is a separable convolution of the image with the matching
    derivative kernels; with normalize_scale the components are multiplied by
    sigma**2 so that responses are comparable across scales.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    ndim = img.rank
    comps = []
    for i, j in combinations_with_replacement(range(ndim), 2):
        orders = [0] * ndim
        orders[i] += 1
        orders[j] += 1
        comps.append(_separable(img.data, orders, sigma))
    components = np.stack(comps, axis=-1)
    if normalize_scale:
        components = components * sigma**2
    return HessianField(components=components, sigma=float(sigma), normalized=bool(normalize_scale))


def build_scale_list(sigma_min, sigma_max, count) -> ScaleList:
    """count scales linearly spaced over [sigma_min, sigma_max], inclusive."""
    if sigma_min <= 0 or sigma_max < sigma_min:
        raise ValueError("need 0 < sigma_min <= sigma_max")
    if count < 1:
        raise ValueError("count must be >= 1")
    if count == 1:
        return ScaleList((sigma_min,))
    return ScaleList(tuple(np.linspace(sigma_min, sigma_max, count)))
