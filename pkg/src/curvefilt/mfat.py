"""Multiscale fractional-anisotropy-tensor enhancement.

Per scale: Hessian -> polarity-adjusted eigenvalues -> dual cut-off
regularization of the dominant eigenvalue -> fractional anisotropy measure
(eigenvalue or probabilistic form) -> gated per-scale response; scales are
then combined by a tanh co-addition accumulator maximized against the raw
per-scale responses.

Sign convention: with polarity applied (see eigen.eigen_field) structure
interiors carry positive dominant eigenvalues mu_2 (2D) / mu_2, mu_3 (3D).
Regularization operates on the dominant positive eigenvalue; the background
gate zeroes voxels where mu_2 <= 0 or the regularized value is <= 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .eigen import BRIGHT_ON_DARK, EigenField, eigen_field
from .image import Image, normalize
from .scalespace import ScaleList, hessian_at_scale

MODE_FAT = "fat"          # eigenvalue form
MODE_PFAT = "pfat"        # probabilistic form
VARIANT_CONSISTENT = "consistent"
VARIANT_LITERAL = "literal"


@dataclass(frozen=True)
class FilterParams:
    """Every knob of the enhancement pipeline."""

    scales: ScaleList
    tau_rho: float = 0.5
    tau_nu: float = 0.25
    delta: float = 0.5
    mode: str = MODE_PFAT
    polarity: str = BRIGHT_ON_DARK
    response_variant: str = VARIANT_CONSISTENT  # 2D only
    normalize_scale: bool = True
    normalize_input: bool = True

    def __post_init__(self):
        if not 0.0 <= self.tau_rho <= 1.0 or not 0.0 <= self.tau_nu <= 1.0:
            raise ValueError("tau_rho and tau_nu must be in [0, 1]")
        if self.delta < 0.0:
            raise ValueError("delta must be >= 0")
        if self.mode not in (MODE_FAT, MODE_PFAT):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.response_variant not in (VARIANT_CONSISTENT, VARIANT_LITERAL):
            raise ValueError(f"unknown response variant {self.response_variant!r}")


@dataclass(frozen=True)
class RegularizedEigen:
    """Dominant eigenvalue and its two cut-off-regularized copies at one scale."""

    lambda2: np.ndarray
    lambda_rho: np.ndarray
    lambda_nu: np.ndarray
    sigma: float


@dataclass(frozen=True)
class ResponseMap:
    """Per-voxel enhancement response in [0, 1]."""

    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def dims(self):
        return self.values.shape


def regularize_lambda3(lambda3, tau):
    """Dual cut-off regularization of the dominant eigenvalue at one scale.

    With M = max over all voxels of the field: values above tau*M pass
    through, positive values at or below tau*M are floored to tau*M, and
    non-positive values are zeroed.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must be in [0, 1]")
    lambda3 = np.asarray(lambda3, dtype=np.float64)
    m = lambda3.max() if lambda3.size else 0.0
    floor = tau * m
    out = np.where(lambda3 > floor, lambda3, np.where(lambda3 > 0.0, floor, 0.0))
    return np.maximum(out, 0.0)


def _fat_core(a, b, c):
    # sqrt(3/2) * sqrt(sum((x_i - mean)^2) / sum(x_i^2)), 0 where all zero
    mean = (a + b + c) / 3.0
    num = (a - mean) ** 2 + (b - mean) ** 2 + (c - mean) ** 2
    den = a**2 + b**2 + c**2
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.sqrt(1.5) * np.sqrt(num / den)
    out = np.where(den > 0.0, out, 0.0)
    return np.clip(out, 0.0, 1.0)


def fat_lambda(l2, l_rho, l_nu):
    """Eigenvalue-form fractional anisotropy of the regularized triple.

    0 for an isotropic triple, 1 for a rank-1 triple; an all-zero triple
    returns 0 by convention.
    """
    return _fat_core(
        np.asarray(l2, dtype=np.float64),
        np.asarray(l_rho, dtype=np.float64),
        np.asarray(l_nu, dtype=np.float64),
    )


def fat_prob(l2, l_rho, l_nu):
    """Probabilistic-form fractional anisotropy of the regularized triple.

    Works on relative axis importances p_i = |l_i / Tr| with mean fixed at
    1/3; a zero-trace triple returns 0 by convention.
    """
    l2 = np.asarray(l2, dtype=np.float64)
    l_rho = np.asarray(l_rho, dtype=np.float64)
    l_nu = np.asarray(l_nu, dtype=np.float64)
    tr = l2 + l_rho + l_nu
    safe = np.where(tr == 0.0, 1.0, tr)
    p2, p_rho, p_nu = (np.abs(x / safe) for x in (l2, l_rho, l_nu))
    third = 1.0 / 3.0
    num = (p2 - third) ** 2 + (p_rho - third) ** 2 + (p_nu - third) ** 2
    den = p2**2 + p_rho**2 + p_nu**2
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.sqrt(1.5) * np.sqrt(num / den)
    out = np.where((tr != 0.0) & (den > 0.0), out, 0.0)
    return np.clip(out, 0.0, 1.0)


def regularized_from_eigen(eig: EigenField, tau_rho, tau_nu) -> RegularizedEigen:
    """Build the (mu_2, lambda_rho, lambda_nu) triple for one scale.

    The dominant polarity-adjusted eigenvalue (last in |.| order) feeds the
    regularization; in 2D that is mu_2 itself, in 3D it is mu_3.
    """
    mu2 = eig.lambdas[..., -2] if eig.rank == 3 else eig.lambdas[..., -1]
    dominant = eig.lambdas[..., -1]
    return RegularizedEigen(
        lambda2=mu2,
        lambda_rho=regularize_lambda3(dominant, tau_rho),
        lambda_nu=regularize_lambda3(dominant, tau_nu),
        sigma=eig.sigma,
    )


def _fat_values(reg: RegularizedEigen, mode):
    f = fat_lambda if mode == MODE_FAT else fat_prob
    return f(reg.lambda2, reg.lambda_rho, reg.lambda_nu)


def response_at_scale_3d(eig: EigenField, reg: RegularizedEigen, fat) -> ResponseMap:
    """Gated per-scale response for volumes.

    Voxels with mu_2 <= 0 or lambda_rho <= 0 are background and exactly 0;
    the voxel(s) attaining the per-scale maximum of lambda_rho - mu_2 are 1;
    everywhere else the response is 1 - FAT.
    """
    return _response(eig, reg, fat, VARIANT_CONSISTENT)


def response_at_scale_2d(eig: EigenField, reg: RegularizedEigen, fat, variant=VARIANT_CONSISTENT) -> ResponseMap:
    """Gated per-scale response for 2D images.

    The consistent variant mirrors the 3D case structure. The literal variant
    additionally zeroes every voxel not attaining the extrema of
    lambda_rho - mu_2 and assigns 1 at its minimum; it is near-degenerate and
    kept only for fidelity experiments.
    """
    return _response(eig, reg, fat, variant)


def _response(eig, reg, fat, variant):
    if eig.dims != reg.lambda2.shape or eig.dims != np.shape(fat):
        raise ValueError("eigen, regularized, and FAT fields must share dims")
    mu2 = reg.lambda2
    d = reg.lambda_rho - mu2
    background = (mu2 <= 0.0) | (reg.lambda_rho <= 0.0)
    out = np.where(background, 0.0, 1.0 - fat)
    if variant == VARIANT_CONSISTENT:
        out = np.where(~background & (d == d.max()), 1.0, out)
    else:
        out = np.where(~background & (d < d.max()), 0.0, out)
        out = np.where(~background & (d == d.min()), 1.0, out)
    return ResponseMap(values=np.clip(out, 0.0, 1.0), provenance={"sigma": eig.sigma})


def multiscale_combine(per_scale, delta) -> ResponseMap:
    """tanh co-addition across scales, maximized against each raw response.

    Accumulator starts at zero and gains delta*tanh(R - delta) per scale in
    ascending order; the final value is the per-voxel maximum over scales of
    both the accumulator and the raw response, clamped to [0, 1].
    """
    per_scale = list(per_scale)
    if not per_scale:
        raise ValueError("need at least one per-scale response")
    acc = np.zeros_like(per_scale[0].values)
    best = np.full_like(acc, -np.inf)
    for r in per_scale:
        acc = acc + delta * np.tanh(r.values - delta)
        best = np.maximum(best, np.maximum(acc, r.values))
    return ResponseMap(values=np.clip(best, 0.0, 1.0), provenance={"delta": delta})


def enhance(img: Image, params: FilterParams) -> ResponseMap:
    """Full pipeline from image to multiscale response map."""
    work = normalize(img) if params.normalize_input else img
    per_scale = []
    for sigma in params.scales:
        h = hessian_at_scale(work, sigma, normalize_scale=params.normalize_scale)
        eig = eigen_field(h, params.polarity)
        reg = regularized_from_eigen(eig, params.tau_rho, params.tau_nu)
        fat = _fat_values(reg, params.mode)
        if img.rank == 2:
            r = response_at_scale_2d(eig, reg, fat, params.response_variant)
        else:
            r = response_at_scale_3d(eig, reg, fat)
        per_scale.append(r)
    combined = multiscale_combine(per_scale, params.delta)
    prov = {
        "scales": list(params.scales),
        "tau_rho": params.tau_rho,
        "tau_nu": params.tau_nu,
        "delta": params.delta,
        "mode": params.mode,
        "polarity": params.polarity,
        "response_variant": params.response_variant,
        "normalize_scale": params.normalize_scale,
        "normalize_input": params.normalize_input,
    }
    return ResponseMap(values=combined.values, provenance=prov)
