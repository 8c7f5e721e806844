"""Synthetic ground-truthed phantoms: tubes, junctions, crossings, trees.

2D phantoms are anti-aliased by 8x8 supersampled coverage of the analytic
capsule boundary; 3D trees use an analytic soft edge. All generators are
deterministic given their seed. Structures are bright on dark by default.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .image import Image


@dataclass(frozen=True)
class Phantom:
    """Rendered image plus exact structure and centerline masks."""

    image: Image
    ground_truth: Image
    centerline: Image
    descriptor: dict

    def __post_init__(self):
        gt = self.ground_truth.data
        cl = self.centerline.data
        if gt.shape != self.image.dims or cl.shape != self.image.dims:
            raise ValueError("image and masks must share dims")
        if np.any(cl > gt):
            raise ValueError("centerline must be a subset of ground truth")


def _segment_distance(coords, a, b):
    """Euclidean distance from each point to segment [a, b].

    coords: (..., ndim) array of points; a, b: segment endpoints.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    ab = b - a
    denom = float(ab @ ab)
    rel = coords - a
    if denom == 0.0:
        return np.sqrt(np.sum(rel**2, axis=-1))
    t = np.clip(rel @ ab / denom, 0.0, 1.0)
    proj = a + t[..., None] * ab
    return np.sqrt(np.sum((coords - proj) ** 2, axis=-1))


def _min_axis_distance(coords, segments):
    d = np.full(coords.shape[:-1], np.inf)
    for a, b, _r in segments:
        d = np.minimum(d, _segment_distance(coords, a, b))
    return d


def _min_surface_distance(coords, segments):
    d = np.full(coords.shape[:-1], np.inf)
    for a, b, r in segments:
        d = np.minimum(d, _segment_distance(coords, a, b) - r)
    return d


def _grid(dims):
    axes = [np.arange(n, dtype=np.float64) for n in dims]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


def _render_2d(dims, segments, descriptor, supersample=8):
    """Coverage-rendered capsule union with masks."""
    coords = _grid(dims)
    offsets = (np.arange(supersample) + 0.5) / supersample - 0.5
    coverage = np.zeros(dims, dtype=np.float64)
    for oy in offsets:
        for ox in offsets:
            sd = _min_surface_distance(coords + np.array([oy, ox]), segments)
            coverage += (sd <= 0.0).astype(np.float64)
    coverage /= supersample**2
    gt = (_min_surface_distance(coords, segments) <= 0.0).astype(np.float64)
    cl = ((_min_axis_distance(coords, segments) <= 0.5) & (gt > 0)).astype(np.float64)
    return Phantom(
        image=Image(coverage),
        ground_truth=Image(gt),
        centerline=Image(cl),
        descriptor=descriptor,
    )


def tube_2d(dims, width, orientation=0.0) -> Phantom:
    """Straight anti-aliased tube of the given width through the image center.

    orientation is in degrees; 0 is a horizontal tube.
    """
    dims = tuple(int(d) for d in dims)
    if not 2 <= width < min(dims) / 2:
        raise ValueError(f"width {width} out of range for dims {dims}")
    center = (np.array(dims, dtype=np.float64) - 1.0) / 2.0
    theta = np.deg2rad(orientation)
    # direction in (row, col) coordinates; long enough to span any image
    direction = np.array([np.sin(theta), np.cos(theta)])
    half = float(np.hypot(*dims))
    a = center - half * direction
    b = center + half * direction
    segments = [(a, b, width / 2.0)]
    desc = {"kind": "tube", "width": float(width), "orientation": float(orientation)}
    return _render_2d(dims, segments, desc)


def cross_2d(dims, width) -> Phantom:
    """Union of a horizontal and a vertical tube; junction flagged at center."""
    dims = tuple(int(d) for d in dims)
    if not 2 <= width < min(dims) / 2:
        raise ValueError(f"width {width} out of range for dims {dims}")
    center = (np.array(dims, dtype=np.float64) - 1.0) / 2.0
    half = float(np.hypot(*dims))
    segments = [
        (center - [0.0, half], center + [0.0, half], width / 2.0),
        (center - [half, 0.0], center + [half, 0.0], width / 2.0),
    ]
    junction = [tuple(int(round(c)) for c in center)]
    desc = {"kind": "cross", "width": float(width), "junction_voxels": junction}
    return _render_2d(dims, segments, desc)


def yjunction_2d(dims, width, branch_angle=120.0) -> Phantom:
    """Three tubes radiating from the image center.

    branch_angle (degrees) is the opening between the two upper branches;
    the stem points straight down. 120 gives a threefold-symmetric junction.
    """
    dims = tuple(int(d) for d in dims)
    if not 2 <= width < min(dims) / 2:
        raise ValueError(f"width {width} out of range for dims {dims}")
    if branch_angle <= 0.0 or branch_angle >= 360.0:
        raise ValueError("branch_angle must be in (0, 360) degrees")
    center = (np.array(dims, dtype=np.float64) - 1.0) / 2.0
    length = 0.45 * min(dims)
    half = branch_angle / 2.0
    angles = [90.0 - half, 90.0 + half, 270.0]
    segments = []
    for deg in angles:
        t = np.deg2rad(deg)
        d = np.array([-np.sin(t), np.cos(t)])  # y axis points down rows
        segments.append((center, center + length * d, width / 2.0))
    junction = [tuple(int(round(c)) for c in center)]
    desc = {
        "kind": "yjunction",
        "width": float(width),
        "branch_angle": float(branch_angle),
        "junction_voxels": junction,
    }
    return _render_2d(dims, segments, desc)


def _grow_tree(dims, rng, n_branches, radius_range, ndim):
    """Random connected binary tree of capsule segments inside the box."""
    r_min, r_max = radius_range
    lo = 0.12 * min(dims)
    hi = 0.88 * min(dims)
    center = np.array(dims, dtype=np.float64) / 2.0
    start = center.copy()
    start[0] = 0.1 * dims[0]
    direction = np.zeros(ndim)
    direction[0] = 1.0
    segments = []
    tips = [(start, direction, float(r_max))]
    while len(segments) < n_branches:
        order = rng.integers(len(tips))
        point, direction, radius = tips.pop(int(order))
        length = rng.uniform(0.22, 0.38) * min(dims)
        end = point + length * direction
        end = np.clip(end, lo, hi)
        segments.append((point, end, radius))
        if len(segments) >= n_branches:
            break
        for _ in range(2):
            perturb = rng.normal(scale=0.6, size=ndim)
            d = direction + perturb
            d /= np.linalg.norm(d)
            child_r = max(r_min, radius * rng.uniform(0.7, 1.0))
            tips.append((end, d, child_r))
    return segments


def tree_3d(dims, seed=0, n_branches=7, radius_range=(1.5, 3.0)) -> Phantom:
    """Random connected tree of 3D capsules, radius tapering child <= parent."""
    dims = tuple(int(d) for d in dims)
    if min(dims) < 32:
        raise ValueError("tree_3d needs dims >= 32 per axis")
    if n_branches < 1:
        raise ValueError("n_branches must be >= 1")
    if radius_range[0] < 1.0 or radius_range[1] < radius_range[0]:
        raise ValueError("need 1 <= r_min <= r_max")
    if radius_range[1] >= min(dims) / 4:
        raise ValueError("radii infeasible for volume")
    rng = np.random.default_rng(seed)
    segments = _grow_tree(dims, rng, n_branches, radius_range, 3)
    coords = _grid(dims)
    sd = _min_surface_distance(coords, segments)
    ad = _min_axis_distance(coords, segments)
    image = np.clip(0.5 - sd, 0.0, 1.0)
    gt = (sd <= 0.0).astype(np.float64)
    cl = ((ad <= 0.5) & (gt > 0)).astype(np.float64)
    desc = {
        "kind": "tree3d",
        "seed": int(seed),
        "n_branches": int(n_branches),
        "radius_range": [float(radius_range[0]), float(radius_range[1])],
        "n_segments": len(segments),
    }
    return Phantom(Image(image), Image(gt), Image(cl), desc)


def tree_2d(dims, seed=0, n_branches=7, radius_range=(1.5, 3.0)) -> Phantom:
    """2D analogue of tree_3d: random connected tree of anti-aliased capsules."""
    dims = tuple(int(d) for d in dims)
    if min(dims) < 32:
        raise ValueError("tree_2d needs dims >= 32 per axis")
    if n_branches < 1:
        raise ValueError("n_branches must be >= 1")
    if radius_range[0] < 1.0 or radius_range[1] < radius_range[0]:
        raise ValueError("need 1 <= r_min <= r_max")
    rng = np.random.default_rng(seed)
    segments = _grow_tree(dims, rng, n_branches, radius_range, 2)
    desc = {
        "kind": "tree2d",
        "seed": int(seed),
        "n_branches": int(n_branches),
        "radius_range": [float(radius_range[0]), float(radius_range[1])],
        "n_segments": len(segments),
    }
    return _render_2d(dims, segments, desc)


def degrade(p: Phantom, noise_variance=10.0, smooth_sigma=1.0, seed=0) -> Phantom:
    """Add Gaussian noise on the 0-255 scale, then Gaussian smoothing.

    The defaults (variance 10, smoothing std 1) are the standard degradation
    protocol for the synthetic volumes. Masks are unchanged; noise is seeded.
    """
    if noise_variance < 0 or smooth_sigma < 0:
        raise ValueError("noise_variance and smooth_sigma must be >= 0")
    rng = np.random.default_rng(seed)
    data = p.image.data * 255.0
    if noise_variance > 0:
        data = data + rng.normal(scale=np.sqrt(noise_variance), size=data.shape)
    if smooth_sigma > 0:
        data = gaussian_filter(data, smooth_sigma, mode="mirror")
    data = np.clip(data / 255.0, 0.0, 1.0)
    desc = dict(p.descriptor)
    desc["degrade"] = {"noise_variance": float(noise_variance),
                       "smooth_sigma": float(smooth_sigma), "seed": int(seed)}
    return Phantom(Image(data), p.ground_truth, p.centerline, desc)
