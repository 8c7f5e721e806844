"""Enhance a noisy Y-junction phantom and compare junction uniformity
against the classic vesselness baseline.

Writes the degraded input, both response maps, and prints the junction
ratio (junction response / median centerline response) for each filter.
"""

import numpy as np

from curvefilt import (
    FilterParams,
    Image,
    build_scale_list,
    degrade,
    enhance,
    frangi,
    junction_metrics,
    save_image,
    yjunction_2d,
)

phantom = yjunction_2d((256, 256), width=4, branch_angle=120.0)
noisy = degrade(phantom, noise_variance=10.0, smooth_sigma=1.0, seed=42)

scales = build_scale_list(1.0, 3.0, 5)
params = FilterParams(scales=scales, mode="pfat")

response = enhance(noisy.image, params)
baseline = frangi(noisy.image, scales)

save_image(noisy.image, "junction_input.png")
save_image(Image(response.values), "junction_mfat.png")
save_image(Image(baseline.values), "junction_frangi.png")

for name, resp in [("tensor-anisotropy filter", response), ("vesselness baseline", baseline)]:
    ratio, cv = junction_metrics(resp, phantom)
    print(f"{name}: junction ratio {ratio:.3f}, centerline CV {cv:.3f}")

cl = phantom.centerline.data > 0
print(f"median centerline response: {np.median(response.values[cl]):.3f}")
