"""curvefilt: multiscale tensor-anisotropy enhancement of curvilinear
structures in 2D images and 3D volumes, with a vesselness baseline,
synthetic phantoms, and ROC/AUC evaluation."""

__version__ = "0.1.0"

from .eigen import BRIGHT_ON_DARK, DARK_ON_BRIGHT, EigenField, eig_sym2, eig_sym3, eigen_field
from .evaluate import RocCurve, junction_metrics, mean_roc, profile, roc
from .frangi import frangi
from .image import Image, ImageIOError, load_image, normalize, save_image
from .mfat import (
    FilterParams,
    RegularizedEigen,
    ResponseMap,
    enhance,
    fat_lambda,
    fat_prob,
    multiscale_combine,
    regularize_lambda3,
    regularized_from_eigen,
    response_at_scale_2d,
    response_at_scale_3d,
)
from .phantom import Phantom, cross_2d, degrade, tree_2d, tree_3d, tube_2d, yjunction_2d
from .scalespace import HessianField, ScaleList, build_scale_list, hessian_at_scale

__all__ = [
    "BRIGHT_ON_DARK", "DARK_ON_BRIGHT", "EigenField", "eig_sym2", "eig_sym3",
    "eigen_field", "RocCurve", "junction_metrics", "mean_roc", "profile", "roc",
    "frangi", "Image", "ImageIOError", "load_image", "normalize", "save_image",
    "FilterParams", "RegularizedEigen", "ResponseMap", "enhance", "fat_lambda",
    "fat_prob", "multiscale_combine", "regularize_lambda3", "regularized_from_eigen",
    "response_at_scale_2d", "response_at_scale_3d", "Phantom", "cross_2d",
    "degrade", "tree_2d", "tree_3d", "tube_2d", "yjunction_2d",
    "HessianField", "ScaleList", "build_scale_list", "hessian_at_scale",
]
