"""Centrally symmetric polytopes with many faces, built from symmetric moment curves."""

from .curve import Angle, FrequencySet, build_angle_grid, build_cluster_grid, eval_moment_curve
from .faces import FaceCertificate, NotFace, OracleFailure, is_face
from .polytopes import (ClusterSpec, DirectSumSpec, ManyFacesSpec, NeighborlySpec,
                        PolytopeInstance, construct)

__version__ = "0.1.0"

__all__ = [
    "Angle", "FrequencySet", "build_angle_grid", "build_cluster_grid", "eval_moment_curve",
    "FaceCertificate", "NotFace", "OracleFailure", "is_face",
    "ClusterSpec", "DirectSumSpec", "ManyFacesSpec", "NeighborlySpec", "PolytopeInstance",
    "construct", "__version__",
]
