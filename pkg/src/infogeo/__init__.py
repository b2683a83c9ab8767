"""Warped Rao-Fisher information metrics for location-scale models.

Subpackages cover the modified-Bessel kernel, the affine-invariant SPD
cone, the abstract (multiply-)warped metric layer, the von Mises-Fisher
and Riemannian Gaussian models, and a geodesic solver based on the
one-dimensional conservative reduction of the geodesic equation.
"""

__version__ = "0.1.0"
