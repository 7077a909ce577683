"""Offline figure generation for eulerkit CSV artifacts."""

from .io import FieldTable, MetadataMismatch, read_table
from .plots import ProfileSet, entropy_scatter_deviation, plot_entropy_plane, plot_field2d, plot_profiles

__version__ = "0.1.0"

__all__ = [
    "FieldTable",
    "MetadataMismatch",
    "read_table",
    "ProfileSet",
    "plot_profiles",
    "plot_entropy_plane",
    "plot_field2d",
    "entropy_scatter_deviation",
    "__version__",
]
