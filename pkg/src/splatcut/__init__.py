"""Interactive foreground/background segmentation of 3D Gaussian splat scenes."""

from .backend import backend_name

__version__ = "0.1.0"

__all__ = ["backend_name", "__version__"]
