"""Photon-assisted bleaching in three-level Lambda media."""

__version__ = "0.1.0"

from .core_model import (AtomParams, DomainError, DriveParams, IntensityScales,  # noqa: E402
                         MediumParams)

__all__ = ["AtomParams", "DriveParams", "MediumParams", "IntensityScales", "DomainError",
           "__version__"]
