"""
Periodic microstructures: presets, sampling, validation and resampling.
"""

from blochhomog.microstructure.presets import (
    PRESET_KINDS,
    PresetSpec,
    TrigTerm,
    build_field,
    phase_matrix,
)
from blochhomog.microstructure.resample import resample_periodic
from blochhomog.microstructure.validation import (
    cell_average,
    harmonic_average,
    validate_ellipticity,
)

__all__ = [
    "PRESET_KINDS",
    "PresetSpec",
    "TrigTerm",
    "build_field",
    "phase_matrix",
    "resample_periodic",
    "cell_average",
    "harmonic_average",
    "validate_ellipticity",
]
