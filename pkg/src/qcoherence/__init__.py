"""Multi-path correlation functions and second-order decoherence in a
two-mode boson system coupled to an oscillator reservoir."""

from .core_model import (
    DIAGONAL,
    ConvergenceError,
    DomainError,
    FockState2,
    MeasurementVector,
    ModelError,
    ModePair,
    NormalizationError,
    ReservoirMode,
    ReservoirSpec,
    ShapeError,
    SizeError,
    TimePair,
    make_measurement,
    validate_reservoir,
)

__version__ = "0.1.0"
