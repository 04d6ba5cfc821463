"""quatheta: exact anticyclotomic theta elements on definite quaternion algebras."""

from .exact import (
    CycloNum,
    PadicNum,
    PrecisionExhausted,
    QuadElem,
    QuadField,
    QuathetaError,
    hecke_field,
    make_quad_field,
)

__all__ = [
    "CycloNum",
    "PadicNum",
    "PrecisionExhausted",
    "QuadElem",
    "QuadField",
    "QuathetaError",
    "hecke_field",
    "make_quad_field",
]

__version__ = "0.1.0"
