"""Higher-dimensional automata: reduction by cube collapses and edge merges."""

version = "0.1.0"

from .errors import (
    ArgumentError,
    CertificationError,
    CubeAbsError,
    IntegrityError,
    LoadError,
    ParseError,
    PreconditionError,
    RefusalError,
    ResourceError,
)
from .hda import Hda
from .precubical import PrecubicalSet
