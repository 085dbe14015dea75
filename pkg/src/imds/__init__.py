"""Construction, canonicalization and enumeration of 4x4 involutory MDS matrices over GF(2^m)."""

__version__ = "0.1.0"

from .field import GF  # noqa: E402
from .forms import (DiagTriple, RepTuple, build_involutory, build_representative,  # noqa: E402
                    canonicalize, expand)

__all__ = ["GF", "RepTuple", "DiagTriple", "build_involutory", "build_representative",
           "canonicalize", "expand", "__version__"]
