"""Spectral classification of interval maps and quantum models.

Thin wrapper over the compiled extension; see the function docstrings there.
"""

try:
    from ._ehkit import (  # wheel layout: extension lives inside the package
        catalog,
        classify_map,
        classify_quantum,
        moyal_bracket_scaling,
        run,
        star_product_scaling,
        two_level,
        version,
        wigner_gaussian_state,
    )
except ImportError:  # build-tree layout: extension sits on sys.path
    from _ehkit import (
        catalog,
        classify_map,
        classify_quantum,
        moyal_bracket_scaling,
        run,
        star_product_scaling,
        two_level,
        version,
        wigner_gaussian_state,
    )

__version__ = version()

__all__ = [
    "catalog",
    "classify_map",
    "classify_quantum",
    "moyal_bracket_scaling",
    "run",
    "star_product_scaling",
    "two_level",
    "version",
    "wigner_gaussian_state",
]
