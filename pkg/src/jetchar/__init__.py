"""Function-field Witt vectors, jet spaces of Drinfeld modules and their δ-characters."""

from .characters import (
    Character,
    ClosedForms,
    ExtClass,
    ExtSharpClass,
    SplittingData,
    build_theta,
    crystal,
    del_psi,
    ext_reduce,
    ext_sharp_image,
    inner_derivation,
    order0_certificate,
    phi_star,
    rank2_closed_forms,
    splitting_data,
    xn_basis,
)
from .drinfeld import Certificate, DrinfeldModule, NKernelChar, psi, theta_iso
from .errors import ConfigError, JetCharError, PrecisionError
from .field import FieldSpec, FiniteField, field_for
from .local import INF, LocalElem, LocalRing
from .twisted import AdditivePoly, OreMatrix, invert_sdagger, solve_intertwiner
from .witt import (
    LocalCarrier,
    PolyCarrier,
    WittVector,
    frobenius_W,
    ghost,
    scalar_embed,
    teichmuller,
    unghost,
    verschiebung,
    witt_mul,
)

__version__ = "0.1.0"

__all__ = [
    "AdditivePoly",
    "Certificate",
    "Character",
    "ClosedForms",
    "ConfigError",
    "DrinfeldModule",
    "ExtClass",
    "ExtSharpClass",
    "FieldSpec",
    "FiniteField",
    "INF",
    "JetCharError",
    "LocalCarrier",
    "LocalElem",
    "LocalRing",
    "NKernelChar",
    "OreMatrix",
    "PolyCarrier",
    "PrecisionError",
    "SplittingData",
    "WittVector",
    "build_theta",
    "crystal",
    "del_psi",
    "ext_reduce",
    "ext_sharp_image",
    "field_for",
    "frobenius_W",
    "ghost",
    "inner_derivation",
    "invert_sdagger",
    "order0_certificate",
    "phi_star",
    "psi",
    "rank2_closed_forms",
    "scalar_embed",
    "solve_intertwiner",
    "splitting_data",
    "teichmuller",
    "theta_iso",
    "unghost",
    "verschiebung",
    "witt_mul",
    "xn_basis",
]
