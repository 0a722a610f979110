"""Steinitz orders, types and typesets of group chains and their odometer actions."""

from .automata import (
    AutomatonFamily,
    Finite,
    InfiniteCertified,
    UnknownAtBudget,
    WreathRecursion,
    catalog_family,
    element_type,
    stabilizer_chain_family,
    typeset_bound,
)
from .chain import (
    BackendDisagreement,
    ChainFamily,
    DepthTooLarge,
    GrowthCertificate,
    LevelAction,
    NotInSubgroup,
    RestrictedContext,
    UnknownGenerator,
    Word,
    enumerate_words,
    parse_word,
)
from .config import RunConfig, build_family
from .engine import (
    commensurable,
    element_order_mod_core,
    element_steinitz_order,
    group_image_order,
    lagrange_divisibility_check,
    profinite_order,
    restricted_order,
    typeset_sample,
)
from .factored import Factored
from .families import (
    FamilyError,
    HeisenbergFamily,
    Schedule,
    SemidirectPermutationFamily,
    ZnDiagonalFamily,
    ZScheduleFamily,
)
from .steinitz import ExactSteinitz, SteinitzApprox, TailRule, asymptotically_equivalent
from .types import TypeDescriptor, type_equal, type_of

__version__ = "0.1.0"

__all__ = [
    "AutomatonFamily",
    "BackendDisagreement",
    "ChainFamily",
    "DepthTooLarge",
    "ExactSteinitz",
    "Factored",
    "FamilyError",
    "Finite",
    "GrowthCertificate",
    "HeisenbergFamily",
    "InfiniteCertified",
    "LevelAction",
    "NotInSubgroup",
    "RestrictedContext",
    "RunConfig",
    "Schedule",
    "SemidirectPermutationFamily",
    "SteinitzApprox",
    "TailRule",
    "TypeDescriptor",
    "UnknownAtBudget",
    "UnknownGenerator",
    "WreathRecursion",
    "Word",
    "ZScheduleFamily",
    "ZnDiagonalFamily",
    "asymptotically_equivalent",
    "build_family",
    "catalog_family",
    "commensurable",
    "element_order_mod_core",
    "element_steinitz_order",
    "element_type",
    "enumerate_words",
    "group_image_order",
    "lagrange_divisibility_check",
    "parse_word",
    "profinite_order",
    "restricted_order",
    "stabilizer_chain_family",
    "type_equal",
    "type_of",
    "typeset_bound",
    "typeset_sample",
]
