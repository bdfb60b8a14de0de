"""Protoconcept and semiconcept algebras, finite double Boolean algebras,
primary filters and ideals, topologised contexts, and finite checks of the
representation and duality results linking them."""

from .concepts import (ConceptDba, ConceptPair, SizeCapError, build_proto_dba, build_semi_dba,
                       build_wille_proto_dba, build_wille_semi_dba)
from .context import FormalContext, black_box, black_diamond, box, derive_extent, derive_intent, diamond
from .dba import (BooleanAlgebra, DbaHom, FiniteDba, InvalidDbaError, boolean_power, check_hom,
                  classify_dba, from_boolean, to_boolean, validate_dba)
from .filters import spectrum, standard_complement, standard_context
from .representation import build_kpr_cts, k_maps, rep_map_oo, rep_map_wille
from .topology import Cts, FiniteTopology

__version__ = "0.1.0"

__all__ = [
    "BooleanAlgebra", "ConceptDba", "ConceptPair", "Cts", "DbaHom", "FiniteDba", "FiniteTopology",
    "FormalContext", "InvalidDbaError", "SizeCapError", "black_box", "black_diamond", "boolean_power",
    "box", "build_kpr_cts", "build_proto_dba", "build_semi_dba", "build_wille_proto_dba",
    "build_wille_semi_dba", "check_hom", "classify_dba", "derive_extent", "derive_intent", "diamond",
    "from_boolean", "k_maps", "rep_map_oo", "rep_map_wille", "spectrum", "standard_complement",
    "standard_context", "to_boolean", "validate_dba",
]
