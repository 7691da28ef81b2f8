"""Exact homotopy transfer, Massey products and formality checks for
finite-dimensional dg-algebras over the rationals."""

from .linalg import (ChainComplex, ContractionData, GradedMap, GradedVectorSpace,
                     MultilinearMap, cohomology)
from .dga import (DgAlgebra, algebra_from_tables, cup_length, induced_cohomology_algebra,
                  reduced_subalgebra, validate)
from .ainfinity import AInfinityMorphism, AInfinityStructure, morphism_defect, stasheff_defect
from .transfer import TransferResult, transfer
from .massey import (epsilon, explore_massey, higher_massey_unique, massey_vanishes,
                     triple_massey)
from .formality import (DgSpan, FormalityCertificate, arity_bound, certify_formality,
                        splice_span, theorem1_pipeline)
from .complexes import (OrderedSimplicialComplex, cochain_algebra, example_corpus,
                        ls_cat_lower_bound, suspension)

__version__ = "0.1.0"
