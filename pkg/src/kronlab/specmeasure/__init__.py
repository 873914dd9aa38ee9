"""Measure algebra: atoms plus piecewise-constant densities, group measures, verdicts."""

from .groupmeasure import (COLLISIONS, MEMBER, GroupCollisionError, GroupMeasure,
                           StructuralVerdict, group_word_of, realize, structural_self_similarity,
                           support_overlap)
from .io import (MeasureParseError, dumps_csv, dumps_json, dumps_text, loads_csv, loads_json,
                 loads_text)
from .measure import EPS_POS, NUMERIC, SYMBOLIC, AtomCollisionError, Measure, atomic, uniform
from .ops import (MetricConfig, bochner, calkin_wilf, mass_in, mix, moment_vector, restrict,
                  scale_measure, superpose, symmetrize, to_numeric, translate_measure,
                  weak_distance)
from .verdicts import (COMMON_MASS, INCONCLUSIVE, SINGULAR, SingularityVerdict,
                       abs_continuity_test, equivalence_test, self_similarity_scales,
                       singularity_test)

__all__ = [
    "AtomCollisionError", "COLLISIONS", "COMMON_MASS", "EPS_POS", "GroupCollisionError",
    "GroupMeasure", "INCONCLUSIVE", "MEMBER", "Measure", "MeasureParseError", "MetricConfig",
    "NUMERIC", "SINGULAR", "SYMBOLIC", "SingularityVerdict", "StructuralVerdict",
    "abs_continuity_test", "atomic", "bochner", "calkin_wilf", "dumps_csv", "dumps_json",
    "dumps_text", "equivalence_test", "group_word_of", "loads_csv", "loads_json", "loads_text",
    "mass_in", "mix", "moment_vector", "realize", "restrict", "scale_measure",
    "self_similarity_scales", "singularity_test", "structural_self_similarity", "superpose",
    "support_overlap", "symmetrize", "to_numeric", "translate_measure", "uniform",
    "weak_distance",
]
