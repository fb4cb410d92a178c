"""Exact Steinberg-algebra tools for finite graded groupoids.

Builds convolution algebras over exact rings, reconstructs a groupoid from
its algebra-with-diagonal via the normaliser/germ pipeline, and computes
Leavitt path algebra normal forms and the det-sign graph invariant.
"""

from .grading import Grade, GradeGroup, TRIVIAL_GROUP
from .groupoid import (Groupoid, Violation, compose_sets, groupoid_from_dict,
                       groupoid_isomorphic, groupoid_to_dict, homogeneous_bisections,
                       invert_set, is_bisection, is_principal_kernel, load_groupoid,
                       validate)
from .rings import GF, Q, Z, ring_from_tag

__all__ = [
    "Grade", "GradeGroup", "TRIVIAL_GROUP",
    "Groupoid", "Violation", "compose_sets", "groupoid_from_dict",
    "groupoid_isomorphic", "groupoid_to_dict", "homogeneous_bisections",
    "invert_set", "is_bisection", "is_principal_kernel", "load_groupoid",
    "validate",
    "GF", "Q", "Z", "ring_from_tag",
]
