"""Finitely generated abelian grading groups and their elements.

A group is Z^k x Z/m1 x ... x Z/mt, encoded as one modulus per coordinate
with 0 standing for an infinite-order coordinate.  Elements normalise their
torsion coordinates into [0, m), so equality is structural.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class GradeGroup:
    moduli: tuple

    def __post_init__(self):
        if any(m < 0 for m in self.moduli):
            raise ValueError("moduli must be nonnegative")

    @classmethod
    def free(cls, rank):
        return cls((0,) * rank)

    @classmethod
    def from_json(cls, obj):
        free_rank = obj.get("free_rank", 0)
        torsion = obj.get("torsion", [])
        return cls((0,) * free_rank + tuple(torsion))

    def to_json(self):
        free = sum(1 for m in self.moduli if m == 0)
        torsion = [m for m in self.moduli if m > 0]
        return {"free_rank": free, "torsion": torsion}

    @property
    def rank(self):
        return len(self.moduli)

    def zero(self):
        return Grade(self, (0,) * len(self.moduli))

    def element(self, coords):
        coords = tuple(coords)
        if len(coords) != len(self.moduli):
            raise ValueError(
                f"grade vector has length {len(coords)}, expected {len(self.moduli)}"
            )
        reduced = tuple(c % m if m > 0 else c for c, m in zip(coords, self.moduli))
        return Grade(self, reduced)


TRIVIAL_GROUP = GradeGroup(())


@dataclass(frozen=True)
class Grade:
    group: GradeGroup
    coords: tuple

    def __add__(self, other):
        if self.group != other.group:
            raise ValueError("grades live in different groups")
        return self.group.element(a + b for a, b in zip(self.coords, other.coords))

    def __neg__(self):
        return self.group.element(-c for c in self.coords)

    def __sub__(self, other):
        return self + (-other)

    @property
    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def sort_key(self):
        return self.coords

    def __repr__(self):
        return f"Grade{self.coords}"


def grade_sort_key(grade):
    """Total order with None (the grade of the empty support) first."""
    if grade is None:
        return (0, ())
    return (1, grade.coords)
