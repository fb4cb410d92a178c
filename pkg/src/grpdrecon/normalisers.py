"""Homogeneous normalisers of the diagonal and their quotient semigroup.

A normaliser of the diagonal D is an element n with some generalised
inverse m (mnm = m, nmn = n) such that mDn and nDm land back in D.  Over an
integral domain, when the kernel of the grading has trivial isotropy
everywhere, the homogeneous normalisers are exactly the unit-valued
functions supported on a homogeneous bisection; `is_normaliser` implements
that structural test and `bf_is_normaliser` the definitional one, by
exhaustive search, so the two can be compared on small fixtures.
"""

import itertools
from dataclasses import dataclass

from . import _linalg
from .algebra import AlgebraElement, indicator
from .grading import grade_sort_key
from .groupoid import (compose_sets, homogeneous_bisections, invert_set,
                       is_bisection, is_principal_kernel)
from .limits import EnumerationCapExceeded, resolve_cap
from .rings import PrimeField


class HypothesisViolation(RuntimeError):
    """A stated hypothesis of the pipeline fails for this input."""


class NotANormaliserError(ValueError):
    pass


@dataclass(frozen=True)
class StandardForm:
    """n = sum of a_V 1_V over disjoint bisections covering one grade fiber."""

    grade: object  # Grade, or None for the zero normaliser
    pieces: tuple  # ((unit coefficient, frozenset), ...) in canonical order

    @property
    def support(self):
        out = set()
        for _, piece in self.pieces:
            out |= piece
        return frozenset(out)

    def element(self, g, ring):
        coeffs = {}
        for value, piece in self.pieces:
            for m in piece:
                coeffs[m] = value
        return AlgebraElement(g, ring, coeffs)

    def partner(self, g, ring):
        """The generalised inverse: a_V^{-1} on the inverted pieces."""
        coeffs = {}
        for value, piece in self.pieces:
            inv_value = ring.unit_inverse(value)
            for m in piece:
                coeffs[g.inv[m]] = inv_value
        return AlgebraElement(g, ring, coeffs)


def is_normaliser(n):
    """Standard form of a homogeneous normaliser, or None.

    Requires the kernel of the grading to have trivial isotropy (raised as
    HypothesisViolation otherwise, which is distinct from "not a
    normaliser").  Pieces are the maximal constant-coefficient
    sub-bisections, ordered by their least morphism.
    """
    g, ring = n.groupoid, n.ring
    if not is_principal_kernel(g):
        raise HypothesisViolation("kernel of the grading is not principal")
    if n.is_zero:
        return StandardForm(None, ())
    supp = sorted(n.coeffs)
    grades = {g.grade(m) for m in supp}
    if len(grades) != 1:
        return None
    if not is_bisection(g, supp):
        return None
    if any(not ring.is_unit(v) for v in n.coeffs.values()):
        return None
    by_value = {}
    for m in supp:  # canonical order; dict preserves first-seen order
        by_value.setdefault(n.coeffs[m], []).append(m)
    pieces = tuple((value, frozenset(ms)) for value, ms in by_value.items())
    return StandardForm(grades.pop(), pieces)


def normaliser_star(n):
    """Coefficientwise-inverted transpose: n*(m) = n(inv m)^{-1}."""
    if is_normaliser(n) is None:
        raise NotANormaliserError("star is only defined on normalisers")
    g, ring = n.groupoid, n.ring
    return AlgebraElement(g, ring,
                          {g.inv[m]: ring.unit_inverse(v) for m, v in n.coeffs.items()})


def _structure_tables(g):
    morphs = list(g.morphisms)
    index = {m: i for i, m in enumerate(morphs)}
    triples = [(index[a], index[b], index[c])
               for (a, b), c in g.compose.items() if g.src[a] == g.dst[b]]
    unit_positions = frozenset(index[u] for u in g.units if u in index)
    return morphs, index, triples, unit_positions


def bf_is_normaliser(n, cap=None):
    """Definitional normaliser test by exhaustive witness search.

    Uses only the defining identities over a finite field: some m with
    mnm = m, nmn = n, and m 1_K n, n 1_K m diagonal for every subset K of
    the units.  Candidates are cut down by first solving the linear
    equation n X n = n, which every witness satisfies.  Non-homogeneous
    inputs are rejected by the grade test.
    """
    g, ring = n.groupoid, n.ring
    if not isinstance(ring, PrimeField):
        raise ValueError("the definitional search needs a finite field")
    cap = resolve_cap(cap)
    p = ring.p
    N = len(g.morphisms)
    if p ** N > cap:
        raise EnumerationCapExceeded(f"{p}^{N} candidate elements exceeds cap {cap}")

    if len({g.grade(m) for m in n.coeffs}) > 1:
        return False

    morphs, index, triples, unit_positions = _structure_tables(g)
    nvec = tuple(n.coeffs.get(m, 0) for m in morphs)

    def conv(x, y):
        out = [0] * N
        for i, j, k in triples:
            out[k] = (out[k] + x[i] * y[j]) % p
        return out

    def diagonal_ok(x):
        return all(x[i] == 0 for i in range(N) if i not in unit_positions)

    # every witness m solves the linear system n X n = n
    columns = []
    for i in range(N):
        e = [0] * N
        e[i] = 1
        columns.append(conv(conv(nvec, e), nvec))
    rows = [[columns[j][r] for j in range(N)] for r in range(N)]
    solved = _linalg.solve_affine(rows, list(nvec), ring)
    if solved is None:
        return False
    particular, basis = solved

    unit_subsets = []
    units_sorted = sorted(unit_positions)
    for bits in range(1, 2 ** len(units_sorted)):
        vec = [0] * N
        for pos, i in enumerate(units_sorted):
            if bits >> pos & 1:
                vec[i] = 1
        unit_subsets.append(vec)

    for combo in itertools.product(range(p), repeat=len(basis)):
        m = list(particular)
        for c, vec in zip(combo, basis):
            if c:
                for i in range(N):
                    m[i] = (m[i] + c * vec[i]) % p
        if conv(conv(m, nvec), m) != m:
            continue
        ok = True
        for kvec in unit_subsets:
            if not diagonal_ok(conv(conv(m, kvec), nvec)):
                ok = False
                break
            if not diagonal_ok(conv(conv(nvec, kvec), m)):
                ok = False
                break
        if ok:
            return True
    return False


def equiv(f, h, all_idempotents=False):
    """The support relation of the quotient: same grade and same conjugates.

    Checks f* p f = h* p h and f p f* = h p h* for the atomic idempotents
    p = 1_{u}; atoms suffice by additivity over disjoint unions.  Pass
    all_idempotents=True to quantify over every 1_K instead (the slow,
    literal form, kept as an oracle).
    """
    sf, sh = is_normaliser(f), is_normaliser(h)
    if sf is None or sh is None:
        raise NotANormaliserError("equiv is only defined on normalisers")
    if f.is_zero or h.is_zero:
        return f.is_zero and h.is_zero
    if sf.grade != sh.grade:
        return False
    g, ring = f.groupoid, f.ring
    fs, hs = normaliser_star(f), normaliser_star(h)
    if all_idempotents:
        units = sorted(g.units)
        subsets = [frozenset(u for i, u in enumerate(units) if bits >> i & 1)
                   for bits in range(1, 2 ** len(units))]
    else:
        subsets = [frozenset([u]) for u in sorted(g.units)]
    for K in subsets:
        pk = indicator(g, ring, K)
        if fs * pk * f != hs * pk * h:
            return False
        if f * pk * fs != h * pk * hs:
            return False
    return True


@dataclass(frozen=True)
class NormaliserClass:
    representative: AlgebraElement
    support: frozenset
    grade: object  # Grade or None


@dataclass(frozen=True)
class NormaliserSemigroup:
    """Quotient classes with their product and star tables."""

    groupoid: object
    ring: object
    classes: tuple
    product: tuple  # product[i][j] = index of [f_i][f_j]
    star: tuple     # star[i] = index of [f_i]^*

    def index_of_support(self, support):
        return self._support_index[frozenset(support)]

    @property
    def _support_index(self):
        return {c.support: i for i, c in enumerate(self.classes)}

    def to_tsv(self):
        lines = ["class\tgrade\tsupport\tstar\tproducts"]
        for i, c in enumerate(self.classes):
            grade = "-" if c.grade is None else repr(list(c.grade.coords))
            supp = ",".join(sorted(c.support)) or "-"
            prods = ",".join(f"c{j}" for j in self.product[i])
            lines.append(f"c{i}\t{grade}\t{supp}\tc{self.star[i]}\t{prods}")
        return "\n".join(lines) + "\n"


def enumerate_homogeneous_elements(g, ring, cap=None):
    """All homogeneous algebra elements over a finite field, zero first."""
    if not isinstance(ring, PrimeField):
        raise ValueError("homogeneous enumeration needs a finite field")
    cap = resolve_cap(cap)
    p = ring.p
    if p ** len(g.morphisms) > cap:
        raise EnumerationCapExceeded(
            f"{p}^{len(g.morphisms)} elements exceeds cap {cap}")
    yield AlgebraElement(g, ring, {})
    fibers = g.fibers()
    for grade in sorted(fibers, key=lambda gr: gr.coords):
        fiber = fibers[grade]
        for vec in itertools.product(range(p), repeat=len(fiber)):
            if all(v == 0 for v in vec):
                continue
            yield AlgebraElement(g, ring, dict(zip(fiber, vec)))


def normaliser_semigroup(g, ring, mode="auto", cap=None):
    """All classes of homogeneous normalisers with product and star tables.

    In brute-force mode (finite field within the cap) the classes are found
    by scanning every homogeneous element and grouping by the Lemma-style
    support key; in white-box mode one representative 1_V is generated per
    homogeneous bisection V.  Either way the support map onto the
    homogeneous bisections is verified to be a product- and star-preserving
    bijection.
    """
    if not is_principal_kernel(g):
        raise HypothesisViolation("kernel of the grading is not principal")
    cap_value = resolve_cap(cap)
    bis = homogeneous_bisections(g, cap)
    if mode == "auto":
        feasible = isinstance(ring, PrimeField) and ring.p ** len(g.morphisms) <= cap_value
        mode = "brute-force" if feasible else "white-box"

    if mode == "brute-force":
        found = {}
        for n in enumerate_homogeneous_elements(g, ring, cap):
            sf = is_normaliser(n)
            if sf is None:
                continue
            key = (sf.support, sf.grade)
            found.setdefault(key, n)  # first seen = lex-least representative
        expected = {(supp, grade) for supp, grade in bis}
        if set(found) != expected:
            raise AssertionError("normaliser supports do not match the bisections")
        records = [(supp, grade, rep) for (supp, grade), rep in found.items()]
    elif mode == "white-box":
        records = [(supp, grade, indicator(g, ring, supp)) for supp, grade in bis]
    else:
        raise ValueError(f"unknown mode {mode!r}")

    records.sort(key=lambda r: (grade_sort_key(r[1]), tuple(sorted(r[0]))))
    classes = tuple(NormaliserClass(rep, frozenset(supp), grade)
                    for supp, grade, rep in records)
    by_support = {c.support: i for i, c in enumerate(classes)}

    product = []
    for ci in classes:
        row = []
        for cj in classes:
            prod = ci.representative * cj.representative
            k = by_support[prod.support]
            if prod.support != compose_sets(g, ci.support, cj.support):
                raise AssertionError("class product does not match the set product")
            row.append(k)
        product.append(tuple(row))

    star = []
    for ci in classes:
        st = normaliser_star(ci.representative)
        k = by_support[st.support]
        if st.support != invert_set(g, ci.support):
            raise AssertionError("class star does not match the set inverse")
        star.append(k)

    return NormaliserSemigroup(g, ring, classes, tuple(product), tuple(star))
