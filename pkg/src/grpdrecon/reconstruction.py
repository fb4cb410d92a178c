"""Groupoid reconstruction from a graded ring presentation with marked diagonal.

The pipeline: check the diagonal is maximal abelian in the neutral
component, enumerate the atoms of its idempotent Boolean algebra (the Stone
spectrum), find one representative per class of homogeneous diagonal
normalisers, let the classes act on the spectrum, and assemble the groupoid
of germs.  For a presentation built from a groupoid, the germ groupoid is
isomorphic to the source via an explicit witness, which `verify_roundtrip`
constructs and checks table-by-table.

Two search modes: black-box enumerates normalisers over a finite field
using only the ring structure; white-box uses provenance (the source
groupoid) to generate indicator representatives directly.
"""

import itertools
import json
from dataclasses import dataclass, field

from . import _linalg
from .grading import GradeGroup, TRIVIAL_GROUP, grade_sort_key
from .groupoid import (Groupoid, homogeneous_bisections, is_principal_kernel,
                       validate)
from .limits import EnumerationCapExceeded, resolve_cap
from .normalisers import HypothesisViolation
from .rings import PrimeField, Q, Z, ring_from_tag

# auto mode prefers the black-box search only on comfortably small algebras
AUTO_BLACKBOX_LIMIT = 2 ** 12


class PresentationError(ValueError):
    """The presentation data violates its own invariants."""


@dataclass(frozen=True)
class Provenance:
    """White-box side channel: the groupoid whose point masses index the basis."""

    groupoid: object


@dataclass
class RingPresentation:
    ring: object
    basis: tuple
    mult: dict          # (i, j) -> {k: coef}; missing pair means zero
    diagonal: tuple
    grade_group: GradeGroup
    grading: dict       # basis id -> Grade
    provenance: object = None

    # -- element arithmetic (elements are sparse dicts id -> coefficient) --

    def basis_vec(self, b):
        return {b: self.ring.one}

    def add(self, x, y):
        ring = self.ring
        acc = dict(x)
        for k, v in y.items():
            s = ring.add(acc.get(k, ring.zero), v)
            if s == ring.zero:
                acc.pop(k, None)
            else:
                acc[k] = s
        return acc

    def scale(self, r, x):
        ring = self.ring
        if r == ring.zero:
            return {}
        return {k: ring.mul(r, v) for k, v in x.items()}

    def sub(self, x, y):
        return self.add(x, self.scale(self.ring.neg(self.ring.one), y))

    def mul(self, x, y):
        ring = self.ring
        acc = {}
        for i, vi in x.items():
            for j, vj in y.items():
                for k, c in self.mult.get((i, j), {}).items():
                    s = ring.add(acc.get(k, ring.zero), ring.mul(ring.mul(vi, vj), c))
                    if s == ring.zero:
                        acc.pop(k, None)
                    else:
                        acc[k] = s
        return acc

    def element_grade(self, x):
        """Common grade of the support, None for 0; mixed support raises."""
        grades = {self.grading[k] for k in x}
        if not grades:
            return None
        if len(grades) > 1:
            raise ValueError("element is not homogeneous")
        return grades.pop()

    def canon(self, x):
        return tuple(sorted(x.items()))


def validate_presentation(p):
    """Structure-constant sanity: associativity, graded products, good diagonal."""
    problems = []
    basis = set(p.basis)
    for (i, j), terms in p.mult.items():
        if i not in basis or j not in basis or any(k not in basis for k in terms):
            problems.append(f"mult entry ({i},{j}) references an unknown basis id")
    if set(p.grading) != basis:
        problems.append("grading must cover exactly the basis")
    diag = set(p.diagonal)
    if not diag <= basis:
        problems.append("diagonal_basis must be a subset of the basis")
    if problems:
        return problems

    e = p.grade_group.zero()
    for d in p.diagonal:
        if p.grading[d] != e:
            problems.append(f"diagonal element {d} is not neutrally graded")
    for i in p.basis:
        for j in p.basis:
            prod = p.mult.get((i, j), {})
            expect = p.grading[i] + p.grading[j]
            for k in prod:
                if p.grading[k] != expect:
                    problems.append(f"product {i}.{j} is not graded (term {k})")
    for a in p.basis:
        for b in p.basis:
            ab = p.mult.get((a, b), {})
            for c in p.basis:
                bc = p.mult.get((b, c), {})
                left = {}
                for k, v in ab.items():
                    left = p.add(left, p.scale(v, p.mult.get((k, c), {})))
                right = {}
                for k, v in bc.items():
                    right = p.add(right, p.scale(v, p.mult.get((a, k), {})))
                if left != right:
                    problems.append(f"associativity fails on ({a},{b},{c})")
    for d1 in p.diagonal:
        for d2 in p.diagonal:
            prod = p.mult.get((d1, d2), {})
            if any(k not in diag for k in prod):
                problems.append(f"diagonal is not closed: {d1}.{d2} leaves the span")
            if prod != p.mult.get((d2, d1), {}):
                problems.append(f"diagonal is not commutative on ({d1},{d2})")
    return problems


def presentation_from_groupoid(g, ring):
    """Point-mass basis presentation of the convolution algebra, with provenance."""
    mult = {}
    for (a, b), c in g.compose.items():
        if g.src[a] == g.dst[b]:
            mult[(a, b)] = {c: ring.one}
    grading = {m: g.grade(m) for m in g.morphisms}
    return RingPresentation(ring, tuple(g.morphisms), mult, tuple(sorted(g.units)),
                            g.grade_group, grading, provenance=Provenance(g))


def _field_for(ring):
    return Q if ring == Z else ring


def masa_holds(p):
    """Is the diagonal its own commutant inside the neutral component?

    Solved as a linear system over the coefficient field (rationals stand in
    for the integers; commutants have the same span).
    """
    e = p.grade_group.zero()
    eids = [b for b in p.basis if p.grading[b] == e]
    if not eids:
        return len(p.diagonal) == 0
    field = _field_for(p.ring)
    rows = []
    for d in p.diagonal:
        for k in p.basis:
            row = []
            for b in eids:
                left = p.mult.get((d, b), {}).get(k, p.ring.zero)
                right = p.mult.get((b, d), {}).get(k, p.ring.zero)
                row.append(field.normalize(p.ring.sub(left, right)))
            rows.append(row)
    dim = len(eids) - _linalg.matrix_rank(rows, field)
    return dim == len(p.diagonal)


def stone_spectrum(p, cap=None):
    """Atoms of the Boolean algebra of idempotents in the diagonal subring.

    Tries support analysis first (diagonal basis elements that are orthogonal
    idempotents after rescaling by a unit); over a finite field it falls back
    to enumerating the diagonal span.
    """
    problems = [msg for msg in validate_presentation(p) if "diagonal" in msg]
    if problems:
        raise PresentationError("; ".join(problems))
    ring = p.ring
    atoms = []
    orthogonal = True
    for i, d in enumerate(p.diagonal):
        sq = p.mult.get((d, d), {})
        if set(sq) == {d} and ring.is_unit(sq[d]):
            atoms.append({d: ring.unit_inverse(sq[d])})
        else:
            orthogonal = False
            break
        for d2 in p.diagonal[i + 1:]:
            if p.mult.get((d, d2), {}):
                orthogonal = False
                break
        if not orthogonal:
            break
    if orthogonal:
        return atoms  # diagonal tuple order = canonical id order

    if isinstance(ring, PrimeField):
        cap = resolve_cap(cap)
        k = len(p.diagonal)
        if ring.p ** k > cap:
            raise EnumerationCapExceeded(f"{ring.p}^{k} diagonal elements exceeds cap {cap}")
        idems = []
        for vec in itertools.product(range(ring.p), repeat=k):
            x = {d: v for d, v in zip(p.diagonal, vec) if v}
            if x and p.mul(x, x) == x:
                idems.append(x)
        atoms = [x for x in idems
                 if all(p.mul(y, x) in ({}, x) for y in idems)]
        atoms.sort(key=p.canon)
        return atoms
    raise PresentationError(
        "cannot enumerate the spectrum: diagonal basis is not orthogonal-idempotent "
        "after rescaling and the ring is not a finite field")


def character_value(p, atom, q):
    """Evaluate the atom's character on an idempotent q of the diagonal."""
    prod = p.mul(atom, q)
    if prod == atom:
        return 1
    if prod == {}:
        return 0
    raise ValueError("not an idempotent of the diagonal under this atom")


@dataclass(frozen=True)
class ClassRecord:
    """One class of homogeneous normalisers: representative plus witness."""

    rep: dict
    partner: dict
    support: frozenset
    grade: object  # Grade or None for the zero class


def _witness_search(p, n, cap):
    """Find m with mnm = m, nmn = n, and m D n, n D m diagonal, or None.

    Only candidates in the opposite grade fiber are scanned: from any
    witness, projecting to that fiber and one sandwich m n m yields another,
    so the restriction loses nothing.
    """
    ring = p.ring
    grade = p.element_grade(n)
    fiber = [b for b in p.basis if p.grading[b] == -grade]
    if not fiber:
        return None
    columns = {b: p.mul(p.mul(n, p.basis_vec(b)), n) for b in fiber}
    rows = []
    rhs = []
    for k in p.basis:
        rows.append([columns[b].get(k, ring.zero) for b in fiber])
        rhs.append(n.get(k, ring.zero))
    solved = _linalg.solve_affine(rows, rhs, ring)
    if solved is None:
        return None
    particular, basis_vecs = solved
    if not isinstance(ring, PrimeField) and basis_vecs:
        # infinite ring with a positive-dimensional solution space: scan a
        # bounded slice (the canonical witness, when it exists, has small
        # coordinates in the point-mass basis)
        raise EnumerationCapExceeded("witness space is not finite over this ring")
    choices = itertools.product(range(ring.p), repeat=len(basis_vecs)) \
        if isinstance(ring, PrimeField) else [()]
    diag = set(p.diagonal)
    for combo in choices:
        vec = list(particular)
        for c, bv in zip(combo, basis_vecs):
            if c:
                vec = [ring.add(v, ring.mul(c, w)) for v, w in zip(vec, bv)]
        m = {b: v for b, v in zip(fiber, vec) if v != ring.zero}
        if p.mul(p.mul(m, n), m) != m:
            continue
        ok = True
        for d in p.diagonal:
            dd = p.basis_vec(d)
            if any(k not in diag for k in p.mul(p.mul(m, dd), n)):
                ok = False
                break
            if any(k not in diag for k in p.mul(p.mul(n, dd), m)):
                ok = False
                break
        if ok:
            return m
    return None


def resolve_mode(p, mode):
    if mode != "auto":
        return mode
    feasible = isinstance(p.ring, PrimeField) and \
        p.ring.p ** len(p.basis) <= AUTO_BLACKBOX_LIMIT
    return "black-box" if feasible else "white-box"


def find_normalisers(p, mode="auto", cap=None):
    """One (representative, witness) pair per class of homogeneous normalisers.

    Black-box mode scans every homogeneous element of a finite-field algebra
    and groups by the conjugation signature (grade plus the conjugates of
    every atom); white-box mode reads the classes off the provenance
    groupoid as indicator functions of its homogeneous bisections.
    """
    cap_value = resolve_cap(cap)
    ring = p.ring
    mode = resolve_mode(p, mode)

    records = [ClassRecord({}, {}, frozenset(), None)]

    if mode == "black-box":
        if not isinstance(ring, PrimeField):
            raise EnumerationCapExceeded("black-box search needs a finite field")
        if ring.p ** len(p.basis) > cap_value:
            raise EnumerationCapExceeded(
                f"{ring.p}^{len(p.basis)} elements exceeds cap {cap_value}")
        atoms = stone_spectrum(p, cap)
        fibers = {}
        for b in p.basis:
            fibers.setdefault(p.grading[b], []).append(b)
        seen = {}
        for grade in sorted(fibers, key=lambda gr: gr.coords):
            fiber = fibers[grade]
            for vec in itertools.product(range(ring.p), repeat=len(fiber)):
                n = {b: v for b, v in zip(fiber, vec) if v}
                if not n:
                    continue
                m = _witness_search(p, n, cap_value)
                if m is None:
                    continue
                sig = (grade.coords,
                       tuple(p.canon(p.mul(p.mul(m, a), n)) for a in atoms),
                       tuple(p.canon(p.mul(p.mul(n, a), m)) for a in atoms))
                if sig not in seen:
                    seen[sig] = ClassRecord(n, m, frozenset(n), grade)
        records.extend(seen.values())
    elif mode == "white-box":
        if not isinstance(p.provenance, Provenance):
            raise EnumerationCapExceeded(
                "white-box mode needs provenance (the source groupoid)")
        g = p.provenance.groupoid
        for supp, grade in homogeneous_bisections(g, cap):
            if not supp:
                continue
            rep = {m: ring.one for m in supp}
            partner = {g.inv[m]: ring.one for m in supp}
            if p.mul(p.mul(rep, partner), rep) != rep or \
               p.mul(p.mul(partner, rep), partner) != partner:
                raise PresentationError(
                    "provenance indicators are not normalisers of this presentation")
            records.append(ClassRecord(rep, partner, frozenset(supp), grade))
    else:
        raise ValueError(f"unknown mode {mode!r}")

    records.sort(key=lambda r: (grade_sort_key(r.grade), tuple(sorted(r.support))))
    supports = [r.support for r in records]
    if len(set(supports)) != len(supports):
        raise PresentationError("distinct normaliser classes share a support")
    return records


@dataclass
class GermResult:
    groupoid: Groupoid
    atoms: list
    classes: list
    char_ids: list
    germ_ids: dict       # (class index, char index) -> morphism id
    class_of_support: dict
    mode: str


def germ_groupoid(p, mode="auto", cap=None):
    """Assemble the groupoid of germs for the normaliser action on the spectrum.

    Units are the characters of the diagonal's idempotent algebra; a germ is
    a normaliser class localised at a character in its domain, with two
    classes identified over a character when they agree after multiplying by
    its atom.  Composition, inverse and the grading come from the class
    semigroup.  The output always passes `validate`.
    """
    problems = validate_presentation(p)
    if problems:
        raise PresentationError("; ".join(sorted(set(problems))[:4]))
    if not masa_holds(p):
        raise HypothesisViolation(
            "diagonal is not maximal abelian in the neutral component")
    mode = resolve_mode(p, mode)
    atoms = stone_spectrum(p, cap)
    classes = find_normalisers(p, mode, cap)
    class_of_support = {r.support: i for i, r in enumerate(classes)}

    def class_of(x):
        key = frozenset(x)
        if key not in class_of_support:
            raise PresentationError("product left the normaliser class family")
        return class_of_support[key]

    char_ids = [f"x{i}" for i in range(len(atoms))]

    # action of each class on the characters in its domain
    dom = {}
    act = {}
    for ci, rec in enumerate(classes):
        if not rec.rep:
            continue
        sidem = p.mul(rec.partner, rec.rep)
        rido = p.mul(rec.rep, rec.partner)
        members = []
        action = {}
        for xi, atom in enumerate(atoms):
            if p.mul(atom, sidem) != atom:
                continue
            image = None
            for yi, cand in enumerate(atoms):
                conj = p.mul(p.mul(rec.partner, cand), rec.rep)
                if p.mul(atom, conj) == atom:
                    if image is not None:
                        raise PresentationError("action image is not unique")
                    image = yi
            if image is None:
                raise PresentationError("action image not found")
            if p.mul(atoms[image], rido) != atoms[image]:
                raise PresentationError("action image left the codomain")
            members.append(xi)
            action[xi] = image
        dom[ci] = members
        act[ci] = action

    # germs, keyed by (reduced class, character)
    germ_keys = set()
    reduced = {}
    for ci, rec in enumerate(classes):
        for xi in dom.get(ci, ()):
            ri = class_of(p.mul(rec.rep, atoms[xi]))
            reduced[(ci, xi)] = ri
            germ_keys.add((ri, xi))

    def germ_id(key):
        ri, xi = key
        return f"[{','.join(sorted(classes[ri].support))}@{char_ids[xi]}]"

    germ_ids = {key: germ_id(key) for key in sorted(germ_keys)}
    unit_keys = {}
    for xi, atom in enumerate(atoms):
        ci = class_of(atom)
        unit_keys[xi] = (ci, xi)

    morphisms = [germ_ids[k] for k in germ_keys]
    units = [germ_ids[unit_keys[xi]] for xi in range(len(atoms))]
    src, dst, inv, compose = {}, {}, {}, {}
    grading = {}
    for key in germ_keys:
        ci, xi = key
        gid = germ_ids[key]
        yi = act[ci][xi]
        src[gid] = germ_ids[unit_keys[xi]]
        dst[gid] = germ_ids[unit_keys[yi]]
        inv_key = (class_of(p.mul(classes[ci].partner, atoms[yi])), yi)
        inv[gid] = germ_ids[inv_key]
        grading[gid] = classes[ci].grade
    for k1 in germ_keys:
        c1, x1 = k1
        for k2 in germ_keys:
            c2, x2 = k2
            if x1 != act[c2][x2]:
                continue
            prod = p.mul(p.mul(classes[c1].rep, classes[c2].rep), atoms[x2])
            compose[(germ_ids[k1], germ_ids[k2])] = germ_ids[(class_of(prod), x2)]

    out = Groupoid(morphisms, units, src, dst, inv, compose,
                   grading=grading, grade_group=p.grade_group)
    bad = validate(out)
    if bad:
        raise PresentationError(f"germ groupoid failed validation: {bad[0]}")
    return GermResult(out, atoms, classes, char_ids, germ_ids, class_of_support,
                      mode)


@dataclass
class RoundtripReport:
    ok: bool
    stages: list
    mode: str = "-"
    class_count: int = 0
    character_count: int = 0
    germ_size: int = 0
    witness: dict = None
    hypothesis_violation: bool = False

    def to_dict(self):
        return {
            "ok": self.ok,
            "stages": self.stages,
            "mode": self.mode,
            "class_count": self.class_count,
            "character_count": self.character_count,
            "germ_size": self.germ_size,
            "witness": self.witness,
            "hypothesis_violation": self.hypothesis_violation,
        }


def verify_roundtrip(g, ring, mode="auto", cap=None):
    """Reconstruct g from the presentation of its algebra and verify the witness.

    The witness sends a morphism to the germ of its singleton-bisection class
    at the character of its source unit, and is checked to preserve every
    table entry and every grade exactly.
    """
    stages = []
    report = RoundtripReport(False, stages)

    def fail(stage, detail, hypothesis=False):
        stages.append({"stage": stage, "status": "fail", "detail": detail})
        report.hypothesis_violation = hypothesis
        return report

    def passed(stage, detail=""):
        stages.append({"stage": stage, "status": "pass", "detail": detail})

    bad = validate(g)
    if bad:
        return fail("validate-groupoid", str(bad[0]))
    passed("validate-groupoid")
    if not is_principal_kernel(g):
        return fail("principal-kernel", "kernel of the grading is not principal",
                    hypothesis=True)
    passed("principal-kernel")

    p = presentation_from_groupoid(g, ring)
    passed("presentation", f"{len(p.basis)} basis elements")
    try:
        result = germ_groupoid(p, mode, cap)
    except HypothesisViolation as exc:
        return fail("masa", str(exc), hypothesis=True)
    except PresentationError as exc:
        return fail("germ-groupoid", str(exc))
    except EnumerationCapExceeded as exc:
        return fail("normalisers", str(exc))
    passed("masa")
    passed("spectrum", f"{len(result.atoms)} characters")
    passed("normalisers", f"{len(result.classes)} classes")
    passed("germ-groupoid", f"{len(result.groupoid)} germs")

    report.mode = result.mode
    report.class_count = len(result.classes)
    report.character_count = len(result.atoms)
    report.germ_size = len(result.groupoid)

    unit_char = {}
    for xi, atom in enumerate(result.atoms):
        supp = sorted(atom)
        if len(supp) != 1 or supp[0] not in g.units:
            return fail("witness", "spectrum does not match the unit space")
        unit_char[supp[0]] = xi
    if set(unit_char) != set(g.units):
        return fail("witness", "spectrum does not match the unit space")

    witness = {}
    for m in g.morphisms:
        ci = result.class_of_support.get(frozenset([m]))
        if ci is None:
            return fail("witness", f"no class for the singleton bisection {m}")
        key = (ci, unit_char[g.src[m]])
        gid = result.germ_ids.get(key)
        if gid is None:
            return fail("witness", f"no germ for {m}")
        witness[m] = gid

    from .groupoid import is_isomorphism
    if not is_isomorphism(g, result.groupoid, witness):
        return fail("witness", "witness map is not a graded isomorphism")
    passed("witness", "graded isomorphism verified")
    report.ok = True
    report.witness = witness
    return report


# ---------------------------------------------------------------------------
# induced isomorphisms and scrambling


class IsoCheckError(ValueError):
    def __init__(self, kind, detail):
        super().__init__(f"{kind}: {detail}")
        self.kind = kind


@dataclass
class InducedIso:
    mapping: dict
    source: GermResult
    target: GermResult


def _apply_linear(p_target, rho, x):
    out = {}
    for b, v in x.items():
        out = p_target.add(out, p_target.scale(v, rho[b]))
    return out


def induced_groupoid_iso(rho, source, target, mode="auto", cap=None):
    """Push a diagonal-preserving graded ring isomorphism down to the germs.

    rho maps each source basis id to a target element.  After verifying it
    is a graded ring isomorphism carrying the diagonal into the commutant of
    the target diagonal (whence onto the diagonal, by maximality), atoms map
    to atoms and classes to classes, giving a grading-compatible groupoid
    isomorphism of the two germ groupoids.
    """
    ring = source.ring
    if target.ring != ring:
        raise IsoCheckError("ring-mismatch", "presentations use different rings")
    if set(rho) != set(source.basis):
        raise IsoCheckError("not-linear", "rho must be defined on exactly the basis")

    for i in source.basis:
        for j in source.basis:
            left = target.mul(rho[i], rho[j])
            right = _apply_linear(target, rho, source.mult.get((i, j), {}))
            if left != right:
                raise IsoCheckError("not-multiplicative",
                                    f"rho breaks the product on ({i},{j})")

    field = _field_for(ring)
    matrix = [[field.normalize(rho[b].get(k, ring.zero)) for b in source.basis]
              for k in target.basis]
    if len(source.basis) != len(target.basis) or \
            _linalg.matrix_rank(matrix, field) != len(source.basis):
        raise IsoCheckError("not-bijective", "rho is not invertible")
    if ring == Z:
        det = _linalg.bareiss_determinant(matrix)
        if det not in (1, -1):
            raise IsoCheckError("not-bijective",
                                f"determinant {det} is not a unit of Z")

    for b in source.basis:
        grade = source.grading[b]
        for k in rho[b]:
            if target.grading[k] != grade:
                raise IsoCheckError("not-graded", f"rho({b}) mixes grades")

    for d in source.diagonal:
        image = rho[d]
        for d2 in target.diagonal:
            dd2 = target.basis_vec(d2)
            if target.mul(image, dd2) != target.mul(dd2, image):
                raise IsoCheckError("diagonal",
                                    f"rho({d}) does not commute with the target diagonal")

    if not masa_holds(target):
        raise HypothesisViolation(
            "target diagonal is not maximal abelian in the neutral component")
    diag = set(target.diagonal)
    for d in source.diagonal:
        if any(k not in diag for k in rho[d]):
            # contradicts maximality; the commutant check above passed
            raise IsoCheckError("diagonal", f"rho({d}) is not diagonal")

    src_res = germ_groupoid(source, mode, cap)
    tgt_res = germ_groupoid(target, mode, cap)

    atom_map = {}
    for xi, atom in enumerate(src_res.atoms):
        image = _apply_linear(target, rho, atom)
        matches = [yi for yi, cand in enumerate(tgt_res.atoms) if cand == image]
        if len(matches) != 1:
            raise IsoCheckError("diagonal", "rho does not carry atoms to atoms")
        atom_map[xi] = matches[0]

    class_map = {}
    for ci, rec in enumerate(src_res.classes):
        image = _apply_linear(target, rho, rec.rep)
        key = frozenset(image)
        if key not in tgt_res.class_of_support:
            raise IsoCheckError("class-transport",
                                "rho image is not a known target class")
        class_map[ci] = tgt_res.class_of_support[key]

    mapping = {}
    for (ci, xi), gid in src_res.germ_ids.items():
        tkey = (class_map[ci], atom_map[xi])
        tgid = tgt_res.germ_ids.get(tkey)
        if tgid is None:
            raise IsoCheckError("class-transport", f"no target germ for {gid}")
        mapping[gid] = tgid

    from .groupoid import is_isomorphism
    if not is_isomorphism(src_res.groupoid, tgt_res.groupoid, mapping):
        raise IsoCheckError("class-transport",
                            "induced map is not a graded groupoid isomorphism")
    return InducedIso(mapping, src_res, tgt_res)


def rescaling_automorphism(p, unit_for):
    """rho fixing each basis line: e_b -> a(b) e_b for a unit function a."""
    return {b: {b: unit_for(b)} for b in p.basis}


@dataclass
class Scramble:
    presentation: RingPresentation
    rho: dict
    relabel: dict


def scramble_presentation(p, rng, relabel=True, use_automorphism=True,
                          multiplicative=True, keep_provenance=None):
    """A diagonal-preserving graded isomorphism onto a disguised presentation.

    Composes a groupoid automorphism, a unit rescaling (multiplicative ones
    come from a potential on the units; otherwise arbitrary unit values, in
    which case the diagonal basis is only idempotent after rescaling), and a
    relabeling of the basis.  Provenance is kept only when the rescaling is
    multiplicative, since only then do indicator representatives survive.
    """
    if not isinstance(p.provenance, Provenance):
        raise ValueError("scrambling needs provenance")
    g = p.provenance.groupoid
    ring = p.ring

    from .groupoid import automorphisms
    sigma = {m: m for m in g.morphisms}
    if use_automorphism:
        autos = automorphisms(g, limit=24)
        sigma = autos[rng.randrange(len(autos))]

    if multiplicative:
        b = {u: ring.random_unit(rng) for u in sorted(g.units)}
        a = {m: ring.mul(b[g.dst[m]], ring.unit_inverse(b[g.src[m]]))
             for m in g.morphisms}
    else:
        a = {m: ring.random_unit(rng) for m in g.morphisms}

    if relabel:
        fresh = [f"b{i:03d}" for i in range(len(g.morphisms))]
        order = list(range(len(fresh)))
        rng.shuffle(order)
        lam = {m: fresh[order[i]] for i, m in enumerate(g.morphisms)}
    else:
        lam = {m: m for m in g.morphisms}

    f = {m: lam[sigma[m]] for m in g.morphisms}
    mult = {}
    for (x, y), z in g.compose.items():
        if g.src[x] != g.dst[y]:
            continue
        w = ring.mul(a[z], ring.unit_inverse(ring.mul(a[x], a[y])))
        mult[(f[x], f[y])] = {f[z]: w}
    grading = {f[m]: g.grade(m) for m in g.morphisms}
    diagonal = tuple(sorted(f[u] for u in g.units))

    if keep_provenance is None:
        keep_provenance = multiplicative
    provenance = None
    if keep_provenance:
        if not multiplicative:
            raise ValueError("provenance only survives multiplicative rescalings")
        from .corpus import relabel_groupoid
        provenance = Provenance(relabel_groupoid(g, lambda m: f[m]))

    p2 = RingPresentation(ring, tuple(sorted(f.values())), mult, diagonal,
                          p.grade_group, grading, provenance=provenance)
    rho = {m: {f[m]: a[m]} for m in g.morphisms}
    return Scramble(p2, rho, f)


# ---------------------------------------------------------------------------
# presentation JSON


def presentation_to_dict(p):
    mult = []
    for (i, j) in sorted(p.mult):
        terms = [[k, p.ring.format(v)] for k, v in sorted(p.mult[(i, j)].items())]
        if terms:
            mult.append([i, j, terms])
    out = {
        "ring": p.ring.tag,
        "basis": list(p.basis),
        "mult": mult,
        "diagonal_basis": list(p.diagonal),
    }
    if p.grade_group != TRIVIAL_GROUP or any(not gr.is_zero for gr in p.grading.values()):
        out["grading"] = {
            "group": p.grade_group.to_json(),
            "map": {b: list(p.grading[b].coords) for b in p.basis},
        }
    return out


def presentation_from_dict(d):
    ring = ring_from_tag(d["ring"])
    basis = tuple(d["basis"])
    if len(set(basis)) != len(basis):
        raise PresentationError("duplicate basis ids")
    mult = {}
    for entry in d["mult"]:
        i, j, terms = entry
        if (i, j) in mult:
            raise PresentationError(f"duplicate mult entry for ({i},{j})")
        mult[(i, j)] = {k: ring.parse(c) for k, c in terms}
    if "grading" in d:
        group = GradeGroup.from_json(d["grading"]["group"])
        grading = {b: group.element(v) for b, v in d["grading"]["map"].items()}
    else:
        group = TRIVIAL_GROUP
        grading = {b: group.zero() for b in basis}
    return RingPresentation(ring, basis, mult, tuple(d["diagonal_basis"]),
                            group, grading)


def load_presentation(path):
    with open(path) as fh:
        return presentation_from_dict(json.load(fh))
