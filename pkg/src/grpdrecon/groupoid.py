"""Finite groupoids as explicit tables.

A groupoid is a finite set of morphism ids together with total source,
target and inverse maps and a partial composition table, optionally graded
by a finitely generated abelian group.  Nothing is trusted at construction
time: `validate` recomputes every axiom from the raw tables so that
malformed inputs are diagnosable rather than fatal.

Canonical order is lexicographic on id strings throughout; every "first
found" answer and every report is stated in that order.
"""

import json
from dataclasses import dataclass

from .grading import Grade, GradeGroup, TRIVIAL_GROUP, grade_sort_key
from .limits import DEFAULT_SEARCH_BUDGET, EnumerationCapExceeded, resolve_cap


class GroupoidFormatError(ValueError):
    """Input violates the groupoid JSON schema."""


class NotABisectionError(ValueError):
    """A set operation produced a subset on which src or dst is not injective."""


@dataclass(frozen=True)
class Violation:
    axiom: str
    witnesses: tuple
    message: str

    def __str__(self):
        return f"[{self.axiom}] {', '.join(self.witnesses)}: {self.message}"


class Groupoid:
    """Raw morphism tables; run `validate` before trusting the axioms."""

    def __init__(self, morphisms, units, src, dst, inv, compose,
                 grading=None, grade_group=None):
        self.morphisms = tuple(sorted(morphisms))
        self.units = frozenset(units)
        self.src = dict(src)
        self.dst = dict(dst)
        self.inv = dict(inv)
        self.compose = dict(compose)
        if grade_group is None:
            grade_group = TRIVIAL_GROUP
        self.grade_group = grade_group
        self.grading = dict(grading) if grading is not None else None

    def grade(self, m):
        if self.grading is None:
            return self.grade_group.zero()
        return self.grading[m]

    def neutral_grade(self):
        return self.grade_group.zero()

    def is_unit(self, m):
        return m in self.units

    def composable(self, a, b):
        return self.src[a] == self.dst[b]

    def fibers(self):
        """Morphisms grouped by grade; each fiber in canonical order."""
        out = {}
        for m in self.morphisms:
            out.setdefault(self.grade(m), []).append(m)
        return out

    def __len__(self):
        return len(self.morphisms)

    def __repr__(self):
        return f"Groupoid({len(self.morphisms)} morphisms, {len(self.units)} units)"


# ---------------------------------------------------------------------------
# validation


def validate(g):
    """Check every groupoid axiom on the raw tables.

    Returns a list of Violations, empty iff the tables describe a graded
    groupoid.  Unknown ids are reported rather than raised.
    """
    out = []
    known = set(g.morphisms)

    def bad(axiom, witnesses, message):
        out.append(Violation(axiom, tuple(witnesses), message))

    for u in sorted(g.units):
        if u not in known:
            bad("reference", (u,), "unit is not among the morphisms")
    for name, table in (("source", g.src), ("target", g.dst), ("inverse", g.inv)):
        for m in g.morphisms:
            if m not in table:
                bad("reference", (m,), f"{name} map is undefined here")
            elif table[m] not in known:
                bad("reference", (m, table[m]), f"{name} map names an unknown morphism")
        for m in sorted(set(table) - known):
            bad("reference", (m,), f"{name} map is defined on an unknown id")
    for a, b in sorted(g.compose):
        c = g.compose[(a, b)]
        if not {a, b, c} <= known:
            bad("reference", (a, b, c), "compose entry names an unknown id")

    # morphisms whose structure maps are fully resolved
    ok = [m for m in g.morphisms
          if g.src.get(m) in known and g.dst.get(m) in known and g.inv.get(m) in known]
    okset = set(ok)
    units = g.units & okset

    for u in sorted(units):
        if g.src[u] != u or g.dst[u] != u:
            bad("units", (u,), "a unit must be its own source and target")
    for m in ok:
        if g.src[m] not in g.units:
            bad("source-target", (m, g.src[m]), "source is not a unit")
        if g.dst[m] not in g.units:
            bad("source-target", (m, g.dst[m]), "target is not a unit")

    # composition defined exactly on the composable pairs
    table = {}
    for a, b in sorted(g.compose):
        c = g.compose[(a, b)]
        if not ({a, b, c} <= okset):
            continue
        if g.src[a] != g.dst[b]:
            bad("compose-domain", (a, b), "entry for a non-composable pair")
        else:
            table[(a, b)] = c
    for a in ok:
        for b in ok:
            if g.src[a] == g.dst[b] and (a, b) not in g.compose:
                bad("compose-total", (a, b), "composable pair has no product")

    for (a, b), c in sorted(table.items()):
        if g.dst[c] != g.dst[a] or g.src[c] != g.src[b]:
            bad("source-target", (a, b, c),
                "product must inherit target from the left and source from the right")

    for (a, b), c in sorted(table.items()):
        if a in units and c != b:
            bad("identity", (a, b), f"unit acts as {c}, not as the identity")
        if b in units and c != a:
            bad("identity", (a, b), f"unit acts as {c}, not as the identity")

    for (a, b), ab in sorted(table.items()):
        for c in ok:
            if g.src[b] != g.dst[c]:
                continue
            bc = table.get((b, c))
            left = table.get((ab, c))
            right = table.get((a, bc)) if bc is not None else None
            if bc is None or left is None or right is None:
                continue  # gaps already reported by compose-total
            if left != right:
                bad("associativity", (a, b, c), f"({a}{b}){c} = {left} but {a}({b}{c}) = {right}")

    for m in ok:
        j = g.inv[m]
        problems = []
        if g.inv.get(j) != m:
            problems.append("inverse is not an involution")
        if table.get((m, j)) != g.dst[m]:
            problems.append("m . inv(m) is not the target unit")
        if table.get((j, m)) != g.src[m]:
            problems.append("inv(m) . m is not the source unit")
        if problems:
            bad("inverse", (m,), "; ".join(problems))

    if g.grading is not None:
        graded = set()
        for m in ok:
            grade = g.grading.get(m)
            if grade is None:
                bad("grading", (m,), "no grade assigned")
            elif grade.group != g.grade_group:
                bad("grading", (m,), "grade lies in the wrong group")
            else:
                graded.add(m)
        e = g.grade_group.zero()
        for u in sorted(units & graded):
            if g.grading[u] != e:
                bad("grading", (u,), "unit grade must be neutral")
        for (a, b), c in sorted(table.items()):
            if {a, b, c} <= graded:
                if g.grading[a] + g.grading[b] != g.grading[c]:
                    bad("grading", (a, b, c), "grade is not additive on this pair")

    return out


# ---------------------------------------------------------------------------
# bisection calculus


def is_bisection(g, elems):
    """True iff src and dst are both injective on the subset."""
    srcs, dsts = set(), set()
    for m in elems:
        s, d = g.src[m], g.dst[m]
        if s in srcs or d in dsts:
            return False
        srcs.add(s)
        dsts.add(d)
    return True


def compose_sets(g, u, v):
    """Pointwise set product {ab : a in u, b in v, src(a) = dst(b)}.

    The product of two bisections is always a bisection; a non-bisection
    result (possible only for non-bisection inputs) is reported.
    """
    out = set()
    for a in u:
        for b in v:
            if g.src[a] == g.dst[b]:
                out.add(g.compose[(a, b)])
    result = frozenset(out)
    if not is_bisection(g, result):
        raise NotABisectionError(
            "set product is not a bisection (the inputs were not both bisections)")
    return result


def invert_set(g, u):
    return frozenset(g.inv[m] for m in u)


def is_principal_kernel(g):
    """Every unit has trivial isotropy inside the kernel of the grading."""
    e = g.neutral_grade()
    for u in g.units:
        for m in g.morphisms:
            if m != u and g.src[m] == u and g.dst[m] == u and g.grade(m) == e:
                return False
    return True


def homogeneous_bisections(g, cap=None):
    """All bisections whose members share one grade, tagged with that grade.

    Includes the empty bisection once, with grade None.  The collection is
    closed under compose_sets and invert_set (it is the inverse semigroup of
    homogeneous slices of g).
    """
    cap = resolve_cap(cap)
    fibers = g.fibers()
    worst = max((len(f) for f in fibers.values()), default=0)
    if 2 ** worst > cap:
        raise EnumerationCapExceeded(
            f"enumeration too large: 2^{worst} candidate subsets exceeds cap {cap}")
    out = [(frozenset(), None)]
    for grade in sorted(fibers, key=lambda gr: gr.coords):
        elems = fibers[grade]

        def extend(start, chosen, srcs, dsts):
            for i in range(start, len(elems)):
                m = elems[i]
                s, d = g.src[m], g.dst[m]
                if s in srcs or d in dsts:
                    continue
                chosen.append(m)
                out.append((frozenset(chosen), grade))
                extend(i + 1, chosen, srcs | {s}, dsts | {d})
                chosen.pop()

        extend(0, [], frozenset(), frozenset())
    return out


# ---------------------------------------------------------------------------
# isomorphism search


def is_isomorphism(g, h, mapping):
    """Full check that mapping is a grading-preserving isomorphism g -> h."""
    if set(mapping) != set(g.morphisms) or set(mapping.values()) != set(h.morphisms):
        return False
    if {mapping[u] for u in g.units} != set(h.units):
        return False
    for m in g.morphisms:
        t = mapping[m]
        if h.src[t] != mapping[g.src[m]] or h.dst[t] != mapping[g.dst[m]]:
            return False
        if h.inv[t] != mapping[g.inv[m]]:
            return False
        if g.grade(m) != h.grade(t):
            return False
    for (a, b), c in g.compose.items():
        if h.compose.get((mapping[a], mapping[b])) != mapping[c]:
            return False
    return len(g.compose) == len(h.compose)


def _iso_search(g, h, budget, all_solutions=False, limit=None):
    gm, hm = list(g.morphisms), list(h.morphisms)
    assign, rev = {}, {}
    found = []
    nodes = 0

    def compatible(m, t):
        if (m in g.units) != (t in h.units):
            return False
        if g.grade(m) != h.grade(t):
            return False
        for gmap, hmap in ((g.src, h.src), (g.dst, h.dst), (g.inv, h.inv)):
            x, y = gmap[m], hmap[t]
            if x in assign:
                if assign[x] != y:
                    return False
            elif y in rev:
                return False
            if x == m and y != t:
                return False
            if x != m and y == t:
                return False
        pairs = [(m, t, m, t)]
        for a, ta in assign.items():
            pairs.append((m, t, a, ta))
            pairs.append((a, ta, m, t))
        for x, tx, y, ty in pairs:
            comp_g = g.src[x] == g.dst[y]
            comp_h = h.src[tx] == h.dst[ty]
            if comp_g != comp_h:
                return False
            if comp_g:
                cg, ch = g.compose[(x, y)], h.compose[(tx, ty)]
                if cg in assign:
                    if assign[cg] != ch:
                        return False
                elif ch in rev:
                    return False
                if cg == m and ch != t:
                    return False
                if cg != m and ch == t and cg not in assign:
                    return False
        return True

    def search(i):
        nonlocal nodes
        if i == len(gm):
            if is_isomorphism(g, h, assign):
                found.append(dict(assign))
                return not all_solutions or (limit is not None and len(found) >= limit)
            return False
        m = gm[i]
        for t in hm:
            if t in rev:
                continue
            nodes += 1
            if nodes > budget:
                raise EnumerationCapExceeded("isomorphism search budget exceeded")
            if compatible(m, t):
                assign[m] = t
                rev[t] = m
                done = search(i + 1)
                del assign[m]
                del rev[t]
                if done:
                    return True
        return False

    search(0)
    return found


def groupoid_isomorphic(g, h, budget=None):
    """First grading-preserving isomorphism in canonical order, or None.

    Both groupoids must be graded by the same group; the witness, when it
    exists, is the lexicographically first assignment.
    """
    if g.grade_group != h.grade_group:
        raise ValueError("grading groups differ; no comparison possible")
    if len(g.morphisms) != len(h.morphisms) or len(g.units) != len(h.units):
        return None
    gf = {grade: len(f) for grade, f in g.fibers().items()}
    hf = {grade: len(f) for grade, f in h.fibers().items()}
    if gf != hf:
        return None
    if budget is None:
        budget = DEFAULT_SEARCH_BUDGET
    found = _iso_search(g, h, budget)
    return found[0] if found else None


def automorphisms(g, budget=None, limit=64):
    """Grading-preserving automorphisms, in canonical order, up to limit."""
    if budget is None:
        budget = DEFAULT_SEARCH_BUDGET
    return _iso_search(g, g, budget, all_solutions=True, limit=limit)


# ---------------------------------------------------------------------------
# JSON interface


def _require(cond, message):
    if not cond:
        raise GroupoidFormatError(message)


def _check_id(x, what):
    _require(isinstance(x, str) and x, f"{what} must be a nonempty string: {x!r}")
    return x


def groupoid_from_dict(d):
    _require(isinstance(d, dict), "groupoid document must be a JSON object")
    for key in ("morphisms", "units", "source", "target", "inverse", "compose"):
        _require(key in d, f"missing key {key!r}")
    morphisms = [_check_id(m, "morphism id") for m in d["morphisms"]]
    _require(len(set(morphisms)) == len(morphisms), "duplicate morphism ids")
    units = [_check_id(u, "unit id") for u in d["units"]]
    maps = {}
    for key in ("source", "target", "inverse"):
        table = d[key]
        _require(isinstance(table, dict), f"{key} must be an object")
        maps[key] = {_check_id(k, f"{key} key"): _check_id(v, f"{key} value")
                     for k, v in table.items()}
    compose = {}
    _require(isinstance(d["compose"], list), "compose must be a list of triples")
    for entry in d["compose"]:
        _require(isinstance(entry, list) and len(entry) == 3,
                 f"compose entries must be [a, b, ab] triples: {entry!r}")
        a, b, c = (_check_id(x, "compose id") for x in entry)
        _require((a, b) not in compose, f"duplicate compose triple for ({a}, {b})")
        compose[(a, b)] = c

    grading = None
    grade_group = None
    if "grading" in d and d["grading"] is not None:
        block = d["grading"]
        _require(isinstance(block, dict) and "group" in block and "map" in block,
                 "grading must carry 'group' and 'map'")
        grade_group = GradeGroup.from_json(block["group"])
        gmap = block["map"]
        _require(isinstance(gmap, dict), "grading map must be an object")
        _require(set(gmap) == set(morphisms),
                 "grading map must assign a vector to exactly the morphisms")
        grading = {}
        for m, coords in gmap.items():
            _require(isinstance(coords, list) and all(isinstance(c, int) for c in coords),
                     f"grade of {m} must be a list of integers")
            _require(len(coords) == grade_group.rank,
                     f"grade of {m} has length {len(coords)}, expected {grade_group.rank}")
            grading[m] = grade_group.element(coords)

    return Groupoid(morphisms, units, maps["source"], maps["target"], maps["inverse"],
                    compose, grading=grading, grade_group=grade_group)


def load_groupoid(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise GroupoidFormatError(f"not valid JSON: {exc}") from exc
    return groupoid_from_dict(doc)


def groupoid_to_dict(g):
    out = {
        "morphisms": list(g.morphisms),
        "units": sorted(g.units),
        "source": {m: g.src[m] for m in g.morphisms},
        "target": {m: g.dst[m] for m in g.morphisms},
        "inverse": {m: g.inv[m] for m in g.morphisms},
        "compose": [[a, b, c] for (a, b), c in sorted(g.compose.items())],
    }
    if g.grading is not None:
        out["grading"] = {
            "group": g.grade_group.to_json(),
            "map": {m: list(g.grading[m].coords) for m in g.morphisms},
        }
    return out
