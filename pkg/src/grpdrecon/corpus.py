"""Builders for the standard groupoid fixtures used by tests and scripts."""

import random

from .grading import GradeGroup, TRIVIAL_GROUP
from .groupoid import Groupoid


def pair_groupoid(n, prefix=""):
    """R_n: morphisms (i,j) over n points with (i,j)(j,k) = (i,k)."""
    ids = {(i, j): f"{prefix}({i},{j})" for i in range(1, n + 1) for j in range(1, n + 1)}
    morphisms = list(ids.values())
    units = [ids[(i, i)] for i in range(1, n + 1)]
    src = {ids[(i, j)]: ids[(j, j)] for (i, j) in ids}
    dst = {ids[(i, j)]: ids[(i, i)] for (i, j) in ids}
    inv = {ids[(i, j)]: ids[(j, i)] for (i, j) in ids}
    compose = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                compose[(ids[(i, j)], ids[(j, k)])] = ids[(i, k)]
    return Groupoid(morphisms, units, src, dst, inv, compose)


def trivial_groupoid(n, prefix="u"):
    ids = [f"{prefix}{i}" for i in range(1, n + 1)]
    ident = {m: m for m in ids}
    compose = {(m, m): m for m in ids}
    return Groupoid(ids, ids, dict(ident), dict(ident), dict(ident), compose)


def cyclic_group_groupoid(n, graded=True, prefix="t"):
    """Z/n as a one-unit groupoid; identity-graded into Z/n when graded."""
    ids = [f"{prefix}{i}" for i in range(n)]
    unit = ids[0]
    src = {m: unit for m in ids}
    dst = {m: unit for m in ids}
    inv = {ids[i]: ids[(-i) % n] for i in range(n)}
    compose = {(ids[i], ids[j]): ids[(i + j) % n] for i in range(n) for j in range(n)}
    grading = None
    group = None
    if graded:
        group = GradeGroup((n,))
        grading = {ids[i]: group.element((i,)) for i in range(n)}
    return Groupoid(ids, [unit], src, dst, inv, compose,
                    grading=grading, grade_group=group)


def relabel_groupoid(g, rename):
    """Apply an id substitution (dict or callable) to every table."""
    if not callable(rename):
        table = dict(rename)
        rename = lambda m: table[m]
    new = {m: rename(m) for m in g.morphisms}
    if len(set(new.values())) != len(new):
        raise ValueError("relabeling must be injective")
    grading = None
    if g.grading is not None:
        grading = {new[m]: g.grading[m] for m in g.morphisms}
    return Groupoid(
        [new[m] for m in g.morphisms],
        [new[u] for u in g.units],
        {new[m]: new[g.src[m]] for m in g.morphisms},
        {new[m]: new[g.dst[m]] for m in g.morphisms},
        {new[m]: new[g.inv[m]] for m in g.morphisms},
        {(new[a], new[b]): new[c] for (a, b), c in g.compose.items()},
        grading=grading, grade_group=g.grade_group)


def with_potential_grading(g, group, potential):
    """Grade by a potential on units: c(m) = phi(dst m) - phi(src m)."""
    phi = {u: group.element(potential[u]) for u in g.units}
    grading = {m: phi[g.dst[m]] - phi[g.src[m]] for m in g.morphisms}
    return Groupoid(g.morphisms, g.units, g.src, g.dst, g.inv, g.compose,
                    grading=grading, grade_group=group)


def with_constant_grading(g, group):
    """Embed a trivially graded groupoid into a larger grade group."""
    e = group.zero()
    grading = {m: e for m in g.morphisms}
    return Groupoid(g.morphisms, g.units, g.src, g.dst, g.inv, g.compose,
                    grading=grading, grade_group=group)


def disjoint_union(a, b, prefixes=("A:", "B:")):
    """Disjoint union after prefixing ids; grade groups must agree."""
    if a.grade_group != b.grade_group:
        raise ValueError("grade groups differ; regrade before taking unions")
    a2 = relabel_groupoid(a, lambda m: prefixes[0] + m)
    b2 = relabel_groupoid(b, lambda m: prefixes[1] + m)
    grading = None
    if a.grading is not None or b.grading is not None:
        e = a.grade_group.zero()
        grading = {m: (a2.grading or {}).get(m, e) for m in a2.morphisms}
        grading.update({m: (b2.grading or {}).get(m, e) for m in b2.morphisms})
    return Groupoid(
        a2.morphisms + b2.morphisms,
        set(a2.units) | set(b2.units),
        {**a2.src, **b2.src}, {**a2.dst, **b2.dst}, {**a2.inv, **b2.inv},
        {**a2.compose, **b2.compose},
        grading=grading, grade_group=a.grade_group)


def random_acyclic_graph(rng, max_vertices=5, max_edges=7):
    """A random finite DAG in edge-list form (vertices, [(id, src, dst)])."""
    nv = rng.randrange(2, max_vertices + 1)
    vertices = [f"v{i}" for i in range(1, nv + 1)]
    edges = []
    ne = rng.randrange(1, max_edges + 1)
    for k in range(ne):
        i = rng.randrange(0, nv - 1)
        j = rng.randrange(i + 1, nv)  # forward edges only: acyclic by construction
        edges.append((f"e{k + 1}", vertices[i], vertices[j]))
    return vertices, edges


def corpus_groupoids():
    """Named principal-kernel fixtures: pair groupoids, unions, graded examples.

    Graph-groupoid members are added by the test layer (they need the graph
    module); this list alone already covers trivial, free and torsion
    gradings.
    """
    out = []
    for n in range(1, 7):
        out.append((f"trivial{n}", trivial_groupoid(n)))
    for n in (2, 3, 4):
        out.append((f"pair{n}", pair_groupoid(n)))
    zg = GradeGroup.free(1)
    out.append(("pair2-zpot", with_potential_grading(pair_groupoid(2), zg,
                                                     {"(1,1)": (0,), "(2,2)": (1,)})))
    out.append(("pair3-zpot", with_potential_grading(pair_groupoid(3), zg,
                                                     {"(1,1)": (0,), "(2,2)": (2,), "(3,3)": (5,)})))
    z2g = GradeGroup.free(2)
    out.append(("pair2-z2pot", with_potential_grading(pair_groupoid(2), z2g,
                                                      {"(1,1)": (0, 0), "(2,2)": (1, -1)})))
    tg = GradeGroup((2,))
    out.append(("pair2-torsionpot", with_potential_grading(pair_groupoid(2), tg,
                                                           {"(1,1)": (0,), "(2,2)": (1,)})))
    mixed = GradeGroup((0, 3))
    out.append(("pair3-mixedpot", with_potential_grading(pair_groupoid(3), mixed,
                                                         {"(1,1)": (0, 0), "(2,2)": (1, 1), "(3,3)": (0, 2)})))
    for n in (2, 3, 4, 5):
        out.append((f"cyclic{n}-id", cyclic_group_groupoid(n)))
    out.append(("pair2+pair2", disjoint_union(pair_groupoid(2), pair_groupoid(2))))
    out.append(("pair2+trivial2", disjoint_union(pair_groupoid(2), trivial_groupoid(2))))
    out.append(("pair3+trivial1", disjoint_union(pair_groupoid(3), trivial_groupoid(1))))
    out.append(("pair2+pair3", disjoint_union(pair_groupoid(2), pair_groupoid(3))))
    c2 = cyclic_group_groupoid(2)
    out.append(("cyclic2+cyclic2", disjoint_union(c2, c2)))
    out.append(("pair2+cyclic2-id",
                disjoint_union(with_constant_grading(pair_groupoid(2), GradeGroup((2,))), c2)))
    out.append(("pair2-relabel", relabel_groupoid(pair_groupoid(2), lambda m: f"m{m}")))
    out.append(("trivial3-relabel", relabel_groupoid(trivial_groupoid(3), lambda m: m.upper())))
    return out


def graph_groupoid_corpus(max_morphisms=12, randoms=20, seed=20260810):
    """Boundary-path groupoids of small acyclic graphs, named and random."""
    from .lpa import Edge, Graph, acyclic_graph_groupoid

    named = [
        ("edge", Graph(["v1", "v2"], [Edge("e", "v1", "v2")])),
        ("chain2", Graph(["v1", "v2", "v3"],
                         [Edge("e1", "v1", "v2"), Edge("e2", "v2", "v3")])),
        ("two-to-sink", Graph(["v1", "v2", "v3"],
                              [Edge("e1", "v1", "v3"), Edge("e2", "v2", "v3")])),
        ("edge+sink", Graph(["v1", "v2", "v3"], [Edge("e", "v1", "v2")])),
        ("two-sinks", Graph(["v1", "v2", "v3"],
                            [Edge("e1", "v1", "v2"), Edge("e2", "v1", "v3")])),
        ("double-edge", Graph(["v1", "v2"],
                              [Edge("e1", "v1", "v2"), Edge("e2", "v1", "v2")])),
        ("chain2+sink", Graph(["v1", "v2", "v3", "v4"],
                              [Edge("e1", "v1", "v2"), Edge("e2", "v2", "v3")])),
    ]
    out = [(f"graphgpd-{name}", acyclic_graph_groupoid(g)) for name, g in named]
    rng = random.Random(seed)
    count = 0
    while count < randoms:
        vertices, edges = random_acyclic_graph(rng)
        gg = acyclic_graph_groupoid(Graph(vertices, edges))
        if len(gg) <= max_morphisms:
            out.append((f"graphgpd-rand{count:02d}", gg))
            count += 1
    return out


def full_corpus():
    """The reconstruction corpus: algebraic fixtures plus graph groupoids."""
    return corpus_groupoids() + graph_groupoid_corpus()
