"""Small exact linear-algebra helpers: Bareiss determinants and field rref."""


def bareiss_determinant(rows):
    """Exact integer determinant by fraction-free elimination."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[-1][-1]


def rref(rows, ring):
    """Reduced row echelon form over a field ring; returns (rows, pivot cols)."""
    m = [[ring.normalize(v) for v in row] for row in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != ring.zero), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        scale = ring.unit_inverse(m[r][c])
        m[r] = [ring.mul(scale, v) for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != ring.zero:
                factor = m[i][c]
                m[i] = [ring.sub(v, ring.mul(factor, w)) for v, w in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def matrix_rank(rows, ring):
    return len(rref(rows, ring)[1])


def solve_affine(rows, rhs, ring):
    """Solve A x = b over a field; returns (particular, nullspace basis) or None."""
    if not rows:
        return [], []
    ncols = len(rows[0])
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    red, pivots = rref(aug, ring)
    if ncols in pivots:
        return None  # inconsistent
    particular = [ring.zero] * ncols
    for r, c in enumerate(pivots):
        particular[c] = red[r][ncols]
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [ring.zero] * ncols
        vec[fc] = ring.one
        for r, c in enumerate(pivots):
            vec[c] = ring.neg(red[r][fc])
        basis.append(vec)
    return particular, basis


def nullspace(rows, ring):
    if not rows:
        return []
    zero = [ring.zero] * len(rows)
    solved = solve_affine(rows, zero, ring)
    return solved[1]
