"""Small dense linear algebra over any scalar backend (tuples of tuples)."""

from __future__ import annotations

from fractions import Fraction

from .scalars import EPS, is_exact, is_zero


def cross(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def det2(m):
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def det3(m):
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def adjugate3(m):
    """Adjugate (transpose of the cofactor matrix); m @ adj(m) = det(m) I."""
    c = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != i]
            s = [k for k in range(3) if k != j]
            minor = m[r[0]][s[0]] * m[r[1]][s[1]] - m[r[0]][s[1]] * m[r[1]][s[0]]
            c[j][i] = minor if (i + j) % 2 == 0 else -minor
    return tuple(tuple(row) for row in c)


def transpose(m):
    return tuple(tuple(m[j][i] for j in range(len(m))) for i in range(len(m[0])))


def matmul(a, b):
    n, k, p = len(a), len(b), len(b[0])
    return tuple(tuple(sum(a[i][t] * b[t][j] for t in range(k)) for j in range(p)) for i in range(n))


def matvec(m, v):
    return tuple(sum(m[i][j] * v[j] for j in range(len(v))) for i in range(len(m)))


def scale(m, s):
    return tuple(tuple(s * x for x in row) for row in m)


def identity(n=3):
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def outer(u, v):
    return tuple(tuple(a * b for b in v) for a in u)


def quad_form(q, h):
    return dot(h, matvec(q, h))


def bilinear(q, g, h):
    return dot(g, matvec(q, h))


def flatten(m):
    return tuple(x for row in m for x in row)


def _magnitude(xs):
    return max((abs(x) for x in xs), default=0.0)


def proportional(u, v, eps: float = EPS) -> bool:
    """True iff the nonzero vectors u and v are proportional.

    Exact entries use pairwise cross-multiplication; inexact entries are
    normalized by their largest component and compared within eps.
    """
    u, v = tuple(u), tuple(v)
    if all(is_exact(x) for x in u + v):
        n = len(u)
        return all(u[i] * v[j] == u[j] * v[i] for i in range(n) for j in range(i + 1, n))
    cu = [complex(x) for x in u]
    cv = [complex(x) for x in v]
    iu = max(range(len(cu)), key=lambda i: abs(cu[i]))
    mv = max(abs(x) for x in cv)
    if abs(cu[iu]) == 0 or mv == 0 or abs(cv[iu]) <= eps * mv:
        return False
    nu = [x / cu[iu] for x in cu]
    nv = [x / cv[iu] for x in cv]
    return all(abs(a - b) <= eps for a, b in zip(nu, nv))


def is_zero_vector(v, eps: float = EPS) -> bool:
    if all(is_exact(x) for x in v):
        return all(x == 0 for x in v)
    return _magnitude(v) <= eps


def nullspace(rows, eps: float = EPS):
    """Basis of the right nullspace of a matrix given as a list of rows.

    Gaussian elimination with exact pivots, or partial pivoting within eps
    for inexact data.
    """
    rows = [list(r) for r in rows]
    if not rows:
        return []
    ncols = len(rows[0])
    exact = all(is_exact(x) for r in rows for x in r)
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= len(rows):
            break
        if exact:
            piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        else:
            cand = max(range(r, len(rows)), key=lambda i: abs(rows[i][c]))
            scale_ = max(1.0, _magnitude([x for row in rows for x in row]))
            piv = cand if abs(rows[cand][c]) > eps * scale_ else None
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not is_zero(rows[i][c], 0.0):
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0) if exact else 0.0] * ncols
        v[fc] = Fraction(1) if exact else 1.0
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        basis.append(tuple(v))
    return basis


def solve(a, b, eps: float = EPS):
    """Solve a square system a x = b."""
    n = len(a)
    aug = [list(a[i]) + [-b[i]] for i in range(n)]
    ns = nullspace(aug, eps)
    for v in ns:
        if not is_zero(v[-1], eps):
            return tuple(x / v[-1] for x in v[:-1])
    raise ZeroDivisionError("singular system")


def normalize(v):
    """Scale so that the first nonzero entry (exact) or the largest entry
    (inexact) becomes 1."""
    v = tuple(v)
    if all(is_exact(x) for x in v):
        p = next(x for x in v if x != 0)
    else:
        p = max(v, key=abs)
    return tuple(x / p for x in v)
