"""Exact linear algebra over Q (and small field extensions), integer lattices, and
positive definite quadratic form enumeration.

Matrices are plain lists of lists.  The "field" routines are duck-typed: they
work for Fraction entries and for QuadElem entries alike, since both support
+, -, *, / and comparison with 0.
"""
from __future__ import annotations

import math
from fractions import Fraction


# ---------------------------------------------------------------------------
# generic dense matrix routines


def mat_mul(a, b):
    n, m, k = len(a), len(b[0]), len(b)
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)] for i in range(n)]


def mat_vec(a, v):
    return [sum(a[i][j] * v[j] for j in range(len(v))) for i in range(len(a))]


def mat_identity(n, one=Fraction(1)):
    return [[one if i == j else one * 0 for j in range(n)] for i in range(n)]


def mat_transpose(a):
    return [list(col) for col in zip(*a)]


def frac_det(mat):
    """Determinant by fraction-free-ish Gaussian elimination (any field entries)."""
    n = len(mat)
    m = [row[:] for row in mat]
    det = None
    sign = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if not m[r][col] == 0), None)
        if piv is None:
            return mat[0][0] * 0
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        det = m[col][col] if det is None else det * m[col][col]
        inv_like = m[col][col]
        for r in range(col + 1, n):
            if m[r][col] == 0:
                continue
            factor = m[r][col] / inv_like
            m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return det * sign


def field_rref(mat):
    """Reduced row echelon form; returns (rref, pivot_columns)."""
    m = [row[:] for row in mat]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if not m[i][c] == 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = m[r][c]
        m[r] = [x / inv for x in m[r]]
        for i in range(rows):
            if i != r and not m[i][c] == 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def field_kernel(mat):
    """Basis of the right kernel {v : mat v = 0}."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    if rows == 0:
        return mat_identity(cols)
    one = mat[0][0] * 0 + 1
    rref, pivots = field_rref(mat)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [one * 0] * cols
        v[fc] = one
        for r, pc in enumerate(pivots):
            v[pc] = -rref[r][fc]
        basis.append(v)
    return basis


def field_solve(mat, rhs):
    """One solution of mat x = rhs, or None."""
    rows = len(mat)
    cols = len(mat[0])
    aug = [mat[i][:] + [rhs[i]] for i in range(rows)]
    rref, pivots = field_rref(aug)
    for row in rref:
        if all(x == 0 for x in row[:-1]) and not row[-1] == 0:
            return None
    one = mat[0][0] * 0 + 1
    x = [one * 0] * cols
    for r, pc in enumerate(pivots):
        if pc == cols:
            return None
        x[pc] = rref[r][cols]
    return x


def charpoly(mat):
    """Characteristic polynomial coefficients [c0, ..., c_{n-1}, 1] (monic),
    via Faddeev-LeVerrier.  Entries may be Fractions or field elements."""
    n = len(mat)
    one = mat[0][0] * 0 + 1
    coeffs = [one * 0] * (n + 1)
    coeffs[n] = one
    m = mat_identity(n, one)
    c = one
    for k in range(1, n + 1):
        m = mat_mul(mat, m)
        tr = sum((m[i][i] for i in range(n)), one * 0)
        c = tr * Fraction(-1, k) if isinstance(tr, Fraction) else tr * (-1) / k
        coeffs[n - k] = c
        for i in range(n):
            m[i][i] = m[i][i] + c
    return coeffs


def rational_roots(coeffs: list[Fraction]) -> list[Fraction]:
    """Rational roots (with multiplicity stripped) of a polynomial with Fraction coeffs."""
    den = 1
    for c in coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    while ints and ints[-1] == 0:
        ints.pop()
    n = len(ints) - 1
    if n <= 0:
        return []
    # strip zero roots
    roots = []
    low = 0
    while ints[low] == 0:
        low += 1
    if low:
        roots.append(Fraction(0))
        ints = ints[low:]
    a0, an = abs(ints[0]), abs(ints[-1])

    def divisors(x):
        out = []
        d = 1
        while d * d <= x:
            if x % d == 0:
                out += [d, x // d]
            d += 1
        return sorted(set(out))

    for pnum in divisors(a0) if a0 else [0]:
        for qden in divisors(an):
            for s in (1, -1):
                cand = Fraction(s * pnum, qden)
                if cand in roots:
                    continue
                val = Fraction(0)
                for c in reversed(ints):
                    val = val * cand + c
                if val == 0:
                    roots.append(cand)
    return roots


# ---------------------------------------------------------------------------
# integer lattices: HNF


def hnf(rows: list[list[int]]) -> list[list[int]]:
    """Row Hermite normal form of the lattice spanned by integer rows.

    Returns a full-rank upper-triangular basis with positive pivots and
    entries above each pivot reduced into [0, pivot).  Canonical, so two
    lattices are equal iff their HNFs are equal.
    """
    m = [row[:] for row in rows if any(row)]
    if not m:
        return []
    ncols = len(m[0])
    out = []
    col = 0
    while col < ncols and m:
        # find rows with nonzero in col; combine via gcd
        while True:
            nz = [i for i in range(len(m)) if m[i][col]]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda i: abs(m[i][col]))
            i0 = nz[0]
            for i in nz[1:]:
                q = m[i][col] // m[i0][col]
                m[i] = [a - q * b for a, b in zip(m[i], m[i0])]
        nz = [i for i in range(len(m)) if m[i][col]]
        if nz:
            i0 = nz[0]
            row = m.pop(i0)
            if row[col] < 0:
                row = [-x for x in row]
            out.append(row)
        col += 1
    # reduce above pivots, left to right so finished columns stay reduced
    for i in range(len(out)):
        pcol = next(c for c in range(ncols) if out[i][c])
        piv = out[i][pcol]
        for j in range(i):
            q = out[j][pcol] // piv
            if q:
                out[j] = [a - q * b for a, b in zip(out[j], out[i])]
    return out


def hnf_transform(rows: list[list[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """(H, U) with U unimodular, U @ rows = H stacked over zero rows.

    H is the echelon part (not fully reduced above pivots; use `hnf` when a
    canonical basis is wanted).  The zero rows of U@rows give a basis of the
    integer relation module of the input rows.
    """
    m = [row[:] for row in rows]
    nr = len(m)
    ncols = len(m[0]) if nr else 0
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    top = 0
    for col in range(ncols):
        while True:
            nz = [i for i in range(top, nr) if m[i][col]]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda i: abs(m[i][col]))
            i0 = nz[0]
            for i in nz[1:]:
                q = m[i][col] // m[i0][col]
                m[i] = [a - q * b for a, b in zip(m[i], m[i0])]
                u[i] = [a - q * b for a, b in zip(u[i], u[i0])]
        nz = [i for i in range(top, nr) if m[i][col]]
        if nz:
            i0 = nz[0]
            m[top], m[i0] = m[i0], m[top]
            u[top], u[i0] = u[i0], u[top]
            if m[top][col] < 0:
                m[top] = [-x for x in m[top]]
                u[top] = [-x for x in u[top]]
            top += 1
    return m, u


def hnf_contains(basis: list[list[int]], vec: list[int]) -> bool:
    """Membership test against an HNF basis (must be echelon with positive pivots)."""
    v = vec[:]
    ncols = len(v)
    for row in basis:
        pcol = next((c for c in range(ncols) if row[c]), None)
        if pcol is None:
            continue
        if v[pcol] % row[pcol]:
            return False
        q = v[pcol] // row[pcol]
        v = [a - q * b for a, b in zip(v, row)]
    return not any(v)


# ---------------------------------------------------------------------------
# LLL reduction (exact, on a Gram matrix)


def lll_reduce(gram, delta=Fraction(3, 4)):
    """LLL on a PSD rational Gram matrix; returns a unimodular transform U (rows)
    such that U G U^T is LLL-reduced."""
    n = len(gram)
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def g(i, j):
        return sum(u[i][a] * gram[a][b] * u[j][b] for a in range(n) for b in range(n))

    def gso():
        mu = [[Fraction(0)] * n for _ in range(n)]
        bstar = [Fraction(0)] * n
        for i in range(n):
            bstar[i] = Fraction(g(i, i))
            for j in range(i):
                mu[i][j] = (Fraction(g(i, j)) - sum(mu[i][t] * mu[j][t] * bstar[t] for t in range(j))) / bstar[j]
                bstar[i] -= mu[i][j] ** 2 * bstar[j]
        return mu, bstar

    mu, bstar = gso()
    k = 1
    while k < n:
        for j in reversed(range(k)):
            q = round(mu[k][j])
            if q:
                u[k] = [a - q * b for a, b in zip(u[k], u[j])]
                mu, bstar = gso()
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            u[k], u[k - 1] = u[k - 1], u[k]
            mu, bstar = gso()
            k = max(k - 1, 1)
    return u


# ---------------------------------------------------------------------------
# positive definite quadratic form enumeration (Fincke-Pohst)


def _cholesky(gram):
    """Exact rational Cholesky: Q(x) = sum_i d[i] (x_i + sum_{j>i} m[i][j] x_j)^2."""
    n = len(gram)
    a = [[Fraction(gram[i][j]) for j in range(n)] for i in range(n)]
    d = [Fraction(0)] * n
    m = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = a[i][i]
        if d[i] <= 0:
            raise ValueError("form is not positive definite")
        for j in range(i + 1, n):
            m[i][j] = a[i][j] / d[i]
        for r in range(i + 1, n):
            for c in range(r, n):
                a[r][c] = a[r][c] - a[i][c] * a[i][r] / d[i]
                a[c][r] = a[r][c]
    return d, m


def qf_vectors_up_to(gram, bound, reduce_first: bool = True) -> list[tuple[list[int], Fraction]]:
    """All (x, Q(x)) with x != 0, 0 < Q(x) <= bound, one of each +-pair (first
    nonzero coordinate positive).  `gram` is the matrix of Q: Q(x) = x G x^T.

    The form is LLL-reduced first so enumeration cost tracks the point count
    rather than the skew of the input basis."""
    n = len(gram)
    bound = Fraction(bound)
    if reduce_first and n > 1:
        u = lll_reduce([[Fraction(x) for x in row] for row in gram])
        gred = [
            [
                sum(u[i][a] * Fraction(gram[a][b]) * u[j][b] for a in range(n) for b in range(n))
                for j in range(n)
            ]
            for i in range(n)
        ]
        out = []
        for y, q in qf_vectors_up_to(gred, bound, reduce_first=False):
            x = [sum(y[k] * u[k][j] for k in range(n)) for j in range(n)]
            first = next(v for v in x if v)
            if first < 0:
                x = [-v for v in x]
            out.append((x, q))
        return out
    d, m = _cholesky(gram)
    out = []
    x = [0] * n

    def rec(i, remaining):
        # Q = sum_{t<=i} d_t (x_t + sum_{j>t} m_tj x_j)^2 with x_{i+1..} fixed
        center = -sum(m[i][j] * x[j] for j in range(i + 1, n))
        # |x_i - center| <= sqrt(remaining / d_i)
        lim2 = remaining / d[i]
        # integer window
        lo = center - _frac_sqrt_upper(lim2)
        hi = center + _frac_sqrt_upper(lim2)
        for xi in range(math.ceil(lo), math.floor(hi) + 1):
            x[i] = xi
            term = d[i] * (xi - center) ** 2
            if term > remaining:
                continue
            if i == 0:
                if any(x):
                    q = bound - remaining + term
                    # recompute exactly to be safe
                    qq = sum(gram[a][b] * x[a] * x[b] for a in range(n) for b in range(n))
                    if 0 < qq <= bound:
                        first = next(v for v in x if v)
                        if first > 0:
                            out.append((x[:], Fraction(qq)))
            else:
                rec(i - 1, remaining - term)
        x[i] = 0

    rec(n - 1, bound)
    return out


def _frac_sqrt_upper(f: Fraction) -> Fraction:
    """A rational upper bound for sqrt(f), f >= 0, tight to ~1e-6."""
    if f < 0:
        return Fraction(0)
    v = math.isqrt(f.numerator * f.denominator)
    return Fraction(v + 1, f.denominator)


def qf_solutions(gram, target) -> list[list[int]]:
    """All x (one per +-pair) with Q(x) == target exactly."""
    target = Fraction(target)
    if target < 0:
        return []
    if target == 0:
        return []
    return [x for x, q in qf_vectors_up_to(gram, target) if q == target]


def qf_min_nonzero(gram) -> Fraction:
    b = Fraction(min(gram[i][i] for i in range(len(gram))))
    vecs = qf_vectors_up_to(gram, b)
    return min(q for _, q in vecs) if vecs else b
