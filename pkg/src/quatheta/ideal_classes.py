"""Lattices in B, Eichler orders, right ideal classes, unit groups, masses.

A `Lattice` is a full-rank Z-lattice in B stored as a canonical pair
(denominator, HNF rows) of coordinates with respect to the fixed basis
(1, theta, J, theta*J).  All the heavy kernels here are exact: HNF for
lattice algebra, Fincke-Pohst on the reduced norm form for unit groups and
ideal equivalence, and the Eichler mass formula as the termination
certificate for class set enumeration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .exact import QuathetaError, is_prime, prime_factors
from .linalg import (
    field_solve,
    frac_det,
    hnf,
    hnf_contains,
    hnf_transform,
    lll_reduce,
    qf_solutions,
    qf_vectors_up_to,
)
from .quaternion import LocalSplitting, QuatAlgebra, QuatElem, mat2_mul


# ---------------------------------------------------------------------------
# ambient data


@lru_cache(maxsize=None)
def _trace_gram(K_trace: int, K_norm: int, beta: int):
    t, n, b = K_trace, K_norm, beta
    return (
        (2, t, 0, 0),
        (t, 2 * n, 0, 0),
        (0, 0, -2 * b, -b * t),
        (0, 0, -b * t, -2 * b * n),
    )


def trace_gram(alg: QuatAlgebra):
    """Matrix of (x, y) -> T(x * conj(y)) on the ambient basis."""
    return _trace_gram(alg.K.gen_trace, alg.K.gen_norm, alg.beta)


def _fraction_gcd(vals) -> Fraction:
    den = 1
    for v in vals:
        den = den * v.denominator // math.gcd(den, v.denominator)
    g = 0
    for v in vals:
        g = math.gcd(g, abs(int(v * den)))
    return Fraction(g, den)


def _nth_root_fraction(x: Fraction, k: int) -> Fraction:
    num = round(x.numerator ** (1 / k))
    den = round(x.denominator ** (1 / k))
    for dn in (num - 1, num, num + 1):
        for dd in (den - 1, den, den + 1):
            if dn > 0 and dd > 0 and Fraction(dn ** k, dd ** k) == x:
                return Fraction(dn, dd)
    raise QuathetaError(f"{x} has no exact rational {k}-th root")


# ---------------------------------------------------------------------------
# lattices


class Lattice:
    """(1/den) * Z-span of HNF rows; rows are coordinates wrt (1, th, J, th*J)."""

    __slots__ = ("alg", "den", "rows", "_gram", "_nrd", "_inv")

    def __init__(self, alg: QuatAlgebra, den: int, rows):
        rows = hnf([list(r) for r in rows])
        if len(rows) != 4:
            raise QuathetaError("lattice is not full rank")
        g = den
        for r in rows:
            for x in r:
                g = math.gcd(g, x)
        self.alg = alg
        self.den = den // g
        self.rows = tuple(tuple(x // g for x in r) for r in rows)
        self._gram = None
        self._nrd = None
        self._inv = None

    # -- construction ------------------------------------------------------
    @staticmethod
    def from_elems(alg: QuatAlgebra, elems: list[QuatElem]) -> "Lattice":
        coords = [e.coords() for e in elems]
        den = 1
        for c in coords:
            for x in c:
                den = den * x.denominator // math.gcd(den, x.denominator)
        rows = [[int(x * den) for x in c] for c in coords]
        return Lattice(alg, den, rows)

    def basis(self) -> list[QuatElem]:
        return [
            self.alg.from_coords([Fraction(x, self.den) for x in row]) for row in self.rows
        ]

    def key(self):
        return (self.den, self.rows)

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Lattice(den={self.den}, rows={self.rows})"

    # -- membership / algebra ----------------------------------------------
    def contains(self, x: QuatElem) -> bool:
        c = x.coords()
        den = self.den
        scaled = []
        for t in c:
            v = t * den
            if v.denominator != 1:
                return False
            scaled.append(int(v))
        return hnf_contains([list(r) for r in self.rows], scaled)

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(self.contains(b) for b in other.basis())

    def product(self, other: "Lattice") -> "Lattice":
        """Z-span of pairwise products."""
        a, b = self.basis(), other.basis()
        return Lattice.from_elems(self.alg, [x * y for x in a for y in b])

    def add(self, other: "Lattice") -> "Lattice":
        den = self.den * other.den // math.gcd(self.den, other.den)
        rows = [[x * (den // self.den) for x in r] for r in self.rows]
        rows += [[x * (den // other.den) for x in r] for r in other.rows]
        return Lattice(self.alg, den, rows)

    def intersect(self, other: "Lattice") -> "Lattice":
        den = self.den * other.den // math.gcd(self.den, other.den)
        ra = [[x * (den // self.den) for x in r] for r in self.rows]
        rb = [[x * (den // other.den) for x in r] for r in other.rows]
        stacked = ra + rb
        h, u = hnf_transform(stacked)
        # zero rows of u @ stacked give relations u_a A + u_b B = 0, i.e. u_a A
        # lies in both lattices
        out = []
        for i, hrow in enumerate(h):
            if any(hrow):
                continue
            ua = u[i][:4]
            vec = [sum(ua[k] * ra[k][j] for k in range(4)) for j in range(4)]
            out.append(vec)
        if len(out) < 4:
            raise QuathetaError("intersection not full rank")
        return Lattice(self.alg, den, out)

    def scale(self, c: Fraction) -> "Lattice":
        c = Fraction(c)
        den = self.den * c.denominator
        rows = [[x * c.numerator for x in r] for r in self.rows]
        return Lattice(self.alg, den, rows)

    def conjugate(self) -> "Lattice":
        return Lattice.from_elems(self.alg, [b.conj() for b in self.basis()])

    # -- invariants ----------------------------------------------------------
    def trace_gram_matrix(self):
        if self._gram is None:
            g = trace_gram(self.alg)
            bs = [[Fraction(x, self.den) for x in row] for row in self.rows]
            self._gram = [
                [
                    sum(bs[i][a] * g[a][b] * bs[j][b] for a in range(4) for b in range(4))
                    for j in range(4)
                ]
                for i in range(4)
            ]
        return self._gram

    def norm_gram(self):
        """Gram of the reduced norm: N(sum x_i b_i) = x G x^T."""
        return [[x / 2 for x in row] for row in self.trace_gram_matrix()]

    def rdisc(self) -> Fraction:
        """Reduced discriminant when self is an order: sqrt(det T(b_i conj(b_j)))."""
        d = frac_det(self.trace_gram_matrix())
        return _nth_root_fraction(abs(d), 2)

    def nrd(self) -> Fraction:
        """Reduced norm of a (locally principal) lattice: the fractional ideal
        generated by the values of the norm form, i.e. gcd(N(b_i), T(b_i conj(b_j)))."""
        if self._nrd is None:
            g = self.trace_gram_matrix()
            vals = []
            for i in range(4):
                vals.append(g[i][i] / 2)  # N(b_i)
                for j in range(i + 1, 4):
                    vals.append(g[i][j])  # N(b_i+b_j)-N(b_i)-N(b_j)
            self._nrd = _fraction_gcd(vals)
        return self._nrd

    def is_order(self) -> bool:
        one = self.alg.one
        if not self.contains(one):
            return False
        bs = self.basis()
        return all(self.contains(x * y) for x in bs for y in bs)

    def theta_invariant(self, terms: int = 12):
        """Vector counts of the nrd-normalized norm form at small values;
        an isometry invariant used to prefilter ideal classes."""
        g = self.norm_gram()
        s = self.nrd()
        gn = [[x / s for x in row] for row in g]
        vecs = qf_vectors_up_to(gn, terms)
        counts = {}
        for _, q in vecs:
            counts[q] = counts.get(q, 0) + 1
        return tuple(sorted(counts.items()))


# ---------------------------------------------------------------------------
# orders: construction and maximalization


def standard_order(alg: QuatAlgebra) -> Lattice:
    K = alg.K
    return Lattice.from_elems(alg, [alg.one, alg.elem(K.theta), alg.J, alg.elem(K.theta) * alg.J])


def _mult_table_mod_q(basis: list[QuatElem], lat: Lattice, q: int):
    """Structure constants of (lat/q*lat) wrt basis, as nested lists mod q."""
    table = []
    for x in basis:
        row = []
        for y in basis:
            row.append(_coords_in_lattice(lat, x * y, q))
        table.append(row)
    return table


def _coords_in_lattice(lat: Lattice, x: QuatElem, mod: int | None = None):
    """Coordinates of x in the basis of lat (exact; reduced mod `mod` if given)."""
    if lat._inv is None:
        mat = [[Fraction(lat.rows[j][i], lat.den) for j in range(4)] for i in range(4)]
        det = frac_det(mat)
        # adjugate / det
        inv = []
        for i in range(4):
            row = []
            for j in range(4):
                minor = [[mat[a][b] for b in range(4) if b != i] for a in range(4) if a != j]
                sign = -1 if (i + j) % 2 else 1
                row.append(sign * frac_det(minor) / det)
            inv.append(row)
        lat._inv = inv
    rhs = x.coords()
    out = []
    for i in range(4):
        v = sum(lat._inv[i][j] * rhs[j] for j in range(4))
        if v.denominator != 1:
            raise QuathetaError("element not integral in lattice")
        out.append(int(v) % mod if mod else int(v))
    return out


def _radical_mod_q(lat: Lattice, q: int):
    """Basis (as F_q coordinate vectors wrt lat) of the Jacobson radical of lat/q."""
    basis = lat.basis()
    table = _mult_table_mod_q(basis, lat, q)

    def mult(u, v):
        out = [0, 0, 0, 0]
        for i in range(4):
            if u[i] == 0:
                continue
            for j in range(4):
                if v[j] == 0:
                    continue
                c = u[i] * v[j] % q
                t = table[i][j]
                for k in range(4):
                    out[k] = (out[k] + c * t[k]) % q
        return out

    if q <= 3:
        # brute force: radical = span of x whose two-sided ideal is nilpotent
        import itertools

        def ideal_of(x):
            gens = [x]
            span = _span_mod_q([x], q)
            changed = True
            while changed:
                changed = False
                cur = list(span)
                for s in cur:
                    for e in range(4):
                        unit = [1 if i == e else 0 for i in range(4)]
                        for prod in (mult(unit, s), mult(s, unit)):
                            if not _in_span_mod_q(span, prod, q):
                                span = _span_mod_q(list(span) + [prod], q)
                                changed = True
            return span

        def is_nilpotent(span):
            cur = list(span)
            for _ in range(5):
                nxt = []
                for a in cur:
                    for b in span:
                        nxt.append(mult(a, b))
                cur = list(_span_mod_q(nxt, q))
                if not cur:
                    return True
            return False

        rad_vectors = []
        for vec in itertools.product(range(q), repeat=4):
            v = list(vec)
            if not any(v):
                continue
            if is_nilpotent(ideal_of(v)):
                rad_vectors.append(v)
        return list(_span_mod_q(rad_vectors, q))

    # odd q >= 5: kernel of the trace form of left multiplication
    lmats = []
    for i in range(4):
        unit = [1 if t == i else 0 for t in range(4)]
        cols = []
        for j in range(4):
            ej = [1 if t == j else 0 for t in range(4)]
            cols.append(mult(unit, ej))
        lmats.append(cols)  # lmats[i][j][k]: L_{b_i} b_j = sum_k (.)[k] b_k

    def trace_LL(i, j):
        # Tr(L_{b_i} L_{b_j}) mod q
        tr = 0
        for a in range(4):
            v = lmats[j][a]
            w = [0, 0, 0, 0]
            for s in range(4):
                if v[s]:
                    for k in range(4):
                        w[k] = (w[k] + v[s] * lmats[i][s][k]) % q
            tr = (tr + w[a]) % q
        return tr

    m = [[trace_LL(i, j) for j in range(4)] for i in range(4)]
    return _kernel_mod_q(m, q)


def _span_mod_q(vectors, q):
    """Canonical RREF basis of the F_q-span (tuple of tuples)."""
    out = []
    for v in vectors:
        v = [x % q for x in v]
        for b in out:
            piv = next(i for i in range(4) if b[i])
            if v[piv]:
                c = v[piv] % q
                v = [(x - c * y) % q for x, y in zip(v, b)]
        if any(v):
            piv = next(i for i in range(4) if v[i])
            inv = pow(v[piv], -1, q)
            out.append([x * inv % q for x in v])
    # back-reduce for a canonical reduced echelon basis
    out.sort(key=lambda b: next(i for i in range(4) if b[i]))
    for i in reversed(range(len(out))):
        piv = next(c for c in range(4) if out[i][c])
        for j in range(i):
            f = out[j][piv]
            if f:
                out[j] = [(x - f * y) % q for x, y in zip(out[j], out[i])]
    return tuple(tuple(b) for b in out)


def _in_span_mod_q(span, v, q):
    v = [x % q for x in v]
    for b in span:
        piv = next(i for i in range(4) if b[i])
        if v[piv]:
            c = v[piv] * pow(b[piv], -1, q) % q
            v = [(x - c * y) % q for x, y in zip(v, b)]
    return not any(v)


def _kernel_mod_q(mat, q):
    n = len(mat)
    m = [row[:] + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(mat)]
    # row reduce the left block, tracking nothing; compute kernel via rref
    a = [row[:n] for row in m]
    # gaussian elimination
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, n) if a[i][c] % q), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, q)
        a[r] = [x * inv % q for x in a[r]]
        for i in range(n):
            if i != r and a[i][c] % q:
                f = a[i][c]
                a[i] = [(x - f * y) % q for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    ker = []
    for fc in free:
        v = [0] * n
        v[fc] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-a[i][fc]) % q
        ker.append(v)
    return _span_mod_q(ker, q)


def _enlarge_once(alg: QuatAlgebra, order: Lattice, q: int) -> Lattice:
    """One radical-idealizer (or hereditary split) step at q; returns a strictly
    larger order or the input if already stable."""
    rad = _radical_mod_q(order, q)
    basis = order.basis()
    # radical lattice J = qO + lifts
    gens = [b * q for b in basis]
    for vec in rad:
        gens.append(sum((b * int(c) for b, c in zip(basis, vec)), alg.elem(0)))
    J = Lattice.from_elems(alg, gens)
    # two-sided idealizer inside (1/q) O
    jbasis = J.basis()
    import itertools

    found = [b for b in basis]
    for vec in itertools.product(range(q), repeat=4):
        if not any(vec):
            continue
        x = sum((b * int(c) for b, c in zip(basis, vec)), alg.elem(0)) / q
        if all(J.contains(x * jb) for jb in jbasis) and all(
            J.contains(jb * x) for jb in jbasis
        ):
            found.append(x)
    bigger = Lattice.from_elems(alg, found)
    if bigger != order:
        return bigger
    # stalled (hereditary): split off a larger order by adjoining an integral
    # element of (1/q) O and closing under multiplication
    target_below = order.rdisc()
    for vec in itertools.product(range(q), repeat=4):
        if not any(vec):
            continue
        x = sum((b * int(c) for b, c in zip(basis, vec)), alg.elem(0)) / q
        if x.trace().denominator != 1 or x.norm().denominator != 1:
            continue
        cand = _order_closure(alg, order, x, max_iter=8)
        if cand is not None and cand.rdisc() < target_below and cand.is_order():
            return cand
    raise QuathetaError(f"could not enlarge order at {q}")


def _order_closure(alg: QuatAlgebra, order: Lattice, x: QuatElem, max_iter: int = 8):
    cur = order.add(Lattice.from_elems(alg, [b * x for b in order.basis()] + [x]))
    for _ in range(max_iter):
        bs = cur.basis()
        if any(b.trace().denominator != 1 or b.norm().denominator != 1 for b in bs):
            return None
        nxt = cur.add(cur.product(cur))
        if nxt == cur:
            return cur
        cur = nxt
    return None


def maximal_order(alg: QuatAlgebra) -> Lattice:
    """A maximal order containing Z[1, theta, J, theta*J], deterministic."""
    order = standard_order(alg)
    d = order.rdisc()
    if d.denominator != 1:
        raise QuathetaError("standard order has fractional discriminant")
    targets = {}
    for q in prime_factors(int(d)):
        targets[q] = 1 if alg.n_minus % q == 0 else 0
    for q in sorted(targets):
        while _ord_q(order.rdisc(), q) > targets[q]:
            order = _enlarge_once(alg, order, q)
    assert int(order.rdisc()) == alg.n_minus, (order.rdisc(), alg.n_minus)
    return order


def _ord_q(x: Fraction, q: int) -> int:
    v = 0
    n = x.numerator
    while n % q == 0:
        n //= q
        v += 1
    d = x.denominator
    while d % q == 0:
        d //= q
        v -= 1
    return v


# ---------------------------------------------------------------------------
# Eichler orders


@dataclass
class EichlerOrder:
    """Eichler order of level M inside the fixed maximal order."""

    alg: QuatAlgebra
    level: int
    lattice: Lattice
    maximal: Lattice
    splitting_digits: int = 12
    _splittings: dict = field(default_factory=dict, repr=False)

    def splitting(self, q: int, digits: int | None = None) -> LocalSplitting:
        digits = digits or self.splitting_digits
        key = (q, digits)
        if key not in self._splittings:
            self._splittings[key] = LocalSplitting(self.alg, q, digits)
        return self._splittings[key]

    def basis(self):
        return self.lattice.basis()

    def rdisc(self) -> int:
        return int(self.lattice.rdisc())


def _congruence_sublattice(order: Lattice, coeffs: list[int], modulus: int) -> Lattice:
    """Sublattice {x in order : sum coeffs_i * z_i = 0 mod modulus} where z are
    coordinates of x wrt the order basis."""
    n = 4
    c = [x % modulus for x in coeffs]
    # rows generating the solution set of c.z = 0 mod modulus
    rows = [[modulus if i == j else 0 for j in range(n)] for i in range(n)]
    h, u = hnf_transform([[x] for x in c])  # column gcd with transform
    # u @ c-column = (g, 0, 0, 0)^T
    g = h[0][0] if h and h[0] else 0
    if g:
        step = modulus // math.gcd(g, modulus)
        rows.append([x * step for x in u[0]])
        rows.extend(u[1:])
    else:
        rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    basis = order.basis()
    elems = []
    for row in hnf(rows):
        elems.append(sum((b * int(z) for b, z in zip(basis, row)), order.alg.elem(0)))
    return Lattice.from_elems(order.alg, elems)


def eichler_order(alg: QuatAlgebra, level: int, digits: int = 12) -> EichlerOrder:
    """Eichler order of level `level` cut out of the maximal order by the fixed
    local splittings (lower-left entry condition at each q^m || level)."""
    if math.gcd(level, alg.n_minus) != 1:
        raise QuathetaError(f"level {level} must be coprime to N^- = {alg.n_minus}")
    for q in prime_factors(level):
        if alg.K.disc % q == 0 or alg.beta % q == 0:
            raise QuathetaError(
                f"level prime {q} divides D_K or beta; choose a field/beta with "
                f"{q} unramified and beta a square unit there"
            )
    omax = maximal_order(alg)
    lat = omax
    for q in prime_factors(level):
        m = _ord_q(Fraction(level), q)
        qm = q ** m
        digs = max(digits, m + 4)
        s = LocalSplitting(alg, q, digs)
        coeffs = []
        for b in lat.basis():
            img = s.apply(b)
            coeffs.append(img[1][0] % qm)
        lat = _congruence_sublattice(lat, coeffs, qm)
    order = EichlerOrder(alg, level, lat, omax, splitting_digits=digits)
    got = order.rdisc()
    if got != alg.n_minus * level:
        raise QuathetaError(f"eichler order has discriminant {got}, want {alg.n_minus * level}")
    return order


# ---------------------------------------------------------------------------
# unit groups, equivalence, neighbors, class sets


def unit_group(lat: Lattice) -> list[QuatElem]:
    """Representatives of (norm-1 units of lat) / {+-1}."""
    sols = qf_solutions(lat.norm_gram(), 1)
    basis = lat.basis()
    return [
        sum((b * int(c) for b, c in zip(basis, v)), lat.alg.elem(0)) for v in sols
    ]


def left_order(lat: Lattice) -> Lattice:
    """O_L(I) = {x : x I <= I}."""
    alg = lat.alg
    out = None
    for b in lat.basis():
        binv = b.inverse()
        cand = Lattice.from_elems(alg, [y * binv for y in lat.basis()])
        out = cand if out is None else out.intersect(cand)
    return out


def right_order(lat: Lattice) -> Lattice:
    alg = lat.alg
    out = None
    for b in lat.basis():
        binv = b.inverse()
        cand = Lattice.from_elems(alg, [binv * y for y in lat.basis()])
        out = cand if out is None else out.intersect(cand)
    return out


def connecting_element(I: Lattice, J: Lattice):
    """gamma in B^x with I = gamma * J, or None.  Right ideals over one order."""
    M = I.product(J.conjugate())
    target = I.nrd() * J.nrd()
    sols = qf_solutions(M.norm_gram(), target)
    basis = M.basis()
    for v in sols:
        x = sum((b * int(c) for b, c in zip(basis, v)), I.alg.elem(0))
        gamma = x / J.nrd()
        GJ = Lattice.from_elems(I.alg, [gamma * b for b in J.basis()])
        if GJ == I:
            return gamma
    return None


def right_ideal_neighbors(
    I: Lattice, order: Lattice, q: int, expect: int | None = None
) -> list[Lattice]:
    """The right-submodules J < I with I/J = (Z/q)^2 and nrd(J) = q nrd(I).

    There are q+1 of them at a split unramified prime.  `expect` allows an
    early stop once that many distinct submodules have been found.
    """
    if expect is None and order.alg.n_minus % q != 0:
        expect = q + 1
    basis = I.basis()
    obasis = order.basis()
    images = {}
    # scan cyclic generators x mod q, normalized to leading coefficient 1
    import itertools

    done = False
    for lead in range(4):
        if done:
            break
        for tail in itertools.product(range(q), repeat=3 - lead):
            vec = [0] * lead + [1] + list(tail)
            x = sum((b * int(c) for b, c in zip(basis, vec)), I.alg.elem(0))
            span = []
            for ob in obasis:
                span.append(_coords_in_lattice(I, x * ob, q))
            span = _span_mod_q(span, q)
            if len(span) == 2:
                images[span] = None
                if expect is not None and len(images) == expect:
                    done = True
                    break
    out = []
    for span in images:
        gens = [b * q for b in basis]
        for vec in span:
            gens.append(sum((b * int(c) for b, c in zip(basis, vec)), I.alg.elem(0)))
        J = Lattice.from_elems(I.alg, gens)
        assert J.nrd() == q * I.nrd()
        out.append(J)
    return out


def closed_form_mass(n_minus: int, level: int) -> Fraction:
    """Eichler mass sum 1/#Gamma_g in the mod-center normalization."""
    m = Fraction(1, 12)
    for q in prime_factors(n_minus):
        m *= q - 1
    m *= level
    for q in prime_factors(level):
        m *= 1 + Fraction(1, q)
    return m


@dataclass
class IdealClassSet:
    order: EichlerOrder
    reps: list[Lattice]
    unit_orders: list[int]          # #Gamma_g, mod center
    left_orders: list[Lattice]
    units: list[list[QuatElem]]     # norm-one units mod +-1 for each left order
    neighbor_prime: int

    @property
    def h(self) -> int:
        return len(self.reps)

    def mass(self) -> Fraction:
        return sum(Fraction(1, w) for w in self.unit_orders)

    def classify(self, J: Lattice):
        """(index, gamma) with J = gamma * reps[index]."""
        jtheta = None
        for idx, I in enumerate(self.reps):
            if jtheta is None:
                jtheta = J.theta_invariant()
            if self._theta[idx] != jtheta:
                continue
            gamma = connecting_element(J, I)
            if gamma is not None:
                return idx, gamma
        raise QuathetaError("ideal does not belong to any known class")

    def __post_init__(self):
        self._theta = [I.theta_invariant() for I in self.reps]


def right_class_set(order: EichlerOrder, neighbor_prime: int | None = None) -> IdealClassSet:
    alg = order.alg
    if neighbor_prime is None:
        q = 2
        while alg.n_minus % q == 0 or order.level % q == 0:
            q = _next_prime(q)
        neighbor_prime = q
    q = neighbor_prime
    target = closed_form_mass(alg.n_minus, order.level)

    R = order.lattice
    reps = [R]
    lorders = [left_order(R)]
    units = [unit_group(lorders[0])]
    worders = [len(units[0])]
    mass = Fraction(1, worders[0])
    thetas = [R.theta_invariant()]
    frontier = [R]
    seen_lattices = {R.key()}
    while mass < target and frontier:
        I = frontier.pop(0)
        for J in right_ideal_neighbors(I, R, q):
            if J.key() in seen_lattices:
                continue
            seen_lattices.add(J.key())
            jt = J.theta_invariant()
            known = False
            for idx in range(len(reps)):
                if thetas[idx] != jt:
                    continue
                if connecting_element(J, reps[idx]) is not None:
                    known = True
                    break
            if known:
                continue
            reps.append(J)
            lo = left_order(J)
            lorders.append(lo)
            us = unit_group(lo)
            units.append(us)
            worders.append(len(us))
            mass += Fraction(1, len(us))
            thetas.append(jt)
            frontier.append(J)
            if mass == target:
                break
    if mass != target:
        raise QuathetaError(
            f"class enumeration terminated with mass {mass}, expected {target}"
        )
    cs = IdealClassSet(
        order=order,
        reps=reps,
        unit_orders=worders,
        left_orders=lorders,
        units=units,
        neighbor_prime=q,
    )
    return cs


def _next_prime(n: int) -> int:
    n += 1
    while not is_prime(n):
        n += 1
    return n


def mass_of(order: EichlerOrder) -> Fraction:
    return right_class_set(order).mass()


# ---------------------------------------------------------------------------
# two-sided prime at a ramified q, and canonical bases


def ramified_prime_ideal(order: EichlerOrder, q: int) -> Lattice:
    """The unique two-sided ideal P of the order with nrd q, at q | N^-:
    the preimage of the radical of O/qO."""
    if order.alg.n_minus % q != 0:
        raise QuathetaError(f"{q} does not ramify")
    R = order.lattice
    rad = _radical_mod_q(R, q)
    basis = R.basis()
    gens = [b * q for b in basis]
    for vec in rad:
        gens.append(sum((b * int(c) for b, c in zip(basis, vec)), order.alg.elem(0)))
    P = Lattice.from_elems(order.alg, gens)
    if P.nrd() != q:
        raise QuathetaError(f"radical preimage at {q} has nrd {P.nrd()}, expected {q}")
    return P


def canonical_basis(lat: Lattice) -> list[QuatElem]:
    """LLL-reduced basis with deterministic sign/order normalization."""
    g = lat.norm_gram()
    u = lll_reduce([[Fraction(x) for x in row] for row in g])
    basis = lat.basis()
    out = []
    for urow in u:
        v = sum((b * int(c) for b, c in zip(basis, urow)), lat.alg.elem(0))
        c = v.coords()
        first = next((x for x in c if x != 0), None)
        if first is not None and first < 0:
            v = -v
        out.append(v)
    out.sort(key=lambda x: (x.norm(), x.coords()))
    return out
