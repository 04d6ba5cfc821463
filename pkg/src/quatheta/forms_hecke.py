"""Weight modules, Brandt/Hecke operators, eigenforms and the inner product.

A form of weight k on a class set {I_1..I_h} is a vector of elements of
L_k(K) = Sym^(k-2)(K^2), one per class, invariant under the finite unit group
of the left order of its class.  Hecke operators act through the exact
K-matrices of connecting elements, with the determinant-normalized action
rho_k, so eigenvalues match the classical normalization.

Polynomials in L_k are coefficient tuples indexed by the Y-degree
(position i <-> X^(k-2-i) Y^i <-> basis vector v_m with m = i - (k-2)/2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exact import QuadElem, QuadField, QuathetaError, prime_factors
from .ideal_classes import (
    EichlerOrder,
    IdealClassSet,
    Lattice,
    _coords_in_lattice,
    eichler_order,
    ramified_prime_ideal,
    right_class_set,
    right_ideal_neighbors,
)
from .linalg import field_kernel, field_solve, qf_solutions
from .quaternion import QuatElem, i_K_matrix, mat2_mul


# ---------------------------------------------------------------------------
# the weight module L_k and its pairing


@lru_cache(maxsize=None)
def _binoms(n: int):
    row = [1]
    for _ in range(n):
        row = [1] + [row[i] + row[i + 1] for i in range(len(row) - 1)] + [1]
    return row


def weight_indices(k: int) -> list[int]:
    """The m with -k/2 < m < k/2, in position order i = m + (k-2)/2."""
    return [i - (k - 2) // 2 for i in range(k - 1)]


def basis_vector(K: QuadField, k: int, m: int):
    i = m + (k - 2) // 2
    if not 0 <= i <= k - 2:
        raise QuathetaError(f"weight index {m} out of range for k={k}")
    return tuple(K.elem(1) if j == i else K.elem(0) for j in range(k - 1))


def rho_act(g, coeffs, k: int):
    """rho_k(g) P = det(g)^(-(k-2)/2) P((X,Y) g), g a 2x2 matrix over K."""
    (a, b), (c, d) = g
    det = a * d - b * c
    if det == 0:
        raise QuathetaError("rho_act needs an invertible matrix")
    n = k - 2
    zero = a * 0
    if n == 0:
        return (coeffs[0],)
    # powers of the images of X and Y: X -> aX + cY, Y -> bX + dY
    # (X,Y) g = (aX + cY, bX + dY) for row vector convention
    ximg = [None] * (n + 1)  # ximg[e] = (aX+cY)^e as coefficient list by Y-degree
    yimg = [None] * (n + 1)
    ximg[0] = [a * 0 + 1]
    yimg[0] = [a * 0 + 1]
    for e in range(1, n + 1):
        binom = _binoms(e)
        ximg[e] = [binom[t] * a ** (e - t) * c ** t for t in range(e + 1)]
        yimg[e] = [binom[t] * b ** (e - t) * d ** t for t in range(e + 1)]
    out = [zero] * (n + 1)
    for i, p in enumerate(coeffs):
        if p == 0:
            continue
        xe, ye = ximg[n - i], yimg[i]
        for t1, u in enumerate(xe):
            for t2, v in enumerate(ye):
                out[t1 + t2] = out[t1 + t2] + p * u * v
    dinv = (det ** ((k - 2) // 2)).inverse() if hasattr(det, "inverse") else Fraction(1) / det ** ((k - 2) // 2)
    return tuple(x * dinv for x in out)


def pair_k(P, Q, k: int):
    """The perfect rho_k-equivariant pairing: <v_m, v_(-m)> = (-1)^i / C(k-2, i)."""
    n = k - 2
    binom = _binoms(n)
    out = None
    for i in range(n + 1):
        term = P[i] * Q[n - i] * (Fraction((-1) ** i, binom[i]))
        out = term if out is None else out + term
    return out


# ---------------------------------------------------------------------------
# evaluation points


@dataclass
class Point:
    """Adelic point with away-from-p data a lattice and an explicit p-component.

    `lattice` must be p-saturated (its p-localization equals the order's).
    `p_matrix` is a 2x2 integer matrix mod p^digits, or None for a trivial
    p-component.
    """

    lattice: Lattice
    p: int | None = None
    p_matrix: tuple | None = None
    p_digits: int = 0


def full_lattice_of_point(pt: Point, order: EichlerOrder) -> Lattice:
    """The lattice (away-from-p part of pt) glued with p-part T_p * R_p."""
    if pt.p_matrix is None:
        return pt.lattice
    p = pt.p
    T = pt.p_matrix
    det = (T[0][0] * T[1][1] - T[0][1] * T[1][0]) % (p ** pt.p_digits)
    v = 0
    d = det
    while d and d % p == 0:
        d //= p
        v += 1
    if d == 0:
        raise QuathetaError("p-matrix determinant vanishes at working precision")
    e = v + 2
    if pt.p_digits < e:
        raise QuathetaError("point carried with too few p-adic digits")
    s = order.splitting(p, e)
    mod = p ** e
    M = pt.lattice
    mbasis = M.basis()
    # coordinates solver: C y = vec(i_p(x)) with C columns the basis images
    C = [[0] * 4 for _ in range(4)]
    for kk, b in enumerate(mbasis):
        img = s.apply(b)
        vec = [img[0][0], img[0][1], img[1][0], img[1][1]]
        for rr in range(4):
            C[rr][kk] = vec[rr]
    gens = [b * (p ** e) for b in mbasis]
    rbasis = order.basis()
    Tm = ((T[0][0] % mod, T[0][1] % mod), (T[1][0] % mod, T[1][1] % mod))
    for r in rbasis:
        target = mat2_mul(Tm, s.apply(r), mod)
        tvec = [target[0][0], target[0][1], target[1][0], target[1][1]]
        y = _solve_mod_ppow(C, tvec, p, e)
        gens.append(sum((b * int(c) for b, c in zip(mbasis, y)), M.alg.elem(0)))
    L = Lattice.from_elems(M.alg, gens)
    expected = M.nrd() * p ** v
    if L.nrd() != expected:
        raise QuathetaError(
            f"glued lattice has nrd {L.nrd()}, expected {expected}; raise digits"
        )
    return L


def _solve_mod_ppow(C, rhs, p: int, e: int):
    """Solve C y = rhs mod p^e by valuation-pivoting Gaussian elimination.
    A solution must exist; raises if the system is inconsistent at precision."""
    mod = p ** e
    n = len(C)
    a = [row[:] + [rhs[i]] for i, row in enumerate(C)]
    for i in range(n):
        for j in range(n + 1):
            a[i][j] %= mod

    def val(x):
        if x % mod == 0:
            return e
        v = 0
        while x % p == 0:
            x //= p
            v += 1
        return v

    perm = list(range(n))
    row = 0
    for col in range(n):
        piv, best = None, e + 1
        for r in range(row, n):
            v = val(a[r][col])
            if v < best:
                best, piv = v, r
        if piv is None or best >= e:
            continue
        a[row], a[piv] = a[piv], a[row]
        pv = a[row][col]
        unit = pv // p ** best
        inv = pow(unit, -1, mod)
        for r in range(n):
            if r == row:
                continue
            v2 = val(a[r][col])
            if v2 >= e:
                continue
            if v2 < best:
                raise QuathetaError("p-adic elimination failed; raise precision")
            f = (a[r][col] // p ** best) * inv % mod
            a[r] = [(x - f * y) % mod for x, y in zip(a[r], a[row])]
        perm[row] = col
        row += 1
    y = [0] * n
    for r in range(row):
        col = perm[r]
        pv = a[r][col]
        v = val(pv)
        rhsv = a[r][n]
        if rhsv % p ** v:
            raise QuathetaError("inconsistent p-adic system")
        unit = pv // p ** v
        y[col] = (rhsv // p ** v) * pow(unit, -1, mod // p ** v) % (mod // p ** v)
    return y


# ---------------------------------------------------------------------------
# the Brandt module


class BrandtModule:
    """Forms of weight k on the right class set of an Eichler order."""

    def __init__(self, order: EichlerOrder, k: int = 2, class_set: IdealClassSet | None = None):
        if k < 2 or k % 2:
            raise QuathetaError("weight must be even and >= 2")
        self.order = order
        self.k = k
        self.cs = class_set if class_set is not None else right_class_set(order)
        self.K = order.alg.K
        self._hecke_cache: dict[int, list] = {}
        self._build_invariant_bases()

    # -- invariant subspaces -------------------------------------------------
    def _build_invariant_bases(self):
        k, K = self.k, self.K
        self.inv_bases = []
        for units in self.cs.units:
            if k == 2:
                self.inv_bases.append([(K.elem(1),)])
                continue
            n = k - 1
            # projector (1/#Gamma) sum rho(i_K(u))
            cols = []
            for j in range(n):
                vec = tuple(K.elem(1) if t == j else K.elem(0) for t in range(n))
                acc = [K.elem(0)] * n
                for u in units:
                    img = rho_act(i_K_matrix(u), vec, k)
                    acc = [x + y for x, y in zip(acc, img)]
                w = Fraction(1, len(units))
                cols.append([x * w for x in acc])
            # column space basis over K: row reduce the transpose
            basis = []
            from .linalg import field_rref

            rref, pivots = field_rref([list(c) for c in cols])
            for row in rref:
                if any(not x == 0 for x in row):
                    basis.append(tuple(row))
            self.inv_bases.append(basis)
        self.dims = [len(b) for b in self.inv_bases]
        self.offsets = []
        off = 0
        for d in self.dims:
            self.offsets.append(off)
            off += d
        self.dim = off

    def expand(self, cls_idx: int, coords) -> tuple:
        """Class-cls vector from invariant-basis coordinates."""
        n = self.k - 1
        out = [self.K.elem(0)] * n
        for c, bvec in zip(coords, self.inv_bases[cls_idx]):
            out = [x + c * y for x, y in zip(out, bvec)]
        return tuple(out)

    def coords_of(self, cls_idx: int, vec) -> list:
        """Invariant-basis coordinates of an invariant vector (exact; asserts)."""
        basis = self.inv_bases[cls_idx]
        if not basis:
            if any(not x == 0 for x in vec):
                raise QuathetaError("vector not in the invariant subspace")
            return []
        mat = [[basis[j][i] for j in range(len(basis))] for i in range(self.k - 1)]
        sol = field_solve(mat, list(vec))
        if sol is None:
            raise QuathetaError("vector not in the invariant subspace")
        # verify exactly
        again = self.expand(cls_idx, sol)
        if tuple(again) != tuple(vec):
            raise QuathetaError("inconsistent invariant expansion")
        return sol

    # -- neighbors with classification ---------------------------------------
    def _classified_neighbors(self, i: int, q: int, kind: str):
        """[(class index c, gamma)] over the q-neighbors of rep i of the given
        kind: 'hecke' (all q+1), 'u_level' (the q with upper-left local shape),
        'u_ramified' (the single one above q | N^-)."""
        I = self.cs.reps[i]
        nbrs = right_ideal_neighbors(I, self.order.lattice, q)
        if kind == "hecke":
            want = q + 1
        elif kind == "u_level":
            s = self.order.splitting(q, max(2, 1 + _ord(self.order.level, q)))
            qm = q
            filtered = []
            for J in nbrs:
                if all(
                    s.apply(b)[0][0] % q == 0 and s.apply(b)[1][0] % q == 0
                    for b in J.basis()
                ):
                    filtered.append(J)
            nbrs, want = filtered, q
        elif kind == "u_ramified":
            P = self._ramified_prime(q)
            nbrs = [I.product(P)]
            want = 1
        else:
            raise ValueError(kind)
        if len(nbrs) != want:
            raise QuathetaError(
                f"expected {want} {kind} neighbors at {q}, found {len(nbrs)}"
            )
        out = []
        for J in nbrs:
            c, gamma = self.cs.classify(J)
            out.append((c, gamma))
        return out

    # -- operators -------------------------------------------------------------
    def _ramified_prime(self, q: int):
        if not hasattr(self, "_ram_cache"):
            self._ram_cache = {}
        if q not in self._ram_cache:
            self._ram_cache[q] = ramified_prime_ideal(self.order, q)
        return self._ram_cache[q]

    def tau_translate(self, i: int) -> Lattice:
        """Lattice of the Atkin-Lehner translate of class rep i (cached)."""
        if not hasattr(self, "_tau_cache"):
            self._tau_cache = {}
        if i not in self._tau_cache:
            L = self.cs.reps[i]
            for q in prime_factors(self.order.alg.n_minus):
                L = L.product(self._ramified_prime(q))
            if self.order.level > 1:
                L = _translate_level(L, self.order)
            self._tau_cache[i] = L
        return self._tau_cache[i]

    def hecke_matrix(self, q: int):
        """T_q (q coprime to level*N^-) or U_q, as a dim x dim matrix over K."""
        if q in self._hecke_cache:
            return self._hecke_cache[q]
        alg = self.order.alg
        if alg.n_minus % q == 0:
            kind = "u_ramified"
        elif self.order.level % q == 0:
            kind = "u_level"
        else:
            kind = "hecke"
        k = self.k
        # classical normalization: connecting elements have norm q, so scaling
        # rho_k by q^((k-2)/2) turns det^(-(k-2)/2) Sym^(k-2) into plain
        # Sym^(k-2) and the eigenvalues into the classical a_q
        scale = Fraction(q) ** ((k - 2) // 2)
        mat = [[self.K.elem(0)] * self.dim for _ in range(self.dim)]
        for i in range(self.cs.h):
            pairs = self._classified_neighbors(i, q, kind)
            by_class: dict[int, list] = {}
            for c, gamma in pairs:
                by_class.setdefault(c, []).append(gamma)
            for c, gammas in by_class.items():
                for t, bvec in enumerate(self.inv_bases[c]):
                    if k == 2:
                        coords = [bvec[0] * len(gammas)]
                    else:
                        # only the summed image over neighbors of a fixed target
                        # class is guaranteed to land in the invariant subspace
                        acc = [self.K.elem(0)] * (k - 1)
                        for gamma in gammas:
                            img = rho_act(i_K_matrix(gamma), bvec, k)
                            acc = [x + y for x, y in zip(acc, img)]
                        coords = [x * scale for x in self.coords_of(i, acc)]
                    for s, val in enumerate(coords):
                        mat[self.offsets[i] + s][self.offsets[c] + t] = (
                            mat[self.offsets[i] + s][self.offsets[c] + t] + val
                        )
        self._hecke_cache[q] = mat
        return mat

    def hecke_rational(self, q: int):
        """The operator as a Fraction matrix (entries must be rational)."""
        m = self.hecke_matrix(q)
        out = []
        for row in m:
            r = []
            for x in row:
                if not x.is_rational():
                    raise QuathetaError("hecke matrix has irrational entries")
                r.append(x.u)
            out.append(r)
        return out

    # -- forms ------------------------------------------------------------------
    def form_from_vector(self, vec) -> "AutoForm":
        values = []
        for i in range(self.cs.h):
            coords = vec[self.offsets[i]: self.offsets[i] + self.dims[i]]
            values.append(self.expand(i, coords))
        return AutoForm(self, values)

    def vector_of_form(self, f: "AutoForm"):
        out = []
        for i, v in enumerate(f.values):
            out.extend(self.coords_of(i, v))
        return out


def _ord(n: int, q: int) -> int:
    v = 0
    while n % q == 0 and n:
        n //= q
        v += 1
    return v


@dataclass
class AutoForm:
    """A weight-k form: one invariant L_k(K)-value per ideal class."""

    module: BrandtModule
    values: list
    normalization_tag: str = "raw"

    @property
    def k(self) -> int:
        return self.module.k

    def scale(self, c) -> "AutoForm":
        return AutoForm(
            self.module,
            [tuple(x * c for x in v) for v in self.values],
            self.normalization_tag,
        )

    def add(self, other: "AutoForm") -> "AutoForm":
        return AutoForm(
            self.module,
            [tuple(x + y for x, y in zip(a, b)) for a, b in zip(self.values, other.values)],
            "raw",
        )

    def value_at_lattice(self, L: Lattice):
        """f at the point whose lattice is L (a right ideal of the module's order):
        rho(i_K(gamma)) f(class rep), where L = gamma * rep."""
        c, gamma = self.module.cs.classify(L)
        if self.k == 2:
            return self.values[c]
        return rho_act(i_K_matrix(gamma), self.values[c], self.k)

    def value_at_point(self, pt: Point):
        L = full_lattice_of_point(pt, self.module.order)
        # saturate to a right module over the module's own order if needed
        if not _is_right_module(L, self.module.order):
            L = L.product(self.module.order.lattice)
        return self.value_at_lattice(L)


def _is_right_module(L: Lattice, order: EichlerOrder) -> bool:
    ob = order.basis()
    return all(L.contains(b * o) for b in L.basis() for o in ob)


# ---------------------------------------------------------------------------
# eigenforms


def eigenform(module: BrandtModule, targets: list[tuple[int, Fraction]]) -> AutoForm:
    """The unique (up to scale) simultaneous eigenform with T_q f = a_q f for the
    given target list; scaled to primitive integer coordinates with positive
    leading entry."""
    K = module.K
    rows = []
    for q, a in targets:
        m = module.hecke_matrix(q)
        for i in range(module.dim):
            row = [m[i][j] - (K.elem(a) if i == j else K.elem(0)) for j in range(module.dim)]
            rows.append(row)
    ker = field_kernel(rows) if rows else [[K.elem(1) if i == j else K.elem(0) for i in range(module.dim)] for j in range(module.dim)]
    if len(ker) == 0:
        raise QuathetaError(f"no eigenform with eigenvalues {targets}")
    if len(ker) > 1:
        raise QuathetaError(
            f"eigenvalues {targets} cut out a {len(ker)}-dimensional space; add operators"
        )
    vec = ker[0]
    f = module.form_from_vector(vec)
    return normalize_integral(f)


def normalize_integral(f: AutoForm) -> AutoForm:
    """Scale so all K-coordinates are integers with content 1, first nonzero
    coordinate positive (deterministic)."""
    nums = []
    dens = []
    flat = [x for v in f.values for x in v]
    for x in flat:
        for c in (x.u, x.v):
            if c != 0:
                nums.append(abs(c.numerator))
                dens.append(c.denominator)
    if not nums:
        raise QuathetaError("zero form")
    den = 1
    for d in dens:
        den = den * d // math.gcd(den, d)
    scaled = [c * den for x in flat for c in (x.u, x.v)]
    g = 0
    for c in scaled:
        g = math.gcd(g, abs(int(c)))
    factor = Fraction(den, g)
    first = next(c for x in flat for c in (x.u, x.v) if c != 0)
    if first < 0:
        factor = -factor
    out = f.scale(factor)
    out.normalization_tag = "primitive"
    return out


def eigenvalue_of(module: BrandtModule, f: AutoForm, q: int) -> Fraction:
    """a_q for an eigenform (asserts f is an eigenvector of T_q)."""
    m = module.hecke_matrix(q)
    v = module.vector_of_form(f)
    w = [sum((m[i][j] * v[j] for j in range(module.dim)), module.K.elem(0)) for i in range(module.dim)]
    piv = next(i for i in range(module.dim) if not v[i] == 0)
    lam = w[piv] / v[piv]
    for i in range(module.dim):
        if not w[i] == lam * v[i]:
            raise QuathetaError(f"form is not a T_{q} eigenvector")
    if not lam.is_rational():
        raise QuathetaError("irrational eigenvalue")
    return lam.u


# ---------------------------------------------------------------------------
# Atkin-Lehner translate and the inner product


def petersson(f1: AutoForm, f2: AutoForm):
    """<f1, f2> = sum_g <f1(g), f2(g tau)>_k / #Gamma_g, exact over K.

    tau is the Atkin-Lehner element: J at ramified primes, [[0,1],[-N_B,0]] at
    level primes, 1 elsewhere.
    """
    module = f1.module
    if f2.module is not module:
        raise QuathetaError("forms live on different modules")
    total = None
    for i in range(module.cs.h):
        v2 = f2.value_at_lattice(module.tau_translate(i))
        term = pair_k(f1.values[i], v2, module.k) * Fraction(1, module.cs.unit_orders[i])
        total = term if total is None else total + term
    return total


def _translate_level(L: Lattice, order: EichlerOrder) -> Lattice:
    """Right translate by the level Atkin-Lehner element [[0,1],[-M,0]] at each
    prime dividing the level."""
    alg = order.alg
    M = order.level
    out = L
    for q in prime_factors(M):
        e = _ord(M, q)
        digs = 2 * e + 3
        s = order.splitting(q, digs)
        mod = q ** digs
        w = ((0, 1), ((-M) % mod, 0))
        out = _modify_at_prime(out, order, q, w, e, digs)
    return out


def _modify_at_prime(L: Lattice, order: EichlerOrder, q: int, w, detval: int, digs: int) -> Lattice:
    """Lattice equal to L away from q and to (local generator of L) * w * R_q at q.
    Requires L coprime to q (local generator 1)."""
    if L.nrd().numerator % q == 0 or L.nrd().denominator % q == 0:
        raise QuathetaError("local modification requires a q-coprime lattice")
    s = order.splitting(q, digs)
    mod = q ** digs
    e = detval + 2
    if digs < e + 1:
        raise QuathetaError("not enough digits for local modification")
    basis = L.basis()
    C = [[0] * 4 for _ in range(4)]
    for kk, b in enumerate(basis):
        img = s.apply(b)
        vec = [img[0][0], img[0][1], img[1][0], img[1][1]]
        for rr in range(4):
            C[rr][kk] = vec[rr]
    gens = [b * q ** e for b in basis]
    for r in order.basis():
        target = mat2_mul(w, s.apply(r), mod)
        tvec = [target[0][0] % q ** e, target[0][1] % q ** e, target[1][0] % q ** e, target[1][1] % q ** e]
        Ce = [[x % q ** e for x in row] for row in C]
        y = _solve_mod_ppow(Ce, tvec, q, e)
        gens.append(sum((b * int(c) for b, c in zip(basis, y)), L.alg.elem(0)))
    out = Lattice.from_elems(L.alg, gens)
    if out.nrd() != L.nrd() * q ** detval:
        raise QuathetaError("local modification produced wrong norm")
    return out


# ---------------------------------------------------------------------------
# fast Brandt traces via lattice point counts (weight 2)


def norm_counts(gram: list[list[int]], max_val: int) -> list[int]:
    """counts[v] = #{x != 0 : x G x^T = v} for v <= max_val (both signs counted),
    for an integer positive definite Gram matrix.  Pure-integer enumeration."""
    n = len(gram)
    # rational Cholesky in floats with a safety slack for bounds
    import math as _m

    a = [[float(gram[i][j]) for j in range(n)] for i in range(n)]
    d = [0.0] * n
    mu = [[0.0] * n for _ in range(n)]
    for i in range(n):
        d[i] = a[i][i]
        for j in range(i + 1, n):
            mu[i][j] = a[i][j] / d[i]
        for r in range(i + 1, n):
            for c in range(r, n):
                a[r][c] -= a[i][c] * a[i][r] / d[i]
                a[c][r] = a[r][c]
    counts = [0] * (max_val + 1)
    g = gram
    x = [0] * n

    def rec(i, budget):
        if i < 0:
            return
        if i == 0:
            center = -sum(mu[0][j] * x[j] for j in range(1, n))
            half = _m.sqrt(max(budget, 0.0) / d[0]) + 1e-9
            lo = _m.ceil(center - half - 1)
            hi = _m.floor(center + half + 1)
            base = 0
            for j in range(1, n):
                if x[j]:
                    for t in range(1, n):
                        if x[t]:
                            base += g[j][t] * x[j] * x[t]
            lin = [2 * sum(g[0][j] * x[j] for j in range(1, n)), g[0][0]]
            for x0 in range(lo, hi + 1):
                v = base + lin[0] * x0 + lin[1] * x0 * x0
                if 0 <= v <= max_val and (x0 or any(x[1:])):
                    counts[v] += 1
            return
        center = -sum(mu[i][j] * x[j] for j in range(i + 1, n))
        half = _m.sqrt(max(budget, 0.0) / d[i]) + 1e-9
        for xi in range(_m.ceil(center - half - 1), _m.floor(center + half + 1) + 1):
            x[i] = xi
            used = d[i] * (xi - center) ** 2
            rec(i - 1, budget - used + 1e-6)
        x[i] = 0

    rec(n - 1, float(max_val) + 0.5)
    return counts


def brandt_diagonal_counts(cs: IdealClassSet, max_q: int) -> list[list[int]]:
    """For each class i, counts[t] = #{x in I_i conj(I_i) : N(x) = t * nrd(I_i)^2},
    t <= max_q.  Used for fast trace computation at weight 2."""
    out = []
    for i, I in enumerate(cs.reps):
        M = I.product(I.conjugate())
        s = I.nrd() ** 2
        g = M.norm_gram()
        gn = [[x / s for x in row] for row in g]
        den = 1
        for row in gn:
            for x in row:
                den = den * x.denominator // math.gcd(den, x.denominator)
        gi = [[int(x * den) for x in row] for row in gn]
        counts = norm_counts(gi, max_q * den)
        slots = [0] * (max_q + 1)
        for t in range(1, max_q + 1):
            slots[t] = counts[t * den]
        out.append(slots)
    return out


def hecke_trace_weight2(cs: IdealClassSet, diag_counts, q: int) -> Fraction:
    """Trace of T_q on the full weight-2 Brandt module via lattice counts."""
    tr = Fraction(0)
    for i in range(cs.h):
        tr += Fraction(diag_counts[i][q], 2 * cs.unit_orders[i])
    return tr
