"""The anticyclotomic tower: orders Z + p^n O_K, their Picard groups, Gross
points and their reduction to ideal classes.

Ring class groups are realized concretely (class number one base field) as
(O_K/p^n)^x / ((Z/p^n)^x * roots of unity), with the torsion part Delta taken
as the prime-to-p part and the cyclic p-part generated by the class of
1 + p*theta.  Gross points are pairs (prime-to-p lattice, explicit p-adic
matrix), reduced by exact lattice equivalence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import QuadField, QuathetaError, hensel_root, legendre, prime_factors
from .forms_hecke import BrandtModule, Point
from .ideal_classes import EichlerOrder, Lattice
from .linalg import hnf, hnf_transform
from .quaternion import QuatAlgebra, QuatElem


# ---------------------------------------------------------------------------
# tower orders


@dataclass(frozen=True)
class TowerOrder:
    """O_n = Z + p^n O_K."""

    K: QuadField
    p: int
    n: int

    def basis_coords(self):
        return [(1, 0), (0, self.p ** self.n)]

    def contains(self, u: Fraction, v: Fraction) -> bool:
        return u.denominator == 1 and v.denominator == 1 and int(v) % self.p ** self.n == 0


# ---------------------------------------------------------------------------
# ring class groups (class number one base)


class RingClassGroup:
    """G_n = (O_K/p^n)^x / ((Z/p^n)^x mu_K) with its canonical Delta x Gamma split.

    Elements are integer labels; `reps` holds one unit (u, v) (meaning u + v th)
    per label.  Requires h_K = 1 and a cyclic Sylow p-subgroup generated by the
    class of 1 + p*theta (true whenever p is unramified in K and prime to the
    torsion order, which the constructor checks).
    """

    def __init__(self, K: QuadField, p: int, n: int):
        if K.disc not in (3, 4, 7, 8, 11, 19, 43, 67, 163):
            raise QuathetaError("ring class groups implemented for class number one")
        if K.disc % p == 0:
            raise QuathetaError("p must be unramified in K")
        self.K = K
        self.p = p
        self.n = n
        mod = p ** n
        self.mod = mod
        t, nm = K.gen_trace, K.gen_norm
        if n == 0:
            self.size = 1
            self.reps = [(0, 0)]  # formal: the identity
            self._label = {(0, 0): 0}
            self.delta_labels = [0]
            self.gamma_gen = 0
            self.gamma_order = 1
            return
        # enumerate units of O_K/p^n: norm(u + v th) = u^2 + t u v + nm v^2
        units = []
        for u in range(mod):
            for v in range(mod):
                if (u * u + t * u * v + nm * v * v) % p:
                    units.append((u, v))
        self._norm = lambda u, v: (u * u + t * u * v + nm * v * v) % mod

        def mul(a, b):
            u1, v1 = a
            u2, v2 = b
            return (
                (u1 * u2 - nm * v1 * v2) % mod,
                (u1 * v2 + v1 * u2 + t * v1 * v2) % mod,
            )

        self._mul_pair = mul
        # subgroup H = (Z/p^n)^x * mu_K
        roots = [(int(r.u) % mod, int(r.v) % mod) for r in K.unit_group()]
        H = set()
        for c in range(1, mod):
            if c % p == 0:
                continue
            for r in roots:
                H.add(mul((c % mod, 0), r))
        self._H = H
        # coset labels
        label = {}
        reps = []
        for x in units:
            if x in label:
                continue
            lab = len(reps)
            members = [mul(x, h) for h in H]
            canon = min(members)
            for m in members:
                label[m] = lab
            reps.append(canon)
        # normalize representatives to the canonical coset element
        self._label = label
        self.reps = reps
        self.size = len(reps)
        # the p-part generator [1 + p theta]
        self.gamma_gen = label[(1 % mod, p % mod)]
        self.gamma_order = self._order_of(self.gamma_gen)
        pe = 1
        while self.size % (pe * p) == 0:
            pe *= p
        if self.gamma_order != pe:
            raise QuathetaError("Sylow p-part is not generated by [1 + p theta]")
        m_torsion = self.size // pe
        if math.gcd(m_torsion, p) != 1:
            raise QuathetaError("unexpected p-torsion in Delta")
        # Delta = prime-to-p part: image of x -> x^(p-power)
        e = pe
        delta = sorted({self.power(x, e) for x in range(self.size)})
        self.delta_labels = delta
        if len(delta) != m_torsion:
            raise QuathetaError("Delta has unexpected order")
        self._decomp_cache = {}

    # -- group operations --------------------------------------------------
    def mul(self, a: int, b: int) -> int:
        if self.n == 0:
            return 0
        return self._label[self._mul_pair(self.reps[a], self.reps[b])]

    def identity(self) -> int:
        return self._label[(1 % self.mod, 0)] if self.n else 0

    def inverse(self, a: int) -> int:
        if self.n == 0:
            return 0
        u, v = self.reps[a]
        t, nm = self.K.gen_trace, self.K.gen_norm
        # (u + v th)^(-1) = conj / norm
        nrm = self._norm(u, v)
        ninv = pow(nrm, -1, self.mod)
        cu, cv = (u + t * v) % self.mod, (-v) % self.mod
        return self._label[((cu * ninv) % self.mod, (cv * ninv) % self.mod)]

    def power(self, a: int, e: int) -> int:
        if e < 0:
            return self.power(self.inverse(a), -e)
        out = self.identity()
        b = a
        while e:
            if e & 1:
                out = self.mul(out, b)
            b = self.mul(b, b)
            e >>= 1
        return out

    def _order_of(self, a: int) -> int:
        e = 1
        x = a
        while x != self.identity():
            x = self.mul(x, a)
            e += 1
        return e

    def elements(self) -> list[int]:
        return list(range(self.size))

    def class_of_unit(self, u: int, v: int) -> int:
        if self.n == 0:
            return 0
        return self._label[(u % self.mod, v % self.mod)]

    # -- Delta x Gamma decomposition ----------------------------------------
    def decompose(self, a: int) -> tuple[int, int]:
        """(delta_label, j) with a = delta * gamma_gen^j."""
        if a in self._decomp_cache:
            return self._decomp_cache[a]
        q = self.gamma_order
        m = self.size // q
        if q == 1:
            out = (a, 0)
        else:
            # CRT exponents: 1 = alpha q + beta m
            alpha = pow(q, -1, m) if m > 1 else 0
            delta = self.power(a, q * alpha) if m > 1 else self.identity()
            gamma = self.mul(a, self.inverse(delta))
            j = 0
            x = self.identity()
            while x != gamma:
                x = self.mul(x, self.gamma_gen)
                j += 1
                if j > q:
                    raise QuathetaError("element not in the cyclic p-part")
            out = (delta, j)
        self._decomp_cache[a] = out
        return out

    def gamma_exponent(self, a: int) -> int:
        return self.decompose(a)[1]

    def delta_of(self, a: int) -> int:
        return self.decompose(a)[0]


def ring_class_group(K: QuadField, p: int, n: int) -> RingClassGroup:
    return RingClassGroup(K, p, n)


def ring_class_number(K: QuadField, p: int, n: int) -> int:
    """#Pic(O_n) by the class number formula (h_K = 1)."""
    if n == 0:
        return 1
    chi = {"split": 1, "inert": -1, "ramified": 0}[K.splitting_type(p)]
    return p ** (n - 1) * (p - chi) // K.u_k


def project(gn1: RingClassGroup, gn: RingClassGroup, a: int) -> int:
    """Image of a under G_(n+1) -> G_n (reduction of representatives mod p^n)."""
    if gn1.n <= gn.n:
        raise QuathetaError("projection goes down the tower")
    if gn.n == 0:
        return 0
    u, v = gn1.reps[a]
    return gn.class_of_unit(u % gn.mod, v % gn.mod)


def ideal_class_in_Gn(G: RingClassGroup, lam: QuadElem) -> int:
    """Class in G_n of the ideal (lam), lam in O_K coprime to p.

    The idele of the ideal, shifted by the global lam, has p-component
    lam^(-1); the frozen convention maps (lam) to [lam^(-1) mod p^n]."""
    if not lam.is_integral():
        raise QuathetaError("need an integral generator")
    u, v = int(lam.u), int(lam.v)
    nrm = lam.norm()
    if nrm.numerator % G.p == 0:
        raise QuathetaError("ideal must be coprime to p")
    if G.n == 0:
        return 0
    return G.inverse(G.class_of_unit(u, v))


# ---------------------------------------------------------------------------
# ideal representatives of classes


def ideal_rep_lattice(G: RingClassGroup, a: int) -> tuple[QuadElem, Lattice | None]:
    """A generator lam (canonical small norm) with [(lam)] = a in G_n.

    Returns lam in O_K, coprime to p, with lam = rep(a^(-1)) mod p^n, so that
    the ideal lam O_K cap O_n represents the class a."""
    K = G.K
    if G.n == 0:
        return K.one, None
    u, v = G.reps[G.inverse(a)]
    mod = G.mod
    t, nm = K.gen_trace, K.gen_norm
    # minimize the norm of (u + x*mod) + (v + y*mod) th over a small box around
    # the real minimizer (Babai rounding on the norm form)
    best = None
    # center: solve 2x' + t y' = -2u/mod - t v/mod etc.; just search a box
    cu, cv = -u / mod, -v / mod
    for x in range(math.floor(cu) - 2, math.ceil(cu) + 3):
        for y in range(math.floor(cv) - 2, math.ceil(cv) + 3):
            uu, vv = u + x * mod, v + y * mod
            nrm = uu * uu + t * uu * vv + nm * vv * vv
            cand = (nrm, uu, vv)
            if best is None or cand < best:
                best = cand
    _, uu, vv = best
    lam = K.elem(uu, vv)
    assert lam.norm().numerator % G.p != 0
    return lam, None


def contracted_ideal_basis(K: QuadField, lam: QuadElem, p: int, n: int):
    """Z-basis (pairs (u, v)) of lam*O_K intersect O_n inside K."""
    # generators of lam O_K: lam, lam*theta; generators of O_n: 1, p^n th
    t = K.gen_trace
    nrm_th = K.gen_norm
    l1 = (lam.u, lam.v)
    lth = (lam * K.theta).u, (lam * K.theta).v
    rows_a = [[int(l1[0]), int(l1[1])], [int(lth[0]), int(lth[1])]]
    rows_b = [[1, 0], [0, p ** n]]
    stacked = rows_a + rows_b
    h, u = hnf_transform(stacked)
    out = []
    for i, hrow in enumerate(h):
        if any(hrow):
            continue
        ua = u[i][:2]
        vec = [sum(ua[k] * rows_a[k][j] for k in range(2)) for j in range(2)]
        out.append(vec)
    if len(out) != 2:
        raise QuathetaError("ideal contraction failed")
    return hnf(out)


# ---------------------------------------------------------------------------
# the tower with its Gross points


@dataclass
class GrossPoint:
    level: int
    group_label: int
    point: Point
    cls: int | None = None
    gamma: QuatElem | None = None


class Tower:
    """All level data for one (algebra, Eichler order, p) anticyclotomic tower."""

    def __init__(
        self,
        module: BrandtModule,
        p: int,
        n_plus: int = 1,
        digits_extra: int = 6,
    ):
        order = module.order
        alg = order.alg
        K = alg.K
        if alg.n_minus % p == 0 or order.level % p == 0:
            raise QuathetaError("p must be prime to the level and discriminant")
        if K.disc % p == 0:
            raise QuathetaError("p ramified in K is not supported")
        self.module = module
        self.order = order
        self.alg = alg
        self.K = K
        self.p = p
        self.n_plus = n_plus
        self.split = K.splitting_type(p) == "split"
        self.digits_extra = digits_extra
        self._groups: dict[int, RingClassGroup] = {}
        self._away = None
        self._nplus_data = None

    # -- static data ---------------------------------------------------------
    def group(self, n: int) -> RingClassGroup:
        if n not in self._groups:
            self._groups[n] = RingClassGroup(self.K, self.p, n)
        return self._groups[n]

    def theta_root_mod(self, digits: int) -> int:
        """Hensel root of the minimal polynomial of theta at the prime above p
        fixed by the smaller-seed convention (split p only)."""
        K = self.K
        roots = sorted(
            x for x in range(self.p) if (x * x - K.gen_trace * x + K.gen_norm) % self.p == 0
        )
        return hensel_root(K.gen_trace, K.gen_norm, self.p, digits, seed=roots[0])

    def nplus_data(self):
        """Per q | N^+: (q, e, root r_q, generator of the chosen prime factor)."""
        if self._nplus_data is None:
            out = []
            for q in prime_factors(self.n_plus):
                e = 0
                m = self.n_plus
                while m % q == 0:
                    m //= q
                    e += 1
                K = self.K
                roots = sorted(
                    x for x in range(q) if (x * x - K.gen_trace * x + K.gen_norm) % q == 0
                )
                if len(roots) != 2 or K.disc % q == 0:
                    raise QuathetaError(f"{q} | N^+ must split in K")
                r_q = roots[0]
                lam = self._prime_generator(q, r_q)
                out.append((q, e, r_q, lam))
            self._nplus_data = out
        return self._nplus_data

    def _prime_generator(self, q: int, r_q: int) -> QuadElem:
        """Generator of the prime (q, theta - r_q), deterministic."""
        from .linalg import qf_solutions

        K = self.K
        t, nm = K.gen_trace, K.gen_norm
        g = [[Fraction(1), Fraction(t, 2)], [Fraction(t, 2), Fraction(nm)]]
        sols = qf_solutions(g, q)
        cands = []
        for u, v in [tuple(s) for s in sols]:
            for uu, vv in ((u, v), (-u, -v)):
                if (uu + vv * r_q) % q == 0:
                    cands.append((uu, vv))
        if not cands:
            raise QuathetaError(f"no generator of norm {q} found")
        uu, vv = min(cands)
        return K.elem(uu, vv)

    def sigma_nplus(self, n: int) -> int:
        """Class of the chosen factor of N^+ O_K in G_n."""
        G = self.group(n)
        out = G.identity()
        for q, e, r_q, lam in self.nplus_data():
            out = G.mul(out, G.power(ideal_class_in_Gn(G, lam), e))
        return out

    def away_lattice(self) -> Lattice:
        """The varsigma lattice away from p: R modified at each q | N^+."""
        if self._away is None:
            from .forms_hecke import _modify_at_prime

            L = self.order.lattice
            for q, e, r_q, lam in self.nplus_data():
                digs = 2 * e + 6
                mod = q ** digs
                r = hensel_root(self.K.gen_trace, self.K.gen_norm, q, digs, seed=r_q)
                t = self.K.gen_trace
                dinv = pow((2 * r - t) % mod, -1, mod)
                w = (
                    ((r * dinv) % mod, ((t - r) * dinv) % mod),
                    (dinv % mod, dinv % mod),
                )
                L = _modify_at_prime(L, self.order, q, w, 0, digs)
            self._away = L
        return self._away

    def varsigma_matrix(self, n: int, digits: int):
        """The p-component of varsigma^(n) as an integer matrix mod p^digits."""
        mod = self.p ** digits
        pn = self.p ** n % mod
        if self.split:
            r = self.theta_root_mod(digits)
            return ((r * pn % mod, (-1) % mod), (pn, 0))
        return ((0, 1), ((-pn) % mod, 0))

    # -- Gross points ----------------------------------------------------------
    def gross_point(self, n: int, label: int, eval_level: int | None = None) -> GrossPoint:
        """The Gross point x_m(a) for the class `label` of G_n, evaluated with
        the level-m varsigma (m = eval_level, default n).  The same ideal
        representative is used at every evaluation level, which pins the
        regularized combination exactly."""
        m = n if eval_level is None else eval_level
        G = self.group(n)
        lam, _ = ideal_rep_lattice(G, label)
        M_lat = self._ideal_times_away(lam, n)
        digits = 2 * (m + 1) + self.digits_extra
        pt = Point(
            lattice=M_lat,
            p=self.p,
            p_matrix=self.varsigma_matrix(m, digits),
            p_digits=digits,
        )
        return GrossPoint(level=m, group_label=label, point=pt)

    def _ideal_times_away(self, lam: QuadElem, n: int) -> Lattice:
        basis = contracted_ideal_basis(self.K, lam, self.p, n)
        away = self.away_lattice()
        gens = []
        for u, v in basis:
            x = self.alg.elem(self.K.elem(u, v))
            gens.extend(x * b for b in away.basis())
        return Lattice.from_elems(self.alg, gens)

    def optimality_holds(self, n: int, eval_level: int | None = None) -> bool:
        """(B cap varsigma R varsigma^(-1)) cap K == O_n, by exact lattices."""
        from .forms_hecke import full_lattice_of_point
        from .ideal_classes import left_order

        m = n if eval_level is None else eval_level
        digits = 2 * (m + 1) + self.digits_extra
        pt = Point(
            lattice=self.away_lattice(),
            p=self.p,
            p_matrix=self.varsigma_matrix(m, digits),
            p_digits=digits,
        )
        L = full_lattice_of_point(pt, self.order)
        OL = left_order(L)
        # intersect with K: combinations of the basis with zero J-part
        den = OL.den
        rows = [list(r) for r in OL.rows]
        h, u = hnf_transform([[r[2], r[3]] for r in rows])
        kbasis = []
        for i, hrow in enumerate(h):
            if any(hrow):
                continue
            vec = [sum(u[i][k] * rows[k][j] for k in range(4)) for j in range(4)]
            assert vec[2] == 0 and vec[3] == 0
            kbasis.append([vec[0], vec[1]])
        kb = hnf(kbasis)
        # O_n has basis (den, 0), (0, den * p^n) in these scaled coordinates
        target = hnf([[den, 0], [0, den * self.p ** n]])
        return kb == target
