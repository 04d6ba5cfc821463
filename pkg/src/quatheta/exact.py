"""Exact arithmetic: imaginary quadratic fields, p-power cyclotomics, truncated p-adics.

All types here are immutable value objects over `fractions.Fraction`; nothing
in this module ever touches floating point except the `embed_complex` helpers,
which produce mpmath values at a requested precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath


class QuathetaError(Exception):
    pass


def to_mpf(x) -> mpmath.mpf:
    """Fraction/int -> mpf at the current working precision."""
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


class PrecisionExhausted(QuathetaError):
    """Raised when a p-adic computation cannot be decided at the working precision."""


# ---------------------------------------------------------------------------
# integer helpers


def squarefree_part(n: int) -> int:
    if n == 0:
        return 0
    sign = -1 if n < 0 else 1
    n = abs(n)
    out = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            if e % 2:
                out *= d
        d += 1
    return sign * out * n


def prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    # deterministic Miller-Rabin for 64-bit range, fine far beyond desk scale
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def isqrt_exact(n: int) -> int:
    """Integer square root, raising if n is not a perfect square."""
    r = math.isqrt(n)
    if r * r != n:
        raise ValueError(f"{n} is not a perfect square")
    return r


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p) for odd prime p."""
    a %= p
    if a == 0:
        return 0
    t = pow(a, (p - 1) // 2, p)
    return 1 if t == 1 else -1


def is_fundamental_neg_disc(d_k: int) -> bool:
    """Whether -d_k (d_k > 0) is a fundamental imaginary quadratic discriminant."""
    if d_k <= 0:
        return False
    d = -d_k
    if d % 4 == 1:
        return squarefree_part(d) == d
    if d % 4 == 0:
        m = d // 4
        return squarefree_part(m) == m and (m % 4 in (2, 3))
    return False


def hensel_sqrt(a: int, p: int, digits: int) -> int:
    """Square root of a in Z_p mod p^digits, seeded at the smaller nonnegative root mod p.

    Requires p odd and a a unit square mod p.
    """
    if p == 2:
        if a % 8 != 1:
            raise ValueError("no 2-adic square root")
        # lift mod 2^digits; roots mod 8 of x^2 = a are +-1, +-3; seed 1
        x = 1
        mod = 8
        while mod < 2 ** digits:
            mod *= 2
            # x^2 = a mod (2*mod') lifting: adjust top bit
            if (x * x - a) % mod != 0:
                x += mod // 4
        return x % (2 ** digits)
    if legendre(a, p) != 1:
        raise ValueError(f"{a} is not a square mod {p}")
    # seed: smaller nonnegative square root mod p
    r = min(x for x in range(p) if (x * x - a) % p == 0)
    mod = p
    target = p ** digits
    while mod < target:
        mod = min(mod * mod, target)
        # Newton step x -> x - (x^2-a)/(2x)
        inv = pow(2 * r % mod, -1, mod)
        r = (r - (r * r - a) * inv) % mod
    return r % target


def hensel_root(t: int, n: int, p: int, digits: int, seed: int | None = None) -> int:
    """Root of x^2 - t*x + n in Z_p mod p^digits via Newton, p odd.

    The polynomial must have a simple root mod p. If `seed` is None the
    smaller nonnegative simple root mod p is lifted.
    """
    if seed is None:
        roots = [x for x in range(p) if (x * x - t * x + n) % p == 0 and (2 * x - t) % p != 0]
        if not roots:
            raise ValueError(f"x^2-{t}x+{n} has no simple root mod {p}")
        seed = min(roots)
    r = seed
    mod = p
    target = p ** digits
    while mod < target:
        mod = min(mod * mod, target)
        f = (r * r - t * r + n) % mod
        df = (2 * r - t) % mod
        r = (r - f * pow(df, -1, mod)) % mod
    return r % target


def hensel_unit_root(t: int, n: int, p: int, digits: int) -> int:
    """The p-adic unit root of x^2 - t*x + n, when ord_p(n) > 0 and p does not
    divide t (the ordinary case: the unit root is = t mod p)."""
    if t % p == 0:
        raise ValueError("no unit root: polynomial is not ordinary at p")
    return hensel_root(t, n, p, digits, seed=t % p)


def crt(residues: list[int], moduli: list[int]) -> int:
    x, m = 0, 1
    for r, mod in zip(residues, moduli):
        g = math.gcd(m, mod)
        if g != 1:
            if (x - r) % g:
                raise ValueError("inconsistent congruences")
            # not needed at desk scale; keep simple coprime CRT
            raise ValueError("moduli must be coprime")
        t = ((r - x) * pow(m, -1, mod)) % mod
        x += m * t
        m *= mod
    return x % m


# ---------------------------------------------------------------------------
# quadratic fields


@dataclass(frozen=True)
class QuadField:
    """Q[x]/(x^2 - gen_trace*x + gen_norm), generator written `theta`.

    For an imaginary quadratic field of discriminant -disc this is built by
    `make_quad_field`, with theta = (D' + sqrt(-disc))/2.  The same class also
    serves as the splitting ring of a Hecke polynomial (see `hecke_field`),
    where `disc`/`d_prime` are absent.
    """

    gen_trace: int
    gen_norm: int
    disc: int | None = None          # positive D_K when imaginary quadratic
    d_prime: int | None = None
    tag: str = "K"

    def __repr__(self):
        if self.disc is not None:
            return f"QuadField(-{self.disc})"
        return f"QuadField({self.tag}: x^2-{self.gen_trace}x+{self.gen_norm})"

    # elements -------------------------------------------------------------
    def elem(self, u, v=0) -> QuadElem:
        return QuadElem(self, Fraction(u), Fraction(v))

    @property
    def zero(self) -> QuadElem:
        return self.elem(0)

    @property
    def one(self) -> QuadElem:
        return self.elem(1)

    @property
    def theta(self) -> QuadElem:
        return self.elem(0, 1)

    def delta(self) -> QuadElem:
        """sqrt(-disc) = 2*theta - D' for imaginary quadratic fields."""
        if self.d_prime is None:
            raise QuathetaError("delta only defined for imaginary quadratic fields")
        return self.elem(-self.d_prime, 2)

    def unit_group(self) -> list[QuadElem]:
        """Roots of unity in the maximal order (imaginary quadratic only)."""
        if self.disc == 4:
            i = self.theta - 1          # theta = 1 + i
            return [self.one, i, -self.one, -i]
        if self.disc == 3:
            w = self.theta               # primitive 6th root of unity
            us = [self.one]
            for _ in range(5):
                us.append(us[-1] * w)
            return us
        return [self.one, -self.one]

    @property
    def u_k(self) -> int:
        return len(self.unit_group()) // 2

    def splitting_type(self, q: int) -> str:
        """'split', 'inert' or 'ramified' for a rational prime q."""
        if self.disc is None:
            raise QuathetaError("splitting_type needs an imaginary quadratic field")
        d = -self.disc
        if q == 2:
            if d % 4 == 0 or d % 8 == 0:
                pass
            if self.disc % 2 == 0:
                return "ramified"
            return "split" if d % 8 == 1 else "inert"
        if self.disc % q == 0:
            return "ramified"
        return "split" if legendre(d % q, q) == 1 else "inert"


def make_quad_field(d_k: int) -> QuadField:
    """Imaginary quadratic field of discriminant -d_k with its canonical generator."""
    if not is_fundamental_neg_disc(d_k):
        raise QuathetaError(f"-{d_k} is not a fundamental discriminant")
    d_prime = d_k if d_k % 2 else d_k // 2
    # theta = (D' + delta)/2, so trace D', norm (D'^2 + D_K)/4
    num = d_prime * d_prime + d_k
    assert num % 4 == 0
    return QuadField(gen_trace=d_prime, gen_norm=num // 4, disc=d_k, d_prime=d_prime)


def hecke_field(a_p: int, p: int, k: int) -> QuadField:
    """Splitting ring Q[X]/(X^2 - a_p X + p^(k-1)) of a Hecke polynomial."""
    return QuadField(gen_trace=a_p, gen_norm=p ** (k - 1), tag=f"Hecke({a_p},{p},{k})")


@dataclass(frozen=True)
class QuadElem:
    """u + v*theta with exact rational coordinates."""

    field: QuadField
    u: Fraction
    v: Fraction

    def _new(self, u, v) -> QuadElem:
        return QuadElem(self.field, Fraction(u), Fraction(v))

    def __add__(self, other):
        other = self._coerce(other)
        return self._new(self.u + other.u, self.v + other.v)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.u, -self.v)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def _coerce(self, other) -> QuadElem:
        if isinstance(other, QuadElem):
            if other.field is not self.field and other.field != self.field:
                raise QuathetaError("mixed quadratic fields")
            return other
        return self._new(Fraction(other), 0)

    def __mul__(self, other):
        other = self._coerce(other)
        t, n = self.field.gen_trace, self.field.gen_norm
        # (u1 + v1 th)(u2 + v2 th), th^2 = t*th - n
        u = self.u * other.u - n * self.v * other.v
        v = self.u * other.v + self.v * other.u + t * self.v * other.v
        return self._new(u, v)

    __rmul__ = __mul__

    def conj(self) -> QuadElem:
        return self._new(self.u + self.field.gen_trace * self.v, -self.v)

    def trace(self) -> Fraction:
        return 2 * self.u + self.field.gen_trace * self.v

    def norm(self) -> Fraction:
        t, n = self.field.gen_trace, self.field.gen_norm
        return self.u * self.u + t * self.u * self.v + n * self.v * self.v

    def inverse(self) -> QuadElem:
        nm = self.norm()
        if nm == 0:
            raise ZeroDivisionError("inverting zero / zero divisor")
        c = self.conj()
        return self._new(c.u / nm, c.v / nm)

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = self.field.one
        b = self
        while e:
            if e & 1:
                out = out * b
            b = b * b
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.v == 0 and self.u == other
        if not isinstance(other, QuadElem):
            return NotImplemented
        return self.field == other.field and self.u == other.u and self.v == other.v

    def __hash__(self):
        return hash((self.u, self.v, self.field.gen_trace, self.field.gen_norm))

    def is_rational(self) -> bool:
        return self.v == 0

    def is_integral(self) -> bool:
        return self.u.denominator == 1 and self.v.denominator == 1

    def __repr__(self):
        if self.v == 0:
            return f"{self.u}"
        return f"({self.u}+{self.v}*th)"

    def embed(self, bits: int = 53, conjugate: bool = False) -> mpmath.mpc:
        """Image under the fixed complex embedding theta -> (t + i*sqrt(4n-t^2))/2."""
        f = self.field
        with mpmath.workprec(bits):
            disc = 4 * f.gen_norm - f.gen_trace ** 2
            if disc < 0:
                raise QuathetaError("embed expects a definite (imaginary) quadratic ring")
            root = mpmath.sqrt(disc)
            if conjugate:
                root = -root
            th = (mpmath.mpf(f.gen_trace) + mpmath.mpc(0, 1) * root) / 2
            return to_mpf(self.u) + to_mpf(self.v) * th


# ---------------------------------------------------------------------------
# p-power cyclotomics


@lru_cache(maxsize=None)
def _phi_pr(p: int, r: int) -> int:
    return 1 if r == 0 else (p - 1) * p ** (r - 1)


class CycloNum:
    """Element of Q(zeta_{p^r}) in the power basis, eagerly conductor-lowered.

    Coefficients live in a base ring: `Fraction` by default, but any ring with
    +, -, * and == works (theta evaluation uses quadratic-field coefficients).
    Conductor 1 elements are plain base scalars with r = 0.
    """

    __slots__ = ("p", "r", "coeffs")

    def __init__(self, p: int, r: int, coeffs, normalize: bool = True):
        self.p = p
        self.r = r
        coeffs = list(coeffs)
        if normalize:
            p_, r_, coeffs = _cyclo_normalize(p, r, coeffs)
            self.r = r_
        self.coeffs = tuple(coeffs)

    # construction helpers
    @staticmethod
    def zeta(p: int, r: int, power: int = 1, base_one=Fraction(1)) -> CycloNum:
        """zeta_{p^r}^power."""
        if r == 0:
            return CycloNum(p, 0, [base_one])
        n = p ** r
        power %= n
        vec = [base_one * 0] * n
        vec[power] = base_one
        return CycloNum(p, r, vec)

    @staticmethod
    def from_scalar(x, p: int = 2) -> CycloNum:
        return CycloNum(p, 0, [x])

    def _lift_to(self, r2: int) -> list:
        """Coefficient vector of self in exponent space Z[x]/(x^{p^r2}-1)."""
        zero = self.coeffs[0] * 0
        n2 = self.p ** r2
        vec = [zero] * n2
        step = self.p ** (r2 - self.r)
        for j, c in enumerate(self.coeffs):
            vec[j * step % n2] = vec[j * step % n2] + c
        return vec

    def _binop(self, other, f):
        if not isinstance(other, CycloNum):
            other = CycloNum(self.p, 0, [self._scalar(other)])
        if other.p != self.p and other.r > 0 and self.r > 0:
            raise QuathetaError("mixed cyclotomic primes")
        p = self.p if self.r > 0 or other.r == 0 else other.p
        r = max(self.r, other.r)
        a = CycloNum(p, self.r, self.coeffs, normalize=False)._lift_to(r)
        b = CycloNum(p, other.r, other.coeffs, normalize=False)._lift_to(r)
        return CycloNum(p, r, f(a, b))

    def _scalar(self, x):
        return self.coeffs[0] * 0 + x

    def __add__(self, other):
        return self._binop(other, lambda a, b: [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return CycloNum(self.p, self.r, [-c for c in self.coeffs], normalize=False)

    def __sub__(self, other):
        if not isinstance(other, CycloNum):
            other = CycloNum(self.p, 0, [self._scalar(other)])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, CycloNum):
            c = self._scalar(other)
            return CycloNum(self.p, self.r, [x * c for x in self.coeffs], normalize=False)

        def conv(a, b):
            n = len(a)
            zero = a[0] * 0
            out = [zero] * n
            for i, x in enumerate(a):
                if x == zero:
                    continue
                for j, y in enumerate(b):
                    if y == zero:
                        continue
                    k = i + j
                    if k >= n:
                        k -= n
                    out[k] = out[k] + x * y
            return out

        return self._binop(other, conv)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, CycloNum):
            if self.r > 0:
                return False
            return self.coeffs[0] == self._scalar(other)
        if self.r != other.r:
            return False
        if self.r > 0 and self.p != other.p:
            return False
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p if self.r else 0, self.r, self.coeffs))

    def __repr__(self):
        if self.r == 0:
            return f"Cyclo({self.coeffs[0]})"
        terms = [f"{c}*z{self.p}^{self.r}[{j}]" for j, c in enumerate(self.coeffs) if c != self.coeffs[0] * 0]
        return "Cyclo(" + (" + ".join(terms) or "0") + ")"

    def is_zero(self) -> bool:
        zero = self.coeffs[0] * 0
        return all(c == zero for c in self.coeffs)

    def __pow__(self, e: int) -> CycloNum:
        if e < 0:
            raise QuathetaError("negative cyclotomic powers unsupported")
        out = CycloNum(self.p, 0, [self._scalar(1)])
        b = self
        while e:
            if e & 1:
                out = out * b
            b = b * b
            e >>= 1
        return out

    def galois(self, a: int) -> CycloNum:
        """Action of sigma_a: zeta -> zeta^a, a coprime to p."""
        if self.r == 0:
            return self
        n = self.p ** self.r
        if math.gcd(a, self.p) != 1:
            raise QuathetaError("galois exponent must be coprime to p")
        zero = self.coeffs[0] * 0
        vec = [zero] * n
        for j, c in enumerate(self.coeffs):
            vec[(j * a) % n] = vec[(j * a) % n] + c
        return CycloNum(self.p, self.r, vec)

    def conj(self) -> CycloNum:
        return self.galois(-1 % (self.p ** self.r)) if self.r else self

    def norm(self) -> Fraction:
        """Field norm to Q (Fraction coefficients only)."""
        if self.r == 0:
            c = self.coeffs[0]
            if not isinstance(c, Fraction):
                raise QuathetaError("norm needs rational coefficients")
            return c
        from .linalg import frac_det
        phi = _phi_pr(self.p, self.r)
        cols = []
        for j in range(phi):
            prod = self * CycloNum.zeta(self.p, self.r, j)
            vec = prod._lift_to(self.r) if prod.r < self.r else list(prod.coeffs)
            if prod.r < self.r:
                vec = CycloNum(self.p, prod.r, prod.coeffs, normalize=False)._lift_to(self.r)
                _, _, vec = _cyclo_reduce_only(self.p, self.r, vec)
            else:
                vec = list(prod.coeffs) + [Fraction(0)] * (phi - len(prod.coeffs))
            cols.append([Fraction(c) for c in vec])
        mat = [[cols[j][i] for j in range(phi)] for i in range(phi)]
        return frac_det(mat)

    def p_valuation(self) -> Fraction:
        """ord_p at the unique prime above p, normalized by ord_p(p) = 1."""
        if self.is_zero():
            raise QuathetaError("zero has infinite valuation")
        if self.r == 0:
            c = self.coeffs[0]
            num, den = c.numerator, c.denominator
            v = 0
            while num % self.p == 0:
                num //= self.p
                v += 1
            while den % self.p == 0:
                den //= self.p
                v -= 1
            return Fraction(v)
        nm = self.norm()
        phi = _phi_pr(self.p, self.r)
        num, den = nm.numerator, nm.denominator
        v = 0
        while num % self.p == 0:
            num //= self.p
            v += 1
        while den % self.p == 0:
            den //= self.p
            v -= 1
        return Fraction(v, phi)

    def embed(self, bits: int = 53, conj_exponent: int = 1, base_embed=None) -> mpmath.mpc:
        """Complex image with zeta_{p^r} -> exp(2 pi i conj_exponent / p^r)."""
        with mpmath.workprec(bits):
            if self.r == 0:
                c = self.coeffs[0]
                return base_embed(c) if base_embed else mpmath.mpc(to_mpf(c))
            n = self.p ** self.r
            z = mpmath.e ** (2j * mpmath.pi * conj_exponent / n)
            out = mpmath.mpc(0)
            for j, c in enumerate(self.coeffs):
                cv = base_embed(c) if base_embed else mpmath.mpc(to_mpf(c))
                out += cv * z ** j
            return out


def _cyclo_reduce_only(p: int, r: int, vec: list):
    """Reduce an exponent-space vector (length p^r) mod Phi_{p^r}; no lowering."""
    if r == 0:
        return p, 0, vec[:1]
    n = p ** r
    phi = _phi_pr(p, r)
    step = p ** (r - 1)
    zero = vec[0] * 0
    for e in range(n - 1, phi - 1, -1):
        c = vec[e]
        if c == zero:
            continue
        vec[e] = zero
        base = e - phi
        for i in range(p - 1):
            idx = base + i * step
            vec[idx] = vec[idx] - c
    return p, r, vec[:phi]


def _cyclo_normalize(p: int, r: int, vec: list):
    """Full normal form: reduce mod Phi and lower the conductor eagerly."""
    if r == 0:
        return p, 0, vec[:1]
    n = p ** r
    if len(vec) < n:
        vec = list(vec) + [vec[0] * 0] * (n - len(vec))
    p, r, vec = _cyclo_reduce_only(p, r, vec)
    zero = vec[0] * 0 if vec else Fraction(0)
    while r > 0:
        phi = _phi_pr(p, r)
        vec = vec[:phi]
        if any(vec[j] != zero for j in range(len(vec)) if j % p):
            break
        # supported on p-divisible exponents: descend to conductor p^{r-1}
        r -= 1
        nxt = [zero] * (p ** r)
        for j in range(0, len(vec), p):
            nxt[j // p] = vec[j]
        if r > 0:
            p, r, nxt = _cyclo_reduce_only(p, r, nxt)
        vec = nxt
    if r == 0:
        vec = vec[:1]
    return p, r, vec


def cyclo_normalize(x: CycloNum) -> CycloNum:
    """Canonical representative (identity: normalization is eager on construction)."""
    return CycloNum(x.p, x.r, x._lift_to(x.r) if x.r else x.coeffs)


# ---------------------------------------------------------------------------
# truncated p-adics


class PadicNum:
    """p^val * unit, with the unit carried mod p^prec.

    `val` is usually an int; Fraction valuations appear only as markers when a
    value is lifted from a ramified cyclotomic layer.  A value whose unit part
    is zero mod p^prec represents "0 up to O(p^(val+prec))" and remembers only
    that bound.
    """

    __slots__ = ("p", "prec", "val", "unit")

    def __init__(self, p: int, prec: int, unit: int, val=0):
        self.p = p
        self.prec = prec
        unit %= p ** prec
        # renormalize so unit is a unit or zero
        while unit and unit % p == 0:
            unit //= p
            val += 1
            prec -= 1
            unit %= p ** prec if prec > 0 else 1
            if prec <= 0:
                raise PrecisionExhausted(f"value indistinguishable from 0 at p={p}")
        self.unit = unit
        self.val = val
        self.prec = prec

    @staticmethod
    def from_rational(x: Fraction, p: int, prec: int) -> PadicNum:
        x = Fraction(x)
        if x == 0:
            return PadicNum(p, prec, 0, 0)
        num, den, v = x.numerator, x.denominator, 0
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        mod = p ** prec
        return PadicNum(p, prec, num * pow(den, -1, mod) % mod, v)

    def is_zero(self) -> bool:
        return self.unit == 0

    @property
    def valuation(self):
        if self.is_zero():
            return None
        return self.val

    def __mul__(self, other):
        other = self._coerce(other)
        prec = min(self.prec, other.prec)
        mod = self.p ** prec
        return PadicNum(self.p, prec, (self.unit * other.unit) % mod, self.val + other.val)

    __rmul__ = __mul__

    def _coerce(self, other) -> PadicNum:
        if isinstance(other, PadicNum):
            if other.p != self.p:
                raise QuathetaError("mixed primes")
            return other
        return PadicNum.from_rational(Fraction(other), self.p, self.prec)

    def __add__(self, other):
        other = self._coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        v = min(self.val, other.val)
        # absolute precision of each term: val + prec; result known mod p^(min abs prec)
        abs_prec = min(self.val + self.prec, other.val + other.prec)
        prec = abs_prec - v
        if prec <= 0:
            raise PrecisionExhausted("additive cancellation below working precision")
        mod = self.p ** prec
        a = self.unit * self.p ** (self.val - v) % mod
        b = other.unit * self.p ** (other.val - v) % mod
        s = (a + b) % mod
        if s == 0:
            return PadicNum(self.p, prec, 0, v)  # zero to available precision
        return PadicNum(self.p, prec, s, v)

    __radd__ = __add__

    def __neg__(self):
        return PadicNum(self.p, self.prec, -self.unit % self.p ** self.prec, self.val)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def inverse(self) -> PadicNum:
        if self.is_zero():
            raise ZeroDivisionError
        mod = self.p ** self.prec
        return PadicNum(self.p, self.prec, pow(self.unit, -1, mod), -self.val)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = PadicNum(self.p, self.prec, 1, 0)
        b = self
        while e:
            if e & 1:
                out = out * b
            b = b * b
            e >>= 1
        return out

    def residue(self, digits: int) -> int:
        """Value mod p^digits (requires val >= 0 and enough precision)."""
        if self.is_zero():
            return 0
        if self.val < 0:
            raise QuathetaError("negative valuation has no residue")
        if self.val + self.prec < digits:
            raise PrecisionExhausted(f"need {digits} digits, have {self.val + self.prec}")
        return self.unit * self.p ** self.val % self.p ** digits

    def congruent(self, other, digits: int) -> bool:
        d = self - self._coerce(other)
        return d.is_zero() or d.val >= digits

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except (QuathetaError, TypeError, ValueError):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.congruent(other, min(self.val + self.prec, other.val + other.prec))

    def __repr__(self):
        if self.is_zero():
            return f"O({self.p}^{self.val + self.prec})"
        return f"{self.unit}*{self.p}^{self.val} + O({self.p}^{self.val + self.prec})"
