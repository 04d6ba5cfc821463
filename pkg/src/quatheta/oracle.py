"""Independent numerical/combinatorial oracles.

Exact side: eta-product q-expansions, Hecke recursions, Hurwitz class
numbers, and the Eichler-Selberg trace formula for Gamma_0(N) with trivial
character.  Analytic side (further down): smoothed approximate functional
equations for the degree-4 Rankin-Selberg L-function over K, the degree-2
twists, and the adjoint L-value feeding the Petersson norm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .exact import QuadField, QuathetaError, is_prime, legendre, prime_factors


# ---------------------------------------------------------------------------
# exact q-expansions


def eta_product_level11(limit: int) -> list[int]:
    """Coefficients a_1..a_limit of q prod (1-q^n)^2 (1-q^(11n))^2, the weight-2
    level-11 newform."""
    # dedekind eta via pentagonal number theorem
    def euler_factor(step: int, power: int, nmax: int) -> list[int]:
        # prod_{n>=1} (1 - q^(step*n))^power mod q^(nmax+1)
        base = [0] * (nmax + 1)
        base[0] = 1
        k = 1
        while True:
            g1 = step * k * (3 * k - 1) // 2
            g2 = step * k * (3 * k + 1) // 2
            if g1 > nmax and g2 > nmax:
                break
            sgn = -1 if k % 2 else 1
            if g1 <= nmax:
                base[g1] += sgn
            if g2 <= nmax:
                base[g2] += sgn
            k += 1
        out = [1] + [0] * nmax
        for _ in range(power):
            acc = [0] * (nmax + 1)
            for i, c in enumerate(out):
                if c == 0:
                    continue
                for j, d in enumerate(base):
                    if d == 0 or i + j > nmax:
                        continue
                    acc[i + j] += c * d
            out = acc
        return out

    series = euler_factor(1, 2, limit - 1)
    other = euler_factor(11, 2, limit - 1)
    prod = [0] * limit
    for i, c in enumerate(series):
        if c == 0:
            continue
        for j, d in enumerate(other):
            if d == 0 or i + j >= limit:
                continue
            prod[i + j] += c * d
    # multiply by q: a_n = prod[n-1]
    return [0] + prod[: limit - 1] + [0] * 0 if False else [0] + prod


def hecke_expand(a_p: dict[int, int], N: int, k: int, limit: int) -> list[int]:
    """a_1..a_limit from prime eigenvalues via multiplicativity and the
    Hecke recursion a_{p^(r+1)} = a_p a_{p^r} - p^(k-1) a_{p^(r-1)} (p coprime N),
    a_{p^r} = a_p^r at p | N.  Index 0 unused."""
    a = [0] * (limit + 1)
    a[1] = 1
    for n in range(2, limit + 1):
        p = min(prime_factors(n))
        r = 0
        m = n
        while m % p == 0:
            m //= p
            r += 1
        if m > 1:
            a[n] = a[m] * a[n // m]
            continue
        if p not in a_p:
            raise QuathetaError(f"missing eigenvalue at {p}")
        ap = a_p[p]
        if N % p == 0:
            a[n] = ap ** r
        else:
            if r == 1:
                a[n] = ap
            else:
                a[n] = ap * a[p ** (r - 1)] - p ** (k - 1) * a[p ** (r - 2)]
    return a


# ---------------------------------------------------------------------------
# Hurwitz class numbers and the trace formula


def class_number_form_count(D: int) -> int:
    """Number of classes of primitive reduced binary quadratic forms of
    discriminant D < 0."""
    if D >= 0 or D % 4 not in (0, 1):
        raise QuathetaError(f"bad discriminant {D}")
    n = -D
    count = 0
    b = n % 2
    while b * b <= n:
        rem = n + b * b
        if rem % 4 == 0:
            ac = rem // 4
            a = max(b, 1)
            while a * a <= ac:
                if a != 0 and ac % a == 0:
                    c = ac // a
                    if a <= c and math.gcd(math.gcd(a, b), c) == 1 and b <= a:
                        if b == 0 or a == b or a == c:
                            count += 1
                        else:
                            count += 2  # +-b
                a += 1
        b += 2
    return count


def h_weighted(D: int) -> Fraction:
    """h(D) with the weight-1/2, 1/3 conventions at D = -4, -3."""
    if D == -3:
        return Fraction(1, 3)
    if D == -4:
        return Fraction(1, 2)
    return Fraction(class_number_form_count(D))


def hurwitz_class_number(n: int) -> Fraction:
    """H(n) = sum over f^2 | n with -n/f^2 = 0,1 mod 4 of h_w(-n/f^2); H(0) = -1/12."""
    if n == 0:
        return Fraction(-1, 12)
    if n % 4 in (1, 2):
        return Fraction(0)
    total = Fraction(0)
    f = 1
    while f * f <= n:
        if n % (f * f) == 0:
            D = -(n // (f * f))
            if (-D) % 4 in (0, 3):
                total += h_weighted(D)
        f += 1
    return total


def _gegenbauer(t: int, m: int, k: int) -> int:
    """Coefficient of x^(k-2) in 1/(1 - t x + m x^2)."""
    c0, c1 = 1, t
    if k == 2:
        return c0
    for _ in range(k - 4 + 1):
        c0, c1 = c1, t * c1 - m * c0
    return c1


def _psi(N: int) -> int:
    out = N
    for q in prime_factors(N):
        out = out // q * (q + 1)
    return out


def trace_hecke(N: int, k: int, m: int) -> Fraction:
    """Tr T_m on S_k(Gamma_0(N)), trivial character; N squarefree, gcd(m,N)=1,
    k even >= 2 (Eichler-Selberg)."""
    if math.gcd(m, N) != 1:
        raise QuathetaError("gcd(m, N) must be 1")
    if k % 2 or k < 2:
        raise QuathetaError("k must be even and >= 2")
    # identity contribution
    r = math.isqrt(m)
    A1 = Fraction(k - 1, 12) * _psi(N) * m ** (k // 2 - 1) if r * r == m else Fraction(0)
    # elliptic contribution
    A2 = Fraction(0)
    t = -math.isqrt(4 * m - 1)
    for t in range(-math.isqrt(4 * m - 1), math.isqrt(4 * m - 1) + 1):
        if t * t >= 4 * m:
            continue
        D0 = t * t - 4 * m
        term = Fraction(0)
        f = 1
        while f * f <= -D0:
            if D0 % (f * f) == 0:
                D = D0 // (f * f)
                if D % 4 in (0, 1) or D % 4 in (-3, -4):
                    if (-D) % 4 in (0, 3):
                        Nf = math.gcd(N, f)
                        mod = N * Nf
                        roots = sum(
                            1 for x in range(mod) if (x * x - t * x + m) % mod == 0
                        )
                        mu = Fraction(_psi(N), _psi(N // Nf)) * roots
                        term += h_weighted(D) * mu
            f += 1
        A2 += Fraction(_gegenbauer(t, m, k)) * term
    A2 = A2 / 2
    # hyperbolic contribution
    A3 = Fraction(0)
    for d in range(1, math.isqrt(m) + 1):
        if m % d:
            continue
        dp = m // d
        # count factorizations N = ab with x = d mod a, x = dp mod b solvable
        c = 0
        for a in _divisors(N):
            b = N // a
            g = math.gcd(a, b)
            if (d - dp) % g == 0:
                c += _euler_phi(g)
        weight = Fraction(1, 2) if d == dp else Fraction(1)
        A3 += weight * d ** (k - 1) * c
    # weight-2 correction
    A4 = Fraction(0)
    if k == 2:
        A4 = sum(c for c in _divisors(m) if math.gcd(c, N) == 1)
    return A1 - A2 - A3 + A4


def _divisors(n: int) -> list[int]:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def _euler_phi(n: int) -> int:
    out = n
    for q in prime_factors(n):
        out = out // q * (q - 1)
    return out


def dim_cusp_forms(N: int, k: int) -> int:
    """dim S_k(Gamma_0(N)) as Tr T_1."""
    v = trace_hecke(N, k, 1)
    assert v.denominator == 1
    return int(v)


# ---------------------------------------------------------------------------
# newform data


@dataclass
class NewformData:
    """q-expansion data of an elliptic newform of squarefree level."""

    level: int
    weight: int
    coeffs: list[int]  # a_0 (unused) .. a_limit

    @property
    def limit(self) -> int:
        return len(self.coeffs) - 1

    def atkin_lehner_sign(self, q: int) -> int:
        """epsilon_q = -q^((2-k)/2) a_q for q || level."""
        if self.level % q:
            return 1
        aq = self.coeffs[q]
        val = -Fraction(aq) / Fraction(q) ** ((self.weight - 2) // 2)
        if val not in (1, -1):
            raise QuathetaError(f"a_{q} = {aq} is not q^((k-2)/2) * (+-1)")
        return int(val)

    def global_root_number(self) -> int:
        eps = (-1) ** (self.weight // 2)
        for q in prime_factors(self.level):
            eps *= self.atkin_lehner_sign(q)
        return eps

    def satake(self, q: int) -> tuple[complex, complex]:
        """Classical Satake parameters (alpha, beta), roots of
        X^2 - a_q X + q^(k-1) (beta = 0 at q | level)."""
        aq = self.coeffs[q]
        if self.level % q == 0:
            return complex(aq), 0j
        disc = aq * aq - 4 * q ** (self.weight - 1)
        root = complex(disc) ** 0.5
        return ((aq + root) / 2, (aq - root) / 2)
