"""The definite quaternion algebra B = K + K*J with J^2 = beta, Jt = conj(t)J.

Elements are pairs (a, b) of K-coordinates for a + b*J.  The fixed Z-basis of
B used by the lattice layer everywhere is (1, theta, J, theta*J).

Local splittings i_q : B_q -> M_2(Q_q) exist for every q not dividing the
ramified part; at primes where beta is a square unit they are the explicit
matrices with sqrt(beta) a Hensel lift, elsewhere an integral conjugate is
produced by solving a local norm equation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import (
    QuadElem,
    QuadField,
    QuathetaError,
    hensel_sqrt,
    is_prime,
    legendre,
    prime_factors,
    squarefree_part,
)

# ---------------------------------------------------------------------------
# Hilbert symbols


def _two_adic_unit(n: int) -> tuple[int, int]:
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    return v, n


def hilbert_symbol(a: int, b: int, q) -> int:
    """Hilbert symbol (a,b)_q; q an odd prime, 2, or the string 'inf'."""
    if a == 0 or b == 0:
        raise QuathetaError("hilbert symbol needs nonzero arguments")
    if q == "inf":
        return -1 if (a < 0 and b < 0) else 1
    if q == 2:
        alpha, u = _two_adic_unit(a)
        beta_, v = _two_adic_unit(b)
        eps = ((u - 1) // 2) * ((v - 1) // 2)
        omega_u = (u * u - 1) // 8
        omega_v = (v * v - 1) // 8
        e = eps + alpha * omega_v + beta_ * omega_u
        return -1 if e % 2 else 1
    # odd prime
    alpha, u = 0, a
    while u % q == 0:
        u //= q
        alpha += 1
    beta_, v = 0, b
    while v % q == 0:
        v //= q
        beta_ += 1
    eps_q = (q - 1) // 2
    sign = -1 if (alpha * beta_ * eps_q) % 2 else 1
    s = sign
    if beta_ % 2:
        s *= legendre(u, q)
    if alpha % 2:
        s *= legendre(v, q)
    return s


def hilbert_symbol_bruteforce(a: int, b: int, q) -> int:
    """Symbol via primitive solvability of a x^2 + b y^2 = z^2 over Z_q.

    Coefficients are reduced to squarefree parts first; the search modulus is
    then large enough for a primitive solution to certify Q_q-solvability.
    """
    if q == "inf":
        return -1 if (a < 0 and b < 0) else 1
    a = squarefree_part(a)
    b = squarefree_part(b)
    mod = q ** (6 if q == 2 else 3)
    squares: dict[int, int] = {}
    for z in range(mod):
        squares.setdefault(z * z % mod, z)
    for x in range(mod):
        ax2 = a * x * x % mod
        for y in range(mod):
            val = (ax2 + b * y * y) % mod
            if val in squares:
                z = squares[val]
                if x % q or y % q or z % q:
                    return 1
    return -1


def hilbert_ramified_set(a: int, b: int) -> tuple[frozenset[int], bool]:
    """(finite ramified primes, ramified at infinity) of the algebra (a,b)."""
    if a == 0 or b == 0:
        raise QuathetaError("need nonzero entries")
    finite = set()
    for q in sorted(set(prime_factors(2 * a * b)) | {2}):
        if hilbert_symbol(a, b, q) == -1:
            finite.add(q)
    inf = hilbert_symbol(a, b, "inf") == -1
    # product formula: an even number of ramified places
    assert (len(finite) + (1 if inf else 0)) % 2 == 0
    return frozenset(finite), inf


# ---------------------------------------------------------------------------
# beta search


def choose_beta(K: QuadField, n_minus: int, square_at=(), bound: int = 100000) -> int:
    """Smallest |beta|, beta < 0, with:
      * beta a square unit in Z_q for each q in square_at,
      * beta a unit at each q | D_K,
      * (-D_K, beta) ramified exactly at the primes of n_minus and infinity.
    """
    targets = frozenset(prime_factors(n_minus))
    sq = sorted(set(square_at))
    for m in range(1, bound + 1):
        beta = -m
        ok = True
        for q in sq:
            if q == 2:
                if beta % 2 == 0 or beta % 8 != 1:
                    ok = False
                    break
            else:
                if beta % q == 0 or legendre(beta, q) != 1:
                    ok = False
                    break
        if not ok:
            continue
        if any(beta % q == 0 for q in prime_factors(K.disc)):
            continue
        finite, inf = hilbert_ramified_set(-K.disc, beta)
        if inf and finite == targets:
            return beta
    raise QuathetaError(
        f"no beta with |beta| <= {bound} for D_K={K.disc}, N^-={n_minus}, square_at={sq}"
    )


# ---------------------------------------------------------------------------
# the algebra and its elements


@dataclass(frozen=True)
class QuatAlgebra:
    """B = K + K*J, J^2 = beta < 0, ramified exactly at n_minus and infinity."""

    K: QuadField
    beta: int
    n_minus: int

    def __post_init__(self):
        finite, inf = hilbert_ramified_set(-self.K.disc, self.beta)
        if not inf or finite != frozenset(prime_factors(self.n_minus)):
            raise QuathetaError(
                f"(-{self.K.disc}, {self.beta}) is ramified at {set(finite)}, "
                f"not at the primes of {self.n_minus}"
            )

    def elem(self, a, b=None) -> QuatElem:
        if not isinstance(a, QuadElem):
            a = self.K.elem(a)
        if b is None:
            b = self.K.zero
        elif not isinstance(b, QuadElem):
            b = self.K.elem(b)
        return QuatElem(self, a, b)

    def from_coords(self, c) -> QuatElem:
        """Element from coordinates (x0, x1, x2, x3) wrt basis (1, th, J, th*J)."""
        return QuatElem(self, self.K.elem(c[0], c[1]), self.K.elem(c[2], c[3]))

    @property
    def one(self) -> QuatElem:
        return self.elem(1)

    @property
    def J(self) -> QuatElem:
        return QuatElem(self, self.K.zero, self.K.one)

    def __repr__(self):
        return f"QuatAlgebra(D_K={self.K.disc}, beta={self.beta}, N^-={self.n_minus})"


@dataclass(frozen=True)
class QuatElem:
    alg: QuatAlgebra
    a: QuadElem
    b: QuadElem

    def coords(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a.u, self.a.v, self.b.u, self.b.v)

    def __add__(self, other):
        other = self._coerce(other)
        return QuatElem(self.alg, self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return QuatElem(self.alg, -self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def _coerce(self, other) -> QuatElem:
        if isinstance(other, QuatElem):
            return other
        if isinstance(other, QuadElem):
            return QuatElem(self.alg, other, self.alg.K.zero)
        return QuatElem(self.alg, self.alg.K.elem(other), self.alg.K.zero)

    def __mul__(self, other):
        other = self._coerce(other)
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        beta = self.alg.beta
        # (a1 + b1 J)(a2 + b2 J) = (a1 a2 + beta b1 conj(b2)) + (a1 b2 + b1 conj(a2)) J
        return QuatElem(
            self.alg,
            a1 * a2 + b1 * b2.conj() * beta,
            a1 * b2 + b1 * a2.conj(),
        )

    def __rmul__(self, other):
        return self._coerce(other) * self

    def conj(self) -> QuatElem:
        return QuatElem(self.alg, self.a.conj(), -self.b)

    def trace(self) -> Fraction:
        return self.a.trace()

    def norm(self) -> Fraction:
        return self.a.norm() - self.alg.beta * self.b.norm()

    def inverse(self) -> QuatElem:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError
        c = self.conj()
        inv = Fraction(1) / n
        return QuatElem(self.alg, c.a * inv, c.b * inv)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            inv = Fraction(1) / Fraction(other)
            return QuatElem(self.alg, self.a * inv, self.b * inv)
        return self * self._coerce(other).inverse()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, QuadElem)):
            other = self._coerce(other)
        if not isinstance(other, QuatElem):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def is_integral_coords(self) -> bool:
        return all(c.denominator == 1 for c in self.coords())

    def __repr__(self):
        return f"({self.a} + ({self.b})J)"


def reduced_trace_norm(x: QuatElem) -> tuple[Fraction, Fraction]:
    return x.trace(), x.norm()


def i_K_matrix(x: QuatElem) -> list[list[QuadElem]]:
    """The K-matrix [[a, b*beta], [conj(b), conj(a)]] of a + bJ."""
    return [
        [x.a, x.b * x.alg.beta],
        [x.b.conj(), x.a.conj()],
    ]


# ---------------------------------------------------------------------------
# local splittings


def _mat_mod(m, mod):
    return tuple(tuple(int(x) % mod for x in row) for row in m)


def mat2_mul(x, y, mod):
    return (
        (
            (x[0][0] * y[0][0] + x[0][1] * y[1][0]) % mod,
            (x[0][0] * y[0][1] + x[0][1] * y[1][1]) % mod,
        ),
        (
            (x[1][0] * y[0][0] + x[1][1] * y[1][0]) % mod,
            (x[1][0] * y[0][1] + x[1][1] * y[1][1]) % mod,
        ),
    )


def mat2_det(x, mod):
    return (x[0][0] * x[1][1] - x[0][1] * x[1][0]) % mod


def mat2_inv(x, mod):
    d = mat2_det(x, mod)
    dinv = pow(d, -1, mod)
    return (
        ((x[1][1] * dinv) % mod, (-x[0][1] * dinv) % mod),
        ((-x[1][0] * dinv) % mod, (x[0][0] * dinv) % mod),
    )


def _frac_mod(x: Fraction, mod: int) -> int:
    den = x.denominator
    return x.numerator * pow(den, -1, mod) % mod


class LocalSplitting:
    """Ring map B -> M_2(Z/q^digits) at a prime q not dividing n_minus."""

    def __init__(self, alg: QuatAlgebra, q: int, digits: int):
        if alg.n_minus % q == 0:
            raise QuathetaError(f"nonsplit prime {q}: B is ramified there")
        if not is_prime(q):
            raise QuathetaError(f"{q} is not prime")
        self.alg = alg
        self.q = q
        self.digits = digits
        self.mod = q ** digits
        K = alg.K
        t, n = K.gen_trace, K.gen_norm
        self.i_theta = ((t % self.mod, (-n) % self.mod), (1, 0))
        beta = alg.beta
        x0 = ((-1 % self.mod, t % self.mod), (0, 1))
        if self._beta_is_square():
            sq = hensel_sqrt(beta, q, digits)
            self.sqrt_beta = sq
            self.i_J = _mat_mod([[sq * r for r in row] for row in x0], self.mod)
        else:
            if q == 2 or K.disc % q == 0 or beta % q == 0:
                raise QuathetaError(
                    f"no splitting recipe at q={q} (beta nonsquare and q | 2*D_K*beta)"
                )
            self.sqrt_beta = None
            u, v = self._solve_norm_beta()
            i_s = self._lin_comb(u, v)
            self.i_J = mat2_mul(i_s, x0, self.mod)
        assert mat2_det(self.i_J, self.mod) == (-beta) % self.mod

    def _beta_is_square(self) -> bool:
        beta, q = self.alg.beta, self.q
        if q == 2:
            return beta % 2 == 1 and beta % 8 == 1
        return beta % q != 0 and legendre(beta, q) == 1

    def _lin_comb(self, u: int, v: int):
        mod = self.mod
        th = self.i_theta
        return (
            ((u + v * th[0][0]) % mod, (v * th[0][1]) % mod),
            ((v * th[1][0]) % mod, (u + v * th[1][1]) % mod),
        )

    def _solve_norm_beta(self) -> tuple[int, int]:
        """(u, v) with u^2 + t u v + n v^2 = beta in Z_q, to working precision."""
        K, q, mod = self.alg.K, self.q, self.mod
        t, n, beta = K.gen_trace, K.gen_norm, self.alg.beta

        def f(u, v, m):
            return (u * u + t * u * v + n * v * v - beta) % m

        start = None
        for u0 in range(q):
            for v0 in range(q):
                if f(u0, v0, q) == 0:
                    du = (2 * u0 + t * v0) % q
                    dv = (t * u0 + 2 * n * v0) % q
                    if du or dv:
                        start = (u0, v0, du != 0)
                        break
            if start:
                break
        if start is None:
            raise QuathetaError(f"norm equation has no smooth point mod {q}")
        u, v, newton_in_u = start
        m = q
        while m < mod:
            m = min(m * m, mod)
            if newton_in_u:
                d = (2 * u + t * v) % m
                u = (u - f(u, v, m) * pow(d, -1, m)) % m
            else:
                d = (t * u + 2 * n * v) % m
                v = (v - f(u, v, m) * pow(d, -1, m)) % m
        assert f(u, v, mod) == 0
        return u, v

    def apply(self, x: QuatElem):
        """Image of x as a 2x2 tuple mod q^digits (denominators must be q-units)."""
        mod = self.mod
        c = x.coords()
        out = [[0, 0], [0, 0]]
        mats = (
            ((1, 0), (0, 1)),
            self.i_theta,
            self.i_J,
            mat2_mul(self.i_theta, self.i_J, mod),
        )
        for coeff, m in zip(c, mats):
            if coeff == 0:
                continue
            cm = _frac_mod(coeff, mod)
            for i in range(2):
                for j in range(2):
                    out[i][j] = (out[i][j] + cm * m[i][j]) % mod
        return _mat_mod(out, mod)


def split_at(alg: QuatAlgebra, q: int, digits: int, cache: dict | None = None) -> LocalSplitting:
    if cache is not None:
        key = (q, digits)
        if key not in cache:
            cache[key] = LocalSplitting(alg, q, digits)
        return cache[key]
    return LocalSplitting(alg, q, digits)
