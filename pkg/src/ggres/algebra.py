"""Exact arithmetic for resonance computations.

Scalars live in Q[sqrt(q)], matrix entries are Laurent polynomials in mu over
that field, and the normalized resonance polynomial is an ordinary polynomial
with rational coefficients in ``lam = sqrt(q) * mu``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def _isqrt_exact(q: int) -> int | None:
    r = math.isqrt(q)
    return r if r * r == q else None


class SqrtQScalar:
    """The number ``a + b*sqrt(q)`` with rational ``a`` and ``b``.

    When ``q`` is a perfect square the root is folded into ``a`` so that
    ``b`` is always zero and equality stays structural.
    """

    __slots__ = ("a", "b", "q")

    def __init__(self, a=0, b=0, q: int = 2):
        if q < 1:
            raise ValueError("q must be a positive integer")
        a, b = _frac(a), _frac(b)
        root = _isqrt_exact(q)
        if root is not None and b:
            a, b = a + b * root, Fraction(0)
        self.a, self.b, self.q = a, b, q

    @classmethod
    def sqrt_q(cls, q: int) -> "SqrtQScalar":
        return cls(0, 1, q)

    def _coerce(self, other) -> "SqrtQScalar":
        if isinstance(other, SqrtQScalar):
            if other.q != self.q:
                raise ValueError(f"mixing sqrt({self.q}) and sqrt({other.q})")
            return other
        if isinstance(other, (int, Fraction)):
            return SqrtQScalar(other, 0, self.q)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return SqrtQScalar(self.a + o.a, self.b + o.b, self.q)

    __radd__ = __add__

    def __neg__(self):
        return SqrtQScalar(-self.a, -self.b, self.q)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return SqrtQScalar(self.a - o.a, self.b - o.b, self.q)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return SqrtQScalar(self.a * o.a + self.b * o.b * self.q,
                           self.a * o.b + self.b * o.a, self.q)

    __rmul__ = __mul__

    def conjugate(self) -> "SqrtQScalar":
        return SqrtQScalar(self.a, -self.b, self.q)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.q

    def inverse(self) -> "SqrtQScalar":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q[sqrt(q)]")
        c = self.conjugate()
        return SqrtQScalar(c.a / n, c.b / n, self.q)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, SqrtQScalar):
            return (self.q, self.a, self.b) == (other.q, other.a, other.b)
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.q))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __complex__(self):
        return complex(float(self.a) + float(self.b) * math.sqrt(self.q))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.q)

    def __repr__(self):
        if not self.b:
            return f"{self.a}"
        return f"({self.a} + {self.b}*sqrt({self.q}))"


class LaurentPoly:
    """Laurent polynomial in mu with coefficients in Q[sqrt(q)].

    Stored sparsely; zero coefficients are never kept, so the empty map is
    the zero polynomial.
    """

    __slots__ = ("coeffs", "q")

    def __init__(self, coeffs: dict | None = None, q: int = 2):
        self.q = q
        clean = {}
        for e, c in (coeffs or {}).items():
            c = c if isinstance(c, SqrtQScalar) else SqrtQScalar(c, 0, q)
            if c.q != q:
                raise ValueError("coefficient field mismatch")
            if c:
                clean[int(e)] = c
        self.coeffs = clean

    @classmethod
    def const(cls, c, q: int) -> "LaurentPoly":
        return cls({0: c}, q)

    @classmethod
    def monomial(cls, c, e: int, q: int) -> "LaurentPoly":
        return cls({e: c}, q)

    @classmethod
    def mu(cls, q: int) -> "LaurentPoly":
        return cls({1: 1}, q)

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def maxdeg(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no degree")
        return max(self.coeffs)

    @property
    def mindeg(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no degree")
        return min(self.coeffs)

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.q != self.q:
                raise ValueError("ambient q mismatch")
            return other
        if isinstance(other, (int, Fraction, SqrtQScalar)):
            return LaurentPoly.const(other, self.q)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        out = dict(self.coeffs)
        for e, c in o.coeffs.items():
            out[e] = out[e] + c if e in out else c
        return LaurentPoly(out, self.q)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self.coeffs.items()}, self.q)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        out: dict[int, SqrtQScalar] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in o.coeffs.items():
                e = e1 + e2
                p = c1 * c2
                out[e] = out[e] + p if e in out else p
        return LaurentPoly(out, self.q)

    __rmul__ = __mul__

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.q, frozenset(self.coeffs.items())))

    def __call__(self, mu: complex) -> complex:
        return sum(complex(c) * mu ** e for e, c in self.coeffs.items())

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by mu**k."""
        return LaurentPoly({e + k: c for e, c in self.coeffs.items()}, self.q)

    def divmod(self, other: "LaurentPoly"):
        """Euclidean division after clearing the low powers of both operands.

        Units mu**k are invertible in the Laurent ring, so division is really
        division of the underlying ordinary polynomials.
        """
        if other.is_zero():
            raise ZeroDivisionError("division by the zero Laurent polynomial")
        if self.is_zero():
            return LaurentPoly({}, self.q), LaurentPoly({}, self.q)
        shift = self.mindeg - other.mindeg
        num = self.shift(-self.mindeg)
        den = other.shift(-other.mindeg)
        dlead_e = den.maxdeg
        dlead_inv = den.coeffs[dlead_e].inverse()
        quot: dict[int, SqrtQScalar] = {}
        rem = num
        while not rem.is_zero() and rem.maxdeg >= dlead_e:
            e = rem.maxdeg - dlead_e
            c = rem.coeffs[rem.maxdeg] * dlead_inv
            quot[e] = c
            rem = rem - den * LaurentPoly.monomial(c, e, self.q)
        return LaurentPoly(quot, self.q).shift(shift), rem.shift(self.mindeg)

    def exact_div(self, other: "LaurentPoly") -> "LaurentPoly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("Laurent division is not exact")
        return q

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*mu^{e}" for e, c in sorted(self.coeffs.items()))


# --------------------------------------------------------------------------
# determinants


def _det_cofactor(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = None
    for j in range(n):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * _det_cofactor(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        return LaurentPoly({}, m[0][0].q)
    return total


def _det_bareiss(m):
    n = len(m)
    q = m[0][0].q
    a = [list(row) for row in m]
    sign = 1
    prev = LaurentPoly.const(1, q)
    for k in range(n - 1):
        if a[k][k].is_zero():
            for i in range(k + 1, n):
                if not a[i][k].is_zero():
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return LaurentPoly({}, q)
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (pivot * a[i][j] - a[i][k] * a[k][j]).exact_div(prev)
        prev = pivot
    det = a[n - 1][n - 1]
    return det if sign > 0 else -det


def laurent_det(m: Sequence[Sequence[LaurentPoly]], method: str = "auto") -> LaurentPoly:
    """Exact determinant of a square matrix of Laurent polynomials.

    ``method`` is ``"cofactor"``, ``"bareiss"`` (fraction-free elimination)
    or ``"auto"``, which picks cofactor expansion for n <= 6.
    """
    n = len(m)
    if n == 0 or any(len(row) != n for row in m):
        raise ValueError("laurent_det needs a non-empty square matrix")
    if method == "auto":
        method = "cofactor" if n <= 6 else "bareiss"
    if method == "cofactor":
        return _det_cofactor([list(r) for r in m])
    if method == "bareiss":
        return _det_bareiss(m)
    raise ValueError(f"unknown determinant method {method!r}")


# --------------------------------------------------------------------------
# dense rational polynomials in lam


@dataclass(frozen=True)
class LambdaPoly:
    """Dense polynomial with rational coefficients, ``coeffs[i]`` multiplies lam**i."""

    coeffs: tuple

    def __post_init__(self):
        c = [_frac(x) for x in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_ints(cls, coeffs: Iterable) -> "LambdaPoly":
        return cls(tuple(Fraction(c) for c in coeffs))

    @classmethod
    def from_roots(cls, roots: Iterable) -> "LambdaPoly":
        p = cls((Fraction(1),))
        for r in roots:
            p = p * cls((-_frac(r), Fraction(1)))
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1]

    def __add__(self, other: "LambdaPoly") -> "LambdaPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return LambdaPoly(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self):
        return LambdaPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return LambdaPoly(tuple(c * other for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return LambdaPoly(())
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return LambdaPoly(tuple(out))

    __rmul__ = __mul__

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + (c if isinstance(x, Fraction) else float(c))
        return acc

    def derivative(self) -> "LambdaPoly":
        return LambdaPoly(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def divmod(self, other: "LambdaPoly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        inv = 1 / other.lead
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] * inv
            if c:
                quot[i - dq] = c
                for j, b in enumerate(other.coeffs):
                    rem[i - dq + j] -= c * b
        return LambdaPoly(tuple(quot)), LambdaPoly(tuple(rem[:dq]))

    def monic(self) -> "LambdaPoly":
        return self * (1 / self.lead)

    def primitive(self) -> "LambdaPoly":
        """Integer coefficients with content 1 and positive leading coefficient."""
        if self.is_zero():
            raise ValueError("zero polynomial has no primitive part")
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        if ints[-1] < 0:
            g = -g
        return LambdaPoly(tuple(Fraction(v // g) for v in ints))

    def strip_zero_roots(self):
        """Return ``(k, p)`` with ``self = lam**k * p`` and ``p(0) != 0``."""
        k = 0
        while k < len(self.coeffs) and self.coeffs[k] == 0:
            k += 1
        return k, LambdaPoly(self.coeffs[k:])

    def compose_square(self, scale: Fraction = Fraction(1)) -> "LambdaPoly":
        """Return ``p(scale * lam**2)``."""
        out = [Fraction(0)] * (2 * len(self.coeffs) - 1)
        for i, c in enumerate(self.coeffs):
            out[2 * i] = c * scale ** i
        return LambdaPoly(tuple(out))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def __repr__(self):
        terms = [f"{c}*lam^{i}" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(reversed(terms)) or "0"


def poly_gcd(a: LambdaPoly, b: LambdaPoly) -> LambdaPoly:
    """Monic gcd over Q (the gcd of two zero polynomials is zero).

    Remainders are replaced by their primitive integer parts at every step,
    which keeps coefficient growth in check for high-degree inputs.
    """
    if a.is_zero() and b.is_zero():
        return a
    if b.is_zero():
        return a.monic()
    if a.is_zero():
        return b.monic()
    a, b = a.primitive(), b.primitive()
    while not b.is_zero():
        r = a.divmod(b)[1]
        a, b = b, (r.primitive() if not r.is_zero() else r)
    return a.monic()


_SQF_PRIMES = (2147483629, 2147483587, 2147483579)


def _is_squarefree_mod(p: LambdaPoly) -> bool:
    """Cheap sufficient test: gcd(P, P') = 1 modulo a prime not dividing the leading coefficient."""
    ints = [int(c) for c in p.primitive().coeffs]
    for m in _SQF_PRIMES:
        if ints[-1] % m == 0:
            continue
        a = [c % m for c in ints]
        b = [(i * c) % m for i, c in enumerate(ints)][1:]
        while b and b[-1] == 0:
            b.pop()
        if not b:
            return False
        while b:
            inv = pow(b[-1], m - 2, m)
            a = a[:]
            while len(a) >= len(b):
                c = a[-1] * inv % m
                shift = len(a) - len(b)
                for i, x in enumerate(b):
                    a[shift + i] = (a[shift + i] - c * x) % m
                a.pop()
                while a and a[-1] == 0:
                    a.pop()
            a, b = b, a
        return len(a) == 1
    return False


def divides(d: LambdaPoly, p: LambdaPoly) -> bool:
    if d.is_zero():
        raise ValueError("divisor must be nonzero")
    return p.divmod(d)[1].is_zero()


def squarefree_decomposition(p: LambdaPoly) -> list[tuple[int, LambdaPoly]]:
    """Yun's algorithm: ``p = lead * prod(f_i ** i)`` with monic coprime square-free ``f_i``."""
    if p.degree < 1:
        return []
    if _is_squarefree_mod(p):
        return [(1, p.monic())]
    out = []
    a = p.monic()
    b = a.derivative()
    c = poly_gcd(a, b)
    w = a.divmod(c)[0]
    y = b.divmod(c)[0]
    z = y - w.derivative()
    i = 1
    while w.degree > 0:
        g = poly_gcd(w, z)
        if g.degree > 0:
            out.append((i, g))
        w = w.divmod(g)[0]
        y = z.divmod(g)[0]
        z = y - w.derivative()
        i += 1
    return out


# --------------------------------------------------------------------------
# from Laurent determinants to lam-polynomials


def to_lambda(p: LaurentPoly) -> tuple[int, LambdaPoly]:
    """Rewrite ``p(mu)`` as ``lam**k * P(lam)`` with ``lam = sqrt(q)*mu``.

    Every coefficient of ``mu**j`` must be a rational multiple of
    ``sqrt(q)**j``; anything else means the input did not come from the
    scaled resonance matrix and is treated as a hard fault.  ``P`` is returned
    primitive with positive leading coefficient.
    """
    if p.is_zero():
        raise ValueError("to_lambda of the zero polynomial")
    q = p.q
    root = _isqrt_exact(q)
    lam_coeffs: dict[int, Fraction] = {}
    for j, c in p.coeffs.items():
        if root is not None:
            r = c.a / Fraction(root) ** j
        elif j % 2 == 0:
            if c.b:
                raise ArithmeticError(f"residual sqrt({q}) in coefficient of mu^{j}")
            r = c.a / Fraction(q) ** (j // 2)
        else:
            if c.a:
                raise ArithmeticError(f"rational part in odd coefficient of mu^{j}")
            # b*sqrt(q) / sqrt(q)**j = b / q**((j-1)/2)
            r = c.b / Fraction(q) ** ((j - 1) // 2)
        lam_coeffs[j] = r
    lo = min(lam_coeffs)
    dense = [Fraction(0)] * (max(lam_coeffs) - lo + 1)
    for j, r in lam_coeffs.items():
        dense[j - lo] = r
    k, core = LambdaPoly(tuple(dense)).strip_zero_roots()
    return lo + k, core.primitive()


def same_up_to_unit(a: LambdaPoly, b: LambdaPoly) -> bool:
    """True when ``a`` and ``b`` differ by a nonzero rational factor."""
    if a.is_zero() or b.is_zero():
        return a.is_zero() and b.is_zero()
    return a.primitive() == b.primitive()


# --------------------------------------------------------------------------
# roots


@dataclass(frozen=True)
class PolyRoot:
    value: complex
    multiplicity: int


_MP_DPS = 50


def _float_coeffs(f: LambdaPoly) -> np.ndarray:
    big = max(abs(c) for c in f.coeffs)
    return np.array([float(c / big) for c in f.coeffs], dtype=float)


def _newton_mp(f: LambdaPoly, guesses: np.ndarray, steps: int = 40):
    """Newton-polish complex guesses on ``f`` at high precision.

    A guess counts as converged once the step is below 1e-20 relative and the
    residual is tiny against the running-error scale sum |c_i| |x|^i.
    """
    fp = f.primitive()
    with mpmath.workdps(_MP_DPS):
        coeffs = [mpmath.mpf(int(c)) for c in reversed(fp.coeffs)]
        dcoeffs = [c * (len(coeffs) - 1 - i) for i, c in enumerate(coeffs[:-1])]
        abscoeffs = [abs(c) for c in coeffs]
        step_tol = mpmath.mpf(10) ** -20
        out = []
        for g in guesses:
            x = mpmath.mpc(complex(g))
            ok = False
            for _ in range(steps):
                v = mpmath.polyval(coeffs, x)
                dv = mpmath.polyval(dcoeffs, x)
                if dv == 0:
                    break
                step = v / dv
                x -= step
                if abs(step) <= step_tol * max(1, abs(x)):
                    ok = True
                    break
            if ok:
                scale = mpmath.polyval(abscoeffs, abs(x))
                ok = abs(mpmath.polyval(coeffs, x)) <= mpmath.mpf(10) ** -30 * scale
            out.append((complex(x), ok))
    return out


def _dedupe(values, tol):
    kept: list[complex] = []
    for v in values:
        if all(abs(v - k) > tol * max(1.0, abs(k)) for k in kept):
            kept.append(v)
    return kept


def _squarefree_roots(f: LambdaPoly, tol: float, guesses=None) -> list[complex]:
    d = f.degree
    if d == 1:
        c0, c1 = f.coeffs
        return [complex(float(-c0 / c1))]
    attempts = []
    if guesses is not None and len(guesses):
        attempts.append(np.asarray(guesses, dtype=complex))
    attempts.append(np.roots(_float_coeffs(f)[::-1]))
    for cand in attempts:
        polished = [x for x, ok in _newton_mp(f, cand) if ok]
        distinct = _dedupe(polished, tol)
        if len(distinct) == d:
            return distinct
    # Durand-Kerner at raised precision as the last resort
    fp = f.primitive()
    extraprec = 100
    while True:
        try:
            with mpmath.workdps(_MP_DPS):
                rs = mpmath.polyroots([int(c) for c in reversed(fp.coeffs)],
                                      maxsteps=500, extraprec=extraprec)
            return [complex(r) for r in rs]
        except mpmath.libmp.NoConvergence:
            extraprec *= 2
            if extraprec > 5000:
                raise


def poly_roots(p: LambdaPoly, tol: float = 1e-8, guesses=None) -> list[PolyRoot]:
    """All complex roots of ``p`` with exact multiplicities.

    Multiplicities come from the square-free decomposition, so they are exact;
    each square-free factor is solved numerically (companion eigenvalues or the
    supplied ``guesses``) and Newton-polished at high precision.  Roots closer
    than ``tol * max(1, |root|)`` are merged.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if p.degree < 1:
        raise ValueError("poly_roots needs degree >= 1")
    found: list[list] = []
    for mult, factor in squarefree_decomposition(p):
        for r in _squarefree_roots(factor, tol, guesses):
            if abs(r.imag) <= 1e-14 * max(1.0, abs(r)):
                r = complex(r.real, 0.0)
            if abs(r.real) <= 1e-14 * max(1.0, abs(r)):
                r = complex(0.0, r.imag)
            for item in found:
                if abs(item[0] - r) <= tol * max(1.0, abs(r)):
                    item[1] += mult
                    break
            else:
                found.append([r, mult])
    total = sum(m for _, m in found)
    if total != p.degree:
        raise ArithmeticError(f"root multiplicities sum to {total}, expected {p.degree}")
    found.sort(key=lambda t: (round(t[0].real, 9), round(t[0].imag, 9)))
    return [PolyRoot(r, m) for r, m in found]


def eval_residual_bound(p: LambdaPoly, x: complex) -> tuple[float, float]:
    """|p(x)| next to the scale ``||p||_1 * max(1,|x|)**deg`` it is compared to."""
    val = abs(complex(p(complex(x))))
    scale = float(sum(abs(c) for c in p.coeffs)) * max(1.0, abs(x)) ** p.degree
    return val, scale


def lambda_poly_from_mu_roots(mu_factors: Sequence[Sequence[int]], q: int) -> LambdaPoly:
    """Build the lam-polynomial of a product of integer polynomials in mu.

    ``mu_factors`` lists each factor by its coefficients (low to high) in mu;
    the substitution mu = lam / sqrt(q) must leave rational coefficients,
    which holds when every factor is even or odd in mu, or q is a square.
    """
    total = LaurentPoly.const(1, q)
    inv_root = SqrtQScalar(0, Fraction(1, q), q)  # 1/sqrt(q)
    for coeffs in mu_factors:
        f = LaurentPoly({i: c for i, c in enumerate(coeffs)}, q)
        total = total * f
    # rewrite mu**j coefficients c_j as (c_j / sqrt(q)**j) * lam**j
    lam = {}
    for j, c in total.coeffs.items():
        s = c
        for _ in range(j):
            s = s * inv_root
        if s.b:
            raise ArithmeticError("factor does not descend to rational lam-coefficients")
        lam[j] = s.a
    dense = [lam.get(i, Fraction(0)) for i in range(max(lam) + 1)]
    return LambdaPoly(tuple(dense))


def all_permutations_sign(n: int):
    """Permutations of range(n) with their signs (test helper for small n)."""
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        yield perm, -1 if inv % 2 else 1
