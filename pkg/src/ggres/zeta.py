"""Point counts and zeta numerators of curves over finite fields.

Only genus 0 (the projective line) and genus 1 (smooth Weierstrass cubics)
are supported.  F_{p^r} is built as F_p[t]/(m) with m the first monic
irreducible of degree r in the order described at ``first_irreducible``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .algebra import LambdaPoly, divides, poly_roots

MAX_FIELD = 10 ** 6


class CurveError(ValueError):
    pass


# --------------------------------------------------------------------------
# finite fields


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    """Reduce a (low to high) modulo the monic m over F_p."""
    a = [x % p for x in a]
    r = len(m) - 1
    for i in range(len(a) - 1, r - 1, -1):
        c = a[i]
        if c:
            for j in range(r + 1):
                a[i - r + j] = (a[i - r + j] - c * m[j]) % p
    a = a[:r] + [0] * max(0, r - len(a))
    return a


def _is_irreducible(m: list[int], p: int) -> bool:
    """Brute force: no monic factor of degree 1..deg/2."""
    r = len(m) - 1
    for d in range(1, r // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            f = list(tail) + [1]
            if not any(_poly_mod(m, f, p)[:d]):
                return False
    return True


def first_irreducible(p: int, r: int) -> list[int]:
    """First monic irreducible of degree r over F_p, low to high.

    Candidates t^r + c_{r-1} t^{r-1} + ... + c_0 are ordered by the digit
    string (c_{r-1}, ..., c_0) read as a base-p number, smallest first.
    """
    if r == 1:
        return [0, 1]
    for k in range(p ** r):
        digits = [(k // p ** i) % p for i in range(r)]  # c_0 .. c_{r-1}
        m = digits + [1]
        if _is_irreducible(m, p):
            return m
    raise CurveError(f"no irreducible polynomial of degree {r} over F_{p}")


class GF:
    """F_{p^r} with elements encoded as integers 0..p^r-1 (base-p digits = coefficients)."""

    def __init__(self, p: int, r: int, modulus: list[int] | None = None):
        self.p, self.r = p, r
        self.modulus = first_irreducible(p, r) if modulus is None else list(modulus)
        if len(self.modulus) != r + 1 or self.modulus[-1] != 1:
            raise CurveError("modulus must be monic of degree r")
        if r > 1 and not _is_irreducible(self.modulus, p):
            raise CurveError(f"modulus {self.modulus} is reducible over F_{p}")
        self.size = p ** r
        self._vec = [self._to_vec(i) for i in range(self.size)] if self.size <= 4096 else None

    def _to_vec(self, a: int) -> list[int]:
        return [(a // self.p ** i) % self.p for i in range(self.r)]

    def vec(self, a: int) -> list[int]:
        return self._vec[a] if self._vec is not None else self._to_vec(a)

    def enc(self, v: list[int]) -> int:
        out = 0
        for c in reversed(v):
            out = out * self.p + c % self.p
        return out

    def const(self, c: int) -> int:
        return c % self.p

    def add(self, a: int, b: int) -> int:
        return self.enc([x + y for x, y in zip(self.vec(a), self.vec(b))])

    def neg(self, a: int) -> int:
        return self.enc([-x for x in self.vec(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.r == 1:
            return a * b % self.p
        va, vb = self.vec(a), self.vec(b)
        prod = [0] * (2 * self.r - 1)
        for i, x in enumerate(va):
            if x:
                for j, y in enumerate(vb):
                    prod[i + j] += x * y
        return self.enc(_poly_mod(prod, self.modulus, self.p))

    def pow(self, a: int, e: int) -> int:
        out, base = 1, a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.pow(a, self.size - 2)

    def trace(self, a: int) -> int:
        """Absolute trace to F_p: a + a^p + ... + a^(p^(r-1))."""
        t, x = 0, a
        for _ in range(self.r):
            t = self.add(t, x)
            x = self.pow(x, self.p)
        return t


# --------------------------------------------------------------------------
# curves


@dataclass(frozen=True)
class CurveSpec:
    p: int
    kind: str
    a: tuple = (0, 0, 0, 0, 0)  # a1, a3, a2, a4, a6

    def __post_init__(self):
        if self.p < 2 or any(self.p % d == 0 for d in range(2, int(self.p ** 0.5) + 1)):
            raise CurveError(f"p = {self.p} is not prime")
        if self.kind not in ("weierstrass", "projective_line"):
            raise CurveError(f"unknown curve kind {self.kind!r}")
        object.__setattr__(self, "a", tuple(int(x) % self.p for x in self.a)
                           if self.kind == "weierstrass" else ())
        if self.kind == "weierstrass":
            if len(self.a) != 5:
                raise CurveError("weierstrass curves need [a1, a3, a2, a4, a6]")
            if discriminant(self) % self.p == 0:
                raise CurveError("singular curve (discriminant vanishes)")

    @property
    def genus(self) -> int:
        return 0 if self.kind == "projective_line" else 1


def discriminant(c: CurveSpec) -> int:
    a1, a3, a2, a4, a6 = c.a
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


def load_curve(document) -> CurveSpec:
    if isinstance(document, Path):
        document = document.read_text()
    if isinstance(document, str):
        document = json.loads(document)
    allowed = {"p", "kind", "a"}
    extra = set(document) - allowed
    if extra:
        raise CurveError(f"unknown keys {sorted(extra)}")
    if "p" not in document or "kind" not in document:
        raise CurveError("curve document needs 'p' and 'kind'")
    return CurveSpec(int(document["p"]), document["kind"], tuple(document.get("a", ())))


def _rhs_terms(F: GF, c: CurveSpec, x: int):
    a1, a3, a2, a4, a6 = (F.const(v) for v in c.a)
    b = F.add(F.mul(a1, x), a3)
    x2 = F.mul(x, x)
    rhs = F.add(F.add(F.mul(x2, x), F.mul(a2, x2)), F.add(F.mul(a4, x), a6))
    return b, rhs


def _homogeneous(F: GF, c: CurveSpec, x: int, y: int, z: int) -> int:
    """Y^2 Z + a1 XYZ + a3 Y Z^2 - X^3 - a2 X^2 Z - a4 X Z^2 - a6 Z^3."""
    a1, a3, a2, a4, a6 = (F.const(v) for v in c.a)
    m = F.mul
    lhs = F.add(F.add(m(m(y, y), z), m(a1, m(m(x, y), z))), m(a3, m(y, m(z, z))))
    rhs = F.add(F.add(m(x, m(x, x)), m(a2, m(m(x, x), z))),
                F.add(m(a4, m(x, m(z, z))), m(a6, m(z, m(z, z)))))
    return F.sub(lhs, rhs)


def _points_at_infinity(F: GF, c: CurveSpec) -> int:
    """Projective solutions with Z = 0, over the representatives (1:y:0) and (0:1:0)."""
    count = sum(1 for y in range(F.size) if _homogeneous(F, c, 1, y, 0) == 0)
    return count + (_homogeneous(F, c, 0, 1, 0) == 0)


def count_points(curve: CurveSpec, r: int = 1, modulus: list[int] | None = None) -> int:
    """Number of projective points over F_{p^r}.

    Each x contributes the number of roots of y^2 + b y - c: for odd p this
    is 1 + chi(b^2 + 4c); in characteristic 2 it is 1 when b = 0 and
    2 or 0 by the trace of c / b^2 otherwise.
    """
    if r < 1:
        raise CurveError("r must be >= 1")
    if curve.p ** r > MAX_FIELD:
        raise CurveError(f"field of size {curve.p}^{r} exceeds the brute-force limit {MAX_FIELD}")
    if curve.kind == "projective_line":
        return curve.p ** r + 1
    F = GF(curve.p, r, modulus)
    half = (F.size - 1) // 2
    total = 0
    for x in range(F.size):
        b, c = _rhs_terms(F, curve, x)
        if curve.p == 2:
            if b == 0:
                total += 1
            else:
                u = F.mul(c, F.inv(F.mul(b, b)))
                total += 2 if F.trace(u) == 0 else 0
        else:
            disc = F.add(F.mul(b, b), F.mul(F.const(4), c))
            if disc == 0:
                total += 1
            else:
                total += 2 if F.pow(disc, half) == 1 else 0
    return total + _points_at_infinity(F, curve)


def count_points_bruteforce(curve: CurveSpec, r: int = 1, modulus: list[int] | None = None) -> int:
    """Enumerate every affine pair (x, y); used as an independent check on small fields."""
    if curve.kind == "projective_line":
        return curve.p ** r + 1
    F = GF(curve.p, r, modulus)
    if F.size ** 2 > MAX_FIELD:
        raise CurveError("field too large for pair enumeration")
    total = 0
    for x in range(F.size):
        b, c = _rhs_terms(F, curve, x)
        for y in range(F.size):
            if F.add(F.mul(y, y), F.mul(b, y)) == c:
                total += 1
    return total + _points_at_infinity(F, curve)


# --------------------------------------------------------------------------
# zeta numerator


@dataclass(frozen=True)
class ZetaNumerator:
    coeffs: tuple  # integers, low to high in T
    genus: int
    q: int

    @property
    def poly(self) -> LambdaPoly:
        return LambdaPoly.from_ints(self.coeffs)

    def roots(self) -> list[complex]:
        if self.genus == 0:
            return []
        return [r.value for r in poly_roots(self.poly) for _ in range(r.multiplicity)]

    def rh_holds(self, tol: float = 1e-8) -> bool:
        target = self.q ** -0.5
        return all(abs(abs(r) / target - 1) <= tol for r in self.roots())

    def functional_equation_holds(self) -> bool:
        """P(T) = q^g T^(2g) P(1/(qT)), compared coefficientwise."""
        g, q = self.genus, self.q
        c = list(self.coeffs) + [0] * (2 * g + 1 - len(self.coeffs))
        mirrored = [Fraction(q ** g) * Fraction(c[2 * g - i], q ** (2 * g - i)) for i in range(2 * g + 1)]
        return all(Fraction(c[i]) == mirrored[i] for i in range(2 * g + 1))

    def predicted_count(self, r: int) -> int:
        """N_r = q^r + 1 - sum of r-th powers of the reciprocal roots (Newton's identities)."""
        if self.genus == 0:
            return self.q ** r + 1
        # reciprocal roots alpha satisfy alpha + alpha' = a, alpha alpha' = q
        a = -self.coeffs[1]
        s = [2, a]
        for k in range(2, r + 1):
            s.append(a * s[k - 1] - self.q * s[k - 2])
        return self.q ** r + 1 - s[r]

    def __str__(self):
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            mon = "" if i == 0 else ("T" if i == 1 else f"T^{i}")
            coef = str(c) if (i == 0 or abs(c) != 1) else ("-" if c < 0 else "")
            terms.append(f"{coef}{mon}")
        return " + ".join(terms).replace("+ -", "- ") or "0"


def zeta_numerator(curve: CurveSpec) -> ZetaNumerator:
    q = curve.p
    if curve.genus == 0:
        return ZetaNumerator((1,), 0, q)
    n1 = count_points(curve, 1)
    a = q + 1 - n1
    z = ZetaNumerator((1, -a, q), 1, q)
    if not z.rh_holds():
        raise CurveError(f"roots of {z} violate |T| = q^(-1/2); point count is wrong")
    if not z.functional_equation_holds():
        raise CurveError(f"{z} fails the functional equation")
    return z


# --------------------------------------------------------------------------
# link to resonances


@dataclass(frozen=True)
class LinkResult:
    divides: bool
    cofactor: LambdaPoly | None
    cofactor_mu_roots: tuple
    reason: str = ""


def check_resonance_link(g, curve: CurveSpec) -> LinkResult:
    """Test whether P(mu^2), written in lam = sqrt(q) mu, divides the resonance polynomial."""
    from .engine import resonance_polynomial

    if g.q != curve.p:
        return LinkResult(False, None, (), f"graph has q = {g.q} but the curve is over F_{curve.p}")
    z = zeta_numerator(curve)
    target = z.poly.compose_square(Fraction(1, g.q))
    _, res = resonance_polynomial(g)
    if target.degree > res.degree or not divides(target, res):
        return LinkResult(False, None, (), "no exact division")
    cof = res.divmod(target)[0].primitive()
    roots = ()
    if cof.degree >= 1:
        sq = np.sqrt(g.q)
        roots = tuple((r.value / sq, r.multiplicity) for r in poly_roots(cof))
    return LinkResult(True, cof, roots)
