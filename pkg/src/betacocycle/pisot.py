"""Arithmetic for Pisot-Vijayaraghavan numbers.

A PV number is a real algebraic integer beta > 1 whose remaining roots
(conjugates) all lie strictly inside the unit circle.  The module keeps two
layers of arithmetic side by side:

* exact arithmetic in Q(beta), with elements stored as rational coordinate
  vectors in the power basis (1, beta, ..., beta^{r-1}) reduced by the
  minimal polynomial; and
* floating evaluation, done only at the boundary, with a high-precision
  value of beta obtained from mpmath.

The exact layer is what makes long greedy expansions and translation
lattices drift-free.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np

from .errors import (
    InadmissibleDigits,
    NoRealRootAboveOne,
    NotPisot,
    ReduciblePolynomial,
)

_ROOT_DPS = 40


@dataclass(frozen=True)
class PisotNumber:
    """A PV number beta > 1 with its minimal polynomial and conjugate data.

    minpoly holds the descending integer coefficients of the monic minimal
    polynomial, e.g. (1, -1, -1) for x^2 - x - 1.
    """

    minpoly: tuple
    beta: float
    conjugates: tuple
    rho: float
    degree: int

    @property
    def digit_max(self):
        """Largest digit usable in greedy expansions and lattices."""
        return int(math.floor(self.beta + 1e-12))

    def beta_mp(self, dps=_ROOT_DPS):
        """High-precision value of beta as an mpmath float."""
        return _dominant_root(self.minpoly, dps)

    def to_string(self):
        return ",".join(str(c) for c in self.minpoly)

    @classmethod
    def from_string(cls, text):
        coeffs = [int(part) for part in text.split(",")]
        return make_pisot(coeffs)

    def __str__(self):
        return "PisotNumber(%s, beta=%.12g)" % (self.to_string(), self.beta)


@dataclass(frozen=True)
class BetaDigits:
    """A finite greedy digit string together with its base."""

    digits: tuple
    base: PisotNumber

    def __post_init__(self):
        top = self.base.digit_max
        for d in self.digits:
            if not 0 <= d <= top:
                raise ValueError("digit %r outside [0, %d]" % (d, top))

    def __len__(self):
        return len(self.digits)

    def value_exact(self):
        """Exact value sum_k digits[k] beta^{-k-1} as a field element."""
        return _digits_value(self.base, self.digits)

    def value(self):
        return _to_float(self.base, self.value_exact())


@dataclass(frozen=True)
class BetaInterval:
    """The interval of points whose expansion starts with a digit prefix."""

    left: float
    right: float
    level: int
    digits: BetaDigits

    @property
    def length(self):
        return self.right - self.left


# ---------------------------------------------------------------------------
# exact power-basis arithmetic


class FieldElement:
    """Element of Q(beta) as rational coordinates in the power basis."""

    __slots__ = ("base", "coords")

    def __init__(self, base, coords):
        self.base = base
        self.coords = tuple(Fraction(c) for c in coords)

    @classmethod
    def from_rational(cls, base, q):
        coords = [Fraction(q)] + [Fraction(0)] * (base.degree - 1)
        return cls(base, coords)

    def __eq__(self, other):
        return (
            isinstance(other, FieldElement)
            and self.base == other.base
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash((self.base, self.coords))

    def __add__(self, other):
        if isinstance(other, FieldElement):
            return FieldElement(
                self.base, [a + b for a, b in zip(self.coords, other.coords)]
            )
        return self + FieldElement.from_rational(self.base, other)

    def __sub__(self, other):
        if isinstance(other, FieldElement):
            return FieldElement(
                self.base, [a - b for a, b in zip(self.coords, other.coords)]
            )
        return self - FieldElement.from_rational(self.base, other)

    def scale(self, q):
        q = Fraction(q)
        return FieldElement(self.base, [q * c for c in self.coords])

    def times_beta(self):
        """Multiply by beta, reducing beta^r via the minimal polynomial."""
        r = self.base.degree
        m = self.base.minpoly  # (1, m1, ..., mr)
        c = self.coords
        top = c[r - 1]
        out = [Fraction(0)] * r
        out[0] = -top * m[r]
        for j in range(1, r):
            out[j] = c[j - 1] - top * m[r - j]
        return FieldElement(self.base, out)

    def __mul__(self, other):
        if not isinstance(other, FieldElement):
            return self.scale(other)
        acc = FieldElement.from_rational(self.base, 0)
        shifted = self
        for i, a in enumerate(other.coords):
            if a:
                acc = acc + shifted.scale(a)
            if i + 1 < len(other.coords):
                shifted = shifted.times_beta()
        return acc

    def is_rational(self):
        return all(c == 0 for c in self.coords[1:])

    def as_rational(self):
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self.coords[0]

    def evaluate_mp(self, dps=_ROOT_DPS):
        b = self.base.beta_mp(dps)
        with mp.workdps(dps):
            acc = mp.mpf(0)
            power = mp.mpf(1)
            for c in self.coords:
                if c:
                    acc += power * mp.mpf(c.numerator) / mp.mpf(c.denominator)
                power *= b
            return acc

    def floor(self):
        """Exact floor; rational fast path, mpmath otherwise."""
        if self.is_rational():
            return math.floor(self.coords[0])
        v = self.evaluate_mp(60)
        # irrational elements are never integers; the nudge guards rounding
        return int(mp.floor(v + mp.mpf("1e-45")))

    def __float__(self):
        return float(self.evaluate_mp())


def _to_float(base, elem):
    return float(elem)


@lru_cache(maxsize=None)
def _roots_cached(minpoly, dps):
    with mp.workdps(dps):
        return tuple(mp.polyroots(list(minpoly), maxsteps=200, extraprec=120))


@lru_cache(maxsize=None)
def _dominant_root(minpoly, dps):
    roots = _roots_cached(minpoly, dps)
    real = [r for r in roots if abs(mp.im(r)) < mp.mpf(10) ** (-dps + 6)]
    candidates = [mp.re(r) for r in real if mp.re(r) > 1]
    if not candidates:
        raise NoRealRootAboveOne("no real root above 1 in %s" % (minpoly,))
    return max(candidates)


@lru_cache(maxsize=None)
def _inverse_beta_coords(minpoly):
    """Coordinates of beta^{-1}: from beta^r + m1 beta^{r-1} + ... + mr = 0."""
    r = len(minpoly) - 1
    mr = minpoly[r]
    coords = [Fraction(0)] * r
    # beta^{-1} = -(beta^{r-1} + m1 beta^{r-2} + ... + m_{r-1}) / mr
    for j in range(r):
        coeff = 1 if j == r - 1 else minpoly[r - 1 - j]
        coords[j] = Fraction(-coeff, mr)
    return tuple(coords)


def _divisors(n):
    n = abs(n)
    out = set()
    for k in range(1, int(math.isqrt(n)) + 1):
        if n % k == 0:
            out.update((k, n // k, -k, -(n // k)))
    return sorted(out)


def _check_irreducible(coeffs):
    """Best-effort irreducibility test for monic integer polynomials.

    Complete for degree <= 3 (rational-root test) and degree 4
    (rational roots plus monic quadratic factorizations).
    """
    deg = len(coeffs) - 1
    if deg <= 1:
        return
    const = coeffs[-1]
    if const == 0:
        raise ReduciblePolynomial("zero constant term: x divides the polynomial")
    for k in _divisors(const):
        if _poly_eval_int(coeffs, k) == 0:
            raise ReduciblePolynomial("integer root %d found" % k)
    if deg == 4:
        a, b, c, d = coeffs[1], coeffs[2], coeffs[3], coeffs[4]
        for q in _divisors(d):
            if d % q != 0:
                continue
            s = d // q
            # (x^2+px+q)(x^2+rx+s): p+r=a, q+s+pr=b, ps+qr=c
            prod_pr = b - q - s
            for p in range(-abs(b) - abs(a) - 8, abs(b) + abs(a) + 9):
                r_ = a - p
                if p * r_ == prod_pr and p * s + q * r_ == c:
                    raise ReduciblePolynomial(
                        "quadratic factor x^2%+dx%+d found" % (p, q)
                    )


def _poly_eval_int(coeffs, x):
    acc = 0
    for c in coeffs:
        acc = acc * x + c
    return acc


# ---------------------------------------------------------------------------
# operations


def make_pisot(minpoly):
    """Build a PisotNumber from descending monic integer coefficients.

    Raises NotPisot, NoRealRootAboveOne or ReduciblePolynomial when the
    input fails the PV requirements.
    """
    coeffs = tuple(int(c) for c in minpoly)
    if len(coeffs) < 2:
        raise ValueError("polynomial must have degree >= 1")
    if coeffs[0] != 1:
        raise ValueError("polynomial must be monic")
    degree = len(coeffs) - 1
    _check_irreducible(coeffs)

    beta_hp = _dominant_root(coeffs, _ROOT_DPS)
    roots = _roots_cached(coeffs, _ROOT_DPS)
    conj = []
    with mp.workdps(_ROOT_DPS):
        for root in roots:
            if abs(root - beta_hp) < mp.mpf("1e-25"):
                continue
            conj.append(root)
        for root in conj:
            if abs(root) >= 1 - mp.mpf("1e-12"):
                raise NotPisot(
                    "conjugate of modulus %.6f >= 1" % float(abs(root))
                )
        rho = max((float(abs(r)) for r in conj), default=0.0)
    conj_f = tuple(complex(mp.re(r), mp.im(r)) for r in conj)
    return PisotNumber(
        minpoly=coeffs,
        beta=float(beta_hp),
        conjugates=conj_f,
        rho=rho,
        degree=degree,
    )


def trace_power(p, n):
    """F_n = beta^n + sum of conjugate n-th powers, by exact recurrence.

    Seeds come from Newton's identities; the linear recurrence
    F_n = a1 F_{n-1} + ... + ar F_{n-r} (a_i = -minpoly[i]) then runs in
    arbitrary-precision integers.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return p.degree  # trace of the identity
    r = p.degree
    a = [-c for c in p.minpoly[1:]]  # a1..ar
    seeds = []
    for k in range(1, r + 1):
        s = k * a[k - 1]
        for i in range(1, k):
            s += a[i - 1] * seeds[k - 1 - i]
        seeds.append(s)
    if n <= r:
        return seeds[n - 1]
    window = list(seeds)
    for _ in range(r + 1, n + 1):
        nxt = sum(a[i] * window[r - 1 - i] for i in range(r))
        window = window[1:] + [nxt]
    return window[-1]


def _greedy_digits(p, elem, n):
    digits = []
    cur = elem
    for _ in range(n):
        cur = cur.times_beta()
        d = cur.floor()
        digits.append(d)
        cur = cur - d
    return digits


def _digits_value(p, digits):
    inv = FieldElement(p, _inverse_beta_coords(p.minpoly))
    acc = FieldElement.from_rational(p, 0)
    for d in reversed(digits):
        acc = (acc + d) * inv
    return acc


def beta_expand(p, x, n):
    """Greedy (Renyi) digits of x in base beta, computed exactly.

    x may be a float or Fraction in [0, 1); the remainder is tracked as an
    exact element of Q(beta), so the digits never drift.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    frac = Fraction(x)
    if not 0 <= frac < 1:
        raise ValueError("x must lie in [0, 1)")
    elem = FieldElement.from_rational(p, frac)
    return BetaDigits(tuple(_greedy_digits(p, elem, n)), p)


def is_admissible(p, digits):
    """True when the greedy algorithm on the digits' value reproduces them."""
    digits = tuple(digits)
    if not digits:
        return True
    if any(d < 0 or d > p.digit_max for d in digits):
        return False
    value = _digits_value(p, digits)
    lo = value.floor()
    if lo < 0 or lo >= 1:
        return False
    return tuple(_greedy_digits(p, value, len(digits))) == digits


def admissible_strings(p, n):
    """All greedy-admissible digit strings of length n, in lexicographic order."""
    out = []

    def extend(prefix):
        if len(prefix) == n:
            out.append(prefix)
            return
        for e in range(p.digit_max + 1):
            cand = prefix + (e,)
            if is_admissible(p, cand):
                extend(cand)

    extend(())
    return out


def _successor(p, digits):
    """Smallest admissible string of the same length lexicographically above."""
    n = len(digits)
    for k in range(n - 1, -1, -1):
        for e in range(digits[k] + 1, p.digit_max + 1):
            cand = digits[:k] + (e,)
            if is_admissible(p, cand):
                return cand + (0,) * (n - k - 1)
    return None


def beta_interval(p, digits):
    """Interval of all x in [0,1) whose expansion starts with the digits.

    Endpoints are exact in Q(beta): the left endpoint is the digit value
    itself, the right endpoint the value of the lexicographic successor
    (or 1 for the last admissible string of the level).
    """
    if isinstance(digits, BetaDigits):
        seq = digits.digits
    else:
        seq = tuple(digits)
        digits = BetaDigits(seq, p)
    if not is_admissible(p, seq):
        raise InadmissibleDigits("digits %s are not greedy-admissible" % (seq,))
    left = float(_digits_value(p, seq))
    succ = _successor(p, seq)
    right = 1.0 if succ is None else float(_digits_value(p, succ))
    return BetaInterval(left=left, right=right, level=len(seq), digits=digits)


@lru_cache(maxsize=None)
def _beta_power_coords(minpoly, max_power):
    """Integer coordinate rows of beta^0 .. beta^max_power."""
    r = len(minpoly) - 1
    rows = np.zeros((max_power + 1, r), dtype=object)
    cur = [Fraction(1)] + [Fraction(0)] * (r - 1)
    base = PisotNumber(  # light shell: only minpoly/degree used here
        minpoly=minpoly, beta=0.0, conjugates=(), rho=0.0, degree=r
    )
    elem = FieldElement(base, cur)
    for i in range(max_power + 1):
        rows[i] = [int(c) for c in elem.coords]
        elem = elem.times_beta()
    return rows


def translation_lattice(p, m, cap=10**6, rng=None):
    """Lattice of tau = sum_i eta_i beta^i with eta_i in {0..digit_max}.

    Enumerates all digit vectors when their count is at most cap, otherwise
    samples cap of them uniformly.  Returns sorted distinct floats; gaps
    between consecutive values never exceed beta.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    top = p.digit_max
    count = (top + 1) ** (m + 1)
    powmat = _beta_power_coords(p.minpoly, m).astype(object)
    if count <= cap:
        etas = np.array(
            list(itertools.product(range(top + 1), repeat=m + 1)), dtype=object
        )
    else:
        rng = rng or np.random.default_rng(0)
        etas = rng.integers(0, top + 1, size=(cap, m + 1)).astype(object)
    coords = etas @ powmat  # exact integer coordinates of each tau
    with mp.workdps(_ROOT_DPS):
        b = p.beta_mp()
        powers = [float(b**i) for i in range(p.degree)]
    uniq = {tuple(int(c) for c in row) for row in coords}
    return sorted(
        float(sum(c * powers[i] for i, c in enumerate(row))) for row in uniq
    )


def distance_to_integers(y):
    """min over integers j of |y - j|, always in [0, 0.5]."""
    frac = y - math.floor(y)
    return min(frac, 1.0 - frac)
