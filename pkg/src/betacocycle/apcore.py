"""Trigonometric polynomials and Bohr-mean diagnostics.

Uniformly almost periodic functions are represented throughout the package
as finite sums  sum_n A_n exp(i L_n x).  That makes the Bohr mean exact (the
coefficient at frequency zero) and turns sup-norm questions into grid
certificates.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TrigPolynomial:
    """Finite trigonometric polynomial sum A_n exp(i L_n x).

    terms is a tuple of (frequency, complex coefficient) pairs with pairwise
    distinct frequencies; use trig_poly() to build one with merging.
    """

    terms: tuple

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        """Evaluate at a scalar or numpy array of real arguments."""
        x = np.asarray(x, dtype=float)
        acc = np.zeros(x.shape, dtype=complex)
        for freq, coeff in self.terms:
            if freq == 0.0:
                acc += coeff
            else:
                acc += coeff * np.exp(1j * freq * x)
        if acc.shape == ():
            return complex(acc)
        return acc

    @property
    def is_one_periodic(self):
        """All frequencies are integer multiples of 2*pi."""
        return all(
            abs(f / TWO_PI - round(f / TWO_PI)) < 1e-9 for f, _ in self.terms
        )

    @property
    def is_real_valued(self):
        """Conjugate symmetry: each (L, A) pairs with (-L, conj(A))."""
        table = {f: c for f, c in self.terms}
        for f, c in self.terms:
            other = table.get(-f)
            if other is None or abs(other - c.conjugate()) > 1e-12:
                return False
        return True

    @property
    def max_frequency(self):
        return max((abs(f) for f, _ in self.terms), default=0.0)

    def sup_bound(self):
        """sum |A_n|, an upper bound for the sup norm."""
        return sum(abs(c) for _, c in self.terms)

    def shift(self, c):
        """The translated polynomial x -> f(x + c)."""
        return trig_poly(
            [(f, a * cmath.exp(1j * f * c)) for f, a in self.terms]
        )

    def __add__(self, other):
        if isinstance(other, TrigPolynomial):
            return trig_poly(list(self.terms) + list(other.terms))
        return trig_poly(list(self.terms) + [(0.0, complex(other))])

    __radd__ = __add__

    def __mul__(self, scalar):
        return trig_poly([(f, a * scalar) for f, a in self.terms])

    __rmul__ = __mul__


def trig_poly(terms):
    """Build a TrigPolynomial, merging duplicate frequencies."""
    merged = {}
    for freq, coeff in terms:
        freq = float(freq)
        merged[freq] = merged.get(freq, 0j) + complex(coeff)
    cleaned = tuple(sorted((f, c) for f, c in merged.items() if c != 0))
    if not cleaned:
        cleaned = ((0.0, 0j),)
    return TrigPolynomial(cleaned)


def constant(c):
    return trig_poly([(0.0, complex(c))])


def cosine(freq, amplitude=1.0, phase=0.0):
    """amplitude * cos(freq*x + phase) as a conjugate-symmetric pair."""
    half = amplitude / 2.0
    return trig_poly(
        [(freq, half * cmath.exp(1j * phase)), (-freq, half * cmath.exp(-1j * phase))]
    )


def sine(freq, amplitude=1.0):
    half = amplitude / 2.0
    return trig_poly([(freq, -1j * half), (-freq, 1j * half)])


def harmonic(k, coefficient=1.0):
    """coefficient * exp(2*pi*i*k*x): the 1-periodic building block."""
    return trig_poly([(TWO_PI * k, complex(coefficient))])


@dataclass(frozen=True)
class EpsilonPeriodReport:
    """Grid certificate that tau is an approximate translation number.

    epsilon_achieved is a maximum over the test grid, not a proof over all
    of R.
    """

    tau: float
    epsilon_achieved: float
    n_min: int
    grid_size: int


def evaluate(f, x):
    """Value of the trigonometric polynomial f at x."""
    return f.evaluate(x)


def bohr_mean_exact(f):
    """Bohr mean of a trigonometric polynomial: its frequency-0 coefficient."""
    for freq, coeff in f.terms:
        if freq == 0.0:
            return coeff
    return 0j


def empirical_bohr_mean(f, T, n_samples):
    """Composite-midpoint estimate of (1/T) * integral of f over [0, T].

    Works for arbitrary evaluable functions (not only trig polynomials);
    this is the estimator to iterate over a ladder of T values when only a
    limsup is guaranteed.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    xs = (np.arange(n_samples) + 0.5) * (T / n_samples)
    vals = f(xs) if _accepts_array(f) else np.array([f(x) for x in xs])
    mean = np.mean(vals)
    if np.iscomplexobj(vals) and abs(np.imag(mean)) < 1e-12:
        return float(np.real(mean))
    return mean if np.iscomplexobj(vals) else float(mean)


def empirical_bohr_sequence(f, T_ladder, n_samples):
    """Means over a ladder of horizons plus the running maximum (limsup proxy)."""
    means = [empirical_bohr_mean(f, T, n_samples) for T in T_ladder]
    running = np.maximum.accumulate([np.real(m) for m in means])
    return list(zip(T_ladder, means, running.tolist()))


def _accepts_array(f):
    if isinstance(f, TrigPolynomial):
        return True
    try:
        out = f(np.array([0.0, 0.5]))
        return np.shape(out) == (2,)
    except Exception:
        return False


def epsilon_period_check(f, tau, grid=None):
    """Max of |f(x+tau) - f(x)| over a grid; a certificate, not a proof.

    grid may be an explicit array of points or a (start, stop, num) triple.
    The default covers [0, 50] with a spacing tied to the largest frequency
    when f is a TrigPolynomial.
    """
    if grid is None:
        if isinstance(f, TrigPolynomial) and f.max_frequency > 0:
            num = max(2000, int(50 * f.max_frequency / math.pi))
        else:
            num = 5000
        xs = np.linspace(0.0, 50.0, num)
    elif isinstance(grid, tuple):
        xs = np.linspace(*grid)
    else:
        xs = np.asarray(grid, dtype=float)
    if _accepts_array(f):
        diff = np.abs(np.asarray(f(xs + tau)) - np.asarray(f(xs)))
    else:
        diff = np.array([abs(f(x + tau) - f(x)) for x in xs])
    return EpsilonPeriodReport(
        tau=float(tau),
        epsilon_achieved=float(np.max(diff)),
        n_min=0,
        grid_size=int(xs.size),
    )


def weyl_equidistribution_defect(p, x, modulus, N, max_harmonic=20):
    """Max Weyl-sum modulus over harmonics h = 1..20 for (beta^n x mod modulus).

    Small values certify approximate equidistribution of the orbit.  The
    orbit is computed exactly for integer beta (rational arithmetic) and in
    high-precision floating point otherwise; the latter caps N at 5000.
    """
    if modulus <= 0:
        raise ValueError("modulus must be positive")
    if N < 1:
        raise ValueError("N must be >= 1")
    beta = getattr(p, "beta", p)
    degree = getattr(p, "degree", 1 if float(beta).is_integer() else 0)
    fracs = np.empty(N)
    if degree == 1 and float(beta).is_integer():
        B = int(round(beta))
        cur = Fraction(x) / Fraction(modulus)
        num = cur.numerator % cur.denominator
        den = cur.denominator
        for n in range(N):
            fracs[n] = num / den
            num = (B * num) % den
    else:
        if N > 5000:
            raise ValueError("N capped at 5000 for non-integer beta")
        dps = int(N * math.log10(float(beta))) + 30
        with mp.workdps(dps):
            b = p.beta_mp(dps) if hasattr(p, "beta_mp") else mp.mpf(beta)
            q = Fraction(x) / Fraction(modulus)
            z = mp.mpf(q.numerator) / mp.mpf(q.denominator)
            for n in range(N):
                fracs[n] = float(z - mp.floor(z))
                z *= b
    worst = 0.0
    for h in range(1, max_harmonic + 1):
        s = np.abs(np.mean(np.exp(2j * math.pi * h * fracs)))
        worst = max(worst, float(s))
    return worst
