"""Multiperiodic functional equations F(xi) = sum_j f_j(xi/beta^j) F(xi/beta^j).

The equation is reduced to a first-order vector recursion W(beta x) = M(x)W(x)
with a companion matrix M, solved by the convergent infinite product

    G(x) = lim_n M(x/beta) M(x/beta^2) ... M(x/beta^n) v,      F = G_1,

and analyzed asymptotically through the cocycle engine: F at huge arguments
beta^n x is *never* evaluated directly (catastrophic cancellation); instead
G(beta^n x) = P_n(x) G(x) is propagated with renormalized products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .apcore import TrigPolynomial
from .cocycle import (
    BetaAdaptedMatrix,
    _batched_cocycle,
    _beta_value,
    _is_integer_beta,
    beta_adapted_matrix,
    orbit_fractions,
)
from .errors import (
    NonPositiveEigenvector,
    NotPrimitive,
    NotSimpleEigenvalue,
    ZeroVector,
)
from .pisot import PisotNumber, admissible_strings, beta_interval


@dataclass(frozen=True)
class MultiperiodicEquation:
    """Determining data: coefficients f_1..f_d and the scaling base beta.

    Validated so that sum f_j(0) = 1 and every f_j(0) is real and
    nonnegative; those are exactly the conditions under which the companion
    matrix at 0 fixes the all-ones vector.
    """

    fs: tuple
    base: object
    recorded_D: object = None

    @property
    def d(self):
        return len(self.fs)

    @property
    def beta(self):
        return _beta_value(self.base)

    @property
    def coefficients_one_periodic(self):
        return all(f.is_one_periodic for f in self.fs)


def multiperiodic_equation(fs, base, recorded_D=None):
    """Build a MultiperiodicEquation, checking the conditions at zero."""
    fs = tuple(fs)
    if not fs:
        raise ValueError("need at least one determining function")
    if not all(isinstance(f, TrigPolynomial) for f in fs):
        raise ValueError("determining functions must be TrigPolynomials")
    at_zero = [f.evaluate(0.0) for f in fs]
    total = sum(at_zero)
    if abs(total - 1.0) > 1e-12:
        raise ValueError("consistency fails: sum f_j(0) = %s, expected 1" % total)
    for j, v in enumerate(at_zero, start=1):
        if abs(v.imag) > 1e-12 or v.real < -1e-12:
            raise ValueError("f_%d(0) = %s is not real nonnegative" % (j, v))
    return MultiperiodicEquation(fs=fs, base=base, recorded_D=recorded_D)


def bernoulli_convolution(p, a, b, base):
    """Equation for the Fourier transform of the (p, 1-p) Bernoulli measure.

    f_1(x) = p e^{2 pi i a x}, f_2(x) = (1-p) e^{2 pi i b x}; the recorded
    distortion constant (1+p)/(1-p) is the closed-form max-norm value of
    sup ||M|| ||M^-1||.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    from .apcore import harmonic

    return multiperiodic_equation(
        [harmonic(int(a), p), harmonic(int(b), 1.0 - p)],
        base,
        recorded_D=(1.0 + p) / (1.0 - p),
    )


def companion_matrix(eq):
    """Companion matrix of the equation as a BetaAdaptedMatrix.

    The natural first row is (f_1(x), f_2(x/beta), ..., f_d(x/beta^{d-1}))
    with scale exponents 0, -1, ..., -(d-1); a single global substitution
    y = x / beta^{d-1} turns those into d-1, d-2, ..., 0, all nonnegative,
    which is what the product engine requires.
    """
    d = eq.d
    rows = [[(eq.fs[j], d - 1 - j) for j in range(d)]]
    for i in range(1, d):
        rows.append([1.0 if j == i - 1 else 0.0 for j in range(d)])
    return beta_adapted_matrix(
        rows, eq.base, allow_nonperiodic=not eq.coefficients_one_periodic
    )


def check_simple_eigenvalue(eq):
    """(is_simple, derivative) for the eigenvalue 1 of the companion at 0.

    The characteristic polynomial P of M(0) has P(1) = 0 by consistency and
    P'(1) = sum_j j f_j(0); the eigenvalue is simple iff that derivative is
    positive.
    """
    derivative = sum(
        j * eq.fs[j - 1].evaluate(0.0).real for j in range(1, eq.d + 1)
    )
    return derivative > 1e-12, float(derivative)


def _companion_eval_batch(eq, xs):
    """M(x) for an array of x: first row f_j(x/beta^{j-1}), subdiagonal 1."""
    xs = np.asarray(xs, dtype=float)
    d = eq.d
    beta = eq.beta
    out = np.zeros((xs.size, d, d), dtype=complex)
    for j in range(d):
        out[:, 0, j] = np.atleast_1d(eq.fs[j].evaluate(xs / beta**j))
    for i in range(1, d):
        out[:, i, i - 1] = 1.0
    return out


class SolutionEvaluator:
    """Evaluates G (and F = G_1) via the truncated infinite product.

    The truncation depth is chosen per x from the Cauchy tail bound
    C' |x| beta^{-n} / (beta - 1) < tol, with C' measured on [-1, 1] and
    inflated by 2x.  Scalar G values are cached.
    """

    def __init__(self, eq, tol=1e-10):
        self.eq = eq
        self.tol = float(tol)
        self.v = np.ones(eq.d, dtype=complex)
        self._check_eigenvector()
        self.c_prime = self._measure_c_prime()
        self._cache = {}

    def _check_eigenvector(self):
        M0 = _companion_eval_batch(self.eq, np.array([0.0]))[0]
        if np.max(np.abs(M0 @ self.v - self.v)) > 1e-9:
            # perturbed inputs: fall back to power iteration toward the
            # eigenvalue-1 eigenvector
            w = np.ones(self.eq.d)
            for _ in range(500):
                w = M0.real @ w
                s = np.abs(w).sum()
                if s == 0:
                    break
                w /= s
            if np.max(np.abs(M0 @ w - w)) > 1e-8:
                raise NotSimpleEigenvalue(
                    "companion matrix at 0 has no stable eigenvalue-1 direction"
                )
            if np.min(w.real) <= 0:
                raise NonPositiveEigenvector(
                    "eigenvalue-1 eigenvector is not strictly positive"
                )
            self.v = w.astype(complex) * (self.eq.d / np.abs(w).sum())

    def _measure_c_prime(self):
        """sup of ||Q_n v - Q_{n-1} v|| beta^n / |x| over x in [-1,1], small n."""
        xs = np.linspace(-1.0, 1.0, 41)
        xs = xs[np.abs(xs) > 1e-9]
        beta = self.eq.beta
        worst = 0.0
        prev = np.broadcast_to(self.v, (xs.size, self.eq.d)).copy()
        acc = np.broadcast_to(np.eye(self.eq.d, dtype=complex), (xs.size, self.eq.d, self.eq.d)).copy()
        for n in range(1, 13):
            acc = acc @ _companion_eval_batch(self.eq, xs / beta**n)
            cur = acc @ self.v
            diff = np.abs(cur - prev).sum(axis=1)
            worst = max(worst, float(np.max(diff * beta**n / np.abs(xs))))
            prev = cur
        return max(worst * 2.0, 1e-6)

    def depth(self, x):
        """Truncation depth making the product tail smaller than tol at x."""
        beta = self.eq.beta
        t = self.c_prime * abs(float(x)) / (self.tol * (1.0 - 1.0 / beta))
        if t <= 1.0:
            return 1
        return int(math.ceil(math.log(t) / math.log(beta))) + 2

    def G_batch(self, xs):
        """G at an array of points, shape (len(xs), d)."""
        xs = np.asarray(xs, dtype=float)
        n = max(self.depth(x) for x in np.atleast_1d(xs))
        beta = self.eq.beta
        w = np.broadcast_to(self.v, (xs.size, self.eq.d)).copy()
        for k in range(n, 0, -1):
            w = np.einsum("sij,sj->si", _companion_eval_batch(self.eq, xs / beta**k), w)
        return w

    def G(self, x):
        x = float(x)
        if x == 0.0:
            return self.v.copy()
        if x not in self._cache:
            self._cache[x] = self.G_batch(np.array([x]))[0]
        return self._cache[x].copy()

    def F(self, x):
        """First component of G; accepts a scalar or an array."""
        if np.ndim(x) == 0:
            return self.G(x)[0]
        return self.G_batch(np.asarray(x, dtype=float))[:, 0]

    def residual(self, x):
        """|F(x) - sum_j f_j(x/beta^j) F(x/beta^j)|, the defining equation."""
        beta = self.eq.beta
        rhs = sum(
            f.evaluate(x / beta**j) * self.F(x / beta**j)
            for j, f in enumerate(self.fs_pairs(), start=1)
        )
        return abs(self.F(x) - rhs)

    def fs_pairs(self):
        return self.eq.fs


def solve(eq, tol=1e-10):
    """Solution evaluator for the equation, normalized so F(0) = 1."""
    is_simple, derivative = check_simple_eigenvalue(eq)
    if not is_simple:
        raise NotSimpleEigenvalue(
            "P'(1) = %.3g is not positive; eigenvalue 1 is not simple" % derivative
        )
    return SolutionEvaluator(eq, tol=tol)


def asymptotic_exponent(eq, x, n_max, solution=None):
    """h_n = (1/n) log |G(beta^n x)| for n = 1..n_max, plus the estimate.

    Uses the identity G(beta^n x) = P_n(x) G(x): the cocycle product acts on
    the solved G(x) with per-step renormalization (L1 vector norm), so no
    huge argument is ever formed.  Returns (h sequence, h_{n_max}).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    sol = solution if solution is not None else solve(eq)
    g = sol.G(float(x) if not isinstance(x, Fraction) else x)
    norm = float(np.abs(g).sum())
    if norm <= 1e-14:
        raise ZeroVector("G(x) vanishes at x = %s; rate undefined" % (x,))
    d = eq.d
    M = companion_matrix(eq)
    # argument table: column m holds beta^(m+1-d) x, so the companion entry
    # with scale d-j at step k reads beta^(k+1-j) x as required
    L = n_max + d - 1
    if eq.coefficients_one_periodic:
        args = orbit_fractions(eq.base, x, L, shift=1 - d)[None, :]
    else:
        args = (float(x) * eq.beta ** (np.arange(L) + 1.0 - d))[None, :]
    w = g / norm
    logs = math.log(norm)
    h = np.empty(n_max)
    for k in range(n_max):
        A = M.eval_args(args, k)[0]
        w = A @ w
        s = float(np.abs(w).sum())
        if s == 0.0 or not math.isfinite(s):
            raise ZeroVector("propagated G vanished at step %d" % (k + 1))
        w /= s
        logs += math.log(s)
        h[k] = logs / (k + 1)
    return h, float(h[-1])


def theoremB_gate(eq, grid=4096):
    """True iff every f_j is grid-identically zero or strictly positive,
    and the base carries Pisot structure."""
    if not isinstance(eq.base, PisotNumber):
        return False
    xs = np.linspace(0.0, 1.0, grid, endpoint=False)
    for f in eq.fs:
        vals = np.atleast_1d(f.evaluate(xs))
        if np.max(np.abs(vals)) < 1e-12:
            continue
        if np.max(np.abs(vals.imag)) > 1e-12 or np.min(vals.real) <= 0.0:
            return False
    return True


def theoremC_gate(eq, grid=20000):
    """(holds, sup_value) for the contraction quotient

        (1 + |f_1(x)| + ... + |f_{d-1}(x/beta^{d-2})|)
        * (|f_1(x)| + ... + |f_d(x/beta^{d-1})|) / |f_d(x/beta^{d-1})|

    holds iff the grid supremum is below 1/rho.  A denominator dipping
    below 1e-12 reports (False, inf) rather than raising.
    """
    if not isinstance(eq.base, PisotNumber):
        raise ValueError("the gate needs a PisotNumber base with rho of record")
    beta = eq.beta
    d = eq.d
    span = 4.0 * max(1.0, beta ** (d - 1))
    xs = np.linspace(0.0, span, grid, endpoint=False)
    mods = [
        np.abs(np.atleast_1d(eq.fs[j].evaluate(xs / beta**j))) for j in range(d)
    ]
    denom = mods[-1]
    if np.min(denom) < 1e-12:
        return False, math.inf
    quotient = (1.0 + sum(mods[:-1])) * sum(mods) / denom
    sup_value = float(np.max(quotient))
    return sup_value < 1.0 / eq.base.rho, sup_value


def _logsumexp(values):
    m = float(np.max(values))
    return m + math.log(float(np.sum(np.exp(values - m))))


def _beta_quadrature(base, level, max_nodes=600000):
    """Gauss-Legendre nodes/weights aligned to the beta-intervals of a level.

    8 points per interval; weights sum to 1 (the intervals partition [0,1)).
    """
    gl_x, gl_w = np.polynomial.legendre.leggauss(8)
    beta = _beta_value(base)
    if _is_integer_beta(base):
        B = int(round(beta))
        cap = int(math.log(max_nodes / 8) / math.log(B))
        level = min(level, cap)
        edges = np.arange(B**level + 1) / B**level
    else:
        level = min(level, 12)
        strings = admissible_strings(base, level)
        ivals = [beta_interval(base, s) for s in strings]
        edges = np.array([iv.left for iv in ivals] + [1.0])
    lefts, rights = edges[:-1], edges[1:]
    mid = (lefts + rights) / 2.0
    half = (rights - lefts) / 2.0
    nodes = (mid[:, None] + half[:, None] * gl_x[None, :]).ravel()
    weights = (half[:, None] * gl_w[None, :]).ravel()
    return nodes, weights


def moment_growth(M, q, n_max, max_nodes=600000):
    """z_n = log of the n-th moment integral of the cocycle, n = 1..n_max.

    Z_n = int_0^1 ||P_n(x)||^q dx, computed with quadrature aligned to the
    beta-intervals of the deepest level (the integrand oscillates exactly at
    that scale) and log-domain accumulation.  Returns (z sequence, rate
    dict) with the Fekete-style min of z_n/n and the last difference.
    """
    if q < 0:
        raise ValueError("q must be >= 0")
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    nodes, weights = _beta_quadrature(M.base, n_max, max_nodes)
    powers = M.beta ** np.arange(n_max + M.max_scale + 1)
    args = nodes[:, None] * powers[None, :]
    res = _batched_cocycle(M, 1, args, range(1, n_max + 1))
    log_w = np.log(weights)
    zs = np.array([_logsumexp(q * res[n] + log_w) for n in range(1, n_max + 1)])
    rate = {
        "fekete": float(min(zs[n - 1] / n for n in range(1, n_max + 1))),
        "last_diff": float(zs[-1] - zs[-2]),
    }
    return zs, rate


def _pattern_matrix(eq, grid=2048):
    """0/1 companion pattern: which f_j are not identically zero."""
    xs = np.linspace(0.0, 1.0, grid, endpoint=False)
    d = eq.d
    pattern = np.zeros((d, d), dtype=int)
    for j in range(d):
        vals = np.atleast_1d(eq.fs[j].evaluate(xs))
        pattern[0, j] = 1 if np.max(np.abs(vals)) > 1e-12 else 0
    for i in range(1, d):
        pattern[i, i - 1] = 1
    return pattern


def _is_primitive(pattern):
    d = pattern.shape[0]
    power = np.eye(d, dtype=int)
    for _ in range(d * d):
        power = np.minimum(power @ pattern, 1)
        if np.all(power > 0):
            return True
    return False


def moment_integral_F(eq, q, n_ladder, solution=None, nodes=64):
    """(1/log T) int_0^T |F|^q dx along the subsequence T = beta^n.

    The block over [beta^k, beta^(k+1)] is integrated in the substituted
    variable u in [1, beta] with F(beta^k u) propagated through the cocycle
    identity W(beta^(k+1) u) = M(beta^k u) W(beta^k u), never by direct
    evaluation.  Returns (rows, diagnostics); each row is (n, T, value).
    """
    if q < 0:
        raise ValueError("q must be >= 0")
    pattern = _pattern_matrix(eq)
    if not _is_primitive(pattern):
        raise NotPrimitive("companion pattern matrix has no positive power")
    sol = solution if solution is not None else solve(eq)
    beta = eq.beta
    n_ladder = sorted(set(int(n) for n in n_ladder))
    n_max = n_ladder[-1]

    gl_x, gl_w = np.polynomial.legendre.leggauss(nodes)
    # unit block [0, 1]
    u0 = 0.5 + 0.5 * gl_x
    w0 = 0.5 * gl_w
    total = float(np.sum(w0 * np.abs(sol.F(u0)) ** q))
    # propagated blocks [beta^k, beta^(k+1)], u in [1, beta]
    mid, half = (1.0 + beta) / 2.0, (beta - 1.0) / 2.0
    u = mid + half * gl_x
    wu = half * gl_w
    W = sol.G_batch(u)
    rows = []
    values = []
    for k in range(n_max):
        total += beta**k * float(np.sum(wu * np.abs(W[:, 0]) ** q))
        n = k + 1
        if n in n_ladder:
            value = total / (n * math.log(beta))
            rows.append((n, beta**n, value))
            values.append(value)
        if k + 1 < n_max:
            W = np.einsum(
                "sij,sj->si", _companion_eval_batch(eq, beta**k * u), W
            )
    diagnostics = {"stabilized": False, "last_rel_change": math.inf}
    if len(values) >= 2 and values[-1] != 0:
        rel = abs(values[-1] - values[-2]) / abs(values[-1])
        diagnostics = {"stabilized": rel < 0.05, "last_rel_change": rel}
    return rows, diagnostics
