"""Renormalized matrix cocycles over the orbit x, beta*x, beta^2*x, ...

The central objects are beta-adapted matrix functions M (entries are
1-periodic trigonometric polynomials evaluated at beta^l * x) and their
ordered products

    P_n(x) = M(beta^{n-1} x) ... M(beta x) M(x).

Products are stored as (accumulated log norm, unit-norm matrix) so that
nothing overflows.  Arguments beta^k x are reduced modulo 1 *exactly*
(integer beta) or in high-precision floating point (general beta) before
any 1-periodic entry is evaluated; plain float powers of beta would lose
the orbit after ~50 steps.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np

from .apcore import TrigPolynomial, constant, trig_poly
from .errors import (
    CertificateViolated,
    DegenerateSVD,
    NegativeEntries,
    NoCertificate,
    NonFinite,
    NonMonotoneSums,
    SingularFactor,
    UnboundedD,
)
from .pisot import PisotNumber, translation_lattice


def _beta_value(base):
    return base.beta if isinstance(base, PisotNumber) else float(base)


def _is_integer_beta(base):
    b = _beta_value(base)
    return abs(b - round(b)) < 1e-12


def orbit_fractions(base, x, length, shift=0):
    """Fractional parts of beta^(k+shift) x for k = 0..length-1.

    Exact modular arithmetic when beta is an integer (x is converted to a
    Fraction), high-precision floating point otherwise, with the working
    precision scaled to beta^length.  A negative shift starts the orbit a
    few division steps before x, which companion-matrix cocycles need.
    """
    beta = _beta_value(base)
    out = np.empty(length)
    if length == 0:
        return out
    if _is_integer_beta(base):
        B = int(round(beta))
        q = Fraction(x) * Fraction(B) ** shift
        num, den = q.numerator % q.denominator, q.denominator
        for k in range(length):
            out[k] = num / den
            num = (B * num) % den
        return out
    dps = int((length + abs(shift)) * math.log10(beta)) + 30
    with mp.workdps(dps):
        if isinstance(base, PisotNumber):
            b = base.beta_mp(dps)
        else:
            b = mp.mpf(beta)
        if isinstance(x, Fraction):
            z = mp.mpf(x.numerator) / mp.mpf(x.denominator)
        else:
            z = mp.mpf(x)
        z *= b**shift
        for k in range(length):
            out[k] = float(z - mp.floor(z))
            z *= b
    return out


# ---------------------------------------------------------------------------
# beta-adapted matrices


@dataclass(frozen=True)
class BetaAdaptedMatrix:
    """d x d matrix function with entries h(beta^l x), h 1-periodic.

    entries[i][j] is a (TrigPolynomial, scale_exponent) pair.  Scale
    exponents must be >= 0; matrices arising with negative exponents (such
    as raw companion matrices) have to be rescaled by the caller first.
    """

    dim: int
    entries: tuple
    base: object
    holder_alpha: float = 1.0
    positivity_delta: object = None

    @property
    def beta(self):
        return _beta_value(self.base)

    @property
    def max_scale(self):
        return max(s for row in self.entries for _, s in row)

    @property
    def is_constant(self):
        return all(
            poly.max_frequency == 0.0 for row in self.entries for poly, _ in row
        )

    @property
    def entries_one_periodic(self):
        return all(poly.is_one_periodic for row in self.entries for poly, _ in row)

    def evaluate(self, x):
        """M(x) as a complex matrix, arguments beta^l x taken directly."""
        beta = self.beta
        out = np.empty((self.dim, self.dim), dtype=complex)
        for i, row in enumerate(self.entries):
            for j, (poly, scale) in enumerate(row):
                out[i, j] = poly.evaluate((beta**scale) * x)
        return out

    def evaluate_batch(self, xs):
        xs = np.asarray(xs, dtype=float)
        beta = self.beta
        out = np.empty((xs.size, self.dim, self.dim), dtype=complex)
        for i, row in enumerate(self.entries):
            for j, (poly, scale) in enumerate(row):
                out[:, i, j] = poly.evaluate((beta**scale) * xs)
        return out

    def eval_args(self, args, k):
        """Batched M at step k from an argument table.

        args[s, m] holds beta^m x_s (modulo 1 is fine: entries are
        1-periodic).  Entry (i, j) at step k reads column k + scale_ij.
        """
        out = np.empty((args.shape[0], self.dim, self.dim), dtype=complex)
        for i, row in enumerate(self.entries):
            for j, (poly, scale) in enumerate(row):
                out[:, i, j] = poly.evaluate(args[:, k + scale])
        return out


def beta_adapted_matrix(
    entries, base, holder_alpha=1.0, positivity_delta=None, allow_nonperiodic=False
):
    """Validate and freeze a BetaAdaptedMatrix.

    entries: nested sequence (d rows of d items), each item either a
    (TrigPolynomial, scale) pair, a TrigPolynomial (scale 0), or a plain
    number (constant entry).  Non-1-periodic entries are only admitted with
    allow_nonperiodic=True; products then evaluate arguments beta^k x
    directly, which limits usable n to the float range.
    """
    rows = []
    for row in entries:
        packed = []
        for item in row:
            if isinstance(item, TrigPolynomial):
                poly, scale = item, 0
            elif isinstance(item, tuple) and isinstance(item[0], TrigPolynomial):
                poly, scale = item
            else:
                poly, scale = constant(item), 0
            if scale < 0:
                raise ValueError(
                    "negative scale exponent %d: rescale the argument so all "
                    "exponents are >= 0 before building the matrix" % scale
                )
            if not (allow_nonperiodic or poly.is_one_periodic):
                raise ValueError(
                    "entry polynomial is not 1-periodic; frequencies must be "
                    "integer multiples of 2*pi (or pass allow_nonperiodic=True)"
                )
            packed.append((poly, int(scale)))
        rows.append(tuple(packed))
    dim = len(rows)
    if any(len(r) != dim for r in rows):
        raise ValueError("entries must form a square grid")
    M = BetaAdaptedMatrix(
        dim=dim,
        entries=tuple(rows),
        base=base,
        holder_alpha=float(holder_alpha),
        positivity_delta=positivity_delta,
    )
    if positivity_delta is not None:
        _check_positivity(M, float(positivity_delta))
    return M


def constant_matrix(A, base):
    A = np.asarray(A, dtype=complex)
    return beta_adapted_matrix(
        [[A[i, j] for j in range(A.shape[1])] for i in range(A.shape[0])], base
    )


def scalar_matrix(poly, base, scale=0):
    return beta_adapted_matrix([[(poly, scale)]], base)


def _check_positivity(M, delta, grid=10000):
    xs = np.linspace(0.0, 1.0, grid, endpoint=False)
    for i, row in enumerate(M.entries):
        for j, (poly, _) in enumerate(row):
            vals = np.atleast_1d(poly.evaluate(xs))
            if np.max(np.abs(vals)) < 1e-12:
                continue
            if np.max(np.abs(vals.imag)) > 1e-12 or np.min(vals.real) < delta:
                raise ValueError(
                    "entry (%d,%d) is neither identically zero nor real and "
                    ">= delta=%g on the test grid" % (i, j, delta)
                )


# ---------------------------------------------------------------------------
# products


@dataclass(frozen=True)
class NormalizedProduct:
    """P_n(x) stored as exp(log_norm) * unit_matrix with ||unit_matrix|| = 1."""

    log_norm: float
    unit_matrix: np.ndarray
    n: int

    def apply_log(self, v):
        """log of the Euclidean norm of P_n(x) v."""
        return self.log_norm + math.log(np.linalg.norm(self.unit_matrix @ v))


def _op_norm(A):
    return np.linalg.norm(A, 2)


def _argument_table(M, x, n):
    """Arguments beta^m x for one point, m = 0..n-1+max_scale.

    Reduced modulo 1 (exactly or in high precision) when every entry is
    1-periodic; raw powers otherwise.
    """
    L = n + M.max_scale + 1
    if M.is_constant:
        return np.zeros((1, L))
    if M.entries_one_periodic:
        return orbit_fractions(M.base, x, L)[None, :]
    return float(x) * (M.beta ** np.arange(L))[None, :]


def product(M, x, n):
    """Renormalized ordered product P_n(x) = M(beta^{n-1}x) ... M(x).

    x may be a float or a Fraction; Fractions with non-dyadic denominators
    are what long products at integer beta need (a float is a dyadic
    rational whose doubling orbit dies after ~52 steps).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    acc = np.eye(M.dim, dtype=complex)
    if n == 0:
        return NormalizedProduct(0.0, acc, 0)
    args = _argument_table(M, x, n)
    logn = 0.0
    for k in range(n):
        A = M.eval_args(args, k)[0]
        if not np.all(np.isfinite(A)):
            raise NonFinite("factor at step %d is not finite" % k)
        if _op_norm(A) == 0.0:
            raise SingularFactor("factor at step %d has zero norm" % k)
        acc = A @ acc
        s = _op_norm(acc)
        if s == 0.0 or not math.isfinite(s):
            raise SingularFactor("product norm degenerate at step %d" % k)
        acc /= s
        logn += math.log(s)
    return NormalizedProduct(logn, acc, n)


def exterior_power(A, q):
    """Matrix of all q x q minors, multi-indices in lexicographic order.

    Accepts a single matrix or a stack (..., d, d).
    """
    A = np.asarray(A)
    d = A.shape[-1]
    if not 1 <= q <= d:
        raise ValueError("q must satisfy 1 <= q <= d")
    if q == 1:
        return A.copy()
    combos = list(itertools.combinations(range(d), q))
    m = len(combos)
    out_shape = A.shape[:-2] + (m, m)
    out = np.empty(out_shape, dtype=A.dtype if A.dtype == complex else complex)
    for a, I in enumerate(combos):
        rows = np.array(I)
        for b, J in enumerate(combos):
            cols = np.array(J)
            sub = A[..., rows[:, None], cols[None, :]]
            out[..., a, b] = np.linalg.det(sub)
    return out


def _batched_cocycle(M, q, args, checkpoints):
    """f_n^{(q)} over a batch of argument tables, at the given checkpoints.

    Renormalizes with the Frobenius norm each step and converts to the
    operator norm (largest singular value) only at checkpoints, so the
    reported values are exact log operator norms.
    """
    checkpoints = sorted(set(checkpoints))
    n_max = checkpoints[-1]
    N = args.shape[0]
    A0 = M.eval_args(args, 0)
    Q = math.comb(M.dim, q)
    acc = np.broadcast_to(np.eye(Q, dtype=complex), (N, Q, Q)).copy()
    logs = np.zeros(N)
    out = {}
    for k in range(n_max):
        A = A0 if k == 0 else M.eval_args(args, k)
        if not np.all(np.isfinite(A)):
            raise NonFinite("factor at step %d is not finite" % k)
        Aq = exterior_power(A, q) if q > 1 else A
        acc = Aq @ acc
        fro = np.linalg.norm(acc, axis=(1, 2))
        if np.any(fro == 0.0) or not np.all(np.isfinite(fro)):
            raise SingularFactor("product norm degenerate at step %d" % k)
        acc /= fro[:, None, None]
        logs += np.log(fro)
        if k + 1 in checkpoints:
            sv = np.linalg.svd(acc, compute_uv=False)
            out[k + 1] = logs + np.log(sv[:, 0])
    return out


def subadditive_sequence(M, q, x, n_max):
    """f_n^{(q)}(x) = log ||(P_n(x))^{wedge q}|| for n = 1..n_max."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    args = _argument_table(M, x, n_max)
    res = _batched_cocycle(M, q, args, range(1, n_max + 1))
    return np.array([res[n][0] for n in range(1, n_max + 1)])


# ---------------------------------------------------------------------------
# estimation


@dataclass(frozen=True)
class EstimationSpec:
    """Knobs for Lyapunov estimation.

    The Bohr mean of f_n is estimated by averaging (1/n) f_n(x_i) over
    points sampled uniformly from the window; the limit is a.e. constant,
    so any window of positive length works.  All randomness flows through
    the seed.
    """

    n_ladder: tuple = (2, 4, 8, 16, 32, 64)
    n_samples: int = 200
    window: tuple = (1.0, 2.0)
    seed: int = 0
    cluster_tol: object = None


def _rand_big_fraction(rng, bits, lo, hi):
    chunks = rng.integers(0, 1 << 30, size=(bits // 30 + 1))
    big = 0
    for c in chunks:
        big = (big << 30) | int(c)
    big &= (1 << bits) - 1
    span = Fraction(hi) - Fraction(lo)
    return Fraction(lo) + span * Fraction(big, 1 << bits)


def _sample_argument_tables(M, cfg, n_max):
    """Argument tables (N, n_max + max_scale + 1) for random sample points."""
    L = n_max + M.max_scale + 1
    if M.is_constant:
        return np.zeros((1, L))
    rng = np.random.default_rng(cfg.seed)
    N = cfg.n_samples
    lo, hi = cfg.window
    beta = M.beta
    if not M.entries_one_periodic:
        xs = rng.uniform(lo, hi, size=N)
        return xs[:, None] * (beta ** np.arange(L))[None, :]
    if _is_integer_beta(M.base):
        B = int(round(beta))
        # odd denominators coprime to B keep the doubling orbit alive
        dens = np.empty(N, dtype=np.int64)
        filled = 0
        while filled < N:
            cand = rng.integers(1 << 39, 1 << 40, size=N - filled) | 1
            cand = cand[np.gcd(cand, B) == 1]
            dens[filled : filled + cand.size] = cand
            filled += cand.size
        nums = np.array(
            [int(rng.integers(int(lo * d), int(hi * d))) for d in dens],
            dtype=np.int64,
        )
        args = np.empty((N, L))
        for k in range(L):
            args[:, k] = nums / dens
            nums = (B * nums) % dens
        return args
    bits = int(L * math.log2(beta)) + 64
    args = np.empty((N, L))
    for s in range(N):
        x = _rand_big_fraction(rng, bits, lo, hi)
        args[s] = orbit_fractions(M.base, x, L)
    return args


def lyapunov_top(M, q, cfg=None):
    """Estimate of the top exterior-power growth rate.

    Returns (estimate, diagnostics): the estimate is the minimum over the
    n-ladder of the empirical Bohr mean of (1/n) f_n^{(q)}, matching the
    inf-over-n characterization of the leading exponent.  Diagnostics carry
    per-n means and standard deviations, the cross-sample dispersion at the
    largest n, and a Richardson-style extrapolation over the last doubling.
    """
    cfg = cfg or EstimationSpec()
    ladder = sorted(set(cfg.n_ladder))
    n_max = ladder[-1]
    args = _sample_argument_tables(M, cfg, n_max)
    res = _batched_cocycle(M, q, args, ladder)
    per_n = {n: float(np.mean(res[n] / n)) for n in ladder}
    per_n_std = {n: float(np.std(res[n] / n)) for n in ladder}
    estimate = min(per_n.values())
    diagnostics = {
        "per_n": per_n,
        "per_n_std": per_n_std,
        "dispersion": per_n_std[n_max],
        "seed": cfg.seed,
        "window": tuple(cfg.window),
        "n_samples": int(args.shape[0]),
    }
    if len(ladder) >= 2 and ladder[-1] == 2 * ladder[-2]:
        diagnostics["richardson"] = 2 * per_n[ladder[-1]] - per_n[ladder[-2]]
    return estimate, diagnostics


def _cluster(values, tol):
    """Group sorted values into (mean, count) clusters within tol."""
    groups = []
    for v in values:
        if groups and abs(v - groups[-1][-1]) <= tol:
            groups[-1].append(v)
        else:
            groups.append([v])
    return [(float(np.mean(g)), len(g)) for g in groups]


def lyapunov_spectrum(M, cfg=None):
    """All Lyapunov exponents with multiplicities, ascending.

    Computes the top growth rate of every exterior power q = 1..d over a
    shared sample, recovers individual exponents from successive
    differences, and clusters them.
    """
    cfg = cfg or EstimationSpec()
    ladder = sorted(set(cfg.n_ladder))
    n_max = ladder[-1]
    tol = cfg.cluster_tol if cfg.cluster_tol is not None else 5.0 / n_max
    args = _sample_argument_tables(M, cfg, n_max)
    sums = [0.0]
    for q in range(1, M.dim + 1):
        res = _batched_cocycle(M, q, args, ladder)
        sums.append(min(float(np.mean(res[n] / n)) for n in ladder))
    mus = [sums[q] - sums[q - 1] for q in range(1, M.dim + 1)]
    for q in range(1, len(mus)):
        if mus[q] > mus[q - 1] + max(tol, 1e-9):
            raise NonMonotoneSums(
                "exterior sums not concave: mu_%d=%.6g > mu_%d=%.6g"
                % (q + 1, mus[q], q, mus[q - 1])
            )
    return _cluster(sorted(mus), tol)


@dataclass(frozen=True)
class OseledecSpectrum:
    """Finite-n Oseledec data at a single point.

    exponents are ascending; filtration[r] is an orthonormal basis (columns)
    of V^(r+1), the span of the slowest r+1 growth groups.
    """

    exponents: tuple
    multiplicities: tuple
    filtration: tuple
    n_used: int
    x: float

    @property
    def s(self):
        return len(self.exponents)

    def weighted_sum(self):
        return sum(m * lam for lam, m in zip(self.exponents, self.multiplicities))


def oseledec_at(M, x, n, cluster_tol=None):
    """Oseledec spectrum and filtration from the SVD of P_n(x).

    Exponents are (log sigma_i + accumulated log norm) / n grouped within
    cluster_tol (default 5/n); V^(r) is spanned by the right singular
    vectors of the r smallest groups.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    tol = cluster_tol if cluster_tol is not None else 5.0 / n
    prod = product(M, x, n)
    try:
        _, sv, vh = np.linalg.svd(prod.unit_matrix)
    except np.linalg.LinAlgError as exc:
        raise DegenerateSVD(str(exc))
    if np.any(sv < 1e-280):
        raise DegenerateSVD("singular value underflow; reduce n")
    exps = (np.log(sv) + prod.log_norm) / n  # descending
    order = np.argsort(exps)  # ascending
    exps_asc = exps[order]
    vectors = vh.conj().T[:, order]  # columns are right singular vectors
    groups = _cluster(list(exps_asc), tol)
    exponents = tuple(g[0] for g in groups)
    multiplicities = tuple(g[1] for g in groups)
    filtration = []
    used = 0
    for _, mult in groups:
        used += mult
        filtration.append(vectors[:, :used].copy())
    return OseledecSpectrum(
        exponents=exponents,
        multiplicities=multiplicities,
        filtration=tuple(filtration),
        n_used=n,
        x=float(x),
    )


# ---------------------------------------------------------------------------
# distortion bounds and joint-period certificates


@lru_cache(maxsize=32)
def _grid_norm_constants(M, grid=10000):
    """(sup ||M||_2, sup ||M^-1||_2, sup ||M||_2 ||M^-1||_2,
    sup ||M||_inf ||M^-1||_inf).

    Grid suprema over [0, 1); callers inflate when they need a safe side.
    """
    xs = np.linspace(0.0, 1.0, grid, endpoint=False)
    Ms = M.evaluate_batch(xs)
    inv = np.linalg.inv(Ms)
    two = np.linalg.svd(Ms, compute_uv=False)[:, 0]
    two_inv = np.linalg.svd(inv, compute_uv=False)[:, 0]
    inf_n = np.abs(Ms).sum(axis=2).max(axis=1)
    inf_inv = np.abs(inv).sum(axis=2).max(axis=1)
    return (
        float(np.max(two)),
        float(np.max(two_inv)),
        float(np.max(two * two_inv)),
        float(np.max(inf_n * inf_inv)),
    )


def distortion_bound(M, xs, ys, v, d_cap=1e6):
    """Distortion bound and actual ratio for perturbed products on a vector.

    Picks the positive path (L1 norms, bound exp(sum theta_k / delta)) when
    positivity_delta is set and v is nonnegative, otherwise the general
    invertible path (Euclidean norms, bound 1 + C sum_k D^(k-1) theta_k with
    C = sup ||M^-1|| and D = sup ||M|| ||M^-1||, theta-corrected).
    Factors are applied right to left: xs[0] is the leftmost factor.
    """
    xs = list(xs)
    ys = list(ys)
    if len(xs) != len(ys):
        raise ValueError("xs and ys must have equal length")
    v = np.asarray(v, dtype=complex)
    if np.linalg.norm(v) == 0:
        raise ValueError("v must be nonzero")
    mats_x = [M.evaluate(t) for t in xs]
    mats_y = [M.evaluate(t) for t in ys]
    thetas = [np.linalg.norm(A - B, 2) for A, B in zip(mats_x, mats_y)]

    positive = (
        M.positivity_delta is not None
        and np.all(np.abs(v.imag) < 1e-14)
        and np.all(v.real >= 0)
    )
    if positive:
        for A in mats_x + mats_y:
            if np.max(np.abs(A.imag)) > 1e-12 or np.min(A.real) < -1e-12:
                raise NegativeEntries("positive path needs nonnegative matrices")
        delta = float(M.positivity_delta)
        # the L1 operator norm (max column sum) is what perturbs L1 lengths
        thetas = [
            float(np.max(np.abs(A - B).sum(axis=0))) * 1.01
            for A, B in zip(mats_x, mats_y)
        ]
        bound = math.exp(min(sum(thetas) / delta, 700.0))
        if sum(thetas) / delta >= 700.0:
            bound = math.inf
        norm = lambda w: float(np.sum(np.abs(w)))
    else:
        _, c_inv, d_two, _ = _grid_norm_constants(M)
        # grid suprema undershoot; the bound must not
        c_inv *= 1.01
        d_two *= 1.01
        if d_two > d_cap:
            raise UnboundedD("sup ||M|| ||M^-1|| = %.3g exceeds cap" % d_two)
        # Telescoping the difference of the two products, the factor at
        # position k contributes at most ||M^-1|| theta_k, amplified by
        # ||M|| ||M^-1|| (plus a theta correction for evaluating the two
        # factors at different points) for every factor to its left.
        amp = 1.0
        total = 0.0
        for th in thetas:  # thetas[0] belongs to the leftmost factor
            total += c_inv * th * amp
            amp *= d_two + c_inv * th
            if not math.isfinite(amp) or amp > 1e300:
                total = math.inf
                break
        bound = 1.0 + total
        norm = lambda w: float(np.linalg.norm(w))

    def log_product_norm(mats):
        w = v.astype(complex)
        acc = 0.0
        for A in reversed(mats):
            w = A @ w
            s = norm(w)
            if s == 0.0:
                raise SingularFactor("vector annihilated inside the product")
            w = w / s
            acc += math.log(s)
        return acc

    actual_ratio = math.exp(log_product_norm(mats_x) - log_product_norm(mats_y))
    return bound, actual_ratio


@dataclass(frozen=True)
class JointPeriodCertificate:
    """Certificate that (1/n) f_n^{(q)} has joint periods on the beta-lattice.

    kind is "contraction" (D rho^alpha < 1) or "positivity" (all entries
    identically zero or >= delta); script_C bounds |f_n(x+tau) - f_n(x)|
    uniformly over lattice translations tau.
    """

    kind: str
    D: object
    rho_alpha: float
    delta: object
    script_C: float
    lattice_level: int
    c_hold: float = 0.0


def _measure_holder_constant(M, q, lattice_level, rho, alpha):
    """Measured sup of ||M^q(beta^k(x+tau)) - M^q(beta^k x)|| / rho^(k alpha)."""
    taus = translation_lattice(M.base, min(lattice_level, 6))
    if len(taus) > 24:
        idx = np.linspace(0, len(taus) - 1, 24).astype(int)
        taus = [taus[i] for i in idx]
    xs = np.linspace(0.0, 1.0, 96, endpoint=False)
    beta = M.beta
    worst = 0.0
    for k in range(26):
        scale = beta**k
        base_vals = M.evaluate_batch(scale * xs)
        base_q = exterior_power(base_vals, q) if q > 1 else base_vals
        for tau in taus:
            if tau == 0.0:
                continue
            shifted = M.evaluate_batch(scale * (xs + tau))
            shifted_q = exterior_power(shifted, q) if q > 1 else shifted
            diff = np.linalg.norm(shifted_q - base_q, axis=(1, 2)).max()
            worst = max(worst, diff / (rho ** (k * alpha)) if rho > 0 else diff)
    # floor well above float noise so exact-period matrices (integer beta,
    # where every lattice translation is a true period) still verify
    return max(worst * 1.5, 1e-9)


def joint_period_certificate(M, q=1, lattice_level=8):
    """Try to certify joint periods for (1/n) f_n^{(q)}.

    Emits a contraction certificate when D rho^alpha < 1 (D in the
    max-row-sum operator norm, grid supremum), a positivity certificate
    when positivity_delta is set, and raises NoCertificate otherwise.
    """
    if not isinstance(M.base, PisotNumber):
        raise NoCertificate("certificates require a PisotNumber base")
    if not M.entries_one_periodic:
        raise NoCertificate("certificates require 1-periodic entries")
    rho = M.base.rho
    alpha = M.holder_alpha
    _, _, _, d_inf = _grid_norm_constants(M)
    rho_alpha = rho**alpha
    if d_inf * rho_alpha < 1.0:
        c_hold = _measure_holder_constant(M, q, lattice_level, rho, alpha)
        # D is reported as the raw grid supremum (closed forms must be
        # recognizable); the 1% sup-inflation slack lands in script_C instead
        script_c = 1.01 * c_hold * d_inf / (1.0 - d_inf * rho_alpha)
        return JointPeriodCertificate(
            kind="contraction",
            D=d_inf,
            rho_alpha=rho_alpha,
            delta=None,
            script_C=max(script_c, 1e-12),
            lattice_level=lattice_level,
            c_hold=c_hold,
        )
    if M.positivity_delta is not None:
        delta = float(M.positivity_delta)
        c_hold = _measure_holder_constant(M, q, lattice_level, rho, alpha)
        denom = 1.0 - rho_alpha if rho_alpha < 1 else 0.5
        script_c = 1.01 * c_hold / (delta * denom)
        return JointPeriodCertificate(
            kind="positivity",
            D=None,
            rho_alpha=rho_alpha,
            delta=delta,
            script_C=max(script_c, 1e-12),
            lattice_level=lattice_level,
            c_hold=c_hold,
        )
    raise NoCertificate(
        "D*rho^alpha = %.4g >= 1 and no positivity floor declared"
        % (d_inf * rho_alpha)
    )


def joint_period_verify(M, q, cert, m, n_list, grid=256, max_tau=64):
    """Empirical check of a joint-period certificate.

    Returns the maximum of |f_n^{(q)}(x+tau) - f_n^{(q)}(x)| over lattice
    translations of level m, the requested n values, and a grid of x;
    raises CertificateViolated when it exceeds script_C by more than 10%.
    """
    n_list = sorted(set(int(n) for n in n_list))
    n_max = n_list[-1]
    taus = translation_lattice(M.base, m)
    if len(taus) > max_tau:
        idx = np.linspace(0, len(taus) - 1, max_tau).astype(int)
        taus = [taus[i] for i in idx]
    xs = np.linspace(0.0, 1.0, grid, endpoint=False)
    beta = M.beta
    powers = beta ** np.arange(n_max + M.max_scale + 1)
    base_args = xs[:, None] * powers[None, :]
    base_res = _batched_cocycle(M, q, base_args, n_list)
    worst = 0.0
    for tau in taus:
        if tau == 0.0:
            continue
        shifted = (xs + tau)[:, None] * powers[None, :]
        res = _batched_cocycle(M, q, shifted, n_list)
        for n in n_list:
            worst = max(worst, float(np.max(np.abs(res[n] - base_res[n]))))
    if worst > cert.script_C * 1.1:
        raise CertificateViolated(
            "max discrepancy %.6g exceeds script_C=%.6g by more than 10%%"
            % (worst, cert.script_C)
        )
    return worst
