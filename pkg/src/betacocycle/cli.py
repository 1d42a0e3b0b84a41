"""Command-line front end: config-driven experiments with CSV/JSON reports.

One config file describes one experiment.  Every run echoes its config
(including the seed) into the report, so a report is reproducible by
feeding the echo back in.  Reports are written atomically (temp file +
rename).  Exit codes: 0 success, 1 config error, 2 computation error,
3 certificate violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import multiperiodic as mpq
from .apcore import trig_poly
from .cocycle import (
    EstimationSpec,
    beta_adapted_matrix,
    joint_period_certificate,
    joint_period_verify,
    lyapunov_spectrum,
    lyapunov_top,
    oseledec_at,
)
from .errors import (
    BetaCocycleError,
    CertificateViolated,
    ComputationError,
    ConfigInvalid,
    NoCertificate,
    UnknownSeries,
)
from .pisot import PisotNumber, beta_expand, make_pisot

COMMANDS = (
    "pisot",
    "expand",
    "lyapunov",
    "spectrum",
    "oseledec",
    "certify",
    "solve",
    "asymptotics",
    "moments",
    "bernoulli",
)

TWO_PI = 2.0 * math.pi


@dataclass
class ExperimentConfig:
    """One experiment: a command plus its structured parameter blocks."""

    command: str
    base: object = None
    matrix: object = None
    equation: object = None
    estimation: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    seed: int = 0
    threads: int = 1

    def to_dict(self):
        return {
            "command": self.command,
            "base": self.base,
            "matrix": self.matrix,
            "equation": self.equation,
            "estimation": dict(self.estimation),
            "params": dict(self.params),
            "output": dict(self.output),
            "seed": self.seed,
            "threads": self.threads,
        }

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigInvalid("config must be a mapping")
        command = data.get("command")
        if command not in COMMANDS:
            raise ConfigInvalid(
                "command: expected one of %s, got %r" % (", ".join(COMMANDS), command)
            )
        cfg = cls(
            command=command,
            base=data.get("base"),
            matrix=data.get("matrix"),
            equation=data.get("equation"),
            estimation=dict(data.get("estimation") or {}),
            params=dict(data.get("params") or {}),
            output=dict(data.get("output") or {}),
            seed=int(data.get("seed", 0)),
            threads=int(data.get("threads", 1)),
        )
        fmt = cfg.output.get("format", "json")
        if fmt not in ("csv", "json"):
            raise ConfigInvalid("output.format: expected csv or json, got %r" % fmt)
        return cfg


@dataclass
class RunReport:
    """Self-contained run record: config echo, result rows, diagnostics."""

    config: dict
    series: dict = field(default_factory=dict)
    certificates: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "config": self.config,
            "series": self.series,
            "certificates": self.certificates,
            "warnings": self.warnings,
            "timings": self.timings,
            "summary": self.summary,
        }


# ---------------------------------------------------------------------------
# config parsing helpers


def _parse_base(spec):
    """PisotNumber from a minpoly spec, or a plain float beta."""
    if spec is None:
        raise ConfigInvalid("base: missing")
    if isinstance(spec, (int, float)):
        if float(spec) <= 1.0:
            raise ConfigInvalid("base: beta must exceed 1")
        return float(spec)
    if isinstance(spec, str):
        try:
            return make_pisot([int(t) for t in spec.split(",")])
        except ValueError as exc:
            raise ConfigInvalid("base: %s" % exc)
    if isinstance(spec, dict) and "minpoly" in spec:
        try:
            return make_pisot([int(c) for c in spec["minpoly"]])
        except ValueError as exc:
            raise ConfigInvalid("base: %s" % exc)
    if isinstance(spec, dict) and "beta" in spec:
        return float(spec["beta"])
    raise ConfigInvalid("base: expected minpoly list, comma string, or real beta")


def _parse_poly(spec):
    """TrigPolynomial from a triple list [[freq, re, im], ...].

    Frequencies are integer harmonics of 2*pi by default; a {"harmonic":
    false, "terms": [...]} wrapper switches to raw frequencies (needed for
    coefficients like cos x).
    """
    harmonic_units = True
    terms = spec
    if isinstance(spec, dict):
        harmonic_units = bool(spec.get("harmonic", True))
        terms = spec.get("terms")
    if isinstance(terms, (int, float)):
        return trig_poly([(0.0, complex(terms))])
    if not isinstance(terms, list):
        raise ConfigInvalid("polynomial: expected triple list [[freq, re, im], ...]")
    built = []
    for item in terms:
        if not isinstance(item, list) or len(item) != 3:
            raise ConfigInvalid("polynomial term: expected [freq, re, im]")
        freq, re_part, im_part = item
        f = TWO_PI * float(freq) if harmonic_units else float(freq)
        built.append((f, complex(float(re_part), float(im_part))))
    return trig_poly(built)


def _parse_matrix(cfg):
    spec = cfg.matrix
    if spec is None:
        raise ConfigInvalid("matrix: missing")
    base = _parse_base(spec.get("base", cfg.base))
    entries_spec = spec.get("entries")
    if not isinstance(entries_spec, list):
        raise ConfigInvalid("matrix.entries: expected a nested list")
    rows = []
    for row in entries_spec:
        packed = []
        for item in row:
            if isinstance(item, dict):
                poly = _parse_poly(item.get("poly", item))
                scale = int(item.get("scale", 0))
                packed.append((poly, scale))
            else:
                packed.append((_parse_poly(item), 0))
        rows.append(packed)
    try:
        return beta_adapted_matrix(
            rows,
            base,
            holder_alpha=float(spec.get("holder_alpha", 1.0)),
            positivity_delta=spec.get("positivity_delta"),
            allow_nonperiodic=bool(spec.get("allow_nonperiodic", False)),
        )
    except ValueError as exc:
        raise ConfigInvalid("matrix: %s" % exc)


def _parse_equation(cfg):
    spec = cfg.equation
    if spec is None:
        raise ConfigInvalid("equation: missing")
    base = _parse_base(spec.get("base", cfg.base))
    fs_spec = spec.get("f")
    if not isinstance(fs_spec, list) or not fs_spec:
        raise ConfigInvalid("equation.f: expected a list of polynomial specs")
    try:
        return mpq.multiperiodic_equation([_parse_poly(s) for s in fs_spec], base)
    except ValueError as exc:
        raise ConfigInvalid("equation: %s" % exc)


def _parse_estimation(cfg):
    est = cfg.estimation
    try:
        return EstimationSpec(
            n_ladder=tuple(est.get("n_ladder", (2, 4, 8, 16, 32, 64))),
            n_samples=int(est.get("n_samples", 200)),
            window=tuple(est.get("window", (1.0, 2.0))),
            seed=int(est.get("seed", cfg.seed)),
            cluster_tol=est.get("cluster_tol"),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid("estimation: %s" % exc)


def _parse_point(value):
    """Sample point from a float or an exact 'p/q' string."""
    if isinstance(value, str) and "/" in value:
        return Fraction(value)
    return float(value)


def _certificate_dict(cert):
    return {
        "kind": cert.kind,
        "D": cert.D,
        "rho_alpha": cert.rho_alpha,
        "delta": cert.delta,
        "script_C": cert.script_C,
        "lattice_level": cert.lattice_level,
    }


def _try_certificate(M, q, report):
    """Attach a certificate or an explicit 'uncertified' warning."""
    if not isinstance(M.base, PisotNumber):
        report.warnings.append("uncertified: base is not a PisotNumber")
        return None
    try:
        cert = joint_period_certificate(M, q=q)
    except NoCertificate as exc:
        report.warnings.append("uncertified: %s" % exc)
        return None
    report.certificates.append(_certificate_dict(cert))
    return cert


# ---------------------------------------------------------------------------
# command implementations


def _run_pisot(cfg, report):
    p = _parse_base(cfg.base if cfg.base is not None else cfg.params.get("minpoly"))
    if not isinstance(p, PisotNumber):
        raise ConfigInvalid("pisot: base must be a minimal polynomial")
    report.summary = {
        "beta": p.beta,
        "rho": p.rho,
        "degree": p.degree,
        "minpoly": list(p.minpoly),
    }
    report.series["conjugates"] = [
        {"index": i, "re": z.real, "im": z.imag, "modulus": abs(z)}
        for i, z in enumerate(p.conjugates)
    ]


def _run_expand(cfg, report):
    p = _parse_base(cfg.base)
    if not isinstance(p, PisotNumber):
        raise ConfigInvalid("expand: base must be a minimal polynomial")
    x = _parse_point(cfg.params.get("x", 0.5))
    n = int(cfg.params.get("digits", 20))
    digits = beta_expand(p, Fraction(x), n)
    report.summary = {"x": float(x), "digits": list(digits.digits)}
    report.series["digits"] = [
        {"n": i + 1, "digit": e} for i, e in enumerate(digits.digits)
    ]


def _run_lyapunov(cfg, report):
    M = _parse_matrix(cfg)
    q = int(cfg.params.get("q", 1))
    est = _parse_estimation(cfg)
    _try_certificate(M, q, report)
    estimate, diag = lyapunov_top(M, q, est)
    report.summary = {
        "estimate": estimate,
        "richardson": diag.get("richardson"),
        "dispersion": diag["dispersion"],
        "q": q,
    }
    report.series["per_n"] = [
        {"n": n, "mean": diag["per_n"][n], "std": diag["per_n_std"][n]}
        for n in sorted(diag["per_n"])
    ]


def _run_spectrum(cfg, report):
    M = _parse_matrix(cfg)
    est = _parse_estimation(cfg)
    _try_certificate(M, 1, report)
    spectrum = lyapunov_spectrum(M, est)
    report.summary = {"count": len(spectrum)}
    report.series["spectrum"] = [
        {"r": r + 1, "lambda": lam, "multiplicity": m}
        for r, (lam, m) in enumerate(spectrum)
    ]


def _run_oseledec(cfg, report):
    M = _parse_matrix(cfg)
    x = _parse_point(cfg.params.get("x", 1.0))
    n = int(cfg.params.get("n", 64))
    _try_certificate(M, 1, report)
    spec = oseledec_at(M, x, n, cfg.params.get("cluster_tol"))
    report.summary = {"n_used": spec.n_used, "x": spec.x, "s": spec.s}
    report.series["spectrum"] = [
        {"r": r + 1, "lambda": lam, "multiplicity": m, "dim_V": int(spec.filtration[r].shape[1])}
        for r, (lam, m) in enumerate(zip(spec.exponents, spec.multiplicities))
    ]


def _run_certify(cfg, report):
    M = _parse_matrix(cfg)
    q = int(cfg.params.get("q", 1))
    cert = joint_period_certificate(
        M, q=q, lattice_level=int(cfg.params.get("lattice_level", 8))
    )
    report.certificates.append(_certificate_dict(cert))
    report.summary = _certificate_dict(cert)
    if cfg.params.get("verify", True):
        worst = joint_period_verify(
            M,
            q,
            cert,
            m=int(cfg.params.get("verify_level", 8)),
            n_list=range(1, int(cfg.params.get("verify_n", 40)) + 1),
            grid=int(cfg.params.get("verify_grid", 256)),
        )
        report.summary["verified_max_discrepancy"] = worst


def _run_solve(cfg, report):
    eq = _parse_equation(cfg)
    tol = float(cfg.params.get("tol", 1e-10))
    sol = mpq.solve(eq, tol=tol)
    queries = cfg.params.get("x", [1.0])
    if not isinstance(queries, list):
        queries = [queries]
    rows = []
    for x in queries:
        x = float(x)
        value = sol.F(x)
        rows.append(
            {
                "x": x,
                "F_re": value.real,
                "F_im": value.imag,
                "residual": float(sol.residual(x)),
            }
        )
    report.series["F"] = rows
    report.summary = {"tol": tol, "c_prime": sol.c_prime}


def _run_asymptotics(cfg, report):
    eq = _parse_equation(cfg)
    sol = mpq.solve(eq, tol=float(cfg.params.get("tol", 1e-10)))
    x = _parse_point(cfg.params.get("x", 1.5))
    n_max = int(cfg.params.get("n_max", 200))
    h, estimate = mpq.asymptotic_exponent(eq, x, n_max, solution=sol)
    M = mpq.companion_matrix(eq)
    _try_certificate(M, 1, report)
    est = _parse_estimation(cfg)
    lyap, diag = lyapunov_top(M, 1, est)
    report.series["h_n"] = [
        {"n": n + 1, "h_n": float(h[n])} for n in range(n_max)
    ]
    # the paper leaves open whether these two coincide; report both
    report.summary = {
        "lambda_estimate": estimate,
        "lyapunov_estimate": lyap,
        "lyapunov_dispersion": diag["dispersion"],
        "x": float(x),
        "n_max": n_max,
    }


def _run_moments(cfg, report):
    M = _parse_matrix(cfg)
    q = float(cfg.params.get("q", 1.0))
    n_max = int(cfg.params.get("n_max", 12))
    zs, rate = mpq.moment_growth(M, q, n_max)
    report.series["Z_n"] = [
        {"n": n, "log_Z_n": float(zs[n - 1]), "rate": float(zs[n - 1] / n)}
        for n in range(1, n_max + 1)
    ]
    report.summary = {"q": q, **rate}


def _run_bernoulli(cfg, report):
    base = _parse_base(cfg.base)
    p = float(cfg.params.get("p", 0.5))
    a = int(cfg.params.get("a", 1))
    b = int(cfg.params.get("b", 1))
    eq = mpq.bernoulli_convolution(p, a, b, base)
    report.summary = {"p": p, "a": a, "b": b, "recorded_D": eq.recorded_D}
    M = mpq.companion_matrix(eq)
    cert = _try_certificate(M, 1, report)
    sol = mpq.solve(eq)
    n_max = int(cfg.params.get("n_max", 200))
    n_points = int(cfg.params.get("n_points", 50))
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for i in range(n_points):
        x = 1.0 + rng.random()
        _, estimate = mpq.asymptotic_exponent(eq, x, n_max, solution=sol)
        rows.append({"i": i, "x": x, "lambda_estimate": estimate})
    report.series["lambda_samples"] = rows
    estimates = [r["lambda_estimate"] for r in rows]
    est = _parse_estimation(cfg)
    lyap, diag = lyapunov_top(M, 1, est)
    report.summary.update(
        {
            "lambda_estimate": float(np.mean(estimates)),
            "lambda_dispersion": float(np.std(estimates)),
            "lyapunov_estimate": lyap,
            "certified": cert is not None,
            "n_max": n_max,
        }
    )


_RUNNERS = {
    "pisot": _run_pisot,
    "expand": _run_expand,
    "lyapunov": _run_lyapunov,
    "spectrum": _run_spectrum,
    "oseledec": _run_oseledec,
    "certify": _run_certify,
    "solve": _run_solve,
    "asymptotics": _run_asymptotics,
    "moments": _run_moments,
    "bernoulli": _run_bernoulli,
}


def run(config):
    """Execute one experiment and return its RunReport."""
    if not isinstance(config, ExperimentConfig):
        config = ExperimentConfig.from_dict(config)
    report = RunReport(config=config.to_dict())
    start = time.perf_counter()
    try:
        _RUNNERS[config.command](config, report)
    except (ConfigInvalid, CertificateViolated):
        raise
    except BetaCocycleError as exc:
        raise ComputationError("%s: %s" % (config.command, exc)) from exc
    report.timings["wall_seconds"] = time.perf_counter() - start
    return report


def emit_plot_data(report, series):
    """CSV stream (string) for one named series of a report."""
    table = report.series.get(series)
    if table is None:
        raise UnknownSeries(
            "series %r not in report (have: %s)"
            % (series, ", ".join(sorted(report.series)))
        )
    buf = io.StringIO()
    if not table:
        return ""
    writer = csv.DictWriter(buf, fieldnames=list(table[0].keys()))
    writer.writeheader()
    for row in table:
        writer.writerow(row)
    return buf.getvalue()


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".report-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(report, path, fmt):
    if fmt == "json":
        text = json.dumps(report.to_dict(), indent=2, sort_keys=True, default=str)
    else:
        name = next(iter(sorted(report.series)), None)
        text = emit_plot_data(report, name) if name else ""
    _atomic_write(path, text)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="betacocycle",
        description="Lyapunov exponents and multiperiodic equations over "
        "beta-orbit cocycles",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", help="path to a JSON experiment config")
        cmd.add_argument("--out", help="report output path (default: stdout)")
        cmd.add_argument("--format", choices=("csv", "json"), default=None)
        cmd.add_argument("--seed", type=int, default=None)
        cmd.add_argument("--threads", type=int, default=None)
        cmd.add_argument(
            "--series", help="emit only this series as CSV (overrides --format)"
        )
        if name == "pisot":
            cmd.add_argument("--minpoly", help='e.g. "1,-1,-1"')
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        data = {}
        if args.config:
            with open(args.config) as handle:
                data = json.load(handle)
        data["command"] = args.command
        if getattr(args, "minpoly", None):
            data["base"] = args.minpoly
        if args.seed is not None:
            data["seed"] = args.seed
        if args.threads is not None:
            data["threads"] = args.threads
        if args.format is not None:
            data.setdefault("output", {})["format"] = args.format
        config = ExperimentConfig.from_dict(data)
    except (ConfigInvalid, json.JSONDecodeError, OSError) as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 1

    try:
        report = run(config)
    except ConfigInvalid as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 1
    except CertificateViolated as exc:
        print("certificate violated: %s" % exc, file=sys.stderr)
        return 3
    except (ComputationError, BetaCocycleError) as exc:
        print("computation error: %s" % exc, file=sys.stderr)
        return 2

    for warning in report.warnings:
        print("warning: %s" % warning, file=sys.stderr)
    fmt = config.output.get("format", "json")
    try:
        if args.series:
            text = emit_plot_data(report, args.series)
        elif fmt == "json":
            text = json.dumps(report.to_dict(), indent=2, sort_keys=True, default=str)
        else:
            name = next(iter(sorted(report.series)), None)
            text = emit_plot_data(report, name) if name else ""
    except UnknownSeries as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 1
    out_path = args.out or config.output.get("path")
    if out_path:
        _atomic_write(out_path, text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
