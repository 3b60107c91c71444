"""Experiment harness: excess-risk sweeps over n and k, plus verify suites.

Configuration is a flat text file of ``key = value`` lines (lists are
comma-separated).  Sweeps write a fixed-schema CSV; given the same config
and seed the output bytes are identical across runs and thread counts.
Exit codes: 0 success, 1 check failure, 2 config error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import theory
from .errors import ConfigParse, GrclabError
from .estimators import Weights, fit_grcl, fit_ocl
from .model import (
    Design,
    ProblemInstance,
    instance_from_text,
    make_problem_pk,
    make_spectrum,
)
from .oracle import EnumerationBudget, binomial_mixed_moment, binomial_pmf, exact_one_hot_expected_excess
from .regularizers import (
    Regularizer,
    corollary3_regularizer,
    onehot_frequency,
    topk_spectrum_regularizer,
    zero_regularizer,
)
from .risk import (
    GRCL,
    Joint,
    L2RCL,
    OCL,
    monte_carlo_expected_excess,
    sketch_builder,
    topk_builder,
)

CSV_HEADER = (
    "algorithm,n,k,reps,excess_mean,excess_stderr,"
    "bias_mean,variance_mean,theory_bias,theory_variance"
)

VERIFY_SUITES = ("lemmas", "oracle", "theorem1", "reductions", "example1", "example2")


# -- configuration -------------------------------------------------------------

@dataclass(frozen=True)
class AlgorithmSpec:
    """One entry of the config ``algorithms`` list."""

    label: str
    kind: str  # ocl | l2rcl | grcl | joint
    gamma: float | None = None
    reg_kind: str | None = None  # topk | freq | cor3 | sketch
    reg_k: int | None = None

    def algorithm(self, k_override: int | None = None):
        if self.kind == "ocl":
            return OCL()
        if self.kind == "joint":
            return Joint()
        if self.kind == "l2rcl":
            return L2RCL(gamma=self.gamma)
        k = self.reg_k if k_override is None else k_override
        if self.reg_kind == "topk":
            return GRCL(builder=topk_builder(k))
        if self.reg_kind == "sketch":
            return GRCL(builder=sketch_builder(k))
        if self.reg_kind == "freq":
            return GRCL(builder=lambda x1, seed: onehot_frequency(x1, 1))
        raise ConfigParse(f"grcl regularizer kind {self.reg_kind!r} has no builder")

    def csv_k(self, k_override: int | None = None):
        if self.kind != "grcl":
            return ""
        k = self.reg_k if k_override is None else k_override
        return "" if k is None else str(k)


def parse_algorithm_spec(token: str) -> AlgorithmSpec:
    parts = [p.strip() for p in token.strip().split(":")]
    kind = parts[0]
    if kind in ("ocl", "joint"):
        if len(parts) != 1:
            raise ConfigParse(f"{kind} takes no parameters: {token!r}")
        return AlgorithmSpec(label=kind, kind=kind)
    if kind == "l2rcl":
        if len(parts) != 2:
            raise ConfigParse(f"expected l2rcl:<gamma>, got {token!r}")
        try:
            gamma = float(parts[1])
        except ValueError as exc:
            raise ConfigParse(f"bad gamma in {token!r}") from exc
        if gamma <= 0:
            raise ConfigParse(f"gamma must be positive in {token!r}")
        return AlgorithmSpec(label=f"l2rcl:{parts[1]}", kind=kind, gamma=gamma)
    if kind == "grcl":
        if len(parts) < 2:
            raise ConfigParse(f"expected grcl:<regularizer>[: k], got {token!r}")
        reg_kind = parts[1]
        if reg_kind in ("topk", "sketch"):
            if len(parts) != 3:
                raise ConfigParse(f"expected grcl:{reg_kind}:<k>, got {token!r}")
            try:
                reg_k = int(parts[2])
            except ValueError as exc:
                raise ConfigParse(f"bad k in {token!r}") from exc
            return AlgorithmSpec(
                label=f"grcl:{reg_kind}:{reg_k}", kind=kind, reg_kind=reg_kind, reg_k=reg_k
            )
        if reg_kind in ("freq", "cor3"):
            if len(parts) != 2:
                raise ConfigParse(f"{reg_kind} takes no k: {token!r}")
            return AlgorithmSpec(label=f"grcl:{reg_kind}", kind=kind, reg_kind=reg_kind)
        raise ConfigParse(f"unknown grcl regularizer {reg_kind!r}")
    raise ConfigParse(f"unknown algorithm {kind!r}")


def default_n_grid() -> list[int]:
    # 8 log-spaced sample sizes in [100, 5000].
    return [int(round(v)) for v in np.geomspace(100, 5000, 8)]


@dataclass(frozen=True)
class ExperimentConfig:
    instance: ProblemInstance
    algorithms: tuple[AlgorithmSpec, ...]
    n_values: tuple[int, ...]
    k_values: tuple[int, ...]
    n: int
    reps: int
    seed: int
    output_path: str
    suites: tuple[str, ...] = VERIFY_SUITES

    def __post_init__(self):
        if self.reps < 2:
            raise ConfigParse(f"reps must be >= 2, got {self.reps}")


_KNOWN_KEYS = {
    "pk_k", "pk_d", "instance", "design", "n_values", "k_values", "n",
    "algorithms", "reps", "seed", "output", "suites",
}


def _parse_int_list(value: str) -> tuple[int, ...]:
    return tuple(int(v.strip()) for v in value.split(",") if v.strip())


def load_config(path: str) -> ExperimentConfig:
    """Parse a ``key = value`` config file into an :class:`ExperimentConfig`."""
    fields = {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            for lineno, raw in enumerate(handle, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise ConfigParse(f"{path}:{lineno}: expected key = value")
                key = key.strip()
                if key not in _KNOWN_KEYS:
                    raise ConfigParse(f"{path}:{lineno}: unknown key {key!r}")
                fields[key] = value.strip()
    except OSError as exc:
        raise ConfigParse(f"cannot read config {path}: {exc}") from exc
    return config_from_fields(fields)


def config_from_fields(fields: dict) -> ExperimentConfig:
    try:
        design = Design(fields.get("design", "gaussian"))
    except ValueError as exc:
        raise ConfigParse(f"unknown design {fields.get('design')!r}") from exc
    try:
        if "instance" in fields:
            with open(fields["instance"], "r", encoding="utf-8") as handle:
                inst = instance_from_text(handle.read())
        else:
            pk_k = int(fields.get("pk_k", 15))
            pk_d = int(fields.get("pk_d", 200))
            inst = make_problem_pk(pk_k, pk_d, design)
        algorithms = tuple(
            parse_algorithm_spec(tok)
            for tok in fields.get("algorithms", "ocl,joint,grcl:topk:5").split(",")
            if tok.strip()
        )
        n_values = (
            _parse_int_list(fields["n_values"])
            if "n_values" in fields
            else tuple(default_n_grid())
        )
        k_values = (
            _parse_int_list(fields["k_values"])
            if "k_values" in fields
            else tuple(range(16))
        )
        suites = tuple(
            s.strip() for s in fields.get("suites", ",".join(VERIFY_SUITES)).split(",")
            if s.strip()
        )
        for s in suites:
            if s not in VERIFY_SUITES:
                raise ConfigParse(f"unknown verify suite {s!r}")
        return ExperimentConfig(
            instance=inst,
            algorithms=algorithms,
            n_values=n_values,
            k_values=k_values,
            n=int(fields.get("n", 5000)),
            reps=int(fields.get("reps", 20)),
            seed=int(fields.get("seed", 1)),
            output_path=fields.get("output", "sweep.csv"),
            suites=suites,
        )
    except (ValueError, OSError, GrclabError) as exc:
        if isinstance(exc, ConfigParse):
            raise
        raise ConfigParse(str(exc)) from exc


# -- sweeps --------------------------------------------------------------------

def _fmt(value) -> str:
    if value == "":
        return ""
    return f"{float(value):.12g}"


def _theory_columns(spec: AlgorithmSpec, inst: ProblemInstance, n: int,
                    k_override: int | None = None) -> tuple[str, str]:
    """Matching closed-form surrogates, empty when no formula applies."""
    if inst.design is not Design.ONE_HOT:
        return "", ""
    try:
        if spec.kind == "joint":
            rep = theory.joint_theory_one_hot(inst, n)
        elif spec.kind == "ocl":
            rep = theory.grcl_theory_one_hot(inst, zero_regularizer(inst.d), n)
        elif spec.kind == "l2rcl":
            sig = Regularizer(form="diagonal", values=np.full(inst.d, spec.gamma))
            rep = theory.grcl_theory_one_hot(inst, sig, n)
        elif spec.kind == "grcl" and spec.reg_kind == "topk":
            k = spec.reg_k if k_override is None else k_override
            rep = theory.grcl_theory_one_hot(
                inst, topk_spectrum_regularizer(inst.g, k), n
            )
        elif spec.kind == "grcl" and spec.reg_kind in ("freq", "cor3"):
            rep = theory.grcl_theory_one_hot(inst, corollary3_regularizer(inst.g, n), n)
        else:
            return "", ""
    except GrclabError:
        return "", ""
    return _fmt(rep.bias_surrogate), _fmt(rep.variance_surrogate)


def _sweep_row(spec: AlgorithmSpec, inst, n, reps, seed, k_override=None) -> str:
    estimate, decomp = monte_carlo_expected_excess(
        inst, spec.algorithm(k_override), n, reps, seed
    )
    th_bias, th_var = _theory_columns(spec, inst, n, k_override)
    cells = (
        spec.label if k_override is None else "grcl",
        str(n),
        spec.csv_k(k_override),
        str(reps),
        _fmt(estimate.mean),
        _fmt(estimate.std_error),
        _fmt(decomp.bias),
        _fmt(decomp.variance),
        th_bias,
        th_var,
    )
    return ",".join(cells)


def run_sweep_n(config: ExperimentConfig) -> str:
    """Excess risk of each configured algorithm across the sample-size grid."""
    if not config.n_values:
        raise ConfigParse("sweep-n needs a nonempty n_values list")
    lines = [CSV_HEADER]
    for spec in config.algorithms:
        for n in config.n_values:
            lines.append(_sweep_row(spec, config.instance, n, config.reps, config.seed))
    _write_lines(config.output_path, lines)
    return config.output_path


def run_sweep_k(config: ExperimentConfig) -> str:
    """Memory sweep at fixed n: one GRCL row per k, plus ocl/joint baselines."""
    if not config.k_values:
        raise ConfigParse("sweep-k needs a nonempty k_values list")
    grcl_specs = [s for s in config.algorithms if s.kind == "grcl"]
    base = grcl_specs[0] if grcl_specs else parse_algorithm_spec("grcl:topk:0")
    if base.reg_kind not in ("topk", "sketch"):
        raise ConfigParse("sweep-k needs a grcl regularizer with a k (topk or sketch)")
    inst, n, reps, seed = config.instance, config.n, config.reps, config.seed
    lines = [CSV_HEADER]
    for k in config.k_values:
        lines.append(_sweep_row(base, inst, n, reps, seed, k_override=k))
    for label in ("ocl", "joint"):
        lines.append(_sweep_row(parse_algorithm_spec(label), inst, n, reps, seed))
    _write_lines(config.output_path, lines)
    return config.output_path


def _write_lines(path: str, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


# -- verification suites --------------------------------------------------------

@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    measured: str
    required: str


def _check(name: str, passed: bool, measured, required) -> Check:
    return Check(name=name, passed=bool(passed), measured=str(measured), required=str(required))


FLOAT_SLACK = 1e-12


def suite_lemmas() -> list[Check]:
    """Exact binomial moments against the proof-level sandwich constants."""
    checks = []
    for n in (2, 4, 8, 16, 32, 64):
        head = np.linspace(1.0 / n, 1.0, 20)
        tail = np.linspace(1.0 / (20 * n), 1.0 / n, 20)
        worst_head = worst_tail = worst_zero = worst_shift = 0.0
        ok_head = ok_tail = ok_zero = ok_shift = True
        for lam in head:
            m = binomial_mixed_moment(n, lam, 0.0, 1, 0)
            lo, hi = 1.0 / (4 * n * lam), 12.0 / (n * lam)
            ok_head &= lo - FLOAT_SLACK <= m <= hi + FLOAT_SLACK
            worst_head = max(worst_head, m / hi, lo / max(m, 1e-300))
        for lam in tail:
            m = binomial_mixed_moment(n, lam, 0.0, 1, 0)
            lo, hi = n * lam / math.e, n * lam
            ok_tail &= lo - FLOAT_SLACK <= m <= hi + FLOAT_SLACK
            worst_tail = max(worst_tail, m / hi, lo / max(m, 1e-300))
        for lam in np.concatenate([tail, head]):
            gap = abs(binomial_pmf(n, lam)[0] - (1 - lam) ** n)
            ok_zero &= gap <= FLOAT_SLACK
            worst_zero = max(worst_zero, gap)
        for lam in head:
            for gamma in (0.5 / n, 2.0 / n, 0.25, 1.0):
                m = binomial_mixed_moment(n, lam, n * gamma, 2, 0)
                base = 1.0 / (n**2 * (lam + gamma) ** 2) + (1 - lam) ** n / (
                    n**2 * gamma**2
                )
                ok_shift &= 0.5 * base - FLOAT_SLACK <= m <= 144.0 * base + FLOAT_SLACK
                worst_shift = max(worst_shift, m / (144 * base), 0.5 * base / max(m, 1e-300))
        checks.append(_check(f"lemma1/head-inverse n={n}", ok_head, f"ratio<={worst_head:.3g}", "in [1/(4nl), 12/(nl)]"))
        checks.append(_check(f"lemma2/tail-inverse n={n}", ok_tail, f"ratio<={worst_tail:.3g}", "in [nl/e, nl]"))
        checks.append(_check(f"lemma3/zero-mass n={n}", ok_zero, f"gap<={worst_zero:.3g}", "== (1-l)^n"))
        checks.append(_check(f"lemma4/shifted-square n={n}", ok_shift, f"ratio<={worst_shift:.3g}", "in [base/2, 144 base]"))
    return checks


def random_one_hot_instance(rng: np.random.Generator, d: int, n: int) -> ProblemInstance:
    """Random one-hot instance whose last two coordinates are below 1/n.

    Forcing a sub-threshold pair in both spectra keeps the bias events
    frequent enough for Monte Carlo to resolve at moderate replication
    counts.
    """
    tail = 0.25 / n
    mu = np.concatenate([rng.dirichlet(np.ones(d - 2)) * (1 - 2 * tail), [tail, tail]])
    lam = np.concatenate([rng.dirichlet(np.ones(d - 2)) * (1 - 2 * tail), [tail, tail]])
    w = rng.uniform(0.3, 1.0, d) * rng.choice([-1.0, 1.0], d)
    w /= np.linalg.norm(w)
    return ProblemInstance(
        w_star=w,
        sigma2=1.0,
        g=make_spectrum(mu, one_hot=True),
        h=make_spectrum(lam, one_hot=True),
        design=Design.ONE_HOT,
    )


def random_diagonal_regularizer(rng: np.random.Generator, d: int) -> Regularizer:
    gamma = rng.uniform(0.0, 1.0, d) * (rng.random(d) < 0.6)
    return Regularizer(form="diagonal", values=gamma)


_SANDWICH_FLOOR = 1e-9


def _sandwich_ok(measured: float, surrogate: float, factor: float) -> bool:
    if measured <= _SANDWICH_FLOOR and surrogate <= _SANDWICH_FLOOR:
        return True
    if surrogate <= 0 or measured <= 0:
        return False
    ratio = measured / surrogate
    return 1.0 / factor <= ratio <= factor


def suite_theorem1(instances: int = 50, reps: int = 2000, seed: int = 2024,
                   factor: float = 300.0) -> list[Check]:
    """Monte-Carlo risk against the one-hot surrogate, factor-C sandwich."""
    rng = np.random.default_rng(seed)
    checks = []
    worst = 0.0
    all_ok = True
    for idx in range(instances):
        n = (20, 50, 100)[idx % 3]
        d = int(rng.integers(4, 21))
        inst = random_one_hot_instance(rng, d, n)
        sigma = random_diagonal_regularizer(rng, d)
        _, decomp = monte_carlo_expected_excess(
            inst, GRCL(regularizer=sigma), n, reps, seed=int(rng.integers(2**31))
        )
        report = theory.grcl_theory_one_hot(inst, sigma, n)
        pairs = [
            ("bias", decomp.bias, report.bias_surrogate),
            ("variance", decomp.variance, report.variance_surrogate),
            ("total", decomp.total, report.bias_surrogate + report.variance_surrogate),
        ]
        for name, measured, surrogate in pairs:
            ok = _sandwich_ok(measured, surrogate, factor)
            all_ok &= ok
            if surrogate > _SANDWICH_FLOOR and measured > 0:
                worst = max(worst, measured / surrogate, surrogate / measured)
            if not ok:
                checks.append(_check(
                    f"theorem1/instance{idx}/{name}", False,
                    f"measured={measured:.6g} surrogate={surrogate:.6g}",
                    f"ratio in [1/{factor:g}, {factor:g}]",
                ))
    checks.append(_check(
        f"theorem1/sandwich x{instances}", all_ok,
        f"worst ratio {worst:.4g}", f"<= {factor:g}",
    ))
    return checks


def suite_oracle(instances: int = 10, reps: int = 10**4, seed: int = 7,
                 d: int = 2, n: int = 4) -> list[Check]:
    """Monte Carlo against exhaustive enumeration, all four algorithms."""
    rng = np.random.default_rng(seed)
    budget = EnumerationBudget()
    checks = []
    for idx in range(instances):
        mu = rng.dirichlet(np.ones(d) * 2.0)
        lam = rng.dirichlet(np.ones(d) * 2.0)
        w = rng.standard_normal(d)
        w /= np.linalg.norm(w)
        inst = ProblemInstance(
            w_star=w, sigma2=1.0,
            g=make_spectrum(mu, one_hot=True), h=make_spectrum(lam, one_hot=True),
            design=Design.ONE_HOT,
        )
        algorithms = [
            OCL(),
            L2RCL(gamma=0.3),
            GRCL(builder=lambda x1, seed: onehot_frequency(x1, 1)),
            Joint(),
        ]
        for algorithm in algorithms:
            exact = exact_one_hot_expected_excess(inst, n, algorithm, budget)
            estimate, _ = monte_carlo_expected_excess(
                inst, algorithm, n, reps, seed=int(rng.integers(2**31))
            )
            gap = abs(estimate.mean - exact.total)
            window = 4.0 * estimate.std_error + FLOAT_SLACK
            checks.append(_check(
                f"oracle/instance{idx}/{algorithm.name}", gap <= window,
                f"|mc-exact|={gap:.3g}", f"<= 4 stderr = {window:.3g}",
            ))
    return checks


def suite_reductions(problems: int = 100, seed: int = 11) -> list[Check]:
    """Exact reduction identities of the regularized second-phase fit."""
    rng = np.random.default_rng(seed)
    ok_closed = ok_zero = ok_stationary = True
    worst_closed = worst_zero = worst_stat = 0.0
    for _ in range(problems):
        n = int(rng.integers(3, 13))
        d = int(rng.integers(2, 11))
        x2 = rng.standard_normal((n, d))
        y2 = rng.standard_normal(n)
        w1 = Weights(rng.standard_normal(d))
        gamma = float(np.exp(rng.uniform(np.log(1e-4), np.log(10.0))))

        iso = Regularizer(form="diagonal", values=np.full(d, gamma))
        got = fit_grcl(x2, y2, w1, iso).w
        closed = np.linalg.solve(
            x2.T @ x2 + n * gamma * np.eye(d), x2.T @ y2 + n * gamma * w1.w
        )
        err = float(np.linalg.norm(got - closed) / (1 + np.linalg.norm(closed)))
        ok_closed &= err <= 1e-10
        worst_closed = max(worst_closed, err)

        zero_err = float(np.linalg.norm(
            fit_grcl(x2, y2, w1, zero_regularizer(d)).w - fit_ocl(x2, y2, w1).w
        ))
        ok_zero &= zero_err <= 1e-12
        worst_zero = max(worst_zero, zero_err)

        sigma = random_diagonal_regularizer(rng, d)
        w2 = fit_grcl(x2, y2, w1, sigma).w
        resid = x2.T @ (x2 @ w2 - y2) / n + sigma.values * (w2 - w1.w)
        scale = max(1.0, float(np.linalg.norm(x2.T @ y2) / n))
        stat = float(np.linalg.norm(resid) / scale)
        ok_stationary &= stat <= 1e-8
        worst_stat = max(worst_stat, stat)
    return [
        _check("reductions/l2rcl-closed-form", ok_closed, f"max err {worst_closed:.3g}", "<= 1e-10"),
        _check("reductions/zero-sigma-is-ocl", ok_zero, f"max err {worst_zero:.3g}", "<= 1e-12"),
        _check("reductions/stationarity", ok_stationary, f"max resid {worst_stat:.3g}", "<= 1e-8"),
    ]


def dominant_feature_instance(n: int) -> ProblemInstance:
    """Single dominant task-1 atom whose task-2 weight sits at the 1/n edge."""
    mu = np.array([1.0, 0.0])
    lam = np.array([1.0 / n, 1.0 - 1.0 / n])
    w = np.array([1.0, 0.0])
    return ProblemInstance(
        w_star=w, sigma2=1.0,
        g=make_spectrum(mu, one_hot=True), h=make_spectrum(lam, one_hot=True),
        design=Design.ONE_HOT,
    )


def suite_example1(reps: int = 400, seed: int = 5) -> list[Check]:
    """Constant-level failure of the unregularized algorithm at the 1/n edge."""
    checks = []
    for n in (50, 200, 1000):
        inst = dominant_feature_instance(n)
        ocl_est, _ = monte_carlo_expected_excess(inst, OCL(), n, reps, seed)
        checks.append(_check(
            f"example1/ocl n={n}", ocl_est.mean >= 0.2,
            f"excess={ocl_est.mean:.4g}", ">= 0.2",
        ))
        joint_est, _ = monte_carlo_expected_excess(inst, Joint(), n, reps, seed)
        joint_bias = theory.joint_theory_one_hot(inst, n).bias_surrogate
        cap = 5.0 / n + joint_bias
        checks.append(_check(
            f"example1/joint n={n}", joint_est.mean <= cap,
            f"excess={joint_est.mean:.4g}", f"<= 5/n + bias = {cap:.4g}",
        ))
    return checks


def blocked_memory_instance(k: int, n: int) -> ProblemInstance:
    """k+1 equally dominant task-1 features, all at the task-2 1/n edge."""
    d = k + 3
    mu = np.zeros(d)
    mu[: k + 1] = 1.0 / (k + 1)
    lam = np.zeros(d)
    lam[: k + 1] = 1.0 / n
    lam[k + 1] = 1.0 - (k + 1) / n
    w = np.zeros(d)
    w[: k + 1] = 1.0 / math.sqrt(k + 1)
    return ProblemInstance(
        w_star=w, sigma2=1.0,
        g=make_spectrum(mu, one_hot=True), h=make_spectrum(lam, one_hot=True),
        design=Design.ONE_HOT,
    )


def suite_example2(regularizers: int = 20, reps: int = 600, seed: int = 13,
                   k: int = 3, n: int = 500) -> list[Check]:
    """No size-k memory can cover k+1 mismatched dominant features."""
    rng = np.random.default_rng(seed)
    inst = blocked_memory_instance(k, n)
    checks = []
    for idx in range(regularizers):
        support = rng.choice(inst.d, size=k, replace=False)
        gamma = np.zeros(inst.d)
        gamma[support] = rng.uniform(0.1, 2.0, k)
        sigma = Regularizer(form="diagonal", values=gamma)
        estimate, _ = monte_carlo_expected_excess(
            inst, GRCL(regularizer=sigma), n, reps, seed + idx
        )
        checks.append(_check(
            f"example2/regularizer{idx}", estimate.mean >= 0.1,
            f"excess={estimate.mean:.4g}", ">= 0.1",
        ))
    return checks


_SUITE_RUNNERS = {
    "lemmas": suite_lemmas,
    "oracle": suite_oracle,
    "theorem1": suite_theorem1,
    "reductions": suite_reductions,
    "example1": suite_example1,
    "example2": suite_example2,
}


def run_verify(config: ExperimentConfig, suite: str | None = None) -> tuple[str, int]:
    """Run the selected verification suites and render a text report."""
    names = (suite,) if suite else config.suites
    for name in names:
        if name not in _SUITE_RUNNERS:
            raise ConfigParse(f"unknown verify suite {name!r}")
    lines = []
    failures = 0
    for name in names:
        for check in _SUITE_RUNNERS[name]():
            status = "PASS" if check.passed else "FAIL"
            failures += 0 if check.passed else 1
            lines.append(f"{status} {check.name}: {check.measured} (required {check.required})")
    lines.append(f"{'OK' if failures == 0 else 'FAILED'}: {failures} failing check(s)")
    return "\n".join(lines) + "\n", 0 if failures == 0 else 1


# -- entry point ----------------------------------------------------------------

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="grclab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("sweep-n", "sweep-k", "verify"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        if name == "verify":
            p.add_argument("--suite", default=None, choices=VERIFY_SUITES)
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        if args.command == "sweep-n":
            path = run_sweep_n(config)
            print(path)
            return 0
        if args.command == "sweep-k":
            path = run_sweep_k(config)
            print(path)
            return 0
        report, code = run_verify(config, args.suite)
        print(report, end="")
        return code
    except ConfigParse as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
