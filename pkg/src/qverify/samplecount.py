"""Sample counts for sequential accept/reject verification.

A strategy that accepts the target with certainty and any orthogonal
state with probability at most q detects an eps-far state with
probability at least delta_eps = eps * (1 - q) per copy. Rejecting all
n copies of an honest device never happens, so the verifier needs

    n_exact = ceil( ln(1/delta) / ln(1/(1 - delta_eps)) )

copies to reach confidence 1 - delta, with the familiar asymptotic
n ~ (1/delta_eps) ln(1/delta). The same counts follow from binary
hypothesis testing: the best achievable type II exponent for
distinguishing per-copy acceptance p0 from p1 is the relative entropy
D(p0 || p1), and certainty acceptance (p0 = 1) collapses D to
ln(1/p1). For p0 < 1 the exponent degrades to roughly
delta_eps**2 / (2 p0 (1 - p0)), which is the quadratic cost of
frequency estimation versus the linear cost of certainty protocols.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UndefinedDivergenceError, ValidationError

THETA_SPECIAL_TOL = 1e-9
SPECIAL_THETAS = (0.0, math.pi / 4, math.pi / 2)


def _check_probability(name: str, value: float, open_zero=True, open_one=True):
    lo_ok = value > 0.0 if open_zero else value >= 0.0
    hi_ok = value < 1.0 if open_one else value <= 1.0
    if not (lo_ok and hi_ok):
        raise ValidationError(f"{name}={value!r} outside the required range")


def exact_count(delta_eps: float, delta: float) -> int:
    """Copies needed so (1 - delta_eps)**n <= delta, exactly."""
    _check_probability("delta_eps", delta_eps, open_one=False)
    _check_probability("delta", delta)
    if delta_eps == 1.0:
        return 1
    return math.ceil(-math.log(delta) / -math.log1p(-delta_eps))


def asymptotic_count(delta_eps: float, delta: float) -> float:
    """First order approximation ln(1/delta) / delta_eps."""
    _check_probability("delta_eps", delta_eps, open_one=False)
    _check_probability("delta", delta)
    return -math.log(delta) / delta_eps


@dataclass(frozen=True)
class SampleCountReport:
    """Copy counts for one verification setup.

    For certainty accepting protocols (p0 == 1) the exact count obeys
    the closed form above and this is validated on construction. The
    regime fields carry the two limiting approximations where they were
    computed; epsilon and q are None when the report came from a bare
    hypothesis test rather than a strategy.
    """

    delta: float
    delta_eps: float
    n_exact: int
    n_asymptotic: float
    method_label: str
    epsilon: float | None = None
    q: float | None = None
    p0: float = 1.0
    n_gap_regime: float | None = None
    n_certainty_regime: float | None = None

    def __post_init__(self):
        _check_probability("delta", self.delta)
        _check_probability("delta_eps", self.delta_eps, open_one=False)
        if self.n_exact < 1:
            raise ValidationError(f"n_exact={self.n_exact} must be positive")
        if self.p0 == 1.0:
            expected = exact_count(self.delta_eps, self.delta)
            if self.n_exact != expected:
                raise ValidationError(
                    f"n_exact={self.n_exact} disagrees with the exact "
                    f"formula value {expected} for a certainty protocol"
                )


@dataclass(frozen=True)
class HypothesisSpec:
    """Binary hypothesis test between per-copy acceptance p0 and p1.

    chi bounds the allowed type I error of the test; the asymptotic
    count depends only on D(p0 || p1), not on chi, so chi is carried for
    documentation of the test being approximated.
    """

    p0: float
    p1: float
    chi: float = 0.25

    def __post_init__(self):
        _check_probability("p0", self.p0, open_one=False)
        _check_probability("p1", self.p1, open_zero=False)
        if self.p1 >= self.p0:
            raise ValidationError(
                f"p1={self.p1!r} must lie strictly below p0={self.p0!r}"
            )
        if not 0.0 < self.chi < 0.5:
            raise ValidationError(f"chi={self.chi!r} outside (0, 0.5)")

    @classmethod
    def from_gap(cls, p0: float, delta_eps: float, chi: float = 0.25) -> "HypothesisSpec":
        return cls(p0=p0, p1=p0 - delta_eps, chi=chi)


def relative_entropy(a: float, b: float) -> float:
    """Binary relative entropy D(a || b) in nats.

    The endpoint limits are taken exactly: D(1 || b) = ln(1/b) and
    D(0 || b) = ln(1/(1-b)). Evaluating at b in {0, 1} with a != b
    diverges and raises UndefinedDivergenceError.
    """
    if not 0.0 <= a <= 1.0:
        raise ValidationError(f"a={a!r} outside [0, 1]")
    if not 0.0 <= b <= 1.0:
        raise ValidationError(f"b={b!r} outside [0, 1]")
    if b in (0.0, 1.0):
        if a == b:
            return 0.0
        raise UndefinedDivergenceError(f"D({a} || {b}) diverges")
    if a == 1.0:
        return -math.log(b)
    if a == 0.0:
        return -math.log1p(-b)
    return a * math.log(a / b) + (1.0 - a) * math.log((1.0 - a) / (1.0 - b))


def chernoff_stein_count(spec: HypothesisSpec, delta: float) -> SampleCountReport:
    """Copies needed to push type II error below delta for spec.

    n_exact = ceil(ln(1/delta) / D(p0 || p1)). For p0 == 1 the
    divergence is computed as -log1p(-delta_eps), which is both the
    exact a -> 1 limit and numerically identical to the certainty
    protocol count formula. Both limiting-regime approximations are
    reported: the certainty regime (1/gap) ln(1/delta) and the
    frequency estimation regime 2 p0 (1-p0) / gap**2 * ln(1/delta).
    """
    _check_probability("delta", delta)
    gap = spec.p0 - spec.p1
    if spec.p0 == 1.0:
        divergence = -math.log1p(-gap)
        regime = "linear regime"
    else:
        divergence = relative_entropy(spec.p0, spec.p1)
        regime = "quadratic regime"
    log_conf = -math.log(delta)
    return SampleCountReport(
        delta=delta,
        delta_eps=gap,
        n_exact=math.ceil(log_conf / divergence),
        n_asymptotic=log_conf / divergence,
        method_label=f"chernoff-stein ({regime})",
        p0=spec.p0,
        n_gap_regime=2.0 * spec.p0 * (1.0 - spec.p0) / gap**2 * log_conf,
        n_certainty_regime=log_conf / gap,
    )


@dataclass(frozen=True)
class Fig1Row:
    theta: float
    epsilon: float
    n_exact: int
    n_asymptotic: float
    family: str


@dataclass(frozen=True)
class ReferenceCurves:
    """Illustrative 1/eps**2 comparison curves for figure2_data.

    The proportionality constants are configuration inputs, not derived
    values; the note is propagated into output metadata so nobody reads
    the reference curves as measured costs.
    """

    c_tomography: float = 1.0
    c_fidelity: float = 1.0
    note: str = (
        "reference curves show illustrative 1/eps^2 scaling only; "
        "constants are configuration inputs"
    )


@dataclass(frozen=True)
class Fig2Row:
    epsilon: float
    n_local: int
    n_global: int
    n_tomo_ref: float
    n_fid_ref: float


def default_theta_grid(points: int = 200) -> np.ndarray:
    """Evenly spaced theta grid over [0, pi/2] with special values present.

    The grid point nearest each of {0, pi/4, pi/2} is snapped to the
    special value exactly (ties resolve to the lower index) so the grid
    always contains one row per special family.
    """
    if points < 4:
        raise ValidationError("theta grid needs at least 4 points")
    grid = np.linspace(0.0, math.pi / 2, points)
    for special in SPECIAL_THETAS:
        idx = int(np.argmin(np.abs(grid - special)))
        grid[idx] = special
    return grid


def theta_family(theta: float) -> str:
    """Which construction serves a given target angle."""
    if abs(theta) <= THETA_SPECIAL_TOL or abs(theta - math.pi / 2) <= THETA_SPECIAL_TOL:
        return "product"
    if abs(theta - math.pi / 4) <= THETA_SPECIAL_TOL:
        return "bell"
    return "two-qubit-optimal"


def _strategy_for_theta(theta: float):
    # Imported here: the strategy module depends on this module's report
    # types, so the figure helpers resolve their dependency lazily.
    from . import strategy

    family = theta_family(theta)
    if family == "product":
        which = "zero" if abs(theta) <= math.pi / 4 else "one"
        return strategy.product_state_strategy(which), family
    if family == "bell":
        return strategy.bell_strategy(), family
    return strategy.two_qubit_optimal(theta), family


def figure1_data(
    epsilon: float, delta: float, thetas: np.ndarray | None = None
) -> list[Fig1Row]:
    """Copy counts across target angles, with per-family dispatch.

    Angles within THETA_SPECIAL_TOL of {0, pi/4, pi/2} use their
    special construction (product projector or the three setting parity
    strategy), everything else the four setting optimum, so the table
    exhibits the discontinuous drops at the special angles.
    """
    from .strategy import exact_sample_count

    if thetas is None:
        thetas = default_theta_grid()
    rows = []
    for theta in np.asarray(thetas, dtype=float):
        built, family = _strategy_for_theta(float(theta))
        report = exact_sample_count(built, epsilon, delta)
        rows.append(
            Fig1Row(
                theta=float(theta),
                epsilon=epsilon,
                n_exact=report.n_exact,
                n_asymptotic=report.n_asymptotic,
                family=family,
            )
        )
    return rows


def figure2_data(
    theta: float,
    delta: float,
    epsilons: np.ndarray | None = None,
    reference: ReferenceCurves = ReferenceCurves(),
) -> list[Fig2Row]:
    """Local versus global counts over an epsilon sweep at fixed theta.

    n_local uses the per-theta dispatch of figure1_data; n_global is the
    count for the best strategy with no locality restriction, whose pass
    operator is the target projector itself (delta_eps = epsilon). The
    two reference columns are purely illustrative 1/eps**2 curves
    controlled by the ReferenceCurves constants.
    """
    if epsilons is None:
        epsilons = np.logspace(-4, -1, 61)
    built, _ = _strategy_for_theta(float(theta))
    from .strategy import exact_sample_count

    rows = []
    for eps in np.asarray(epsilons, dtype=float):
        eps = float(eps)
        local = exact_sample_count(built, eps, delta)
        rows.append(
            Fig2Row(
                epsilon=eps,
                n_local=local.n_exact,
                n_global=exact_count(eps, delta),
                n_tomo_ref=reference.c_tomography / eps**2,
                n_fid_ref=reference.c_fidelity / eps**2,
            )
        )
    return rows


FIG1_COLUMNS = ("theta", "epsilon", "n_exact", "n_asymptotic", "family")
FIG2_COLUMNS = ("epsilon", "n_local", "n_global", "n_tomo_ref", "n_fid_ref")


def fig1_csv_rows(rows: list[Fig1Row]) -> list[tuple]:
    return [(r.theta, r.epsilon, r.n_exact, r.n_asymptotic, r.family) for r in rows]


def fig2_csv_rows(rows: list[Fig2Row]) -> list[tuple]:
    return [
        (r.epsilon, r.n_local, r.n_global, r.n_tomo_ref, r.n_fid_ref) for r in rows
    ]
