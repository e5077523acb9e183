"""Monte Carlo simulation of the sequential accept/reject protocol.

One copy at a time, the verifier draws a measurement setting j with
probability mu_j, applies its binary test to the copy the device
supplied, and rejects the whole run at the first failed test. For a
device emitting sigma_i on copy i the acceptance probability is the
product of tr(Omega sigma_i); for the worst eps-far IID device this is
(1 - delta_eps)^n, the quantity the copy counts are calibrated
against.

Reproducibility: trials use a counter based generator keyed by
(seed, trial index), and each copy consumes two uniforms at fixed
positions of that trial's stream (setting choice, then outcome), so
results are bit identical regardless of chunking or parallel
scheduling, and early rejection cannot shift later copies' draws.

Exactness at the edges: pass probabilities within 1e-10 of 0 or 1 are
clamped to exactly 0 or 1 before sampling. An honest device therefore
never fails a strategy that fixes its target, no matter how many
copies are measured; floating point noise in the projectors cannot
produce spurious rejections.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .adversary import AdversaryState
from .errors import ValidationError
from .qcore import TOL_DERIVED, TOL_INPUT, HermitianOperator, Ket
from .strategy import Strategy

CERTAINTY_TOL = 1e-10
WILSON_Z99 = 2.5758293035489004
_MASK64 = (1 << 64) - 1
_CHUNK = 1 << 16


class DeviceMode(enum.Enum):
    HONEST = "honest"
    IID_ADVERSARY = "iid-adversary"
    VARYING_ADVERSARY = "varying-adversary"
    CUSTOM = "custom"


def _as_density(obj, dim: int) -> np.ndarray:
    if isinstance(obj, AdversaryState):
        arr = obj.sigma.entries
        if arr.shape[0] != dim:
            raise ValidationError("device state dimension mismatch")
        return arr
    if isinstance(obj, Ket):
        obj = obj.density()
    if isinstance(obj, HermitianOperator):
        arr = obj.entries
    else:
        arr = HermitianOperator(np.asarray(obj, dtype=complex)).entries
    if arr.shape[0] != dim:
        raise ValidationError("device state dimension mismatch")
    vals = np.linalg.eigvalsh(arr)
    if vals[0] < -TOL_DERIVED:
        raise ValidationError(f"device state has eigenvalue {float(vals[0])!r}")
    tr = float(np.trace(arr).real)
    if abs(tr - 1.0) > TOL_INPUT:
        raise ValidationError(f"device state trace {tr!r} is not 1")
    return arr


@dataclass(frozen=True, eq=False)
class DeviceModel:
    """What the device hands over on each copy.

    Honest devices emit the target itself. IID adversaries emit one
    fixed density matrix; varying adversaries emit supplier(copy_index)
    deterministically, so runs replay exactly. When epsilon is given,
    every emitted state must respect the promise gap
    fidelity <= 1 - epsilon (custom mode skips that constraint).
    """

    mode: DeviceMode
    target: Ket
    sigma: np.ndarray | None = None
    supplier: Callable[[int], object] | None = None
    epsilon: float | None = None

    def _check_promise(self, arr: np.ndarray, where: str) -> None:
        if self.epsilon is None:
            return
        psi = self.target.amplitudes
        fid = float(np.real(np.vdot(psi, arr @ psi)))
        if fid > 1.0 - self.epsilon + 1e-12:
            raise ValidationError(
                f"{where} has fidelity {fid!r} above the promised 1 - epsilon"
            )

    def density_at(self, copy_index: int) -> np.ndarray:
        if self.mode is DeviceMode.HONEST:
            psi = self.target.amplitudes
            return np.outer(psi, psi.conj())
        if self.mode is DeviceMode.IID_ADVERSARY:
            return self.sigma
        arr = _as_density(self.supplier(copy_index), self.target.dim)
        self._check_promise(arr, f"supplied state for copy {copy_index}")
        return arr


def honest_device(target: Ket) -> DeviceModel:
    return DeviceModel(mode=DeviceMode.HONEST, target=target)


def iid_adversary(target: Ket, state, epsilon: float | None = None) -> DeviceModel:
    device = DeviceModel(
        mode=DeviceMode.IID_ADVERSARY,
        target=target,
        sigma=_as_density(state, target.dim),
        epsilon=epsilon,
    )
    device._check_promise(device.sigma, "adversary state")
    return device


def varying_adversary(
    target: Ket, supplier: Callable[[int], object], epsilon: float | None = None
) -> DeviceModel:
    return DeviceModel(
        mode=DeviceMode.VARYING_ADVERSARY,
        target=target,
        supplier=supplier,
        epsilon=epsilon,
    )


def custom_device(target: Ket, supplier: Callable[[int], object]) -> DeviceModel:
    return DeviceModel(mode=DeviceMode.CUSTOM, target=target, supplier=supplier)


@dataclass(frozen=True)
class RunResult:
    """One protocol run: n_copies measured unless rejected earlier."""

    n_copies: int
    accepted: bool
    first_failure_index: int | None
    rng_seed: int

    def __post_init__(self):
        if self.accepted != (self.first_failure_index is None):
            raise ValidationError("accepted must mean no failure index")
        if self.first_failure_index is not None and not (
            0 <= self.first_failure_index < self.n_copies
        ):
            raise ValidationError("failure index outside [0, n_copies)")


@dataclass(frozen=True)
class EnsembleStats:
    """Acceptance frequency over independent trials with a 99% interval."""

    trials: int
    accept_rate: float
    wilson_low: float
    wilson_high: float

    def __post_init__(self):
        if not self.wilson_low - 1e-12 <= self.accept_rate <= self.wilson_high + 1e-12:
            raise ValidationError("accept rate escapes its Wilson interval")


def wilson_interval(
    successes: int, trials: int, z: float = WILSON_Z99
) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    if not 0 <= successes <= trials:
        raise ValidationError("successes outside [0, trials]")
    p_hat = successes / trials
    denom = 1.0 + z * z / trials
    center = (p_hat + z * z / (2.0 * trials)) / denom
    half = (
        z
        * math.sqrt(p_hat * (1.0 - p_hat) / trials + z * z / (4.0 * trials * trials))
        / denom
    )
    # at the endpoints the interval reaches 0 or 1 exactly; evaluate
    # there directly so rounding cannot exclude the point estimate
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == trials else min(1.0, center + half)
    return low, high


def _clamp_certainties(probs: np.ndarray) -> np.ndarray:
    out = np.array(probs, dtype=float)
    out[np.abs(out - 1.0) <= CERTAINTY_TOL] = 1.0
    out[np.abs(out) <= CERTAINTY_TOL] = 0.0
    if np.any(out < 0.0) or np.any(out > 1.0):
        raise ValidationError("pass probability outside [0, 1]")
    return out


@dataclass(frozen=True, eq=False)
class _Plan:
    """Precomputed sampling tables shared by all trials of a run."""

    cumulative: np.ndarray
    weights: np.ndarray
    probs: np.ndarray
    per_copy: bool
    labels: tuple[str, ...]


def _build_plan(strategy: Strategy, device: DeviceModel, n: int) -> _Plan:
    if device.target.dim != strategy.dim:
        raise ValidationError("device target and strategy dimensions differ")
    if float(np.max(np.abs(device.target.amplitudes - strategy.target.amplitudes))) > 0:
        raise ValidationError("device target differs from strategy target")
    weights = np.array([s.weight for s in strategy.settings], dtype=float)
    cum = np.cumsum(weights)
    cum[-1] = 1.0
    stack = np.stack([s.projector.entries for s in strategy.settings])
    if device.mode in (DeviceMode.HONEST, DeviceMode.IID_ADVERSARY):
        sigma = device.density_at(0)
        row = np.real(np.einsum("kij,ji->k", stack, sigma))
        probs = _clamp_certainties(row)
        per_copy = False
    else:
        rows = np.empty((n, len(weights)), dtype=float)
        for i in range(n):
            sigma = device.density_at(i)
            rows[i] = np.real(np.einsum("kij,ji->k", stack, sigma))
        probs = _clamp_certainties(rows)
        per_copy = True
    return _Plan(
        cumulative=cum,
        weights=weights,
        probs=probs,
        per_copy=per_copy,
        labels=tuple(s.label for s in strategy.settings),
    )


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    key = np.array([int(seed) & _MASK64, int(trial) & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _run_plan(
    plan: _Plan, n: int, rng: np.random.Generator, draws_out: list | None = None
) -> int | None:
    """First failing copy index, or None when all n copies pass."""
    for start in range(0, n, _CHUNK):
        count = min(_CHUNK, n - start)
        u = rng.random(2 * count)
        u_set = u[0::2]
        u_out = u[1::2]
        drawn = np.searchsorted(plan.cumulative, u_set, side="right")
        if plan.per_copy:
            pass_p = plan.probs[np.arange(start, start + count), drawn]
        else:
            pass_p = plan.probs[drawn]
        if draws_out is not None:
            draws_out.append(drawn)
        fails = u_out >= pass_p
        if fails.any():
            return start + int(np.argmax(fails))
    return None


def run_protocol(
    strategy: Strategy, device: DeviceModel, n: int, seed: int, trial: int = 0
) -> RunResult:
    """Simulate one sequential run of n copies, stopping at first failure."""
    if n < 1:
        raise ValidationError("n must be at least 1")
    plan = _build_plan(strategy, device, n)
    failure = _run_plan(plan, n, _trial_rng(seed, trial))
    return RunResult(
        n_copies=n,
        accepted=failure is None,
        first_failure_index=failure,
        rng_seed=int(seed) & _MASK64,
    )


def estimate_power(
    strategy: Strategy,
    device: DeviceModel,
    n: int,
    trials: int,
    seed: int,
    sink: Callable[[dict], None] | None = None,
    record_labels: bool = False,
) -> EnsembleStats:
    """Acceptance frequency over independent trials.

    Each trial t replays run_protocol(..., trial=t) exactly. When sink
    is given it receives one JSON ready dict per trial; setting labels
    are recorded only on request because they dominate transcript size.
    """
    if n < 1:
        raise ValidationError("n must be at least 1")
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    plan = _build_plan(strategy, device, n)
    accepted_count = 0
    for t in range(trials):
        draws: list | None = [] if (sink is not None and record_labels) else None
        failure = _run_plan(plan, n, _trial_rng(seed, t), draws)
        accepted = failure is None
        if accepted:
            accepted_count += 1
        if sink is not None:
            record = {
                "trial": t,
                "n": n,
                "accepted": accepted,
                "first_failure_index": failure,
            }
            if record_labels:
                flat = np.concatenate(draws) if draws else np.array([], dtype=int)
                stop = n if failure is None else failure + 1
                record["setting_labels_drawn"] = [
                    plan.labels[j] for j in flat[:stop]
                ]
            sink(record)
    low, high = wilson_interval(accepted_count, trials)
    return EnsembleStats(
        trials=trials,
        accept_rate=accepted_count / trials,
        wilson_low=low,
        wilson_high=high,
    )


def predicted_acceptance(strategy: Strategy, device: DeviceModel, n: int) -> float:
    """Closed form product of per copy acceptances tr(Omega sigma_i).

    Uses the same clamped tables as the sampler, so an honest device
    predicts exactly 1 and the worst case IID adversary predicts
    exactly (1 - delta_eps)^n.
    """
    if n < 1:
        raise ValidationError("n must be at least 1")
    plan = _build_plan(strategy, device, n)
    # the sampler forces its cumulative table to end at 1, so weight
    # rounding cannot push a certain accept below (or above) certainty;
    # clamp the aggregate the same way
    per_copy = _clamp_certainties(np.atleast_1d(plan.probs @ plan.weights))
    if plan.per_copy:
        return float(np.prod(per_copy))
    return float(per_copy[0]) ** n
