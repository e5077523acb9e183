"""Monte Carlo check of the sequential protocol against its closed form.

Runs the three-setting Bell strategy against the worst-case IID source
at one or more (epsilon, n) points and prints the empirical acceptance
next to (1 - 2 eps / 3)^n with a 99% Wilson interval.
"""

import argparse
import time

from qverify.adversary import worst_case_state
from qverify.protocol import (
    estimate_power,
    iid_adversary,
    predicted_acceptance,
)
from qverify.strategy import bell_strategy


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--point", nargs=2, type=float, action="append", metavar=("EPS", "N"),
        help="an (epsilon, n) pair; repeatable (default 0.1 100 and 0.05 300)",
    )
    parser.add_argument("--trials", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    points = args.point or [(0.1, 100), (0.05, 300)]

    strat = bell_strategy()
    print(
        f"{'eps':>6} {'n':>6} {'predicted':>12} {'empirical':>12} "
        f"{'wilson 99%':>25} {'time':>7}"
    )
    for eps, n in points:
        n = int(n)
        device = iid_adversary(strat.target, worst_case_state(strat, eps), eps)
        start = time.perf_counter()
        stats = estimate_power(
            strat, device, n=n, trials=args.trials, seed=args.seed
        )
        elapsed = time.perf_counter() - start
        predicted = predicted_acceptance(strat, device, n)
        interval = f"[{stats.wilson_low:.6f}, {stats.wilson_high:.6f}]"
        flag = "" if stats.wilson_low <= predicted <= stats.wilson_high else "  <-- outside"
        print(
            f"{eps:>6.3f} {n:>6d} {predicted:>12.6e} "
            f"{stats.accept_rate:>12.6e} {interval:>25} {elapsed:>6.2f}s{flag}"
        )


if __name__ == "__main__":
    main()
