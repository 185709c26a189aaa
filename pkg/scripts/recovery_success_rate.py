"""Success rate and restart usage of phase recovery on |Haar U|^2 inputs.

    python3 scripts/recovery_success_rate.py --dims 3 4 5 6 --samples 200
"""

from __future__ import annotations

import argparse
import time
from collections import Counter

from bornlab.numerics import RngStream, haar_unitary
from bornlab.phase_recovery import RecoverySettings, RecoveryStatus, recover
from bornlab.stochastic import unistochastic_from_unitary


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", type=int, nargs="+", default=[3, 4, 5])
    parser.add_argument("--samples", type=int, default=200)
    parser.add_argument("--restarts", type=int, default=RecoverySettings.restarts)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    settings = RecoverySettings(restarts=args.restarts)
    root = RngStream(args.seed)
    print(f"{'N':>3} {'success':>8} {'mean restarts':>14} {'max restarts':>13} {'seconds':>8}")
    for n in args.dims:
        gen = root.substream(n).generator()
        used = Counter()
        hits = 0
        t0 = time.perf_counter()
        for k in range(args.samples):
            m = unistochastic_from_unitary(haar_unitary(n, gen))
            result = recover(m, settings, root.substream(1000 * n + k))
            hits += result.status is RecoveryStatus.SUCCESS
            used[result.restarts_used] += 1
        mean = sum(r * c for r, c in used.items()) / args.samples
        print(f"{n:>3} {hits / args.samples:>8.3f} {mean:>14.2f} {max(used):>13} {time.perf_counter() - t0:>8.1f}")


if __name__ == "__main__":
    main()
