"""Log-log slope of transpiled gate totals against m, per family tier.

O(m) families should stay at slope <= 1.2 and the quadratic tier
(Fourier, general Square, degree-2 Polynomial) at <= 2.3.

    python3 scripts/scaling_tiers.py --ms 6 8 10 12
"""

import argparse
import time
import warnings

import numpy as np

from qencode import patterns as P
from qencode.encoding import encode

LINEAR = {
    "hamming": lambda N: P.Hamming(0.7),
    "walsh": lambda N: P.Walsh(1),
    "staircase": lambda N: P.Staircase(0.5),
    "step": lambda N: P.Step(N // 2 + N // 8 + 3),
    "geometric": lambda N: P.Geometric(0.97),
    "square-aligned": lambda N: P.Square(N // 2, N),
    "sparse-1": lambda N: P.Sparse([(N - 1, 1.0)]),
    "dicke-1": lambda N: P.Dicke(1),
    "poly-d1": lambda N: P.Polynomial([0, 1]),
}
QUADRATIC = {
    "fourier": lambda N: P.Fourier([(1, 1.0, 0.0)]),
    "square-general": lambda N: P.Square(3, N // 2 + 5),
    "poly-d2": lambda N: P.Polynomial([0, 4, -4]),
}
LIMITS = {"linear": 1.2, "quadratic": 2.3}


def slope(ms, totals) -> float:
    return float(np.polyfit(np.log(ms), np.log(np.maximum(totals, 1)), 1)[0])


def measure(ms):
    rows = []
    for tier, fams in (("linear", LINEAR), ("quadratic", QUADRATIC)):
        for name, make in fams.items():
            totals = []
            for m in ms:
                N = 1 << m
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    _, info = encode(make(N), N)
                totals.append(info.gate_count_1q + info.gate_count_2q)
            rows.append((tier, name, totals, slope(ms, totals)))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--ms", type=int, nargs="+", default=[6, 8, 10, 12])
    args = ap.parse_args()
    t0 = time.time()
    for tier, name, totals, s in measure(args.ms):
        verdict = "ok" if s <= LIMITS[tier] else "over"
        print(f"{tier:9} {name:15} {str(totals):28} slope {s:5.2f} (limit {LIMITS[tier]}) {verdict}")
    print(f"elapsed {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
