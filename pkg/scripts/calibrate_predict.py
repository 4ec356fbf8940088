"""Fit the predictor's upper envelopes against measured transpiled counts.

Sweeps the fit grid for m in [4, 12], solves one small LP per family and
metric (minimize the summed relative prediction subject to prediction >= measured,
coefficients >= 0) and prints a FITS table to paste into qencode/predict.py.

    python3 scripts/calibrate_predict.py > fits.txt
"""

import argparse
import time
import warnings
from collections import defaultdict

import numpy as np
from scipy.optimize import linprog

from qencode import patterns as P
from qencode.encoding import encode
from qencode.predict import _features, exact_counts, fit_grid

METRICS = ("gate_count_1q", "gate_count_2q", "circuit_depth")


def measure(pattern, N):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        _, info = encode(pattern, N)
    return [getattr(info, k) for k in METRICS]


def envelope(X, y):
    # minimize the summed relative prediction so small cases are not sacrificed to large ones
    res = linprog((X / np.maximum(y, 1)[:, None]).sum(axis=0), A_ub=-X, b_ub=-y, bounds=[(0, None)] * X.shape[1], method="highs")
    if not res.success:
        raise RuntimeError(res.message)
    return res.x


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--m-min", type=int, default=4)
    ap.add_argument("--m-max", type=int, default=12)
    args = ap.parse_args()
    rows = defaultdict(list)
    t0 = time.time()
    for m in range(args.m_min, args.m_max + 1):
        N = 1 << m
        for pat in fit_grid(m):
            if exact_counts(pat, N) is not None:
                continue
            rows[pat.name].append((_features(pat, N), measure(pat, N)))
        print(f"m={m} done ({time.time() - t0:.1f}s)", flush=True)
    print("FITS: dict[str, tuple[tuple[float, ...], ...]] = {")
    for name, data in rows.items():
        X = np.array([f for f, _ in data], dtype=float)
        Y = np.array([y for _, y in data], dtype=float)
        coeffs = []
        for j in range(3):
            c = envelope(X, Y[:, j])
            coeffs.append(tuple(round(float(v), 4) + 0.0 for v in c))
        ratio = max(float(np.max(X @ np.array(coeffs[j]) / np.maximum(Y[:, j], 1))) for j in range(3))
        print(f'    "{name}": {tuple(coeffs)},  # worst over-prediction {ratio:.2f}x')
    print("}")


if __name__ == "__main__":
    main()
