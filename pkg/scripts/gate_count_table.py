"""Gate counts for the documented example patterns, before and after transpiling.

    python3 scripts/gate_count_table.py [--validate]
"""

import argparse
import cmath
import math

from qencode import patterns as P
from qencode.encoding import encode
from qencode.predict import predict_gates

EXAMPLES = [
    ("Sparse([(19, 1)])", P.Sparse([(19, 1.0)]), 64),
    ("Sparse([(1, 3), (6, -4)])", P.Sparse([(1, 3.0), (6, -4.0)]), 8),
    ("Step(4)", P.Step(4), 8),
    ("Square(2, 6)", P.Square(2, 6), 8),
    ("Walsh(k=2)", P.Walsh(2, 1, 4), 8),
    ("Geometric(0.5)", P.Geometric(0.5), 8),
    ("Geometric(e^0.7i)", P.Geometric(cmath.exp(0.7j)), 64),
    ("Geometric(0.8, k_s=5)", P.Geometric(0.8, 5), 16),
    ("Hamming(0.5)", P.Hamming(0.5), 16),
    ("Staircase(0.5)", P.Staircase(0.5), 16),
    ("Dicke(2)", P.Dicke(2), 16),
    ("Polynomial([0, 1])", P.Polynomial([0, 1]), 16),
    ("Fourier([(1, 1, 0)])", P.Fourier([(1, 1.0, 0.0)]), 16),
    ("Sum(Square, 3*Square)", P.Sum([(1, P.Square(0, 8)), (3, P.Square(8, 16))]), 16),
    ("Partition(Sparse, Geometric)", P.Partition([P.Sparse([(2, 1), (5, 1), (7, 1)]), P.Geometric(0.8, 11)]), 256),
    ("Tensor(Step, Step)", P.Tensor([(P.Step(3, math.sqrt(2)), 4), (P.Step(3), 4)]), 16),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--validate", action="store_true")
    args = ap.parse_args()
    head = f"{'pattern':32} {'N':>5} {'pre':>5} {'1q':>6} {'2q':>6} {'depth':>6} {'pred 1q/2q/depth':>18} exact"
    print(head)
    print("-" * len(head))
    for label, pat, N in EXAMPLES:
        _, info = encode(pat, N, validate=args.validate)
        pr = predict_gates(pat, N)
        pred = f"{pr.gate_count_1q}/{pr.gate_count_2q}/{pr.circuit_depth}"
        print(
            f"{label:32} {N:>5} {info.gate_count:>5} {info.gate_count_1q:>6} {info.gate_count_2q:>6}"
            f" {info.circuit_depth:>6} {pred:>18} {'yes' if pr.exact else 'no'}"
        )


if __name__ == "__main__":
    main()
