#!/usr/bin/env python3
"""Independent DMP reference used to freeze expected values in test_driver.cpp.

Reads a matrix CSV, runs sequential DMP factorisation from the augmented
identity codebook with S terms per row and the unbounded power-of-two alphabet,
and prints per-step SQNR (dB) and the per-row residuals of the first step.

    python3 dmp_reference.py matrix.csv --steps 10 --s 2
"""
import argparse
import math

import numpy as np


def pow2_candidates(alpha):
    if alpha == 0.0:
        return []
    e = math.floor(math.log2(abs(alpha)))
    # guard against log2 rounding near exact powers
    while 2.0 ** e > abs(alpha):
        e -= 1
    while 2.0 ** (e + 1) <= abs(alpha):
        e += 1
    sign = 1.0 if alpha > 0 else -1.0
    if 2.0 ** e == abs(alpha):
        return [sign * 2.0 ** e]
    return [sign * 2.0 ** e, sign * 2.0 ** (e + 1)]


def dmp_row(a, C, S):
    omega = np.zeros(C.shape[0])
    for _ in range(S):
        r = a - omega @ C
        cur = float(r @ r)
        best = None
        for j in range(C.shape[0]):
            nrm = float(C[j] @ C[j])
            if nrm == 0.0:
                continue
            for v in pow2_candidates(float(r @ C[j]) / nrm):
                trial = omega.copy()
                trial[j] += v
                e = a - trial @ C
                sq = float(e @ e)
                if best is None or sq < best[0]:
                    best = (sq, trial)
        if best is None or not best[0] < cur:
            break
        omega = best[1]
    return omega


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("matrix")
    ap.add_argument("--steps", type=int, default=10)
    ap.add_argument("--s", type=int, default=2)
    args = ap.parse_args()
    A = np.loadtxt(args.matrix, delimiter=",", ndmin=2)
    N, K = A.shape
    C = np.zeros((N, K))
    C[:K, :K] = np.eye(K)
    signal = float(np.sum(A * A))
    for step in range(1, args.steps + 1):
        W = np.array([dmp_row(A[n], C, args.s) for n in range(N)])
        C = W @ C
        if step == 1:
            res = np.sqrt(np.sum((A - C) ** 2, axis=1))
            print("step1_row_residuals", " ".join(repr(float(x)) for x in res))
        err = float(np.sum((A - C) ** 2))
        print("step", step, "sqnr_db", repr(10 * math.log10(signal / err)))


if __name__ == "__main__":
    main()
