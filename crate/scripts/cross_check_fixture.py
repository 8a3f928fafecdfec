#!/usr/bin/env python3
"""Independent check of the committed E1 frontier fixture.

Rebuilds the reference model from its factors, enumerates every grid
channel for each encoder, evaluates rates and Bayes-optimal distortions by
direct summation over the full 8-variable tensor, and compares the result
with the CSV rows.

    python3 scripts/cross_check_fixture.py crates/rdregion/tests/fixtures/e1_frontier_d0.1_step0.05_w2.csv
"""

import csv
import itertools
import sys

import numpy as np

STEP_COUNT = 20  # grid step 0.05
TARGET = 0.1
TOL = 1e-9


def bsc(e):
    return np.array([[1 - e, e], [e, 1 - e]])


def source():
    """p[x1, x2, x3, z, f] from F ~ B(0.5), Z|F, X1|Z, X2|Z, X3|F."""
    pf = np.array([0.5, 0.5])
    return np.einsum("f,fz,za,zb,fc->abczf", pf, bsc(0.1), bsc(0.1), bsc(0.2), bsc(0.1))


def extend(p, chans):
    """p[x1, x2, x3, z, f, w1, w2, w3] for product channels."""
    return np.einsum("abczf,ai,bj,ck->abczfijk", p, *chans)


def entropy(t, keep):
    drop = tuple(i for i in range(t.ndim) if i not in keep)
    m = t.sum(axis=drop).ravel()
    m = m[m > 0]
    return float(-(m * np.log2(m)).sum())


def mi(t, a, b, c=()):
    h = lambda s: entropy(t, tuple(sorted(set(s)))) if s else 0.0
    return h(a + c) + h(b + c) - h(a + b + c) - h(c)


X, Z, F, W = (0, 1, 2), 3, 4, (5, 6, 7)


def rate(t, i):
    return mi(t, (X[i],), (W[i],)) - mi(t, (W[i],), (Z, F))


def distortion(t, i):
    """Hamming loss of the per-tuple MAP guess of X_i from (W1, W2, W3, Z, F)."""
    drop = tuple(k for k in X if k != i)
    m = t.sum(axis=drop)  # axes: x_i, z, f, w1, w2, w3
    m = np.moveaxis(m, 0, -1).reshape(-1, 2)
    return float((m.sum(axis=1) - m.max(axis=1)).sum())


def grid_channels():
    rows = [(k / STEP_COUNT, 1 - k / STEP_COUNT) for k in range(STEP_COUNT + 1)]
    for r0, r1 in itertools.product(rows, rows):
        yield np.array([r0, r1])


def main(path):
    p = source()
    const = np.array([[1.0], [1.0]])
    best = []
    for i in range(3):
        pts = []
        for ch in grid_channels():
            chans = [const, const, const]
            chans[i] = ch
            t = extend(p, chans)
            pts.append((max(rate(t, i), 0.0), distortion(t, i)))
        feasible = [r for r, d in pts if d <= TARGET + TOL]
        best.append(min(feasible))
    opt = sum(best)
    print(f"exhaustive per-encoder minima {best}, sum {opt:.6f}")

    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    assert rows, "fixture has no rows"
    for row in rows:
        chans = []
        for i in range(3):
            e = [float(row[f"p(W{i + 1}={w}|X{i + 1}={x})"]) for x in range(2) for w in range(2)]
            chans.append(np.array(e).reshape(2, 2))
        t = extend(p, chans)
        r = [max(rate(t, i), 0.0) for i in range(3)]
        d = [distortion(t, i) for i in range(3)]
        # the cross terms vanish, so the joint sum bound is the sum of singles
        r123 = mi(t, X, W, (Z, F))
        assert abs(r123 - sum(r)) < 1e-9, (r123, r)
        for k in range(3):
            assert abs(r[k] - float(row[f"R{k + 1}"])) < 5e-6, (k, r[k], row)
            assert abs(d[k] - float(row[f"D{k + 1}"])) < 5e-6, (k, d[k], row)
            assert d[k] <= TARGET + TOL
        assert abs(sum(r) - opt) < 1e-6, (sum(r), opt)
        assert abs(float(row["sum_rate"]) - opt) < 5e-6
    print(f"{len(rows)} fixture rows agree with direct summation")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/rdregion/tests/fixtures/e1_frontier_d0.1_step0.05_w2.csv")
