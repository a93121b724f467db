"""Derive the maxquad minimizer used as a test fixture.

Builds the classical 10-dimensional, 5-piece maxquad instance independently of
the C++ code, solves min_x max_k (x'A_k x - b_k'x) with a conic solver, then
polishes the active-set KKT system with Newton's method.

Usage: python3 tools/derive_maxquad_opt.py > tests/fixtures/maxquad_opt.json
"""
import json
import math

import cvxpy as cp
import numpy as np

N, M = 10, 5


def maxquad():
    mats, vecs = [], []
    for k in range(1, M + 1):
        a = np.zeros((N, N))
        for i in range(1, N + 1):
            for j in range(i + 1, N + 1):
                v = math.exp(i / j) * math.cos(i * j) * math.sin(k)
                a[i - 1, j - 1] = v
                a[j - 1, i - 1] = v
        for i in range(1, N + 1):
            a[i - 1, i - 1] = (i / 10.0) * abs(math.sin(k)) + np.sum(np.abs(a[i - 1])) - abs(a[i - 1, i - 1])
        b = np.array([math.exp(i / k) * math.sin(i * k) for i in range(1, N + 1)])
        mats.append(a)
        vecs.append(b)
    return mats, vecs


def main():
    mats, vecs = maxquad()
    x = cp.Variable(N)
    t = cp.Variable()
    cons = [cp.quad_form(x, a) - b @ x <= t for a, b in zip(mats, vecs)]
    cp.Problem(cp.Minimize(t), cons).solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    xv = np.array(x.value)
    vals = np.array([xv @ a @ xv - b @ xv for a, b in zip(mats, vecs)])
    active = [k for k in range(M) if vals.max() - vals[k] < 1e-5]
    lam = np.array([max(float(np.ravel(c.dual_value)[0]), 0.0) for c in cons])[active]
    lam /= lam.sum()
    tv = vals.max()
    # Newton on F(x, t, lam) = [sum lam_k grad_k ; f_k(x) - t ; sum lam - 1]
    na = len(active)
    for _ in range(50):
        grads = [2 * mats[k] @ xv - vecs[k] for k in active]
        fk = [xv @ mats[k] @ xv - vecs[k] @ xv for k in active]
        res = np.concatenate([sum(l * g for l, g in zip(lam, grads)), np.array(fk) - tv, [lam.sum() - 1]])
        if np.linalg.norm(res) < 1e-15:
            break
        jac = np.zeros((N + na + 1, N + na + 1))
        jac[:N, :N] = sum(l * 2 * mats[k] for l, k in zip(lam, active))
        for c, g in enumerate(grads):
            jac[:N, N + 1 + c] = g
            jac[N + c, :N] = g
            jac[N + c, N] = -1.0
            jac[N + na, N + 1 + c] = 1.0
        step = np.linalg.solve(jac, -res)
        xv = xv + step[:N]
        tv = tv + step[N]
        lam = lam + step[N + 1:]
    fval = max(xv @ a @ xv - b @ xv for a, b in zip(mats, vecs))
    print(json.dumps({
        "provenance": "tools/derive_maxquad_opt.py: conic solve + active-set KKT Newton polish",
        "point": [float(v) for v in xv],
        "value": float(fval),
        "active": [int(k) for k in active],
        "multipliers": [float(v) for v in lam],
    }, indent=2))


if __name__ == "__main__":
    main()
