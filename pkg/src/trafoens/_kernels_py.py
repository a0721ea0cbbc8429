"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def rps_rows(F, y):
    F = np.asarray(F, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    K = F.shape[1]
    step = (np.arange(K - 1)[np.newaxis, :] >= y[:, np.newaxis]).astype(np.float64)
    d = F[:, : K - 1] - step
    return np.sum(d * d, axis=1) / (K - 1)


def binary_regret_scan(avg_fail, avg_success, count, rho):
    p = (np.arange(count) + 1) * rho
    r = np.maximum(-np.log(p) - avg_success, -np.log(1.0 - p) - avg_fail)
    j = int(np.argmin(r))
    return j, float(r[j])


def rps3_regret_scan(avg, n_steps):
    avg = np.asarray(avg, dtype=np.float64)
    grid = np.arange(n_steps + 1) / n_steps
    f1, f2 = np.meshgrid(grid, grid, indexing="ij")
    a = f1 - 1.0
    b = f2 - 1.0
    r0 = 0.5 * (a * a + b * b) - avg[0]
    r1 = 0.5 * (f1 * f1 + b * b) - avg[1]
    r2 = 0.5 * (f1 * f1 + f2 * f2) - avg[2]
    r = np.maximum(np.maximum(r0, r1), r2)
    r[np.tril_indices(n_steps + 1, -1)] = np.inf
    flat = int(np.argmin(r))
    i, j = divmod(flat, n_steps + 1)
    return i, j, float(r[i, j])
