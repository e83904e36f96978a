"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba versions are plain loops compiled with ``@njit``; the numpy versions
vectorize over the batch axis and loop only over the (small) antenna axis.
Both use Neumaier-compensated summation for the complex channel sum, so they
agree to rounding.

Set ``PASS_MA_NO_NUMBA=1`` to force the numpy path (or if numba is missing).
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_DISABLED = os.environ.get("PASS_MA_NO_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")
HAVE_NUMBA = numba is not None
BACKEND = "numba" if (HAVE_NUMBA and not _DISABLED) else "numpy"


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _np_gain_batch(xp, xu, D, k0, kg, eta):
    xp = np.atleast_2d(np.asarray(xp, dtype=np.float64))
    m, n = xp.shape
    re = np.zeros(m)
    im = np.zeros(m)
    cre = np.zeros(m)
    cim = np.zeros(m)
    for i in range(n):
        x = xp[:, i]
        dist = np.sqrt((xu - x) ** 2 + D * D)
        phase = k0 * dist + kg * x
        amp = eta / dist
        for acc, comp, term in ((re, cre, amp * np.cos(phase)), (im, cim, -amp * np.sin(phase))):
            t = acc + term
            big = np.abs(acc) >= np.abs(term)
            comp += np.where(big, (acc - t) + term, (term - t) + acc)
            acc[:] = t
    re += cre
    im += cim
    return re * re + im * im


def _np_scheme_power(coef, g1, g2):
    out = np.full(np.broadcast(g1, g2).shape, np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        for r in range(coef.shape[0]):
            t1 = np.where(coef[r, 0] == 0.0, 0.0, coef[r, 0] / g1)
            t2 = np.where(coef[r, 1] == 0.0, 0.0, coef[r, 1] / g2)
            out = np.minimum(out, t1 + t2)
    return out


def _np_pair_min_power(xa, xb, delta, xu, D, k0, kg, eta, coef):
    xa = np.asarray(xa, dtype=np.float64)
    xb = np.asarray(xb, dtype=np.float64)
    best = np.inf
    bi = -1
    bj = -1
    block = max(1, 200_000 // max(1, xb.size))
    for start in range(0, xa.size, block):
        a = xa[start:start + block]
        A, B = np.meshgrid(a, xb, indexing="ij")
        ok = (B - A) >= delta
        if not ok.any():
            continue
        pl = np.stack([A[ok], B[ok]], axis=1)
        g1 = _np_gain_batch(pl, xu[0], D[0], k0, kg, eta)
        g2 = _np_gain_batch(pl, xu[1], D[1], k0, kg, eta)
        p = _np_scheme_power(coef, g1, g2)
        k = int(np.argmin(p))
        if p[k] < best:
            best = float(p[k])
            ii, jj = np.nonzero(ok)
            bi = start + int(ii[k])
            bj = int(jj[k])
    return best, bi, bj


def _np_combo_max_gain(grid, n, delta, xu, D, k0, kg, eta):
    grid = np.asarray(grid, dtype=np.float64)
    m = grid.size
    if n == 1:
        g = _np_gain_batch(grid[:, None], xu, D, k0, kg, eta)
        k = int(np.argmax(g))
        return float(g[k]), np.array([k])
    best = -1.0
    idx = np.full(n, -1)
    if n == 2:
        for i in range(m):
            j = np.arange(i + 1, m)
            j = j[grid[j] - grid[i] >= delta]
            if j.size == 0:
                continue
            pl = np.stack([np.full(j.size, grid[i]), grid[j]], axis=1)
            g = _np_gain_batch(pl, xu, D, k0, kg, eta)
            k = int(np.argmax(g))
            if g[k] > best:
                best = float(g[k])
                idx = np.array([i, j[k]])
        return best, idx
    if n == 3:
        for i in range(m):
            J, K = np.meshgrid(np.arange(i + 1, m), np.arange(i + 1, m), indexing="ij")
            ok = (K > J) & (grid[J] - grid[i] >= delta) & (grid[K] - grid[J] >= delta)
            if not ok.any():
                continue
            j = J[ok]
            kk = K[ok]
            pl = np.stack([np.full(j.size, grid[i]), grid[j], grid[kk]], axis=1)
            g = _np_gain_batch(pl, xu, D, k0, kg, eta)
            k = int(np.argmax(g))
            if g[k] > best:
                best = float(g[k])
                idx = np.array([i, j[k], kk[k]])
        return best, idx
    raise ValueError("combo search supports n <= 3")


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if HAVE_NUMBA:
    njit = numba.njit(cache=True, nogil=True)

    @njit
    def _nb_gain_row(row, xu, D, k0, kg, eta):
        re = 0.0
        im = 0.0
        cre = 0.0
        cim = 0.0
        for i in range(row.shape[0]):
            x = row[i]
            dist = np.sqrt((xu - x) * (xu - x) + D * D)
            phase = k0 * dist + kg * x
            amp = eta / dist
            tr = amp * np.cos(phase)
            ti = -amp * np.sin(phase)
            t = re + tr
            if abs(re) >= abs(tr):
                cre += (re - t) + tr
            else:
                cre += (tr - t) + re
            re = t
            t = im + ti
            if abs(im) >= abs(ti):
                cim += (im - t) + ti
            else:
                cim += (ti - t) + im
            im = t
        re += cre
        im += cim
        return re * re + im * im

    @njit
    def _nb_gain_batch_impl(xp, xu, D, k0, kg, eta):
        out = np.empty(xp.shape[0])
        for m in range(xp.shape[0]):
            out[m] = _nb_gain_row(xp[m], xu, D, k0, kg, eta)
        return out

    @njit
    def _nb_power(coef, g1, g2):
        best = np.inf
        for r in range(coef.shape[0]):
            t1 = 0.0
            t2 = 0.0
            if coef[r, 0] != 0.0:
                t1 = coef[r, 0] / g1 if g1 > 0.0 else np.inf
            if coef[r, 1] != 0.0:
                t2 = coef[r, 1] / g2 if g2 > 0.0 else np.inf
            if t1 + t2 < best:
                best = t1 + t2
        return best

    @njit
    def _nb_pair_min_power(xa, xb, delta, xu, D, k0, kg, eta, coef):
        best = np.inf
        bi = -1
        bj = -1
        row = np.empty(2)
        for i in range(xa.shape[0]):
            row[0] = xa[i]
            for j in range(xb.shape[0]):
                if xb[j] - xa[i] < delta:
                    continue
                row[1] = xb[j]
                g1 = _nb_gain_row(row, xu[0], D[0], k0, kg, eta)
                g2 = _nb_gain_row(row, xu[1], D[1], k0, kg, eta)
                p = _nb_power(coef, g1, g2)
                if p < best:
                    best = p
                    bi = i
                    bj = j
        return best, bi, bj

    @njit
    def _nb_combo_max_gain(grid, n, delta, xu, D, k0, kg, eta):
        m = grid.shape[0]
        best = -1.0
        idx = np.full(n, -1)
        row = np.empty(n)
        if n == 1:
            for i in range(m):
                row[0] = grid[i]
                g = _nb_gain_row(row, xu, D, k0, kg, eta)
                if g > best:
                    best = g
                    idx[0] = i
        elif n == 2:
            for i in range(m):
                row[0] = grid[i]
                for j in range(i + 1, m):
                    if grid[j] - grid[i] < delta:
                        continue
                    row[1] = grid[j]
                    g = _nb_gain_row(row, xu, D, k0, kg, eta)
                    if g > best:
                        best = g
                        idx[0] = i
                        idx[1] = j
        elif n == 3:
            for i in range(m):
                row[0] = grid[i]
                for j in range(i + 1, m):
                    if grid[j] - grid[i] < delta:
                        continue
                    row[1] = grid[j]
                    for k in range(j + 1, m):
                        if grid[k] - grid[j] < delta:
                            continue
                        row[2] = grid[k]
                        g = _nb_gain_row(row, xu, D, k0, kg, eta)
                        if g > best:
                            best = g
                            idx[0] = i
                            idx[1] = j
                            idx[2] = k
        return best, idx

    def _nb_gain_batch(xp, xu, D, k0, kg, eta):
        xp = np.ascontiguousarray(np.atleast_2d(np.asarray(xp, dtype=np.float64)))
        return _nb_gain_batch_impl(xp, float(xu), float(D), float(k0), float(kg), float(eta))

    def _nb_pair_min_power_wrap(xa, xb, delta, xu, D, k0, kg, eta, coef):
        best, bi, bj = _nb_pair_min_power(
            np.ascontiguousarray(xa, dtype=np.float64), np.ascontiguousarray(xb, dtype=np.float64),
            float(delta), np.asarray(xu, dtype=np.float64), np.asarray(D, dtype=np.float64),
            float(k0), float(kg), float(eta), np.ascontiguousarray(coef, dtype=np.float64))
        return float(best), int(bi), int(bj)

    def _nb_combo_max_gain_wrap(grid, n, delta, xu, D, k0, kg, eta):
        if n not in (1, 2, 3):
            raise ValueError("combo search supports n <= 3")
        best, idx = _nb_combo_max_gain(np.ascontiguousarray(grid, dtype=np.float64), int(n),
                                       float(delta), float(xu), float(D), float(k0), float(kg),
                                       float(eta))
        return float(best), np.asarray(idx)


class _Impl:
    def __init__(self, name, gain_batch, pair_min_power, combo_max_gain):
        self.name = name
        self.gain_batch = gain_batch
        self.pair_min_power = pair_min_power
        self.combo_max_gain = combo_max_gain


numpy_impl = _Impl("numpy", _np_gain_batch, _np_pair_min_power, _np_combo_max_gain)
numba_impl = (_Impl("numba", _nb_gain_batch, _nb_pair_min_power_wrap, _nb_combo_max_gain_wrap)
              if HAVE_NUMBA else None)

_active = numba_impl if BACKEND == "numba" else numpy_impl

gain_batch = _active.gain_batch
pair_min_power = _active.pair_min_power
combo_max_gain = _active.combo_max_gain


def scheme_power(coef, g1, g2):
    """Vectorized ``min_r coef[r,0]/g1 + coef[r,1]/g2`` with 0/0 treated as 0."""
    return _np_scheme_power(np.atleast_2d(np.asarray(coef, dtype=np.float64)),
                            np.asarray(g1, dtype=np.float64), np.asarray(g2, dtype=np.float64))
