# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gibbs sampling kernels.

Mirror of ``wexpfit._kernels_py``: same algorithm, same arithmetic order,
same uniform stream (``bitgen_t.next_double`` here, ``Generator.random()``
there), so both backends produce identical chains from identical seeds.
Any change here must be applied to the pure-Python module as well.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport INFINITY, exp, expm1, fabs, log, log1p, sqrt, isfinite
from libc.stdlib cimport free, malloc

import numpy as np

from numpy.random cimport bitgen_t

BACKEND = "cython"

cdef double _LN2 = log(2.0)
cdef double _INVPHI = (sqrt(5.0) - 1.0) / 2.0
cdef int _MAX_POINTS = 60
cdef int _MAX_REJECT_BETA = 1000
cdef int _GRID_FALLBACK_AFTER = 100
cdef double _HULL_SLACK = 1e-7
cdef double _TAIL_DROP = 30.0

cdef enum:
    CAPPTS = 96
    CAPPIECES = 192

cdef const char *_CAPSULE_NAME = "BitGenerator"

# error codes shared by the cdef layer; the def wrappers raise
cdef enum:
    OK = 0
    ERR_LEFT_BETA = 1
    ERR_RIGHT_BETA = 2
    ERR_NONCONCAVE_BETA = 3
    ERR_BUDGET_BETA = 4
    ERR_LEFT_T = 5
    ERR_RIGHT_T = 6
    ERR_MODE_LEFT = 7
    ERR_MODE_RIGHT = 8
    ERR_MODE_BRACKET = 9
    ERR_CAPACITY = 10

_MESSAGES = {
    ERR_LEFT_BETA: "left hull expansion failed for beta conditional",
    ERR_RIGHT_BETA: "right hull expansion failed for beta conditional",
    ERR_BUDGET_BETA: "beta rejection sampler exceeded the proposal budget",
    ERR_LEFT_T: "left hull expansion failed",
    ERR_RIGHT_T: "right hull expansion failed (non-integrable tail?)",
    ERR_MODE_LEFT: "alpha conditional mode search ran off the left end",
    ERR_MODE_RIGHT: ("alpha conditional has no interior mode below alpha=1e26 "
                     "(non-integrable tail?)"),
    ERR_MODE_BRACKET: "alpha conditional mode bracketing failed",
    ERR_CAPACITY: "hull point capacity exceeded",
}


cdef struct Diag:
    long alpha_proposals
    long alpha_accepts
    long alpha_grid_draws
    long alpha_hull_violations
    long beta_proposals
    long beta_accepts


cdef struct Hull:
    int k
    int npieces
    double lo_bound
    double off
    double pts[CAPPTS]
    double hs[CAPPTS]
    double p_lo[CAPPIECES]
    double p_hi[CAPPIECES]
    double p_x0[CAPPIECES]
    double p_h0[CAPPIECES]
    double p_m[CAPPIECES]
    double p_mass[CAPPIECES]
    double total


cdef inline double _log1mexp(double t) noexcept nogil:
    if t <= 0.0:
        return -INFINITY
    if t < _LN2:
        return log(-expm1(-t))
    return log1p(-exp(-t))


cdef double _log_cond_beta(double b, double alpha, const double *xs, int n,
                           int r, double c, double s_c, double w1,
                           double w2) noexcept nogil:
    cdef double ec, acc
    cdef int i
    if b <= 0.0:
        return -INFINITY
    ec = exp(-b * c)
    acc = (w2 + r - 1.0) * log(b) - b * (w1 + s_c / alpha) \
        + (n - r) * log(alpha + 1.0 - ec)
    for i in range(r):
        acc += _log1mexp(b * xs[i])
    return acc


cdef double _log_cond_alpha_t(double t, double beta, int n, int r, double c,
                              double s_c, double w3, double w4) noexcept nogil:
    cdef double ec, q, lse1, lseq, w3_term
    if t < -700.0:
        return -INFINITY
    ec = exp(-beta * c)
    q = 1.0 - ec
    if t >= 0.0:
        lse1 = t + log1p(exp(-t))
    else:
        lse1 = log1p(exp(t))
    if q < 1e-300:
        lseq = t
    elif t >= log(q):
        lseq = t + log1p(q * exp(-t))
    else:
        lseq = log(q) + log1p(exp(t) / q)
    w3_term = 0.0
    if w3 > 0.0:
        if t > 700.0:
            return -INFINITY
        w3_term = w3 * exp(t)
    return (w4 - n - r) * t + r * lse1 - w3_term - beta * s_c * exp(-t) \
        + (n - r) * lseq


cdef inline double _slope(Hull *H, int i) noexcept nogil:
    return (H.hs[i + 1] - H.hs[i]) / (H.pts[i + 1] - H.pts[i])


cdef inline void _add_piece(Hull *H, double lo, double hi, int i) noexcept nogil:
    cdef int p = H.npieces
    H.p_lo[p] = lo
    H.p_hi[p] = hi
    H.p_x0[p] = H.pts[i]
    H.p_h0[p] = H.hs[i] - H.off
    H.p_m[p] = _slope(H, i)
    H.npieces = p + 1


cdef int _hull_rebuild(Hull *H) noexcept nogil:
    cdef int k = H.k
    cdef int j, i, left, right
    cdef double off, ml, mr, z, mass, ulo, d, m, lo, hi
    if k > _MAX_POINTS + 8 or 2 * k > CAPPIECES:
        return ERR_CAPACITY
    off = H.hs[0]
    for i in range(1, k):
        if H.hs[i] > off:
            off = H.hs[i]
    H.off = off
    H.npieces = 0

    _add_piece(H, H.lo_bound, H.pts[0], 0)
    for j in range(k - 1):
        left = j - 1 if j >= 1 else -1
        right = j + 1 if j + 1 <= k - 2 else -1
        if left >= 0 and right >= 0:
            ml = _slope(H, left)
            mr = _slope(H, right)
            if ml != mr:
                z = (H.hs[right] - mr * H.pts[right] - H.hs[left] + ml * H.pts[left]) / (ml - mr)
            else:
                z = H.pts[j]
            if z < H.pts[j]:
                z = H.pts[j]
            elif z > H.pts[j + 1]:
                z = H.pts[j + 1]
            if z > H.pts[j]:
                _add_piece(H, H.pts[j], z, left)
            if H.pts[j + 1] > z:
                _add_piece(H, z, H.pts[j + 1], right)
        elif left >= 0:
            _add_piece(H, H.pts[j], H.pts[j + 1], left)
        else:
            _add_piece(H, H.pts[j], H.pts[j + 1], right)
    _add_piece(H, H.pts[k - 1], INFINITY, k - 2)

    H.total = 0.0
    for i in range(H.npieces):
        m = H.p_m[i]
        lo = H.p_lo[i]
        hi = H.p_hi[i]
        if lo == -INFINITY:
            mass = exp(H.p_h0[i] + m * (hi - H.p_x0[i])) / m if m > 0 else INFINITY
        elif hi == INFINITY:
            mass = exp(H.p_h0[i] + m * (lo - H.p_x0[i])) / -m if m < 0 else INFINITY
        else:
            ulo = H.p_h0[i] + m * (lo - H.p_x0[i])
            d = m * (hi - lo)
            if fabs(d) < 1e-12:
                mass = exp(ulo) * (hi - lo)
            else:
                mass = exp(ulo) * expm1(d) / m
        H.p_mass[i] = mass
        H.total += mass
    return OK


cdef inline double _hull_value(Hull *H, int idx, double x) noexcept nogil:
    return H.p_h0[idx] + H.p_m[idx] * (x - H.p_x0[idx])


cdef double _hull_sample(Hull *H, double u, int *idx_out) noexcept nogil:
    cdef double target = u * H.total
    cdef int idx = 0
    cdef int last = H.npieces - 1
    cdef double m, lo, hi, ulo, uhi, rem, d, arg, x
    while idx < last and target > H.p_mass[idx]:
        target -= H.p_mass[idx]
        idx += 1
    idx_out[0] = idx
    m = H.p_m[idx]
    lo = H.p_lo[idx]
    hi = H.p_hi[idx]
    if lo == -INFINITY:
        uhi = _hull_value(H, idx, hi)
        rem = H.p_mass[idx] - target
        x = hi + log1p(-rem * m * exp(-uhi)) / m if rem > 0 else hi
        return x
    ulo = _hull_value(H, idx, lo)
    if hi == INFINITY:
        return lo + log1p(target * m * exp(-ulo)) / m
    d = m * (hi - lo)
    if fabs(d) < 1e-12:
        x = lo + target / H.p_mass[idx] * (hi - lo)
    else:
        arg = target * m * exp(-ulo)
        x = lo + (log1p(arg) / m if arg > -1.0 else (hi - lo))
    if x < lo:
        x = lo
    elif x > hi and hi != INFINITY:
        x = hi
    return x


cdef void _hull_insert(Hull *H, double x, double h) noexcept nogil:
    cdef int i, j
    if H.k >= _MAX_POINTS:
        return
    i = 0
    while i < H.k and H.pts[i] < x:
        i += 1
    if i < H.k and H.pts[i] == x:
        return
    for j in range(H.k, i, -1):
        H.pts[j] = H.pts[j - 1]
        H.hs[j] = H.hs[j - 1]
    H.pts[i] = x
    H.hs[i] = h
    H.k += 1
    _hull_rebuild(H)


cdef inline double _next_u(bitgen_t *bg) noexcept nogil:
    return bg.next_double(bg.state)


cdef int _sample_beta(double alpha, double b_anchor, const double *xs, int n,
                      int r, double c, double s_c, double w1, double w2,
                      bitgen_t *bg, Diag *diag, double *out,
                      double *bad_x) noexcept nogil:
    cdef Hull H
    cdef double factor, new, x, hx, ux, u2
    cdef int i, status, idx, trial, found

    H.lo_bound = 0.0
    H.k = 5
    H.pts[0] = b_anchor * 0.5
    H.pts[1] = b_anchor * 0.8
    H.pts[2] = b_anchor * 1.0
    H.pts[3] = b_anchor * 1.25
    H.pts[4] = b_anchor * 2.0
    for i in range(5):
        H.hs[i] = _log_cond_beta(H.pts[i], alpha, xs, n, r, c, s_c, w1, w2)

    factor = 0.5
    found = 0
    for i in range(20):
        if H.hs[0] < H.hs[1] and isfinite(H.hs[0]):
            found = 1
            break
        new = H.pts[0] * factor
        if new <= 1e-300 or H.k >= CAPPTS:
            return ERR_LEFT_BETA
        factor *= factor
        # insert at front
        for idx in range(H.k, 0, -1):
            H.pts[idx] = H.pts[idx - 1]
            H.hs[idx] = H.hs[idx - 1]
        H.pts[0] = new
        H.hs[0] = _log_cond_beta(new, alpha, xs, n, r, c, s_c, w1, w2)
        H.k += 1
    if not found:
        return ERR_LEFT_BETA

    factor = 2.0
    found = 0
    for i in range(20):
        if H.hs[H.k - 1] < H.hs[H.k - 2] and isfinite(H.hs[H.k - 1]):
            found = 1
            break
        new = H.pts[H.k - 1] * factor
        if new >= 1e300 or H.k >= CAPPTS:
            return ERR_RIGHT_BETA
        factor *= factor
        H.pts[H.k] = new
        H.hs[H.k] = _log_cond_beta(new, alpha, xs, n, r, c, s_c, w1, w2)
        H.k += 1
    if not found:
        return ERR_RIGHT_BETA

    status = _hull_rebuild(&H)
    if status != OK:
        return status
    for trial in range(_MAX_REJECT_BETA):
        x = _hull_sample(&H, _next_u(bg), &idx)
        diag.beta_proposals += 1
        if x <= 0.0 or not isfinite(x):
            continue
        hx = _log_cond_beta(x, alpha, xs, n, r, c, s_c, w1, w2)
        ux = _hull_value(&H, idx, x) + H.off
        if hx - ux > _HULL_SLACK * (1.0 + fabs(hx)):
            bad_x[0] = x
            return ERR_NONCONCAVE_BETA
        u2 = _next_u(bg)
        if u2 <= 0.0 or log(u2) <= hx - ux:
            diag.beta_accepts += 1
            out[0] = x
            return OK
        _hull_insert(&H, x, hx)
    return ERR_BUDGET_BETA


cdef double _golden_max(double beta, int n, int r, double c, double s_c,
                        double w3, double w4, double a, double b,
                        double tol) noexcept nogil:
    cdef double x1 = b - _INVPHI * (b - a)
    cdef double x2 = a + _INVPHI * (b - a)
    cdef double f1 = _log_cond_alpha_t(x1, beta, n, r, c, s_c, w3, w4)
    cdef double f2 = _log_cond_alpha_t(x2, beta, n, r, c, s_c, w3, w4)
    cdef int i
    for i in range(200):
        if b - a < tol:
            break
        if f1 >= f2:
            b = x2
            x2 = x1
            f2 = f1
            x1 = b - _INVPHI * (b - a)
            f1 = _log_cond_alpha_t(x1, beta, n, r, c, s_c, w3, w4)
        else:
            a = x1
            x1 = x2
            f1 = f2
            x2 = a + _INVPHI * (b - a)
            f2 = _log_cond_alpha_t(x2, beta, n, r, c, s_c, w3, w4)
    return 0.5 * (a + b)


cdef int _bracket_mode(double beta, int n, int r, double c, double s_c,
                       double w3, double w4, double t0, double *lo_out,
                       double *hi_out) noexcept nogil:
    cdef double step = 1.0
    cdef double a = t0 - step
    cdef double m = t0
    cdef double b = t0 + step
    cdef double fa = _log_cond_alpha_t(a, beta, n, r, c, s_c, w3, w4)
    cdef double fm = _log_cond_alpha_t(m, beta, n, r, c, s_c, w3, w4)
    cdef double fb = _log_cond_alpha_t(b, beta, n, r, c, s_c, w3, w4)
    cdef int i
    for i in range(200):
        if fa < fm and fb < fm:
            lo_out[0] = a
            hi_out[0] = b
            return OK
        if fa >= fm:
            b = m
            fb = fm
            m = a
            fm = fa
            step *= 1.6
            a = m - step
            if a < -60.0:
                return ERR_MODE_LEFT
            fa = _log_cond_alpha_t(a, beta, n, r, c, s_c, w3, w4)
        else:
            a = m
            fa = fm
            m = b
            fm = fb
            step *= 1.6
            b = m + step
            if b > 60.0:
                return ERR_MODE_RIGHT
            fb = _log_cond_alpha_t(b, beta, n, r, c, s_c, w3, w4)
    return ERR_MODE_BRACKET


cdef int _grid_draw_alpha(double beta, int n, int r, double c, double s_c,
                          double w3, double w4, double t_mode, double h_mode,
                          int grid_size, double u, double *out) noexcept nogil:
    cdef double lo, hi, a, b, mid, dt, total, target, seg, frac
    cdef double *w
    cdef double *cum
    cdef int i

    lo = t_mode - 1.0
    for i in range(100):
        if _log_cond_alpha_t(lo, beta, n, r, c, s_c, w3, w4) < h_mode - _TAIL_DROP:
            break
        lo = t_mode - 2.0 * (t_mode - lo)
    hi = t_mode + 1.0
    for i in range(100):
        if _log_cond_alpha_t(hi, beta, n, r, c, s_c, w3, w4) < h_mode - _TAIL_DROP:
            break
        hi = t_mode + 2.0 * (hi - t_mode)
    a = lo
    b = t_mode
    for i in range(30):
        mid = 0.5 * (a + b)
        if _log_cond_alpha_t(mid, beta, n, r, c, s_c, w3, w4) < h_mode - _TAIL_DROP:
            a = mid
        else:
            b = mid
    lo = a
    a = t_mode
    b = hi
    for i in range(30):
        mid = 0.5 * (a + b)
        if _log_cond_alpha_t(mid, beta, n, r, c, s_c, w3, w4) < h_mode - _TAIL_DROP:
            b = mid
        else:
            a = mid
    hi = b

    dt = (hi - lo) / (grid_size - 1)
    w = <double *> malloc(grid_size * sizeof(double))
    cum = <double *> malloc(grid_size * sizeof(double))
    if w == NULL or cum == NULL:
        if w != NULL:
            free(w)
        if cum != NULL:
            free(cum)
        return ERR_CAPACITY
    for i in range(grid_size):
        w[i] = exp(_log_cond_alpha_t(lo + i * dt, beta, n, r, c, s_c, w3, w4) - h_mode)
    total = 0.0
    cum[0] = 0.0
    for i in range(1, grid_size):
        total += 0.5 * (w[i - 1] + w[i]) * dt
        cum[i] = total
    target = u * total
    i = 1
    while i < grid_size - 1 and cum[i] < target:
        i += 1
    seg = cum[i] - cum[i - 1]
    frac = (target - cum[i - 1]) / seg if seg > 0 else 0.5
    out[0] = lo + (i - 1 + frac) * dt
    free(w)
    free(cum)
    return OK


cdef int _sample_alpha(double beta, double a_anchor, const double *xs, int n,
                       int r, double c, double s_c, double w3, double w4,
                       int grid_size, bitgen_t *bg, Diag *diag,
                       double *out) noexcept nogil:
    cdef Hull H
    cdef double t0, lo, hi, t_mode, h_mode, step, new, x, hx, ux, u2, t
    cdef int status, i, idx, proposals, found

    t0 = log(a_anchor)
    status = _bracket_mode(beta, n, r, c, s_c, w3, w4, t0, &lo, &hi)
    if status != OK:
        return status
    t_mode = _golden_max(beta, n, r, c, s_c, w3, w4, lo, hi, 1e-10)
    h_mode = _log_cond_alpha_t(t_mode, beta, n, r, c, s_c, w3, w4)

    H.lo_bound = -INFINITY
    H.k = 5
    H.pts[0] = t_mode - 1.5
    H.pts[1] = t_mode - 0.6
    H.pts[2] = t_mode + 1e-3
    H.pts[3] = t_mode + 0.6
    H.pts[4] = t_mode + 1.5
    for i in range(5):
        H.hs[i] = _log_cond_alpha_t(H.pts[i], beta, n, r, c, s_c, w3, w4)

    found = 0
    for i in range(30):
        if H.hs[0] < H.hs[1] and isfinite(H.hs[0]):
            found = 1
            break
        if H.k >= CAPPTS:
            return ERR_LEFT_T
        step = H.pts[1] - H.pts[0]
        for idx in range(H.k, 0, -1):
            H.pts[idx] = H.pts[idx - 1]
            H.hs[idx] = H.hs[idx - 1]
        H.pts[0] = H.pts[1] - 2.0 * step
        H.hs[0] = _log_cond_alpha_t(H.pts[0], beta, n, r, c, s_c, w3, w4)
        H.k += 1
    if not found:
        return ERR_LEFT_T
    found = 0
    for i in range(30):
        if H.hs[H.k - 1] < H.hs[H.k - 2] and isfinite(H.hs[H.k - 1]):
            found = 1
            break
        if H.k >= CAPPTS:
            return ERR_RIGHT_T
        step = H.pts[H.k - 1] - H.pts[H.k - 2]
        H.pts[H.k] = H.pts[H.k - 1] + 2.0 * step
        H.hs[H.k] = _log_cond_alpha_t(H.pts[H.k], beta, n, r, c, s_c, w3, w4)
        H.k += 1
    if not found:
        return ERR_RIGHT_T

    status = _hull_rebuild(&H)
    if status != OK:
        return status
    proposals = 0
    while proposals < _GRID_FALLBACK_AFTER:
        x = _hull_sample(&H, _next_u(bg), &idx)
        proposals += 1
        diag.alpha_proposals += 1
        if not isfinite(x):
            continue
        hx = _log_cond_alpha_t(x, beta, n, r, c, s_c, w3, w4)
        ux = _hull_value(&H, idx, x) + H.off
        if hx - ux > _HULL_SLACK * (1.0 + fabs(hx)):
            diag.alpha_hull_violations += 1
            break
        u2 = _next_u(bg)
        if u2 <= 0.0 or log(u2) <= hx - ux:
            diag.alpha_accepts += 1
            out[0] = exp(x)
            return OK
        _hull_insert(&H, x, hx)
    diag.alpha_grid_draws += 1
    status = _grid_draw_alpha(beta, n, r, c, s_c, w3, w4, t_mode, h_mode,
                              grid_size, _next_u(bg), &t)
    if status != OK:
        return status
    out[0] = exp(t)
    return OK


cdef bitgen_t *_get_bitgen(rng):
    capsule = rng.bit_generator.capsule
    if not PyCapsule_IsValid(capsule, _CAPSULE_NAME):
        raise ValueError("invalid RNG capsule")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, _CAPSULE_NAME)


def log_cond_beta(double b, double alpha, xs, int n, int r, double c,
                  double s_c, double w1, double w2):
    cdef double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    return _log_cond_beta(b, alpha, &xv[0], n, r, c, s_c, w1, w2)


def log_cond_alpha_t(double t, double beta, xs, int n, int r, double c,
                     double s_c, double w3, double w4):
    return _log_cond_alpha_t(t, beta, n, r, c, s_c, w3, w4)


def sample_beta(double alpha, double b_anchor, xs, int n, int r, double c,
                double s_c, double w1, double w2, rng, diag):
    if w2 + r < 1.0:
        raise ValueError("log-concavity of the beta conditional needs w2 + r >= 1")
    cdef double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef bitgen_t *bg = _get_bitgen(rng)
    cdef Diag d
    d.alpha_proposals = d.alpha_accepts = d.alpha_grid_draws = 0
    d.alpha_hull_violations = d.beta_proposals = d.beta_accepts = 0
    cdef double out = 0.0
    cdef double bad_x = 0.0
    cdef int status = _sample_beta(alpha, b_anchor, &xv[0], n, r, c, s_c,
                                   w1, w2, bg, &d, &out, &bad_x)
    diag["beta_proposals"] += d.beta_proposals
    diag["beta_accepts"] += d.beta_accepts
    if status == ERR_NONCONCAVE_BETA:
        raise ValueError(
            f"beta conditional is not log-concave at beta={bad_x!r}"
        )
    if status != OK:
        raise RuntimeError(_MESSAGES[status])
    return out


def sample_alpha(double beta, double a_anchor, xs, int n, int r, double c,
                 double s_c, double w3, double w4, int grid_size, rng, diag):
    cdef double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef bitgen_t *bg = _get_bitgen(rng)
    cdef Diag d
    d.alpha_proposals = d.alpha_accepts = d.alpha_grid_draws = 0
    d.alpha_hull_violations = d.beta_proposals = d.beta_accepts = 0
    cdef double out = 0.0
    cdef int status = _sample_alpha(beta, a_anchor, &xv[0], n, r, c, s_c,
                                    w3, w4, grid_size, bg, &d, &out)
    diag["alpha_proposals"] += d.alpha_proposals
    diag["alpha_accepts"] += d.alpha_accepts
    diag["alpha_grid_draws"] += d.alpha_grid_draws
    diag["alpha_hull_violations"] += d.alpha_hull_violations
    if status != OK:
        raise RuntimeError(_MESSAGES[status])
    return out


def draw_alpha_grid(double beta, double a_anchor, xs, int n, int r, double c,
                    double s_c, double w3, double w4, int grid_size, rng):
    """Force the grid-inversion path of ``sample_alpha`` (testing aid)."""
    cdef bitgen_t *bg = _get_bitgen(rng)
    cdef double t0 = log(a_anchor)
    cdef double lo = 0.0
    cdef double hi = 0.0
    cdef double t_mode, h_mode, t
    cdef int status = _bracket_mode(beta, n, r, c, s_c, w3, w4, t0, &lo, &hi)
    if status != OK:
        raise RuntimeError(_MESSAGES[status])
    t_mode = _golden_max(beta, n, r, c, s_c, w3, w4, lo, hi, 1e-10)
    h_mode = _log_cond_alpha_t(t_mode, beta, n, r, c, s_c, w3, w4)
    status = _grid_draw_alpha(beta, n, r, c, s_c, w3, w4, t_mode, h_mode,
                              grid_size, _next_u(bg), &t)
    if status != OK:
        raise RuntimeError(_MESSAGES[status])
    return exp(t)


def run_chain(xs, int n, int r, double c, double w1, double w2, double w3,
              double w4, double alpha0, double beta0, int n_iter,
              int grid_size, rng):
    """Alternate the two conditional draws n_iter times from (alpha0, beta0)."""
    if w2 + r < 1.0:
        raise ValueError("log-concavity of the beta conditional needs w2 + r >= 1")
    cdef double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef bitgen_t *bg = _get_bitgen(rng)
    cdef Diag d
    d.alpha_proposals = d.alpha_accepts = d.alpha_grid_draws = 0
    d.alpha_hull_violations = d.beta_proposals = d.beta_accepts = 0

    cdef double acc = 0.0
    cdef int i
    for i in range(r):
        acc += xv[i]
    cdef double s_c = acc + c * (n - r)

    alpha_arr = np.empty(n_iter)
    beta_arr = np.empty(n_iter)
    cdef double[::1] av = alpha_arr
    cdef double[::1] bv = beta_arr
    cdef double a = alpha0
    cdef double b = beta0
    cdef double bad_x = 0.0
    cdef int status
    for i in range(n_iter):
        status = _sample_alpha(b, a, &xv[0], n, r, c, s_c, w3, w4,
                               grid_size, bg, &d, &a)
        if status != OK:
            raise RuntimeError(f"iteration {i}: {_MESSAGES[status]}")
        status = _sample_beta(a, b, &xv[0], n, r, c, s_c, w1, w2, bg, &d,
                              &b, &bad_x)
        if status == ERR_NONCONCAVE_BETA:
            raise ValueError(
                f"iteration {i}: beta conditional is not log-concave at beta={bad_x!r}"
            )
        if status != OK:
            raise RuntimeError(f"iteration {i}: {_MESSAGES[status]}")
        av[i] = a
        bv[i] = b
    diag = {"alpha_proposals": d.alpha_proposals,
            "alpha_accepts": d.alpha_accepts,
            "alpha_grid_draws": d.alpha_grid_draws,
            "alpha_hull_violations": d.alpha_hull_violations,
            "beta_proposals": d.beta_proposals,
            "beta_accepts": d.beta_accepts}
    return alpha_arr, beta_arr, diag
