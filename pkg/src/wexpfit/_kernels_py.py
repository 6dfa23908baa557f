"""Pure-Python Gibbs sampling kernels (reference implementation).

``wexpfit._kernels`` is the compiled twin of this module.  Both follow the
same algorithm step for step and draw uniforms from the same bit stream
(``Generator.random()`` here, ``next_double`` there), so a chain produced
by either backend from the same seed is identical.  Keep any change to the
sampling logic mirrored in ``_kernels.pyx``.

Sampling strategy
-----------------
beta | alpha   log-concave (for w2 + r >= 1): derivative-free adaptive
               rejection sampling.  The upper hull on each interval between
               evaluation points is the lower of the two neighbouring
               secants extended into the interval; rejected proposals are
               inserted as new points, tightening the hull.
alpha | beta   handled on the log scale t = ln(alpha), where the density is
               concave in practice but not provably so.  A mode is located
               by golden-section, the same secant hull is built around it,
               and every proposal is checked for hull domination.  A
               detected violation, or acceptance below 1%, falls back to
               inverse-CDF sampling on an adaptive trapezoid grid.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

_LN2 = math.log(2.0)
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_MAX_POINTS = 60
_MAX_REJECT_BETA = 1000
_GRID_FALLBACK_AFTER = 100  # proposals without acceptance => ~1% rate
_HULL_SLACK = 1e-7
_TAIL_DROP = 30.0  # grid bracket: log-density drop below the mode


def _log1mexp(t: float) -> float:
    # ln(1 - e^{-t}) for t > 0
    if t <= 0.0:
        return -math.inf
    if t < _LN2:
        return math.log(-math.expm1(-t))
    return math.log1p(-math.exp(-t))


def log_cond_beta(b: float, alpha: float, xs, n: int, r: int, c: float,
                  s_c: float, w1: float, w2: float) -> float:
    """Unnormalized log conditional of beta given alpha."""
    if b <= 0.0:
        return -math.inf
    ec = math.exp(-b * c)
    acc = (w2 + r - 1.0) * math.log(b) - b * (w1 + s_c / alpha) \
        + (n - r) * math.log(alpha + 1.0 - ec)
    for i in range(r):
        acc += _log1mexp(b * xs[i])
    return acc


def log_cond_alpha_t(t: float, beta: float, xs, n: int, r: int, c: float,
                     s_c: float, w3: float, w4: float) -> float:
    """Log density of t = ln(alpha) given beta (Jacobian included)."""
    if t < -700.0:
        return -math.inf
    ec = math.exp(-beta * c)
    q = 1.0 - ec
    # log(e^t + 1)
    if t >= 0.0:
        lse1 = t + math.log1p(math.exp(-t))
    else:
        lse1 = math.log1p(math.exp(t))
    # log(e^t + q)
    if q < 1e-300:
        lseq = t
    elif t >= math.log(q):
        lseq = t + math.log1p(q * math.exp(-t))
    else:
        lseq = math.log(q) + math.log1p(math.exp(t) / q)
    w3_term = 0.0
    if w3 > 0.0:
        if t > 700.0:
            return -math.inf
        w3_term = w3 * math.exp(t)
    return (w4 - n - r) * t + r * lse1 - w3_term - beta * s_c * math.exp(-t) \
        + (n - r) * lseq


class _Hull:
    """Piecewise-linear upper hull over sorted points, from secants only."""

    __slots__ = ("pts", "hs", "lo_bound", "offset",
                 "p_lo", "p_hi", "p_x0", "p_h0", "p_m", "p_mass", "total")

    def __init__(self, pts, hs, lo_bound):
        self.pts = pts          # sorted abscissae
        self.hs = hs            # h values
        self.lo_bound = lo_bound  # 0.0 for beta, -inf for t-space
        self.rebuild()

    def rebuild(self):
        pts, hs = self.pts, self.hs
        k = len(pts)
        off = max(hs)
        self.offset = off
        lo_list, hi_list, x0_list, h0_list, m_list = [], [], [], [], []

        def slope(i):
            return (hs[i + 1] - hs[i]) / (pts[i + 1] - pts[i])

        def add(lo, hi, i):
            # upper line = secant through points i, i+1
            lo_list.append(lo)
            hi_list.append(hi)
            x0_list.append(pts[i])
            h0_list.append(hs[i] - off)
            m_list.append(slope(i))

        add(self.lo_bound, pts[0], 0)
        for j in range(k - 1):
            left = j - 1 if j >= 1 else -1          # secant (j-1, j)
            right = j + 1 if j + 1 <= k - 2 else -1  # secant (j+1, j+2)
            if left >= 0 and right >= 0:
                ml, mr = slope(left), slope(right)
                if ml != mr:
                    # intersection of the two extended secants
                    z = (hs[right] - mr * pts[right] - hs[left] + ml * pts[left]) / (ml - mr)
                else:
                    z = pts[j]
                if z < pts[j]:
                    z = pts[j]
                elif z > pts[j + 1]:
                    z = pts[j + 1]
                if z > pts[j]:
                    add(pts[j], z, left)
                if pts[j + 1] > z:
                    add(z, pts[j + 1], right)
            elif left >= 0:
                add(pts[j], pts[j + 1], left)
            else:
                add(pts[j], pts[j + 1], right)
        add(pts[k - 1], math.inf, k - 2)

        self.p_lo, self.p_hi = lo_list, hi_list
        self.p_x0, self.p_h0, self.p_m = x0_list, h0_list, m_list
        masses = []
        total = 0.0
        for i in range(len(lo_list)):
            m = m_list[i]
            lo, hi = lo_list[i], hi_list[i]
            ulo_inf = lo == -math.inf
            if ulo_inf:
                # mass of exp(u) over (-inf, hi]; requires m > 0
                mass = math.exp(h0_list[i] + m * (hi - x0_list[i])) / m if m > 0 else math.inf
            elif hi == math.inf:
                mass = math.exp(h0_list[i] + m * (lo - x0_list[i])) / -m if m < 0 else math.inf
            else:
                ulo = h0_list[i] + m * (lo - x0_list[i])
                d = m * (hi - lo)
                if abs(d) < 1e-12:
                    mass = math.exp(ulo) * (hi - lo)
                else:
                    mass = math.exp(ulo) * math.expm1(d) / m
            masses.append(mass)
            total += mass
        self.p_mass = masses
        self.total = total

    def value(self, idx: int, x: float) -> float:
        # hull value (offset scale) of piece idx at x
        return self.p_h0[idx] + self.p_m[idx] * (x - self.p_x0[idx])

    def sample(self, u: float):
        """Invert the hull CDF at u in (0,1); returns (x, piece index)."""
        target = u * self.total
        idx = 0
        last = len(self.p_mass) - 1
        while idx < last and target > self.p_mass[idx]:
            target -= self.p_mass[idx]
            idx += 1
        m = self.p_m[idx]
        lo, hi = self.p_lo[idx], self.p_hi[idx]
        if lo == -math.inf:
            # integrate from the right end downward
            uhi = self.value(idx, hi)
            rem = self.p_mass[idx] - target
            x = hi + math.log1p(-rem * m * math.exp(-uhi)) / m if rem > 0 else hi
            return x, idx
        ulo = self.value(idx, lo)
        if hi == math.inf:
            x = lo + math.log1p(target * m * math.exp(-ulo)) / m
            return x, idx
        d = m * (hi - lo)
        if abs(d) < 1e-12:
            x = lo + target / self.p_mass[idx] * (hi - lo)
        else:
            arg = target * m * math.exp(-ulo)
            x = lo + (math.log1p(arg) / m if arg > -1.0 else (hi - lo))
        if x < lo:
            x = lo
        elif x > hi and hi != math.inf:
            x = hi
        return x, idx

    def insert(self, x: float, h: float):
        if len(self.pts) >= _MAX_POINTS:
            return
        i = 0
        while i < len(self.pts) and self.pts[i] < x:
            i += 1
        if i < len(self.pts) and self.pts[i] == x:
            return
        self.pts.insert(i, x)
        self.hs.insert(i, h)
        self.rebuild()


def _expand_points(h, anchor_pts):
    """Evaluate h on the seed points and extend both ends until h decreases.

    The inserted gap doubles each time, so a handful of evaluations cover
    any reachable range.
    """
    pts = list(anchor_pts)
    hs = [h(p) for p in pts]
    for _ in range(30):
        if hs[0] < hs[1] and math.isfinite(hs[0]):
            break
        step = pts[1] - pts[0]
        pts.insert(0, pts[0] - 2.0 * step)
        hs.insert(0, h(pts[0]))
    else:
        raise RuntimeError("left hull expansion failed")
    for _ in range(30):
        if hs[-1] < hs[-2] and math.isfinite(hs[-1]):
            break
        step = pts[-1] - pts[-2]
        pts.append(pts[-1] + 2.0 * step)
        hs.append(h(pts[-1]))
    else:
        raise RuntimeError("right hull expansion failed (non-integrable tail?)")
    return pts, hs


def sample_beta(alpha: float, b_anchor: float, xs, n: int, r: int, c: float,
                s_c: float, w1: float, w2: float, rng, diag) -> float:
    """One exact draw from the beta conditional by derivative-free ARS."""
    if w2 + r < 1.0:
        raise ValueError("log-concavity of the beta conditional needs w2 + r >= 1")

    def h(b):
        return log_cond_beta(b, alpha, xs, n, r, c, s_c, w1, w2)

    pts = [b_anchor * 0.5, b_anchor * 0.8, b_anchor * 1.0,
           b_anchor * 1.25, b_anchor * 2.0]
    hs = [h(p) for p in pts]
    # multiplicative end expansion with accelerating factors keeps the
    # point count small even when the anchor is far from the mode
    factor = 0.5
    for _ in range(20):
        if hs[0] < hs[1] and math.isfinite(hs[0]):
            break
        new = pts[0] * factor
        if new <= 1e-300:
            raise RuntimeError("left hull expansion failed for beta conditional")
        factor *= factor
        pts.insert(0, new)
        hs.insert(0, h(new))
    else:
        raise RuntimeError("left hull expansion failed for beta conditional")
    factor = 2.0
    for _ in range(20):
        if hs[-1] < hs[-2] and math.isfinite(hs[-1]):
            break
        new = pts[-1] * factor
        if new >= 1e300:
            raise RuntimeError("right hull expansion failed for beta conditional")
        factor *= factor
        pts.append(new)
        hs.append(h(new))
    else:
        raise RuntimeError("right hull expansion failed for beta conditional")

    hull = _Hull(pts, hs, 0.0)
    for _ in range(_MAX_REJECT_BETA):
        x, idx = hull.sample(rng.random())
        diag["beta_proposals"] += 1
        if x <= 0.0 or not math.isfinite(x):
            continue
        hx = h(x)
        ux = hull.value(idx, x) + hull.offset
        if hx - ux > _HULL_SLACK * (1.0 + abs(hx)):
            raise ValueError(
                f"beta conditional is not log-concave at beta={x!r} "
                f"(density exceeds hull by {hx - ux:.3e})"
            )
        u2 = rng.random()
        if u2 <= 0.0 or math.log(u2) <= hx - ux:
            diag["beta_accepts"] += 1
            return x
        hull.insert(x, hx)
    raise RuntimeError("beta rejection sampler exceeded the proposal budget")


def _golden_max(h, a, b, tol=1e-10):
    """Golden-section maximum of h on [a, b]."""
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = h(x1), h(x2)
    for _ in range(200):
        if b - a < tol:
            break
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = h(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = h(x2)
    return 0.5 * (a + b)


def _bracket_mode(h, t0):
    """Expand around t0 until the middle point beats both ends."""
    step = 1.0
    a, m, b = t0 - step, t0, t0 + step
    fa, fm, fb = h(a), h(m), h(b)
    for _ in range(200):
        if fa < fm and fb < fm:
            return a, b
        if fa >= fm:
            b, fb, m, fm = m, fm, a, fa
            step *= 1.6
            a = m - step
            if a < -60.0:
                raise RuntimeError("alpha conditional mode search ran off the left end")
            fa = h(a)
        else:
            a, fa, m, fm = m, fm, b, fb
            step *= 1.6
            b = m + step
            if b > 60.0:
                raise RuntimeError(
                    "alpha conditional has no interior mode below alpha=1e26 "
                    "(non-integrable tail?)"
                )
            fb = h(b)
    raise RuntimeError("alpha conditional mode bracketing failed")


def _grid_draw_alpha(h, t_mode, h_mode, grid_size, u):
    """Inverse-CDF draw on a trapezoid grid over the mode's decay bracket."""
    # expand to the drop points, then refine by bisection
    lo = t_mode - 1.0
    for _ in range(100):
        if h(lo) < h_mode - _TAIL_DROP:
            break
        lo = t_mode - 2.0 * (t_mode - lo)
    hi = t_mode + 1.0
    for _ in range(100):
        if h(hi) < h_mode - _TAIL_DROP:
            break
        hi = t_mode + 2.0 * (hi - t_mode)
    a, b = lo, t_mode
    for _ in range(30):
        mid = 0.5 * (a + b)
        if h(mid) < h_mode - _TAIL_DROP:
            a = mid
        else:
            b = mid
    lo = a
    a, b = t_mode, hi
    for _ in range(30):
        mid = 0.5 * (a + b)
        if h(mid) < h_mode - _TAIL_DROP:
            b = mid
        else:
            a = mid
    hi = b

    dt = (hi - lo) / (grid_size - 1)
    w = [math.exp(h(lo + i * dt) - h_mode) for i in range(grid_size)]
    total = 0.0
    cum = [0.0] * grid_size
    for i in range(1, grid_size):
        total += 0.5 * (w[i - 1] + w[i]) * dt
        cum[i] = total
    target = u * total
    i = 1
    while i < grid_size - 1 and cum[i] < target:
        i += 1
    seg = cum[i] - cum[i - 1]
    frac = (target - cum[i - 1]) / seg if seg > 0 else 0.5
    return lo + (i - 1 + frac) * dt


def sample_alpha(beta: float, a_anchor: float, xs, n: int, r: int, c: float,
                 s_c: float, w3: float, w4: float, grid_size: int, rng,
                 diag) -> float:
    """One draw from the alpha conditional: mode-anchored rejection with
    a grid-inversion fallback."""

    def h(t):
        return log_cond_alpha_t(t, beta, xs, n, r, c, s_c, w3, w4)

    t0 = math.log(a_anchor)
    lo, hi = _bracket_mode(h, t0)
    t_mode = _golden_max(h, lo, hi)
    h_mode = h(t_mode)

    pts = [t_mode - 1.5, t_mode - 0.6, t_mode + 1e-3, t_mode + 0.6, t_mode + 1.5]
    pts, hs = _expand_points(h, pts)
    hull = _Hull(pts, hs, -math.inf)

    proposals = 0
    while proposals < _GRID_FALLBACK_AFTER:
        x, idx = hull.sample(rng.random())
        proposals += 1
        diag["alpha_proposals"] += 1
        if not math.isfinite(x):
            continue
        hx = h(x)
        ux = hull.value(idx, x) + hull.offset
        if hx - ux > _HULL_SLACK * (1.0 + abs(hx)):
            diag["alpha_hull_violations"] += 1
            break
        u2 = rng.random()
        if u2 <= 0.0 or math.log(u2) <= hx - ux:
            diag["alpha_accepts"] += 1
            return math.exp(x)
        hull.insert(x, hx)
    diag["alpha_grid_draws"] += 1
    t = _grid_draw_alpha(h, t_mode, h_mode, grid_size, rng.random())
    return math.exp(t)


def draw_alpha_grid(beta: float, a_anchor: float, xs, n: int, r: int,
                    c: float, s_c: float, w3: float, w4: float,
                    grid_size: int, rng) -> float:
    """Force the grid-inversion path of :func:`sample_alpha` (testing aid)."""

    def h(t):
        return log_cond_alpha_t(t, beta, xs, n, r, c, s_c, w3, w4)

    t0 = math.log(a_anchor)
    lo, hi = _bracket_mode(h, t0)
    t_mode = _golden_max(h, lo, hi)
    t = _grid_draw_alpha(h, t_mode, h(t_mode), grid_size, rng.random())
    return math.exp(t)


def run_chain(xs, n: int, r: int, c: float, w1: float, w2: float, w3: float,
              w4: float, alpha0: float, beta0: float, n_iter: int,
              grid_size: int, rng):
    """Alternate the two conditional draws n_iter times from (alpha0, beta0)."""
    if w2 + r < 1.0:
        raise ValueError("log-concavity of the beta conditional needs w2 + r >= 1")
    xs = np.ascontiguousarray(xs, dtype=float).tolist()
    acc = 0.0
    for v in xs:  # sequential sum, matching the compiled kernel bit for bit
        acc += v
    s_c = acc + c * (n - r)
    diag = {"alpha_proposals": 0, "alpha_accepts": 0, "alpha_grid_draws": 0,
            "alpha_hull_violations": 0, "beta_proposals": 0, "beta_accepts": 0}
    alpha_draws = np.empty(n_iter)
    beta_draws = np.empty(n_iter)
    a, b = alpha0, beta0
    for i in range(n_iter):
        a = sample_alpha(b, a, xs, n, r, c, s_c, w3, w4, grid_size, rng, diag)
        b = sample_beta(a, b, xs, n, r, c, s_c, w1, w2, rng, diag)
        alpha_draws[i] = a
        beta_draws[i] = b
    return alpha_draws, beta_draws, diag
