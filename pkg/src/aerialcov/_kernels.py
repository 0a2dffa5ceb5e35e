"""Hot numeric kernels: LoS geometry, mean powers, exclusion radii, and the
quadratures behind the interference Laplace transforms.

The dedicated-interferer integrand is tabulated per Laplace argument on a
two-piece log grid split at the antenna-gain step, and line integrals of the
tabulated function are evaluated in closed form segment by segment -- exact
for the interpolant, no nested adaptive recursion.  Only the outer road-offset
integral and the terrestrial-field integrals run adaptive Gauss-Kronrod.

Everything here is scalar, allocation-light code meant for numba's @njit.
Setting AERIALCOV_NO_NUMBA=1 (or running without numba installed) executes
the identical functions as plain Python -- slow but dependency-free; the
benchmark script compares the two paths.
"""
from __future__ import annotations

import math
import os

import numpy as np

NUMBA_DISABLED = os.environ.get("AERIALCOV_NO_NUMBA", "") not in ("", "0")

if not NUMBA_DISABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_DISABLED = True

if NUMBA_DISABLED:

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


# --- parameter-vector layout (meters / linear units) -----------------------
PV_LAM_TB = 0
PV_LAM_L = 1
PV_LAM_P = 2
PV_DH1 = 3
PV_DH2 = 4
PV_A = 5
PV_B = 6
PV_G_M = 7
PV_G_S = 8
PV_Z_DB = 9
PV_RHO_TB = 10
PV_RHO_DB = 11
PV_ETA_L = 12
PV_ETA_N = 13
PV_ALPHA_L = 14
PV_ALPHA_N = 15
PV_M_L = 16
PV_M_N = 17
PV_SIGMA2 = 18
PV_R_MAX = 19
PV_LEN = 20

# BS kinds / link kinds as plain ints usable inside kernels.
TB = 0
DB = 1
LOS = 0
NLOS = 1

# Integrand selectors for the 1-D adaptive driver.
_MODE_TB_LAPL = 0  # z * (1 - kappa_tb(s, z)) * P_c(z)
_MODE_TB_CDF = 1  # z * P_c(z)

# Interference-table knots: log-uniform pieces below/above the gain step.
TAB_N1 = 320
TAB_N2 = 192
TAB_W_MIN = 0.05  # meters

# 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK dqk15).
_XGK = np.array(
    [
        0.991455371120813,
        0.949107912342759,
        0.864864423359769,
        0.741531185599394,
        0.586087235467691,
        0.405845151377397,
        0.207784955007898,
        0.0,
    ]
)
_WGK = np.array(
    [
        0.022935322010529,
        0.063092092629979,
        0.104790010322250,
        0.140653259715525,
        0.169004726639267,
        0.190350578064785,
        0.204432940075298,
        0.209482141084728,
    ]
)
_WG = np.array(
    [
        0.129484966168870,
        0.279705391489277,
        0.381830050505119,
        0.417959183673469,
    ]
)

K15_NODES = np.concatenate([-_XGK[:7], _XGK[7:8], _XGK[6::-1]])
K15_WEIGHTS = np.concatenate([_WGK[:7], _WGK[7:8], _WGK[6::-1]])
_g7 = np.zeros(15)
_g7[1:14:2] = np.concatenate([_WG[:3], _WG[3:4], _WG[2::-1]])
G7_WEIGHTS = _g7

_STACK = 256  # plenty for max_depth <= 60

# binomial table for the Bell-polynomial recursions (fading shapes m <= 16)
_BINOM = np.zeros((16, 16))
for _i in range(16):
    _BINOM[_i, 0] = 1.0
    for _k in range(1, _i + 1):
        _BINOM[_i, _k] = _BINOM[_i - 1, _k - 1] + _BINOM[_i - 1, _k]
del _i, _k


@njit(cache=True)
def plos(d, dh, a, b):
    """LoS probability at horizontal distance d for height difference dh."""
    if d <= 0.0:
        ang = 90.0
    else:
        ang = math.atan(dh / d) * 57.29577951308232
    return 1.0 / (1.0 + a * math.exp(-b * (ang - a)))


@njit(cache=True)
def pc(pv, bs, c, d):
    """Probability of link state c (0 LoS, 1 NLoS) toward a BS of kind bs."""
    dh = pv[PV_DH1] if bs == DB else pv[PV_DH2]
    p = plos(d, dh, pv[PV_A], pv[PV_B])
    return p if c == LOS else 1.0 - p


@njit(cache=True)
def gain_db_antenna(pv, d):
    return pv[PV_G_M] if d < pv[PV_Z_DB] else pv[PV_G_S]


@njit(cache=True)
def mean_power(pv, bs, c, d):
    eta = pv[PV_ETA_L] if c == LOS else pv[PV_ETA_N]
    alpha = pv[PV_ALPHA_L] if c == LOS else pv[PV_ALPHA_N]
    if bs == TB:
        amp = pv[PV_RHO_TB] * pv[PV_G_S] * eta
        dh = pv[PV_DH2]
    else:
        amp = pv[PV_RHO_DB] * gain_db_antenna(pv, d) * eta
        dh = pv[PV_DH1]
    return amp * (d * d + dh * dh) ** (-0.5 * alpha)


@njit(cache=True)
def exclusion_from_power(pv, obs, oc, power):
    """Largest horizontal distance at which a BS of kind (obs, oc) delivers
    mean power >= the given level. 0 when even d=0 falls short."""
    eta = pv[PV_ETA_L] if oc == LOS else pv[PV_ETA_N]
    alpha = pv[PV_ALPHA_L] if oc == LOS else pv[PV_ALPHA_N]
    if obs == TB:
        q = (pv[PV_RHO_TB] * pv[PV_G_S] * eta / power) ** (2.0 / alpha)
        rad = q - pv[PV_DH2] * pv[PV_DH2]
        return math.sqrt(rad) if rad > 0.0 else 0.0
    q = (pv[PV_RHO_DB] * eta / power) ** (2.0 / alpha)
    dh1sq = pv[PV_DH1] * pv[PV_DH1]
    rad_m = q * pv[PV_G_M] ** (2.0 / alpha) - dh1sq
    rad_s = q * pv[PV_G_S] ** (2.0 / alpha) - dh1sq
    x_main = math.sqrt(rad_m) if rad_m > 0.0 else 0.0
    x_side = math.sqrt(rad_s) if rad_s > 0.0 else 0.0
    if x_side >= pv[PV_Z_DB]:
        return x_side
    return min(x_main, pv[PV_Z_DB])


@njit(cache=True)
def exclusion(pv, sbs, sc, obs, oc, d):
    return exclusion_from_power(pv, obs, oc, mean_power(pv, sbs, sc, d))


@njit(cache=True)
def kappa(pv, bs, c, s, w):
    """Fading-averaged Laplace factor of one interferer of kind (bs, c) at
    horizontal distance w."""
    m = pv[PV_M_L] if c == LOS else pv[PV_M_N]
    return (m / (m + s * mean_power(pv, bs, c, w))) ** m


@njit(cache=True)
def one_minus_kappa(pv, bs, c, s, w):
    """1 - kappa, computed stably: the direct difference loses all precision
    when s * mean_power is tiny, and that jitter stalls adaptive quadrature."""
    m = pv[PV_M_L] if c == LOS else pv[PV_M_N]
    return -math.expm1(-m * math.log1p(s * mean_power(pv, bs, c, w) / m))


@njit(cache=True)
def deriv_coeff(m, j):
    """prod_{i=1}^{j-1} (m+i)/m: magnitude coefficient of the j-th s-derivative
    of 1 - kappa for Nakagami shape m."""
    c = 1.0
    for i in range(1, j):
        c *= (m + i) / m
    return c


@njit(cache=True)
def deriv_integrand(pv, bs, c, s, w, j):
    """|d^j/ds^j (1 - kappa)| for one interferer of kind (bs, c) at distance w.

    The derivatives alternate in sign; their magnitudes
    c_j * pbar^j * (1 + s*pbar/m)^-(m+j) are what the positive Bell
    recursions consume.  j = 0 returns 1 - kappa itself."""
    if j == 0:
        return one_minus_kappa(pv, bs, c, s, w)
    m = pv[PV_M_L] if c == LOS else pv[PV_M_N]
    p = mean_power(pv, bs, c, w)
    return deriv_coeff(m, j) * math.exp(
        j * math.log(p) - (m + j) * math.log1p(s * p / m))


# --- dedicated-interferer tables ---------------------------------------------


@njit(cache=True)
def tab_meta(pv):
    """Log-grid descriptors (lw1, dl1, lw2, dl2) for the two-piece table."""
    zdb = pv[PV_Z_DB]
    rmax = pv[PV_R_MAX]
    lw1 = math.log(TAB_W_MIN)
    dl1 = (math.log(zdb) - lw1) / (TAB_N1 - 1)
    lw2 = math.log(zdb)
    dl2 = (math.log(rmax) - lw2) / (TAB_N2 - 1)
    out = np.empty(4)
    out[0] = lw1
    out[1] = dl1
    out[2] = lw2
    out[3] = dl2
    return out


@njit(cache=True)
def tab_knots(meta):
    knots = np.empty(TAB_N1 + TAB_N2)
    for i in range(TAB_N1):
        knots[i] = math.exp(meta[0] + meta[1] * i)
    for i in range(TAB_N2):
        knots[TAB_N1 + i] = math.exp(meta[2] + meta[3] * i)
    return knots


@njit(cache=True)
def build_db_tabs(pv, s, c, knots, jmax):
    """Tabulate the dedicated-interferer integrand and its first jmax
    s-derivative magnitudes at the knots: row j holds
    deriv_integrand(..., j) * P_c(w).  The value at the gain step is taken
    from the mainlobe side on the first piece and the sidelobe side on the
    second."""
    vals = np.empty((jmax + 1, TAB_N1 + TAB_N2))
    for i in range(TAB_N1 + TAB_N2):
        w = knots[i]
        if i == TAB_N1 - 1:
            w = math.nextafter(pv[PV_Z_DB], 0.0)
        p = pc(pv, DB, c, w)
        for j in range(jmax + 1):
            vals[j, i] = deriv_integrand(pv, DB, c, s, w, j) * p
    return vals


@njit(cache=True)
def build_db_tab(pv, s, c, knots):
    """Single-row variant of build_db_tabs: (1 - kappa(s, w)) * P_c(w)."""
    return build_db_tabs(pv, s, c, knots, 0)[0]


@njit(cache=True)
def _piece_integral(vals, knots, off, lw0, dl, n, rho, wlo, whi):
    """Closed-form integral of the piecewise-linear table over the along-line
    coordinate t = sqrt(w^2 - rho^2), for w in [wlo, whi] within one piece."""
    if dl <= 0.0:
        return 0.0
    a = max(wlo, knots[off], rho)
    b = min(whi, knots[off + n - 1])
    if b <= a:
        return 0.0
    j0 = int((math.log(a) - lw0) / dl)
    if j0 < 0:
        j0 = 0
    elif j0 > n - 2:
        j0 = n - 2
    rho2 = rho * rho
    t_prev = math.sqrt(max(a * a - rho2, 0.0))
    if rho > 0.0:
        s_prev = 0.5 * (t_prev * a + rho2 * math.log((t_prev + a) / rho))
    else:
        s_prev = 0.5 * t_prev * a
    total = 0.0
    w_prev = a
    for j in range(j0, n - 1):
        wj = knots[off + j]
        wj1 = knots[off + j + 1]
        if wj1 <= w_prev:
            continue
        wb = wj1 if wj1 < b else b
        if wb <= w_prev:
            break
        dw = wj1 - wj
        if dw <= 0.0:
            continue
        slope = (vals[off + j + 1] - vals[off + j]) / dw
        t_b = math.sqrt(max(wb * wb - rho2, 0.0))
        if rho > 0.0:
            s_b = 0.5 * (t_b * wb + rho2 * math.log((t_b + wb) / rho))
        else:
            s_b = 0.5 * t_b * wb
        total += (vals[off + j] - slope * wj) * (t_b - t_prev) + slope * (s_b - s_prev)
        t_prev = t_b
        s_prev = s_b
        w_prev = wb
        if wb >= b:
            break
    return total


@njit(cache=True)
def line_integral_tab(vals, knots, meta, rho, wlo, whi):
    """Integral of the tabulated integrand along a line at perpendicular
    offset rho, over the one-sided span where the horizontal distance w lies
    in [wlo, whi]. Constant extension below the first knot."""
    if whi <= wlo:
        return 0.0
    total = 0.0
    k0 = knots[0]
    if wlo < k0:
        wa = max(wlo, rho)
        wb = min(whi, k0)
        if wb > wa:
            rho2 = rho * rho
            ta = math.sqrt(max(wa * wa - rho2, 0.0))
            tb = math.sqrt(max(wb * wb - rho2, 0.0))
            total += vals[0] * (tb - ta)
    total += _piece_integral(vals, knots, 0, meta[0], meta[1], TAB_N1, rho, wlo, whi)
    total += _piece_integral(vals, knots, TAB_N1, meta[2], meta[3], TAB_N2, rho, wlo, whi)
    return total


# --- one-dimensional adaptive Gauss-Kronrod (terrestrial field) --------------


@njit(cache=True)
def _leaf_integrand(mode, pv, s, c, j, t):
    if mode == _MODE_TB_LAPL:
        return t * deriv_integrand(pv, TB, c, s, t, j) * pc(pv, TB, c, t)
    return t * pc(pv, TB, c, t)


@njit(cache=True)
def _gk15_leaf(mode, pv, s, c, j, a, b):
    h = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    acc_k = 0.0
    acc_g = 0.0
    for i in range(15):
        f = _leaf_integrand(mode, pv, s, c, j, mid + h * K15_NODES[i])
        acc_k += f * K15_WEIGHTS[i]
        acc_g += f * G7_WEIGHTS[i]
    return acc_k * h, abs(acc_k - acc_g) * h


@njit(cache=True)
def adapt_1d(mode, pv, s, c, j, a, b, rel_tol, abs_tol, max_depth):
    """Adaptive GK15 of the selected terrestrial integrand on [a, b].

    Returns (value, ok); ok goes False when the depth limit is hit before
    the local error target."""
    if b <= a:
        return 0.0, True
    val0, _ = _gk15_leaf(mode, pv, s, c, j, a, b)
    budget = max(abs_tol, rel_tol * abs(val0))
    stack_a = np.empty(_STACK)
    stack_b = np.empty(_STACK)
    stack_d = np.empty(_STACK, dtype=np.int64)
    stack_a[0] = a
    stack_b[0] = b
    stack_d[0] = 0
    top = 1
    total = 0.0
    ok = True
    while top > 0:
        top -= 1
        sa = stack_a[top]
        sb = stack_b[top]
        depth = stack_d[top]
        v, e = _gk15_leaf(mode, pv, s, c, j, sa, sb)
        if e <= budget * (sb - sa) / (b - a) or depth >= max_depth:
            if depth >= max_depth and e > budget * (sb - sa) / (b - a):
                ok = False
            total += v
        else:
            m = 0.5 * (sa + sb)
            stack_a[top] = sa
            stack_b[top] = m
            stack_d[top] = depth + 1
            stack_a[top + 1] = m
            stack_b[top + 1] = sb
            stack_d[top + 1] = depth + 1
            top += 2
            if top >= _STACK - 1:
                return total, False
    return total, ok


# --- road-offset integral -----------------------------------------------------


@njit(cache=True)
def _rho_integrand(pv, tabs_l, tabs_n, knots, meta, v1l, v1n, j, rho):
    """Order-j road-field term at offset rho.

    The LoS and NLoS interferers of one road share that road, so its void
    exponent is E(rho) = 2 lam_p * (I_l + I_n) with per-state exclusion cuts.
    j = 0 gives 1 - exp(-E): the chance the road carries any effective
    interferer.  j >= 1 gives exp(-E) * B_j where B_j is the complete Bell
    polynomial of the derivative magnitudes u_k = 2 lam_p (I_l,k + I_n,k):
    the weight this road contributes to the j-th s-derivative of the total
    road-field exponent."""
    rmax = pv[PV_R_MAX]
    two_lp = 2.0 * pv[PV_LAM_P]
    wlo_l = v1l if v1l > rho else rho
    wlo_n = v1n if v1n > rho else rho
    e0 = two_lp * (line_integral_tab(tabs_l[0], knots, meta, rho, wlo_l, rmax)
                   + line_integral_tab(tabs_n[0], knots, meta, rho, wlo_n, rmax))
    if j == 0:
        return -math.expm1(-e0)
    u = np.zeros(j + 1)
    for k in range(1, j + 1):
        u[k] = two_lp * (line_integral_tab(tabs_l[k], knots, meta, rho, wlo_l, rmax)
                         + line_integral_tab(tabs_n[k], knots, meta, rho, wlo_n, rmax))
    bell = np.zeros(j + 1)
    bell[0] = 1.0
    for t in range(1, j + 1):
        acc = 0.0
        for q in range(t):
            acc += _BINOM[t - 1, q] * bell[t - 1 - q] * u[q + 1]
        bell[t] = acc
    return math.exp(-e0) * bell[j]


@njit(cache=True)
def _gk15_rho(pv, tabs_l, tabs_n, knots, meta, v1l, v1n, j, lo, hi, sq_end, a, b):
    """GK15 panel [a, b]. With sq_end the panel lives in x-space on [0, 1]
    and rho = hi - (hi - lo)*(1 - x)^2, which flattens the square-root cusp
    the integrand has where the available chord shrinks to zero at rho=hi."""
    h = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    acc_k = 0.0
    acc_g = 0.0
    span = hi - lo
    for i in range(15):
        x = mid + h * K15_NODES[i]
        if sq_end:
            f = _rho_integrand(pv, tabs_l, tabs_n, knots, meta, v1l, v1n, j,
                               hi - span * (1.0 - x) ** 2)
            f *= 2.0 * span * (1.0 - x)
        else:
            f = _rho_integrand(pv, tabs_l, tabs_n, knots, meta, v1l, v1n, j, x)
        acc_k += f * K15_WEIGHTS[i]
        acc_g += f * G7_WEIGHTS[i]
    return acc_k * h, abs(acc_k - acc_g) * h


@njit(cache=True)
def adapt_rho(pv, tabs_l, tabs_n, knots, meta, v1l, v1n, j, lo, hi, sq_end,
              rel_tol, abs_tol, max_depth):
    """Adaptive GK15 over road offsets rho on [lo, hi]."""
    if hi <= lo:
        return 0.0, True
    a = 0.0 if sq_end else lo
    b = 1.0 if sq_end else hi
    val0, _ = _gk15_rho(pv, tabs_l, tabs_n, knots, meta, v1l, v1n, j,
                        lo, hi, sq_end, a, b)
    budget = max(abs_tol, rel_tol * abs(val0))
    stack_a = np.empty(_STACK)
    stack_b = np.empty(_STACK)
    stack_d = np.empty(_STACK, dtype=np.int64)
    stack_a[0] = a
    stack_b[0] = b
    stack_d[0] = 0
    top = 1
    total = 0.0
    ok = True
    outer_depth = max_depth if max_depth < 18 else 18
    while top > 0:
        top -= 1
        sa = stack_a[top]
        sb = stack_b[top]
        depth = stack_d[top]
        v, e = _gk15_rho(pv, tabs_l, tabs_n, knots, meta, v1l, v1n, j,
                         lo, hi, sq_end, sa, sb)
        if e <= budget * (sb - sa) / (b - a) or depth >= outer_depth:
            if depth >= outer_depth and e > budget * (sb - sa) / (b - a):
                ok = False
            total += v
        else:
            m = 0.5 * (sa + sb)
            stack_a[top] = sa
            stack_b[top] = m
            stack_d[top] = depth + 1
            stack_a[top + 1] = m
            stack_b[top + 1] = sb
            stack_d[top + 1] = depth + 1
            top += 2
            if top >= _STACK - 1:
                return total, False
    return total, ok


@njit(cache=True)
def _road_term(pv, tabs_l, tabs_n, knots, meta, v1l, v1n, j, rel_tol, abs_tol, max_depth):
    """2*pi*lam_l * int_0^rmax (order-j road term)(rho) drho, split where the
    integrand kinks: at each exclusion radius and at the antenna-gain step."""
    rmax = pv[PV_R_MAX]
    if v1l >= rmax and v1n >= rmax:
        return 0.0, True
    brks = np.empty(4)
    brks[0] = min(v1l, rmax)
    brks[1] = min(v1n, rmax)
    brks[2] = min(pv[PV_Z_DB], rmax)
    brks[3] = rmax
    brks = np.sort(brks)
    total = 0.0
    ok = True
    lo = 0.0
    for idx in range(4):
        hi = brks[idx]
        if hi > lo:
            sq_end = hi == v1l or hi == v1n or hi == rmax
            v, o = adapt_rho(pv, tabs_l, tabs_n, knots, meta, v1l, v1n, j,
                             lo, hi, sq_end, rel_tol, abs_tol, max_depth)
            total += v
            ok = ok and o
            lo = hi
    return 2.0 * math.pi * pv[PV_LAM_L] * total, ok


# --- Laplace-transform exponents --------------------------------------------


@njit(cache=True)
def laplace_gen_derivs(pv, s, sbs, sc, d, tabs_l, tabs_n, knots, meta, jmax,
                       rel_tol, abs_tol, max_depth):
    """Exponent of the general-interferer transform and its derivative
    magnitudes.

    Returns (out, ok) with out[0] = E (so L_gen = exp(-E)) and
    out[k] = (-1)^(k+1) d^k E / ds^k >= 0 for k = 1..jmax.  The field is the
    TBS process beyond its exclusion radius plus the road field; each road
    keeps only the chord outside the per-state exclusion disks."""
    out = np.zeros(jmax + 1)
    if s == 0.0:
        return out, True
    rmax = pv[PV_R_MAX]
    ok = True
    if pv[PV_LAM_TB] > 0.0:
        for c in range(2):
            vtb = exclusion(pv, sbs, sc, TB, c, d)
            if vtb < rmax:
                for j in range(jmax + 1):
                    v, o = adapt_1d(_MODE_TB_LAPL, pv, s, c, j, vtb, rmax,
                                    rel_tol, abs_tol, max_depth)
                    ok = ok and o
                    out[j] += 2.0 * math.pi * pv[PV_LAM_TB] * v
    if pv[PV_LAM_L] > 0.0 and pv[PV_LAM_P] > 0.0:
        v1l = exclusion(pv, sbs, sc, DB, LOS, d)
        v1n = exclusion(pv, sbs, sc, DB, NLOS, d)
        for j in range(jmax + 1):
            v, o = _road_term(pv, tabs_l, tabs_n, knots, meta, v1l, v1n, j,
                              rel_tol, abs_tol, max_depth)
            ok = ok and o
            out[j] += v
    return out, ok


@njit(cache=True)
def laplace_gen_exponent(pv, s, sbs, sc, d, vals_l, vals_n, knots, meta, rel_tol, abs_tol, max_depth):
    """Exponent E of the general-interferer transform, L_gen = exp(-E)."""
    out, ok = laplace_gen_derivs(
        pv, s, sbs, sc, d, vals_l.reshape(1, vals_l.shape[0]),
        vals_n.reshape(1, vals_n.shape[0]), knots, meta, 0,
        rel_tol, abs_tol, max_depth)
    return out[0], ok


@njit(cache=True)
def laplace_typ_derivs(pv, s, sc, d, theta, tabs_l, tabs_n, knots, meta, jmax):
    """Exponent of the serving-road transform and its derivative magnitudes
    (same layout as laplace_gen_derivs): interferers on the road through the
    serving dedicated BS, at perpendicular offset d*sin(theta).  Exact for
    the tabulated integrand -- no quadrature error."""
    out = np.zeros(jmax + 1)
    if s == 0.0 or pv[PV_LAM_P] <= 0.0:
        return out
    yl = d * math.sin(theta)
    rmax = pv[PV_R_MAX]
    if yl >= rmax:
        return out
    for c in range(2):
        tabs = tabs_l if c == LOS else tabs_n
        v0 = exclusion(pv, DB, sc, DB, c, d)
        wlo = v0 if v0 > yl else yl
        for k in range(jmax + 1):
            out[k] += 2.0 * pv[PV_LAM_P] * line_integral_tab(
                tabs[k], knots, meta, yl, wlo, rmax)
    return out


@njit(cache=True)
def laplace_typ_exponent(pv, s, sc, d, theta, vals_l, vals_n, knots, meta):
    """Order-0 serving-road exponent."""
    out = laplace_typ_derivs(
        pv, s, sc, d, theta, vals_l.reshape(1, vals_l.shape[0]),
        vals_n.reshape(1, vals_n.shape[0]), knots, meta, 0)
    return out[0]


@njit(cache=True)
def laplace_typ_exponent_batch(pv, s, sc, d, thetas, vals_l, vals_n, knots, meta):
    out = np.empty(thetas.shape[0])
    for i in range(thetas.shape[0]):
        out[i] = laplace_typ_exponent(pv, s, sc, d, thetas[i], vals_l, vals_n, knots, meta)
    return out


@njit(cache=True)
def laplace_typ_derivs_batch(pv, s, sc, d, thetas, tabs_l, tabs_n, knots, meta, jmax):
    out = np.empty((thetas.shape[0], jmax + 1))
    for i in range(thetas.shape[0]):
        out[i, :] = laplace_typ_derivs(
            pv, s, sc, d, thetas[i], tabs_l, tabs_n, knots, meta, jmax)
    return out


@njit(cache=True)
def success_from_derivs(m, s0, a0, u):
    """Success probability for integer Nakagami shape m from the transform
    F(s) = exp(-A(s)) of sigma^2 + I, evaluated at s0 = m*tau/pbar.

    P(pbar*h > tau*(sigma^2+I)) = sum_{j<m} (s0^j/j!) (-1)^j F^(j)(s0); with
    a0 = A(s0) and u[k] = (-1)^(k+1) A^(k)(s0) >= 0 this is
    exp(-a0) * sum_{j<m} (s0^j/j!) B_j(u), all terms positive."""
    mm = int(m)
    if a0 >= 745.0:
        return 0.0
    bell = np.zeros(mm)
    bell[0] = 1.0
    for t in range(1, mm):
        acc = 0.0
        for q in range(t):
            acc += _BINOM[t - 1, q] * bell[t - 1 - q] * u[q + 1]
        bell[t] = acc
    total = 0.0
    term = 1.0
    for j in range(mm):
        if j > 0:
            term *= s0 / j
        total += term * bell[j]
    v = math.exp(-a0) * total
    return min(max(v, 0.0), 1.0)


@njit(cache=True)
def cdf_exp_tb(pv, c, r, rel_tol, abs_tol, max_depth):
    """Exponent of the nearest-TBS law: 2*pi*lam_tb * int_0^r z P_c(z) dz."""
    rr = r if r < pv[PV_R_MAX] else pv[PV_R_MAX]
    if rr <= 0.0 or pv[PV_LAM_TB] <= 0.0:
        return 0.0, True
    v, ok = adapt_1d(_MODE_TB_CDF, pv, 0.0, c, 0, 0.0, rr, rel_tol, abs_tol, max_depth)
    return 2.0 * math.pi * pv[PV_LAM_TB] * v, ok
