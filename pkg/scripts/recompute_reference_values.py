"""Regenerate the frozen reference constants used by the test suite.

Everything here is computed with mpmath at 50 significant digits and does NOT
import the package, so it serves as an independent oracle. Run it and compare
against the constants frozen in tests/reference_values.py.
"""

import mpmath as mp

mp.mp.dps = 50


def p_func(x, alpha):
    return mp.e**(-alpha * x) * (1 - alpha * x)


def p_inverse(q, alpha):
    # branch with x <= 2/alpha; u = 1 - alpha*x solves u*e^u = q*e
    u = mp.lambertw(q * mp.e)
    return (1 - u) / alpha


def solve_lambda(alpha, beta, t, phi, z, y):
    # root of H(lam) = alpha*exp(alpha*beta*I(lam) - alpha*phi + z - y) - lam
    def bigh(lam):
        integral = mp.quad(
            lambda r: p_inverse(mp.exp(-mp.exp(-2 * beta * r) * y) * lam / alpha, alpha),
            [0, t],
        )
        return alpha * mp.exp(alpha * beta * integral - alpha * phi + z - y) - lam

    lo, hi = mp.mpf("1e-30"), alpha * mp.exp(-y)
    while bigh(hi) > 0:
        hi *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if bigh(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def schedule_pieces(alpha, beta, t, phi, z, y, lam):
    xi = lambda r: p_inverse(mp.exp(-mp.exp(-2 * beta * r) * y) * lam / alpha, alpha)
    eta = lambda r: xi(r) - (1 + mp.exp(-2 * beta * r)) * y / alpha + z / alpha
    p_star = xi(0) + (z - 2 * y) / alpha
    xi_int = mp.quad(xi, [0, t])
    q_star = phi - beta * xi_int - xi(t) + y * (1 + mp.exp(-2 * beta * t)) / alpha - z / alpha
    return xi, eta, p_star, q_star, xi_int


def value_eq10(alpha, beta, t, w, s, xi, eta, p_star, q_star):
    mid = s * mp.quad(lambda r: mp.exp(-alpha * eta(r)) * beta * xi(r), [0, t])
    mid += s * (mp.exp(-alpha * p_star) - mp.exp(-alpha * eta(t))) / alpha
    return (
        w
        + s * (1 - mp.exp(-alpha * p_star)) / alpha
        + mid
        + s * mp.exp(-alpha * eta(t)) * (1 - mp.exp(-alpha * q_star)) / alpha
    )


def show(label, value):
    print(f"{label} = {mp.nstr(value, 30)}")


# --- sigma = 0 reference instance: alpha=beta=t=1, phi=3, z=1, F=0 (s=e), w=0
alpha = beta = t = mp.mpf(1)
phi, z, w = mp.mpf(3), mp.mpf(1), mp.mpf(0)
s = mp.e

c_func = lambda p: mp.exp(alpha * (t * beta + 1) * p - alpha * phi - t * beta * z) + alpha * p - z - 1
p_star = mp.findroot(c_func, mp.mpf("1.5"))
zeta_star = beta * (p_star - z / alpha)
q_star = phi - p_star - t * zeta_star
lam_star = alpha * p_func(p_star - z / alpha, alpha)
v_ref = w + (1 - mp.exp(-alpha * (p_star + q_star))) * s / alpha + t * s * mp.exp(-alpha * p_star) * zeta_star
show("ZERO_VOL_P_STAR", p_star)
show("ZERO_VOL_ZETA_STAR", zeta_star)
show("ZERO_VOL_Q_STAR", q_star)
show("ZERO_VOL_LAMBDA_STAR", lam_star)
show("ZERO_VOL_VALUE", v_ref)

# cross-check with the full solver at y=0
lam2 = solve_lambda(alpha, beta, t, phi, z, mp.mpf(0))
xi, eta, p2, q2, _ = schedule_pieces(alpha, beta, t, phi, z, mp.mpf(0), lam2)
v2 = value_eq10(alpha, beta, t, w, s, xi, eta, p2, q2)
assert abs(lam2 - lam_star) < mp.mpf("1e-35"), (lam2, lam_star)
assert abs(v2 - v_ref) < mp.mpf("1e-30")

# --- sigma = 0.2 LargeHoldings instance: alpha=beta=t=1, phi=3, z=1, F=0, w=0
y = mp.mpf("0.01")  # 0.2^2 / 4
lam_ou = solve_lambda(alpha, beta, t, phi, z, y)
xi, eta, p_ou, q_ou, xi_int = schedule_pieces(alpha, beta, t, phi, z, y, lam_ou)
v_ou = value_eq10(alpha, beta, t, w, s, xi, eta, p_ou, q_ou)
zeta0 = beta * xi(0) + 2 * beta * y / (alpha * (2 - alpha * xi(0)))
show("OU_LAMBDA_STAR", lam_ou)
show("OU_P_STAR", p_ou)
show("OU_Q_STAR", q_ou)
show("OU_XI_INT", xi_int)
show("OU_ZETA0", zeta0)
show("OU_VALUE", v_ou)

# --- small-holdings block value: w=0, phi=0.5, s=10, alpha=1
show("SMALL_HOLDINGS_VALUE", 10 * (1 - mp.exp(-mp.mpf("0.5"))))

# --- L(z) at beta = t = 1: root and tail
l_func = lambda zz: 1 - (1 + beta * t + zz) * mp.exp(-beta * t * zz / (1 + beta * t)) + beta * t * mp.exp(-zz - 1)
show("L_ROOT", mp.findroot(l_func, mp.mpf("3.3")))
show("L_AT_0", l_func(mp.mpf(0)))
show("ABS_L_100_MINUS_1", abs(l_func(mp.mpf(100)) - 1))

# --- round-trip bound at phi=0, z=10, alpha=beta=t=1, y=0.01, s=e^{F+z}
phi0, z10 = mp.mpf(0), mp.mpf(10)
s10 = mp.exp(z10)  # F = 0
lam_rt = solve_lambda(alpha, beta, t, phi0, z10, y)
xi_rt = lambda r: p_inverse(mp.exp(-mp.exp(-2 * beta * r) * y) * lam_rt / alpha, alpha)
bound = (s10 / alpha) * (
    1
    - (1 + beta * t) * mp.exp(y - z10) * lam_rt / alpha
    + beta * mp.exp(y - z10) * mp.quad(lambda r: mp.exp(mp.exp(-2 * beta * r) * y - alpha * xi_rt(r)), [0, t])
)
show("ROUND_TRIP_LAMBDA_Z10", lam_rt)
show("ROUND_TRIP_BOUND_Z10", bound)
show("ROUND_TRIP_WEAK_BOUND_Z10", (s10 / alpha) * l_func(z10))
