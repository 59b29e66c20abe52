"""Independent reference values for the shooting parameter kappa0.

Fixed-grid composite Simpson rule (2**14 panels, 40-digit arithmetic) for the
boundary defect D(kappa0), followed by plain bisection. Shares no code with
the Rust implementation. Run: python3 kappa0_oracle.py
"""
import mpmath as mp

mp.mp.dps = 40
PANELS = 2 ** 14


def setup(k0, factors, left, right):
    n_l = factors[0][0] if left == "blowdown" else 0
    n_r = factors[-1][0] if right == "blowdown" else 0
    e = k0 ** 2 / 2 + 2 * (n_l + 1) * k0
    x_end = 2 * (n_r + 1) + mp.sqrt(4 * (n_r + 1) ** 2 + 2 * e)
    coeffs = []
    for i, (n, p, q) in enumerate(factors):
        if i == 0 and left == "blowdown":
            coeffs.append(1 / (2 * k0))
        elif i == len(factors) - 1 and right == "blowdown":
            coeffs.append(-1 / (2 * x_end))
        else:
            coeffs.append((p - mp.sqrt(p ** 2 + e * q ** 2 / 2)) / (2 * e))
    return e, x_end - k0, coeffs


def defect(k0, factors, m, left, right):
    k0 = mp.mpf(k0)
    e, s_star, coeffs = setup(k0, factors, left, right)

    def f(r):
        x = r + k0
        v = mp.mpf(1)
        for (n, _p, q), a in zip(factors, coeffs):
            v *= (a * x ** 2 - mp.mpf(q) ** 2 / (4 * a)) ** n
        return v * x ** (m - 2) * (e - x ** 2 / 2)

    h = s_star / PANELS
    total = f(0) + f(s_star)
    for k in range(1, PANELS):
        total += (4 if k % 2 else 2) * f(k * h)
    return total * h / 3


def bisect(fn, lo, hi, tol=mp.mpf("1e-20")):
    flo = fn(lo)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        fm = fn(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


CASES = {
    "cp2_m2": ([(2, 3, 1)], 2, "collapse", "collapse", (5, 12)),
    "blowdown_m2": ([(1, 2, 1), (1, 3, 1)], 2, "blowdown", "collapse", (15, 30)),
}

if __name__ == "__main__":
    for name, (factors, m, left, right, (lo, hi)) in CASES.items():
        root = bisect(lambda k: defect(k, factors, m, left, right), mp.mpf(lo), mp.mpf(hi))
        print(name, mp.nstr(root, 20))
