"""Independent reference values for the unit tests.

Written from the definitions with mpmath and exact rationals; shares no code
with the C++ library.  Run from the repository root:

    python3 tests/oracles/oracles.py > tests/golden/oracles.json
"""
import json
from fractions import Fraction

import mpmath as mp

mp.mp.dps = 40


def unit_bump(u):
    if u <= 0 or u >= 1:
        return mp.mpf(0)
    return mp.e ** (-1 / (u * (1 - u)))


def raw(t):
    t = mp.mpf(t)
    return unit_bump((t - mp.mpf("0.05")) / mp.mpf("1.10")) + mp.mpf("1e-3") * unit_bump(
        (t - mp.mpf("0.05")) / mp.mpf("1.85"))


def k1(t):
    b = raw(t)
    if b == 0:
        return mp.mpf(0)
    return b / sum(raw(t - m) for m in range(-3, 4))


def smooth_step(t):
    if t <= 0:
        return mp.mpf(1)
    if t >= 1:
        return mp.mpf(0)
    a, b = mp.e ** (-1 / (1 - t)), mp.e ** (-1 / t)
    return a / (a + b)


def cutoff(t, a=1, b=mp.mpf("1.5")):
    u = abs(mp.mpf(t))
    if u <= a:
        return mp.mpf(1)
    if u >= b:
        return mp.mpf(0)
    return smooth_step((u - a) / (b - a))


def phi_level(xi, j):
    if j == 0:
        return cutoff(xi)
    return cutoff(xi / 2 ** j) - cutoff(xi / 2 ** (j - 1))


def dense_argmax(fn, lo, hi, steps):
    best, arg = None, None
    for i in range(steps + 1):
        t = lo + (hi - lo) * mp.mpf(i) / steps
        v = fn(t)
        if best is None or v > best:
            best, arg = v, t
    # golden-section polish around the coarse maximum
    h = (hi - lo) / steps
    a, b = arg - h, arg + h
    g = (mp.sqrt(5) - 1) / 2
    for _ in range(120):
        c, d = b - g * (b - a), a + g * (b - a)
        if fn(c) > fn(d):
            b = d
        else:
            a = c
    t = (a + b) / 2
    return t, fn(t)


def whitney(K, J_max):
    """Greedy maximal dyadic cubes of (0,1): accept when the closed cube keeps
    distance >= K 2^-J from {0,1} and its centre is inside; otherwise split."""
    out = []

    def dist(lo, hi):
        if hi <= 0 or lo >= 1:
            return Fraction(0)
        return max(Fraction(0), min(lo - 0, 1 - hi))

    def visit(J, M):
        lo, hi = Fraction(M, 2 ** J), Fraction(M + 1, 2 ** J)
        if hi <= 0 or lo >= 1:
            return
        c = (lo + hi) / 2
        d = dist(lo, hi)
        if d > 0 and 0 < c < 1 and d >= Fraction(K, 2 ** J):
            out.append((J, M, d))
            return
        if J < J_max:
            visit(J + 1, 2 * M)
            visit(J + 1, 2 * M + 1)

    visit(0, 0)
    out.sort(key=lambda r: (r[0], r[1]))
    return [{"J": J, "M": [M], "dist_lower": float(d), "dist_upper": float(d + Fraction(1, 2 ** J))}
            for J, M, d in out]


def index_count(cubes, j_max):
    n = 0
    for c in cubes:
        J, M = c["J"], c["M"][0]
        lo, hi = Fraction(M, 2 ** J), Fraction(M + 1, 2 ** J)
        for j in range(0, j_max + 1):
            for m in range(-2 ** j, 2 ** (j + 1)):
                a, b = Fraction(m, 2 ** j), Fraction(m + 1, 2 ** j)
                if lo <= a and b <= hi:
                    n += 1
    return n


def main():
    # k1 is flat (= 1) where no other integer translate overlaps; the peak is that plateau
    ts = [mp.mpf("0.05") + mp.mpf(i) / 4000 for i in range(7401)]
    flat = [t for t in ts if k1(t) >= 1 - mp.mpf("1e-30")]
    kmax = max(k1(t) for t in ts)
    _, m1 = dense_argmax(lambda t: t / 2 * k1(t), mp.mpf("0.05"), mp.mpf("1.9"), 2000)
    cubes = whitney(2, 6)
    out = {
        "gauss_ft": {str(x): float(mp.e ** (-mp.mpf(x) ** 2 / 2)) for x in (0, 1, 2)},
        "sqrt_pi": float(mp.sqrt(mp.pi)),
        "sqrt_pi_half": float(mp.sqrt(mp.pi / 2)),
        "phi_at_3": {str(j): float(phi_level(mp.mpf(3), j)) for j in range(0, 5)},
        "J_eps": {
            "1": {"J": 1, "eps": float(1 - mp.log(mp.mpf("1.9"), 2))},
            "2": {"J": 2, "eps": float(2 - mp.log(mp.mpf("1.9") * mp.sqrt(2), 2))},
        },
        "k1_plateau": [float(flat[0]), float(flat[-1])],
        "k1_max": float(kmax),
        "quark_3_5_peak": [float((5 + flat[0]) / 8), float((5 + flat[-1]) / 8)],
        "sup_k_beta1": float(m1),
        "whitney_0_1_K2_J6": cubes,
        "whitney_0_1_K2_J4_count_j6": index_count(whitney(2, 4), 6),
        "uncovered_0_1_K2_J6": float(1 - sum(Fraction(1, 2 ** c["J"]) for c in cubes)),
    }
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
