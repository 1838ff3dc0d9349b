"""Reference values for the unit tests, computed independently at 50 digits.

Run from the repository root:

    python3 tests/oracles/compute_oracles.py > tests/support/oracle_values.hpp
"""

import itertools

import mpmath as mp

mp.mp.dps = 50
PI = mp.pi
TWO_PI = 2 * mp.pi

BASE = dict(alpha=mp.mpf("-1.34e-2"), beta=mp.mpf("5.7e-3"), a=mp.mpf("0.861"), b=mp.mpf("1.13"),
            x0=mp.mpf("8.79e-3"), sigma=mp.mpf("8.7e-4"))
RADII = [mp.mpf("0.5"), mp.mpf(1), mp.mpf(2), mp.mpf(3)]
UNITS = [mp.mpf("0.004"), mp.mpf("0.008"), mp.mpf("0.016"), mp.mpf("0.03")]


def baseline_mean(p, th, r0):
    rho = r0 + p["x0"]
    return p["x0"] + p["alpha"] * rho ** p["a"] + p["beta"] * rho ** p["b"] * mp.cos(2 * th)


def sensitivity(p, th, r0):
    rho = r0 + p["x0"]
    return p["a"] * p["alpha"] * rho ** (p["a"] - 1) + p["b"] * p["beta"] * rho ** (p["b"] - 1) * mp.cos(2 * th)


def exact_mean(p, th, r0, x):
    rho = r0 + p["x0"] + x
    return p["x0"] + x + p["alpha"] * rho ** p["a"] + p["beta"] * rho ** p["b"] * mp.cos(2 * th)


def taylor_mean(p, th, r0, g):
    return baseline_mean(p, th, r0) + (1 + sensitivity(p, th, r0)) * g


# ---------------------------------------------------------------------------
# Geometry on an n-section circle.

def wrap_signed(x):
    y = mp.fmod(x, TWO_PI)
    if y > PI:
        y -= TWO_PI
    if y <= -PI:
        y += TWO_PI
    return y


def geometry(th, n=16):
    w = TWO_PI / n
    s = int(mp.floor(th / w)) % n
    mid = (s + mp.mpf("0.5")) * w
    nb = (s - 1) % n if th < mid else (s + 1) % n
    nb_mid = (nb + mp.mpf("0.5")) * w
    boundary = (s * w) if nb == (s - 1) % n else ((s + 1) % n) * w
    return s, nb, wrap_signed(th - mid), wrap_signed(th - nb_mid), mp.fmod(boundary, TWO_PI)


def weight(lam, d_own, d_nb):
    return 1 / (1 + mp.exp(lam * (d_own - d_nb)))


def g_simple(lam, th, levels, unit):
    s, nb, o, onb, _ = geometry(th)
    w = weight(lam, abs(o), abs(onb))
    return w * levels[s] * unit + (1 - w) * levels[nb] * unit


def shift(rp, tb):
    out = rp["delta0"]
    for k, c in enumerate(rp["dc"], start=1):
        out += c * mp.cos(k * tb)
    for k, c in enumerate(rp["ds"], start=1):
        out += c * mp.sin(k * tb)
    return out


def g_refined(rp, th, levels, unit):
    s, nb, o, onb, tb = geometry(th)
    gap = abs(levels[s] - levels[nb])
    lam = rp["l1"] if gap == 1 else rp["l2"]
    d = shift(rp, tb)
    w = weight(lam, abs(o - d), abs(onb - d))
    return w * levels[s] * unit + (1 - w) * levels[nb] * unit


# ---------------------------------------------------------------------------
# Restricted Latin square designs by brute force.

def symmetry_groups():
    # Group of a section: index of its reflection-orbit representative in [0, pi/2).
    w = TWO_PI / 16
    reps = [(k + mp.mpf("0.5")) * w for k in range(4)]
    groups = []
    for s in range(16):
        m = (s + mp.mpf("0.5")) * w
        orbit = [mp.fmod(v + 4 * TWO_PI, TWO_PI) for v in (m, PI - m, PI + m, TWO_PI - m)]
        first = min(orbit)
        groups.append(min(range(4), key=lambda k: abs(reps[k] - first)))
    return groups


def valid_designs():
    groups = symmetry_groups()
    levels = (-1, 0, 1, 2)
    perms = list(itertools.permutations(levels))
    squares = 0
    valid = []
    for rows in itertools.product(perms, repeat=4):
        if any(len({rows[q][g] for q in range(4)}) != 4 for g in range(4)):
            continue
        squares += 1
        design = [rows[s // 4][groups[s]] for s in range(16)]
        if all(abs(design[s] - design[(s + 1) % 16]) <= 2 for s in range(16)):
            valid.append(design)
    return squares, valid


# ---------------------------------------------------------------------------
# Convergence diagnostics on a fixed chain matrix.

def chain_matrix():
    n, m = 60, 4
    return [[mp.sin(mp.mpf("0.37") * t * (c + 1)) + mp.mpf("0.1") * c + mp.mpf("0.05") * mp.cos(mp.mpf("1.7") * t)
             for c in range(m)] for t in range(n)]


def gelman_rubin(x):
    n, m = len(x), len(x[0])
    means = [mp.fsum(x[t][c] for t in range(n)) / n for c in range(m)]
    vars_ = [mp.fsum((x[t][c] - means[c]) ** 2 for t in range(n)) / (n - 1) for c in range(m)]
    W = mp.fsum(vars_) / m
    grand = mp.fsum(means) / m
    B = n * mp.fsum((mu - grand) ** 2 for mu in means) / (m - 1)
    return mp.sqrt(((n - 1) * W / n + B / n) / W)


def ess(x):
    n, m = len(x), len(x[0])
    means = [mp.fsum(x[t][c] for t in range(n)) / n for c in range(m)]
    vars_ = [mp.fsum((x[t][c] - means[c]) ** 2 for t in range(n)) / (n - 1) for c in range(m)]
    W = mp.fsum(vars_) / m
    grand = mp.fsum(means) / m
    var_plus = (n - 1) * W / n + mp.fsum((mu - grand) ** 2 for mu in means) / (m - 1)

    def acov(c, k):
        return mp.fsum((x[t][c] - means[c]) * (x[t + k][c] - means[c]) for t in range(n - k)) / n

    def rho(k):
        return 1 - (W - mp.fsum(acov(c, k) for c in range(m)) / m) / var_plus

    gammas = []
    t = 0
    while t + 1 < n:
        gam = (1 if t == 0 else rho(t)) + rho(t + 1)
        if not gam > 0:
            break
        gammas.append(gam)
        t += 2
    for k in range(1, len(gammas)):
        gammas[k] = min(gammas[k], gammas[k - 1])
    tau = -1 + 2 * mp.fsum(gammas)
    tau = max(tau, 1 / mp.log10(n * m))
    return n * m / tau


# ---------------------------------------------------------------------------
# Log posterior on a small dataset.

def normal_logpdf(x, mu, sd):
    return -((x - mu) / sd) ** 2 / 2 - mp.log(sd) - mp.log(2 * PI) / 2


def log_prior(p, lambdas):
    lp = normal_logpdf(p["a"], 1, 2) + normal_logpdf(p["b"], 1, 1) + normal_logpdf(mp.log(p["x0"]), 0, 1)
    for lam in lambdas:
        lp += normal_logpdf(mp.log(lam), 0, 4)
    return lp


def emit(name, value):
    print(f"inline constexpr double {name} = {mp.nstr(value, 20, min_fixed=-1, max_fixed=-1)};")


def emit_array(name, values):
    body = ", ".join(mp.nstr(v, 20, min_fixed=-1, max_fixed=-1) for v in values)
    print(f"inline constexpr std::array<double, {len(values)}> {name}{{{body}}};")


def main():
    print("// Generated by tests/oracles/compute_oracles.py at 50 significant digits.")
    print("#pragma once\n\n#include <array>\n#include <cstddef>\n\nnamespace oracle {\n")

    thetas = [mp.mpf(0), mp.mpf("0.3"), PI / 4, mp.mpf("1.1"), mp.mpf("2.5")]
    print("// Model functions at the uncompensated-cylinder reference parameters.")
    emit_array("kThetas", thetas)
    for i, r0 in enumerate(RADII):
        emit_array(f"kBaselineMeanR{i}", [baseline_mean(BASE, t, r0) for t in thetas])
        emit_array(f"kSensitivityR{i}", [sensitivity(BASE, t, r0) for t in thetas])
        emit_array(f"kExactMeanR{i}", [exact_mean(BASE, t, r0, 2 * UNITS[i]) for t in thetas])
        emit_array(f"kTaylorMeanR{i}", [taylor_mean(BASE, t, r0, 2 * UNITS[i]) for t in thetas])

    print("\n// Largest first-order error over theta = 2 pi k / 1440 at 2 and 4 units.")
    grid = [TWO_PI * k / 1440 for k in range(1440)]
    e2, e4 = [], []
    for i, r0 in enumerate(RADII):
        e2.append(max(abs(taylor_mean(BASE, t, r0, 2 * UNITS[i]) - exact_mean(BASE, t, r0, 2 * UNITS[i]))
                      for t in grid[:361]))
        e4.append(max(abs(taylor_mean(BASE, t, r0, 4 * UNITS[i]) - exact_mean(BASE, t, r0, 4 * UNITS[i]))
                      for t in grid[:361]))
    emit_array("kTaylorErrorTwoUnits", e2)
    emit_array("kTaylorErrorFourUnits", e4)

    squares, valid = valid_designs()
    print("\n// Restricted Latin square designs.")
    print(f"inline constexpr std::size_t kLatinSquares = {squares};")
    print(f"inline constexpr std::size_t kValidDesigns = {len(valid)};")
    design = valid[0]
    other = valid[len(valid) // 2]
    print(f"inline constexpr std::array<int, 16> kDesignA{{{', '.join(map(str, design))}}};")
    print(f"inline constexpr std::array<int, 16> kDesignB{{{', '.join(map(str, other))}}};")

    print("\n// Effective treatments on design A with unit 0.03.")
    unit = mp.mpf("0.03")
    g_thetas = [mp.mpf("0.05"), mp.mpf("0.37"), mp.mpf("1.0"), mp.mpf("1.57"), mp.mpf("3.1"), mp.mpf("4.0"),
                mp.mpf("5.95"), mp.mpf("6.25")]
    emit_array("kTreatmentThetas", g_thetas)
    emit_array("kSimpleTreatmentLambda50", [g_simple(mp.mpf(50), t, design, unit) for t in g_thetas])
    rp = dict(l1=mp.mpf(40), l2=mp.mpf(70), delta0=mp.mpf("0.02"),
              dc=[mp.mpf("0.01"), mp.mpf("-0.005"), mp.mpf("0.002")],
              ds=[mp.mpf("0.003"), mp.mpf("0.004"), mp.mpf("-0.001")])
    emit_array("kRefinedTreatment", [g_refined(rp, t, design, unit) for t in g_thetas])

    print("\n// Continuity: max |g - x| over theta = 2 pi k / 8192 for the plan 0.01 cos(theta), lambda 50.")
    cont = []
    fine = [TWO_PI * k / 8192 for k in range(8192)]
    mp.mp.dps = 30
    for n in (16, 32, 64, 128):
        w = TWO_PI / n
        worst = mp.mpf(0)
        for t in fine:
            s = int(mp.floor(t / w)) % n
            mid = (s + mp.mpf("0.5")) * w
            nb = (s - 1) % n if t < mid else (s + 1) % n
            nb_mid = (nb + mp.mpf("0.5")) * w
            wt = weight(mp.mpf(50), abs(wrap_signed(t - mid)), abs(wrap_signed(t - nb_mid)))
            g = wt * mp.mpf("0.01") * mp.cos(mid) + (1 - wt) * mp.mpf("0.01") * mp.cos(nb_mid)
            worst = max(worst, abs(g - mp.mpf("0.01") * mp.cos(t)))
        cont.append(worst)
    mp.mp.dps = 50
    emit_array("kContinuityError", cont)

    print("\n// Convergence diagnostics of x[t][c] = sin(0.37 t (c+1)) + 0.1 c + 0.05 cos(1.7 t), 60 x 4.")
    x = chain_matrix()
    emit("kGelmanRubin", gelman_rubin(x))
    emit("kEffectiveSampleSize", ess(x))

    print("\n// Log posterior of a 14-unit dataset on radii 0.5 (design A) and 1 (design B), unit 0.03.")
    data_thetas = [mp.mpf("0.05"), mp.mpf("0.4"), mp.mpf("1.3"), mp.mpf("2.2"), mp.mpf("3.9"), mp.mpf("5.5"),
                   mp.mpf("6.2")]
    emit_array("kDataThetas", data_thetas)
    designs = {0: design, 1: other}
    radii = [mp.mpf("0.5"), mp.mpf(1)]
    ys = []
    for ri, r0 in enumerate(radii):
        for k, t in enumerate(data_thetas):
            s = int(mp.floor(t / (TWO_PI / 16)))
            ys.append(baseline_mean(BASE, t, r0) + (1 + sensitivity(BASE, t, r0)) * designs[ri][s] * unit
                      + mp.mpf("0.001") * mp.sin(3 * k + ri))
    emit_array("kDataDeformation", ys)

    p = dict(BASE)
    p["sigma"] = mp.mpf("0.002")
    lambdas = [mp.mpf(30), mp.mpf(60)]
    refined = [dict(l1=mp.mpf(40), l2=mp.mpf(70), delta0=mp.mpf("0.02"),
                    dc=[mp.mpf("0.01"), mp.mpf("-0.005"), mp.mpf("0.002")],
                    ds=[mp.mpf("0.003"), mp.mpf("0.004"), mp.mpf("-0.001")]),
               dict(l1=mp.mpf(25), l2=mp.mpf(90), delta0=mp.mpf("-0.01"),
                    dc=[mp.mpf("0.004"), mp.mpf("0.0"), mp.mpf("-0.003")],
                    ds=[mp.mpf("-0.002"), mp.mpf("0.001"), mp.mpf("0.005")])]

    def loglik(gfun):
        total = mp.mpf(0)
        i = 0
        for ri, r0 in enumerate(radii):
            for t in data_thetas:
                mu = taylor_mean(p, t, r0, gfun(ri, t))
                total += normal_logpdf(ys[i], mu, p["sigma"])
                i += 1
        return total

    base_prior = log_prior(p, [])
    emit("kLogPosteriorBaseline", loglik(lambda ri, t: 0) + base_prior)
    emit("kLogPosteriorNoInterference",
         loglik(lambda ri, t: designs[ri][int(mp.floor(t / (TWO_PI / 16)))] * unit) + base_prior)
    emit("kLogPosteriorSimple",
         loglik(lambda ri, t: g_simple(lambdas[ri], t, designs[ri], unit)) + log_prior(p, lambdas))
    emit("kLogPosteriorRefined",
         loglik(lambda ri, t: g_refined(refined[ri], t, designs[ri], unit))
         + log_prior(p, [refined[0]["l1"], refined[0]["l2"], refined[1]["l1"], refined[1]["l2"]]))
    print("\n}  // namespace oracle")


if __name__ == "__main__":
    main()
