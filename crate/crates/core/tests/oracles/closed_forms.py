"""Arbitrary-precision reference values for the closed-form calculators.

Run with `python3 closed_forms.py`; the printed values are frozen into
`tests/closed_forms.rs`. Uses mpmath at 60 significant digits so the
f64 implementation can be checked to relative 1e-12.
"""
from mpmath import mp, mpf, sqrt, log, exp, ceil

mp.dps = 60


def generalization_gap(n, gamma_hat, xi):
    return 400 * sqrt(log(4 / mpf(xi)) / (n * mpf(gamma_hat) ** 2))


def covering_log_bound(n, gh, ghp, eta, alpha_p):
    gh, ghp, eta, alpha_p = map(mpf, (gh, ghp, eta, alpha_p))
    gap = gh - ghp
    complexity = 36 / gap**2 * log(20 * n / gap)
    concentration = eta**2 * alpha_p * n / (4 * (1 + eta) ** 2)
    return log(4) + complexity - concentration, complexity, concentration


def advanced(eps0, delta0, t):
    eps0, delta0 = mpf(eps0), mpf(delta0)
    return sqrt(2 * t * log(1 / delta0)) * eps0 + 2 * t * eps0**2, (t + 1) * delta0


def amplify(eps0, delta0, p):
    return 2 * mpf(p) * mpf(eps0), mpf(p) * mpf(delta0)


def noise(t, eps, delta):
    eps, delta = mpf(eps), mpf(delta)
    l = log(t / delta)
    return 1 / sqrt(t), 100 * l / eps, 100 * sqrt(l) / eps


def composed(eps, delta, t):
    eps, delta = mpf(eps), mpf(delta)
    p = 1 / sqrt(t)
    eps0 = eps / (20 * sqrt(log(t / delta)))
    delta0 = delta / (2 * sqrt(t))
    e1, d1 = amplify(eps0, delta0, p)
    return advanced(e1, d1, t)


def prescription(eps, delta, alpha, gamma, d):
    eps, delta, alpha, gamma = map(mpf, (eps, delta, alpha, gamma))
    gp = mpf("0.95") * gamma
    gap = gamma - gp
    t = int(ceil(1500 / (alpha * gap**2) - mpf("1e-30")))
    p, sigma, b = noise(t, eps, delta)
    lt = log(t)
    n_perc = ceil(
        100 * sqrt(d) * sigma * lt / (p * sqrt(alpha))
        + 1000 * sigma * sqrt(lt) / (p * alpha * gamma)
        + 100 * lt / alpha
        + mpf(10) ** 10 / (alpha**2 * gamma**2)
    )
    lam = mpf(10) ** 6 * sqrt(log(1 / alpha)) * max(sqrt(d), 1 / gamma)
    n_em = ceil(mpf(10) ** 4 * lam**2 / (eps * alpha) + mpf(10) ** 10 / (alpha**2 * gamma**2))
    return t, p, sigma, b, n_perc, lam, n_em


def show(name, *vals):
    print(name, ", ".join(mp.nstr(v, 20) for v in vals))


if __name__ == "__main__":
    show("gap(160000,1,4/e^2)", generalization_gap(160000, 1, 4 / exp(2)))
    show("gap(1000,0.3,0.05)", generalization_gap(1000, mpf("0.3"), mpf("0.05")))
    show("covering(1e6,.5,.25,1,.1)", *covering_log_bound(10**6, "0.5", "0.25", 1, "0.1"))
    show("covering(1e9,.9,.1,.5,.2)", *covering_log_bound(10**9, "0.9", "0.1", "0.5", "0.2"))
    show("advanced(.1,1e-5,1)", *advanced("0.1", "1e-5", 1))
    show("advanced(.03,1e-7,500)", *advanced("0.03", "1e-7", 500))
    show("amplify(.4,1e-6,.5)", *amplify("0.4", "1e-6", "0.5"))
    show("amplify(.7,3e-4,.013)", *amplify("0.7", "3e-4", "0.013"))
    show("noise(T=100,eps=1,delta=1e-5)", *noise(100, 1, "1e-5"))
    show("composed(.5,1e-5,100)", *composed("0.5", "1e-5", 100))
    for args in [("0.5", "1e-5", "0.5", "0.5", 100), ("0.9", "1e-7", "0.1", "0.2", 784)]:
        show("prescription%r" % (args,), *prescription(*args))
