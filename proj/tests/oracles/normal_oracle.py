"""High-precision normal-distribution and truncated-moment reference values.

Regenerates the constants frozen in test_uq.cpp, test_qoi.cpp, test_estimate.cpp
and test_deriv.cpp. Also contains a textbook two-point GPR posterior and a
brute-force check of the truncated-normal moment identities.
"""
import mpmath as mp
import numpy as np

mp.mp.dps = 40


def phi(z):
    return mp.exp(-z * z / 2) / mp.sqrt(2 * mp.pi)


def Phi(z):
    return mp.ncdf(z)


if __name__ == "__main__":
    print("phi(0)", mp.nstr(phi(0), 20))
    print("phi(1)", mp.nstr(phi(1), 20))
    print("Phi(1)", mp.nstr(Phi(1), 20))
    print("pdf 2d at mean, var .81", mp.nstr(1 / (2 * mp.pi * mp.mpf("0.81")), 20))
    lam = phi(1) / Phi(1)
    print("lambda", mp.nstr(lam, 20))
    print("accepted var", mp.nstr(1 - lam - lam**2, 20))
    hess = Phi(1) * ((1 - lam - lam**2) + lam**2 - 1)
    print("hessian via accepted moments", mp.nstr(hess, 20), "closed", mp.nstr(-1 * phi(1), 20))
    print("sigma(0.428,100)", mp.nstr(mp.sqrt(mp.mpf("0.428") * mp.mpf("0.572") / 100), 20))

    # Textbook GPR: zero prior mean, SE kernel, signal 1, length 1, jitter 1e-8.
    x = [mp.mpf(0), mp.mpf(1)]
    y = [mp.mpf(0), mp.mpf(1)]
    j = mp.mpf("1e-8")
    k = lambda a, b: mp.exp(-((a - b) ** 2) / 2)
    K = mp.matrix([[k(a, b) + (j if a == b else 0) for b in x] for a in x])
    ks = mp.matrix([k(mp.mpf("0.5"), a) for a in x])
    alpha = mp.lu_solve(K, mp.matrix(y))
    mean = sum(ks[i] * alpha[i] for i in range(2))
    v = mp.lu_solve(K, ks)
    var = 1 - sum(ks[i] * v[i] for i in range(2))
    print("gpr mean(0.5)", mp.nstr(mean, 20), "std", mp.nstr(mp.sqrt(var), 20))

    # Brute force: conditioned mean/variance of N(0,1) below z=1.
    rng = np.random.default_rng(12345)
    s = rng.standard_normal(10_000_000)
    acc = s[s <= 1.0]
    print("brute force accepted mean", acc.mean(), "var", acc.var(), "frac", acc.size / s.size)

    # Truncated-sampling mean shift for N(9, .81) in [6, 12]: symmetric box, zero shift.
    t = 9 + 0.9 * rng.standard_normal(10_000_000)
    t = t[np.abs(t - 9) <= 3]
    print("truncated brute force mean", t.mean())
