"""Reference values for the unit tests, computed with scipy/numpy/mpmath.

Run from the repo root:  python3 tests/oracles/compute_oracles.py > tests/oracles/oracle_values.hpp
The output is committed; the C++ tests never call Python.
"""
import numpy as np
import mpmath as mp
from scipy import stats, special, integrate

mp.mp.dps = 40
out = []


def emit(name, values):
    vals = ", ".join(repr(float(v)) for v in np.ravel(values))
    out.append(f"inline constexpr double {name}[] = {{{vals}}};")


# standard normal
xs = np.array([-8.0, -3.0, -1.0, 0.0, 0.5, 2.0, 6.0])
emit("kNormalX", xs)
emit("kNormalCdf", [float(mp.ncdf(x)) for x in xs])
ps = np.array([1e-10, 1e-3, 0.1, 0.5, 0.9, 0.975, 1 - 1e-9])
emit("kNormalP", ps)
emit("kNormalQuantile", [float(mp.sqrt(2) * mp.erfinv(2 * mp.mpf(p) - 1)) for p in ps])

# Kolmogorov limiting survival function and Stephens-corrected p-values
lams = np.array([0.3, 0.6, 1.0, 1.1799, 1.18, 1.36, 2.0, 3.0])
emit("kKolmogorovLambda", lams)
emit("kKolmogorovSf", special.kolmogorov(lams))
ks_cases = [(0.05, 100), (0.01, 10000), (0.003, 100000), (0.2, 30)]
emit("kKsD", [d for d, _ in ks_cases])
emit("kKsN", [n for _, n in ks_cases])
emit("kKsP", [special.kolmogorov((np.sqrt(n) + 0.12 + 0.11 / np.sqrt(n)) * d) for d, n in ks_cases])
crit_cases = [(1000, 0.005), (100000, 0.005), (100000, 0.0025)]
emit("kCritN", [n for n, _ in crit_cases])
emit("kCritAlpha", [a for _, a in crit_cases])
emit("kCrit", [special.kolmogi(a) / (np.sqrt(n) + 0.12 + 0.11 / np.sqrt(n)) for n, a in crit_cases])

# KS distance of a fixed sample to U(0,1)
u = np.array([0.91, 0.05, 0.33, 0.5, 0.72, 0.18, 0.64, 0.99, 0.27, 0.41])
emit("kKsSample", u)
emit("kKsSampleStat", [stats.kstest(u, "uniform").statistic])

# univariate families
vs = np.array([-2.5, -0.3, 0.0, 0.7, 3.1])
emit("kUniV", vs)
emit("kLaplaceLogPdf", stats.laplace(loc=0.4, scale=1.7).logpdf(vs))
emit("kLaplaceCdf", stats.laplace(loc=0.4, scale=1.7).cdf(vs))
emit("kLogisticLogPdf", stats.logistic(loc=-0.5, scale=0.8).logpdf(vs))
emit("kLogisticCdf", stats.logistic(loc=-0.5, scale=0.8).cdf(vs))
emit("kExponentialCdf", stats.expon(scale=1 / 2.5).cdf(vs))
emit("kUniP", [0.01, 0.3, 0.5, 0.77, 0.999])
emit("kLaplaceQuantile", stats.laplace(loc=0.4, scale=1.7).ppf([0.01, 0.3, 0.5, 0.77, 0.999]))
emit("kLogisticQuantile", stats.logistic(loc=-0.5, scale=0.8).ppf([0.01, 0.3, 0.5, 0.77, 0.999]))

# a 3-d Gaussian
mu = np.array([0.5, -1.0, 2.0])
cov = np.array([[2.0, 0.3, -0.4], [0.3, 1.0, 0.2], [-0.4, 0.2, 1.5]])
z = np.array([0.1, 0.2, 1.4])
emit("kGaussMean", mu)
emit("kGaussCov", cov)
emit("kGaussPoint", z)
emit("kGaussLogPdf", [stats.multivariate_normal(mu, cov).logpdf(z)])
# law of z_2 given (z_0, z_1) by Schur complement
s12 = cov[2, :2]
s11 = cov[:2, :2]
cm = mu[2] + s12 @ np.linalg.solve(s11, z[:2] - mu[:2])
cv = cov[2, 2] - s12 @ np.linalg.solve(s11, s12)
emit("kGaussCondCdf2", [stats.norm(cm, np.sqrt(cv)).cdf(z[2])])
cm1 = mu[1] + cov[1, 0] / cov[0, 0] * (z[0] - mu[0])
cv1 = cov[1, 1] - cov[1, 0] ** 2 / cov[0, 0]
emit("kGaussCondCdf1", [stats.norm(cm1, np.sqrt(cv1)).cdf(z[1])])

# 2-component mixture, 2-d
w = np.array([0.3, 0.7])
m0, m1 = np.array([-1.0, 0.5]), np.array([1.2, -0.4])
c0 = np.array([[1.0, 0.2], [0.2, 0.6]])
c1 = np.array([[0.5, -0.1], [-0.1, 1.3]])
zp = np.array([0.2, 0.1])
emit("kMixPoint", zp)
emit("kMixLogPdf", [np.log(w[0] * stats.multivariate_normal(m0, c0).pdf(zp)
                           + w[1] * stats.multivariate_normal(m1, c1).pdf(zp))])
# coordinate 1 given coordinate 0 by direct integration of the joint density
joint = lambda t: (w[0] * stats.multivariate_normal(m0, c0).pdf([zp[0], t])
                   + w[1] * stats.multivariate_normal(m1, c1).pdf([zp[0], t]))
num_, _ = integrate.quad(joint, -np.inf, zp[1], epsabs=1e-14, epsrel=1e-13)
den_, _ = integrate.quad(joint, -np.inf, np.inf, epsabs=1e-14, epsrel=1e-13)
emit("kMixCondCdf1", [num_ / den_])
emit("kMixCdf0", [w[0] * stats.norm(m0[0], np.sqrt(c0[0, 0])).cdf(zp[0])
                  + w[1] * stats.norm(m1[0], np.sqrt(c1[0, 0])).cdf(zp[0])])

# quartic exponential family, 1-d: log partition and CDF by mpmath quadrature
for eta in (0.0, 1.5):
    f = lambda t: mp.exp(-t ** 4 / 4 + eta * t)
    a = mp.log(mp.quad(f, [-mp.inf, 0, mp.inf]))
    tag = "0" if eta == 0.0 else "1"
    emit(f"kQuarticLogPartition{tag}", [float(a)])
    emit(f"kQuarticCdfAtHalf{tag}", [float(mp.quad(f, [-mp.inf, 0, 0.5]) / mp.exp(a))])

# Gaussian KR map: x -> L_t L_s^{-1} (x - mu_s) + mu_t with Cholesky factors
ms, mt = np.array([0.2, -0.1]), np.array([1.0, 3.0])
cs = np.array([[1.5, 0.4], [0.4, 0.9]])
ct = np.array([[0.7, -0.2], [-0.2, 2.0]])
ls, lt = np.linalg.cholesky(cs), np.linalg.cholesky(ct)
kx = np.array([0.3, -1.2])
emit("kKrSourceCov", cs)
emit("kKrTargetCov", ct)
emit("kKrPoint", kx)
emit("kKrImage", lt @ np.linalg.solve(ls, kx - ms) + mt)
# the same map from its definition: K_m = F_t^{-1}(F_s(x_m | x_<m) | K_<m) with scipy conditionals
def cond(mu_, c_, m, prefix):
    if m == 0:
        return mu_[0], np.sqrt(c_[0, 0])
    return mu_[1] + c_[1, 0] / c_[0, 0] * (prefix - mu_[0]), np.sqrt(c_[1, 1] - c_[1, 0] ** 2 / c_[0, 0])
a0, s0 = cond(ms, cs, 0, None)
b0, t0 = cond(mt, ct, 0, None)
y0 = stats.norm(b0, t0).ppf(stats.norm(a0, s0).cdf(kx[0]))
a1, s1 = cond(ms, cs, 1, kx[0])
b1, t1 = cond(mt, ct, 1, y0)
y1 = stats.norm(b1, t1).ppf(stats.norm(a1, s1).cdf(kx[1]))
emit("kKrImageByCdf", [y0, y1])

# reflection counterexample: R = 2 u u^T - I with u the unit mean difference
mu1, mu2 = np.array([0.3, -0.2]), np.array([1.1, 0.5])
f1 = np.array([[1.0, 0.5], [-0.3, 2.0], [0.7, 0.1]])
a1v = np.array([0.2, -0.4, 1.0])
uu = (mu2 - mu1) / np.linalg.norm(mu2 - mu1)
r = 2 * np.outer(uu, uu) - np.eye(2)
f2 = f1 @ r
a2 = a1v + f1 @ mu1 - f2 @ mu1
emit("kCeMu1", mu1)
emit("kCeMu2", mu2)
emit("kCeF1", f1)
emit("kCeAlpha1", a1v)
emit("kCeR", r)
emit("kCeF2", f2)
emit("kCeAlpha2", a2)
emit("kCeDistance", [np.linalg.norm(f1 - f2)])

# Spearman with ties
sa = np.array([1.0, 2.0, 2.0, 3.5, -1.0, 0.0, 7.0, 2.0, 5.0, 4.0])
sb = np.array([0.3, 0.1, 0.9, 0.9, -2.0, 1.0, 3.0, 0.2, 0.2, 2.5])
emit("kSpearmanA", sa)
emit("kSpearmanB", sb)
emit("kSpearmanRho", [stats.spearmanr(sa, sb).statistic])

# affine relation T_b = T_a L + d^T on noisy data: least squares
rng = np.random.default_rng(12345)
ta = rng.normal(size=(8, 2))
lmat = np.array([[1.5, -0.3], [0.4, 0.8]])
tb = ta @ lmat + np.array([0.5, -1.0]) + 0.01 * rng.normal(size=(8, 2))
design = np.hstack([ta, np.ones((8, 1))])
coef, *_ = np.linalg.lstsq(design, tb, rcond=None)
resid = tb - design @ coef
emit("kRelTa", ta)
emit("kRelTb", tb)
emit("kRelL", coef[:2])
emit("kRelD", coef[2])
emit("kRelResidual", [np.sqrt(np.mean(np.sum(resid ** 2, axis=1)))])

# multi-environment affine fit x_e = F eta_e + alpha
etas = np.array([[0.0, 0.0], [1.0, 0.2], [-0.5, 1.0], [0.3, -0.7]])
xm = np.array([[0.1, 0.9, -0.2], [1.3, 0.4, 0.6], [0.2, 2.1, -1.0], [0.8, -0.5, 0.4]])
design = np.hstack([np.ones((4, 1)), etas])
coef, *_ = np.linalg.lstsq(design, xm, rcond=None)
emit("kMeEtas", etas)
emit("kMeX", xm)
emit("kMeOffset", coef[0])
emit("kMeLoading", coef[1:].T)

print("// Generated by tests/oracles/compute_oracles.py. Do not edit.")
print("#pragma once")
print("namespace oracle {")
print("\n".join(out))
print("}  // namespace oracle")
