"""Independent oracles used to freeze expected values.

These deliberately avoid the code paths they check: uniformization works on
the explicit CTMC generator, the logistic decay is a closed form, and the
histogram distance helpers use plain numpy.
"""
import numpy as np


def uniformization_pmf(q_matrix: np.ndarray, p0: np.ndarray, t: float, tol: float = 1e-12) -> np.ndarray:
    """Exact transient distribution of a finite CTMC at time t.

    Standard uniformization: P(t) = sum_k Poisson(L*t, k) * U^k applied to the
    initial distribution, with U = I + Q/L and L >= max exit rate.  Poisson
    weights are tracked in log space so large L*t does not underflow.
    """
    from scipy.special import gammaln

    rates = -np.diag(q_matrix)
    lam = float(rates.max()) * 1.02 + 1e-9
    lt = lam * t
    u = np.eye(len(p0)) + q_matrix / lam
    v = p0.astype(np.float64).copy()
    out = np.zeros_like(v)
    k_hi = int(lt + 12.0 * np.sqrt(lt + 1.0) + 30.0)
    ks = np.arange(k_hi + 1)
    logw = -lt + ks * np.log(lt if lt > 0 else 1.0) - gammaln(ks + 1.0)
    if lt == 0.0:
        logw = np.where(ks == 0, 0.0, -np.inf)
    w = np.exp(logw)
    if abs(w.sum() - 1.0) > tol * 10:
        raise RuntimeError("uniformization truncation too aggressive")
    for k in range(k_hi + 1):
        if w[k] > 0.0:
            out += w[k] * v
        v = v @ u
    return out / out.sum()


def crazy_clock_generator(lam1: float, lam2: float, n: int) -> np.ndarray:
    """Generator of the 1D death chain on levels 0..N (index = count of A)."""
    q = np.zeros((n + 1, n + 1))
    for i in range(1, n + 1):
        rate = lam1 * i + lam2 * i * (n - i) / n
        q[i, i - 1] = rate
        q[i, i] = -rate
    return q


def logistic_decay(lam1: float, lam2: float, x0: float, t: float) -> float:
    """Closed-form solution of dx/dt = -(lam1*x + lam2*x*(1-x)).

    Writing a = 1 + lam1/lam2, the quantity g = (a-x)/x grows exactly like
    g0 * exp((lam1+lam2) t).
    """
    a = 1.0 + lam1 / lam2
    g0 = (a - x0) / x0
    g = g0 * np.exp((lam1 + lam2) * t)
    return a / (1.0 + g)


def ks_two_sample(a, b) -> float:
    """Reference two-sample KS statistic (independent of rxnsim.stats)."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    xs = np.concatenate([a, b])
    fa = np.searchsorted(a, xs, side="right") / len(a)
    fb = np.searchsorted(b, xs, side="right") / len(b)
    return float(np.abs(fa - fb).max())


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(p - q).sum())
