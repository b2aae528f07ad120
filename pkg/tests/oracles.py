"""Independent reference implementations used only by the tests.

Everything here is plain Python written straight from the formulas, with no
imports from the package, so the checks do not share code paths with the
implementation under test.
"""

import itertools


def pos(x):
    return max(0.0, x)


def system_cost(d, q, lam):
    return q * pos(d) - lam * pos(-d)


def star_shares(d, q, lam):
    """Case form: shortfalls share q*d when the aggregate is short, surpluses share lam*d when long."""
    agg = sum(d)
    out = []
    for di in d:
        if di >= 0 and agg >= 0:
            denom = sum(pos(x) for x in d)
            out.append(0.0 if denom == 0 else agg / denom * q * di)
        elif di < 0 and agg < 0:
            beta = -agg / sum(pos(-x) for x in d)
            out.append(beta * lam * di)
        else:
            out.append(0.0)
    return out


def tilde_alpha(d, q, lam):
    agg = sum(d)
    num = q * pos(agg) - lam * pos(-agg)
    den = q * sum(pos(x) for x in d) - lam * sum(pos(-x) for x in d)
    return num / den


def tilde_shares(d, q, lam):
    if all(x == 0 for x in d):
        return [0.0] * len(d)
    a = tilde_alpha(d, q, lam)
    return [a * (q * pos(x) - lam * pos(-x)) for x in d]


def joint(marginals):
    """Independent product of ``[(value, prob), ...]`` marginals."""
    for combo in itertools.product(*marginals):
        prob = 1.0
        for _, p in combo:
            prob *= p
        yield [v for v, _ in combo], prob


def payoffs(c, marginals, q, lam, p, share_fn=star_shares):
    n = len(c)
    expected = [0.0] * n
    for w, prob in joint(marginals):
        phi = share_fn([ci - wi for ci, wi in zip(c, w)], q, lam)
        for i in range(n):
            expected[i] += prob * phi[i]
    return [p * c[i] - expected[i] for i in range(n)]


def brute_force_nash_2(grid1, grid2, marginals, q, lam, p, eps):
    """Double loop over profiles checking every unilateral move directly."""
    found = []
    for a in grid1:
        for b in grid2:
            u1, u2 = payoffs([a, b], marginals, q, lam, p)
            if any(payoffs([x, b], marginals, q, lam, p)[0] > u1 + eps for x in grid1):
                continue
            if any(payoffs([a, y], marginals, q, lam, p)[1] > u2 + eps for y in grid2):
                continue
            found.append((a, b))
    return found
