"""Closed-form references, kept independent of the quadrature code under test."""
import math


def clipped_triangle(a, m, b, alpha, lo, hi):
    """Exact area and first moment of min(tri(a, m, b), alpha) on [lo, hi].

    Integrates the piecewise-linear clipped shape segment by segment.
    """
    knots = {a, m, b, lo, hi}
    if m > a:
        knots.add(a + alpha * (m - a))
    if b > m:
        knots.add(b - alpha * (b - m))
    xs = sorted(k for k in knots if lo <= k <= hi)

    def mu(x):
        if x < a or x > b:
            v = 0.0
        elif x == m:
            v = 1.0
        elif x < m:
            v = (x - a) / (m - a)
        else:
            v = (b - x) / (b - m)
        return min(v, alpha)

    area = moment = 0.0
    for x0, x1 in zip(xs, xs[1:]):
        y0, y1 = mu(x0), mu(x1)
        h = x1 - x0
        area += h * (y0 + y1) / 2
        # exact moment of a linear segment
        moment += h * (x0 * (2 * y0 + y1) + x1 * (y0 + 2 * y1)) / 6
    return area, moment


def _gauss_mass(m, k, x0, x1):
    s = k * math.sqrt(2.0)
    return k * math.sqrt(math.pi / 2) * (math.erf((x1 - m) / s) - math.erf((x0 - m) / s))


def _gauss_moment(m, k, x0, x1):
    # int x g dx = m * mass + k^2 (g(x0) - g(x1))
    g = lambda x: math.exp(-((x - m) ** 2) / (2 * k * k))
    return m * _gauss_mass(m, k, x0, x1) + k * k * (g(x0) - g(x1))


def clipped_gaussian(m, k, alpha, lo, hi):
    """Exact area and first moment of min(gauss(m, k), alpha) on [lo, hi]."""
    if alpha >= 1.0:
        return _gauss_mass(m, k, lo, hi), _gauss_moment(m, k, lo, hi)
    d = k * math.sqrt(2.0 * math.log(1.0 / alpha))
    area = moment = 0.0
    pieces = [(lo, m - d, False), (m - d, m + d, True), (m + d, hi, False)]
    for x0, x1, flat in pieces:
        x0, x1 = max(x0, lo), min(x1, hi)
        if x1 <= x0:
            continue
        if flat:
            area += alpha * (x1 - x0)
            moment += alpha * (x1 * x1 - x0 * x0) / 2
        else:
            area += _gauss_mass(m, k, x0, x1)
            moment += _gauss_moment(m, k, x0, x1)
    return area, moment
