"""Direct transcriptions of the metric definitions, written with plain loops
and exact rational arithmetic. Deliberately share no code with the package."""
from fractions import Fraction
from itertools import combinations, product


def _deg(a):
    n = len(a)
    return [sum(a[i][j] for j in range(n) if j != i) for i in range(n)]


def density(a):
    n = len(a)
    links = sum(a[i][j] for i in range(n) for j in range(i + 1, n))
    return Fraction(2 * links, n * (n - 1))


def knn(a):
    n = len(a)
    k = _deg(a)
    total = Fraction(0)
    for i in range(n):
        if k[i] > 0:
            total += Fraction(sum(a[i][j] * k[j] for j in range(n) if j != i), k[i])
    return total / n


def clustering(a):
    n = len(a)
    total = Fraction(0)
    for i in range(n):
        num = den = 0
        for j in range(n):
            for k in range(n):
                if len({i, j, k}) < 3:
                    continue
                num += a[i][j] * a[i][k] * a[j][k]
                den += a[i][j] * a[i][k]
        if den:
            total += Fraction(num, den)
    return total / n


def rich_club(a):
    n = len(a)
    k = _deg(a)
    d = density(a)
    phi = Fraction(0)
    for value in sorted(set(k)):
        club = [i for i in range(n) if k[i] > value]
        m = len(club)
        if m >= 2:
            edges = sum(a[i][j] for i, j in combinations(club, 2))
            psi = Fraction(2 * edges, m * (m - 1))
        else:
            psi = Fraction(0)
        share = Fraction(sum(1 for x in k if x == value), n)
        phi += share * (psi - d) / (1 - d)
    return phi


def ensemble_mean_density(p):
    """Exact E[D] by enumerating every graph on the node set."""
    n = len(p)
    pairs = list(combinations(range(n), 2))
    mean = 0.0
    for bits in product((0, 1), repeat=len(pairs)):
        weight = 1.0
        for (i, j), b in zip(pairs, bits):
            weight *= p[i][j] if b else 1.0 - p[i][j]
        mean += weight * sum(bits) / len(pairs)
    return mean
