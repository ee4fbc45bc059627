"""Brute-force reference implementations used as test oracles.

Deliberately naive pure-Python loops, sharing no code with the package.
"""

from fractions import Fraction
from itertools import product


def naive_axis_sums(counts, columns=True):
    rows = [list(map(int, r)) for r in counts]
    h, w = len(rows), len(rows[0])
    if columns:
        return [sum(rows[y][x] for y in range(h)) for x in range(w)]
    return [sum(rows[y][x] for x in range(w)) for y in range(h)]


def fast_axis_sums(counts, columns=True):
    """Same as naive_axis_sums with C-level sum; for the large acceptance sweep."""
    rows = counts.tolist()
    if columns:
        return [sum(col) for col in zip(*rows)]
    return [sum(r) for r in rows]


def above_mean(sums):
    mu = Fraction(sum(sums), len(sums))
    return [s > mu for s in sums]


def scan_simple(sums):
    above = above_mean(sums)
    idx = [i for i, a in enumerate(above) if a]
    return (idx[0], idx[-1]) if idx else None


def enumerate_runs(sums, c):
    """All (start, end) of windows of length c whose every entry is above the mean."""
    above = above_mean(sums)
    return [(i, i + c - 1) for i in range(len(sums) - c + 1) if all(above[i:i + c])]


def scan_consecutive(sums, c):
    runs = enumerate_runs(sums, c)
    if not runs:
        return None
    return min(r[0] for r in runs), max(r[1] for r in runs)


def best_window(sums, lo, hi, side):
    best, best_start = None, None
    for start in range(lo, hi - side + 2):
        total = sum(sums[start:start + side])
        if best is None or total > best:
            best, best_start = total, start
    return best_start


def reference_roi(counts, c, columns=None, rows=None):
    """(x_min, x_max, y_min, y_max) or None, computed from scratch."""
    cols = columns if columns is not None else naive_axis_sums(counts, True)
    rws = rows if rows is not None else naive_axis_sums(counts, False)
    xb = scan_consecutive(cols, c)
    yb = scan_consecutive(rws, c)
    if xb is None or yb is None:
        return None
    (x0, x1), (y0, y1) = xb, yb
    w, h = x1 - x0 + 1, y1 - y0 + 1
    if w > h:
        x0 = best_window(cols, x0, x1, h)
        x1 = x0 + h - 1
    elif h > w:
        y0 = best_window(rws, y0, y1, w)
        y1 = y0 + w - 1
    return x0, x1, y0, y1


def windowed_mean(values, l):
    """Trailing mean of previous l values, warm-up over available history."""
    out = []
    for i, v in enumerate(values):
        if i == 0:
            out.append(v)
            continue
        prev = values[max(0, i - l):i]
        out.append(sum(prev) / len(prev))
    return out


def _dist(p, q):
    return sum((a - b) ** 2 for a, b in zip(p, q)) ** 0.5


def all_warping_paths(n, m):
    """Every monotone path from (0, 0) to (n-1, m-1) with unit steps."""
    def walk(i, j):
        if (i, j) == (n - 1, m - 1):
            yield [(i, j)]
            return
        for di, dj in ((1, 1), (1, 0), (0, 1)):
            a, b = i + di, j + dj
            if a < n and b < m:
                for rest in walk(a, b):
                    yield [(i, j)] + rest
    yield from walk(0, 0)


def brute_force_dtw(a, b):
    """(best total, avg distance of that path) over all warping paths."""
    d = {(i, j): _dist(a[i], b[j]) for i, j in product(range(len(a)), range(len(b)))}
    best = None
    for path in all_warping_paths(len(a), len(b)):
        total = sum(d[p] for p in path)
        if best is None or total < best[0]:
            best = (total, total / len(path), path)
    return best


def brute_force_dtw_fast(a, b):
    """Exhaustive DFS over all warping paths: (best total, avg of that path).

    Equivalent to brute_force_dtw without materialising path lists.
    """
    n, m = len(a), len(b)
    d = [[_dist(a[i], b[j]) for j in range(m)] for i in range(n)]
    best = [float("inf"), 0]

    def walk(i, j, total, length):
        total += d[i][j]
        length += 1
        if i == n - 1 and j == m - 1:
            if total < best[0]:
                best[0], best[1] = total, length
            return
        if i + 1 < n and j + 1 < m:
            walk(i + 1, j + 1, total, length)
        if i + 1 < n:
            walk(i + 1, j, total, length)
        if j + 1 < m:
            walk(i, j + 1, total, length)

    walk(0, 0, 0.0, 0)
    return best[0], best[0] / best[1]
