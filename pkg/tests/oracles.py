"""Slow, loop-based reference implementations used only by the tests."""

import math

import numpy as np


def rect_sum(px, r0, c0, r1, c1):
    total = 0
    for r in range(r0, r1):
        for c in range(c0, c1):
            total += int(px[r][c])
    return total


def occupied_boxes(px, w):
    """Grid-aligned w x w boxes with at least one 1, on a zero-extended grid."""
    h, wd = len(px), len(px[0])
    count = 0
    for br in range(0, h, w):
        for bc in range(0, wd, w):
            found = False
            for r in range(br, min(br + w, h)):
                for c in range(bc, min(bc + w, wd)):
                    if px[r][c]:
                        found = True
                        break
                if found:
                    break
            count += found
    return count


def expected_mhfd_counts(px, top):
    """Sum of keep probabilities per scale, n0 over in-image pixels only."""
    h, wd = len(px), len(px[0])
    out = []
    for s in range(top + 1):
        w = 2**s
        total = 0.0
        for br in range(0, max(h, wd, w), w):
            for bc in range(0, max(h, wd, w), w):
                n1 = n0 = 0
                for r in range(br, min(br + w, h)):
                    for c in range(bc, min(bc + w, wd)):
                        if px[r][c]:
                            n1 += 1
                        else:
                            n0 += 1
                if n1 and n0:
                    total += n1 / (n1 + 1)
        out.append(total)
    return out


def otsu_bruteforce(values):
    """Lowest t in 0..255 maximizing between-class variance of {<t} vs {>=t}."""
    values = [int(v) for v in np.ravel(values)]
    n = len(values)
    best_t, best = None, -1.0
    for t in range(256):
        lo = [v for v in values if v < t]
        hi = [v for v in values if v >= t]
        if not lo or not hi:
            var = 0.0
        else:
            m0, m1 = sum(lo) / len(lo), sum(hi) / len(hi)
            var = (len(lo) / n) * (len(hi) / n) * (m0 - m1) ** 2
        if var > best + 1e-12 * max(1.0, best):
            best_t, best = t, var
    return best_t, best


def zhang_suen_reference(px):
    """Straightforward per-pixel Zhang-Suen thinning."""
    img = [list(map(int, row)) for row in px]
    h, w = len(img), len(img[0])

    def get(r, c):
        return img[r][c] if 0 <= r < h and 0 <= c < w else 0

    changed = True
    while changed:
        changed = False
        for step in (0, 1):
            marked = []
            for r in range(h):
                for c in range(w):
                    if not img[r][c]:
                        continue
                    p = [get(r - 1, c), get(r - 1, c + 1), get(r, c + 1), get(r + 1, c + 1),
                         get(r + 1, c), get(r + 1, c - 1), get(r, c - 1), get(r - 1, c - 1)]
                    b = sum(p)
                    a = sum(1 for k in range(8) if p[k] == 0 and p[(k + 1) % 8] == 1)
                    p2, p4, p6, p8 = p[0], p[2], p[4], p[6]
                    if step == 0:
                        ok = p2 * p4 * p6 == 0 and p4 * p6 * p8 == 0
                    else:
                        ok = p2 * p4 * p8 == 0 and p2 * p6 * p8 == 0
                    if 2 <= b <= 6 and a == 1 and ok:
                        marked.append((r, c))
            for r, c in marked:
                img[r][c] = 0
            changed = changed or bool(marked)
    return np.array(img, dtype=np.uint8)


def ols_slope(x, y):
    """Plain unweighted least-squares slope via numpy.polyfit."""
    return float(np.polyfit(np.asarray(x, float), np.asarray(y, float), 1)[0])


LOG2 = math.log(2.0)
