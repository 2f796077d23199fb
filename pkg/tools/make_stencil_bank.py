"""Regenerate the packaged contour-stencil bank data file.

24 templates over a 5x5 footprint: three orientation classes
(1 horizontal-dominant, 2 vertical-dominant, 3 diagonal-dominant), eight
templates each, built from 8 base line orientations plus translated/mirrored
band variants. Each pair's weight is 1 / (n_pairs * pair_length) so that a
template's response approximates the mean absolute directional derivative and
responses stay comparable across templates with different pair baselines.

Usage: python tools/make_stencil_bank.py > src/tvsr/data/stencil_bank_v1.txt
"""

import math


def horizontal_strip(rows):
    return [(r, c, r, c + 1) for r in rows for c in (-2, -1, 0, 1)]


def transpose(pairs):
    return [(ca, ra, cb, rb) for ra, ca, rb, cb in pairs]


def weighted(pairs_groups):
    """pairs_groups: list of (pairs, share); weight = share/(len*length)."""
    out = []
    for pairs, share in pairs_groups:
        for ra, ca, rb, cb in pairs:
            length = math.hypot(rb - ra, cb - ca)
            out.append((ra, ca, rb, cb, share / (len(pairs) * length)))
    return out


def class1():
    """Horizontal-dominant: level lines near 0 deg plus the shallow family."""
    templates = {}
    templates[1] = weighted([(horizontal_strip((-1, 0, 1)), 1.0)])
    templates[2] = weighted([(horizontal_strip((-2, -1, 0)), 1.0)])
    templates[3] = weighted([(horizontal_strip((0, 1, 2)), 1.0)])
    templates[4] = weighted([(horizontal_strip((-2, -1, 0, 1, 2)), 1.0)])
    # shallow rising line, direction (-1, +2)
    templates[5] = weighted(
        [([(r, c, r - 1, c + 2) for r in (-1, 0, 1, 2) for c in (-2, -1, 0)], 1.0)]
    )
    # shallow falling line, direction (+1, +2)
    templates[6] = weighted(
        [([(r, c, r + 1, c + 2) for r in (-2, -1, 0, 1) for c in (-2, -1, 0)], 1.0)]
    )
    # mixed horizontal + rising diagonal (between 0 and 45 deg)
    templates[7] = weighted(
        [
            (horizontal_strip((-1, 0, 1)), 0.5),
            ([(r, c, r - 1, c + 1) for r in (0, 1) for c in (-2, -1, 0, 1)], 0.5),
        ]
    )
    # mixed horizontal + falling diagonal
    templates[8] = weighted(
        [
            (horizontal_strip((-1, 0, 1)), 0.5),
            ([(r, c, r + 1, c + 1) for r in (-1, 0) for c in (-2, -1, 0, 1)], 0.5),
        ]
    )
    return templates


def class3():
    """Diagonal-dominant: both diagonals, full/band/long/half variants."""
    falling = [(r, c, r + 1, c + 1) for r in (-2, -1, 0, 1) for c in (-2, -1, 0, 1)]
    rising = [(r, c, r - 1, c + 1) for r in (-1, 0, 1, 2) for c in (-2, -1, 0, 1)]
    templates = {
        1: weighted([(falling, 1.0)]),
        2: weighted([(rising, 1.0)]),
        3: weighted([([p for p in falling if abs(p[0] - p[1]) <= 1], 1.0)]),
        4: weighted([([p for p in rising if abs(p[0] + p[1]) <= 1], 1.0)]),
        5: weighted([([(r, c, r + 2, c + 2) for r in (-2, -1, 0) for c in (-2, -1, 0)], 1.0)]),
        6: weighted([([(r, c, r - 2, c + 2) for r in (0, 1, 2) for c in (-2, -1, 0)], 1.0)]),
        7: weighted([([p for p in falling if p[1] >= p[0]], 1.0)]),
        8: weighted([([p for p in rising if p[0] + p[1] >= 0], 1.0)]),
    }
    return templates


def main():
    bank = {}
    c1 = class1()
    for k, pairs in c1.items():
        bank[(1, k)] = pairs
    for k, pairs in c1.items():
        bank[(2, k)] = [(ca, ra, cb, rb, w) for ra, ca, rb, cb, w in pairs]
    for k, pairs in class3().items():
        bank[(3, k)] = pairs

    print("# Contour-stencil template bank, v1.")
    print("# Classes: 1 horizontal-dominant, 2 vertical-dominant, 3 diagonal-dominant.")
    print("# Pair weights are 1/(n_pairs * pair_length); offsets are (row, col)")
    print("# displacements from the patch center, each in -2..2.")
    print("stencil-bank v1 footprint 5 5")
    for (d, k) in sorted(bank):
        pairs = bank[(d, k)]
        print(f"template {d} {k} {len(pairs)}")
        for ra, ca, rb, cb, w in pairs:
            print(f"{ra} {ca} {rb} {cb} {w!r}")


if __name__ == "__main__":
    main()
