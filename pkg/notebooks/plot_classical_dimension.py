"""
Classical box-counting dimension
================================

Shapes with known dimension make the box-counting estimate easy to check:
a filled square, a line, a point and two Sierpinski fractals.
"""

from fracdim import compute_hfd, hfd_counts, primitives, sierpinski_carpet, sierpinski_triangle
from fracdim.generators import CARPET_DIMENSION, TRIANGLE_DIMENSION

# Trivial shapes, 256 x 256 each
for kind, expected in [("filled_rect", 2.0), ("hline", 1.0), ("point", 0.0)]:
    value = compute_hfd(primitives(kind, 256)).value
    print(f"{kind:12s} HFD = {value:.6f}   expected {expected}")

# The triangle built from i & j == 0 obeys N_s = 3**(k - s) exactly,
# so the log-log fit recovers log 3 / log 2 to machine precision.
tri = sierpinski_triangle(9)
print("\ntriangle order 9 box counts:", hfd_counts(tri).as_pairs())
print(f"triangle HFD = {compute_hfd(tri).value:.6f}   analytic {TRIANGLE_DIMENSION:.6f}")

# The carpet lives on a base-3 grid, which power-of-two boxes only
# approximate; the estimate lands a little below log 8 / log 3.
carpet = sierpinski_carpet(5)
print(f"carpet HFD   = {compute_hfd(carpet).value:.6f}   analytic {CARPET_DIMENSION:.6f}")
