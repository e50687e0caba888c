"""Scalar reference implementation of the sRGB to CIE L*a*b* conversion.

Pure math.h arithmetic over the published constants (IEC 61966-2-1 sRGB
primaries, D65 reference white), written before the library and kept
independent of it. Tests treat this as ground truth for the vectorized
conversion and for the bank's Lab CSV export.
"""

import math

# linear sRGB -> XYZ, D65, 2 degree observer
RGB_TO_XYZ = (
    (0.4124564, 0.3575761, 0.1804375),
    (0.2126729, 0.7151522, 0.0721750),
    (0.0193339, 0.1191920, 0.9503041),
)

D65_WHITE = (0.95047, 1.0, 1.08883)


def srgb_to_linear_scalar(u):
    if u <= 0.04045:
        return u / 12.92
    return ((u + 0.055) / 1.055) ** 2.4


def linear_to_srgb_scalar(u):
    if u <= 0.0031308:
        return 12.92 * u
    return 1.055 * u ** (1.0 / 2.4) - 0.055


def _f(t):
    d = 6.0 / 29.0
    if t > d ** 3:
        return t ** (1.0 / 3.0)
    return t / (3.0 * d * d) + 4.0 / 29.0


def srgb_to_lab_scalar(r, g, b):
    """One encoded-sRGB triple in [0, 1] to (L*, a*, b*)."""
    rl = srgb_to_linear_scalar(r)
    gl = srgb_to_linear_scalar(g)
    bl = srgb_to_linear_scalar(b)
    xyz = []
    for row, white in zip(RGB_TO_XYZ, D65_WHITE):
        xyz.append((row[0] * rl + row[1] * gl + row[2] * bl) / white)
    fx, fy, fz = _f(xyz[0]), _f(xyz[1]), _f(xyz[2])
    return (116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))
