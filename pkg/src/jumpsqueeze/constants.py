"""Physical constants (SI) used throughout the package."""

import math

HBAR = 1.054571817e-34          # reduced Planck constant, J s (CODATA 2018)
ATOMIC_MASS = 1.66053906660e-27  # unified atomic mass unit, kg
RB85_MASS = 84.911789738 * ATOMIC_MASS  # kg

TWO_PI = 2.0 * math.pi
