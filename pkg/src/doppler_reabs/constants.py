"""Physical constants, CODATA 2018, SI units.

Kept in one table instead of importing scipy.constants so that every module
draws from the same pinned values and tests can assert them directly.
"""

HBAR = 1.054571817e-34        # reduced Planck constant [J s]
PLANCK = 6.62607015e-34       # Planck constant [J s] (exact)
K_B = 1.380649e-23            # Boltzmann constant [J/K] (exact)
MU_B = 9.2740100783e-24       # Bohr magneton [J/T]
ATOMIC_MASS = 1.66053906660e-27   # unified atomic mass unit [kg]

GAUSS = 1e-4                  # 1 G in T
GAUSS_PER_CM2 = 1.0           # 1 G/cm^2 in T/m^2 (1e-4 T / 1e-4 m^2)
