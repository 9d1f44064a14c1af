"""Physical constants and unit conversions.

The integrator exchanges quantities in mixed practical units (Angstrom,
femtosecond, Hartree, electron mass); every conversion between those and
Hartree atomic units lives here so there is exactly one place to audit.
"""

import math

# CODATA-style conversion factors
ANGSTROM_TO_BOHR = 1.8897259886
FS_TO_AU_TIME = 41.341374575751
KB_HARTREE_PER_K = 3.166811563e-6

# Nuclear masses in electron masses. The bond coordinate of H2 carries the
# reduced mass of the pair.
HYDROGEN_MASS_ME = 1837.47
H2_REDUCED_MASS_ME = HYDROGEN_MASS_ME / 2.0

# Acceleration bridge: a [Angstrom/fs^2] = F [Hartree/Angstrom] * ACCEL / m [m_e].
# Derivation in atomic units: F_au = F / ANGSTROM_TO_BOHR, a_au = F_au / m,
# then bohr/au_t^2 -> Angstrom/fs^2 multiplies by FS_TO_AU_TIME^2 / ANGSTROM_TO_BOHR.
ACCEL_FACTOR = FS_TO_AU_TIME**2 / ANGSTROM_TO_BOHR**2


def inverse_temperature(temperature_k: float) -> float:
    """Return beta = 1/(k_B T) in 1/Hartree for a temperature in Kelvin."""
    if temperature_k <= 0.0:
        raise ValueError(f"temperature must be positive, got {temperature_k}")
    return 1.0 / (KB_HARTREE_PER_K * temperature_k)


def kinetic_energy_hartree(mass_me: float, velocity_ang_fs: float) -> float:
    """Kinetic energy (Hartree) of a coordinate with mass in m_e and v in Angstrom/fs."""
    v_au = velocity_ang_fs * ANGSTROM_TO_BOHR / FS_TO_AU_TIME
    return 0.5 * mass_me * v_au * v_au


assert math.isclose(ACCEL_FACTOR, 478.5664, rel_tol=1e-4)
