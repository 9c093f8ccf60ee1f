"""Physical constants and unit conversions.

Internal unit system: energies in eV, times in fs, dipole moments in Debye,
electric fields in V/m.  Every conversion used anywhere in the package lives
here; no other module hardcodes a unit factor.
"""

# reduced Planck constant, eV*fs (CODATA 2018)
HBAR_EV_FS = 0.6582119569509067

# 1 Debye in e*nm
DEBYE_E_NM = 0.0208194

# dipole[D] * field[V/m] -> energy[eV]   (e*nm * V/m = 1e-9 eV)
DIPOLE_FIELD_TO_EV = DEBYE_E_NM * 1e-9

# vacuum permittivity, F/m
EPS0_F_PER_M = 8.8541878128e-12

# speed of light, m/s
C_M_PER_S = 2.99792458e8

FS_TO_S = 1e-15

# J/m^2 -> nJ/cm^2
J_PER_M2_TO_NJ_PER_CM2 = 1e5

EV = 1.0
MEV = 1e-3
UEV = 1e-6
