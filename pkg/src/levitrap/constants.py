"""CODATA physical constants in SI units."""

from dataclasses import dataclass
import math

from scipy import constants as _sc


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = _sc.hbar
    k_B: float = _sc.k
    c: float = _sc.c
    eps0: float = _sc.epsilon_0
    mu0: float = _sc.mu_0
    sigma_sb: float = _sc.Stefan_Boltzmann
    q: float = _sc.e

    @property
    def eta0(self) -> float:
        """Impedance of free space."""
        return math.sqrt(self.mu0 / self.eps0)


CONST = PhysicalConstants()

HBAR = CONST.hbar
KB = CONST.k_B
C = CONST.c
EPS0 = CONST.eps0
ETA0 = CONST.eta0
SIGMA_SB = CONST.sigma_sb
Q_E = CONST.q
