"""The infinite q-boson system on the integer lattice.

Submodules: :mod:`qnum` (q-numbers, exact or float), :mod:`fock` (states and
the field-algebra representation), :mod:`hamiltonians` (the commuting
hierarchy), :mod:`hall_littlewood` (eigenfunctions), :mod:`spectral`
(quadrature and Fourier transforms), :mod:`scattering` (wave packets and the
comparison with the phase model), :mod:`verify` (randomized check suites).
"""

from .fock import StateFn
from .qnum import QContext

__all__ = ["QContext", "StateFn"]
__version__ = "0.1.0"
