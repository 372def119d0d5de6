"""Semiclassical tunneling wave toolkit.

Thin Python veneer over the C++ core: barrier models, action integrals, the
stationary scattering solver, transmitted-packet approximants, the split-step
TDSE pipeline, and gauge-fitted L2 comparison utilities.
"""

from ._tunnelwave import *  # noqa: F401,F403
from ._tunnelwave import version

__version__ = version()
