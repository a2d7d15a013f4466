"""circuit_hardness.lab."""
import logging
from importlib import metadata

# Custom logger
LOG = logging.getLogger(name=__name__)

# PEP 396 style version marker
try:
    __version__ = metadata.version('circuit.hardness.lab')
except metadata.PackageNotFoundError:
    LOG.warning('Could not get the package version from the installed metadata')
    __version__ = 'unknown'

__author__ = 'AlterWay R&D team'
__author_email__ = 'rnd@alterway.fr'
__license__ = 'Apache-2.0'
