"""Local models for twisted S-sheaves.

Submodules:

* :mod:`~twistsheaf.exact` rational matrices and subspaces
* :mod:`~twistsheaf.weights` monodromy weight filtrations
* :mod:`~twistsheaf.prolongation` Deligne lattices from local monodromy
* :mod:`~twistsheaf.ssheaf` floor-formula generators of the twisted S-sheaf
* :mod:`~twistsheaf.l2` symbolic and numeric square-integrability
* :mod:`~twistsheaf.cks` closed-form nilpotent-orbit metrics
* :mod:`~twistsheaf.resolution` surface blowups and multiplier ideals
* :mod:`~twistsheaf.cli` and :mod:`~twistsheaf.corpus` batch front end and golden cases
"""

from .errors import TwistSheafError
from .exact import RatMatrix, Subspace, rat

__version__ = "0.1.0"

__all__ = ["RatMatrix", "Subspace", "TwistSheafError", "rat", "__version__"]
