"""Numerical and combinatorial laboratory for rank-2 Higgs-bundle asymptotics.

The package has three legs:

* exact combinatorics of the stratification of singular Hitchin fibers and
  of the space of quadratic differentials (``strata``, ``hecke``),
* radial model solutions of the rescaled Hitchin equations and the glued
  approximate metrics built from them, with decay-rate measurements along
  rays (``painleve``, ``rays``, ``glue``),
* period integrals of square roots of quadratic differentials, the induced
  base metric, and the flat-fibration norms on hyperelliptic models
  (``periods``).

Everything is exposed through the ``hitchlab`` command line tool; see
``hitchlab --help``.
"""

from hitchlab.errors import LabError

__version__ = "0.1.0"

__all__ = ["LabError", "__version__"]
