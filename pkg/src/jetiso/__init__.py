"""Exact-arithmetic toolkit for curvature jets and normal-coordinate
Taylor expansions of pseudo-Riemannian metrics.

Everything here computes over the rationals: no floating point, no
tolerances.  The package converts between three descriptions of a metric
near a point, each exact and finite:

* the Taylor polynomial of the metric in normal coordinates,
* the jet of the curvature tensor and its covariant derivatives,
* the symmetrized curvature jet (the part of the curvature that
  survives total symmetrization of the derivative slots).

The conversions are universal polynomial formulas with rational
coefficients, implemented in :mod:`jetiso.freealg` and specialized by
:mod:`jetiso.metriclab` and :mod:`jetiso.jets`.
"""

__version__ = "0.1.0"
