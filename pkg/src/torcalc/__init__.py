"""Exact local calculus of toroidal and prepared forms.

Modules: :mod:`lattice` (integer lattices and quotients), :mod:`series`
(truncated rational power series), :mod:`forms` (local models and
classifiers), :mod:`tau` (the lattice invariant), :mod:`blowup` (chart
transformations) and :mod:`harness` (generation, scans and the CLI).
"""

__version__ = "0.1.0"
