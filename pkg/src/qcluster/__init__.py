"""Exact-arithmetic engine for quivers, cluster mutations and quantum torus algebras.

Everything is computed over exact rationals (`fractions.Fraction`); there is
no floating point anywhere in the core.
"""

__all__ = ["cartan", "quiver", "qtorus", "wordquiver", "mutation", "surface", "sequences", "qgroup", "double"]
