"""qpairs: computational toolkit for quadratic pair equations a*x^2 + b*y^2 = c*z^2.

Subpackages by concern:

- arith        exact integer substrate (sieves, factorization, symbols, Pell)
- multfunc     multiplicative functions, Dirichlet characters, prime-sum distances
- quadforms    binary quadratic forms, local root counts, congruence pairs
- quadrings    quadratic rings Z[tau_d], norm/ideal counting, unit regularity
- regularity   solution families, pair-regularity verdicts, coloring obstructions
- averaging    trapezoid weights, Folner boxes, divisor statistics
- experiments  concentration sums, correlation averages, level-set searches
- cli          batch experiment runner
"""

__version__ = "0.1.0"
