"""Resource caps.

Every potentially unbounded computation checks one of these before
allocating.  The CLI can tighten or relax them via --cap-n; tests use the
defaults.
"""

from dataclasses import dataclass


@dataclass
class Caps:
    sieve_limit: int = 10**8          # largest prime-sieve table
    value_sieve_limit: int = 10**8    # largest completely-multiplicative value table
    dirichlet_modulus: int = 10**4
    root_scan_limit: int = 10**6      # exhaustive residue scans mod r
    box_count_n: int = 10**4          # lattice box half-width for norm counting
    enumerate_bound: int = 10**4      # solution enumeration in x, y
    folner_k: int = 7                 # full Folner enumeration
    grid_n: int = 10**4               # grid averages [N]^2
    divisor_grid_n: int = 5000
    lift_work: int = 10**6            # root-lifting work per prime power


CAPS = Caps()
