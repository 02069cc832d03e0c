"""stonework: Stone-type dualities for finite preordered structures.

Frames of J-ideals on finite sites, duality functors with compactness
inverses, filter spectra with the subterminal topology, free and
presented lattices, the Zariski spectrum both ways, and lattice-level
logical invariants, each verified by exhaustive or oracle-based checks
at small scale.
"""

__version__ = "0.1.0"
