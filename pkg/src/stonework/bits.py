"""Subsets of a finite carrier as int bitmasks.

All enumeration is in increasing numeric order, which makes every
operation in the library deterministic.
"""


def bits(mask):
    """Indices of the set bits, ascending."""
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def mask_of(indices):
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def popcount(mask):
    return bin(mask).count("1")


def submasks(mask):
    """All subsets of `mask`, ascending as integers."""
    out = []
    sub = 0
    while True:
        out.append(sub)
        if sub == mask:
            return out
        sub = (sub - mask) & mask
