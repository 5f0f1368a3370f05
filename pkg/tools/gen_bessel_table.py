"""Regenerate the Dirichlet disk spectrum table in ``maxshape/bessel.py``.

Prints the first N ascending Dirichlet eigenvalues of the unit disk as
Bessel zeros j_{n,m}, counting multiplicity (n >= 1 modes appear twice:
cos and sin).  Paste the output into ``_DISK_ZEROS``.

    python tools/gen_bessel_table.py 20
"""
import sys

from scipy.special import jn_zeros


def main(count=20):
    zeros = []
    for n in range(count):
        for z in jn_zeros(n, count):
            zeros.extend([(float(z), n)] * (1 if n == 0 else 2))
    zeros.sort()
    for z, n in zeros[:count]:
        print(f"    {z!r},  # n={n}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 20)
