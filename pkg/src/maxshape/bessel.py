"""Dirichlet spectrum of the disk.

The k-th Dirichlet-Laplacian eigenvalue of a disk of radius r is
``disk_zero(k)**2 / r**2``.  Zeros are listed with multiplicity; the table
is produced by ``tools/gen_bessel_table.py``.
"""

J01 = 2.4048255576957724

_DISK_ZEROS = (
    2.4048255576957724,  # n=0
    3.8317059702075125,  # n=1
    3.8317059702075125,  # n=1
    5.135622301840683,  # n=2
    5.135622301840683,  # n=2
    5.520078110286311,  # n=0
    6.380161895923984,  # n=3
    6.380161895923984,  # n=3
    7.015586669815619,  # n=1
    7.015586669815619,  # n=1
    7.588342434503804,  # n=4
    7.588342434503804,  # n=4
    8.417244140399866,  # n=2
    8.417244140399866,  # n=2
    8.653727912911013,  # n=0
    8.771483815959954,  # n=5
    8.771483815959954,  # n=5
    9.76102312998167,  # n=3
    9.76102312998167,  # n=3
    9.936109524217686,  # n=6
)


def disk_zero(k):
    """Bessel zero j_{n,m} whose square gives the k-th disk eigenvalue (k >= 1)."""
    if not 1 <= k <= len(_DISK_ZEROS):
        raise ValueError(f"disk spectrum table covers 1..{len(_DISK_ZEROS)}, got {k}")
    return _DISK_ZEROS[k - 1]


def disk_eigenvalue(k, radius=1.0):
    return disk_zero(k) ** 2 / radius**2
