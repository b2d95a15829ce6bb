# Exact linear algebra over the rationals.
#
# Rows are scaled to integers and reduced with fraction-free (Bareiss) elimination, so
# intermediate entries stay integers and no rational normalization happens until back
# substitution.

from fractions import Fraction
from math import lcm


def _integer_row(row):
    scale = 1
    for x in row:
        scale = lcm(scale, Fraction(x).denominator)
    return [int(Fraction(x) * scale) for x in row]


def row_echelon(matrix):
    """Returns a fraction-free row echelon form of ``matrix``.

    :param matrix: A list of rows of ints or Fractions.
    :type matrix: list
    :return: ``(rows, pivots, swaps)`` where ``rows`` is the integer echelon form,
        ``pivots`` the pivot columns and ``swaps`` the number of row exchanges.
    :rtype: tuple
    """
    rows = [_integer_row(r) for r in matrix]
    if not rows:
        return rows, [], 0
    nrows, ncols = len(rows), len(rows[0])
    pivots = []
    swaps = 0
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv_row = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if piv_row is None:
            continue
        if piv_row != r:
            rows[r], rows[piv_row] = rows[piv_row], rows[r]
            swaps += 1
        piv = rows[r][c]
        pivot_row = rows[r]
        for i in range(r + 1, nrows):
            row = rows[i]
            factor = row[c]
            for j in range(c + 1, ncols):
                # Exact division: every entry is a minor of the scaled matrix
                row[j] = (piv * row[j] - factor * pivot_row[j]) // prev
            row[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return rows, pivots, swaps


def rank(matrix):
    """Returns the exact rank of a rational matrix."""
    return len(row_echelon(matrix)[1])


def determinant(matrix):
    """Returns the exact determinant of a square rational matrix."""
    n = len(matrix)
    if any(len(r) != n for r in matrix):
        raise ValueError(f"Determinant needs a square matrix. Got {n} rows of lengths {[len(r) for r in matrix]}.")
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    for r in matrix:
        d = 1
        for x in r:
            d = lcm(d, Fraction(x).denominator)
        scale *= d
    rows, pivots, swaps = row_echelon(matrix)
    if len(pivots) < n:
        return Fraction(0)
    # In Bareiss elimination the last pivot is the determinant of the scaled matrix
    det = Fraction(rows[n - 1][n - 1]) / scale
    return -det if swaps % 2 else det


def solve_affine(matrix, rhs):
    """Solves ``matrix @ x = rhs`` exactly.

    Free variables of a rank-deficient system are set to zero.

    :param matrix: The coefficient rows (ints or Fractions).
    :type matrix: list
    :param rhs: The right-hand side.
    :type rhs: list
    :return: ``(consistent, rank, x)``; ``x`` is a particular solution as Fractions, or
        ``None`` when the system is inconsistent.
    :rtype: tuple
    """
    if len(matrix) != len(rhs):
        raise ValueError(f"Right-hand side has {len(rhs)} entries for {len(matrix)} rows.")
    ncols = len(matrix[0]) if matrix else 0
    augmented = [list(r) + [b] for r, b in zip(matrix, rhs)]
    rows, pivots, _ = row_echelon(augmented)
    if pivots and pivots[-1] == ncols:
        # A row 0 = b with b != 0
        return False, len(pivots) - 1, None

    x = [Fraction(0)] * ncols
    for k in range(len(pivots) - 1, -1, -1):
        c = pivots[k]
        row = rows[k]
        acc = Fraction(row[ncols])
        for j in range(c + 1, ncols):
            if row[j]:
                acc -= row[j] * x[j]
        x[c] = acc / row[c]
    return True, len(pivots), x
