"""Test-only reference computations, kept independent of the package code paths."""

from fractions import Fraction


def gauss_solve(a, b):
    """Solve a x = b by Gauss elimination with partial pivoting (lists of numbers)."""
    n = len(a)
    m = [list(map(type(b[0]), row)) + [b[i]] for i, row in enumerate(a)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(m[r][col]))
        m[col], m[piv] = m[piv], m[col]
        if m[col][col] == 0:
            raise ZeroDivisionError("singular system")
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            for c in range(col, n + 1):
                m[r][c] -= f * m[col][c]
    x = [0] * n
    for r in range(n - 1, -1, -1):
        acc = m[r][n] - sum(m[r][c] * x[c] for c in range(r + 1, n))
        x[r] = acc / m[r][r]
    return x


def gauss_inverse(a):
    n = len(a)
    cols = []
    for j in range(n):
        e = [type(a[0][0])(0)] * n
        e[j] = type(a[0][0])(1)
        cols.append(gauss_solve(a, e))
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def transpose(a):
    return [list(r) for r in zip(*a)]


def matmul(a, b):
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def normal_equation_fit(x, y):
    """b = (X'X)^-1 X'y with the normal equations formed explicitly."""
    xt = transpose(x)
    a = matmul(xt, x)
    rhs = [sum(xi * yi for xi, yi in zip(col, y)) for col in xt]
    return gauss_solve(a, rhs)


def hat_matrix(x):
    xt = transpose(x)
    return matmul(matmul(x, gauss_inverse(matmul(xt, x))), xt)


def exact(values):
    return [Fraction(v) for v in values]


def exact_matrix(rows):
    return [[Fraction(v) for v in row] for row in rows]


def centered_sum_squares(v):
    mean = sum(v) / len(v)
    return sum((vi - mean) ** 2 for vi in v)


def batch_posterior(x0, p0, h, r_var, observations):
    """Static-state posterior mean: minimise the prior term plus all observation terms.

    Solved from the information-form normal equations with Gauss elimination.
    """
    p0_inv = gauss_inverse([list(map(float, row)) for row in p0])
    info = [row[:] for row in p0_inv]
    rhs = [sum(p0_inv[i][j] * x0[j] for j in range(2)) for i in range(2)]
    for y in observations:
        for i in range(2):
            for j in range(2):
                info[i][j] += sum(h[k][i] * h[k][j] for k in range(len(h))) / r_var
            rhs[i] += sum(h[k][i] * y[k] for k in range(len(h))) / r_var
    return gauss_solve(info, rhs)
