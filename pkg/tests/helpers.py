"""Shared fixtures: seeded inputs and independent cross-check routes."""

import numpy as np

import blaschkelab as bl


def random_series(rng, degree):
    coeffs = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
    return bl.ComplexSeries(coeffs)


def seeded_generator(seed, max_root=0.5, min_degree=2, max_degree=6):
    """A polynomial with all roots inside |z| <= max_root.

    Controlled root moduli keep truncated invariant-subspace experiments
    well inside their convergence regime.
    """
    rng = np.random.default_rng(seed)
    degree = int(rng.integers(min_degree, max_degree + 1))
    radii = max_root * np.sqrt(rng.uniform(0.0, 1.0, degree))
    angles = 2j * np.pi * rng.uniform(0.0, 1.0, degree)
    roots = radii * np.exp(angles)
    return bl.ComplexSeries(np.poly(roots)[::-1].astype(complex))


def evaluate(f, z):
    return complex(np.polyval(f.coeffs[::-1], z))


def cauchy_kernel(a, degree):
    """Taylor coefficients of 1/(1 - conj(a) z) up to degree."""
    return np.conj(a) ** np.arange(degree + 1)


def ls_layer_oracle(f, b, depth, degree):
    """Layer coefficients by one global least-squares solve.

    Completely independent route from the project-and-divide iteration:
    for B with distinct zeros the complementary space is spanned by the
    Cauchy kernels at the zeros, so f is fitted against the column family
    kernel_j * B^k and the layers are read off the solution. ``degree``
    must be large enough that no column loses significant tail mass.
    """
    bt = b.taylor(degree).coeffs
    kernels = [cauchy_kernel(a, degree) for a in b.zeros]
    cols = []
    bk = np.zeros(degree + 1, dtype=complex)
    bk[0] = 1.0
    for _ in range(depth):
        for ker in kernels:
            cols.append(np.convolve(bk, ker)[: degree + 1])
        bk = np.convolve(bk, bt)[: degree + 1]
    a_mat = np.array(cols).T
    rhs = np.zeros(degree + 1, dtype=complex)
    rhs[: f.coeffs.size] = f.coeffs
    x, *_ = np.linalg.lstsq(a_mat, rhs, rcond=None)
    d = len(kernels)
    layers = []
    for k in range(depth):
        acc = np.zeros(degree + 1, dtype=complex)
        for j, ker in enumerate(kernels):
            acc += x[k * d + j] * ker
        layers.append(acc)
    return layers


def oracle_layer_gap(f, b, residual_tol=1e-10):
    """Worst relative gap between decompose layers and the oracle."""
    co = bl.decompose(f, b, residual_tol=residual_tol)
    depth = len(co.layers)
    rho = max(abs(z) for z in b.zeros)
    spread = (1.0 + rho) / (1.0 - rho)
    n_o = f.coeffs.size - 1 + int(np.ceil(depth * b.degree * spread)) + 32
    oracle = ls_layer_oracle(f, b, depth, n_o)
    ref = max(np.linalg.norm(layer.coeffs) for layer in co.layers)
    gap = 0.0
    for k in range(depth):
        mine = np.zeros(n_o + 1, dtype=complex)
        c = co.layers[k].coeffs[: n_o + 1]
        mine[: c.size] = c
        gap = max(gap, np.linalg.norm(mine - oracle[k]) / ref)
    return gap


def distinct_zeros(rng, count, lo=0.05, hi=0.6, min_sep=0.15):
    while True:
        radii = lo + (hi - lo) * rng.uniform(size=count)
        zeros = [complex(z) for z in radii * np.exp(2j * np.pi * rng.uniform(size=count))]
        ok = all(
            abs(zeros[i] - zeros[j]) > min_sep
            for i in range(count)
            for j in range(i + 1, count)
        )
        if ok:
            return zeros
