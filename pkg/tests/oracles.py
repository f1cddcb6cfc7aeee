"""High-precision reference values computed independently of the package."""
import itertools

import mpmath as mp
import numpy as np

mp.mp.dps = 40


def betac(omega, omega0, g1, g2):
    s2 = (mp.mpf(g1) + mp.mpf(g2)) ** 2
    return 4 / mp.mpf(omega) * mp.atanh(mp.mpf(omega) * omega0 / s2)


def lorentzian_sum(omega, beta):
    """Direct infinite sum over fermionic frequencies."""
    a2 = (mp.mpf(omega) / 2) ** 2
    beta = mp.mpf(beta)
    return 2 * mp.nsum(lambda n: 1 / (((2 * n + 1) * mp.pi / beta) ** 2 + a2), [0, mp.inf])


def sigma_z_lnz(omega, omega0, g, n_atoms, beta):
    """ln Z of the finite-N sigma-z model from its displaced-oscillator blocks."""
    beta, omega, omega0, g = map(mp.mpf, (beta, omega, omega0, g))
    N = n_atoms
    spin = mp.fsum(
        mp.binomial(N, j) * mp.exp(-beta * (omega / 2 * (2 * j - N) - g**2 * (2 * j - N) ** 2 / (N**2 * omega0)))
        for j in range(N + 1)
    )
    return -mp.log(1 - mp.exp(-beta * omega0)) + mp.log(spin)


def sigma_z_closed_lnz(omega, omega0, g, n_atoms, beta):
    """ln Z0 + g^2 beta / omega0 tanh^2(beta Omega / 4) in high precision."""
    beta, omega, omega0, g = map(mp.mpf, (beta, omega, omega0, g))
    free = -mp.log(1 - mp.exp(-beta * omega0)) + n_atoms * mp.log(2 * mp.cosh(beta * omega / 2))
    return free + g**2 * beta / omega0 * mp.tanh(omega * beta / 4) ** 2


def sigma_z_entropy(omega, omega0, g, n_atoms, beta):
    """S = ln Z - beta d ln Z / d beta by high-precision numerical differentiation."""
    f = lambda b: sigma_z_closed_lnz(omega, omega0, g, n_atoms, b)
    b = mp.mpf(beta)
    return f(b) - b * mp.diff(f, b)


def sigma_z_energy(omega, omega0, g, n_atoms, beta):
    f = lambda b: sigma_z_closed_lnz(omega, omega0, g, n_atoms, b)
    return -mp.diff(f, mp.mpf(beta))


def excitation_determinant(E, omega, omega0, g1, g2, t):
    """(1 - a(w))(1 - a(-w)) - (2c)^2 continued to iw -> E, from the coefficient definitions."""
    E, W, w0, g1, g2, t = map(mp.mpf, (E, omega, omega0, g1, g2, t))
    ap = (g1**2 / (W - E) + g2**2 / (W + E)) / (w0 - E) * t
    am = (g1**2 / (W + E) + g2**2 / (W - E)) / (w0 + E) * t
    c2 = (g1 * g2 * W * t) ** 2 / ((w0**2 - E**2) * (W**2 - E**2) ** 2)
    return (1 - ap) * (1 - am) - 4 * c2


def jc_levels(omega, omega0, g, n_max):
    """Spectrum of the single-atom rotating model in the basis truncated at n_max, block by block."""
    levels = [-omega / 2]
    for n in range(n_max):
        block = np.array([[omega0 * n + omega / 2, g * np.sqrt(n + 1)],
                          [g * np.sqrt(n + 1), omega0 * (n + 1) - omega / 2]])
        levels.extend(np.linalg.eigvalsh(block))
    levels.append(omega0 * n_max + omega / 2)
    return np.sort(levels)


def jc_closed(omega, omega0, g, n):
    delta = omega - omega0
    root = np.sqrt(delta**2 / 4 + g**2 * (n + 1))
    return omega0 * (n + 0.5) - root, omega0 * (n + 0.5) + root


def product_basis_hamiltonian(family, omega, omega0, g1, g2, g, n_atoms, n_max):
    """Dense Hamiltonian from explicit tensor products of single-atom Pauli matrices."""
    sp_ = np.array([[0.0, 0.0], [1.0, 0.0]])      # |up><down| with index 1 = up
    sz = np.diag([-0.5, 0.5])
    eye2 = np.eye(2)

    def site(op, i):
        mats = [op if k == i else eye2 for k in range(n_atoms)]
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(m, out)
        return out

    jp = sum(site(sp_, i) for i in range(n_atoms))
    jz = sum(site(sz, i) for i in range(n_atoms))
    jm = jp.T
    nb = n_max + 1
    b = np.diag(np.sqrt(np.arange(1, nb)), 1)
    num = np.diag(np.arange(nb, dtype=float))
    es = np.eye(2**n_atoms)
    eb = np.eye(nb)
    h = omega0 * np.kron(num, es) + omega * np.kron(eb, jz)
    if family == "sigma_z":
        h += g / n_atoms * np.kron(b + b.T, 2 * jz)
    else:
        h += (g1 * (np.kron(b, jp) + np.kron(b.T, jm)) + g2 * (np.kron(b.T, jp) + np.kron(b, jm))) / np.sqrt(n_atoms)
    return h
