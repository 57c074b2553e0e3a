"""Smoke test for the quatspec extension module.

Build and install first:
    pip install --no-build-isolation -e crates/python
"""

import math

import quatspec


def close(a, b, tol=1e-10):
    return all(abs(x - y) <= tol for x, y in zip(a, b))


def main():
    i, j, k = (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)
    assert quatspec.qmul(i, j) == k
    assert quatspec.qmul(j, i) == (0, 0, 0, -1)

    # M = [[j]]: right eigenvalue i, with j psi = psi i
    [(z, psi, res)] = quatspec.right_eig("H", [[[j]]])
    assert abs(z - 1j) < 1e-12 and res < 1e-10
    assert close(quatspec.qmul(j, psi[0]), quatspec.qmul(psi[0], (0, 1, 0, 0)))

    # embedding of R_i
    zero, one = [[(0, 0, 0, 0)]], [[(1, 0, 0, 0)]]
    rows = quatspec.embed("R", [zero, one, zero, zero])
    assert rows == [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]]

    # R_i as a C-linear operator rotates on the right
    x = 0.8
    c_parts = quatspec.expm("C", [zero, one], x)
    assert close(c_parts[0][0][0], (math.cos(x), 0, 0, 0))
    assert close(c_parts[1][0][0], (math.sin(x), 0, 0, 0))

    # coupled pairs satisfy both equations for a random-looking R operator
    parts = [[[(0.3, -1.0, 0.2, 0.5)]], [[(0.1, 0.0, 0.7, -0.4)]], [[(0.0, 0.9, -0.3, 0.2)]], [[(0.6, 0.1, 0.0, -0.8)]]]
    for p in quatspec.coupled_eig("R", parts):
        assert p["residual"] < 1e-9, p

    # psi'' = -psi from psi(0) = 1, psi'(0) = 0
    xs = [2 * math.pi * t / 20 for t in range(21)]
    traj = quatspec.solve_ivp("H", [[[[(0, 0, 0, 0)]]], [[[(-1, 0, 0, 0)]]]], [[(1, 0, 0, 0)], [(0, 0, 0, 0)]], xs)
    for x, psi in zip(xs, traj):
        assert close(psi[0], (math.cos(x), 0, 0, 0), 1e-9)

    # q^2 = (i + j) q + 1
    alpha, beta = (0, 1, 1, 0), (1, 0, 0, 0)
    roots, spherical = quatspec.quadratic_roots(alpha, beta)
    for q in roots:
        lhs = quatspec.qmul(q, q)
        aq = quatspec.qmul(alpha, q)
        assert close(lhs, tuple(a + b for a, b in zip(aq, beta)), 1e-9)

    # free particle with E = 1 in units m = 1/2, hbar = 1
    basis = quatspec.stationary_basis(E=1.0)
    got = sorted(basis["exponents"], key=lambda z: (round(z.real, 6), round(z.imag, 6)))
    want = sorted([1j, -1j, 1, -1], key=lambda z: (z.real, z.imag))
    assert all(abs(a - b) < 1e-10 for a, b in zip(got, want)), got
    assert max(basis["residuals"]) < 1e-10

    groups = quatspec.jordan_structure("H", [[[(1, 0, 0, 0), (1, 0, 0, 0)], [(0, 0, 0, 0), (1, 0, 0, 0)]]])
    assert groups == [(1 + 0j, [2])] or (abs(groups[0][0] - 1) < 1e-8 and groups[0][1] == [2])

    try:
        quatspec.right_eig("Q", [[[i]]])
    except ValueError:
        pass
    else:
        raise AssertionError("bad kind accepted")

    print("quatspec smoke test: ok")


if __name__ == "__main__":
    main()
