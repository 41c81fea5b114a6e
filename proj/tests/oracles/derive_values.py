"""Independent reference values frozen into the C++ unit tests.

Run with: python3 tests/oracles/derive_values.py
Everything here is computed from first principles with numpy/mpmath and does
not import the library.
"""
import itertools

import mpmath as mp
import numpy as np

mp.mp.dps = 40


def strip_delta(N, C, k, eps, eta):
    gap = mp.mpf(eps) - mp.mpf(k - 1) / (C - 1)
    return 2 * mp.e ** (-gap**2 * mp.mpf(N) ** eta / (8 * k))


def sharpened(N, C, eta, eps, rho):
    rho = mp.mpf(rho)
    inner = (mp.mpf(eps) - mp.mpf(1) / (C - 1)) / rho
    if rho > mp.sqrt(2):
        inner -= (rho**2 - 2) / (rho * (C - 1))
    return 2 * mp.e ** (-mp.mpf(N) ** eta * inner**2 / 8)


def chirp(p):
    w = np.exp(2j * np.pi / p)
    x = np.arange(p)
    cols = []
    for m in range(p):
        for r in range(p):
            cols.append(w ** ((r + m * x + r * x * x) % p))
    return np.array(cols).T  # p x p^2


def gf_mul(a, b, m, poly):
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> m & 1:
            a ^= poly
    return r


def gf_trace(a, m, poly):
    t, s = 0, a
    for _ in range(m):
        t ^= s
        s = gf_mul(s, s, m, poly)
    return t & 1


def kerdock_matrices(m, poly):
    # Binary symmetric matrices of the forms x -> tr(t x^2), over all t.
    mats = set()
    for t in range(1 << m):
        rows = []
        for i in range(m):
            row = 0
            for k in range(m):
                if gf_trace(gf_mul(t, gf_mul(1 << i, 1 << k, m, poly), m, poly), m, poly):
                    row |= 1 << k
            rows.append(row)
        mats.add(tuple(rows))
    return sorted(mats)


def bch_sum_squares(m, poly):
    # |N - 2 wt(c)|^2 over the distinct codewords x -> tr(a1 x + a3 x^3).
    N = 1 << m
    words = set()
    cubes = [gf_mul(x, gf_mul(x, x, m, poly), m, poly) for x in range(N)]
    for a1 in range(N):
        for a3 in range(N):
            w = 0
            for x in range(N):
                v = gf_mul(a1, x, m, poly) ^ gf_mul(a3, cubes[x], m, poly)
                w |= gf_trace(v, m, poly) << x
            words.add(w)
    hist = {}
    for w in words:
        s = (N - 2 * bin(w).count("1")) ** 2
        hist[s] = hist.get(s, 0) + 1
    return dict(sorted(hist.items()))


def main():
    print("strip_delta(512, 2^18, 10, 0.5, 1) =", mp.nstr(strip_delta(512, 2**18, 10, 0.5, 1), 17))
    print("strip_delta(512, 2^18, 1, 0.5, 1) =", mp.nstr(strip_delta(512, 2**18, 1, 0.5, 1), 17), "2e^-16 =", mp.nstr(2 * mp.e**-16, 17))
    print("sharpened(512, 2^18, 1, 0.5, rho=2) =", mp.nstr(sharpened(512, 2**18, 1, 0.5, 2), 17))
    print("sharpened(512, 2^18, 1, 0.5, rho=1) =", mp.nstr(sharpened(512, 2**18, 1, 0.5, 1), 17))
    for dof, r in [(2, 1), (10, 3), (512, 25), (1, 0.5), (20, 2)]:
        print(f"S({r}, {dof}) =", mp.nstr(mp.gammainc(mp.mpf(dof) / 2, mp.mpf(r) ** 2 / 2, mp.inf, regularized=True), 17))
    for a, x in [(0.5, 0.3), (3, 2), (7.5, 12), (100, 90)]:
        print(f"Q({a}, {x}) =", mp.nstr(mp.gammainc(a, x, mp.inf, regularized=True), 17))
    print("pf column bound C=256 N=32 eps=sqrt(ln C/N):", mp.nstr(4 * 256 * mp.e ** (-2 * 32 * (mp.log(256) / 32)), 17))

    # Chirp p=5 placements.
    Phi = chirp(5)
    N, C = Phi.shape
    for vals in [(1, 1), (1 + 0.5j, -0.3 + 2j)]:
        vals = np.array(vals)
        acc = 0.0
        n = 0
        for j in itertools.permutations(range(C), 2):
            f = Phi[:, list(j)] @ vals / np.sqrt(N)
            acc += np.vdot(f, f).real
            n += 1
        print("chirp5 E||f||^2 for", vals, "=", repr(acc / n), "||a||^2 =", repr(np.vdot(vals, vals).real))
    w = 7
    others = [j for j in range(C) if j != w]
    acc = 0.0
    n = 0
    for S in itertools.combinations(others, 3):
        v = Phi[:, list(S)].conj().T @ Phi[:, w] / N
        acc += np.vdot(v, v).real
        n += 1
    print("chirp5 coherence mean k=3 w=7 =", repr(acc / n))

    print("kerdock m=3 rows:", kerdock_matrices(3, 0xB))
    print("bch m=6 t=2 |S|^2 histogram:", bch_sum_squares(6, 0x5B))
    print("gf256 0x57*0x83 mod 0x11D =", hex(gf_mul(0x57, 0x83, 8, 0x11D)))
    print("gf32 trace table:", [gf_trace(a, 5, 0x25) for a in range(32)])

    rng = np.random.default_rng(2024)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    H = np.round((A + A.conj().T) / 2, 3)
    roots = np.sort(np.roots(np.poly(H)).real)
    print("hermitian matrix:", H.tolist())
    print("eigenvalues (char poly roots):", [repr(v) for v in roots])

    v = np.array([1, 2j, -1, 0.5, 3, -2j, 0, 1 + 1j])
    Hd = np.array([[(-1) ** bin(l & x).count("1") for x in range(8)] for l in range(8)])
    print("wht of", v.tolist(), "=", (Hd @ v).tolist())


if __name__ == "__main__":
    main()
