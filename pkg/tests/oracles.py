"""Reference computations independent of the library's exact arithmetic.

Everything here uses mpmath (interval or 60-digit floating point) and plain
loops, so agreement with the library is evidence rather than tautology.
"""

from fractions import Fraction
from itertools import count

import mpmath
from mpmath import iv, mp

mp.dps = 60
iv.dps = 100


def interval_value(a: Fraction, b: Fraction, radicand: int):
    a_iv = iv.mpf(a.numerator) / a.denominator
    if b == 0:
        return a_iv
    return a_iv + (iv.mpf(b.numerator) / b.denominator) * iv.sqrt(radicand)


def interval_floor(a: Fraction, b: Fraction, radicand: int) -> int:
    """Floor of ``a + b*sqrt(radicand)`` from a 100-digit enclosure; raises if ambiguous."""
    if b == 0:
        return a.numerator // a.denominator
    x = interval_value(a, b, radicand)
    lo, hi = int(mpmath.floor(x.a)), int(mpmath.floor(x.b))
    if lo != hi:
        raise ArithmeticError("enclosure straddles an integer")
    return lo


def mp_value(a, b=0, radicand=None):
    a = Fraction(a)
    b = Fraction(b)
    v = mp.mpf(a.numerator) / a.denominator
    if b:
        v += mp.mpf(b.numerator) / b.denominator * mp.sqrt(radicand)
    return v


def to_mp(x):
    """ExactScalar -> mpf via its public fields."""
    return mp_value(x.a, x.b, x.radicand)


def elliptic_index_bott(initial_index: int, rot_angles, nontrivial_n2=(), m: int = 1) -> int:
    """``i(c^m)`` as the sum of omega-indices over m-th roots of unity, R and N2 blocks only.

    Walking from 1 along the circle, an R(x) block lowers the index by one at
    exp(2 pi i x) and raises it by one just after exp(-2 pi i x); a nontrivial
    N2 block dips by one exactly at its two conjugate eigenvalues.
    """
    xs = [to_mp(x) for x in rot_angles]
    ys = [to_mp(y) for y in nontrivial_n2]
    total = 0
    for k in range(m):
        t = mp.mpf(k) / m
        if k == 0:
            total += initial_index
            continue
        v = initial_index
        for x in xs:
            v -= 1 if x <= t else 0
            v += 1 if 1 - x < t else 0
        for y in ys:
            v -= 1 if abs(y - t) < mp.mpf(10) ** -50 else 0
            v -= 1 if abs(1 - y - t) < mp.mpf(10) ** -50 else 0
        total += v
    return total


def general_index_terms(initial_index, p_minus, p_zero, q_zero, q_plus, rot_angles,
                        nontrivial_n2, m) -> int:
    """Closed-form iteration formula evaluated term by term in floating point with ceil/phi helpers."""
    def E(a):
        return int(mpmath.ceil(a - mp.mpf(10) ** -40))

    def phi(a):
        return 0 if abs(a - mpmath.nint(a)) < mp.mpf(10) ** -40 else 1

    rbar = len(rot_angles)
    r_star = len(nontrivial_n2)
    val = m * (initial_index + p_minus + p_zero - rbar)
    val += 2 * sum(E(m * to_mp(x)) for x in rot_angles)
    val -= rbar + p_minus + p_zero
    val -= ((1 + (-1) ** m) // 2) * (q_zero + q_plus)
    val += 2 * sum(phi(m * to_mp(a)) for a in nontrivial_n2)
    val -= 2 * r_star
    return val


def omega_set(d: int, n: int, upto: int, literal: bool = False) -> set:
    D = d * (n + 1) - 2
    lo = 1 if literal else 0
    out = set()
    for k1 in count(1):
        base = d - 1 + k1 * D
        if base > upto:
            break
        out.update(base + k2 * d for k2 in range(lo, n) if base + k2 * d <= upto)
    return out


def betti_even_reference(d: int, n: int, upto: int, literal: bool = False) -> list:
    om = omega_set(d, n, upto, literal)
    out = []
    for i in range(upto + 1):
        if i % 2 == 0 or i <= d - 2:
            out.append(0)
        elif i < d - 1 + (n - 1) * d:
            out.append((i - (d - 1)) // d + 1)
        elif i in om:
            out.append(n + 1)
        else:
            out.append(n)
    return out


def betti_odd_reference(d: int, upto: int) -> list:
    K = {k * (d - 1) for k in range(2, upto + 2)}
    out = []
    for i in range(upto + 1):
        if i % 2 == 1 or i < d - 1:
            out.append(0)
        elif i in K:
            out.append(2)
        else:
            out.append(1)
    return out


def first_admissible_reference(means, eps: Fraction, n_max: int, m0: int = 1):
    """Brute-force scan for ``N`` with every ``{N/mean}`` within eps of 0 or 1 (chi=0 on ties)."""
    inv = [1 / to_mp(mu) for mu in means]
    e = mp.mpf(eps.numerator) / eps.denominator
    for N in range(m0, n_max + 1, m0):
        chis = []
        for v in inv:
            f = N * v - mpmath.floor(N * v)
            if f < e:
                chis.append(0)
            elif 1 - f < e:
                chis.append(1)
            else:
                break
        else:
            return N, tuple(chis)
    return None
