"""GF(256) arithmetic and Reed-Solomon coding for the QR symbology.

Field: GF(2^8) with reduction polynomial 0x11D and generator element 2.
Codes are systematic; the generator polynomial has consecutive roots
alpha^0 .. alpha^(nsym-1).

Polynomials are lists of byte coefficients, highest degree first.
"""
from __future__ import annotations


class RsCorrectionError(Exception):
    """Raised when a codeword has more errors than the code can fix."""


_PRIM = 0x11D

# exp table doubled so products of two log values never need a modulo
GF_EXP = [0] * 512
GF_LOG = [0] * 256

_x = 1
for _i in range(255):
    GF_EXP[_i] = _x
    GF_LOG[_x] = _i
    _x <<= 1
    if _x & 0x100:
        _x ^= _PRIM
for _i in range(255, 512):
    GF_EXP[_i] = GF_EXP[_i - 255]
del _x, _i


def gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return GF_EXP[GF_LOG[a] + GF_LOG[b]]


def gf_div(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("division by zero in GF(256)")
    if a == 0:
        return 0
    return GF_EXP[GF_LOG[a] - GF_LOG[b] + 255]


def gf_pow(a: int, n: int) -> int:
    if a == 0:
        return 0
    return GF_EXP[(GF_LOG[a] * n) % 255]


def gf_inv(a: int) -> int:
    return GF_EXP[255 - GF_LOG[a]]


def poly_mul(p: list[int], q: list[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, pc in enumerate(p):
        if pc == 0:
            continue
        lpc = GF_LOG[pc]
        for j, qc in enumerate(q):
            if qc:
                out[i + j] ^= GF_EXP[lpc + GF_LOG[qc]]
    return out


def poly_add(p: list[int], q: list[int]) -> list[int]:
    out = [0] * max(len(p), len(q))
    out[len(out) - len(p):] = p
    for i, c in enumerate(q):
        out[i + len(out) - len(q)] ^= c
    return out


def poly_scale(p: list[int], s: int) -> list[int]:
    return [gf_mul(c, s) for c in p]


def poly_eval(p: list[int], x: int) -> int:
    y = 0
    for c in p:
        y = gf_mul(y, x) ^ c
    return y


def rs_generator_poly(nsym: int) -> list[int]:
    g = [1]
    for i in range(nsym):
        g = poly_mul(g, [1, GF_EXP[i]])
    return g


_GEN_CACHE: dict[int, list[int]] = {}


def rs_encode(data: bytes | list[int], nsym: int) -> bytes:
    """Parity bytes for `data` under a systematic RS code with `nsym` symbols."""
    if nsym < 1:
        raise ValueError("nsym must be >= 1")
    if len(data) + nsym > 255:
        raise ValueError("codeword longer than 255 bytes")
    gen = _GEN_CACHE.get(nsym)
    if gen is None:
        gen = rs_generator_poly(nsym)
        _GEN_CACHE[nsym] = gen
    rem = list(data) + [0] * nsym
    for i in range(len(data)):
        coef = rem[i]
        if coef:
            lc = GF_LOG[coef]
            for j in range(1, len(gen)):
                if gen[j]:
                    rem[i + j] ^= GF_EXP[lc + GF_LOG[gen[j]]]
    return bytes(rem[len(data):])


def _syndromes(codeword: list[int], nsym: int) -> list[int]:
    return [poly_eval(codeword, GF_EXP[i]) for i in range(nsym)]


def _error_locator(synd: list[int]) -> list[int]:
    """Berlekamp-Massey; returns the locator polynomial, highest degree first."""
    err_loc = [1]
    old_loc = [1]
    for i in range(len(synd)):
        old_loc.append(0)
        delta = synd[i]
        for j in range(1, len(err_loc)):
            delta ^= gf_mul(err_loc[-(j + 1)], synd[i - j])
        if delta != 0:
            if len(old_loc) > len(err_loc):
                new_loc = poly_scale(old_loc, delta)
                old_loc = poly_scale(err_loc, gf_inv(delta))
                err_loc = new_loc
            err_loc = poly_add(err_loc, poly_scale(old_loc, delta))
    while len(err_loc) > 1 and err_loc[0] == 0:
        err_loc = err_loc[1:]
    return err_loc


def rs_correct(codeword: bytes | list[int], nsym: int) -> bytes:
    """Corrected full codeword (data + parity), fixing up to nsym//2 errors.

    Raises RsCorrectionError when the error pattern is beyond the
    correction bound or inconsistent.
    """
    cw = list(codeword)
    if len(cw) > 255:
        raise ValueError("codeword longer than 255 bytes")
    synd = _syndromes(cw, nsym)
    if max(synd) == 0:
        return bytes(cw)

    err_loc = _error_locator(synd)
    n_errors = len(err_loc) - 1
    if n_errors * 2 > nsym:
        raise RsCorrectionError(f"{n_errors} errors exceed correction bound {nsym // 2}")

    # Chien search: position pos holds the coefficient of x^(n-1-pos)
    n = len(cw)
    positions = []
    for pos in range(n):
        x_inv = GF_EXP[255 - (n - 1 - pos)]
        if poly_eval(err_loc, x_inv) == 0:
            positions.append(pos)
    if len(positions) != n_errors:
        raise RsCorrectionError("error locator roots do not match error count")

    # Forney with b=0: e = X * omega(1/X) / lambda'(1/X)
    omega = poly_mul(list(reversed(synd)), err_loc)[-len(synd):]
    deg = len(err_loc) - 1
    loc_prime = [c if (deg - i) % 2 == 1 else 0 for i, c in enumerate(err_loc)][:-1]
    for pos in positions:
        x = GF_EXP[n - 1 - pos]
        x_inv = gf_inv(x)
        den = poly_eval(loc_prime, x_inv)
        if den == 0:
            raise RsCorrectionError("degenerate error locator derivative")
        cw[pos] ^= gf_mul(x, gf_div(poly_eval(omega, x_inv), den))

    if max(_syndromes(cw, nsym)) != 0:
        raise RsCorrectionError("residual syndromes after correction")
    return bytes(cw)
