"""Counter-based random numbers for reproducible parallel Monte Carlo.

Every normal draw is a pure function of (seed, domain, path, step, mode):
the 4x64 Philox block cipher is applied to the counter (path, step, mode,
domain) under the key (seed, DOMAIN_SALT), and the first output word is
mapped to a standard normal through the inverse CDF.  Draws therefore do
not depend on array layout, thread scheduling, or how many steps/modes are
requested, which is what makes increment tables couplable across
refinement levels.

The Philox implementation is vectorized over counters; tests cross-check
it word-for-word against numpy.random.Philox.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)

_LO32 = np.uint64(0xFFFFFFFF)
_SH32 = np.uint64(32)

# key-salt per purpose; keeps e.g. Wiener increments and the residual
# normals of the exact-solution sampler on disjoint streams
DOMAIN_INCREMENTS = 0x57494E43
DOMAIN_RESIDUAL = 0x52455349


def _mulhilo64(a, b):
    """Full 64x64 -> 128 bit product as (hi, lo), elementwise uint64."""
    lo = a * b  # uint64 wraps mod 2**64
    a_hi = a >> _SH32
    a_lo = a & _LO32
    b_hi = b >> _SH32
    b_lo = b & _LO32
    t = a_lo * b_lo
    m1 = a_hi * b_lo
    m2 = a_lo * b_hi
    carry = ((t >> _SH32) + (m1 & _LO32) + (m2 & _LO32)) >> _SH32
    hi = a_hi * b_hi + (m1 >> _SH32) + (m2 >> _SH32) + carry
    return hi, lo


def philox4x64(c0, c1, c2, c3, k0, k1, rounds=10):
    """Philox-4x64 block function on arrays of counters/keys.

    Arguments broadcast; returns the four uint64 output words.  Matches
    numpy.random.Philox word-for-word (numpy buffers blocks after first
    incrementing counter word 0; this function takes the counter as-is).
    """
    x0, x1, x2, x3, k0, k1 = np.broadcast_arrays(
        *(np.asarray(v, dtype=np.uint64) for v in (c0, c1, c2, c3, k0, k1))
    )
    x0, x1, x2, x3 = (v.copy() for v in (x0, x1, x2, x3))
    k0 = k0.copy()
    k1 = k1.copy()
    with np.errstate(over="ignore"):  # modular uint64 arithmetic is intended
        for r in range(rounds):
            if r > 0:
                k0 = k0 + _W0
                k1 = k1 + _W1
            hi0, lo0 = _mulhilo64(_M0, x0)
            hi1, lo1 = _mulhilo64(_M1, x2)
            x0, x1, x2, x3 = hi1 ^ x1 ^ k0, lo1, hi0 ^ x3 ^ k1, lo0
    return x0, x1, x2, x3


def _uniform_from_bits(word):
    """Map uint64 words to doubles strictly inside (0, 1)."""
    return ((word >> np.uint64(11)).astype(np.float64) + 0.5) * (2.0**-53)


def standard_normals(seed, domain, path, step, mode):
    """Standard normal draws keyed by (seed, domain, path, step, mode).

    All index arguments broadcast against each other. The inverse-CDF map
    (Wichura's algorithm via scipy.special.ndtri) keeps a single draw per
    counter, so draws for one key never depend on any other key.
    """
    w0, _, _, _ = philox4x64(path, step, mode, domain, np.uint64(seed) & np.uint64(2**64 - 1), domain)
    return ndtri(_uniform_from_bits(w0))


def normal_matrix(seed, domain, path, n_steps, n_modes, step0=0):
    """(n_steps, n_modes) matrix of keyed standard normals for one path."""
    steps = np.arange(step0, step0 + n_steps, dtype=np.uint64)[:, None]
    modes = np.arange(n_modes, dtype=np.uint64)[None, :]
    return standard_normals(seed, np.uint64(domain), np.uint64(path), steps, modes)
