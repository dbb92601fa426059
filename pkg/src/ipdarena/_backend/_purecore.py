"""Numpy implementation of the pair-stepping and tallying kernels.

Must stay bit-for-bit interchangeable with the compiled core: all updates
are integer-exact and pair-local, so results are independent of chunking.
"""

from __future__ import annotations

import numpy as np


def step_pairs(remap, id_a, id_b, hist_a, hist_b, c_t, c_r, c_p, c_s,
               stage_idx, m_own, m_opp, hist_mask, lo, hi):
    """Advance pairs [lo, hi) by one move.

    remap holds, per strategy and stage, the sub-strategy table re-indexed
    by the packed rolling histories (most recent action in bit 0).
    m_own / m_opp are the window widths of the current iteration.
    """
    ia = id_a[lo:hi]
    ib = id_b[lo:hi]
    ha = hist_a[lo:hi]
    hb = hist_b[lo:hi]
    table = remap[:, stage_idx]

    mo = np.uint8((1 << m_own) - 1)
    mq = np.uint8((1 << m_opp) - 1)
    sa = (ha & mo) | ((hb & mq) << np.uint8(m_own))
    sb = (hb & mo) | ((ha & mq) << np.uint8(m_own))

    aa = ((table[ia] >> sa) & 1).astype(np.uint32)
    ab = ((table[ib] >> sb) & 1).astype(np.uint32)

    c_r[lo:hi] += aa * ab
    c_s[lo:hi] += aa * (1 - ab)
    c_t[lo:hi] += (1 - aa) * ab
    c_p[lo:hi] += (1 - aa) * (1 - ab)

    hm = np.uint8(hist_mask)
    hist_a[lo:hi] = ((ha << np.uint8(1)) | aa.astype(np.uint8)) & hm
    hist_b[lo:hi] = ((hb << np.uint8(1)) | ab.astype(np.uint8)) & hm


def outcome_totals(id_a, id_b, c_t, c_r, c_p, c_s, mask, out):
    """Accumulate per-strategy T/R/P/S outcome counts into out (int64, N x 4).

    mask (uint8 per strategy, or None for all) restricts to pairs whose both
    sides participate.  The stored counters are the A side; the B side is
    recovered from complementarity (B receives S whenever A receives T).
    """
    if mask is not None:
        keep = (mask[id_a] & mask[id_b]) != 0
        ia, ib = id_a[keep], id_b[keep]
        ct, cr, cp, cs = c_t[keep], c_r[keep], c_p[keep], c_s[keep]
    else:
        ia, ib = id_a, id_b
        ct, cr, cp, cs = c_t, c_r, c_p, c_s

    np.add.at(out[:, 0], ia, ct)
    np.add.at(out[:, 1], ia, cr)
    np.add.at(out[:, 2], ia, cp)
    np.add.at(out[:, 3], ia, cs)

    off = ib != ia
    ib = ib[off]
    np.add.at(out[:, 0], ib, cs[off])
    np.add.at(out[:, 1], ib, cr[off])
    np.add.at(out[:, 2], ib, cp[off])
    np.add.at(out[:, 3], ib, ct[off])
