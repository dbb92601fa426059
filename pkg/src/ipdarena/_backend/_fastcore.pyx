# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pair-stepping and tallying kernels.

Semantics are defined by ipdarena._backend._purecore; this module only
exists to make large configurations fast.  Both loops release the GIL so
the engine can drive disjoint pair ranges from several threads.
"""


def step_pairs(const unsigned long long[:, ::1] remap,
               const unsigned short[::1] id_a,
               const unsigned short[::1] id_b,
               unsigned char[::1] hist_a,
               unsigned char[::1] hist_b,
               unsigned int[::1] c_t,
               unsigned int[::1] c_r,
               unsigned int[::1] c_p,
               unsigned int[::1] c_s,
               int stage_idx, int m_own, int m_opp, int hist_mask,
               Py_ssize_t lo, Py_ssize_t hi):
    cdef Py_ssize_t p
    cdef unsigned char ha, hb, sa, sb, aa, ab
    cdef unsigned char mo = <unsigned char>((1 << m_own) - 1)
    cdef unsigned char mq = <unsigned char>((1 << m_opp) - 1)
    cdef unsigned char hm = <unsigned char>hist_mask
    cdef int shift = m_own
    with nogil:
        for p in range(lo, hi):
            ha = hist_a[p]
            hb = hist_b[p]
            sa = (ha & mo) | <unsigned char>((hb & mq) << shift)
            sb = (hb & mo) | <unsigned char>((ha & mq) << shift)
            aa = <unsigned char>((remap[id_a[p], stage_idx] >> sa) & 1)
            ab = <unsigned char>((remap[id_b[p], stage_idx] >> sb) & 1)
            if aa:
                if ab:
                    c_r[p] += 1
                else:
                    c_s[p] += 1
            else:
                if ab:
                    c_t[p] += 1
                else:
                    c_p[p] += 1
            hist_a[p] = <unsigned char>(((ha << 1) | aa) & hm)
            hist_b[p] = <unsigned char>(((hb << 1) | ab) & hm)


def outcome_totals(const unsigned short[::1] id_a,
                   const unsigned short[::1] id_b,
                   const unsigned int[::1] c_t,
                   const unsigned int[::1] c_r,
                   const unsigned int[::1] c_p,
                   const unsigned int[::1] c_s,
                   mask,
                   long long[:, ::1] out):
    cdef Py_ssize_t n = id_a.shape[0]
    cdef Py_ssize_t p
    cdef unsigned short i, j
    cdef const unsigned char[::1] mk
    if mask is None:
        with nogil:
            for p in range(n):
                i = id_a[p]
                j = id_b[p]
                out[i, 0] += c_t[p]
                out[i, 1] += c_r[p]
                out[i, 2] += c_p[p]
                out[i, 3] += c_s[p]
                if i != j:
                    out[j, 0] += c_s[p]
                    out[j, 1] += c_r[p]
                    out[j, 2] += c_p[p]
                    out[j, 3] += c_t[p]
    else:
        mk = mask
        with nogil:
            for p in range(n):
                i = id_a[p]
                j = id_b[p]
                if mk[i] and mk[j]:
                    out[i, 0] += c_t[p]
                    out[i, 1] += c_r[p]
                    out[i, 2] += c_p[p]
                    out[i, 3] += c_s[p]
                    if i != j:
                        out[j, 0] += c_s[p]
                        out[j, 1] += c_r[p]
                        out[j, 2] += c_p[p]
                        out[j, 3] += c_t[p]
