"""Numba kernels: literal permutation sums and fast pair-statistic counting.

The permutation sums accumulate in int64, so oracle values are exact
rationals (integer / prefactor). The fast paths accumulate per-cell integer
quantities in compensated float64, keeping results independent of the
worker count and of summation order.
"""

import numpy as np
from numba import njit, prange

# ---------------------------------------------------------------------------
# literal permutation sums (oracle side)
# ---------------------------------------------------------------------------


@njit(cache=True, parallel=True)
def perm_sum_d(x, y, perms):
    B = x.shape[0]
    out = np.zeros(B, dtype=np.int64)
    for b in prange(B):
        acc = 0
        for t in range(perms.shape[0]):
            i1 = perms[t, 0]
            i2 = perms[t, 1]
            i3 = perms[t, 2]
            i4 = perms[t, 3]
            i5 = perms[t, 4]
            fx = (int(x[b, i1] <= x[b, i5]) - int(x[b, i2] <= x[b, i5])) * (
                int(x[b, i3] <= x[b, i5]) - int(x[b, i4] <= x[b, i5])
            )
            if fx == 0:
                continue
            fy = (int(y[b, i1] <= y[b, i5]) - int(y[b, i2] <= y[b, i5])) * (
                int(y[b, i3] <= y[b, i5]) - int(y[b, i4] <= y[b, i5])
            )
            acc += fx * fy
        out[b] = acc
    return out


@njit(cache=True, parallel=True)
def perm_sum_r(x, y, perms):
    B = x.shape[0]
    out = np.zeros(B, dtype=np.int64)
    for b in prange(B):
        acc = 0
        for t in range(perms.shape[0]):
            i1 = perms[t, 0]
            i2 = perms[t, 1]
            i3 = perms[t, 2]
            i4 = perms[t, 3]
            i5 = perms[t, 4]
            i6 = perms[t, 5]
            fx = (int(x[b, i1] <= x[b, i5]) - int(x[b, i2] <= x[b, i5])) * (
                int(x[b, i3] <= x[b, i5]) - int(x[b, i4] <= x[b, i5])
            )
            if fx == 0:
                continue
            fy = (int(y[b, i1] <= y[b, i6]) - int(y[b, i2] <= y[b, i6])) * (
                int(y[b, i3] <= y[b, i6]) - int(y[b, i4] <= y[b, i6])
            )
            acc += fx * fy
        out[b] = acc
    return out


@njit(cache=True)
def _tstar_sign(u1, u2, u3, u4):
    # I(u1,u3 < u2,u4) + I(u2,u4 < u1,u3) - I(u1,u4 < u2,u3) - I(u2,u3 < u1,u4)
    a = 0
    if max(u1, u3) < min(u2, u4):
        a += 1
    if max(u2, u4) < min(u1, u3):
        a += 1
    if max(u1, u4) < min(u2, u3):
        a -= 1
    if max(u2, u3) < min(u1, u4):
        a -= 1
    return a


@njit(cache=True, parallel=True)
def perm_sum_t(x, y, perms):
    B = x.shape[0]
    out = np.zeros(B, dtype=np.int64)
    for b in prange(B):
        acc = 0
        for t in range(perms.shape[0]):
            i1 = perms[t, 0]
            i2 = perms[t, 1]
            i3 = perms[t, 2]
            i4 = perms[t, 3]
            ax = _tstar_sign(x[b, i1], x[b, i2], x[b, i3], x[b, i4])
            if ax == 0:
                continue
            ay = _tstar_sign(y[b, i1], y[b, i2], y[b, i3], y[b, i4])
            acc += ax * ay
        out[b] = acc
    return out


# ---------------------------------------------------------------------------
# fast pair statistics on rank vectors (production side)
# ---------------------------------------------------------------------------
#
# D and R reduce, after fixing the pivot point(s) of their kernels, to sums
# over four further distinct points of g(i1,i2)*g(i3,i4) with
# g(i,j) = (a_i - a_j)(b_i - b_j) for 0/1 labels a, b. With
# N = #points, c11 = #{a=1,b=1}, sa = #{a=1}, sb = #{b=1}:
#   sum_{4 distinct} g g = A^2 - 4*Sh2 + 2*Sg2,
#   A   = 2(N*c11 - sa*sb),
#   Sg2 = 2(c11*c00 + c10*c01),
#   Sh2 = sum over label classes of count * (N*ab - a*sb - b*sa + c11)^2.


@njit(cache=True, inline="always")
def _pair4_inner(nn, c11, sa, sb):
    c10 = sa - c11
    c01 = sb - c11
    c00 = nn - sa - sb + c11
    a_lin = 2.0 * (nn * c11 - sa * sb)
    sg2 = 2.0 * (c11 * c00 + c10 * c01)
    h11 = float(c00)  # N - sa - sb + c11
    h10 = float(c11 - sb)
    h01 = float(c11 - sa)
    h00 = float(c11)
    sh2 = c11 * h11 * h11 + c10 * h10 * h10 + c01 * h01 * h01 + c00 * h00 * h00
    return a_lin * a_lin - 4.0 * sh2 + 2.0 * sg2


@njit(cache=True)
def pair_raw_d(r, s, xinv):
    """Pivot sum for Hoeffding's D kernel, divided by C(n,5).

    ``r``, ``s`` are 1..n ranks, ``xinv[t]`` the point whose x-rank is t+1.
    The bivariate rank q (strict southwest count) comes from a Fenwick tree,
    so the per-pair cost is O(n log n).
    """
    n = r.shape[0]
    tree = np.zeros(n + 1, dtype=np.int64)
    q = np.zeros(n, dtype=np.int64)
    for t in range(n):
        u = xinv[t]
        i = s[u] - 1
        cnt = 0
        while i > 0:
            cnt += tree[i]
            i -= i & (-i)
        q[u] = cnt
        i = s[u]
        while i <= n:
            tree[i] += 1
            i += i & (-i)
    nn = n - 1
    acc = 0.0
    comp = 0.0
    for u in range(n):
        term = _pair4_inner(nn, q[u], r[u] - 1, s[u] - 1)
        yy = term - comp
        tt = acc + yy
        comp = (tt - acc) - yy
        acc = tt
    c5 = (
        float(n)
        * float(n - 1)
        * float(n - 2)
        * float(n - 3)
        * float(n - 4)
        / 120.0
    )
    return acc / c5


@njit(cache=True)
def _joint_cdf_table(r, s):
    """K[i, j] = #{t : r_t <= i and s_t <= j} for i, j in 0..n."""
    n = r.shape[0]
    K = np.zeros((n + 1, n + 1), dtype=np.int64)
    for t in range(n):
        K[r[t], s[t]] = 1
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            K[i, j] += K[i - 1, j] + K[i, j - 1] - K[i - 1, j - 1]
    return K


@njit(cache=True)
def pair_raw_r(r, s):
    """Double-pivot sum for the BKR kernel, divided by C(n,6). O(n^2)."""
    n = r.shape[0]
    K = _joint_cdf_table(r, s)
    sigma = np.zeros(n + 1, dtype=np.int64)
    rho = np.zeros(n + 1, dtype=np.int64)
    for t in range(n):
        sigma[r[t]] = s[t]
        rho[s[t]] = r[t]
    nn = n - 2
    acc = 0.0
    comp = 0.0
    for i in range(1, n + 1):
        su = sigma[i]
        for j in range(1, n + 1):
            rv = rho[j]
            if rv == i:
                continue
            c11 = K[i, j]
            if su <= j:
                c11 -= 1
            if rv <= i:
                c11 -= 1
            sa = i - 1
            if rv < i:
                sa -= 1
            sb = j - 1
            if su < j:
                sb -= 1
            term = _pair4_inner(nn, c11, sa, sb)
            yy = term - comp
            tt = acc + yy
            comp = (tt - acc) - yy
            acc = tt
    c6 = (
        float(n)
        * float(n - 1)
        * float(n - 2)
        * float(n - 3)
        * float(n - 4)
        * float(n - 5)
        / 720.0
    )
    return acc / c6


@njit(cache=True)
def pair_raw_t(r, s):
    """tau* via dominance counting. O(n^2).

    On a tie-free 4-subset the kernel equals 1 when the low-two-by-x pair
    coincides with the low-two-by-y or high-two-by-y pair, else -1/2, so the
    U-statistic reduces to counting doubly separated pairs of point pairs.
    """
    n = r.shape[0]
    K = _joint_cdf_table(r, s)
    acc = 0.0
    comp = 0.0
    for a in range(n):
        ra = r[a]
        sa = s[a]
        for b in range(a + 1, n):
            rmax = ra if ra > r[b] else r[b]
            if sa > s[b]:
                smax = sa
                smin = s[b]
            else:
                smax = s[b]
                smin = sa
            u_cnt = n - rmax - smax + K[rmax, smax]
            v_cnt = (smin - 1) - K[rmax, smin - 1]
            term = float(u_cnt * (u_cnt - 1) + v_cnt * (v_cnt - 1))
            yy = term - comp
            tt = acc + yy
            comp = (tt - acc) - yy
            acc = tt
    match = acc / 2.0
    c4 = float(n) * float(n - 1) * float(n - 2) * float(n - 3) / 24.0
    return (3.0 * match - c4) / (2.0 * c4)


# ---------------------------------------------------------------------------
# correlation matrix assembly: parallel over upper-triangle pairs
# ---------------------------------------------------------------------------


@njit(cache=True, parallel=True)
def corr_matrix_d(ranks, xinv, jj, kk, scale, out):
    for t in prange(jj.shape[0]):
        j = jj[t]
        k = kk[t]
        v = scale * pair_raw_d(ranks[j], ranks[k], xinv[j])
        out[j, k] = v
        out[k, j] = v


@njit(cache=True, parallel=True)
def corr_matrix_r(ranks, jj, kk, scale, out):
    for t in prange(jj.shape[0]):
        j = jj[t]
        k = kk[t]
        v = scale * pair_raw_r(ranks[j], ranks[k])
        out[j, k] = v
        out[k, j] = v


@njit(cache=True, parallel=True)
def corr_matrix_t(ranks, jj, kk, scale, out):
    for t in prange(jj.shape[0]):
        j = jj[t]
        k = kk[t]
        v = scale * pair_raw_t(ranks[j], ranks[k])
        out[j, k] = v
        out[k, j] = v
