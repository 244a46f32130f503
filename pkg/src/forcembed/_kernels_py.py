"""NumPy fallback for the compiled force kernel (same signature)."""
import numpy as np


def node_forces(U, indptr, indices, weights, p, q, b, w_rep, start, stop,
                f_att, f_rep, energy):
    """Fill rows ``start:stop`` of ``f_att``, ``f_rep`` and ``energy``."""
    if stop > U.shape[0] or start < 0 or start > stop:
        raise IndexError("row range out of bounds")
    qw = q * w_rep
    for k in range(start, stop):
        lo, hi = indptr[k], indptr[k + 1]
        if hi > lo:
            # axis-0 reductions accumulate rows in ascending order
            d_nei = U[k] - U[indices[lo:hi]]
            f_att[k] = ((-p * weights[lo:hi])[:, None] * d_nei).sum(axis=0)
        else:
            f_att[k] = 0.0

        diff = U[k] - U
        t = np.abs(diff)
        t += b
        t *= t
        coef = qw / t.sum(axis=1)
        coef[k] = 0.0
        f_rep[k] = (coef[:, None] * diff).sum(axis=0)

        net = f_att[k] + f_rep[k]
        energy[k] = net @ net
