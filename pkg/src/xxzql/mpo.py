"""Dense contraction of matrix-product operators built from component stacks.

A site carries a stack A of shape (4, d, d'): auxiliary blocks paired with the
physical 2x2 basis (identity, sigma_z, sigma_plus, sigma_minus) in that order.
Contractions keep the auxiliary leg explicit and grow the physical operator one
site at a time, so peak memory is O(d * 4^n) per boundary row.
"""

from __future__ import annotations

import numpy as np

from .chain import SIGMA_0, SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z

COMPONENT_ORDER = ("0", "z", "+", "-")
PAULI_STACK = np.stack(
    [SIGMA_0, SIGMA_Z, SIGMA_PLUS, SIGMA_MINUS]
).astype(complex)


def _advance(carry: np.ndarray, comps: np.ndarray) -> np.ndarray:
    """One MPO step: carry (d, D, D) -> (d', 2D, 2D) with comps (4, d, d')."""
    d_out = comps.shape[2]
    dim = carry.shape[1]
    # contract the auxiliary bond first, then attach the physical factor
    mixed = np.tensordot(comps, carry, axes=([1], [0]))  # (4, d_out, D, D)
    out = np.einsum("adxy,aij->dxiyj", mixed, PAULI_STACK)
    return out.reshape(d_out, 2 * dim, 2 * dim)


def braket_product(site_comps: list[np.ndarray], bra: np.ndarray, ket: np.ndarray) -> np.ndarray:
    """<bra| prod_x L_x |ket> as a dense 2^n x 2^n matrix.

    site_comps[x] has shape (4, d_x, d_{x+1}); bra has length d_0 and ket
    length d_n.  Site 0 is the leftmost physical Kronecker factor.
    """
    carry = np.asarray(bra, dtype=complex).reshape(-1, 1, 1).copy()
    for comps in site_comps:
        carry = _advance(carry, comps)
    return np.tensordot(np.asarray(ket, dtype=complex), carry, axes=([0], [0]))


def closure_product(site_comps: list[np.ndarray], closure: np.ndarray) -> np.ndarray:
    """tr_aux[(prod_x L_x) closure] as a dense 2^n x 2^n matrix.

    closure is a (d_n, d_0) matrix.  Identity closure gives the plain
    auxiliary trace.  Rows of the starting space are swept one at a time to
    keep the contraction memory at one carry per row.
    """
    closure = np.asarray(closure, dtype=complex)
    d0 = site_comps[0].shape[1]
    n = len(site_comps)
    out = np.zeros((2**n, 2**n), dtype=complex)
    for c in range(d0):
        start = np.zeros(d0)
        start[c] = 1.0
        out += braket_product(site_comps, start, closure[:, c])
    return out


def uniform_sites(comps: np.ndarray, n: int) -> list[np.ndarray]:
    """n copies of one component stack."""
    return [comps] * n
