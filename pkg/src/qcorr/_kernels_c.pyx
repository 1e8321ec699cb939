# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: cyclic Jacobi eigensolver and the inner-loop objectives.

Mirrors qcorr._kernels_py; see that module for the function contracts.
Everything here targets d <= 16 dense complex matrices, where plain loop
code beats LAPACK dispatch overhead by a wide margin.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, cos, sin, sqrt

cnp.import_array()

name = "compiled"

ctypedef double complex cplx

DEF MAXDIM = 16


cdef double _offdiag_norm(cplx* a, int n) noexcept nogil:
    cdef int i, j
    cdef double s = 0.0
    cdef cplx z
    for i in range(n):
        for j in range(n):
            if i != j:
                z = a[i * n + j]
                s += z.real * z.real + z.imag * z.imag
    return sqrt(s)


cdef double _fro_norm(cplx* a, int n2) noexcept nogil:
    cdef int i
    cdef double s = 0.0
    cdef cplx z
    for i in range(n2):
        z = a[i]
        s += z.real * z.real + z.imag * z.imag
    return sqrt(s)


cdef int _jacobi(cplx* a, cplx* v, int n, double tol, int max_sweeps) noexcept nogil:
    """Cyclic Jacobi on Hermitian a (row-major); diagonalizes in place.

    v accumulates the eigenvector columns.  Returns the sweep count, or -1
    if the off-diagonal mass failed to drop below tol * ||a||_F.
    """
    cdef int i, p, q, sweep
    cdef double norm_a, off, r, theta, c, s
    cdef double app, aqq
    cdef cplx apq, phase, phc, tp, tq

    for i in range(n * n):
        v[i] = 0.0
    for i in range(n):
        v[i * n + i] = 1.0

    norm_a = _fro_norm(a, n * n)
    if norm_a == 0.0:
        return 0

    for sweep in range(max_sweeps):
        off = _offdiag_norm(a, n)
        if off <= tol * norm_a:
            return sweep
        for p in range(n):
            for q in range(p + 1, n):
                apq = a[p * n + q]
                r = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if r <= 1e-300:
                    continue
                phase = apq / r
                phc = phase.conjugate()
                app = a[p * n + p].real
                aqq = a[q * n + q].real
                theta = 0.5 * atan2(2.0 * r, app - aqq)
                c = cos(theta)
                s = sin(theta)
                # columns: A <- A G with G[p,p]=c, G[p,q]=-s*phase,
                # G[q,p]=s*conj(phase), G[q,q]=c
                for i in range(n):
                    tp = a[i * n + p]
                    tq = a[i * n + q]
                    a[i * n + p] = c * tp + s * phc * tq
                    a[i * n + q] = -s * phase * tp + c * tq
                # rows: A <- G^dag A
                for i in range(n):
                    tp = a[p * n + i]
                    tq = a[q * n + i]
                    a[p * n + i] = c * tp + s * phase * tq
                    a[q * n + i] = -s * phc * tp + c * tq
                a[p * n + q] = 0.0
                a[q * n + p] = 0.0
                a[p * n + p] = a[p * n + p].real
                a[q * n + q] = a[q * n + q].real
                for i in range(n):
                    tp = v[i * n + p]
                    tq = v[i * n + q]
                    v[i * n + p] = c * tp + s * phc * tq
                    v[i * n + q] = -s * phase * tp + c * tq
    if _offdiag_norm(a, n) <= tol * norm_a:
        return max_sweeps
    return -1


cdef void _sort_ascending(double* w, cplx* v, int n) noexcept nogil:
    # insertion sort with column swaps; n <= 16
    cdef int i, j, k
    cdef double key
    cdef cplx col[MAXDIM]
    for i in range(1, n):
        key = w[i]
        for k in range(n):
            col[k] = v[k * n + i]
        j = i - 1
        while j >= 0 and w[j] > key:
            w[j + 1] = w[j]
            for k in range(n):
                v[k * n + j + 1] = v[k * n + j]
            j -= 1
        w[j + 1] = key
        for k in range(n):
            v[k * n + j + 1] = col[k]


cdef int _eigh_core(cplx* work, double* w, cplx* v, int n) noexcept nogil:
    cdef int i
    if _jacobi(work, v, n, 1e-13, 60) < 0:
        return -1
    for i in range(n):
        w[i] = work[i * n + i].real
    _sort_ascending(w, v, n)
    return 0


cdef int _expi_core(cplx* h, cplx* out, int d) noexcept nogil:
    """out = exp(i h) for Hermitian h (h is destroyed)."""
    cdef double w[MAXDIM]
    cdef cplx v[MAXDIM * MAXDIM]
    cdef cplx ph[MAXDIM]
    cdef int i, j, k
    cdef cplx acc
    if _eigh_core(h, w, v, d) != 0:
        return -1
    for k in range(d):
        ph[k] = cos(w[k]) + 1j * sin(w[k])
    for i in range(d):
        for j in range(d):
            acc = 0.0
            for k in range(d):
                acc += v[i * d + k] * ph[k] * v[j * d + k].conjugate()
            out[i * d + j] = acc
    return 0


cdef void _unpack_core(double* theta, cplx* h, int d) noexcept nogil:
    cdef int i, j, k
    for i in range(d * d):
        h[i] = 0.0
    k = d
    for i in range(d):
        h[i * d + i] = theta[i]
        for j in range(i + 1, d):
            h[i * d + j] = theta[k] + 1j * theta[k + 1]
            h[j * d + i] = theta[k] - 1j * theta[k + 1]
            k += 2


def eigh(a):
    """Hermitian eigendecomposition by cyclic Jacobi; eigenvalues ascending."""
    cdef cnp.ndarray[cplx, ndim=2] work = np.array(a, dtype=np.complex128, order="C")
    cdef int n = work.shape[0]
    if work.shape[1] != n:
        raise ValueError("matrix must be square")
    if n > MAXDIM:
        raise ValueError(f"compiled eigh supports dimensions up to {MAXDIM}")
    cdef cnp.ndarray[cplx, ndim=2] v = np.empty((n, n), dtype=np.complex128, order="C")
    cdef cnp.ndarray[double, ndim=1] w = np.empty(n, dtype=np.float64)
    if n == 0:
        return w, v
    if _eigh_core(<cplx*> work.data, <double*> w.data, <cplx*> v.data, n) != 0:
        raise np.linalg.LinAlgError("Jacobi sweep limit reached without convergence")
    return w, v


def expi_hermitian(h):
    """exp(iH) for Hermitian H."""
    cdef cnp.ndarray[cplx, ndim=2] work = np.array(h, dtype=np.complex128, order="C")
    cdef int d = work.shape[0]
    if work.shape[1] != d:
        raise ValueError("matrix must be square")
    if d > MAXDIM:
        raise ValueError(f"compiled expi supports dimensions up to {MAXDIM}")
    cdef cnp.ndarray[cplx, ndim=2] out = np.empty((d, d), dtype=np.complex128, order="C")
    if _expi_core(<cplx*> work.data, <cplx*> out.data, d) != 0:
        raise np.linalg.LinAlgError("Jacobi sweep limit reached without convergence")
    return out


def unpack_hermitian(theta, int d):
    """Same d^2-parameter packing as the pure-Python backend."""
    cdef cnp.ndarray[double, ndim=1] t = np.ascontiguousarray(theta, dtype=np.float64)
    if t.shape[0] != d * d:
        raise ValueError("theta must have length d^2")
    if d > MAXDIM:
        raise ValueError(f"dimension too large (max {MAXDIM})")
    cdef cnp.ndarray[cplx, ndim=2] h = np.empty((d, d), dtype=np.complex128, order="C")
    _unpack_core(<double*> t.data, <cplx*> h.data, d)
    return h


def apply_kraus(kraus, m):
    """sum_k E_k m E_k^dag for a stacked (n, d, d) Kraus array."""
    cdef cnp.ndarray[cplx, ndim=3] e = np.ascontiguousarray(kraus, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=2] x = np.ascontiguousarray(m, dtype=np.complex128)
    cdef int nk = e.shape[0]
    cdef int d = e.shape[1]
    if x.shape[0] != d or x.shape[1] != d or e.shape[2] != d:
        raise ValueError("dimension mismatch")
    cdef cnp.ndarray[cplx, ndim=2] out = np.zeros((d, d), dtype=np.complex128, order="C")
    cdef cnp.ndarray[cplx, ndim=2] tmp = np.empty((d, d), dtype=np.complex128, order="C")
    cdef int k, i, j, l
    cdef cplx acc
    for k in range(nk):
        for i in range(d):
            for j in range(d):
                acc = 0.0
                for l in range(d):
                    acc += e[k, i, l] * x[l, j]
                tmp[i, j] = acc
        for i in range(d):
            for j in range(d):
                acc = 0.0
                for l in range(d):
                    acc += tmp[i, l] * e[k, j, l].conjugate()
                out[i, j] += acc
    return out


def commutator_fro(a, b):
    """Frobenius norm of ab - ba."""
    cdef cnp.ndarray[cplx, ndim=2] x = np.ascontiguousarray(a, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=2] y = np.ascontiguousarray(b, dtype=np.complex128)
    cdef int d = x.shape[0]
    if x.shape[1] != d or y.shape[0] != d or y.shape[1] != d:
        raise ValueError("matrices must be square and of equal dimension")
    cdef int i, j, l
    cdef cplx acc
    cdef double s = 0.0
    for i in range(d):
        for j in range(d):
            acc = 0.0
            for l in range(d):
                acc += x[i, l] * y[l, j] - y[i, l] * x[l, j]
            s += acc.real * acc.real + acc.imag * acc.imag
    return sqrt(s)


def pair_violation(theta, u0, kraus):
    """Normalized commutator defect of channel outputs on an orthogonal pure pair."""
    cdef cnp.ndarray[double, ndim=1] t = np.ascontiguousarray(theta, dtype=np.float64)
    cdef cnp.ndarray[cplx, ndim=2] u = np.ascontiguousarray(u0, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=3] e = np.ascontiguousarray(kraus, dtype=np.complex128)
    cdef int d = u.shape[0]
    cdef int nk = e.shape[0]
    if d < 2 or d > MAXDIM:
        raise ValueError("dimension must be between 2 and %d" % MAXDIM)
    if t.shape[0] != d * d:
        raise ValueError("theta must have length d^2")
    if e.shape[1] != d or e.shape[2] != d or u.shape[1] != d:
        raise ValueError("dimension mismatch")

    cdef cplx h[MAXDIM * MAXDIM]
    cdef cplx g[MAXDIM * MAXDIM]
    cdef cplx phi[MAXDIM]
    cdef cplx psi[MAXDIM]
    cdef cplx ephi[MAXDIM]
    cdef cplx epsi[MAXDIM]
    cdef cplx amat[MAXDIM * MAXDIM]
    cdef cplx bmat[MAXDIM * MAXDIM]
    cdef int i, j, k, l
    cdef cplx acc, accb, z
    cdef double na, nb, s

    _unpack_core(<double*> t.data, h, d)
    if _expi_core(h, g, d) != 0:
        raise np.linalg.LinAlgError("Jacobi sweep limit reached without convergence")

    # pair = first two columns of u0 @ exp(iH)
    for i in range(d):
        acc = 0.0
        accb = 0.0
        for l in range(d):
            acc += u[i, l] * g[l * d + 0]
            accb += u[i, l] * g[l * d + 1]
        phi[i] = acc
        psi[i] = accb

    for i in range(d * d):
        amat[i] = 0.0
        bmat[i] = 0.0
    for k in range(nk):
        for i in range(d):
            acc = 0.0
            accb = 0.0
            for l in range(d):
                acc += e[k, i, l] * phi[l]
                accb += e[k, i, l] * psi[l]
            ephi[i] = acc
            epsi[i] = accb
        for i in range(d):
            for j in range(d):
                amat[i * d + j] += ephi[i] * ephi[j].conjugate()
                bmat[i * d + j] += epsi[i] * epsi[j].conjugate()

    na = _fro_norm(amat, d * d)
    nb = _fro_norm(bmat, d * d)

    s = 0.0
    for i in range(d):
        for j in range(d):
            acc = 0.0
            for l in range(d):
                acc += amat[i * d + l] * bmat[l * d + j] - bmat[i * d + l] * amat[l * d + j]
            s += acc.real * acc.real + acc.imag * acc.imag
    return sqrt(s) / (na * nb)


def entangled_overlap(theta, u0, rho):
    """<Phi_U|rho|Phi_U> with |Phi_U> = (I (x) U)|Phi+>, U = u0 exp(iH(theta))."""
    cdef cnp.ndarray[double, ndim=1] t = np.ascontiguousarray(theta, dtype=np.float64)
    cdef cnp.ndarray[cplx, ndim=2] u = np.ascontiguousarray(u0, dtype=np.complex128)
    cdef cnp.ndarray[cplx, ndim=2] r = np.ascontiguousarray(rho, dtype=np.complex128)
    cdef int d = u.shape[0]
    cdef int n = d * d
    if d > MAXDIM:
        raise ValueError("dimension too large for compiled kernel")
    if t.shape[0] != n:
        raise ValueError("theta must have length d^2")
    if r.shape[0] != n or r.shape[1] != n:
        raise ValueError("rho must be (d^2, d^2)")

    cdef cplx h[MAXDIM * MAXDIM]
    cdef cplx g[MAXDIM * MAXDIM]
    cdef cplx w[MAXDIM * MAXDIM]
    cdef int i, a, l
    cdef cplx acc
    cdef double invsq, val

    _unpack_core(<double*> t.data, h, d)
    if _expi_core(h, g, d) != 0:
        raise np.linalg.LinAlgError("Jacobi sweep limit reached without convergence")

    invsq = 1.0 / sqrt(<double> d)
    for i in range(d):
        for a in range(d):
            acc = 0.0
            for l in range(d):
                acc += u[a, l] * g[l * d + i]
            w[i * d + a] = acc * invsq

    val = 0.0
    for i in range(n):
        acc = 0.0
        for l in range(n):
            acc += r[i, l] * w[l]
        val += (w[i].conjugate() * acc).real
    return val
