# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Classical fourth-order Runge-Kutta for dU/dt = A(t) U, A(t) = sum_k c_k(t) G_k.

The caller pre-samples the scalar coefficients c_k on the half-step grid
(2*steps + 1 rows), so the hot loop is stage assembly (K*d^2 multiply-adds)
plus four BLAS zgemm calls per step and never touches Python.
"""
import numpy as np

from scipy.linalg.cython_blas cimport zgemm


cdef void _matmul(double complex* a, double complex* b, double complex* out, int d) noexcept nogil:
    # Row-major out = a @ b. In column-major terms that is out^T = b^T a^T,
    # so the buffers are handed to zgemm in swapped order with no transposes.
    cdef double complex one = 1.0
    cdef double complex zero = 0.0
    zgemm("N", "N", &d, &d, &d, &one, b, &d, a, &d, &zero, out, &d)


cdef void _build_stage(const double complex* gens, const double* coeffs,
                       double complex* out, Py_ssize_t k_terms, Py_ssize_t nn) noexcept nogil:
    cdef Py_ssize_t k, i
    cdef double c
    for i in range(nn):
        out[i] = 0.0
    for k in range(k_terms):
        c = coeffs[k]
        for i in range(nn):
            out[i] = out[i] + c * gens[k * nn + i]


def rk4_lincomb(double complex[:, :, ::1] gens not None,
                double[:, ::1] coeffs not None,
                double h,
                double complex[:, ::1] u0 not None):
    """Integrate the linear matrix ODE and return the final matrix.

    gens:   (K, d, d) generator matrices.
    coeffs: (2*steps + 1, K) real coefficients sampled at t0, t0+h/2, t0+h, ...
    h:      step size.
    u0:     (d, d) initial condition (copied, not modified).
    """
    cdef Py_ssize_t k_terms = gens.shape[0]
    cdef int d = <int> gens.shape[1]
    cdef Py_ssize_t nn = <Py_ssize_t> d * d
    cdef Py_ssize_t steps = (coeffs.shape[0] - 1) // 2
    cdef double half = 0.5 * h
    cdef double sixth = h / 6.0

    u_arr = np.array(u0, dtype=np.complex128, order="C")
    cdef double complex[:, ::1] u_view = u_arr
    work = np.empty((6, nn), dtype=np.complex128)
    cdef double complex[:, ::1] w_view = work

    cdef double complex* u = &u_view[0, 0]
    cdef double complex* a_stage = &w_view[0, 0]
    cdef double complex* k1 = &w_view[1, 0]
    cdef double complex* k2 = &w_view[2, 0]
    cdef double complex* k3 = &w_view[3, 0]
    cdef double complex* k4 = &w_view[4, 0]
    cdef double complex* tmp = &w_view[5, 0]
    cdef const double complex* g0 = &gens[0, 0, 0]
    cdef const double* c0 = &coeffs[0, 0]

    cdef Py_ssize_t step, i
    with nogil:
        for step in range(steps):
            _build_stage(g0, c0 + (2 * step) * k_terms, a_stage, k_terms, nn)
            _matmul(a_stage, u, k1, d)

            _build_stage(g0, c0 + (2 * step + 1) * k_terms, a_stage, k_terms, nn)
            for i in range(nn):
                tmp[i] = u[i] + half * k1[i]
            _matmul(a_stage, tmp, k2, d)

            for i in range(nn):
                tmp[i] = u[i] + half * k2[i]
            _matmul(a_stage, tmp, k3, d)

            _build_stage(g0, c0 + (2 * step + 2) * k_terms, a_stage, k_terms, nn)
            for i in range(nn):
                tmp[i] = u[i] + h * k3[i]
            _matmul(a_stage, tmp, k4, d)

            for i in range(nn):
                u[i] = u[i] + sixth * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])

    return u_arr
