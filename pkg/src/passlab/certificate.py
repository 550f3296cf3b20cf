"""Lur'e certificates for state-space passivity.

A certificate for (A, B, C, D) is a real triple (X, L, W) with

    X = X^T >= 0,
    -A^T X - X A = L^T L,
    C - B^T X    = W^T L,
    D + D^T      = W^T W.

`verify_certificate` checks a supplied triple (all four residuals, the PSD
margin, and optionally that Z(s) = W + L (sI - A)^-1 B is a spectral factor
of G + G*).  `construct_certificate` builds one from scratch:

    observer staircase -> stable/unstable spectral split -> positive-definite
    lossless solve on the axis block -> spectral factor K of M*N + N*M on the
    controllable image pair (M, N) -> constant L from the eigenstructure
    linear system -> stable Lyapunov solve -> feedthrough W = lim K M^-1 ->
    assembly and a mandatory verify pass.

Spectral factorization of the para-Hermitian density is implemented for the
scalar and diagonal polynomial cases and, for proper rational G + G* with
D + D^T > 0, through the algebraic Riccati equation; anything else is
reported as unsupported, never silently approximated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import numpy.polynomial.polynomial as npp

from .behavior import decompose
from .numeric import (AXIS, DEFAULT_TOL, OPEN_RHP, LosslessInfeasibleError,
                      LyapunovError, SpectralSplitError, Tolerance,
                      lossless_lyap_solve, lyapunov_solve, region_of,
                      stable_unstable_split)
from .numeric import roots as numeric_roots
from .poly import Poly, squarefree_decomposition
from .polymatrix import PolyMat
from .prpair import PASS, INCONCLUSIVE, PRPairVerdict, axis_psd, check_pair
from .statespace import StateSpace, si_matrix, staircase


class FactorizationError(Exception):
    """The density violates the PSD-on-axis premise (no factor exists)."""


class UnsupportedFactorizationError(Exception):
    """Outside the implemented sub-cases of matrix spectral factorization."""


class CertificateVerificationError(Exception):
    """A supplied or constructed triple violates one of the four equations."""


class AREInfeasibleError(Exception):
    """No PSD solution of the algebraic Riccati equation was found."""


class StableStageError(Exception):
    """The eigenstructure linear system for L is inconsistent."""


class DefectiveSpectrumError(StableStageError):
    """Default mode assumes a semisimple stable block; rerun with Jordan chains."""


# -- float polynomials (coefficient arrays, low to high) ---------------------


def _fp(c) -> np.ndarray:
    return np.atleast_1d(np.asarray(c, dtype=float))


def _fp_trim(c: np.ndarray, rel: float = 1e-12) -> np.ndarray:
    c = _fp(c)
    scale = np.max(np.abs(c)) if c.size else 0.0
    if scale == 0.0:
        return np.zeros(1)
    keep = np.nonzero(np.abs(c) > rel * scale)[0]
    return c[: keep[-1] + 1] if keep.size else np.zeros(1)


def _fp_deg(c: np.ndarray) -> int:
    c = _fp_trim(c)
    return len(c) - 1 if np.any(c != 0) else -1


def _fp_star(c: np.ndarray) -> np.ndarray:
    c = _fp(c)
    return c * np.array([(-1) ** k for k in range(len(c))], dtype=float)


def _fp_eval(c: np.ndarray, z: complex) -> complex:
    return complex(npp.polyval(z, _fp(c)))


def _poly_to_fp(p: Poly) -> np.ndarray:
    return _fp([float(x) for x in p.coeffs]) if not p.is_zero else np.zeros(1)


def _polymat_to_fp(M: PolyMat) -> list[list[np.ndarray]]:
    return [[_poly_to_fp(M[i, j]) for j in range(M.cols)] for i in range(M.rows)]


def _fp_matmul(A: list[list[np.ndarray]], B: list[list[np.ndarray]],
               rows: int, inner: int, cols: int) -> list[list[np.ndarray]]:
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = np.zeros(1)
            for k in range(inner):
                acc = npp.polyadd(acc, npp.polymul(A[i][k], B[k][j]))
            row.append(_fp_trim(acc))
        out.append(row)
    return out


def _const_to_fp(M: np.ndarray) -> list[list[np.ndarray]]:
    return [[_fp([M[i, j]]) for j in range(M.shape[1])] for i in range(M.shape[0])]


def _fp_det(grid: list[list[np.ndarray]]) -> np.ndarray:
    n = len(grid)
    if n == 0:
        return _fp([1.0])
    if n == 1:
        return grid[0][0]
    acc = np.zeros(1)
    for j in range(n):
        minor = [[grid[i][k] for k in range(n) if k != j] for i in range(1, n)]
        term = npp.polymul(grid[0][j], _fp_det(minor))
        acc = npp.polyadd(acc, term if j % 2 == 0 else -term)
    return _fp_trim(acc)


# -- rational matrices for diagnostics ----------------------------------------


@dataclass(frozen=True)
class RationalMatrix:
    """Common-denominator rational matrix num(s)/den(s), float coefficients."""
    num: tuple[tuple[np.ndarray, ...], ...]
    den: np.ndarray
    rows: int
    cols: int

    @staticmethod
    def from_grid(num: list[list[np.ndarray]], den, rows: int, cols: int
                  ) -> "RationalMatrix":
        return RationalMatrix(tuple(tuple(_fp_trim(e) for e in r) for r in num),
                              _fp_trim(den), rows, cols)

    @staticmethod
    def constant(M: np.ndarray) -> "RationalMatrix":
        return RationalMatrix.from_grid(_const_to_fp(M), [1.0],
                                        M.shape[0], M.shape[1])

    def eval(self, z: complex) -> np.ndarray:
        d = _fp_eval(self.den, z)
        out = np.zeros((self.rows, self.cols), dtype=complex)
        for i in range(self.rows):
            for j in range(self.cols):
                out[i, j] = _fp_eval(self.num[i][j], z) / d
        return out

    def num_scale(self) -> float:
        vals = [np.max(np.abs(e)) for r in self.num for e in r if e.size]
        return max(vals, default=0.0)

    def poles(self, tol: Tolerance = DEFAULT_TOL) -> list[complex]:
        """Denominator roots not cancelled by every numerator entry
        (first-order test; adequate at desk scale)."""
        if _fp_deg(self.den) < 1:
            return []
        rts = np.roots(_fp_trim(self.den)[::-1])
        scale = self.num_scale() + 1e-300
        out = []
        for z in rts:
            mx = max(abs(_fp_eval(self.num[i][j], z))
                     for i in range(self.rows) for j in range(self.cols)) \
                if self.rows and self.cols else 0.0
            if mx > 1e-7 * scale * max(1.0, abs(z)) ** _fp_deg(self.den):
                out.append(complex(z))
        return out

    def limit_at_infinity(self) -> np.ndarray:
        dd = _fp_deg(self.den)
        out = np.zeros((self.rows, self.cols))
        for i in range(self.rows):
            for j in range(self.cols):
                nd = _fp_deg(self.num[i][j])
                if nd > dd:
                    raise ValueError("rational matrix is improper")
                if nd == dd:
                    out[i, j] = _fp_trim(self.num[i][j])[-1] / _fp_trim(self.den)[-1]
        return out


def build_zx(ss: StateSpace, L: np.ndarray, W: np.ndarray) -> RationalMatrix:
    """Z(s) = W + L (sI - A)^-1 B over the exact characteristic polynomial."""
    q = L.shape[0]
    n = ss.n
    if ss.d == 0 or q == 0:
        den = _fp([1.0])
        num = _const_to_fp(W.reshape(q, n))
        return RationalMatrix.from_grid(num, den, q, n)
    si = si_matrix(ss.A_exact)
    den = _poly_to_fp(si.det())
    adj = _polymat_to_fp(si.adjugate())
    num = _fp_matmul(_fp_matmul(_const_to_fp(L), adj, q, ss.d, ss.d),
                     _const_to_fp(ss.B), q, ss.d, n)
    for i in range(q):
        for j in range(n):
            num[i][j] = _fp_trim(npp.polyadd(num[i][j], W[i, j] * den))
    return RationalMatrix.from_grid(num, den, q, n)


# -- spectral factorization -----------------------------------------------------


@dataclass(frozen=True)
class SpectralFactor:
    """Z with Z* Z = H, analytic in the open RHP, full row rank there."""
    Z: RationalMatrix
    r: int
    diagnostics: dict = field(default_factory=dict)


_AXIS_SAMPLES = (0.31, 0.77, 1.23, 1.91, 2.63, 3.47, 5.11)


def _scalar_spectral_factor(h: Poly, tol: Tolerance) -> np.ndarray:
    """Polynomial factor of a para-Hermitian scalar h with h(jw) >= 0:
    keep open-LHP roots with their multiplicity and half of each axis root."""
    zroots: list[complex] = []
    for factor, mult in squarefree_decomposition(h):
        rs = numeric_roots(factor, tol)
        for z, _, tag in rs.roots:
            if tag == AXIS:
                if mult % 2:
                    raise FactorizationError(
                        "not factorizable: fails PSD-on-axis premise "
                        "(odd-multiplicity axis root)")
                zroots.extend([z] * (mult // 2))
            elif tag != OPEN_RHP:
                zroots.extend([z] * mult)
    rdeg = len(zroots)
    if 2 * rdeg != h.degree:
        raise FactorizationError("axis/half-plane root split is inconsistent")
    mon = np.atleast_1d(np.poly(zroots))[::-1]  # low to high, monic
    if np.max(np.abs(mon.imag)) > 1e-9 * max(1.0, np.max(np.abs(mon.real))):
        raise FactorizationError("factor coefficients not real")
    gamma = float(h.leading) * (-1) ** rdeg
    if gamma <= 0:
        raise FactorizationError("leading sign inconsistent with axis PSD")
    return _fp_trim(np.sqrt(gamma) * mon.real)


def spectral_factor_poly(H: PolyMat, tol: Tolerance = DEFAULT_TOL
                         ) -> SpectralFactor:
    """Spectral factor of a para-Hermitian polynomial matrix.

    Supported sub-cases: scalar, and diagonal (entrywise scalar problems).
    The PSD-on-axis premise is decided exactly first.  General polynomial
    matrices raise UnsupportedFactorizationError.
    """
    if not (H.star() == H):
        raise ValueError("matrix is not para-Hermitian")
    ok, wstar = axis_psd(H, tol)
    if not ok:
        raise FactorizationError(
            f"not factorizable: fails PSD-on-axis premise at w = {float(wstar):g}")
    n = H.rows
    rows: list[tuple[int, np.ndarray]] = []
    if n == 1:
        if not H[0, 0].is_zero:
            rows.append((0, _scalar_spectral_factor(H[0, 0], tol)))
    else:
        off_diag_zero = all(H[i, j].is_zero for i in range(n) for j in range(n)
                            if i != j)
        if not off_diag_zero:
            raise UnsupportedFactorizationError(
                "unsupported: matrix spectral factorization beyond "
                "scalar/diagonal polynomial and state-space sub-cases")
        for j in range(n):
            if not H[j, j].is_zero:
                rows.append((j, _scalar_spectral_factor(H[j, j], tol)))
    r = len(rows)
    num = [[_fp([0.0]) for _ in range(n)] for _ in range(r)]
    for i, (j, z) in enumerate(rows):
        num[i][j] = z
    Z = RationalMatrix.from_grid(num, [1.0], r, n)
    diag = _spectral_diagnostics(Z, lambda w: H.eval_complex(1j * w), tol)
    if not diag["ok"]:
        raise FactorizationError(f"spectral factor failed re-verification: {diag}")
    return SpectralFactor(Z=Z, r=r, diagnostics=diag)


def _spectral_diagnostics(Z: RationalMatrix, H_on_axis, tol: Tolerance) -> dict:
    """Invariant checks: Z*Z = H on sampled axis points, analyticity in the
    open RHP, and full row rank in the open RHP (samples plus candidate
    rank-drop points from the numerator minors)."""
    res = 0.0
    scale = 0.0
    for w in _AXIS_SAMPLES:
        Hv = H_on_axis(w)
        Zv = Z.eval(1j * w)
        res = max(res, float(np.linalg.norm(Zv.conj().T @ Zv - Hv)))
        scale = max(scale, float(np.linalg.norm(Hv)))
    factor_ok = res <= 1e-8 * (1.0 + scale)
    rhp_poles = [z for z in Z.poles(tol)
                 if region_of(z, tol) == OPEN_RHP]
    analytic_ok = not rhp_poles
    rank_ok = True
    if Z.rows > 0:
        pts = [complex(0.5, 0.9), complex(1.7, -0.4), complex(3.1, 2.2)]
        pts += [z for z in _rank_drop_candidates(Z)
                if region_of(z, tol) == OPEN_RHP]
        for z in pts:
            sv = np.linalg.svd(Z.eval(z), compute_uv=False)
            if sv.size and sv[-1] <= 1e-9 * (1.0 + sv[0]):
                rank_ok = False
    return {"ok": bool(factor_ok and analytic_ok and rank_ok),
            "factor_residual": res, "rhp_poles": tuple(map(complex, rhp_poles)),
            "full_rank_rhp": bool(rank_ok)}


def _rank_drop_candidates(Z: RationalMatrix) -> list[complex]:
    """Common roots of the full-size minors of the numerator matrix."""
    r, n = Z.rows, Z.cols
    if r == 0 or r > n:
        return []
    minors = []
    for cols in itertools.combinations(range(n), r):
        sub = [[Z.num[i][j] for j in cols] for i in range(r)]
        d = _fp_trim(_fp_det(sub))
        if _fp_deg(d) >= 0 and np.any(d != 0):
            minors.append(d)
    if not minors:
        return []
    first = min(minors, key=_fp_deg)
    if _fp_deg(first) < 1:
        return []
    cands = np.roots(first[::-1])
    out = []
    for z in cands:
        if all(abs(_fp_eval(m, z)) <= 1e-6 * (1.0 + np.max(np.abs(m)))
               * max(1.0, abs(z)) ** _fp_deg(m) for m in minors):
            out.append(complex(z))
    return out


# -- algebraic Riccati equation ---------------------------------------------------


@dataclass(frozen=True)
class AREResult:
    X: np.ndarray
    closed_loop_spec: tuple[complex, ...]
    stabilizing: bool
    residual: float


def _pi_residual(ss: StateSpace, X: np.ndarray, Rinv: np.ndarray) -> np.ndarray:
    A, B, C = ss.A, ss.B, ss.C
    return (-A.T @ X - X @ A
            - (C.T - X @ B) @ Rinv @ (C - B.T @ X))


def are_solve(ss: StateSpace, tol: Tolerance = DEFAULT_TOL) -> AREResult:
    """Solve Pi(X) = 0 by the invariant-subspace method on the Hamiltonian

        H = [[-Ahat, -S], [Qbar, Ahat^T]],   Ahat = A - B R^-1 C,
        S = B R^-1 B^T,  Qbar = C^T R^-1 C,  R = D + D^T > 0.

    For X with Pi(X) = 0, H [I; X] = [I; X] (-(Ahat + S X)), so the subspace
    spanned by eigenvectors with Re > 0 yields the solution whose closed loop
    A + B R^-1 (B^T X - C) = Ahat + S X has spectrum in the closed LHP.
    Axis eigenvalues of H obstruct the ordering; a damped Newton iteration
    on Pi takes over in that case.
    """
    d, n = ss.d, ss.n
    R = ss.D + ss.D.T
    w = np.linalg.eigvalsh(R)
    if w[0] <= tol.psd_tol * (1.0 + np.linalg.norm(R)):
        raise ValueError("D + D^T is not positive definite")
    Rinv = np.linalg.inv(R)
    if d == 0:
        return AREResult(np.zeros((0, 0)), (), True, 0.0)
    Ahat = ss.A - ss.B @ Rinv @ ss.C
    S = ss.B @ Rinv @ ss.B.T
    Qbar = ss.C.T @ Rinv @ ss.C
    H = np.block([[-Ahat, -S], [Qbar, Ahat.T]])
    lams = np.linalg.eigvals(H)
    near_axis = any(abs(z.real) <= 10 * tol.axis_band * (1.0 + abs(z))
                    for z in lams)
    X = None
    if not near_axis:
        idx = [k for k, z in enumerate(lams) if z.real > 0]
        if len(idx) == d:
            _, V = np.linalg.eig(H)
            V1 = V[:d, idx]
            V2 = V[d:, idx]
            if np.linalg.cond(V1) < 1e12:
                X = np.real(V2 @ np.linalg.inv(V1))
                X = (X + X.T) / 2.0
    if X is None or np.linalg.norm(_pi_residual(ss, X, Rinv)) > 1e-8:
        X = _newton_care(ss, Rinv, X0=X if X is not None else np.zeros((d, d)))
    res = float(np.linalg.norm(_pi_residual(ss, X, Rinv)))
    if res > max(1e-10, tol.residual_tol):
        raise AREInfeasibleError(f"condition 5 infeasible (residual {res:.3e})")
    weig = np.linalg.eigvalsh((X + X.T) / 2.0)
    if weig[0] < tol.psd_floor(np.linalg.norm(X)):
        raise AREInfeasibleError("condition 5 infeasible (no PSD solution found)")
    closed = ss.A + ss.B @ Rinv @ (ss.B.T @ X - ss.C)
    spec = tuple(sorted(map(complex, np.linalg.eigvals(closed)),
                        key=lambda z: (z.real, z.imag)))
    stab = all(z.real <= tol.axis_band * (1.0 + abs(z)) for z in spec)
    return AREResult(X=X, closed_loop_spec=spec, stabilizing=stab, residual=res)


def _newton_care(ss: StateSpace, Rinv: np.ndarray, X0: np.ndarray,
                 max_iter: int = 200) -> np.ndarray:
    """Damped Newton on the symmetric parametrization of Pi(X) = 0."""
    d = ss.d
    pairs = [(i, j) for i in range(d) for j in range(i, d)]

    def unpack(x):
        X = np.zeros((d, d))
        for v, (i, j) in zip(x, pairs):
            X[i, j] = v
            X[j, i] = v
        return X

    def func(x):
        P = _pi_residual(ss, unpack(x), Rinv)
        return np.array([P[i, j] for (i, j) in pairs])

    x = np.array([X0[i, j] for (i, j) in pairs])
    f = func(x)
    for _ in range(max_iter):
        nf = np.linalg.norm(f)
        if nf < 1e-13:
            break
        J = np.zeros((len(pairs), len(pairs)))
        h = 1e-7 * (1.0 + np.linalg.norm(x))
        for k in range(len(pairs)):
            xp = x.copy()
            xp[k] += h
            J[:, k] = (func(xp) - f) / h
        step, *_ = np.linalg.lstsq(J, -f, rcond=None)
        alpha = 1.0
        while alpha > 1e-6:
            xn = x + alpha * step
            fn = func(xn)
            if np.linalg.norm(fn) < nf:
                x, f = xn, fn
                break
            alpha /= 2.0
        else:
            break
    return unpack(x)


def spectral_factor_from_ss(ss: StateSpace, tol: Tolerance = DEFAULT_TOL
                            ) -> tuple[SpectralFactor, AREResult]:
    """Spectral factor of G + G* from a realization with D + D^T > 0, via the
    Riccati route: W^T W = D + D^T, L = (W^T)^-1 (C - B^T X)."""
    are = are_solve(ss, tol)
    R = ss.D + ss.D.T
    W = np.linalg.cholesky(R).T
    L = np.linalg.solve(W.T, ss.C - ss.B.T @ are.X) if ss.d else np.zeros((ss.n, 0))
    Z = build_zx(ss, L, W)

    def h_on_axis(w: float) -> np.ndarray:
        G = ss.transfer_at(1j * w)
        return G + G.conj().T

    diag = _spectral_diagnostics(Z, h_on_axis, tol)
    if not diag["ok"]:
        raise FactorizationError(f"spectral factor failed re-verification: {diag}")
    return SpectralFactor(Z=Z, r=ss.n, diagnostics=diag), are


# -- certificate verification ---------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    X: np.ndarray
    L: np.ndarray
    W: np.ndarray
    residuals: dict
    psd_margin: float
    Z: RationalMatrix | None = None
    spectral: dict | None = None


def verify_certificate(ss: StateSpace, X, L, W, tol: Tolerance = DEFAULT_TOL,
                       check_spectral: bool = True) -> Certificate:
    """Check the four defining equations (and optionally the spectral-factor
    property of Z = W + L (sI-A)^-1 B); raises on any violated equation."""
    X = np.atleast_2d(np.asarray(X, dtype=float)).reshape(ss.d, ss.d)
    L = np.atleast_2d(np.asarray(L, dtype=float))
    W = np.atleast_2d(np.asarray(W, dtype=float))
    if L.size == 0 and W.size == 0:
        q = max(L.shape[0], W.shape[0]) if (ss.d or ss.n) else 0
        q = q if (L.shape[0] or W.shape[0]) else 0
    elif L.size == 0:
        q = W.shape[0]
    else:
        q = L.shape[0]
    L = L.reshape(q, ss.d) if L.size else np.zeros((q, ss.d))
    W = W.reshape(q, ss.n) if W.size else np.zeros((q, ss.n))
    A, B, C, D = ss.A, ss.B, ss.C, ss.D
    nrm = lambda M: float(np.linalg.norm(M))
    residuals = {
        "symmetry": nrm(X - X.T) / (1.0 + nrm(X)),
        "lyapunov": nrm(-A.T @ X - X @ A - L.T @ L)
                    / (1.0 + nrm(A) * nrm(X) + nrm(L) ** 2),
        "cross": nrm(C - B.T @ X - W.T @ L) / (1.0 + nrm(C)),
        "feedthrough": nrm(D + D.T - W.T @ W) / (1.0 + nrm(D)),
    }
    bad = [k for k, v in residuals.items() if v > tol.residual_tol]
    if bad:
        raise CertificateVerificationError(
            f"certificate equations violated: {', '.join(bad)} "
            f"(residuals {({k: residuals[k] for k in bad})})")
    Xs = (X + X.T) / 2.0
    margin = float(np.linalg.eigvalsh(Xs)[0]) if ss.d else 0.0
    if margin < tol.psd_floor(nrm(X)):
        raise CertificateVerificationError(
            f"certificate violated: X not PSD (min eigenvalue {margin:.3e})")
    Z = None
    spectral = None
    if check_spectral:
        Z = build_zx(ss, L, W)

        def h_on_axis(w: float) -> np.ndarray:
            G = ss.transfer_at(1j * w)
            return G + G.conj().T

        spectral = _spectral_diagnostics(Z, h_on_axis, tol)
    return Certificate(X=Xs, L=L, W=W, residuals=residuals, psd_margin=margin,
                       Z=Z, spectral=spectral)


# -- the eigenstructure linear system for L ----------------------------------------


def _taylor_coeffs_fp(c: np.ndarray, lam: complex, depth: int) -> list[complex]:
    out = []
    fac = 1.0
    cur = _fp(c)
    for j in range(depth):
        out.append(_fp_eval(cur, lam) / fac)
        cur = npp.polyder(cur)
        fac *= (j + 1)
    return out


def _jordan_chains(As: np.ndarray, tol: Tolerance
                   ) -> list[tuple[complex, list[np.ndarray]]]:
    """Numeric Jordan chains (lam, [v1, v2, ...]) with (As - lam) v1 = 0 and
    (As - lam) v_{k+1} = v_k, matching the (sI - A) orientation of the
    eigenstructure equations.  Rank decisions use an SVD cutoff; inherently
    tolerance-dependent, which is why this path sits behind a flag."""
    d = As.shape[0]
    lams = np.linalg.eigvals(As)
    scale = 1.0 + max(abs(lams), default=0.0)
    clusters: list[tuple[complex, int]] = []
    used = [False] * d
    for i in range(d):
        if used[i]:
            continue
        group = [i]
        used[i] = True
        for j in range(i + 1, d):
            if not used[j] and abs(lams[i] - lams[j]) < 1e-6 * scale:
                group.append(j)
                used[j] = True
        clusters.append((complex(np.mean([lams[g] for g in group])), len(group)))
    chains = []
    for lam, mult in clusters:
        Ashift = As - lam * np.eye(d)
        U, sv, Vh = np.linalg.svd(Ashift)
        ker_dim = int(np.sum(sv <= 1e-8 * scale))
        kernel = Vh[d - ker_dim:].conj().T if ker_dim else np.zeros((d, 0))
        per_chain = [1] * ker_dim
        # distribute the remaining multiplicity by extending chains greedily
        remaining = mult - ker_dim
        for c in range(ker_dim):
            chain = [kernel[:, c]]
            while remaining > 0:
                nxt, res, *_ = np.linalg.lstsq(Ashift, chain[-1], rcond=None)
                if np.linalg.norm(Ashift @ nxt - chain[-1]) > 1e-6 * scale:
                    break
                chain.append(nxt)
                remaining -= 1
            chains.append((lam, chain))
        if ker_dim == 0:
            raise StableStageError("eigenvalue cluster with empty kernel")
    return chains


def remark61_solve(K: RationalMatrix | list, M: PolyMat, As: np.ndarray,
                   Cs: np.ndarray, tol: Tolerance = DEFAULT_TOL,
                   jordan: bool = False) -> np.ndarray:
    """Solve for the constant L in  K*(s) L + J(s)(sI - As) = M*(s) Cs.

    Evaluating at each eigenvalue lam of As with eigenvector v kills the J
    term:  K*(lam) L v = M*(lam) Cs v.  With Jordan chains (behind `jordan`)
    the Taylor coefficients of K* and M* at lam enter up to the chain depth.
    The stacked real system is solved by least squares and the residual must
    vanish within tolerance, otherwise no L exists and the stable stage of
    the construction fails.
    """
    if isinstance(K, RationalMatrix):
        Kgrid = [list(row) for row in K.num]
        r, n = K.rows, K.cols
    else:
        Kgrid = K
        r = len(Kgrid)
        n = len(Kgrid[0]) if r else M.rows
    ds = As.shape[0] if As.size else 0
    if r == 0 or ds == 0:
        return np.zeros((r, ds))
    Cs = np.asarray(Cs, dtype=float).reshape(n, ds)
    Mstar = M.star()
    # K*(s) = K(-s)^T: entry (j, i) is K[i][j] with odd coefficients negated
    Kstar = [[_fp_star(Kgrid[i][j]) for i in range(r)] for j in range(n)]
    Mstar_fp = _polymat_to_fp(Mstar)

    rows_re: list[np.ndarray] = []
    rhs_re: list[np.ndarray] = []

    def add_equations(lam: complex, chain: list[np.ndarray]):
        depth = len(chain)
        Ks_taylor = [[_taylor_coeffs_fp(Kstar[j][i], lam, depth)
                      for i in range(r)] for j in range(n)]
        Ms_taylor = [[_taylor_coeffs_fp(Mstar_fp[j][i], lam, depth)
                      for i in range(n)] for j in range(n)]
        for k in range(1, depth + 1):
            lhs = np.zeros((n, r * ds), dtype=complex)
            rhs = np.zeros(n, dtype=complex)
            for j in range(k):
                v = chain[k - j - 1]
                Kj = np.array([[Ks_taylor[a][b][j] for b in range(r)]
                               for a in range(n)])
                Mj = np.array([[Ms_taylor[a][b][j] for b in range(n)]
                               for a in range(n)])
                lhs += np.kron(v.reshape(1, ds), Kj)
                rhs += Mj @ (Cs @ v)
            rows_re.append(np.vstack([lhs.real, lhs.imag]))
            rhs_re.append(np.concatenate([rhs.real, rhs.imag]))

    if jordan:
        for lam, chain in _jordan_chains(As, tol):
            add_equations(lam, chain)
    else:
        lams, V = np.linalg.eig(As)
        if np.linalg.matrix_rank(V, tol=1e-8) < ds:
            raise DefectiveSpectrumError(
                "defective spectrum of the stable block; rerun with the "
                "Jordan-chain option")
        for i in range(ds):
            add_equations(complex(lams[i]), [V[:, i]])

    Amat = np.vstack(rows_re)
    bvec = np.concatenate(rhs_re)
    sol, *_ = np.linalg.lstsq(Amat, bvec, rcond=None)
    resid = float(np.linalg.norm(Amat @ sol - bvec))
    scale = 1.0 + float(np.linalg.norm(bvec))
    if resid > tol.residual_tol * scale:
        raise StableStageError(
            f"no L exists (certificate construction fails at stable stage; "
            f"residual {resid:.3e})")
    return sol.reshape((r, ds), order="F")


# -- the construction pipeline -----------------------------------------------------


@dataclass(frozen=True)
class CertifyResult:
    status: str  # certified | not-passive | inconclusive | unsupported | discrepancy
    certificate: Certificate | None = None
    verdict: PRPairVerdict | None = None
    message: str = ""


def certificate_status_exit(status: str) -> int:
    """CLI exit-code mapping: success 0, refuted 1, undecidable here 3."""
    return {"certified": 0, "not-passive": 1,
            "inconclusive": 3, "unsupported": 3, "discrepancy": 3}[status]


def construct_certificate(ss: StateSpace, tol: Tolerance = DEFAULT_TOL,
                          jordan: bool = False) -> CertifyResult:
    """Build a Lur'e triple for (A, B, C, D), or report why none exists.

    Pipeline: positive-real gate on the external behavior pair; observer
    staircase; stable/unstable split of the observable block; lossless
    Lyapunov solve for the axis block; spectral factor K of M*N + N*M on the
    controllable image pair; L from the eigenstructure system; stable
    Lyapunov solve; W = lim K M^-1; assembly and a mandatory verify pass.
    """
    from .statespace import realize_behavior

    P, Q = realize_behavior(ss)
    verdict = check_pair(P, Q, tol)
    if verdict.overall != PASS:
        status = "not-passive" if verdict.overall == "fail" else INCONCLUSIVE
        return CertifyResult(status=status, verdict=verdict,
                             message="external behavior pair is not positive real"
                             if status == "not-passive" else
                             "positive-real check inconclusive at tolerance")
    st = staircase(ss)
    try:
        split = stable_unstable_split(st.A11, tol)
    except SpectralSplitError as e:
        return CertifyResult(status=INCONCLUSIVE, verdict=verdict, message=str(e))
    ds = split.As.shape[0]
    TB = split.T @ st.B1
    CT = st.C1 @ split.Tinv
    Bs, Bu = TB[:ds], TB[ds:]
    Cs, Cu = CT[:, :ds], CT[:, ds:]
    try:
        Xu = lossless_lyap_solve(split.Au, Bu, Cu, tol)
    except LosslessInfeasibleError as e:
        return CertifyResult(status="discrepancy", verdict=verdict,
                             message=f"positive-real check passed but the "
                                     f"lossless stage failed: {e}")
    dec = decompose(P, Q)
    Phi = dec.M.star() @ dec.N + dec.N.star() @ dec.M
    try:
        sf = spectral_factor_poly(Phi, tol)
    except UnsupportedFactorizationError as e:
        return CertifyResult(status="unsupported", verdict=verdict, message=str(e))
    except FactorizationError as e:
        return CertifyResult(status="discrepancy", verdict=verdict,
                             message=f"positive-real check passed but the "
                                     f"density failed to factor: {e}")
    try:
        L = remark61_solve(sf.Z, dec.M, split.As, Cs, tol, jordan=jordan)
    except DefectiveSpectrumError as e:
        return CertifyResult(status=INCONCLUSIVE, verdict=verdict, message=str(e))
    except StableStageError as e:
        return CertifyResult(status="discrepancy", verdict=verdict, message=str(e))
    try:
        Xs = lyapunov_solve(split.As, L.T @ L, tol) if ds else np.zeros((0, 0))
    except LyapunovError as e:
        return CertifyResult(status="discrepancy", verdict=verdict, message=str(e))
    try:
        W = _limit_KMinv(sf.Z, dec.M)
    except ValueError as e:
        return CertifyResult(status="discrepancy", verdict=verdict, message=str(e))

    d, d1 = ss.d, st.d1
    That = np.zeros((d, d))
    That[:d1, :d1] = split.T
    That[d1:, d1:] = np.eye(d - d1)
    That = That @ st.T
    Xhat = np.zeros((d, d))
    Xhat[:ds, :ds] = Xs
    Xhat[ds:d1, ds:d1] = Xu
    Lhat = np.zeros((sf.r, d))
    Lhat[:, :ds] = L
    X = That.T @ Xhat @ That
    LX = Lhat @ That
    try:
        cert = verify_certificate(ss, X, LX, W, tol, check_spectral=True)
    except CertificateVerificationError as e:
        return CertifyResult(status="discrepancy", verdict=verdict,
                             message=f"construction completed but verification "
                                     f"failed: {e}")
    if cert.spectral is not None and not cert.spectral["ok"]:
        return CertifyResult(status="discrepancy", verdict=verdict,
                             message=f"constructed Z is not a spectral factor: "
                                     f"{cert.spectral}")
    return CertifyResult(status="certified", certificate=cert, verdict=verdict)


def _limit_KMinv(K: RationalMatrix, M: PolyMat) -> np.ndarray:
    """W = lim_{s->inf} K(s) M(s)^-1, exactly proper by construction."""
    r = K.rows
    n = M.rows
    den = _poly_to_fp(M.det())
    adj = _polymat_to_fp(M.adjugate())
    num = _fp_matmul([list(row) for row in K.num], adj, r, n, n)
    Z = RationalMatrix.from_grid(num, den, r, n)
    return Z.limit_at_infinity()
