"""Behavior-level constructions for P(d/dt) i = Q(d/dt) v.

`decompose` splits the behavior into a controllable part (image of the
operator pair (M, N)) and an autonomous part (driven by the kernel of F),
producing nine polynomial matrices tied together by two exact identities:

    P = F Ptil,  Q = F Qtil                                     (factor)
    [[Ptil, -Qtil], [U, V]] @ [[X, M], [Y, N]] = I = (swapped)  (inverse)

Both identities are verified exactly before a Decomposition is returned;
the matrices themselves are unique only up to unimodular freedom.

`passive_partition` selects, for a positive-real pair, which external
variable of each port acts as an input so that the re-arranged pair is a
proper input-output system with the same power product.  The selection
follows the max-degree term in the column expansion of det(P + Q).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .numeric import DEFAULT_TOL, Tolerance
from .poly import NEG_INF, Poly
from .polymatrix import (PolyMat, column_echelon, delta, divisible_on_right,
                         normalrank, syzygy_basis)
from .prpair import PASS, PRPairVerdict, check_pair


class DecompositionError(Exception):
    """The pair has deficient normalrank; no controllable/autonomous split."""


class NotPositiveRealError(Exception):
    """Operation requires a positive-real pair and the check failed."""


@dataclass(frozen=True)
class Decomposition:
    F: PolyMat
    Ptil: PolyMat
    Qtil: PolyMat
    M: PolyMat
    N: PolyMat
    U: PolyMat
    V: PolyMat
    X: PolyMat
    Y: PolyMat

    def __post_init__(self):
        n = self.F.rows
        eye2n = PolyMat.identity(2 * n)
        What = PolyMat.block([[self.Ptil, -self.Qtil], [self.U, self.V]])
        W = PolyMat.block([[self.X, self.M], [self.Y, self.N]])
        if not (What @ W == eye2n and W @ What == eye2n):
            raise AssertionError("double inverse identity violated")

    def factor_identity_holds(self, P: PolyMat, Q: PolyMat) -> bool:
        return (self.F @ self.Ptil == P) and (self.F @ self.Qtil == Q)


def decompose(P: PolyMat, Q: PolyMat) -> Decomposition:
    """Controllable/autonomous decomposition via a lower column echelon form
    of [P -Q].  When P and Q are already left coprime, F is normalised to I."""
    n = P.rows
    if not (P.is_square and Q.is_square and Q.rows == n):
        raise ValueError("P and Q must be square of the same size")
    PQ = P.hstack(-Q)
    if normalrank(PQ) < n:
        raise DecompositionError("normalrank deficient")
    res = column_echelon(PQ)  # PQ @ W == [F 0]
    W, What, F = res.U, res.Uinv, res.E
    idx_top = range(n)
    idx_bot = range(n, 2 * n)
    X = W.submatrix(idx_top, idx_top)
    M = W.submatrix(idx_top, idx_bot)
    Y = W.submatrix(idx_bot, idx_top)
    N = W.submatrix(idx_bot, idx_bot)
    Ptil = What.submatrix(idx_top, idx_top)
    Qtil = -What.submatrix(idx_top, idx_bot)
    U = What.submatrix(idx_bot, idx_top)
    V = What.submatrix(idx_bot, idx_bot)

    detF = F.det()
    if detF.degree == 0:
        # coprime pair: absorb the unimodular F into (Ptil, Qtil)
        Finv = F.adjugate() * (1 / detF.coeffs[0])
        X, Y = X @ Finv, Y @ Finv
        Ptil, Qtil = P, Q
        F = PolyMat.identity(n)

    dec = Decomposition(F=F, Ptil=Ptil, Qtil=Qtil, M=M, N=N, U=U, V=V, X=X, Y=Y)
    if not dec.factor_identity_holds(P, Q):
        raise AssertionError("factor identity P = F Ptil, Q = F Qtil violated")
    return dec


def image_representation(dec: Decomposition) -> tuple[PolyMat, PolyMat]:
    """The (M, N) pair with i = M(d/dt) w, v = N(d/dt) w spanning the
    controllable part; consistency Ptil M == Qtil N is re-verified."""
    if not (dec.Ptil @ dec.M == dec.Qtil @ dec.N):
        raise AssertionError("image representation inconsistent with the pair")
    return dec.M, dec.N


def coupling_condition_direct(dec: Decomposition) -> bool:
    """Divisibility form of the coupling condition on the decomposition:
    every syzygy row b* of M*N + N*M must give b*(M*Y + N*X) divisible on
    the right by F.  Equivalent to the syzygy test in `prpair` (their
    agreement is a property exercised by the test suite)."""
    Psi = dec.M.star() @ dec.N + dec.N.star() @ dec.M
    if normalrank(Psi) == Psi.rows:
        return True
    Vb = syzygy_basis(Psi)
    target = Vb @ (dec.M.star() @ dec.Y + dec.N.star() @ dec.X)
    ok, _ = divisible_on_right(target, dec.F)
    return ok


# -- passive input-output partition ------------------------------------------


@dataclass(frozen=True)
class Partition:
    """Permutation-derived selectors and the re-arranged proper pair.

    T1 picks the ports driven by their i-variable (input current), T2 the
    ports driven by their v-variable; u = col(T1 i, T2 v), y = col(T1 v, T2 i).
    """
    T1: PolyMat
    T2: PolyMat
    S1: PolyMat
    S2_doubled: PolyMat  # 2*S2 = [[I, I], [-I, I]], kept integral
    Pio: PolyMat
    Qio: PolyMat

    @property
    def input_ports_current(self) -> tuple[int, ...]:
        """Port indices whose current enters the input vector."""
        return tuple(j for j in range(self.T1.cols)
                     if any(self.T1[i, j] == Poly.one()
                            for i in range(self.T1.rows)))


def passive_partition(P: PolyMat, Q: PolyMat, tol: Tolerance = DEFAULT_TOL,
                      verdict: PRPairVerdict | None = None) -> Partition:
    """Select input/output roles per port so the pair becomes proper.

    det(P+Q) expands by column multilinearity into 2^n determinants, each
    choosing column j from P or from Q; a maximal-degree term dictates the
    selection (T1 = ports whose column came from Q).  Ties break to the
    lexicographically smallest choice bitmask (bit j = column j from P).
    """
    n = P.rows
    if verdict is None:
        verdict = check_pair(P, Q, tol)
    if verdict.overall != PASS:
        raise NotPositiveRealError("not a positive-real pair")

    best_deg = NEG_INF
    best_mask: tuple[int, ...] | None = None
    for mask in itertools.product((0, 1), repeat=n):
        cols = [[P[i, j] if mask[j] else Q[i, j] for j in range(n)]
                for i in range(n)]
        d = PolyMat(cols).det().degree
        if d > best_deg:
            best_deg = d
            best_mask = mask
    if best_mask is None or best_deg == NEG_INF:
        raise NotPositiveRealError("det(P+Q) vanishes identically")

    from_q = [j for j in range(n) if best_mask[j] == 0]
    from_p = [j for j in range(n) if best_mask[j] == 1]
    T1 = _selector(from_q, n)
    T2 = _selector(from_p, n)

    Pio = (P @ T1.T).hstack(-(Q @ T2.T))
    Qio = (Q @ T1.T).hstack(-(P @ T2.T))

    k, kp = len(from_q), len(from_p)
    S1 = PolyMat.block([
        [T1.T, PolyMat.zeros(n, kp), PolyMat.zeros(n, k), T2.T],
        [PolyMat.zeros(n, k), T2.T, T1.T, PolyMat.zeros(n, kp)],
    ])

    eyen = PolyMat.identity(n)
    S2d = PolyMat.block([[eyen, eyen], [-eyen, eyen]])

    part = Partition(T1=T1, T2=T2, S1=S1, S2_doubled=S2d, Pio=Pio, Qio=Qio)
    _verify_partition(P, Q, part)
    return part


def _selector(idx: list[int], n: int) -> PolyMat:
    return PolyMat([[Poly.one() if j == k else Poly.zero() for k in range(n)]
                    for j in idx], cols=n)


def _verify_partition(P: PolyMat, Q: PolyMat, part: Partition):
    n = P.rows
    eyen = PolyMat.identity(n)
    if not (part.T1.T @ part.T1 + part.T2.T @ part.T2 == eyen):
        raise AssertionError("T1'T1 + T2'T2 != I")
    if not (part.S1 @ part.S1.T == PolyMat.identity(2 * n)):
        raise AssertionError("S1 S1' != I")
    s2 = part.S2_doubled
    if not (s2 @ s2.T == 2 * PolyMat.identity(2 * n)):
        raise AssertionError("2 S2 S2' != I (doubled form)")
    if not (part.Pio.hstack(-part.Qio) == P.hstack(-Q) @ part.S1):
        raise AssertionError("[Pio -Qio] != [P -Q] S1")
    dq = part.Qio.det()
    if dq.is_zero:
        raise AssertionError("partitioned Q is singular")
    if delta(part.Pio.hstack(-part.Qio)) != dq.degree:
        raise AssertionError("partitioned pair is not proper")


def behavior_is_passive(P: PolyMat, Q: PolyMat, tol: Tolerance = DEFAULT_TOL
                        ) -> tuple[PRPairVerdict, Partition | None]:
    """Overall passivity verdict; on pass, also the passive partition."""
    verdict = check_pair(P, Q, tol)
    if verdict.overall != PASS:
        return verdict, None
    return verdict, passive_partition(P, Q, tol, verdict=verdict)
