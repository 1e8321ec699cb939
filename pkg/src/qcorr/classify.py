"""Decision procedures for quantum-correlation creation.

A trace-preserving channel acting locally on B can turn some classical-on-B
state into a quantumly correlated one exactly when it fails to preserve
commutativity, i.e. when some orthogonal pure pair (phi, psi) has
non-commuting outputs.  This module provides:

* a multistart search maximizing the output commutator defect over pairs
  (violations found are constructive proofs; a pass is "no violation found
  within budget"),
* witness construction: the offending pair embedded in a two-term
  classical-on-B state whose image fails the classicality test,
* structure detectors (unital, completely decohering, isotropic) and the
  dimension-specific classifiers built from them,
* the maximal entangled-fraction optimizer and the fidelity
  non-improvement check for unital channels,
* a census scan that flags channels breaking the expected equivalence
  between commutativity preservation and the known channel families.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import channels as chn
from . import kernels, linalg
from .optimize import DEFAULT_BUDGET, DEFAULT_STARTS, maximize_unitary_objective
from .sampling import (
    random_block_unitary_mixture,
    random_completely_decohering,
    random_cptp,
    random_isotropic,
    random_ket,
    random_unital_mixture,
    substream,
)
from .states import (
    BipartiteState,
    DensityMatrix,
    check_ket,
    is_classical_on_b,
    make_half_classical,
)

CP_TOL = 1e-7
DETECTOR_TOL = 1e-9
WITNESS_CONFIRM_FACTOR = 10.0
ORTHO_ATOL = 1e-9

LABEL_CD = "completely_decohering"
LABEL_UNITAL = "unital_mixing"
LABEL_ISOTROPIC = "isotropic"
LABEL_CREATOR = "creator"
LABEL_UNKNOWN = "unclassified"


# ---------------------------------------------------------------------------
# Commutativity preservation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CPVerdict:
    """Result of the commutativity-preservation search.

    preserving means no violation above tol was found within the budget; a
    False verdict carries the offending orthogonal pair.  max_violation is
    recomputed directly from the pair (not read off the optimizer), so the
    witness survives independent checking.
    """

    preserving: bool
    max_violation: float
    witness_pair: tuple[np.ndarray, np.ndarray] | None
    tol: float
    evals: int
    budget: int


def pair_from_coords(theta: np.ndarray, u0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """The orthogonal pure pair parameterized by multistart coordinates."""
    d = u0.shape[0]
    w = u0 @ kernels.expi_hermitian(kernels.unpack_hermitian(np.asarray(theta, float), d))
    return np.asarray(w)[:, 0].copy(), np.asarray(w)[:, 1].copy()


def pair_violation_direct(channel: chn.KrausChannel, phi: np.ndarray, psi: np.ndarray) -> float:
    """Normalized ||[L(phi phi^dag), L(psi psi^dag)]||_F via the dense path.

    Independent re-evaluation used to confirm optimizer results.
    """
    a = channel.apply_matrix(np.outer(phi, np.conj(phi)))
    b = channel.apply_matrix(np.outer(psi, np.conj(psi)))
    return linalg.frobenius(linalg.commutator(a, b)) / (linalg.frobenius(a) * linalg.frobenius(b))


def is_commutativity_preserving(
    channel: chn.KrausChannel,
    *,
    budget: int = DEFAULT_BUDGET,
    tol: float = CP_TOL,
    rng: np.random.Generator,
    starts: int = DEFAULT_STARTS,
    early_stop: float | None = None,
) -> CPVerdict:
    """Search for an orthogonal pure pair with non-commuting channel outputs.

    Pairs are the first two columns of u0 exp(iH), H Hermitian with d^2 real
    coordinates.  The verdict is one-sided: a violation is a proof, a pass
    only says none was found within the evaluation budget.
    """
    d = channel.dim
    if d < 2:
        return CPVerdict(True, 0.0, None, tol, 0, budget)
    if early_stop is None:
        early_stop = max(100 * tol, 1e-3)

    ops = channel.ops

    def objective(theta: np.ndarray, u0: np.ndarray) -> float:
        return kernels.pair_violation(theta, u0, ops)

    res = maximize_unitary_objective(
        objective, d, rng=rng, budget=budget, starts=starts, early_stop=early_stop
    )
    phi, psi = pair_from_coords(res.theta, res.u0)
    violation = pair_violation_direct(channel, phi, psi)
    preserving = violation <= tol
    return CPVerdict(
        preserving=preserving,
        max_violation=violation,
        witness_pair=None if preserving else (phi, psi),
        tol=tol,
        evals=res.evals,
        budget=budget,
    )


# ---------------------------------------------------------------------------
# Creation witnesses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CreationWitness:
    """A classical-on-B input whose image under I (x) L is not classical on B.

    The input is (|0><0|_A (x) phi + |1><1|_A (x) psi)/2 built from the
    offending orthogonal pair; output_quantumness equals the pair's
    normalized output commutator defect.  confirmed marks witnesses that
    clear ten times the decision tolerance.
    """

    pair: tuple[np.ndarray, np.ndarray]
    input_state: BipartiteState
    output_state: BipartiteState
    input_quantumness: float
    output_quantumness: float
    confirmed: bool


def witness_from_pair(
    channel: chn.KrausChannel,
    phi: np.ndarray,
    psi: np.ndarray,
    *,
    tol: float = CP_TOL,
) -> CreationWitness:
    """Build and check the two-term witness state for a given orthogonal pair."""
    phi = check_ket(phi)
    psi = check_ket(psi)
    if abs(np.vdot(phi, psi)) > ORTHO_ATOL:
        raise ValueError("witness pair must be orthogonal")
    e0 = np.zeros(2)
    e0[0] = 1
    e1 = np.zeros(2)
    e1[1] = 1
    state = make_half_classical(
        [0.5, 0.5],
        [DensityMatrix.pure(e0), DensityMatrix.pure(e1)],
        np.column_stack([phi, psi]),
    )
    out = channel.apply_local_b(state)
    in_rep = is_classical_on_b(state)
    out_rep = is_classical_on_b(out)
    return CreationWitness(
        pair=(phi, psi),
        input_state=state,
        output_state=out,
        input_quantumness=in_rep.quantumness,
        output_quantumness=out_rep.quantumness,
        confirmed=out_rep.quantumness > WITNESS_CONFIRM_FACTOR * tol,
    )


def creation_witness(
    channel: chn.KrausChannel,
    *,
    budget: int = DEFAULT_BUDGET,
    tol: float = CP_TOL,
    rng: np.random.Generator,
    starts: int = DEFAULT_STARTS,
) -> CreationWitness | None:
    """Search for a creation witness; absent when the channel looks preserving."""
    verdict = is_commutativity_preserving(
        channel, budget=budget, tol=tol, rng=rng, starts=starts
    )
    if verdict.preserving:
        return None
    assert verdict.witness_pair is not None
    return witness_from_pair(channel, *verdict.witness_pair, tol=tol)


def block_overlap(phi: np.ndarray, psi: np.ndarray) -> complex:
    """<phi_r|psi_r> of the components inside the first d-1 levels."""
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if phi.shape != psi.shape:
        raise ValueError("vectors must have equal dimension")
    return complex(np.vdot(phi[:-1], psi[:-1]))


def block_overlap_enables_creation(
    phi: np.ndarray, psi: np.ndarray, tol: float = ORTHO_ATOL
) -> bool:
    """Can a generic block-unitary mixture create correlation from this pair?

    For the channel family fixing the top level and mixing unitaries on the
    rest, outputs on an orthogonal pair fail to commute for generic block
    choices iff the reduced vectors are neither orthogonal nor proportional:
    g = <phi_r|psi_r> must satisfy g != 0 and |g| != ||phi_r|| ||psi_r||
    (Cauchy-Schwarz equality is exactly proportionality; reduced vectors of
    an orthogonal unit pair can never both saturate norm one, so the
    proportional case is the honest reading of "overlap one").
    """
    phi = check_ket(phi)
    psi = check_ket(psi)
    if abs(np.vdot(phi, psi)) > ORTHO_ATOL:
        raise ValueError("pair must be orthogonal")
    g = abs(block_overlap(phi, psi))
    prod = float(np.linalg.norm(phi[:-1]) * np.linalg.norm(psi[:-1]))
    return g > tol and abs(g - prod) > tol


# ---------------------------------------------------------------------------
# Structure detectors
# ---------------------------------------------------------------------------


def is_unital(channel: chn.KrausChannel, tol: float = DETECTOR_TOL) -> bool:
    """||L(I) - I||_F <= tol."""
    return linalg.frobenius(channel.apply_to_identity() - np.eye(channel.dim)) <= tol


def is_mixing_sampled(
    channel: chn.KrausChannel,
    *,
    n_samples: int = 200,
    tol: float = DETECTOR_TOL,
    rng: np.random.Generator,
) -> bool:
    """Entropy never decreases on sampled inputs (cross-check for unitality).

    The maximally mixed state is probed first: it maximizes entropy
    uniquely, so any non-unital channel strictly lowers its entropy, which
    random (mostly rather pure) samples can easily miss.
    """
    from .sampling import random_density

    probes = [DensityMatrix.maximally_mixed(channel.dim)]
    probes += [random_density(channel.dim, rng) for _ in range(n_samples)]
    for rho in probes:
        if channel.apply(rho).entropy() < rho.entropy() - tol:
            return False
    return True


def hermitian_basis(d: int) -> list[np.ndarray]:
    """d^2 Hermitian matrices spanning the operator space."""
    out = []
    for i in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[i, i] = 1.0
        out.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[i, j] = s[j, i] = 1 / np.sqrt(2)
            out.append(s)
            a = np.zeros((d, d), dtype=complex)
            a[i, j] = -1j / np.sqrt(2)
            a[j, i] = 1j / np.sqrt(2)
            out.append(a)
    return out


def find_decohering_basis(
    channel: chn.KrausChannel, tol: float = DETECTOR_TOL
) -> np.ndarray | None:
    """Basis in which every channel output is diagonal, if one exists.

    Applies the channel to a Hermitian operator basis; when all images
    pairwise commute (within normalized tol) their common eigenbasis
    diagonalizes L(rho) for every rho by linearity.  Returns None otherwise.
    """
    outs = [channel.apply_matrix(h) for h in hermitian_basis(channel.dim)]
    members = [o for o in outs if linalg.frobenius(o) > 1e-12]
    worst = 0.0
    for i, a in enumerate(members):
        for b in members[i + 1 :]:
            worst = max(worst, linalg.commutation_defect(a, b))
            if worst > tol:
                return None
    if not members:
        return np.eye(channel.dim, dtype=complex)
    return linalg.simultaneous_diagonalization(members, tol=max(tol, 10 * worst))


@dataclass(frozen=True)
class IsotropicFit:
    """Fitted decomposition L = p Gamma + (1-p) I/d.

    gamma is 'unitary' or 'transpose'; both it and u are None for the
    degenerate p = 0 fit, where Gamma is unidentifiable.
    """

    p: float
    gamma: str | None
    u: np.ndarray | None


def _polar_unitary(k: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(k)
    w = u @ vh
    # gauge: make the largest-magnitude entry real positive
    idx = np.unravel_index(np.argmax(np.abs(w)), w.shape)
    ph = w[idx] / abs(w[idx])
    return w / ph


def fit_isotropic(
    channel: chn.KrausChannel,
    *,
    tol: float = CP_TOL,
    rng: np.random.Generator | None = None,
) -> IsotropicFit | None:
    """Detect L = p Gamma + (1-p) I/d with spectrum-preserving Gamma.

    Requires unitality; fits p from the output spectrum of one random pure
    state (which must look like {p + (1-p)/d} + {(1-p)/d  x (d-1)}),
    reconstructs Gamma on the matrix units, demands a rank-one Choi for
    Gamma (unitary case) or for Gamma composed with transpose, and accepts
    only if the refitted channel reproduces the action on all matrix units
    within tol.
    """
    if not is_unital(channel, max(tol, DETECTOR_TOL)):
        return None
    d = channel.dim
    if rng is None:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(0xF17)))

    units = []
    outs = []
    for i in range(d):
        row_u, row_o = [], []
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            row_u.append(e)
            row_o.append(channel.apply_matrix(e))
        units.append(row_u)
        outs.append(row_o)

    eye_over_d = np.eye(d) / d
    depol_dist = max(
        linalg.frobenius(outs[i][j] - (eye_over_d if i == j else 0))
        for i in range(d)
        for j in range(d)
    )
    if depol_dist <= tol:
        return IsotropicFit(p=0.0, gamma=None, u=None)

    probe = random_ket(d, rng)
    w = linalg.hermitian_eig(channel.apply_matrix(np.outer(probe, probe.conj()))).eigenvalues
    candidates = []
    if d >= 2:
        candidates.append(1.0 - d * float(np.mean(w[:-1])))  # odd eigenvalue on top
        candidates.append(1.0 - d * float(np.mean(w[1:])))  # odd eigenvalue at bottom
    gate = max(1e-4, 100 * tol)

    for p in candidates:
        if abs(p) <= max(10 * tol, 1e-6):
            continue
        gamma_out = np.empty((d, d, d, d), dtype=complex)
        for i in range(d):
            for j in range(d):
                corr = (1 - p) / d * np.eye(d) if i == j else 0.0
                gamma_out[i, j] = (outs[i][j] - corr) / p
        for gamma in ("unitary", "transpose"):
            if gamma == "unitary":
                j_mat = gamma_out.transpose(2, 0, 3, 1).reshape(d * d, d * d) / d
            else:
                # Choi of Gamma o T, rank one iff Gamma is a rotated transpose
                j_mat = gamma_out.transpose(2, 1, 3, 0).reshape(d * d, d * d) / d
            spec = linalg.hermitian_eig(linalg.hermitian_part(j_mat))
            if spec.eigenvalues[-1] < 1 - gate or abs(spec.eigenvalues[:-1]).max() > gate:
                continue
            k = spec.eigenvectors[:, -1].reshape(d, d) * np.sqrt(d)
            if linalg.frobenius(k.conj().T @ k - np.eye(d)) > gate * d:
                continue
            u = _polar_unitary(k)
            lo, hi = chn.isotropic_p_range(d, gamma)
            if not lo - 1e-12 <= p <= hi + 1e-12:
                continue
            fitted = chn.isotropic(d, float(np.clip(p, lo, hi)), gamma=gamma, u=u)
            dist = max(
                linalg.frobenius(fitted.apply_matrix(units[i][j]) - outs[i][j])
                for i in range(d)
                for j in range(d)
            )
            if dist <= tol:
                return IsotropicFit(p=float(p), gamma=gamma, u=u)
    return None


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassificationVerdict:
    """Channel class label plus the evidence that justifies it.

    evidence: decohering basis for completely_decohering, IsotropicFit for
    isotropic, CreationWitness for creator.  cp carries the (optional)
    commutativity-preservation cross-check; consistent records whether the
    label and the CP verdict agree with the dimension's theorem (None when
    no completeness claim applies).
    """

    label: str
    basis: np.ndarray | None = None
    iso_fit: IsotropicFit | None = None
    witness: CreationWitness | None = None
    cp: CPVerdict | None = None
    consistent: bool | None = None


def classify_qubit(
    channel: chn.KrausChannel,
    *,
    budget: int = DEFAULT_BUDGET,
    tol: float = CP_TOL,
    detector_tol: float = DETECTOR_TOL,
    rng: np.random.Generator,
    starts: int = DEFAULT_STARTS,
    check_cp: bool = True,
) -> ClassificationVerdict:
    """Qubit trichotomy: unital (mixing), completely decohering, or creator.

    For qubits, commutativity preservation is equivalent to being unital or
    completely decohering, so any other channel should yield a witness; the
    CP cross-check records whether the search agreed.
    """
    if channel.dim != 2:
        raise ValueError("classify_qubit expects a qubit channel")
    return _classify_common(
        channel,
        detectors=("unital", "cd"),
        budget=budget,
        tol=tol,
        detector_tol=detector_tol,
        rng=rng,
        starts=starts,
        check_cp=check_cp,
        has_theorem=True,
    )


def classify_qutrit(
    channel: chn.KrausChannel,
    *,
    budget: int = DEFAULT_BUDGET,
    tol: float = CP_TOL,
    detector_tol: float = DETECTOR_TOL,
    rng: np.random.Generator,
    starts: int = DEFAULT_STARTS,
    check_cp: bool = True,
) -> ClassificationVerdict:
    """Qutrit trichotomy: completely decohering, isotropic, or creator.

    Unitality alone does not protect a qutrit channel: generic mixtures of
    two unitaries already create correlation, and only the isotropic subset
    of unital channels is commutativity preserving.
    """
    if channel.dim != 3:
        raise ValueError("classify_qutrit expects a qutrit channel")
    return _classify_common(
        channel,
        detectors=("cd", "iso"),
        budget=budget,
        tol=tol,
        detector_tol=detector_tol,
        rng=rng,
        starts=starts,
        check_cp=check_cp,
        has_theorem=True,
    )


def classify_channel(
    channel: chn.KrausChannel,
    *,
    budget: int = DEFAULT_BUDGET,
    tol: float = CP_TOL,
    detector_tol: float = DETECTOR_TOL,
    rng: np.random.Generator,
    starts: int = DEFAULT_STARTS,
    check_cp: bool = True,
) -> ClassificationVerdict:
    """Dimension-dispatching classifier.

    d = 2 and d = 3 use the proven trichotomies.  For d >= 4 the detector
    trio runs without a completeness claim: completely decohering and
    isotropic channels are labeled as such, a found violation labels the
    channel creator, and anything else is reported unclassified.
    """
    if channel.dim == 2:
        return classify_qubit(
            channel, budget=budget, tol=tol, detector_tol=detector_tol,
            rng=rng, starts=starts, check_cp=check_cp,
        )
    if channel.dim == 3:
        return classify_qutrit(
            channel, budget=budget, tol=tol, detector_tol=detector_tol,
            rng=rng, starts=starts, check_cp=check_cp,
        )
    return _classify_common(
        channel,
        detectors=("cd", "iso", "unital"),
        budget=budget,
        tol=tol,
        detector_tol=detector_tol,
        rng=rng,
        starts=starts,
        check_cp=check_cp,
        has_theorem=False,
    )


def _classify_common(
    channel, *, detectors, budget, tol, detector_tol, rng, starts, check_cp, has_theorem
) -> ClassificationVerdict:
    label = None
    basis = None
    iso = None
    for kind in detectors:
        if kind == "unital" and is_unital(channel, detector_tol):
            label = LABEL_UNITAL
            break
        if kind == "cd":
            basis = find_decohering_basis(channel, detector_tol)
            if basis is not None:
                label = LABEL_CD
                break
        if kind == "iso":
            iso = fit_isotropic(channel, tol=tol, rng=rng)
            if iso is not None:
                label = LABEL_ISOTROPIC
                break

    cp = None
    if label is not None:
        if check_cp:
            cp = is_commutativity_preserving(
                channel, budget=budget, tol=tol, rng=rng, starts=starts
            )
        consistent = (cp.preserving if cp is not None else None) if has_theorem else None
        return ClassificationVerdict(
            label=label,
            basis=basis if label == LABEL_CD else None,
            iso_fit=iso if label == LABEL_ISOTROPIC else None,
            cp=cp,
            consistent=consistent,
        )

    # No structure detector fired: hunt for a witness.
    cp = is_commutativity_preserving(channel, budget=budget, tol=tol, rng=rng, starts=starts)
    if not cp.preserving:
        witness = witness_from_pair(channel, *cp.witness_pair, tol=tol)
        return ClassificationVerdict(
            label=LABEL_CREATOR,
            witness=witness,
            cp=cp,
            consistent=True if has_theorem else None,
        )
    # Theorems say this cannot happen at d = 2, 3; report it rather than guess.
    return ClassificationVerdict(
        label=LABEL_UNKNOWN,
        cp=cp,
        consistent=False if has_theorem else None,
    )


# ---------------------------------------------------------------------------
# Maximal entangled fraction and the fidelity bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MsfResult:
    """Maximal overlap with maximally entangled states |Phi_U> = (I (x) U)|Phi+>.

    fidelity is the average-teleportation value (d F + 1)/(d + 1).  F is a
    best-of-multistart certificate: it is at least the overlap at U = I and
    at every other tested unitary.
    """

    f_value: float
    fidelity: float
    unitary: np.ndarray
    evals: int


def msf(
    state: BipartiteState,
    *,
    budget: int = DEFAULT_BUDGET,
    starts: int = DEFAULT_STARTS,
    rng: np.random.Generator,
) -> MsfResult:
    """Maximize <Phi_U|rho|Phi_U> over unitaries on B by multistart search."""
    if state.dim_a != state.dim_b:
        raise ValueError("maximal entangled fraction needs equal local dimensions")
    d = state.dim_a
    rho = state.mat

    def objective(theta: np.ndarray, u0: np.ndarray) -> float:
        return kernels.entangled_overlap(theta, u0, rho)

    res = maximize_unitary_objective(objective, d, rng=rng, budget=budget, starts=starts)
    u = res.u0 @ np.asarray(
        kernels.expi_hermitian(kernels.unpack_hermitian(np.asarray(res.theta, float), d))
    )
    f_value = entangled_overlap_direct(state, u)
    return MsfResult(
        f_value=f_value,
        fidelity=(d * f_value + 1) / (d + 1),
        unitary=u,
        evals=res.evals,
    )


def entangled_overlap_direct(state: BipartiteState, u: np.ndarray) -> float:
    """<Phi_U|rho|Phi_U> evaluated directly for a given unitary."""
    d = state.dim_a
    w = (np.asarray(u, dtype=complex).T / np.sqrt(d)).reshape(-1)
    return float(np.real(w.conj() @ state.mat @ w))


@dataclass(frozen=True)
class MsfBoundCheck:
    """Entangled fraction before/after a local unital channel on B."""

    before: MsfResult
    after: MsfResult
    slack: float
    holds: bool


def verify_msf_bound(
    state: BipartiteState,
    channel: chn.KrausChannel,
    *,
    budget: int = DEFAULT_BUDGET,
    starts: int = DEFAULT_STARTS,
    rng: np.random.Generator,
    slack: float = 1e-6,
    unital_tol: float = DETECTOR_TOL,
) -> MsfBoundCheck:
    """Check that a unital channel on B does not raise the entangled fraction.

    Rejects non-unital channels outright: the non-improvement claim is made
    only for entropy-non-decreasing (equivalently unital) channels.  slack
    absorbs the optimizer gap between the two searches.
    """
    if channel.dim != state.dim_b:
        raise ValueError("channel dimension must match dim_b")
    if not is_unital(channel, unital_tol):
        raise ValueError("bound check requires a unital channel")
    before = msf(state, budget=budget, starts=starts, rng=rng)
    after = msf(channel.apply_local_b(state), budget=budget, starts=starts, rng=rng)
    return MsfBoundCheck(
        before=before,
        after=after,
        slack=slack,
        holds=after.f_value <= before.f_value + slack,
    )


# ---------------------------------------------------------------------------
# Census scan
# ---------------------------------------------------------------------------

SCAN_FAMILIES = (
    "completely_decohering",
    "isotropic_unitary",
    "isotropic_transpose",
    "unital_mixture",
    "block_unitary_mixture",
    "random_cptp",
)


def _sample_family(family: str, dim: int, rng: np.random.Generator) -> chn.KrausChannel:
    if family == "completely_decohering":
        return random_completely_decohering(dim, rng)
    if family == "isotropic_unitary":
        return random_isotropic(dim, rng, gamma="unitary")
    if family == "isotropic_transpose":
        return random_isotropic(dim, rng, gamma="transpose")
    if family == "unital_mixture":
        return random_unital_mixture(dim, rng, n_unitaries=int(rng.integers(2, 4)))
    if family == "block_unitary_mixture":
        return random_block_unitary_mixture(dim, rng)
    if family == "random_cptp":
        return random_cptp(dim, rng)
    raise ValueError(f"unknown channel family {family!r}")


@dataclass(frozen=True)
class ScanRow:
    index: int
    family: str
    label: str
    cp_preserving: bool
    max_violation: float
    is_cd: bool
    is_iso: bool
    is_unital: bool
    anomaly: str | None


@dataclass(frozen=True)
class ScanReport:
    """Census of sampled channels against the expected family structure.

    At d = 2 a channel should preserve commutativity iff it is unital or
    completely decohering; at d >= 3 iff it is completely decohering or
    isotropic (a theorem at d = 3, the conjectured extension at d >= 4).
    Any channel breaking the equivalence is listed in anomalies.
    """

    dim: int
    seed: int
    rows: tuple[ScanRow, ...]
    family_counts: dict
    anomalies: tuple[ScanRow, ...]


def _scan_one(
    dim: int,
    seed: int,
    index: int,
    family: str,
    budget: int,
    tol: float,
    detector_tol: float,
    starts: int,
) -> ScanRow:
    sample_rng = substream(seed, 2 * index)
    search_rng = substream(seed, 2 * index + 1)
    channel = _sample_family(family, dim, sample_rng)

    basis = find_decohering_basis(channel, detector_tol)
    iso = fit_isotropic(channel, tol=tol, rng=search_rng)
    unital = is_unital(channel, detector_tol)
    cp = is_commutativity_preserving(
        channel, budget=budget, tol=tol, rng=search_rng, starts=starts
    )

    if basis is not None:
        label = LABEL_CD
    elif iso is not None:
        label = LABEL_ISOTROPIC
    elif not cp.preserving:
        label = LABEL_CREATOR
    elif unital:
        label = LABEL_UNITAL
    else:
        label = LABEL_UNKNOWN

    in_families = (basis is not None) or (iso is not None) or (dim == 2 and unital)
    anomaly = None
    if cp.preserving and not in_families:
        anomaly = "preserving_outside_known_families"
    elif in_families and not cp.preserving:
        anomaly = "violation_inside_known_families"

    return ScanRow(
        index=index,
        family=family,
        label=label,
        cp_preserving=cp.preserving,
        max_violation=cp.max_violation,
        is_cd=basis is not None,
        is_iso=iso is not None,
        is_unital=unital,
        anomaly=anomaly,
    )


def scan_channels(
    dim: int,
    n_channels: int,
    *,
    seed: int,
    budget: int = DEFAULT_BUDGET,
    tol: float = CP_TOL,
    detector_tol: float = DETECTOR_TOL,
    starts: int = DEFAULT_STARTS,
    families: tuple[str, ...] | None = None,
    workers: int = 1,
) -> ScanReport:
    """Sample channels from every constructor family and flag anomalies.

    Channel i draws from substreams (2i, 2i+1) of the master seed, so the
    report is reproducible and independent of the worker count.
    """
    if dim < 2:
        raise ValueError("scan needs dimension >= 2")
    if families is None:
        families = tuple(f for f in SCAN_FAMILIES if f != "block_unitary_mixture" or dim >= 3)
    tasks = [
        (dim, seed, i, families[i % len(families)], budget, tol, detector_tol, starts)
        for i in range(n_channels)
    ]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_one_star, tasks, chunksize=4))
    else:
        rows = [_scan_one(*t) for t in tasks]

    counts: dict = {}
    for row in rows:
        fam = counts.setdefault(
            row.family,
            Counter(cd=0, isotropic=0, unital=0, creator=0, unclassified=0, cp_pass=0),
        )
        key = {
            LABEL_CD: "cd",
            LABEL_ISOTROPIC: "isotropic",
            LABEL_UNITAL: "unital",
            LABEL_CREATOR: "creator",
            LABEL_UNKNOWN: "unclassified",
        }[row.label]
        fam[key] += 1
        if row.cp_preserving:
            fam["cp_pass"] += 1
    return ScanReport(
        dim=dim,
        seed=seed,
        rows=tuple(rows),
        family_counts={k: dict(v) for k, v in counts.items()},
        anomalies=tuple(r for r in rows if r.anomaly),
    )


def _scan_one_star(args) -> ScanRow:
    return _scan_one(*args)
