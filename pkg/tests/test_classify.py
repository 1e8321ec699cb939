import numpy as np
import pytest
from helpers import (
    amplitude_damping,
    brute_force_msf,
    exact_entangled_fraction_2q,
    qubit_cp_grid_max,
)

from qcorr import channels as chn
from qcorr import classify, linalg
from qcorr.channels import maximally_entangled_ket
from qcorr.sampling import (
    haar_unitary,
    random_bipartite,
    random_completely_decohering,
    random_cptp,
    random_isotropic,
    random_povm,
    random_unital_mixture,
    rng_from_seed,
)
from qcorr.states import BipartiteState, DensityMatrix, is_classical_on_b


def rotation2(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]], dtype=complex)


def example_block_channel() -> chn.KrausChannel:
    e = np.array([1.0, 1.0]) / np.sqrt(2)
    return chn.block_unitary_mixture(e, [np.eye(2), rotation2(np.pi / 4)])


def bell_44() -> BipartiteState:
    return BipartiteState(2, 2, DensityMatrix.pure(maximally_entangled_ket(2)))


class TestCommutativityPreserving:
    def test_unitary_channel_preserves(self, rng):
        ch = chn.unitary_channel(haar_unitary(3, rng))
        verdict = classify.is_commutativity_preserving(ch, rng=rng_from_seed(1))
        assert verdict.preserving
        assert verdict.max_violation < 1e-10
        assert verdict.witness_pair is None

    def test_full_dephasing_preserves(self):
        ch = chn.completely_decohering(np.eye(3), [np.diag([1.0 * (i == j) for j in range(3)]) for i in range(3)])
        verdict = classify.is_commutativity_preserving(ch, rng=rng_from_seed(2))
        assert verdict.preserving

    def test_isotropic_preserves(self, rng):
        ch = random_isotropic(3, rng)
        verdict = classify.is_commutativity_preserving(ch, rng=rng_from_seed(3))
        assert verdict.preserving

    def test_amplitude_damping_violates(self):
        # non-unital, non-decohering qubit channel: the search must find a
        # violation on the same scale as a dense Bloch-grid scan
        ch = amplitude_damping(0.5)
        verdict = classify.is_commutativity_preserving(ch, rng=rng_from_seed(4))
        assert not verdict.preserving
        assert verdict.max_violation > 1e-3
        grid = qubit_cp_grid_max(ch)
        assert verdict.max_violation >= grid - 1e-4

    def test_depolarizing_preserves(self):
        verdict = classify.is_commutativity_preserving(
            chn.depolarizing(2, 0.6), rng=rng_from_seed(5)
        )
        assert verdict.preserving

    def test_witness_pair_is_orthogonal(self, rng):
        ch = random_cptp(3, rng)
        verdict = classify.is_commutativity_preserving(ch, rng=rng_from_seed(6))
        assert not verdict.preserving
        phi, psi = verdict.witness_pair
        assert abs(np.vdot(phi, psi)) < 1e-9

    def test_violation_matches_direct_recomputation(self, rng):
        ch = random_cptp(2, rng)
        verdict = classify.is_commutativity_preserving(ch, rng=rng_from_seed(7))
        direct = classify.pair_violation_direct(ch, *verdict.witness_pair)
        assert verdict.max_violation == pytest.approx(direct, abs=1e-12)


class TestCreationWitness:
    def test_identity_channel_none(self):
        assert (
            classify.creation_witness(chn.identity_channel(2), rng=rng_from_seed(8)) is None
        )

    def test_depolarizing_none(self):
        assert (
            classify.creation_witness(chn.depolarizing(2, 0.3), rng=rng_from_seed(9)) is None
        )

    def test_random_channel_witness_verifies(self, rng):
        ch = random_cptp(3, rng)
        w = classify.creation_witness(ch, rng=rng_from_seed(10))
        assert w is not None
        assert w.input_quantumness <= 1e-9
        assert is_classical_on_b(w.input_state).is_classical_on_b
        assert w.output_quantumness > 1e-7
        assert w.input_state.dim_a == 2

    def test_witness_output_equals_channel_image(self, rng):
        ch = random_cptp(2, rng)
        w = classify.creation_witness(ch, rng=rng_from_seed(11))
        assert np.allclose(
            w.output_state.mat, ch.apply_local_b(w.input_state).mat, atol=1e-12
        )

    def test_non_orthogonal_pair_rejected(self):
        e0 = np.array([1.0, 0.0, 0.0])
        with pytest.raises(ValueError, match="orthogonal"):
            classify.witness_from_pair(chn.identity_channel(3), e0, e0)


class TestBlockOverlapCriterion:
    # the channel fixing |2> and mixing block unitaries creates correlation
    # from an orthogonal pair iff the reduced vectors are neither orthogonal
    # nor proportional

    def test_computational_pair_is_safe(self):
        e0 = np.array([1.0, 0, 0])
        e1 = np.array([0, 1.0, 0])
        assert classify.block_overlap(e0, e1) == 0
        assert not classify.block_overlap_enables_creation(e0, e1)

    def test_top_state_pair_is_safe(self):
        e2 = np.array([0, 0, 1.0])
        e0 = np.array([1.0, 0, 0])
        assert classify.block_overlap(e2, e0) == 0
        assert not classify.block_overlap_enables_creation(e2, e0)

    def test_proportional_reduced_vectors_are_safe(self):
        # reduced overlap 1/2 saturates Cauchy-Schwarz: proportional reduced
        # vectors, so the outputs coincide and nothing is created
        phi = np.array([1.0, 0, 1.0]) / np.sqrt(2)
        psi = np.array([1.0, 0, -1.0]) / np.sqrt(2)
        g = classify.block_overlap(phi, psi)
        assert g == pytest.approx(0.5)
        assert not classify.block_overlap_enables_creation(phi, psi)
        ch = example_block_channel()
        a = ch.apply_matrix(np.outer(phi, phi.conj()))
        b = ch.apply_matrix(np.outer(psi, psi.conj()))
        assert linalg.frobenius(linalg.commutator(a, b)) < 1e-10

    def test_generic_pair_creates(self):
        phi = np.array([1.0, 0, 1.0]) / np.sqrt(2)
        psi = np.array([1.0, 1.0, -1.0]) / np.sqrt(3)
        assert classify.block_overlap_enables_creation(phi, psi)
        ch = example_block_channel()
        w = classify.witness_from_pair(ch, phi, psi)
        assert w.output_quantumness > 1e-3
        assert w.confirmed

    def test_criterion_matches_direct_commutators(self, rng):
        # criterion verdict == (outputs commute) over random orthogonal pairs
        from qcorr.sampling import random_orthogonal_pure_pair

        ch = example_block_channel()
        for _ in range(50):
            phi, psi = random_orthogonal_pure_pair(3, rng)
            creates = classify.block_overlap_enables_creation(phi, psi, tol=1e-7)
            v = classify.pair_violation_direct(ch, phi, psi)
            assert creates == (v > 1e-7)


class TestStructureDetectors:
    def test_is_unital(self, rng):
        assert classify.is_unital(random_unital_mixture(3, rng))
        assert classify.is_unital(chn.completely_decohering(
            np.eye(2), [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
        ))
        reset = chn.KrausChannel(
            [np.array([[1.0, 0.0], [0.0, 0.0]]), np.array([[0.0, 1.0], [0.0, 0.0]])],
            kind="reset",
        )
        assert not classify.is_unital(reset)
        assert np.allclose(reset.apply_to_identity(), np.diag([2.0, 0.0]))

    def test_mixing_matches_unitality(self, rng):
        cases = [
            (random_unital_mixture(3, rng), True),
            (chn.depolarizing(3, 0.5), True),
            (amplitude_damping(0.4), False),
            (random_completely_decohering(3, rng), None),  # agreement, value varies
        ]
        for ch, expected in cases:
            unital = classify.is_unital(ch)
            mixing = classify.is_mixing_sampled(ch, n_samples=150, rng=rng_from_seed(12))
            if expected is not None:
                assert unital == expected
            assert mixing == unital

    def test_decohering_detector_round_trip(self, rng):
        basis = haar_unitary(3, rng)
        ch = chn.completely_decohering(basis, random_povm(3, 3, rng))
        found = classify.find_decohering_basis(ch)
        assert found is not None
        # recovered basis diagonalizes all outputs (match up to permutation/phase)
        for _ in range(5):
            out = ch.apply(DensityMatrix(np.eye(3) / 3)).mat
            t = found.conj().T @ out @ found
            assert linalg.frobenius(t - np.diag(np.diag(t))) < 1e-9

    def test_unitary_channel_not_decohering(self, rng):
        assert classify.find_decohering_basis(chn.unitary_channel(haar_unitary(2, rng))) is None

    def test_isotropic_not_decohering(self):
        ch = chn.isotropic(3, 0.5, "unitary", None)
        assert classify.find_decohering_basis(ch) is None

    def test_full_depolarizing_is_decohering(self):
        assert classify.find_decohering_basis(chn.depolarizing(3, 0.0)) is not None


class TestIsotropicFit:
    def test_unitary_round_trip(self, rng):
        u = haar_unitary(3, rng)
        ch = chn.isotropic(3, 0.4, "unitary", u)
        fit = classify.fit_isotropic(ch, rng=rng_from_seed(13))
        assert fit is not None
        assert fit.gamma == "unitary"
        assert fit.p == pytest.approx(0.4, abs=1e-8)
        refit = chn.isotropic(3, fit.p, fit.gamma, fit.u)
        assert chn.channel_action_distance(ch, refit) < 1e-8

    def test_transpose_round_trip(self, rng):
        u = haar_unitary(3, rng)
        ch = chn.isotropic(3, -0.3, "transpose", u)
        fit = classify.fit_isotropic(ch, rng=rng_from_seed(14))
        assert fit is not None
        assert fit.gamma == "transpose"
        assert fit.p == pytest.approx(-0.3, abs=1e-8)

    def test_dephasing_not_isotropic(self):
        ch = chn.completely_decohering(
            np.eye(3), [np.diag([1.0 * (i == j) for j in range(3)]) for i in range(3)]
        )
        assert classify.fit_isotropic(ch, rng=rng_from_seed(15)) is None

    def test_degenerate_p_zero(self):
        fit = classify.fit_isotropic(chn.depolarizing(3, 0.0), rng=rng_from_seed(16))
        assert fit is not None
        assert fit.p == 0.0
        assert fit.gamma is None and fit.u is None

    def test_non_unital_rejected_fast(self):
        assert classify.fit_isotropic(amplitude_damping(0.3), rng=rng_from_seed(17)) is None

    def test_generic_mixture_not_isotropic(self, rng):
        assert classify.fit_isotropic(random_unital_mixture(3, rng), rng=rng_from_seed(18)) is None


class TestClassifiers:
    def test_phase_flip_is_unital_mixing(self):
        sz = np.diag([1.0, -1.0]).astype(complex)
        ch = chn.unital_mixture([0.5, 0.5], [np.eye(2), sz])
        verdict = classify.classify_qubit(ch, rng=rng_from_seed(19))
        assert verdict.label == "unital_mixing"
        assert verdict.consistent

    def test_biased_reset_is_completely_decohering(self):
        # non-unital measure-and-prepare qubit channel
        povm = [np.diag([0.8, 0.3]).astype(complex), np.diag([0.2, 0.7]).astype(complex)]
        ch = chn.completely_decohering(np.eye(2), povm)
        assert not classify.is_unital(ch)
        verdict = classify.classify_qubit(ch, rng=rng_from_seed(20))
        assert verdict.label == "completely_decohering"
        assert verdict.basis is not None
        assert verdict.consistent

    def test_amplitude_damping_is_creator(self):
        verdict = classify.classify_qubit(amplitude_damping(0.5), rng=rng_from_seed(21))
        assert verdict.label == "creator"
        assert verdict.witness is not None
        assert verdict.witness.output_quantumness > 1e-3
        assert verdict.consistent

    def test_qutrit_depolarizing_is_isotropic(self):
        verdict = classify.classify_qutrit(chn.depolarizing(3, 0.3), rng=rng_from_seed(22))
        assert verdict.label == "isotropic"
        assert verdict.iso_fit.p == pytest.approx(0.3, abs=1e-8)
        assert verdict.consistent

    def test_qutrit_dephasing_is_decohering(self):
        ch = chn.completely_decohering(
            np.eye(3), [np.diag([1.0 * (i == j) for j in range(3)]) for i in range(3)]
        )
        verdict = classify.classify_qutrit(ch, rng=rng_from_seed(23))
        assert verdict.label == "completely_decohering"
        assert verdict.consistent

    def test_qutrit_block_mixture_is_creator(self):
        verdict = classify.classify_qutrit(example_block_channel(), rng=rng_from_seed(24))
        assert verdict.label == "creator"
        assert verdict.witness.confirmed
        assert verdict.consistent

    def test_unital_qutrit_mixture_is_creator(self, rng):
        # mixedness alone does not protect a qutrit
        ch = random_unital_mixture(3, rng)
        verdict = classify.classify_qutrit(ch, rng=rng_from_seed(25))
        assert verdict.label == "creator"
        assert verdict.consistent

    def test_dimension_dispatch(self, rng):
        ch4 = random_cptp(4, rng)
        verdict = classify.classify_channel(ch4, rng=rng_from_seed(26))
        assert verdict.label == "creator"
        assert verdict.consistent is None  # no completeness claim at d >= 4

    def test_wrong_dimension_rejected(self, rng):
        with pytest.raises(ValueError):
            classify.classify_qubit(random_cptp(3, rng), rng=rng_from_seed(27))


class TestMsf:
    def test_bell_state(self):
        res = classify.msf(bell_44(), rng=rng_from_seed(28))
        assert res.f_value == pytest.approx(1.0, abs=1e-9)
        assert res.fidelity == pytest.approx(1.0, abs=1e-9)

    def test_maximally_mixed(self):
        st = BipartiteState(2, 2, DensityMatrix.maximally_mixed(4))
        res = classify.msf(st, budget=4000, starts=8, rng=rng_from_seed(29))
        assert res.f_value == pytest.approx(0.25, abs=1e-10)

    def test_pure_state_closed_form(self):
        # Schmidt coefficients (sqrt .9, sqrt .1): F = (sum of coefficients)^2 / d
        ket = np.zeros(4, dtype=complex)
        ket[0] = np.sqrt(0.9)
        ket[3] = np.sqrt(0.1)
        st = BipartiteState(2, 2, DensityMatrix.pure(ket))
        res = classify.msf(st, rng=rng_from_seed(30))
        expected = (np.sqrt(0.9) + np.sqrt(0.1)) ** 2 / 2
        assert res.f_value == pytest.approx(expected, abs=1e-9)

    def test_matches_exact_two_qubit_formula(self):
        rng = rng_from_seed(31)
        for i in range(15):
            st = random_bipartite(2, 2, rng)
            res = classify.msf(st, budget=8000, starts=16, rng=rng_from_seed(100 + i))
            assert res.f_value == pytest.approx(exact_entangled_fraction_2q(st.mat), abs=1e-9)

    def test_never_below_unoptimized_point(self, rng):
        st = random_bipartite(3, 3, rng)
        res = classify.msf(st, budget=4000, starts=8, rng=rng_from_seed(32))
        assert res.f_value >= classify.entangled_overlap_direct(st, np.eye(3)) - 1e-12

    def test_beats_brute_force_sampling(self):
        rng = rng_from_seed(33)
        st = random_bipartite(2, 2, rng)
        res = classify.msf(st, rng=rng_from_seed(34))
        brute = brute_force_msf(st.mat, 2, 20_000, rng_from_seed(35))
        assert res.f_value >= brute - 1e-6

    def test_fidelity_formula(self):
        res = classify.msf(bell_44(), budget=2000, starts=4, rng=rng_from_seed(36))
        d = 2
        assert res.fidelity == (d * res.f_value + 1) / (d + 1)

    def test_rejects_non_square(self, rng):
        with pytest.raises(ValueError):
            classify.msf(random_bipartite(2, 3, rng), rng=rng_from_seed(37))


class TestMsfBound:
    def test_identity_channel_equality(self):
        bound = classify.verify_msf_bound(
            bell_44(), chn.identity_channel(2), budget=4000, starts=8, rng=rng_from_seed(38)
        )
        assert bound.holds
        assert bound.after.f_value == pytest.approx(bound.before.f_value, abs=1e-9)

    def test_depolarizing_closed_form(self):
        for p in (0.2, 0.7):
            bound = classify.verify_msf_bound(
                bell_44(), chn.depolarizing(2, p), rng=rng_from_seed(39)
            )
            assert bound.holds
            assert bound.after.f_value == pytest.approx((1 + 3 * p) / 4, abs=1e-8)

    def test_non_unital_rejected(self):
        with pytest.raises(ValueError, match="unital"):
            classify.verify_msf_bound(bell_44(), amplitude_damping(0.3), rng=rng_from_seed(40))

    def test_random_unital_pairs_hold(self):
        for i in range(10):
            st = random_bipartite(2, 2, rng_from_seed(500 + i))
            ch = random_unital_mixture(2, rng_from_seed(600 + i), n_unitaries=3)
            bound = classify.verify_msf_bound(
                st, ch, budget=6000, starts=12, rng=rng_from_seed(700 + i)
            )
            assert bound.holds


class TestScan:
    def test_qutrit_scan_clean(self):
        report = classify.scan_channels(3, 18, seed=41, budget=8000)
        assert not report.anomalies
        counts = report.family_counts
        assert counts["completely_decohering"]["cd"] == 3
        assert counts["completely_decohering"]["cp_pass"] == 3
        assert counts["isotropic_unitary"]["isotropic"] == 3
        assert counts["isotropic_transpose"]["cp_pass"] == 3
        assert counts["unital_mixture"]["creator"] == 3
        assert counts["block_unitary_mixture"]["creator"] == 3
        assert counts["random_cptp"]["creator"] == 3

    def test_qubit_scan_dichotomy(self):
        report = classify.scan_channels(2, 10, seed=42, budget=8000)
        assert not report.anomalies
        # at d=2 unital mixtures preserve commutativity
        assert report.family_counts["unital_mixture"]["cp_pass"] == 2

    def test_rows_reproducible(self):
        a = classify.scan_channels(3, 6, seed=43, budget=4000)
        b = classify.scan_channels(3, 6, seed=43, budget=4000)
        assert [r.max_violation for r in a.rows] == [r.max_violation for r in b.rows]

    def test_workers_do_not_change_results(self):
        a = classify.scan_channels(3, 6, seed=44, budget=4000, workers=1)
        b = classify.scan_channels(3, 6, seed=44, budget=4000, workers=2)
        assert [r.label for r in a.rows] == [r.label for r in b.rows]
        assert [r.max_violation for r in a.rows] == [r.max_violation for r in b.rows]
