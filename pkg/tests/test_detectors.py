import math

import numpy as np
import pytest

from majorization import bounds, detectors, quantum
from majorization.entropy import SHANNON, EntropyMeasure, parse_measure
from majorization.probvec import ProbVec, majorizes, outer


def bell_povm(d):
    return quantum.rank_one_povm(quantum.bell_basis(d), label="bell")


def pauli_pairs():
    return [(quantum.Observable(p), quantum.Observable(p)) for p in (quantum.PAULI_X, quantum.PAULI_Y, quantum.PAULI_Z)]


def test_theorem1_werner_half():
    v = detectors.theorem1_detect(quantum.werner(2, 0.5), bell_povm(2), bounds.bell_separable_bound(2))
    assert v.entangled
    assert v.violated_index == 1
    assert v.margin == pytest.approx(0.125, abs=1e-12)


@pytest.mark.parametrize("d", [2, 3])
def test_theorem1_boundary(d):
    qc = 1 / (1 + d)
    b = bounds.bell_separable_bound(d)
    assert not detectors.theorem1_detect(quantum.werner(d, qc - 1e-6), bell_povm(d), b).entangled
    assert detectors.theorem1_detect(quantum.werner(d, qc + 1e-6), bell_povm(d), b).entangled


def test_werner_statistics_match_born_rule():
    for d, q in [(2, 0.3), (3, 0.7)]:
        direct = quantum.born_probs(bell_povm(d), quantum.werner(d, q))
        assert np.allclose(direct.entries, detectors.werner_bell_statistics(d, q).entries, atol=1e-12)
    q = 0.4
    rho = quantum.werner(2, q)
    vecs = [quantum.born_probs(detectors.product_measurement(a, b), rho) for a, b in pauli_pairs()]
    # descending order is all that the detectors look at
    assert np.allclose(np.sort(outer(*vecs).entries), np.sort(detectors.werner_pauli_statistics(q).entries))


def test_theorem2_pauli():
    b = bounds.pauli_bound_closed_form()
    assert not detectors.theorem2_detect(quantum.werner(2, 0.5), pauli_pairs(), b).entangled
    assert detectors.theorem2_detect(quantum.werner(2, 0.6), pauli_pairs(), b).entangled
    povms = [detectors.product_measurement(a, c) for a, c in pauli_pairs()]
    assert detectors.theorem2_detect(quantum.werner(2, 0.6), povms, b).entangled
    with pytest.raises(ValueError):
        detectors.theorem2_detect(quantum.random_density((4,), np.random.default_rng(0)), pauli_pairs(), b)


def test_theorem3_werner_and_disorder():
    v, dis = detectors.theorem3_detect(quantum.werner(2, 0.5))
    assert v.entangled and v.violated_index == 1
    assert np.allclose(dis.lambda_inf.entries, [0.5, 0.5])
    assert set(dis.subsystem_spectra) == {(0,), (1,)}


def test_theorem3_three_parties(rng):
    rho = quantum.random_separable((2, 2, 2), rng)
    v, dis = detectors.theorem3_detect(rho)
    assert len(dis.subsystem_spectra) == 6
    assert not v.entangled
    ghz = np.zeros(8)
    ghz[0] = ghz[7] = 1 / math.sqrt(2)
    assert detectors.theorem3_detect(quantum.PureState(ghz, (2, 2, 2)).density())[0].entangled


def test_product_state_inconclusive_everywhere(rng):
    rho = quantum.tensor(quantum.random_density((2,), rng), quantum.random_density((2,), rng))
    assert not detectors.theorem3_detect(rho)[0].entangled
    assert not detectors.theorem1_detect(rho, bell_povm(2), bounds.bell_separable_bound(2)).entangled


def test_optimal_measurement_labels(rng):
    assert detectors.optimal_measurement(quantum.werner(3, 0.4)).label == "bell"
    assert detectors.optimal_measurement(quantum.werner(2, 0.0)).label == "computational"
    rho = quantum.random_density((2, 2), rng)
    m = detectors.optimal_measurement(rho)
    assert m.label == "eigenbasis"
    assert np.allclose(np.sort(quantum.born_probs(m, rho).entries), np.sort(np.linalg.eigvalsh(rho.matrix)))


def test_corollary_c1_shannon():
    b = bounds.bell_separable_bound(2)
    lhs = detectors.werner_bell_statistics(2, 0.9)
    v = detectors.corollary_detect(SHANNON, lhs, b, "C1")
    assert v.entangled
    assert v.margin == pytest.approx(math.log(2) - SHANNON(lhs))
    assert not detectors.corollary_detect(SHANNON, detectors.werner_bell_statistics(2, 0.5), b, "C1").entangled


def test_corollary_max_entry():
    m = parse_measure("tsallis:inf")
    b = bounds.bell_separable_bound(2)
    assert detectors.corollary_detect(m, detectors.werner_bell_statistics(2, 0.34), b, "C1").entangled
    assert not detectors.corollary_detect(m, detectors.werner_bell_statistics(2, 0.33), b, "C1").entangled


def test_corollary_c2_uses_sum_and_joint():
    b = bounds.pauli_bound_closed_form()
    v = ProbVec([0.9, 0.1])
    parts = [v, v, v]
    m = EntropyMeasure("tsallis", 2)
    got = detectors.corollary_detect(m, parts, b, "C2")
    assert got.margin == pytest.approx(m(b) - 3 * m(v))
    low = EntropyMeasure("tsallis", 0.5)
    got = detectors.corollary_detect(low, parts, b, "C2")
    assert got.margin == pytest.approx(low(b) - low(outer(*parts)))


def test_corollary_arity_errors():
    b = bounds.pauli_bound_closed_form()
    with pytest.raises(ValueError):
        detectors.corollary_detect(SHANNON, ProbVec([1.0]), b, "C2")
    with pytest.raises(ValueError):
        detectors.corollary_detect(SHANNON, [ProbVec([1.0])], b, "C1")
    with pytest.raises(ValueError):
        detectors.corollary_detect(SHANNON, ProbVec([1.0]), b, "C9")


def tsallis2_threshold_oracle(d):
    # sum p^2 = 1/d with p0 = q + (1-q)/d^2 and d^2-1 entries (1-q)/d^2
    c = 1 / d**2
    # (q + c(1-q))^2 + (d^2-1) c^2 (1-q)^2 - 1/d = 0, a quadratic in q
    qs = np.linspace(0, 1, 5)
    vals = [(q + c * (1 - q)) ** 2 + (d * d - 1) * c * c * (1 - q) ** 2 - 1 / d for q in qs]
    coeffs = np.polyfit(qs, vals, 2)
    roots = [r.real for r in np.roots(coeffs) if abs(r.imag) < 1e-12 and 0 < r.real < 1]
    return min(roots)


@pytest.mark.parametrize("d", [2, 3, 5, 8])
def test_tsallis2_threshold_against_quadratic(d):
    assert detectors.tsallis_threshold(d, 2).q_star == pytest.approx(tsallis2_threshold_oracle(d), abs=1e-9)
    assert detectors.tsallis_threshold(d, 2).q_star == pytest.approx(1 / math.sqrt(d + 1), abs=1e-9)


def test_shannon_threshold_matches_near_one_order():
    exact = detectors.tsallis_threshold(2, 1.0).q_star
    near = detectors.tsallis_threshold(2, 1.0 + 1e-6).q_star
    assert exact == pytest.approx(near, abs=1e-5)


def test_threshold_inf_and_errors():
    p = detectors.tsallis_threshold(4, math.inf)
    assert p.q_star == 1 / 5 and p.method == "analytic"
    with pytest.raises(ValueError):
        detectors.tsallis_threshold(2, 0.5)
    with pytest.raises(ValueError):
        detectors.tsallis_threshold(1, 2)


def test_werner_scan_order():
    pts = detectors.werner_scan([2, 3], [1, math.inf])
    assert [(p.d, p.measure.order) for p in pts] == [(2, 1.0), (2, math.inf), (3, 1.0), (3, math.inf)]


def test_estimate_spectrum(rng):
    for dim in (2, 3, 4):
        rho = quantum.random_density((dim,), rng)
        est = detectors.estimate_spectrum(rho, bounds.OptimizerConfig(restarts=8))
        assert np.allclose(est.entries, np.sort(np.linalg.eigvalsh(rho.matrix))[::-1], atol=1e-8)


def test_estimate_spectrum_samples_are_majorized(rng):
    rho = quantum.random_density((3,), rng)
    est, samples = detectors.estimate_spectrum(rho, bounds.OptimizerConfig(restarts=4, max_iters=5), return_samples=True)
    assert samples
    assert all(majorizes(est, s, tol=1e-9) for s in samples)


@pytest.mark.parametrize("measure", ["tsallis:0.5", "renyi:0.5", "renyi:0.1"])
def test_sub_unit_orders_ignore_rounding_noise(measure):
    # a pure product state's zero eigenvalues come out near 1e-16
    lhs = ProbVec([1 - 8.5e-17, 6.85e-17, 1.7e-17, 0.0])
    v = detectors.corollary_detect(parse_measure(measure), lhs, ProbVec([1.0, 0.0]), "C3")
    assert not v.entangled
    assert abs(v.margin) < 1e-12
