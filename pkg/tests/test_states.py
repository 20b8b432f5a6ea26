import json
from math import comb, sqrt

import numpy as np
import pytest

from expfam.linalg import von_neumann_entropy
from expfam.pauli import expectation, partial_trace
from expfam.states import (
    StateValidationError,
    dicke,
    ghz,
    maximally_mixed,
    random_state,
    state_from_spec,
    validate_state,
    werner,
    white_noise_mix,
)

from conftest import kron_string


def test_dicke_amplitudes():
    rho = dicke(4, 2)
    vec_positions = [idx for idx in range(16) if bin(idx).count("1") == 2]
    assert len(vec_positions) == 6
    for i in vec_positions:
        for j in vec_positions:
            assert rho[i, j] == pytest.approx(1.0 / 6.0, abs=1e-14)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-14)

    rho6 = dicke(6, 3)
    on_diag = [rho6[i, i].real for i in range(64) if bin(i).count("1") == 3]
    assert len(on_diag) == comb(6, 3)
    assert all(v == pytest.approx(1.0 / 20.0, abs=1e-14) for v in on_diag)

    rho_zero = dicke(2, 0)
    expected = np.zeros((4, 4), dtype=complex)
    expected[0, 0] = 1.0
    np.testing.assert_array_equal(rho_zero, expected)

    with pytest.raises(ValueError):
        dicke(3, 4)


def test_ghz_states():
    rho = ghz(3)
    assert rho[0, 0] == pytest.approx(0.5)
    assert rho[7, 7] == pytest.approx(0.5)
    assert rho[0, 7] == pytest.approx(0.5)
    assert np.trace(rho).real == pytest.approx(1.0)

    bell = ghz(2)
    vec = np.array([1, 0, 0, 1]) / sqrt(2)
    np.testing.assert_allclose(bell, np.outer(vec, vec), atol=1e-14)

    # stabilizer check via an independent dense trace
    assert np.trace(kron_string((1, 1, 1)) @ rho).real == pytest.approx(1.0, abs=1e-12)
    assert expectation(rho, (1, 1, 1)) == pytest.approx(1.0, abs=1e-12)

    with pytest.raises(ValueError):
        ghz(1)


def test_white_noise_mix():
    rho = dicke(4, 2)
    np.testing.assert_array_equal(white_noise_mix(rho, 0.0), rho)
    np.testing.assert_allclose(white_noise_mix(rho, 1.0), maximally_mixed(4), atol=1e-15)
    mixed = white_noise_mix(rho, 0.5)
    eigenvalues = np.sort(np.linalg.eigvalsh(mixed))
    np.testing.assert_allclose(eigenvalues[:15], np.full(15, 1.0 / 32.0), atol=1e-12)
    assert eigenvalues[-1] == pytest.approx(1.0 / 32.0 + 0.5, abs=1e-12)
    with pytest.raises(ValueError):
        white_noise_mix(rho, 1.5)


def test_entropy_monotone_in_noise():
    rho = dicke(4, 2)
    values = [von_neumann_entropy(white_noise_mix(rho, p)) for p in np.linspace(0, 1, 9)]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


def test_dicke_marginals():
    for n, e in [(3, 1), (4, 2), (5, 2)]:
        rho = dicke(n, e)
        for q in range(n):
            np.testing.assert_allclose(
                partial_trace(rho, [q]), np.diag([1 - e / n, e / n]), atol=1e-12
            )


def test_werner_eigenvalues():
    rho = werner(0.5)
    eigenvalues = np.sort(np.linalg.eigvalsh(rho))
    np.testing.assert_allclose(eigenvalues, [1 / 8, 1 / 8, 1 / 8, 5 / 8], atol=1e-12)


def test_builders_pass_validation(rng):
    for rho in [dicke(4, 2), ghz(3), werner(0.3), white_noise_mix(ghz(2), 0.7), random_state(3, rng)]:
        validated = validate_state(rho)
        np.testing.assert_allclose(validated, rho, atol=1e-10)


def test_validate_state_diagnostics():
    valid = maximally_mixed(2)
    np.testing.assert_allclose(validate_state(valid), valid, atol=1e-15)

    with pytest.raises(StateValidationError) as err:
        validate_state(np.diag([1.5, -0.5]))
    assert err.value.violation == "positivity"

    with pytest.raises(StateValidationError) as err:
        validate_state(np.diag([1.0, 1.0]))
    assert err.value.violation == "trace"

    with pytest.raises(StateValidationError) as err:
        validate_state(np.array([[0.5, 0.3], [0.1, 0.5]]))
    assert err.value.violation == "hermiticity"

    drifted = np.diag([0.5 + 5e-13, 0.5 + 5e-13]).astype(complex)
    cleaned = validate_state(drifted)
    assert np.trace(cleaned).real == pytest.approx(1.0, abs=1e-15)

    clipped = validate_state(np.diag([1.0 + 5e-13, -5e-13]))
    assert np.linalg.eigvalsh(clipped).min() >= 0.0


def test_random_state_properties(rng):
    rho = random_state(3, rng)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.eigvalsh(rho).min() > 0.0
    low_rank = random_state(2, rng, rank=2)
    assert np.sum(np.linalg.eigvalsh(low_rank) > 1e-12) == 2


def test_state_from_spec():
    np.testing.assert_array_equal(state_from_spec({"type": "dicke", "n": 4, "e": 2}), dicke(4, 2))
    np.testing.assert_array_equal(state_from_spec('{"type": "ghz", "n": 3}'), ghz(3))
    mixed = state_from_spec({"type": "mix", "p": 0.25, "base": {"type": "dicke", "n": 2, "e": 1}})
    np.testing.assert_allclose(mixed, white_noise_mix(dicke(2, 1), 0.25), atol=1e-15)

    raw_payload = {
        "type": "raw",
        "matrix": [[[z.real, z.imag] for z in row] for row in ghz(2)],
    }
    np.testing.assert_allclose(state_from_spec(json.dumps(raw_payload)), ghz(2), atol=1e-12)


@pytest.mark.parametrize(
    "spec",
    [
        {"type": "unknown"},
        {"type": "dicke", "n": 4},
        {"type": "mix", "p": 0.5},
        {"type": "raw", "matrix": [[1.0, 0.0]]},
        "not json at all {",
    ],
)
def test_state_from_spec_rejects_bad_specs(spec):
    with pytest.raises((ValueError, json.JSONDecodeError)):
        state_from_spec(spec)
