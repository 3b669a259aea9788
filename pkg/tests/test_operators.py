"""Norms, dominated operators, mapping bounds, band decomposition."""

import csv
import math

import numpy as np
import pytest

from heatframe import (
    ContractError,
    DomainError,
    EnvelopeParams,
    PreconditionError,
    apply_operator,
    band_decompose,
    band_index,
    build_maximal_net,
    build_partition,
    decomposition_to_csv,
    dominated_operator,
    estimate_doubling,
    heat_kernel,
    lp_norm,
    make_operator,
    random_polynomials,
    spectral_multiplier,
    verify_band_decomposition,
    verify_schur,
    verify_young,
)


def test_lp_norm_hand_values():
    w = np.array([1.0, 2.0, 4.0])
    f = np.array([1.0, -2.0, 3.0])
    assert lp_norm(w, f, 1.0) == pytest.approx(17.0)
    assert lp_norm(w, f, 2.0) == pytest.approx(math.sqrt(45.0))
    assert lp_norm(w, f, math.inf) == 3.0
    with pytest.raises(DomainError):
        lp_norm(w, f, 0.5)


def test_low_pass_projector_on_square(legendre_space, legendre_basis):
    # Projecting x^2 onto span{1, x} leaves the mean: <x^2, 1>/<1, 1> = 1/3.
    projector = spectral_multiplier(
        legendre_basis, lambda beta: (beta <= 2.0).astype(float)
    )
    projected = apply_operator(
        legendre_space, projector, legendre_space.points**2
    )
    assert projected == pytest.approx(np.full(64, 1.0 / 3.0), abs=1e-12)


def test_heat_multiplier_matches_heat_kernel(legendre_basis):
    t = 0.4
    kernel = heat_kernel(legendre_basis, t)
    multiplier = spectral_multiplier(
        legendre_basis, lambda beta: np.exp(-t * beta)
    )
    scale = np.abs(kernel.table).max()
    assert np.abs(multiplier.table - kernel.table).max() <= 1e-13 * scale


def test_domination_certificate_fit_and_rejection(legendre_space, legendre_basis):
    delta = 0.2
    params = EnvelopeParams(delta=delta, sigma_exp=5.0, k=2)
    table = heat_kernel(legendre_basis, delta**2).table
    op = dominated_operator(legendre_space, table, params)
    assert op.domination is not None
    assert op.domination.a_prime > 0.0
    with pytest.raises(ContractError):
        dominated_operator(
            legendre_space, table, params, a_prime=op.domination.a_prime / 2.0
        )


def _doubling(space):
    rng = np.random.default_rng(7)
    radii = rng.uniform(0.05, space.diameter / 3.0, size=12)
    return estimate_doubling(space, space.points, radii)


def test_young_bound_holds_for_heat_kernel(legendre_space, legendre_basis, rng):
    delta = 0.2
    profile = _doubling(legendre_space)
    params = EnvelopeParams(delta=delta, sigma_exp=2 * profile.k + 1, k=profile.k)
    op = dominated_operator(
        legendre_space, heat_kernel(legendre_basis, delta**2).table, params
    )
    trials = random_polynomials(legendre_basis, 20, 16, rng)
    for p, q in ((1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (1.0, math.inf), (2.0, math.inf)):
        report = verify_young(legendre_space, op, profile, p, q, trials)
        assert report.passed, (p, q, report.margin)
    with pytest.raises(DomainError):
        verify_young(legendre_space, op, profile, 2.0, 1.0, trials)
    bare = make_operator(op.table)
    with pytest.raises(PreconditionError):
        verify_young(legendre_space, bare, profile, 1.0, 2.0, trials)


def test_young_requires_wide_envelope_exponent(legendre_space, legendre_basis, rng):
    profile = _doubling(legendre_space)
    k = profile.k
    params = EnvelopeParams(delta=0.2, sigma_exp=2 * k + 0.5, k=k)
    op = dominated_operator(
        legendre_space, heat_kernel(legendre_basis, 0.04).table, params
    )
    trials = random_polynomials(legendre_basis, 4, 8, rng)
    with pytest.raises(PreconditionError):
        verify_young(legendre_space, op, profile, 1.0, 2.0, trials)


def test_schur_bound_holds(legendre_space, legendre_basis, rng):
    op = make_operator(heat_kernel(legendre_basis, 0.3).table)
    trials = random_polynomials(legendre_basis, 10, 16, rng)
    for p, q, r in ((2.0, 2.0, 1.0), (1.0, 2.0, 2.0)):
        report = verify_schur(legendre_space, op, p, q, r, trials)
        assert report.passed, (p, q, r, report.margin)
    with pytest.raises(DomainError):
        verify_schur(legendre_space, op, 2.0, 2.0, 2.0, trials)


def test_band_index_breakpoints():
    # Block 0 holds beta <= 1; block j holds 2^(2(j-1)) < beta <= 2^(2j).
    assert band_index(0.0) == 0
    assert band_index(1.0) == 0
    assert band_index(1.0001) == 1
    assert band_index(4.0) == 1
    assert band_index(4.1) == 2
    assert band_index(16.0) == 2
    assert band_index(17.0) == 3


def test_blocks_partition_all_indices(legendre_space, legendre_basis):
    net = build_partition(legendre_space, build_maximal_net(legendre_space, 0.2))
    f = legendre_basis.values[3] + 0.5 * legendre_basis.values[17]
    decomp = band_decompose(legendre_basis, net, f)
    seen = sorted(i for _, idx in decomp.blocks for i in idx)
    assert seen == list(range(legendre_basis.size))


def test_single_mode_concentrates_in_one_block(legendre_space, legendre_basis):
    net = build_partition(legendre_space, build_maximal_net(legendre_space, 0.2))
    f = legendre_basis.values[3]  # beta_3 = 12, so block 2 (4 < 12 <= 16)
    decomp = band_decompose(legendre_basis, net, f)
    energies = dict(zip((j for j, _ in decomp.blocks), decomp.block_energies))
    assert energies[2] == pytest.approx(1.0, rel=1e-12)
    others = sum(v for j, v in energies.items() if j != 2)
    assert others <= 1e-20
    assert decomp.reconstruction == pytest.approx(f, abs=1e-12)


def test_band_reports_pass(legendre_space, legendre_basis, rng):
    net = build_partition(legendre_space, build_maximal_net(legendre_space, 0.2))
    f = random_polynomials(legendre_basis, 1, legendre_basis.degree, rng)[0]
    decomp, reports = verify_band_decomposition(legendre_basis, net, f)
    assert all(r.passed for r in reports)
    assert {r.check_id for r in reports} == {
        "band.parseval",
        "band.reconstruction",
        "frame.ratio",
    }
    assert math.isfinite(decomp.frame_ratio) and decomp.frame_ratio >= 1.0


def test_decomposition_csv_layout(tmp_path, legendre_space, legendre_basis, rng):
    net = build_partition(legendre_space, build_maximal_net(legendre_space, 0.3))
    f = random_polynomials(legendre_basis, 1, 10, rng)[0]
    decomp = band_decompose(legendre_basis, net, f)
    path = tmp_path / "decomp.csv"
    decomposition_to_csv(decomp, str(path))
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["j", "center_index", "coefficient"]
    assert len(rows) == 1 + len(decomp.blocks) * len(decomp.center_indices)
