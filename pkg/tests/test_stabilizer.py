import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qverify.errors import (
    BadDimError,
    DependentGeneratorsError,
    InconsistentSignsError,
    NonCommutingError,
    ValidationError,
)
from qverify.qcore import Ket, basis_ket
from qverify.stabilizer import (
    ParityCheck,
    PauliString,
    StabilizerGroup,
    all_zeros_group,
    cluster_group,
    full_strategy,
    full_strategy_q,
    generator_strategy,
    generator_strategy_q,
    ghz_group,
    ghz_state,
    group_from_json,
    group_to_json,
    preset_group,
    stabilizer_metrics,
    stabilizer_sample_count,
    subset_strategy,
)
from qverify.strategy import metrics

PRESETS = ["bell", "ghz3", "ghz4", "cluster4"]

pauli_labels = st.text(alphabet="IXYZ", min_size=1, max_size=4)


def test_pauli_label_round_trip():
    # positive sign renders bare, negative keeps its prefix
    for label in ("XX", "-YZ", "IZXI", "-Y"):
        p = PauliString.from_label(label)
        assert p.label == label
    assert PauliString.from_label("+XX").label == "XX"
    with pytest.raises(ValidationError):
        PauliString.from_label("+AB")
    with pytest.raises(ValidationError):
        PauliString.from_label("")


@given(a=pauli_labels, b=pauli_labels)
@settings(max_examples=60, deadline=None)
def test_symplectic_product_consistency(a, b):
    # pad to equal length
    width = max(len(a), len(b))
    a = a.ljust(width, "I")
    b = b.ljust(width, "I")
    pa = PauliString.from_label(a)
    pb = PauliString.from_label(b)
    if pa.commutes(pb):
        prod = pa * pb
        assert np.max(np.abs(prod.matrix() - pa.matrix() @ pb.matrix())) < 1e-12
    else:
        with pytest.raises(InconsistentSignsError):
            pa * pb


def test_anticommuting_pair_raises_on_product():
    x = PauliString.from_label("X")
    z = PauliString.from_label("Z")
    assert not x.commutes(z)
    with pytest.raises(InconsistentSignsError):
        x * z


def test_apply_to_index_matches_matrix():
    for label in ("+XZ", "-YY", "+ZI", "-XY", "+YZXI"):
        p = PauliString.from_label(label)
        mat = p.matrix()
        dim = 2 ** len(label.lstrip("+-"))
        for col in range(dim):
            new_index, coeff = p.apply_to_index(col)
            expected = mat[:, col]
            assert abs(expected[new_index] - coeff) < 1e-12
            assert np.count_nonzero(expected) == 1


def test_pauli_weight():
    assert PauliString.from_label("+XIZ").weight() == 2
    assert PauliString.from_label("+III").weight() == 0
    assert PauliString.from_label("+III").is_identity_letters


def test_group_rejects_non_commuting():
    with pytest.raises(NonCommutingError):
        StabilizerGroup(
            (PauliString.from_label("XI"), PauliString.from_label("ZI"))
        )


def test_group_rejects_dependent_generators():
    with pytest.raises(DependentGeneratorsError):
        StabilizerGroup(
            (
                PauliString.from_label("XX"),
                PauliString.from_label("ZZ"),
                PauliString.from_label("-YY"),
            )
        )


def test_signed_generators_stabilize_the_other_bell_state():
    # {-XX, ZZ} is a consistent group; its fixed state is
    # (|00> - |11>)/sqrt(2)
    group = StabilizerGroup(
        (PauliString.from_label("-XX"), PauliString.from_label("ZZ"))
    )
    psi = group.state()
    expect = np.array([1.0, 0.0, 0.0, -1.0], dtype=complex) / math.sqrt(2.0)
    assert np.max(np.abs(psi.amplitudes - expect)) < 1e-12


def test_group_rejects_identity_generator():
    with pytest.raises(DependentGeneratorsError):
        StabilizerGroup((PauliString.from_label("+II"),))


def test_ghz_group_elements():
    group = ghz_group(3)
    assert group.num_qubits == 3
    assert group.num_generators == 3
    assert group.is_maximal
    assert len(group.elements) == 8
    assert group.elements[0].label == "III"


def test_ghz_state_matches_group_fixed_point():
    for n in (2, 3, 4):
        group = ghz_group(n)
        psi = group.state()
        expect = np.zeros(2**n, dtype=complex)
        expect[0] = expect[-1] = 1.0 / math.sqrt(2.0)
        assert np.max(np.abs(psi.amplitudes - expect)) < 1e-12
        assert np.max(np.abs(psi.amplitudes - ghz_state(n).amplitudes)) < 1e-15
        # every element fixes the state
        for element in group.elements:
            mat = element.matrix()
            assert np.max(np.abs(mat @ psi.amplitudes - psi.amplitudes)) < 1e-12


def test_cluster_and_zeros_states():
    cluster = cluster_group(4)
    psi = cluster.state()
    for g in cluster.generators:
        assert np.max(np.abs(g.matrix() @ psi.amplitudes - psi.amplitudes)) < 1e-12
    zeros = all_zeros_group(3)
    assert np.max(np.abs(zeros.state().amplitudes - basis_ket(8, 0).amplitudes)) < 1e-15


def test_preset_group_names():
    assert preset_group("bell").num_qubits == 2
    assert preset_group("ghz5").num_qubits == 5
    assert preset_group("cluster3").num_qubits == 3
    assert preset_group("zeros2").num_qubits == 2
    with pytest.raises(ValidationError):
        preset_group("w4")


def test_group_json_round_trip():
    group = cluster_group(3)
    labels = group_to_json(group)
    again = group_from_json(labels)
    assert group_to_json(again) == labels
    assert again.num_qubits == 3


@pytest.mark.parametrize("preset", PRESETS)
def test_hein_identity(preset):
    # averaging all group elements projects onto the stabilized state
    group = preset_group(preset)
    psi = group.state()
    total = sum(e.matrix() for e in group.elements) / len(group.elements)
    assert np.max(np.abs(total - np.outer(psi.amplitudes, psi.amplitudes.conj()))) <= 1e-10


@pytest.mark.parametrize("preset", PRESETS)
def test_full_strategy_two_eigenvalue_form(preset):
    group = preset_group(preset)
    strat = full_strategy(group)
    n = group.num_qubits
    q = full_strategy_q(n)
    psi = group.state().amplitudes
    expected = np.outer(psi, psi.conj()) * (1.0 - q) + q * np.eye(2**n)
    assert np.max(np.abs(strat.omega - expected)) < 1e-12
    assert abs(metrics(strat).q - q) < 1e-10


@pytest.mark.parametrize("preset", PRESETS)
def test_generator_strategy_worst_case(preset):
    group = preset_group(preset)
    strat = generator_strategy(group)
    n = group.num_qubits
    assert abs(metrics(strat).q - generator_strategy_q(n)) < 1e-10
    assert abs(metrics(strat).q - (1.0 - 1.0 / n)) < 1e-10


def test_closed_form_q_values():
    assert abs(full_strategy_q(2) - 1.0 / 3.0) < 1e-15
    assert abs(full_strategy_q(3) - 3.0 / 7.0) < 1e-15
    assert abs(generator_strategy_q(3) - 2.0 / 3.0) < 1e-15
    assert abs(generator_strategy_q(1) - 0.0) < 1e-15


def test_full_strategy_matches_bell_strategy():
    from qverify.strategy import bell_strategy

    direct = bell_strategy()
    via_group = full_strategy(preset_group("bell"))
    assert np.max(np.abs(direct.omega - via_group.omega)) == 0.0


def test_stabilizer_metrics_closed_form():
    group = ghz_group(5)
    m = stabilizer_metrics(group, "full")
    assert abs(m.q - full_strategy_q(5)) < 1e-15
    assert m.trace == 2**4
    with pytest.raises(ValidationError):
        stabilizer_metrics(group, "half")


def test_stabilizer_sample_count_frozen_values():
    group = ghz_group(3)
    full = stabilizer_sample_count(group, "full", 0.01, 0.1)
    gens = stabilizer_sample_count(group, "generators", 0.01, 0.1)
    assert full.n_exact == 402
    assert abs(full.n_asymptotic - 402.95239127395797) < 1e-9
    assert gens.n_exact == 690
    assert abs(gens.n_asymptotic - 690.7755278982138) < 1e-9


def test_stabilizer_sample_count_beyond_dense_limit():
    # closed forms keep working where dense construction would not
    group = ghz_group(10)
    report = stabilizer_sample_count(group, "full", 0.01, 0.1)
    assert report.n_exact >= 1
    with pytest.raises(BadDimError):
        full_strategy(group)


def test_parity_check_columns():
    group = ghz_group(3)
    check = ParityCheck.build(group)
    n = group.num_qubits
    table = check.matrix
    assert table.shape == (n, 2**n)
    # column 0 passes everything; each syndrome appears exactly once
    assert np.all(table[:, 0] == 1)
    patterns = {tuple(int(v) for v in table[:, k]) for k in range(2**n)}
    assert len(patterns) == 2**n
    # exactly n columns fail exactly one generator
    sums = table.sum(axis=0)
    assert int(np.sum(sums == n - 1)) == n
    assert check.special_columns == (1, 2, 4)


def test_parity_check_eigenbasis_orthonormal():
    group = cluster_group(3)
    check = ParityCheck.build(group)
    basis = check.eigenbasis
    gram = basis.conj().T @ basis
    assert np.max(np.abs(gram - np.eye(basis.shape[1]))) < 1e-10


def test_parity_check_uniform_weights_bound():
    group = ghz_group(4)
    check = ParityCheck.build(group)
    n = group.num_qubits
    acceptance = check.weighted_pass(np.full(n, 1.0 / n))
    assert abs(acceptance[0] - 1.0) < 1e-12
    # away from the stabilized state the best fooling column reaches 1 - 1/n
    assert abs(max(acceptance[1:]) - (1.0 - 1.0 / n)) < 1e-12


def test_parity_check_eigenvalue_signs():
    group = ghz_group(3)
    check = ParityCheck.build(group)
    for j in range(3):
        for s in range(8):
            expected = -1 if (s >> (2 - j)) & 1 else 1
            assert check.eigenvalue(j, s) == expected


@pytest.mark.parametrize("preset", PRESETS)
def test_all_generator_subset_is_complete(preset):
    group = preset_group(preset)
    n = group.num_qubits
    indices = [1 << j for j in range(n)]
    report = subset_strategy(group, indices)
    assert not report.degenerate
    assert report.stabilized_dimension == 1
    assert report.fooling_state is None
    assert abs(metrics(report.strategy).q - generator_strategy_q(n)) < 1e-10


@pytest.mark.parametrize("preset", PRESETS)
def test_every_generator_drop_is_degenerate(preset):
    group = preset_group(preset)
    n = group.num_qubits
    psi = group.state()
    for dropped in range(n):
        indices = [1 << j for j in range(n) if j != dropped]
        report = subset_strategy(group, indices)
        assert report.degenerate
        assert report.stabilized_dimension == 2
        fooling = report.fooling_state
        assert fooling is not None
        assert report.fooling_acceptance >= 1.0 - 1e-10
        assert abs(fooling.inner(psi)) < 1e-10


def test_subset_strategy_bell_single_element():
    group = preset_group("bell")
    report = subset_strategy(group, [1])
    assert report.degenerate
    fooling = report.fooling_state
    expect = np.zeros(4, dtype=complex)
    expect[1] = expect[2] = 1.0 / math.sqrt(2.0)
    assert np.max(np.abs(fooling.amplitudes - expect)) < 1e-12


def test_subset_strategy_validates_indices():
    group = preset_group("bell")
    with pytest.raises(ValidationError):
        subset_strategy(group, [])
    with pytest.raises(ValidationError):
        subset_strategy(group, [0])
    with pytest.raises(ValidationError):
        subset_strategy(group, [4])
    # duplicate indices are normalized away rather than rejected
    deduped = subset_strategy(group, [1, 1])
    assert deduped.degenerate


def test_subset_strategy_redundant_but_complete():
    # three elements of the bell group with full rank: any two of
    # {XX, ZZ, -YY} generate, adding the third keeps it complete
    group = preset_group("bell")
    report = subset_strategy(group, [1, 2, 3])
    assert not report.degenerate
    assert abs(metrics(report.strategy).q - 1.0 / 3.0) < 1e-10


def test_subset_strategy_dependent_pair_degenerate():
    # {XX, -YY} generate only a rank-2... both present: element 3 = XX*ZZ
    # indices {1, 3} give generators XX and -YY whose product is ZZ: rank 2
    group = preset_group("bell")
    report = subset_strategy(group, [1, 3])
    assert not report.degenerate


def test_mixed_element_subsets_of_ghz3():
    group = preset_group("ghz3")
    # elements 3 = g0*g1 and 5 = g0*g2 and 6 = g1*g2: their masks are
    # dependent (3 ^ 5 = 6), rank 2 < 3, so the subset is degenerate
    report = subset_strategy(group, [3, 5, 6])
    assert report.degenerate
    assert report.fooling_acceptance >= 1.0 - 1e-10
    # adding any single generator completes the basis
    report2 = subset_strategy(group, [3, 5, 6, 1])
    assert not report2.degenerate
