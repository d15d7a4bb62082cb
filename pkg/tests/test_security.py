import math
import os
from math import comb

import pytest

from egmc.egmc import EgmcParams
from egmc import security
from egmc.security import (cost_algebraic, cost_hybrid, cost_kernel, cost_kernel_hybrid, cost_structural,
                           cost_support_minors, dual_attack_threshold, estimate, gaussian_binomial,
                           get_set, mrd_quantities, registry, size_matches, sm_equations, sm_monomials,
                           support_minors_base, _sm_best)

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def P(q, k, m, l1, l2, r):
    return EgmcParams(q, m, m, k, l1, l2, r, strict=False)


@pytest.fixture(scope="module")
def rows():
    return security.table_rows()


# --- structural ---

def test_structural_examples():
    assert cost_structural(P(2, 35, 43, 2, 2, 4)) == 158
    assert cost_structural(P(2, 25, 37, 3, 3, 6)) == 189
    assert cost_structural(P(2, 35, 43, 0, 0, 4)) == 0
    assert cost_structural(P(16, 13, 23, 1, 1, 5)) == 4 * (23 + 14)


# --- kernel ---

def test_kernel_anchors():
    assert cost_kernel(P(2, 17, 37, 3, 3, 10)) == 179
    assert cost_kernel(P(2, 25, 37, 3, 3, 6)) == 164
    assert cost_kernel(P(2, 35, 43, 2, 2, 4)) == 158


def test_kernel_arithmetic():
    # K = 629, ceil(629/40) = 16: 10 * 16 + 2 log2 629 = 178.59
    assert math.ceil(629 / 40) == 16
    assert math.ceil(160 + 2 * math.log2(629)) == 179
    p = P(2, 35, 43, 2, 2, 0)
    assert cost_kernel(p) == math.ceil(2 * math.log2(35 * 43))


def test_monotonicity():
    base = (2, 25, 37, 3, 3)
    for r in range(1, 12):
        assert cost_kernel(P(*base, r)) <= cost_kernel(P(*base, r + 1))
        assert cost_structural(P(*base, r)) == cost_structural(P(*base, r + 1))
    for l in range(0, 5):
        assert cost_structural(P(2, 25, 37, l, 3, 6)) <= cost_structural(P(2, 25, 37, l + 1, 3, 6))
        assert cost_structural(P(2, 25, 37, 3, l, 6)) <= cost_structural(P(2, 25, 37, 3, l + 1, 6))


# --- support minors ---

def test_sm_counts_small():
    assert sm_monomials(10, 3, 2, 1) == comb(10, 2) * comb(3, 1) == 135
    assert sm_equations(3, 10, 3, 2, 1) == comb(10, 3) * comb(2, 0) * comb(3, 1) == 360


def test_sm_counts_alternating_sum():
    # b = 2 by hand: i = 1 and i = 2 terms
    m, n, K, r = 4, 9, 5, 2
    expected = comb(n, r + 1) * comb(m, 1) * comb(K, 1) - comb(n, r + 2) * comb(m + 1, 2) * comb(K, 0)
    assert sm_equations(m, n, K, r, 2) == expected


def test_sm_field_equation_counts():
    # over F_2 only squarefree monomials of degree 1..b
    assert sm_monomials(10, 3, 2, 2, field_eqs=True) == comb(10, 2) * (3 + 3)
    assert sm_monomials(10, 3, 2, 1, field_eqs=True) == sm_monomials(10, 3, 2, 1)


def test_sm_admissibility():
    # b = 1 with too few columns: N_1 = C(n, r+1) m K is far below M_1 - 1
    bits, b, n_p = _sm_best(3, 3, 3, 40, 2, 2.0, [1])
    assert math.isinf(bits)
    with pytest.raises(ValueError):
        cost_support_minors(P(16, 17, 29, 2, 1, 8))


def test_sm_exact_big_integers():
    p = get_set("egmc256c").params
    N = sm_equations(p.rows, 81, p.K + 1, p.r, 8, True)
    assert isinstance(N, int) and N.bit_length() > 64  # past exact float precision
    assert abs(security._log2_int(N) - math.log2(N)) < 1e-9


def test_hybrid_with_no_guessing_is_direct():
    p = P(2, 35, 43, 2, 2, 4)
    r = p.r
    direct = cost_support_minors(p, b_range=range(1, r + 2)) if not math.isinf(
        _sm_best(2, p.rows, 45, p.K, r, 2.0)[0]) else (math.inf, 0)
    assert cost_hybrid(p, max_a=0)[0] == direct[0]
    small = EgmcParams.square(2, 8, 2, 1, 1, 2)
    assert cost_hybrid(small, max_a=0)[0] == cost_support_minors(small, b_range=range(1, 4))[0]


@pytest.mark.parametrize("name", ["egmc128a", "egmc128c", "egmcalt128a", "egmcalt192c"])
def test_hybrid_not_above_direct_with_same_base(name):
    p = get_set(name).params
    cols = p.m + p.l2

    def full_b(q, rows, c, K, r):
        return _sm_best(q, rows, c, K, r, 2.0, range(1, cols - r + 1))[0]

    assert cost_hybrid(p, full_b, max_a=2)[0] <= cost_support_minors(p)[0]


def test_alg_and_hyb_anchor_rows():
    assert abs(cost_algebraic(P(2, 35, 43, 2, 2, 4))[0] - 158) <= 8
    assert abs(cost_kernel_hybrid(P(2, 17, 37, 3, 3, 10))[0] - 170) <= 8


def test_direct_support_minors_egmc128a():
    # without column guessing the instance is much harder than the printed Alg. value
    bits, b = cost_support_minors(P(2, 35, 43, 2, 2, 4))
    assert 195 < bits < 205 and b == 10


# --- distance and dual attack ---

def test_gaussian_binomial():
    assert gaussian_binomial(3, 1, 2) == 7
    assert gaussian_binomial(4, 2, 2) == 35
    assert gaussian_binomial(5, 0, 3) == 1 and gaussian_binomial(2, 3, 2) == 0
    for n in range(1, 7):
        for k in range(n + 1):
            assert gaussian_binomial(n, k, 2) == gaussian_binomial(n, n - k, 2)


def test_mrd_quantities():
    q = mrd_quantities(P(2, 35, 43, 2, 2, 4))
    assert q.d0 == 43 - 35 + 1 + 2 + 70 // 45 == 12
    assert q.approx_exponent == 43 + 6 * 34 - 1 == 246
    assert abs(q.log2_codewords - q.approx_exponent) < 3
    # the q^128 floor is claimed for the main table only
    for name in security.MAIN_SETS:
        assert mrd_quantities(get_set(name).params).approx_exponent >= 128
    assert mrd_quantities(get_set("egmcalt128c").params).approx_exponent == 118


def test_dual_attack_threshold():
    assert dual_attack_threshold(P(2, 35, 43, 0, 0, 4)) == 35
    assert dual_attack_threshold(P(2, 35, 43, 2, 2, 4)) == 31
    assert dual_attack_threshold(P(2, 3, 43, 4, 4, 1)) is None


# --- reports and registry ---

def test_estimate_report():
    rep = estimate(P(2, 35, 43, 2, 2, 4))
    assert rep.structural_bits == 158 and rep.kernel_bits == 158
    assert not rep.polynomial_distinguisher
    assert all(v >= 0 for v in rep.as_dict().values() if isinstance(v, (int, float)))
    assert estimate(P(2, 35, 43, 0, 0, 4)).polynomial_distinguisher


def test_registry_contents():
    names = [s.name for s in registry()]
    assert len(names) == 16 == len(set(names))
    assert security.MAIN_SETS == tuple(names[:8])
    s = get_set("egmc128a")
    assert (s.params.q, s.params.k, s.params.m, s.params.l1, s.params.l2, s.params.r) == (2, 35, 43, 2, 2, 4)
    assert s.claimed["Alg"] == 158 and s.claimed["Hyb"] == 145
    with pytest.raises(KeyError):
        get_set("nosuch")
    assert not get_set("egmcalt256b").params.decodable


def test_size_rounding():
    assert size_matches(97.825, 98) and size_matches(65.0, 65) and size_matches(66.75, 66)
    assert not size_matches(38.882, 33)


def test_sizes_of_main_rows():
    for name in security.MAIN_SETS:
        s = get_set(name)
        assert size_matches(security.pk_bits(s.params) / 8000, s.claimed["pk_kB"]), name
        assert size_matches(security.ct_bits(s.params) / 8, s.claimed["ct_B"]), name


def test_known_size_outlier():
    # the printed egmcalt128c sizes are those of l2 = 2, not l2 = 5
    s = get_set("egmcalt128c")
    assert not size_matches(security.pk_bits(s.params) / 8000, s.claimed["pk_kB"])
    alt = P(16, 7, 23, 0, 2, 8)
    assert size_matches(security.pk_bits(alt) / 8000, 33) and size_matches(security.ct_bits(alt) / 8, 207)


def test_golden_table(rows):
    with open(os.path.join(GOLDEN, "registry.txt")) as f:
        assert security.format_table(rows) == f.read()
    with open(os.path.join(GOLDEN, "registry.csv")) as f:
        assert security.format_csv(rows) == f.read()


def test_table_is_deterministic(rows):
    assert security.table_rows(registry()[:3]) == rows[:3]
