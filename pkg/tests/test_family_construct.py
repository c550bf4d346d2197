from fractions import Fraction

import numpy as np
import pytest

from codefam import code as cd
from codefam import ensemble as ens
from codefam import family_construct as fc
from codefam import shuffler as sf
from codefam.gf import make_field

f2 = make_field(2, 1)


@pytest.fixture(scope="module")
def fixture_params():
    inner = ens.exhaustive_inner_search(f2, 4, Fraction(55, 56), Fraction(1, 28), 2)
    outer = cd.gv_search(f2, 4, 2)
    sh = sf.make_seeded_random(16, 4, 8, rng_seed=123)
    return fc.ShuffledFamilyParams(outer, inner, sh,
                                   Fraction(1, 8), Fraction(3, 7), Fraction(1, 2))


def test_plan_parameters_fixture():
    plan = fc.plan_parameters(2, Fraction(1, 8), Fraction(3, 7), Fraction(1, 2))
    assert plan.mu == Fraction(1, 28)
    assert plan.delta_in == Fraction(55, 56)
    assert plan.balance_triple == (Fraction(1, 6), Fraction(3, 28), Fraction(3, 7))
    assert plan.inner_size_min >= 1
    assert len(plan.checklist) == 5


def test_plan_parameters_infeasible():
    with pytest.raises(fc.InfeasibleAtDeskScale):
        fc.plan_parameters(2, Fraction(1, 2), Fraction(1, 2), Fraction(1, 4))
    with pytest.raises(fc.InfeasibleAtDeskScale):
        fc.plan_parameters(2, Fraction(1, 8), Fraction(1, 4), Fraction(2))


def test_params_validation(fixture_params):
    p = fixture_params
    assert (p.M, p.L, p.N, p.D) == (4, 4, 16, 8)
    assert p.k_total == 3
    assert p.rate == Fraction(3, 16)
    bad_sh = sf.make_seeded_random(16, 8, 2, rng_seed=0)
    with pytest.raises(fc.ParamMismatch):
        fc.ShuffledFamilyParams(p.outer, p.inner, bad_sh,
                                p.delta, p.eta, p.epsilon)


def test_outer_distance_certificate(fixture_params):
    cert = fixture_params.outer_distance_certificate()
    assert cert["mode"] == "measured"
    assert cert["distance"] == 2
    assert cert["passed"] is True


def test_placement_accounting(fixture_params):
    p = fixture_params
    for z in range(p.D):
        pm = fc.placement(p, z)
        # N = L*M and the shuffler is balanced, so no freezing/discarding here
        assert pm.frozen_positions() == []
        assert pm.discarded_slots() == []
        # slot_to_pos and pos_block/pos_slot are mutually inverse
        for i in range(p.M):
            for j in range(p.L):
                x = pm.slot_to_pos[i, j]
                assert pm.pos_block[x] == i and pm.pos_slot[x] == j


def test_placement_freeze_and_discard():
    # custom unbalanced shuffler: block 0 overfull, block 1 underfull
    sh = sf.Shuffler(4, 1, 2, [[0, 0, 0, 1]])
    pm = fc.PlacementMap(sh, L=2, z=0)
    assert pm.frozen_positions() == [2]          # third position of block 0
    assert pm.discarded_slots() == [(1, 1)]      # block 1 short one slot


def test_encode_decode_roundtrip(fixture_params):
    p = fixture_params
    rng = np.random.default_rng(0)
    for z in [0, 3, 7]:
        for ci in [0, 1]:
            msg = rng.integers(0, 2, size=p.k_total, dtype=np.int64)
            cw = fc.encode_member(p, z, ci, msg)
            received = list(cw)
            received[5] = None
            received[11] = None                  # floor(delta*N) = 2 erasures
            out = fc.decode_member(p, z, ci, received)
            assert np.array_equal(out, msg)


def test_member_generator_matches_encode(fixture_params):
    p = fixture_params
    G = fc.member_generator(p, 2, 1)
    msg = np.array([1, 0, 1], dtype=np.int64)
    from codefam import matrix as mx
    assert np.array_equal(mx.matvec(f2, G.T, msg), fc.encode_member(p, 2, 1, msg))


def test_build_family_and_indexing(fixture_params):
    p = fixture_params
    fam = fc.build_family(p)
    assert len(fam) == p.D * len(p.inner) == 16
    assert (fam.n, fam.k) == (16, 3)
    assert fam.rate == p.rate
    G = fc.member_generator(p, 3, 1)
    assert np.array_equal(fam.codes[fc.member_index(p, 3, 1)].G, G)
    assert ens.verify_family(fam).passed
